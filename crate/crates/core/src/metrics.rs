//! Region statistics of reconstructions of piecewise-constant phantoms.

use crate::geometry::ImageGrid;
use crate::phantom::Phantom;

/// Pixels covered by the same set of disks, at least `margin` pixels from
/// every disk boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Plateau {
    /// Indices of the covering disks.
    pub disks: Vec<usize>,
    /// Sum of the covering densities.
    pub expected: f64,
    pub mean: f64,
    pub pixels: usize,
}

/// Plateaus of a disk phantom, ordered by covering set. The background
/// (no covering disk) is excluded. Gaussian components are ignored.
pub fn plateaus(img: &ImageGrid, phantom: &Phantom, margin: f64) -> Vec<Plateau> {
    let spec = img.spec();
    let clearance = margin * spec.pixel_size();
    let mut groups: std::collections::BTreeMap<Vec<usize>, (f64, usize)> = Default::default();
    for row in 0..spec.n_px {
        for col in 0..spec.n_px {
            let x = spec.pixel_center(row, col);
            let mut cover = Vec::new();
            let mut clear = true;
            for (i, d) in phantom.disks.iter().enumerate() {
                let r = (x[0] - d.center[0]).hypot(x[1] - d.center[1]);
                if (r - d.radius).abs() < clearance {
                    clear = false;
                    break;
                }
                if r < d.radius {
                    cover.push(i);
                }
            }
            if clear && !cover.is_empty() {
                let e = groups.entry(cover).or_default();
                e.0 += img.get(row, col);
                e.1 += 1;
            }
        }
    }
    groups
        .into_iter()
        .map(|(disks, (sum, pixels))| Plateau {
            expected: disks.iter().map(|&i| phantom.disks[i].density).sum(),
            disks,
            mean: sum / pixels as f64,
            pixels,
        })
        .collect()
}

/// `q`-quantile of `|value|` over pixels at least `margin` pixels outside
/// every disk; `None` if there are none.
pub fn background_quantile(img: &ImageGrid, phantom: &Phantom, margin: f64, q: f64) -> Option<f64> {
    let spec = img.spec();
    let clearance = margin * spec.pixel_size();
    let mut out: Vec<f64> = Vec::new();
    for row in 0..spec.n_px {
        for col in 0..spec.n_px {
            let x = spec.pixel_center(row, col);
            let outside = phantom
                .disks
                .iter()
                .all(|d| (x[0] - d.center[0]).hypot(x[1] - d.center[1]) >= d.radius + clearance);
            if outside {
                out.push(img.get(row, col).abs());
            }
        }
    }
    if out.is_empty() {
        return None;
    }
    out.sort_by(f64::total_cmp);
    let idx = (q.clamp(0.0, 1.0) * (out.len() - 1) as f64).round() as usize;
    Some(out[idx])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;

    #[test]
    fn exact_image_has_exact_plateaus() {
        let p = Phantom::overlapping_disks();
        let spec = GridSpec::new(64, 1.0).unwrap();
        let img = p.sample_centers(spec);
        let found = plateaus(&img, &p, 1.0);
        assert_eq!(found.len(), 3);
        for pl in &found {
            assert!((pl.mean - pl.expected).abs() < 1e-12, "{pl:?}");
            assert!(pl.pixels > 0);
        }
        let expected: Vec<f64> = found.iter().map(|p| p.expected).collect();
        assert_eq!(expected, vec![0.3, 0.3 + 0.7, 0.7]);
        assert_eq!(background_quantile(&img, &p, 1.0, 0.99), Some(0.0));
    }

    #[test]
    fn margin_shrinks_regions() {
        let p = Phantom::centered_disk();
        let spec = GridSpec::new(64, 1.0).unwrap();
        let img = p.sample_centers(spec);
        let a = plateaus(&img, &p, 0.0)[0].pixels;
        let b = plateaus(&img, &p, 3.0)[0].pixels;
        assert!(b < a);
        // pixels of a disk of radius 0.5 - 3 px
        let r = 16.0 - 3.0;
        assert!((b as f64 - std::f64::consts::PI * r * r).abs() < 4.0 * r);
    }
}
