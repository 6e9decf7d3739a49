use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use conetx::cone::cone_forward_sinogram;
use conetx::inversion::{
    compton_reconstruct, compton_reconstruct_from_data, invert_mu_weighted, invert_sine_weighted,
    CameraConfig, MuWeight,
};
use conetx::io::{
    parse_phantom, read_cone_sinogram, read_radon_sinogram, write_cone_sinogram, write_pgm16,
    write_radon_sinogram, write_raw_image, write_scaling_csv,
};
use conetx::metrics::{background_quantile, plateaus};
use conetx::xforms::{fbp_radon_inversion, funk_hecke_lambda};
use conetx::{sphere_area, GridSpec, ImageGrid, Phantom};

use crate::settings::{Pair, Settings};
use crate::verify::{self, Identity};

pub enum Outcome {
    Success,
    ThresholdFailed(String),
}

/// Margin, in pixels, between plateau regions and disk boundaries.
const PLATEAU_MARGIN_PX: f64 = 3.0;

fn load_phantom(path: &Path) -> Result<Phantom> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading phantom {}", path.display()))?;
    parse_phantom(&text).with_context(|| format!("parsing phantom {}", path.display()))
}

/// `<stem>.raw`, `<stem>.pgm` and `<stem>_scaling.csv`.
fn write_image(out: &Path, stem: &str, img: &ImageGrid) -> Result<()> {
    write_raw_image(out.join(format!("{stem}.raw")), img)?;
    let scaling = write_pgm16(out.join(format!("{stem}.pgm")), img)?;
    write_scaling_csv(out.join(format!("{stem}_scaling.csv")), &scaling)?;
    Ok(())
}

fn write_csv<const N: usize>(path: PathBuf, header: [&str; N], rows: &[[String; N]]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn phantom(mut s: Settings, out: &Path) -> Result<Outcome> {
    let path = s.required_path("phantom")?;
    let spec = GridSpec::new(s.get("npx", 256)?, s.get("extent", 1.0)?)?;
    s.finish(out)?;
    let p = load_phantom(&path)?;
    write_image(out, "phantom", &p.rasterize(spec))?;
    Ok(Outcome::Success)
}

fn camera(s: &mut Settings) -> Result<CameraConfig> {
    Ok(CameraConfig::new(
        s.get("extent", 1.0)?,
        s.get("perside", 257)?,
        s.get("nbeta", 200)?,
        s.get("npsi", 200)?,
    )?)
}

pub fn forward(mut s: Settings, out: &Path) -> Result<Outcome> {
    let path = s.required_path("phantom")?;
    let mode = s.get("mode", "cone".to_string())?;
    match mode.as_str() {
        "cone" => {
            let vertex: Option<Pair> = s.optional("vertex")?;
            let (vertices, nb, np) = match vertex {
                Some(v) => (vec![v.0], s.get("nbeta", 200)?, s.get("npsi", 200)?),
                None => {
                    let cam = camera(&mut s)?;
                    (cam.detectors(), cam.n_beta, cam.n_psi)
                }
            };
            s.finish(out)?;
            let p = load_phantom(&path)?;
            let data = cone_forward_sinogram(&p, &vertices, nb, np)?;
            write_cone_sinogram(out.join("cone.bin"), &data)?;
        }
        "radon" => {
            let extent: f64 = s.get("extent", 1.0)?;
            let n_theta = s.get("ntheta", 180)?;
            let n_s = s.get("ns", 513)?;
            s.finish(out)?;
            let p = load_phantom(&path)?;
            let sino = p.radon_sinogram(n_theta, n_s, extent * SQRT_2)?;
            write_radon_sinogram(out.join("radon.bin"), &sino)?;
        }
        other => bail!("unknown forward mode {other:?}; expected cone or radon"),
    }
    Ok(Outcome::Success)
}

pub fn reconstruct(mut s: Settings, out: &Path) -> Result<Outcome> {
    let method = s.get("method", "compton".to_string())?;
    let truth_path = s.path("phantom");
    let npx = s.get("npx", 256)?;
    let spec = GridSpec::new(npx, s.get("extent", 1.0)?)?;
    let threshold: Option<f64> = s.optional("max_rel_l2")?;
    let truth = truth_path.as_deref().map(load_phantom).transpose()?;
    let need_truth = || {
        truth
            .as_ref()
            .with_context(|| format!("method {method} needs a phantom"))
    };
    let mut report: Vec<[String; 2]> = vec![["method".into(), method.clone()]];
    let started = Instant::now();
    let image = match method.as_str() {
        "thm2" => {
            let nb = s.get("nbeta", 200)?;
            let np = s.get("npsi", 200)?;
            let mu = match s.get("mu", "uniform".to_string())?.as_str() {
                "uniform" => MuWeight::uniform(nb)?,
                "delta" => MuWeight::delta(nb, 0)?,
                other => bail!("unknown axis weight {other:?}; expected uniform or delta"),
            };
            s.finish(out)?;
            invert_mu_weighted(need_truth()?, spec, &mu, np)?
        }
        "thm6" => {
            let nb = s.get("nbeta", 200)?;
            let np = s.get("npsi", 200)?;
            s.finish(out)?;
            invert_sine_weighted(need_truth()?, spec, nb, np)?
        }
        "compton" => {
            let data_path = s.path("cone");
            let cam = camera(&mut s)?;
            s.finish(out)?;
            let rec = match data_path {
                Some(p) => {
                    let data = read_cone_sinogram(&p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    compton_reconstruct_from_data(&data, &cam, spec)?
                }
                None => compton_reconstruct(need_truth()?, &cam, spec)?,
            };
            report.push([
                "empty_bin_fraction".into(),
                rec.report.interior_empty_fraction.to_string(),
            ]);
            if let Some(w) = &rec.report.warning {
                report.push(["warning".into(), w.clone()]);
            }
            rec.image
        }
        "fbp" => {
            let data_path = s.path("radon");
            let sino = match data_path {
                Some(p) => {
                    s.finish(out)?;
                    read_radon_sinogram(&p).with_context(|| format!("reading {}", p.display()))?
                }
                None => {
                    let n_theta = s.get("ntheta", 180)?;
                    let n_s = s.get("ns", 2 * npx + 1)?;
                    s.finish(out)?;
                    need_truth()?.radon_sinogram(n_theta, n_s, spec.half_extent * SQRT_2)?
                }
            };
            fbp_radon_inversion(&sino, spec)
        }
        other => bail!("unknown method {other:?}; expected thm2, thm6, compton or fbp"),
    };
    report.push([
        "seconds".into(),
        format!("{:.3}", started.elapsed().as_secs_f64()),
    ]);
    write_image(out, "recon", &image)?;

    let mut outcome = Outcome::Success;
    if let Some(p) = &truth {
        let rel = image.rel_l2_error(&p.rasterize(spec));
        report.push(["rel_l2".into(), rel.to_string()]);
        for pl in plateaus(&image, p, PLATEAU_MARGIN_PX) {
            let label = pl
                .disks
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join("+");
            report.push([format!("plateau_{label}_expected"), pl.expected.to_string()]);
            report.push([format!("plateau_{label}_mean"), pl.mean.to_string()]);
        }
        if let Some(q) = background_quantile(&image, p, PLATEAU_MARGIN_PX, 0.99) {
            report.push(["background_abs_p99".into(), q.to_string()]);
        }
        if let Some(t) = threshold {
            if !(rel <= t) {
                outcome = Outcome::ThresholdFailed(format!("rel_l2 {rel} > {t}"));
            }
        }
    } else if threshold.is_some() {
        bail!("max_rel_l2 needs a phantom to compare against");
    }
    write_csv(out.join("report.csv"), ["metric", "value"], &report)?;
    Ok(outcome)
}

pub fn verify(mut s: Settings, out: &Path) -> Result<Outcome> {
    let which = s.get("identity", "all".to_string())?;
    let n: Option<usize> = s.optional("n")?;
    let seed = s.get("seed", 0u64)?;
    let count = s.get("count", 10usize)?;
    s.finish(out)?;
    if n.is_some_and(|n| n != 2 && n != 3) {
        bail!("n must be 2 or 3");
    }
    let identities: Vec<Identity> = if which == "all" {
        Identity::ALL.to_vec()
    } else {
        vec![which.parse().map_err(anyhow::Error::msg)?]
    };
    let rows = verify::run(&identities, n, seed, count)?;
    if rows.is_empty() {
        bail!("no identity selected for this dimension");
    }
    let records: Vec<_> = rows.iter().map(verify::Row::record).collect();
    write_csv(out.join("verify.csv"), verify::HEADER, &records)?;
    let failed = rows.iter().filter(|r| !r.passes()).count();
    println!("{} checks, {failed} failed", rows.len());
    Ok(if failed == 0 {
        Outcome::Success
    } else {
        Outcome::ThresholdFailed(format!(
            "{failed} identity checks above {}",
            verify::PASS_TOL
        ))
    })
}

pub fn lambda(mut s: Settings, out: &Path) -> Result<Outcome> {
    let m_max = s.get("mmax", 8usize)?;
    let n = s.get("n", 2usize)?;
    s.finish(out)?;
    if !(2..=3).contains(&n) {
        bail!("n must be 2 or 3");
    }
    let area = sphere_area(n)?;
    let rows = (0..=m_max)
        .map(|m| {
            let l = funk_hecke_lambda(m, n)?;
            Ok([
                n.to_string(),
                m.to_string(),
                l.to_string(),
                (l / area).to_string(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        out.join("lambda.csv"),
        ["n", "m", "lambda", "lambda_normalized"],
        &rows,
    )?;
    for r in &rows {
        println!("{}", r.join(","));
    }
    Ok(Outcome::Success)
}
