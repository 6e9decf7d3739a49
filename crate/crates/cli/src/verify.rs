//! Identity checks on seeded random phantoms.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, TAU};
use std::str::FromStr;

use anyhow::Result;
use conetx::cone::{
    check_asgeirsson_2d, check_asgeirsson_3d, check_identity_bpr, check_identity_psi_integral,
    check_identity_sine_weighted, check_lemma_cone_radon, check_sph_harm_relation, IdentityCheck,
    RadialCallable3,
};
use conetx::xforms::Harmonic;
use conetx::Phantom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PASS_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    PsiIntegral,
    SineWeighted,
    Bpr,
    Harmonic,
    Asgeirsson,
    Lemma,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::PsiIntegral,
        Identity::SineWeighted,
        Identity::Bpr,
        Identity::Harmonic,
        Identity::Asgeirsson,
        Identity::Lemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::PsiIntegral => "psi-integral",
            Identity::SineWeighted => "sine-weighted",
            Identity::Bpr => "bpr",
            Identity::Harmonic => "harmonic",
            Identity::Asgeirsson => "asgeirsson",
            Identity::Lemma => "lemma",
        }
    }

    fn dimensions(self) -> &'static [usize] {
        match self {
            Identity::Asgeirsson => &[2, 3],
            Identity::Lemma => &[3],
            _ => &[2],
        }
    }
}

impl FromStr for Identity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Identity::ALL.iter().map(|i| i.name()).collect();
                format!(
                    "unknown identity {s:?}; expected all or one of {}",
                    names.join(", ")
                )
            })
    }
}

pub struct Row {
    pub identity: &'static str,
    pub n: usize,
    pub phantom: usize,
    pub point: String,
    pub param: String,
    pub check: IdentityCheck,
}

impl Row {
    pub fn passes(&self) -> bool {
        self.check.passes(PASS_TOL)
    }

    pub fn record(&self) -> [String; 9] {
        [
            self.identity.to_string(),
            self.n.to_string(),
            self.phantom.to_string(),
            self.point.clone(),
            self.param.clone(),
            format!("{:e}", self.check.lhs),
            format!("{:e}", self.check.rhs),
            format!("{:e}", self.check.rel_err),
            if self.passes() { "pass" } else { "fail" }.to_string(),
        ]
    }
}

pub const HEADER: [&str; 9] = [
    "identity", "n", "phantom", "point", "param", "lhs", "rhs", "rel_err", "result",
];

fn join(p: &[f64]) -> String {
    p.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// Sum of one to three Gaussians centred in `[-0.3, 0.3]^3`.
fn random_gaussians(rng: &mut ChaCha8Rng) -> Result<RadialCallable3> {
    let count = rng.random_range(1..=3);
    let parts = (0..count)
        .map(|_| {
            let c = [
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
            ];
            RadialCallable3::gaussian(c, rng.random_range(0.2..0.4), rng.random_range(0.5..1.5))
        })
        .collect::<conetx::Result<Vec<_>>>()?;
    Ok(RadialCallable3::sum(parts)?)
}

/// Runs `count` random phantoms through each selected identity. Each
/// (identity, dimension) pair draws from its own stream derived from `seed`,
/// so filtering does not change the rows that remain.
pub fn run(identities: &[Identity], n: Option<usize>, seed: u64, count: usize) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (slot, &identity) in Identity::ALL.iter().enumerate() {
        if !identities.contains(&identity) {
            continue;
        }
        for &dim in identity.dimensions() {
            if n.is_some_and(|n| n != dim) {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((slot * 4 + dim) as u64);
            for phantom in 0..count {
                let mut push = |point: String, param: String, check: IdentityCheck| {
                    rows.push(Row {
                        identity: identity.name(),
                        n: dim,
                        phantom,
                        point,
                        param,
                        check,
                    })
                };
                if dim == 3 {
                    let f = random_gaussians(&mut rng)?;
                    if identity == Identity::Lemma {
                        for psi0 in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
                            push(
                                String::new(),
                                format!("psi0={psi0}"),
                                check_lemma_cone_radon(&f, psi0)?,
                            );
                        }
                    } else {
                        let u = [
                            rng.random_range(-0.2..0.2),
                            rng.random_range(-0.2..0.2),
                            rng.random_range(-0.2..0.2),
                        ];
                        for p in [0.0, 0.2] {
                            push(join(&u), format!("p={p}"), check_asgeirsson_3d(&f, u, p));
                        }
                    }
                    continue;
                }
                let p = Phantom::random_with(|| rng.random::<f64>());
                let point = |rng: &mut ChaCha8Rng, h: f64| {
                    [rng.random_range(-h..h), rng.random_range(-h..h)]
                };
                match identity {
                    Identity::PsiIntegral => {
                        let (u, phi) = (point(&mut rng, 1.0), rng.random_range(0.0..TAU));
                        push(
                            join(&u),
                            format!("phi={phi}"),
                            check_identity_psi_integral(&p, u, phi, 2000),
                        );
                    }
                    Identity::SineWeighted => {
                        let (u, phi) = (point(&mut rng, 1.0), rng.random_range(0.0..TAU));
                        push(
                            join(&u),
                            format!("phi={phi}"),
                            check_identity_sine_weighted(&p, u, phi, 2000),
                        );
                    }
                    Identity::Bpr => {
                        let u = point(&mut rng, 1.0);
                        push(
                            join(&u),
                            String::new(),
                            check_identity_bpr(&p, u, 256, 1000),
                        );
                    }
                    Identity::Harmonic => {
                        let u = point(&mut rng, 0.8);
                        for m in 1..=4 {
                            let c = check_sph_harm_relation(&p, u, m, Harmonic::Cos, 256, 1000);
                            push(join(&u), format!("m={m}"), c);
                        }
                    }
                    Identity::Asgeirsson => {
                        let u = point(&mut rng, 0.8);
                        for off in [0.0, 0.2] {
                            push(
                                join(&u),
                                format!("p={off}"),
                                check_asgeirsson_2d(&p, u, off),
                            );
                        }
                    }
                    Identity::Lemma => unreachable!("three-dimensional only"),
                }
            }
        }
    }
    Ok(rows)
}
