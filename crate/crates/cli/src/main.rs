use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod settings;
mod verify;

use settings::{FlagSet, Pair, Settings};

/// Cone transform simulation, inversion and identity checks.
#[derive(Parser)]
#[command(name = "conetx", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Plain-text `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a phantom file.
    Phantom {
        /// Phantom description (`disk cx cy r density` / `gauss cx cy sigma amplitude`).
        #[arg(long)]
        phantom: Option<PathBuf>,
        /// Pixels per side [default: 256].
        #[arg(long)]
        npx: Option<usize>,
        /// Half side length of the image square [default: 1].
        #[arg(long)]
        extent: Option<f64>,
    },
    /// Simulate cone or Radon data.
    Forward {
        /// Phantom description file.
        #[arg(long)]
        phantom: Option<PathBuf>,
        /// `cone` or `radon` [default: cone].
        #[arg(long)]
        mode: Option<String>,
        /// Half side of the detector square [default: 1].
        #[arg(long)]
        extent: Option<f64>,
        /// Detectors per side of the square [default: 257].
        #[arg(long)]
        perside: Option<usize>,
        /// Single vertex `x,y` instead of the detector square.
        #[arg(long)]
        vertex: Option<Pair>,
        /// Axis angles over the full turn [default: 200].
        #[arg(long)]
        nbeta: Option<usize>,
        /// Opening angles over (0, pi) [default: 200].
        #[arg(long)]
        npsi: Option<usize>,
        /// Radon angles over [0, pi) [default: 180].
        #[arg(long)]
        ntheta: Option<usize>,
        /// Radon offsets over [-S, S] with S = extent * sqrt 2 [default: 513].
        #[arg(long)]
        ns: Option<usize>,
    },
    /// Reconstruct an image with one of the inversion routes.
    Reconstruct {
        /// `thm2`, `thm6`, `compton` or `fbp` [default: compton].
        #[arg(long)]
        method: Option<String>,
        /// Ground truth, and the source of simulated data when no data file is given.
        #[arg(long)]
        phantom: Option<PathBuf>,
        /// Cone data file for `compton`.
        #[arg(long)]
        cone: Option<PathBuf>,
        /// Radon data file for `fbp`.
        #[arg(long)]
        radon: Option<PathBuf>,
        /// Pixels per side [default: 256].
        #[arg(long)]
        npx: Option<usize>,
        /// Half side of the image and detector square [default: 1].
        #[arg(long)]
        extent: Option<f64>,
        /// Axis angles over the full turn [default: 200].
        #[arg(long)]
        nbeta: Option<usize>,
        /// Opening angles over (0, pi) [default: 200].
        #[arg(long)]
        npsi: Option<usize>,
        /// Detectors per side for `compton` [default: 257].
        #[arg(long)]
        perside: Option<usize>,
        /// Radon angles for `fbp` from a phantom [default: 180].
        #[arg(long)]
        ntheta: Option<usize>,
        /// Radon offsets for `fbp` from a phantom [default: 2 npx + 1].
        #[arg(long)]
        ns: Option<usize>,
        /// Axis weight for `thm2`: `uniform` or `delta` [default: uniform].
        #[arg(long)]
        mu: Option<String>,
        /// Exit with status 1 when the relative L2 error exceeds this.
        #[arg(long)]
        max_rel_l2: Option<f64>,
    },
    /// Check the cone transform identities on seeded random phantoms.
    Verify {
        /// `all` or one of psi-integral, sine-weighted, bpr, harmonic, asgeirsson, lemma.
        #[arg(long)]
        identity: Option<String>,
        /// Restrict to dimension 2 or 3.
        #[arg(long)]
        n: Option<usize>,
        /// Base seed of the random phantoms [default: 0].
        #[arg(long)]
        seed: Option<u64>,
        /// Random phantoms per identity [default: 10].
        #[arg(long)]
        count: Option<usize>,
    },
    /// Tabulate Funk-Hecke eigenvalues of `|t|`.
    Lambda {
        /// Largest degree [default: 8].
        #[arg(long)]
        mmax: Option<usize>,
        /// Dimension [default: 2].
        #[arg(long)]
        n: Option<usize>,
    },
}

fn flags(command: &Command) -> FlagSet {
    let mut f = FlagSet::default();
    match command {
        Command::Phantom {
            phantom,
            npx,
            extent,
        } => {
            f.put_path("phantom", phantom)
                .put("npx", npx)
                .put("extent", extent);
        }
        Command::Forward {
            phantom,
            mode,
            extent,
            perside,
            vertex,
            nbeta,
            npsi,
            ntheta,
            ns,
        } => {
            f.put_path("phantom", phantom)
                .put("mode", mode)
                .put("extent", extent)
                .put("perside", perside)
                .put("vertex", vertex)
                .put("nbeta", nbeta)
                .put("npsi", npsi)
                .put("ntheta", ntheta)
                .put("ns", ns);
        }
        Command::Reconstruct {
            method,
            phantom,
            cone,
            radon,
            npx,
            extent,
            nbeta,
            npsi,
            perside,
            ntheta,
            ns,
            mu,
            max_rel_l2,
        } => {
            f.put("method", method)
                .put_path("phantom", phantom)
                .put_path("cone", cone)
                .put_path("radon", radon)
                .put("npx", npx)
                .put("extent", extent)
                .put("nbeta", nbeta)
                .put("npsi", npsi)
                .put("perside", perside)
                .put("ntheta", ntheta)
                .put("ns", ns)
                .put("mu", mu)
                .put("max_rel_l2", max_rel_l2);
        }
        Command::Verify {
            identity,
            n,
            seed,
            count,
        } => {
            f.put("identity", identity)
                .put("n", n)
                .put("seed", seed)
                .put("count", count);
        }
        Command::Lambda { mmax, n } => {
            f.put("mmax", mmax).put("n", n);
        }
    }
    f
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli.command, &cli.common) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::ThresholdFailed(msg)) => {
            eprintln!("threshold not met: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command, common: &Common) -> anyhow::Result<commands::Outcome> {
    let mut flag_set = flags(command);
    flag_set.put_path("out", &common.out);
    let mut s = Settings::load(common.config.as_deref(), flag_set.0)?;
    let out = PathBuf::from(s.get("out", "out".to_string())?);
    match command {
        Command::Phantom { .. } => commands::phantom(s, &out),
        Command::Forward { .. } => commands::forward(s, &out),
        Command::Reconstruct { .. } => commands::reconstruct(s, &out),
        Command::Verify { .. } => commands::verify(s, &out),
        Command::Lambda { .. } => commands::lambda(s, &out),
    }
}
