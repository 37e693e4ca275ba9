//! Command-line front end for centered partition priors.
//!
//! Subcommands: `prior-viz`, `calibrate`, `simulate`, `fit`, `summarize`.
//! Settings come from defaults, then `--config`, then flags. The effective
//! configuration is written next to the outputs as `<command>-config.toml`
//! and embedded in every output file.

pub mod commands;
pub mod config;
pub mod io;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use centered_partition::EppfSpec;
use config::RunConfig;

/// `uniform`, `dp:ALPHA`, `py:ALPHA,SIGMA` or `symdir:KAPPA,GAMMA`.
pub fn parse_base(s: &str) -> std::result::Result<EppfSpec, String> {
    let (family, args) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<f64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|e| format!("{a:?}: {e}")))
            .collect::<std::result::Result<_, _>>()?
    };
    let spec = match (family, nums.as_slice()) {
        ("uniform", []) => EppfSpec::Uniform,
        ("dp", [alpha]) => EppfSpec::DirichletProcess { alpha: *alpha },
        ("py", [alpha, sigma]) => EppfSpec::PitmanYor { alpha: *alpha, sigma: *sigma },
        ("symdir", [kappa, gamma]) if kappa.fract() == 0.0 && *kappa >= 1.0 => EppfSpec::SymmetricDirichlet {
            kappa: *kappa as usize,
            gamma: *gamma,
        },
        _ => return Err(format!("unrecognized base {s:?}; expected uniform, dp:A, py:A,S or symdir:K,G")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

#[derive(Debug, Parser)]
#[command(name = "cpart", version, about = "Centered partition priors: visualization, calibration, simulation, fitting")]
pub struct Cli {
    /// Master seed (overrides the configuration).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads for the parallel kernels (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prior mass of every partition of a small n along a psi grid.
    PriorViz {
        #[arg(long)]
        center: Option<String>,
    },
    /// Distance spectrum, CDF table and psi choice.
    Calibrate {
        #[arg(long)]
        center: Option<String>,
        /// Enumerate all partitions instead of estimating the tail.
        #[arg(long)]
        exact: bool,
        /// Must match the size of the center when given.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, visible_alias = "search-depth")]
        depth: Option<usize>,
        /// Single base, e.g. `uniform`, `dp:1`, `py:1,0.25`, `symdir:4,2`.
        #[arg(long, value_parser = parse_base)]
        base: Option<EppfSpec>,
        /// Single target `F(delta) >= mass`; needs `--target-mass` too.
        #[arg(long, requires = "target_mass")]
        target_delta: Option<f64>,
        #[arg(long, requires = "target_delta")]
        target_mass: Option<f64>,
    },
    /// Simulated grouped logistic data.
    Simulate {
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Gibbs sampler for the grouped logistic model.
    Fit {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        center: Option<String>,
        #[arg(long)]
        psi: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
    },
    /// Recompute fit summaries from saved traces.
    Summarize {
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PriorViz { .. } => "prior-viz",
            Command::Calibrate { .. } => "calibrate",
            Command::Simulate { .. } => "simulate",
            Command::Fit { .. } => "fit",
            Command::Summarize { .. } => "summarize",
        }
    }
}

/// Effective configuration: defaults, then the file, then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut c = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        c.seed = seed;
    }
    match &cli.command {
        Command::PriorViz { center } => {
            if let Some(v) = center {
                c.prior_viz.center = v.clone();
            }
        }
        Command::Calibrate { center, exact, n, samples, depth, base, target_delta, target_mass } => {
            if let Some(v) = center {
                c.calibrate.center = v.clone();
            }
            if let Some(n) = n {
                let size = config::parse_center(&c.calibrate.center)?.n();
                anyhow::ensure!(size == *n, "--n {n} does not match the center, which has {size} items");
            }
            if let Some(b) = base {
                c.calibrate.bases = vec![*b];
            }
            if let (Some(delta), Some(mass)) = (target_delta, target_mass) {
                c.calibrate.targets = vec![config::PsiTarget { delta: *delta, mass: *mass }];
            }
            c.calibrate.exact |= exact;
            if let Some(v) = samples {
                c.calibrate.samples = *v;
            }
            if let Some(v) = depth {
                c.calibrate.depth = *v;
            }
        }
        Command::Simulate { scale } => {
            if let Some(v) = scale {
                c.simulate.scale = *v;
            }
        }
        Command::Fit { data, center, psi, iterations, burn_in } => {
            if let Some(v) = data {
                c.fit.data = v.clone();
            }
            if let Some(v) = center {
                c.fit.center = v.clone();
            }
            if let Some(v) = psi {
                c.fit.psi = *v;
            }
            if let Some(v) = iterations {
                c.fit.iterations = *v;
            }
            if let Some(v) = burn_in {
                c.fit.burn_in = *v;
            }
        }
        Command::Summarize { trace_dir } => {
            if let Some(v) = trace_dir {
                c.summarize.trace_dir = v.clone();
            }
        }
    }
    Ok(c)
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let config = resolve_config(cli)?;
    let name = cli.command.name();
    config.validate(name)?;
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    std::fs::create_dir_all(&cli.out_dir).with_context(|| format!("creating {}", cli.out_dir.display()))?;
    let config_path = cli.out_dir.join(format!("{name}-config.toml"));
    std::fs::write(&config_path, config.to_toml()).with_context(|| format!("writing {}", config_path.display()))?;
    let mut written = match cli.command {
        Command::PriorViz { .. } => commands::prior_viz(&config, &cli.out_dir)?,
        Command::Calibrate { .. } => commands::calibrate(&config, &cli.out_dir)?,
        Command::Simulate { .. } => commands::simulate(&config, &cli.out_dir)?,
        Command::Fit { .. } => commands::fit_command(&config, &cli.out_dir)?,
        Command::Summarize { .. } => commands::summarize(&config, &cli.out_dir)?,
    };
    written.insert(0, config_path);
    Ok(written)
}
