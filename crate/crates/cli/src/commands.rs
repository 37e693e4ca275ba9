//! The five subcommands. Each takes a validated configuration and an output
//! directory and returns the files it wrote.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use centered_partition::calibration::{estimate_spectrum, EstimateConfig};
use centered_partition::pg_glm::{intercept_means, summarize_coefficients, CoefficientSummary};
use centered_partition::{
    choose_psi, enumerate_partitions, exact_spectrum, fit, posterior_summaries, simulate_study, vi_distance,
    CpDensity, CpPrior, DistanceMasses, EppfSpec, Error, FitConfig, GlmHyper, PosteriorSummary, SetPartition,
    SimulationDesign,
};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config::{parse_center, RunConfig};
use crate::io::{self, num, Meta, Traces};

pub fn base_label(b: &EppfSpec) -> String {
    match *b {
        EppfSpec::Uniform => "uniform".into(),
        EppfSpec::DirichletProcess { alpha } => format!("dirichlet_process(alpha={alpha})"),
        EppfSpec::PitmanYor { alpha, sigma } => format!("pitman_yor(alpha={alpha};sigma={sigma})"),
        EppfSpec::SymmetricDirichlet { kappa, gamma } => format!("symmetric_dirichlet(kappa={kappa};gamma={gamma})"),
    }
}

fn csv_body(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn psm_csv(psm: &[Vec<f64>]) -> Result<String> {
    let n = psm.len();
    let mut header = vec!["item".to_string()];
    header.extend((1..=n).map(|j| j.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_body(
        &header,
        psm.iter().enumerate().map(|(i, row)| {
            let mut r = vec![(i + 1).to_string()];
            r.extend(row.iter().map(|&v| num(v)));
            r
        }),
    )
}

/// Cumulative prior mass over `Π_n`, partitions ordered by distance to the
/// center and then by restricted growth string.
pub fn prior_viz(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let c = &config.prior_viz;
    let center = parse_center(&c.center)?;
    let parts: Vec<SetPartition> = enumerate_partitions(center.n())?.collect();
    let distances: Vec<f64> = parts.iter().map(|p| vi_distance(p, &center)).collect::<Result<_, _>>()?;
    let mut order: Vec<usize> = (0..parts.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));
    let spectrum = exact_spectrum(&center)?;
    let mut rows = Vec::new();
    for base in &c.bases {
        for psi in c.grid() {
            let prior = CpPrior::new(center.clone(), psi, *base)?;
            let density = CpDensity::new(&prior, &spectrum)?;
            let mut cumulative = 0.0;
            for (rank, &j) in order.iter().enumerate() {
                let mass = density.log_prob(&parts[j])?.exp();
                cumulative += mass;
                rows.push(vec![
                    base_label(base),
                    num(psi),
                    (rank + 1).to_string(),
                    parts[j].to_block_string(),
                    num(distances[j]),
                    num(mass),
                    num(cumulative),
                ]);
            }
        }
    }
    let body = format!(
        "# center: {}\n{}",
        center.to_block_string(),
        csv_body(&["base", "psi", "rank", "partition", "distance", "probability", "cumulative"], rows)?
    );
    let path = out.join("prior_viz.csv");
    io::write_text(&path, &Meta::new("prior-viz", config), &body)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct QuantileRow {
    base: String,
    psi: f64,
    level: f64,
    delta: f64,
}

#[derive(Serialize)]
struct PsiRow {
    base: String,
    delta: f64,
    mass: f64,
    /// Smallest `psi` reaching `mass`, absent if unattainable.
    psi: Option<f64>,
    achieved: Option<f64>,
    /// Largest `F(delta)` over the search range when unattainable.
    supremum: Option<f64>,
}

#[derive(Serialize)]
struct CalibrationReport {
    center: String,
    n: usize,
    bins: usize,
    exact_bins: usize,
    exact: bool,
    tail_accepted: Option<u64>,
    tail_drawn: Option<u64>,
    quantiles: Vec<QuantileRow>,
    psi_choices: Vec<PsiRow>,
}

/// Distance spectrum, CDF table and `psi` choices for each base.
pub fn calibrate(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let c = &config.calibrate;
    let center = parse_center(&c.center)?;
    let spectrum = if c.exact {
        exact_spectrum(&center)?
    } else {
        estimate_spectrum(
            &center,
            &EstimateConfig {
                depth: c.depth,
                samples: c.samples,
                seed: config.seed,
                max_explored: c.max_explored,
            },
        )?
    };
    let meta = Meta::new("calibrate", config);

    let spectrum_path = out.join("spectrum.txt");
    io::write_text(&spectrum_path, &meta, &spectrum.to_text())?;

    let mut cdf_rows = Vec::new();
    let mut quantiles = Vec::new();
    let mut psi_choices = Vec::new();
    for base in &c.bases {
        let masses = DistanceMasses::new(&spectrum, base)?;
        for &psi in &c.psi_grid {
            let probs = masses.probabilities(psi);
            let mut cdf = 0.0;
            for (l, (&d, &m)) in masses.deltas().iter().zip(&probs).enumerate() {
                cdf += m;
                cdf_rows.push(vec![base_label(base), num(psi), l.to_string(), num(d), num(m), num(cdf)]);
            }
            quantiles.push(QuantileRow {
                base: base_label(base),
                psi,
                level: c.quantile,
                delta: masses.quantile(psi, c.quantile),
            });
        }
        for t in &c.targets {
            let mut row = PsiRow {
                base: base_label(base),
                delta: t.delta,
                mass: t.mass,
                psi: None,
                achieved: None,
                supremum: None,
            };
            match choose_psi(&spectrum, base, t.delta, t.mass) {
                Ok(choice) => {
                    row.psi = Some(choice.psi);
                    row.achieved = Some(choice.mass);
                }
                Err(Error::Unattainable { supremum, .. }) => row.supremum = Some(supremum),
                Err(e) => return Err(e.into()),
            }
            psi_choices.push(row);
        }
    }
    let cdf_path = out.join("cdf.csv");
    io::write_text(
        &cdf_path,
        &meta,
        &csv_body(&["base", "psi", "bin", "delta", "probability", "cdf"], cdf_rows)?,
    )?;

    let report = CalibrationReport {
        center: center.to_block_string(),
        n: center.n(),
        bins: spectrum.deltas().len(),
        exact_bins: spectrum.exact_prefix(),
        exact: spectrum.is_exact(),
        tail_accepted: spectrum.tail().map(|t| t.accepted),
        tail_drawn: spectrum.tail().map(|t| t.drawn),
        quantiles,
        psi_choices,
    };
    let report_path = out.join("calibration.json");
    io::write_json(&report_path, &meta, &report)?;
    Ok(vec![spectrum_path, cdf_path, report_path])
}

#[derive(Serialize)]
struct TruthReport {
    truth: String,
    sizes: Vec<usize>,
    group_betas: Vec<Vec<f64>>,
    defect_betas: Vec<Vec<f64>>,
}

/// Grouped logistic data from the twelve-defect design, plus its truth.
pub fn simulate(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let design = SimulationDesign::standard().scaled(config.simulate.scale);
    let study = simulate_study(&design, config.seed)?;
    let meta = Meta::new("simulate", config);
    let data_path = out.join("data.csv");
    io::write_text(&data_path, &meta, &io::data_csv(&study.data)?)?;
    let truth_path = out.join("truth.json");
    io::write_json(
        &truth_path,
        &meta,
        &TruthReport {
            truth: study.truth.to_block_string(),
            sizes: design.sizes.clone(),
            group_betas: design.group_betas.clone(),
            defect_betas: study.defect_betas,
        },
    )?;
    Ok(vec![data_path, truth_path])
}

/// Posterior summaries shared by `fit` and `summarize`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub center: String,
    pub map_partition: String,
    pub map_frequency: f64,
    pub samples: usize,
    pub vi_to_center: Option<f64>,
    pub intercept_means: Vec<f64>,
    pub coefficients: Vec<CoefficientSummary>,
}

impl FitReport {
    fn new(
        center: &SetPartition,
        summary: &PosteriorSummary,
        intercept_means: Vec<f64>,
        coefficients: Vec<CoefficientSummary>,
    ) -> Self {
        Self {
            center: center.to_block_string(),
            map_partition: summary.map_partition.to_block_string(),
            map_frequency: summary.map_frequency,
            samples: summary.samples,
            vi_to_center: summary.vi_to_center,
            intercept_means,
            coefficients,
        }
    }
}

fn write_report(out: &Path, name: &str, meta: &Meta, report: &FitReport, psm: &[Vec<f64>]) -> Result<Vec<PathBuf>> {
    let report_path = out.join(name);
    io::write_json(&report_path, meta, report)?;
    let psm_path = out.join(if name == "fit_summary.json" { "psm.csv" } else { "summary_psm.csv" });
    io::write_text(&psm_path, meta, &psm_csv(psm)?)?;
    Ok(vec![report_path, psm_path])
}

/// Pólya-Gamma Gibbs sampler with a centered partition prior on the groups.
pub fn fit_command(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let f = &config.fit;
    let data = io::read_data(&f.data)?;
    let center = parse_center(&f.center)?;
    let p = data.p();
    let prior = CpPrior::new(center.clone(), f.psi, f.base)?;
    let hyper = GlmHyper::new(
        f.a0,
        f.tau0,
        DVector::from_element(p, f.b),
        DMatrix::from_diagonal_element(p, p, f.q),
        prior,
    )?;
    let run = FitConfig {
        iterations: f.iterations,
        burn_in: f.burn_in,
        thin: f.thin,
        seed: config.seed,
        init: f.init.clone(),
        aux: f.aux,
    };
    let output = fit(&data, &hyper, &run).context("fitting")?;
    let meta = Meta::new("fit", config);

    let traces = Traces {
        iterations: output.iterations,
        partitions: output.samples,
        intercepts: output.intercept_trace,
        betas: output.beta_trace,
    };
    let mut written = Vec::new();
    for (name, body) in [
        (io::PARTITION_TRACE, traces.partitions_csv()?),
        (io::INTERCEPT_TRACE, traces.intercepts_csv()?),
        (io::BETA_TRACE, traces.betas_csv()?),
    ] {
        let path = out.join(name);
        io::write_text(&path, &meta, &body)?;
        written.push(path);
    }
    let report = FitReport::new(&center, &output.summary, output.intercept_means, output.coefficients);
    written.extend(write_report(out, "fit_summary.json", &meta, &report, &output.summary.psm)?);
    Ok(written)
}

/// Recomputes the `fit` summaries from trace files alone.
pub fn summarize(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (report, psm) = summarize_traces(&config.summarize.trace_dir)?;
    let meta = Meta::new("summarize", config);
    write_report(out, "summary.json", &meta, &report, &psm)
}

pub fn summarize_traces(dir: &Path) -> Result<(FitReport, Vec<Vec<f64>>)> {
    let (traces, fit_config) = io::Traces::read(dir)?;
    let center = parse_center(&fit_config.fit.center)?;
    if let Some(bad) = traces.partitions.iter().find(|c| c.n() != center.n()) {
        anyhow::bail!("trace partition {bad} does not match the center {center}");
    }
    let summary = posterior_summaries(&traces.partitions, Some(&center)).context("empty or invalid trace")?;
    let n = center.n();
    let p = traces.betas.first().and_then(|s| s.first()).map_or(0, Vec::len);
    let coefficients = summarize_coefficients(&traces.betas, n, p);
    let means = intercept_means(&traces.intercepts, n);
    Ok((FitReport::new(&center, &summary, means, coefficients), summary.psm))
}

/// One-line description of a written file for the console.
pub fn describe(paths: &[PathBuf]) -> String {
    let mut s = String::new();
    for p in paths {
        writeln!(s, "wrote {}", p.display()).unwrap();
    }
    s
}
