//! Grouped logistic regressions whose coefficient vectors are shared within
//! clusters of groups, with a centered partition prior on the clustering.
//!
//! For group (defect) `i` and observation `j`,
//! `logit P(y_ij = 1) = alpha_i + x_ij' beta_{c_i}`, `alpha_i ~ N(a0, 1/tau0)`,
//! `beta_k ~ N(b, Q)`. Gibbs sampling alternates Pólya-Gamma latents,
//! intercepts, cluster coefficients and group allocations.

pub mod polya_gamma;
mod simulate;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cp_prior::CpPrior;
use crate::error::{Error, Result};
use crate::partitions::SetPartition;
use crate::rng::substream;
use crate::sampler::{posterior_summaries, reseat_sweep, ChainState, Init, LikelihoodModel, PosteriorSummary, SamplingMode};

pub use polya_gamma::{pg1_mean, pg1_variance, sample_pg1};
pub use simulate::{simulate_study, wrong_center, SimulatedStudy, SimulationDesign};

/// Rows of covariates with binary responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignBlock {
    p: usize,
    /// Row-major, `rows * p` values.
    x: Vec<f64>,
    y: Vec<u8>,
}

impl DesignBlock {
    pub fn new(p: usize, x: Vec<f64>, y: Vec<u8>) -> Result<Self> {
        if x.len() != p * y.len() {
            return Err(Error::Data(format!(
                "{} covariate values for {} rows of width {p}",
                x.len(),
                y.len()
            )));
        }
        if let Some(bad) = y.iter().find(|&&v| v > 1) {
            return Err(Error::Data(format!("response {bad} is not 0/1")));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite covariate".into()));
        }
        Ok(Self { p, x, y })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<u8>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Data("ragged covariate rows".into()));
        }
        Self::new(p, rows.concat(), y)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.y.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.x[j * self.p..(j + 1) * self.p]
    }

    pub fn responses(&self) -> &[u8] {
        &self.y
    }
}

/// Per-defect datasets plus an optional control block (all `y = 0`) that
/// is logically appended to every defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedBinaryData {
    p: usize,
    defects: Vec<DesignBlock>,
    controls: Option<DesignBlock>,
}

impl GroupedBinaryData {
    pub fn new(defects: Vec<DesignBlock>, controls: Option<DesignBlock>) -> Result<Self> {
        let p = defects
            .first()
            .ok_or_else(|| Error::Data("no defects".into()))?
            .p();
        if defects.iter().chain(controls.iter()).any(|d| d.p() != p) {
            return Err(Error::Data("covariate count differs across blocks".into()));
        }
        if let Some(i) = defects.iter().position(|d| d.rows() == 0) {
            return Err(Error::Data(format!("defect {i} has no observations")));
        }
        if let Some(c) = &controls {
            if c.responses().iter().any(|&y| y != 0) {
                return Err(Error::Data("shared controls must have y = 0".into()));
            }
        }
        Ok(Self { p, defects, controls })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_defects(&self) -> usize {
        self.defects.len()
    }

    pub fn defect(&self, i: usize) -> &DesignBlock {
        &self.defects[i]
    }

    pub fn controls(&self) -> Option<&DesignBlock> {
        self.controls.as_ref()
    }

    /// Observations of defect `i` including the shared controls.
    pub fn n_obs(&self, i: usize) -> usize {
        self.defects[i].rows() + self.controls.as_ref().map_or(0, DesignBlock::rows)
    }

    /// `(x_ij, y_ij)` for defect `i`, own rows first, then controls.
    pub fn observations(&self, i: usize) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        let own = &self.defects[i];
        let own_iter = (0..own.rows()).map(move |j| (own.row(j), own.y[j] as f64));
        let ctl_iter = self
            .controls
            .iter()
            .flat_map(|c| (0..c.rows()).map(move |j| (c.row(j), 0.0)));
        own_iter.chain(ctl_iter)
    }
}

/// Intercepts and Pólya-Gamma latents; cluster coefficients live in the
/// chain state.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmParams {
    pub intercepts: Vec<f64>,
    /// `omegas[i][j]` follows the order of [`GroupedBinaryData::observations`].
    pub omegas: Vec<Vec<f64>>,
}

impl GlmParams {
    pub fn initial(data: &GroupedBinaryData, a0: f64) -> Self {
        Self {
            intercepts: vec![a0; data.n_defects()],
            omegas: (0..data.n_defects()).map(|i| vec![0.25; data.n_obs(i)]).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GlmHyper {
    pub a0: f64,
    /// Intercept prior precision.
    pub tau0: f64,
    pub b: DVector<f64>,
    pub q: DMatrix<f64>,
    pub prior: CpPrior,
    q_inv: DMatrix<f64>,
    q_inv_b: DVector<f64>,
    q_chol: DMatrix<f64>,
}

impl GlmHyper {
    pub fn new(a0: f64, tau0: f64, b: DVector<f64>, q: DMatrix<f64>, prior: CpPrior) -> Result<Self> {
        if !(tau0 > 0.0 && tau0.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau0 must be positive, got {tau0}")));
        }
        if q.nrows() != q.ncols() || q.nrows() != b.len() {
            return Err(Error::InvalidArgument("Q must be square and match b".into()));
        }
        if (&q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0) {
            return Err(Error::InvalidArgument("Q must be symmetric".into()));
        }
        let chol = Cholesky::new(q.clone())
            .ok_or_else(|| Error::InvalidArgument("Q must be positive definite".into()))?;
        let q_inv = chol.inverse();
        let q_inv_b = &q_inv * &b;
        let q_chol = chol.l();
        Ok(Self {
            a0,
            tau0,
            b,
            q,
            prior,
            q_inv,
            q_inv_b,
            q_chol,
        })
    }

    /// `alpha_i ~ N(0, 2)`, `beta ~ N(0, diag_p(2))`.
    pub fn standard(p: usize, prior: CpPrior) -> Result<Self> {
        Self::new(0.0, 0.5, DVector::zeros(p), DMatrix::from_diagonal_element(p, p, 2.0), prior)
    }

    pub fn p(&self) -> usize {
        self.b.len()
    }

    /// Draw from the coefficient prior `N(b, Q)`.
    pub fn sample_beta<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.p(), |_, _| StandardNormal.sample(rng));
        &self.b + &self.q_chol * z
    }
}

fn linear(x: &[f64], beta: &DVector<f64>) -> f64 {
    x.iter().zip(beta.iter()).map(|(a, b)| a * b).sum()
}

/// `log(1 + e^eta)` without overflow.
fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

/// Bernoulli log likelihood of defect `i` under intercept `alpha` and `beta`.
pub fn defect_loglik(data: &GroupedBinaryData, i: usize, alpha: f64, beta: &DVector<f64>) -> f64 {
    data.observations(i)
        .map(|(x, y)| {
            let eta = alpha + linear(x, beta);
            y * eta - softplus(eta)
        })
        .sum()
}

fn check_shapes(data: &GroupedBinaryData, params: &GlmParams, state: &ChainState<DVector<f64>>) -> Result<()> {
    if state.n() != data.n_defects() || params.intercepts.len() != data.n_defects() {
        return Err(Error::Data("state, parameters and data disagree on the defect count".into()));
    }
    if params
        .omegas
        .iter()
        .enumerate()
        .any(|(i, w)| w.len() != data.n_obs(i))
    {
        return Err(Error::Data("latent vector length differs from observation count".into()));
    }
    Ok(())
}

/// Step 1: `omega_ij ~ PG(1, alpha_i + x_ij' beta_{c_i})`. Defect `i` draws
/// from substream `i` of a seed taken from the chain's stream.
pub fn gibbs_update_omegas(
    data: &GroupedBinaryData,
    params: &mut GlmParams,
    state: &mut ChainState<DVector<f64>>,
) -> Result<()> {
    check_shapes(data, params, state)?;
    let seed = state.rng.next_u64();
    let state_ref = &*state;
    let intercepts = &params.intercepts;
    params.omegas.par_iter_mut().enumerate().for_each(|(i, w)| {
        let mut rng = substream(seed, i as u64);
        let beta = state_ref.param(state_ref.label(i));
        for (slot, (x, _)) in w.iter_mut().zip(data.observations(i)) {
            *slot = sample_pg1(intercepts[i] + linear(x, beta), &mut rng);
        }
    });
    Ok(())
}

/// Conditional `(a*, tau*)` of intercept `i` given the latents and `beta`.
pub fn intercept_conditional(
    data: &GroupedBinaryData,
    params: &GlmParams,
    beta: &DVector<f64>,
    hyper: &GlmHyper,
    i: usize,
) -> (f64, f64) {
    let mut tau = hyper.tau0;
    let mut num = hyper.a0 * hyper.tau0;
    for ((x, y), &w) in data.observations(i).zip(&params.omegas[i]) {
        tau += w;
        num += y - 0.5 - w * linear(x, beta);
    }
    (num / tau, tau)
}

/// Step 2: `alpha_i ~ N(a*, 1/tau*)`.
pub fn gibbs_update_intercepts(
    data: &GroupedBinaryData,
    params: &mut GlmParams,
    state: &mut ChainState<DVector<f64>>,
    hyper: &GlmHyper,
) -> Result<()> {
    check_shapes(data, params, state)?;
    for i in 0..data.n_defects() {
        let (mean, tau) = intercept_conditional(data, params, state.param(state.label(i)), hyper, i);
        let draw = Normal::new(mean, tau.sqrt().recip()).unwrap().sample(&mut state.rng);
        params.intercepts[i] = draw;
    }
    Ok(())
}

/// Gaussian conditional of a cluster's coefficients given its member
/// defects: mean `b*` and the Cholesky factor of the precision
/// `X' Omega X + Q^{-1}`.
pub fn beta_conditional(
    data: &GroupedBinaryData,
    params: &GlmParams,
    hyper: &GlmHyper,
    members: &[usize],
) -> Option<(DVector<f64>, Cholesky<f64, Dyn>)> {
    let p = hyper.p();
    let mut precision = hyper.q_inv.clone();
    let mut rhs = hyper.q_inv_b.clone();
    for &i in members {
        let alpha = params.intercepts[i];
        for ((x, y), &w) in data.observations(i).zip(&params.omegas[i]) {
            let kappa = y - 0.5 - w * alpha;
            for r in 0..p {
                rhs[r] += x[r] * kappa;
                if x[r] == 0.0 {
                    continue;
                }
                let wr = w * x[r];
                for c in 0..p {
                    precision[(r, c)] += wr * x[c];
                }
            }
        }
    }
    let chol = Cholesky::new(precision)?;
    let mean = chol.solve(&rhs);
    Some((mean, chol))
}

fn draw_from_conditional<R: Rng + ?Sized>(mean: &DVector<f64>, chol: &Cholesky<f64, Dyn>, rng: &mut R) -> DVector<f64> {
    // precision = L L', so L'^{-1} z has covariance precision^{-1}
    let z = DVector::from_fn(mean.len(), |_, _| StandardNormal.sample(rng));
    let dev = chol
        .l()
        .transpose()
        .solve_upper_triangular(&z)
        .expect("Cholesky factor has a positive diagonal");
    mean + dev
}

/// Step 3: one coefficient draw per cluster from the aggregated data of its
/// member defects.
pub fn gibbs_update_betas(
    data: &GroupedBinaryData,
    params: &GlmParams,
    state: &mut ChainState<DVector<f64>>,
    hyper: &GlmHyper,
) -> Result<()> {
    check_shapes(data, params, state)?;
    for k in 0..state.k() {
        let (mean, chol) = beta_conditional(data, params, hyper, state.members(k))
            .ok_or(Error::NotPositiveDefinite { cluster: k })?;
        let draw = draw_from_conditional(&mean, &chol, &mut state.rng);
        state.set_param(k, draw);
    }
    Ok(())
}

/// Allocation likelihood: defect `i`'s Bernoulli likelihood given its
/// current intercept, with a cluster's `beta` as the parameter.
pub struct DefectLikelihood<'a> {
    pub data: &'a GroupedBinaryData,
    pub params: &'a GlmParams,
    pub hyper: &'a GlmHyper,
}

impl LikelihoodModel for DefectLikelihood<'_> {
    type Param = DVector<f64>;

    fn n_items(&self) -> usize {
        self.data.n_defects()
    }

    fn loglik(&self, item: usize, beta: &DVector<f64>) -> f64 {
        defect_loglik(self.data, item, self.params.intercepts[item], beta)
    }

    fn sample_new_theta<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        self.hyper.sample_beta(rng)
    }

    fn posterior_update_theta<R: Rng + ?Sized>(&self, members: &[usize], rng: &mut R) -> DVector<f64> {
        match beta_conditional(self.data, self.params, self.hyper, members) {
            Some((mean, chol)) => draw_from_conditional(&mean, &chol, rng),
            None => self.hyper.sample_beta(rng),
        }
    }
}

/// Step 4: reseat every defect, `m` auxiliary coefficient draws from the
/// prior standing in for a new cluster.
pub fn gibbs_update_allocations(
    data: &GroupedBinaryData,
    params: &GlmParams,
    hyper: &GlmHyper,
    state: &mut ChainState<DVector<f64>>,
    m: usize,
) -> Result<()> {
    check_shapes(data, params, state)?;
    let model = DefectLikelihood { data, params, hyper };
    reseat_sweep(state, &hyper.prior, &model, SamplingMode::Auxiliary { m })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub init: Init,
    /// Auxiliary coefficient draws per allocation.
    pub aux: usize,
}

impl FitConfig {
    pub fn new(iterations: usize, burn_in: usize, seed: u64) -> Self {
        Self {
            iterations,
            burn_in,
            thin: 1,
            seed,
            init: Init::Center,
            aux: 1,
        }
    }

    /// 5000 iterations with the first 1000 discarded.
    pub fn simulation_study(seed: u64) -> Self {
        Self::new(5000, 1000, seed)
    }

    fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::ChainConfig(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.thin == 0 || self.aux == 0 {
            return Err(Error::ChainConfig("thin and aux must be >= 1".into()));
        }
        Ok(())
    }
}

/// Posterior summaries of one defect's coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSummary {
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Whether the central 95% interval excludes zero.
    pub excludes_zero: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct FitOutput {
    pub samples: Vec<SetPartition>,
    pub iterations: Vec<usize>,
    /// `[sample][defect]`.
    pub intercept_trace: Vec<Vec<f64>>,
    /// `[sample][defect][coefficient]`: the coefficients of the defect's cluster.
    pub beta_trace: Vec<Vec<Vec<f64>>>,
    pub summary: PosteriorSummary,
    pub coefficients: Vec<CoefficientSummary>,
    pub intercept_means: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Posterior means and central 95% intervals from a `[sample][defect][coefficient]` trace.
pub fn summarize_coefficients(trace: &[Vec<Vec<f64>>], n: usize, p: usize) -> Vec<CoefficientSummary> {
    (0..n)
        .map(|i| {
            let mut s = CoefficientSummary {
                mean: Vec::with_capacity(p),
                lower: Vec::with_capacity(p),
                upper: Vec::with_capacity(p),
                excludes_zero: Vec::with_capacity(p),
            };
            for r in 0..p {
                let mut v: Vec<f64> = trace.iter().map(|t| t[i][r]).collect();
                s.mean.push(v.iter().sum::<f64>() / v.len() as f64);
                v.sort_by(f64::total_cmp);
                let (lo, hi) = (quantile(&v, 0.025), quantile(&v, 0.975));
                s.lower.push(lo);
                s.upper.push(hi);
                s.excludes_zero.push(lo > 0.0 || hi < 0.0);
            }
            s
        })
        .collect()
}

/// Per-defect means of a `[sample][defect]` intercept trace.
pub fn intercept_means(trace: &[Vec<f64>], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| trace.iter().map(|t| t[i]).sum::<f64>() / trace.len() as f64)
        .collect()
}

/// Gibbs sampler: latents, intercepts, coefficients, allocations.
pub fn fit(data: &GroupedBinaryData, hyper: &GlmHyper, config: &FitConfig) -> Result<FitOutput> {
    config.validate()?;
    if hyper.p() != data.p() {
        return Err(Error::Data(format!(
            "data has {} covariates, prior has {}",
            data.p(),
            hyper.p()
        )));
    }
    let center = hyper.prior.center();
    if center.n() != data.n_defects() {
        return Err(Error::SizeMismatch {
            left: center.n(),
            right: data.n_defects(),
        });
    }
    let start = config.init.resolve(center)?;
    let rng = substream(config.seed, 0);
    let betas = (0..start.k()).map(|_| hyper.b.clone()).collect();
    let mut state = ChainState::new(&start, center, betas, rng)?;
    let mut params = GlmParams::initial(data, hyper.a0);
    let n = data.n_defects();
    let p = data.p();
    let mut samples = Vec::new();
    let mut iterations = Vec::new();
    let mut intercept_trace = Vec::new();
    let mut beta_trace = Vec::new();
    for it in 1..=config.iterations {
        gibbs_update_omegas(data, &mut params, &mut state)?;
        gibbs_update_intercepts(data, &mut params, &mut state, hyper)?;
        gibbs_update_betas(data, &params, &mut state, hyper)?;
        gibbs_update_allocations(data, &params, hyper, &mut state, config.aux)?;
        if it > config.burn_in && (it - config.burn_in).is_multiple_of(config.thin) {
            samples.push(state.partition());
            iterations.push(it);
            intercept_trace.push(params.intercepts.clone());
            beta_trace.push(
                (0..n)
                    .map(|i| state.param(state.label(i)).iter().copied().collect())
                    .collect(),
            );
        }
    }
    let summary = posterior_summaries(&samples, Some(center))?;
    let coefficients = summarize_coefficients(&beta_trace, n, p);
    let intercept_means = intercept_means(&intercept_trace, n);
    Ok(FitOutput {
        samples,
        iterations,
        intercept_trace,
        beta_trace,
        summary,
        coefficients,
        intercept_means,
    })
}
