//! Gibbs sampling of partitions under a centered partition prior.
//!
//! Each item is removed and reseated among the remaining clusters or a new
//! one. The prior part of the weight is the baseline conditional times
//! `exp(-psi d)`, where `d` is the distance to the center of the partition
//! obtained by the move; it is evaluated in `O(K)` per item from cached
//! cluster-by-center-block counts.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::calibration::StamSampler;
use crate::cp_prior::CpPrior;
use crate::eppf::Candidate;
use crate::error::{Error, Result};
use crate::partitions::{vi_distance, SetPartition, XLogXTable, DISTANCE_TOLERANCE};
use crate::rng::substream;

/// Data model seen by the sampler.
///
/// The marginal path (`marginal_loglik`) integrates the cluster parameter
/// out; the auxiliary path works with explicit parameters.
pub trait LikelihoodModel {
    type Param: Clone;

    fn n_items(&self) -> usize;

    fn supports_marginal(&self) -> bool {
        false
    }

    /// `log p(y_item | y_members)` with the cluster parameter integrated
    /// against its prior; `members` is empty for a new cluster.
    fn marginal_loglik(&self, _item: usize, _members: &[usize]) -> f64 {
        f64::NAN
    }

    fn loglik(&self, item: usize, theta: &Self::Param) -> f64;

    /// Draw from the parameter prior `G0`.
    fn sample_new_theta<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Param;

    /// Draw from the parameter's conditional given the cluster's items.
    fn posterior_update_theta<R: Rng + ?Sized>(&self, members: &[usize], rng: &mut R) -> Self::Param;
}

/// Likelihood that ignores the data; the chain then targets the prior.
#[derive(Debug, Clone, Copy)]
pub struct FlatLikelihood {
    pub n: usize,
}

impl LikelihoodModel for FlatLikelihood {
    type Param = ();

    fn n_items(&self) -> usize {
        self.n
    }

    fn supports_marginal(&self) -> bool {
        true
    }

    fn marginal_loglik(&self, _item: usize, _members: &[usize]) -> f64 {
        0.0
    }

    fn loglik(&self, _item: usize, _theta: &()) -> f64 {
        0.0
    }

    fn sample_new_theta<R: Rng + ?Sized>(&self, _rng: &mut R) {}

    fn posterior_update_theta<R: Rng + ?Sized>(&self, _members: &[usize], _rng: &mut R) {}
}

/// `y_i ~ N(theta_k, sigma^2)` with `theta_k ~ N(mu0, tau0^2)`.
#[derive(Debug, Clone)]
pub struct GaussianMeanModel {
    pub y: Vec<f64>,
    pub sigma: f64,
    pub mu0: f64,
    pub tau0: f64,
}

impl GaussianMeanModel {
    fn posterior(&self, members: &[usize]) -> (f64, f64) {
        let prec = 1.0 / (self.tau0 * self.tau0) + members.len() as f64 / (self.sigma * self.sigma);
        let sum: f64 = members.iter().map(|&j| self.y[j]).sum();
        let mean = (self.mu0 / (self.tau0 * self.tau0) + sum / (self.sigma * self.sigma)) / prec;
        (mean, 1.0 / prec)
    }
}

fn normal_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (x - mean).powi(2) / var)
}

impl LikelihoodModel for GaussianMeanModel {
    type Param = f64;

    fn n_items(&self) -> usize {
        self.y.len()
    }

    fn supports_marginal(&self) -> bool {
        true
    }

    fn marginal_loglik(&self, item: usize, members: &[usize]) -> f64 {
        let (mean, var) = self.posterior(members);
        normal_logpdf(self.y[item], mean, var + self.sigma * self.sigma)
    }

    fn loglik(&self, item: usize, theta: &f64) -> f64 {
        normal_logpdf(self.y[item], *theta, self.sigma * self.sigma)
    }

    fn sample_new_theta<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Normal::new(self.mu0, self.tau0).unwrap().sample(rng)
    }

    fn posterior_update_theta<R: Rng + ?Sized>(&self, members: &[usize], rng: &mut R) -> f64 {
        let (mean, var) = self.posterior(members);
        Normal::new(mean, var.sqrt()).unwrap().sample(rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SamplingMode {
    /// Collapsed reseating with the parameter integrated out.
    Marginal,
    /// Reseating with `m` auxiliary parameters standing in for new clusters.
    Auxiliary { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    #[default]
    Forward,
    Reverse,
}

/// Current partition, cluster parameters and the chain's random stream.
#[derive(Debug, Clone)]
pub struct ChainState<P> {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
    params: Vec<P>,
    center: Vec<usize>,
    k0: usize,
    /// `cross[k][b]`: items of cluster `k` in center block `b`.
    cross: Vec<Vec<usize>>,
    table: XLogXTable,
    center_term: f64,
    pub rng: ChaCha8Rng,
    pub iteration: u64,
}

impl<P: Clone> ChainState<P> {
    /// `params[k]` belongs to block `k` of `partition` (canonical order).
    pub fn new(partition: &SetPartition, center: &SetPartition, params: Vec<P>, rng: ChaCha8Rng) -> Result<Self> {
        if partition.n() != center.n() {
            return Err(Error::SizeMismatch {
                left: partition.n(),
                right: center.n(),
            });
        }
        if params.len() != partition.k() {
            return Err(Error::ChainConfig(format!(
                "{} parameters for {} clusters",
                params.len(),
                partition.k()
            )));
        }
        let n = partition.n();
        let table = XLogXTable::new(n);
        let center_labels: Vec<usize> = center.labels().iter().map(|&l| l as usize).collect();
        let center_term = center.block_sizes().iter().map(|&s| table.get(s)).sum();
        let mut state = Self {
            labels: partition.labels().iter().map(|&l| l as usize).collect(),
            members: partition.blocks(),
            params,
            center: center_labels,
            k0: center.k(),
            cross: Vec::new(),
            table,
            center_term,
            rng,
            iteration: 0,
        };
        state.cross = state.fresh_cross();
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn label(&self, item: usize) -> usize {
        self.labels[item]
    }

    pub fn partition(&self) -> SetPartition {
        SetPartition::from_dense_labels(&self.labels)
    }

    pub fn members(&self, cluster: usize) -> &[usize] {
        &self.members[cluster]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn params(&self) -> &[P] {
        &self.params
    }

    pub fn param(&self, cluster: usize) -> &P {
        &self.params[cluster]
    }

    pub fn set_param(&mut self, cluster: usize, p: P) {
        self.params[cluster] = p;
    }

    /// Cached cluster-by-center-block counts.
    pub fn crosstab(&self) -> &[Vec<usize>] {
        &self.cross
    }

    /// Distance of the current partition to the center.
    pub fn distance_to_center(&self) -> f64 {
        let own: f64 = self.members.iter().map(|m| self.table.get(m.len())).sum();
        let joint: f64 = self.cross.iter().flatten().map(|&x| self.table.get(x)).sum();
        ((own + self.center_term - 2.0 * joint) / self.n() as f64).max(0.0)
    }

    fn fresh_cross(&self) -> Vec<Vec<usize>> {
        let mut cross = vec![vec![0usize; self.k0]; self.members.len()];
        for (i, &k) in self.labels.iter().enumerate() {
            cross[k][self.center[i]] += 1;
        }
        cross
    }

    fn check_invariants(&self) {
        debug_assert_eq!(self.cross, self.fresh_cross(), "crosstab drift");
        debug_assert_eq!(self.members.iter().map(Vec::len).sum::<usize>(), self.n());
        debug_assert_eq!(self.params.len(), self.members.len());
        debug_assert!(self.members.iter().all(|m| !m.is_empty()));
    }

    /// Takes `item` out; returns its old cluster's parameter if that cluster
    /// vanished.
    fn remove_item(&mut self, item: usize) -> Option<P> {
        let k = self.labels[item];
        let pos = self.members[k].iter().position(|&j| j == item).unwrap();
        self.members[k].swap_remove(pos);
        self.cross[k][self.center[item]] -= 1;
        self.labels[item] = usize::MAX;
        if !self.members[k].is_empty() {
            return None;
        }
        self.members.remove(k);
        self.cross.remove(k);
        for l in &mut self.labels {
            if *l != usize::MAX && *l > k {
                *l -= 1;
            }
        }
        Some(self.params.remove(k))
    }

    fn insert_item(&mut self, item: usize, cluster: Option<usize>, new_param: impl FnOnce() -> P) {
        let k = match cluster {
            Some(k) => k,
            None => {
                self.members.push(Vec::new());
                self.cross.push(vec![0; self.k0]);
                self.params.push(new_param());
                self.members.len() - 1
            }
        };
        self.members[k].push(item);
        self.cross[k][self.center[item]] += 1;
        self.labels[item] = k;
    }

    /// Reorders clusters by first item (canonical order).
    fn canonicalize(&mut self) {
        let mut order: Vec<usize> = (0..self.k()).collect();
        order.sort_by_key(|&k| *self.members[k].iter().min().unwrap());
        if order.iter().enumerate().all(|(a, &b)| a == b) {
            return;
        }
        let mut rank = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        self.members = order.iter().map(|&k| std::mem::take(&mut self.members[k])).collect();
        self.cross = order.iter().map(|&k| std::mem::take(&mut self.cross[k])).collect();
        let mut old: Vec<Option<P>> = std::mem::take(&mut self.params).into_iter().map(Some).collect();
        self.params = order.iter().map(|&k| old[k].take().unwrap()).collect();
        for l in &mut self.labels {
            *l = rank[*l];
        }
        for m in &mut self.members {
            m.sort_unstable();
        }
    }

    /// Distances to the center after moving the (already removed) `item`
    /// into each current cluster, and into a new one.
    fn move_distances(&self, item: usize) -> (Vec<f64>, f64) {
        let t = &self.table;
        let b = self.center[item];
        let own: f64 = self.members.iter().map(|m| t.get(m.len())).sum();
        let joint: f64 = self.cross.iter().flatten().map(|&x| t.get(x)).sum();
        let n = self.n() as f64;
        let base = own + self.center_term - 2.0 * joint;
        let existing = self
            .members
            .iter()
            .zip(&self.cross)
            .map(|(m, row)| {
                let s = m.len();
                let x = row[b];
                let delta_own = t.get(s + 1) - t.get(s);
                let delta_joint = t.get(x + 1) - t.get(x);
                ((base + delta_own - 2.0 * delta_joint) / n).max(0.0)
            })
            .collect();
        (existing, (base / n).max(0.0))
    }

    fn snap_to<M: LikelihoodModel<Param = P>>(&mut self, target: &[usize], model: &M) {
        self.labels = target.to_vec();
        let k = target.iter().copied().max().map_or(0, |m| m + 1);
        self.members = vec![Vec::new(); k];
        for (i, &l) in target.iter().enumerate() {
            self.members[l].push(i);
        }
        self.cross = self.fresh_cross();
        self.params = self
            .members
            .iter()
            .map(|m| model.posterior_update_theta(m, &mut self.rng))
            .collect();
    }
}

/// Prior log weights `x` for the moves of an removed item, sharing the
/// point-mass treatment of `psi = ∞`.
fn prior_logweights(prior: &CpPrior, sizes: &[usize], distances: &[f64], new_distance: f64) -> (Vec<f64>, f64) {
    let base = prior.base();
    let mut existing: Vec<f64> = sizes.iter().map(|&s| base.log_join(s)).collect();
    let mut open = base.log_open(sizes.len());
    let psi = prior.psi();
    if prior.is_point_mass() {
        let best = distances.iter().copied().fold(new_distance, f64::min);
        for (w, &d) in existing.iter_mut().zip(distances) {
            if d > best + DISTANCE_TOLERANCE {
                *w = f64::NEG_INFINITY;
            }
        }
        if new_distance > best + DISTANCE_TOLERANCE {
            open = f64::NEG_INFINITY;
        }
    } else if psi > 0.0 {
        for (w, &d) in existing.iter_mut().zip(distances) {
            *w -= psi * d;
        }
        open -= psi * new_distance;
    }
    (existing, open)
}

/// Prior log weights for reseating `item`: the baseline conditional
/// `log p0(c_i = k | c^{-i})` minus `psi` times the resulting distance to
/// the center, for every cluster of `c^{-i}` and a new cluster. Existing
/// clusters are indexed as in the state with `item` removed, in the
/// state's current order.
pub fn penalized_allocation_logweights<P: Clone>(
    state: &ChainState<P>,
    prior: &CpPrior,
    item: usize,
) -> Result<Vec<(Candidate, f64)>> {
    if item >= state.n() {
        return Err(Error::ClusterOutOfRange {
            index: item,
            available: state.n(),
        });
    }
    check_center(state, prior)?;
    let mut work = state.clone();
    work.remove_item(item);
    let (distances, new_distance) = work.move_distances(item);
    let (existing, open) = prior_logweights(prior, &work.sizes(), &distances, new_distance);
    let mut out: Vec<(Candidate, f64)> = existing
        .into_iter()
        .enumerate()
        .map(|(k, w)| (Candidate::Existing(k), w))
        .collect();
    out.push((Candidate::New, open));
    Ok(out)
}

/// Distances to the center after each possible move of `item`, in the same
/// candidate order as [`penalized_allocation_logweights`].
pub fn allocation_distances<P: Clone>(state: &ChainState<P>, item: usize) -> Vec<(Candidate, f64)> {
    let mut work = state.clone();
    work.remove_item(item);
    let (d, new) = work.move_distances(item);
    d.into_iter()
        .enumerate()
        .map(|(k, d)| (Candidate::Existing(k), d))
        .chain(std::iter::once((Candidate::New, new)))
        .collect()
}

fn check_center<P: Clone>(state: &ChainState<P>, prior: &CpPrior) -> Result<()> {
    let c0 = prior.center();
    if c0.n() != state.n() || c0.labels().iter().zip(&state.center).any(|(&a, &b)| a as usize != b) {
        return Err(Error::ChainConfig("chain state built for a different center".into()));
    }
    Ok(())
}

fn sample_log_weights<R: Rng + ?Sized>(weights: &[f64], rng: &mut R, item: usize) -> Result<usize> {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() || weights.iter().any(|w| w.is_nan()) {
        return Err(Error::Likelihood { item });
    }
    let probs: Vec<f64> = weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (j, p) in probs.iter().enumerate() {
        if u < *p {
            return Ok(j);
        }
        u -= p;
    }
    Ok(probs.iter().rposition(|&p| p > 0.0).unwrap())
}

/// One Gibbs sweep over all items in index order.
pub fn reseat_sweep<M: LikelihoodModel>(
    state: &mut ChainState<M::Param>,
    prior: &CpPrior,
    model: &M,
    mode: SamplingMode,
) -> Result<()> {
    reseat_sweep_ordered(state, prior, model, mode, SweepOrder::Forward)
}

pub fn reseat_sweep_ordered<M: LikelihoodModel>(
    state: &mut ChainState<M::Param>,
    prior: &CpPrior,
    model: &M,
    mode: SamplingMode,
    order: SweepOrder,
) -> Result<()> {
    check_center(state, prior)?;
    if model.n_items() != state.n() {
        return Err(Error::SizeMismatch {
            left: model.n_items(),
            right: state.n(),
        });
    }
    match mode {
        SamplingMode::Marginal if !model.supports_marginal() => {
            return Err(Error::UnsupportedMode("marginal reseating needs marginal_loglik"));
        }
        SamplingMode::Auxiliary { m: 0 } => {
            return Err(Error::ChainConfig("auxiliary mode needs m >= 1".into()));
        }
        _ => {}
    }
    if prior.is_point_mass() {
        // the conditional of every item is degenerate at its center block
        if state.labels != state.center {
            let target = state.center.clone();
            state.snap_to(&target, model);
        }
        state.iteration += 1;
        return Ok(());
    }
    let n = state.n();
    let items: Box<dyn Iterator<Item = usize>> = match order {
        SweepOrder::Forward => Box::new(0..n),
        SweepOrder::Reverse => Box::new((0..n).rev()),
    };
    let mut weights = Vec::new();
    let mut aux: Vec<M::Param> = Vec::new();
    for i in items {
        let vacated = state.remove_item(i);
        let (distances, new_distance) = state.move_distances(i);
        let (existing, open) = prior_logweights(prior, &state.sizes(), &distances, new_distance);
        weights.clear();
        match mode {
            SamplingMode::Marginal => {
                for (k, w) in existing.iter().enumerate() {
                    weights.push(w + model.marginal_loglik(i, &state.members[k]));
                }
                weights.push(open + model.marginal_loglik(i, &[]));
                let j = sample_log_weights(&weights, &mut state.rng, i)?;
                let target = (j < state.k()).then_some(j);
                let fresh = match (target, vacated) {
                    (Some(_), _) => None,
                    (None, Some(p)) => Some(p),
                    (None, None) => Some(model.sample_new_theta(&mut state.rng)),
                };
                state.insert_item(i, target, || fresh.unwrap());
            }
            SamplingMode::Auxiliary { m } => {
                aux.clear();
                aux.extend(vacated);
                while aux.len() < m {
                    aux.push(model.sample_new_theta(&mut state.rng));
                }
                for (k, w) in existing.iter().enumerate() {
                    weights.push(w + model.loglik(i, &state.params[k]));
                }
                let share = open - (m as f64).ln();
                for a in &aux {
                    weights.push(share + model.loglik(i, a));
                }
                let j = sample_log_weights(&weights, &mut state.rng, i)?;
                let k = state.k();
                if j < k {
                    state.insert_item(i, Some(j), || unreachable!());
                } else {
                    let p = aux.swap_remove(j - k);
                    state.insert_item(i, None, || p);
                }
            }
        }
        if cfg!(debug_assertions) {
            debug_assert_eq!(state.cross, state.fresh_cross());
        }
    }
    state.canonicalize();
    state.check_invariants();
    state.iteration += 1;
    Ok(())
}

/// Starting partition of a chain.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    Center,
    AllSingletons,
    OneBlock,
    /// Uniform draw from `Π_N` with its own seed.
    Random(u64),
    Explicit(SetPartition),
}

impl Init {
    pub fn resolve(&self, center: &SetPartition) -> Result<SetPartition> {
        let n = center.n();
        match self {
            Init::Center => Ok(center.clone()),
            Init::AllSingletons => SetPartition::singletons(n),
            Init::OneBlock => SetPartition::one_block(n),
            Init::Random(seed) => Ok(StamSampler::new(n)?.sample(&mut substream(*seed, 0))),
            Init::Explicit(c) => {
                if c.n() != n {
                    return Err(Error::SizeMismatch { left: c.n(), right: n });
                }
                Ok(c.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub init: Init,
    pub mode: SamplingMode,
    pub order: SweepOrder,
    /// Keep the cluster parameters of every retained sample.
    pub record_params: bool,
}

impl ChainConfig {
    pub fn new(iterations: usize, burn_in: usize, seed: u64) -> Self {
        Self {
            iterations,
            burn_in,
            thin: 1,
            seed,
            init: Init::Center,
            mode: SamplingMode::Marginal,
            order: SweepOrder::Forward,
            record_params: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::ChainConfig(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::ChainConfig("thin must be >= 1".into()));
        }
        Ok(())
    }

    /// Whether 1-based iteration `it` is retained.
    pub fn keeps(&self, it: usize) -> bool {
        it > self.burn_in && (it - self.burn_in).is_multiple_of(self.thin)
    }
}

#[derive(Debug, Clone)]
pub struct ChainOutput<P> {
    pub samples: Vec<SetPartition>,
    /// 1-based iteration index of each sample.
    pub iterations: Vec<usize>,
    /// Cluster parameters per retained sample, in canonical cluster order.
    pub params: Vec<Vec<P>>,
    pub final_state: ChainState<P>,
}

/// Runs a chain for `config.iterations` sweeps. Deterministic given the seed.
pub fn run_chain<M: LikelihoodModel>(
    prior: &CpPrior,
    model: &M,
    config: &ChainConfig,
) -> Result<ChainOutput<M::Param>> {
    config.validate()?;
    if model.n_items() != prior.center().n() {
        return Err(Error::SizeMismatch {
            left: model.n_items(),
            right: prior.center().n(),
        });
    }
    let start = config.init.resolve(prior.center())?;
    let mut rng = substream(config.seed, 0);
    let params = start
        .blocks()
        .iter()
        .map(|m| model.posterior_update_theta(m, &mut rng))
        .collect();
    let mut state = ChainState::new(&start, prior.center(), params, rng)?;
    let mut out = ChainOutput {
        samples: Vec::new(),
        iterations: Vec::new(),
        params: Vec::new(),
        final_state: state.clone(),
    };
    for it in 1..=config.iterations {
        reseat_sweep_ordered(&mut state, prior, model, config.mode, config.order)?;
        for k in 0..state.k() {
            let p = model.posterior_update_theta(&state.members[k], &mut state.rng);
            state.params[k] = p;
        }
        if config.keeps(it) {
            out.samples.push(state.partition());
            out.iterations.push(it);
            if config.record_params {
                out.params.push(state.params.clone());
            }
        }
    }
    out.final_state = state;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    /// `psm[i][j]`: fraction of samples with `i` and `j` together.
    pub psm: Vec<Vec<f64>>,
    pub map_partition: SetPartition,
    pub map_frequency: f64,
    pub samples: usize,
    /// Distance from the MAP partition to the supplied center.
    pub vi_to_center: Option<f64>,
}

/// Co-clustering matrix and frequency mode of a partition sample.
///
/// Ties for the mode go to the smallest distance to the earliest sample
/// that is a mode, then to the lexicographically smallest label string.
pub fn posterior_summaries(samples: &[SetPartition], center: Option<&SetPartition>) -> Result<PosteriorSummary> {
    let first = samples.first().ok_or(Error::EmptySamples)?;
    let n = first.n();
    if let Some(bad) = samples.iter().find(|s| s.n() != n) {
        return Err(Error::SizeMismatch { left: bad.n(), right: n });
    }
    let mut together = vec![vec![0u64; n]; n];
    let mut freq: HashMap<&SetPartition, (usize, usize)> = HashMap::new();
    for (idx, s) in samples.iter().enumerate() {
        let labels = s.labels();
        for i in 0..n {
            for j in i..n {
                if labels[i] == labels[j] {
                    together[i][j] += 1;
                }
            }
        }
        freq.entry(s).or_insert((0, idx)).0 += 1;
    }
    let total = samples.len() as f64;
    let mut psm = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = together[i][j] as f64 / total;
            psm[i][j] = v;
            psm[j][i] = v;
        }
    }
    let top = freq.values().map(|v| v.0).max().unwrap();
    let modes: Vec<(&SetPartition, usize)> = freq
        .iter()
        .filter(|(_, v)| v.0 == top)
        .map(|(p, v)| (*p, v.1))
        .collect();
    let anchor = modes.iter().min_by_key(|m| m.1).unwrap().0;
    let mut ranked: Vec<(f64, &SetPartition)> = modes
        .iter()
        .map(|(p, _)| (vi_distance(p, anchor).unwrap(), *p))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.labels().cmp(b.1.labels())));
    let map_partition = ranked[0].1.clone();
    let vi_to_center = center.map(|c| vi_distance(&map_partition, c)).transpose()?;
    Ok(PosteriorSummary {
        psm,
        map_partition,
        map_frequency: top as f64 / total,
        samples: samples.len(),
        vi_to_center,
    })
}
