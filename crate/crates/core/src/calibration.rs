//! Distance spectra for `N` too large to enumerate.
//!
//! A breadth-first walk on the Hasse diagram around `c0` yields every
//! partition within distance `δ_L*` of the center exactly, where `δ_L*` is
//! the smallest distance on the last layer reached. Beyond that radius,
//! counts are estimated from uniform draws of `Π_N` (Stam's urn sampler),
//! discarding the draws that fall inside the exact head.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::cp_prior::{DistanceSpectrum, EntryCount, RawCell, TailEstimate};
use crate::eppf::ln_biguint;
use crate::error::{Error, Result};
use crate::partitions::{
    bell_number, configuration, for_each_merge, for_each_split, CenterDistance, SetPartition,
    DISTANCE_TOLERANCE,
};
use crate::rng::substream;

/// Default limit on the number of partitions held by [`local_search`].
pub const DEFAULT_MAX_EXPLORED: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExploredPartition {
    pub partition: SetPartition,
    /// Number of Hasse moves from the center (BFS layer).
    pub depth: usize,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct LocalSearchResult {
    center: SetPartition,
    explored: Vec<ExploredPartition>,
    frontier_min_distance: f64,
    depth: usize,
}

impl LocalSearchResult {
    pub fn center(&self) -> &SetPartition {
        &self.center
    }

    /// Explored partitions in discovery order.
    pub fn explored(&self) -> &[ExploredPartition] {
        &self.explored
    }

    /// `δ_L*`: smallest distance among partitions first reached on the last
    /// layer. `+∞` when the walk exhausted `Π_N`.
    pub fn frontier_min_distance(&self) -> f64 {
        self.frontier_min_distance
    }

    /// Layers actually expanded.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn covers_everything(&self) -> bool {
        self.frontier_min_distance.is_infinite()
    }

    /// Whether `d` lies in the exactly counted region.
    pub fn in_head(&self, d: f64) -> bool {
        d <= self.frontier_min_distance + DISTANCE_TOLERANCE
    }

    /// Explored partitions within `δ_L*`; together these are all of
    /// `Π_N` within that radius.
    pub fn head(&self) -> impl Iterator<Item = &ExploredPartition> {
        self.explored.iter().filter(|e| self.in_head(e.distance))
    }
}

/// Breadth-first exploration of the Hasse diagram from `c0` for `depth`
/// layers, deduplicating against everything seen so far.
pub fn local_search(c0: &SetPartition, depth: usize, max_explored: usize) -> Result<LocalSearchResult> {
    if depth == 0 {
        return Err(Error::InvalidArgument("search depth must be >= 1".into()));
    }
    let dist = CenterDistance::new(c0);
    let mut seen: HashSet<SetPartition> = HashSet::new();
    seen.insert(c0.clone());
    let mut explored = vec![ExploredPartition {
        partition: c0.clone(),
        depth: 0,
        distance: 0.0,
    }];
    let mut frontier = vec![c0.clone()];
    let mut completed = 0;
    let mut last_layer_start = 0;
    for t in 1..=depth {
        let proposals: Vec<Vec<SetPartition>> = frontier
            .par_iter()
            .map(|c| {
                let mut out = Vec::new();
                for_each_merge(c, |p| out.push(p));
                for_each_split(c, |p| out.push(p));
                out
            })
            .collect();
        let mut next = Vec::new();
        for p in proposals.into_iter().flatten() {
            if !seen.contains(&p) {
                seen.insert(p.clone());
                next.push(p);
            }
        }
        if seen.len() > max_explored {
            return Err(Error::ExplorationBudget {
                limit: max_explored,
                completed_depth: completed,
            });
        }
        if next.is_empty() {
            break;
        }
        let distances: Vec<f64> = next
            .par_iter()
            .map(|p| dist.distance_labels(p.labels(), p.k()))
            .collect();
        last_layer_start = explored.len();
        explored.extend(
            next.iter()
                .zip(distances)
                .map(|(p, distance)| ExploredPartition {
                    partition: p.clone(),
                    depth: t,
                    distance,
                }),
        );
        frontier = next;
        completed = t;
    }
    let frontier_min_distance = if completed < depth {
        f64::INFINITY
    } else {
        explored[last_layer_start..]
            .iter()
            .map(|e| e.distance)
            .fold(f64::INFINITY, f64::min)
    };
    Ok(LocalSearchResult {
        center: c0.clone(),
        explored,
        frontier_min_distance,
        depth: completed,
    })
}

/// Uniform sampler over `Π_n` via Dobiński's formula: draw the urn count
/// `K` with `P(K = k) = e^{-1} k^n / (k! B_n)`, throw each item into a
/// uniform urn and drop the empty urns.
#[derive(Debug, Clone)]
pub struct StamSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl StamSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLabels);
        }
        let ln_bell = ln_biguint(&bell_number(n));
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut k = 1usize;
        // the mode sits near n / ln n; the mass decays superexponentially past it
        while acc < 1.0 - 1e-12 && k <= 10 * n + 100 {
            let kf = k as f64;
            acc += (-1.0 + n as f64 * kf.ln() - ln_gamma(kf + 1.0) - ln_bell).exp();
            cdf.push(acc);
            k += 1;
        }
        let total = *cdf.last().unwrap();
        for c in &mut cdf {
            *c /= total;
        }
        Ok(Self { n, cdf })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest urn count with nonzero probability in the truncated table.
    pub fn k_max(&self) -> usize {
        self.cdf.len()
    }

    pub fn sample_urns<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c < u).min(self.cdf.len() - 1) + 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SetPartition {
        let k = self.sample_urns(rng);
        let raw: Vec<usize> = (0..self.n).map(|_| rng.random_range(0..k)).collect();
        SetPartition::from_dense_labels(&raw)
    }
}

/// One uniform draw from `Π_n`.
pub fn stam_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SetPartition> {
    Ok(StamSampler::new(n)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateConfig {
    /// Local search iterations `T`.
    pub depth: usize,
    /// Uniform draws `R`.
    pub samples: usize,
    pub seed: u64,
    pub max_explored: usize,
}

impl EstimateConfig {
    pub fn new(depth: usize, samples: usize, seed: u64) -> Self {
        Self {
            depth,
            samples,
            seed,
            max_explored: DEFAULT_MAX_EXPLORED,
        }
    }
}

/// Draws per RNG substream in [`estimate_spectrum`].
pub const SAMPLE_CHUNK: usize = 4096;

/// Exact head from [`local_search`] plus a Monte Carlo tail. Draw chunk `j`
/// uses [`substream`]`(seed, j)`, so the result is independent of the
/// thread count.
pub fn estimate_spectrum(c0: &SetPartition, config: &EstimateConfig) -> Result<DistanceSpectrum> {
    let search = local_search(c0, config.depth, config.max_explored)?;
    spectrum_from_search(&search, config.samples, config.seed)
}

/// Second half of [`estimate_spectrum`], reusing a finished search.
pub fn spectrum_from_search(search: &LocalSearchResult, samples: usize, seed: u64) -> Result<DistanceSpectrum> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let c0 = search.center();
    let mut head: HashMap<(u64, crate::partitions::Configuration), u64> = HashMap::new();
    let mut head_count = 0u64;
    for e in search.head() {
        *head.entry((e.distance.to_bits(), configuration(&e.partition))).or_default() += 1;
        head_count += 1;
    }
    let mut cells: Vec<RawCell> = head
        .into_iter()
        .map(|((bits, configuration), c)| RawCell {
            distance: f64::from_bits(bits),
            configuration,
            count: EntryCount::Exact(BigUint::from(c)),
        })
        .collect();
    if search.covers_everything() {
        return Ok(DistanceSpectrum::assemble(c0.clone(), cells, None));
    }

    let sampler = StamSampler::new(c0.n())?;
    let dist = CenterDistance::new(c0);
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    type ChunkHits = (HashMap<(u64, crate::partitions::Configuration), u64>, u64);
    let partials: Vec<ChunkHits> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(seed, j as u64);
            let draws = SAMPLE_CHUNK.min(samples - j * SAMPLE_CHUNK);
            let mut local: HashMap<_, u64> = HashMap::new();
            let mut accepted = 0u64;
            for _ in 0..draws {
                let c = sampler.sample(&mut rng);
                let d = dist.distance_labels(c.labels(), c.k());
                if search.in_head(d) {
                    continue;
                }
                accepted += 1;
                *local.entry((d.to_bits(), configuration(&c))).or_default() += 1;
            }
            (local, accepted)
        })
        .collect();
    let mut tail: HashMap<(u64, crate::partitions::Configuration), u64> = HashMap::new();
    let mut accepted = 0u64;
    for (part, acc) in partials {
        accepted += acc;
        for (key, h) in part {
            *tail.entry(key).or_default() += h;
        }
    }
    cells.extend(tail.into_iter().map(|((bits, configuration), h)| RawCell {
        distance: f64::from_bits(bits),
        configuration,
        count: EntryCount::Sampled(h),
    }));
    let record = TailEstimate {
        restricted_total: bell_number(c0.n()) - BigUint::from(head_count),
        accepted,
        drawn: samples as u64,
    };
    Ok(DistanceSpectrum::assemble(c0.clone(), cells, Some(record)))
}
