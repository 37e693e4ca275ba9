//! The centered partition prior `p(c) ∝ p0(c) exp(-psi * VI(c, c0))`.
//!
//! The normalizing constant depends on the partitions only through the
//! counts of partitions at each distance from the center and with each
//! configuration. Those counts live in a [`DistanceSpectrum`], built either
//! by full enumeration ([`exact_spectrum`]) or by the estimator in
//! [`crate::calibration`].

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eppf::{g_lambda, ln_biguint, EppfSpec};
use crate::error::{Error, Result};
use crate::partitions::{
    bell_number, configuration, CenterDistance, Configuration, RgsCursor, SetPartition,
    DEFAULT_ENUMERATION_CAP, DISTANCE_TOLERANCE,
};

/// Centered partition prior: center `c0`, penalty `psi` and baseline EPPF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpPrior {
    center: SetPartition,
    psi: f64,
    base: EppfSpec,
}

impl CpPrior {
    /// `psi` may be `f64::INFINITY`, which puts all mass on the center.
    pub fn new(center: SetPartition, psi: f64, base: EppfSpec) -> Result<Self> {
        if psi.is_nan() || psi < 0.0 {
            return Err(Error::InvalidPsi(psi));
        }
        base.validate()?;
        Ok(Self { center, psi, base })
    }

    pub fn center(&self) -> &SetPartition {
        &self.center
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn base(&self) -> &EppfSpec {
        &self.base
    }

    pub fn is_point_mass(&self) -> bool {
        self.psi == f64::INFINITY
    }

    pub fn with_psi(&self, psi: f64) -> Result<Self> {
        Self::new(self.center.clone(), psi, self.base)
    }
}

/// How many partitions fall in one (distance bin, configuration) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryCount {
    Exact(BigUint),
    /// Number of accepted uniform draws that landed in the cell; the count
    /// estimate is `restricted_total * hits / accepted` of the spectrum's tail.
    Sampled(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub bin: usize,
    pub configuration: Configuration,
    pub count: EntryCount,
}

/// Bookkeeping for the Monte Carlo part of an estimated spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailEstimate {
    /// `B_N` minus the number of partitions in the exact head.
    pub restricted_total: BigUint,
    pub accepted: u64,
    pub drawn: u64,
}

impl TailEstimate {
    pub fn rejected(&self) -> u64 {
        self.drawn - self.accepted
    }

    /// No draw survived rejection, so the tail has no entries.
    pub fn is_degenerate(&self) -> bool {
        self.accepted == 0
    }
}

/// Distances from a center together with partition counts per distance bin
/// and configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpectrum {
    center: SetPartition,
    deltas: Vec<f64>,
    entries: Vec<SpectrumEntry>,
    exact_prefix: usize,
    total: BigUint,
    tail: Option<TailEstimate>,
}

/// One raw observation fed to [`DistanceSpectrum::assemble`].
pub(crate) struct RawCell {
    pub distance: f64,
    pub configuration: Configuration,
    pub count: EntryCount,
}

impl DistanceSpectrum {
    /// Bins raw cells by distance and merges cells sharing a bin and a
    /// configuration. Sampled cells must lie strictly beyond all exact ones.
    pub(crate) fn assemble(
        center: SetPartition,
        mut cells: Vec<RawCell>,
        tail: Option<TailEstimate>,
    ) -> Self {
        cells.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then_with(|| a.configuration.cmp(&b.configuration))
        });
        let mut deltas: Vec<f64> = Vec::new();
        let mut merged: Vec<SpectrumEntry> = Vec::new();
        let mut index: HashMap<(usize, Configuration), usize> = HashMap::new();
        let mut exact_bins = 0usize;
        for cell in cells {
            let bin = match deltas.last() {
                Some(&d) if cell.distance - d <= DISTANCE_TOLERANCE => deltas.len() - 1,
                _ => {
                    deltas.push(cell.distance);
                    deltas.len() - 1
                }
            };
            if matches!(cell.count, EntryCount::Exact(_)) {
                exact_bins = bin + 1;
            }
            let key = (bin, cell.configuration);
            match index.get(&key) {
                Some(&pos) => match (&mut merged[pos].count, cell.count) {
                    (EntryCount::Exact(a), EntryCount::Exact(b)) => *a += b,
                    (EntryCount::Sampled(a), EntryCount::Sampled(b)) => *a += b,
                    _ => unreachable!("exact and sampled cells share a bin"),
                },
                None => {
                    index.insert(key.clone(), merged.len());
                    merged.push(SpectrumEntry {
                        bin: key.0,
                        configuration: key.1,
                        count: cell.count,
                    });
                }
            }
        }
        merged.sort_by(|a, b| a.bin.cmp(&b.bin).then_with(|| a.configuration.cmp(&b.configuration)));
        let total = bell_number(center.n());
        Self {
            center,
            deltas,
            entries: merged,
            exact_prefix: exact_bins.saturating_sub(1),
            total,
            tail,
        }
    }

    pub fn center(&self) -> &SetPartition {
        &self.center
    }

    pub fn n(&self) -> usize {
        self.center.n()
    }

    /// Increasing distances `δ_0 = 0 < δ_1 < ...` in bits.
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Cells sorted by bin, then configuration.
    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    /// Bins `0..=exact_prefix` hold exact counts.
    pub fn exact_prefix(&self) -> usize {
        self.exact_prefix
    }

    /// `B_N`.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn tail(&self) -> Option<&TailEstimate> {
        self.tail.as_ref()
    }

    /// Every count is exact (the whole space was enumerated or explored).
    pub fn is_exact(&self) -> bool {
        self.tail.is_none()
    }

    /// Index of the bin within tolerance of `delta`.
    pub fn bin_of(&self, delta: f64) -> Option<usize> {
        let pos = self.deltas.partition_point(|&d| d < delta - DISTANCE_TOLERANCE);
        (pos < self.deltas.len() && (self.deltas[pos] - delta).abs() <= DISTANCE_TOLERANCE)
            .then_some(pos)
    }

    /// Natural log of a cell's (possibly estimated) count.
    pub fn log_count(&self, entry: &SpectrumEntry) -> f64 {
        match &entry.count {
            EntryCount::Exact(c) => ln_biguint(c),
            EntryCount::Sampled(hits) => {
                let tail = self.tail.as_ref().expect("sampled entry without tail");
                ln_biguint(&tail.restricted_total) + (*hits as f64).ln() - (tail.accepted as f64).ln()
            }
        }
    }

    /// Count per bin as a float (estimates are not integers).
    pub fn bin_counts(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.deltas.len()];
        for e in &self.entries {
            out[e.bin] += self.log_count(e).exp();
        }
        out
    }

    /// Exact count of a bin, when the bin lies in the exact head.
    pub fn exact_bin_count(&self, bin: usize) -> Option<BigUint> {
        if bin > self.exact_prefix || bin >= self.deltas.len() {
            return None;
        }
        let mut total = BigUint::zero();
        for e in self.entries.iter().filter(|e| e.bin == bin) {
            match &e.count {
                EntryCount::Exact(c) => total += c,
                EntryCount::Sampled(_) => return None,
            }
        }
        Some(total)
    }

    /// Sum of exact counts over all bins.
    pub fn exact_count(&self) -> BigUint {
        self.entries
            .iter()
            .filter_map(|e| match &e.count {
                EntryCount::Exact(c) => Some(c.clone()),
                EntryCount::Sampled(_) => None,
            })
            .sum()
    }

    fn check_center(&self, prior: &CpPrior) -> Result<()> {
        if &self.center != prior.center() {
            return Err(Error::SpectrumMismatch(format!(
                "spectrum centered on {} but prior on {}",
                self.center,
                prior.center()
            )));
        }
        Ok(())
    }

    /// Structured text form: `key=value` header lines, then one CSV record
    /// per (bin, configuration). Lines starting with `#` are comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "center={}", self.center).unwrap();
        writeln!(out, "n={}", self.n()).unwrap();
        writeln!(out, "total={}", self.total).unwrap();
        writeln!(out, "exact_prefix={}", self.exact_prefix).unwrap();
        writeln!(out, "exact={}", self.is_exact()).unwrap();
        match &self.tail {
            None => writeln!(out, "tail=none").unwrap(),
            Some(t) => writeln!(
                out,
                "tail=restricted_total:{};accepted:{};drawn:{}",
                t.restricted_total, t.accepted, t.drawn
            )
            .unwrap(),
        }
        writeln!(out, "bin,delta,configuration,kind,count").unwrap();
        for e in &self.entries {
            let (kind, count) = match &e.count {
                EntryCount::Exact(c) => ("exact", c.to_string()),
                EntryCount::Sampled(h) => ("sampled", h.to_string()),
            };
            writeln!(
                out,
                "{},{:?},{},{},{}",
                e.bin, self.deltas[e.bin], e.configuration, kind, count
            )
            .unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::SpectrumFormat(m);
        let mut header: HashMap<&str, &str> = HashMap::new();
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        for line in lines.by_ref() {
            if line.starts_with("bin,") {
                break;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{line}`")))?;
            header.insert(k.trim(), v.trim());
        }
        let get = |k: &str| header.get(k).copied().ok_or_else(|| bad(format!("missing `{k}`")));
        let center: SetPartition = get("center")?.parse()?;
        let n: usize = get("n")?.parse().map_err(|_| bad("bad n".into()))?;
        if n != center.n() {
            return Err(bad("n does not match center".into()));
        }
        let total: BigUint = get("total")?.parse().map_err(|_| bad("bad total".into()))?;
        let exact_prefix: usize = get("exact_prefix")?
            .parse()
            .map_err(|_| bad("bad exact_prefix".into()))?;
        let tail = match get("tail")? {
            "none" => None,
            spec => {
                let mut fields: HashMap<&str, &str> = HashMap::new();
                for part in spec.split(';') {
                    let (k, v) = part.split_once(':').ok_or_else(|| bad("bad tail".into()))?;
                    fields.insert(k, v);
                }
                let f = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("tail missing {k}")));
                Some(TailEstimate {
                    restricted_total: f("restricted_total")?.parse().map_err(|_| bad("bad tail".into()))?,
                    accepted: f("accepted")?.parse().map_err(|_| bad("bad tail".into()))?,
                    drawn: f("drawn")?.parse().map_err(|_| bad("bad tail".into()))?,
                })
            }
        };
        let mut deltas: Vec<f64> = Vec::new();
        let mut entries = Vec::new();
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(bad(format!("expected 5 columns: `{line}`")));
            }
            let bin: usize = cols[0].parse().map_err(|_| bad("bad bin".into()))?;
            let delta: f64 = cols[1].parse().map_err(|_| bad("bad delta".into()))?;
            match bin.cmp(&deltas.len()) {
                std::cmp::Ordering::Equal => deltas.push(delta),
                std::cmp::Ordering::Less if deltas[bin] == delta => {}
                _ => return Err(bad(format!("bins out of order at `{line}`"))),
            }
            let configuration: Configuration = cols[2].parse()?;
            if configuration.n() != n {
                return Err(bad(format!("configuration {configuration} does not sum to {n}")));
            }
            let count = match cols[3] {
                "exact" => EntryCount::Exact(cols[4].parse().map_err(|_| bad("bad count".into()))?),
                "sampled" => EntryCount::Sampled(cols[4].parse().map_err(|_| bad("bad count".into()))?),
                other => return Err(bad(format!("unknown count kind `{other}`"))),
            };
            if matches!(count, EntryCount::Sampled(_)) && tail.is_none() {
                return Err(bad("sampled entry without tail header".into()));
            }
            entries.push(SpectrumEntry {
                bin,
                configuration,
                count,
            });
        }
        if deltas.is_empty() || deltas[0] != 0.0 {
            return Err(bad("first bin must be distance 0".into()));
        }
        Ok(Self {
            center,
            deltas,
            entries,
            exact_prefix,
            total,
            tail,
        })
    }
}

/// Enumerates `Π_N` and bins every partition by distance to `c0` and
/// configuration. `N` must not exceed [`DEFAULT_ENUMERATION_CAP`].
pub fn exact_spectrum(c0: &SetPartition) -> Result<DistanceSpectrum> {
    exact_spectrum_with_cap(c0, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_spectrum_with_cap(c0: &SetPartition, cap: usize) -> Result<DistanceSpectrum> {
    let n = c0.n();
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    let dist = CenterDistance::new(c0);
    // split the restricted-growth space by prefix so chunks run in parallel
    let prefix_len = n.min(6);
    let mut prefixes = Vec::new();
    let mut cursor = RgsCursor::new(prefix_len);
    while let Some(p) = cursor.next_labels() {
        prefixes.push(p.to_vec());
    }
    let partials: Vec<HashMap<(u64, Configuration), u64>> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut local: HashMap<(u64, Configuration), u64> = HashMap::new();
            let mut cur = RgsCursor::with_prefix(n, prefix);
            let mut sizes = Vec::with_capacity(n);
            while let Some(labels) = cur.next_labels() {
                let k = labels.iter().copied().max().unwrap() as usize + 1;
                let d = dist.distance_labels(labels, k);
                sizes.clear();
                sizes.resize(k, 0usize);
                for &l in labels {
                    sizes[l as usize] += 1;
                }
                let config = Configuration::new(sizes.clone()).expect("nonempty blocks");
                *local.entry((d.to_bits(), config)).or_default() += 1;
            }
            local
        })
        .collect();
    let mut combined: HashMap<(u64, Configuration), u64> = HashMap::new();
    for part in partials {
        for (key, c) in part {
            *combined.entry(key).or_default() += c;
        }
    }
    let cells = combined
        .into_iter()
        .map(|((bits, configuration), c)| RawCell {
            distance: f64::from_bits(bits),
            configuration,
            count: EntryCount::Exact(BigUint::from(c)),
        })
        .collect();
    Ok(DistanceSpectrum::assemble(c0.clone(), cells, None))
}

fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Per-bin log weights `log sum_m n_lm g(λ_m)`; the distance distribution at
/// any `psi` is `exp(w_l - psi δ_l)` normalized.
#[derive(Debug, Clone)]
pub struct DistanceMasses {
    deltas: Vec<f64>,
    log_weights: Vec<f64>,
}

impl DistanceMasses {
    pub fn new(spectrum: &DistanceSpectrum, base: &EppfSpec) -> Result<Self> {
        base.validate()?;
        let mut per_bin: Vec<Vec<f64>> = vec![Vec::new(); spectrum.deltas.len()];
        let mut g_cache: HashMap<&Configuration, f64> = HashMap::new();
        for e in &spectrum.entries {
            let g = match g_cache.get(&e.configuration) {
                Some(&g) => g,
                None => {
                    let g = match g_lambda(base, &e.configuration) {
                        Ok(g) => g,
                        // more blocks than a finite family allows: zero prior mass
                        Err(Error::TooManyBlocks { .. }) => f64::NEG_INFINITY,
                        Err(other) => return Err(other),
                    };
                    g_cache.insert(&e.configuration, g);
                    g
                }
            };
            per_bin[e.bin].push(spectrum.log_count(e) + g);
        }
        Ok(Self {
            deltas: spectrum.deltas.clone(),
            log_weights: per_bin.into_iter().map(log_sum_exp).collect(),
        })
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Probability of each distance bin under penalty `psi`.
    pub fn probabilities(&self, psi: f64) -> Vec<f64> {
        if psi == f64::INFINITY {
            let mut p = vec![0.0; self.deltas.len()];
            p[0] = 1.0;
            return p;
        }
        let logs: Vec<f64> = self
            .log_weights
            .iter()
            .zip(&self.deltas)
            .map(|(w, d)| w - psi * d)
            .collect();
        let z = log_sum_exp(logs.iter().copied());
        logs.iter().map(|l| (l - z).exp()).collect()
    }

    /// `F(delta) = P(d(c, c0) <= delta)` under penalty `psi`.
    pub fn cdf_at(&self, psi: f64, delta: f64) -> f64 {
        let p = self.probabilities(psi);
        p.iter()
            .zip(&self.deltas)
            .take_while(|(_, &d)| d <= delta + DISTANCE_TOLERANCE)
            .map(|(p, _)| p)
            .sum::<f64>()
            .min(1.0)
    }

    /// Smallest distance bin whose cumulative mass reaches `q`.
    pub fn quantile(&self, psi: f64, q: f64) -> f64 {
        let mut acc = 0.0;
        for (p, d) in self.probabilities(psi).iter().zip(&self.deltas) {
            acc += p;
            if acc >= q - 1e-12 {
                return *d;
            }
        }
        *self.deltas.last().unwrap()
    }
}

/// Normalized CP density with the log normalizer cached.
#[derive(Debug, Clone)]
pub struct CpDensity<'a> {
    prior: CpPrior,
    spectrum: &'a DistanceSpectrum,
    distance: CenterDistance,
    log_z: f64,
}

impl<'a> CpDensity<'a> {
    pub fn new(prior: &CpPrior, spectrum: &'a DistanceSpectrum) -> Result<Self> {
        spectrum.check_center(prior)?;
        if !spectrum.is_exact() {
            return Err(Error::SpectrumNotExact);
        }
        let log_z = if prior.is_point_mass() {
            0.0
        } else {
            let masses = DistanceMasses::new(spectrum, prior.base())?;
            log_sum_exp(
                masses
                    .log_weights
                    .iter()
                    .zip(&masses.deltas)
                    .map(|(w, d)| w - prior.psi() * d),
            )
        };
        Ok(Self {
            prior: prior.clone(),
            spectrum,
            distance: CenterDistance::new(prior.center()),
            log_z,
        })
    }

    pub fn log_prob(&self, c: &SetPartition) -> Result<f64> {
        if self.prior.is_point_mass() {
            if c.n() != self.prior.center().n() {
                return Err(Error::SizeMismatch {
                    left: c.n(),
                    right: self.prior.center().n(),
                });
            }
            return Ok(if c == self.prior.center() { 0.0 } else { f64::NEG_INFINITY });
        }
        let d = self.distance.distance(c)?;
        let bin = self
            .spectrum
            .bin_of(d)
            .ok_or_else(|| Error::SpectrumMismatch(format!("no bin for distance {d}")))?;
        let g = match g_lambda(self.prior.base(), &configuration(c)) {
            Ok(g) => g,
            Err(Error::TooManyBlocks { .. }) => return Ok(f64::NEG_INFINITY),
            Err(e) => return Err(e),
        };
        Ok(g - self.prior.psi() * self.spectrum.deltas[bin] - self.log_z)
    }
}

/// Normalized log prior probability of `c` (natural log).
pub fn cp_log_prob(prior: &CpPrior, c: &SetPartition, spectrum: &DistanceSpectrum) -> Result<f64> {
    CpDensity::new(prior, spectrum)?.log_prob(c)
}

/// Prior probability of each distance bin, as `(δ_l, p(δ = δ_l))`.
pub fn distance_distribution(prior: &CpPrior, spectrum: &DistanceSpectrum) -> Result<Vec<(f64, f64)>> {
    spectrum.check_center(prior)?;
    let masses = DistanceMasses::new(spectrum, prior.base())?;
    Ok(masses
        .deltas
        .iter()
        .copied()
        .zip(masses.probabilities(prior.psi()))
        .collect())
}

/// Largest penalty searched by [`choose_psi`].
pub const PSI_SEARCH_MAX: f64 = 1e4;
/// Step of the coarse sweep preceding bisection.
pub const PSI_GRID_STEP: f64 = 0.25;
/// Bisection stops once the bracket is this narrow.
pub const PSI_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiChoice {
    pub psi: f64,
    /// `F(delta*)` at the chosen `psi`.
    pub mass: f64,
}

/// Smallest `psi` (to [`PSI_RESOLUTION`]) with `F(delta_star) >= q`.
pub fn choose_psi(
    spectrum: &DistanceSpectrum,
    base: &EppfSpec,
    delta_star: f64,
    q: f64,
) -> Result<PsiChoice> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!("target mass must lie in (0, 1), got {q}")));
    }
    if !(delta_star >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta* must be >= 0, got {delta_star}")));
    }
    let masses = DistanceMasses::new(spectrum, base)?;
    let f = |psi: f64| masses.cdf_at(psi, delta_star);
    let f0 = f(0.0);
    if f0 >= q {
        return Ok(PsiChoice { psi: 0.0, mass: f0 });
    }
    let steps = (PSI_SEARCH_MAX / PSI_GRID_STEP).round() as usize;
    let mut prev = (0.0, f0);
    let mut monotone = true;
    let mut best = f0;
    for j in 1..=steps {
        let psi = j as f64 * PSI_GRID_STEP;
        let v = f(psi);
        monotone &= v >= prev.1 - 1e-12;
        best = best.max(v);
        if v >= q {
            if !monotone {
                return Ok(PsiChoice { psi, mass: v });
            }
            let (mut lo, mut hi, mut hi_val) = (prev.0, psi, v);
            while hi - lo > PSI_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                let m = f(mid);
                if m >= q {
                    hi = mid;
                    hi_val = m;
                } else {
                    lo = mid;
                }
            }
            return Ok(PsiChoice { psi: hi, mass: hi_val });
        }
        prev = (psi, v);
    }
    Err(Error::Unattainable {
        target: q,
        psi_max: PSI_SEARCH_MAX,
        supremum: best,
    })
}

/// Converts an exact big count to `f64` (for reporting).
pub fn count_to_f64(c: &BigUint) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}
