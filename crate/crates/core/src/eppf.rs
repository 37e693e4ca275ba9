//! Baseline exchangeable partition probability functions.
//!
//! All values are natural logarithms. Single-item conditional weights are
//! returned unnormalized: the shared denominators cancel when the weights
//! are normalized at the point of sampling.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::partitions::{bell_number, configuration, Configuration, SetPartition};

/// Baseline prior family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EppfSpec {
    /// Every partition of `[n]` equally likely.
    Uniform,
    /// Dirichlet process with concentration `alpha > 0`.
    DirichletProcess { alpha: f64 },
    /// Pitman–Yor process, `0 <= sigma < 1` and `alpha > -sigma`.
    PitmanYor { alpha: f64, sigma: f64 },
    /// Finite mixture with `kappa` components and a symmetric
    /// Dirichlet(`gamma / kappa`, ...) prior on the weights.
    SymmetricDirichlet { kappa: usize, gamma: f64 },
}

/// Target of a single-item reallocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// Join the cluster with this index in the size vector.
    Existing(usize),
    /// Open a cluster not occupied by any other item.
    New,
}

impl EppfSpec {
    pub fn dirichlet_process(alpha: f64) -> Result<Self> {
        let s = Self::DirichletProcess { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn pitman_yor(alpha: f64, sigma: f64) -> Result<Self> {
        let s = Self::PitmanYor { alpha, sigma };
        s.validate()?;
        Ok(s)
    }

    pub fn symmetric_dirichlet(kappa: usize, gamma: f64) -> Result<Self> {
        let s = Self::SymmetricDirichlet { kappa, gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::EppfParameters(m));
        match *self {
            Self::Uniform => Ok(()),
            Self::DirichletProcess { alpha } => {
                if alpha > 0.0 && alpha.is_finite() {
                    Ok(())
                } else {
                    bad(format!("DP concentration must be positive, got {alpha}"))
                }
            }
            Self::PitmanYor { alpha, sigma } => {
                if !(0.0..1.0).contains(&sigma) {
                    bad(format!("PY discount must lie in [0, 1), got {sigma}"))
                } else if !(alpha > -sigma) || !alpha.is_finite() {
                    bad(format!("PY concentration must exceed -sigma, got {alpha}"))
                } else {
                    Ok(())
                }
            }
            Self::SymmetricDirichlet { kappa, gamma } => {
                if kappa == 0 {
                    bad("finite family needs kappa >= 1".into())
                } else if !(gamma > 0.0) || !gamma.is_finite() {
                    bad(format!("symmetric Dirichlet mass must be positive, got {gamma}"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::DirichletProcess { .. } => "dirichlet_process",
            Self::PitmanYor { .. } => "pitman_yor",
            Self::SymmetricDirichlet { .. } => "symmetric_dirichlet",
        }
    }

    /// Log weight of joining an occupied cluster of `size` other items.
    pub fn log_join(&self, size: usize) -> f64 {
        let s = size as f64;
        match *self {
            Self::Uniform => 0.0,
            Self::DirichletProcess { .. } => s.ln(),
            Self::PitmanYor { sigma, .. } => (s - sigma).ln(),
            Self::SymmetricDirichlet { kappa, gamma } => (s + gamma / kappa as f64).ln(),
        }
    }

    /// Log weight of opening a new cluster when `occupied` clusters hold the
    /// other items. For the finite family this aggregates the
    /// `kappa - occupied` empty components.
    pub fn log_open(&self, occupied: usize) -> f64 {
        match *self {
            Self::Uniform => 0.0,
            Self::DirichletProcess { alpha } => alpha.ln(),
            Self::PitmanYor { alpha, sigma } => (alpha + sigma * occupied as f64).ln(),
            Self::SymmetricDirichlet { kappa, gamma } => {
                if occupied >= kappa {
                    f64::NEG_INFINITY
                } else {
                    ((kappa - occupied) as f64 * gamma / kappa as f64).ln()
                }
            }
        }
    }

    fn check_blocks(&self, k: usize) -> Result<()> {
        if let Self::SymmetricDirichlet { kappa, .. } = *self {
            if k > kappa {
                return Err(Error::TooManyBlocks { k, kappa });
            }
        }
        Ok(())
    }

    /// Log of the partition-independent factor, so that
    /// `log_eppf = g_lambda + log_normalizer` for the Gibbs-type families.
    pub fn log_normalizer(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            Self::Uniform => -ln_biguint(&bell_number(n)),
            Self::DirichletProcess { alpha } => ln_gamma(alpha) - ln_gamma(alpha + nf),
            Self::PitmanYor { alpha, .. } => ln_gamma(alpha + 1.0) - ln_gamma(alpha + nf),
            Self::SymmetricDirichlet { gamma, .. } => ln_gamma(gamma) - ln_gamma(gamma + nf),
        }
    }
}

/// Natural log of a big integer, exact to double precision at any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Log prior probability of `c`.
pub fn log_eppf(spec: &EppfSpec, c: &SetPartition) -> Result<f64> {
    spec.validate()?;
    let lambda = configuration(c);
    Ok(g_lambda(spec, &lambda)? + spec.log_normalizer(c.n()))
}

/// The configuration-dependent factor of the EPPF, log scale.
pub fn g_lambda(spec: &EppfSpec, lambda: &Configuration) -> Result<f64> {
    spec.check_blocks(lambda.k())?;
    let k = lambda.k();
    Ok(match *spec {
        EppfSpec::Uniform => 0.0,
        EppfSpec::DirichletProcess { alpha } => {
            k as f64 * alpha.ln() + lambda.sizes().iter().map(|&s| ln_gamma(s as f64)).sum::<f64>()
        }
        EppfSpec::PitmanYor { alpha, sigma } => {
            let clusters: f64 = (1..k).map(|j| (alpha + j as f64 * sigma).ln()).sum();
            // (1 - sigma)_{s - 1}
            let base = ln_gamma(1.0 - sigma);
            let sizes: f64 = lambda
                .sizes()
                .iter()
                .map(|&s| ln_gamma(s as f64 - sigma) - base)
                .sum();
            clusters + sizes
        }
        EppfSpec::SymmetricDirichlet { kappa, gamma } => {
            let w = gamma / kappa as f64;
            let falling = ln_gamma(kappa as f64 + 1.0) - ln_gamma((kappa - k) as f64 + 1.0);
            let base = ln_gamma(w);
            falling + lambda.sizes().iter().map(|&s| ln_gamma(w + s as f64) - base).sum::<f64>()
        }
    })
}

/// Unnormalized log conditional prior weight of placing one item given the
/// sizes of the clusters formed by the others.
///
/// For the finite family `Existing(k)` addresses component `k < kappa`;
/// components beyond the end of `sizes` are empty. `New` then stands for
/// all empty components together.
pub fn conditional_predictive(
    spec: &EppfSpec,
    sizes_minus_i: &[usize],
    target: Candidate,
) -> Result<f64> {
    spec.validate()?;
    let occupied = sizes_minus_i.iter().filter(|&&s| s > 0).count();
    match (target, spec) {
        (Candidate::Existing(k), EppfSpec::SymmetricDirichlet { kappa, .. }) => {
            if k >= *kappa {
                return Err(Error::ClusterOutOfRange {
                    index: k,
                    available: *kappa,
                });
            }
            Ok(spec.log_join(sizes_minus_i.get(k).copied().unwrap_or(0)))
        }
        (Candidate::Existing(k), _) => match sizes_minus_i.get(k) {
            Some(&s) => Ok(spec.log_join(s)),
            None => Err(Error::ClusterOutOfRange {
                index: k,
                available: sizes_minus_i.len(),
            }),
        },
        (Candidate::New, _) => Ok(spec.log_open(occupied)),
    }
}
