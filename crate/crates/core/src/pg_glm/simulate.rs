//! Synthetic grouped data: twelve defects in four groups of three.

use rand::Rng;

use super::{DesignBlock, GroupedBinaryData};
use crate::error::{Error, Result};
use crate::partitions::SetPartition;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationDesign {
    /// Observations per defect.
    pub sizes: Vec<usize>,
    /// Group of each defect.
    pub truth: SetPartition,
    /// Coefficients per group, `p` each.
    pub group_betas: Vec<Vec<f64>>,
}

fn coefficients(p: usize, set: &[(usize, f64)]) -> Vec<f64> {
    let mut beta = vec![0.0; p];
    for &(one_based, v) in set {
        beta[one_based - 1] = v;
    }
    beta
}

impl SimulationDesign {
    pub fn standard() -> Self {
        let p = 10;
        Self {
            sizes: vec![100, 600, 200, 300, 100, 100, 500, 100, 200, 200, 200, 200],
            truth: "{1,2,3}{4,5,6}{7,8,9}{10,11,12}".parse().unwrap(),
            group_betas: vec![
                coefficients(p, &[(1, 0.7), (2, -1.2), (3, 0.5), (4, 0.5)]),
                coefficients(p, &[(4, 0.7), (5, -0.7), (6, 0.7)]),
                coefficients(p, &[(9, 0.7), (10, -1.2)]),
                coefficients(p, &[(1, 0.7), (2, -0.7), (9, 0.7), (10, -0.7)]),
            ],
        }
    }

    /// Same design with every `n_i` multiplied by `factor` (at least 1).
    pub fn scaled(mut self, factor: f64) -> Self {
        for s in &mut self.sizes {
            *s = ((*s as f64 * factor).round() as usize).max(1);
        }
        self
    }

    pub fn p(&self) -> usize {
        self.group_betas.first().map_or(0, Vec::len)
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.len() != self.truth.n() {
            return Err(Error::Data("one size per defect required".into()));
        }
        if self.group_betas.len() != self.truth.k() {
            return Err(Error::Data("one coefficient vector per group required".into()));
        }
        if self.group_betas.iter().any(|b| b.len() != self.p()) {
            return Err(Error::Data("coefficient vectors differ in length".into()));
        }
        Ok(())
    }
}

/// Partition that mixes every true group: `{1,5,9}{2,6,10}{3,7,11}{4,8,12}`.
pub fn wrong_center() -> SetPartition {
    "{1,5,9}{2,6,10}{3,7,11}{4,8,12}".parse().unwrap()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedStudy {
    pub data: GroupedBinaryData,
    pub truth: SetPartition,
    /// True coefficients of each defect (those of its group).
    pub defect_betas: Vec<Vec<f64>>,
}

/// Covariates i.i.d. Bernoulli(1/2), `y ~ Bernoulli(inverse-logit(x' beta))`
/// with zero intercepts. Defect `i` uses substream `i` of `seed`.
pub fn simulate_study(design: &SimulationDesign, seed: u64) -> Result<SimulatedStudy> {
    design.validate()?;
    let p = design.p();
    let mut defects = Vec::with_capacity(design.sizes.len());
    let mut defect_betas = Vec::with_capacity(design.sizes.len());
    for (i, &n_i) in design.sizes.iter().enumerate() {
        let beta = &design.group_betas[design.truth.label(i)];
        let mut rng = substream(seed, i as u64);
        let mut x = Vec::with_capacity(n_i * p);
        let mut y = Vec::with_capacity(n_i);
        for _ in 0..n_i {
            let row: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect();
            let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
            let prob = 1.0 / (1.0 + (-eta).exp());
            y.push(u8::from(rng.random::<f64>() < prob));
            x.extend(row);
        }
        defects.push(DesignBlock::new(p, x, y)?);
        defect_betas.push(beta.clone());
    }
    Ok(SimulatedStudy {
        data: GroupedBinaryData::new(defects, None)?,
        truth: design.truth.clone(),
        defect_betas,
    })
}
