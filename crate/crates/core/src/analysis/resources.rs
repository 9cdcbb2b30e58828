use serde::Serialize;

use crate::recurrence::{iterate, FlaggedState16, NoiseModel, RoundRecord};
use crate::{Error, Result};

pub const DEFAULT_RESOURCE_ROUNDS: usize = 60;
/// Rounds with `1 - F_cond` at or below this enter the power-law fit.
pub const FIT_TAIL_EPS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourcePoint {
    pub eps_target: f64,
    /// First round with `1 - F_cond <= eps_target`, if reached.
    pub round: Option<usize>,
    /// Initial pairs consumed per final pair at that round.
    pub n_required: Option<f64>,
}

impl ResourcePoint {
    pub fn require(&self) -> Result<(usize, f64)> {
        match (self.round, self.n_required) {
            (Some(r), Some(n)) => Ok((r, n)),
            _ => Err(Error::Unreachable(self.eps_target)),
        }
    }
}

/// Least-squares line `ln R = slope · ln(1/ε) + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl PowerLawFit {
    fn from_points(pts: &[(f64, f64)]) -> Option<PowerLawFit> {
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let sse: f64 = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
        let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
        Some(PowerLawFit {
            slope,
            intercept,
            r_squared,
            points: pts.len(),
        })
    }

    /// Predicted `R` at security parameter `eps`.
    pub fn predict(&self, eps: f64) -> f64 {
        (self.slope * (1.0 / eps).ln() + self.intercept).exp()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResourceCurve {
    pub points: Vec<ResourcePoint>,
    /// `None` when fewer than three rounds fall in the tail.
    pub fit: Option<PowerLawFit>,
    pub records: Vec<RoundRecord>,
}

/// Resources needed to push `1 - F_cond` below each target, plus the
/// log-log fit of the whole trajectory tail.
pub fn resource_curve(
    noise: &NoiseModel,
    initial: &FlaggedState16,
    eps_targets: &[f64],
    max_rounds: usize,
) -> Result<ResourceCurve> {
    // Fixed round count: the tail must keep going after the state stops moving.
    let t = iterate(initial, noise, max_rounds, 0.0)?;
    let points = eps_targets
        .iter()
        .map(|&eps| {
            let hit = t.records.iter().find(|r| r.epsilon <= eps);
            ResourcePoint {
                eps_target: eps,
                round: hit.map(|r| r.round),
                n_required: hit.map(|r| r.resources),
            }
        })
        .collect();
    let tail: Vec<(f64, f64)> = t
        .records
        .iter()
        .filter(|r| r.epsilon > 0.0 && r.epsilon <= FIT_TAIL_EPS && r.resources.is_finite())
        .map(|r| ((1.0 / r.epsilon).ln(), r.resources.ln()))
        .collect();
    Ok(ResourceCurve {
        points,
        fit: PowerLawFit::from_points(&tail),
        records: t.records,
    })
}
