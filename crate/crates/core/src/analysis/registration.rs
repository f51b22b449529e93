//! Choice of the time at which the receiver's state is registered.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_evolution::{ChainSpec, FreeFermionModes, SlaterAmplitudes};
use crate::error::{Error, Result};
use crate::transfer_tensor::{transfer_entry, TIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Mean excitation-registration probability.
    MeanProbability,
    /// Single-excitation transfer fidelity, used when the mean probability
    /// does not depend on time (the two-node chain).
    Fidelity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegistrationTime {
    pub t_star: f64,
    pub objective: Objective,
    pub mean_probability: f64,
    pub fidelity: f64,
}

const PROBABILITY_TERMS: [(&str, f64); 4] =
    [("0110;0110", 1.0), ("0101;0101", 1.0), ("0111;0111", 1.0), ("1111;1111", 0.5)];

/// Evaluates the two objectives from the handful of tensor entries they use.
#[derive(Clone, Debug)]
pub struct ObjectiveEvaluator {
    spec: ChainSpec,
    modes: FreeFermionModes<f64>,
}

impl ObjectiveEvaluator {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        Ok(ObjectiveEvaluator { spec: *spec, modes: FreeFermionModes::new(spec)? })
    }

    /// `(mean probability, fidelity)` at time `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let amps = SlaterAmplitudes { f: self.modes.amplitudes(t) };
        let entry = |label: &str| transfer_entry(&self.spec, label.parse::<TIndex>().expect("label"), &amps).re;
        let fidelity = entry(PROBABILITY_TERMS[0].0);
        let sum: f64 = PROBABILITY_TERMS.iter().map(|&(l, w)| w * entry(l)).sum();
        (2.0 / 3.0 * sum, fidelity)
    }

    pub fn objective(&self, objective: Objective, t: f64) -> f64 {
        let (p, f) = self.eval(t);
        match objective {
            Objective::MeanProbability => p,
            Objective::Fidelity => f,
        }
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Index of the largest interior local maximum of a sampled curve.
fn best_interior_peak(values: &[f64]) -> Option<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .max_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap().then(j.cmp(&i)))
}

/// Scans `t_range` with `coarse_step`, picks the highest interior peak of the
/// mean registration probability and refines it by golden-section search.
///
/// The scan starts from `P = 1` at `t = 0` (nothing has left the sender), so
/// the endpoint itself is never a candidate. If the probability is flat the
/// fidelity is used instead.
pub fn optimize_registration_time(spec: &ChainSpec, t_range: (f64, f64), coarse_step: f64) -> Result<RegistrationTime> {
    let (lo, hi) = t_range;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidArgument(format!("empty time range [{lo}, {hi}]")));
    }
    if !(coarse_step > 0.0) {
        return Err(Error::InvalidArgument("coarse step must be positive".into()));
    }
    let eval = ObjectiveEvaluator::new(spec)?;
    let n = ((hi - lo) / coarse_step).ceil() as usize;
    let times: Vec<f64> = (0..=n).map(|i| (lo + i as f64 * coarse_step).min(hi)).collect();
    let samples: Vec<(f64, f64)> = times.par_iter().map(|&t| eval.eval(t)).collect();

    let prob: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let spread = prob.iter().copied().fold(f64::NEG_INFINITY, f64::max) - prob.iter().copied().fold(f64::INFINITY, f64::min);
    let mut choice = None;
    if spread > 1e-12 {
        choice = best_interior_peak(&prob).map(|i| (Objective::MeanProbability, i));
    }
    if choice.is_none() {
        let fid: Vec<f64> = samples.iter().map(|s| s.1).collect();
        choice = best_interior_peak(&fid).map(|i| (Objective::Fidelity, i));
    }
    let (objective, i) =
        choice.ok_or_else(|| Error::InvalidArgument("no interior maximum inside the time range".into()))?;
    let t_star = golden_section_max(|t| eval.objective(objective, t), times[i - 1], times[i + 1], 1e-8);
    let (mean_probability, fidelity) = eval.eval(t_star);
    Ok(RegistrationTime { t_star, objective, mean_probability, fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::{mean_probability, transfer_fidelity};
    use crate::transfer_tensor::compute_transfer_tensor;

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section_max(|x| -(x - 0.3).powi(2), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn evaluator_matches_full_tensor() {
        let spec = ChainSpec::new(9, 1.0).unwrap();
        let eval = ObjectiveEvaluator::new(&spec).unwrap();
        let t = compute_transfer_tensor(&spec, 7.3).unwrap();
        let (p, f) = eval.eval(7.3);
        assert!((p - mean_probability(&t)).abs() < 1e-14);
        assert!((f - transfer_fidelity(&t)).abs() < 1e-14);
    }

    #[test]
    fn two_node_chain_falls_back_to_fidelity() {
        let spec = ChainSpec::new(2, 1.0).unwrap();
        let r = optimize_registration_time(&spec, (0.0, 2.0 * std::f64::consts::PI), 0.01).unwrap();
        assert_eq!(r.objective, Objective::Fidelity);
        assert!((r.t_star - std::f64::consts::PI).abs() < 1e-6);
        assert!((r.mean_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_ranges() {
        let spec = ChainSpec::new(4, 1.0).unwrap();
        assert!(optimize_registration_time(&spec, (3.0, 1.0), 0.1).is_err());
        assert!(optimize_registration_time(&spec, (0.0, 1.0), 0.0).is_err());
    }
}
