//! The frontier `B` in the `(lambda_r, lambda_s)` plane between eigenvalue
//! pairs that never produce an entangled joint state and pairs that do for
//! some choice of angles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_evolution::{ChainSpec, FreeFermionModes};
use crate::error::Result;
use crate::measures::concurrence_margin;
use crate::states::{initial_qubit_state, rho_sr};
use crate::statistics::{Grid1D, ENTANGLEMENT_THRESHOLD};
use crate::transfer_tensor::{transfer_tensor_from_modes, TransferTensor};

/// How the entanglement predicate and the frontier are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySearch {
    /// Coarse step of the `(alpha1, beta1)` scan.
    pub angle_step: f64,
    /// Step of the local scan around the best coarse node.
    pub refine_step: f64,
    /// Width at which bisections stop.
    pub tol: f64,
    /// Spacing of the horizontal and vertical rays on `[1/2, 1]`.
    pub ray_step: f64,
}

impl Default for BoundarySearch {
    fn default() -> Self {
        BoundarySearch { angle_step: 0.05, refine_step: 0.005, tol: 1e-7, ray_step: 0.025 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub time: f64,
    /// `(lambda_r, lambda_s)` pairs, ordered by decreasing `lambda_s - lambda_r`.
    pub points: Vec<(f64, f64)>,
    pub bisectrix_crossing: f64,
    pub lambda_s_min: f64,
}

/// Largest concurrence margin over `(alpha1, beta1)` at `alpha2 = beta2 = 0`,
/// with the angles where it occurs.
pub fn max_margin(t: &TransferTensor<f64>, lambda_s: f64, lambda_r: f64, search: &BoundarySearch) -> Result<(f64, f64, f64)> {
    let eval = |a1: f64, b1: f64| -> Result<f64> {
        let s = initial_qubit_state(lambda_s, a1, 0.0);
        let r = initial_qubit_state(lambda_r, b1, 0.0);
        concurrence_margin(&rho_sr(t, &s, &r))
    };
    let scan = |a: Grid1D, b: Grid1D| -> Result<(f64, f64, f64)> {
        let (na, nb) = (a.len(), b.len());
        let vals: Vec<f64> =
            (0..na * nb).into_par_iter().map(|k| eval(a.node(k / nb), b.node(k % nb))).collect::<Result<_>>()?;
        let (k, v) = vals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
        Ok((v, a.node(k / nb), b.node(k % nb)))
    };
    let coarse = Grid1D::unit(search.angle_step)?;
    let coarse_best = scan(coarse, coarse)?;
    let (_, a0, b0) = coarse_best;
    let local = |c: f64| {
        let lo = ((c - search.angle_step) / search.refine_step).ceil().max(0.0) * search.refine_step;
        let hi = ((c + search.angle_step) / search.refine_step).floor() * search.refine_step;
        let hi = hi.min(1.0).max(lo);
        let n = ((hi - lo) / search.refine_step).round();
        Grid1D { start: lo, stop: lo + n * search.refine_step, step: search.refine_step }
    };
    let fine_best = scan(local(a0), local(b0))?;
    Ok(if fine_best.0 > coarse_best.0 { fine_best } else { coarse_best })
}

/// Whether some `(alpha1, beta1)` gives an entangled joint state.
pub fn is_entangled(t: &TransferTensor<f64>, lambda_s: f64, lambda_r: f64, search: &BoundarySearch) -> Result<bool> {
    Ok(max_margin(t, lambda_s, lambda_r, search)?.0 > ENTANGLEMENT_THRESHOLD)
}

/// Bisection for the switch of a predicate that is false at `lo` and true at `hi`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, mut pred: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Point `lambda` on the diagonal `lambda_s = lambda_r` where entanglement
/// first becomes possible, or `None` if even pure states stay separable.
pub fn bisectrix_crossing(t: &TransferTensor<f64>, search: &BoundarySearch) -> Result<Option<f64>> {
    if !is_entangled(t, 1.0, 1.0, search)? {
        return Ok(None);
    }
    bisect(0.5, 1.0, search.tol, |l| is_entangled(t, l, l, search)).map(Some)
}

/// Crossing on the ray with `fixed` held and the other eigenvalue running over
/// `[1/2, 1]`; `None` if the ray is entirely on one side.
fn ray_crossing(t: &TransferTensor<f64>, fixed: f64, receiver_runs: bool, search: &BoundarySearch) -> Result<Option<f64>> {
    let pred = |x: f64| if receiver_runs { is_entangled(t, fixed, x, search) } else { is_entangled(t, x, fixed, search) };
    if !pred(1.0)? || pred(0.5)? {
        return Ok(None);
    }
    bisect(0.5, 1.0, search.tol, pred).map(Some)
}

pub fn boundary_curve(t: &TransferTensor<f64>, search: &BoundarySearch) -> Result<BoundaryCurve> {
    let crossing = bisectrix_crossing(t, search)?.unwrap_or(f64::NAN);
    let lambda_s_min = if crossing.is_nan() {
        f64::NAN
    } else {
        // Above lambda_s_min the whole lambda_r ray is entangled, so no crossing exists.
        bisect(crossing, 1.0, search.tol, |ls| Ok(ray_crossing(t, ls, true, search)?.is_none()))?
    };
    let rays = Grid1D::new(0.5, 1.0, search.ray_step)?.nodes();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for &fixed in &rays {
        if let Some(lr) = ray_crossing(t, fixed, true, search)? {
            points.push((lr, fixed));
        }
        if let Some(ls) = ray_crossing(t, fixed, false, search)? {
            points.push((fixed, ls));
        }
    }
    if crossing.is_finite() {
        points.push((crossing, crossing));
    }
    points.sort_by(|a, b| (b.1 - b.0).partial_cmp(&(a.1 - a.0)).unwrap());
    Ok(BoundaryCurve { time: t.time, points, bisectrix_crossing: crossing, lambda_s_min })
}

/// Bisectrix crossing of `B` at each time of `times`.
pub fn boundary_point_evolution(spec: &ChainSpec, times: &[f64], search: &BoundarySearch) -> Result<Vec<(f64, Option<f64>)>> {
    let modes = FreeFermionModes::<f64>::new(spec)?;
    times
        .par_iter()
        .map(|&time| {
            let t = transfer_tensor_from_modes(&modes, spec, time);
            Ok((time, bisectrix_crossing(&t, search)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer_tensor::compute_transfer_tensor;

    #[test]
    fn no_crossing_at_time_zero() {
        let spec = ChainSpec::new(6, 1.0).unwrap();
        let t = compute_transfer_tensor(&spec, 0.0).unwrap();
        assert_eq!(bisectrix_crossing(&t, &BoundarySearch::default()).unwrap(), None);
    }

    #[test]
    fn maximally_mixed_pairs_are_separable() {
        let spec = ChainSpec::new(6, 1.0).unwrap();
        let t = compute_transfer_tensor(&spec, 4.0).unwrap();
        let search = BoundarySearch::default();
        assert!(!is_entangled(&t, 0.5, 0.5, &search).unwrap());
    }

    #[test]
    fn bisection_converges() {
        let x = bisect(0.0, 1.0, 1e-9, |x| Ok(x > 0.3141)).unwrap();
        assert!((x - 0.3141).abs() < 1e-8);
    }
}
