//! Quality of the line as a function of time: mean registration probability
//! and the eigenvalue-averaged concurrence and determinant means.

use crate::analysis::determinants::{mean_determinant_fields, AlphaAverage};
use crate::chain_evolution::{ChainSpec, FreeFermionModes};
use crate::error::{Error, Result};
use crate::statistics::{concurrence_moments, mean_probability, Axis, CurvePoint, SweepGrid};
use crate::transfer_tensor::{transfer_tensor_from_modes, TransferTensor};

/// Averages over the `(lambda_r, lambda_s)` grid at one time.
pub fn curve_point(t: &TransferTensor<f64>, lambda_grid: &SweepGrid, angle_grid: &SweepGrid) -> Result<CurvePoint> {
    let missing = |a: Axis| Error::InvalidArgument(format!("lambda grid lacks the {a} axis"));
    let gr = lambda_grid.get(Axis::LambdaR).ok_or_else(|| missing(Axis::LambdaR))?;
    let gs = lambda_grid.get(Axis::LambdaS).ok_or_else(|| missing(Axis::LambdaS))?;
    let (wr, ws) = (gr.weights(), gs.weights());
    let mut concurrence = 0.0;
    for (i, w_r) in wr.iter().enumerate() {
        let mut row = 0.0;
        for (j, w_s) in ws.iter().enumerate() {
            row += w_s * concurrence_moments(t, gs.node(j), gr.node(i), angle_grid)?.mean;
        }
        concurrence += w_r * row;
    }
    let [d2, d1] = mean_determinant_fields(t, lambda_grid, angle_grid, AlphaAverage::Analytic)?;
    Ok(CurvePoint { t: t.time, mean_probability: mean_probability(t), concurrence, delta2: d2.mean(), delta1: d1.mean() })
}

/// [`curve_point`] at every time in `times`, in order.
pub fn time_curves(spec: &ChainSpec, times: &[f64], lambda_grid: &SweepGrid, angle_grid: &SweepGrid) -> Result<Vec<CurvePoint>> {
    let modes = FreeFermionModes::<f64>::new(spec)?;
    times
        .iter()
        .map(|&time| curve_point(&transfer_tensor_from_modes(&modes, spec, time), lambda_grid, angle_grid))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer_tensor::compute_transfer_tensor;

    #[test]
    fn product_state_at_time_zero() {
        let spec = ChainSpec::new(4, 1.0).unwrap();
        let t = compute_transfer_tensor(&spec, 0.0).unwrap();
        let p = curve_point(&t, &SweepGrid::lambdas(0.0, 1.0, 0.5).unwrap(), &SweepGrid::angles(0.5).unwrap()).unwrap();
        assert!((p.mean_probability - 1.0).abs() < 1e-12);
        assert!(p.concurrence.abs() < 1e-6);
    }

    #[test]
    fn curves_keep_time_order() {
        let spec = ChainSpec::new(4, 1.0).unwrap();
        let times = [0.5, 2.0, 1.0];
        let c = time_curves(&spec, &times, &SweepGrid::lambdas(0.0, 1.0, 0.5).unwrap(), &SweepGrid::angles(0.5).unwrap())
            .unwrap();
        assert_eq!(c.iter().map(|p| p.t).collect::<Vec<_>>(), times);
        assert!(c.iter().all(|p| p.delta2 >= 0.0 && p.delta1 >= 0.0 && p.concurrence >= 0.0));
    }
}
