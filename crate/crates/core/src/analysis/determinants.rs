//! Means and single-angle deviations of the two determinant conditions over
//! the `(lambda_r, lambda_s)` plane.
//!
//! Both conditions are sums of products `G_p(lambda_r, beta) H_p(lambda_s, alpha)`,
//! so every average over the angles factorizes into a receiver average times a
//! sender average. The fields are built from those factors instead of the full
//! four-angle grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    analytic_alpha_averages, delta1_norm, delta2_norm, jacobian_minors, jacobian_row_sums, jacobian_x,
    map_column_sums, map_minor_sums,
};
use crate::states::{receiver_map, Angle};
use crate::statistics::{Axis, Grid1D, ScalarField, SweepGrid};
use crate::transfer_tensor::TransferTensor;

/// How the sender-side factors are averaged over `(alpha1, alpha2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaAverage {
    /// Closed-form averages over the whole square.
    #[default]
    Analytic,
    /// Trapezoid rule on the angle grid.
    Grid,
}

/// Factors of both conditions averaged over a pair of angles, with the
/// marginal over each angle of the pair.
#[derive(Clone, Debug, PartialEq)]
struct FactorMoments {
    /// `[minor terms, linear terms]`.
    mean: [[f64; 3]; 2],
    /// `marginals[k][i]`: average over the second angle with angle `k` at node `i`.
    marginals: [Vec<[[f64; 3]; 2]>; 2],
    weights: [Vec<f64>; 2],
}

impl FactorMoments {
    fn new(g1: Grid1D, g2: Grid1D, f: impl Fn(f64, f64) -> [[f64; 3]; 2]) -> Self {
        let weights = [g1.weights(), g2.weights()];
        let (n1, n2) = (g1.len(), g2.len());
        let zero = [[0.0; 3]; 2];
        let mut marginals = [vec![zero; n1], vec![zero; n2]];
        let mut mean = zero;
        for i in 0..n1 {
            for j in 0..n2 {
                let v = f(g1.node(i), g2.node(j));
                for k in 0..2 {
                    for p in 0..3 {
                        marginals[0][i][k][p] += weights[1][j] * v[k][p];
                        marginals[1][j][k][p] += weights[0][i] * v[k][p];
                        mean[k][p] += weights[0][i] * weights[1][j] * v[k][p];
                    }
                }
            }
        }
        FactorMoments { mean, marginals, weights }
    }
}

fn receiver_factors(t: &TransferTensor<f64>, lambda_r: f64, g1: Grid1D, g2: Grid1D) -> FactorMoments {
    FactorMoments::new(g1, g2, |b1, b2| {
        let m = receiver_map(t, lambda_r, b1, b2).m;
        [map_minor_sums(&m), map_column_sums(&m)]
    })
}

fn sender_factors(lambda_s: f64, g1: Grid1D, g2: Grid1D) -> FactorMoments {
    FactorMoments::new(g1, g2, |a1, a2| {
        let j = jacobian_x(lambda_s, a1, a2);
        [jacobian_minors(&j), jacobian_row_sums(&j)]
    })
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Mean and deviations `[alpha1, alpha2, beta1, beta2]` of one condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantStats {
    pub mean: f64,
    pub deviations: [f64; 4],
}

impl DeterminantStats {
    pub fn deviation(&self, a: Angle) -> f64 {
        self.deviations[a.position()]
    }
}

fn combine(sender: &FactorMoments, receiver: &FactorMoments, analytic: Option<[[f64; 3]; 2]>) -> [DeterminantStats; 2] {
    let norms = [delta2_norm::<f64>(), delta1_norm::<f64>()];
    std::array::from_fn(|k| {
        let grid_mean = dot(&sender.mean[k], &receiver.mean[k]);
        let spread = |marg: &[[[f64; 3]; 2]], w: &[f64], other: &[f64; 3]| {
            marg.iter().zip(w).map(|(m, w)| w * (dot(&m[k], other) - grid_mean).powi(2)).sum::<f64>().sqrt()
        };
        let deviations = [
            spread(&sender.marginals[0], &sender.weights[0], &receiver.mean[k]),
            spread(&sender.marginals[1], &sender.weights[1], &receiver.mean[k]),
            spread(&receiver.marginals[0], &receiver.weights[0], &sender.mean[k]),
            spread(&receiver.marginals[1], &receiver.weights[1], &sender.mean[k]),
        ];
        let mean = match analytic {
            Some(h) => dot(&h[k], &receiver.mean[k]),
            None => grid_mean,
        };
        DeterminantStats { mean: mean / norms[k], deviations: deviations.map(|d| d / norms[k]) }
    })
}

fn analytic_factors(lambda_s: f64) -> [[f64; 3]; 2] {
    let (pair, singles) = analytic_alpha_averages(lambda_s);
    [[pair; 3], singles]
}

/// `[two-parameter, one-parameter]` statistics at one eigenvalue pair.
/// Deviations always use the angle grid; `alpha` only affects the means.
pub fn determinant_stats(
    t: &TransferTensor<f64>,
    lambda_s: f64,
    lambda_r: f64,
    angle_grid: &SweepGrid,
    alpha: AlphaAverage,
) -> [DeterminantStats; 2] {
    let [a1, a2, b1, b2] = angle_grid.angle_grids();
    let sender = sender_factors(lambda_s, a1, a2);
    let receiver = receiver_factors(t, lambda_r, b1, b2);
    combine(&sender, &receiver, (alpha == AlphaAverage::Analytic).then(|| analytic_factors(lambda_s)))
}

fn lambda_axes(lambda_grid: &SweepGrid) -> Result<(Grid1D, Grid1D)> {
    let get = |a: Axis| lambda_grid.get(a).ok_or_else(|| Error::InvalidArgument(format!("lambda grid lacks the {a} axis")));
    Ok((get(Axis::LambdaR)?, get(Axis::LambdaS)?))
}

/// Statistics on the whole eigenvalue plane, indexed `[lambda_r][lambda_s]`.
fn stats_plane(
    t: &TransferTensor<f64>,
    lambda_grid: &SweepGrid,
    angle_grid: &SweepGrid,
    alpha: AlphaAverage,
) -> Result<(Grid1D, Grid1D, Vec<[DeterminantStats; 2]>)> {
    use rayon::prelude::*;
    let (gr, gs) = lambda_axes(lambda_grid)?;
    let [a1, a2, b1, b2] = angle_grid.angle_grids();
    let receivers: Vec<FactorMoments> = gr.nodes().par_iter().map(|&lr| receiver_factors(t, lr, b1, b2)).collect();
    let senders: Vec<FactorMoments> = gs.nodes().par_iter().map(|&ls| sender_factors(ls, a1, a2)).collect();
    let mut out = Vec::with_capacity(receivers.len() * senders.len());
    for r in &receivers {
        for (j, s) in senders.iter().enumerate() {
            let analytic = (alpha == AlphaAverage::Analytic).then(|| analytic_factors(gs.node(j)));
            out.push(combine(s, r, analytic));
        }
    }
    Ok((gr, gs, out))
}

fn field(name: &str, gr: Grid1D, gs: Grid1D, values: Vec<f64>, t: &TransferTensor<f64>) -> ScalarField {
    ScalarField {
        quantity: name.to_owned(),
        axis1: (Axis::LambdaR, gr),
        axis2: (Axis::LambdaS, gs),
        values,
        metadata: Vec::new(),
    }
    .with_meta("n_nodes", t.n_nodes)
    .with_meta("coupling", t.coupling)
    .with_meta("time", t.time)
}

/// `[delta2_mean, delta1_mean]` over the `(lambda_r, lambda_s)` grid.
pub fn mean_determinant_fields(
    t: &TransferTensor<f64>,
    lambda_grid: &SweepGrid,
    angle_grid: &SweepGrid,
    alpha: AlphaAverage,
) -> Result<[ScalarField; 2]> {
    let (gr, gs, stats) = stats_plane(t, lambda_grid, angle_grid, alpha)?;
    Ok(std::array::from_fn(|k| {
        let name = ["delta2_mean", "delta1_mean"][k];
        field(name, gr, gs, stats.iter().map(|s| s[k].mean).collect(), t)
            .with_meta("alpha_average", format!("{alpha:?}").to_lowercase())
    }))
}

/// Deviation fields `[condition][angle]`, conditions ordered two-parameter
/// then one-parameter, angles `alpha1, alpha2, beta1, beta2`.
pub fn determinant_deviation_fields(
    t: &TransferTensor<f64>,
    lambda_grid: &SweepGrid,
    angle_grid: &SweepGrid,
) -> Result<[[ScalarField; 4]; 2]> {
    let (gr, gs, stats) = stats_plane(t, lambda_grid, angle_grid, AlphaAverage::Grid)?;
    Ok(std::array::from_fn(|k| {
        std::array::from_fn(|a| {
            let name = format!("delta_dev:{}:{}", 2 - k, Angle::ALL[a].name());
            field(&name, gr, gs, stats.iter().map(|s| s[k].deviations[a]).collect(), t)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_evolution::ChainSpec;
    use crate::measures::determinants;
    use crate::states::ControlParams;
    use crate::statistics::AngleMoments;
    use crate::statistics::sample_angles;
    use crate::transfer_tensor::compute_transfer_tensor;

    fn tensor() -> TransferTensor<f64> {
        compute_transfer_tensor(&ChainSpec::new(6, 1.0).unwrap(), 3.3).unwrap()
    }

    #[test]
    fn separated_matches_direct_average() {
        let t = tensor();
        let grid = SweepGrid::angles(0.125).unwrap();
        for &(ls, lr) in &[(0.9, 0.7), (0.3, 1.0), (0.5, 0.8)] {
            let stats = determinant_stats(&t, ls, lr, &grid, AlphaAverage::Grid);
            let fixed = ControlParams { lambda_s: ls, lambda_r: lr, ..Default::default() };
            let grids = grid.angle_grids();
            let d2 = AngleMoments::from_samples(&sample_angles(|p| determinants(&t, p).delta2, &grids, &fixed), &grids);
            let d1 = AngleMoments::from_samples(&sample_angles(|p| determinants(&t, p).delta1, &grids, &fixed), &grids);
            for (s, direct) in stats.iter().zip([d2, d1]) {
                assert!((s.mean - direct.mean).abs() < 1e-12);
                for a in 0..4 {
                    assert!((s.deviations[a] - direct.deviations[a]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn analytic_and_grid_means_converge() {
        let t = tensor();
        let fine = SweepGrid::angles(0.01).unwrap();
        let a = determinant_stats(&t, 0.9, 0.8, &fine, AlphaAverage::Analytic);
        let g = determinant_stats(&t, 0.9, 0.8, &fine, AlphaAverage::Grid);
        for k in 0..2 {
            assert!((a[k].mean - g[k].mean).abs() < 1e-3 * a[k].mean.max(1e-3));
        }
    }

    #[test]
    fn mixed_sender_gives_zero_means() {
        let t = tensor();
        let s = determinant_stats(&t, 0.5, 0.9, &SweepGrid::default(), AlphaAverage::Analytic);
        assert!(s[0].mean.abs() < 1e-15 && s[1].mean.abs() < 1e-15);
    }

    #[test]
    fn mixed_receiver_has_no_beta_spread() {
        let t = tensor();
        let s = determinant_stats(&t, 0.9, 0.5, &SweepGrid::default(), AlphaAverage::Grid);
        for k in 0..2 {
            assert!(s[k].deviation(Angle::Beta1) < 1e-12);
            assert!(s[k].deviation(Angle::Beta2) < 1e-12);
        }
    }

    #[test]
    fn field_layout_and_names() {
        let t = tensor();
        let lg = SweepGrid::lambdas(0.5, 1.0, 0.25).unwrap();
        let [d2, d1] = mean_determinant_fields(&t, &lg, &SweepGrid::angles(0.25).unwrap(), AlphaAverage::Analytic).unwrap();
        assert_eq!(d2.shape(), (3, 3));
        assert_eq!(d1.quantity, "delta1_mean");
        let direct = determinant_stats(&t, 1.0, 0.75, &SweepGrid::angles(0.25).unwrap(), AlphaAverage::Analytic);
        assert_eq!(d2.at(1, 2), direct[0].mean);
        let devs = determinant_deviation_fields(&t, &lg, &SweepGrid::angles(0.25).unwrap()).unwrap();
        assert_eq!(devs[1][2].quantity, "delta_dev:1:beta1");
        assert!(lambda_axes(&SweepGrid::default()).is_err());
    }
}
