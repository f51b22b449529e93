//! Grid averages over the control parameters, standard deviations with
//! respect to single angles, the entanglement witness, and the time-domain
//! quality curves of the line.
//!
//! All averages use the trapezoid rule normalized to the interval length, so
//! the mean of a constant is that constant. Grid values are evaluated in
//! parallel but always reduced in the same sequential order, which keeps the
//! results bit-identical for any number of worker threads.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::concurrence;
use crate::states::{initial_qubit_state, Angle, ControlParams, QubitDensity};
use crate::transfer_tensor::TransferTensor;

/// Threshold above which a concurrence counts as entanglement.
pub const ENTANGLEMENT_THRESHOLD: f64 = 1e-10;

/// Default angle step.
pub const DEFAULT_ANGLE_STEP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    LambdaS,
    LambdaR,
    Alpha1,
    Alpha2,
    Beta1,
    Beta2,
    Time,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::LambdaS => "lambda_s",
            Axis::LambdaR => "lambda_r",
            Axis::Alpha1 => "alpha1",
            Axis::Alpha2 => "alpha2",
            Axis::Beta1 => "beta1",
            Axis::Beta2 => "beta2",
            Axis::Time => "t",
        }
    }
}

impl From<Angle> for Axis {
    fn from(a: Angle) -> Self {
        match a {
            Angle::Alpha1 => Axis::Alpha1,
            Angle::Alpha2 => Axis::Alpha2,
            Angle::Beta1 => Axis::Beta1,
            Angle::Beta2 => Axis::Beta2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [Axis::LambdaS, Axis::LambdaR, Axis::Alpha1, Axis::Alpha2, Axis::Beta1, Axis::Beta2, Axis::Time];
        all.into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown axis `{s}`")))
    }
}

/// Uniform grid on `[start, stop]` including both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid1D {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Grid1D { start, stop, step };
        g.validate()?;
        Ok(g)
    }

    /// `[0, 1]` with the given step.
    pub fn unit(step: f64) -> Result<Self> {
        Self::new(0.0, 1.0, step)
    }

    /// A single node at `value`.
    pub fn point(value: f64) -> Self {
        Grid1D { start: value, stop: value, step: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        if self.step <= 0.0 || self.stop < self.start {
            return Err(Error::InvalidArgument(format!(
                "grid needs step > 0 and stop >= start (got {}..{} step {})",
                self.start, self.stop, self.step
            )));
        }
        let n = self.intervals();
        if ((n as f64) * self.step - (self.stop - self.start)).abs() > 1e-9 * (self.stop - self.start).max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "step {} does not divide [{}, {}]",
                self.step, self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Number of sub-intervals.
    pub fn intervals(&self) -> usize {
        ((self.stop - self.start) / self.step).round() as usize
    }

    pub fn len(&self) -> usize {
        self.intervals() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        let n = self.intervals();
        if n == 0 {
            return self.start;
        }
        if i == n {
            return self.stop;
        }
        self.start + (self.stop - self.start) * i as f64 / n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Trapezoid weights divided by the interval length (they sum to one).
    pub fn weights(&self) -> Vec<f64> {
        let n = self.intervals();
        if n == 0 {
            return vec![1.0];
        }
        let w = 1.0 / n as f64;
        (0..=n).map(|i| if i == 0 || i == n { 0.5 * w } else { w }).collect()
    }

    /// Same interval with half the step.
    pub fn refined(&self) -> Self {
        Grid1D { step: self.step / 2.0, ..*self }
    }
}

/// A set of named axes, each with its own grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axes: Vec<(Axis, Grid1D)>,
}

impl SweepGrid {
    pub fn new(axes: Vec<(Axis, Grid1D)>) -> Result<Self> {
        for (axis, g) in &axes {
            g.validate()?;
            if *axis != Axis::Time && (g.start < 0.0 || g.stop > 1.0) {
                return Err(Error::InvalidArgument(format!("{axis} grid leaves [0, 1]")));
            }
        }
        Ok(SweepGrid { axes })
    }

    /// The four angle axes on `[0, 1]` with a common step.
    pub fn angles(step: f64) -> Result<Self> {
        let g = Grid1D::unit(step)?;
        Self::new(Angle::ALL.iter().map(|&a| (Axis::from(a), g)).collect())
    }

    /// `(lambda_r, lambda_s)` on a common interval and step.
    pub fn lambdas(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Grid1D::new(start, stop, step)?;
        Self::new(vec![(Axis::LambdaR, g), (Axis::LambdaS, g)])
    }

    pub fn get(&self, axis: Axis) -> Option<Grid1D> {
        self.axes.iter().find(|(a, _)| *a == axis).map(|(_, g)| *g)
    }

    /// Grid of an angle, falling back to the default step on `[0, 1]`.
    pub fn angle(&self, a: Angle) -> Grid1D {
        self.get(a.into()).unwrap_or(Grid1D { start: 0.0, stop: 1.0, step: DEFAULT_ANGLE_STEP })
    }

    pub fn angle_grids(&self) -> [Grid1D; 4] {
        Angle::ALL.map(|a| self.angle(a))
    }
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self::angles(DEFAULT_ANGLE_STEP).expect("default grid is valid")
    }
}

/// Samples of a function on a two-axis grid, stored with the first axis
/// outermost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub quantity: String,
    pub axis1: (Axis, Grid1D),
    pub axis2: (Axis, Grid1D),
    pub values: Vec<f64>,
    pub metadata: Vec<(String, String)>,
}

impl ScalarField {
    pub fn from_fn(
        quantity: &str,
        axis1: (Axis, Grid1D),
        axis2: (Axis, Grid1D),
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Self {
        let (n1, n2) = (axis1.1.len(), axis2.1.len());
        let values = (0..n1 * n2)
            .into_par_iter()
            .map(|k| f(axis1.1.node(k / n2), axis2.1.node(k % n2)))
            .collect();
        ScalarField { quantity: quantity.to_owned(), axis1, axis2, values, metadata: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.1.len(), self.axis2.1.len())
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis2.1.len() + j]
    }

    /// Value at the node closest to `(v1, v2)`.
    pub fn nearest(&self, v1: f64, v2: f64) -> f64 {
        let pick = |g: &Grid1D, v: f64| (((v - g.start) / g.step).round().max(0.0) as usize).min(g.intervals());
        self.at(pick(&self.axis1.1, v1), pick(&self.axis2.1, v2))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid mean over both axes.
    pub fn mean(&self) -> f64 {
        let (w1, w2) = (self.axis1.1.weights(), self.axis2.1.weights());
        let mut acc = 0.0;
        for (i, a) in w1.iter().enumerate() {
            let mut row = 0.0;
            for (j, b) in w2.iter().enumerate() {
                row += b * self.at(i, j);
            }
            acc += a * row;
        }
        acc
    }

    /// Delimited text: `# key=value` lines, a header row, then one row per node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# quantity={}", self.quantity)?;
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{},{},value", self.axis1.0, self.axis2.0)?;
        let (n1, n2) = self.shape();
        for i in 0..n1 {
            for j in 0..n2 {
                writeln!(w, "{},{},{}", self.axis1.1.node(i), self.axis2.1.node(j), self.at(i, j))?;
            }
        }
        Ok(())
    }
}

/// Mean, single-angle marginals and standard deviations of a function
/// sampled on the four-angle grid.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleMoments {
    pub mean: f64,
    /// `marginals[a][i]`: average over the other three angles with angle `a`
    /// held at its `i`-th node.
    pub marginals: [Vec<f64>; 4],
    pub deviations: [f64; 4],
}

impl AngleMoments {
    pub fn deviation(&self, a: Angle) -> f64 {
        self.deviations[a.position()]
    }

    /// Reduces samples laid out as `[alpha1][alpha2][beta1][beta2]`.
    pub fn from_samples(values: &[f64], grids: &[Grid1D; 4]) -> Self {
        let w: [Vec<f64>; 4] = grids.each_ref().map(Grid1D::weights);
        let n: [usize; 4] = grids.each_ref().map(Grid1D::len);
        assert_eq!(values.len(), n.iter().product::<usize>());
        let mut marginals: [Vec<f64>; 4] = n.map(|k| vec![0.0; k]);
        let mut flat = 0;
        for i0 in 0..n[0] {
            for i1 in 0..n[1] {
                for i2 in 0..n[2] {
                    for i3 in 0..n[3] {
                        let v = values[flat];
                        flat += 1;
                        let idx = [i0, i1, i2, i3];
                        for a in 0..4 {
                            let mut wt = 1.0;
                            for (b, &ib) in idx.iter().enumerate() {
                                if b != a {
                                    wt *= w[b][ib];
                                }
                            }
                            marginals[a][idx[a]] += wt * v;
                        }
                    }
                }
            }
        }
        let mean = marginals[0].iter().zip(&w[0]).map(|(m, w)| m * w).sum::<f64>();
        let deviations = std::array::from_fn(|a| {
            marginals[a].iter().zip(&w[a]).map(|(m, w)| w * (m - mean).powi(2)).sum::<f64>().sqrt()
        });
        AngleMoments { mean, marginals, deviations }
    }
}

/// Evaluates `f` on the four-angle product grid, `[alpha1][alpha2][beta1][beta2]`
/// order, keeping the eigenvalue parameters of `fixed`.
pub fn sample_angles<F>(f: F, grids: &[Grid1D; 4], fixed: &ControlParams<f64>) -> Vec<f64>
where
    F: Fn(&ControlParams<f64>) -> f64 + Sync,
{
    let nodes: [Vec<f64>; 4] = grids.each_ref().map(Grid1D::nodes);
    let n: [usize; 4] = nodes.each_ref().map(Vec::len);
    let total = n.iter().product::<usize>();
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut p = *fixed;
            let mut rest = flat;
            for a in (0..4).rev() {
                p.set_angle(Angle::ALL[a], nodes[a][rest % n[a]]);
                rest /= n[a];
            }
            f(&p)
        })
        .collect()
}

/// Average of `f` over the angles in `vary`; the other angles keep the values
/// in `fixed`.
pub fn mean_over<F>(f: F, vary: &[Angle], grid: &SweepGrid, fixed: &ControlParams<f64>) -> Result<f64>
where
    F: Fn(&ControlParams<f64>) -> f64 + Sync,
{
    fixed.validate()?;
    let grids: [Grid1D; 4] =
        Angle::ALL.map(|a| if vary.contains(&a) { grid.angle(a) } else { Grid1D::point(fixed.angle(a)) });
    Ok(AngleMoments::from_samples(&sample_angles(f, &grids, fixed), &grids).mean)
}

/// Standard deviation of `f` with respect to `gamma`: the spread over `gamma`
/// of the average over the other three angles.
pub fn std_dev<F>(f: F, gamma: Angle, grid: &SweepGrid, fixed: &ControlParams<f64>) -> Result<f64>
where
    F: Fn(&ControlParams<f64>) -> f64 + Sync,
{
    fixed.validate()?;
    let grids = grid.angle_grids();
    Ok(AngleMoments::from_samples(&sample_angles(f, &grids, fixed), &grids).deviation(gamma))
}

/// The tensor contracted with one receiver state: a linear map from the
/// sender's initial density matrix to the joint state.
#[derive(Clone, Copy, Debug)]
pub struct SenderChannel {
    /// `ops[2 l1 + k1]` multiplies `rho_S[l1, k1]`.
    ops: [Matrix4<Complex<f64>>; 4],
}

impl SenderChannel {
    pub fn new(t: &TransferTensor<f64>, rho_r0: &QubitDensity<f64>) -> Self {
        let r = &rho_r0.0;
        let ops = std::array::from_fn(|lk| {
            let (l1, k1) = (lk >> 1, lk & 1);
            Matrix4::from_fn(|row, col| {
                let (i1, i_n, j1, j_n) = (row >> 1, row & 1, col >> 1, col & 1);
                let mut acc = Complex::new(0.0, 0.0);
                for l_n in 0..2 {
                    for k_n in 0..2 {
                        acc += t.get(i1, i_n, l1, l_n, j1, j_n, k1, k_n) * r[(l_n, k_n)];
                    }
                }
                acc
            })
        });
        SenderChannel { ops }
    }

    pub fn apply(&self, rho_s0: &QubitDensity<f64>) -> Matrix4<Complex<f64>> {
        let s = &rho_s0.0;
        self.ops[0] * s[(0, 0)] + self.ops[1] * s[(0, 1)] + self.ops[2] * s[(1, 0)] + self.ops[3] * s[(1, 1)]
    }
}

/// `f(rho_SR)` on the full four-angle grid at fixed eigenvalues, in
/// `[alpha1][alpha2][beta1][beta2]` order.
pub fn sample_joint_states<F>(
    t: &TransferTensor<f64>,
    lambda_s: f64,
    lambda_r: f64,
    grids: &[Grid1D; 4],
    f: F,
) -> Result<Vec<f64>>
where
    F: Fn(&Matrix4<Complex<f64>>) -> Result<f64> + Sync,
{
    let nodes: [Vec<f64>; 4] = grids.each_ref().map(Grid1D::nodes);
    let senders: Vec<QubitDensity<f64>> = nodes[0]
        .iter()
        .flat_map(|&a1| nodes[1].iter().map(move |&a2| initial_qubit_state(lambda_s, a1, a2)))
        .collect();
    let channels: Vec<SenderChannel> = nodes[2]
        .iter()
        .flat_map(|&b1| nodes[3].iter().map(move |&b2| (b1, b2)))
        .map(|(b1, b2)| SenderChannel::new(t, &initial_qubit_state(lambda_r, b1, b2)))
        .collect();
    let nr = channels.len();
    (0..senders.len() * nr)
        .into_par_iter()
        .map(|flat| f(&channels[flat % nr].apply(&senders[flat / nr])))
        .collect()
}

/// Concurrence statistics over the four angles at fixed eigenvalues.
pub fn concurrence_moments(t: &TransferTensor<f64>, lambda_s: f64, lambda_r: f64, grid: &SweepGrid) -> Result<AngleMoments> {
    let grids = grid.angle_grids();
    let values = sample_joint_states(t, lambda_s, lambda_r, &grids, concurrence)?;
    Ok(AngleMoments::from_samples(&values, &grids))
}

/// Fraction of the `(alpha1, beta1)` square, at `alpha2 = beta2 = 0`, where the
/// joint state is entangled.
pub fn witness(t: &TransferTensor<f64>, lambda_s: f64, lambda_r: f64, grid: &SweepGrid) -> Result<f64> {
    let grids = [grid.angle(Angle::Alpha1), Grid1D::point(0.0), grid.angle(Angle::Beta1), Grid1D::point(0.0)];
    let values = sample_joint_states(t, lambda_s, lambda_r, &grids, |rho| {
        Ok(if concurrence(rho)? > ENTANGLEMENT_THRESHOLD { 1.0 } else { 0.0 })
    })?;
    Ok(AngleMoments::from_samples(&values, &grids).mean)
}

/// Mean probability of registering the sender's excitation at the receiver,
/// averaged over the single- and double-excitation initial states.
pub fn mean_probability(t: &TransferTensor<f64>) -> f64 {
    let e = |s: &str| t.entry(s).expect("valid label").re;
    (2.0 / 3.0) * (e("0110;0110") + e("0101;0101") + e("0111;0111") + 0.5 * e("1111;1111"))
}

/// Probability that one excitation placed on the sender is found on the receiver.
pub fn transfer_fidelity(t: &TransferTensor<f64>) -> f64 {
    t.entry("0110;0110").expect("valid label").re
}

/// One sample of the time-domain quality curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub mean_probability: f64,
    pub concurrence: f64,
    pub delta2: f64,
    pub delta1: f64,
}

impl CurvePoint {
    pub fn quantities(&self) -> [f64; 4] {
        [self.mean_probability, self.concurrence, self.delta2, self.delta1]
    }

    fn with_quantities(t: f64, q: [f64; 4]) -> Self {
        CurvePoint { t, mean_probability: q[0], concurrence: q[1], delta2: q[2], delta1: q[3] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedCurves {
    pub points: Vec<CurvePoint>,
    /// Per-quantity maxima, in [`CurvePoint::quantities`] order.
    pub maxima: [f64; 4],
    /// Times of those maxima (first occurrence).
    pub argmax: [f64; 4],
}

/// Scales each curve by its own maximum.
pub fn normalized_curves(series: &[CurvePoint]) -> Result<NormalizedCurves> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("empty series".into()));
    }
    let mut maxima = [f64::NEG_INFINITY; 4];
    let mut argmax = [series[0].t; 4];
    for p in series {
        for (k, q) in p.quantities().into_iter().enumerate() {
            if q > maxima[k] {
                maxima[k] = q;
                argmax[k] = p.t;
            }
        }
    }
    let points = series
        .iter()
        .map(|p| {
            let q = p.quantities();
            CurvePoint::with_quantities(p.t, std::array::from_fn(|k| if maxima[k] != 0.0 { q[k] / maxima[k] } else { 0.0 }))
        })
        .collect();
    Ok(NormalizedCurves { points, maxima, argmax })
}
