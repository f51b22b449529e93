//! Reference values and tolerances for the end-to-end checks of the 40-spin
//! line, plus the small report type the `acceptance` target prints.
//!
//! Every threshold used by the checks lives here with a note on where its
//! width comes from. Reference values quoted to four significant figures get
//! tolerances no tighter than their last digit allows.

use std::fmt;

/// Chain length of the reference line.
pub const N_NODES: usize = 40;
/// Registration time at which all landscape values are quoted.
pub const T_REGISTRATION: f64 = 43.442;

// Registration time.

pub const T_STAR_TOL: f64 = 1e-3;
/// Coarse step and interval of the registration-time scan.
pub const T_SCAN: (f64, f64, f64) = (0.0, 50.0, 0.01);

// Transfer tensor.

/// Absolute tolerance on tabulated tensor entries (four significant figures).
pub const T_ENTRY_TOL: f64 = 5e-4;
/// Entries forbidden only by the nearest-neighbour structure.
pub const STRUCTURAL_ZERO_TOL: f64 = 1e-10;
/// Minimum ratio between the smallest magnitude of family 2 and the largest of family 3.
pub const FAMILY_GAP_MIN: f64 = 40.0;
/// Hermiticity, exchange symmetry, zero pattern and oracle agreement.
pub const EXACT_TOL: f64 = 1e-10;

/// Tabulated tensor entries `(label, re, im)` at `T_REGISTRATION`.
pub const T_TABLE: [(&str, f64, f64); 15] = [
    ("0000;0000", 1.0, 0.0),
    ("0000;0110", 0.0, -6.817e-1),
    ("0001;0001", 5.352e-1, 0.0),
    ("0011;0011", 2.865e-1, 0.0),
    ("0001;0111", 0.0, 3.649e-1),
    ("0000;1111", 4.648e-1, 0.0),
    ("0110;0110", 4.648e-1, 0.0),
    ("0111;0111", 2.488e-1, 0.0),
    ("0110;1111", 0.0, 3.169e-1),
    ("1111;1111", 2.160e-1, 0.0),
    ("0000;0101", -5.395e-3, 0.0),
    ("0010;0111", -2.888e-3, 0.0),
    ("0101;0101", 2.911e-5, 0.0),
    ("0101;0110", 0.0, 3.678e-3),
    ("0101;1111", -2.508e-3, 0.0),
];

// Concurrence landscape.

pub const C_MEAN_PURE: f64 = 0.115;
pub const C_MEAN_PURE_TOL: f64 = 2e-3;
pub const C_MEAN_HALF_RECEIVER: f64 = 1.87e-4;
pub const C_MEAN_HALF_RECEIVER_TOL: f64 = 5e-6;
pub const C_DEV_BETA1_MAX: f64 = 7.05e-2;
pub const C_DEV_BETA1_TOL: f64 = 2e-3;
pub const C_DEV_BETA2_MAX: f64 = 2.16e-5;
pub const C_DEV_BETA2_TOL: f64 = 5e-6;
/// Angle step of the default four-angle grid.
pub const ANGLE_STEP: f64 = 0.05;
/// Step of the eigenvalue grid on `[0, 1]^2`.
pub const LAMBDA_STEP: f64 = 0.05;
/// Fine step for the one angle that matters when the receiver is maximally mixed.
pub const FINE_ANGLE_STEP: f64 = 1e-3;

// Determinant landscape.

pub const DELTA2_MEAN_PURE: f64 = 0.6413;
pub const DELTA1_MEAN_PURE: f64 = 0.8869;
pub const DELTA1_MEAN_HALF_RECEIVER: f64 = 0.1929;
pub const DELTA_MEAN_TOL: f64 = 1e-3;
/// Identically vanishing fields, checked on every node.
pub const VANISHING_TOL: f64 = 1e-12;
pub const DELTA_DEV_TOL: f64 = 3e-3;
/// Deviations of the weak angle, of order `1e-4`.
pub const DELTA_DEV_WEAK_TOL: f64 = 5e-5;
/// Deviation of the one-parameter condition with respect to `alpha1` at a
/// maximally mixed receiver.
pub const DELTA1_DEV_ALPHA1_HALF_RECEIVER: f64 = 9.477e-2;
pub const DELTA1_DEV_ALPHA1_HALF_RECEIVER_TOL: f64 = 2e-3;

/// Deviation maxima at `lambda_s = lambda_r = 1`: `(condition, angle, value)`.
pub const DELTA_DEV_PURE: [(u8, &str, f64); 8] = [
    (2, "beta1", 0.3584),
    (1, "beta1", 0.3322),
    (2, "beta2", 1.008e-4),
    (1, "beta2", 2.344e-4),
    (2, "alpha1", 0.3137),
    (1, "alpha1", 0.3601),
    (2, "alpha2", 4.067e-2),
    (1, "alpha2", 0.2630),
];

// Normalizations.

pub const NORM_TOL: f64 = 1e-4;
/// Quoted normalization of the one-parameter condition, `1/4 + 3/pi`.
pub const DELTA1_NORM_QUOTED: f64 = 0.25 + 3.0 / std::f64::consts::PI;

// Entanglement frontier.

pub const BISECTRIX_CROSSING: f64 = 0.7987;
pub const BISECTRIX_CROSSING_TOL: f64 = 1e-3;
pub const LAMBDA_S_MIN: f64 = 0.999892;
pub const LAMBDA_S_MIN_TOL: f64 = 1e-4;
/// Time of the lowest bisectrix crossing.
pub const CROSSING_ARGMIN_TOL: f64 = 0.1;

// Pre-images.

pub const ALPHA1_THRESHOLD: f64 = 0.0763;
pub const ALPHA1_THRESHOLD_TOL: f64 = 1e-3;
pub const NEAR_POINT_LAMBDA: f64 = 0.7988;
pub const NEAR_POINT_AREA_MAX: f64 = 1e-3;
/// Grid step of the `(beta1, alpha1)` square used for contours.
pub const CONTOUR_STEP: f64 = 0.0025;

// Time-curve maxima.

pub const P_MEAN: f64 = 0.5476;
pub const P_MEAN_TOL: f64 = 5e-4;
pub const C_LAMBDA_MEAN: f64 = 9.584e-3;
pub const DELTA2_LAMBDA_MEAN: f64 = 9.846e-2;
pub const DELTA1_LAMBDA_MEAN: f64 = 0.2765;
/// Relative tolerance on eigenvalue-averaged maxima; the averaging grid behind
/// the reference numbers is not known.
pub const LAMBDA_MEAN_REL_TOL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    /// `|value - target| <= tol`.
    Absolute(f64),
    /// `|value - target| <= tol * |target|`.
    Relative(f64),
    /// `value <= target`.
    AtMost,
}

/// One numeric comparison inside a criterion.
#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub target: f64,
    pub bound: Bound,
}

impl Check {
    pub fn abs(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check { label: label.into(), value, target, bound: Bound::Absolute(tol) }
    }

    pub fn rel(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check { label: label.into(), value, target, bound: Bound::Relative(tol) }
    }

    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { label: label.into(), value, target: bound, bound: Bound::AtMost }
    }

    pub fn passed(&self) -> bool {
        let err = (self.value - self.target).abs();
        match self.bound {
            Bound::Absolute(tol) => err <= tol,
            Bound::Relative(tol) => err <= tol * self.target.abs(),
            Bound::AtMost => self.value <= self.target,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed() { "ok" } else { "MISS" };
        let (label, v, t) = (&self.label, self.value, self.target);
        match self.bound {
            Bound::Absolute(tol) => write!(f, "{label} = {v:.6e} (target {t:.4e} +- {tol:.0e}) {mark}"),
            Bound::Relative(tol) => write!(f, "{label} = {v:.6e} (target {t:.4e} +- {}%) {mark}", tol * 100.0),
            Bound::AtMost => write!(f, "{label} = {v:.6e} (at most {t:.3e}) {mark}"),
        }
    }
}

/// A pass/fail statement without a numeric target.
pub fn flag(label: impl Into<String>, ok: bool) -> Check {
    Check::at_most(label, if ok { 0.0 } else { 1.0 }, 0.0)
}

/// Outcome of one numbered criterion.
#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} [{:>2}] {} ({:.1} s)", self.id, self.title, self.seconds)?;
        for c in &self.checks {
            write!(f, "\n        {c}")?;
        }
        Ok(())
    }
}
