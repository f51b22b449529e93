//! Initial qubit states, the sender's Bloch-type coordinates, the joint
//! sender/receiver state and the affine map from sender to receiver.
//!
//! Angles are in units where the full range is `[0, 1]`; they are converted
//! to radians only inside the trigonometric calls.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::transfer_tensor::{reduced_receiver_tensor, TransferTensor};

/// The four angle parameters, in their canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Angle {
    Alpha1,
    Alpha2,
    Beta1,
    Beta2,
}

impl Angle {
    pub const ALL: [Angle; 4] = [Angle::Alpha1, Angle::Alpha2, Angle::Beta1, Angle::Beta2];

    pub fn position(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Angle::Alpha1 => "alpha1",
            Angle::Alpha2 => "alpha2",
            Angle::Beta1 => "beta1",
            Angle::Beta2 => "beta2",
        }
    }
}

/// Eigenvalue and angle parameters of the sender and receiver initial states.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlParams<T> {
    pub lambda_s: T,
    pub lambda_r: T,
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
}

impl<T: Real> ControlParams<T> {
    pub fn new(lambda_s: T, lambda_r: T, alpha1: T, alpha2: T, beta1: T, beta2: T) -> Result<Self> {
        let p = ControlParams { lambda_s, lambda_r, alpha1, alpha2, beta1, beta2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_s", self.lambda_s),
            ("lambda_r", self.lambda_r),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
        ];
        for (name, v) in fields {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::InvalidArgument(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn angle(&self, a: Angle) -> T {
        match a {
            Angle::Alpha1 => self.alpha1,
            Angle::Alpha2 => self.alpha2,
            Angle::Beta1 => self.beta1,
            Angle::Beta2 => self.beta2,
        }
    }

    pub fn set_angle(&mut self, a: Angle, v: T) {
        match a {
            Angle::Alpha1 => self.alpha1 = v,
            Angle::Alpha2 => self.alpha2 = v,
            Angle::Beta1 => self.beta1 = v,
            Angle::Beta2 => self.beta2 = v,
        }
    }

    pub fn sender_state(&self) -> QubitDensity<T> {
        initial_qubit_state(self.lambda_s, self.alpha1, self.alpha2)
    }

    pub fn receiver_state(&self) -> QubitDensity<T> {
        initial_qubit_state(self.lambda_r, self.beta1, self.beta2)
    }

    /// Same parameters with the sender and receiver roles interchanged.
    pub fn swapped(&self) -> Self {
        ControlParams {
            lambda_s: self.lambda_r,
            lambda_r: self.lambda_s,
            alpha1: self.beta1,
            alpha2: self.beta2,
            beta1: self.alpha1,
            beta2: self.alpha2,
        }
    }
}

/// A single-qubit density matrix; row/column 0 is the ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDensity<T: Real>(pub Matrix2<Complex<T>>);

pub fn unitary_from_angles<T: Real>(a1: T, a2: T) -> Matrix2<Complex<T>> {
    let (s, c) = (T::frac_pi_2() * a1).sin_cos();
    let (s2, c2) = (T::two_pi() * a2).sin_cos();
    let zero = T::zero();
    Matrix2::new(
        Complex::new(c, zero),
        -Complex::new(c2, -s2) * s,
        Complex::new(c2, s2) * s,
        Complex::new(c, zero),
    )
}

/// `U diag(lambda, 1 - lambda) U^dagger` with `U` from [`unitary_from_angles`].
pub fn initial_qubit_state<T: Real>(lambda: T, a1: T, a2: T) -> QubitDensity<T> {
    let u = unitary_from_angles(a1, a2);
    let d = Matrix2::new(
        Complex::new(lambda, T::zero()),
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::one() - lambda, T::zero()),
    );
    QubitDensity(u * d * u.adjoint())
}

/// Sender coordinates `x`: `x1` is the excited population, `x2 + i x3` the
/// ground-excited coherence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochX<T> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
}

impl<T: Real> BlochX<T> {
    pub fn as_vector(&self) -> Vector3<T> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    pub fn from_vector(v: &Vector3<T>) -> Self {
        BlochX { x1: v[0], x2: v[1], x3: v[2] }
    }

    pub fn to_density(&self) -> QubitDensity<T> {
        QubitDensity(Matrix2::new(
            Complex::new(T::one() - self.x1, T::zero()),
            Complex::new(self.x2, self.x3),
            Complex::new(self.x2, -self.x3),
            Complex::new(self.x1, T::zero()),
        ))
    }

    pub fn from_density(rho: &QubitDensity<T>) -> Self {
        let off = rho.0[(0, 1)];
        BlochX { x1: rho.0[(1, 1)].re, x2: off.re, x3: off.im }
    }
}

pub fn bloch_x<T: Real>(lambda_s: T, alpha1: T, alpha2: T) -> BlochX<T> {
    let a = T::one() - T::lit(2.0) * lambda_s;
    let half = T::lit(0.5);
    let (s1, c1) = (T::pi() * alpha1).sin_cos();
    let (s2, c2) = (T::two_pi() * alpha2).sin_cos();
    BlochX { x1: half * (T::one() + a * c1), x2: -half * a * s1 * c2, x3: half * a * s1 * s2 }
}

/// Joint sender/receiver state at the tensor's time. Rows and columns are
/// ordered `(sender bit, receiver bit)` with the sender most significant.
pub fn rho_sr<T: Real>(t: &TransferTensor<T>, rho_s0: &QubitDensity<T>, rho_r0: &QubitDensity<T>) -> Matrix4<Complex<T>> {
    let (s, r) = (&rho_s0.0, &rho_r0.0);
    Matrix4::from_fn(|row, col| {
        let (i1, i_n) = (row >> 1, row & 1);
        let (j1, j_n) = (col >> 1, col & 1);
        let mut acc = Complex::new(T::zero(), T::zero());
        for l1 in 0..2 {
            for k1 in 0..2 {
                let sv = s[(l1, k1)];
                for l_n in 0..2 {
                    for k_n in 0..2 {
                        acc += t.get(i1, i_n, l1, l_n, j1, j_n, k1, k_n) * sv * r[(l_n, k_n)];
                    }
                }
            }
        }
        acc
    })
}

pub fn rho_sr_at<T: Real>(t: &TransferTensor<T>, p: &ControlParams<T>) -> Matrix4<Complex<T>> {
    rho_sr(t, &p.sender_state(), &p.receiver_state())
}

/// Receiver state, obtained by tracing out the sender.
pub fn trace_out_sender<T: Real>(rho: &Matrix4<Complex<T>>) -> QubitDensity<T> {
    QubitDensity(Matrix2::from_fn(|a, b| rho[(a, b)] + rho[(2 + a, 2 + b)]))
}

/// Sender state, obtained by tracing out the receiver.
pub fn trace_out_receiver<T: Real>(rho: &Matrix4<Complex<T>>) -> QubitDensity<T> {
    QubitDensity(Matrix2::from_fn(|a, b| rho[(2 * a, 2 * b)] + rho[(2 * a + 1, 2 * b + 1)]))
}

/// Swaps the sender and receiver factors of a two-qubit operator.
pub fn swap_parties<T: Real>(rho: &Matrix4<Complex<T>>) -> Matrix4<Complex<T>> {
    let p = |k: usize| ((k & 1) << 1) | (k >> 1);
    Matrix4::from_fn(|r, c| rho[(p(r), p(c))])
}

/// `y = c + M x`: receiver coordinates as an affine function of the sender's.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceiverAffineMap<T: Real> {
    pub c: Vector3<T>,
    pub m: Matrix3<T>,
}

impl<T: Real> ReceiverAffineMap<T> {
    pub fn apply(&self, x: &BlochX<T>) -> BlochX<T> {
        BlochX::from_vector(&(self.c + self.m * x.as_vector()))
    }

    pub fn identity() -> Self {
        ReceiverAffineMap { c: Vector3::zeros(), m: Matrix3::identity() }
    }
}

pub fn receiver_map<T: Real>(t: &TransferTensor<T>, lambda_r: T, beta1: T, beta2: T) -> ReceiverAffineMap<T> {
    let rho_r0 = initial_qubit_state(lambda_r, beta1, beta2);
    let tt = reduced_receiver_tensor(t, &rho_r0.0);
    let g = |a, b, c, d| tt.get(a, b, c, d);
    let two = T::lit(2.0);
    let c = Vector3::new(g(1, 0, 1, 0).re, g(0, 0, 1, 0).re, g(0, 0, 1, 0).im);
    let m = Matrix3::new(
        (g(1, 1, 1, 1) - g(1, 0, 1, 0)).re,
        two * g(1, 0, 1, 1).re,
        -two * g(1, 0, 1, 1).im,
        (g(0, 1, 1, 1) - g(0, 0, 1, 0)).re,
        (g(0, 0, 1, 1) + g(0, 1, 1, 0)).re,
        -(g(0, 0, 1, 1) - g(0, 1, 1, 0)).im,
        (g(0, 1, 1, 1) - g(0, 0, 1, 0)).im,
        (g(0, 0, 1, 1) + g(0, 1, 1, 0)).im,
        (g(0, 0, 1, 1) - g(0, 1, 1, 0)).re,
    );
    ReceiverAffineMap { c, m }
}
