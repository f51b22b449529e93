//! Correlation measures between sender and receiver: Wootters concurrence and
//! entanglement of formation, and the two determinant conditions that decide
//! whether the sender's angles can be recovered from the receiver's state.

use nalgebra::{Matrix3, Matrix3x2, Matrix4, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::states::{receiver_map, ControlParams, ReceiverAffineMap};
use crate::transfer_tensor::TransferTensor;

/// Eigenvalues of a density matrix below `-PSD_TOLERANCE` are rejected.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Default threshold for treating a normalized determinant as nonzero.
pub const DEFAULT_EPS: f64 = 1e-8;

/// `sigma_y (x) sigma_y` is an anti-diagonal matrix with these signs.
const SPIN_FLIP_SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];

/// Spin-flipped state `(sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`.
pub fn spin_flip<T: Real>(rho: &Matrix4<Complex<T>>) -> Matrix4<Complex<T>> {
    Matrix4::from_fn(|a, b| rho[(3 - a, 3 - b)].conj() * T::lit(SPIN_FLIP_SIGN[a] * SPIN_FLIP_SIGN[b]))
}

/// Square roots of the eigenvalues of `rho rho~`, largest first.
///
/// They are taken from the Hermitian matrix `sqrt(rho) rho~ sqrt(rho)`, which
/// has the same spectrum. Eigenvalues in `(-1e-10, 64 eps)` are treated
/// as zero: rounding noise of order `1e-16` would otherwise turn into `1e-8`
/// after the square root and make pure product states look entangled.
pub fn wootters_spectrum<T: Real>(rho: &Matrix4<Complex<T>>) -> Result<[T; 4]> {
    let tol = T::lit(PSD_TOLERANCE);
    let floor = T::default_epsilon() * T::lit(64.0);
    let eig = SymmetricEigen::new(*rho);
    let mut roots = [T::zero(); 4];
    for (r, &p) in roots.iter_mut().zip(eig.eigenvalues.iter()) {
        if p < -tol {
            return Err(Error::NotPositive(p.to_f64_lossless()));
        }
        *r = if p < floor { T::zero() } else { p.sqrt() };
    }
    let v = &eig.eigenvectors;
    let sqrt_rho = Matrix4::from_fn(|a, b| {
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..4 {
            acc += v[(a, k)] * v[(b, k)].conj() * roots[k];
        }
        acc
    });
    let h = sqrt_rho * spin_flip(rho) * sqrt_rho;
    let mu = SymmetricEigen::new(h).eigenvalues;
    let mut lam = [T::zero(); 4];
    for (l, &m) in lam.iter_mut().zip(mu.iter()) {
        if m < -tol {
            return Err(Error::NotPositive(m.to_f64_lossless()));
        }
        *l = if m < floor { T::zero() } else { m.sqrt() };
    }
    lam.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(lam)
}

/// Margins smaller than this in magnitude are re-decided with the partial transpose.
const MARGIN_RESOLUTION: f64 = 1e-5;

/// Partial transpose on the second qubit.
pub fn partial_transpose<T: Real>(rho: &Matrix4<Complex<T>>) -> Matrix4<Complex<T>> {
    Matrix4::from_fn(|r, c| rho[((r & 2) | (c & 1), (c & 2) | (r & 1))])
}

/// `lambda_1 - lambda_2 - lambda_3 - lambda_4` before clipping at zero. Its
/// sign separates entangled from separable states and it varies smoothly
/// across that frontier, which makes it the field used for contouring.
///
/// Near zero the square roots blur the sign: eigenvalues around `1e-14` can
/// come from rounding or from a genuine concurrence near `1e-7`. For small
/// margins the partial transpose decides instead, since for two qubits a
/// negative eigenvalue there is equivalent to entanglement and needs no
/// square root. Entangled states then get at least the negativity
/// `2 |min eig|`, which never exceeds the concurrence.
pub fn concurrence_margin<T: Real>(rho: &Matrix4<Complex<T>>) -> Result<T> {
    let l = wootters_spectrum(rho)?;
    let margin = l[0] - l[1] - l[2] - l[3];
    if margin.abs() < T::lit(MARGIN_RESOLUTION) {
        let floor = T::default_epsilon() * T::lit(64.0);
        let min = SymmetricEigen::new(partial_transpose(rho)).eigenvalues.min();
        return Ok(if min < -floor { margin.max(-T::lit(2.0) * min) } else { margin.min(T::zero()) });
    }
    Ok(margin)
}

pub fn concurrence<T: Real>(rho: &Matrix4<Complex<T>>) -> Result<T> {
    Ok(concurrence_margin(rho)?.max(T::zero()).min(T::one()))
}

fn binary_entropy<T: Real>(x: T) -> T {
    let term = |p: T| if p > T::zero() { -p * p.log2() } else { T::zero() };
    term(x) + term(T::one() - x)
}

pub fn entanglement_of_formation<T: Real>(c: T) -> T {
    let c = c.max(T::zero()).min(T::one());
    binary_entropy((T::one() + (T::one() - c * c).sqrt()) * T::lit(0.5))
}

/// Derivatives of the sender coordinates `x` with respect to `(alpha1, alpha2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobianX<T: Real>(pub Matrix3x2<T>);

pub fn jacobian_x<T: Real>(lambda_s: T, alpha1: T, alpha2: T) -> JacobianX<T> {
    let a = T::one() - T::lit(2.0) * lambda_s;
    let pi = T::pi();
    let (s1, c1) = (pi * alpha1).sin_cos();
    let (s2, c2) = (T::two_pi() * alpha2).sin_cos();
    let h = a * T::frac_pi_2();
    let f = a * pi;
    JacobianX(Matrix3x2::new(
        -h * s1,
        T::zero(),
        -h * c1 * c2,
        f * s1 * s2,
        h * c1 * s2,
        f * s1 * c2,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DeterminantPair<T> {
    pub delta2: T,
    pub delta1: T,
}

/// Normalization of the two-parameter condition, `pi / 2`.
pub fn delta2_norm<T: Real>() -> T {
    T::frac_pi_2()
}

/// Normalization of the one-parameter condition, `1/2 + 6/pi`: the average of
/// the raw sum over `lambda` and both angles when `y = x`.
pub fn delta1_norm<T: Real>() -> T {
    T::lit(0.5) + T::lit(6.0) / T::pi()
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Terms of the separated two-parameter sum: entry `p` is
/// `sum_(i<j) |minor of M on rows (i,j), columns p|`.
pub fn map_minor_sums<T: Real>(m: &Matrix3<T>) -> [T; 3] {
    std::array::from_fn(|p| {
        let (n, k) = PAIRS[p];
        PAIRS
            .iter()
            .map(|&(i, j)| (m[(i, n)] * m[(j, k)] - m[(i, k)] * m[(j, n)]).abs())
            .fold(T::zero(), |a, b| a + b)
    })
}

/// `|minor of J on rows p|` for the three row pairs.
pub fn jacobian_minors<T: Real>(j: &JacobianX<T>) -> [T; 3] {
    let j = &j.0;
    std::array::from_fn(|p| {
        let (n, k) = PAIRS[p];
        (j[(n, 0)] * j[(k, 1)] - j[(n, 1)] * j[(k, 0)]).abs()
    })
}

/// Column sums `sum_i |M_in|`.
pub fn map_column_sums<T: Real>(m: &Matrix3<T>) -> [T; 3] {
    std::array::from_fn(|n| m[(0, n)].abs() + m[(1, n)].abs() + m[(2, n)].abs())
}

/// Row sums `|J_n1| + |J_n2|`.
pub fn jacobian_row_sums<T: Real>(j: &JacobianX<T>) -> [T; 3] {
    std::array::from_fn(|n| j.0[(n, 0)].abs() + j.0[(n, 1)].abs())
}

fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Unnormalized two-parameter sum of absolute minor products.
pub fn delta2_raw<T: Real>(map: &ReceiverAffineMap<T>, jac: &JacobianX<T>) -> T {
    dot3(map_minor_sums(&map.m), jacobian_minors(jac))
}

/// Unnormalized one-parameter sum of absolute derivative products.
pub fn delta1_raw<T: Real>(map: &ReceiverAffineMap<T>, jac: &JacobianX<T>) -> T {
    dot3(map_column_sums(&map.m), jacobian_row_sums(jac))
}

pub fn delta2<T: Real>(map: &ReceiverAffineMap<T>, jac: &JacobianX<T>) -> T {
    delta2_raw(map, jac) / delta2_norm()
}

pub fn delta1<T: Real>(map: &ReceiverAffineMap<T>, jac: &JacobianX<T>) -> T {
    delta1_raw(map, jac) / delta1_norm()
}

/// Both conditions for sender-to-receiver transfer at the given parameters.
pub fn determinants<T: Real>(t: &TransferTensor<T>, p: &ControlParams<T>) -> DeterminantPair<T> {
    let map = receiver_map(t, p.lambda_r, p.beta1, p.beta2);
    let jac = jacobian_x(p.lambda_s, p.alpha1, p.alpha2);
    DeterminantPair { delta2: delta2(&map, &jac), delta1: delta1(&map, &jac) }
}

/// Both conditions for the reverse direction, receiver angles read at the
/// sender: the roles of the two parties are interchanged.
pub fn reverse_determinants<T: Real>(t: &TransferTensor<T>, p: &ControlParams<T>) -> DeterminantPair<T> {
    determinants(&t.exchanged(), &p.swapped())
}

/// 2 when both angles are recoverable, 1 when only one is, 0 otherwise.
pub fn info_correlation<T: Real>(d: &DeterminantPair<T>, eps: T) -> u8 {
    if d.delta2 > eps {
        2
    } else if d.delta1 > eps {
        1
    } else {
        0
    }
}

/// Closed-form averages over `(alpha1, alpha2)` of the Jacobian factors:
/// every 2x2 minor averages to `pi/2 (1 - 2 lambda)^2`, and the three row sums
/// to `|1 - 2 lambda| (1, 6/pi, 6/pi)`.
pub fn analytic_alpha_averages<T: Real>(lambda_s: T) -> (T, [T; 3]) {
    let a = T::one() - T::lit(2.0) * lambda_s;
    let six_pi = T::lit(6.0) / T::pi();
    (T::frac_pi_2() * a * a, [a.abs(), a.abs() * six_pi, a.abs() * six_pi])
}

/// Angles that describe the same sender state after `lambda -> 1 - lambda`:
/// `(lambda, a1, a2)` and `(1 - lambda, 1 - a1, a2 + 1/2)` give the same matrix.
pub fn bloch_dual_angles<T: Real>(alpha1: T, alpha2: T) -> (T, T) {
    let a2 = alpha2 + T::lit(0.5);
    (T::one() - alpha1, if a2 > T::one() { a2 - T::one() } else { a2 })
}
