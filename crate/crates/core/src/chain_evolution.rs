//! Time evolution of the nearest-neighbour XY chain in the sectors with at
//! most two excitations, plus a full Hilbert-space propagator used as an
//! independent check for short chains.
//!
//! Sites are numbered `0..n_nodes`; site 0 is the sender and site
//! `n_nodes - 1` the receiver. A basis state of a sector is the sorted list
//! of excited sites. In the full `2^N` space, site 0 is the most significant
//! bit and a set bit means an excited spin.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest chain accepted by [`oracle_full_propagator`].
pub const ORACLE_MAX_NODES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum HamiltonianKind {
    #[default]
    XyNearestNeighbor,
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HamiltonianKind::XyNearestNeighbor => f.write_str("xy-nearest-neighbor"),
        }
    }
}

impl FromStr for HamiltonianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "xy-nearest-neighbor" => Ok(HamiltonianKind::XyNearestNeighbor),
            other => Err(Error::InvalidChain(format!("unknown hamiltonian kind `{other}`"))),
        }
    }
}

/// The physical line: node count, coupling constant and interaction type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSpec {
    pub n_nodes: usize,
    pub coupling: f64,
    pub kind: HamiltonianKind,
}

impl ChainSpec {
    pub fn new(n_nodes: usize, coupling: f64) -> Result<Self> {
        let spec = ChainSpec { n_nodes, coupling, kind: HamiltonianKind::XyNearestNeighbor };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 nodes, got {}", self.n_nodes)));
        }
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return Err(Error::InvalidChain(format!("coupling must be positive, got {}", self.coupling)));
        }
        Ok(())
    }

    pub fn receiver(&self) -> usize {
        self.n_nodes - 1
    }
}

/// Ordered basis of every sector with `k <= max_excitations` excitations.
#[derive(Clone, Debug)]
pub struct ExcitationBasis {
    n_nodes: usize,
    sectors: Vec<Vec<Vec<usize>>>,
}

impl ExcitationBasis {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn max_excitations(&self) -> usize {
        self.sectors.len() - 1
    }

    pub fn sector(&self, k: usize) -> &[Vec<usize>] {
        &self.sectors[k]
    }

    pub fn sector_sizes(&self) -> Vec<usize> {
        self.sectors.iter().map(Vec::len).collect()
    }

    /// Position of a sorted site list inside its sector.
    pub fn rank(&self, sites: &[usize]) -> Option<usize> {
        self.sectors.get(sites.len())?.binary_search_by(|s| s.as_slice().cmp(sites)).ok()
    }

    pub fn unrank(&self, k: usize, ordinal: usize) -> Option<&[usize]> {
        self.sectors.get(k)?.get(ordinal).map(Vec::as_slice)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            cur.push(s);
            extend(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn build_basis(spec: &ChainSpec, max_excitations: usize) -> Result<ExcitationBasis> {
    spec.validate()?;
    if max_excitations > spec.n_nodes {
        return Err(Error::InvalidArgument(format!(
            "{max_excitations} excitations do not fit on {} nodes",
            spec.n_nodes
        )));
    }
    let sectors = (0..=max_excitations).map(|k| combinations(spec.n_nodes, k)).collect();
    Ok(ExcitationBasis { n_nodes: spec.n_nodes, sectors })
}

/// Real symmetric Hamiltonian restricted to sector `k`.
///
/// The XY term moves one excitation to an empty neighbouring site with
/// amplitude `D/2`; in one dimension such a hop never passes another
/// excitation, so no sign factors appear.
pub fn sector_hamiltonian<T: Real>(spec: &ChainSpec, basis: &ExcitationBasis, k: usize) -> DMatrix<T> {
    let states = basis.sector(k);
    let half = T::lit(spec.coupling / 2.0);
    let mut h = DMatrix::<T>::zeros(states.len(), states.len());
    for (col, state) in states.iter().enumerate() {
        for (pos, &site) in state.iter().enumerate() {
            for next in [site.wrapping_sub(1), site + 1] {
                if next >= spec.n_nodes || state.contains(&next) {
                    continue;
                }
                let mut moved = state.clone();
                moved[pos] = next;
                moved.sort_unstable();
                let row = basis.rank(&moved).expect("hop stays inside the sector");
                h[(row, col)] += half;
            }
        }
    }
    h
}

/// Eigen-decomposition of one sector Hamiltonian, reusable for any time.
#[derive(Clone, Debug)]
pub struct SectorSpectrum<T: Real> {
    pub energies: Vec<T>,
    pub modes: DMatrix<T>,
}

impl<T: Real> SectorSpectrum<T> {
    pub fn new(h: DMatrix<T>) -> Self {
        let eig = SymmetricEigen::new(h);
        SectorSpectrum { energies: eig.eigenvalues.iter().copied().collect(), modes: eig.eigenvectors }
    }

    /// `exp(-i H t)` assembled from the stored modes.
    pub fn evolve(&self, t: T) -> DMatrix<Complex<T>> {
        let dim = self.energies.len();
        let phases: Vec<Complex<T>> = self
            .energies
            .iter()
            .map(|&e| {
                let (s, c) = (e * t).sin_cos();
                Complex::new(c, -s)
            })
            .collect();
        DMatrix::from_fn(dim, dim, |r, c| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, ph) in phases.iter().enumerate() {
                acc += *ph * (self.modes[(r, k)] * self.modes[(c, k)]);
            }
            acc
        })
    }
}

/// Sector-resolved `V(t) = exp(-iHt)` for the 0-, 1- and 2-excitation sectors.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    pub time: T,
    pub basis: ExcitationBasis,
    pub sectors: Vec<DMatrix<Complex<T>>>,
}

impl<T: Real> Propagator<T> {
    pub fn sector(&self, k: usize) -> &DMatrix<Complex<T>> {
        &self.sectors[k]
    }
}

/// Diagonalised sectors of a chain; evaluating several times costs one
/// decomposition.
#[derive(Clone, Debug)]
pub struct ChainDynamics<T: Real> {
    pub spec: ChainSpec,
    pub basis: ExcitationBasis,
    spectra: Vec<SectorSpectrum<T>>,
}

impl<T: Real> ChainDynamics<T> {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        let basis = build_basis(spec, 2.min(spec.n_nodes))?;
        let spectra = (0..=basis.max_excitations())
            .map(|k| SectorSpectrum::new(sector_hamiltonian(spec, &basis, k)))
            .collect();
        Ok(ChainDynamics { spec: *spec, basis, spectra })
    }

    pub fn propagator(&self, t: T) -> Propagator<T> {
        let mut sectors: Vec<_> = self.spectra.iter().map(|s| s.evolve(t)).collect();
        // H annihilates the all-ground state, so this block is exactly one.
        sectors[0] = DMatrix::from_element(1, 1, Complex::new(T::one(), T::zero()));
        Propagator { time: t, basis: self.basis.clone(), sectors }
    }
}

pub fn propagator<T: Real>(spec: &ChainSpec, t: T) -> Result<Propagator<T>> {
    Ok(ChainDynamics::new(spec)?.propagator(t))
}

/// Closed-form one-excitation modes of the open chain, `sin(pi k j / (N+1))`
/// with energies `D cos(pi k / (N+1))`.
#[derive(Clone, Debug)]
pub struct FreeFermionModes<T: Real> {
    n_nodes: usize,
    energies: Vec<T>,
    modes: DMatrix<T>,
}

impl<T: Real> FreeFermionModes<T> {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_nodes;
        let n1 = T::lit((n + 1) as f64);
        let norm = (T::lit(2.0) / n1).sqrt();
        let energies = (1..=n).map(|k| T::lit(spec.coupling) * (T::pi() * T::lit(k as f64) / n1).cos()).collect();
        let modes = DMatrix::from_fn(n, n, |j, k| {
            norm * (T::pi() * T::lit(((k + 1) * (j + 1)) as f64) / n1).sin()
        });
        Ok(FreeFermionModes { n_nodes: n, energies, modes })
    }

    /// Single-particle amplitudes `f_{jn} = <j| V(t) |n>`.
    ///
    /// At `t = 0` the identity is returned exactly rather than through the
    /// mode sum, which leaves rounding residue of order `1e-16`.
    pub fn amplitudes(&self, t: T) -> DMatrix<Complex<T>> {
        if t == T::zero() {
            return DMatrix::identity(self.n_nodes, self.n_nodes);
        }
        let phases: Vec<Complex<T>> = self
            .energies
            .iter()
            .map(|&e| {
                let (s, c) = (e * t).sin_cos();
                Complex::new(c, -s)
            })
            .collect();
        let n = self.n_nodes;
        let mut f = DMatrix::from_element(n, n, Complex::new(T::zero(), T::zero()));
        for j in 0..n {
            for m in j..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (k, ph) in phases.iter().enumerate() {
                    acc += *ph * (self.modes[(j, k)] * self.modes[(m, k)]);
                }
                f[(j, m)] = acc;
                f[(m, j)] = acc;
            }
        }
        f
    }
}

pub fn single_particle_amplitudes<T: Real>(spec: &ChainSpec, t: T) -> Result<DMatrix<Complex<T>>> {
    Ok(FreeFermionModes::new(spec)?.amplitudes(t))
}

/// `<p,q| V |m,n>` for two excitations, as the 2x2 Slater determinant of
/// single-particle amplitudes. Pairs are `(smaller, larger)` site numbers.
pub fn two_particle_amplitude<T: Real>(
    f: &DMatrix<Complex<T>>,
    from: (usize, usize),
    to: (usize, usize),
) -> Complex<T> {
    let (m, n) = from;
    let (p, q) = to;
    f[(p, m)] * f[(q, n)] - f[(p, n)] * f[(q, m)]
}

/// Transition amplitudes `<out| V(t) |in>` between states with at most two
/// excitations, given as sorted site lists.
pub trait ExcitationAmplitudes<T: Real> {
    fn amplitude(&self, out: &[usize], inp: &[usize]) -> Complex<T>;
}

impl<T: Real> ExcitationAmplitudes<T> for Propagator<T> {
    fn amplitude(&self, out: &[usize], inp: &[usize]) -> Complex<T> {
        if out.len() != inp.len() {
            return Complex::new(T::zero(), T::zero());
        }
        let r = self.basis.rank(out).expect("state inside the basis");
        let c = self.basis.rank(inp).expect("state inside the basis");
        self.sectors[out.len()][(r, c)]
    }
}

/// Amplitudes built from the single-particle matrix alone.
#[derive(Clone, Debug)]
pub struct SlaterAmplitudes<T: Real> {
    pub f: DMatrix<Complex<T>>,
}

impl<T: Real> ExcitationAmplitudes<T> for SlaterAmplitudes<T> {
    fn amplitude(&self, out: &[usize], inp: &[usize]) -> Complex<T> {
        match (out, inp) {
            ([], []) => Complex::new(T::one(), T::zero()),
            ([p], [m]) => self.f[(*p, *m)],
            ([p, q], [m, n]) => two_particle_amplitude(&self.f, (*m, *n), (*p, *q)),
            _ if out.len() != inp.len() => Complex::new(T::zero(), T::zero()),
            _ => panic!("more than two excitations are not supported"),
        }
    }
}

/// Index of a sorted site list in the full `2^N` computational basis.
pub fn full_index(sites: &[usize], n_nodes: usize) -> usize {
    sites.iter().fold(0, |acc, &s| acc | 1 << (n_nodes - 1 - s))
}

/// Dense `exp(-iHt)` on the whole `2^N` space. Only meant for checking the
/// sector construction on short chains.
pub fn oracle_full_propagator<T: Real>(spec: &ChainSpec, t: T) -> Result<DMatrix<Complex<T>>> {
    spec.validate()?;
    let n = spec.n_nodes;
    if n > ORACLE_MAX_NODES {
        return Err(Error::OracleTooLarge { n, max: ORACLE_MAX_NODES });
    }
    let dim = 1usize << n;
    let half = T::lit(spec.coupling / 2.0);
    let mut h = DMatrix::<T>::zeros(dim, dim);
    for state in 0..dim {
        for j in 0..n - 1 {
            let a = 1 << (n - 1 - j);
            let b = 1 << (n - 2 - j);
            if (state & a != 0) != (state & b != 0) {
                h[(state ^ a ^ b, state)] += half;
            }
        }
    }
    Ok(SectorSpectrum::new(h).evolve(t))
}
