//! The transfer tensor `T` linking the initial sender and receiver states to
//! their joint state at time `t`, for a line whose inner nodes start in the
//! ground state.
//!
//! An entry is addressed by eight bits `i1 iN l1 lN ; j1 jN k1 kN`:
//!
//! ```text
//! rho_SR[(i1 iN),(j1 jN)] = sum T[i1 iN l1 lN; j1 jN k1 kN] rho_S[l1,k1] rho_R[lN,kN]
//! ```
//!
//! `i1` is the most significant bit of the packed index, so the numeric order
//! of [`TIndex`] is the lexicographic order of its text form.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::{ComplexField, DMatrix, Matrix2};
use num_complex::Complex;

use crate::chain_evolution::{
    ChainSpec, ExcitationAmplitudes, FreeFermionModes, HamiltonianKind, SlaterAmplitudes,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CONVENTION: &str = "bit1=excited, sender-most-significant";

/// Packed eight-bit tensor index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TIndex(pub u8);

impl TIndex {
    /// Bits in the order `[i1, iN, l1, lN, j1, jN, k1, kN]`.
    pub fn from_bits(bits: [u8; 8]) -> Self {
        TIndex(bits.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
    }

    pub fn bits(self) -> [u8; 8] {
        std::array::from_fn(|k| (self.0 >> (7 - k)) & 1)
    }

    /// Index of the complex-conjugate partner (the two halves swapped).
    pub fn hermitian_partner(self) -> Self {
        TIndex(self.0.rotate_left(4))
    }

    /// Index after exchanging the sender and receiver roles.
    pub fn exchanged(self) -> Self {
        let hi = self.0 & 0b1010_1010;
        let lo = self.0 & 0b0101_0101;
        TIndex((hi >> 1) | (lo << 1))
    }

    /// Smallest index in the orbit generated by the two symmetries above.
    pub fn canonical(self) -> Self {
        let e = self.exchanged();
        [self, self.hermitian_partner(), e, e.hermitian_partner()].into_iter().min().unwrap()
    }

    /// Whether excitation-number conservation forces this entry to vanish.
    pub fn must_vanish(self) -> bool {
        let b = self.bits();
        let (i, l) = (b[0] + b[1], b[2] + b[3]);
        let (j, k) = (b[4] + b[5], b[6] + b[7]);
        i > l || j > k || (i < l && i as i8 - j as i8 != l as i8 - k as i8)
    }

    pub fn all() -> impl Iterator<Item = TIndex> {
        (0..=255u8).map(TIndex)
    }
}

impl fmt::Display for TIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.bits();
        write!(f, "{}{}{}{};{}{}{}{}", b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7])
    }
}

impl FromStr for TIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s.chars().filter(|&c| c != ';').map(|c| c as u8).collect();
        if digits.len() != 8 || digits.iter().any(|&d| d != b'0' && d != b'1') {
            return Err(Error::InvalidArgument(format!("bad tensor index `{s}`")));
        }
        let mut bits = [0u8; 8];
        for (b, d) in bits.iter_mut().zip(&digits) {
            *b = d - b'0';
        }
        Ok(TIndex::from_bits(bits))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferTensor<T: Real> {
    pub n_nodes: usize,
    pub coupling: f64,
    pub time: f64,
    pub kind: HamiltonianKind,
    entries: [Complex<T>; 256],
}

/// Kind of broken tensor identity reported by [`TransferTensor::violations`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Hermiticity,
    Exchange,
    ZeroPattern,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub index: TIndex,
    pub kind: ViolationKind,
    pub size: f64,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Sorted site list of a sender/line/receiver configuration.
fn config(first: u8, line: &[usize], last: u8, receiver: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(line.len() + 2);
    if first == 1 {
        v.push(0);
    }
    v.extend_from_slice(line);
    if last == 1 {
        v.push(receiver);
    }
    v
}

impl<T: Real> TransferTensor<T> {
    pub fn zeros(spec: &ChainSpec, time: f64) -> Self {
        TransferTensor {
            n_nodes: spec.n_nodes,
            coupling: spec.coupling,
            time,
            kind: spec.kind,
            entries: [zero(); 256],
        }
    }

    pub fn spec(&self) -> ChainSpec {
        ChainSpec { n_nodes: self.n_nodes, coupling: self.coupling, kind: self.kind }
    }

    pub fn at(&self, idx: TIndex) -> Complex<T> {
        self.entries[idx.0 as usize]
    }

    pub fn set(&mut self, idx: TIndex, v: Complex<T>) {
        self.entries[idx.0 as usize] = v;
    }

    /// Entry by its bits `i1 iN l1 lN j1 jN k1 kN`.
    #[allow(clippy::too_many_arguments)]
    #[inline]
    pub fn get(&self, i1: usize, i_n: usize, l1: usize, l_n: usize, j1: usize, j_n: usize, k1: usize, k_n: usize) -> Complex<T> {
        let idx = (i1 << 7) | (i_n << 6) | (l1 << 5) | (l_n << 4) | (j1 << 3) | (j_n << 2) | (k1 << 1) | k_n;
        self.entries[idx]
    }

    /// Entry addressed by its text form, e.g. `"0000;0110"`.
    pub fn entry(&self, label: &str) -> Result<Complex<T>> {
        Ok(self.at(label.parse()?))
    }

    pub fn entries(&self) -> &[Complex<T>; 256] {
        &self.entries
    }

    /// Builds `T` from any source of transition amplitudes.
    pub fn from_amplitudes(spec: &ChainSpec, time: f64, amps: &impl ExcitationAmplitudes<T>) -> Self {
        let mut tensor = Self::zeros(spec, time);
        for idx in TIndex::all() {
            tensor.set(idx, transfer_entry(spec, idx, amps));
        }
        tensor
    }

    /// Builds `T` by summing the dense `2^N` propagator over every state of the
    /// inner nodes.
    pub fn from_full_propagator(spec: &ChainSpec, time: f64, v: &DMatrix<Complex<T>>) -> Self {
        let n = spec.n_nodes;
        let line_bits = n - 2;
        let mut tensor = Self::zeros(spec, time);
        for idx in TIndex::all() {
            let [i1, i_n, l1, l_n, j1, j_n, k1, k_n] = idx.bits().map(usize::from);
            let col_l = (l1 << (n - 1)) | l_n;
            let col_k = (k1 << (n - 1)) | k_n;
            let mut acc = zero::<T>();
            for line in 0..(1usize << line_bits) {
                let row_i = (i1 << (n - 1)) | (line << 1) | i_n;
                let row_j = (j1 << (n - 1)) | (line << 1) | j_n;
                acc += v[(row_i, col_l)] * v[(row_j, col_k)].conj();
            }
            tensor.set(idx, acc);
        }
        tensor
    }

    /// The same line seen with sender and receiver interchanged.
    pub fn exchanged(&self) -> Self {
        let mut out = self.clone();
        for idx in TIndex::all() {
            out.set(idx.exchanged(), self.at(idx));
        }
        out
    }

    /// Every entry that breaks conjugation symmetry, exchange symmetry or the
    /// selection rules by more than `tol`.
    pub fn violations(&self, tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        for idx in TIndex::all() {
            let v = self.at(idx);
            let herm = (v - self.at(idx.hermitian_partner()).conj()).modulus().to_f64_lossless();
            if herm > tol {
                out.push(Violation { index: idx, kind: ViolationKind::Hermiticity, size: herm });
            }
            let exch = (v - self.at(idx.exchanged())).modulus().to_f64_lossless();
            if exch > tol {
                out.push(Violation { index: idx, kind: ViolationKind::Exchange, size: exch });
            }
            let mag = v.modulus().to_f64_lossless();
            if idx.must_vanish() && mag > tol {
                out.push(Violation { index: idx, kind: ViolationKind::ZeroPattern, size: mag });
            }
        }
        out
    }

    /// Largest difference to another tensor over all 256 slots.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (*a - *b).modulus().to_f64_lossless())
            .fold(0.0, f64::max)
    }

    /// Writes the text archive: header lines, then one record per nonzero
    /// entry in index order. Numbers use the shortest exact representation.
    pub fn write_archive<W: Write>(&self, mut w: W) -> Result<()> {
        let nonzero: Vec<TIndex> = TIndex::all().filter(|&i| self.at(i) != zero()).collect();
        writeln!(w, "# transfer tensor archive")?;
        writeln!(w, "n_nodes = {}", self.n_nodes)?;
        writeln!(w, "coupling = {:e}", self.coupling)?;
        writeln!(w, "time = {:e}", self.time)?;
        writeln!(w, "hamiltonian_kind = {}", self.kind)?;
        writeln!(w, "convention = {CONVENTION}")?;
        writeln!(w, "entries = {}", nonzero.len())?;
        for idx in nonzero {
            let v = self.at(idx);
            writeln!(w, "{idx} {:e} {:e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_archive<R: BufRead>(r: R) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Archive { line, msg };
        let mut header: Vec<(String, String)> = Vec::new();
        let mut records: Vec<(usize, String)> = Vec::new();
        let mut expected = None;
        for (no, line) in r.lines().enumerate() {
            let line = line?;
            let no = no + 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            if expected.is_some() {
                records.push((no, text.to_owned()));
                continue;
            }
            let (key, value) = text
                .split_once('=')
                .ok_or_else(|| bad(no, format!("expected `key = value`, found `{text}`")))?;
            let (key, value) = (key.trim().to_owned(), value.trim().to_owned());
            if key == "entries" {
                expected = Some(value.parse::<usize>().map_err(|e| bad(no, e.to_string()))?);
            } else {
                header.push((key, value));
            }
        }
        let field = |name: &str| -> Result<&str> {
            header
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| bad(0, format!("missing header field `{name}`")))
        };
        if field("convention")? != CONVENTION {
            return Err(bad(0, format!("unsupported convention `{}`", field("convention")?)));
        }
        let n_nodes: usize = field("n_nodes")?.parse().map_err(|_| bad(0, "bad n_nodes".into()))?;
        let coupling: f64 = field("coupling")?.parse().map_err(|_| bad(0, "bad coupling".into()))?;
        let time: f64 = field("time")?.parse().map_err(|_| bad(0, "bad time".into()))?;
        let kind: HamiltonianKind = field("hamiltonian_kind")?.parse()?;
        let spec = ChainSpec { n_nodes, coupling, kind };
        spec.validate()?;
        let expected = expected.ok_or_else(|| bad(0, "missing `entries` line".into()))?;
        if records.len() != expected {
            return Err(bad(0, format!("expected {expected} records, found {}", records.len())));
        }
        let mut tensor = Self::zeros(&spec, time);
        for (no, rec) in records {
            let parts: Vec<&str> = rec.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(no, format!("expected `index re im`, found `{rec}`")));
            }
            let idx: TIndex = parts[0].parse().map_err(|e: Error| bad(no, e.to_string()))?;
            let re = parts[1].parse::<T>().map_err(|_| bad(no, format!("bad number `{}`", parts[1])))?;
            let im = parts[2].parse::<T>().map_err(|_| bad(no, format!("bad number `{}`", parts[2])))?;
            tensor.set(idx, Complex::new(re, im));
        }
        Ok(tensor)
    }
}

/// One tensor entry. Only inner-node configurations that conserve the
/// excitation number on both sides are summed, so forbidden entries are
/// exactly zero.
pub fn transfer_entry<T: Real>(spec: &ChainSpec, idx: TIndex, amps: &impl ExcitationAmplitudes<T>) -> Complex<T> {
    let rx = spec.n_nodes - 1;
    let [i1, i_n, l1, l_n, j1, j_n, k1, k_n] = idx.bits();
    let left = (l1 + l_n) as i32 - (i1 + i_n) as i32;
    let right = (k1 + k_n) as i32 - (j1 + j_n) as i32;
    if left < 0 || left != right {
        return zero();
    }
    let inp_l = config(l1, &[], l_n, rx);
    let inp_k = config(k1, &[], k_n, rx);
    let mut acc = zero::<T>();
    let mut add = |line: &[usize]| {
        let a = amps.amplitude(&config(i1, line, i_n, rx), &inp_l);
        let b = amps.amplitude(&config(j1, line, j_n, rx), &inp_k);
        acc += a * b.conj();
    };
    match left {
        0 => add(&[]),
        1 => (1..rx).for_each(|m| add(&[m])),
        _ => {
            for m in 1..rx {
                for n in m + 1..rx {
                    add(&[m, n]);
                }
            }
        }
    }
    acc
}

/// Production path: free-fermion amplitudes with Slater determinants for the
/// two-excitation terms.
pub fn compute_transfer_tensor<T: Real>(spec: &ChainSpec, t: T) -> Result<TransferTensor<T>> {
    let modes = FreeFermionModes::new(spec)?;
    Ok(transfer_tensor_from_modes(&modes, spec, t))
}

/// Same as [`compute_transfer_tensor`] but reusing precomputed modes, for
/// scans over many times.
pub fn transfer_tensor_from_modes<T: Real>(modes: &FreeFermionModes<T>, spec: &ChainSpec, t: T) -> TransferTensor<T> {
    let amps = SlaterAmplitudes { f: modes.amplitudes(t) };
    TransferTensor::from_amplitudes(spec, t.to_f64_lossless(), &amps)
}

/// `T~[iN, l1; jN, k1]`: the tensor contracted with a fixed initial receiver
/// state and traced over the final sender.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceiverTensor<T: Real>(pub [Complex<T>; 16]);

impl<T: Real> ReceiverTensor<T> {
    #[inline]
    pub fn get(&self, i_n: usize, l1: usize, j_n: usize, k1: usize) -> Complex<T> {
        self.0[(i_n << 3) | (l1 << 2) | (j_n << 1) | k1]
    }
}

pub fn reduced_receiver_tensor<T: Real>(t: &TransferTensor<T>, rho_r0: &Matrix2<Complex<T>>) -> ReceiverTensor<T> {
    let mut out = [zero::<T>(); 16];
    for (slot, value) in out.iter_mut().enumerate() {
        let (i_n, l1, j_n, k1) = (slot >> 3 & 1, slot >> 2 & 1, slot >> 1 & 1, slot & 1);
        let mut acc = zero::<T>();
        for i1 in 0..2 {
            for l_n in 0..2 {
                for k_n in 0..2 {
                    acc += t.get(i1, i_n, l1, l_n, i1, j_n, k1, k_n) * rho_r0[(l_n, k_n)];
                }
            }
        }
        *value = acc;
    }
    ReceiverTensor(out)
}

/// Distinct nonzero tensor values split into three magnitude families.
#[derive(Clone, Debug)]
pub struct Families<T: Real> {
    /// Largest magnitudes first.
    pub bands: [Vec<(TIndex, Complex<T>)>; 3],
    /// Smallest magnitude of family 2 over the largest of family 3.
    pub gap_2_3: f64,
}

/// Groups the symmetry-distinct nonzero values by magnitude.
///
/// Entries are reduced to one representative per symmetry orbit (the smallest
/// index), values that coincide to `1e-12` are merged, and the sorted
/// magnitudes are cut into the three contiguous classes with the smallest
/// total within-class squared deviation.
pub fn classify_families<T: Real>(t: &TransferTensor<T>) -> Families<T> {
    let mut reps: Vec<(TIndex, Complex<T>)> = Vec::new();
    for idx in TIndex::all() {
        let v = t.at(idx);
        if idx.canonical() != idx || v.modulus().to_f64_lossless() <= 1e-12 {
            continue;
        }
        if reps.iter().all(|(_, w)| (*w - v).modulus().to_f64_lossless() > 1e-12) {
            reps.push((idx, v));
        }
    }
    reps.sort_by(|a, b| b.1.modulus().partial_cmp(&a.1.modulus()).unwrap().then(a.0.cmp(&b.0)));
    let mags: Vec<f64> = reps.iter().map(|(_, v)| v.modulus().to_f64_lossless()).collect();

    let sse = |a: usize, b: usize| -> f64 {
        let s = &mags[a..b];
        if s.is_empty() {
            return 0.0;
        }
        let m = s.iter().sum::<f64>() / s.len() as f64;
        s.iter().map(|x| (x - m).powi(2)).sum()
    };
    let n = mags.len();
    let mut cuts = (n.min(1), n.min(2));
    if n >= 3 {
        let mut best = f64::INFINITY;
        for a in 1..n - 1 {
            for b in a + 1..n {
                let cost = sse(0, a) + sse(a, b) + sse(b, n);
                if cost < best {
                    best = cost;
                    cuts = (a, b);
                }
            }
        }
    }
    let bands = [reps[..cuts.0].to_vec(), reps[cuts.0..cuts.1].to_vec(), reps[cuts.1..].to_vec()];
    let gap_2_3 = match (bands[1].last(), bands[2].first()) {
        (Some(lo2), Some(hi3)) => lo2.1.modulus().to_f64_lossless() / hi3.1.modulus().to_f64_lossless(),
        _ => f64::INFINITY,
    };
    Families { bands, gap_2_3 }
}
