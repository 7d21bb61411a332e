//! State vectors over small registers of polarization qubits.
//!
//! Amplitudes are indexed with the first mode label as the most significant
//! bit, `H = 0` and `V = 1`. Registers are limited to [`MAX_QUBITS`] modes.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_QUBITS: usize = 6;

/// Projection probabilities below this are treated as "no event".
pub const EMPTY_THRESHOLD: f64 = 1e-14;

/// Tolerance for exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Tolerance for chained pipeline results (fidelities after many products).
pub const PIPELINE_TOL: f64 = 1e-9;

const PROJECTOR_TOL: f64 = 1e-10;

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-qubit polarization letter used to build product kets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLetter {
    H,
    V,
    Plus,
    Minus,
    R,
    L,
}

impl BasisLetter {
    /// Components `(⟨H|k⟩, ⟨V|k⟩)`. `|±⟩ = (|H⟩ ± |V⟩)/√2`, `|R/L⟩ = (|H⟩ ± i|V⟩)/√2`.
    pub fn ket(self) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BasisLetter::H => [c(1.0, 0.0), c(0.0, 0.0)],
            BasisLetter::V => [c(0.0, 0.0), c(1.0, 0.0)],
            BasisLetter::Plus => [c(s, 0.0), c(s, 0.0)],
            BasisLetter::Minus => [c(s, 0.0), c(-s, 0.0)],
            BasisLetter::R => [c(s, 0.0), c(0.0, s)],
            BasisLetter::L => [c(s, 0.0), c(0.0, -s)],
        }
    }
}

impl FromStr for BasisLetter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(BasisLetter::H),
            "V" | "v" => Ok(BasisLetter::V),
            "+" | "P" => Ok(BasisLetter::Plus),
            "-" | "\u{2212}" | "M" => Ok(BasisLetter::Minus),
            "R" | "r" => Ok(BasisLetter::R),
            "L" | "l" => Ok(BasisLetter::L),
            other => Err(Error::UnknownBasisLetter(other.to_string())),
        }
    }
}

impl fmt::Display for BasisLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BasisLetter::H => "H",
            BasisLetter::V => "V",
            BasisLetter::Plus => "+",
            BasisLetter::Minus => "-",
            BasisLetter::R => "R",
            BasisLetter::L => "L",
        };
        f.write_str(s)
    }
}

/// The three polarization bases used in the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolBasis {
    /// `{H, V}`
    Linear,
    /// `{+, −}`
    Diagonal,
    /// `{R, L}`
    Circular,
}

impl PolBasis {
    pub fn letters(self) -> [BasisLetter; 2] {
        match self {
            PolBasis::Linear => [BasisLetter::H, BasisLetter::V],
            PolBasis::Diagonal => [BasisLetter::Plus, BasisLetter::Minus],
            PolBasis::Circular => [BasisLetter::R, BasisLetter::L],
        }
    }

    /// Matrix whose columns are the two basis kets in H/V components.
    pub fn change_matrix(self) -> SingleQubitOp {
        let [k0, k1] = self.letters().map(BasisLetter::ket);
        SingleQubitOp::new(Matrix2::new(k0[0], k1[0], k0[1], k1[1]))
    }
}

/// A 2×2 complex operator acting on one polarization mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitOp(Matrix2<C64>);

impl SingleQubitOp {
    pub fn new(matrix: Matrix2<C64>) -> Self {
        SingleQubitOp(matrix)
    }

    pub fn identity() -> Self {
        SingleQubitOp(Matrix2::identity())
    }

    /// Rank-1 projector `|k⟩⟨k|` for a normalized ket.
    pub fn projector_onto(ket: [C64; 2]) -> Self {
        SingleQubitOp(Matrix2::new(
            ket[0] * ket[0].conj(),
            ket[0] * ket[1].conj(),
            ket[1] * ket[0].conj(),
            ket[1] * ket[1].conj(),
        ))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        SingleQubitOp(self.0.adjoint())
    }

    pub fn then(&self, next: &SingleQubitOp) -> Self {
        SingleQubitOp(next.0 * self.0)
    }

    pub fn apply_to(&self, ket: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[(0, 0)] * ket[0] + m[(0, 1)] * ket[1],
            m[(1, 0)] * ket[0] + m[(1, 1)] * ket[1],
        ]
    }

    /// `max |U†U − I|` over entries.
    pub fn unitarity_deviation(&self) -> f64 {
        max_abs(&(self.0.adjoint() * self.0 - Matrix2::identity()))
    }

    /// Largest of `max |P − P†|` and `max |P² − P|`.
    pub fn projector_deviation(&self) -> f64 {
        let herm = max_abs(&(self.0 - self.0.adjoint()));
        let idem = max_abs(&(self.0 * self.0 - self.0));
        herm.max(idem)
    }

    pub fn max_abs_diff(&self, other: &SingleQubitOp) -> f64 {
        max_abs(&(self.0 - other.0))
    }

    /// Distance to `other` after removing the best global phase.
    pub fn phase_insensitive_diff(&self, other: &SingleQubitOp) -> f64 {
        let overlap: C64 = self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum();
        if overlap.norm() < EMPTY_THRESHOLD {
            return self.max_abs_diff(other);
        }
        let phase = overlap / overlap.norm();
        max_abs(&(self.0 * phase - other.0))
    }
}

impl std::ops::Mul for SingleQubitOp {
    type Output = SingleQubitOp;

    fn mul(self, rhs: SingleQubitOp) -> SingleQubitOp {
        SingleQubitOp(self.0 * rhs.0)
    }
}

impl std::ops::Add for SingleQubitOp {
    type Output = SingleQubitOp;

    fn add(self, rhs: SingleQubitOp) -> SingleQubitOp {
        SingleQubitOp(self.0 + rhs.0)
    }
}

fn max_abs<R: nalgebra::Dim, Cc: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, Cc>>(
    m: &nalgebra::Matrix<C64, R, Cc, S>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// An operator on an ordered subset of named modes.
///
/// The matrix uses the same bit ordering as [`StateVector`]: the first mode
/// in `modes` is the most significant bit of the local index.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    modes: Vec<String>,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new<S: AsRef<str>>(modes: &[S], matrix: DMatrix<C64>) -> Result<Self> {
        let modes = check_labels(modes)?;
        let dim = 1usize << modes.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator { modes, matrix })
    }

    pub fn single(mode: &str, op: &SingleQubitOp) -> Self {
        let m = op.matrix();
        Operator {
            modes: vec![mode.to_string()],
            matrix: DMatrix::from_fn(2, 2, |r, c| m[(r, c)]),
        }
    }

    /// `|ψ⟩⟨ψ|` on the modes of `state`, in the state's own order.
    pub fn rank_one(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(&state.amplitudes);
        Operator {
            modes: state.labels.clone(),
            matrix: &v * v.adjoint(),
        }
    }

    /// Tensor product; `self` occupies the leading modes.
    pub fn kron(&self, other: &Operator) -> Result<Self> {
        if let Some(m) = self.modes.iter().find(|m| other.modes.contains(m)) {
            return Err(Error::OverlappingModes(m.clone()));
        }
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Ok(Operator {
            modes,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Product `self · other`; both must act on the same ordered modes.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::MismatchedModes {
                left: self.modes.clone(),
                right: other.modes.clone(),
            });
        }
        Ok(Operator {
            modes: self.modes.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn projector_deviation(&self) -> f64 {
        let adj = self.matrix.adjoint();
        let herm = max_abs(&(&self.matrix - &adj));
        let idem = max_abs(&(&self.matrix * &self.matrix - &self.matrix));
        herm.max(idem)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

/// The four two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    /// `(|HH⟩ + |VV⟩)/√2`
    PhiPlus,
    /// `(|HH⟩ − |VV⟩)/√2`
    PhiMinus,
    /// `(|HV⟩ + |VH⟩)/√2`
    PsiPlus,
    /// `(|HV⟩ − |VH⟩)/√2`
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Amplitudes over `HH, HV, VH, VV`.
    pub fn amplitudes(self) -> [C64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        match self {
            BellKind::PhiPlus => [c(s, 0.0), z, z, c(s, 0.0)],
            BellKind::PhiMinus => [c(s, 0.0), z, z, c(-s, 0.0)],
            BellKind::PsiPlus => [z, c(s, 0.0), c(s, 0.0), z],
            BellKind::PsiMinus => [z, c(s, 0.0), c(-s, 0.0), z],
        }
    }
}

/// Pure state of a few polarization qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<String>,
    amplitudes: Vec<C64>,
    norm_weight: f64,
    empty: bool,
}

fn check_labels<S: AsRef<str>>(labels: &[S]) -> Result<Vec<String>> {
    if labels.len() > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(labels.len()));
    }
    let mut out: Vec<String> = Vec::with_capacity(labels.len());
    for l in labels {
        let l = l.as_ref();
        if out.iter().any(|o| o == l) {
            return Err(Error::DuplicateMode(l.to_string()));
        }
        out.push(l.to_string());
    }
    Ok(out)
}

impl StateVector {
    /// Builds a state from raw amplitudes without normalizing.
    pub fn from_amplitudes<S: AsRef<str>>(labels: &[S], amplitudes: Vec<C64>) -> Result<Self> {
        let labels = check_labels(labels)?;
        let dim = 1usize << labels.len();
        if amplitudes.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        Ok(StateVector {
            labels,
            amplitudes,
            norm_weight: 1.0,
            empty: false,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    /// Accumulated post-selection success probability.
    pub fn norm_weight(&self) -> f64 {
        self.norm_weight
    }

    pub fn with_norm_weight(mut self, w: f64) -> Self {
        self.norm_weight = w;
        self
    }

    /// True when a projection removed all support.
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitude of a computational-basis string such as `"HVH"`.
    pub fn amplitude(&self, pattern: &str) -> Result<C64> {
        let bits: Vec<char> = pattern.chars().collect();
        if bits.len() != self.labels.len() {
            return Err(Error::LengthMismatch {
                expected: self.labels.len(),
                got: bits.len(),
            });
        }
        let mut idx = 0usize;
        for ch in bits {
            idx <<= 1;
            match ch {
                'H' => {}
                'V' => idx |= 1,
                other => return Err(Error::UnknownBasisLetter(other.to_string())),
            }
        }
        Ok(self.amplitudes[idx])
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
        self
    }

    pub fn position(&self, mode: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == mode)
            .ok_or_else(|| Error::UnknownMode(mode.to_string()))
    }

    fn shift_of(&self, pos: usize) -> usize {
        self.labels.len() - 1 - pos
    }

    /// Same state with the modes listed in a new order.
    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let order = check_labels(order)?;
        if !same_label_set(&self.labels, &order) {
            return Err(Error::MismatchedModes {
                left: self.labels.clone(),
                right: order,
            });
        }
        let n = self.labels.len();
        // new position j holds old position src[j]
        let src: Vec<usize> = order.iter().map(|l| self.position(l)).collect::<Result<_>>()?;
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        for (old_idx, a) in self.amplitudes.iter().enumerate() {
            let mut new_idx = 0usize;
            for &p in &src {
                new_idx = (new_idx << 1) | ((old_idx >> (n - 1 - p)) & 1);
            }
            amps[new_idx] = *a;
        }
        Ok(StateVector {
            labels: order,
            amplitudes: amps,
            norm_weight: self.norm_weight,
            empty: self.empty,
        })
    }

    /// Renames modes; `pairs` maps old label to new label.
    pub fn relabeled(&self, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut labels = self.labels.clone();
        for (from, to) in pairs {
            let p = self.position(from)?;
            labels[p] = to.to_string();
        }
        let labels = check_labels(&labels)?;
        Ok(StateVector { labels, ..self.clone() })
    }

    fn apply_matrix(&self, positions: &[usize], m: &DMatrix<C64>) -> Vec<C64> {
        let n = self.labels.len();
        let k = positions.len();
        let d = 1usize << k;
        let shifts: Vec<usize> = positions.iter().map(|&p| self.shift_of(p)).collect();
        let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
        let offsets: Vec<usize> = (0..d)
            .map(|l| {
                (0..k)
                    .filter(|j| (l >> (k - 1 - j)) & 1 == 1)
                    .map(|j| 1usize << shifts[j])
                    .sum()
            })
            .collect();
        let mut out = vec![c(0.0, 0.0); 1 << n];
        let mut local = vec![c(0.0, 0.0); d];
        for base in (0..(1usize << n)).filter(|b| b & mask == 0) {
            for (slot, off) in local.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for r in 0..d {
                let mut acc = c(0.0, 0.0);
                for (col, v) in local.iter().enumerate() {
                    acc += m[(r, col)] * v;
                }
                out[base | offsets[r]] = acc;
            }
        }
        out
    }

    /// Applies `op` to its modes, leaving the rest untouched. No renormalization.
    pub fn apply(&self, op: &Operator) -> Result<Self> {
        let positions: Vec<usize> = op.modes.iter().map(|m| self.position(m)).collect::<Result<_>>()?;
        Ok(StateVector {
            labels: self.labels.clone(),
            amplitudes: self.apply_matrix(&positions, &op.matrix),
            norm_weight: self.norm_weight,
            empty: self.empty,
        })
    }

    /// `⟨s|O|s⟩`, real part.
    pub fn expectation(&self, op: &Operator) -> Result<f64> {
        let applied = self.apply(op)?;
        Ok(dot(&self.amplitudes, &applied.amplitudes).re)
    }

    /// Projects `mode` onto `ket`, removes that mode, and renormalizes.
    /// Returns the reduced state and the projection probability.
    pub fn measure_out(&self, mode: &str, ket: [C64; 2]) -> Result<(Self, f64)> {
        let pos = self.position(mode)?;
        let n = self.labels.len();
        let shift = self.shift_of(pos);
        let mut amps = Vec::with_capacity(1 << (n - 1));
        for rest in 0..(1usize << (n - 1)) {
            let hi = (rest >> shift) << (shift + 1);
            let lo = rest & ((1 << shift) - 1);
            let i0 = hi | lo;
            let i1 = i0 | (1 << shift);
            amps.push(ket[0].conj() * self.amplitudes[i0] + ket[1].conj() * self.amplitudes[i1]);
        }
        let mut labels = self.labels.clone();
        labels.remove(pos);
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let reduced = StateVector {
            labels,
            amplitudes: amps,
            norm_weight: self.norm_weight * p,
            empty: false,
        };
        Ok((finish_projection(reduced, p), p))
    }

    /// Coefficients of the state in a product basis where every qubit uses `basis`.
    pub fn coefficients_in(&self, basis: PolBasis) -> Vec<C64> {
        let u = basis.change_matrix().adjoint();
        let mut s = self.clone();
        for l in self.labels.clone() {
            s = s.apply(&Operator::single(&l, &u)).expect("own label");
        }
        s.amplitudes
    }
}

fn finish_projection(mut s: StateVector, p: f64) -> StateVector {
    if p < EMPTY_THRESHOLD {
        s.amplitudes.iter_mut().for_each(|a| *a = c(0.0, 0.0));
        s.norm_weight = 0.0;
        s.empty = true;
        s
    } else {
        s.normalized()
    }
}

fn same_label_set(a: &[String], b: &[String]) -> bool {
    a.len() == b.len() && a.iter().all(|l| b.contains(l))
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Normalized product ket, one basis letter per mode.
pub fn make_ket<S: AsRef<str>>(labels: &[S], letters: &[BasisLetter]) -> Result<StateVector> {
    let labels = check_labels(labels)?;
    if letters.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            got: letters.len(),
        });
    }
    let mut amps = vec![c(1.0, 0.0)];
    for letter in letters {
        let k = letter.ket();
        amps = amps.iter().flat_map(|a| [a * k[0], a * k[1]]).collect();
    }
    StateVector::from_amplitudes(&labels, amps)
}

/// Parses letters like `"H+R"` and builds the product ket.
pub fn parse_ket<S: AsRef<str>>(labels: &[S], letters: &str) -> Result<StateVector> {
    let letters: Vec<BasisLetter> = letters
        .chars()
        .map(|ch| ch.to_string().parse())
        .collect::<Result<_>>()?;
    make_ket(labels, &letters)
}

pub fn bell_state<S: AsRef<str>>(kind: BellKind, labels: &[S]) -> Result<StateVector> {
    if labels.len() != 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            got: labels.len(),
        });
    }
    StateVector::from_amplitudes(labels, kind.amplitudes().to_vec())
}

pub fn tensor(s1: &StateVector, s2: &StateVector) -> Result<StateVector> {
    if let Some(l) = s1.labels.iter().find(|l| s2.labels.contains(l)) {
        return Err(Error::OverlappingModes(l.clone()));
    }
    let mut labels = s1.labels.clone();
    labels.extend(s2.labels.iter().cloned());
    let labels = check_labels(&labels)?;
    let amplitudes = s1
        .amplitudes
        .iter()
        .flat_map(|a| s2.amplitudes.iter().map(move |b| a * b))
        .collect();
    Ok(StateVector {
        labels,
        amplitudes,
        norm_weight: s1.norm_weight * s2.norm_weight,
        empty: s1.empty || s2.empty,
    })
}

pub fn apply_single(op: &SingleQubitOp, mode: &str, s: &StateVector) -> Result<StateVector> {
    s.apply(&Operator::single(mode, op))
}

/// Applies a projector and renormalizes. The returned probability is
/// `⟨s|P|s⟩`; below [`EMPTY_THRESHOLD`] the state comes back flagged empty.
pub fn project(s: &StateVector, projector: &Operator) -> Result<(StateVector, f64)> {
    let dev = projector.projector_deviation();
    if dev > PROJECTOR_TOL {
        return Err(Error::NotAProjector(dev));
    }
    let mut out = s.apply(projector)?;
    let p = out.norm().powi(2);
    out.norm_weight *= p;
    Ok((finish_projection(out, p), p))
}

/// `⟨s1|s2⟩`, reordering `s2` to match `s1` when both cover the same modes.
pub fn inner(s1: &StateVector, s2: &StateVector) -> Result<C64> {
    if s1.labels == s2.labels {
        return Ok(dot(&s1.amplitudes, &s2.amplitudes));
    }
    let s2 = s2.permuted(&s1.labels)?;
    Ok(dot(&s1.amplitudes, &s2.amplitudes))
}

pub fn fidelity(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    Ok(inner(s1, s2)?.norm_sqr().clamp(0.0, 1.0))
}
