//! Quantum-state primitives: pure states, density matrices, unitaries,
//! channels and the handful of operations the games are built from.
//!
//! Conventions:
//! - qubit 0 is the leftmost tensor factor and the most-significant bit of a
//!   basis index;
//! - construction-time validation uses [`VALIDATION_TOL`];
//! - every value is immutable once built, and all operations are pure.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, check_dim, re, CMatrix, C64};

/// Tolerance for constructing states, unitaries and channels.
pub const VALIDATION_TOL: f64 = 1e-9;
/// Tolerance for conservation laws (trace, hermiticity) after an operation.
pub const CONSERVATION_TOL: f64 = 1e-12;
/// Tolerance for probability weights of convex channels and mixtures.
pub const WEIGHT_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(amps.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![re(0.0); dim];
        amps[index] = re(1.0);
        Ok(Self { amps })
    }

    /// `a|0> + b|1>`.
    pub fn qubit(a: C64, b: C64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply(&self, u: &Unitary) -> Result<Self> {
        same_dim(u.dim(), self.dim())?;
        let m = u.matrix();
        let amps = (0..self.dim())
            .map(|i| m.row(i).iter().zip(&self.amps).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Self { amps })
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.amps.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        StateVector::new(pairs.into_iter().map(|[r, i]| c(r, i)).collect())
            .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let herm = m.hermiticity_error();
        if herm > VALIDATION_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > VALIDATION_TOL || tr.im.abs() > VALIDATION_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min_ev = m.min_hermitian_eigenvalue();
        if min_ev < -VALIDATION_TOL {
            return Err(Error::NotPositive(min_ev));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix produced by a trace- and positivity-preserving map.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        debug_assert!(m.hermiticity_error() < 1e-8);
        Self { m }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            m: CMatrix::identity(dim).scale(re(1.0 / dim as f64)),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m.min_hermitian_eigenvalue()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m.max_abs_diff(&other.m)
    }

    /// Convex combination `sum_k w_k rho_k`.
    pub fn mixture(terms: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidDistribution("empty mixture".into()))?;
        check_weights(terms.iter().map(|(w, _)| *w))?;
        let dim = first.1.dim();
        let mut acc = CMatrix::zeros(dim);
        for (w, rho) in terms {
            same_dim(dim, rho.dim())?;
            acc = &acc + &rho.m.scale(re(*w));
        }
        Ok(Self::from_trusted(acc))
    }
}

// ---------------------------------------------------------------------------
// Unitary
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    m: CMatrix,
}

impl Unitary {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        if !m.is_finite() {
            return Err(Error::NonFinite("unitary"));
        }
        let err = m.unitarity_error();
        if err > VALIDATION_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { m })
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    /// Product `self * other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m * &other.m,
        })
    }
}

/// Standard gates. `flip` and `no_flip` are the spin-flip game's F and N.
pub mod gates {
    use super::Unitary;
    use crate::linalg::{re, CMatrix};
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn no_flip() -> Unitary {
        Unitary::identity(2)
    }

    pub fn flip() -> Unitary {
        Unitary::from_trusted(CMatrix::from_fn(2, |i, j| re((i != j) as u8 as f64)))
    }

    pub fn hadamard() -> Unitary {
        let h = FRAC_1_SQRT_2;
        Unitary::from_trusted(CMatrix::from_fn(2, |i, j| {
            if i == 1 && j == 1 {
                re(-h)
            } else {
                re(h)
            }
        }))
    }

    /// Two-qubit swap on `|q0 q1>`.
    pub fn swap() -> Unitary {
        Unitary::from_trusted(CMatrix::from_fn(4, |i, j| {
            let swapped = ((j & 1) << 1) | (j >> 1);
            re((i == swapped) as u8 as f64)
        }))
    }
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum ChannelRepr {
    Kraus(Vec<CMatrix>),
    Convex(Vec<(f64, Unitary)>),
}

/// Completely positive trace-preserving map, stored either as Kraus
/// operators or as a convex combination of unitary conjugations.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    repr: ChannelRepr,
}

impl Channel {
    pub fn kraus(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = ops.first().ok_or(Error::EmptyChannel)?.dim();
        check_dim(dim)?;
        let mut completeness = CMatrix::zeros(dim);
        for k in &ops {
            same_dim(dim, k.dim())?;
            if !k.is_finite() {
                return Err(Error::NonFinite("Kraus operator"));
            }
            completeness = &completeness + &(&k.adjoint() * k);
        }
        let err = completeness.max_abs_diff(&CMatrix::identity(dim));
        if err > VALIDATION_TOL {
            return Err(Error::NotTracePreserving(err));
        }
        Ok(Self {
            repr: ChannelRepr::Kraus(ops),
        })
    }

    pub fn convex(terms: Vec<(f64, Unitary)>) -> Result<Self> {
        let dim = terms.first().ok_or(Error::EmptyChannel)?.1.dim();
        for (_, u) in &terms {
            same_dim(dim, u.dim())?;
        }
        check_weights(terms.iter().map(|(w, _)| *w))?;
        Ok(Self {
            repr: ChannelRepr::Convex(terms),
        })
    }

    pub fn unitary(u: Unitary) -> Self {
        Self {
            repr: ChannelRepr::Convex(vec![(1.0, u)]),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            ChannelRepr::Kraus(ops) => ops[0].dim(),
            ChannelRepr::Convex(terms) => terms[0].1.dim(),
        }
    }

    /// Kraus form; convex terms become `sqrt(w) U`.
    pub fn kraus_operators(&self) -> Vec<CMatrix> {
        match &self.repr {
            ChannelRepr::Kraus(ops) => ops.clone(),
            ChannelRepr::Convex(terms) => terms
                .iter()
                .map(|(w, u)| u.matrix().scale(re(w.sqrt())))
                .collect(),
        }
    }

    /// Convex terms, when the channel was built that way.
    pub fn convex_terms(&self) -> Option<&[(f64, Unitary)]> {
        match &self.repr {
            ChannelRepr::Convex(t) => Some(t),
            ChannelRepr::Kraus(_) => None,
        }
    }
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    for w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidDistribution(format!("weight {w}")));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
    }
    Ok(())
}

fn same_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// `|psi><psi|`.
pub fn density_from_pure(psi: &StateVector) -> DensityMatrix {
    DensityMatrix::from_trusted(CMatrix::outer(&psi.amps, &psi.amps))
}

/// `U rho U^dagger`.
pub fn apply_unitary(rho: &DensityMatrix, u: &Unitary) -> Result<DensityMatrix> {
    same_dim(rho.dim(), u.dim())?;
    Ok(DensityMatrix::from_trusted(u.m.conjugate(&rho.m)))
}

/// `sum_i K_i rho K_i^dagger`, or `sum_i w_i U_i rho U_i^dagger` for convex
/// channels.
pub fn apply_channel(rho: &DensityMatrix, ch: &Channel) -> Result<DensityMatrix> {
    same_dim(rho.dim(), ch.dim())?;
    let mut acc = CMatrix::zeros(rho.dim());
    match &ch.repr {
        ChannelRepr::Kraus(ops) => {
            for k in ops {
                acc = &acc + &k.conjugate(&rho.m);
            }
        }
        ChannelRepr::Convex(terms) => {
            for (w, u) in terms {
                if *w == 0.0 {
                    continue;
                }
                acc = &acc + &u.m.conjugate(&rho.m).scale(re(*w));
            }
        }
    }
    Ok(DensityMatrix::from_trusted(acc))
}

/// Kronecker product with the left factor as the most-significant subsystem.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Self { amps }
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(self.m.kron(&other.m))
    }
}

impl Tensor for Unitary {
    fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(self.m.kron(&other.m))
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Tensor product of a list of factors, first factor most significant.
pub fn tensor_all<T: Tensor + Clone>(factors: &[T]) -> Option<T> {
    let (first, rest) = factors.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
}

/// Reduced state of subsystem `keep` for a board laid out as `dims`.
pub fn partial_trace(rho: &DensityMatrix, keep: usize, dims: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidSubsystems(format!("dims {dims:?}")));
    }
    if total != rho.dim() {
        return Err(Error::InvalidSubsystems(format!(
            "dims {dims:?} multiply to {total}, board has dimension {}",
            rho.dim()
        )));
    }
    if keep >= dims.len() {
        return Err(Error::InvalidSubsystems(format!(
            "subsystem {keep} out of range for {} subsystems",
            dims.len()
        )));
    }
    let left: usize = dims[..keep].iter().product();
    let d = dims[keep];
    let right: usize = dims[keep + 1..].iter().product();
    let idx = |l: usize, k: usize, r: usize| (l * d + k) * right + r;
    let m = rho.matrix();
    let reduced = CMatrix::from_fn(d, |k1, k2| {
        let mut acc = re(0.0);
        for l in 0..left {
            for r in 0..right {
                acc += m[(idx(l, k1, r), idx(l, k2, r))];
            }
        }
        acc
    });
    Ok(DensityMatrix::from_trusted(reduced))
}

/// Computational-basis outcome probabilities (the real diagonal), clamped
/// to `[0, 1]`.
pub fn measure_probs(rho: &DensityMatrix) -> Vec<f64> {
    rho.m.diagonal().iter().map(|z| clamp_prob(z.re)).collect()
}

/// `<psi|rho|psi>`.
pub fn projective_overlap(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    same_dim(rho.dim(), psi.dim())?;
    let m = rho.matrix();
    let mut acc = re(0.0);
    for (i, a) in psi.amps.iter().enumerate() {
        let row: C64 = m.row(i).iter().zip(&psi.amps).map(|(x, b)| x * b).sum();
        acc += a.conj() * row;
    }
    Ok(clamp_prob(acc.re))
}

fn clamp_prob(p: f64) -> f64 {
    debug_assert!(
        (-VALIDATION_TOL..=1.0 + VALIDATION_TOL).contains(&p),
        "probability {p} out of tolerance"
    );
    p.clamp(0.0, 1.0)
}

/// Singly-controlled gate: identity when the control (most-significant
/// qubit) is `|0>`, `target` when it is `|1>`.
pub fn controlled_gate(target: &Unitary) -> Unitary {
    let d = target.dim();
    let t = target.matrix();
    Unitary::from_trusted(CMatrix::from_fn(2 * d, |i, j| match (i < d, j < d) {
        (true, true) => re((i == j) as u8 as f64),
        (false, false) => t[(i - d, j - d)],
        _ => re(0.0),
    }))
}

/// Lifts a k-qubit gate onto `positions` of an `n_qubits` register.
///
/// `positions[0]` receives the gate's most-significant qubit. Qubit 0 of
/// the register is its most-significant bit.
pub fn embed_gate(gate: &Unitary, positions: &[usize], n_qubits: usize) -> Result<Unitary> {
    let k = positions.len();
    if gate.dim() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            got: gate.dim(),
        });
    }
    check_dim(1 << n_qubits)?;
    for (i, &p) in positions.iter().enumerate() {
        if p >= n_qubits || positions[..i].contains(&p) {
            return Err(Error::InvalidSubsystems(format!(
                "qubit positions {positions:?} for a {n_qubits}-qubit register"
            )));
        }
    }
    let bit = |x: usize, q: usize| (x >> (n_qubits - 1 - q)) & 1;
    let mut mask = 0usize;
    for &p in positions {
        mask |= 1 << (n_qubits - 1 - p);
    }
    let sub = |x: usize| positions.iter().fold(0, |acc, &p| (acc << 1) | bit(x, p));
    let g = gate.matrix();
    Ok(Unitary::from_trusted(CMatrix::from_fn(
        1 << n_qubits,
        |o, i| {
            if o & !mask != i & !mask {
                re(0.0)
            } else {
                g[(sub(o), sub(i))]
            }
        },
    )))
}
