//! Three-qubit pure states, single-qubit vectors and product triples.
//!
//! Amplitudes are stored big-endian over (qubit 1, qubit 2, qubit 3): the ket
//! `|ijk⟩` lives at flat index `4i + 2j + k`. All contractions conjugate the
//! local vectors, so `overlap(ψ, u)` is `⟨u1 u2 u3|ψ⟩`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the squared norm accepted by the checked constructors.
pub const NORM_TOL: f64 = 1e-12;

/// Drift above which a renormalization is worth reporting.
pub const RENORM_WARN: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Qubit label, 1-based to match ket notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Qubit(u8);

impl Qubit {
    pub const ONE: Qubit = Qubit(1);
    pub const TWO: Qubit = Qubit(2);
    pub const THREE: Qubit = Qubit(3);
    pub const ALL: [Qubit; 3] = [Qubit(1), Qubit(2), Qubit(3)];

    pub fn new(k: usize) -> Result<Self> {
        match k {
            1..=3 => Ok(Qubit(k as u8)),
            _ => Err(Error::InvalidQubit(k)),
        }
    }

    /// Zero-based position.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn label(self) -> usize {
        self.0 as usize
    }

    /// Bit weight of this qubit in a flat index.
    fn weight(self) -> usize {
        4 >> self.index()
    }

    /// The two other qubits in increasing order.
    pub fn others(self) -> (Qubit, Qubit) {
        match self.0 {
            1 => (Qubit(2), Qubit(3)),
            2 => (Qubit(1), Qubit(3)),
            _ => (Qubit(1), Qubit(2)),
        }
    }
}

/// A normalized single-qubit state `a0|0⟩ + a1|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitVector {
    a0: Complex64,
    a1: Complex64,
}

impl QubitVector {
    pub const ZERO_KET: QubitVector = QubitVector { a0: ONE, a1: ZERO };
    pub const ONE_KET: QubitVector = QubitVector { a0: ZERO, a1: ONE };

    /// Checked constructor; the input must already be unit-norm.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n2 = a0.norm_sqr() + a1.norm_sqr();
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr: n2 });
        }
        Ok(QubitVector { a0, a1 })
    }

    /// Normalizes an arbitrary pair, failing only on a zero (or non-finite) vector.
    pub fn normalized(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(QubitVector { a0: a0 / n, a1: a1 / n })
    }

    pub fn from_real(a0: f64, a1: f64) -> Result<Self> {
        Self::normalized(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0))
    }

    /// `cos θ |0⟩ + e^{iφ} sin θ |1⟩`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        QubitVector {
            a0: Complex64::new(theta.cos(), 0.0),
            a1: Complex64::from_polar(theta.sin(), phi),
        }
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QubitVector { a0: Complex64::new(h, 0.0), a1: Complex64::new(h, 0.0) }
    }

    /// Uniformly distributed on the Bloch sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut g = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let (a0, a1) = (g(), g());
            if let Ok(v) = Self::normalized(a0, a1) {
                return v;
            }
        }
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn components(&self) -> [Complex64; 2] {
        [self.a0, self.a1]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitVector) -> Complex64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    /// `⟨self|x⟩` for an unnormalized pair.
    pub fn inner_raw(&self, x: [Complex64; 2]) -> Complex64 {
        self.a0.conj() * x[0] + self.a1.conj() * x[1]
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QubitVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Multiplies by `e^{iα}`.
    pub fn with_phase(&self, alpha: f64) -> Self {
        let p = Complex64::from_polar(1.0, alpha);
        QubitVector { a0: self.a0 * p, a1: self.a1 * p }
    }

    pub fn scaled(&self, z: Complex64) -> [Complex64; 2] {
        [self.a0 * z, self.a1 * z]
    }
}

/// The orthogonal unit vector `(−conj(a1), conj(a0))`.
///
/// Any other choice differs by a phase; the canonical form fixes that phase.
pub fn orthogonal_complement(u: &QubitVector) -> QubitVector {
    QubitVector { a0: -u.a1.conj(), a1: u.a0.conj() }
}

/// Three local unit vectors defining the product state `|u1 u2 u3⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductTriple {
    pub u: [QubitVector; 3],
}

impl ProductTriple {
    pub fn new(u1: QubitVector, u2: QubitVector, u3: QubitVector) -> Self {
        ProductTriple { u: [u1, u2, u3] }
    }

    /// The computational basis product state `|ijk⟩`.
    pub fn basis(flat: usize) -> Self {
        let pick = |bit: usize| if bit == 0 { QubitVector::ZERO_KET } else { QubitVector::ONE_KET };
        ProductTriple::new(pick((flat >> 2) & 1), pick((flat >> 1) & 1), pick(flat & 1))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        ProductTriple::new(QubitVector::random(rng), QubitVector::random(rng), QubitVector::random(rng))
    }

    pub fn get(&self, k: Qubit) -> &QubitVector {
        &self.u[k.index()]
    }

    pub fn set(&mut self, k: Qubit, v: QubitVector) {
        self.u[k.index()] = v;
    }

    /// Amplitudes of the product ket in flat order.
    pub fn amplitudes(&self) -> [Complex64; 8] {
        let [u1, u2, u3] = self.u.map(|q| q.components());
        let mut out = [ZERO; 8];
        for (flat, amp) in out.iter_mut().enumerate() {
            *amp = u1[(flat >> 2) & 1] * u2[(flat >> 1) & 1] * u3[flat & 1];
        }
        out
    }

    /// Minimum over qubits of `|⟨u_k|u'_k⟩|²`.
    pub fn min_fidelity(&self, other: &ProductTriple) -> f64 {
        (0..3).map(|k| self.u[k].fidelity(&other.u[k])).fold(f64::INFINITY, f64::min)
    }
}

/// A normalized three-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState3Q {
    amp: [Complex64; 8],
}

impl PureState3Q {
    /// Checked constructor: `Σ|amp|² = 1` within [`NORM_TOL`].
    pub fn new(amp: [Complex64; 8]) -> Result<Self> {
        let n2 = norm_sqr(&amp);
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr: n2 });
        }
        Ok(PureState3Q { amp })
    }

    /// Rescales to unit norm and returns the state with the original norm.
    pub fn normalized(amp: [Complex64; 8]) -> Result<(Self, f64)> {
        let n = norm_sqr(&amp).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok((PureState3Q { amp: amp.map(|a| a / n) }, n))
    }

    pub fn from_real(amp: [f64; 8]) -> Result<Self> {
        Self::normalized(amp.map(|x| Complex64::new(x, 0.0))).map(|(s, _)| s)
    }

    pub fn product(triple: &ProductTriple) -> Self {
        PureState3Q { amp: triple.amplitudes() }
    }

    pub fn amplitudes(&self) -> &[Complex64; 8] {
        &self.amp
    }

    /// Amplitude of `|ijk⟩`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.amp[4 * i + 2 * j + k]
    }

    pub fn inner(&self, other: &PureState3Q) -> Complex64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &PureState3Q) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest `|amp|` over the computational basis, a lower bound on λ0.
    pub fn max_amplitude(&self) -> f64 {
        self.amp.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

fn norm_sqr(amp: &[Complex64; 8]) -> f64 {
    amp.iter().map(|a| a.norm_sqr()).sum()
}

/// `⟨u1 u2 u3|ψ⟩`.
pub fn overlap(state: &PureState3Q, triple: &ProductTriple) -> Complex64 {
    let [u1, u2, u3] = triple.u.map(|q| q.components().map(|c| c.conj()));
    let a = &state.amp;
    let mut acc = ZERO;
    for i in 0..2 {
        let mut inner = ZERO;
        for j in 0..2 {
            let t = u3[0] * a[4 * i + 2 * j] + u3[1] * a[4 * i + 2 * j + 1];
            inner += u2[j] * t;
        }
        acc += u1[i] * inner;
    }
    acc
}

/// `⟨u_k|ψ⟩` on the two surviving qubits, in their original order.
///
/// Entry `2x + y` is the amplitude of `|xy⟩` on the survivors.
pub fn contract_single(state: &PureState3Q, k: Qubit, u: &QubitVector) -> [Complex64; 4] {
    let (p, q) = k.others();
    let conj = u.components().map(|c| c.conj());
    let mut out = [ZERO; 4];
    for (s, slot) in out.iter_mut().enumerate() {
        let base = ((s >> 1) & 1) * p.weight() + (s & 1) * q.weight();
        *slot = conj[0] * state.amp[base] + conj[1] * state.amp[base + k.weight()];
    }
    out
}

/// `⟨u_j u_k|ψ⟩` on the remaining qubit, unnormalized.
pub fn contract_double(
    state: &PureState3Q,
    j: Qubit,
    k: Qubit,
    uj: &QubitVector,
    uk: &QubitVector,
) -> Result<[Complex64; 2]> {
    if j == k {
        return Err(Error::RepeatedQubit(j.label()));
    }
    let rest = Qubit::ALL.into_iter().find(|&q| q != j && q != k).expect("three qubits");
    let cj = uj.components().map(|c| c.conj());
    let ck = uk.components().map(|c| c.conj());
    let mut out = [ZERO; 2];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for x in 0..2 {
            for y in 0..2 {
                let flat = r * rest.weight() + x * j.weight() + y * k.weight();
                acc += cj[x] * ck[y] * state.amp[flat];
            }
        }
        *slot = acc;
    }
    Ok(out)
}

/// Contraction of `ψ` against the two qubits other than `k`, using `triple`.
pub fn contract_others(state: &PureState3Q, triple: &ProductTriple, k: Qubit) -> [Complex64; 2] {
    let (p, q) = k.others();
    contract_double(state, p, q, triple.get(p), triple.get(q)).expect("distinct qubits")
}
