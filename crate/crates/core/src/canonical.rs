//! Five-term canonical forms built at stationary points, the second-variation
//! matrix, and validity verdicts.
//!
//! With `|v_k⟩` orthogonal to `|u_k⟩`, a stationary point expands the state as
//!
//! ```text
//! |ψ⟩ = λ0|u1u2u3⟩ + λ1|u1v2v3⟩ + λ2|v1u2v3⟩ + λ3|v1v2u3⟩ + λ4|v1v2v3⟩
//! ```
//!
//! with `λ0..λ3` real and non-negative, `Re λ4 ≥ 0`.

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::solver::{self, PointKind};
use crate::state::{orthogonal_complement, overlap, ProductTriple, PureState3Q, QubitVector};

/// Largest cross coefficient tolerated by [`build_canonical_form`].
pub const CROSS_TOL: f64 = 1e-8;
/// Coefficients below this magnitude have no meaningful phase.
pub const PHASE_ZERO: f64 = 1e-12;
/// Saturation tolerance of the coefficient inequality.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Tolerance on `λ0 ≥ |λ4|` and on the `Re λ4 = 0` tie-break.
pub const LAMBDA4_TOL: f64 = 1e-12;
/// Tolerance of the positivity conditions on `A`.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Agreement required between `λ0` and the maximal product overlap.
pub const GLOBAL_MAX_TOL: f64 = 1e-6;
/// Normalization tolerance of a canonical form.
pub const NORM_TOL: f64 = 1e-10;

// Flat positions in the (u=0, v=1) product basis.
const CROSS_KETS: [(usize, &str); 3] = [(0b001, "|u1u2v3⟩"), (0b010, "|u1v2u3⟩"), (0b100, "|v1u2u3⟩")];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub lambda0: f64,
    /// Coefficient of `|u1 v2 v3⟩`.
    pub lambda1: f64,
    /// Coefficient of `|v1 u2 v3⟩`.
    pub lambda2: f64,
    /// Coefficient of `|v1 v2 u3⟩`.
    pub lambda3: f64,
    /// Coefficient of `|v1 v2 v3⟩`.
    pub lambda4: Complex64,
    pub basis_u: ProductTriple,
    pub basis_v: ProductTriple,
}

impl CanonicalForm {
    /// A form with explicit coefficients over the basis `u` and its fixed complements.
    pub fn from_coefficients(coefficients: [f64; 4], lambda4: Complex64, basis_u: ProductTriple) -> Result<Self> {
        let basis_v = ProductTriple { u: basis_u.u.map(|u| orthogonal_complement(&u)) };
        let [lambda0, lambda1, lambda2, lambda3] = coefficients;
        let cf = CanonicalForm { lambda0, lambda1, lambda2, lambda3, lambda4, basis_u, basis_v };
        cf.validate()?;
        Ok(cf)
    }

    /// `(λ0, λ1, λ2, λ3)`.
    pub fn real_coefficients(&self) -> [f64; 4] {
        [self.lambda0, self.lambda1, self.lambda2, self.lambda3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.real_coefficients().iter().map(|x| x * x).sum::<f64>() + self.lambda4.norm_sqr()
    }

    /// Checks everything that does not need the source state.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCoefficients(msg));
        if self.real_coefficients().iter().any(|&x| !(x >= 0.0)) {
            return bad(format!("λ0..λ3 must be non-negative: {:?}", self.real_coefficients()));
        }
        if (self.norm_sqr() - 1.0).abs() > NORM_TOL {
            return bad(format!("coefficients are not normalized (Σ = {})", self.norm_sqr()));
        }
        if self.lambda4.norm() > self.lambda0 + LAMBDA4_TOL {
            return Err(Error::Lambda4ExceedsLambda0 { lambda0: self.lambda0, lambda4_abs: self.lambda4.norm() });
        }
        if !lambda4_in_half_plane(self.lambda4) {
            return bad(format!("λ4 = {} is outside -π/2 ≤ Arg λ4 ≤ π/2", self.lambda4));
        }
        for (u, v) in self.basis_u.u.iter().zip(&self.basis_v.u) {
            if u.inner(v).norm() > NORM_TOL {
                return bad("v_k is not orthogonal to u_k".into());
            }
        }
        Ok(())
    }

    /// Product basis vector for a pattern of u (bit 0) and v (bit 1) per qubit.
    fn basis_ket(&self, pattern: usize) -> ProductTriple {
        let pick = |k: usize, bit: usize| if bit == 0 { self.basis_u.u[k] } else { self.basis_v.u[k] };
        ProductTriple::new(pick(0, (pattern >> 2) & 1), pick(1, (pattern >> 1) & 1), pick(2, pattern & 1))
    }
}

/// `Re λ4 ≥ 0`, with `Im λ4 ≥ 0` on the imaginary axis.
fn lambda4_in_half_plane(z: Complex64) -> bool {
    if z.re.abs() <= LAMBDA4_TOL {
        z.im >= -LAMBDA4_TOL
    } else {
        z.re > 0.0
    }
}

/// Knob angles `α_k` (for `v_k → e^{iα_k} v_k`) that make the nondiagonal
/// coefficients real, given their phases.
///
/// Equations are taken in priority order (`λ1`, `λ2`, `λ3`, then `λ4` real) and
/// only while they are linearly independent; leftover knobs are zero.
fn phase_knobs(phases: [Option<f64>; 4]) -> [f64; 3] {
    const ROWS: [[f64; 3]; 7] =
        [[0., 1., 1.], [1., 0., 1.], [1., 1., 0.], [1., 1., 1.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]];
    let mut rows: Vec<[f64; 3]> = Vec::with_capacity(3);
    let mut rhs: Vec<f64> = Vec::with_capacity(3);
    for (i, row) in ROWS.iter().enumerate() {
        if rows.len() == 3 {
            break;
        }
        let target = if i < 4 {
            match phases[i] {
                Some(p) => p,
                None => continue,
            }
        } else {
            0.0
        };
        let mut trial = rows.clone();
        trial.push(*row);
        if rank(&trial) == trial.len() {
            rows = trial;
            rhs.push(target);
        }
    }
    let m = Matrix3::from_fn(|r, c| rows[r][c]);
    let b = nalgebra::Vector3::new(rhs[0], rhs[1], rhs[2]);
    let x = m.lu().solve(&b).expect("independent rows");
    [x[0], x[1], x[2]]
}

fn rank(rows: &[[f64; 3]]) -> usize {
    let m = nalgebra::DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    m.rank(1e-9)
}

/// Builds the phase-fixed canonical form at `triple`, tolerating cross
/// coefficients up to `cross_tol`.
pub fn build_canonical_form_with_tol(state: &PureState3Q, triple: &ProductTriple, cross_tol: f64) -> Result<CanonicalForm> {
    let cf = build_unchecked(state, triple, cross_tol)?;
    if cf.lambda4.norm() > cf.lambda0 + LAMBDA4_TOL {
        return Err(Error::Lambda4ExceedsLambda0 { lambda0: cf.lambda0, lambda4_abs: cf.lambda4.norm() });
    }
    Ok(cf)
}

/// Phase-fixed coefficients without the `λ0 ≥ |λ4|` check.
fn build_unchecked(state: &PureState3Q, triple: &ProductTriple, cross_tol: f64) -> Result<CanonicalForm> {
    let mut u = *triple;
    // Absorb the overall phase into u1 so that ⟨u1u2u3|ψ⟩ = λ0 ≥ 0.
    let c0 = overlap(state, &u);
    if c0.norm() > 0.0 {
        u.u[0] = u.u[0].with_phase(c0.arg());
    }
    let mut cf = CanonicalForm {
        lambda0: 0.0,
        lambda1: 0.0,
        lambda2: 0.0,
        lambda3: 0.0,
        lambda4: Complex64::new(0.0, 0.0),
        basis_u: u,
        basis_v: ProductTriple { u: u.u.map(|q| orthogonal_complement(&q)) },
    };
    let coefficient = |cf: &CanonicalForm, pattern: usize| overlap(state, &cf.basis_ket(pattern));

    for (pattern, ket) in CROSS_KETS {
        let magnitude = coefficient(&cf, pattern).norm();
        if magnitude > cross_tol {
            return Err(Error::NotStationary { ket, magnitude });
        }
    }

    let raw = [0b011, 0b101, 0b110, 0b111].map(|p| coefficient(&cf, p));
    let phases = raw.map(|c| (c.norm() >= PHASE_ZERO).then(|| c.arg()));
    let alpha = phase_knobs(phases);
    for k in 0..3 {
        cf.basis_v.u[k] = cf.basis_v.u[k].with_phase(alpha[k]);
    }

    let mut lambda4 = coefficient(&cf, 0b111);
    if !lambda4_in_half_plane(lambda4) {
        for k in 0..3 {
            cf.basis_v.u[k] = cf.basis_v.u[k].with_phase(std::f64::consts::PI);
        }
        lambda4 = coefficient(&cf, 0b111);
    }

    cf.lambda0 = coefficient(&cf, 0).norm();
    cf.lambda1 = coefficient(&cf, 0b011).norm();
    cf.lambda2 = coefficient(&cf, 0b101).norm();
    cf.lambda3 = coefficient(&cf, 0b110).norm();
    cf.lambda4 = lambda4;
    Ok(cf)
}

/// Canonical form at a stationary point of `state`.
pub fn build_canonical_form(state: &PureState3Q, triple: &ProductTriple) -> Result<CanonicalForm> {
    build_canonical_form_with_tol(state, triple, CROSS_TOL)
}

/// The form read off the computational basis, when `|000⟩` is stationary.
///
/// This is a reading of the amplitudes, not a decomposition: `|λ4| > λ0` is
/// allowed here and left for [`is_gsd`] to flag.
pub fn computational_form(state: &PureState3Q) -> Result<CanonicalForm> {
    build_unchecked(state, &ProductTriple::basis(0), CROSS_TOL)
}

/// `(λ0, λ1, λ2, λ3, Re λ4, Im λ4)`, if a form can be built at all.
pub(crate) fn coefficient_signature(state: &PureState3Q, triple: &ProductTriple) -> Option<[f64; 6]> {
    let cf = build_canonical_form_with_tol(state, triple, f64::INFINITY).ok()?;
    Some([cf.lambda0, cf.lambda1, cf.lambda2, cf.lambda3, cf.lambda4.re, cf.lambda4.im])
}

/// `Σ` coefficients × product kets.
pub fn reconstruct_state(cf: &CanonicalForm) -> PureState3Q {
    let terms = [
        (0b000, Complex64::new(cf.lambda0, 0.0)),
        (0b011, Complex64::new(cf.lambda1, 0.0)),
        (0b101, Complex64::new(cf.lambda2, 0.0)),
        (0b110, Complex64::new(cf.lambda3, 0.0)),
        (0b111, cf.lambda4),
    ];
    let mut amp = [Complex64::new(0.0, 0.0); 8];
    for (pattern, coeff) in terms {
        for (a, b) in amp.iter_mut().zip(cf.basis_ket(pattern).amplitudes()) {
            *a += coeff * b;
        }
    }
    PureState3Q::normalized(amp).map(|(s, _)| s).expect("canonical forms are non-zero")
}

/// `λ0² − λ1² − λ2² − λ3² − 2 λ1 λ2 λ3 / λ0`; non-negative iff the inequality holds.
pub fn schmidt_inequality_residual(lambda0: f64, lambda1: f64, lambda2: f64, lambda3: f64) -> Result<f64> {
    if !(lambda0 > 0.0) {
        return Err(Error::NonPositiveLambda0(lambda0));
    }
    Ok(lambda0 * lambda0 - lambda1 * lambda1 - lambda2 * lambda2 - lambda3 * lambda3
        - 2.0 * lambda1 * lambda2 * lambda3 / lambda0)
}

/// The real symmetric matrix bounding the second variation in tangent directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondVariationMatrix(pub Matrix3<f64>);

impl SecondVariationMatrix {
    pub fn from_coefficients(lambda0: f64, lambda1: f64, lambda2: f64, lambda3: f64) -> Self {
        #[rustfmt::skip]
        let m = Matrix3::new(
            lambda0, -lambda3, -lambda2,
            -lambda3, lambda0, -lambda1,
            -lambda2, -lambda1, lambda0,
        );
        SecondVariationMatrix(m)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `[tr A]² − tr(A²)`, twice the sum of principal 2×2 minors.
    pub fn pair_invariant(&self) -> f64 {
        self.trace().powi(2) - (self.0 * self.0).trace()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }
}

pub fn second_variation_matrix(cf: &CanonicalForm) -> SecondVariationMatrix {
    SecondVariationMatrix::from_coefficients(cf.lambda0, cf.lambda1, cf.lambda2, cf.lambda3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    NecessaryConditionsHold,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub trace: f64,
    pub pair_invariant: f64,
    pub determinant: f64,
    pub verdict: Positivity,
}

impl PositivityCheck {
    pub fn holds(&self) -> bool {
        self.verdict == Positivity::NecessaryConditionsHold
    }
}

/// `A ⪰ 0` via `tr A ≥ 0`, `[tr A]² − tr(A²) ≥ 0` and `det A ≥ 0`.
pub fn positivity_verdict(a: &SecondVariationMatrix) -> PositivityCheck {
    let (trace, pair_invariant, determinant) = (a.trace(), a.pair_invariant(), a.determinant());
    let ok = [trace, pair_invariant, determinant].iter().all(|&x| x >= -POSITIVITY_TOL);
    PositivityCheck {
        trace,
        pair_invariant,
        determinant,
        verdict: if ok { Positivity::NecessaryConditionsHold } else { Positivity::Fails },
    }
}

/// Second variation of `|⟨u1u2u3|ψ⟩|²` along `δu_k = d_k v_k`.
///
/// With `⟨δu_k|v_k⟩ = conj(d_k)`:
/// `−λ0² Σ|d_k|² + 2 λ0 Re(λ3 d̄1 d̄2 + λ2 d̄1 d̄3 + λ1 d̄2 d̄3)`.
pub fn tangent_hessian(cf: &CanonicalForm, d: [Complex64; 3]) -> f64 {
    let [d1, d2, d3] = d.map(|z| z.conj());
    let cross = d1 * d2 * cf.lambda3 + d1 * d3 * cf.lambda2 + d2 * d3 * cf.lambda1;
    let diag: f64 = d.iter().map(|z| z.norm_sqr()).sum();
    -cf.lambda0 * cf.lambda0 * diag + 2.0 * cf.lambda0 * cross.re
}

/// Moves each qubit along `cos t · u_k + sin t · ê_k v_k`.
pub fn tangent_curve(cf: &CanonicalForm, directions: [Complex64; 3], t: f64) -> ProductTriple {
    let mut out = cf.basis_u;
    for (k, d) in directions.iter().enumerate() {
        if d.norm() == 0.0 {
            continue;
        }
        let (u, v) = (cf.basis_u.u[k].components(), cf.basis_v.u[k].components());
        let e = d / d.norm() * t.sin();
        let c = t.cos();
        out.u[k] = QubitVector::normalized(u[0] * c + v[0] * e, u[1] * c + v[1] * e).expect("unit curve");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsdVerdict {
    pub inequality_ok: bool,
    pub lambda4_bound_ok: bool,
    pub global_max_ok: bool,
    pub overall: bool,
}

/// Verdict against a known maximal product overlap.
pub fn is_gsd_given_max(cf: &CanonicalForm, lambda_max: f64) -> GsdVerdict {
    let inequality_ok = schmidt_inequality_residual(cf.lambda0, cf.lambda1, cf.lambda2, cf.lambda3)
        .map(|r| r >= -INEQUALITY_TOL)
        .unwrap_or(false);
    let lambda4_bound_ok = cf.lambda0 >= cf.lambda4.norm() - LAMBDA4_TOL;
    let global_max_ok = (cf.lambda0 - lambda_max).abs() <= GLOBAL_MAX_TOL;
    GsdVerdict { inequality_ok, lambda4_bound_ok, global_max_ok, overall: inequality_ok && lambda4_bound_ok && global_max_ok }
}

/// Whether `cf` is the generalized Schmidt decomposition of `state`.
///
/// The first two flags are necessary conditions only; `global_max_ok` compares
/// against the multistart maximum.
pub fn is_gsd(state: &PureState3Q, cf: &CanonicalForm, config: &SolverConfig) -> Result<GsdVerdict> {
    let (lambda_max, _) = solver::maximal_product_overlap(state, config)?;
    Ok(is_gsd_given_max(cf, lambda_max))
}

pub(crate) struct PointClass {
    pub a_eigenvalues: Option<[f64; 3]>,
    pub kind: PointKind,
}

/// Second-order classification of a stationary point.
pub(crate) fn classify(state: &PureState3Q, triple: &ProductTriple) -> PointClass {
    match build_canonical_form(state, triple) {
        Ok(cf) => {
            let a = second_variation_matrix(&cf);
            let kind = if positivity_verdict(&a).holds() { PointKind::CandidateMax } else { PointKind::NotMax };
            PointClass { a_eigenvalues: Some(a.eigenvalues()), kind }
        }
        Err(_) => PointClass { a_eigenvalues: None, kind: PointKind::Undetermined },
    }
}
