//! Closed-form analysis of `|w(a,b,c)⟩ = a|100⟩ + b|010⟩ + c|001⟩`.
//!
//! The stationarity equations have three trivial solutions (one qubit in `|1⟩`)
//! and, when `r_a, r_b, r_c ≥ 0`, a special one with overlap `abc/(2S)` where
//! `S` is the area of the triangle with sides `a, b, c`. The signs of
//! `r_a = b² + c² − a²` (and cyclic) select which solution is the maximum.
//!
//! Note the operative existence test is the sign of all three `r`'s, i.e. an
//! acute (or right) triangle; an obtuse triangle still satisfies the triangle
//! inequality but has no special solution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{ProductTriple, PureState3Q, QubitVector};

/// `|r| ≤ BOUNDARY_TOL` counts as a rule boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Triangles with `S ≤ DEGENERATE_AREA` are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WParams {
    a: f64,
    b: f64,
    c: f64,
}

impl WParams {
    /// Positive parameters with `a² + b² + c² = 1` within `1e-12`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::with_tolerance(a, b, c, 1e-12)
    }

    pub fn with_tolerance(a: f64, b: f64, c: f64, norm_tol: f64) -> Result<Self> {
        if ![a, b, c].iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidWParams(format!("a, b, c must be positive, got ({a}, {b}, {c})")));
        }
        let n2 = a * a + b * b + c * c;
        if (n2 - 1.0).abs() > norm_tol {
            return Err(Error::InvalidWParams(format!("a² + b² + c² = {n2}, expected 1")));
        }
        Ok(WParams { a, b, c })
    }

    /// Rescales positive parameters onto the unit sphere.
    pub fn renormalized(a: f64, b: f64, c: f64) -> Result<Self> {
        let n = (a * a + b * b + c * c).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidWParams("zero or non-finite parameters".into()));
        }
        Self::new(a / n, b / n, c / n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r_a(&self) -> f64 {
        self.b * self.b + self.c * self.c - self.a * self.a
    }

    pub fn r_b(&self) -> f64 {
        self.a * self.a + self.c * self.c - self.b * self.b
    }

    pub fn r_c(&self) -> f64 {
        self.a * self.a + self.b * self.b - self.c * self.c
    }

    /// `16 S²` by Heron's formula; negative when no triangle exists.
    pub fn sixteen_area_sq(&self) -> f64 {
        let (a2, b2, c2) = (self.a * self.a, self.b * self.b, self.c * self.c);
        2.0 * (a2 * b2 + b2 * c2 + a2 * c2) - a2 * a2 - b2 * b2 - c2 * c2
    }

    /// Area of the triangle `(a, b, c)` if the sides satisfy the triangle inequality.
    pub fn area(&self) -> Option<f64> {
        let x = self.sixteen_area_sq();
        (x >= 0.0).then(|| x.sqrt() / 4.0)
    }

    /// `r_a, r_b, r_c ≥ 0`.
    pub fn has_triangle(&self) -> bool {
        [self.r_a(), self.r_b(), self.r_c()].iter().all(|&r| r >= -BOUNDARY_TOL)
    }

    fn special_area(&self) -> Option<f64> {
        if !self.has_triangle() {
            return None;
        }
        self.area().filter(|&s| s > DEGENERATE_AREA)
    }
}

pub fn w_state(p: &WParams) -> PureState3Q {
    PureState3Q::from_real([0.0, p.c, p.b, 0.0, p.a, 0.0, 0.0, 0.0]).expect("normalized parameters")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WSolutionKind {
    /// Qubit `n` in `|1⟩`, the others in `|0⟩`.
    Trivial(u8),
    Special,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WSolution {
    pub kind: WSolutionKind,
    pub triple: ProductTriple,
    pub lambda: f64,
}

fn special_solution(p: &WParams) -> Option<WSolution> {
    let s = p.special_area()?;
    let (ra, rb, rc) = (p.r_a().max(0.0), p.r_b().max(0.0), p.r_c().max(0.0));
    let q = |x: f64, rx: f64, ry: f64, rz: f64| {
        QubitVector::from_real(x * (2.0 * rx).sqrt() / (4.0 * s), (ry * rz).sqrt() / (4.0 * s))
    };
    let triple = ProductTriple::new(q(p.a, ra, rb, rc).ok()?, q(p.b, rb, ra, rc).ok()?, q(p.c, rc, ra, rb).ok()?);
    Some(WSolution { kind: WSolutionKind::Special, triple, lambda: p.a * p.b * p.c / (2.0 * s) })
}

/// All closed-form stationary solutions, trivial ones first.
///
/// On a rule boundary the special solution coincides with a trivial one and
/// is dropped.
pub fn w_stationary_solutions(p: &WParams) -> Vec<WSolution> {
    let mut out: Vec<WSolution> = [(0b100, p.a), (0b010, p.b), (0b001, p.c)]
        .into_iter()
        .enumerate()
        .map(|(i, (flat, lambda))| WSolution {
            kind: WSolutionKind::Trivial(i as u8 + 1),
            triple: ProductTriple::basis(flat),
            lambda,
        })
        .collect();
    if let Some(special) = special_solution(p) {
        if !out.iter().any(|t| t.triple.min_fidelity(&special.triple) > 1.0 - 1e-10) {
            out.push(special);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WClassification {
    /// 1, 2 or 3 when `r_a`, `r_b` or `r_c` is negative, 4 otherwise.
    pub rule: u8,
    pub lambda0: f64,
    /// Some `r` vanishes, so rule 4 coincides with a trivial rule.
    pub boundary: bool,
}

pub fn w_classify(p: &WParams) -> WClassification {
    w_classify_with_tolerance(p, BOUNDARY_TOL)
}

pub fn w_classify_with_tolerance(p: &WParams, boundary_tol: f64) -> WClassification {
    let rs = [p.r_a(), p.r_b(), p.r_c()];
    let sides = [p.a, p.b, p.c];
    let boundary = rs.iter().any(|r| r.abs() <= boundary_tol);
    if !boundary {
        if let Some(i) = rs.iter().position(|&r| r < 0.0) {
            return WClassification { rule: i as u8 + 1, lambda0: sides[i], boundary: false };
        }
    }
    let lambda0 = match p.area() {
        Some(s) if s > DEGENERATE_AREA && p.has_triangle() => p.a * p.b * p.c / (2.0 * s),
        // On the boundary abc/2S equals the side opposite the vanishing r.
        _ => {
            let i = (0..3).min_by(|&i, &j| rs[i].abs().total_cmp(&rs[j].abs())).expect("three sides");
            sides[i]
        }
    };
    WClassification { rule: 4, lambda0, boundary }
}

/// `(λ0, λ1, λ2, λ3, λ4)` of a canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: Complex64,
}

impl Coefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.lambda0.powi(2) + self.lambda1.powi(2) + self.lambda2.powi(2) + self.lambda3.powi(2) + self.lambda4.norm_sqr()
    }
}

/// Coefficients of the canonical form for the applicable rule.
///
/// Trivial rules, with the ket association `λ1 ↔ |u1v2v3⟩`, `λ2 ↔ |v1u2v3⟩`,
/// `λ3 ↔ |v1v2u3⟩`: rule 1 gives `(a; 0, c, b; 0)`, rule 2 `(b; c, 0, a; 0)`,
/// rule 3 `(c; b, a, 0; 0)`. Rule 4 gives
/// `(abc/2S; a r_a/4S, b r_b/4S, c r_c/4S; i√(2 r_a r_b r_c)/4S)`.
pub fn w_canonical_coefficients(p: &WParams) -> Coefficients {
    trivial_or_special_coefficients(p, w_classify(p).rule)
}

fn trivial_or_special_coefficients(p: &WParams, rule: u8) -> Coefficients {
    let zero = Complex64::new(0.0, 0.0);
    let (a, b, c) = (p.a, p.b, p.c);
    match rule {
        1 => Coefficients { lambda0: a, lambda1: 0.0, lambda2: c, lambda3: b, lambda4: zero },
        2 => Coefficients { lambda0: b, lambda1: c, lambda2: 0.0, lambda3: a, lambda4: zero },
        3 => Coefficients { lambda0: c, lambda1: b, lambda2: a, lambda3: 0.0, lambda4: zero },
        _ => match p.special_area() {
            Some(s) => {
                let (ra, rb, rc) = (p.r_a().max(0.0), p.r_b().max(0.0), p.r_c().max(0.0));
                Coefficients {
                    lambda0: a * b * c / (2.0 * s),
                    lambda1: a * ra / (4.0 * s),
                    lambda2: b * rb / (4.0 * s),
                    lambda3: c * rc / (4.0 * s),
                    lambda4: Complex64::new(0.0, (2.0 * ra * rb * rc).sqrt() / (4.0 * s)),
                }
            }
            None => {
                let rs = [p.r_a(), p.r_b(), p.r_c()];
                let i = (0..3).min_by(|&i, &j| rs[i].abs().total_cmp(&rs[j].abs())).expect("three sides");
                trivial_or_special_coefficients(p, i as u8 + 1)
            }
        },
    }
}

/// `4(abc)² − (a r_a)² − (b r_b)² − (c r_c)² − r_a r_b r_c`.
///
/// Equals `16 S²` times the inequality residual of the rule-4 coefficients;
/// it vanishes identically on the whole acute region, so every special
/// W-family form saturates the inequality.
pub fn triangle_residual(p: &WParams) -> Result<f64> {
    if !p.has_triangle() {
        return Err(Error::NoTriangle);
    }
    let (a, b, c) = (p.a, p.b, p.c);
    let (ra, rb, rc) = (p.r_a(), p.r_b(), p.r_c());
    Ok(4.0 * (a * b * c).powi(2) - (a * ra).powi(2) - (b * rb).powi(2) - (c * rc).powi(2) - ra * rb * rc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{build_canonical_form, schmidt_inequality_residual};
    use crate::solver::stationarity_residual;
    use proptest::prelude::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn uniform() -> WParams {
        WParams::renormalized(1.0, 1.0, 1.0).unwrap()
    }

    fn obtuse() -> WParams {
        WParams::new(0.8, 0.27f64.sqrt(), 0.3).unwrap()
    }

    fn right() -> WParams {
        WParams::new(H, 0.5, 0.5).unwrap()
    }

    /// Positive octant of the unit sphere.
    fn sphere_point(theta: f64, phi: f64) -> WParams {
        WParams::renormalized(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()).unwrap()
    }

    #[test]
    fn state_amplitudes() {
        let s = w_state(&obtuse());
        let amp = s.amplitudes();
        assert!((amp[4].re - 0.8).abs() < 1e-15);
        assert!((amp[2].re - 0.519_615_242_270_663_2).abs() < 1e-15);
        assert!((amp[1].re - 0.3).abs() < 1e-15);
        let amp = *w_state(&right()).amplitudes();
        assert!((amp[4].re - H).abs() < 1e-15 && (amp[2].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(WParams::new(0.0, H, H).is_err());
        assert!(WParams::new(-0.5, 0.5, H).is_err());
        assert!(WParams::new(0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn uniform_has_four_solutions() {
        let sols = w_stationary_solutions(&uniform());
        assert_eq!(sols.len(), 4);
        let special = sols.iter().find(|s| s.kind == WSolutionKind::Special).unwrap();
        assert!((special.lambda - 2.0 / 3.0).abs() < 1e-15);
        // Heron: S = √3/12 for the equilateral triangle with side 1/√3.
        assert!((uniform().area().unwrap() - 3f64.sqrt() / 12.0).abs() < 1e-15);
    }

    #[test]
    fn obtuse_has_three_solutions() {
        let p = obtuse();
        assert!((p.r_a() + 0.28).abs() < 1e-15);
        // It is still a triangle in the ordinary sense.
        assert!(p.area().unwrap() > 0.0);
        assert_eq!(w_stationary_solutions(&p).len(), 3);
    }

    #[test]
    fn right_triangle_special_solution_merges() {
        let p = right();
        assert!(p.r_a().abs() < 1e-15);
        assert_eq!(w_stationary_solutions(&p).len(), 3);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(w_classify(&obtuse()), WClassification { rule: 1, lambda0: 0.8, boundary: false });
        let c = w_classify(&uniform());
        assert_eq!((c.rule, c.boundary), (4, false));
        assert!((c.lambda0 - 2.0 / 3.0).abs() < 1e-15);
        let c = w_classify(&right());
        assert_eq!((c.rule, c.boundary), (4, true));
        assert!((c.lambda0 - H).abs() < 1e-15);
    }

    #[test]
    fn canonical_coefficient_examples() {
        let k = w_canonical_coefficients(&uniform());
        assert!((k.lambda0 - 2.0 / 3.0).abs() < 1e-15);
        for l in [k.lambda1, k.lambda2, k.lambda3] {
            assert!((l - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((k.lambda4 - Complex64::new(0.0, 2f64.sqrt() / 3.0)).norm() < 1e-15);

        let k = w_canonical_coefficients(&obtuse());
        assert_eq!((k.lambda0, k.lambda1, k.lambda2, k.lambda3), (0.8, 0.0, 0.3, 0.27f64.sqrt()));
        assert_eq!(k.lambda4.norm(), 0.0);
    }

    #[test]
    fn triangle_residual_examples() {
        assert!(triangle_residual(&uniform()).unwrap().abs() < 1e-15);
        // Vanishes away from the symmetric point too.
        let r = triangle_residual(&WParams::new(0.6, 0.6, 0.28f64.sqrt()).unwrap()).unwrap();
        assert!(r.abs() < 1e-15, "{r}");
        assert!(triangle_residual(&right()).unwrap() >= -1e-15);
        assert!(matches!(triangle_residual(&obtuse()), Err(Error::NoTriangle)));
    }

    #[test]
    fn analytic_triples_are_stationary_and_match_pipeline() {
        for i in 1..30 {
            for j in 1..30 {
                let p = sphere_point(i as f64 * std::f64::consts::FRAC_PI_2 / 30.0, j as f64 * std::f64::consts::FRAC_PI_2 / 30.0);
                let s = w_state(&p);
                for sol in w_stationary_solutions(&p) {
                    assert!(stationarity_residual(&s, &sol.triple) <= 1e-10);
                    let cf = build_canonical_form(&s, &sol.triple).unwrap();
                    assert!((cf.lambda0 - sol.lambda).abs() < 1e-10);
                    let rule = match sol.kind {
                        WSolutionKind::Trivial(n) => n,
                        WSolutionKind::Special => 4,
                    };
                    let k = trivial_or_special_coefficients(&p, rule);
                    let got = [cf.lambda0, cf.lambda1, cf.lambda2, cf.lambda3];
                    let want = [k.lambda0, k.lambda1, k.lambda2, k.lambda3];
                    for (g, w) in got.iter().zip(want) {
                        assert!((g - w).abs() < 1e-10, "rule {rule} at {p:?}: {got:?} vs {want:?}");
                    }
                    assert!((cf.lambda4 - k.lambda4).norm() < 1e-10, "{} vs {}", cf.lambda4, k.lambda4);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn acute_identities(x in 1.0f64..2.0, y in 1.0f64..2.0, z in 1.0f64..2.0) {
            // squares in [1, 2) always form an acute triangle
            let p = WParams::renormalized(x.sqrt(), y.sqrt(), z.sqrt()).unwrap();
            prop_assert!(p.has_triangle() && p.special_area().is_some());
            let s16 = p.sixteen_area_sq();
            // unit-norm special vectors
            prop_assert!((2.0 * p.a() * p.a() * p.r_a() + p.r_b() * p.r_c() - s16).abs() < 1e-12);
            let k = w_canonical_coefficients(&p);
            prop_assert!((k.norm_sqr() - 1.0).abs() < 1e-10);
            let r = schmidt_inequality_residual(k.lambda0, k.lambda1, k.lambda2, k.lambda3).unwrap();
            prop_assert!(r >= -1e-12);
            let t = triangle_residual(&p).unwrap();
            prop_assert!((t - s16 * r).abs() < 1e-12);
            prop_assert!(t.abs() < 1e-12);
        }

        #[test]
        fn uniform_w_is_invariant_under_relabeling(x in 0.1f64..1.0, y in 0.1f64..1.0, z in 0.1f64..1.0) {
            let p = WParams::renormalized(x, y, z).unwrap();
            let q = WParams::renormalized(y, x, z).unwrap();
            prop_assert!((w_classify(&p).lambda0 - w_classify(&q).lambda0).abs() < 1e-14);
        }
    }
}
