//! Reference states and an independent brute-force check of the maximal
//! product overlap.
//!
//! The grid oracle shares no code with the solver: it scans qubits 2 and 3 on
//! a `(θ, φ)` grid, maximizes qubit 1 in closed form, and refines the best
//! cells with its own alternating maximization.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{ProductTriple, PureState3Q, Qubit, QubitVector};

/// `λ0²` of the symmetric product state with `tan θ = 2` for `psi_contr`.
pub const PSI_CONTR_LOWER_SQ: f64 = 36.0 / 55.0;

/// Largest eigenvalue of the qubit-1 reduction of `psi_contr`, `(11 + √17)/22`.
pub fn psi_contr_upper_sq() -> f64 {
    (11.0 + 17f64.sqrt()) / 22.0
}

/// Often-quoted `λ0²` for `psi_contr`, `(14 + 3√2)/22`. It exceeds
/// [`psi_contr_upper_sq`] and so cannot be an overlap of that state.
pub fn psi_contr_quoted_sq() -> f64 {
    (14.0 + 3.0 * 2f64.sqrt()) / 22.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    Ghz,
    W,
    PsiContr,
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(NamedState::Ghz),
            "w" => Ok(NamedState::W),
            "psi_contr" | "psi-contr" => Ok(NamedState::PsiContr),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

impl NamedState {
    pub const ALL: [NamedState; 3] = [NamedState::Ghz, NamedState::W, NamedState::PsiContr];

    pub fn state(self) -> PureState3Q {
        let amp = match self {
            NamedState::Ghz => [1., 0., 0., 0., 0., 0., 0., 1.],
            NamedState::W => [0., 1., 1., 0., 1., 0., 0., 0.],
            NamedState::PsiContr => [2., 0., 0., 1., 0., 1., 1., 2.],
        };
        PureState3Q::from_real(amp).expect("non-zero amplitudes")
    }
}

pub fn named_state(name: &str) -> Result<PureState3Q> {
    Ok(name.parse::<NamedState>()?.state())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Alternating-maximization sweeps applied to each refined cell.
    pub refine_iters: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_theta: 48, n_phi: 48, refine_iters: 40 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 2 || self.n_phi < 2 || self.refine_iters < 2 {
            return Err(Error::InvalidGrid(format!("all grid sizes must be at least 2, got {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    /// `|⟨u1u2u3|ψ⟩|` at `triple`: a certified lower bound on `λ0`.
    pub lambda: f64,
    pub triple: ProductTriple,
}

type Tensor = [[[Complex64; 2]; 2]; 2];

fn tensor(state: &PureState3Q) -> Tensor {
    let mut t = [[[Complex64::new(0.0, 0.0); 2]; 2]; 2];
    for (flat, a) in state.amplitudes().iter().enumerate() {
        t[flat >> 2][(flat >> 1) & 1][flat & 1] = *a;
    }
    t
}

fn angles(theta: f64, phi: f64) -> [Complex64; 2] {
    [Complex64::new(theta.cos(), 0.0), Complex64::from_polar(theta.sin(), phi)]
}

fn norm2(x: [Complex64; 2]) -> f64 {
    (x[0].norm_sqr() + x[1].norm_sqr()).sqrt()
}

/// `⟨x|` on `slot` of a 3-index tensor, then `⟨y|` on the next free slot;
/// the result lives on the remaining slot.
fn partial(t: &Tensor, vecs: [Option<[Complex64; 2]>; 3]) -> [Complex64; 2] {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let idx = [i, j, k];
                let mut w = t[i][j][k];
                let mut free = 0;
                for s in 0..3 {
                    match vecs[s] {
                        Some(v) => w *= v[idx[s]].conj(),
                        None => free = idx[s],
                    }
                }
                out[free] += w;
            }
        }
    }
    out
}

fn refine(t: &Tensor, mut u: [[Complex64; 2]; 3], iters: usize) -> ([[Complex64; 2]; 3], f64) {
    let mut value = 0.0;
    for _ in 0..iters {
        for s in 0..3 {
            let mut vecs = u.map(Some);
            vecs[s] = None;
            let chi = partial(t, vecs);
            let n = norm2(chi);
            if n == 0.0 {
                break;
            }
            u[s] = [chi[0] / n, chi[1] / n];
            value = n;
        }
    }
    (u, value)
}

/// Grid maximization of `|⟨u1u2u3|ψ⟩|` followed by local refinement.
pub fn brute_force_overlap(state: &PureState3Q, grid: &GridSpec) -> Result<OracleEstimate> {
    grid.validate()?;
    let t = tensor(state);
    let thetas: Vec<f64> =
        (0..grid.n_theta).map(|i| i as f64 * std::f64::consts::FRAC_PI_2 / (grid.n_theta - 1) as f64).collect();
    let phis: Vec<f64> = (0..grid.n_phi).map(|i| i as f64 * std::f64::consts::TAU / grid.n_phi as f64).collect();
    let qubit: Vec<[Complex64; 2]> = thetas.iter().flat_map(|&th| phis.iter().map(move |&ph| angles(th, ph))).collect();

    // Best few cells, refined separately; neighbouring basins can differ by
    // less than the grid resolution.
    const KEEP: usize = 4;
    let mut best: Vec<(f64, usize, usize)> = Vec::with_capacity(KEEP + 1);
    for (i3, u3) in qubit.iter().enumerate() {
        // m[i][j] = Σ_k conj(u3_k) ψ_ijk
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = u3[0].conj() * t[i][j][0] + u3[1].conj() * t[i][j][1];
            }
        }
        for (i2, u2) in qubit.iter().enumerate() {
            let chi = [
                u2[0].conj() * m[0][0] + u2[1].conj() * m[0][1],
                u2[0].conj() * m[1][0] + u2[1].conj() * m[1][1],
            ];
            let v = norm2(chi);
            if best.len() < KEEP || v > best[best.len() - 1].0 {
                best.push((v, i2, i3));
                best.sort_by(|a, b| b.0.total_cmp(&a.0));
                best.truncate(KEEP);
            }
        }
    }

    let mut answer: Option<([[Complex64; 2]; 3], f64)> = None;
    for &(_, i2, i3) in &best {
        let (u2, u3) = (qubit[i2], qubit[i3]);
        let chi = partial(&t, [None, Some(u2), Some(u3)]);
        let n = norm2(chi);
        let u1 = if n > 0.0 { [chi[0] / n, chi[1] / n] } else { [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)] };
        let (u, value) = refine(&t, [u1, u2, u3], grid.refine_iters);
        if answer.as_ref().is_none_or(|a| value > a.1) {
            answer = Some((u, value));
        }
    }
    let (u, _) = answer.expect("grid is non-empty");
    let triple = ProductTriple { u: u.map(|q| QubitVector::normalized(q[0], q[1]).expect("unit vector")) };
    let lambda = crate::state::overlap(state, &triple).norm();
    Ok(OracleEstimate { lambda, triple })
}

/// Single-qubit reduced density matrix of qubit `k`.
pub fn reduced_density_matrix(state: &PureState3Q, k: Qubit) -> [[Complex64; 2]; 2] {
    let amp = state.amplitudes();
    let weight = 4 >> k.index();
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for flat in (0..8).filter(|f| f & weight == 0) {
        let pair = [amp[flat], amp[flat + weight]];
        for x in 0..2 {
            for y in 0..2 {
                rho[x][y] += pair[x] * pair[y].conj();
            }
        }
    }
    rho
}

/// Largest eigenvalue of the qubit-`k` reduction, an upper bound on `λ0²`.
pub fn reduced_density_bound(state: &PureState3Q, k: Qubit) -> f64 {
    let rho = reduced_density_matrix(state, k);
    let (p, q) = (rho[0][0].re, rho[1][1].re);
    0.5 * (p + q) + ((0.5 * (p - q)).powi(2) + rho[0][1].norm_sqr()).sqrt()
}

/// Smallest reduced-density bound over the three cuts.
pub fn min_cut_bound(state: &PureState3Q) -> f64 {
    Qubit::ALL.into_iter().map(|k| reduced_density_bound(state, k)).fold(f64::INFINITY, f64::min)
}

fn check_simple(lambda0: f64, lambda1: f64, lambda4: f64) -> Result<()> {
    if ![lambda0, lambda1, lambda4].iter().all(|&x| x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidCoefficients(format!("({lambda0}, {lambda1}, {lambda4}) must be non-negative")));
    }
    let n2 = lambda0 * lambda0 + lambda1 * lambda1 + lambda4 * lambda4;
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidCoefficients(format!("squares sum to {n2}, expected 1")));
    }
    Ok(())
}

/// `λ0|000⟩ + λ1|011⟩ + λ4|111⟩`.
pub fn psi_simple(lambda0: f64, lambda1: f64, lambda4: f64) -> Result<PureState3Q> {
    check_simple(lambda0, lambda1, lambda4)?;
    PureState3Q::from_real([lambda0, 0.0, 0.0, lambda1, 0.0, 0.0, 0.0, lambda4])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpleFamilyCheck {
    /// Overlap at `u1 ∝ λ1|0⟩ + λ4|1⟩`, `u2 = u3 = |1⟩`: `√(λ1² + λ4²)`.
    pub competing_lambda: f64,
    /// `λ0 ≥ competing_lambda`.
    pub valid: bool,
}

/// Tolerance on `λ0 ≥ √(λ1² + λ4²)`.
pub const SIMPLE_FAMILY_TOL: f64 = 1e-12;

pub fn simple_family_check(lambda0: f64, lambda1: f64, lambda4: f64) -> Result<SimpleFamilyCheck> {
    check_simple(lambda0, lambda1, lambda4)?;
    let competing_lambda = lambda1.hypot(lambda4);
    Ok(SimpleFamilyCheck { competing_lambda, valid: lambda0 >= competing_lambda - SIMPLE_FAMILY_TOL })
}

/// The competing stationary triple of the simple family.
pub fn simple_family_competitor(lambda1: f64, lambda4: f64) -> Result<ProductTriple> {
    Ok(ProductTriple::new(QubitVector::from_real(lambda1, lambda4)?, QubitVector::ONE_KET, QubitVector::ONE_KET))
}

/// Eight i.i.d. standard complex Gaussians, normalized.
pub fn haar_random_state(seed: u64) -> PureState3Q {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let amp: [Complex64; 8] =
            std::array::from_fn(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        if let Ok((s, _)) = PureState3Q::normalized(amp) {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::overlap;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn grid() -> GridSpec {
        GridSpec::default()
    }

    #[test]
    fn named_state_amplitudes() {
        let r11 = 11f64.sqrt();
        let want = [2., 0., 0., 1., 0., 1., 1., 2.].map(|x| x / r11);
        for (a, w) in named_state("psi_contr").unwrap().amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-16 && a.im == 0.0);
        }
        let ghz = named_state("ghz").unwrap();
        assert!((ghz.amplitudes()[0].re - H).abs() < 1e-15 && (ghz.amplitudes()[7].re - H).abs() < 1e-15);
        let w = named_state("W").unwrap();
        assert!([1, 2, 4].iter().all(|&i| (w.amplitudes()[i].re - 1.0 / 3f64.sqrt()).abs() < 1e-15));
        assert!(matches!(named_state("bell"), Err(Error::UnknownState(_))));
    }

    #[test]
    fn oracle_on_named_states() {
        let ghz = brute_force_overlap(&NamedState::Ghz.state(), &grid()).unwrap();
        assert!((ghz.lambda - H).abs() < 1e-8);
        let w = brute_force_overlap(&NamedState::W.state(), &grid()).unwrap();
        assert!((w.lambda - 2.0 / 3.0).abs() < 1e-8);
        let contr = brute_force_overlap(&NamedState::PsiContr.state(), &grid()).unwrap();
        let sq = contr.lambda.powi(2);
        assert!(sq >= PSI_CONTR_LOWER_SQ - 1e-12 && sq <= psi_contr_upper_sq(), "{sq}");
    }

    #[test]
    fn psi_contr_lower_bound_witness() {
        // (cos θ|0⟩ + sin θ|1⟩)^{⊗3} with tan θ = 2.
        let u = QubitVector::from_real(1.0, 2.0).unwrap();
        let o = overlap(&NamedState::PsiContr.state(), &ProductTriple::new(u, u, u));
        assert!((o.norm_sqr() - PSI_CONTR_LOWER_SQ).abs() < 1e-15);
        assert!(psi_contr_quoted_sq() > psi_contr_upper_sq());
    }

    #[test]
    fn reduced_bounds() {
        for k in Qubit::ALL {
            assert!((reduced_density_bound(&NamedState::Ghz.state(), k) - 0.5).abs() < 1e-15);
            assert!((reduced_density_bound(&NamedState::W.state(), k) - 2.0 / 3.0).abs() < 1e-15);
        }
        let b = reduced_density_bound(&NamedState::PsiContr.state(), Qubit::ONE);
        assert!((b - psi_contr_upper_sq()).abs() < 1e-15);
        let rho = reduced_density_matrix(&NamedState::PsiContr.state(), Qubit::ONE);
        assert!((rho[0][0].re - 5.0 / 11.0).abs() < 1e-15);
        assert!((rho[1][1].re - 6.0 / 11.0).abs() < 1e-15);
        assert!((rho[0][1].re - 2.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn psi_simple_layout() {
        let s = psi_simple(1.0, 0.0, 0.0).unwrap();
        assert_eq!(s.amplitudes()[0].re, 1.0);
        let s = psi_simple(0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()).unwrap();
        let nz: Vec<usize> = (0..8).filter(|&i| s.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nz, vec![0, 3, 7]);
        assert!(psi_simple(0.3f64.sqrt(), 0.5f64.sqrt(), 0.2f64.sqrt()).is_ok());
        assert!(psi_simple(0.5, 0.5, 0.5).is_err());
        assert!(psi_simple(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn simple_family_examples() {
        let c = simple_family_check(0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()).unwrap();
        assert!((c.competing_lambda - 0.5f64.sqrt()).abs() < 1e-15 && c.valid);
        let c = simple_family_check(0.6f64.sqrt(), 0.3f64.sqrt(), 0.1f64.sqrt()).unwrap();
        assert!((c.competing_lambda - 0.4f64.sqrt()).abs() < 1e-15 && c.valid);
        let c = simple_family_check(0.3f64.sqrt(), 0.5f64.sqrt(), 0.2f64.sqrt()).unwrap();
        assert!((c.competing_lambda - 0.7f64.sqrt()).abs() < 1e-15 && !c.valid);
    }

    #[test]
    fn simple_competitor_is_stationary() {
        let (l0, l1, l4) = (0.3f64.sqrt(), 0.5f64.sqrt(), 0.2f64.sqrt());
        let s = psi_simple(l0, l1, l4).unwrap();
        let t = simple_family_competitor(l1, l4).unwrap();
        assert!(crate::solver::stationarity_residual(&s, &t) < 1e-15);
        assert!((overlap(&s, &t).norm() - 0.7f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn haar_states_are_reproducible() {
        let a = haar_random_state(42);
        let b = haar_random_state(42);
        assert_eq!(a, b);
        let n: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
        assert!(a.fidelity(&haar_random_state(43)) < 1.0 - 1e-6);
    }

    #[test]
    fn grid_must_be_at_least_two() {
        let bad = GridSpec { n_theta: 1, ..GridSpec::default() };
        assert!(brute_force_overlap(&NamedState::W.state(), &bad).is_err());
    }
}
