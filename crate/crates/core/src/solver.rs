//! Stationary points of the product overlap `|⟨u1 u2 u3|ψ⟩|`.
//!
//! Each restart runs cyclic alternating updates `u_k ← ⟨u_j u_l|ψ⟩ / ‖·‖`
//! (a higher-order power iteration) until both the overlap increment and the
//! stationarity residual are small. Every update maximizes the overlap over
//! one qubit with the other two fixed, so `|overlap|` never decreases.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{self, PointClass};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::state::{contract_others, orthogonal_complement, overlap, ProductTriple, PureState3Q, Qubit, QubitVector};

/// Contractions with a smaller norm are treated as degenerate.
const ZERO_CONTRACTION: f64 = 1e-14;
/// Residual the deduplicated representatives are polished towards.
const POLISH_TARGET: f64 = 1e-14;
/// Polishing stops after this many sweeps without a new best residual.
const POLISH_PATIENCE: usize = 12;
/// Random re-seeds allowed per restart before it is abandoned.
const MAX_RESEEDS: usize = 64;
/// Tolerance on λ and on canonical coefficients for symmetry-orbit matching.
const ORBIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    CandidateMax,
    NotMax,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub triple: ProductTriple,
    /// `|⟨u1 u2 u3|ψ⟩|` at the point.
    pub lambda: f64,
    /// Largest deviation from the stationarity equations over the three qubits.
    pub residual: f64,
    /// Eigenvalues of the second-variation matrix, ascending.
    pub a_eigenvalues: Option<[f64; 3]>,
    pub kind: PointKind,
}

/// Result of a multistart search, sorted by `lambda` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySearch {
    pub points: Vec<StationaryPoint>,
    pub attempted: usize,
    pub converged: usize,
    /// Restarts that hit `max_sweeps` (or kept degenerating) without converging.
    pub discarded: usize,
}

impl StationarySearch {
    pub fn best(&self) -> &StationaryPoint {
        &self.points[0]
    }
}

/// Norm of the component of `⟨u_j u_l|ψ⟩` orthogonal to `u_k`, maximized over `k`.
///
/// Zero exactly when every contraction is parallel to the remaining vector,
/// which is the stationarity condition up to phases.
pub fn stationarity_residual(state: &PureState3Q, triple: &ProductTriple) -> f64 {
    Qubit::ALL
        .into_iter()
        .map(|k| {
            let chi = contract_others(state, triple, k);
            orthogonal_complement(triple.get(k)).inner_raw(chi).norm()
        })
        .fold(0.0, f64::max)
}

/// One cyclic update in place. On a vanishing contraction the triple keeps
/// the vectors updated so far and the offending qubit is reported.
fn sweep_in_place(state: &PureState3Q, triple: &mut ProductTriple) -> Result<f64> {
    for k in Qubit::ALL {
        let chi = contract_others(state, triple, k);
        let norm = (chi[0].norm_sqr() + chi[1].norm_sqr()).sqrt();
        if !(norm > ZERO_CONTRACTION) {
            return Err(Error::ZeroContraction { qubit: k.label() });
        }
        triple.set(k, QubitVector::normalized(chi[0], chi[1])?);
    }
    Ok(overlap(state, triple).norm())
}

/// One Gauss–Seidel sweep over qubits 1, 2, 3. Returns the updated triple and `|overlap|`.
pub fn power_sweep(state: &PureState3Q, triple: &ProductTriple) -> Result<(ProductTriple, f64)> {
    let mut next = *triple;
    let lambda = sweep_in_place(state, &mut next)?;
    Ok((next, lambda))
}

struct Converged {
    triple: ProductTriple,
    lambda: f64,
    residual: f64,
}

fn run_restart(state: &PureState3Q, start: ProductTriple, rng: &mut ChaCha8Rng, config: &SolverConfig) -> Option<Converged> {
    let mut triple = start;
    let mut lambda = overlap(state, &triple).norm();
    let mut reseeds = 0;
    for _ in 0..config.max_sweeps {
        match sweep_in_place(state, &mut triple) {
            Ok(next) => {
                let increment = next - lambda;
                lambda = next;
                if increment < config.tol_convergence {
                    let residual = stationarity_residual(state, &triple);
                    if residual <= config.tol_match {
                        return Some(Converged { triple, lambda, residual });
                    }
                }
            }
            Err(Error::ZeroContraction { qubit }) => {
                reseeds += 1;
                if reseeds > MAX_RESEEDS {
                    return None;
                }
                // The failed contraction does not involve qubit k itself.
                let (j, l) = Qubit::new(qubit).expect("solver reports valid qubits").others();
                triple.set(j, QubitVector::random(rng));
                triple.set(l, QubitVector::random(rng));
                lambda = overlap(state, &triple).norm();
            }
            Err(_) => return None,
        }
    }
    None
}

/// Extra sweeps on an accepted point until the residual bottoms out.
fn polish(state: &PureState3Q, point: Converged, max_sweeps: usize) -> Converged {
    let mut best = point;
    let mut current = best.triple;
    let mut stale = 0;
    for _ in 0..max_sweeps {
        if best.residual <= POLISH_TARGET || stale >= POLISH_PATIENCE {
            break;
        }
        let Ok(lambda) = sweep_in_place(state, &mut current) else { break };
        let residual = stationarity_residual(state, &current);
        if residual < best.residual {
            best = Converged { triple: current, lambda, residual };
            stale = 0;
        } else {
            stale += 1;
        }
    }
    best
}

/// Starting triples: the eight computational-basis product states, then
/// `n_restarts` seeded uniform draws.
fn starts(config: &SolverConfig) -> Vec<ProductTriple> {
    (0..8)
        .map(ProductTriple::basis)
        .chain((0..config.n_restarts).map(|i| ProductTriple::random(&mut restart_rng(config.rng_seed, 8 + i as u64))))
        .collect()
}

fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn rounded_components(t: &ProductTriple) -> [i64; 12] {
    let mut out = [0i64; 12];
    for (k, q) in t.u.iter().enumerate() {
        for (c, z) in q.components().iter().enumerate() {
            out[4 * k + 2 * c] = (z.re * 1e9).round() as i64;
            out[4 * k + 2 * c + 1] = (z.im * 1e9).round() as i64;
        }
    }
    out
}

fn order_points(a: &StationaryPoint, b: &StationaryPoint) -> Ordering {
    b.lambda
        .total_cmp(&a.lambda)
        .then_with(|| rounded_components(&a.triple).cmp(&rounded_components(&b.triple)))
}

/// All stationary points reached from the deterministic multistart.
pub fn find_stationary_points(state: &PureState3Q, config: &SolverConfig) -> Result<StationarySearch> {
    config.validate()?;
    let starts = starts(config);
    let attempted = starts.len();

    let results: Vec<Option<Converged>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, start)| {
            let mut rng = restart_rng(config.rng_seed, i as u64);
            run_restart(state, start, &mut rng, config)
        })
        .collect();
    let converged = results.iter().filter(|r| r.is_some()).count();
    if converged == 0 {
        return Err(Error::NoConvergence { attempted });
    }

    // Same point up to per-qubit phases.
    let fidelity_floor = 1.0 - config.tol_match;
    let mut reps: Vec<Converged> = Vec::new();
    for c in results.into_iter().flatten() {
        if !reps.iter().any(|r| r.triple.min_fidelity(&c.triple) > fidelity_floor) {
            reps.push(c);
        }
    }

    let polished: Vec<Converged> = reps.into_par_iter().map(|c| polish(state, c, config.max_sweeps)).collect();

    // Same orbit under a local-unitary symmetry of the state: identical
    // phase-fixed coefficients mean the two bases carry ψ into itself.
    let mut points: Vec<(StationaryPoint, Option<[f64; 6]>)> = Vec::new();
    for c in polished {
        let signature = canonical::coefficient_signature(state, &c.triple);
        let duplicate = points.iter().any(|(p, sig)| {
            p.triple.min_fidelity(&c.triple) > fidelity_floor
                || ((p.lambda - c.lambda).abs() <= ORBIT_TOL
                    && match (sig, &signature) {
                        (Some(a), Some(b)) => a.iter().zip(b).all(|(x, y)| (x - y).abs() <= ORBIT_TOL),
                        _ => false,
                    })
        });
        if duplicate {
            continue;
        }
        let PointClass { a_eigenvalues, kind } = canonical::classify(state, &c.triple);
        let point = StationaryPoint { triple: c.triple, lambda: c.lambda, residual: c.residual, a_eigenvalues, kind };
        points.push((point, signature));
    }

    let mut points: Vec<StationaryPoint> = points.into_iter().map(|(p, _)| p).collect();
    points.sort_by(order_points);
    Ok(StationarySearch { points, attempted, converged, discarded: attempted - converged })
}

/// `λ0(ψ) = max |⟨u1 u2 u3|ψ⟩|` and a product triple attaining it.
pub fn maximal_product_overlap(state: &PureState3Q, config: &SolverConfig) -> Result<(f64, ProductTriple)> {
    let search = find_stationary_points(state, config)?;
    let best = search.best();
    Ok((best.lambda, best.triple))
}
