//! The full pipeline: multistart search, canonical form at the best point,
//! verdicts and residuals.

use serde::{Deserialize, Serialize};

use crate::canonical::{
    build_canonical_form, computational_form, is_gsd_given_max, reconstruct_state, schmidt_inequality_residual,
    CanonicalForm, GsdVerdict,
};
use crate::config::SolverConfig;
use crate::error::Result;
use crate::solver::{find_stationary_points, stationarity_residual, PointKind, StationarySearch};
use crate::state::PureState3Q;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `λ0² − λ1² − λ2² − λ3² − 2λ1λ2λ3/λ0`.
    pub schmidt_inequality: f64,
    /// `1 − |⟨ψ|reconstructed⟩|²`.
    pub reconstruction_infidelity: f64,
    pub stationarity: f64,
}

/// The form read off the computational basis, judged against the computed maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiteralAssessment {
    pub form: CanonicalForm,
    pub verdict: GsdVerdict,
    pub schmidt_inequality: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub search: StationarySearch,
    pub gsd: CanonicalForm,
    pub verdict: GsdVerdict,
    pub residuals: Residuals,
    /// `None` when `|000⟩` is not a stationary point of the input.
    pub literal: Option<LiteralAssessment>,
    pub warnings: Vec<String>,
}

impl Decomposition {
    /// A valid GSD was found but the input, read literally, is not one.
    pub fn literal_rejected(&self) -> bool {
        self.verdict.overall && self.literal.is_some_and(|l| !l.verdict.overall)
    }
}

pub fn decompose(state: &PureState3Q, config: &SolverConfig) -> Result<Decomposition> {
    let search = find_stationary_points(state, config)?;
    let best = search.best().clone();
    let gsd = build_canonical_form(state, &best.triple)?;
    let verdict = is_gsd_given_max(&gsd, best.lambda);
    let residuals = Residuals {
        schmidt_inequality: schmidt_inequality_residual(gsd.lambda0, gsd.lambda1, gsd.lambda2, gsd.lambda3)?,
        reconstruction_infidelity: (1.0 - state.fidelity(&reconstruct_state(&gsd))).max(0.0),
        stationarity: stationarity_residual(state, &best.triple),
    };

    let mut warnings = Vec::new();
    if search.discarded > 0 {
        warnings.push(format!("{} of {} restarts did not converge", search.discarded, search.attempted));
    }
    if best.kind != PointKind::CandidateMax {
        warnings.push(format!("best stationary point is classified {:?}", best.kind));
    }
    if !verdict.overall {
        warnings.push("canonical form at the best point fails a necessary condition".to_string());
    }

    let literal = computational_form(state).ok().map(|form| LiteralAssessment {
        form,
        verdict: is_gsd_given_max(&form, best.lambda),
        schmidt_inequality: schmidt_inequality_residual(form.lambda0, form.lambda1, form.lambda2, form.lambda3).ok(),
    });
    if let Some(l) = &literal {
        if !l.verdict.global_max_ok {
            warnings.push(format!(
                "computational-basis form has lambda0 = {:.12}, below the maximal product overlap {:.12}",
                l.form.lambda0, best.lambda
            ));
        }
    }

    Ok(Decomposition { search, gsd, verdict, residuals, literal, warnings })
}
