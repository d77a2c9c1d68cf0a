//! Fixtures shared by the benchmarks in `benches/`.

use gsd3::oracle::{haar_random_state, NamedState};
use gsd3::PureState3Q;

/// The named states plus a few seeded random ones.
pub fn fixtures() -> Vec<(String, PureState3Q)> {
    let mut out: Vec<(String, PureState3Q)> = NamedState::ALL
        .into_iter()
        .map(|s| (format!("{s:?}").to_lowercase(), s.state()))
        .collect();
    out.extend((0..3).map(|seed| (format!("haar{seed}"), haar_random_state(seed))));
    out
}
