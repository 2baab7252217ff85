//! Rendezvous numbers, Chebyshev constants and average intervals of finite
//! kernel spaces and discretized unit spheres.
//!
//! The crate has two independent routes to the same numbers:
//!
//! * [`chebyshev`] enumerates point multisets exactly and yields the `n`-th
//!   Chebyshev constants `M_n`, `M̄_n` and the rendezvous sets `[M_n, M̄_n]`;
//! * [`energy`] solves the finite zero-sum game whose payoff is the kernel
//!   matrix, yielding the quasi-uniform energies `q̲`, `q` with witness
//!   measures whose potentials certify both bounds.
//!
//! [`geometry`] adds Chebyshev centres and covering numbers, and [`spaces`]
//! builds sphere samples of `l_p` spaces together with the closed-form bound
//! envelopes and named constants used by the experiments.

pub mod chebyshev;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod measure;
pub mod space;
pub mod spaces;

pub use chebyshev::{
    cheb_n, limit_bracket, multiset_count, rendezvous_interval, rendezvous_set_n, ChebnResult, EnumOptions, LimitBracket,
    RendezvousInterval, DEFAULT_ENUM_BUDGET,
};
pub use energy::{
    average_interval, average_set_of_measure, game_value, invariant_measure, min_oscillation_measure, oscillation,
    potential, quasi_invariance_of, quasi_invariant_search, rationalize_measure, uniformize_measure, EqualWeightApprox,
    GameOptions, GameSolution, PotentialProfile, QuasiInvariant, Rationalized, SolveMethod,
};
pub use error::{Error, Result};
pub use geometry::{
    chebyshev_center, covering_number, entropy_lower_bound, szekeres_check, BallSpec, CenterResult, CoverMode,
    CoveringResult, SzekeresReport,
};
pub use measure::{DiscreteMeasure, Interval};
pub use space::{build_space, diameter, eval_kernel, FiniteKernelSpace, NormSpec, SpaceFile, SUBSET_H, SUBSET_L};
