//! Unit-sphere samples of `l_p` and sup-norm spaces, closed-form envelopes
//! for their Chebyshev constants, the experiments that compare the two, and
//! reference constants.

mod bounds;
mod constants;
mod experiments;
mod sphere;

pub use bounds::{
    default_eta, lp_bound_table, lp_lower_bound, lp_metric_lower_bound, lp_target, lp_upper_bound, LpBoundRow,
    LpBoundTable,
};
pub use constants::{named_constant, named_constants, sigma_complex, ConstantValue, NamedConstant};
pub use experiments::{
    entropy_growth_experiment, lp_experiment, sign_vectors, sphere_discretization, subspace_convergence,
    ConvergenceRow, DimRule, EntropyRow, LpExperiment, LpMeasuredRow, SubspaceConvergence, MAX_SIGN_DIM,
};
pub use sphere::{
    circle_points, configuration_potential, sphere_grid, sphere_random, witness_configuration,
    witness_configuration_with, SphereSample, SphereScheme, DEFAULT_SEED, NORMALIZATION_TOL,
};
