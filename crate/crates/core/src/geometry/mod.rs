//! Chebyshev centres of polytopes, covering numbers of finite spaces and the
//! grid comparison between rendezvous numbers and Chebyshev radii.

mod center;
mod cover;
mod szekeres;

pub use center::{chebyshev_center, BallSpec, CenterResult};
pub use cover::{
    covering_number, covering_number_of_points, covering_number_with_budget, entropy_lower_bound, CoverMode,
    CoveringResult, DEFAULT_COVER_BUDGET,
};
pub use szekeres::{
    hull_grid, hull_halfspaces, szekeres_check, szekeres_check_with_budget, SzekeresReport, DEFAULT_GRID_BUDGET,
};
