//! Numerical checks of convexity and of the inequalities behind it.

mod checks;
mod report;
mod smooth;
mod suite;

pub use checks::{
    check_boundary_infinity, check_directional_convexity, check_h_inequality, check_ip_properties, check_limits,
    check_mollify_convergence, check_monotonicity, check_subadditivity, check_subadditivity_ball,
    check_zero_continuity, default_quadrature,
};
pub use report::{VerificationReport, Witness};
pub use smooth::{
    check_det_inequality, check_prekopa_marginal, det_integrals, seeded_quadratic_exponentials, Partials, Smooth2DFn,
};
pub use suite::{default_suite, parse_suite, run_entry, run_suite, status_line, SuiteEntry};
