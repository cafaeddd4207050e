//! Bosonic quantum codes protecting against amplitude damping.
//!
//! Everything is exact: amplitudes are sums of square roots of rationals and
//! probabilities are polynomials in the loss parameter `γ`.

pub mod algebra;
pub mod catalog;
pub mod channel;
pub mod code;
pub mod construct;
pub mod criteria;
pub mod error;
pub mod fock;
pub mod linsolve;
pub mod metrics;
pub mod simulate;

pub use algebra::{GammaMonomial, GammaPolynomial, RadicalSum, Rational};
pub use catalog::{catalog, catalog_entry, CatalogEntry};
pub use channel::{damp, kraus_apply, Branch, ErrorPattern, MixedState, PureState};
pub use code::{parse_code, serialize_code, Code, Codeword, Row, Sign};
pub use construct::{
    build_t1_family, build_t2_pair, existence_min_n, solve_unbalanced_weights, OrbitCodeFamily, WeightSolveResult,
    WeightStatus,
};
pub use criteria::{
    check_moments, check_nondeformation, check_orthogonality, moment_table, distance_check, verify, CriteriaReport,
    MomentTable, Verdict, Verification,
};
pub use error::{Error, Result};
pub use fock::{OccupationVector, QcsSpace};
pub use metrics::{fidelity_poly, optimal_t, rate, FidelityResult, RateResult};
pub use simulate::{build_recovery, exact_success_probability, run_monte_carlo, RecoveryMap, SimulationResult};
