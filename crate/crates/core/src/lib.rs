//! Eigenvibrations of a string made of a stiff light part on `(a, 0)` and a
//! soft heavy part on `(0, b)`, with contrast parameter `eps`:
//!
//! ```text
//! (k u')' + eps lambda r u = 0       on (a, 0),  u(a) = 0
//! eps (kappa u')' + lambda rho u = 0  on (0, b),  u(b) = 0
//! u(-0) = u(+0),  k(0) u'(-0) = eps kappa(0) u'(+0)
//! ```
//!
//! The crate computes exact eigenpairs by shooting, the low-frequency
//! expansion `lambda ~ eps mu + eps² nu`, and the high-frequency WKB
//! approximation selected by a quantization condition, and compares them.

pub mod coeffs;
pub mod compare;
pub mod error;
pub mod exact;
pub mod expr;
pub mod highfreq;
pub mod lowfreq;
pub mod numkernel;
pub mod profile;
pub mod sturm;

pub use coeffs::{make_coefficient_set, parse_expr, CoefficientSet, ScalarField};
pub use compare::{
    comparison_table, convergence_study, figure_data, residual_norm, ComparisonRow, ConvergenceReport, FigureData,
    Pairing, Quantity, Residual,
};
pub use error::{Error, Result};
pub use exact::{eigenfunction, eigenvalue, shoot_miss, space_norm, ExactEigenpair, NormMode, ProblemInstance};
pub use highfreq::{
    admissible_frequency, beta0_of, build_wkb_frame, build_y, highfreq_approx, omega1_of, pencil_solve,
    quantization_residual, Degeneracy, HighFreqApprox, PencilSolution, SolvabilityData, WkbFrame,
};
pub use lowfreq::{lowfreq_prediction, LowFreqApprox};
pub use numkernel::Tolerances;
pub use profile::{Jet, PiecewiseFunction};
