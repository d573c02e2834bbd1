//! Operator calculus on finite-dimensional state spaces.
//!
//! The crate realizes, over dense complex matrices, the chain of
//! transforms linking first-order evolution equations to n-th order
//! ones: two-parameter evolution families `U(t,s)`, shifted logarithms
//! `Log(U + kappa I)` via Riesz-Dunford contour quadrature, the Riccati
//! recurrence generating the n-th order generator from the first-order
//! one, its product-of-logarithms factorizations, and the fractional
//! power exponential. Every identity ships with residual checks.
//!
//! All numerics are generic over the underlying real scalar (see
//! [`RealScalar`]); the `*64` aliases below fix `f64`, which every
//! default tolerance targets.

pub mod error;
pub mod evolution;
pub mod expr;
pub mod funcalc;
pub mod hierarchy;
pub mod io;
pub mod linalg;
pub mod logrep;
pub mod numeric;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{
    resolvent_estimate_check, EvConfig, EvolutionFamily, GeneratorFamily, Method,
    ResolventReport, ResolventSample, Structure, TimeGrid,
};
pub use expr::Expr;
pub use funcalc::{
    build_contour, principal_log, principal_root, riesz_dunford, CalcConfig, Contour,
    HoloFunction,
};
pub use hierarchy::{
    alt_log_product, compare_representations, factorize_product, hille_yosida_gen,
    log_product_representation, miura_second_order, recurrence_build, verify_nth_order,
    HierarchyReport, OperatorFamilySeq, Provenance, RepresentationComparison, TimeOpFamily,
};
pub use linalg::{
    eigen_oracle, operator_exp, resolvent, spectrum, CVector, Operator, OracleFunction,
    SpectrumInfo,
};
pub use logrep::{
    alt_generator, dt_alt_generator, dt_log_identity_check, nongroup_discrepancy,
    recover_generator_alt, recover_generator_original, select_kappa, similarity_consistency,
    DerivativeMode, ShiftedLog,
};
pub use scalar::{Cx, RealScalar};
pub use spectral::{
    example_residuals, fourier_diff_matrix, verify_operator_substitution, ExampleReport,
    ModeCheck, PDEScenario, PeriodicGrid, SubstitutionReport,
};

/// `f64`-backed operator; the configuration all tests and tools use.
pub type Operator64 = Operator<f64>;
/// `f32`-backed operator.
pub type Operator32 = Operator<f32>;
/// `f64`-backed state vector.
pub type CVector64 = CVector<f64>;
/// `f64` complex scalar.
pub type Cx64 = Cx<f64>;
/// `f64` calculus configuration.
pub type CalcConfig64 = CalcConfig<f64>;
