//! Eigenvalue sequences of radial operators on the Bergman space of the unit
//! disk.
//!
//! A radial operator is diagonal in the monomial basis, so it is described
//! by its eigenvalue sequence `λ`. This crate works with finite windows of
//! such sequences: difference seminorms and the Hausdorff grid, the greedy
//! d1-to-d2 approximation, moment sequences of radial symbols, k-Berezin
//! transforms and their Toeplitz iterates, the invariant-Laplacian sequence
//! map, and essential-spectrum diagnostics.

pub mod approximation;
pub mod berezin;
pub mod binomial;
pub mod check;
pub mod error;
pub mod interp;
pub mod io;
pub mod laplacian;
pub mod moments;
pub mod quadrature;
pub mod sequences;
pub mod spectrum;
pub mod summation;
pub mod symbol;

pub use approximation::{
    choose_c, e_value, find_m, project_to_d2, verify_approximation, ApproximationAudit,
    ApproximationParams, ApproximationResult,
};
pub use berezin::{
    berezin_iterate_eigenvalues, berezin_of_radial_operator, berezin_of_radial_symbol,
    commutativity_check, convergence_report, laplacian_identity_check, BerezinProfile,
    ConvergenceReport, IterateOptions, ProfileOptions, TransformConfig,
};
pub use check::Clause;
pub use error::{Error, ErrorClass, Result};
pub use laplacian::{
    gamma_of_lambda, lambda_of_gamma, norm_equivalence_check, GammaSequence, Verdict,
};
pub use moments::{
    corollary_bounds_check, eigenvalues_of_symbol, lcon_constant, sup_norm_estimate,
};
pub use quadrature::QuadratureConfig;
pub use sequences::{
    d1_seminorm, d2_seminorm, difference, hausdorff_grid, hausdorff_value, seminorm_report,
    EigenvalueSequence, HausdorffGrid, Seminorm, SeminormReport,
};
pub use spectrum::{
    connectedness_check, limit_points, sequence_from_path, LimitPoints, SpectrumPath,
};
pub use symbol::{RadialFunction, RadialSymbol, SymbolKind};
