//! k-Berezin transforms of radial operators and radial symbols.
//!
//! * [`profile`]: operator side, as a power series in `r²`.
//! * [`quadrature`]: symbol side, as an integral over the disk.
//! * [`kernel`]: eigenvalues of the Toeplitz iterate `T_{B_k(S)}`.
//! * [`checks`]: convergence sweeps and the Laplacian and commutation
//!   identities.

pub mod checks;
pub mod kernel;
pub mod profile;
pub mod quadrature;

pub use checks::*;
pub use kernel::{berezin_iterate_eigenvalues, IterateKernel, IterateOptions, IterateResult};
pub use profile::{berezin_of_radial_operator, BerezinProfile, ProfileOptions, R_MAX};
pub use quadrature::{berezin_of_radial_symbol, AngularRule, TabulatedTransform, TransformConfig};
