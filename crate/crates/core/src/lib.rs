//! Numerical machinery for the fully fractional heat operator `(∂_t − Δ)^α`.
//!
//! The crate is `no_std` (it needs `alloc`). It provides
//!
//! * [`special`]: log-gamma, incomplete gamma, Gaussian ball masses and the
//!   closed-form constants (sharp constant `M(α,λ)`, Riesz constant `γ(n,α)`);
//! * [`kernels`]: the kernel family `Φ_{α,a,b}`, its Fourier symbol and norms;
//! * [`fields`]: the catalog of space-time functions (exact self-similar
//!   solutions, paraboloid powers, blow-up families, sampled grids);
//! * [`potentials`]: quadrature engines for `J_α`, `J_{α,a,b}`, the truncated
//!   potential `V_{α,Ω}`, Riemann–Liouville and Riesz potentials;
//! * [`inverse`]: the Marchaud-type approximate inverse `J_ε^{−α}`;
//! * [`analysis`]: region classification, sharp bounds, Picard iteration,
//!   subsolution verification, box norms, limit scans and verification suites.
//!
//! IO, file formats and the command line live in the companion `fracheat` crate.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::too_many_arguments)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod fields;
pub mod inverse;
pub mod kernels;
pub mod potentials;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use fields::{BlowupFamily, Field};
pub use kernels::KernelParams;
pub use potentials::{QuadratureSpec, SlabRegion};
pub use quad::Estimate;
pub use quad::SingularityMode;
