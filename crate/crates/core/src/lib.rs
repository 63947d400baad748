//! Time evolution of a particle bound by an attractive delta-function well
//! and driven by a uniform static field, in dimensionless units
//! (`hbar = m = V0 = 1`, bound state `psi_b(x) = exp(-|x|)`, `E_b = -1/2`).
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`] – complex special functions and hypergeometric series.
//! * [`interp`] – tables smooth in `sqrt(tau)`.
//! * [`quad`] – adaptive quadrature, endpoint-singular and Fresnel-type rules,
//!   ordered-simplex integration.
//! * [`kernels`] – free and field-dressed kernels, Moshinsky function,
//!   homogeneous solution, exact field-free propagator, gauge factors.
//! * [`lambda`] – the return-to-origin integrals `I_n(t)` (exact and
//!   leading-partial-wave forms), the kernel `Lambda_a`, and `K(0,t|0,0)`.
//! * [`dynamics`] – propagator and wavefunction assembly, bound-state
//!   amplitude, ionization probability and the exponential-decay reference.
//! * [`oracle`] – independent reference computations used for validation.
//! * [`fig1`] – the terminating-sum table comparing the exact inner sum of
//!   the `I_4` derivation against its leading term.

// NaN must fail the domain checks, hence `!(x > 0.0)`; tabulated constants keep all digits
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod fig1;
pub mod interp;
pub mod kernels;
pub mod lambda;
pub mod oracle;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// `sqrt(-1)`.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
