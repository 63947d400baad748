//! Complex special functions and hypergeometric series.

mod airy;
mod bessel;
mod erf;
mod gamma;
mod hyper;

pub use airy::{airy, airy_with_derivs, AiryValues};
pub use bessel::bessel_j;
pub use erf::{cerfc, erfcx, expint_half, faddeeva, repeated_erfc};
pub use gamma::{beta, gamma_c, gamma_r, is_nonpositive_integer, ln_gamma, pochhammer, recip_gamma};
pub use hyper::{multi_f, pfq, MultiFParams, PfqParams, MULTI_F_DEGREE_CAP, PFQ_TERM_CAP};

use num_complex::Complex64;

/// Result of summing a series: value plus how much of it we trust.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: Complex64,
    pub terms_used: usize,
    /// Magnitude of the last included term (or shell), a tail proxy.
    pub est_error: f64,
    pub converged: bool,
}

impl SeriesEval {
    pub fn exact(value: Complex64) -> Self {
        SeriesEval { value, terms_used: 0, est_error: 0.0, converged: true }
    }

    /// Multiply value and error estimate by a constant.
    pub fn scaled(mut self, k: Complex64) -> Self {
        self.value *= k;
        self.est_error *= k.norm();
        self
    }
}
