//! Inner sum of the `I_4` leading-term derivation versus its `n = 0` term.

use crate::specfun::{pfq, PfqParams};
use crate::{c, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Row {
    pub r: usize,
    /// Full inner sum.
    pub y: f64,
    /// Its `n = 0` term.
    pub y_a: f64,
}

impl Fig1Row {
    pub fn ratio(&self) -> f64 {
        self.y / self.y_a
    }
}

fn factorial(r: usize) -> f64 {
    (1..=r).map(|k| k as f64).product()
}

/// `Gamma(1/2 + r) / Gamma(1/2) = (1/2)_r`, exact in binary for moderate r.
fn half_pochhammer(r: usize) -> f64 {
    (0..r).map(|k| 0.5 + k as f64).product()
}

/// `4 Gamma(1/2 + r) / (sqrt(pi) (r!)^2) 4F3([1/3,2/3,-r,-r]; [5/6,7/6,1/2-r]; -1)`.
pub fn fig1_y(r: usize) -> Result<f64> {
    let rf = r as f64;
    let p = PfqParams::real(&[1.0 / 3.0, 2.0 / 3.0, -rf, -rf], &[5.0 / 6.0, 7.0 / 6.0, 0.5 - rf], c(-1.0))?;
    Ok(fig1_y_a(r)? * pfq(&p, 1e-16)?.value.re)
}

/// `Gamma(1/2) Gamma(2) Gamma(1/2 + r) / (Gamma(3/2) r!)^2`, i.e. `4 (1/2)_r / (r!)^2`.
pub fn fig1_y_a(r: usize) -> Result<f64> {
    Ok(4.0 * half_pochhammer(r) / factorial(r).powi(2))
}

/// Rows `r = 0..=r_max`.
pub fn fig1_table(r_max: usize) -> Result<Vec<Fig1Row>> {
    (0..=r_max).map(|r| Ok(Fig1Row { r, y: fig1_y(r)?, y_a: fig1_y_a(r)? })).collect()
}
