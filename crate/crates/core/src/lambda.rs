//! Return kernel `Lambda(tau) = delta(tau) + i K_f(tau) + sum_{n>=2} i^n I_n(tau)`
//! and the on-axis propagator `K(0,t|0,0)` built from the same terms.
//!
//! The delta part is never sampled; everything here is the smooth remainder.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;

use crate::interp::SqrtTable;
use crate::kernels::kf_origin;
use crate::quad::{integrate_1d_panels, oscillation_panels, QuadResult};
use crate::specfun::{bessel_j, beta, gamma_r, ln_gamma, multi_f, pfq, MultiFParams, PfqParams, SeriesEval};
use crate::{c, Complex64, Error, Result, I};

/// Default truncation order of the sum over `n`.
pub const DEFAULT_N_MAX: usize = 24;
/// Hard ceiling for the automatic extension of the `n` sum.
pub const N_HARD_CAP: usize = 400;
/// From this order on the power factor is formed from logarithms.
const LOG_POWER_FROM: usize = 60;
/// `f^2 t^3 / 24` above which the exact `I_3` is no longer used.
pub const EXACT_I3_LIMIT: f64 = 50.0;
/// Above this `|a|` the triple series is replaced by its one-dimensional integral.
const I3_SERIES_MAX: f64 = 12.0;
/// Above this `|z|` the 4F4 is evaluated through its Beta-integral representation.
const F44_SERIES_MAX: f64 = 8.0;

/// `1/(2i) e^{-5 i f^2 t^3/192} J_0(f^2 t^3/64)`.
pub fn i2(t: f64, f: f64) -> Complex64 {
    let b = f * f * t.powi(3);
    (-I * 5.0 * b / 192.0).exp() * bessel_j(0, b / 64.0) / (2.0 * I)
}

fn field_arg(t: f64, f: f64) -> Complex64 {
    c(f * f * t.powi(3) / 24.0) / I
}

/// `I_2` through the double hypergeometric series `F(a, a)`.
pub fn i2_exact_series(t: f64, f: f64, tol: f64) -> Result<SeriesEval> {
    let a = field_arg(t, f);
    let p = MultiFParams::symmetric(&[], &[1.0 / 3.0, 2.0 / 3.0, 1.0], &[1.0 / 6.0, 0.5, 5.0 / 6.0], &[], vec![a; 2])?;
    Ok(multi_f(&p, tol)?.scaled(1.0 / (2.0 * I)))
}

fn from_quad(q: QuadResult, tol: f64) -> SeriesEval {
    SeriesEval { value: q.value, terms_used: q.evaluations, est_error: q.est_error, converged: q.within(tol) }
}

/// `sqrt(t/(2 pi i^3))`, principal branch: `i^{-3/2} = e^{-3 i pi/4}`.
fn i3_prefactor(t: f64) -> Complex64 {
    Complex64::from_polar((t / (2.0 * PI)).sqrt(), -3.0 * FRAC_PI_4)
}

/// Exact `I_3`: triple series for moderate field, its theta integral beyond.
pub fn i3_exact(t: f64, f: f64, tol: f64) -> Result<SeriesEval> {
    let b = f * f * t.powi(3);
    if b / 24.0 > EXACT_I3_LIMIT {
        return Err(Error::Domain(format!("f^2 t^3/24 = {} exceeds {EXACT_I3_LIMIT}", b / 24.0)));
    }
    if b / 24.0 <= I3_SERIES_MAX {
        let a = field_arg(t, f);
        let p =
            MultiFParams::symmetric(&[], &[0.5, 5.0 / 6.0, 7.0 / 6.0], &[1.0 / 6.0, 0.5, 5.0 / 6.0], &[], vec![a; 3])?;
        return Ok(multi_f(&p, tol)?.scaled(i3_prefactor(t)));
    }
    let g = |th: f64| {
        let (s, co) = th.sin_cos();
        let (s6, c6) = (s.powi(6), co.powi(6));
        s * (-I * b / 192.0 * (8.0 * c6 + 5.0 * s6)).exp() * bessel_j(0, b * s6 / 64.0)
    };
    let q = integrate_1d_panels(g, 0.0, FRAC_PI_2, tol * 1e-2, oscillation_panels(b / 24.0))?;
    Ok(from_quad(q, tol).scaled(i3_prefactor(t)))
}

/// `F_l^(6)(z)` with the six upper and six lower parameters of the partial-wave form.
pub fn f6(l: i32, z: Complex64, tol: f64) -> Result<SeriesEval> {
    let s = 2.0 * l as f64 / 3.0;
    let upper = [1.0 / 3.0, 0.5, 0.5, 2.0 / 3.0, 5.0 / 6.0, 7.0 / 6.0];
    let lower = [0.5 - s, 0.5 + s, 5.0 / 6.0 - s, 5.0 / 6.0 + s, 7.0 / 6.0 - s, 7.0 / 6.0 + s];
    pfq(&PfqParams::real(&upper, &lower, z)?, tol)
}

/// `I_3` as a sum over partial waves `|l| <= l_max`.
pub fn i3_partial_wave(t: f64, f: f64, l_max: usize, tol: f64) -> Result<SeriesEval> {
    let b = f * f * t.powi(3);
    let z = I * b / 32.0;
    let mut acc = SeriesEval::exact(Complex64::new(0.0, 0.0));
    for l in 0..=l_max as i32 {
        let fl = f6(l, z, tol)?;
        // the -l wave equals the +l wave
        let mult = if l == 0 { 1.0 } else { 2.0 };
        let w = mult * I.powi(-l) * bessel_j(l, b / 64.0) / (1.0 - 16.0 * (l * l) as f64);
        acc.value += w * fl.value;
        acc.est_error += w.norm() * fl.est_error;
        acc.terms_used += fl.terms_used;
        acc.converged &= fl.converged;
    }
    Ok(acc.scaled(i3_prefactor(t) * (-I * 5.0 * b / 192.0).exp()))
}

/// `(t/(2i))^{n/2-1} / Gamma(n/2)` with explicit phase.
fn power_factor(n: usize, t: f64) -> Result<Complex64> {
    let h = n as f64 / 2.0;
    let m = h - 1.0;
    if n < LOG_POWER_FROM || t <= 0.0 {
        return Ok(Complex64::from_polar((t / 2.0).powf(m), -FRAC_PI_2 * m) / gamma_r(h)?);
    }
    // Gamma(n/2) and t^{n/2} overflow separately long before their ratio does
    let log_mag = m * (t / 2.0).ln() - ln_gamma(c(h))?.re;
    Ok(Complex64::from_polar(log_mag.exp(), -FRAC_PI_2 * m))
}

/// Closed-form field-free `I_n(t) = t^{n/2-1} / ((2i)^{n/2} Gamma(n/2))`.
pub fn field_free_in(n: usize, t: f64) -> Result<Complex64> {
    Ok(power_factor(n, t)? / (2.0 * I))
}

/// `4F4([1/2,(n-1)/6,(n+1)/6,(n+3)/6]; [1,n/6,(n+2)/6,(n+4)/6]; z)`, `z = 2ic`.
fn f44(n: usize, cc: f64, tol: f64) -> Result<SeriesEval> {
    let nf = n as f64;
    let z = I * 2.0 * cc;
    if z.norm() <= F44_SERIES_MAX {
        let upper = [0.5, (nf - 1.0) / 6.0, (nf + 1.0) / 6.0, (nf + 3.0) / 6.0];
        let lower = [1.0, nf / 6.0, (nf + 2.0) / 6.0, (nf + 4.0) / 6.0];
        return pfq(&PfqParams::real(&upper, &lower, z)?, tol);
    }
    // u = sin^2 theta in the Beta integral of e^{i c u^3} J_0(c u^3)
    let g = |th: f64| {
        let s = th.sin();
        let w = cc * s.powi(6);
        2.0 * s.powi(n as i32 - 2) * (I * w).exp() * bessel_j(0, w)
    };
    let q = integrate_1d_panels(g, 0.0, FRAC_PI_2, tol * 1e-2, oscillation_panels(2.0 * cc))?;
    Ok(from_quad(q, tol).scaled(c(1.0 / beta((nf - 1.0) / 2.0, 0.5))))
}

/// Leading-partial-wave approximation of `I_n`, `n >= 3`.
pub fn in_approx(n: usize, t: f64, f: f64, tol: f64) -> Result<SeriesEval> {
    if n < 3 {
        return Err(Error::Domain(format!("in_approx needs n >= 3 (got {n})")));
    }
    let cc = f * f * t.powi(3) / 64.0;
    Ok(f44(n, cc, tol)?.scaled(i2(t, f) * power_factor(n, t)?))
}

/// `I_n` from the one-dimensional recursion over `I_{2m}(t sin^2 phi)`.
/// Pure quadrature; `2 <= n <= 6`.
pub fn in_recursive_oracle(n: usize, t: f64, f: f64, tol: f64) -> Result<QuadResult> {
    if !(2..=6).contains(&n) {
        return Err(Error::Domain(format!("recursive oracle covers 2..=6 (got {n})")));
    }
    if n == 2 {
        return Ok(QuadResult { value: i2(t, f), est_error: 0.0, evaluations: 1 });
    }
    let b = f * f * t.powi(3);
    let inner = |tau: f64| -> Complex64 {
        if n <= 4 {
            i2(tau, f)
        } else {
            in_recursive_oracle(4, tau, f, tol * 1e-2).map(|q| q.value).unwrap_or(Complex64::new(f64::NAN, 0.0))
        }
    };
    let panels = oscillation_panels(b / 24.0);
    let q = if n % 2 == 1 {
        let g = |p: f64| {
            let (s, co) = p.sin_cos();
            s * (-I * b * co.powi(6) / 24.0).exp() * inner(t * s * s)
        };
        let pre = Complex64::from_polar((2.0 * t / PI).sqrt(), -FRAC_PI_4);
        let q = integrate_1d_panels(g, 0.0, FRAC_PI_2, tol, panels)?;
        QuadResult { value: pre * q.value, est_error: pre.norm() * q.est_error, ..q }
    } else {
        let g = |p: f64| {
            let (s, co) = p.sin_cos();
            let c6 = co.powi(6);
            (2.0 * p).sin() * (-I * 5.0 * b * c6 / 192.0).exp() * bessel_j(0, b * c6 / 64.0) * inner(t * s * s)
        };
        let pre = t / (2.0 * I);
        let q = integrate_1d_panels(g, 0.0, FRAC_PI_2, tol, panels)?;
        QuadResult { value: pre * q.value, est_error: pre.norm() * q.est_error, ..q }
    };
    if !q.value.is_finite() {
        return Err(Error::Quadrature("nested recursion produced a non-finite value".into()));
    }
    Ok(q)
}

/// Best available `I_n`: closed form for 2, exact `I_3` inside its range, approximation otherwise.
fn best_in(n: usize, t: f64, f: f64, tol: f64) -> Result<SeriesEval> {
    match n {
        2 => Ok(SeriesEval::exact(i2(t, f))),
        3 if f * f * t.powi(3) / 24.0 <= EXACT_I3_LIMIT => i3_exact(t, f, tol),
        _ => in_approx(n, t, f, tol),
    }
}

/// `R(t) = sum_{n>=2} i^n I_n(t)`, extended past `n_max` until two trailing
/// terms fall below `tol * max(1, |R|)`.
pub fn remainder_series(t: f64, f: f64, n_max: usize, tol: f64) -> Result<SeriesEval> {
    if n_max < 2 {
        return Err(Error::Domain(format!("n_max must be >= 2 (got {n_max})")));
    }
    let mut acc = SeriesEval::exact(Complex64::new(0.0, 0.0));
    let mut last = [f64::INFINITY; 2];
    let mut peak: f64 = 0.0;
    let mut n = 2;
    loop {
        let term = best_in(n, t, f, tol)?;
        let v = I.powi(n as i32) * term.value;
        acc.value += v;
        acc.est_error += term.est_error;
        acc.converged &= term.converged;
        last = [last[1], v.norm()];
        peak = peak.max(v.norm());
        acc.terms_used = n;
        let small = last.iter().all(|&m| m < tol * acc.value.norm().max(1.0));
        if n >= n_max && small {
            break;
        }
        if n >= N_HARD_CAP {
            acc.converged = false;
            break;
        }
        n += 1;
    }
    // large alternating terms leave rounding noise of order peak * eps
    let rounding = peak * f64::EPSILON * acc.terms_used as f64;
    acc.est_error += last[1] + rounding;
    if rounding > tol * acc.value.norm().max(1.0) {
        acc.converged = false;
    }
    Ok(acc)
}

/// `K_f(0,t|0,0) = K_f(t) + sum_{n>=2} i^{n-1} I_n(t)`.
pub fn k00(t: f64, f: f64, n_max: usize, tol: f64) -> Result<SeriesEval> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("k00 needs t > 0 (got {t})")));
    }
    let r = remainder_series(t, f, n_max, tol)?;
    let kf = kf_origin(t, f);
    Ok(SeriesEval { value: kf - I * r.value, ..r })
}

/// Sampled smooth part of the return kernel.
#[derive(Debug, Clone)]
pub struct LambdaProfile {
    pub f: f64,
    pub grid: Vec<f64>,
    /// `i K_f(tau) + R(tau)` at each grid point.
    pub smooth_values: Vec<Complex64>,
    /// Largest `n` reached by the sum at any grid point.
    pub n_max: usize,
    pub diagnostics: Vec<SeriesEval>,
    remainder: SqrtTable,
}

/// Sample the smooth part of the return kernel on `grid`.
pub fn lambda_a(grid: &[f64], f: f64, n_max: usize, tol: f64) -> Result<LambdaProfile> {
    if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("lambda grid must be positive and strictly increasing".into()));
    }
    let diagnostics = grid.par_iter().map(|&t| remainder_series(t, f, n_max, tol)).collect::<Result<Vec<_>>>()?;
    let remainder: Vec<Complex64> = diagnostics.iter().map(|d| d.value).collect();
    let smooth_values: Vec<Complex64> = grid.iter().zip(&remainder).map(|(&t, &r)| I * kf_origin(t, f) + r).collect();
    if smooth_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("non-finite value in lambda profile".into()));
    }
    let n_used = diagnostics.iter().map(|d| d.terms_used).max().unwrap_or(n_max);
    // R(0) = i^2 I_2(0) = i/2
    let remainder = SqrtTable::new(I * 0.5, grid, remainder)?;
    Ok(LambdaProfile { f, grid: grid.to_vec(), smooth_values, n_max: n_used, diagnostics, remainder })
}

impl LambdaProfile {
    /// Profile on `points` nodes uniform in `sqrt(tau)` over `(0, t_max]`.
    pub fn sqrt_uniform(t_max: f64, points: usize, f: f64, n_max: usize, tol: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::Domain(format!("profile needs t_max > 0 (got {t_max})")));
        }
        lambda_a(&SqrtTable::sqrt_uniform_grid(t_max, points), f, n_max, tol)
    }

    pub fn t_max(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    pub fn converged(&self) -> bool {
        self.diagnostics.iter().all(|d| d.converged)
    }

    /// Interpolated `R(tau)` (local Lagrange in `sqrt(tau)`).
    pub fn remainder_at(&self, tau: f64) -> Result<Complex64> {
        self.remainder.eval(tau)
    }

    /// Smooth part `i K_f(tau) + R(tau)`, `tau > 0`.
    pub fn smooth_at(&self, tau: f64) -> Result<Complex64> {
        Ok(I * kf_origin(tau, self.f) + self.remainder_at(tau)?)
    }
}
