//! Independent reference computations. Everything here is quadrature or a
//! time-marching scheme; none of it touches the hypergeometric series.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
use std::fmt;

use crate::kernels::{kf_origin, phi_f, BoundState};
use crate::quad::{
    integrate_1d, integrate_1d_panels, integrate_sqrt_ends, oscillation_panels, simplex_integrate, QuadResult,
    SimplexSpec,
};
use crate::specfun::{airy, beta, gamma_r};
use crate::{c, Complex64, Error, Result, I};

/// `I_n(t)` by direct quadrature over the ordered times `t > tau_1 > ... > tau_{n-1} > 0`.
pub fn in_bruteforce(n: usize, t: f64, f: f64, tol: f64) -> Result<QuadResult> {
    if !(2..=5).contains(&n) {
        return Err(Error::Domain(format!("brute-force oracle covers 2..=5 (got {n})")));
    }
    let integrand = |taus: &[f64]| {
        let mut prev = t;
        let mut prod = c(1.0);
        for &tau in taus {
            prod *= kf_origin(prev - tau, f);
            prev = tau;
        }
        prod * kf_origin(prev, f)
    };
    let spec = SimplexSpec::new(n - 1, t, integrand)?.with_panels(oscillation_panels(f * f * t.powi(3) / 24.0));
    simplex_integrate(&spec, tol)
}

/// `int e^{-|x|} phi_f(x, t) dx` by quadrature in `x`.
pub fn overlap_quadrature(t: f64, f: f64, tol: f64) -> Result<Complex64> {
    let g = |x: f64| BoundState.psi(x) * phi_f(x, t, f).unwrap_or(Complex64::new(f64::NAN, 0.0));
    // e^{-40} is below any tolerance we use
    let panels = oscillation_panels(40.0 * (f * t).abs()).max(8);
    let left = integrate_1d_panels(g, -40.0, 0.0, tol, panels)?;
    let right = integrate_1d_panels(g, 0.0, 40.0, tol, panels)?;
    Ok(left.value + right.value)
}

/// Solution of `psi(0,t) = phi_f(0,t) + i int_0^t K_f(0,0;t-tau) psi(0,tau) dtau`.
#[derive(Debug, Clone)]
pub struct VolterraSolution {
    pub f: f64,
    pub h: f64,
    /// `psi(0, k h)`.
    pub values: Vec<Complex64>,
    /// Nominal convergence order of the product-integration rule.
    pub order: f64,
    // phi_f(0, k h), reused for the bound amplitude
    forcing: Vec<Complex64>,
}

/// Product-integration weights of `s^{-1/2}` against the two hat functions on
/// `[(k-1), k]`, in units of `sqrt(h)`, factored to avoid cancellation.
fn hat_weights(k: usize) -> (f64, f64) {
    let kf = k as f64;
    let (r1, r0) = (kf.sqrt(), (kf - 1.0).sqrt());
    let d = 1.0 / (r1 + r0);
    let a = 2.0 / 3.0 * d * d * (r1 + 2.0 * r0);
    let b = 2.0 / 3.0 * d * d * (2.0 * r1 + r0);
    (a, b)
}

/// March the on-axis integral equation with step `h` up to `t_max`.
pub fn volterra_solve(t_max: f64, h: f64, f: f64) -> Result<VolterraSolution> {
    if !(h > 0.0) || !(t_max >= 0.0) || t_max / h > 1e6 {
        return Err(Error::Domain(format!("volterra step h = {h} for t_max = {t_max}")));
    }
    let pre = Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), -FRAC_PI_4) * h.sqrt();
    let (_, b1) = hat_weights(1);
    let diag = 1.0 - I * pre * b1;
    // the implicit step divides by this; keep it away from zero
    if diag.norm() < 0.5 {
        return Err(Error::Domain(format!("volterra step h = {h} too large")));
    }
    let n = (t_max / h).round() as usize;
    let weights: Vec<(f64, f64)> = (0..=n + 1).map(|k| if k == 0 { (0.0, 0.0) } else { hat_weights(k) }).collect();
    let phase: Vec<Complex64> = (0..=n).map(|k| (-I * f * f * (k as f64 * h).powi(3) / 24.0).exp()).collect();
    let forcing: Vec<Complex64> = (0..=n).map(|k| phi_f(0.0, k as f64 * h, f)).collect::<Result<_>>()?;
    let mut psi = Vec::with_capacity(n + 1);
    psi.push(forcing[0]);
    for m in 1..=n {
        let hist: Complex64 = (0..m)
            .map(|j| {
                let k = m - j;
                let w = weights[k].0 + if j > 0 { weights[k + 1].1 } else { 0.0 };
                w * phase[k] * psi[j]
            })
            .sum();
        psi.push((forcing[m] + I * pre * hist) / diag);
    }
    Ok(VolterraSolution { f, h, values: psi, order: 1.5, forcing })
}

impl VolterraSolution {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| k as f64 * self.h)
    }

    /// Bound-state amplitude `int psi_b psi dx` at node `m`:
    /// `overlap(t) + i int_0^t phi_f(0, t - tau) psi(0, tau) dtau` (trapezoid).
    pub fn bound_amplitude(&self, m: usize, tol: f64) -> Result<Complex64> {
        if m >= self.values.len() {
            return Err(Error::ProfileRange { t: m as f64 * self.h, max: (self.values.len() - 1) as f64 * self.h });
        }
        let t = m as f64 * self.h;
        let direct = overlap_quadrature(t, self.f, tol)?;
        if m == 0 {
            return Ok(direct);
        }
        let inner: Complex64 = (0..=m)
            .map(|j| {
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                w * self.forcing[m - j] * self.values[j]
            })
            .sum();
        Ok(direct + I * self.h * inner)
    }
}

/// `Ai(z)` and `Ci(z) = Bi(z) + i Ai(z)`.
fn ai_ci(z: Complex64) -> Result<(Complex64, Complex64)> {
    let (ai, bi) = airy(z)?;
    Ok((ai, bi + I * ai))
}

/// Frequency-domain Green function of the field kernel, complex `omega` allowed.
pub fn green_airy_complex(x: f64, xp: f64, omega: Complex64, f: f64) -> Result<Complex64> {
    if f == 0.0 {
        return Err(Error::Domain("green_airy needs f != 0".into()));
    }
    let af = f.abs();
    let alpha = (af / 4.0).cbrt() * (x - xp).abs();
    let beta_ = -(2.0 * af).powf(-2.0 / 3.0) * (f * (x + xp) + 2.0 * omega);
    let (ai, _) = ai_ci(beta_ + alpha)?;
    let (_, ci) = ai_ci(beta_ - alpha)?;
    Ok((4.0 / af).cbrt() * (PI / I) * ai * ci)
}

/// `int_0^inf K_f(x,x';t) e^{i omega t} dt` in Airy form.
pub fn green_airy(x: f64, xp: f64, omega: f64, f: f64) -> Result<Complex64> {
    green_airy_complex(x, xp, c(omega), f)
}

/// `int_0^inf K_f(x,x';t) e^{(i omega - eta) t} dt` by quadrature along
/// `t = r e^{-i pi/6}`, where the cubic phase turns into decay.
pub fn green_numeric(x: f64, xp: f64, omega: f64, f: f64, eta: f64, tol: f64) -> Result<Complex64> {
    if f == 0.0 {
        return Err(Error::Domain("green_numeric needs f != 0".into()));
    }
    let rot = Complex64::from_polar(1.0, -FRAC_PI_6);
    let d2 = (x - xp).powi(2);
    let integrand = |u: f64| {
        // r = u^2 removes the 1/sqrt(r) endpoint
        let r = u * u;
        let t = r * rot;
        let phase =
            I * d2 / (2.0 * t) + I * f * (x + xp) * t / 2.0 - I * f * f * t.powi(3) / 24.0 + (I * omega - eta) * t;
        let pre = (2.0 * PI * I * t).sqrt().inv();
        if r == 0.0 {
            return c(0.0);
        }
        pre * phase.exp() * rot * 2.0 * u
    };
    // decay e^{-f^2 r^3/24} must beat the growth e^{|omega| r / 2} plus a margin
    let mut r_max = 1.0_f64;
    while f * f * r_max.powi(3) / 24.0 - (omega.abs() + (f * (x + xp)).abs()) * r_max < 45.0 {
        r_max *= 1.25;
    }
    let u_max = r_max.sqrt();
    let q = integrate_1d_panels(integrand, 0.0, u_max, tol, 16 + (u_max * 4.0) as usize)?;
    Ok(q.value)
}

/// The two-point linear extrapolation `2 G(eta/2) - G(eta)` together with both samples.
pub fn green_extrapolated(x: f64, xp: f64, omega: f64, f: f64, eta: f64, tol: f64) -> Result<[Complex64; 3]> {
    let g1 = green_numeric(x, xp, omega, f, eta, tol)?;
    let g2 = green_numeric(x, xp, omega, f, eta / 2.0, tol)?;
    Ok([g1, g2, 2.0 * g2 - g1])
}

/// Pole of `G / (1 - i G)` at the origin: complex root of `1 - i G(0,0;omega)`,
/// secant iteration from `start`.
pub fn resonance(f: f64, start: Complex64) -> Result<Complex64> {
    let h = |w: Complex64| -> Result<Complex64> { Ok(1.0 - I * green_airy_complex(0.0, 0.0, w, f)?) };
    let (mut w0, mut w1) = (start, start + 1e-3);
    let (mut h0, mut h1) = (h(w0)?, h(w1)?);
    for _ in 0..100 {
        let dh = h1 - h0;
        if dh.norm() == 0.0 {
            break;
        }
        let w2 = w1 - h1 * (w1 - w0) / dh;
        if (w2 - w1).norm() < 1e-15 * w2.norm().max(1.0) {
            return Ok(w2);
        }
        (w0, h0) = (w1, h1);
        w1 = w2;
        h1 = h(w1)?;
    }
    if h1.norm() < 1e-12 {
        Ok(w1)
    } else {
        Err(Error::Convergence(format!("resonance search stalled at {w1}")))
    }
}

/// Inner `n` sum of the `I_4` derivation summed term by term:
/// `sum_{n=0}^r Gamma(1/2+n) Gamma(2+6n) Gamma(1/2+r-n) / {Gamma(3/2+3n) Gamma(1+r-n) n!}^2 64^{-n}`.
pub fn fig1_direct_sum(r: usize) -> Result<f64> {
    (0..=r).try_fold(0.0, |acc, n| {
        let (nf, m) = (n as f64, (r - n) as f64);
        let num = gamma_r(0.5 + nf)? * gamma_r(2.0 + 6.0 * nf)? * gamma_r(0.5 + m)?;
        let den = gamma_r(1.5 + 3.0 * nf)? * gamma_r(1.0 + m)? * gamma_r(1.0 + nf)?;
        Ok(acc + num / (den * den) * 64f64.powi(-(n as i32)))
    })
}

/// One line of the identity report.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub pass: bool,
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "{:<28} lhs={:.15e} rhs={:.15e} residual={:.3e} {}",
            self.name,
            self.lhs.re,
            self.rhs.re,
            self.residual,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

pub const IDENTITY_TOL: f64 = 1e-10;

fn check(name: &str, lhs: Complex64, rhs: Complex64) -> IdentityCheck {
    let residual = (lhs - rhs).norm() / rhs.norm().max(1e-300);
    IdentityCheck { name: name.into(), lhs, rhs, residual, pass: residual <= IDENTITY_TOL }
}

/// Quadrature checks of the Beta, Dirichlet and trigonometric-power identities.
pub fn identity_checks() -> Result<Vec<IdentityCheck>> {
    let tol = 1e-13;
    let mut out = Vec::new();

    for (a, b) in [(0.5, 0.5), (0.5, 3.5)] {
        let q = integrate_sqrt_ends(|u| c(u.powf(a - 1.0) * (1.0 - u).powf(b - 1.0)), 0.0, 1.0, tol, 1)?;
        out.push(check(&format!("beta({a},{b})"), q.value, c(beta(a, b))));
    }

    let (al, be, ga) = (0.5, 0.5, 1.5);
    let spec = SimplexSpec::new(2, 1.0, |tau: &[f64]| {
        c((1.0 - tau[0]).powf(ga - 1.0) * (tau[0] - tau[1]).powf(be - 1.0) * tau[1].powf(al - 1.0))
    })?;
    let q = simplex_integrate(&spec, tol)?;
    let rhs = gamma_r(al)? * gamma_r(be)? * gamma_r(ga)? / gamma_r(al + be + ga)?;
    out.push(check("dirichlet(0.5,0.5,1.5)", q.value, c(rhs)));

    for (p, l) in [(1.0, 0.0), (7.0, 1.0)] {
        let q = integrate_1d(|th| c(th.sin().powf(p) * (4.0 * l * th).cos()), 0.0, FRAC_PI_2, tol)?;
        let rhs = PI * gamma_r(p + 1.0)?
            / (2f64.powf(p + 1.0) * gamma_r(1.0 + 2.0 * l + p / 2.0)? * gamma_r(1.0 - 2.0 * l + p / 2.0)?);
        out.push(check(&format!("trig_power(p={p},l={l})"), q.value, c(rhs)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{field_free_in, i2};

    #[test]
    fn bruteforce_i2() {
        let q = in_bruteforce(2, 1.0, 1.0, 1e-13).unwrap();
        assert!((q.value - i2(1.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn bruteforce_field_free_i3() {
        let q = in_bruteforce(3, 1.0, 0.0, 1e-11).unwrap();
        assert!((q.value - field_free_in(3, 1.0).unwrap()).norm() < 1e-9, "{}", q.value);
    }

    #[test]
    fn hat_weights_integrate_the_weight() {
        // a_k + b_k = int_{k-1}^k s^{-1/2} ds
        for k in [1usize, 2, 10, 1000, 100000] {
            let (a, b) = hat_weights(k);
            let exact = 2.0 / ((k as f64).sqrt() + (k as f64 - 1.0).sqrt());
            assert!((a + b - exact).abs() < 1e-14 * exact.max(1e-3), "k={k}");
        }
        assert_eq!(hat_weights(1), (2.0 / 3.0, 4.0 / 3.0));
    }

    #[test]
    fn volterra_field_free_is_stationary() {
        let s = volterra_solve(5.0, 1e-3, 0.0).unwrap();
        assert_eq!(s.values[0], c(1.0));
        let worst = s.values.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 5e-4, "{worst}");
    }

    #[test]
    fn green_matches_reference() {
        // contour-rotated quadrature at 20 digits
        let g = green_airy(0.3, -0.1, 0.5, 1.0).unwrap();
        assert!((g - Complex64::new(1.272_895_826_239_733_5, -0.235_965_801_029_148_56)).norm() < 1e-10);
        let g = green_airy(0.3, -0.1, 0.5, -1.0).unwrap();
        assert!((g - Complex64::new(1.084_010_408_662_501_4, -0.511_101_981_212_867_4)).norm() < 1e-10);
        assert_eq!(green_airy(0.3, -0.1, 0.5, 1.0).unwrap(), green_airy(-0.1, 0.3, 0.5, 1.0).unwrap());
    }

    #[test]
    fn green_numeric_without_damping_matches() {
        let g = green_numeric(1.0, 0.2, -0.3, 0.7, 0.0, 1e-12).unwrap();
        assert!((g - Complex64::new(0.816_251_791_261_878_7, -0.501_259_221_699_599_6)).norm() < 1e-9, "{g}");
    }

    #[test]
    fn weak_field_resonance() {
        let w = resonance(0.05, c(-0.5)).unwrap();
        assert!((w.re + 0.5).abs() < 0.01, "{w}");
        assert!(w.im < 0.0);
    }

    #[test]
    fn fig1_sum_reference() {
        let v = fig1_direct_sum(0).unwrap();
        assert!((v - 4.0).abs() < 1e-14, "{v}");
        assert!((fig1_direct_sum(4).unwrap() - 0.182_013_520_976_432_37).abs() < 1e-14);
    }

    #[test]
    fn identities_hold() {
        let report = identity_checks().unwrap();
        assert_eq!(report.len(), 5);
        for line in &report {
            assert!(line.pass, "{line}");
        }
        assert!((report[0].rhs.re - PI).abs() < 1e-14);
    }
}
