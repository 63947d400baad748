//! Closed-form building blocks in dimensionless units (`hbar = m = V0 = 1`).
//!
//! Branches: square roots of complex numbers are principal, so
//! `sqrt(i) = e^{i pi/4}` and `(2 pi i s)^{-1/2} = e^{-i pi/4} / sqrt(2 pi s)`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::specfun::faddeeva;
use crate::{c, Error, Result, I};

/// Field strength and elapsed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldTime {
    pub f: f64,
    pub t: f64,
}

impl FieldTime {
    pub fn new(f: f64, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !f.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!("field/time ({f}, {t})")));
        }
        Ok(FieldTime { f, t })
    }

    /// `f^2 t^3 / (24 i)`.
    pub fn a(&self) -> Complex64 {
        c(self.f * self.f * self.t.powi(3)) / (24.0 * I)
    }

    /// Classical impulse `f t`.
    pub fn p_c(&self) -> f64 {
        self.f * self.t
    }

    /// Classical displacement `f t^2 / 2`.
    pub fn x_c(&self) -> f64 {
        0.5 * self.f * self.t * self.t
    }

    /// Classical action `f^2 t^3 / 6`.
    pub fn s_c(&self) -> f64 {
        self.f * self.f * self.t.powi(3) / 6.0
    }
}

/// The well's only bound state, `psi_b(x) = exp(-|x|)`, `E_b = -1/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundState;

impl BoundState {
    pub const ENERGY: f64 = -0.5;

    pub fn psi(&self, x: f64) -> f64 {
        (-x.abs()).exp()
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel needs dt > 0 (got {dt})")))
    }
}

/// `(2 pi i s)^{-1/2}`.
pub fn free_prefactor(s: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (2.0 * PI * s).sqrt(), -FRAC_PI_4)
}

/// Free-particle kernel.
pub fn k0(x: f64, xp: f64, dt: f64) -> Result<Complex64> {
    kf(x, xp, dt, 0.0)
}

/// Kernel of a particle in the uniform field alone.
pub fn kf(x: f64, xp: f64, dt: f64, f: f64) -> Result<Complex64> {
    check_dt(dt)?;
    Ok(kf_complex(c(x), c(xp), dt, f))
}

/// Analytic continuation of [`kf`] in both positions (used for contour
/// rotation in spatial integrals).
pub fn kf_complex(x: Complex64, xp: Complex64, dt: f64, f: f64) -> Complex64 {
    let d = x - xp;
    let phase = d * d / (2.0 * dt) + (x + xp) * (0.5 * f * dt) - f * f * dt.powi(3) / 24.0;
    free_prefactor(dt) * (I * phase).exp()
}

/// `K_f(0, 0; s)` for `s > 0`.
pub fn kf_origin(s: f64, f: f64) -> Complex64 {
    free_prefactor(s) * (-I * f * f * s.powi(3) / 24.0).exp()
}

/// Moshinsky function `(1/2) e^{i(kx - k^2 t/2)} erfc((x - kt)/sqrt(2it))`.
///
/// Evaluated as `(1/2) e^{i x^2/(2t)} w(i z)`, which is algebraically the
/// same and keeps the Gaussian factors out of floating point.
pub fn moshinsky(x: f64, k: Complex64, t: f64) -> Result<Complex64> {
    check_dt(t)?;
    let z = (x - k * t) / (2.0 * I * t).sqrt();
    Ok(0.5 * (I * x * x / (2.0 * t)).exp() * faddeeva(I * z)?)
}

/// Field-driven free evolution of the bound state.
pub fn phi_f(x: f64, t: f64, f: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(c(BoundState.psi(x)));
    }
    let ft = FieldTime::new(f, t)?;
    let xc = ft.x_c();
    let m = moshinsky(x - xc, -I, t)? + moshinsky(xc - x, -I, t)?;
    Ok((I * (x * ft.p_c() - ft.s_c())).exp() * m)
}

/// Field-free propagator of the delta well, `K0 + M(|x|+|x'|; i; t)`.
pub fn exact_field_free_propagator(x: f64, xp: f64, t: f64) -> Result<Complex64> {
    Ok(k0(x, xp, t)? + moshinsky(x.abs() + xp.abs(), I, t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeDirection {
    /// scalar (x F) gauge to vector (p A) gauge
    ToVector,
    /// vector gauge back to scalar gauge
    ToScalar,
}

/// `psi_F(x,t) = e^{i x p_c(t)} psi_A(x,t)`.
pub fn gauge_transform(value: Complex64, x: f64, t: f64, f: f64, direction: GaugeDirection) -> Complex64 {
    let ph = (I * x * f * t).exp();
    match direction {
        GaugeDirection::ToScalar => value * ph,
        GaugeDirection::ToVector => value / ph,
    }
}

/// Kernel variant: `K_F(x,t|x',tau) = e^{i(x p_c(t) - x' p_c(tau))} K_A(x,t|x',tau)`.
pub fn gauge_transform_kernel(
    value: Complex64,
    x: f64,
    t: f64,
    xp: f64,
    tau: f64,
    f: f64,
    direction: GaugeDirection,
) -> Complex64 {
    let ph = (I * f * (x * t - xp * tau)).exp();
    match direction {
        GaugeDirection::ToScalar => value * ph,
        GaugeDirection::ToVector => value / ph,
    }
}
