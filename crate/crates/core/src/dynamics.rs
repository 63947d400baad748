//! Propagator, wavefunction and bound-state amplitude assembled from the
//! homogeneous solution and the return kernel.
//!
//! The on-axis value `g(tau) = psi(0, tau)` is tabulated once per run:
//! `g = phi_f(0,.) + phi_f(0,.) * Lambda_s`, where `*` is the time convolution
//! and the delta part of the return kernel has been absorbed.

use rayon::prelude::*;

use crate::interp::SqrtTable;
use crate::kernels::{free_prefactor, kf, kf_origin, moshinsky, phi_f};
use crate::lambda::LambdaProfile;
use crate::quad::{
    integrate_fresnel_endpoint, integrate_fresnel_endpoint_gap, integrate_sqrt_ends_gap, oscillation_panels,
};
use crate::{c, Complex64, Error, Result, I};

/// Field-free bound-state energy.
pub const E_BOUND: f64 = -0.5;
/// Below this `|f t|` the closed-form amplitude switches to its expansion.
const SMALL_FT: f64 = 1e-3;

/// Exponential-decay reference model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayModel {
    pub gamma: f64,
    pub delta: f64,
    pub e_b: f64,
}

/// Semiclassical rate `e^{-2/(3|f|)}` and shift `-5 f^2/8`.
pub fn wkb_model(f: f64) -> Result<DecayModel> {
    if f == 0.0 || !f.is_finite() {
        return Err(Error::Domain(format!("no decay without a field (f = {f})")));
    }
    Ok(DecayModel { gamma: (-2.0 / (3.0 * f.abs())).exp(), delta: -5.0 * f * f / 8.0, e_b: E_BOUND })
}

/// `int psi_b(x) phi_f(x, t) dx` in closed form.
pub fn amplitude_phi(t: f64, f: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(c(1.0));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("amplitude_phi needs t >= 0 (got {t})")));
    }
    let eps = f * t;
    let envelope = (-I * f * f * t.powi(3) / 6.0).exp();
    if eps.abs() >= SMALL_FT {
        let up = moshinsky(eps * t / 2.0, -I, t)? / (2.0 * I + eps);
        let down = moshinsky(-eps * t / 2.0, -I, t)? / (2.0 * I - eps);
        return Ok(4.0 / eps * envelope * (up - down));
    }
    // odd part of h(e) = M(e t/2; -i; t)/(2i + e), with d/dx M = M - G and G'(0) = 0
    let m0 = moshinsky(0.0, -I, t)?;
    let g0 = free_prefactor(t);
    let m1 = m0 - g0;
    let m2 = m1;
    let m3 = m2 - I / t * g0;
    let half = t / 2.0;
    let p = [m0, m1 * half, m2 * half * half / 2.0, m3 * half.powi(3) / 6.0];
    let q: Vec<Complex64> = (0..4).map(|n| (-1.0 / (2.0 * I)).powi(n) / (2.0 * I)).collect();
    let h1 = p[0] * q[1] + p[1] * q[0];
    let h3 = p[0] * q[3] + p[1] * q[2] + p[2] * q[1] + p[3] * q[0];
    Ok(8.0 * envelope * (h1 + h3 * eps * eps))
}

fn node_count(t_max: f64) -> usize {
    60 + (100.0 * t_max.sqrt()) as usize
}

fn phase_panels(t: f64, f: f64) -> usize {
    oscillation_panels(f * f * t.powi(3) / 6.0 + t + (f * t).abs())
}

/// Delta-channel quantities derived from one return-kernel profile.
#[derive(Debug, Clone)]
pub struct DeltaChannel {
    pub f: f64,
    tol: f64,
    profile: LambdaProfile,
    /// `psi(0, tau)`.
    on_axis: SqrtTable,
    /// `int_0^tau g(tau') K_f(tau - tau') dtau'`.
    history: SqrtTable,
}

impl DeltaChannel {
    pub fn new(profile: &LambdaProfile, t_max: f64, tol: f64) -> Result<Self> {
        if !(t_max > 0.0) || t_max > profile.t_max() * (1.0 + 1e-12) {
            return Err(Error::ProfileRange { t: t_max, max: profile.t_max() });
        }
        let f = profile.f;
        let grid = SqrtTable::sqrt_uniform_grid(t_max, node_count(t_max));
        let g: Vec<Complex64> = grid
            .par_iter()
            .map(|&tau| -> Result<Complex64> {
                let conv = integrate_sqrt_ends_gap(
                    |s, gap| phi_f(0.0, gap, f).unwrap_or(c(f64::NAN)) * profile.smooth_at(s).unwrap_or(c(f64::NAN)),
                    0.0,
                    tau,
                    tol,
                    phase_panels(tau, f),
                )?;
                Ok(phi_f(0.0, tau, f)? + conv.value)
            })
            .collect::<Result<_>>()?;
        let on_axis = SqrtTable::new(c(1.0), &grid, g)?;
        let hist: Vec<Complex64> = grid
            .par_iter()
            .map(|&tau| -> Result<Complex64> {
                let q = integrate_sqrt_ends_gap(
                    |s, gap| on_axis.eval(s).unwrap_or(c(f64::NAN)) * kf_origin(gap, f),
                    0.0,
                    tau,
                    tol,
                    phase_panels(tau, f),
                )?;
                Ok(q.value)
            })
            .collect::<Result<_>>()?;
        let history = SqrtTable::new(c(0.0), &grid, hist)?;
        Ok(DeltaChannel { f, tol, profile: profile.clone(), on_axis, history })
    }

    pub fn profile(&self) -> &LambdaProfile {
        &self.profile
    }

    pub fn t_max(&self) -> f64 {
        self.on_axis.t_max()
    }

    /// `psi(0, tau)`.
    pub fn on_axis(&self, tau: f64) -> Result<Complex64> {
        self.on_axis.eval(tau)
    }

    /// `int_0^t g(s, t - s) ds`.
    fn time_integral<F: Fn(f64, f64) -> Result<Complex64>>(&self, t: f64, g: F) -> Result<Complex64> {
        if t == 0.0 {
            return Ok(c(0.0));
        }
        let q = integrate_sqrt_ends_gap(
            |s, gap| g(s, gap).unwrap_or(c(f64::NAN)),
            0.0,
            t,
            self.tol,
            phase_panels(t, self.f),
        )?;
        Ok(q.value)
    }

    /// `A_delta(t) = i int_0^t phi_f(0, t - tau) g(tau) dtau`.
    pub fn amplitude_delta(&self, t: f64) -> Result<Complex64> {
        let v = self.time_integral(t, |s, gap| Ok(phi_f(0.0, gap, self.f)? * self.on_axis(s)?))?;
        Ok(I * v)
    }

    /// `(2 Re <phi|chi>, <chi|chi>)` for the correction `chi` at time `t`.
    pub fn norm_terms(&self, t: f64) -> Result<(f64, f64)> {
        let cross = self.time_integral(t, |s, _| Ok(self.on_axis(s)? * phi_f(0.0, s, self.f)?.conj()))?;
        let self_overlap = self.time_integral(t, |s, _| Ok(self.on_axis(s)?.conj() * self.history.eval(s)?))?;
        Ok((2.0 * (I * cross).re, 2.0 * self_overlap.re))
    }

    /// Real `c(t)` with `||phi_f + c chi|| = 1`; the nonzero root.
    pub fn normalization(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(1.0);
        }
        let (b, d) = self.norm_terms(t)?;
        if !(d > 0.0) {
            return Err(Error::Domain(format!("correction norm {d} at t = {t}")));
        }
        Ok(-b / d)
    }

    /// `chi(x, t) = i int_0^t K_f(x, 0; t - tau) g(tau) dtau`.
    pub fn correction(&self, x: f64, t: f64) -> Result<Complex64> {
        let f = self.f;
        let pre = free_prefactor(1.0);
        let h = |s: f64, gap: f64| {
            pre * (I * (f * x * s / 2.0 - f * f * s.powi(3) / 24.0)).exp() * self.on_axis(gap).unwrap_or(c(f64::NAN))
        };
        let q = integrate_fresnel_endpoint_gap(h, x * x / 2.0, t, self.tol)?;
        Ok(I * q.value)
    }
}

/// `A_delta(t)` from a profile covering `(0, t]`.
pub fn amplitude_delta(t: f64, profile: &LambdaProfile, tol: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(c(0.0));
    }
    DeltaChannel::new(profile, t, tol)?.amplitude_delta(t)
}

/// Propagator of the well in the field, delta part reduced to a single time integral.
pub fn propagator_a(x: f64, xp: f64, t: f64, profile: &LambdaProfile, tol: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("propagator needs t > 0 (got {t})")));
    }
    if t > profile.t_max() * (1.0 + 1e-12) {
        return Err(Error::ProfileRange { t, max: profile.t_max() });
    }
    let f = profile.f;
    let pre = free_prefactor(1.0);
    // K_f(y, 0; s) without its s^{-1/2} e^{i y^2/(2s)} factor
    let smooth = move |y: f64, s: f64| pre * (I * (f * y * s / 2.0 - f * f * s.powi(3) / 24.0)).exp();
    let kern = |y: f64, s: f64| kf(y, 0.0, s, f).unwrap_or(c(f64::NAN));
    let (ax, axp) = (x * x / 2.0, xp * xp / 2.0);

    let near_xp = integrate_fresnel_endpoint(|s| smooth(xp, s) * kern(x, t - s), axp, t / 2.0, tol)?;
    let near_x = integrate_fresnel_endpoint(|s| smooth(x, s) * kern(xp, t - s), ax, t / 2.0, tol)?;
    let delta_part = near_xp.value + near_x.value;

    let inner = |tau: f64| -> Complex64 {
        if tau <= 0.0 {
            return c(0.0);
        }
        integrate_fresnel_endpoint_gap(
            |s, gap| smooth(xp, s) * profile.smooth_at(gap).unwrap_or(c(f64::NAN)),
            axp,
            tau,
            tol,
        )
        .map_or(c(f64::NAN), |q| q.value)
    };
    let lam = integrate_fresnel_endpoint_gap(|s, gap| smooth(x, s) * inner(gap), ax, t, tol)?;
    let total = kf(x, xp, t, f)? + I * (delta_part + lam.value);
    if !total.is_finite() {
        return Err(Error::Quadrature("propagator integrand not finite".into()));
    }
    Ok(total)
}

/// Initial states supported by [`wavefunction_a`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    #[default]
    Bound,
}

#[derive(Debug, Clone)]
pub struct Wavefunction {
    pub x: Vec<f64>,
    pub values: Vec<Complex64>,
    pub normalization: f64,
}

/// Return-kernel sample count used for a curve reaching `t_max`.
pub fn profile_points(t_max: f64) -> usize {
    80 + (120.0 * t_max.sqrt()) as usize
}

/// `psi_a(x, t) = phi_f(x, t) + c(t) chi(x, t)` on `x_grid`.
pub fn wavefunction_a(
    x_grid: &[f64],
    t: f64,
    f: f64,
    initial: InitialState,
    n_max: usize,
    tol: f64,
) -> Result<Wavefunction> {
    let InitialState::Bound = initial;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("wavefunction needs t > 0 (got {t})")));
    }
    let profile = LambdaProfile::sqrt_uniform(t, profile_points(t), f, n_max, tol)?;
    let channel = DeltaChannel::new(&profile, t, tol)?;
    let cn = channel.normalization(t)?;
    let values =
        x_grid.par_iter().map(|&x| Ok(phi_f(x, t, f)? + cn * channel.correction(x, t)?)).collect::<Result<_>>()?;
    Ok(Wavefunction { x: x_grid.to_vec(), values, normalization: cn })
}

/// Bound-state amplitude and ionization probability on a time grid.
#[derive(Debug, Clone)]
pub struct IonizationCurve {
    pub f: f64,
    pub grid: Vec<f64>,
    /// `A_phi + c A_delta`.
    pub amplitude: Vec<Complex64>,
    pub amplitude_phi: Vec<Complex64>,
    pub amplitude_delta: Vec<Complex64>,
    /// `1 - |A|^2`, clamped to `[0, 1]`.
    pub probability: Vec<f64>,
    /// `e^{-Gamma t}` with the semiclassical rate (all ones at `f = 0`).
    pub decay_reference: Vec<f64>,
    pub normalization_constant: Vec<f64>,
    /// Largest amount removed by clamping.
    pub clamp_excess: f64,
    /// Points whose return-kernel samples did not all converge.
    pub flagged: Vec<bool>,
}

impl IonizationCurve {
    pub fn bound_probability(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Evaluate the amplitude and probability at every grid time; the grid starts at 0.
pub fn ionization_curve(grid: &[f64], f: f64, n_max: usize, tol: f64) -> Result<IonizationCurve> {
    if grid.first() != Some(&0.0) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("ionization grid must start at 0 and increase".into()));
    }
    let t_max = *grid.last().expect("non-empty");
    let channel = if t_max > 0.0 {
        let profile = LambdaProfile::sqrt_uniform(t_max, profile_points(t_max), f, n_max, tol)?;
        Some(DeltaChannel::new(&profile, t_max, tol)?)
    } else {
        None
    };
    let rate = wkb_model(f).map_or(0.0, |m| m.gamma);
    let points: Vec<(Complex64, Complex64, f64, bool)> = grid
        .par_iter()
        .map(|&t| -> Result<_> {
            match &channel {
                Some(ch) if t > 0.0 => {
                    let flagged =
                        ch.profile().grid.iter().zip(&ch.profile().diagnostics).any(|(&s, d)| s <= t && !d.converged);
                    Ok((amplitude_phi(t, f)?, ch.amplitude_delta(t)?, ch.normalization(t)?, flagged))
                }
                _ => Ok((c(1.0), c(0.0), 1.0, false)),
            }
        })
        .collect::<Result<_>>()?;
    let mut curve = IonizationCurve {
        f,
        grid: grid.to_vec(),
        amplitude: Vec::with_capacity(grid.len()),
        amplitude_phi: Vec::with_capacity(grid.len()),
        amplitude_delta: Vec::with_capacity(grid.len()),
        probability: Vec::with_capacity(grid.len()),
        decay_reference: grid.iter().map(|t| (-rate * t).exp()).collect(),
        normalization_constant: Vec::with_capacity(grid.len()),
        clamp_excess: 0.0,
        flagged: Vec::with_capacity(grid.len()),
    };
    for (k, (ap, ad, cn, fl)) in points.into_iter().enumerate() {
        let a = if k == 0 { c(1.0) } else { ap + cn * ad };
        let raw = 1.0 - a.norm_sqr();
        let p = raw.clamp(0.0, 1.0);
        curve.clamp_excess = curve.clamp_excess.max((raw - p).abs());
        curve.amplitude.push(a);
        curve.amplitude_phi.push(ap);
        curve.amplitude_delta.push(ad);
        curve.probability.push(p);
        curve.normalization_constant.push(cn);
        curve.flagged.push(fl);
    }
    Ok(curve)
}

/// Smoothing half-width and threshold of the ripple detector.
pub const RIPPLE_THRESHOLD: f64 = 1e-6;

/// Interior local maxima of `values` after a 3-point moving average; each must
/// exceed both neighbours by more than [`RIPPLE_THRESHOLD`].
pub fn ripple_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let smooth: Vec<f64> = (0..n)
        .map(|i| if i == 0 || i == n - 1 { values[i] } else { (values[i - 1] + values[i] + values[i + 1]) / 3.0 })
        .collect();
    (1..n - 1)
        .filter(|&i| smooth[i] > smooth[i - 1] + RIPPLE_THRESHOLD && smooth[i] > smooth[i + 1] + RIPPLE_THRESHOLD)
        .collect()
}

/// Least-squares slope of `ln y` against `t` over `t` in `[lo, hi]`.
pub fn log_slope(times: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> =
        times.iter().zip(y).filter(|(&t, &v)| (lo..=hi).contains(&t) && v > 0.0).map(|(&t, &v)| (t, v.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::Domain(format!("fewer than two positive samples in [{lo}, {hi}]")));
    }
    let n = pts.len() as f64;
    let (mt, my) = pts.iter().fold((0.0, 0.0), |(a, b), &(t, v)| (a + t / n, b + v / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), &(t, v)| (a + (t - mt) * (v - my), b + (t - mt).powi(2)));
    Ok(sxy / sxx)
}
