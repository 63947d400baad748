//! Quadrature: adaptive Gauss–Kronrod, endpoint-singular maps, a Fresnel
//! endpoint rule and nested integration over the ordered simplex.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::specfun::expint_half;
use crate::{c, Error, Result, I};

/// Maximum number of bisections applied to any panel.
pub const MAX_DEPTH: u32 = 30;
/// Evaluation budget for a single one-dimensional integration.
pub const MAX_EVALS: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub est_error: f64,
    pub evaluations: usize,
}

impl QuadResult {
    /// Did the estimate meet `tol * max(1, |value|)`?
    pub fn within(&self, tol: f64) -> bool {
        self.est_error <= tol * self.value.norm().max(1.0)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
/// Returns value, error estimate, and whether the estimate sits at the
/// roundoff floor (bisection cannot improve it).
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, bool) {
    let centr = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(centr);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv = [(c(0.0), c(0.0)); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = hl * XGK[j];
        let (f1, f2) = (f(centr - dx), f(centr + dx));
        *slot = (f1, f2);
        resk += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        resasc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
    }
    let hl_abs = hl.abs();
    resasc *= hl_abs;
    resabs *= hl_abs;
    let mut err = ((resk - resg) * hl).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    let at_floor = err <= floor;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    if !err.is_finite() {
        err = f64::INFINITY;
    }
    (resk * hl, err, at_floor)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    depth: u32,
    at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

/// Number of initial panels so that a phase of total size `phase_span`
/// (radians) advances by at most `2 pi` per panel.
pub fn oscillation_panels(phase_span: f64) -> usize {
    let n = (phase_span.abs() / (2.0 * PI)).ceil();
    if n.is_finite() {
        (n as usize).clamp(1, 100_000)
    } else {
        1
    }
}

/// Globally adaptive integration of a complex integrand over `[a, b]`.
pub fn integrate_1d<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    integrate_1d_panels(f, a, b, tol, 1)
}

/// As [`integrate_1d`], starting from `panels` equal subintervals.
pub fn integrate_1d_panels<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> Result<QuadResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Quadrature(format!("bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Quadrature(format!("tolerance {tol}")));
    }
    let panels = panels.max(1);
    let mut heap = BinaryHeap::with_capacity(panels * 4);
    let mut done: Vec<Panel> = Vec::new();
    let mut total = c(0.0);
    let mut total_err = 0.0;
    let mut evals = 0;
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { a + h * (k + 1) as f64 };
        let (v, e, fl) = gk15(&f, lo, hi);
        evals += 15;
        total += v;
        total_err += e;
        heap.push(Panel { a: lo, b: hi, value: v, err: e, depth: 0, at_floor: fl });
    }
    while total_err > tol * total.norm().max(1.0) && evals < MAX_EVALS {
        let Some(p) = heap.pop() else { break };
        if p.at_floor || p.depth >= MAX_DEPTH || p.b - p.a <= 4.0 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
            done.push(p);
            continue;
        }
        let mid = 0.5 * (p.a + p.b);
        let (v1, e1, fl1) = gk15(&f, p.a, mid);
        let (v2, e2, fl2) = gk15(&f, mid, p.b);
        evals += 30;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: mid, value: v1, err: e1, depth: p.depth + 1, at_floor: fl1 });
        heap.push(Panel { a: mid, b: p.b, value: v2, err: e2, depth: p.depth + 1, at_floor: fl2 });
    }
    // ordered reduction: independent of heap history
    done.extend(heap);
    done.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = done.iter().fold(c(0.0), |s, p| s + p.value);
    let est_error = done.iter().map(|p| p.err).sum::<f64>();
    if !value.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(QuadResult { value, est_error, evaluations: evals })
}

/// `int_0^t g(tau) / sqrt((t - tau) tau) dtau` through `tau = t sin^2(theta)`.
pub fn integrate_singular_half<G: Fn(f64) -> Complex64>(g: G, t: f64, tol: f64) -> Result<QuadResult> {
    integrate_singular_half_panels(g, t, tol, 1)
}

pub fn integrate_singular_half_panels<G: Fn(f64) -> Complex64>(
    g: G,
    t: f64,
    tol: f64,
    panels: usize,
) -> Result<QuadResult> {
    if !(t > 0.0) {
        return Err(Error::Quadrature(format!("horizon {t}")));
    }
    let s = |th: f64| {
        let sn = th.sin();
        g(t * sn * sn) * 2.0
    };
    integrate_1d_panels(s, 0.0, FRAC_PI_2, tol, panels)
}

/// `int_a^b h(s) ds` where `h` may carry integrable `1/sqrt` singularities at
/// either end; uses `s = a + (b - a) sin^2(theta)`.
pub fn integrate_sqrt_ends<H: Fn(f64) -> Complex64>(
    h: H,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> Result<QuadResult> {
    integrate_sqrt_ends_gap(|s, _| h(s), a, b, tol, panels)
}

/// As [`integrate_sqrt_ends`], but `h` also receives `b - s` computed without
/// rounding to zero near the upper end.
pub fn integrate_sqrt_ends_gap<H: Fn(f64, f64) -> Complex64>(
    h: H,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::Quadrature(format!("bad interval [{a}, {b}]")));
    }
    let len = b - a;
    let s = |th: f64| {
        let (sn, cs) = th.sin_cos();
        h(a + len * sn * sn, len * cs * cs) * (2.0 * len * sn * cs)
    };
    integrate_1d_panels(s, 0.0, FRAC_PI_2, tol, panels)
}

const FRESNEL_DEG: usize = 10;

/// `int_0^T s^(-1/2) exp(i a / s) h(s) ds` for smooth `h` (on `[0, T/3]`).
///
/// Near the origin `h` is replaced by a Chebyshev interpolant and integrated
/// against the weight exactly through generalized exponential integrals; the
/// rest uses the adaptive rule. `h` may have `1/sqrt` behaviour at `T`.
pub fn integrate_fresnel_endpoint<H: Fn(f64) -> Complex64>(h: H, a: f64, t: f64, tol: f64) -> Result<QuadResult> {
    integrate_fresnel_endpoint_gap(|s, _| h(s), a, t, tol)
}

/// As [`integrate_fresnel_endpoint`], with `h(s, T - s)`.
pub fn integrate_fresnel_endpoint_gap<H: Fn(f64, f64) -> Complex64>(
    h: H,
    a: f64,
    t: f64,
    tol: f64,
) -> Result<QuadResult> {
    if !(t > 0.0) {
        return Err(Error::Quadrature(format!("horizon {t}")));
    }
    if a == 0.0 {
        // s = T sin^2: both s^-1/2 and a (T-s)^-1/2 end behaviour are regular
        return integrate_sqrt_ends_gap(|s, g| h(s, g) / s.sqrt(), 0.0, t, tol, 1);
    }
    let s0 = (t / 3.0).min(0.25);
    // Chebyshev interpolation of h on [0, s0] in u = s/s0
    let n = FRESNEL_DEG + 1;
    let nodes: Vec<f64> = (0..n).map(|k| 0.5 * (1.0 + ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos())).collect();
    let vals: Vec<Complex64> = nodes.iter().map(|&u| h(s0 * u, t - s0 * u)).collect();
    let cheb: Vec<Complex64> = (0..n)
        .map(|j| {
            let s =
                (0..n).fold(c(0.0), |acc, k| acc + vals[k] * ((j * (2 * k + 1)) as f64 * PI / (2 * n) as f64).cos());
            s * (2.0 / n as f64) * if j == 0 { 0.5 } else { 1.0 }
        })
        .collect();
    let mono = chebyshev_shifted_to_monomial(&cheb);
    let lam = a / s0;
    let z = -I * lam;
    let mut near = c(0.0);
    for (k, &ck) in mono.iter().enumerate() {
        near += ck * expint_half(k + 1, z)?;
    }
    near *= s0.sqrt();
    // tail of the Chebyshev series bounds the interpolation error
    let tail = cheb[n - 1].norm() + cheb[n - 2].norm();
    let near_err = tail * 2.0 * s0.sqrt();
    let far_phase = (a / s0 - a / t).abs();
    let far = integrate_sqrt_ends_gap(
        |s, g| h(s, g) * (I * a / s).exp() / s.sqrt(),
        s0,
        t,
        tol,
        oscillation_panels(far_phase),
    )?;
    Ok(QuadResult { value: near + far.value, est_error: near_err + far.est_error, evaluations: far.evaluations + n })
}

/// Coefficients of `sum_j c_j T_j(2u - 1)` in powers of `u`.
fn chebyshev_shifted_to_monomial(cheb: &[Complex64]) -> Vec<Complex64> {
    let n = cheb.len();
    // T_j(2u-1) in monomials of u, built by the three-term recurrence
    let mut t_prev = vec![0.0; n];
    let mut t_cur = vec![0.0; n];
    t_prev[0] = 1.0; // T_0
    t_cur[0] = -1.0; // T_1 = 2u - 1
    if n > 1 {
        t_cur[1] = 2.0;
    }
    let mut out = vec![c(0.0); n];
    for k in 0..n {
        out[k] += cheb[0] * t_prev[k];
    }
    if n > 1 {
        for k in 0..n {
            out[k] += cheb[1] * t_cur[k];
        }
    }
    for cj in cheb.iter().skip(2) {
        // T_{j+1} = 2 (2u - 1) T_j - T_{j-1}
        let mut t_next = vec![0.0; n];
        for k in 0..n {
            t_next[k] = -2.0 * t_cur[k] - t_prev[k];
            if k > 0 {
                t_next[k] += 4.0 * t_cur[k - 1];
            }
        }
        for k in 0..n {
            out[k] += *cj * t_next[k];
        }
        t_prev = t_cur;
        t_cur = t_next;
    }
    out
}

/// Integration over `t >= tau_1 >= ... >= tau_d >= 0`.
pub struct SimplexSpec<F> {
    pub dimension: usize,
    pub horizon: f64,
    /// Called with `[tau_1, ..., tau_d]`.
    pub integrand: F,
    /// Initial panels per level (oscillation guard).
    pub panels: usize,
}

impl<F: Fn(&[f64]) -> Complex64> SimplexSpec<F> {
    pub fn new(dimension: usize, horizon: f64, integrand: F) -> Result<Self> {
        if !(1..=4).contains(&dimension) {
            return Err(Error::Domain(format!("simplex dimension {dimension} outside 1..=4")));
        }
        if !(horizon > 0.0) {
            return Err(Error::Domain(format!("simplex horizon {horizon}")));
        }
        Ok(SimplexSpec { dimension, horizon, integrand, panels: 1 })
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }
}

/// Iterated integration with `tau_k = tau_{k-1} sin^2(theta_k)` at every level,
/// which regularises `1/sqrt` factors at both ends of each gap.
pub fn simplex_integrate<F: Fn(&[f64]) -> Complex64>(spec: &SimplexSpec<F>, tol: f64) -> Result<QuadResult> {
    let evals = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);
    let failed = Cell::new(None::<Error>);
    let mut taus = [0.0f64; 4];
    let r = simplex_level(spec, tol, 0, spec.horizon, &mut taus, &evals, &inner_err, &failed)?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(QuadResult {
        value: r.value,
        est_error: r.est_error + inner_err.get() * spec.horizon * FRAC_PI_2,
        evaluations: evals.get().max(1),
    })
}

#[allow(clippy::too_many_arguments)]
fn simplex_level<F: Fn(&[f64]) -> Complex64>(
    spec: &SimplexSpec<F>,
    tol: f64,
    level: usize,
    prev: f64,
    taus: &mut [f64; 4],
    evals: &Cell<usize>,
    inner_err: &Cell<f64>,
    failed: &Cell<Option<Error>>,
) -> Result<QuadResult> {
    let d = spec.dimension;
    let prefix = *taus;
    let body = |th: f64| {
        let (sn, cs) = th.sin_cos();
        let tau = prev * sn * sn;
        let jac = 2.0 * prev * sn * cs;
        let mut local = prefix;
        local[level] = tau;
        if level + 1 == d {
            evals.set(evals.get() + 1);
            (spec.integrand)(&local[..d]) * jac
        } else {
            match simplex_level(spec, tol, level + 1, tau, &mut local, evals, inner_err, failed) {
                Ok(r) => {
                    inner_err.set(inner_err.get().max(r.est_error));
                    r.value * jac
                }
                Err(e) => {
                    failed.set(Some(e));
                    c(0.0)
                }
            }
        }
    };
    let r = integrate_1d_panels(body, 0.0, FRAC_PI_2, tol, spec.panels)?;
    *taus = prefix;
    Ok(r)
}
