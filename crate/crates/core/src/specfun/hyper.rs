//! Generalized hypergeometric `pFq` and the n-argument multiple
//! hypergeometric function
//!
//! `F(z_1..z_n) = sum_k (a0)_{|k|}/(b0)_{|k|} prod_j (a_j)_{k_j}/(b_j)_{k_j} z_j^{k_j}/k_j!`.

use num_complex::Complex64;

use super::gamma::is_nonpositive_integer;
use super::SeriesEval;
use crate::{c, Error, Result};

pub const PFQ_TERM_CAP: usize = 10_000;
pub const MULTI_F_DEGREE_CAP: usize = 300;
/// Consecutive negligible terms required before a series is declared done.
const QUIET_RUN: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct PfqParams {
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
    pub argument: Complex64,
}

fn neg_int_order(z: Complex64) -> Option<u64> {
    is_nonpositive_integer(z).then(|| (-z.re).round() as u64)
}

impl PfqParams {
    pub fn new(upper: Vec<Complex64>, lower: Vec<Complex64>, argument: Complex64) -> Result<Self> {
        let stop = upper.iter().filter_map(|&a| neg_int_order(a)).min();
        for &b in &lower {
            if let Some(m) = neg_int_order(b) {
                // (b)_k vanishes at k = m + 1; the series must have stopped by then
                if stop.is_none_or(|s| s > m) {
                    return Err(Error::Domain(format!("lower parameter {b} is a pole of the series")));
                }
            }
        }
        if !argument.is_finite() {
            return Err(Error::Domain(format!("pFq argument {argument}")));
        }
        Ok(PfqParams { upper, lower, argument })
    }

    /// Convenience constructor from real parameters.
    pub fn real(upper: &[f64], lower: &[f64], argument: Complex64) -> Result<Self> {
        Self::new(upper.iter().map(|&x| c(x)).collect(), lower.iter().map(|&x| c(x)).collect(), argument)
    }
}

/// Sum `pFq(upper; lower; z)` term by term.
pub fn pfq(params: &PfqParams, tol: f64) -> Result<SeriesEval> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol}")));
    }
    let z = params.argument;
    let mut term = c(1.0);
    let mut sum = c(1.0);
    let mut quiet = 0;
    for k in 0..PFQ_TERM_CAP {
        let kf = k as f64;
        let num: Complex64 = params.upper.iter().map(|&a| a + kf).product();
        if num == c(0.0) || z == c(0.0) {
            return Ok(SeriesEval { value: sum, terms_used: k + 1, est_error: 0.0, converged: true });
        }
        let den: Complex64 = params.lower.iter().map(|&b| b + kf).product::<Complex64>() * (kf + 1.0);
        let ratio = num / den * z;
        term *= ratio;
        sum += term;
        if !sum.is_finite() {
            // divergent: report the last finite partial sum, flagged
            return Ok(SeriesEval { value: sum - term, terms_used: k + 1, est_error: f64::INFINITY, converged: false });
        }
        if term.norm() <= tol * sum.norm().max(1.0) && ratio.norm() < 1.0 {
            quiet += 1;
            if quiet >= QUIET_RUN {
                return Ok(SeriesEval { value: sum, terms_used: k + 2, est_error: term.norm(), converged: true });
            }
        } else {
            quiet = 0;
        }
    }
    Ok(SeriesEval { value: sum, terms_used: PFQ_TERM_CAP, est_error: term.norm(), converged: false })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiFParams {
    pub a0: Vec<Complex64>,
    pub b0: Vec<Complex64>,
    pub a_j: Vec<Vec<Complex64>>,
    pub b_j: Vec<Vec<Complex64>>,
    pub args: Vec<Complex64>,
}

impl MultiFParams {
    pub fn new(
        a0: Vec<Complex64>,
        b0: Vec<Complex64>,
        a_j: Vec<Vec<Complex64>>,
        b_j: Vec<Vec<Complex64>>,
        args: Vec<Complex64>,
    ) -> Result<Self> {
        let n = args.len();
        if n == 0 || n > 4 || a_j.len() != n || b_j.len() != n {
            return Err(Error::Domain(format!(
                "multiple hypergeometric needs 1..=4 arguments with matching parameter lists (got {n})"
            )));
        }
        for j in 0..n {
            let lhs = 1 + b0.len() + b_j[j].len();
            let rhs = a0.len() + a_j[j].len();
            if lhs < rhs {
                return Err(Error::Domain(format!(
                    "convergence condition fails for argument {}: 1 + {} + {} < {} + {}",
                    j + 1,
                    b0.len(),
                    b_j[j].len(),
                    a0.len(),
                    a_j[j].len()
                )));
            }
        }
        if b0.iter().chain(b_j.iter().flatten()).any(|&b| is_nonpositive_integer(b)) {
            return Err(Error::Domain("lower parameter is a nonpositive integer".into()));
        }
        Ok(MultiFParams { a0, b0, a_j, b_j, args })
    }

    /// Same per-argument parameters for every argument.
    pub fn symmetric(a0: &[f64], b0: &[f64], aj: &[f64], bj: &[f64], args: Vec<Complex64>) -> Result<Self> {
        let v = |x: &[f64]| x.iter().map(|&y| c(y)).collect::<Vec<_>>();
        let n = args.len();
        Self::new(v(a0), v(b0), vec![v(aj); n], vec![v(bj); n], args)
    }
}

/// Complex mantissa with a binary exponent: `m * 2^e`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: Complex64,
    e: i32,
}

fn ldexp(x: f64, mut e: i32) -> f64 {
    let mut x = x;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

impl Scaled {
    const ZERO: Scaled = Scaled { m: Complex64::new(0.0, 0.0), e: 0 };

    fn new(m: Complex64) -> Self {
        Scaled { m, e: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let a = self.m.re.abs().max(self.m.im.abs());
        if a == 0.0 || !a.is_finite() {
            return Scaled { m: self.m, e: 0 };
        }
        let s = a.log2().floor() as i32;
        Scaled { m: self.m.unscale(2f64.powi(s)), e: self.e + s }
    }

    fn mul(self, z: Complex64) -> Self {
        Scaled { m: self.m * z, e: self.e }.normalized()
    }

    fn times(self, o: Scaled) -> Self {
        Scaled { m: self.m * o.m, e: self.e + o.e }.normalized()
    }

    fn add(self, o: Scaled) -> Self {
        if self.m == c(0.0) {
            return o;
        }
        if o.m == c(0.0) {
            return self;
        }
        let e = self.e.max(o.e);
        let m = self.m * ldexp(1.0, self.e - e) + o.m * ldexp(1.0, o.e - e);
        Scaled { m, e }.normalized()
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(ldexp(self.m.re, self.e), ldexp(self.m.im, self.e))
    }

    fn log2_abs(self) -> f64 {
        if self.m == c(0.0) {
            f64::NEG_INFINITY
        } else {
            self.m.norm().log2() + self.e as f64
        }
    }
}

/// Sum the multiple series shell by shell in total degree.
pub fn multi_f(params: &MultiFParams, tol: f64) -> Result<SeriesEval> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol}")));
    }
    let n = params.args.len();
    let cap = MULTI_F_DEGREE_CAP;
    // per-argument coefficient sequences c_j[k] and partial Cauchy products
    let mut coef: Vec<Vec<Scaled>> = vec![Vec::with_capacity(cap + 1); n];
    let mut prods: Vec<Vec<Scaled>> = vec![Vec::with_capacity(cap + 1); n];
    let mut shared = Scaled::new(c(1.0)); // (a0)_K/(b0)_K
    let mut sum = Scaled::ZERO;
    let mut quiet = 0;
    let mut last_shell = 0.0f64;
    let mut prev_shell_log = f64::INFINITY;
    for deg in 0..=cap {
        let kf = deg as f64;
        for j in 0..n {
            let next = if deg == 0 {
                Scaled::new(c(1.0))
            } else {
                let k = kf - 1.0;
                let num: Complex64 = params.a_j[j].iter().map(|&a| a + k).product();
                let den: Complex64 = params.b_j[j].iter().map(|&b| b + k).product::<Complex64>() * kf;
                coef[j][deg - 1].mul(num / den * params.args[j])
            };
            coef[j].push(next);
            let p = if j == 0 {
                next
            } else {
                (0..=deg).fold(Scaled::ZERO, |acc, i| acc.add(prods[j - 1][i].times(coef[j][deg - i])))
            };
            prods[j].push(p);
        }
        if deg > 0 {
            let k = kf - 1.0;
            let num: Complex64 = params.a0.iter().map(|&a| a + k).product();
            let den: Complex64 = params.b0.iter().map(|&b| b + k).product();
            shared = shared.mul(num / den);
        }
        let shell = shared.times(prods[n - 1][deg]);
        sum = sum.add(shell);
        let sum_c = sum.to_complex();
        if !sum_c.is_finite() {
            return Err(Error::Overflow(format!("multiple hypergeometric sum at degree {deg}")));
        }
        let shell_log = shell.log2_abs();
        last_shell = shell.to_complex().norm();
        if last_shell <= tol * sum_c.norm().max(1.0) && shell_log <= prev_shell_log + 1.0 {
            quiet += 1;
            if quiet >= QUIET_RUN || shell.m == c(0.0) && all_terminated(params, deg) {
                return Ok(SeriesEval { value: sum_c, terms_used: deg + 1, est_error: last_shell, converged: true });
            }
        } else {
            quiet = 0;
        }
        prev_shell_log = shell_log;
    }
    Ok(SeriesEval { value: sum.to_complex(), terms_used: cap + 1, est_error: last_shell, converged: false })
}

fn all_terminated(params: &MultiFParams, deg: usize) -> bool {
    params.a0.iter().filter_map(|&a| neg_int_order(a)).any(|m| (deg as u64) > m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;
    use crate::I;

    #[test]
    fn pfq_trivial_cases() {
        let e = pfq(&PfqParams::real(&[1.0], &[1.0], c(1.0)).unwrap(), 1e-15).unwrap();
        assert!(e.converged);
        assert!((e.value - std::f64::consts::E).norm() < 1e-14);
        let z = pfq(&PfqParams::real(&[0.3, 2.0], &[1.5, 0.1, 4.0], c(0.0)).unwrap(), 1e-15).unwrap();
        assert_eq!(z.value, c(1.0));
    }

    #[test]
    fn pfq_bessel_identity() {
        // e^{-iz} 1F1(1/2; 1; 2iz) = J0(z)
        let z = 1.0;
        let s = pfq(&PfqParams::real(&[0.5], &[1.0], 2.0 * I * z).unwrap(), 1e-16).unwrap();
        let v = (-I * z).exp() * s.value;
        assert!((v.re - bessel_j(0, z)).abs() < 1e-14 && v.im.abs() < 1e-14);
    }

    #[test]
    fn pfq_polynomial_terminates() {
        // 2F1(-3, 2; 1; z) is a cubic
        let s = pfq(&PfqParams::real(&[-3.0, 2.0], &[1.0], c(0.5)).unwrap(), 1e-15).unwrap();
        assert!(s.converged && s.terms_used <= 5);
        // 1 - 3 + 9/4 - 1/2
        assert!((s.value.re + 0.25).abs() < 1e-15);
        // lower -5 is fine when the series stops at k = 3
        assert!(PfqParams::real(&[-3.0], &[-5.0], c(1.0)).is_ok());
        assert!(PfqParams::real(&[1.0], &[-2.0], c(1.0)).is_err());
    }

    #[test]
    fn pfq_divergent_flagged() {
        let s = pfq(&PfqParams::real(&[1.0, 1.0, 1.0], &[1.0], c(0.5)).unwrap(), 1e-12).unwrap();
        assert!(!s.converged);
        assert!(s.est_error > 0.0);
    }

    #[test]
    fn multi_f_zero_args() {
        let p = MultiFParams::symmetric(
            &[],
            &[1.0 / 3.0, 2.0 / 3.0, 1.0],
            &[1.0 / 6.0, 0.5, 5.0 / 6.0],
            &[],
            vec![c(0.0); 2],
        )
        .unwrap();
        let s = multi_f(&p, 1e-15).unwrap();
        assert_eq!(s.value, c(1.0));
    }

    #[test]
    fn multi_f_condition_checked() {
        assert!(MultiFParams::symmetric(
            &[],
            &[1.0 / 3.0, 2.0 / 3.0, 1.0],
            &[1.0 / 6.0, 0.5, 5.0 / 6.0],
            &[],
            vec![c(0.1); 2]
        )
        .is_ok());
        assert!(MultiFParams::symmetric(&[1.0], &[1.0 / 3.0], &[0.5, 0.5], &[], vec![c(0.1); 2]).is_err());
    }

    #[test]
    fn multi_f_reproduces_bessel_closed_form() {
        // (1/2i) F(a,a) = (1/2i) e^{-5 i f^2 t^3/192} J0(f^2 t^3/64), a = f^2 t^3 / (24 i)
        for &(f, t) in &[(1.0, 1.0), (2.0, 1.5), (5.0, 2.0)] {
            let ft = f * f * t * t * t;
            let a = c(ft) / (24.0 * I);
            let p = MultiFParams::symmetric(
                &[],
                &[1.0 / 3.0, 2.0 / 3.0, 1.0],
                &[1.0 / 6.0, 0.5, 5.0 / 6.0],
                &[],
                vec![a, a],
            )
            .unwrap();
            let s = multi_f(&p, 1e-15).unwrap();
            assert!(s.converged);
            let want = (-5.0 * I * ft / 192.0).exp() * bessel_j(0, ft / 64.0);
            assert!((s.value - want).norm() < 1e-12, "f={f} t={t}: {} vs {want}", s.value);
        }
    }

    #[test]
    fn single_argument_degenerates_to_pfq() {
        for z in [c(0.5), Complex64::new(-3.0, 2.0), c(10.0), Complex64::new(0.0, -9.5)] {
            let a = pfq(&PfqParams::real(&[1.0 / 3.0, 2.0 / 3.0], &[5.0 / 6.0, 7.0 / 6.0], z).unwrap(), 1e-16).unwrap();
            let p =
                MultiFParams::symmetric(&[1.0 / 3.0, 2.0 / 3.0], &[5.0 / 6.0, 7.0 / 6.0], &[], &[], vec![z]).unwrap();
            let b = multi_f(&p, 1e-16).unwrap();
            assert!((a.value - b.value).norm() < 1e-12 * a.value.norm(), "{z}");
        }
    }

    #[test]
    fn scaled_arithmetic_survives_huge_coefficients() {
        let big = Scaled::new(c(1e300)).mul(c(1e300)).mul(c(1e-300)).mul(c(1e-299));
        assert!((big.to_complex().re - 10.0).abs() < 1e-12);
    }
}
