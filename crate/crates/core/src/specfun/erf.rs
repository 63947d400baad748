//! Error-function family for complex arguments.
//!
//! Everything is built on the Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`,
//! evaluated with the Poppe–Wijers scheme (power series near the origin, a
//! Taylor-corrected Laplace continued fraction in the intermediate region, the
//! plain continued fraction far out). Working through `w` keeps the large
//! Gaussian factors out of floating point: callers that need
//! `exp(phase) * erfc(z)` can fold the phase into `exp(-z^2)` analytically.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::recip_gamma;
use crate::{c, Error, Result, I};

const MILLER_MIN_RE: f64 = 0.3;
const SERIES_MAX_ABS: f64 = 2.5;
const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)` for any finite `z`.
///
/// In the lower half-plane the value contains `2 exp(-z^2)` and may overflow;
/// that case is reported as an error.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    let (xi, yi) = (z.re, z.im);
    let xabs = xi.abs();
    let yabs = yi.abs();
    if !xabs.is_finite() || !yabs.is_finite() || xabs > 0.5e154 || yabs > 0.5e154 {
        return Err(Error::Overflow(format!("w({z})")));
    }
    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;
    let xquad = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;

    let small = qrho < 0.085_264;
    let (mut u, mut v);
    let (mut u2, mut v2) = (0.0, 0.0);
    if small {
        // power series of erf about the origin
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i64;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let xaux = (xsum * xquad - ysum * yquad) / i as f64;
            ysum = (xsum * yquad + ysum * xquad) / i as f64;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i64;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i64;
            nu = (16.0 + 26.0 * qrho).round() as i64;
        }
        let h2 = 2.0 * h;
        let use_h = h > 0.0;
        let mut qlambda = if use_h { h2.powi(kapn as i32) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let cc = 0.5 / (tx * tx + ty * ty);
            rx = cc * tx;
            ry = cc * ty;
            if use_h && n <= kapn {
                let tx = qlambda + sx;
                let sx_new = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                sx = sx_new;
                qlambda /= h2;
            }
        }
        if use_h {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        } else {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }

    if yi < 0.0 {
        if small {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            let e = -xquad;
            if e > 708.5 {
                return Err(Error::Overflow(format!("w({z})")));
            }
            let w1 = 2.0 * e.exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    Ok(Complex64::new(u, v))
}

/// Complementary error function of a complex argument.
pub fn cerfc(z: Complex64) -> Result<Complex64> {
    if z.re < 0.0 {
        return Ok(c(2.0) - cerfc(-z)?);
    }
    let e = -z * z;
    if e.re > 708.0 {
        return Err(Error::Overflow(format!("erfc({z})")));
    }
    // w(iz) has Im(iz) = Re z >= 0: bounded, never overflows
    Ok(e.exp() * faddeeva(I * z)?)
}

/// `exp(z^2) erfc(z)` without forming either factor separately.
pub fn erfcx(z: Complex64) -> Result<Complex64> {
    faddeeva(I * z)
}

/// Repeated integral of erfc, `i^n erfc(z) = int_z^inf i^(n-1) erfc(s) ds`.
///
/// `Re z` comfortably positive uses Miller's backward recurrence normalised to
/// `erfc(z)` (the wanted solution is minimal there, and the power series would
/// cancel badly); small `|z|` otherwise uses the entire power series; the rest
/// is stable under forward recurrence.
pub fn repeated_erfc(n: usize, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return cerfc(z);
    }
    if z.re < MILLER_MIN_RE && z.norm() <= SERIES_MAX_ABS {
        return Ok(repeated_erfc_series(n, z));
    }
    if z.re >= MILLER_MIN_RE {
        let erfc0 = cerfc(z)?;
        let start = n + 20 + ((200.0 / (z.re * z.re)).ceil() as usize).min(20_000);
        let mut y_next = c(0.0); // y_{m+1}
        let mut y = c(1.0); // y_m
        let mut wanted = c(0.0);
        for m in (1..=start).rev() {
            // y_{m-1} = 2(m+1) y_{m+1} + 2 z y_m  (shifted form of the recurrence)
            let y_prev = 2.0 * (m as f64 + 1.0) * y_next + 2.0 * z * y;
            y_next = y;
            y = y_prev;
            if m - 1 == n {
                wanted = y;
            }
            if y.norm() > 1e100 {
                y *= 1e-100;
                y_next *= 1e-100;
                wanted *= 1e-100;
            }
        }
        if n == start {
            wanted = y_next;
        }
        return Ok(wanted * (erfc0 / y));
    }
    let mut ym2 = TWO_OVER_SQRT_PI * (-z * z).exp(); // i^{-1} erfc
    let mut ym1 = cerfc(z)?;
    for m in 1..=n {
        let y = -(z / m as f64) * ym1 + ym2 / (2.0 * m as f64);
        ym2 = ym1;
        ym1 = y;
    }
    Ok(ym1)
}

/// Entire power series `sum_k (-z)^k / (2^(n-k) k! Gamma(1 + (n-k)/2))`.
pub fn repeated_erfc_series(n: usize, z: Complex64) -> Complex64 {
    let mut sum = c(0.0);
    let mut zk = c(1.0); // (-z)^k / k!
    let mut small_run = 0;
    for k in 0..400usize {
        let nk = n as f64 - k as f64;
        let term = zk * 2f64.powf(-nk) * recip_gamma(c(1.0 + 0.5 * nk));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && k > n + 2 {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        zk *= -z / (k as f64 + 1.0);
    }
    sum
}

/// Generalized exponential integral `E_p(z) = int_1^inf exp(-z y) y^(-p) dy`
/// for half-integer order `p = m + 1/2` and `Re z >= 0`, `z != 0`.
pub fn expint_half(m: usize, z: Complex64) -> Result<Complex64> {
    if z.re < 0.0 || z == c(0.0) {
        return Err(Error::Domain(format!("E_(m+1/2)({z}) needs Re z >= 0, z != 0")));
    }
    let p = m as f64 + 0.5;
    if z.norm() >= 2.0 {
        // modified Lentz evaluation of the incomplete-gamma continued fraction
        let tiny = 1e-300;
        let mut b = z + p;
        let mut cc = c(1.0 / tiny);
        let mut d = b.inv();
        let mut h = d;
        for i in 1..20_000 {
            let an = -(i as f64) * (p - 1.0 + i as f64);
            b += 2.0;
            d = (an * d + b).inv();
            cc = b + an / cc;
            let del = cc * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                return Ok(h * (-z).exp());
            }
        }
        return Err(Error::Convergence(format!("E_{p}({z}) continued fraction")));
    }
    // forward recurrence E_{q+1} = (exp(-z) - z E_q) / q from E_{1/2}
    let sz = z.sqrt();
    let mut e = (PI / z).sqrt() * cerfc(sz)?;
    let ez = (-z).exp();
    for j in 0..m {
        let q = j as f64 + 0.5;
        e = (ez - z * e) / q;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    /// Taylor series of erf, summed in plain arithmetic; fine for |z| <~ 2.
    fn erfc_taylor_oracle(z: Complex64) -> Complex64 {
        let mut term = z;
        let mut sum = z;
        for n in 1..200 {
            term *= -z * z / n as f64;
            let t = term / (2 * n + 1) as f64;
            sum += t;
            if t.norm() < 1e-18 {
                break;
            }
        }
        c(1.0) - TWO_OVER_SQRT_PI * sum
    }

    #[test]
    fn erfc_at_zero_and_one() {
        assert_eq!(cerfc(c(0.0)).unwrap(), c(1.0));
        let e1 = cerfc(c(1.0)).unwrap();
        assert!((e1.re - 0.157_299_207_050_285_13).abs() < 1e-15);
        assert!(close(e1, erfc_taylor_oracle(c(1.0)), 1e-13));
    }

    #[test]
    fn reflection_and_conjugation() {
        let z = Complex64::new(0.7, 0.3);
        let s = cerfc(z).unwrap() + cerfc(-z).unwrap();
        assert!((s - 2.0).norm() < 1e-15);
        for z in [Complex64::new(0.7, 0.3), Complex64::new(-2.5, 3.1), Complex64::new(5.0, -1.0)] {
            assert!(close(cerfc(z.conj()).unwrap(), cerfc(z).unwrap().conj(), 1e-15));
        }
    }

    #[test]
    fn taylor_oracle_agreement_small_region() {
        for &(x, y) in &[(0.1, 0.2), (0.5, -1.0), (1.2, 0.9), (-1.5, 0.4), (0.0, 1.7), (1.9, -0.3)] {
            let z = Complex64::new(x, y);
            assert!(close(cerfc(z).unwrap(), erfc_taylor_oracle(z), 5e-13), "{z}");
        }
    }

    #[test]
    fn erfc_reference_values() {
        // mpmath.erfc at 30 digits
        let cases = [
            ((3.0, 4.0), (121.18699139507944, 27.750337293623902)),
            ((4.5, -1.2), (4.3905731435332595e-11, -8.038476410176213e-10)),
            ((0.3, 5.5), (132991813358.97732, 1299888124605.2093)),
            ((10.0, 10.0), (0.03835062572752514, 0.010987684608193988)),
            ((25.0, -3.0), (5.2043613930756263e-270, -4.184556004376061e-270)),
            ((1.0, -2.0), (1.536643565778565, -5.0491437034470347)),
            ((2.0, 2.0), (-0.15131086639806902, -0.12729162946314079)),
            ((-4.0, 0.5), (2.0000000110175495, 1.6289880119455548e-8)),
        ];
        for ((x, y), (re, im)) in cases {
            let z = Complex64::new(x, y);
            let got = cerfc(z).unwrap();
            assert!(close(got, Complex64::new(re, im), 1e-12), "{z}: {got} vs {re}+{im}i");
        }
    }

    #[test]
    fn region_boundary_is_continuous() {
        // the scheme switches between series and continued fraction near |z| ~ 2
        for k in 0..32 {
            let th = k as f64 * PI / 16.0;
            let z0 = Complex64::from_polar(1.83, th);
            let a = faddeeva(z0 * (1.0 - 1e-9)).unwrap();
            let b = faddeeva(z0 * (1.0 + 1e-9)).unwrap();
            assert!((a - b).norm() < 1e-7 * a.norm().max(1.0), "{z0}");
        }
    }

    #[test]
    fn faddeeva_reference_values() {
        // mpmath: exp(-z^2) * erfc(-i z)
        let cases = [
            ((1.0, 1.0), (0.30474420525691259, 0.20821893820283163)),
            ((-3.5, 0.01), (0.00053906761677611917, -0.16882773636001321)),
            ((0.2, 0.1), (0.86498254838828873, 0.18525189089700656)),
            ((6.0, 0.5), (0.0081248855864625182, 0.094687914860126239)),
            ((0.0, 0.0), (1.0, 0.0)),
        ];
        for ((x, y), (re, im)) in cases {
            let z = Complex64::new(x, y);
            let got = faddeeva(z).unwrap();
            assert!(close(got, Complex64::new(re, im), 1e-13), "{z}: {got}");
        }
    }

    #[test]
    fn overflow_is_signalled() {
        assert!(cerfc(Complex64::new(0.0, 40.0)).is_err());
    }

    #[test]
    fn repeated_erfc_basics() {
        let z = Complex64::new(0.4, -0.3);
        assert_eq!(repeated_erfc(0, z).unwrap(), cerfc(z).unwrap());
        let r = repeated_erfc(1, c(0.0)).unwrap();
        assert!((r.re - 1.0 / PI.sqrt()).abs() < 1e-15);
        // i^1 erfc(z) = exp(-z^2)/sqrt(pi) - z erfc(z)
        for z in [Complex64::new(0.4, -0.3), Complex64::new(3.0, -3.0), Complex64::new(0.1, 4.0)] {
            let want = (-z * z).exp() / PI.sqrt() - z * cerfc(z).unwrap();
            assert!(close(repeated_erfc(1, z).unwrap(), want, 1e-10), "{z}");
        }
    }

    #[test]
    fn repeated_erfc_branches_agree() {
        let eps = 1e-14;
        let mut pairs = Vec::new();
        // series | Miller across Re z = 0.3
        for y in [0.0, 1.0, -2.0, 3.0] {
            pairs.push((Complex64::new(MILLER_MIN_RE - eps, y), Complex64::new(MILLER_MIN_RE + eps, y)));
        }
        // series | forward recurrence across |z| = 2.5
        for th in [1.7f64, 2.5, 3.0, -2.2] {
            let u = Complex64::from_polar(1.0, th);
            pairs.push((u * (SERIES_MAX_ABS - eps), u * (SERIES_MAX_ABS + eps)));
        }
        for (a, b) in pairs {
            for n in [1usize, 3, 7, 15] {
                let ya = repeated_erfc(n, a).unwrap();
                let yb = repeated_erfc(n, b).unwrap();
                assert!(close(ya, yb, 1e-9), "n={n} {a}|{b}: {ya} vs {yb}");
            }
        }
    }

    #[test]
    fn repeated_erfc_miller_reference() {
        // mpmath quadrature of (2/sqrt(pi)) int_z^inf (s-z)^n/n! exp(-s^2) ds
        let z = Complex64::new(2.4489490209868805, 0.5101977127056001);
        let want = Complex64::new(-1.390913655424627e-9, 7.110039999586610e-10);
        assert!(close(repeated_erfc(7, z).unwrap(), want, 1e-12));
    }

    #[test]
    fn repeated_erfc_reference() {
        // mpmath: erfc integrated n times (via hyper representation)
        let z = Complex64::new(3.0, -3.0);
        let got = repeated_erfc(5, z).unwrap();
        let want = Complex64::new(-2.6798767844797086e-6, -4.7026385226763102e-7);
        assert!(close(got, want, 1e-11), "{got}");
    }

    #[test]
    fn sum_identity_of_repeated_erfc() {
        // sum_n (-2 z2)^n i^n erfc(z1) = exp(2 z1 z2 + z2^2) erfc(z1 + z2)
        let (z1, z2) = (c(0.4), c(0.2));
        let mut s = c(0.0);
        for n in 0..60 {
            s += (-2.0 * z2).powu(n as u32) * repeated_erfc(n, z1).unwrap();
        }
        let rhs = (2.0 * z1 * z2 + z2 * z2).exp() * cerfc(z1 + z2).unwrap();
        assert!(close(s, rhs, 1e-14), "{s} vs {rhs}");
    }

    #[test]
    fn expint_half_matches_reference() {
        // mpmath.expint(p, z)
        let cases = [
            (1usize, Complex64::new(0.0, -0.5), Complex64::new(0.31013936762663058, 0.78072955171323294)),
            (1, Complex64::new(0.0, -30.0), Complex64::new(0.033054124649275927, 0.0034895242426472861)),
            (4, Complex64::new(0.0, -7.0), Complex64::new(-0.023015893834157377, 0.11545739474720958)),
            (0, Complex64::new(1.5, 0.0), Complex64::new(0.12050061743586571, 0.0)),
            (6, Complex64::new(0.0, -1.9), Complex64::new(-0.10622466824472268, 0.12584725777072661)),
            (6, Complex64::new(0.0, -2.1), Complex64::new(-0.13006007504250502, 0.096474301028750688)),
        ];
        for (m, z, want) in cases {
            let got = expint_half(m, z).unwrap();
            assert!(close(got, want, 1e-11), "E_{}({z}) = {got}, want {want}", m as f64 + 0.5);
        }
    }
}
