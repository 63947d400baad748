//! Airy functions of complex argument.
//!
//! `Ai` comes from the Maclaurin series for `|z| <= 2`, the asymptotic series
//! for `|z| >= 9` (rotated into `|arg z| <= 2pi/3`), and Taylor integration of
//! `y'' = z y` along the ray in between, always in the direction in which `Ai`
//! grows. `Bi` is assembled from two rotated `Ai` values.

use std::f64::consts::{FRAC_PI_3, PI};

use num_complex::Complex64;

use crate::{c, Error, Result};

const C1: f64 = 0.355_028_053_887_817_24; // Ai(0)
const C2: f64 = 0.258_819_403_792_806_8; // -Ai'(0)
const R_SERIES: f64 = 2.0;
const R_ASYMP: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub ai: Complex64,
    pub aip: Complex64,
    pub bi: Complex64,
    pub bip: Complex64,
}

/// `(Ai(z), Bi(z))`.
pub fn airy(z: Complex64) -> Result<(Complex64, Complex64)> {
    let v = airy_with_derivs(z)?;
    Ok((v.ai, v.bi))
}

/// Ai, Ai', Bi, Bi' at `z`.
pub fn airy_with_derivs(z: Complex64) -> Result<AiryValues> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("airy({z})")));
    }
    let (ai, aip) = ai_pair(z)?;
    let w = Complex64::from_polar(1.0, 2.0 * FRAC_PI_3);
    let e6 = Complex64::from_polar(1.0, PI / 6.0);
    let (a1, d1) = ai_pair(w * z)?;
    let (a2, d2) = ai_pair(w.conj() * z)?;
    let mut bi = e6 * a1 + e6.conj() * a2;
    let mut bip = e6 * w * d1 + (e6 * w).conj() * d2;
    if z.im == 0.0 {
        bi.im = 0.0;
        bip.im = 0.0;
    }
    if !bi.is_finite() || !bip.is_finite() {
        return Err(Error::Overflow(format!("Bi({z})")));
    }
    Ok(AiryValues { ai, aip, bi, bip })
}

fn ai_pair(z: Complex64) -> Result<(Complex64, Complex64)> {
    let r = z.norm();
    let th = z.arg();
    if r <= R_SERIES {
        return Ok(maclaurin(z));
    }
    if th.abs() > 2.0 * FRAC_PI_3 && r >= R_ASYMP {
        // Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z)
        let w = Complex64::from_polar(1.0, 2.0 * FRAC_PI_3);
        let w2 = w * w;
        let (a1, d1) = asymptotic(w * z);
        let (a2, d2) = asymptotic(w2 * z);
        return Ok((-w * a1 - w2 * a2, -w2 * d1 - w * d2));
    }
    if r >= R_ASYMP {
        return Ok(asymptotic(z));
    }
    let dir = z / r;
    let out = if th.abs() <= FRAC_PI_3 {
        let z9 = dir * R_ASYMP;
        let (a, d) = asymptotic(z9);
        propagate(z9, z, a, d)
    } else {
        let z2 = dir * R_SERIES;
        let (a, d) = maclaurin(z2);
        propagate(z2, z, a, d)
    };
    if !out.0.is_finite() || !out.1.is_finite() {
        return Err(Error::Overflow(format!("Ai({z})")));
    }
    Ok(out)
}

fn maclaurin(z: Complex64) -> (Complex64, Complex64) {
    let z3 = z * z * z;
    let (mut f, mut g) = (c(1.0), z);
    let (mut fp, mut gp) = (c(0.0), c(1.0));
    let (mut tf, mut tg) = (c(1.0), z);
    let (mut tfp, mut tgp) = (z * z * 0.5, c(1.0));
    fp += tfp;
    for k in 1..120 {
        let k3 = 3.0 * k as f64;
        tf *= z3 / ((k3 - 1.0) * k3);
        tg *= z3 / (k3 * (k3 + 1.0));
        tgp *= z3 / ((k3 - 2.0) * k3);
        f += tf;
        g += tg;
        gp += tgp;
        if k >= 2 {
            tfp *= z3 / ((k3 - 3.0) * (k3 - 1.0));
            fp += tfp;
        }
        let small = 1e-18 * (f.norm() + g.norm() + fp.norm() + gp.norm());
        if tf.norm() + tg.norm() + tfp.norm() + tgp.norm() < small {
            break;
        }
    }
    (C1 * f - C2 * g, C1 * fp - C2 * gp)
}

fn asymptotic(z: Complex64) -> (Complex64, Complex64) {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    let zq = z.powf(0.25);
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    let (mut su, mut sv) = (c(1.0), c(1.0));
    let (mut u, mut v_prev_mag) = (1.0f64, f64::INFINITY);
    let mut zk = c(1.0);
    for k in 1..80 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zk *= -zeta.inv();
        let tu = u * zk;
        let tv = v * zk;
        let mag = tu.norm();
        if mag > v_prev_mag {
            break;
        }
        su += tu;
        sv += tv;
        v_prev_mag = mag;
        if mag < 1e-17 {
            break;
        }
    }
    (pre / zq * su, -pre * zq * sv)
}

/// Taylor-integrate `y'' = z y` from `za` to `zb` in a straight line.
fn propagate(za: Complex64, zb: Complex64, mut y: Complex64, mut yp: Complex64) -> (Complex64, Complex64) {
    let span = zb - za;
    let n = (span.norm() / 0.25).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut z0 = za;
    for _ in 0..n {
        // coefficients of y(z0 + s) in powers of s, with s^k scaled by h^k
        let (mut am1, mut a0, mut a1) = (c(0.0), y, yp * h);
        let h2 = h * h;
        let h3 = h2 * h;
        let (mut ny, mut nyp) = (a0 + a1, a1);
        for k in 0..60usize {
            let kf = k as f64;
            let a2 = (z0 * h2 * a0 + h3 * am1) / ((kf + 2.0) * (kf + 1.0));
            ny += a2;
            nyp += (kf + 2.0) * a2;
            am1 = a0;
            a0 = a1;
            a1 = a2;
            if a2.norm() < 1e-18 * ny.norm() && k > 4 {
                break;
            }
        }
        y = ny;
        yp = nyp / h;
        z0 += h;
    }
    (y, yp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn values_at_origin() {
        let v = airy_with_derivs(c(0.0)).unwrap();
        let g23 = crate::specfun::gamma_r(2.0 / 3.0).unwrap();
        assert!((v.ai.re - 3f64.powf(-2.0 / 3.0) / g23).abs() < 1e-15);
        assert!((v.bi.re - 3f64.sqrt() * C1).abs() < 1e-15);
    }

    #[test]
    fn wronskian() {
        for z in [
            c(1.3),
            c(-6.0),
            c(12.0),
            Complex64::new(3.0, 4.0),
            Complex64::new(-5.0, 2.0),
            Complex64::new(-15.0, -0.5),
            Complex64::new(7.0, -5.0),
        ] {
            let v = airy_with_derivs(z).unwrap();
            let w = v.ai * v.bip - v.aip * v.bi;
            assert!((w - 1.0 / PI).norm() < 1e-11 * (v.ai * v.bip).norm().max(1.0 / PI), "{z}: {w}");
        }
    }

    #[test]
    fn reference_values() {
        // mpmath.airyai / airybi: (z, Ai, Bi)
        type Pair = (f64, f64);
        let cases: [(Pair, Pair, Pair); 12] = [
            ((1.0, 0.0), (0.13529241631288141, 0.0), (1.2074235949528713, 0.0)),
            ((-4.5, 0.0), (0.2921527810559595, 0.0), (0.2538726576969326, 0.0)),
            ((5.0, 0.0), (0.00010834442813607442, 0.0), (657.7920441711711, 0.0)),
            ((-20.0, 0.0), (-0.1764061270779847, 0.0), (-0.20013930932265134, 0.0)),
            ((3.0, 4.0), (0.014554546690944635, -0.047435251515492834), (1.0363977946545908, 1.0513762825317121)),
            ((-2.0, 5.0), (-407.45405559119655, -494.19214019338835), (494.192170401228, -407.45395275951506)),
            ((10.0, -1.0), (-1.1928715008386384e-10, -5.545060172304257e-12), (-420473797.0205341, -1441575.519494879)),
            ((0.5, 2.1), (-0.3447423301820084, -0.45505280945369303), (0.4572208614183259, -0.15681506216462487)),
            ((-7.0, -3.0), (-89.66459209795387, 497.57465644462326), (497.574762345466, 89.66454974994487)),
            ((8.9, 0.1), (3.194355953055588e-09, -9.918989474510772e-10), (15261556.019400682, 4644993.621975478)),
            ((2.05, -4.9), (-0.3760424244956029, 0.7912840937215514), (0.8025278551916616, 0.2980999147821844)),
            ((-30.0, 1.0), (-9.513228511118244, 27.21909079632012), (-27.2200472571445, -9.51291201303218)),
        ];
        for ((x, y), (ar, ai), (br, bi)) in cases {
            let z = Complex64::new(x, y);
            let (a, b) = airy(z).unwrap();
            assert!(close(a, Complex64::new(ar, ai), 1e-10), "Ai({z}) = {a}");
            assert!(close(b, Complex64::new(br, bi), 1e-10), "Bi({z}) = {b}");
        }
    }

    #[test]
    fn bi_overflow_signalled() {
        assert!(airy(c(200.0)).is_err());
        assert!(airy(c(200.0)).is_err() && airy(c(-200.0)).is_ok());
    }
}
