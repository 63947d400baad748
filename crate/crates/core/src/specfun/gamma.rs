//! Gamma function machinery for complex arguments (Lanczos, g = 7, n = 9).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{c, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Nonpositive integer test with a relative slack of a few ulps.
pub fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos_sum(z: Complex64) -> Complex64 {
    // z already shifted: evaluates A_g(z+1)
    let mut s = c(LANCZOS[0]);
    for (k, &p) in LANCZOS.iter().enumerate().skip(1) {
        s += p / (z + k as f64);
    }
    s
}

/// `ln Gamma(z)` on the principal branch of the Lanczos representation.
/// The imaginary part is continuous in the right half-plane; in the left
/// half-plane it is only correct modulo `2 pi i`, which is all the callers
/// need (they exponentiate).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(z.re));
    }
    if z.re < 0.5 {
        // reflection
        let s = (PI * z).sin();
        return Ok(c(PI.ln()) - s.ln() - ln_gamma(c(1.0) - z)?);
    }
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    Ok(c(0.5 * (2.0 * PI).ln()) + (zm + 0.5) * t.ln() - t + lanczos_sum(zm).ln())
}

/// Complex gamma function. Signals at the poles `z = 0, -1, -2, ...`.
pub fn gamma_c(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(z.re));
    }
    if z.re < 0.5 {
        let s = (PI * z).sin();
        return Ok(PI / (s * gamma_c(c(1.0) - z)?));
    }
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    if z.re > 140.0 {
        return Ok(ln_gamma(z)?.exp());
    }
    Ok((2.0 * PI).sqrt() * t.powc(zm + 0.5) * (-t).exp() * lanczos_sum(zm))
}

/// `1 / Gamma(z)`, entire: exactly zero at the poles of gamma.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return c(0.0);
    }
    if z.re < 0.5 {
        // sin(pi z) Gamma(1 - z) / pi, finite everywhere
        let g = gamma_c(c(1.0) - z).expect("1 - z has positive real part");
        return (PI * z).sin() * g / PI;
    }
    gamma_c(z).map(|g| g.inv()).unwrap_or(c(0.0))
}

/// Real gamma shortcut.
pub fn gamma_r(x: f64) -> Result<f64> {
    gamma_c(c(x)).map(|g| g.re)
}

/// Real `ln |Gamma(x)|` for `x > 0`.
pub fn ln_gamma_r(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_gamma(c(x)).map(|g| g.re).unwrap_or(f64::INFINITY)
}

/// Rising factorial `(lambda)_k = lambda (lambda + 1) ... (lambda + k - 1)`.
pub fn pochhammer(lambda: Complex64, k: usize) -> Complex64 {
    (0..k).fold(c(1.0), |acc, j| acc * (lambda + j as f64))
}

/// Euler beta function `B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)`.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma_r(a) + ln_gamma_r(b) - ln_gamma_r(a + b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_values() {
        let g = gamma_c(c(0.5)).unwrap();
        assert_relative_eq!(g.re, PI.sqrt(), max_relative = 1e-14);
        assert_eq!(g.im, 0.0);
        assert_relative_eq!(gamma_r(1.5).unwrap(), 0.5 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_r(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn factorials() {
        let mut f = 1.0;
        for n in 1..30 {
            assert_relative_eq!(gamma_r(n as f64).unwrap(), f, max_relative = 1e-13);
            f *= n as f64;
        }
    }

    #[test]
    fn sixth_and_third_products() {
        let p = gamma_r(1.0 / 6.0).unwrap() * gamma_r(0.5).unwrap() * gamma_r(5.0 / 6.0).unwrap();
        assert_relative_eq!(p, 2.0 * PI.powf(1.5), max_relative = 1e-13);
        let q = gamma_r(1.0 / 3.0).unwrap() * gamma_r(2.0 / 3.0).unwrap();
        assert_relative_eq!(q, 2.0 * PI / 3f64.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn triplication_formula() {
        for z in [c(0.3), c(1.7), Complex64::new(2.0, 0.5)] {
            let lhs = gamma_c(3.0 * z).unwrap();
            let rhs = (2.0 * PI).recip()
                * c(3.0).powc(3.0 * z - 0.5)
                * gamma_c(z).unwrap()
                * gamma_c(z + 1.0 / 3.0).unwrap()
                * gamma_c(z + 2.0 / 3.0).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm(), "{z}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn poles() {
        assert!(matches!(gamma_c(c(-3.0)), Err(Error::GammaPole(_))));
        assert!(gamma_c(c(0.0)).is_err());
        assert_eq!(recip_gamma(c(-3.0)), c(0.0));
        assert_eq!(recip_gamma(c(0.0)), c(0.0));
        // near a pole recip_gamma is small and finite
        assert!(recip_gamma(c(-3.0 + 1e-9)).norm() < 1e-8);
    }

    #[test]
    fn complex_recurrence_and_reflection() {
        let z = Complex64::new(-1.3, 2.1);
        let g = gamma_c(z).unwrap();
        let g1 = gamma_c(z + 1.0).unwrap();
        assert!((g1 - z * g).norm() < 1e-13 * g1.norm());
        let refl = g * gamma_c(c(1.0) - z).unwrap() * (PI * z).sin();
        assert!((refl - PI).norm() < 1e-12 * PI);
        let lg = ln_gamma(Complex64::new(30.0, 4.0)).unwrap().exp();
        let dg = gamma_c(Complex64::new(30.0, 4.0)).unwrap();
        assert!((lg - dg).norm() < 1e-12 * dg.norm());
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(Complex64::new(0.3, 0.2), 0), c(1.0));
        assert_eq!(pochhammer(c(1.0), 5), c(120.0));
        assert_eq!(pochhammer(c(0.5), 2), c(0.75));
        assert_eq!(pochhammer(c(-2.0), 4), c(0.0));
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(beta(0.5, 0.5), PI, max_relative = 1e-13);
        assert_relative_eq!(beta(2.0, 3.0), 1.0 / 12.0, max_relative = 1e-13);
    }
}
