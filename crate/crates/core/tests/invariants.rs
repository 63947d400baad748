use starkwell::dynamics::{amplitude_phi, ionization_curve};
use starkwell::kernels::kf;
use starkwell::lambda::{f6, field_free_in, i2, i3_exact, in_approx, in_recursive_oracle};
use starkwell::oracle::{green_airy, green_extrapolated, in_bruteforce, volterra_solve};
use starkwell::specfun::bessel_j;
use starkwell::{Complex64, I};

const FIELDS: [f64; 3] = [0.2, 1.0, 3.0];
const TIMES: [f64; 3] = [0.5, 1.0, 2.0];

fn pairwise(label: &str, vals: &[Complex64]) {
    for (i, a) in vals.iter().enumerate() {
        for b in &vals[i + 1..] {
            assert!((a - b).norm() < 1e-5, "{label}: {a} vs {b}");
        }
    }
}

#[test]
fn in_routes_agree_for_low_orders() {
    for &f in &FIELDS {
        for &t in &TIMES {
            for n in 2..=5 {
                let mut vals = vec![
                    in_recursive_oracle(n, t, f, 1e-10).unwrap().value,
                    in_bruteforce(n, t, f, 1e-8).unwrap().value,
                ];
                match n {
                    2 => vals.push(i2(t, f)),
                    3 => vals.push(i3_exact(t, f, 1e-13).unwrap().value),
                    _ => {}
                }
                pairwise(&format!("n={n} f={f} t={t}"), &vals);
            }
        }
    }
}

#[test]
fn in_approx_is_field_free_exact() {
    for n in 3..=12 {
        for &t in &TIMES {
            let a = in_approx(n, t, 0.0, 1e-14).unwrap().value;
            let e = field_free_in(n, t).unwrap();
            assert!((a - e).norm() <= 1e-13 * e.norm().max(1.0), "n={n} t={t}");
        }
    }
}

#[test]
fn in_approx_decays_with_field() {
    for n in 2..=8 {
        for &t in &TIMES {
            let mags: Vec<f64> = [1.0, 5.0, 20.0, 100.0]
                .iter()
                .map(|&f| match n {
                    2 => i2(t, f).norm(),
                    _ => in_approx(n, t, f, 1e-12).unwrap().value.norm(),
                })
                .collect();
            assert!(mags.windows(2).all(|w| w[1] < w[0]), "n={n} t={t}: {mags:?}");
        }
    }
}

#[test]
fn partial_waves_converge_by_l12() {
    // shells at f²t³ = 512 sit near 5e-6 at l = 12
    let tol = 1e-5;
    for b in [1.0, 8.0, 64.0, 216.0, 512.0] {
        let z = I * (b / 32.0);
        let shell =
            |l: i32| (bessel_j(l, b / 64.0) / (1.0 - 16.0 * f64::from(l * l)) * f6(l, z, 1e-15).unwrap().value).norm();
        let first = (1..=12).find(|&l| shell(l) < tol && shell(l + 1) < tol);
        assert!(first.is_some(), "f²t³={b}");
    }
}

#[test]
fn approximation_quality_ledger() {
    println!("{:>6} {:>5} {:>12} {:>12}", "f", "t", "rel_err", "abs/|K_f|");
    for f in [0.05, 0.1, 0.2, 0.3] {
        for t in [0.5, 1.0, 2.0, 4.0] {
            let e = i3_exact(t, f, 1e-13).unwrap().value;
            let a = in_approx(3, t, f, 1e-13).unwrap().value;
            let rel = (e - a).norm() / e.norm();
            println!("{f:>6} {t:>5} {rel:>12.3e}");
            assert!(rel < 1e-2, "weak field f={f} t={t}: {rel}");
        }
    }
    for f in [10.0, 20.0, 50.0, 100.0] {
        for t in [0.25, 0.5, 1.0, 2.0] {
            let e = in_recursive_oracle(3, t, f, 1e-9).unwrap().value;
            let a = in_approx(3, t, f, 1e-12).unwrap().value;
            let scaled = (e - a).norm() / kf(0.0, 0.0, t, f).unwrap().norm();
            println!("{f:>6} {t:>5} {:>12.3e} {scaled:>12.3e}", (e - a).norm() / e.norm());
            if f * f * t.powi(3) >= 2500.0 {
                assert!(scaled < 0.05, "strong field f={f} t={t}: {scaled}");
            }
        }
    }
}

#[test]
fn volterra_refinement_order() {
    let (t_max, h) = (4.0, 0.01);
    let sols: Vec<_> = [h, h / 2.0, h / 4.0].iter().map(|&s| volterra_solve(t_max, s, 1.0).unwrap()).collect();
    let diff = |a: usize, b: usize| {
        let stride = 1 << (b - a);
        sols[a].values.iter().enumerate().map(|(k, v)| (v - sols[b].values[k * stride]).norm()).fold(0.0, f64::max)
    };
    let (d1, d2) = (diff(0, 1), diff(1, 2));
    assert!(d1 / d2 >= 2.5, "{d1:e} / {d2:e}");
}

#[test]
fn green_richardson_is_monotone() {
    for &(x, xp, w, f) in &[(0.3, -0.1, 0.5, 1.0), (0.0, 0.0, -0.3, 0.5), (1.0, 0.5, 0.2, 2.0)] {
        let g = green_airy(x, xp, w, f).unwrap();
        let errs: Vec<f64> =
            green_extrapolated(x, xp, w, f, 1e-3, 1e-12).unwrap().iter().map(|v| (v - g).norm()).collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }
}

#[test]
fn probability_bounds_and_start() {
    let grid: Vec<f64> = (0..=30).map(|k| f64::from(k) * 0.1).collect();
    for f in [0.5, 1.0, 3.0] {
        let cu = ionization_curve(&grid, f, 24, 1e-9).unwrap();
        assert_eq!(cu.probability[0], 0.0);
        assert!(cu.probability.iter().all(|p| (0.0..=1.0).contains(p)));
        assert_eq!(cu.normalization_constant[0], 1.0);
    }
}

#[test]
fn parity_in_field() {
    let grid: Vec<f64> = (0..=20).map(|k| f64::from(k) * 0.1).collect();
    let (p, m) = (ionization_curve(&grid, 0.7, 24, 1e-9).unwrap(), ionization_curve(&grid, -0.7, 24, 1e-9).unwrap());
    for (a, b) in p.probability.iter().zip(&m.probability) {
        assert!((a - b).abs() < 1e-12);
    }
    for &t in &grid {
        let d = amplitude_phi(t, 0.7).unwrap() - amplitude_phi(t, -0.7).unwrap();
        assert!(d.norm() < 1e-14);
    }
}

#[test]
fn normalization_tends_to_one() {
    let grid: Vec<f64> = (0..=10).map(|k| f64::from(k) * 0.01).collect();
    let cu = ionization_curve(&grid, 1.0, 24, 1e-10).unwrap();
    let dev: Vec<f64> = cu.normalization_constant.iter().map(|c| (c - 1.0).abs()).collect();
    assert!(dev[1] < 1e-6);
    assert!(dev.windows(2).skip(1).all(|w| w[0] <= w[1] + 1e-12), "{dev:?}");
}

#[test]
fn weak_field_delta_channel_dominates() {
    let grid: Vec<f64> = (0..=50).map(|k| f64::from(k) * 0.2).collect();
    let cu = ionization_curve(&grid, 0.1, 24, 1e-9).unwrap();
    let (phi, delta) = (cu.amplitude_phi[50].norm(), cu.amplitude_delta[50].norm());
    assert!(delta > phi, "|A_δ|={delta} |A_φ|={phi}");
}

#[test]
#[ignore = "false for the exact dynamics too: |A-A_phi|/|A_phi| exceeds 0.1 by t=0.1 at f=10"]
fn strong_field_homogeneous_term_dominates() {
    let grid: Vec<f64> = (0..=20).map(|k| f64::from(k) * 0.05).collect();
    let cu = ionization_curve(&grid, 10.0, 24, 1e-9).unwrap();
    for ((t, d), p) in grid.iter().zip(&cu.amplitude_delta).zip(&cu.amplitude_phi).skip(1) {
        let ratio = d.norm() / p.norm();
        assert!(ratio < 0.05, "t={t}: {ratio}");
    }
}
