use std::f64::consts::PI;

use capres::mellin::*;
use capres::numerics::quadrature::{integrate_1d, QuadratureConfig};
use capres::numerics::testfn::{make_bump_at, make_bump_radial, TestFunction2D};
use capres::Complex64 as C64;
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Tolerances for spectral integrals over long λ-ranges, whose integrands
/// carry rounding noise near 1e−16 per node.
fn spectral_cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_tolerances(1e-12, 1e-10)
}

fn radial() -> TestFunction2D {
    make_bump_radial(2.0, 1.0).unwrap()
}

#[test]
fn radial_input_has_only_the_zero_mode() {
    let c = mellin_forward(&radial(), C64::new(1.3, 0.0), 6, &cfg()).unwrap();
    for k in -6..=6i64 {
        if k != 0 {
            assert!(c.coeff(k).norm() < 1e-13, "k={k}");
        }
    }
    assert!(c.coeff(0).norm() > 1e-3);
}

#[test]
fn odd_input_has_no_even_modes() {
    let v = make_bump_at([1.5, 0.7], 0.9).unwrap().odd_part();
    let c = mellin_forward(&v, C64::new(-0.8, 0.4), 8, &cfg()).unwrap();
    assert!(c.parity_defect(ParityLabel::Odd) < 1e-10);
    assert!(c.coeff(1).norm() > 1e-4);
}

#[test]
fn zero_mode_at_lambda_zero_matches_radial_profile() {
    // v₀(σ) = ∫ a⁻¹ v(a⁻¹σ) da/a = ∫ v(rσ) dr.
    let v = radial();
    let c = mellin_forward(&v, C64::new(0.0, 0.0), 0, &cfg()).unwrap();
    let oracle = integrate_1d(|r| v.value([r, 0.0]), 1.0, 3.0, &cfg()).unwrap();
    assert!((c.coeff(0) - oracle).norm() < 1e-12, "{} vs {oracle}", c.coeff(0));
}

#[test]
fn inversion_reconstructs_values_with_a_large_cutoff() {
    let v = radial();
    let table = MellinTable::new(&v, 0);
    let comp = |l: f64| Ok(table.component(C64::new(l, 0.0)));
    for w in [[2.0, 0.0], [0.0, 2.5], [1.2, -0.9]] {
        let (rec, tail) = mellin_invert_with_tail(comp, w, 640.0, &spectral_cfg()).unwrap();
        let exact = v.value(w);
        assert!((rec - exact).norm() < 1e-6 * (1.0 + exact.norm()), "{w:?}: {rec} vs {exact}");
        assert!(tail < 1e-6);
    }
    let outside = mellin_invert(comp, [0.5, 0.2], 640.0, &spectral_cfg()).unwrap();
    assert!(outside.norm() < 1e-6);
}

#[test]
fn inversion_error_shrinks_with_the_cutoff() {
    let v = radial();
    let table = MellinTable::new(&v, 0);
    let comp = |l: f64| Ok(table.component(C64::new(l, 0.0)));
    let w = [2.0, 0.0];
    let errs: Vec<f64> = [40.0, 160.0, 640.0]
        .iter()
        .map(|&c| (mellin_invert(comp, w, c, &spectral_cfg()).unwrap() - v.value(w)).norm())
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn angular_input_is_reconstructed_from_its_own_channels() {
    let v = radial().times_cos(2);
    let table = MellinTable::new(&v, 4);
    let comp = |l: f64| Ok(table.component(C64::new(l, 0.0)));
    let c = table.component(C64::new(0.5, 0.0));
    for k in [-4i64, -3, -1, 0, 1, 3, 4] {
        assert!(c.coeff(k).norm() < 1e-13);
    }
    for w in [[1.7, 0.6], [-0.4, 2.2]] {
        let rec = mellin_invert(comp, w, 640.0, &spectral_cfg()).unwrap();
        assert!((rec - v.value(w)).norm() < 1e-6, "{w:?}");
    }
}

#[test]
fn invalid_inversion_arguments() {
    let table = MellinTable::new(&radial(), 0);
    let comp = |l: f64| Ok(table.component(C64::new(l, 0.0)));
    assert!(mellin_invert(comp, [0.0, 0.0], 10.0, &cfg()).is_err());
    assert!(mellin_invert(comp, [1.0, 0.0], 0.0, &cfg()).is_err());
}

#[test]
fn plancherel_matches_direct_inner_product() {
    let pairs = [
        (radial(), radial()),
        (radial().times_cos(2), make_bump_at([1.8, 0.6], 0.6).unwrap()),
    ];
    for (u, v) in pairs.iter() {
        let spectral = plancherel_pair(u, v, 8, 640.0, &spectral_cfg()).unwrap();
        let direct = direct_inner_product(u, v, 512, &cfg()).unwrap();
        assert!((spectral - direct).norm() < 1e-6 * direct.norm(), "{spectral} vs {direct}");
    }
}

#[test]
fn even_and_odd_functions_are_orthogonal() {
    let u = radial();
    let v = make_bump_at([-1.0, 1.8], 0.7).unwrap().odd_part();
    let p = plancherel_pair(&u, &v, 8, 100.0, &cfg()).unwrap();
    assert!(p.norm() < 1e-12);
    let b = bilinear_pair_at(&v, &u, C64::new(0.6, 0.2), 8, &cfg()).unwrap();
    assert!(b.norm() < 1e-12);
}

#[test]
fn bilinear_pairing_of_radial_bumps_at_zero() {
    let v = radial();
    let u = make_bump_radial(2.3, 0.8).unwrap();
    let v0 = mellin_forward(&v, C64::new(0.0, 0.0), 0, &cfg()).unwrap();
    let u0 = mellin_forward(&u, C64::new(0.0, 0.0), 0, &cfg()).unwrap();
    let b = bilinear_pair_at(&u, &v, C64::new(0.0, 0.0), 0, &cfg()).unwrap();
    assert!((b - 2.0 * PI * v0.coeff(0) * u0.coeff(0)).norm() < 1e-12);
}

#[test]
fn integrated_bilinear_pairing_is_the_bilinear_integral() {
    let u = radial().times_cos(1);
    let v = make_bump_at([0.9, 1.6], 0.8).unwrap();
    let pairing = BilinearPairing::new(&u, &v, 12);
    let spectral = integrate_1d(|l| pairing.at(C64::new(l, 0.0)), -640.0, 640.0, &cfg()).unwrap() / (2.0 * PI);
    let direct = direct_bilinear(&u, &v, 512, &cfg()).unwrap();
    assert!((spectral - direct).norm() < 1e-6 * direct.norm(), "{spectral} vs {direct}");
}

/// Chebyshev interpolant of `f` on `[−h, h]` with `n` first-kind nodes,
/// evaluated by Clenshaw's recurrence at a complex argument.
fn chebyshev_continuation<F: Fn(f64) -> C64>(f: F, h: f64, n: usize) -> impl Fn(C64) -> C64 {
    let samples: Vec<C64> = (0..n)
        .map(|j| f(h * (PI * (j as f64 + 0.5) / n as f64).cos()))
        .collect();
    let coeffs: Vec<C64> = (0..n)
        .map(|k| {
            let s: C64 = samples
                .iter()
                .enumerate()
                .map(|(j, y)| y * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                .sum();
            s * (2.0 / n as f64)
        })
        .collect();
    move |z: C64| {
        let t = z / h;
        let (mut b1, mut b2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for c in coeffs.iter().skip(1).rev() {
            let b0 = c + t * b1 * 2.0 - b2;
            b2 = b1;
            b1 = b0;
        }
        coeffs[0] * 0.5 + t * b1 - b2
    }
}

#[test]
fn pairing_is_entire_two_path_check() {
    let u = radial();
    let v = make_bump_radial(2.2, 0.9).unwrap();
    let pairing = BilinearPairing::new(&u, &v, 0);
    let continued = chebyshev_continuation(|x| pairing.at(C64::new(x, 0.0)), 8.0, 40);
    for &n in &[1.0, 2.0, 4.0] {
        for &sign in &[1.0, -1.0] {
            for &x in &[-2.0, -0.5, 0.0, 1.0, 2.5] {
                let l = C64::new(x, sign * n);
                let a = pairing.at(l);
                let b = continued(l);
                assert!((a - b).norm() < 1e-5 * a.norm().max(1e-3), "λ={l}: {a} vs {b}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homogeneity_is_structural_and_numerical(
        t in prop::sample::select(vec![0.5, 2.0, 3.0]),
        theta in 0.0f64..(2.0 * PI),
        lr in -3.0f64..3.0, li in -1.0f64..1.0,
    ) {
        let v = make_bump_at([1.2, -0.8], 0.7).unwrap();
        let lambda = C64::new(lr, li);
        let c = mellin_forward(&v, lambda, 24, &cfg()).unwrap();
        let sigma = [theta.cos(), theta.sin()];
        let scaled = [t * sigma[0], t * sigma[1]];
        let structural = c.value(scaled);
        let expected = radial_factor(lambda, t) * c.value(sigma);
        prop_assert!((structural - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        let direct = homogeneous_value_direct(&v, lambda, scaled, &cfg()).unwrap();
        let at_sigma = homogeneous_value_direct(&v, lambda, sigma, &cfg()).unwrap();
        let expected = radial_factor(lambda, t) * at_sigma;
        prop_assert!((direct - expected).norm() <= 1e-8 * (1.0 + expected.norm()));
    }

    #[test]
    fn parity_is_preserved(cx in 0.8f64..2.0, cy in -1.5f64..1.5, lr in -4.0f64..4.0) {
        let ball = make_bump_at([cx, cy], 0.5).unwrap();
        let lambda = C64::new(lr, 0.0);
        let even = mellin_forward(&ball.even_part(), lambda, 10, &cfg()).unwrap();
        let odd = mellin_forward(&ball.odd_part(), lambda, 10, &cfg()).unwrap();
        prop_assert!(even.parity_defect(ParityLabel::Even) <= 1e-10);
        prop_assert!(odd.parity_defect(ParityLabel::Odd) <= 1e-10);
    }

    #[test]
    fn table_agrees_with_definition(lr in -20.0f64..20.0, li in -2.0f64..2.0) {
        let v = radial().times_cos(3);
        let lambda = C64::new(lr, li);
        let a = MellinTable::new(&v, 4).component(lambda);
        let b = mellin_forward(&v, lambda, 4, &cfg()).unwrap();
        for k in -4..=4i64 {
            prop_assert!((a.coeff(k) - b.coeff(k)).norm() <= 1e-10 * (1.0 + b.coeff(k).norm()));
        }
    }
}

#[test]
fn plancherel_error_decreases_with_cutoff() {
    let u = radial();
    let direct = direct_inner_product(&u, &u, 256, &cfg()).unwrap();
    let errs: Vec<f64> = [5.0, 10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&c| (plancherel_pair(&u, &u, 0, c, &cfg()).unwrap() - direct).norm())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
}
