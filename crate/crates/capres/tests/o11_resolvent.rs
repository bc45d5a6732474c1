use capres::mellin::{bilinear_pair_at, mellin_forward};
use capres::numerics::quadrature::{extrapolate_to_zero, QuadratureConfig};
use capres::numerics::testfn::{make_bump_at, make_bump_radial, TestFunction2D};
use capres::o11_resolvent::*;
use capres::{Complex64 as C64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn radial() -> TestFunction2D {
    make_bump_radial(2.0, 1.0).unwrap()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn direct_resolvent_rejects_lower_half_plane() {
    let rp = ResolventPairing::new(&radial(), &radial(), 0, &cfg()).unwrap();
    assert!(matches!(resolvent_pair(&rp, C64::new(1.0, -0.5)), Err(Error::DomainError(_))));
    assert!(matches!(resolvent_pair(&rp, C64::new(1.0, 0.0)), Err(Error::DomainError(_))));
}

#[test]
fn parity_mismatch_gives_zero() {
    let even = radial();
    let odd = make_bump_at([2.0, 0.5], 0.8).unwrap().odd_part();
    let rp = ResolventPairing::new(&even, &odd, 24, &cfg()).unwrap();
    for z in [C64::new(0.3, 1.0), C64::new(-2.0, 0.5)] {
        assert!(resolvent_pair(&rp, z).unwrap().norm() < 1e-12);
    }
}

#[test]
fn direct_matches_partial_fractions_at_5i() {
    let rp = ResolventPairing::new(&radial(), &radial(), 0, &cfg()).unwrap();
    let z = C64::new(0.0, 5.0);
    let a = resolvent_pair(&rp, z).unwrap();
    let b = resolvent_pair_partial_fractions(&rp, z, &cfg()).unwrap();
    assert!(rel(a, b) < 1e-9, "{a} vs {b}");
}

#[test]
fn real_pair_has_reflection_symmetry() {
    // For real u = v the pairing is real on ℝ, so R(−z̄) = conj R(z).
    let u = radial().times_cos(2);
    let rp = ResolventPairing::new(&u, &u, 4, &cfg()).unwrap();
    let a = resolvent_pair(&rp, C64::new(1.0, 1.0)).unwrap();
    let b = resolvent_pair(&rp, C64::new(-1.0, 1.0)).unwrap();
    assert!(rel(a, b.conj()) < 1e-10, "{a} vs {b}");
}

#[test]
fn continuation_agrees_on_overlap() {
    let u = radial();
    let v = make_bump_radial(2.5, 1.2).unwrap();
    let rp = ResolventPairing::new(&u, &v, 0, &cfg()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let z = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.2..0.95));
        let d = resolvent_pair(&rp, z).unwrap();
        let c = continued_resolvent(&rp, z, 1.0).unwrap();
        assert!((c - d).norm() <= 1e-7 * (1.0 + d.norm()), "z={z}: {c} vs {d}");
    }
    let z = C64::new(0.0, 2.0);
    let d = resolvent_pair(&rp, z).unwrap();
    let c = continued_resolvent(&rp, z, 1.0).unwrap();
    assert!(rel(c, d) < 1e-8);
}

#[test]
fn continuation_is_independent_of_shift() {
    let u = radial().times_cos(2);
    let rp = ResolventPairing::new(&u, &u, 4, &cfg()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let z = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-1.7..-0.2));
        let a = continued_resolvent(&rp, z, 2.0).unwrap();
        let b = continued_resolvent(&rp, z, 3.0).unwrap();
        assert!((a - b).norm() <= 1e-7 * (1.0 + b.norm()), "z={z}: {a} vs {b}");
    }
}

#[test]
fn real_axis_is_the_boundary_value() {
    let rp = ResolventPairing::new(&radial(), &radial(), 0, &cfg()).unwrap();
    let z = C64::new(3.0, 0.0);
    let c = continued_resolvent(&rp, z, 1.0).unwrap();
    let eps = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
    let vals: Vec<C64> = eps
        .iter()
        .map(|&e| resolvent_pair(&rp, C64::new(3.0, e)).unwrap())
        .collect();
    let limit = extrapolate_to_zero(&eps, &vals);
    assert!(rel(c, limit) < 1e-5, "{c} vs {limit}");
}

#[test]
fn collision_with_line_is_reported() {
    let rp = ResolventPairing::new(&radial(), &radial(), 0, &cfg()).unwrap();
    let r = continued_resolvent(&rp, C64::new(1.0, -2.0), 2.0);
    assert!(matches!(r, Err(Error::ContourCollision { .. })));
}

#[test]
fn residue_of_radial_pair() {
    let v = radial();
    let rp = ResolventPairing::new(&v, &v, 0, &cfg()).unwrap();
    let rep = residue_at_zero(&rp, 1.0, &cfg()).unwrap();
    let v0 = mellin_forward(&v, C64::new(0.0, 0.0), 0, &cfg()).unwrap();
    let expect = C64::i() * 0.5 * 2.0 * std::f64::consts::PI * v0.coeff(0) * v0.coeff(0);
    assert!(rel(rep.contour, expect) < 1e-8, "{} vs {expect}", rep.contour);
}

#[test]
fn residue_of_angular_pair_matches_direct_pairing() {
    let v = radial().times_cos(2);
    let rp = ResolventPairing::new(&v, &v, 4, &cfg()).unwrap();
    let rep = residue_at_zero(&rp, 1.0, &cfg()).unwrap();
    let oracle = C64::i() * 0.5 * bilinear_pair_at(&v, &v, C64::new(0.0, 0.0), 4, &cfg()).unwrap();
    assert!(rel(rep.contour, oracle) < 1e-4);
}

#[test]
fn z_times_resolvent_has_a_limit_along_rays() {
    let u = radial();
    let v = make_bump_radial(2.2, 0.9).unwrap();
    let rp = ResolventPairing::new(&u, &v, 0, &cfg()).unwrap();
    let res = residue_at_zero(&rp, 1.0, &cfg()).unwrap().closed_form;
    for j in 0..8 {
        let dir = C64::from_polar(1.0, std::f64::consts::PI * (2.0 * j as f64 + 0.5) / 8.0);
        let ts = [0.08, 0.04, 0.02, 0.01];
        let vals: Vec<C64> = ts
            .iter()
            .map(|&t| continued_resolvent(&rp, dir * t, 1.0).unwrap() * dir * t)
            .collect();
        let limit = extrapolate_to_zero(&ts, &vals);
        assert!(rel(limit, res) < 1e-4, "ray {j}: {limit} vs {res}");
    }
}

#[test]
fn no_spurious_poles() {
    let u = radial().times_cos(2);
    let rp = ResolventPairing::new(&u, &u, 4, &cfg()).unwrap();
    for i in -4..=4 {
        for j in -2..=4 {
            let z = C64::new(i as f64, j as f64 * 0.9 + 0.05);
            if z.norm() < 0.3 || z.norm() > 4.0 {
                continue;
            }
            let a = continued_resolvent(&rp, z, 2.5).unwrap();
            let b = continued_resolvent(&rp, z, 3.5).unwrap();
            assert!(a.re.is_finite() && a.im.is_finite());
            assert!((a - b).norm() <= 1e-7 * (1.0 + b.norm()), "z={z}");
        }
    }
}

#[test]
fn capelli_operator_on_homogeneous_functions() {
    for &(lambda, k) in &[(0.0, 0i64), (1.5, 2), (-2.0, 1), (0.7, -3)] {
        let f = TestFunction2D::new(
            move |w: [f64; 2]| {
                let r = w[0].hypot(w[1]);
                capres::mellin::radial_factor(C64::new(lambda, 0.0), r)
                    * C64::from_polar(1.0, k as f64 * w[1].atan2(w[0]))
            },
            0.5,
            4.0,
            capres::numerics::testfn::Parity::Mixed,
        )
        .unwrap();
        let cf = capelli_apply_o11(&f);
        for &w in &[[1.0, 0.3], [-1.2, 1.9], [0.1, -2.0]] {
            let expect = f.value(w) * lambda * lambda;
            assert!((cf.value(w) - expect).norm() < 1e-8, "λ={lambda} k={k}");
        }
    }
}

#[test]
fn capelli_operator_matches_cartesian_stencil() {
    let v = make_bump_at([1.5, -1.0], 0.9).unwrap();
    let cv = capelli_apply_o11(&v);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 20 {
        let w = [rng.gen_range(0.6..2.4), rng.gen_range(-1.9..-0.1)];
        if v.value(w).norm() == 0.0 {
            continue;
        }
        // −(E+1)² = −(E² + 2E + 1) with E = x∂x + y∂y, from Cartesian
        // second-order differences with one Richardson step.
        let f = |x: f64, y: f64| v.value([x, y]);
        let (x, y) = (w[0], w[1]);
        let stencil = |h: f64| {
            let fx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
            let fy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
            let fxx = (f(x + h, y) - f(x, y) * 2.0 + f(x - h, y)) / (h * h);
            let fyy = (f(x, y + h) - f(x, y) * 2.0 + f(x, y - h)) / (h * h);
            let fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
            let e = fx * x + fy * y;
            let e2 = fxx * (x * x) + fxy * (2.0 * x * y) + fyy * (y * y) + e;
            -(e2 + e * 2.0 + f(x, y))
        };
        let oracle = (stencil(1e-3) * 4.0 - stencil(2e-3)) / 3.0;
        assert!((cv.value(w) - oracle).norm() < 1e-5 * (1.0 + oracle.norm()), "{w:?}: {} vs {oracle}", cv.value(w));
        checked += 1;
    }
}

#[test]
fn inverse_radial_function_is_annihilated() {
    let f = TestFunction2D::new(
        |w: [f64; 2]| C64::new(1.0 / w[0].hypot(w[1]), 0.0),
        0.5,
        4.0,
        capres::numerics::testfn::Parity::Even,
    )
    .unwrap();
    let cf = capelli_apply_o11(&f);
    assert!(cf.value([1.0, 1.0]).norm() < 1e-9);
}
