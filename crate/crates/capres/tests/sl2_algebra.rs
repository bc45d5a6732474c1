use capres::diffop::{DiffOperator, PolyExpQuadratic, Polynomial, Rational};
use capres::sl2::casimir::*;
use capres::sl2::group::*;
use capres::{Complex64 as C64, Error};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn random_sl2(rng: &mut ChaCha8Rng) -> SL2Element {
    CartanCoords {
        alpha: rng.gen_range(-PI..PI),
        tau: rng.gen_range(0.0..0.8),
        beta: rng.gen_range(-PI..PI),
    }
    .compose()
}

fn random_points(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect()
}

// ---------------------------------------------------------------- group

#[test]
fn determinant_is_enforced() {
    assert!(SL2Element::new([[2.0, 0.0], [0.0, 0.5]]).is_ok());
    assert!(matches!(
        SL2Element::new([[2.0, 0.0], [0.0, 0.6]]),
        Err(Error::DomainError(_))
    ));
}

#[test]
fn op_norm_of_diagonal_and_rotation() {
    assert!((SL2Element::diagonal(0.7).op_norm() - 0.7f64.exp()).abs() < 1e-12);
    assert!((SL2Element::rotation(1.3).op_norm() - 1.0).abs() < 1e-12);
    let g = SL2Element::rotation(0.4).compose(&SL2Element::diagonal(-1.1)).compose(&SL2Element::rotation(2.0));
    assert!((g.op_norm() - 1.1f64.exp()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn iwasawa_round_trip(theta in -3.0f64..3.0, t in -2.0f64..2.0, rr in -3.0f64..3.0) {
        let g = IwasawaCoords { theta, t, r: rr }.compose();
        let c = g.iwasawa();
        prop_assert!(c.compose().distance(&g) < 1e-10);
        prop_assert!((c.t - t).abs() < 1e-10 && (c.r - rr).abs() < 1e-10);
    }

    #[test]
    fn cartan_round_trip(a in -3.0f64..3.0, tau in 0.0f64..2.5, b in -3.0f64..3.0) {
        let g = CartanCoords { alpha: a, tau, beta: b }.compose();
        let c = g.cartan();
        prop_assert!(c.tau >= 0.0);
        prop_assert!(c.compose().distance(&g) < 1e-10);
        prop_assert!((c.tau - tau).abs() < 1e-9);
        prop_assert!((g.op_norm() - tau.exp()).abs() < 1e-9 * tau.exp());
    }

    #[test]
    fn inverse_composes_to_identity(a in -3.0f64..3.0, tau in 0.0f64..2.0, b in -3.0f64..3.0) {
        let g = CartanCoords { alpha: a, tau, beta: b }.compose();
        prop_assert!(g.compose(&g.inverse()).distance(&SL2Element::identity()) < 1e-12);
    }

    #[test]
    fn plancherel_densities_are_even_and_nonnegative(l in -30.0f64..30.0, eps in 0u8..2) {
        let d = PlancherelDensity::new(eps).unwrap();
        prop_assert!(d.at(l) >= 0.0);
        prop_assert!((d.at(l) - d.at(-l)).abs() <= 1e-14 * d.at(l).abs().max(1e-300));
    }
}

#[test]
fn plancherel_density_values() {
    let d0 = PlancherelDensity::new(0).unwrap();
    let d1 = PlancherelDensity::new(1).unwrap();
    assert_eq!(d0.at(0.0), 0.0);
    assert!((d1.at(0.0) - 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
    // Continuity across the series switch near zero.
    let a = d1.at(2e-5 / PI);
    let b = d1.at(2.1e-4 / PI);
    assert!((a - 1.0 / (4.0 * PI * PI)).abs() < 1e-9 && (b - 1.0 / (4.0 * PI * PI)).abs() < 1e-8);
    for l in [40.0, 80.0] {
        assert!((d0.at(l) - l / (8.0 * PI)).abs() < 1e-12 * l);
        assert!((d1.at(l) - l / (8.0 * PI)).abs() < 1e-12 * l);
    }
    assert!(PlancherelDensity::new(2).is_err());
}

#[test]
fn lambda_coth_limit() {
    assert!((lambda_coth(C64::new(0.0, 0.0)) - C64::new(2.0 / PI, 0.0)).norm() < 1e-15);
    let z = C64::new(0.3, 0.2);
    let direct = z / (z * PI / 2.0).tanh();
    assert!((lambda_coth(z) - direct).norm() < 1e-14);
}

#[test]
fn reducibility_and_subquotients() {
    let l = PrincipalSeriesLabel::new(0, C64::new(3.0, 0.0)).unwrap();
    assert!(l.is_reducible());
    assert_eq!(
        l.subquotients().unwrap(),
        vec![
            SubquotientLabel::DiscreteMinus(3),
            SubquotientLabel::FiniteDim(3),
            SubquotientLabel::DiscretePlus(3)
        ]
    );
    let l0 = PrincipalSeriesLabel::new(1, C64::new(0.0, 0.0)).unwrap();
    assert_eq!(
        l0.subquotients().unwrap(),
        vec![SubquotientLabel::LimitMinus, SubquotientLabel::LimitPlus]
    );
    assert!(!PrincipalSeriesLabel::new(0, C64::new(2.0, 0.0)).unwrap().is_reducible());
    assert!(!PrincipalSeriesLabel::new(0, C64::new(0.0, 1.5)).unwrap().is_reducible());
    assert!(SubquotientLabel::FiniteDim(0).validate().is_err());
    assert!(SubquotientLabel::DiscretePlus(2).validate().is_ok());
}

#[test]
fn finite_block_has_dimension_n() {
    for (eps, n) in [(0u8, 1i64), (0, 3), (1, 2), (1, 4), (1, 0)] {
        let count = (-20..=20).filter(|&m| KTypeBlock::Finite.contains(m, eps, n)).count();
        assert_eq!(count as i64, n);
        for m in -20..=20i64 {
            let hits = KTypeBlock::PARTS.iter().filter(|b| b.contains(m, eps, n)).count();
            assert_eq!(hits, usize::from((m - eps as i64).rem_euclid(2) == 0));
        }
    }
}

#[test]
fn stable_range_rows() {
    let row = stable_range_table(StableRangeGroup::Sp2n { n: 1, p: 2 }).unwrap();
    assert_eq!(row.lambda_max, Ratio::new(3, 2));
    assert_eq!(row.r_minus_1, Ratio::from_integer(2));
    assert!(row.condition_holds);
    let row = stable_range_table(StableRangeGroup::Opp { p: 1, n: 2 }).unwrap();
    assert_eq!(row.lambda_max, Ratio::from_integer(4));
    assert!(row.condition_holds);
    assert!(!stable_range_table(StableRangeGroup::Sp2n { n: 2, p: 2 }).unwrap().condition_holds);
    assert!(stable_range_table(StableRangeGroup::Sp2n { n: 0, p: 2 }).is_err());
}

// ---------------------------------------------------------------- Casimir

#[test]
fn casimir_kills_constants() {
    let c = casimir_operator(2).unwrap();
    let one = Polynomial::constant(4, r(1));
    assert!(c.apply_polynomial(&one).is_zero());
}

#[test]
fn casimir_on_linear_and_quadratic_polynomials() {
    // Each column spans the standard representation (eigenvalue 1·3);
    // symmetric squares of one column carry weight 2 (eigenvalue 2·4); the
    // 2×2 minors are invariant.
    let p = 2;
    let c = casimir_operator(p).unwrap();
    for i in 0..2 {
        for j in 0..p {
            let x = Polynomial::variable(4, var(p, i, j));
            assert_eq!(c.apply_polynomial(&x), x.scale(r(3)));
        }
    }
    let x11 = Polynomial::<Rational>::variable(4, var(p, 0, 0));
    let x21 = Polynomial::<Rational>::variable(4, var(p, 1, 0));
    let x12 = Polynomial::<Rational>::variable(4, var(p, 0, 1));
    let x22 = Polynomial::<Rational>::variable(4, var(p, 1, 1));
    let sq = x11.times(&x21);
    assert_eq!(c.apply_polynomial(&sq), sq.scale(r(8)));
    let minor = x11.times(&x22).minus(&x12.times(&x21));
    assert!(c.apply_polynomial(&minor).is_zero());
}

#[test]
fn casimir_matches_finite_difference_vector_fields() {
    // Independent oracle: the vector fields of ω₀(h), ω₀(e±) applied by
    // central differences to a Gaussian-times-polynomial.
    let p = 2;
    let u = default_trial_functions(p, 3)[2].to_f64();
    let c = casimir_operator(p).unwrap();
    let cu = c.apply(&u);
    let hstep = 1e-3;
    type F = Box<dyn Fn(&[f64]) -> f64>;
    let field = |coeffs: Vec<(usize, usize, f64)>, f: F| -> F {
        // Σ c · x_a ∂_b f.
        Box::new(move |x: &[f64]| {
            let mut s = 0.0;
            for &(a, b, cf) in &coeffs {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[b] += hstep;
                xm[b] -= hstep;
                s += cf * x[a] * (f(&xp) - f(&xm)) / (2.0 * hstep);
            }
            s
        })
    };
    let h_field: Vec<(usize, usize, f64)> = (0..p)
        .flat_map(|j| [(var(p, 1, j), var(p, 1, j), 1.0), (var(p, 0, j), var(p, 0, j), -1.0)])
        .collect();
    let ep_field: Vec<(usize, usize, f64)> = (0..p).map(|j| (var(p, 1, j), var(p, 0, j), -1.0)).collect();
    let em_field: Vec<(usize, usize, f64)> = (0..p).map(|j| (var(p, 0, j), var(p, 1, j), -1.0)).collect();
    let mk = || -> F {
        let u = u.clone();
        Box::new(move |x: &[f64]| u.eval(x))
    };
    let hu = field(h_field.clone(), mk());
    let hhu = field(h_field.clone(), field(h_field.clone(), mk()));
    let epem = field(ep_field, field(em_field, mk()));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for x in random_points(&mut rng, 4, 5) {
        let numeric = hhu(&x) - 2.0 * hu(&x) + 4.0 * epem(&x);
        assert!((numeric - cu.eval(&x)).abs() < 1e-4, "{numeric} vs {}", cu.eval(&x));
    }
}

#[test]
fn casimir_commutes_with_translations() {
    let p = 2;
    let c = casimir_operator(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = default_trial_functions(p, 5);
    for u in &trials {
        let uf = u.to_f64();
        for _ in 0..5 {
            let g = random_sl2(&mut rng);
            let lhs = c.apply(&translate(&uf, &g, p));
            let rhs = translate(&c.apply(&uf), &g, p);
            for x in random_points(&mut rng, 4, 3) {
                let (a, b) = (lhs.eval(&x), rhs.eval(&x));
                assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn positive_capelli_is_minus_casimir_minus_one() {
    let c = casimir_operator(3).unwrap();
    let cp = positive_capelli_operator(3).unwrap();
    let sum = cp.plus(&c).plus(&DiffOperator::identity(6));
    assert!(sum.is_zero());
}

#[test]
fn sl2_trace_form_casimir_equals_the_casimir_element() {
    for p in [2, 3] {
        let from_form = sl2_casimir_from_trace_form(p).unwrap();
        assert_eq!(from_form, casimir_operator(p).unwrap());
    }
}

#[test]
fn o_pp_basis_has_the_right_dimension_and_commutes_with_sl2() {
    for p in [2usize, 3] {
        let basis = o_pp_basis(p).unwrap();
        assert_eq!(basis.len(), p * (2 * p - 1));
        for b in &basis {
            for s in sl2_basis(p) {
                assert!(b.operator.commutator(&s.operator).is_zero(), "{} vs {}", b.label, s.label);
            }
        }
    }
}

#[test]
fn capelli_constant_p2() {
    let p = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let report = capelli_identity_check(p, &default_trial_functions(p, 10), &random_points(&mut rng, 4, 8)).unwrap();
    assert_eq!(report.target, 0.0);
    assert!(report.matches_target(1e-8), "{report:?}");
    assert!(report.ratio_spread <= 1e-8, "{report:?}");
    assert_eq!(report.symbolic_constant, Some((0, 1)));
}

#[test]
fn capelli_constant_p3() {
    let p = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let report = capelli_identity_check(p, &default_trial_functions(p, 10), &random_points(&mut rng, 6, 6)).unwrap();
    assert_eq!(report.target, -3.0);
    assert!(report.matches_target(1e-8), "{report:?}");
    assert!(report.max_residual < 1e-8, "{report:?}");
    assert_eq!(report.symbolic_constant, Some((-3, 1)));
}

#[test]
fn capelli_difference_vanishes_on_invariant_constant_direction() {
    // A constant is annihilated by every first- and second-order part, so
    // (ω₀(C′) − ω₀(C))·1 is the scalar itself; for p = 2 it is zero.
    let diff = o_pp_casimir(2).unwrap().minus(&casimir_operator(2).unwrap());
    let one = PolyExpQuadratic {
        prefactor: Polynomial::constant(4, r(1)),
        quadratic: Polynomial::zero(4),
    };
    assert!(diff.apply(&one).prefactor.is_zero());
}
