use capres::numerics::testfn::mollifier;
use capres::sl2::group::{KTypeBlock, SL2Element};
use capres::sl2::ktype::*;
use capres::sl2::orbital::*;
use capres::sl2::testfn::*;
use capres::{Complex64 as C64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn bump(c: [f64; 2], r: f64) -> DiskBump {
    DiskBump { center: c, radius: r }
}

fn term(w: C64, columns: Vec<DiskBump>) -> ColumnProduct {
    ColumnProduct { weight: w, columns }
}

fn pair_u() -> TestFunctionM2p {
    TestFunctionM2p::from_column_products(vec![
        term(C64::new(1.0, 0.0), vec![bump([1.5, 0.0], 0.6), bump([0.0, 1.5], 0.6)]),
        term(C64::new(0.3, 0.2), vec![bump([1.0, 1.0], 0.5), bump([-1.2, 0.8], 0.5)]),
    ])
    .unwrap()
}

fn pair_v() -> TestFunctionM2p {
    TestFunctionM2p::from_column_products(vec![
        term(C64::new(0.8, -0.4), vec![bump([1.3, 0.5], 0.7), bump([-0.4, 1.4], 0.7)]),
        term(C64::new(-0.5, 0.1), vec![bump([0.2, -1.5], 0.5), bump([1.4, 0.3], 0.6)]),
    ])
    .unwrap()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn random_element(rng: &mut ChaCha8Rng, max_tau: f64) -> SL2Element {
    let a = SL2Element::rotation(rng.gen_range(0.0..std::f64::consts::TAU));
    let h = SL2Element::diagonal(rng.gen_range(0.0..max_tau));
    let b = SL2Element::rotation(rng.gen_range(0.0..std::f64::consts::TAU));
    a.compose(&h).compose(&b)
}

/// Forms of `(u, v)` and `(v, u)`, shared by the residue-form tests.
fn forms() -> &'static (ResidueForms, ResidueForms) {
    static FORMS: OnceLock<(ResidueForms, ResidueForms)> = OnceLock::new();
    FORMS.get_or_init(|| {
        let cfg = ResidueFormConfig::default();
        let a = ResidueForms::new(&pair_u(), &pair_v(), &cfg).unwrap();
        let b = ResidueForms::new(&pair_v(), &pair_u(), &cfg).unwrap();
        (a, b)
    })
}

// ---------------------------------------------------------------- test functions

#[test]
fn factories_enforce_the_support_condition() {
    // Collinear centres put the support on the rank-deficient matrices.
    let bad = TestFunctionM2p::from_column_products(vec![term(
        C64::new(1.0, 0.0),
        vec![bump([1.0, 0.0], 0.3), bump([2.0, 0.0], 0.3)],
    )]);
    assert!(matches!(bad, Err(Error::InvalidSupport(_))));
    assert!(matches!(
        TestFunctionM2p::radial_with_rank_cutoff(1, 2.0, 0.5, 0.2),
        Err(Error::InvalidSupport(_))
    ));
    assert!(matches!(
        TestFunctionM2p::radial_with_rank_cutoff(2, 2.0, 0.5, 0.0),
        Err(Error::InvalidSupport(_))
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for f in [
        pair_u(),
        pair_v(),
        TestFunctionM2p::radial_with_rank_cutoff(2, 2.0, 0.8, 0.4).unwrap(),
        TestFunctionM2p::radial_with_rank_cutoff(3, 2.5, 1.0, 0.3).unwrap(),
    ] {
        let p = f.p();
        let mut nonzero = 0;
        for _ in 0..4000 {
            let x: Vec<f64> = (0..2 * p).map(|_| rng.gen_range(-3.5..3.5)).collect();
            let val = f.value(&x);
            if val.norm() > 0.0 {
                nonzero += 1;
                let (_, smin) = singular_values_2xp(&x);
                assert!(smin >= f.sigma_min_floor(), "σ_min {smin} below floor {}", f.sigma_min_floor());
                assert!(frobenius(&x) <= f.support_radius());
            }
        }
        assert!(nonzero > 0);
    }
}

#[test]
fn radial_factory_is_rank_cutoff() {
    let f = TestFunctionM2p::radial_with_rank_cutoff(2, 2.0, 0.8, 0.4).unwrap();
    // Rank one, inside the radial shell: cut off.
    assert_eq!(f.value(&[2.0, 0.0, 0.0, 0.0]), C64::new(0.0, 0.0));
    // Well-conditioned, on the shell: positive.
    let s = 2.0 / 2f64.sqrt();
    assert!(f.value(&[s, 0.0, 0.0, s]).re > 0.0);
}

// ---------------------------------------------------------------- matrix coefficients

#[test]
fn psi_matches_the_generic_quadrature() {
    let (u, v) = (pair_u(), pair_v());
    let pc = PsiConfig::default();
    let oracle_cfg = PsiConfig {
        generic_nodes: 64,
        ..pc
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut gs = vec![SL2Element::identity()];
    gs.extend((0..2).map(|_| random_element(&mut rng, 0.4)));
    for g in gs {
        let a = psi_from_pair(&u, &v, &g, &pc).unwrap();
        let b = psi_generic(&u, &v, &g, &oracle_cfg).unwrap();
        assert!(rel(a, b) < 1e-2, "{g}: {a} vs {b}");
    }
}

#[test]
fn psi_vanishes_beyond_the_support_bound() {
    let (u, v) = (pair_u(), pair_v());
    let pc = PsiConfig::default();
    let bound = psi_support_bound(&u, &v);
    let g = SL2Element::rotation(0.3).compose(&SL2Element::diagonal((1.01 * bound).ln()));
    assert_eq!(psi_from_pair(&u, &v, &g, &pc).unwrap(), C64::new(0.0, 0.0));
    let f = GroupFunction::from_pair(&u, &v, &pc).unwrap();
    assert!(f.norm_bound() <= bound);
    assert_eq!(f.value(&g), C64::new(0.0, 0.0));
}

#[test]
fn psi_of_real_functions_is_real() {
    let real = |f: &TestFunctionM2p| {
        let terms: Vec<ColumnProduct> = f
            .column_terms()
            .unwrap()
            .iter()
            .map(|t| ColumnProduct {
                weight: C64::new(t.weight.norm(), 0.0),
                columns: t.columns.clone(),
            })
            .collect();
        TestFunctionM2p::from_column_products(terms).unwrap()
    };
    let (u, v) = (real(&pair_u()), real(&pair_v()));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let g = random_element(&mut rng, 0.8);
        let val = psi_from_pair(&u, &v, &g, &PsiConfig::default()).unwrap();
        assert_eq!(val.im, 0.0, "{val}");
    }
}

#[test]
fn hermitian_coefficient_swaps_under_inversion() {
    let (u, v) = (pair_u(), pair_v());
    let pc = PsiConfig::default();
    let f = GroupFunction::hermitian(&u, &v, &pc).unwrap();
    let b = GroupFunction::hermitian(&v, &u, &pc).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let g = random_element(&mut rng, 1.0);
        let a = f.value(&g);
        let c = b.value(&g.inverse()).conj();
        assert!((a - c).norm() <= 1e-13 * a.norm().max(1e-300), "{a} vs {c}");
    }
}

// ---------------------------------------------------------------- orbital integrals

#[test]
fn orbital_integral_sees_only_the_trace() {
    // ψ supported where tr g ∈ (2.5, 3), with a norm cutoff for compactness.
    let psi = GroupFunction::new(
        |g: &SL2Element| C64::new(mollifier((g.trace() - 2.75) / 0.25) * mollifier(g.op_norm() / 6.0), 0.0),
        6.0,
    )
    .unwrap();
    let cfg = OrbitalConfig::default();
    // 2 cosh t ∈ (2.5, 3) ⇔ t ∈ (0.693, 0.962).
    for t in [0.3, 0.6, 1.0, 1.4] {
        assert_eq!(orbital_integral(&psi, t, &cfg).unwrap(), C64::new(0.0, 0.0), "t = {t}");
    }
    assert!(orbital_integral(&psi, 0.8, &cfg).unwrap().re > 0.0);
    assert_eq!(orbital_integral_negative(&psi, 0.8, &cfg).unwrap(), C64::new(0.0, 0.0));
}

#[test]
fn orbital_integral_is_even_in_t_and_matches_the_kn_form() {
    let psi = forms().0.coefficient();
    let cfg = OrbitalConfig::default();
    for t in [0.2, 0.7, 1.3] {
        let a = orbital_integral(psi, t, &cfg).unwrap();
        let b = orbital_integral(psi, -t, &cfg).unwrap();
        assert!(rel(a, b) < 1e-4, "t = {t}: {a} vs {b}");
        let c = orbital_integral_kn(psi, t, &cfg).unwrap();
        assert!(rel(c, a) < 5e-2, "t = {t}: K×N {c} vs {a}");
    }
}

#[test]
fn orbital_integral_rejects_the_identity() {
    let psi = forms().0.coefficient();
    let cfg = OrbitalConfig::default();
    assert!(matches!(orbital_integral(psi, 0.0, &cfg), Err(Error::SingularElement(_))));
    assert!(matches!(orbital_integral(psi, 1e-10, &cfg), Err(Error::SingularElement(_))));
    assert!(matches!(orbital_integral_negative(psi, 0.0, &cfg), Err(Error::SingularElement(_))));
}

#[test]
fn character_transforms_are_even_and_decay() {
    let profile = forms().0.profile();
    assert!(profile.symmetry_defect() < 1e-4);
    for eps in [0u8, 1] {
        let f = |l: f64| profile.f_epsilon(eps, C64::new(l, 0.0)).unwrap();
        let scale = f(0.0).norm();
        for l in [0.5, 3.0, 8.0, 15.0] {
            assert!((f(l) - f(-l)).norm() < 1e-3 * scale, "ε = {eps}, λ = {l}");
        }
        // |f_ε(λ)| ≤ C/(1 + λ²) with C fixed on [0, 10] and tested on [10, 40].
        let c = 2.0 * (0..=40).map(|k| 0.25 * k as f64).map(|l| f(l).norm() * (1.0 + l * l)).fold(0.0, f64::max);
        for k in 0..=60 {
            let l = 10.0 + 0.5 * k as f64;
            assert!(f(l).norm() <= c / (1.0 + l * l), "ε = {eps}, λ = {l}");
        }
        // Off the real axis the transform is still even.
        let z = C64::new(1.5, 0.7);
        let (a, b) = (profile.f_epsilon(eps, z).unwrap(), profile.f_epsilon(eps, -z).unwrap());
        assert!(rel(a, b) < 1e-3);
    }
    assert!(matches!(profile.f_epsilon(2, C64::new(0.0, 0.0)), Err(Error::DomainError(_))));
}

#[test]
fn character_transforms_are_stable_under_t_refinement() {
    let (forms, _) = forms();
    let base = OrbitalConfig::default();
    let fine = OrbitalConfig {
        t_panels: 2 * base.t_panels,
        ..base
    };
    let refined = OrbitalProfile::build(forms.coefficient(), &fine).unwrap();
    for eps in [0u8, 1] {
        let scale = forms.profile().f_epsilon(eps, C64::new(0.0, 0.0)).unwrap().norm();
        for l in [0.0, 4.0, 10.0] {
            let a = forms.profile().f_epsilon(eps, C64::new(l, 0.0)).unwrap();
            let b = refined.f_epsilon(eps, C64::new(l, 0.0)).unwrap();
            assert!((a - b).norm() < 1e-2 * scale, "ε = {eps}, λ = {l}: {a} vs {b}");
        }
    }
}

// ---------------------------------------------------------------- K-types

fn sample_points() -> Vec<Vec<f64>> {
    vec![
        vec![1.5, 0.1, 0.2, 1.4],
        vec![0.9, 1.1, -1.1, 0.8],
        vec![1.2, -0.9, 0.4, 1.3],
    ]
}

#[test]
fn ktype_projections_are_orthogonal_idempotents() {
    let cfg = KTypeConfig {
        k_nodes: 32,
        tau_nodes: 16,
    };
    let u = pair_u();
    let p1 = ktype_project(&u, 1, &cfg).unwrap();
    let p11 = ktype_project(&p1, 1, &cfg).unwrap();
    let p13 = ktype_project(&p1, 3, &cfg).unwrap();
    let p1m = ktype_project(&p1, -1, &cfg).unwrap();
    let mut saw_signal = false;
    for x in sample_points() {
        let a = p1.value(&x);
        saw_signal |= a.norm() > 1e-3;
        assert!((p11.value(&x) - a).norm() < 1e-8, "idempotence at {x:?}");
        assert!(p13.value(&x).norm() < 1e-8, "orthogonality at {x:?}");
        assert!(p1m.value(&x).norm() < 1e-8, "orthogonality at {x:?}");
    }
    assert!(saw_signal);
    assert!(matches!(ktype_project(&u, 16, &cfg), Err(Error::InvalidConfig(_))));
}

#[test]
fn ktype_projections_sum_to_the_function() {
    let u = pair_u();
    let mut errs = Vec::new();
    for k in [16usize, 32, 64] {
        let cfg = KTypeConfig { k_nodes: k, tau_nodes: 16 };
        let mm = cfg.m_max();
        let parts: Vec<TestFunctionM2p> = (-mm..=mm).map(|m| ktype_project(&u, m, &cfg).unwrap()).collect();
        let err = sample_points()
            .iter()
            .map(|x| (parts.iter().map(|p| p.value(x)).sum::<C64>() - u.value(x)).norm())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    // Compactly supported bumps have slowly decaying angular spectra.
    let scale = sample_points().iter().map(|x| u.value(x).norm()).fold(0.0, f64::max);
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 5e-3 * scale, "{errs:?} against {scale}");
}

#[test]
fn radial_factory_has_only_the_trivial_ktype() {
    let f = TestFunctionM2p::radial_with_rank_cutoff(2, 2.0, 0.8, 0.4).unwrap();
    let cfg = KTypeConfig {
        k_nodes: 16,
        tau_nodes: 8,
    };
    let p0 = ktype_project(&f, 0, &cfg).unwrap();
    let p2 = ktype_project(&f, 2, &cfg).unwrap();
    let x = [1.2, 0.3, -0.4, 1.3];
    assert!((p0.value(&x) - f.value(&x)).norm() < 1e-12);
    assert!(p2.value(&x).norm() < 1e-12);
}

#[test]
fn projection_commutes_with_the_group_action() {
    // ∫ χ_m(k) u(k⁻¹ g x) dk = (P_m u)(g x): the left side rotates group
    // elements, the right side rotates the bumps of u.
    let u = pair_u();
    let cfg = KTypeConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for m in [0i64, 1, -2, 3] {
        let pm = ktype_project(&u, m, &cfg).unwrap();
        for _ in 0..5 {
            let x: Vec<f64> = vec![1.2, rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), 1.2];
            let g = random_element(&mut rng, 0.3);
            let (_, smin) = singular_values_2xp(&x);
            let x0 = x.clone();
            let uu = u.clone();
            let f = GroupFunction::new(
                move |h: &SL2Element| uu.value(&apply_left(h, &x0, 2)),
                (u.support_radius() / smin).max(1.0),
            )
            .unwrap();
            let lhs = group_ktype_project(&f, m, cfg.k_nodes).unwrap().value(&g);
            let rhs = pm.value(&apply_left(&g, &x, 2));
            assert!((lhs - rhs).norm() < 1e-8, "m = {m}: {lhs} vs {rhs}");
        }
    }
}

// ---------------------------------------------------------------- residue forms

#[test]
fn residue_form_parameters_are_checked() {
    let (a, _) = forms();
    for (eps, n) in [(0u8, 0i64), (1, 1), (0, 2), (1, -2), (0, -1)] {
        assert!(matches!(a.full(eps, n), Err(Error::DomainError(_))), "ε = {eps}, n = {n}");
        assert!(matches!(a.block(eps, n, KTypeBlock::Finite), Err(Error::DomainError(_))));
    }
    assert!(a.full(2, 1).is_err());
}

#[test]
fn residue_forms_are_hermitian() {
    let (a, b) = forms();
    for (eps, n) in [(0u8, 1i64), (1, 0), (1, 2), (0, 3)] {
        let x = a.full(eps, n).unwrap();
        let y = b.full(eps, n).unwrap();
        assert!(rel(x, y.conj()) < 1e-6, "ε = {eps}, n = {n}: {x} vs {y}");
    }
}

#[test]
fn block_forms_add_up_to_the_full_form() {
    let (a, _) = forms();
    for (eps, n) in [(0u8, 1i64), (1, 2), (0, 3), (1, 0)] {
        let full = a.full(eps, n).unwrap();
        let sum: C64 = KTypeBlock::PARTS.iter().map(|b| a.block(eps, n, *b).unwrap()).sum();
        assert!(rel(sum, full) < 1e-5, "ε = {eps}, n = {n}: {sum} vs {full}");
        assert_eq!(a.block(eps, n, KTypeBlock::Full).unwrap(), full);
    }
}

#[test]
fn finite_block_form_is_the_full_form_of_the_projected_pair() {
    let (a, _) = forms();
    let cfg = ResidueFormConfig::default();
    for (eps, n) in [(1u8, 2i64), (0, 3)] {
        let ms = block_ktypes(eps, n, KTypeBlock::Finite, &cfg.ktype);
        let projected = a.table().unwrap().filtered(&ms).unwrap();
        let full = ResidueForms::from_coefficient(projected, &cfg).unwrap().full(eps, n).unwrap();
        let block = a.block(eps, n, KTypeBlock::Finite).unwrap();
        assert!(rel(block, full) < 1e-5, "ε = {eps}, n = {n}: {block} vs {full}");
    }
}

#[test]
fn filtered_table_is_the_coefficient_of_the_projected_pair() {
    // The table samples K on a grid anchored at the identity, the projected
    // pair on one shifted by the KAK angles of g: they agree up to aliasing.
    let cfg = KTypeConfig {
        k_nodes: 64,
        tau_nodes: 64,
    };
    let pc = PsiConfig::default();
    let (u, v) = (pair_u(), pair_v());
    let psi = GroupFunction::hermitian(&u, &v, &pc).unwrap();
    let table = KTypeTable::build(&psi, &cfg).unwrap();
    let scale = psi.value(&SL2Element::identity()).norm();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (eps, n) in [(1u8, 2i64), (0, 3)] {
        let ms = block_ktypes(eps, n, KTypeBlock::Finite, &cfg);
        let filtered = table.filtered(&ms).unwrap();
        let pu = ktype_project_block(&u, eps, n, KTypeBlock::Finite, &cfg).unwrap();
        let pv = ktype_project_block(&v, eps, n, KTypeBlock::Finite, &cfg).unwrap();
        let direct = GroupFunction::hermitian(&pu, &pv, &pc).unwrap();
        for _ in 0..3 {
            let g = random_element(&mut rng, 0.8);
            let a = filtered.value(&g);
            let b = direct.value(&g);
            assert!((a - b).norm() < 1e-5 * scale, "ε = {eps}, n = {n}: {a} vs {b}");
        }
    }
}

#[test]
fn one_shot_residue_form_matches_the_shared_forms() {
    let cfg = ResidueFormConfig::default();
    assert!(matches!(
        residue_form(&pair_u(), &pair_v(), 0, 2, KTypeBlock::Full, &cfg),
        Err(Error::DomainError(_))
    ));
    let a = residue_form(&pair_u(), &pair_v(), 1, 0, KTypeBlock::Full, &cfg).unwrap();
    assert_eq!(a, forms().0.full(1, 0).unwrap());
}
