//! Suites for the dual pair (O(1,1), Sp₂(ℝ)).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{sample_rng, Suite};
use crate::cli::config::ExperimentConfig;
use crate::cli::output::{Check, DataTable, Outcome, Provenance, Recorder, ResultRecord};
use crate::error::Result;
use crate::mellin::{bilinear_pair_at, direct_inner_product, mellin_invert_with_tail, plancherel_pair, MellinTable};
use crate::numerics::testfn::{make_bump_at, make_bump_radial, TestFunction2D};
use crate::o11_rep::{
    apply_s_mode, apply_symplectic_fourier, conjugated_dilation, gamma_one, omega_s_closed_form,
    s_mode_closed_form, s_mode_eigenvalue_numeric, theta_squared, verify_s_mode_numeric, GridFunction,
    O11Element, SquareGrid, SymplecticMatrix4,
};
use crate::o11_resolvent::{capelli_apply_o11, continued_resolvent, residue_at_zero, resolvent_pair, ResolventPairing};

type C64 = Complex64;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Angularly band-limited bump inputs of the inversion check.
pub fn inversion_inputs() -> Result<Vec<(&'static str, TestFunction2D)>> {
    let r1 = make_bump_radial(2.0, 1.0)?;
    let r2 = make_bump_radial(2.5, 0.8)?;
    let r3 = make_bump_radial(1.8, 0.7)?;
    Ok(vec![
        ("radial(2,1)", r1.clone()),
        ("radial(2.5,0.8)", r2.clone()),
        ("radial(2,1)·cos2θ", r1.times_cos(2)),
        ("radial(1.8,0.7)·cos3θ", r3.times_cos(3)),
        ("radial(2.5,0.8)·(1+cosθ)", r2.plus(&r2.times_cos(1))),
    ])
}

fn annulus_point(rng: &mut ChaCha8Rng, v: &TestFunction2D) -> [f64; 2] {
    let r = rng.gen_range(v.support_inner()..v.support_outer());
    let th = rng.gen_range(0.0..2.0 * PI);
    [r * th.cos(), r * th.sin()]
}

/// Inversion of the dilation transform at the configured cutoff, with
/// reference rows at a large cutoff.
pub fn mellin_inversion(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let spectral = cfg.quadrature.with_tolerances(1e-12, 1e-10);
    let mut rng = sample_rng(cfg.seed, Suite::MellinInversion);
    let inputs = match inversion_inputs() {
        Ok(i) => i,
        Err(e) => {
            rec.push(ResultRecord::failure("inversion inputs", &e, Provenance::Paper));
            return Outcome { records: rec.into_records(), tables: vec![] };
        }
    };
    let mut worst_reference: f64 = 0.0;
    for (label, v) in &inputs {
        let table = MellinTable::new(v, cfg.k_max.max(4));
        let comp = |l: f64| Ok(table.component(c(l)));
        for j in 0..10 {
            let w = annulus_point(&mut rng, v);
            let name = format!("inversion[{label}][{j}] at Λ={}", cfg.lambda_cutoff);
            rec.record(&name, Provenance::Paper, || {
                let (value, tail) = mellin_invert_with_tail(comp, w, cfg.lambda_cutoff, &spectral)?;
                Ok(ResultRecord::compare(&name, value, v.value(w), Check::Scaled(1e-6), Provenance::Paper)
                    .with_note(format!("w = ({:.6}, {:.6}); tail over [Λ,2Λ] = {tail:.3e}", w[0], w[1])))
            });
            if j < 2 {
                let rname = format!("inversion_reference[{label}][{j}] at Λ=640");
                rec.record(&rname, Provenance::Derived, || {
                    let (value, _) = mellin_invert_with_tail(comp, w, 640.0, &spectral)?;
                    let r = ResultRecord::compare(&rname, value, v.value(w), Check::Report, Provenance::Derived);
                    worst_reference = worst_reference.max(r.abs_err.unwrap_or(0.0));
                    Ok(r.with_note("reference cutoff; informational"))
                });
            }
        }
    }
    rec.push(ResultRecord::report(
        "inversion_reference_worst_abs_err at Λ=640",
        c(worst_reference),
        Provenance::Derived,
    ));
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

/// Pairs for the Plancherel check; at least one member is angularly
/// band-limited so the spectral side is exact in `k`.
pub fn plancherel_pairs() -> Result<Vec<(&'static str, TestFunction2D, TestFunction2D)>> {
    let r = make_bump_radial(2.0, 1.0)?;
    let s = make_bump_radial(2.3, 0.8)?;
    Ok(vec![
        ("radial·radial", r.clone(), r.clone()),
        ("radial·other radial", r.clone(), s.clone()),
        ("cos2θ·ball", r.times_cos(2), make_bump_at([1.8, 0.6], 0.6)?),
        ("cosθ·ball", s.times_cos(1), make_bump_at([-1.0, 2.0], 0.7)?),
        ("mixed", r.plus(&r.times_cos(3)), s.times_cos(3).plus(&s)),
    ])
}

/// Spectral-side inner product against direct quadrature.
pub fn plancherel(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let spectral = cfg.quadrature.with_tolerances(1e-12, 1e-10);
    match plancherel_pairs() {
        Ok(pairs) => {
            for (label, u, v) in &pairs {
                let name = format!("plancherel[{label}]");
                rec.record(&name, Provenance::Paper, || {
                    let s = plancherel_pair(u, v, cfg.k_max.max(4), 640.0, &spectral)?;
                    let d = direct_inner_product(u, v, 512, &cfg.quadrature)?;
                    Ok(ResultRecord::compare(&name, s, d, Check::Relative(1e-6), Provenance::Derived)
                        .with_note("spectral side at Λ=640 vs polar quadrature"))
                });
            }
        }
        Err(e) => rec.push(ResultRecord::failure("plancherel inputs", &e, Provenance::Paper)),
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

/// Pairs for the residue at zero; the last one has mismatched parity.
pub fn residue_pairs() -> Result<Vec<(&'static str, TestFunction2D, TestFunction2D)>> {
    let r = make_bump_radial(2.0, 1.0)?;
    let s = make_bump_radial(2.5, 1.2)?;
    let odd = make_bump_at([2.0, 0.5], 0.8)?.odd_part();
    Ok(vec![
        ("radial·radial", r.clone(), r.clone()),
        ("radial·other radial", r.clone(), s.clone()),
        ("cos2θ·cos2θ", r.times_cos(2), r.times_cos(2)),
        ("cos2θ·(radial+cos2θ)", r.times_cos(2), s.plus(&s.times_cos(2))),
        ("even·odd", r.clone(), odd),
    ])
}

/// Residue of the continued resolvent at zero against `(i/2)·P(0)`.
pub fn o11_residues(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    match residue_pairs() {
        Ok(pairs) => {
            for (label, u, v) in &pairs {
                let name = format!("residue_at_zero[{label}] vs (i/2)∫v₀u₀");
                let mismatched = u.parity().times(v.parity()) == crate::numerics::testfn::Parity::Odd;
                rec.record(&name, Provenance::Paper, || {
                    let rp = ResolventPairing::new(u, v, cfg.k_max, &cfg.quadrature)?;
                    let rep = residue_at_zero(&rp, cfg.l, &cfg.quadrature)?;
                    if mismatched {
                        Ok(ResultRecord::compare(&name, rep.contour, c(0.0), Check::Absolute(1e-8), Provenance::Trivial)
                            .with_note("parity mismatch"))
                    } else {
                        let p0 = bilinear_pair_at(u, v, c(0.0), cfg.k_max, &cfg.quadrature)?;
                        let expected = C64::i() * 0.5 * p0;
                        Ok(ResultRecord::compare(&name, rep.contour, expected, Check::Relative(1e-4), Provenance::Paper))
                    }
                });
            }
        }
        Err(e) => rec.push(ResultRecord::failure("residue inputs", &e, Provenance::Paper)),
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

/// Continued vs direct resolvent in the upper half-plane, and independence of
/// the contour shift in the lower half-plane.
pub fn o11_continuation(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let mut rng = sample_rng(cfg.seed, Suite::O11Continuation);
    let mut heat = DataTable {
        name: "continued_resolvent".into(),
        columns: vec!["re_z".into(), "im_z".into(), "abs_value".into()],
        rows: vec![],
    };
    let setup = || -> Result<(ResolventPairing, ResolventPairing)> {
        let u = make_bump_radial(2.0, 1.0)?;
        let v = make_bump_radial(2.5, 1.2)?;
        let w = u.times_cos(2);
        Ok((
            ResolventPairing::new(&u, &v, cfg.k_max, &cfg.quadrature)?,
            ResolventPairing::new(&w, &w, cfg.k_max.max(2), &cfg.quadrature)?,
        ))
    };
    let (rp, rq) = match setup() {
        Ok(x) => x,
        Err(e) => {
            rec.push(ResultRecord::failure("resolvent pairings", &e, Provenance::Paper));
            return Outcome { records: rec.into_records(), tables: vec![] };
        }
    };
    let n = cfg.l;
    for j in 0..20 {
        let z = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.1..2.0));
        let name = format!("continued_vs_direct[{j}]");
        rec.record(&name, Provenance::Paper, || {
            let d = resolvent_pair(&rp, z)?;
            let cval = continued_resolvent(&rp, z, n)?;
            Ok(ResultRecord::compare(&name, cval, d, Check::Relative(1e-7), Provenance::Derived)
                .with_note(format!("z = {z:.6}, N = {n}")))
        });
    }
    let hi = n.floor() + 1.0;
    for j in 0..20 {
        let z = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-(n - 0.3)..-0.2));
        let name = format!("shift_independence[{j}]");
        rec.record(&name, Provenance::Paper, || {
            let a = continued_resolvent(&rq, z, n)?;
            let b = continued_resolvent(&rq, z, hi)?;
            Ok(ResultRecord::compare(&name, a, b, Check::Relative(1e-7), Provenance::Derived)
                .with_note(format!("z = {z:.6}, N = {n} vs {hi}")))
        });
    }
    for i in 0..=16 {
        for k in 0..=12 {
            let z = C64::new(-4.0 + 0.5 * i as f64, -(n - 0.25) + (n + 0.75) * k as f64 / 12.0 + 0.013);
            if let Ok(val) = continued_resolvent(&rp, z, n) {
                heat.rows.push(vec![z.re, z.im, val.norm()]);
            }
        }
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![heat],
    }
}

/// Eigenvalues of `s` on circle modes and the damped Bessel integrals.
pub fn s_modes(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    for k in -4..=4i64 {
        let expected = c(apply_s_mode(k) as f64);
        let name = format!("s_eigenvalue[k={k}]");
        rec.record(&name, Provenance::Paper, || {
            let e = s_mode_eigenvalue_numeric(k, 1.0, &cfg.quadrature)?;
            Ok(ResultRecord::compare(&name, e, expected, Check::Relative(1e-2), Provenance::Paper)
                .with_note("Richardson extrapolation in the damping, r = 1"))
        });
    }
    for k in -4..=4i64 {
        for t in [1.0, 0.1] {
            for r in [0.5, 1.0, 2.0] {
                let name = format!("lipschitz_hankel[k={k},t={t},r={r}]");
                rec.record(&name, Provenance::Paper, || {
                    let num = verify_s_mode_numeric(k, t, r, &cfg.quadrature)?;
                    Ok(ResultRecord::compare(&name, num, s_mode_closed_form(k, t, r), Check::Absolute(1e-8), Provenance::Paper))
                });
            }
        }
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

fn ring_bump(radius: f64, gap: f64, angle: f64) -> Result<TestFunction2D> {
    let d = radius + gap;
    make_bump_at([d * angle.cos(), d * angle.sin()], radius)
}

/// `ω₀(s)² = I`, `ω₀(s)ω₀(h_a)ω₀(s)⁻¹ = ω₀(h_{a⁻¹})`, and Θ² examples.
pub fn weil_relations(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    for (j, (r, gap, angle)) in [(3.0, 0.3, 0.0), (2.5, 0.5, 2.0)].into_iter().enumerate() {
        let name = format!("omega_s_squared_grid[{j}] rel L² error");
        rec.record(&name, Provenance::Paper, || {
            let g = SquareGrid::new(400, 10.0)?;
            let b = ring_bump(r, gap, angle)?;
            let v = GridFunction::sample(g, 10.0, |w| b.value(w))?;
            let twice = apply_symplectic_fourier(&apply_symplectic_fourier(&v, &g)?, &g)?;
            Ok(ResultRecord::compare(&name, c(twice.relative_l2_distance(&v)?), c(0.0), Check::Absolute(1e-6), Provenance::Paper))
        });
    }
    let name = "omega_s_squared_closed_form rel L² error";
    rec.record(name, Provenance::Paper, || {
        let g = SquareGrid::new(234, 6.5)?;
        let mid = SquareGrid::new(324, 9.0)?;
        let b = ring_bump(3.0, 0.3, 1.0)?;
        let v = GridFunction::sample(g, 9.0, |w| b.value(w))?;
        let twice = omega_s_closed_form(&omega_s_closed_form(&v, &mid)?, &g)?;
        Ok(ResultRecord::compare(name, c(twice.relative_l2_distance(&v)?), c(0.0), Check::Absolute(1e-6), Provenance::Paper))
    });
    for a in [0.5f64, -0.5, 2.0, -2.0, 3.0] {
        let name = format!("conjugated_dilation[a={a}] rel L² error");
        rec.record(&name, Provenance::Paper, || {
            let vg = SquareGrid::new(280, 6.5)?;
            let b = ring_bump(2.8, 0.4, 0.7)?;
            let v = GridFunction::sample(vg, 10.0, |w| b.value(w))?;
            let mid_half = 10.0 * a.abs();
            let out_half = 6.5 / a.abs();
            let n_mid = (2.0 * mid_half * (out_half + 6.5 / a.abs()) * 1.05).ceil() as usize;
            let mid = SquareGrid::new(n_mid, mid_half)?;
            let out = SquareGrid::new(128, out_half)?;
            let lhs = conjugated_dilation(&v, a, &mid, &out)?;
            let rhs = GridFunction::sample(out, 0.0, |w| b.value([a * w[0], a * w[1]]) * a.abs())?;
            Ok(ResultRecord::compare(&name, c(lhs.relative_l2_distance(&rhs)?), c(0.0), Check::Absolute(1e-6), Provenance::Paper))
        });
    }
    let name = "theta_squared(s)";
    rec.record(name, Provenance::Paper, || {
        let s = SymplecticMatrix4::from_o11(&O11Element::s())?;
        let t = theta_squared(&s);
        Ok(ResultRecord::compare(name, t.theta_squared, c(0.25), Check::Absolute(1e-12), Provenance::Paper)
            .with_note(format!("γ(1) = {:.6}, dim (s−1)W = {}, det = {}", gamma_one(), t.image_dim, t.determinant)))
    });
    let name = "|theta_squared(s)|";
    rec.record(name, Provenance::Paper, || {
        let s = SymplecticMatrix4::from_o11(&O11Element::s())?;
        Ok(ResultRecord::compare(name, c(theta_squared(&s).theta_squared.norm()), c(0.25), Check::Absolute(1e-12), Provenance::Paper))
    });
    let name = "theta_squared(1)";
    rec.record(name, Provenance::Paper, || {
        let t = theta_squared(&SymplecticMatrix4::identity());
        Ok(ResultRecord::compare(name, t.theta_squared, C64::new(0.0, -1.0), Check::Absolute(1e-12), Provenance::Paper))
    });
    let name = "theta_squared(-1)";
    rec.record(name, Provenance::Paper, || {
        let t = theta_squared(&SymplecticMatrix4::minus_identity());
        Ok(ResultRecord::compare(name, t.theta_squared, C64::from_polar(1.0 / 16.0, 1.5 * PI), Check::Absolute(1e-12), Provenance::Paper))
    });
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

/// `ω₀(C) = (E+1)²` acts on homogeneous functions of degree `−1−iλ` by `λ²`.
pub fn o11_capelli(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    for (lambda, k) in [(0.0, 0i64), (1.5, 2), (-2.0, 1), (0.7, -3), (3.2, 4)] {
        let f = match TestFunction2D::new(
            move |w: [f64; 2]| {
                let r = w[0].hypot(w[1]);
                crate::mellin::radial_factor(c(lambda), r) * C64::from_polar(1.0, k as f64 * w[1].atan2(w[0]))
            },
            0.5,
            4.0,
            crate::numerics::testfn::Parity::Mixed,
        ) {
            Ok(f) => f,
            Err(e) => {
                rec.push(ResultRecord::failure("homogeneous sample", &e, Provenance::Paper));
                continue;
            }
        };
        let cf = capelli_apply_o11(&f);
        for (j, w) in [[1.0, 0.3], [-1.2, 1.9], [0.1, -2.0]].into_iter().enumerate() {
            let name = format!("capelli_o11[λ={lambda},k={k}][{j}]");
            rec.record(&name, Provenance::Paper, || {
                Ok(ResultRecord::compare(&name, cf.value(w), f.value(w) * lambda * lambda, Check::Absolute(1e-8), Provenance::Paper))
            });
        }
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}
