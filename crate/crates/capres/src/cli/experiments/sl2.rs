//! Suites for the dual pair (Sp₂(ℝ), O_{p,p}).

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;

use super::{sample_rng, Suite};
use crate::cli::config::ExperimentConfig;
use crate::cli::output::{Check, DataTable, Outcome, Provenance, Recorder, ResultRecord};
use crate::error::Result;
use crate::numerics::pw::{make_even_pw, EvenPWFunction};
use crate::sl2::casimir::{capelli_identity_check, default_trial_functions};
use crate::sl2::group::{stable_range_table, KTypeBlock, StableRangeGroup};
use crate::sl2::ktype::{ktype_project, KTypeConfig, ResidueFormConfig, ResidueForms};
use crate::sl2::model::{ModelResolvent, Resonance};
use crate::sl2::orbital::{GroupFunction, OrbitalProfile};
use crate::sl2::testfn::{ColumnProduct, DiskBump, TestFunctionM2p};

type C64 = Complex64;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Synthetic channel functions of the model checks.
pub fn synthetic_channels() -> Result<(EvenPWFunction, EvenPWFunction)> {
    Ok((make_even_pw(1.0)?, make_even_pw(0.7)?))
}

/// Expected resonances `{−in : 0 ≤ n < L}` restricted to the nonzero channels.
fn expected_poles(l: f64, tanh: bool, coth: bool) -> Vec<u32> {
    (0..)
        .take_while(|&n| (n as f64) < l)
        .filter(|n| if n % 2 == 1 { tanh } else { coth })
        .collect()
}

fn pole_records(tag: &str, found: &[Resonance], expected: &[u32], model: &ModelResolvent) -> Vec<ResultRecord> {
    let mut out = vec![ResultRecord::compare(
        format!("{tag}: pole_count"),
        c(found.len() as f64),
        c(expected.len() as f64),
        Check::Exact,
        Provenance::Paper,
    )
    .with_note(format!(
        "found [{}]",
        found.iter().map(|r| format!("{:.8}", r.z0)).collect::<Vec<_>>().join(", ")
    ))];
    for &n in expected {
        let target = C64::new(0.0, -(n as f64));
        let name = format!("{tag}: pole at -{n}i");
        match found.iter().min_by(|a, b| (a.z0 - target).norm().total_cmp(&(b.z0 - target).norm())) {
            Some(r) => {
                out.push(ResultRecord::compare(&name, r.z0, target, Check::Absolute(1e-6), Provenance::Paper));
                out.push(ResultRecord::compare(
                    format!("{tag}: residue at -{n}i"),
                    r.residue,
                    model.residue_closed_form(n),
                    Check::Relative(1e-6),
                    Provenance::Paper,
                ));
            }
            None => out.push(
                ResultRecord::compare(&name, c(f64::NAN), target, Check::Absolute(1e-6), Provenance::Paper)
                    .with_note("no pole found"),
            ),
        }
    }
    out
}

/// One argument-principle scan with its records.
fn scan(rec: &mut Recorder, cfg: &ExperimentConfig, tag: &str, f0: EvenPWFunction, f1: EvenPWFunction) {
    let expected = expected_poles(cfg.l, !f0.is_zero(), !f1.is_zero());
    rec.record_many(tag, Provenance::Paper, || {
        let model = ModelResolvent::new(f0, f1, cfg.model)?;
        let found = model.locate_resonances(cfg.l)?;
        Ok(pole_records(tag, &found, &expected, &model))
    });
}

/// Model resolvent: continuation on the strip, pole set and residues with
/// both channels active.
pub fn sl2_model(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let (f0, f1) = match synthetic_channels() {
        Ok(x) => x,
        Err(e) => {
            rec.push(ResultRecord::failure("channels", &e, Provenance::Paper));
            return Outcome { records: rec.into_records(), tables: vec![] };
        }
    };
    scan(&mut rec, cfg, "both channels", f0.clone(), f1.clone());
    let model = match ModelResolvent::new(f0, f1, cfg.model) {
        Ok(m) => m,
        Err(e) => {
            rec.push(ResultRecord::failure("model", &e, Provenance::Paper));
            return Outcome { records: rec.into_records(), tables: vec![] };
        }
    };
    for n in expected_poles(cfg.l, true, true) {
        let name = format!("contour residue at -{n}i");
        rec.record(&name, Provenance::Paper, || {
            let r = model.residue(n, cfg.l)?;
            Ok(ResultRecord::compare(&name, r, model.residue_closed_form(n), Check::Relative(1e-6), Provenance::Paper)
                .with_note(if n == 0 { "(i/4π) f₁(0)" } else { "(i/2π) f_ε(in)" }))
        });
    }
    let mut rng = sample_rng(cfg.seed, Suite::Sl2Model);
    for j in 0..20 {
        let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..0.9));
        let name = format!("continued_vs_direct[{j}]");
        rec.record(&name, Provenance::Paper, || {
            let a = model.continued(z, cfg.l)?;
            let b = model.direct(z)?;
            Ok(ResultRecord::compare(&name, a, b, Check::Relative(1e-8), Provenance::Derived)
                .with_note(format!("z = {z:.6}")))
        });
    }
    let mut heat = DataTable {
        name: "continued_resolvent".into(),
        columns: vec!["re_z".into(), "im_z".into(), "abs_value".into()],
        rows: vec![],
    };
    for i in 0..=20 {
        for k in 0..=24 {
            let z = C64::new(-2.0 + 0.2 * i as f64 + 0.013, 0.9 - (cfg.l + 0.6) * k as f64 / 24.0 + 0.017);
            if z.im <= -cfg.l + 0.1 {
                continue;
            }
            if let Ok(v) = model.continued(z, cfg.l) {
                heat.rows.push(vec![z.re, z.im, v.norm()]);
            }
        }
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![heat],
    }
}

/// Scans with one channel, with both, and with an engineered zero `f₀(i) = 0`.
pub fn resonance_scan(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let (f0, f1) = match synthetic_channels() {
        Ok(x) => x,
        Err(e) => {
            rec.push(ResultRecord::failure("channels", &e, Provenance::Paper));
            return Outcome { records: rec.into_records(), tables: vec![] };
        }
    };
    scan(&mut rec, cfg, "tanh channel (f1=0)", f0.clone(), EvenPWFunction::zero());
    scan(&mut rec, cfg, "coth channel (f0=0)", EvenPWFunction::zero(), f1.clone());
    scan(&mut rec, cfg, "both channels", f0.clone(), f1);
    // f₀ = g₁ − (g₁(i)/g₂(i))·g₂ vanishes at i, removing the pole at −i.
    rec.record_many("engineered zero", Provenance::Derived, || {
        let g2 = make_even_pw(0.5)?;
        let i = C64::i();
        let engineered = f0.combine(c(1.0), &g2, -f0.value(i) / g2.value(i));
        let model = ModelResolvent::new(engineered, EvenPWFunction::zero(), cfg.model)?;
        let found = model.locate_resonances(cfg.l)?;
        let expected: Vec<u32> = expected_poles(cfg.l, true, false).into_iter().filter(|&n| n != 1).collect();
        Ok(pole_records("engineered f0(i)=0", &found, &expected, &model))
    });
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

fn bump(center: [f64; 2], radius: f64) -> DiskBump {
    DiskBump { center, radius }
}

/// The test pair on `M_{2,2}` used by the end-to-end checks. The last term of
/// `v` overlaps `−u`, so that `ψ(−g)` and hence `f₀ − f₁` are not negligible.
pub fn endtoend_pair() -> Result<(TestFunctionM2p, TestFunctionM2p)> {
    let u = TestFunctionM2p::from_column_products(vec![
        ColumnProduct {
            weight: c(1.0),
            columns: vec![bump([1.5, 0.0], 0.6), bump([0.0, 1.5], 0.6)],
        },
        ColumnProduct {
            weight: C64::new(0.3, 0.2),
            columns: vec![bump([1.0, 1.0], 0.5), bump([-1.2, 0.8], 0.5)],
        },
    ])?;
    let v = TestFunctionM2p::from_column_products(vec![
        ColumnProduct {
            weight: C64::new(0.8, -0.4),
            columns: vec![bump([1.3, 0.5], 0.7), bump([-0.4, 1.4], 0.7)],
        },
        ColumnProduct {
            weight: c(0.6),
            columns: vec![bump([-1.4, 0.2], 0.6), bump([0.1, -1.5], 0.6)],
        },
    ])?;
    Ok((u, v))
}

/// `f_ε` from orbital integrals, its evenness, and the residue at `−i` of the
/// continued resolvent built from it.
pub fn sl2_endtoend(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let mut tables = Vec::new();
    let mut profile = None;
    rec.record_many("orbital profile", Provenance::Derived, || {
        let (u, v) = endtoend_pair()?;
        let psi = GroupFunction::from_pair(&u, &v, &cfg.orbital.psi)?;
        let p = OrbitalProfile::build(&psi, &cfg.orbital)?;
        let out = vec![ResultRecord::compare(
            "orbital profile t↔−t defect",
            c(p.symmetry_defect()),
            c(0.0),
            Check::Absolute(1e-4),
            Provenance::Paper,
        )
        .with_note(format!("type bound ln B = {:.6}", p.type_bound()))];
        profile = Some(p);
        Ok(out)
    });
    let Some(profile) = profile else {
        return Outcome { records: rec.into_records(), tables };
    };
    for eps in [0u8, 1] {
        for k in 0..=20 {
            let l = k as f64;
            let name = format!("f{eps} evenness at λ={l}");
            rec.record(&name, Provenance::Paper, || {
                let a = profile.f_epsilon(eps, c(l))?;
                let b = profile.f_epsilon(eps, c(-l))?;
                Ok(ResultRecord::compare(&name, a, b, Check::Relative(1e-2), Provenance::Paper))
            });
        }
    }
    let name = "f0 and f1 differ at λ=0";
    rec.record(name, Provenance::Derived, || {
        let a = profile.f_epsilon(0, c(0.0))?;
        let b = profile.f_epsilon(1, c(0.0))?;
        Ok(ResultRecord::report(name, c((a - b).norm() / a.norm()), Provenance::Derived).with_note("relative difference |f0−f1|/|f0|"))
    });
    let name = "end-to-end residue at -i vs (i/2π) f0(i)";
    rec.record(name, Provenance::Paper, || {
        let model = ModelResolvent::new(profile.to_even_pw(0)?, profile.to_even_pw(1)?, cfg.model)?;
        let r = model.residue(1, cfg.l)?;
        let expected = C64::i() / (2.0 * PI) * profile.f_epsilon(0, C64::i())?;
        Ok(ResultRecord::compare(name, r, expected, Check::Relative(5e-2), Provenance::Paper))
    });
    let name = "end-to-end continued vs direct at z=0.3+0.5i";
    rec.record(name, Provenance::Derived, || {
        let model = ModelResolvent::new(profile.to_even_pw(0)?, profile.to_even_pw(1)?, cfg.model)?;
        let z = C64::new(0.3, 0.5);
        Ok(ResultRecord::compare(name, model.continued(z, cfg.l)?, model.direct(z)?, Check::Relative(1e-4), Provenance::Derived))
    });
    let mut sweep = DataTable {
        name: "f_epsilon_sweep".into(),
        columns: ["lambda", "f0_re", "f0_im", "f1_re", "f1_im"].iter().map(|s| s.to_string()).collect(),
        rows: vec![],
    };
    for k in 0..=80 {
        let l = 0.5 * k as f64;
        if let (Ok(a), Ok(b)) = (profile.f_epsilon(0, c(l)), profile.f_epsilon(1, c(l))) {
            sweep.rows.push(vec![l, a.re, a.im, b.re, b.im]);
        }
    }
    tables.push(sweep);
    Outcome {
        records: rec.into_records(),
        tables,
    }
}

/// Idempotence and orthogonality of K-type projections, hermitian symmetry
/// and block additivity of the residue forms.
pub fn ktype_algebra(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let (u, v) = match endtoend_pair() {
        Ok(x) => x,
        Err(e) => {
            rec.push(ResultRecord::failure("test pair", &e, Provenance::Paper));
            return Outcome { records: rec.into_records(), tables: vec![] };
        }
    };
    let small = KTypeConfig {
        k_nodes: 32,
        tau_nodes: 16,
    };
    let mut rng = sample_rng(cfg.seed, Suite::KTypes);
    let points: Vec<Vec<f64>> = (0..4)
        .map(|_| vec![rng.gen_range(0.9..1.6), rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), rng.gen_range(0.9..1.6)])
        .collect();
    for (m, mp) in [(1i64, 1i64), (1, 3), (1, -1), (0, 0), (0, 2)] {
        let name = format!("P_{mp}∘P_{m}");
        rec.record_many(&name, Provenance::Trivial, || {
            let pm = ktype_project(&u, m, &small)?;
            let pmp = ktype_project(&pm, mp, &small)?;
            Ok(points
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    let expected = if m == mp { pm.value(x) } else { c(0.0) };
                    ResultRecord::compare(format!("{name}[{j}]"), pmp.value(x), expected, Check::Absolute(1e-8), Provenance::Trivial)
                })
                .collect())
        });
    }
    let rcfg = ResidueFormConfig {
        orbital: cfg.orbital,
        ktype: cfg.ktype,
    };
    let mut forms = None;
    rec.record_many("residue forms", Provenance::Paper, || {
        forms = Some((ResidueForms::new(&u, &v, &rcfg)?, ResidueForms::new(&v, &u, &rcfg)?));
        Ok(vec![])
    });
    let Some((a, b)) = forms else {
        return Outcome { records: rec.into_records(), tables: vec![] };
    };
    for (eps, n) in [(0u8, 1i64), (1, 0), (1, 2), (0, 3)] {
        let name = format!("hermitian (u,v)_{{{eps},{n}}} vs conj (v,u)");
        rec.record(&name, Provenance::Paper, || {
            Ok(ResultRecord::compare(&name, a.full(eps, n)?, b.full(eps, n)?.conj(), Check::Relative(1e-6), Provenance::Paper))
        });
    }
    for (eps, n) in [(0u8, 1i64), (1, 2), (0, 3), (1, 0)] {
        let name = format!("additivity (u,v)_{{{eps},{n}}}: lower+finite+upper vs full");
        rec.record(&name, Provenance::Paper, || {
            let full = a.full(eps, n)?;
            let mut sum = c(0.0);
            for block in KTypeBlock::PARTS {
                sum += a.block(eps, n, block)?;
            }
            Ok(ResultRecord::compare(&name, sum, full, Check::Relative(1e-5), Provenance::Paper))
        });
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

/// `(ω₀(C′) − ω₀(C))u = c·u` with `c = −(p−1)² + 1`.
pub fn capelli_shift(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let p = cfg.p;
    let mut rng = sample_rng(cfg.seed, Suite::Capelli);
    let points: Vec<Vec<f64>> = (0..8).map(|_| (0..2 * p).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
    rec.record_many("capelli identity", Provenance::Paper, || {
        let report = capelli_identity_check(p, &default_trial_functions(p, 10), &points)?;
        let mut out = vec![
            ResultRecord::compare(
                format!("capelli p={p}: ratio spread over {} trial functions", report.trials),
                c(report.ratio_spread),
                c(0.0),
                Check::Absolute(1e-8),
                Provenance::Paper,
            ),
            ResultRecord::compare(
                format!("capelli p={p}: fitted constant vs −(p−1)²+1"),
                c(report.fitted_constant),
                c(report.target),
                Check::Absolute(1e-8),
                Provenance::Paper,
            ),
        ];
        if let Some((num, den)) = report.symbolic_constant {
            out.push(
                ResultRecord::rational(
                    format!("capelli p={p}: symbolic constant"),
                    Ratio::new(num, den),
                    Ratio::from_integer(-((p as i64 - 1).pow(2)) + 1),
                    Provenance::Paper,
                ),
            );
        }
        Ok(out)
    });
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}

/// The three rows of the stable-range table.
pub fn stable_range(cfg: &ExperimentConfig) -> Outcome {
    let mut rec = Recorder::new(cfg.timing);
    let rows = [
        ("Sp2n(n=1) with O(2,2)", StableRangeGroup::Sp2n { n: 1, p: 2 }, Ratio::from_integer(2), Ratio::new(3, 2), true),
        ("O(1,1) with Sp2n(n=2)", StableRangeGroup::Opp { p: 1, n: 2 }, Ratio::from_integer(1), Ratio::from_integer(4), true),
        ("Sp2n(n=2) with O(2,2)", StableRangeGroup::Sp2n { n: 2, p: 2 }, Ratio::from_integer(4), Ratio::new(3, 4), false),
    ];
    for (label, group, r1, lmax, holds) in rows {
        rec.record_many(label, Provenance::Paper, || {
            let row = stable_range_table(group)?;
            Ok(vec![
                ResultRecord::rational(format!("{label}: r−1"), row.r_minus_1, r1, Provenance::Paper),
                ResultRecord::rational(format!("{label}: λ_max"), row.lambda_max, lmax, Provenance::Paper),
                ResultRecord::compare(
                    format!("{label}: stable-range condition"),
                    c(f64::from(u8::from(row.condition_holds))),
                    c(f64::from(u8::from(holds))),
                    Check::Exact,
                    Provenance::Trivial,
                ),
            ])
        });
    }
    Outcome {
        records: rec.into_records(),
        tables: vec![],
    }
}
