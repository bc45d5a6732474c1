//! Resolvent of `C⁺ = −(E+1)²` (with `E = x∂x + y∂y`) on `L²(ℝ²)`, its
//! meromorphic continuation across the continuous spectrum, and the residue
//! at the single resonance `z = 0`.
//!
//! With the fibrewise bilinear pairing `P(λ) = ∫_{S¹} v_λ u_{−λ} dσ`,
//!
//! ```text
//! ((C⁺ − z²)⁻¹ v)(u) = (1/2π) ∫_ℝ P(λ) / (λ² − z²) dλ                 (Im z > 0)
//!                    = −(1/4πz) [ ∫_{ℝ−iN} P/(z−λ) + ∫_{ℝ+iN} P/(z+λ) ]  (Im z > −N)
//! ```
//!
//! and the only pole of the continuation is `z = 0`, with residue `(i/2)P(0)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mellin::{circle_bilinear, BilinearPairing, MellinTable};
use crate::numerics::contour::residue_on_circle;
use crate::numerics::quadrature::{integrate_adaptive_on, FixedRule, QuadratureConfig};
use crate::numerics::testfn::TestFunction2D;

type C64 = Complex64;

/// Half-width of the finely panelled band of every line table.
const BAND: f64 = 20.0;
/// Panel width inside the band.
const BAND_PANEL: f64 = 0.125;
/// Panel width outside the band.
const FAR_PANEL: f64 = 2.0;
/// Gauss–Legendre order per line panel.
const LINE_ORDER: usize = 16;
/// Smallest distance between an evaluation point and an integration line.
pub const CONTOUR_TOLERANCE: f64 = 1e-3;

/// `−(E+1)² v` where `E = x∂x + y∂y`, using
/// `(E+1)ⁿ v(w) = (d/dt)ⁿ [eᵗ v(eᵗ w)]` at `t = 0`, evaluated by a fourth-order
/// central difference with one Richardson step.
pub fn capelli_apply_o11(v: &TestFunction2D) -> TestFunction2D {
    let inner = v.clone();
    let value = move |w: [f64; 2]| -> C64 {
        let g = |t: f64| {
            let e = t.exp();
            inner.value([e * w[0], e * w[1]]) * e
        };
        let d2 = |h: f64| {
            (-g(2.0 * h) + g(h) * 16.0 - g(0.0) * 30.0 + g(-h) * 16.0 - g(-2.0 * h)) / (12.0 * h * h)
        };
        let h = 2e-3;
        let coarse = d2(h);
        let fine = d2(0.5 * h);
        // Error of the stencil is O(h⁴): eliminate the leading term.
        -(fine * 16.0 - coarse) / 15.0
    };
    // Dilations by e^{±2h} can move mass across the support boundary only
    // where the function and all derivatives already vanish.
    TestFunction2D::new(value, v.support_inner(), v.support_outer(), v.parity())
        .expect("support of the input is valid")
}

/// Values of the pairing on a horizontal line `Im λ = offset`, cached on a
/// composite Gauss–Legendre grid of `[−cutoff, cutoff]`.
#[derive(Debug, Clone)]
pub struct LineTable {
    offset: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<C64>,
}

impl LineTable {
    fn build<F: Fn(C64) -> C64 + Sync>(f: &F, offset: f64, cutoff: f64) -> Self {
        let mut breaks = Vec::new();
        let band = BAND.min(cutoff);
        let far_panels = ((cutoff - band) / FAR_PANEL).ceil() as usize;
        for i in (1..=far_panels).rev() {
            breaks.push(-(band + (cutoff - band) * i as f64 / far_panels as f64));
        }
        let band_panels = (2.0 * band / BAND_PANEL).round() as usize;
        for i in 0..=band_panels {
            breaks.push(-band + 2.0 * band * i as f64 / band_panels as f64);
        }
        for i in 1..=far_panels {
            breaks.push(band + (cutoff - band) * i as f64 / far_panels as f64);
        }
        let rule = FixedRule::composite_gauss_on(&breaks, LINE_ORDER);
        let values = rule
            .nodes
            .par_iter()
            .map(|&x| f(C64::new(x, offset)))
            .collect();
        Self {
            offset,
            nodes: rule.nodes,
            weights: rule.weights,
            values,
        }
    }

    /// The table of the mirrored line `Im λ = −offset` of an even function,
    /// using `P(x − ia) = P(−x + ia)` and the symmetry of the grid.
    fn mirrored(&self) -> Self {
        Self {
            offset: -self.offset,
            nodes: self.nodes.iter().rev().map(|x| -x).collect(),
            weights: self.weights.iter().rev().copied().collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// Imaginary part of the line.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// True when a kernel with a simple pole at `p` is resolved by the grid.
    pub fn resolves_pole(&self, p: C64) -> bool {
        let d = (p.im - self.offset).abs();
        if p.re.abs() < BAND - 1.0 {
            d >= 0.8 * BAND_PANEL
        } else {
            d >= 0.8 * FAR_PANEL
        }
    }

    /// `∫ P(λ) K(λ) dλ` along the line.
    pub fn integrate<K: Fn(C64) -> C64>(&self, kernel: K) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((&x, &w), &p)| p * kernel(C64::new(x, self.offset)) * w)
            .sum()
    }
}

/// The pairing data of a resolvent matrix element `((C⁺ − z²)⁻¹ v)(u)`.
///
/// The stored function is the even part `(P(λ) + P(−λ))/2` of the bilinear
/// fibre pairing; the resolvent kernel `(λ² − z²)⁻¹` is even, so this does
/// not change any resolvent value, while making evenness structural.
pub struct ResolventPairing {
    pairing: BilinearPairing,
    pw_type: f64,
    cutoff: f64,
    quad: QuadratureConfig,
    lines: RwLock<HashMap<u64, Arc<LineTable>>>,
}

impl std::fmt::Debug for ResolventPairing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResolventPairing")
            .field("pw_type", &self.pw_type)
            .field("cutoff", &self.cutoff)
            .finish_non_exhaustive()
    }
}

/// Relative size of the pairing beyond the spectral cutoff. The resolvent
/// kernel adds a further `λ⁻²`, so the truncation error is far smaller.
pub const CUTOFF_TAIL: f64 = 1e-13;
/// Largest spectral cutoff considered.
const MAX_CUTOFF: f64 = 1200.0;

impl ResolventPairing {
    /// Builds the pairing for `u`, `v` with `k_max` circle modes.
    ///
    /// The spectral cutoff is chosen as the smallest `Λ = 40·2^j` beyond which
    /// the pairing stays below [`CUTOFF_TAIL`] times its peak on the real axis.
    pub fn new(u: &TestFunction2D, v: &TestFunction2D, k_max: usize, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let probe = BilinearPairing::from_tables(
            MellinTable::with_grid(u, k_max, 96, 16),
            MellinTable::with_grid(v, k_max, 96, 16),
        );
        let peak = (0..40)
            .map(|i| even_part(&probe, C64::new(i as f64 * 0.25, 0.0)).norm())
            .fold(0.0, f64::max);
        let mut cutoff = 40.0;
        if peak > 0.0 {
            while cutoff < MAX_CUTOFF {
                let tail = (0..16)
                    .map(|i| even_part(&probe, C64::new(cutoff * (1.0 + i as f64 / 16.0), 0.0)).norm())
                    .fold(0.0, f64::max);
                if tail <= CUTOFF_TAIL * peak {
                    break;
                }
                cutoff *= 2.0;
            }
        }
        cutoff = cutoff.min(MAX_CUTOFF);
        let width = |t: &TestFunction2D| (t.support_outer() / t.support_inner()).ln();
        let periods = (width(u).max(width(v)) * cutoff / (2.0 * PI)).ceil() as usize;
        let panels = (2 * periods).max(64);
        let pairing = BilinearPairing::from_tables(
            MellinTable::with_grid(u, k_max, panels, 16),
            MellinTable::with_grid(v, k_max, panels, 16),
        );
        let pw_type = pairing.pw_type();
        Ok(Self {
            pairing,
            pw_type,
            cutoff,
            quad: *cfg,
            lines: RwLock::new(HashMap::new()),
        })
    }

    /// The (symmetrised) pairing function at complex `λ`.
    pub fn pairing_fn(&self, lambda: C64) -> C64 {
        even_part(&self.pairing, lambda)
    }

    /// The raw bilinear pairing `∫ v_λ u_{−λ} dσ` (not symmetrised).
    pub fn raw_pairing(&self, lambda: C64) -> C64 {
        self.pairing.at(lambda)
    }

    /// Exponential type of the pairing function.
    pub fn pw_type(&self) -> f64 {
        self.pw_type
    }

    /// Spectral truncation used on every line.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// The cached table for the line `Im λ = offset`.
    pub fn line(&self, offset: f64) -> Arc<LineTable> {
        let key = offset.to_bits();
        if let Some(t) = self.lines.read().expect("line cache poisoned").get(&key) {
            return Arc::clone(t);
        }
        let table = if offset < 0.0 {
            Arc::new(self.line(-offset).mirrored())
        } else {
            Arc::new(LineTable::build(&|l| self.pairing_fn(l), offset, self.cutoff))
        };
        self.lines
            .write()
            .expect("line cache poisoned")
            .entry(key)
            .or_insert(table)
            .clone()
    }

    /// `∫_{ℝ + i·offset} P(λ)/(λ − p) dλ`, from the cached table when the
    /// pole is resolved and by adaptive quadrature otherwise.
    fn cauchy_line(&self, offset: f64, p: C64) -> Result<C64> {
        let table = self.line(offset);
        if table.resolves_pole(p) {
            return Ok(table.integrate(|l| 1.0 / (l - p)));
        }
        let f = |x: f64| {
            let l = C64::new(x, offset);
            self.pairing_fn(l) / (l - p)
        };
        let mut breaks = vec![-self.cutoff, self.cutoff];
        for b in [p.re - 1.0, p.re, p.re + 1.0] {
            if b.abs() < self.cutoff {
                breaks.push(b);
            }
        }
        let step = 8.0;
        let mut x = -self.cutoff + step;
        while x < self.cutoff {
            breaks.push(x);
            x += step;
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        integrate_adaptive_on(&f, &breaks, &self.quad).map(|(v, _)| v)
    }
}

fn even_part(p: &BilinearPairing, lambda: C64) -> C64 {
    0.5 * (p.at(lambda) + p.at(-lambda))
}

/// `(1/2π)∫_ℝ P(λ)/(λ² − z²) dλ` for `Im z > 0`.
pub fn resolvent_pair(rp: &ResolventPairing, z: C64) -> Result<C64> {
    if !(z.im > 0.0) {
        return Err(Error::DomainError(format!(
            "the direct resolvent needs Im z > 0, got z = {z}"
        )));
    }
    // 1/(λ²−z²) = (1/2z)(1/(λ−z) − 1/(λ+z)).
    let a = rp.cauchy_line(0.0, z)?;
    let b = rp.cauchy_line(0.0, -z)?;
    Ok((a - b) / (2.0 * z) / (2.0 * PI))
}

/// Partial-fraction form `−(1/2z)(1/2π)∫_ℝ (1/(z−λ) + 1/(z+λ)) P(λ) dλ` of the
/// direct resolvent, evaluated by adaptive quadrature without the line cache.
pub fn resolvent_pair_partial_fractions(rp: &ResolventPairing, z: C64, cfg: &QuadratureConfig) -> Result<C64> {
    if !(z.im > 0.0) {
        return Err(Error::DomainError(format!(
            "the direct resolvent needs Im z > 0, got z = {z}"
        )));
    }
    // The integrand is even in λ: integrate over [0, Λ] and double.
    let f = |x: f64| {
        let l = C64::new(x, 0.0);
        (1.0 / (z - l) + 1.0 / (z + l)) * rp.pairing_fn(l) * 2.0
    };
    let c = rp.cutoff();
    let mut breaks: Vec<f64> = (0..=((c / 2.0).ceil() as usize)).map(|i| (2.0 * i as f64).min(c)).collect();
    if z.re.abs() < c {
        breaks.push(z.re.abs());
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let (v, _) = integrate_adaptive_on(&f, &breaks, cfg)?;
    Ok(-v / (2.0 * z) / (2.0 * PI))
}

/// Meromorphic continuation
/// `−(1/4πz)[∫_{ℝ−iN} P/(z−λ) dλ + ∫_{ℝ+iN} P/(z+λ) dλ]`, valid for
/// `Im z > −N`, `z ≠ 0`.
pub fn continued_resolvent(rp: &ResolventPairing, z: C64, n: f64) -> Result<C64> {
    if !(n > 0.0) {
        return Err(Error::DomainError(format!("line shift N must be positive, got {n}")));
    }
    if z == C64::new(0.0, 0.0) {
        return Err(Error::PoleProximity {
            point: z,
            pole: z,
            distance: 0.0,
        });
    }
    let distance = (z.im + n).abs();
    if distance < CONTOUR_TOLERANCE {
        return Err(Error::ContourCollision {
            point: z,
            distance,
            contour: format!("Im λ = ±{n}"),
        });
    }
    if z.im < -n {
        return Err(Error::DomainError(format!(
            "the continuation with N = {n} is valid only for Im z > −N, got z = {z}"
        )));
    }
    // ∫ P/(z−λ) = −∫ P/(λ−z);  ∫ P/(z+λ) = ∫ P/(λ−(−z)).
    let lower = -rp.cauchy_line(-n, z)?;
    let upper = rp.cauchy_line(n, -z)?;
    Ok(-(lower + upper) / (4.0 * PI * z))
}

/// Residue at `z = 0`, computed as `(1/2πi)∮` of the continuation over a circle
/// of radius `0.25·N` and cross-checked against `(i/2)·P(0)`.
pub fn residue_at_zero(rp: &ResolventPairing, n: f64, cfg: &QuadratureConfig) -> Result<ResidueReport> {
    let radius = 0.25 * n;
    let contour = residue_on_circle(
        |z| continued_resolvent(rp, z, n).unwrap_or(C64::new(f64::NAN, f64::NAN)),
        C64::new(0.0, 0.0),
        radius,
        cfg,
    )?;
    if !contour.re.is_finite() || !contour.im.is_finite() {
        return Err(Error::NonConvergence {
            estimate: f64::NAN,
            error: f64::NAN,
            subdivisions: 0,
        });
    }
    let closed_form = C64::i() * 0.5 * rp.raw_pairing(C64::new(0.0, 0.0));
    let scale = contour.norm().max(closed_form.norm());
    let relative = if scale == 0.0 { 0.0 } else { (contour - closed_form).norm() / scale };
    let absolute = (contour - closed_form).norm();
    if relative > 1e-4 && absolute > 1e-10 {
        return Err(Error::CrossCheckFailure {
            first: contour,
            second: closed_form,
            relative,
        });
    }
    Ok(ResidueReport {
        contour,
        closed_form,
        relative,
    })
}

/// Both residue evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueReport {
    /// `(1/2πi)∮` over the circle.
    pub contour: C64,
    /// `(i/2)∫_{S¹} v₀ u₀ dσ`.
    pub closed_form: C64,
    /// Relative difference.
    pub relative: f64,
}

/// `(i/2)∫_{S¹} v₀ u₀ dσ` from precomputed λ = 0 components.
pub fn residue_closed_form(v0: &crate::mellin::HomogeneousComponent, u0: &crate::mellin::HomogeneousComponent) -> C64 {
    C64::i() * 0.5 * circle_bilinear(v0, u0)
}
