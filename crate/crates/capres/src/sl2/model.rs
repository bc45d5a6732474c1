//! The model resolvent
//!
//! ```text
//! R(z) = (1/8π)[∫_ℝ f₀(λ) λtanh(πλ/2)/(λ²−z²) dλ + ∫_ℝ f₁(λ) λcoth(πλ/2)/(λ²−z²) dλ]
//! ```
//!
//! for even Paley–Wiener channel functions `f₀, f₁`, its meromorphic
//! continuation to `Im z > −L` by shifting the spectral lines to `ℝ + iL`, the
//! resonances at `z = −in` and their residues.
//!
//! Continued channels (valid for `−L < Im z < 1`):
//!
//! ```text
//! T(z) = ∫_{ℝ+iL} f₀ tanh/(λ+z) + 4i Σ_{0<2k+1<L} f₀((2k+1)i)/((2k+1)i+z)
//! K(z) = ½∫_{ℝ+i} f₁ coth/(λ−z) + ½∫_{ℝ+iL} f₁ coth/(λ+z) + F_L(z)
//!        + 2i f₁(0)/z + 4i Σ_{0<2k<L} f₁(2ki)/(2ki+z)
//! F_L(z) = iπ f₁(z) coth(πz/2) − 2i Σ_{0≤2k<L} f₁(2ki)/(2ki+z)
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::contour::residue_on_circle;
use crate::numerics::pw::EvenPWFunction;
use crate::numerics::quadrature::{integrate_adaptive_on, FixedRule, QuadratureConfig};
use crate::sl2::group::{lambda_coth, lambda_tanh, stable_tanh};

type C64 = Complex64;

/// Distance from a resonance `−in` below which continued evaluation is
/// refused.
pub const POLE_TOLERANCE: f64 = 0.05;
/// Radius of residue circles.
pub const RESIDUE_RADIUS: f64 = 0.1;
/// Distance from an integration line below which evaluation is refused.
pub const LINE_TOLERANCE: f64 = 1e-3;

/// Half-width of the finely panelled band of each line table.
const BAND: f64 = 20.0;
/// Panel width inside the band.
const BAND_PANEL: f64 = 0.125;
/// Panel width outside the band.
const FAR_PANEL: f64 = 8.0;
/// Gauss–Legendre order per panel.
const LINE_ORDER: usize = 16;

/// Numerical parameters of the model resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Quadrature tolerances for adaptive fall-backs and residue circles.
    pub quad: QuadratureConfig,
    /// Relative size of a line integrand beyond the spectral cutoff.
    pub tail: f64,
    /// Largest spectral cutoff.
    pub max_cutoff: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            tail: 1e-13,
            max_cutoff: 2560.0,
        }
    }
}

impl ModelConfig {
    /// Validates the fields.
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if !(self.tail > 0.0 && self.tail < 1.0) {
            return Err(Error::InvalidConfig(format!("tail must lie in (0,1), got {}", self.tail)));
        }
        if !(self.max_cutoff >= 40.0) {
            return Err(Error::InvalidConfig(format!(
                "max_cutoff must be at least 40, got {}",
                self.max_cutoff
            )));
        }
        Ok(())
    }
}

/// Which weighted channel function a line table stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Weight {
    /// `f₀(λ) λ tanh(πλ/2)` (direct resolvent).
    LambdaTanh,
    /// `f₁(λ) λ coth(πλ/2)` (direct resolvent).
    LambdaCoth,
    /// `f₀(λ) tanh(πλ/2)` (continued tanh channel).
    Tanh,
    /// `f₁(λ) coth(πλ/2)` (continued coth channel).
    Coth,
}

/// Products `w_j · g(x_j + i·offset)` of a weighted channel function on a
/// composite Gauss–Legendre grid of `[−Λ, Λ]`.
#[derive(Debug, Clone)]
struct LineTable {
    offset: f64,
    points: Vec<C64>,
    weighted: Vec<C64>,
}

impl LineTable {
    fn build<G: Fn(C64) -> C64 + Sync>(g: &G, offset: f64, cutoff: f64) -> Self {
        let band = BAND.min(cutoff);
        let mut breaks = Vec::new();
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
        let points: Vec<C64> = rule.nodes.iter().map(|&x| C64::new(x, offset)).collect();
        let weighted = points
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(&l, &w)| g(l) * w)
            .collect();
        Self {
            offset,
            points,
            weighted,
        }
    }

    /// True when a kernel pole at `q` is resolved by the panels.
    fn resolves(&self, q: C64) -> bool {
        let d = (q.im - self.offset).abs();
        if q.re.abs() < BAND - 1.0 {
            d >= 0.8 * BAND_PANEL
        } else {
            d >= 0.8 * FAR_PANEL
        }
    }

    fn integrate<K: Fn(C64) -> C64>(&self, kernel: K) -> C64 {
        self.points
            .iter()
            .zip(&self.weighted)
            .map(|(&l, &v)| v * kernel(l))
            .sum()
    }
}

/// A pole of the continued resolvent with its residue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// Location of the pole.
    pub z0: C64,
    /// Residue `(1/2πi)∮ R` around `z0`.
    pub residue: C64,
}

/// The two channel functions with cached line tables.
pub struct ModelResolvent {
    f0: EvenPWFunction,
    f1: EvenPWFunction,
    cfg: ModelConfig,
    tables: RwLock<HashMap<(Weight, u64), Arc<LineTable>>>,
}

impl std::fmt::Debug for ModelResolvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelResolvent")
            .field("f0", &self.f0)
            .field("f1", &self.f1)
            .field("cfg", &self.cfg)
            .finish_non_exhaustive()
    }
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

impl ModelResolvent {
    /// Wraps the channel functions.
    pub fn new(f0: EvenPWFunction, f1: EvenPWFunction, cfg: ModelConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            f0,
            f1,
            cfg,
            tables: RwLock::new(HashMap::new()),
        })
    }

    /// The spherical channel function.
    pub fn f0(&self) -> &EvenPWFunction {
        &self.f0
    }

    /// The non-spherical channel function.
    pub fn f1(&self) -> &EvenPWFunction {
        &self.f1
    }

    /// The configuration.
    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    fn weight_fn(&self, w: Weight) -> impl Fn(C64) -> C64 + Sync + '_ {
        move |l: C64| match w {
            Weight::LambdaTanh => self.f0.value(l) * lambda_tanh(l),
            Weight::LambdaCoth => self.f1.value(l) * lambda_coth(l),
            Weight::Tanh => self.f0.value(l) * stable_tanh(l * (PI / 2.0)),
            Weight::Coth => self.f1.value(l) / stable_tanh(l * (PI / 2.0)),
        }
    }

    fn channel_is_zero(&self, w: Weight) -> bool {
        match w {
            Weight::LambdaTanh | Weight::Tanh => self.f0.is_zero(),
            Weight::LambdaCoth | Weight::Coth => self.f1.is_zero(),
        }
    }

    /// Smallest `Λ = 40·2^j` beyond which the weighted function stays below
    /// `tail` times its peak on the line.
    fn cutoff(&self, w: Weight, offset: f64) -> f64 {
        let g = self.weight_fn(w);
        let at = |x: f64| g(C64::new(x, offset)).norm();
        let peak = (0..=80)
            .map(|i| {
                let x = i as f64 * 0.25;
                at(x).max(at(-x))
            })
            .fold(0.0, f64::max);
        let mut cutoff = 40.0;
        if peak == 0.0 {
            return cutoff;
        }
        while cutoff < self.cfg.max_cutoff {
            let tail = (0..16)
                .map(|i| {
                    let x = cutoff * (1.0 + i as f64 / 16.0);
                    at(x).max(at(-x))
                })
                .fold(0.0, f64::max);
            if tail <= self.cfg.tail * peak {
                break;
            }
            cutoff *= 2.0;
        }
        cutoff.min(self.cfg.max_cutoff)
    }

    fn table(&self, w: Weight, offset: f64) -> Arc<LineTable> {
        let key = (w, offset.to_bits());
        if let Some(t) = self.tables.read().expect("table cache poisoned").get(&key) {
            return Arc::clone(t);
        }
        let cutoff = self.cutoff(w, offset);
        let table = Arc::new(LineTable::build(&self.weight_fn(w), offset, cutoff));
        self.tables
            .write()
            .expect("table cache poisoned")
            .entry(key)
            .or_insert(table)
            .clone()
    }

    /// `∫_{ℝ+i·offset} g(λ)/(λ − q) dλ`, from the table when the pole is
    /// resolved and by adaptive quadrature otherwise.
    fn cauchy(&self, w: Weight, offset: f64, q: C64) -> Result<C64> {
        if self.channel_is_zero(w) {
            return Ok(zero());
        }
        let d = (q.im - offset).abs();
        if d < LINE_TOLERANCE {
            return Err(Error::ContourCollision {
                point: q,
                distance: d,
                contour: format!("Im λ = {offset}"),
            });
        }
        let table = self.table(w, offset);
        if table.resolves(q) {
            return Ok(table.integrate(|l| 1.0 / (l - q)));
        }
        let g = self.weight_fn(w);
        let cutoff = table.points.last().map(|p| p.re).unwrap_or(40.0);
        let f = |x: f64| {
            let l = C64::new(x, offset);
            g(l) / (l - q)
        };
        let mut breaks = vec![-cutoff, cutoff];
        for b in [q.re - 1.0, q.re, q.re + 1.0] {
            if b.abs() < cutoff {
                breaks.push(b);
            }
        }
        let mut x = -cutoff + 4.0;
        while x < cutoff {
            breaks.push(x);
            x += 4.0;
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        breaks.dedup();
        integrate_adaptive_on(&f, &breaks, &self.cfg.quad).map(|(v, _)| v)
    }

    /// The direct resolvent on the strip `0 < Im z < 1`.
    pub fn direct(&self, z: C64) -> Result<C64> {
        if !(z.im > 0.0 && z.im < 1.0) {
            return Err(Error::DomainError(format!(
                "the direct model resolvent is defined for 0 < Im z < 1, got z = {z}"
            )));
        }
        // 1/(λ² − z²) = (1/2z)(1/(λ−z) − 1/(λ+z)).
        let mut total = zero();
        for w in [Weight::LambdaTanh, Weight::LambdaCoth] {
            let a = self.cauchy(w, 0.0, z)?;
            let b = self.cauchy(w, 0.0, -z)?;
            total += (a - b) / (2.0 * z);
        }
        Ok(total / (8.0 * PI))
    }

    /// Partial-fraction oracle for the tanh channel:
    /// `(1/8π)∫_ℝ f₀(λ) tanh(πλ/2)/(λ+z) dλ` by adaptive quadrature.
    pub fn direct_tanh_partial_fractions(&self, z: C64) -> Result<C64> {
        if !(z.im > 0.0) {
            return Err(Error::DomainError(format!("need Im z > 0, got z = {z}")));
        }
        let cutoff = self.cutoff(Weight::Tanh, 0.0);
        let f = |x: f64| {
            let l = C64::new(x, 0.0);
            self.f0.value(l) * stable_tanh(l * (PI / 2.0)) / (l + z)
        };
        let mut breaks: Vec<f64> = Vec::new();
        let mut x = -cutoff;
        while x < cutoff {
            breaks.push(x);
            x += 2.0;
        }
        breaks.push(cutoff);
        if (-z.re).abs() < cutoff {
            breaks.push(-z.re);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        breaks.dedup();
        let (v, _) = integrate_adaptive_on(&f, &breaks, &self.cfg.quad)?;
        Ok(v / (8.0 * PI))
    }

    fn check_continuation_point(&self, z: C64, l: f64) -> Result<()> {
        if !(l > 0.0) || l.fract() == 0.0 || !l.is_finite() {
            return Err(Error::DomainError(format!(
                "the line shift L must be a positive non-integer, got {l}"
            )));
        }
        if !(z.im > -l && z.im < 1.0) {
            return Err(Error::DomainError(format!(
                "the continuation with L = {l} is valid for −L < Im z < 1, got z = {z}"
            )));
        }
        let n = (-z.im).round().max(0.0);
        let pole = C64::new(0.0, -n);
        let distance = (z - pole).norm();
        if n < l && distance < POLE_TOLERANCE {
            return Err(Error::PoleProximity { point: z, pole, distance });
        }
        Ok(())
    }

    /// The tanh channel `T(z)` continued to `Im z > −L`.
    pub fn continued_tanh(&self, z: C64, l: f64) -> Result<C64> {
        self.check_continuation_point(z, l)?;
        let mut v = self.cauchy(Weight::Tanh, l, -z)?;
        let mut k = 0;
        while ((2 * k + 1) as f64) < l {
            let p = C64::new(0.0, (2 * k + 1) as f64);
            v += 4.0 * C64::i() * self.f0.value(p) / (p + z);
            k += 1;
        }
        Ok(v)
    }

    /// `F_L(z) = iπ f₁(z) coth(πz/2) − 2i Σ_{0≤2k<L} f₁(2ki)/(2ki+z)`,
    /// holomorphic on `−L < Im z < 1`.
    pub fn coth_correction(&self, z: C64, l: f64) -> C64 {
        let mut v = C64::i() * PI * self.f1.value(z) / stable_tanh(z * (PI / 2.0));
        let mut k = 0;
        while ((2 * k) as f64) < l {
            let p = C64::new(0.0, (2 * k) as f64);
            v -= 2.0 * C64::i() * self.f1.value(p) / (p + z);
            k += 1;
        }
        v
    }

    /// The coth channel `K(z)` continued to `−L < Im z < 1`.
    pub fn continued_coth(&self, z: C64, l: f64) -> Result<C64> {
        self.check_continuation_point(z, l)?;
        if self.f1.is_zero() {
            return Ok(zero());
        }
        let upper = self.cauchy(Weight::Coth, 1.0, z)?;
        let lower = self.cauchy(Weight::Coth, l, -z)?;
        let mut v = 0.5 * (upper + lower) + self.coth_correction(z, l);
        v += 2.0 * C64::i() * self.f1.value(zero()) / z;
        let mut k = 1;
        while ((2 * k) as f64) < l {
            let p = C64::new(0.0, (2 * k) as f64);
            v += 4.0 * C64::i() * self.f1.value(p) / (p + z);
            k += 1;
        }
        Ok(v)
    }

    /// The continued resolvent `(T(z) + K(z))/8π` on `−L < Im z < 1`.
    pub fn continued(&self, z: C64, l: f64) -> Result<C64> {
        let t = if self.f0.is_zero() {
            self.check_continuation_point(z, l)?;
            zero()
        } else {
            self.continued_tanh(z, l)?
        };
        let k = self.continued_coth(z, l)?;
        Ok((t + k) / (8.0 * PI))
    }

    /// `(1/2πi)∮` of the continuation over the circle of radius
    /// [`RESIDUE_RADIUS`] around `−in`.
    pub fn residue(&self, n: u32, l: f64) -> Result<C64> {
        if !((n as f64) < l) {
            return Err(Error::DomainError(format!(
                "the pole −{n}i is outside the continuation domain Im z > −{l}"
            )));
        }
        self.residue_at(C64::new(0.0, -(n as f64)), l)
    }

    fn residue_at(&self, center: C64, l: f64) -> Result<C64> {
        let failure = std::cell::Cell::new(None);
        let value = residue_on_circle(
            |z| match self.continued(z, l) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    C64::new(0.0, 0.0)
                }
            },
            center,
            RESIDUE_RADIUS,
            &self.cfg.quad,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(value)
    }

    /// Closed-form residue at `−in`: `(i/2π)f_ε(in)` for `n ≥ 1` with
    /// `ε ≡ n + 1 (mod 2)` and `(i/4π)f₁(0)` for `n = 0`.
    pub fn residue_closed_form(&self, n: u32) -> C64 {
        let point = C64::new(0.0, n as f64);
        if n == 0 {
            C64::i() / (4.0 * PI) * self.f1.value(point)
        } else if n % 2 == 1 {
            C64::i() / (2.0 * PI) * self.f0.value(point)
        } else {
            C64::i() / (2.0 * PI) * self.f1.value(point)
        }
    }

    /// Scale used to decide whether a contour moment is numerically zero.
    fn detection_scale(&self) -> f64 {
        let at0 = |f: &EvenPWFunction| f.value(zero()).norm();
        let s = at0(&self.f0).max(at0(&self.f1)).max(self.f0.sup_bound()).max(self.f1.sup_bound());
        s / (8.0 * PI)
    }

    /// Locates the poles of the continuation in `|Re z| ≤ 1`,
    /// `−L < Im z ≤ 0` by recursive contour moments, and confirms each one
    /// with a residue circle.
    pub fn locate_resonances(&self, l: f64) -> Result<Vec<Resonance>> {
        if !(l > 0.0) || l.fract() == 0.0 || !l.is_finite() {
            return Err(Error::DomainError(format!(
                "the line shift L must be a positive non-integer, got {l}"
            )));
        }
        let threshold = 1e-8 * self.detection_scale().max(f64::MIN_POSITIVE);
        // Keep the bottom edge well away from the shifted line Im λ = L.
        let bottom = -l + 0.3f64.min(0.5 * (l - l.floor()).max(0.1));
        let top = 0.5;
        // Off-centre vertical split so that no edge runs along Re z = 0.
        let split = 0.1381966;
        let mut found: Vec<Resonance> = Vec::new();
        let mut stack = vec![
            Rect::new(-1.0, bottom, split, top),
            Rect::new(split, bottom, 1.0, top),
        ];
        let mut guard = 0;
        while let Some(rect) = stack.pop() {
            guard += 1;
            if guard > 4000 {
                return Err(Error::NonConvergence {
                    estimate: found.len() as f64,
                    error: f64::NAN,
                    subdivisions: guard,
                });
            }
            let moments = match self.box_moments(&rect, l) {
                Ok(m) => m,
                Err(Error::PoleProximity { point, .. }) | Err(Error::ContourCollision { point, .. }) => {
                    // An edge passes too close to a singularity: move that edge.
                    stack.push(rect.nudged(point, bottom, top));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let centre = rect.centre();
            let m0 = moments[0];
            let m1c = moments[1] - centre * m0;
            if m0.norm() <= threshold && m1c.norm() <= threshold * rect.diameter() {
                continue;
            }
            if rect.diameter() > 0.35 {
                stack.extend(rect.split());
                continue;
            }
            if m0.norm() <= threshold {
                // Cancelling pair inside a small box: split further.
                if rect.diameter() > 0.02 {
                    stack.extend(rect.split());
                }
                continue;
            }
            let estimate = centre + m1c / m0;
            let residue = match self.residue_at(estimate, l) {
                Ok(r) => r,
                Err(Error::PoleProximity { .. }) | Err(Error::ContourCollision { .. }) => continue,
                Err(e) => return Err(e),
            };
            if residue.norm() > threshold && !found.iter().any(|r| (r.z0 - estimate).norm() < 0.5 * RESIDUE_RADIUS) {
                found.push(Resonance {
                    z0: estimate,
                    residue,
                });
            }
        }
        found.sort_by(|a, b| b.z0.im.partial_cmp(&a.z0.im).expect("finite poles"));
        Ok(found)
    }

    /// `(1/2πi)∮_{∂B} z^j R(z) dz` for `j = 0, 1`.
    fn box_moments(&self, rect: &Rect, l: f64) -> Result<[C64; 2]> {
        let rule = FixedRule::composite_gauss(0.0, 1.0, 4, 16);
        let corners = rect.corners();
        let mut m = [zero(); 2];
        for e in 0..4 {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            let d = b - a;
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let z = a + d * t;
                let v = self.continued(z, l)? * d * w;
                m[0] += v;
                m[1] += v * z;
            }
        }
        let s = 1.0 / (2.0 * PI * C64::i());
        Ok([m[0] * s, m[1] * s])
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    nudges: u32,
}

impl Rect {
    fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            x0,
            y0,
            x1,
            y1,
            nudges: 0,
        }
    }

    fn centre(&self) -> C64 {
        C64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn diameter(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    /// Counter-clockwise corners.
    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.x0, self.y0),
            C64::new(self.x1, self.y0),
            C64::new(self.x1, self.y1),
            C64::new(self.x0, self.y1),
        ]
    }

    /// Splits the longer side at an off-centre point, chosen so that the new
    /// edge keeps clear of the candidate poles `−in`.
    fn split(&self) -> Vec<Rect> {
        const FRACTIONS: [f64; 5] = [0.381966, 0.5, 0.618034, 0.3, 0.7];
        const CLEARANCE: f64 = 0.08;
        if self.x1 - self.x0 > self.y1 - self.y0 {
            let xm = FRACTIONS
                .iter()
                .map(|f| self.x0 + f * (self.x1 - self.x0))
                .find(|x| x.abs() >= CLEARANCE)
                .unwrap_or(self.x0 + FRACTIONS[0] * (self.x1 - self.x0));
            vec![Rect::new(self.x0, self.y0, xm, self.y1), Rect::new(xm, self.y0, self.x1, self.y1)]
        } else {
            let crosses_axis = self.x0 < CLEARANCE && self.x1 > -CLEARANCE;
            let ym = FRACTIONS
                .iter()
                .map(|f| self.y0 + (1.0 - f) * (self.y1 - self.y0))
                .find(|y| !crosses_axis || *y > CLEARANCE || (y - y.round()).abs() >= CLEARANCE)
                .unwrap_or(self.y0 + (1.0 - FRACTIONS[0]) * (self.y1 - self.y0));
            vec![Rect::new(self.x0, self.y0, self.x1, ym), Rect::new(self.x0, ym, self.x1, self.y1)]
        }
    }

    /// Moves the edge through `point` outwards (inwards when that would
    /// leave `lo ≤ Im z ≤ hi`) so that it clears a nearby singularity.
    fn nudged(&self, point: C64, lo: f64, hi: f64) -> Rect {
        let h = 0.07 * (1.0 + self.nudges as f64);
        let mut r = Rect { nudges: self.nudges + 1, ..*self };
        let on = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
        if on(point.im, self.y0) {
            r.y0 = if self.y0 - h >= lo { self.y0 - h } else { self.y0 + h };
        } else if on(point.im, self.y1) {
            r.y1 = if self.y1 + h <= hi { self.y1 + h } else { self.y1 - h };
        } else if on(point.re, self.x0) {
            r.x0 -= h;
        } else {
            r.x1 += h;
        }
        r
    }
}

/// `(1/8π)[∫ f₀ λtanh/(λ²−z²) + ∫ f₁ λcoth/(λ²−z²)]` on `0 < Im z < 1`.
pub fn model_resolvent(f0: &EvenPWFunction, f1: &EvenPWFunction, z: C64, cfg: &ModelConfig) -> Result<C64> {
    ModelResolvent::new(f0.clone(), f1.clone(), *cfg)?.direct(z)
}

/// The continuation of [`model_resolvent`] to `−L < Im z < 1`.
pub fn continued_model_resolvent(
    f0: &EvenPWFunction,
    f1: &EvenPWFunction,
    z: C64,
    l: f64,
    cfg: &ModelConfig,
) -> Result<C64> {
    ModelResolvent::new(f0.clone(), f1.clone(), *cfg)?.continued(z, l)
}

/// Poles and residues of the continuation in `|Re z| ≤ 1`, `−L < Im z ≤ 0`.
pub fn locate_resonances(f0: &EvenPWFunction, f1: &EvenPWFunction, l: f64, cfg: &ModelConfig) -> Result<Vec<Resonance>> {
    ModelResolvent::new(f0.clone(), f1.clone(), *cfg)?.locate_resonances(l)
}
