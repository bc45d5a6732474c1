//! The dilation (Mellin) transform on `L²(ℝ²)`.
//!
//! A test function `v` supported in an annulus decomposes into homogeneous
//! components
//!
//! ```text
//! v_λ(w) = ∫₀^∞ r^{iλ} v(r w) dr,      v_λ(t w) = t^{−1−iλ} v_λ(w),
//! v(w)   = (1/2π) ∫_ℝ v_λ(w) dλ,
//! ```
//!
//! and `∫ u·v̄ dw = (1/2π)∫∫_{S¹} u_λ·v̄_λ dσ dλ`. Components are stored as
//! circle Fourier coefficients of `σ ↦ v_λ(σ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::fourier::{circle_fourier, circle_sample_count, fourier_from_samples, FourierCoeffs};
use crate::numerics::quadrature::{gauss_legendre, integrate_1d, integrate_adaptive_on, FixedRule, QuadratureConfig};
use crate::numerics::testfn::TestFunction2D;

type C64 = Complex64;

/// Parity of a fibre: `Even` ↔ ε = 0, `Odd` ↔ ε = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParityLabel {
    /// Even functions (ε = 0).
    Even,
    /// Odd functions (ε = 1).
    Odd,
}

impl ParityLabel {
    /// Label from `ε ∈ {0, 1}`.
    pub fn from_epsilon(epsilon: u8) -> Result<Self> {
        match epsilon {
            0 => Ok(ParityLabel::Even),
            1 => Ok(ParityLabel::Odd),
            e => Err(Error::DomainError(format!("parity label must be 0 or 1, got {e}"))),
        }
    }

    /// `ε` as an integer.
    pub fn epsilon(self) -> u8 {
        match self {
            ParityLabel::Even => 0,
            ParityLabel::Odd => 1,
        }
    }

    /// True when frequency `k` belongs to this parity.
    pub fn contains(self, k: i64) -> bool {
        k.rem_euclid(2) as u8 == self.epsilon()
    }
}

/// A function on `ℝ² ∖ {0}` homogeneous of degree `−1−iλ`, stored by the
/// circle Fourier coefficients of its restriction to the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousComponent {
    /// Spectral parameter.
    pub lambda: C64,
    /// Circle coefficients, `|k| ≤ k_max`.
    pub coeffs: FourierCoeffs,
}

impl HomogeneousComponent {
    /// Wraps the data.
    pub fn new(lambda: C64, coeffs: FourierCoeffs) -> Self {
        Self { lambda, coeffs }
    }

    /// Largest stored frequency.
    pub fn k_max(&self) -> usize {
        self.coeffs.k_max()
    }

    /// Coefficient of `e^{ikθ}`.
    pub fn coeff(&self, k: i64) -> C64 {
        self.coeffs.get(k)
    }

    /// Value on the unit circle at angle `theta`.
    pub fn angular(&self, theta: f64) -> C64 {
        self.coeffs.eval(theta)
    }

    /// Value at `w ≠ 0`: `|w|^{−1−iλ} f(w/|w|)`.
    pub fn value(&self, w: [f64; 2]) -> C64 {
        let r = w[0].hypot(w[1]);
        let theta = w[1].atan2(w[0]);
        radial_factor(self.lambda, r) * self.angular(theta)
    }

    /// Largest coefficient modulus among frequencies of the other parity.
    pub fn parity_defect(&self, parity: ParityLabel) -> f64 {
        self.coeffs
            .iter()
            .filter(|(k, _)| !parity.contains(*k))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}

/// `r^{−1−iλ}`.
pub fn radial_factor(lambda: C64, r: f64) -> C64 {
    ((C64::new(-1.0, 0.0) - C64::i() * lambda) * r.ln()).exp()
}

/// `v_λ(w) = ∫ r^{iλ} v(r w) dr` at a single point, by adaptive quadrature
/// over the exact support interval of `r ↦ v(r w)`.
pub fn homogeneous_value_direct(v: &TestFunction2D, lambda: C64, w: [f64; 2], cfg: &QuadratureConfig) -> Result<C64> {
    let norm = w[0].hypot(w[1]);
    if norm == 0.0 {
        return Err(Error::DomainError("homogeneous components are undefined at the origin".into()));
    }
    let (lo, hi) = (v.support_inner() / norm, v.support_outer() / norm);
    let il = C64::i() * lambda;
    let g = |r: f64| (il * r.ln()).exp() * v.value([r * w[0], r * w[1]]);
    let breaks: Vec<f64> = (0..=8).map(|i| lo + (hi - lo) * i as f64 / 8.0).collect();
    integrate_adaptive_on(&g, &breaks, cfg).map(|(x, _)| x)
}

/// Forward transform: the component `v_λ`, computed from its definition by
/// adaptive radial quadrature on an equispaced angular grid, followed by the
/// circle Fourier transform.
pub fn mellin_forward(
    v: &TestFunction2D,
    lambda: C64,
    k_max: usize,
    cfg: &QuadratureConfig,
) -> Result<HomogeneousComponent> {
    let n = circle_sample_count(k_max);
    let mut samples = Vec::with_capacity(n);
    for j in 0..n {
        let th = 2.0 * PI * j as f64 / n as f64;
        samples.push(homogeneous_value_direct(v, lambda, [th.cos(), th.sin()], cfg)?);
    }
    Ok(HomogeneousComponent::new(lambda, fourier_from_samples(&samples, k_max)))
}

/// Precomputed radial data of one test function, allowing fast evaluation of
/// `v_λ` for many (complex) `λ`.
///
/// With `s = log r`, `v_λ(σ) = ∫ e^{(1+iλ)s} v(e^s σ) ds`; the table stores
/// the circle coefficients `c_k(s_j)` of `σ ↦ v(e^{s_j}σ)` on a composite
/// Gauss–Legendre grid covering the support exactly.
#[derive(Debug, Clone)]
pub struct MellinTable {
    k_max: usize,
    s_nodes: Vec<f64>,
    /// Start of the log-radial grid, panel width and panel count.
    s_start: f64,
    panel_width: f64,
    panels: usize,
    /// Gauss–Legendre nodes on `[−1, 1]`, scaled by half the panel width.
    local: Vec<f64>,
    /// Weights multiplied by `e^{s_j}`.
    weights: Vec<f64>,
    /// `coeffs[k + k_max][j] = c_k(s_j)`.
    coeffs: Vec<Vec<C64>>,
}

/// Default panel count of the log-radial grid.
pub const DEFAULT_S_PANELS: usize = 200;
/// Default Gauss–Legendre order per panel of the log-radial grid.
pub const DEFAULT_S_ORDER: usize = 16;

impl MellinTable {
    /// Builds a table with the default log-radial grid.
    pub fn new(v: &TestFunction2D, k_max: usize) -> Self {
        Self::with_grid(v, k_max, DEFAULT_S_PANELS, DEFAULT_S_ORDER)
    }

    /// Builds a table with `panels × order` log-radial nodes.
    pub fn with_grid(v: &TestFunction2D, k_max: usize, panels: usize, order: usize) -> Self {
        let rule = FixedRule::composite_gauss(v.support_inner().ln(), v.support_outer().ln(), panels, order);
        let mut coeffs = vec![Vec::with_capacity(rule.len()); 2 * k_max + 1];
        for &s in &rule.nodes {
            let r = s.exp();
            let c = circle_fourier(|th| v.value_polar(r, th), k_max);
            for (idx, (_, ck)) in c.iter().enumerate() {
                coeffs[idx].push(ck);
            }
        }
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(s, w)| w * s.exp())
            .collect();
        let (s_start, s_end) = (v.support_inner().ln(), v.support_outer().ln());
        let panel_width = (s_end - s_start) / panels as f64;
        let local = gauss_legendre(order).0.into_iter().map(|x| 0.5 * panel_width * x).collect();
        Self {
            k_max,
            s_nodes: rule.nodes,
            s_start,
            panel_width,
            panels,
            local,
            weights,
            coeffs,
        }
    }

    /// Largest stored frequency.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Support of the log-radial variable.
    pub fn s_range(&self) -> (f64, f64) {
        (self.s_nodes[0], *self.s_nodes.last().unwrap())
    }

    /// `w_j e^{iλ s_j}` on every node. The exponentials factor as
    /// (panel centre) × (local offset); panel factors are advanced by
    /// multiplication and re-anchored periodically to bound rounding growth.
    fn kernel(&self, lambda: C64) -> Vec<C64> {
        const REANCHOR: usize = 32;
        let il = C64::i() * lambda;
        let local: Vec<C64> = self.local.iter().map(|&x| (il * x).exp()).collect();
        let step = (il * self.panel_width).exp();
        let mut out = Vec::with_capacity(self.s_nodes.len());
        let mut centre = C64::new(0.0, 0.0);
        for p in 0..self.panels {
            if p % REANCHOR == 0 {
                centre = (il * (self.s_start + (p as f64 + 0.5) * self.panel_width)).exp();
            } else {
                centre *= step;
            }
            let base = p * local.len();
            for (i, e) in local.iter().enumerate() {
                out.push(centre * e * self.weights[base + i]);
            }
        }
        out
    }

    /// The component `v_λ`.
    pub fn component(&self, lambda: C64) -> HomogeneousComponent {
        let ker = self.kernel(lambda);
        let dense = self
            .coeffs
            .iter()
            .map(|row| row.iter().zip(&ker).map(|(c, k)| c * k).sum())
            .collect();
        HomogeneousComponent::new(lambda, FourierCoeffs::from_vec(dense))
    }
}

/// Inversion `(1/2π)∫_{−Λ}^{Λ} v_λ(w) dλ` from a family of components.
pub fn mellin_invert<F>(components: F, w: [f64; 2], lambda_cutoff: f64, cfg: &QuadratureConfig) -> Result<C64>
where
    F: Fn(f64) -> Result<HomogeneousComponent>,
{
    mellin_invert_with_tail(components, w, lambda_cutoff, cfg).map(|(v, _)| v)
}

/// As [`mellin_invert`], also returning a measured tail estimate: the modulus
/// of the same integral over `Λ ≤ |λ| ≤ 2Λ`.
pub fn mellin_invert_with_tail<F>(
    components: F,
    w: [f64; 2],
    lambda_cutoff: f64,
    cfg: &QuadratureConfig,
) -> Result<(C64, f64)>
where
    F: Fn(f64) -> Result<HomogeneousComponent>,
{
    if !(lambda_cutoff > 0.0) {
        return Err(Error::DomainError(format!("lambda_cutoff must be positive, got {lambda_cutoff}")));
    }
    if w[0].hypot(w[1]) == 0.0 {
        return Err(Error::DomainError("inversion is undefined at the origin".into()));
    }
    let integrand = |lambda: f64| -> Result<C64> { Ok(components(lambda)?.value(w)) };
    let main = integrate_on_panels(&integrand, -lambda_cutoff, lambda_cutoff, cfg)?;
    let upper = integrate_on_panels(&integrand, lambda_cutoff, 2.0 * lambda_cutoff, cfg)?;
    let lower = integrate_on_panels(&integrand, -2.0 * lambda_cutoff, -lambda_cutoff, cfg)?;
    Ok((main / (2.0 * PI), (upper + lower).norm() / (2.0 * PI)))
}

/// Adaptive integration of a fallible integrand with unit-length initial
/// panels (the spectral integrands oscillate on that scale).
fn integrate_on_panels<F>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let panels = ((b - a).abs().ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
    let failure = std::cell::RefCell::new(None);
    let g = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            C64::new(0.0, 0.0)
        }
    };
    let (v, _) = integrate_adaptive_on(&g, &breaks, cfg)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `∫_{S¹} a_λ(σ)·b_μ(σ) dσ = 2π Σ_k a_k b_{−k}` (bilinear, no conjugation).
pub fn circle_bilinear(a: &HomogeneousComponent, b: &HomogeneousComponent) -> C64 {
    let k = a.k_max().min(b.k_max()) as i64;
    (-k..=k).map(|j| a.coeff(j) * b.coeff(-j)).sum::<C64>() * (2.0 * PI)
}

/// `∫_{S¹} a(σ)·conj(b(σ)) dσ = 2π Σ_k a_k conj(b_k)`.
pub fn circle_hermitian(a: &HomogeneousComponent, b: &HomogeneousComponent) -> C64 {
    let k = a.k_max().min(b.k_max()) as i64;
    (-k..=k).map(|j| a.coeff(j) * b.coeff(j).conj()).sum::<C64>() * (2.0 * PI)
}

/// Spectral-side inner product `(1/2π)∫_{−Λ}^{Λ}∫_{S¹} u_λ·conj(v_λ) dσ dλ`.
pub fn plancherel_pair(
    u: &TestFunction2D,
    v: &TestFunction2D,
    k_max: usize,
    lambda_cutoff: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    let (tu, tv) = (MellinTable::new(u, k_max), MellinTable::new(v, k_max));
    plancherel_pair_tables(&tu, &tv, lambda_cutoff, cfg)
}

/// [`plancherel_pair`] from precomputed tables.
pub fn plancherel_pair_tables(tu: &MellinTable, tv: &MellinTable, lambda_cutoff: f64, cfg: &QuadratureConfig) -> Result<C64> {
    if !(lambda_cutoff > 0.0) {
        return Err(Error::DomainError(format!("lambda_cutoff must be positive, got {lambda_cutoff}")));
    }
    let f = |lambda: f64| -> Result<C64> {
        let l = C64::new(lambda, 0.0);
        Ok(circle_hermitian(&tu.component(l), &tv.component(l)))
    };
    Ok(integrate_on_panels(&f, -lambda_cutoff, lambda_cutoff, cfg)? / (2.0 * PI))
}

/// Fibrewise bilinear pairing `∫_{S¹} v_λ(σ)·u_{−λ}(σ) dσ`.
pub fn bilinear_pair_at(
    u: &TestFunction2D,
    v: &TestFunction2D,
    lambda: C64,
    k_max: usize,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    let vl = mellin_forward(v, lambda, k_max, cfg)?;
    let ul = mellin_forward(u, -lambda, k_max, cfg)?;
    Ok(circle_bilinear(&vl, &ul))
}

/// Cached bilinear pairing `λ ↦ ∫_{S¹} v_λ u_{−λ} dσ` for complex `λ`.
#[derive(Debug, Clone)]
pub struct BilinearPairing {
    tu: MellinTable,
    tv: MellinTable,
}

impl BilinearPairing {
    /// Builds the tables for `u` and `v`.
    pub fn new(u: &TestFunction2D, v: &TestFunction2D, k_max: usize) -> Self {
        Self {
            tu: MellinTable::new(u, k_max),
            tv: MellinTable::new(v, k_max),
        }
    }

    /// From existing tables.
    pub fn from_tables(tu: MellinTable, tv: MellinTable) -> Self {
        Self { tu, tv }
    }

    /// `∫_{S¹} v_λ u_{−λ} dσ`.
    pub fn at(&self, lambda: C64) -> C64 {
        circle_bilinear(&self.tv.component(lambda), &self.tu.component(-lambda))
    }

    /// Exponential type in `λ`: the largest `|log r|` over both supports.
    pub fn pw_type(&self) -> f64 {
        let (a, b) = self.tu.s_range();
        let (c, d) = self.tv.s_range();
        // v_λ grows like e^{|Im λ|·|s|} for s in the support of either factor.
        a.abs().max(b.abs()) + c.abs().max(d.abs())
    }
}

/// Direct two-dimensional quadrature of `∫ u(w) conj(v(w)) dw` in polar
/// coordinates (adaptive in `r`, trapezoid in `θ`), used as an oracle.
pub fn direct_inner_product(u: &TestFunction2D, v: &TestFunction2D, theta_nodes: usize, cfg: &QuadratureConfig) -> Result<C64> {
    direct_pairing(u, v, theta_nodes, cfg, true)
}

/// Direct two-dimensional quadrature of `∫ u(w) v(w) dw`.
pub fn direct_bilinear(u: &TestFunction2D, v: &TestFunction2D, theta_nodes: usize, cfg: &QuadratureConfig) -> Result<C64> {
    direct_pairing(u, v, theta_nodes, cfg, false)
}

fn direct_pairing(u: &TestFunction2D, v: &TestFunction2D, theta_nodes: usize, cfg: &QuadratureConfig, conjugate: bool) -> Result<C64> {
    let lo = u.support_inner().max(v.support_inner());
    let hi = u.support_outer().min(v.support_outer());
    if lo >= hi {
        return Ok(C64::new(0.0, 0.0));
    }
    let h = 2.0 * PI / theta_nodes as f64;
    let mut total = C64::new(0.0, 0.0);
    for j in 0..theta_nodes {
        let th = h * j as f64;
        let (c, s) = (th.cos(), th.sin());
        let g = |r: f64| {
            let w = [r * c, r * s];
            let b = v.value(w);
            u.value(w) * if conjugate { b.conj() } else { b } * r
        };
        total += integrate_1d(g, lo, hi, cfg)?;
    }
    Ok(total * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::testfn::make_bump_radial;

    #[test]
    fn table_matches_direct_definition() {
        let v = make_bump_radial(2.0, 1.0).unwrap().times_cos(2);
        let cfg = QuadratureConfig::default();
        let table = MellinTable::new(&v, 4);
        for &l in &[C64::new(0.0, 0.0), C64::new(3.5, 0.0), C64::new(-1.0, 2.0)] {
            let a = table.component(l);
            let b = mellin_forward(&v, l, 4, &cfg).unwrap();
            for k in -4..=4 {
                assert!((a.coeff(k) - b.coeff(k)).norm() < 1e-10, "λ={l} k={k}");
            }
        }
    }

    #[test]
    fn parity_label_roundtrip() {
        assert_eq!(ParityLabel::from_epsilon(1).unwrap(), ParityLabel::Odd);
        assert!(ParityLabel::from_epsilon(2).is_err());
        assert!(ParityLabel::Odd.contains(-3));
        assert!(ParityLabel::Even.contains(-2));
    }
}
