//! Orbital integrals of compactly supported functions on `SL(2,ℝ)` along the
//! split torus, and the channel functions `f_ε` built from them.
//!
//! With `dk = dθ/2π`, `dn = dr`, the orbital integral
//! `|D(h_a)| ∫_K ∫_N ψ(k n h_a n⁻¹ k⁻¹) dn dk` becomes, after `s = r(a⁻¹ − a)`,
//! `F_ψ(t) = (1/π) ∫_0^π dθ ∫_ℝ ds ψ(k_θ Y(t,s) k_θ⁻¹)` with
//! `Y(t,s) = [[eᵗ, s], [0, e⁻ᵗ]]`, which is smooth in `t`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::pw::EvenPWFunction;
use crate::numerics::quadrature::FixedRule;
use crate::sl2::group::{check_epsilon, SL2Element};
use crate::sl2::testfn::{psi_support_bound, PsiConfig, PsiEvaluator, TestFunctionM2p};

type C64 = Complex64;

/// `|t|` below which `h_{eᵗ}` counts as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-8;

/// Shared callable `SL(2,ℝ) → ℂ`.
pub type GroupFn = Arc<dyn Fn(&SL2Element) -> C64 + Send + Sync>;

/// A function on `SL(2,ℝ)` vanishing for `‖g‖ > norm_bound`.
#[derive(Clone)]
pub struct GroupFunction {
    f: GroupFn,
    norm_bound: f64,
}

impl fmt::Debug for GroupFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupFunction")
            .field("norm_bound", &self.norm_bound)
            .finish_non_exhaustive()
    }
}

impl GroupFunction {
    /// Wraps a callable; values with `‖g‖ > norm_bound` are forced to zero.
    pub fn new<F>(f: F, norm_bound: f64) -> Result<Self>
    where
        F: Fn(&SL2Element) -> C64 + Send + Sync + 'static,
    {
        if !(norm_bound >= 1.0 && norm_bound.is_finite()) {
            return Err(Error::InvalidSupport(format!(
                "the norm bound must be finite and at least 1, got {norm_bound}"
            )));
        }
        Ok(Self {
            f: Arc::new(f),
            norm_bound,
        })
    }

    /// `ψ(g) = ∫_X u(gx) v(x) dx`.
    pub fn from_pair(u: &TestFunctionM2p, v: &TestFunctionM2p, cfg: &PsiConfig) -> Result<Self> {
        let bound = psi_support_bound(u, v).min(psi_support_bound(v, u));
        let eval = PsiEvaluator::new(u, v, cfg)?;
        Self::new(move |g| eval.psi(g), bound.max(1.0))
    }

    /// `ψ(g) = (ω₀(g)u, v) = ∫_X u(g⁻¹x) conj(v(x)) dx`.
    pub fn hermitian(u: &TestFunctionM2p, v: &TestFunctionM2p, cfg: &PsiConfig) -> Result<Self> {
        let vc = v.conj();
        let bound = psi_support_bound(u, &vc).min(psi_support_bound(&vc, u));
        let eval = PsiEvaluator::new(u, &vc, cfg)?;
        Self::new(move |g| eval.psi(&g.inverse()), bound.max(1.0))
    }

    /// Value at `g`.
    pub fn value(&self, g: &SL2Element) -> C64 {
        if g.op_norm() > self.norm_bound {
            return C64::new(0.0, 0.0);
        }
        (self.f)(g)
    }

    /// Support bound on `‖g‖`.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Shared handle to the raw callable.
    pub fn callable(&self) -> GroupFn {
        Arc::clone(&self.f)
    }
}

/// Discretisation of orbital integrals and their `t`-profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitalConfig {
    /// Trapezoid nodes for `θ ∈ [0, π)`.
    pub theta_nodes: usize,
    /// Gauss panels for `s ∈ [−B, B]`.
    pub s_panels: usize,
    /// Nodes per `s` panel.
    pub s_order: usize,
    /// Gauss panels for `t ∈ [0, ln B]` (mirrored to `[−ln B, 0]`).
    pub t_panels: usize,
    /// Nodes per `t` panel.
    pub t_order: usize,
    /// Quadrature for the matrix coefficient.
    pub psi: PsiConfig,
}

impl Default for OrbitalConfig {
    fn default() -> Self {
        Self {
            theta_nodes: 32,
            s_panels: 16,
            s_order: 8,
            t_panels: 4,
            t_order: 8,
            psi: PsiConfig::default(),
        }
    }
}

impl OrbitalConfig {
    /// Validates the node counts.
    pub fn validate(&self) -> Result<()> {
        if self.theta_nodes < 4 || self.s_panels == 0 || self.s_order < 2 || self.t_panels == 0 || self.t_order < 2 {
            return Err(Error::InvalidConfig(format!("too few orbital quadrature nodes: {self:?}")));
        }
        self.psi.validate()
    }

    /// The same configuration with every step halved.
    pub fn refined(&self) -> Self {
        Self {
            theta_nodes: 2 * self.theta_nodes,
            s_panels: 2 * self.s_panels,
            t_panels: 2 * self.t_panels,
            ..*self
        }
    }
}

/// Gauss rule on `[−b, b]` built from `[0, b]` and its mirror image, so that
/// the node set is exactly symmetric.
pub fn symmetric_rule(b: f64, panels: usize, order: usize) -> FixedRule {
    let half = FixedRule::composite_gauss(0.0, b, panels, order);
    let mut nodes: Vec<f64> = half.nodes.iter().rev().map(|x| -x).collect();
    let mut weights: Vec<f64> = half.weights.iter().rev().copied().collect();
    nodes.extend_from_slice(&half.nodes);
    weights.extend_from_slice(&half.weights);
    FixedRule { nodes, weights }
}

/// `Y(t, s) = [[eᵗ, s], [0, e⁻ᵗ]]`.
pub fn upper_triangular(t: f64, s: f64) -> SL2Element {
    SL2Element::new([[t.exp(), s], [0.0, (-t).exp()]]).expect("upper triangular elements have determinant 1")
}

/// `k_θ g k_θ⁻¹`.
pub fn conjugate_by_rotation(g: &SL2Element, theta: f64) -> SL2Element {
    let k = SL2Element::rotation(theta);
    k.compose(g).compose(&k.inverse())
}

/// Smooth form `(1/π)∫_0^π dθ ∫ ds ψ(±k_θ Y(t,s) k_θ⁻¹)` of the orbital integral.
fn orbital_smooth(psi: &GroupFunction, t: f64, negate: bool, cfg: &OrbitalConfig) -> C64 {
    let b = psi.norm_bound();
    if t.abs() > b.ln() {
        return C64::new(0.0, 0.0);
    }
    let srule = symmetric_rule(b, cfg.s_panels, cfg.s_order);
    let h = PI / cfg.theta_nodes as f64;
    let mut total = C64::new(0.0, 0.0);
    for j in 0..cfg.theta_nodes {
        let theta = h * j as f64;
        for (s, w) in srule.nodes.iter().zip(&srule.weights) {
            let mut y = conjugate_by_rotation(&upper_triangular(t, *s), theta);
            if negate {
                y = y.negated();
            }
            total += psi.value(&y) * *w;
        }
    }
    total / cfg.theta_nodes as f64
}

/// `F_ψ(h_a) = |D(h_a)| ∫_{G/A} ψ(g h_a g⁻¹) dġ` for `a = eᵗ`.
pub fn orbital_integral(psi: &GroupFunction, t: f64, cfg: &OrbitalConfig) -> Result<C64> {
    cfg.validate()?;
    if t.abs() < SINGULAR_TOLERANCE {
        return Err(Error::SingularElement(t));
    }
    Ok(orbital_smooth(psi, t, false, cfg))
}

/// The same orbital integral on `−h_a`.
pub fn orbital_integral_negative(psi: &GroupFunction, t: f64, cfg: &OrbitalConfig) -> Result<C64> {
    cfg.validate()?;
    if t.abs() < SINGULAR_TOLERANCE {
        return Err(Error::SingularElement(t));
    }
    Ok(orbital_smooth(psi, t, true, cfg))
}

/// Literal `K × N` quadrature `|D(h_a)| ∫_0^{2π} dθ/2π ∫ dr ψ(k n_r h_a n_r⁻¹ k⁻¹)`
/// with the steps of `cfg` halved: an independent check of the substitution
/// used by [`orbital_integral`].
pub fn orbital_integral_kn(psi: &GroupFunction, t: f64, cfg: &OrbitalConfig) -> Result<C64> {
    cfg.validate()?;
    if t.abs() < SINGULAR_TOLERANCE {
        return Err(Error::SingularElement(t));
    }
    let b = psi.norm_bound();
    let d = (t.exp() - (-t).exp()).abs();
    let h_a = SL2Element::diagonal(t);
    // ‖n_r h_a n_r⁻¹‖ ≥ |r|·|a − a⁻¹|.
    let rmax = b / d;
    let rule = FixedRule::composite_gauss(-rmax, rmax, 2 * cfg.s_panels, cfg.s_order);
    let n_theta = 4 * cfg.theta_nodes;
    let h = 2.0 * PI / n_theta as f64;
    let mut total = C64::new(0.0, 0.0);
    for j in 0..n_theta {
        let k = SL2Element::rotation(h * j as f64 + 0.5 * h);
        let ki = k.inverse();
        for (r, w) in rule.nodes.iter().zip(&rule.weights) {
            let n = SL2Element::unipotent(*r);
            let g = k.compose(&n).compose(&h_a).compose(&n.inverse()).compose(&ki);
            total += psi.value(&g) * *w;
        }
    }
    Ok(total * d / n_theta as f64)
}

/// Orbital integrals on `±h_a` sampled on a symmetric Gauss grid in `t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitalProfile {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    plus: Vec<C64>,
    minus: Vec<C64>,
    type_bound: f64,
}

impl OrbitalProfile {
    /// Samples `F_ψ(±h_{eᵗ})` at every node (both signs of `t` are computed
    /// independently).
    pub fn build(psi: &GroupFunction, cfg: &OrbitalConfig) -> Result<Self> {
        cfg.validate()?;
        let type_bound = psi.norm_bound().ln();
        if !(type_bound > 0.0) {
            return Err(Error::InvalidSupport("ψ is supported in the compact subgroup".into()));
        }
        let rule = symmetric_rule(type_bound, cfg.t_panels, cfg.t_order);
        let jobs: Vec<(usize, bool)> = (0..rule.len()).flat_map(|i| [(i, false), (i, true)]).collect();
        let values: Vec<C64> = jobs
            .par_iter()
            .map(|&(i, neg)| orbital_smooth(psi, rule.nodes[i], neg, cfg))
            .collect();
        let plus = values.iter().step_by(2).copied().collect();
        let minus = values.iter().skip(1).step_by(2).copied().collect();
        Ok(Self {
            nodes: rule.nodes,
            weights: rule.weights,
            plus,
            minus,
            type_bound,
        })
    }

    /// The `t` nodes (symmetric about 0).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `F_ψ(h_{eᵗ})` at the nodes.
    pub fn plus(&self) -> &[C64] {
        &self.plus
    }

    /// `F_ψ(−h_{eᵗ})` at the nodes.
    pub fn minus(&self) -> &[C64] {
        &self.minus
    }

    /// Half-width `ln B` of the `t`-support.
    pub fn type_bound(&self) -> f64 {
        self.type_bound
    }

    /// `G_ε(t) = F(h_a) + (−1)^ε F(−h_a)` at the nodes.
    pub fn channel(&self, epsilon: u8) -> Result<Vec<C64>> {
        check_epsilon(epsilon)?;
        let sign = if epsilon == 0 { 1.0 } else { -1.0 };
        Ok(self.plus.iter().zip(&self.minus).map(|(p, m)| p + m * sign).collect())
    }

    /// `max_t |F(t) − F(−t)| / max_t |F(t)|` over both signs.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.nodes.len();
        let scale = self
            .plus
            .iter()
            .chain(&self.minus)
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut d: f64 = 0.0;
        for i in 0..n {
            d = d.max((self.plus[i] - self.plus[n - 1 - i]).norm());
            d = d.max((self.minus[i] - self.minus[n - 1 - i]).norm());
        }
        d / scale
    }

    /// `f_ε(λ) = ∫ e^{iλt} G_ε(t) dt`.
    pub fn f_epsilon(&self, epsilon: u8, lambda: C64) -> Result<C64> {
        let g = self.channel(epsilon)?;
        let i = C64::new(0.0, 1.0);
        Ok(self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&g)
            .map(|((t, w), gv)| (i * lambda * *t).exp() * gv * *w)
            .sum())
    }

    /// `∫ cosh(n t) G_ε(t) dt`: the pairing with the character `ρⁿ + ρ⁻ⁿ`.
    pub fn cosh_form(&self, epsilon: u8, n: f64) -> Result<C64> {
        let g = self.channel(epsilon)?;
        Ok(self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&g)
            .map(|((t, w), gv)| gv * ((n * t).cosh() * w))
            .sum())
    }

    /// `f_ε` as an even Paley–Wiener function `λ ↦ ∫ cos(λt) G_ε(t) dt`.
    pub fn to_even_pw(&self, epsilon: u8) -> Result<EvenPWFunction> {
        let g = self.channel(epsilon)?;
        let sup: f64 = g.iter().zip(&self.weights).map(|(z, w)| z.norm() * w).sum();
        let nodes = self.nodes.clone();
        let weights = self.weights.clone();
        Ok(EvenPWFunction::new(
            move |lambda: C64| {
                nodes
                    .iter()
                    .zip(&weights)
                    .zip(&g)
                    .map(|((t, w), gv)| gv * ((lambda * *t).cos() * *w))
                    .sum()
            },
            self.type_bound,
            sup,
        ))
    }
}

/// `f_ε(λ) = (−1)^ε ∫_A ρ(h_a)^{iλ} |D(h_a)| ∫_{G/A} ψ`, realised with the
/// sign character on `±h_a` (see [`OrbitalProfile::f_epsilon`]), for
/// `ψ(g) = ∫_X u(gx) v(x) dx`.
pub fn f_epsilon(
    u: &TestFunctionM2p,
    v: &TestFunctionM2p,
    epsilon: u8,
    lambda: C64,
    cfg: &OrbitalConfig,
) -> Result<C64> {
    check_epsilon(epsilon)?;
    let psi = GroupFunction::from_pair(u, v, &cfg.psi)?;
    OrbitalProfile::build(&psi, cfg)?.f_epsilon(epsilon, lambda)
}
