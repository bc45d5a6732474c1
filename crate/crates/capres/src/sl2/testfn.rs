//! Smooth compactly supported test functions on `X^max ⊂ M_{2,p}(ℝ)` and the
//! matrix coefficient `ψ(g) = ∫_X u(gx) v(x) dx`.
//!
//! A point `x ∈ M_{2,p}` is a slice of length `2p`, row-major:
//! `x[i·p + j] = x_{i+1, j+1}`; column `j` is `(x[j], x[p + j])`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{gauss_legendre, FixedRule};
use crate::numerics::testfn::{mollifier, smooth_step};
use crate::sl2::group::SL2Element;

type C64 = Complex64;

/// Shared callable `M_{2,p} → ℂ`.
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

/// `y ↦ mollifier(|y − c|/ρ)` on `ℝ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskBump {
    /// Centre `c`.
    pub center: [f64; 2],
    /// Radius `ρ`.
    pub radius: f64,
}

impl DiskBump {
    /// Value at `y`.
    pub fn value(&self, y: [f64; 2]) -> f64 {
        let d = (y[0] - self.center[0]).hypot(y[1] - self.center[1]);
        mollifier(d / self.radius)
    }

    /// The bump rotated by `k`: `y ↦ b(k⁻¹y)`.
    pub fn rotated(&self, k: &SL2Element) -> Self {
        Self {
            center: k.apply(self.center),
            radius: self.radius,
        }
    }
}

/// `weight · Π_j b_j(column j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProduct {
    /// Complex weight.
    pub weight: C64,
    /// One bump per column.
    pub columns: Vec<DiskBump>,
}

impl ColumnProduct {
    fn value(&self, x: &[f64], p: usize) -> C64 {
        let mut v = self.weight;
        for (j, b) in self.columns.iter().enumerate() {
            let f = b.value([x[j], x[p + j]]);
            if f == 0.0 {
                return C64::new(0.0, 0.0);
            }
            v *= f;
        }
        v
    }

    /// Lower bound of `σ_min` on the support (Weyl perturbation bound).
    fn sigma_min_lower_bound(&self) -> f64 {
        let centres = column_matrix(&self.columns);
        let pert: f64 = self.columns.iter().map(|b| b.radius * b.radius).sum::<f64>().sqrt();
        singular_values_2xp(&centres).1 - pert
    }

    /// Upper bound of the Frobenius norm on the support.
    fn frobenius_upper_bound(&self) -> f64 {
        self.columns
            .iter()
            .map(|b| (b.center[0].hypot(b.center[1]) + b.radius).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn column_matrix(columns: &[DiskBump]) -> Vec<f64> {
    let p = columns.len();
    let mut x = vec![0.0; 2 * p];
    for (j, b) in columns.iter().enumerate() {
        x[j] = b.center[0];
        x[p + j] = b.center[1];
    }
    x
}

/// Singular values `(σ_max, σ_min)` of a 2×p matrix from its 2×2 Gram matrix.
pub fn singular_values_2xp(x: &[f64]) -> (f64, f64) {
    let p = x.len() / 2;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for j in 0..p {
        a += x[j] * x[j];
        b += x[j] * x[p + j];
        c += x[p + j] * x[p + j];
    }
    let tr = a + c;
    let disc = ((a - c).powi(2) + 4.0 * b * b).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = (0.5 * (tr - disc)).max(0.0);
    (l1.sqrt(), l2.sqrt())
}

/// Frobenius norm.
pub fn frobenius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A smooth function on `M_{2,p}` supported in
/// `{σ_min ≥ sigma_min_floor, |x| ≤ support_radius}`.
#[derive(Clone)]
pub struct TestFunctionM2p {
    p: usize,
    value: MatrixFn,
    sigma_min_floor: f64,
    support_radius: f64,
    terms: Option<Vec<ColumnProduct>>,
}

impl fmt::Debug for TestFunctionM2p {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunctionM2p")
            .field("p", &self.p)
            .field("sigma_min_floor", &self.sigma_min_floor)
            .field("support_radius", &self.support_radius)
            .field("terms", &self.terms)
            .finish_non_exhaustive()
    }
}

impl TestFunctionM2p {
    /// Wraps a callable; the caller guarantees the support condition, which
    /// is enforced on evaluation.
    pub fn new<F>(p: usize, value: F, sigma_min_floor: f64, support_radius: f64) -> Result<Self>
    where
        F: Fn(&[f64]) -> C64 + Send + Sync + 'static,
    {
        if p < 2 {
            return Err(Error::InvalidSupport(format!("p must be at least 2, got {p}")));
        }
        if !(sigma_min_floor > 0.0 && support_radius > sigma_min_floor && support_radius.is_finite()) {
            return Err(Error::InvalidSupport(format!(
                "need 0 < sigma_min_floor < support_radius, got {sigma_min_floor}, {support_radius}"
            )));
        }
        Ok(Self {
            p,
            value: Arc::new(value),
            sigma_min_floor,
            support_radius,
            terms: None,
        })
    }

    /// A sum of column products `Σ w_t Π_j b_{t,j}(x_{·j})`.
    pub fn from_column_products(terms: Vec<ColumnProduct>) -> Result<Self> {
        let p = terms
            .first()
            .map(|t| t.columns.len())
            .ok_or_else(|| Error::InvalidSupport("need at least one term".into()))?;
        if terms.iter().any(|t| t.columns.len() != p) {
            return Err(Error::InvalidSupport("all terms need the same number of columns".into()));
        }
        if terms.iter().any(|t| t.columns.iter().any(|b| !(b.radius > 0.0))) {
            return Err(Error::InvalidSupport("bump radii must be positive".into()));
        }
        let floor = terms.iter().map(|t| t.sigma_min_lower_bound()).fold(f64::INFINITY, f64::min);
        if !(floor > 0.0) {
            return Err(Error::InvalidSupport(format!(
                "the support meets the rank-deficient matrices (σ_min lower bound {floor})"
            )));
        }
        let radius = terms.iter().map(|t| t.frobenius_upper_bound()).fold(0.0, f64::max);
        let structure = terms.clone();
        let mut f = Self::new(
            p,
            move |x: &[f64]| structure.iter().map(|t| t.value(x, p)).sum(),
            floor,
            radius,
        )?;
        f.terms = Some(terms);
        Ok(f)
    }

    /// `mollifier((|x| − r0)/width) · s((σ_min(x) − floor)/floor)` where `s`
    /// is the smooth step: radial in the Frobenius norm, cut off smoothly near
    /// the rank-deficient matrices.
    pub fn radial_with_rank_cutoff(p: usize, r0: f64, width: f64, sigma_min_floor: f64) -> Result<Self> {
        if !(width > 0.0 && r0 > width && sigma_min_floor > 0.0) {
            return Err(Error::InvalidSupport(format!(
                "need r0 > width > 0 and a positive floor, got r0 = {r0}, width = {width}, floor = {sigma_min_floor}"
            )));
        }
        let value = move |x: &[f64]| {
            let radial = mollifier((frobenius(x) - r0) / width);
            if radial == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let (_, smin) = singular_values_2xp(x);
            C64::new(radial * smooth_step((smin - sigma_min_floor) / sigma_min_floor), 0.0)
        };
        Self::new(p, value, sigma_min_floor, r0 + width)
    }

    /// Number of columns `p`.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Value at `x ∈ M_{2,p}` (row-major); zero outside the declared support.
    pub fn value(&self, x: &[f64]) -> C64 {
        assert_eq!(x.len(), 2 * self.p, "point must have 2p coordinates");
        if frobenius(x) > self.support_radius {
            return C64::new(0.0, 0.0);
        }
        if singular_values_2xp(x).1 < self.sigma_min_floor {
            return C64::new(0.0, 0.0);
        }
        (self.value)(x)
    }

    /// Lower bound of `σ_min` on the support.
    pub fn sigma_min_floor(&self) -> f64 {
        self.sigma_min_floor
    }

    /// Upper bound of the Frobenius norm on the support.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// The column-product structure, when known.
    pub fn column_terms(&self) -> Option<&[ColumnProduct]> {
        self.terms.as_deref()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        let inner = Arc::clone(&self.value);
        let mut out = Self {
            p: self.p,
            value: Arc::new(move |x: &[f64]| inner(x).conj()),
            sigma_min_floor: self.sigma_min_floor,
            support_radius: self.support_radius,
            terms: None,
        };
        out.terms = self.terms.as_ref().map(|ts| {
            ts.iter()
                .map(|t| ColumnProduct {
                    weight: t.weight.conj(),
                    columns: t.columns.clone(),
                })
                .collect()
        });
        out
    }

    /// `x ↦ u(g⁻¹x)`: the left action `ω₀(g)`.
    pub fn translated(&self, g: &SL2Element) -> Result<Self> {
        let gi = g.inverse();
        let p = self.p;
        let inner = Arc::clone(&self.value);
        // |g⁻¹x| ≥ σ_min(g⁻¹)·|x| etc.: the support moves within these bounds.
        let norm = g.op_norm();
        let floor = self.sigma_min_floor / norm;
        let radius = self.support_radius * norm;
        let mut out = Self::new(
            p,
            move |x: &[f64]| {
                let y = apply_left(&gi, x, p);
                inner(&y)
            },
            floor,
            radius.max(floor * 1.0001),
        )?;
        if let Some(ts) = &self.terms {
            if g.distance(&SL2Element::rotation(g.iwasawa().theta)) < 1e-14 {
                out.terms = Some(
                    ts.iter()
                        .map(|t| ColumnProduct {
                            weight: t.weight,
                            columns: t.columns.iter().map(|b| b.rotated(g)).collect(),
                        })
                        .collect(),
                );
            }
        }
        Ok(out)
    }

    /// Shared handle to the raw callable (support not enforced).
    pub fn callable(&self) -> MatrixFn {
        Arc::clone(&self.value)
    }
}

/// `gx` for `x ∈ M_{2,p}` (row-major).
pub fn apply_left(g: &SL2Element, x: &[f64], p: usize) -> Vec<f64> {
    let m = g.entries();
    let mut y = vec![0.0; 2 * p];
    for j in 0..p {
        y[j] = m[0][0] * x[j] + m[0][1] * x[p + j];
        y[p + j] = m[1][0] * x[j] + m[1][1] * x[p + j];
    }
    y
}

/// Quadrature parameters for `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsiConfig {
    /// Radial Gauss–Legendre nodes per disk.
    pub radial: usize,
    /// Angular trapezoid nodes per disk.
    pub angular: usize,
    /// Gauss–Legendre nodes per coordinate for the generic path.
    pub generic_nodes: usize,
}

impl Default for PsiConfig {
    fn default() -> Self {
        Self {
            radial: 24,
            angular: 48,
            generic_nodes: 24,
        }
    }
}

impl PsiConfig {
    /// Validates the node counts.
    pub fn validate(&self) -> Result<()> {
        if self.radial < 4 || self.angular < 8 || self.generic_nodes < 4 {
            return Err(Error::InvalidConfig(format!("too few quadrature nodes: {self:?}")));
        }
        Ok(())
    }
}

/// Polar Gauss–Legendre rule on a disk: points and weights (area element
/// included).
#[derive(Debug, Clone)]
struct DiskRule {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl DiskRule {
    fn new(b: &DiskBump, radial: usize, angular: usize) -> Self {
        let (x, w) = gauss_legendre(radial);
        let mut points = Vec::with_capacity(radial * angular);
        let mut weights = Vec::with_capacity(radial * angular);
        let h = 2.0 * PI / angular as f64;
        for (t, wt) in x.iter().zip(&w) {
            let r = 0.5 * b.radius * (1.0 + t);
            let wr = 0.5 * b.radius * wt * r * h;
            let fr = mollifier(r / b.radius);
            for k in 0..angular {
                // Offset by half a step so that nodes of different rings interleave.
                let th = h * (k as f64 + 0.5);
                points.push([b.center[0] + r * th.cos(), b.center[1] + r * th.sin()]);
                weights.push(wr * fr);
            }
        }
        Self { points, weights }
    }

    /// `∫ a(g y) b(y) dy` with `b` folded into the weights.
    fn integrate(&self, a: &DiskBump, g: &SL2Element) -> f64 {
        let m = g.entries();
        let inv_r = 1.0 / a.radius;
        let mut s = 0.0;
        for (y, w) in self.points.iter().zip(&self.weights) {
            let gy0 = m[0][0] * y[0] + m[0][1] * y[1] - a.center[0];
            let gy1 = m[1][0] * y[0] + m[1][1] * y[1] - a.center[1];
            let d2 = (gy0 * gy0 + gy1 * gy1) * inv_r * inv_r;
            if d2 < 1.0 {
                s += w * (-1.0 / (1.0 - d2)).exp();
            }
        }
        s
    }
}

/// Precomputed disk rules for evaluating `ψ` of column-product pairs.
#[derive(Debug, Clone)]
pub struct PsiEvaluator {
    p: usize,
    u_terms: Vec<ColumnProduct>,
    v_terms: Vec<ColumnProduct>,
    u_rules: Vec<Vec<DiskRule>>,
    v_rules: Vec<Vec<DiskRule>>,
}

impl PsiEvaluator {
    /// Prepares `ψ(g) = ∫_X u(gx) v(x) dx` for column-product `u`, `v`.
    pub fn new(u: &TestFunctionM2p, v: &TestFunctionM2p, cfg: &PsiConfig) -> Result<Self> {
        cfg.validate()?;
        if u.p() != v.p() {
            return Err(Error::DomainError("u and v must live on the same M_{2,p}".into()));
        }
        let (ut, vt) = match (u.column_terms(), v.column_terms()) {
            (Some(a), Some(b)) => (a.to_vec(), b.to_vec()),
            _ => {
                return Err(Error::DomainError(
                    "the factorised ψ path needs column-product test functions".into(),
                ))
            }
        };
        let rules = |ts: &[ColumnProduct]| -> Vec<Vec<DiskRule>> {
            ts.iter()
                .map(|t| t.columns.iter().map(|b| DiskRule::new(b, cfg.radial, cfg.angular)).collect())
                .collect()
        };
        Ok(Self {
            p: u.p(),
            u_rules: rules(&ut),
            v_rules: rules(&vt),
            u_terms: ut,
            v_terms: vt,
        })
    }

    /// Columnwise correlation `½[∫ a(gy)b(y)dy + ∫ a(y)b(g⁻¹y)dy]`; the two
    /// halves are the same integral with the quadrature placed on either
    /// disk, which makes `ψ_{v,u}(g⁻¹) = ψ_{u,v}(g)` hold to rounding.
    fn correlation(&self, ui: usize, vi: usize, j: usize, g: &SL2Element, gi: &SL2Element, gnorm: f64) -> f64 {
        let a = &self.u_terms[ui].columns[j];
        let b = &self.v_terms[vi].columns[j];
        // g(disk_b) lies within ‖g‖ρ_b of g c_b.
        let gc = g.apply(b.center);
        let gap = (gc[0] - a.center[0]).hypot(gc[1] - a.center[1]);
        if gap >= gnorm * b.radius + a.radius {
            return 0.0;
        }
        let first = self.v_rules[vi][j].integrate(a, g);
        let second = self.u_rules[ui][j].integrate(b, gi);
        0.5 * (first + second)
    }

    /// `ψ(g)`.
    pub fn psi(&self, g: &SL2Element) -> C64 {
        let gi = g.inverse();
        let gnorm = g.op_norm();
        let mut total = C64::new(0.0, 0.0);
        for (ui, ut) in self.u_terms.iter().enumerate() {
            for (vi, vt) in self.v_terms.iter().enumerate() {
                let mut prod = 1.0;
                for j in 0..self.p {
                    prod *= self.correlation(ui, vi, j, g, &gi, gnorm);
                    if prod == 0.0 {
                        break;
                    }
                }
                if prod != 0.0 {
                    total += ut.weight * vt.weight * prod;
                }
            }
        }
        total
    }
}

/// Bound from the supports: `ψ(g) = 0` when `‖g‖ > R_u / floor_v`.
pub fn psi_support_bound(u: &TestFunctionM2p, v: &TestFunctionM2p) -> f64 {
    u.support_radius() / v.sigma_min_floor()
}

/// `ψ(g) = ∫_X u(gx) v(x) dx`: the factorised path for column products and
/// the generic Cartesian path otherwise.
pub fn psi_from_pair(u: &TestFunctionM2p, v: &TestFunctionM2p, g: &SL2Element, cfg: &PsiConfig) -> Result<C64> {
    if g.op_norm() > psi_support_bound(u, v) {
        return Ok(C64::new(0.0, 0.0));
    }
    if u.column_terms().is_some() && v.column_terms().is_some() {
        return Ok(PsiEvaluator::new(u, v, cfg)?.psi(g));
    }
    psi_generic(u, v, g, cfg)
}

/// `∫_X u(gx) conj(v(x)) dx`.
pub fn psi_hermitian(u: &TestFunctionM2p, v: &TestFunctionM2p, g: &SL2Element, cfg: &PsiConfig) -> Result<C64> {
    psi_from_pair(u, &v.conj(), g, cfg)
}

/// Tensor Gauss–Legendre quadrature of `u(gx)v(x)` over the cube
/// `[−R_v, R_v]^{2p}` (only practical for `p = 2`).
pub fn psi_generic(u: &TestFunctionM2p, v: &TestFunctionM2p, g: &SL2Element, cfg: &PsiConfig) -> Result<C64> {
    cfg.validate()?;
    let p = v.p();
    if p != 2 || u.p() != 2 {
        return Err(Error::DomainError("the generic ψ quadrature is implemented for p = 2".into()));
    }
    let r = v.support_radius();
    let rule = FixedRule::composite_gauss(-r, r, 2, cfg.generic_nodes / 2);
    let n = rule.len();
    let mut total = C64::new(0.0, 0.0);
    let mut x = [0.0; 4];
    for a in 0..n {
        x[0] = rule.nodes[a];
        for b in 0..n {
            x[1] = rule.nodes[b];
            for c in 0..n {
                x[2] = rule.nodes[c];
                let w3 = rule.weights[a] * rule.weights[b] * rule.weights[c];
                for d in 0..n {
                    x[3] = rule.nodes[d];
                    let vv = v.value(&x);
                    if vv == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let gx = apply_left(g, &x, p);
                    total += u.value(&gx) * vv * (w3 * rule.weights[d]);
                }
            }
        }
    }
    Ok(total)
}
