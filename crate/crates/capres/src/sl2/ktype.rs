//! `K = SO(2)`-type projections on `M_{2,p}` and the residue forms
//! `(u, v)_{ε,n} = (ω₀(Θ_{π_{ε,n}}) u, v)` split along blocks of K-types.
//!
//! Conventions: `χ_m(k_θ) = e^{imθ}`, `dk = dθ/2π`, and
//! `P_m u(x) = ∫_K χ_m(k) u(k⁻¹x) dk`, so that `P_m u(kx) = χ_m(k) P_m u(x)`.
//! For `ψ(g) = (ω₀(g)u, v)` and `g = k_α h_{e^τ} k_β`, the pairing of the
//! `m`-components of `u` and `m′`-components of `v` contributes
//! `e^{−imβ − im′α} c_{m,m′}(τ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl2::group::{check_epsilon, KTypeBlock, SL2Element};
use crate::sl2::orbital::{symmetric_rule, upper_triangular, GroupFunction, OrbitalConfig, OrbitalProfile};
use crate::sl2::testfn::{ColumnProduct, TestFunctionM2p};

type C64 = Complex64;

/// Discretisation of `K` and of the Cartan parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KTypeConfig {
    /// Trapezoid nodes on `K` (even, at least 8).
    pub k_nodes: usize,
    /// Chebyshev nodes in `τ ∈ [0, ln B]`.
    pub tau_nodes: usize,
}

impl Default for KTypeConfig {
    fn default() -> Self {
        Self {
            k_nodes: 128,
            tau_nodes: 64,
        }
    }
}

impl KTypeConfig {
    /// Validates the node counts.
    pub fn validate(&self) -> Result<()> {
        if self.k_nodes < 8 || !self.k_nodes.is_multiple_of(2) || self.tau_nodes < 4 {
            return Err(Error::InvalidConfig(format!(
                "need an even k_nodes ≥ 8 and tau_nodes ≥ 4, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Largest `|m|` resolved by `k_nodes`.
    pub fn m_max(&self) -> i64 {
        self.k_nodes as i64 / 2 - 1
    }
}

/// `χ_m(k_θ) = e^{imθ}`.
pub fn k_character(m: i64, theta: f64) -> C64 {
    C64::from_polar(1.0, m as f64 * theta)
}

fn k_angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// `x ↦ Σ_j w_j u(k_{θ_j}⁻¹ x)` with `w_j = (1/N) Σ_{m∈ms} χ_m(k_{θ_j})`.
fn project_with(u: &TestFunctionM2p, ms: &[i64], cfg: &KTypeConfig) -> Result<TestFunctionM2p> {
    cfg.validate()?;
    let angles = k_angles(cfg.k_nodes);
    let n = cfg.k_nodes as f64;
    let weights: Vec<C64> = angles
        .iter()
        .map(|&th| ms.iter().map(|&m| k_character(m, th)).sum::<C64>() / n)
        .collect();
    if let Some(terms) = u.column_terms() {
        // Rotating a column product rotates each bump centre.
        let mut out = Vec::with_capacity(terms.len() * angles.len());
        for (th, w) in angles.iter().zip(&weights) {
            if w.norm() == 0.0 {
                continue;
            }
            let k = SL2Element::rotation(*th);
            for t in terms {
                out.push(ColumnProduct {
                    weight: t.weight * w,
                    columns: t.columns.iter().map(|b| b.rotated(&k)).collect(),
                });
            }
        }
        if out.is_empty() {
            return zero_like(u);
        }
        // Rotations preserve singular values, so the support bounds carry over.
        return TestFunctionM2p::from_column_products(out);
    }
    let p = u.p();
    let inner = u.clone();
    let rotations: Vec<SL2Element> = angles.iter().map(|&th| SL2Element::rotation(-th)).collect();
    TestFunctionM2p::new(
        p,
        move |x: &[f64]| {
            rotations
                .iter()
                .zip(&weights)
                .map(|(ki, w)| w * inner.value(&crate::sl2::testfn::apply_left(ki, x, p)))
                .sum()
        },
        u.sigma_min_floor(),
        u.support_radius(),
    )
}

fn zero_like(u: &TestFunctionM2p) -> Result<TestFunctionM2p> {
    TestFunctionM2p::new(u.p(), |_| C64::new(0.0, 0.0), u.sigma_min_floor(), u.support_radius())
}

/// `P_m u(x) = ∫_K χ_m(k) u(k⁻¹x) dk` by the trapezoid rule on `K`.
pub fn ktype_project(u: &TestFunctionM2p, m: i64, cfg: &KTypeConfig) -> Result<TestFunctionM2p> {
    cfg.validate()?;
    if m.abs() > cfg.m_max() {
        return Err(Error::InvalidConfig(format!(
            "K-type {m} is not resolved by {} nodes on K",
            cfg.k_nodes
        )));
    }
    project_with(u, &[m], cfg)
}

/// The K-types `m ≡ ε (mod 2)` of `block` resolved by `cfg`.
pub fn block_ktypes(epsilon: u8, n: i64, block: KTypeBlock, cfg: &KTypeConfig) -> Vec<i64> {
    let mm = cfg.m_max();
    (-mm..=mm).filter(|&m| block.contains(m, epsilon, n)).collect()
}

/// `Σ_{m ∈ block} P_m u`.
pub fn ktype_project_block(
    u: &TestFunctionM2p,
    epsilon: u8,
    n: i64,
    block: KTypeBlock,
    cfg: &KTypeConfig,
) -> Result<TestFunctionM2p> {
    check_epsilon(epsilon)?;
    project_with(u, &block_ktypes(epsilon, n, block, cfg), cfg)
}

/// `g ↦ ∫_K χ_m(k) f(k⁻¹g) dk`: the projection on the left `K`-type `m` of a
/// function on the group.
pub fn group_ktype_project(f: &GroupFunction, m: i64, nodes: usize) -> Result<GroupFunction> {
    if nodes < 8 {
        return Err(Error::InvalidConfig(format!("need at least 8 nodes on K, got {nodes}")));
    }
    let angles = k_angles(nodes);
    let inner = f.clone();
    GroupFunction::new(
        move |g| {
            angles
                .iter()
                .map(|&th| k_character(m, th) * inner.value(&SL2Element::rotation(-th).compose(g)))
                .sum::<C64>()
                / nodes as f64
        },
        f.norm_bound(),
    )
}

/// Barycentric interpolation on Chebyshev points of the second kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Chebyshev {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Chebyshev {
    fn new(a: f64, b: f64, n: usize) -> Self {
        let nodes = (0..n)
            .map(|i| a + 0.5 * (b - a) * (1.0 - (PI * i as f64 / (n - 1) as f64).cos()))
            .collect();
        let weights = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                if i == 0 || i == n - 1 {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        Self { a, b, nodes, weights }
    }

    /// Barycentric coefficients `ℓ_i(x)` with `Σ ℓ_i f_i = f(x)`.
    fn coefficients(&self, x: f64) -> Vec<f64> {
        let x = x.clamp(self.a, self.b);
        if let Some(i) = self.nodes.iter().position(|&xi| xi == x) {
            let mut c = vec![0.0; self.nodes.len()];
            c[i] = 1.0;
            return c;
        }
        let raw: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(xi, w)| w / (x - xi)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|r| r / total).collect()
    }
}

/// Tables of `c_{m,m′}(τ)` on Chebyshev nodes in `τ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KTypeTable {
    m_max: i64,
    cheb: Chebyshev,
    /// `coeffs[i][(m + m_max)·w + (m′ + m_max)]` at the `i`-th `τ` node.
    coeffs: Vec<Vec<C64>>,
    norm_bound: f64,
}

impl KTypeTable {
    /// Samples `ψ(k_α h_{e^τ} k_β)` on an `N × N` grid of `(α, β)` for each
    /// Chebyshev node `τ` and extracts the double Fourier coefficients.
    pub fn build(psi: &GroupFunction, cfg: &KTypeConfig) -> Result<Self> {
        cfg.validate()?;
        let tau_max = psi.norm_bound().ln();
        if !(tau_max > 0.0) {
            return Err(Error::InvalidSupport("ψ is supported in the compact subgroup".into()));
        }
        let n = cfg.k_nodes;
        let m_max = cfg.m_max();
        let width = (2 * m_max + 1) as usize;
        let angles = k_angles(n);
        let cheb = Chebyshev::new(0.0, tau_max, cfg.tau_nodes);
        let rotations: Vec<SL2Element> = angles.iter().map(|&a| SL2Element::rotation(a)).collect();
        // Phase table e^{imθ_j}.
        let phases: Vec<Vec<C64>> = (-m_max..=m_max)
            .map(|m| angles.iter().map(|&a| k_character(m, a)).collect())
            .collect();
        let coeffs = cheb
            .nodes
            .par_iter()
            .map(|&tau| {
                let h = SL2Element::diagonal(tau);
                // samples[j][l] = ψ(k_{α_j} h k_{β_l}).
                let samples: Vec<Vec<C64>> = rotations
                    .iter()
                    .map(|ka| {
                        let kah = ka.compose(&h);
                        rotations.iter().map(|kb| psi.value(&kah.compose(kb))).collect()
                    })
                    .collect();
                // Transform in β: partial[j][m] = (1/N) Σ_l e^{imβ_l} samples[j][l].
                let partial: Vec<Vec<C64>> = samples
                    .iter()
                    .map(|row| {
                        phases
                            .iter()
                            .map(|ph| row.iter().zip(ph).map(|(s, e)| s * e).sum::<C64>() / n as f64)
                            .collect()
                    })
                    .collect();
                // Transform in α for m′.
                let mut out = vec![C64::new(0.0, 0.0); width * width];
                for mi in 0..width {
                    for (mpi, ph) in phases.iter().enumerate() {
                        let s: C64 = (0..n).map(|j| partial[j][mi] * ph[j]).sum();
                        out[mi * width + mpi] = s / n as f64;
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            m_max,
            cheb,
            coeffs,
            norm_bound: psi.norm_bound(),
        })
    }

    /// Largest tabulated `|m|`.
    pub fn m_max(&self) -> i64 {
        self.m_max
    }

    fn index(&self, m: i64, mp: i64) -> Option<usize> {
        if m.abs() > self.m_max || mp.abs() > self.m_max {
            return None;
        }
        let w = (2 * self.m_max + 1) as usize;
        Some((m + self.m_max) as usize * w + (mp + self.m_max) as usize)
    }

    /// `c_{m,m′}(τ)`.
    pub fn coefficient(&self, m: i64, mp: i64, tau: f64) -> C64 {
        match self.index(m, mp) {
            Some(idx) if tau <= self.cheb.b => {
                let c = self.cheb.coefficients(tau);
                c.iter().zip(&self.coeffs).map(|(l, row)| row[idx] * *l).sum()
            }
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Diagonal terms `d_m(τ) = c_{m,m}(τ)` for the listed `m`.
    fn diagonal(&self, ms: &[i64], tau: f64) -> Vec<C64> {
        if tau > self.cheb.b {
            return vec![C64::new(0.0, 0.0); ms.len()];
        }
        let c = self.cheb.coefficients(tau);
        ms.iter()
            .map(|&m| match self.index(m, m) {
                Some(idx) => c.iter().zip(&self.coeffs).map(|(l, row)| row[idx] * *l).sum(),
                None => C64::new(0.0, 0.0),
            })
            .collect()
    }

    /// The matrix coefficient of `(P u, P v)` with `P = Σ_{m∈ms} P_m`:
    /// `g ↦ Σ_{m,m′∈ms} e^{−imβ − im′α} c_{m,m′}(τ)`.
    pub fn filtered(&self, ms: &[i64]) -> Result<GroupFunction> {
        let table = self.clone();
        let ms: Vec<i64> = ms.iter().copied().filter(|m| m.abs() <= self.m_max).collect();
        GroupFunction::new(
            move |g| {
                let k = g.cartan();
                if k.tau > table.cheb.b {
                    return C64::new(0.0, 0.0);
                }
                let c = table.cheb.coefficients(k.tau);
                let mut total = C64::new(0.0, 0.0);
                for &m in &ms {
                    for &mp in &ms {
                        let idx = table.index(m, mp).expect("filtered K-types are in range");
                        let v: C64 = c.iter().zip(&table.coeffs).map(|(l, row)| row[idx] * *l).sum();
                        total += v * k_character(-m, k.beta) * k_character(-mp, k.alpha);
                    }
                }
                total
            },
            self.norm_bound,
        )
    }
}

/// Discretisation of residue forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ResidueFormConfig {
    /// Orbital-integral grids.
    pub orbital: OrbitalConfig,
    /// K-type tables.
    pub ktype: KTypeConfig,
}

impl ResidueFormConfig {
    /// Validates both parts.
    pub fn validate(&self) -> Result<()> {
        self.orbital.validate()?;
        self.ktype.validate()
    }
}

fn check_parameter(epsilon: u8, n: i64) -> Result<()> {
    check_epsilon(epsilon)?;
    if n < 0 || (n - epsilon as i64).rem_euclid(2) == 0 {
        return Err(Error::DomainError(format!(
            "π_{{ε,n}} is reducible only for n ≥ 0 with n ≢ ε (mod 2); got ε = {epsilon}, n = {n}"
        )));
    }
    Ok(())
}

/// The residue forms of one matrix coefficient `ψ(g) = (ω₀(g)u, v)`.
///
/// The full form integrates `ψ` against the character `ρⁿ + ρ⁻ⁿ` of the split
/// torus through orbital integrals; block forms integrate the `K`-type
/// components of the same coefficient, read off from a [`KTypeTable`].
#[derive(Debug)]
pub struct ResidueForms {
    psi: GroupFunction,
    cfg: ResidueFormConfig,
    profile: OrbitalProfile,
    table: std::sync::OnceLock<KTypeTable>,
}

impl ResidueForms {
    /// Forms of `(u, v) ↦ ∫ Θ(g) (ω₀(g)u, v) dg`.
    pub fn new(u: &TestFunctionM2p, v: &TestFunctionM2p, cfg: &ResidueFormConfig) -> Result<Self> {
        cfg.validate()?;
        Self::from_coefficient(GroupFunction::hermitian(u, v, &cfg.orbital.psi)?, cfg)
    }

    /// Forms of an arbitrary compactly supported matrix coefficient.
    pub fn from_coefficient(psi: GroupFunction, cfg: &ResidueFormConfig) -> Result<Self> {
        cfg.validate()?;
        let profile = OrbitalProfile::build(&psi, &cfg.orbital)?;
        Ok(Self {
            psi,
            cfg: *cfg,
            profile,
            table: std::sync::OnceLock::new(),
        })
    }

    /// The matrix coefficient.
    pub fn coefficient(&self) -> &GroupFunction {
        &self.psi
    }

    /// Orbital profile of the coefficient.
    pub fn profile(&self) -> &OrbitalProfile {
        &self.profile
    }

    /// `K`-type table of the coefficient (built on first use).
    pub fn table(&self) -> Result<&KTypeTable> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let t = KTypeTable::build(&self.psi, &self.cfg.ktype)?;
        Ok(self.table.get_or_init(|| t))
    }

    /// `(u, v)_{ε,n}` for the whole of `π_{ε,n}`.
    pub fn full(&self, epsilon: u8, n: i64) -> Result<C64> {
        check_parameter(epsilon, n)?;
        self.profile.cosh_form(epsilon, n as f64)
    }

    /// `(u, v)_{ε,n,b}`: the contribution of the `K`-types in `block`.
    pub fn block(&self, epsilon: u8, n: i64, block: KTypeBlock) -> Result<C64> {
        check_parameter(epsilon, n)?;
        if block == KTypeBlock::Full {
            return self.full(epsilon, n);
        }
        let table = self.table()?;
        let ms = block_ktypes(epsilon, n, block, &self.cfg.ktype);
        if ms.is_empty() {
            return Ok(C64::new(0.0, 0.0));
        }
        let oc = &self.cfg.orbital;
        let tmax = self.profile.type_bound();
        let b = self.psi.norm_bound();
        let trule = symmetric_rule(tmax, oc.t_panels, oc.t_order);
        let srule = symmetric_rule(b, oc.s_panels, oc.s_order);
        let nn = n as f64;
        let parts: Vec<C64> = trule
            .nodes
            .par_iter()
            .zip(&trule.weights)
            .map(|(&t, &wt)| {
                let mut ft = C64::new(0.0, 0.0);
                for (&s, &ws) in srule.nodes.iter().zip(&srule.weights) {
                    let k = upper_triangular(t, s).cartan();
                    if k.tau > tmax {
                        continue;
                    }
                    let phi = k.alpha + k.beta;
                    let d = table.diagonal(&ms, k.tau);
                    let sum: C64 = ms.iter().zip(&d).map(|(&m, dm)| dm * k_character(-m, phi)).sum();
                    ft += sum * ws;
                }
                ft * (2.0 * (nn * t).cosh() * wt)
            })
            .collect();
        Ok(parts.into_iter().sum())
    }
}

/// `(u, v)_{ε,n,b} = (ω₀(Θ_{π_{ε,n}}) P_b u, P_b v)` for the block `b`
/// (`Full` gives the whole form).
pub fn residue_form(
    u: &TestFunctionM2p,
    v: &TestFunctionM2p,
    epsilon: u8,
    n: i64,
    block: KTypeBlock,
    cfg: &ResidueFormConfig,
) -> Result<C64> {
    check_parameter(epsilon, n)?;
    ResidueForms::new(u, v, cfg)?.block(epsilon, n, block)
}
