//! Casimir operators of the pair `(Sp₂(ℝ), O_{p,p})` acting on functions on
//! `X = M_{2,p}(ℝ)`, and the Capelli identity relating them.
//!
//! Coordinates: `x ∈ M_{2,p}` is stored row-major, variable `i·p + j` being
//! the entry `x_{i+1, j+1}`. `SL(2,ℝ)` acts by `g·x = gx` (rows), `O_{p,p}` on
//! the columns. The Lie algebra of `O_{p,p}` is realised by the quadratic
//! operators commuting with `ω₀(sl₂)`: the multiplications
//! `x_{1j}x_{2k} − x_{2j}x_{1k}`, the second-order operators
//! `∂_{1j}∂_{2k} − ∂_{2j}∂_{1k}` (`j < k`), and the `gl_p` operators
//! `Σ_i x_{ij}∂_{ik} + δ_{jk}`. Every quadratic operator `T` acts on the span
//! of `{x_a, ∂_a}` by `ℓ ↦ [T, ℓ]`; on `W = ℝ² ⊗ ℝ^{2p}` this is `1 ⊗ A_T`,
//! so the trace form of the defining representation is
//! `B(S, T) = tr(ad S · ad T) / 2`.
//!
//! Normalisation: the element `C = h² − 2h + 4e⁺e⁻` equals `2·C_B` for the
//! trace form `B` of `sl₂`, so `C′` is taken as `2·C_B` for the trace form of
//! `o_{p,p}` as well.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::diffop::{rational_inverse, DiffOperator, PolyExpQuadratic, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::sl2::group::SL2Element;

/// Variable index of `x_{i+1, j+1}` in `M_{2,p}`.
pub fn var(p: usize, i: usize, j: usize) -> usize {
    i * p + j
}

fn check_p(p: usize) -> Result<()> {
    if p < 1 {
        return Err(Error::DomainError("p must be at least 1".into()));
    }
    Ok(())
}

fn xd(p: usize, xi: usize, di: usize) -> DiffOperator {
    DiffOperator::x(2 * p, xi).compose(&DiffOperator::d(2 * p, di))
}

/// `ω₀(h) = Σ_j (x_{2j}∂_{2j} − x_{1j}∂_{1j})`.
pub fn omega0_h(p: usize) -> DiffOperator {
    let mut op = DiffOperator::zero(2 * p);
    for j in 0..p {
        op = op
            .plus(&xd(p, var(p, 1, j), var(p, 1, j)))
            .minus(&xd(p, var(p, 0, j), var(p, 0, j)));
    }
    op
}

/// `ω₀(e⁺) = −Σ_j x_{2j}∂_{1j}`.
pub fn omega0_e_plus(p: usize) -> DiffOperator {
    let mut op = DiffOperator::zero(2 * p);
    for j in 0..p {
        op = op.minus(&xd(p, var(p, 1, j), var(p, 0, j)));
    }
    op
}

/// `ω₀(e⁻) = −Σ_j x_{1j}∂_{2j}`.
pub fn omega0_e_minus(p: usize) -> DiffOperator {
    let mut op = DiffOperator::zero(2 * p);
    for j in 0..p {
        op = op.minus(&xd(p, var(p, 0, j), var(p, 1, j)));
    }
    op
}

/// `ω₀(C) = ω₀(h)² − 2ω₀(h) + 4ω₀(e⁺)ω₀(e⁻)`, composed symbolically.
pub fn casimir_operator(p: usize) -> Result<DiffOperator> {
    check_p(p)?;
    let h = omega0_h(p);
    let ep = omega0_e_plus(p);
    let em = omega0_e_minus(p);
    Ok(h
        .compose(&h)
        .minus(&h.scale(Rational::from_integer(2)))
        .plus(&ep.compose(&em).scale(Rational::from_integer(4))))
}

/// The positive Capelli operator `C⁺ = −ω₀(C) − 1`.
pub fn positive_capelli_operator(p: usize) -> Result<DiffOperator> {
    let c = casimir_operator(p)?;
    Ok(c.scale(-Rational::one()).minus(&DiffOperator::identity(2 * p)))
}

/// A named basis element of `ω₀(o_{p,p})`.
#[derive(Debug, Clone)]
pub struct LieBasisElement {
    /// Human-readable label.
    pub label: String,
    /// The operator.
    pub operator: DiffOperator,
}

/// Basis of `ω₀(o_{p,p})`: `p²` operators from `gl_p` and `p(p−1)/2` each of
/// multiplication and second-order type (`dim = p(2p−1)`).
pub fn o_pp_basis(p: usize) -> Result<Vec<LieBasisElement>> {
    check_p(p)?;
    let dim = 2 * p;
    let mut out = Vec::new();
    for j in 0..p {
        for k in 0..p {
            let mut op = DiffOperator::zero(dim);
            for i in 0..2 {
                op = op.plus(&xd(p, var(p, i, j), var(p, i, k)));
            }
            if j == k {
                op = op.plus(&DiffOperator::identity(dim));
            }
            out.push(LieBasisElement {
                label: format!("E[{j},{k}]"),
                operator: op,
            });
        }
    }
    for j in 0..p {
        for k in (j + 1)..p {
            let x = |i: usize, c: usize| DiffOperator::x(dim, var(p, i, c));
            let d = |i: usize, c: usize| DiffOperator::d(dim, var(p, i, c));
            out.push(LieBasisElement {
                label: format!("Q[{j},{k}]"),
                operator: x(0, j).compose(&x(1, k)).minus(&x(1, j).compose(&x(0, k))),
            });
            out.push(LieBasisElement {
                label: format!("D[{j},{k}]"),
                operator: d(0, j).compose(&d(1, k)).minus(&d(1, j).compose(&d(0, k))),
            });
        }
    }
    Ok(out)
}

/// Basis `{h, e⁺, e⁻}` of `ω₀(sl₂)`.
pub fn sl2_basis(p: usize) -> Vec<LieBasisElement> {
    vec![
        LieBasisElement {
            label: "h".into(),
            operator: omega0_h(p),
        },
        LieBasisElement {
            label: "e+".into(),
            operator: omega0_e_plus(p),
        },
        LieBasisElement {
            label: "e-".into(),
            operator: omega0_e_minus(p),
        },
    ]
}

/// Matrix of `ℓ ↦ [T, ℓ]` on the span of `(x_0, …, x_{d−1}, ∂_0, …, ∂_{d−1})`.
///
/// Fails when `T` does not preserve the span (it is not quadratic).
#[allow(clippy::needless_range_loop)] // fills the matrix column by column
pub fn adjoint_matrix(t: &DiffOperator) -> Result<Vec<Vec<Rational>>> {
    let d = t.dim();
    let mut m = vec![vec![Rational::zero(); 2 * d]; 2 * d];
    let zero = vec![0u8; d];
    let unit = |a: usize| {
        let mut e = vec![0u8; d];
        e[a] = 1;
        e
    };
    for col in 0..2 * d {
        let l = if col < d {
            DiffOperator::x(d, col)
        } else {
            DiffOperator::d(d, col - d)
        };
        let c = t.commutator(&l);
        let mut expected = DiffOperator::zero(d);
        for a in 0..d {
            let cx = c.coeff(&unit(a), &zero);
            let cd = c.coeff(&zero, &unit(a));
            m[a][col] = cx;
            m[d + a][col] = cd;
            expected = expected
                .plus(&DiffOperator::x(d, a).scale(cx))
                .plus(&DiffOperator::d(d, a).scale(cd));
        }
        if expected != c {
            return Err(Error::DomainError(format!(
                "operator does not act linearly on the Heisenberg span: [T, ℓ] = {c}"
            )));
        }
    }
    Ok(m)
}

fn trace_of_product(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut s = Rational::zero();
    for i in 0..n {
        for k in 0..n {
            s += a[i][k] * b[k][i];
        }
    }
    s
}

/// Gram matrix `B(X_i, X_j)` of the trace form of the defining
/// representation, computed from the adjoint action on the Heisenberg span
/// (where `W = V ⊗ V′` makes the trace twice the defining trace).
pub fn trace_form_gram(basis: &[LieBasisElement], multiplicity: i64) -> Result<Vec<Vec<Rational>>> {
    let ads: Vec<_> = basis.iter().map(|b| adjoint_matrix(&b.operator)).collect::<Result<_>>()?;
    let n = basis.len();
    let mut g = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = trace_of_product(&ads[i], &ads[j]) / Rational::from_integer(multiplicity);
        }
    }
    Ok(g)
}

/// `Σ b^{ij} X_i X_j` for the inverse Gram matrix `b^{ij}`.
pub fn casimir_from_basis(basis: &[LieBasisElement], gram: &[Vec<Rational>]) -> Result<DiffOperator> {
    let inv = rational_inverse(gram)
        .ok_or_else(|| Error::DomainError("the bilinear form is degenerate on this basis".into()))?;
    let dim = basis
        .first()
        .map(|b| b.operator.dim())
        .ok_or_else(|| Error::DomainError("empty basis".into()))?;
    let mut c = DiffOperator::zero(dim);
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            if !inv[i][j].is_zero() {
                c = c.plus(&bi.operator.compose(&bj.operator).scale(inv[i][j]));
            }
        }
    }
    Ok(c)
}

/// `ω₀(C′) = 2·Σ b^{ij} X_i X_j` for `o_{p,p}` with the trace form of the
/// defining representation `ℝ^{2p}`.
pub fn o_pp_casimir(p: usize) -> Result<DiffOperator> {
    let basis = o_pp_basis(p)?;
    // The Heisenberg span is V ⊗ V′ with dim V = 2.
    let gram = trace_form_gram(&basis, 2)?;
    Ok(casimir_from_basis(&basis, &gram)?.scale(Rational::from_integer(2)))
}

/// `2·C_B` for `sl₂` with the trace form of `ℝ²`; equals [`casimir_operator`].
pub fn sl2_casimir_from_trace_form(p: usize) -> Result<DiffOperator> {
    check_p(p)?;
    let basis = sl2_basis(p);
    // The Heisenberg span is V ⊗ V′ with dim V′ = 2p.
    let gram = trace_form_gram(&basis, 2 * p as i64)?;
    Ok(casimir_from_basis(&basis, &gram)?.scale(Rational::from_integer(2)))
}

/// Outcome of the Capelli identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapelliReport {
    /// The rank parameter `p`.
    pub p: usize,
    /// Least-squares constant `c` in `(ω₀(C′) − ω₀(C))u = c·u`.
    pub fitted_constant: f64,
    /// `−(p−1)² + 1`.
    pub target: f64,
    /// `max |(ω₀(C′) − ω₀(C))u − target·u|` over the samples.
    pub max_residual: f64,
    /// Spread `max − min` of the pointwise ratios `(ω₀(C′) − ω₀(C))u / u`.
    pub ratio_spread: f64,
    /// The difference operator, when it reduces symbolically to a scalar.
    pub symbolic_constant: Option<(i64, i64)>,
    /// Number of trial functions.
    pub trials: usize,
    /// Number of sample points per trial function.
    pub samples_per_trial: usize,
}

impl CapelliReport {
    /// True when the fitted constant equals the target to `tol`.
    pub fn matches_target(&self, tol: f64) -> bool {
        (self.fitted_constant - self.target).abs() <= tol
    }
}

/// Evaluates `(ω₀(C′) − ω₀(C))u` on trial functions `u = P·e^{−Q}` at the
/// given points and fits the constant.
pub fn capelli_identity_check(
    p: usize,
    trial_functions: &[PolyExpQuadratic<Rational>],
    points: &[Vec<f64>],
) -> Result<CapelliReport> {
    check_p(p)?;
    if trial_functions.is_empty() || points.is_empty() {
        return Err(Error::DomainError("need at least one trial function and one point".into()));
    }
    let diff = o_pp_casimir(p)?.minus(&casimir_operator(p)?);
    let target = -((p as f64 - 1.0).powi(2)) + 1.0;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut ratios = Vec::new();
    let mut max_residual: f64 = 0.0;
    for u in trial_functions {
        if u.dim() != 2 * p {
            return Err(Error::DomainError(format!(
                "trial function has {} variables, expected {}",
                u.dim(),
                2 * p
            )));
        }
        let du = diff.apply(u);
        for x in points {
            let a = du.eval(x);
            let b = u.eval(x);
            num += a * b;
            den += b * b;
            max_residual = max_residual.max((a - target * b).abs());
            if b.abs() > 1e-8 {
                ratios.push(a / b);
            }
        }
    }
    if den == 0.0 {
        return Err(Error::DomainError("trial functions vanish at every sample point".into()));
    }
    let spread = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ratios.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok(CapelliReport {
        p,
        fitted_constant: num / den,
        target,
        max_residual,
        ratio_spread: spread,
        symbolic_constant: diff.as_scalar().map(|c| (*c.numer(), *c.denom())),
        trials: trial_functions.len(),
        samples_per_trial: points.len(),
    })
}

/// Deterministic family of trial functions `P_k(x)·e^{−|x|²/2}` with
/// polynomial prefactors of degree ≤ 3.
pub fn default_trial_functions(p: usize, count: usize) -> Vec<PolyExpQuadratic<Rational>> {
    let dim = 2 * p;
    let r = |n: i64, d: i64| Rational::new(n, d);
    (0..count)
        .map(|k| {
            let mut poly = Polynomial::constant(dim, r(1, 1));
            let a = k % dim;
            let b = (3 * k + 1) % dim;
            let c = (5 * k + 2) % dim;
            let mut e1 = vec![0u8; dim];
            e1[a] += 1;
            poly = poly.plus(&Polynomial::monomial(dim, e1, r(k as i64 + 1, 2)));
            let mut e2 = vec![0u8; dim];
            e2[b] += 1;
            e2[c] += 1;
            poly = poly.plus(&Polynomial::monomial(dim, e2, r(1 - k as i64, 3)));
            let mut e3 = vec![0u8; dim];
            e3[a] += 1;
            e3[b] += 1;
            e3[(k + 3) % dim] += 1;
            poly = poly.plus(&Polynomial::monomial(dim, e3, r(1, (k as i64 % 4) + 1)));
            PolyExpQuadratic::isotropic(poly, r(1, 2))
        })
        .collect()
}

/// `x ↦ u(g⁻¹x)` for `u = P·e^{−Q}` on `M_{2,p}` (float coefficients).
pub fn translate(u: &PolyExpQuadratic<f64>, g: &SL2Element, p: usize) -> PolyExpQuadratic<f64> {
    let gi = g.inverse().entries();
    let dim = 2 * p;
    let mut m = vec![vec![0.0; dim]; dim];
    for i in 0..2 {
        for j in 0..p {
            for k in 0..2 {
                m[var(p, i, j)][var(p, k, j)] = gi[i][k];
            }
        }
    }
    u.linear_substitute(&m)
}
