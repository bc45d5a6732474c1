//! `SL(2,ℝ)`: elements, the Iwasawa and Cartan (`KAK`) decompositions,
//! representation labels, Plancherel densities and the stable-range table.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Largest admissible `|det − 1|`.
pub const DET_TOLERANCE: f64 = 1e-12;

/// A real 2×2 matrix of determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SL2Element {
    entries: [[f64; 2]; 2],
}

impl SL2Element {
    /// Validates `|det − 1| ≤ 1e−12`.
    pub fn new(entries: [[f64; 2]; 2]) -> Result<Self> {
        let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
        if !(det - 1.0).abs().le(&DET_TOLERANCE) {
            return Err(Error::DomainError(format!(
                "an SL(2,ℝ) element needs determinant 1, got {det}"
            )));
        }
        Ok(Self { entries })
    }

    /// Builds from entries known to have determinant one up to rounding.
    fn raw(entries: [[f64; 2]; 2]) -> Self {
        Self { entries }
    }

    /// The identity.
    pub fn identity() -> Self {
        Self::raw([[1.0, 0.0], [0.0, 1.0]])
    }

    /// The central element `−1`.
    pub fn minus_identity() -> Self {
        Self::raw([[-1.0, 0.0], [0.0, -1.0]])
    }

    /// `k_θ = [[cos θ, −sin θ], [sin θ, cos θ]] ∈ K = SO(2)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::raw([[c, -s], [s, c]])
    }

    /// `h_a = diag(eᵗ, e⁻ᵗ) ∈ A`.
    pub fn diagonal(t: f64) -> Self {
        Self::raw([[t.exp(), 0.0], [0.0, (-t).exp()]])
    }

    /// `n_r = [[1, r], [0, 1]] ∈ N`.
    pub fn unipotent(r: f64) -> Self {
        Self::raw([[1.0, r], [0.0, 1.0]])
    }

    /// Matrix entries.
    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        Self::raw([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    /// `self⁻¹` (the adjugate, since the determinant is one).
    pub fn inverse(&self) -> Self {
        let m = &self.entries;
        Self::raw([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    /// `−self`.
    pub fn negated(&self) -> Self {
        let m = &self.entries;
        Self::raw([[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]])
    }

    /// Trace.
    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Determinant (one up to rounding).
    pub fn det(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Operator norm `e^τ` where `τ ≥ 0` is the Cartan parameter.
    pub fn op_norm(&self) -> f64 {
        let m = &self.entries;
        let f2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
        // σ₁² + σ₂² = ‖g‖²_F and σ₁σ₂ = 1.
        let s = 0.5 * (f2 + ((f2 - 2.0).max(0.0) * (f2 + 2.0)).sqrt());
        s.sqrt()
    }

    /// `g·y` for a column vector `y ∈ ℝ²`.
    pub fn apply(&self, y: [f64; 2]) -> [f64; 2] {
        let m = &self.entries;
        [m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]]
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        d
    }

    /// Iwasawa decomposition `g = k_θ h_{eᵗ} n_r`.
    pub fn iwasawa(&self) -> IwasawaCoords {
        let m = &self.entries;
        let theta = m[1][0].atan2(m[0][0]);
        let t = m[0][0].hypot(m[1][0]).ln();
        // k_θ⁻¹ g = [[eᵗ, eᵗ r], [0, e⁻ᵗ]].
        let (s, c) = theta.sin_cos();
        let upper_right = c * m[0][1] + s * m[1][1];
        IwasawaCoords {
            theta,
            t,
            r: upper_right * (-t).exp(),
        }
    }

    /// Cartan decomposition `g = k_α h_{e^τ} k_β` with `τ ≥ 0`.
    pub fn cartan(&self) -> CartanCoords {
        let m = &self.entries;
        let e = 0.5 * (m[0][0] + m[1][1]);
        let f = 0.5 * (m[0][0] - m[1][1]);
        let g = 0.5 * (m[1][0] + m[0][1]);
        let h = 0.5 * (m[1][0] - m[0][1]);
        let q = e.hypot(h);
        let r = f.hypot(g);
        let tau = (q + r).ln();
        let a1 = g.atan2(f);
        let a2 = h.atan2(e);
        CartanCoords {
            alpha: 0.5 * (a2 + a1),
            tau,
            beta: 0.5 * (a2 - a1),
        }
    }
}

impl fmt::Display for SL2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.entries;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Coordinates of `g = k_θ h_{eᵗ} n_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IwasawaCoords {
    /// Angle of the `K = SO(2)` factor.
    pub theta: f64,
    /// `a = eᵗ` for the `A` factor.
    pub t: f64,
    /// Parameter of the `N` factor.
    pub r: f64,
}

impl IwasawaCoords {
    /// `k_θ h_{eᵗ} n_r`.
    pub fn compose(&self) -> SL2Element {
        SL2Element::rotation(self.theta)
            .compose(&SL2Element::diagonal(self.t))
            .compose(&SL2Element::unipotent(self.r))
    }
}

/// Coordinates of `g = k_α h_{e^τ} k_β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartanCoords {
    /// Left rotation angle.
    pub alpha: f64,
    /// Cartan parameter `τ ≥ 0`.
    pub tau: f64,
    /// Right rotation angle.
    pub beta: f64,
}

impl CartanCoords {
    /// `k_α h_{e^τ} k_β`.
    pub fn compose(&self) -> SL2Element {
        SL2Element::rotation(self.alpha)
            .compose(&SL2Element::diagonal(self.tau))
            .compose(&SL2Element::rotation(self.beta))
    }
}

/// The principal series `π_{ε,λ}`; the unitary ones are `π_{ε,iλ}`, `λ ∈ ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalSeriesLabel {
    /// Parity `ε ∈ {0, 1}` of the character on `−1`.
    pub epsilon: u8,
    /// The (complex) parameter.
    pub lambda: C64,
}

impl PrincipalSeriesLabel {
    /// Validates `ε ∈ {0, 1}`.
    pub fn new(epsilon: u8, lambda: C64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, lambda })
    }

    /// True when the parameter is an integer `n ≢ ε (mod 2)`, i.e. the
    /// representation is reducible.
    pub fn is_reducible(&self) -> bool {
        let n = self.lambda.re.round();
        self.lambda.im == 0.0 && self.lambda.re == n && (n as i64 - self.epsilon as i64).rem_euclid(2) == 1
    }

    /// The irreducible subquotients when reducible, `None` otherwise.
    pub fn subquotients(&self) -> Option<Vec<SubquotientLabel>> {
        if !self.is_reducible() {
            return None;
        }
        let n = self.lambda.re.round().abs() as u32;
        Some(if n == 0 {
            vec![SubquotientLabel::LimitMinus, SubquotientLabel::LimitPlus]
        } else {
            vec![
                SubquotientLabel::DiscreteMinus(n),
                SubquotientLabel::FiniteDim(n),
                SubquotientLabel::DiscretePlus(n),
            ]
        })
    }
}

/// Irreducible subquotients of the reducible principal series `π_{ε,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubquotientLabel {
    /// Holomorphic discrete series with K-types `m > n`.
    DiscretePlus(u32),
    /// Antiholomorphic discrete series with K-types `m < −n`.
    DiscreteMinus(u32),
    /// Limit of discrete series with K-types `m ≥ 1` odd.
    LimitPlus,
    /// Limit of discrete series with K-types `m ≤ −1` odd.
    LimitMinus,
    /// Finite-dimensional quotient of dimension `n`.
    FiniteDim(u32),
}

impl SubquotientLabel {
    /// Validates `n ≥ 1` for the discrete and finite-dimensional kinds.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SubquotientLabel::DiscretePlus(0) | SubquotientLabel::DiscreteMinus(0) | SubquotientLabel::FiniteDim(0) => {
                Err(Error::DomainError("subquotient index n must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// The K-type block the subquotient occupies inside `π_{ε,n}`.
    pub fn block(&self) -> KTypeBlock {
        match self {
            SubquotientLabel::DiscretePlus(_) | SubquotientLabel::LimitPlus => KTypeBlock::Upper,
            SubquotientLabel::DiscreteMinus(_) | SubquotientLabel::LimitMinus => KTypeBlock::Lower,
            SubquotientLabel::FiniteDim(_) => KTypeBlock::Finite,
        }
    }
}

/// Blocks of K-types `m ≡ ε (mod 2)` of `π_{ε,n}` relative to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KTypeBlock {
    /// `m < −n`.
    Lower,
    /// `−n ≤ m ≤ n`.
    Finite,
    /// `m > n`.
    Upper,
    /// All `m ≡ ε`.
    Full,
}

impl KTypeBlock {
    /// The three proper blocks.
    pub const PARTS: [KTypeBlock; 3] = [KTypeBlock::Lower, KTypeBlock::Finite, KTypeBlock::Upper];

    /// True when `m` (of parity `ε`) lies in the block for the parameter `n`.
    pub fn contains(&self, m: i64, epsilon: u8, n: i64) -> bool {
        if (m - epsilon as i64).rem_euclid(2) != 0 {
            return false;
        }
        match self {
            KTypeBlock::Lower => m < -n,
            KTypeBlock::Finite => -n <= m && m <= n,
            KTypeBlock::Upper => m > n,
            KTypeBlock::Full => true,
        }
    }

    /// Parses `lower | finite | upper | full`.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "lower" => Some(KTypeBlock::Lower),
            "finite" | "fin" => Some(KTypeBlock::Finite),
            "upper" => Some(KTypeBlock::Upper),
            "full" => Some(KTypeBlock::Full),
            _ => None,
        }
    }

    /// Lower-case name.
    pub fn name(&self) -> &'static str {
        match self {
            KTypeBlock::Lower => "lower",
            KTypeBlock::Finite => "finite",
            KTypeBlock::Upper => "upper",
            KTypeBlock::Full => "full",
        }
    }
}

pub(crate) fn check_epsilon(epsilon: u8) -> Result<()> {
    if epsilon > 1 {
        return Err(Error::DomainError(format!("ε must be 0 or 1, got {epsilon}")));
    }
    Ok(())
}

/// Continuous-spectrum Plancherel density of the channel `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlancherelDensity {
    /// `0`: spherical (`tanh`); `1`: non-spherical (`coth`).
    pub epsilon: u8,
}

impl PlancherelDensity {
    /// Validates `ε ∈ {0, 1}`.
    pub fn new(epsilon: u8) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon })
    }

    /// The density at real `λ`.
    pub fn at(&self, lambda: f64) -> f64 {
        plancherel_density(*self, lambda)
    }
}

/// `tanh z` without overflow for large `|Re z|`.
pub fn stable_tanh(z: C64) -> C64 {
    if z.re.abs() < 1.0 {
        return z.tanh();
    }
    let s = z.re.signum();
    let e = (-2.0 * s * z).exp();
    s * (1.0 - e) / (1.0 + e)
}

/// `λ tanh(πλ/2)` (even, entire except for poles at odd imaginary points).
pub fn lambda_tanh(lambda: C64) -> C64 {
    lambda * stable_tanh(lambda * (PI / 2.0))
}

/// `λ coth(πλ/2)`, with the removable singularity at `0` filled by `2/π`.
pub fn lambda_coth(lambda: C64) -> C64 {
    let x = lambda * (PI / 2.0);
    if x.norm() < 1e-4 {
        // x coth x = 1 + x²/3 − x⁴/45.
        let x2 = x * x;
        return (C64::new(1.0, 0.0) + x2 / 3.0 - x2 * x2 / 45.0) * (2.0 / PI);
    }
    lambda / stable_tanh(x)
}

/// `(λ/8π) tanh(πλ/2)` for `ε = 0`, `(λ/8π) coth(πλ/2)` for `ε = 1`
/// (with the limit `1/(4π²)` at `λ = 0`).
pub fn plancherel_density(label: PlancherelDensity, lambda: f64) -> f64 {
    let l = C64::new(lambda, 0.0);
    let v = if label.epsilon == 0 { lambda_tanh(l) } else { lambda_coth(l) };
    v.re / (8.0 * PI)
}

/// Rows of the stable-range table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StableRangeGroup {
    /// `Sp_{2n}(ℝ)` paired with `O_{p,p}`.
    Sp2n {
        /// Rank parameter of `Sp_{2n}`.
        n: u32,
        /// Partner `O_{p,p}`.
        p: u32,
    },
    /// `O_{p,p}` paired with `Sp_{2n}(ℝ)`.
    Opp {
        /// Rank parameter of `O_{p,p}`.
        p: u32,
        /// Partner `Sp_{2n}`.
        n: u32,
    },
}

/// `(r − 1, λ_max, condition)` from the stable-range table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableRangeRow {
    /// `r − 1`.
    pub r_minus_1: Ratio<i64>,
    /// `λ_max`.
    pub lambda_max: Ratio<i64>,
    /// Whether the stable-range condition holds.
    pub condition_holds: bool,
}

/// `(2n, (2p−1)/(2n), p ≥ 2n)` for `Sp_{2n}` and `(2p−1, 2n/(2p−1), n ≥ 2p)`
/// for `O_{p,p}`.
pub fn stable_range_table(group: StableRangeGroup) -> Result<StableRangeRow> {
    match group {
        StableRangeGroup::Sp2n { n, p } => {
            if n < 1 || p < 1 {
                return Err(Error::DomainError("stable-range rows need n ≥ 1 and p ≥ 1".into()));
            }
            let (n, p) = (n as i64, p as i64);
            Ok(StableRangeRow {
                r_minus_1: Ratio::from_integer(2 * n),
                lambda_max: Ratio::new(2 * p - 1, 2 * n),
                condition_holds: p >= 2 * n,
            })
        }
        StableRangeGroup::Opp { p, n } => {
            if n < 1 || p < 1 {
                return Err(Error::DomainError("stable-range rows need n ≥ 1 and p ≥ 1".into()));
            }
            let (n, p) = (n as i64, p as i64);
            Ok(StableRangeRow {
                r_minus_1: Ratio::from_integer(2 * p - 1),
                lambda_max: Ratio::new(2 * n, 2 * p - 1),
                condition_holds: n >= 2 * p,
            })
        }
    }
}
