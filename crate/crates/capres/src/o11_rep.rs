//! The `O(1,1)` side of the dual pair: the action of `O(1,1)` on functions on
//! `X = M_{1,2}(ℝ) ≅ ℝ²`, the Fourier–Bessel closed forms on circle modes,
//! the isotypic splitting of the resonance space, and metaplectic
//! normalisation formulas on `W = M_{2,2}(ℝ)`.
//!
//! Conventions on `W`: a matrix `w = [[a, b], [c, d]]` is stored as the
//! row-major vector `(a, b, c, d)`; the symplectic form is
//! `⟨w₁, w₂⟩ = tr(w₁ j w₂ᵀ s)` with `j = [[0, 1], [−1, 0]]`,
//! `s = [[0, 1], [1, 0]]`; `X` is the first row and `Y` the second row.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, Matrix4};
use rayon::prelude::*;

use crate::mellin::HomogeneousComponent;
use crate::numerics::bessel::bessel_j;
use crate::numerics::quadrature::{extrapolate_to_zero, gauss_legendre, QuadratureConfig};
use crate::numerics::testfn::{Parity, TestFunction2D};
use crate::{Complex64 as C64, Error, Result};

// ---------------------------------------------------------------------------
// Group elements and circle modes
// ---------------------------------------------------------------------------

/// The element `s^e h_a` of `O(1,1)`, where `h_a = diag(a, 1/a)` and
/// `s = [[0, 1], [1, 0]]`; `e = 1` when `with_s` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct O11Element {
    a: f64,
    with_s: bool,
}

impl O11Element {
    /// Builds `s^e h_a`; `a` must be a nonzero finite real.
    pub fn new(a: f64, with_s: bool) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::DomainError(format!("h_a needs a finite nonzero a, got {a}")));
        }
        Ok(Self { a, with_s })
    }

    /// The torus element `h_a`.
    pub fn h(a: f64) -> Result<Self> {
        Self::new(a, false)
    }

    /// The reflection `s`.
    pub fn s() -> Self {
        Self { a: 1.0, with_s: true }
    }

    /// Torus parameter.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Whether the element lies in the non-identity coset of `SO(1,1)·{±1}`.
    pub fn with_s(&self) -> bool {
        self.with_s
    }

    /// The 2×2 matrix `s^e diag(a, 1/a)`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (a, ai) = (self.a, 1.0 / self.a);
        if self.with_s {
            [[0.0, ai], [a, 0.0]]
        } else {
            [[a, 0.0], [0.0, ai]]
        }
    }

    /// Group product, using `h_a s = s h_{1/a}` and `s² = 1`.
    pub fn compose(&self, other: &O11Element) -> Self {
        // s^e h_a s^f h_b = s^{e+f} h_{a^{(−1)^f}} h_b.
        let a = if other.with_s { 1.0 / self.a } else { self.a };
        Self {
            a: a * other.a,
            with_s: self.with_s ^ other.with_s,
        }
    }

    /// Group inverse.
    pub fn inverse(&self) -> Self {
        // (s h_a)⁻¹ = h_{1/a} s = s h_a.
        if self.with_s {
            *self
        } else {
            Self { a: 1.0 / self.a, with_s: false }
        }
    }
}

/// The circle mode `g_k(re^{iθ}) = r^{−1} e^{ikθ}`, homogeneous of degree −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CircleMode {
    /// Angular frequency.
    pub k: i64,
}

impl CircleMode {
    /// The mode of frequency `k`.
    pub fn new(k: i64) -> Self {
        Self { k }
    }

    /// Value at `w ≠ 0`.
    pub fn value(&self, w: [f64; 2]) -> C64 {
        let r = w[0].hypot(w[1]);
        C64::from_polar(1.0 / r, self.k as f64 * w[1].atan2(w[0]))
    }

    /// Eigenvalue of `ω₀(h_a)` on the mode: `sign(a)^k`.
    pub fn dilation_eigenvalue(&self, a: f64) -> f64 {
        if a < 0.0 && self.k.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Eigenvalue of `ω₀(s)` on the mode.
    pub fn s_eigenvalue(&self) -> i8 {
        apply_s_mode(self.k)
    }

    /// The mode cut off to the annulus `inner ≤ |w| ≤ outer` (no smoothing),
    /// for pointwise checks of homogeneous identities.
    pub fn on_annulus(&self, inner: f64, outer: f64) -> Result<TestFunction2D> {
        let mode = *self;
        TestFunction2D::new(move |w| mode.value(w), inner, outer, Parity::of_mode(self.k))
    }
}

/// `ω₀(h_a)v(x) = |a|⁻¹ v(a⁻¹x)`; the support annulus scales by `|a|`.
pub fn apply_dilation(a: f64, v: &TestFunction2D) -> Result<TestFunction2D> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::DomainError(format!("dilation needs a finite nonzero a, got {a}")));
    }
    v.linear_pullback([[1.0 / a, 0.0], [0.0, 1.0 / a]], 1.0 / a.abs())
}

/// Eigenvalue of `ω₀(s)` on `g_k`: `+1` for `k ≥ 0`, `(−1)^k` for `k < 0`.
pub fn apply_s_mode(k: i64) -> i8 {
    if k >= 0 || k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Fourier–Bessel closed forms
// ---------------------------------------------------------------------------

/// Gauss–Legendre order per half-period panel in [`damped_bessel_integral`].
const PANEL_ORDER: usize = 16;
/// Panel budget for [`damped_bessel_integral`].
const MAX_PANELS: usize = 4_000_000;

/// `∫₀^∞ e^{−aρ} J_k(bρ) dρ` for `a, b > 0`, summed over half-period panels
/// of width `π/b` until the tail bound `e^{−aρ}/a · √(2/(πbρ))` drops below
/// a tenth of the absolute tolerance.
pub fn damped_bessel_integral(k: i64, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::DomainError(format!("damped Bessel integral needs a, b > 0, got {a}, {b}")));
    }
    let order = i32::try_from(k).map_err(|_| Error::DomainError(format!("order {k} out of range")))?;
    let (x, w) = gauss_legendre(PANEL_ORDER);
    let width = PI / b;
    let half = 0.5 * width;
    // The Bessel function is monotone-ish up to its first turning point near
    // ρ ≈ |k|/b; the tail estimate applies only beyond it.
    let rho_min = (k.unsigned_abs() as f64 + 1.0) / b;
    let target = 0.1 * cfg.abs_tol;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for p in 0..MAX_PANELS {
        let c = (p as f64 + 0.5) * width;
        let mut panel = 0.0;
        for (t, wt) in x.iter().zip(&w) {
            let rho = c + half * t;
            panel += wt * (-a * rho).exp() * bessel_j(order, b * rho);
        }
        // Kahan summation keeps the rounding of ~10⁵ panels negligible.
        let y = panel * half - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        let end = (p as f64 + 1.0) * width;
        if end >= rho_min {
            let tail = (-a * end).exp() / a * (2.0 / (PI * b * end)).sqrt().min(1.0);
            if tail <= target.max(cfg.rel_tol * 1e-3 * sum.abs()) {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence {
        estimate: sum.abs(),
        error: (-a * MAX_PANELS as f64 * width).exp() / a,
        subdivisions: MAX_PANELS,
    })
}

/// `(−1)^k i^k`.
fn mode_phase(k: i64) -> C64 {
    let m = k.rem_euclid(4);
    let ik = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][m as usize];
    if k.rem_euclid(2) == 1 {
        -ik
    } else {
        ik
    }
}

/// `F_{k,t}(r) = 2π(−1)^k i^k ∫₀^∞ e^{−2πtρ} J_k(2πrρ) dρ` by quadrature —
/// the Fourier transform of `e^{−2πt|x|}|x|⁻¹e^{ikθ}` evaluated at radius `r`,
/// angle `θ = 0`, up to the rotation phase.
pub fn verify_s_mode_numeric(k: i64, t: f64, r: f64, cfg: &QuadratureConfig) -> Result<C64> {
    if !(t > 0.0) || !(r > 0.0) {
        return Err(Error::DomainError(format!("need t > 0 and r > 0, got t = {t}, r = {r}")));
    }
    let integral = damped_bessel_integral(k, 2.0 * PI * t, 2.0 * PI * r, cfg)?;
    Ok(mode_phase(k) * (2.0 * PI * integral))
}

/// Closed form of [`verify_s_mode_numeric`]:
/// `(−1)^k i^k (√(t²+r²) − t)^{|k|} / (r^{|k|} √(t²+r²))`, with the extra
/// reflection sign `(−1)^k` for negative `k`; valid also at `t = 0`.
pub fn s_mode_closed_form(k: i64, t: f64, r: f64) -> C64 {
    let rho = t.hypot(r);
    let n = k.unsigned_abs() as i32;
    let reflect = if k < 0 && k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    mode_phase(k) * (reflect * ((rho - t) / r).powi(n) / rho)
}

/// Damping parameters used by [`s_mode_eigenvalue_numeric`].
pub const S_MODE_DAMPING: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// The eigenvalue of `ω₀(s)` on `g_k`, read off numerically: the
/// phase-corrected value `r F_{k,t}(r) / ((−1)^k i^k)` is extrapolated to
/// `t = 0` (Neville) over [`S_MODE_DAMPING`].
pub fn s_mode_eigenvalue_numeric(k: i64, r: f64, cfg: &QuadratureConfig) -> Result<C64> {
    let phase = mode_phase(k);
    let vals = S_MODE_DAMPING
        .iter()
        .map(|&t| Ok(verify_s_mode_numeric(k, t, r, cfg)? * r / phase))
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate_to_zero(&S_MODE_DAMPING, &vals))
}

// ---------------------------------------------------------------------------
// Grid transforms on X
// ---------------------------------------------------------------------------

/// The square grid of `n × n` cell-centred nodes on `[−L, L]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareGrid {
    n: usize,
    half_width: f64,
}

impl SquareGrid {
    /// Builds the grid; `n ≥ 1`, `L > 0`.
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n == 0 || !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "square grid needs n ≥ 1 and a positive half-width, got n = {n}, L = {half_width}"
            )));
        }
        Ok(Self { n, half_width })
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-width `L`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Node spacing `2L/n`.
    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// One-dimensional node coordinates.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n).map(|i| -self.half_width + (i as f64 + 0.5) * h).collect()
    }

    /// All nodes in row-major order (first coordinate slowest).
    pub fn points(&self) -> Vec<[f64; 2]> {
        let xs = self.nodes();
        xs.iter().flat_map(|&x| xs.iter().map(move |&y| [x, y])).collect()
    }
}

/// Samples of a function on a [`SquareGrid`] (row-major, first coordinate
/// slowest), together with a declared bandwidth: a radius beyond which its
/// Fourier transform is negligible.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: SquareGrid,
    values: Vec<C64>,
    bandwidth: f64,
}

impl GridFunction {
    /// Wraps samples; the length must be `n²`.
    pub fn new(grid: SquareGrid, values: Vec<C64>, bandwidth: f64) -> Result<Self> {
        if values.len() != grid.n * grid.n {
            return Err(Error::InvalidConfig(format!(
                "{} samples do not fill a {}×{} grid",
                values.len(),
                grid.n,
                grid.n
            )));
        }
        if !(bandwidth >= 0.0) {
            return Err(Error::InvalidConfig(format!("bandwidth must be nonnegative, got {bandwidth}")));
        }
        Ok(Self { grid, values, bandwidth })
    }

    /// Samples `f` at the grid nodes.
    pub fn sample<F: Fn([f64; 2]) -> C64>(grid: SquareGrid, bandwidth: f64, f: F) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values, bandwidth)
    }

    /// The grid.
    pub fn grid(&self) -> SquareGrid {
        self.grid
    }

    /// Samples.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Declared bandwidth.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Sample at node `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.grid.n + j]
    }

    /// Discrete `L²` norm `(h² Σ|v|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.step();
        (h * h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Relative discrete `L²` distance `‖self − other‖ / ‖other‖` on a common grid.
    pub fn relative_l2_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidConfig("grid functions live on different grids".into()));
        }
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        Ok((num / den.max(f64::MIN_POSITIVE)).sqrt())
    }

    /// Pointwise sum on a common grid (bandwidth is the larger of the two).
    pub fn plus(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::InvalidConfig("grid functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.grid, values, self.bandwidth.max(other.bandwidth))
    }
}

/// Checks that the input spacing resolves frequencies up to `max_freq` plus
/// the declared bandwidth, i.e. that the periodised transform (period `1/h`)
/// does not alias back into the evaluation window.
fn nyquist_check(h: f64, max_freq: f64, bandwidth: f64, what: &str) -> Result<()> {
    if h * (max_freq + bandwidth) > 1.0 {
        return Err(Error::GridTooCoarse(format!(
            "{what}: spacing {h:.4e} cannot resolve frequency {max_freq:.4e} plus bandwidth {bandwidth:.4e} \
             (need spacing ≤ {:.4e})",
            1.0 / (max_freq + bandwidth)
        )));
    }
    Ok(())
}

/// `ω₀(s)v(x′) = ∫ e^{−2πi x′ j xᵀ} v(x) dx` evaluated on the tensor product
/// of the node sets `p1 × p2` by the separable Riemann sum of the input grid.
/// Since `x′ j xᵀ = (x′j)·x`, this is the ordinary Fourier transform
/// evaluated at `ξ = x′ j = (−x′₂, x′₁)`.
pub fn symplectic_fourier_on_nodes(v: &GridFunction, p1: &[f64], p2: &[f64]) -> Result<Vec<C64>> {
    let max_freq = p1.iter().chain(p2).fold(0.0f64, |m, p| m.max(p.abs()));
    let h = v.grid.step();
    nyquist_check(h, max_freq, v.bandwidth, "symplectic Fourier transform")?;
    let xs = v.grid.nodes();
    let n = v.grid.n;
    // out[a][b] = h² Σ_i e^{2πi p2_b x_i} Σ_j e^{−2πi p1_a y_j} v_ij.
    let inner: Vec<Vec<C64>> = p1
        .par_iter()
        .map(|&pa| {
            let phase: Vec<C64> = xs.iter().map(|&y| C64::from_polar(1.0, -2.0 * PI * pa * y)).collect();
            (0..n)
                .map(|i| {
                    let row = &v.values[i * n..(i + 1) * n];
                    row.iter().zip(&phase).map(|(a, b)| a * b).sum()
                })
                .collect()
        })
        .collect();
    let outer_phase: Vec<Vec<C64>> = p2
        .iter()
        .map(|&pb| xs.iter().map(|&x| C64::from_polar(h * h, 2.0 * PI * pb * x)).collect())
        .collect();
    let out = inner
        .par_iter()
        .flat_map_iter(|t| outer_phase.iter().map(move |ph| ph.iter().zip(t).map(|(a, b)| a * b).sum::<C64>()))
        .collect();
    Ok(out)
}

/// The symplectic Fourier transform `ω₀(s) = R(j)F` from the grid of `v` to
/// `out`; the result's bandwidth is the half-width of the input grid.
pub fn apply_symplectic_fourier(v: &GridFunction, out: &SquareGrid) -> Result<GridFunction> {
    let nodes = out.nodes();
    let values = symplectic_fourier_on_nodes(v, &nodes, &nodes)?;
    GridFunction::new(*out, values, v.grid.half_width)
}

/// `ω(s̃)v(x) = ∫ χ(x′ j xᵀ) v(x′) dx′` with `χ(t) = e^{2πit}` (the `+`
/// preimage), evaluated at arbitrary points by a direct double sum over the
/// grid of `v` with the phase factored per coordinate.
pub fn omega_s_at_points(v: &GridFunction, points: &[[f64; 2]]) -> Result<Vec<C64>> {
    let max_freq = points.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let h = v.grid.step();
    nyquist_check(h, max_freq, v.bandwidth, "closed-form ω(s̃)")?;
    let xs = v.grid.nodes();
    let n = v.grid.n;
    let w = h * h;
    Ok(points
        .par_iter()
        .map(|x| {
            // χ(x′ j xᵀ) = e^{2πi x′₁x₂} e^{−2πi x′₂x₁}, tabulated per node.
            let first: Vec<C64> = xs.iter().map(|&p| C64::from_polar(w, 2.0 * PI * p * x[1])).collect();
            let second: Vec<C64> = xs.iter().map(|&q| C64::from_polar(1.0, -2.0 * PI * q * x[0])).collect();
            (0..n)
                .map(|i| {
                    let row = &v.values[i * n..(i + 1) * n];
                    let s: C64 = row.iter().zip(&second).map(|(a, b)| a * b).sum();
                    s * first[i]
                })
                .sum()
        })
        .collect())
}

/// `ω₀(s) ω₀(h_a) ω₀(s)⁻¹ v` by the grid path: `ω₀(s)⁻¹ = ω₀(s)` is
/// evaluated at the dilated nodes `x/a` of `mid` (giving `ω₀(h_a)ω₀(s)v` on
/// `mid`), and the outer transform maps `mid` to `out`. The intermediate
/// bandwidth is the support half-width of `v` divided by `|a|`.
pub fn conjugated_dilation(v: &GridFunction, a: f64, mid: &SquareGrid, out: &SquareGrid) -> Result<GridFunction> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::DomainError(format!("dilation needs a finite nonzero a, got {a}")));
    }
    let scaled: Vec<f64> = mid.nodes().iter().map(|x| x / a).collect();
    let inv = 1.0 / a.abs();
    let values = symplectic_fourier_on_nodes(v, &scaled, &scaled)?
        .into_iter()
        .map(|z| z * inv)
        .collect();
    let w = GridFunction::new(*mid, values, v.grid.half_width * inv)?;
    apply_symplectic_fourier(&w, out)
}

/// [`omega_s_at_points`] on the nodes of `out`.
pub fn omega_s_closed_form(v: &GridFunction, out: &SquareGrid) -> Result<GridFunction> {
    let values = omega_s_at_points(v, &out.points())?;
    GridFunction::new(*out, values, v.grid.half_width)
}

/// The Weyl transform `𝒦(f)(x, x′) = ∫_Y f(x − x′ + y) χ(½⟨y, x + x′⟩) dy`,
/// with `⟨y, x⟩ = y₁x₂ − y₂x₁`, by a Riemann sum over `y_grid`. Returns the
/// matrix `K[i][j] = 𝒦(f)(xs[i], xs[j])`; `f` takes `w` as `(x₁, x₂, y₁, y₂)`
/// and is assumed negligible in `y` outside `y_grid` and band-limited to
/// `bandwidth` in `y`.
pub fn weyl_transform<F>(f: F, bandwidth: f64, y_grid: &SquareGrid, xs: &[[f64; 2]]) -> Result<Vec<Vec<C64>>>
where
    F: Fn([f64; 4]) -> C64 + Sync,
{
    let max_freq = xs.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let h = y_grid.step();
    // The phase frequency is |x + x′|/2 per axis, at most max|x|.
    nyquist_check(h, max_freq, bandwidth, "Weyl transform")?;
    let ys = y_grid.points();
    let w = h * h;
    Ok(xs
        .par_iter()
        .map(|x| {
            xs.iter()
                .map(|xp| {
                    let d = [x[0] - xp[0], x[1] - xp[1]];
                    let s = [x[0] + xp[0], x[1] + xp[1]];
                    ys.iter()
                        .map(|y| {
                            let phase = PI * (y[0] * s[1] - y[1] * s[0]);
                            f([d[0], d[1], y[0], y[1]]) * C64::from_polar(w, phase)
                        })
                        .sum()
                })
                .collect()
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Isotypic splitting of the resonance space
// ---------------------------------------------------------------------------

/// The three `O(1,1)`-isotypic pieces of the residue at `z = 0`, labelled by
/// the pairs `(0,0)`, `(1,0)`, `(1,1)`: even `k`, odd `k ≥ 0`, odd `k < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsotypicPiece {
    /// Label `(0,0)`: even frequencies.
    EvenModes,
    /// Label `(1,0)`: odd nonnegative frequencies.
    OddNonnegative,
    /// Label `(1,1)`: odd negative frequencies.
    OddNegative,
}

impl IsotypicPiece {
    /// All three pieces.
    pub const ALL: [IsotypicPiece; 3] = [Self::EvenModes, Self::OddNonnegative, Self::OddNegative];

    /// Parses the label pair.
    pub fn from_label(label: (u8, u8)) -> Result<Self> {
        match label {
            (0, 0) => Ok(Self::EvenModes),
            (1, 0) => Ok(Self::OddNonnegative),
            (1, 1) => Ok(Self::OddNegative),
            other => Err(Error::DomainError(format!("unknown isotypic label {other:?}"))),
        }
    }

    /// The label pair.
    pub fn label(self) -> (u8, u8) {
        match self {
            Self::EvenModes => (0, 0),
            Self::OddNonnegative => (1, 0),
            Self::OddNegative => (1, 1),
        }
    }

    /// Whether frequency `k` belongs to the piece.
    pub fn contains(self, k: i64) -> bool {
        let odd = k.rem_euclid(2) == 1;
        match self {
            Self::EvenModes => !odd,
            Self::OddNonnegative => odd && k >= 0,
            Self::OddNegative => odd && k < 0,
        }
    }
}

/// Zeroes the coefficients of `v0` outside `piece`; `v0` must sit at `λ = 0`.
pub fn isotypic_project(v0: &HomogeneousComponent, piece: IsotypicPiece) -> Result<HomogeneousComponent> {
    if v0.lambda != C64::new(0.0, 0.0) {
        return Err(Error::DomainError(format!(
            "isotypic splitting applies at λ = 0, got λ = {}",
            v0.lambda
        )));
    }
    let coeffs = v0.coeffs.map(|k, c| if piece.contains(k) { c } else { C64::new(0.0, 0.0) });
    Ok(HomogeneousComponent::new(v0.lambda, coeffs))
}

// ---------------------------------------------------------------------------
// Symplectic group of W and the metaplectic normalisation
// ---------------------------------------------------------------------------

type M2 = [[f64; 2]; 2];

const J2: M2 = [[0.0, 1.0], [-1.0, 0.0]];
const S2: M2 = [[0.0, 1.0], [1.0, 0.0]];

fn mul2(p: M2, q: M2) -> M2 {
    let mut r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
        }
    }
    r
}

fn to_vec(w: M2) -> [f64; 4] {
    [w[0][0], w[0][1], w[1][0], w[1][1]]
}

fn from_vec(v: [f64; 4]) -> M2 {
    [[v[0], v[1]], [v[2], v[3]]]
}

/// Matrix of a linear map of `W` in the basis of elementary matrices.
fn matrix_of<F: Fn(M2) -> M2>(f: F) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for col in 0..4 {
        let mut e = [0.0; 4];
        e[col] = 1.0;
        let image = to_vec(f(from_vec(e)));
        for row in 0..4 {
            m[(row, col)] = image[row];
        }
    }
    m
}

/// The symplectic form `⟨w₁, w₂⟩ = tr(w₁ w₂*)`, `w* = j wᵀ s`, i.e.
/// `(a₁d₂ − d₁a₂) + (c₁b₂ − b₁c₂)`.
pub fn symplectic_form(w1: [f64; 4], w2: [f64; 4]) -> f64 {
    (w1[0] * w2[3] - w1[3] * w2[0]) + (w1[2] * w2[1] - w1[1] * w2[2])
}

/// Gram matrix `Ω` of [`symplectic_form`]: `⟨w₁, w₂⟩ = w₁ᵀ Ω w₂`.
pub fn symplectic_gram() -> Matrix4<f64> {
    let mut o = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut a = [0.0; 4];
            let mut b = [0.0; 4];
            a[i] = 1.0;
            b[j] = 1.0;
            o[(i, j)] = symplectic_form(a, b);
        }
    }
    o
}

/// The compatible complex structure `J(w) = −s w j`.
pub fn complex_structure() -> Matrix4<f64> {
    matrix_of(|w| {
        let r = mul2(mul2(S2, w), J2);
        [[-r[0][0], -r[0][1]], [-r[1][0], -r[1][1]]]
    })
}

/// Tolerance for the symplectic check of [`SymplecticMatrix4`].
pub const SYMPLECTIC_TOL: f64 = 1e-12;

/// A linear map of `W ≅ ℝ⁴` preserving [`symplectic_form`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticMatrix4 {
    entries: Matrix4<f64>,
}

impl SymplecticMatrix4 {
    /// Validates `gᵀ Ω g = Ω` entrywise to [`SYMPLECTIC_TOL`] (relative to
    /// the size of `g`).
    pub fn new(entries: Matrix4<f64>) -> Result<Self> {
        let omega = symplectic_gram();
        let defect = (entries.transpose() * omega * entries - omega).amax();
        let scale = entries.amax().max(1.0).powi(2);
        if !(defect <= SYMPLECTIC_TOL * scale) {
            return Err(Error::DomainError(format!(
                "matrix does not preserve the symplectic form (defect {defect:.3e})"
            )));
        }
        Ok(Self { entries })
    }

    /// Row-major construction.
    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    /// The identity.
    pub fn identity() -> Self {
        Self { entries: Matrix4::identity() }
    }

    /// `−1` on `W`.
    pub fn minus_identity() -> Self {
        Self { entries: -Matrix4::identity() }
    }

    /// An element of `O(1,1)` acting by left multiplication `w ↦ h w`.
    pub fn from_o11(h: &O11Element) -> Result<Self> {
        let m = h.matrix();
        Self::new(matrix_of(|w| mul2(m, w)))
    }

    /// An element `g` of `Sp₂(ℝ) = SL₂(ℝ)` acting by `w ↦ w g⁻¹`.
    pub fn from_sp2(g: M2) -> Result<Self> {
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if (det - 1.0).abs() > SYMPLECTIC_TOL * g.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs())).powi(2) {
            return Err(Error::DomainError(format!("Sp₂ element must have determinant 1, got {det}")));
        }
        let inv = [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]];
        Self::new(matrix_of(|w| mul2(w, inv)))
    }

    /// The 4×4 matrix.
    pub fn entries(&self) -> &Matrix4<f64> {
        &self.entries
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &SymplecticMatrix4) -> Self {
        Self { entries: self.entries * other.entries }
    }

    /// Applies the map to `w`.
    pub fn apply(&self, w: [f64; 4]) -> [f64; 4] {
        let v = self.entries * nalgebra::Vector4::from(w);
        [v[0], v[1], v[2], v[3]]
    }
}

/// `γ(1) = e^{iπ/4}`, the Weil index of the character `χ(t) = e^{2πit}`.
pub fn gamma_one() -> C64 {
    C64::from_polar(1.0, FRAC_PI_4)
}

/// The value `Θ²(g)` of the squared metaplectic normalising function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaplecticSquare {
    /// `Θ²(g)`.
    pub theta_squared: C64,
    /// `dim (g−1)W`.
    pub image_dim: usize,
    /// Determinant of `g − 1` from `W/Ker(g−1)` onto `(g−1)W`.
    pub determinant: f64,
}

/// `Θ²(g) = γ(1)^{2 dim(g−1)W − 2} · det(g−1 : W/Ker(g−1) → (g−1)W)⁻¹`.
///
/// The determinant is made basis-free through the complex structure: with
/// `L = J⁻¹(g − 1)`, the Euclidean orthogonal complement of `Ker L` is
/// `Im L`, so `L` restricts to an automorphism of `Im L = J⁻¹(g−1)W`, whose
/// determinant is computed in an orthonormal basis obtained by SVD.
pub fn theta_squared(g: &SymplecticMatrix4) -> MetaplecticSquare {
    let j = complex_structure();
    // J² = −1, so J⁻¹ = −J.
    let l = -j * (g.entries - Matrix4::identity());
    let svd = l.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let tol = 1e-12 * smax.max(1.0);
    let cols: Vec<usize> = (0..4).filter(|&i| svd.singular_values[i] > tol).collect();
    let r = cols.len();
    let determinant = if r == 0 {
        1.0
    } else {
        let q = DMatrix::from_fn(4, r, |row, c| u[(row, cols[c])]);
        let lq = DMatrix::from_fn(4, 4, |a, b| l[(a, b)]) * &q;
        (q.transpose() * lq).determinant()
    };
    let power = 2 * r as i32 - 2;
    let theta_squared = gamma_one().powi(power) / determinant;
    MetaplecticSquare {
        theta_squared,
        image_dim: r,
        determinant,
    }
}
