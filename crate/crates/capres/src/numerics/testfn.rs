//! Smooth compactly supported test functions on `ℝ² ∖ {0}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Shared, thread-safe callable `ℝ² → ℂ`.
pub type PlaneFn = Arc<dyn Fn([f64; 2]) -> C64 + Send + Sync>;

/// The classical mollifier `exp(−1/(1−u²))` on `|u| < 1`, zero elsewhere.
pub fn mollifier(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, built from `exp(−1/x)`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Behaviour under `w ↦ −w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `v(−w) = v(w)`.
    Even,
    /// `v(−w) = −v(w)`.
    Odd,
    /// Neither.
    Mixed,
}

impl Parity {
    /// Parity of the product of two functions.
    pub fn times(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Even, p) | (p, Parity::Even) => p,
            (Parity::Odd, Parity::Odd) => Parity::Even,
            _ => Parity::Mixed,
        }
    }

    /// Parity of `e^{ikθ}`.
    pub fn of_mode(k: i64) -> Parity {
        if k.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A smooth function on the plane supported in the closed annulus
/// `support_inner ≤ |w| ≤ support_outer`.
#[derive(Clone)]
pub struct TestFunction2D {
    value: PlaneFn,
    support_inner: f64,
    support_outer: f64,
    parity: Parity,
}

impl fmt::Debug for TestFunction2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction2D")
            .field("support_inner", &self.support_inner)
            .field("support_outer", &self.support_outer)
            .field("parity", &self.parity)
            .finish_non_exhaustive()
    }
}

impl TestFunction2D {
    /// Wraps a callable; the caller guarantees that it vanishes outside the
    /// declared annulus.
    pub fn new<F>(value: F, support_inner: f64, support_outer: f64, parity: Parity) -> Result<Self>
    where
        F: Fn([f64; 2]) -> C64 + Send + Sync + 'static,
    {
        if !(support_inner > 0.0) || !(support_outer > support_inner) || !support_outer.is_finite() {
            return Err(Error::InvalidSupport(format!(
                "annulus [{support_inner}, {support_outer}] must satisfy 0 < inner < outer < ∞"
            )));
        }
        Ok(Self {
            value: Arc::new(value),
            support_inner,
            support_outer,
            parity,
        })
    }

    /// Evaluates the function; exactly zero outside the support annulus.
    pub fn value(&self, w: [f64; 2]) -> C64 {
        let r = w[0].hypot(w[1]);
        if r < self.support_inner || r > self.support_outer {
            C64::new(0.0, 0.0)
        } else {
            (self.value)(w)
        }
    }

    /// Evaluates at polar coordinates `(r, θ)`.
    pub fn value_polar(&self, r: f64, theta: f64) -> C64 {
        self.value([r * theta.cos(), r * theta.sin()])
    }

    /// Inner support radius.
    pub fn support_inner(&self) -> f64 {
        self.support_inner
    }

    /// Outer support radius.
    pub fn support_outer(&self) -> f64 {
        self.support_outer
    }

    /// Declared parity.
    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// The underlying callable.
    pub fn callable(&self) -> PlaneFn {
        Arc::clone(&self.value)
    }

    /// Multiplies by the angular mode `e^{ikθ}`.
    pub fn times_mode(&self, k: i64) -> Self {
        let inner = Arc::clone(&self.value);
        let kf = k as f64;
        Self {
            value: Arc::new(move |w| inner(w) * C64::from_polar(1.0, kf * w[1].atan2(w[0]))),
            support_inner: self.support_inner,
            support_outer: self.support_outer,
            parity: self.parity.times(Parity::of_mode(k)),
        }
    }

    /// Multiplies by `cos(kθ)`.
    pub fn times_cos(&self, k: i64) -> Self {
        let inner = Arc::clone(&self.value);
        let kf = k as f64;
        Self {
            value: Arc::new(move |w| inner(w) * (kf * w[1].atan2(w[0])).cos()),
            support_inner: self.support_inner,
            support_outer: self.support_outer,
            parity: self.parity.times(Parity::of_mode(k)),
        }
    }

    /// Multiplies by a complex constant.
    pub fn scaled(&self, c: C64) -> Self {
        let inner = Arc::clone(&self.value);
        Self {
            value: Arc::new(move |w| inner(w) * c),
            ..self.clone()
        }
    }

    /// Pointwise sum; the support is the union annulus.
    pub fn plus(&self, other: &TestFunction2D) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let parity = if self.parity == other.parity {
            self.parity
        } else {
            Parity::Mixed
        };
        Self {
            value: Arc::new(move |w| a.value(w) + b.value(w)),
            support_inner: self.support_inner.min(other.support_inner),
            support_outer: self.support_outer.max(other.support_outer),
            parity,
        }
    }

    /// Even part `(v(w) + v(−w))/2`.
    pub fn even_part(&self) -> Self {
        let a = self.clone();
        Self {
            value: Arc::new(move |w| 0.5 * (a.value(w) + a.value([-w[0], -w[1]]))),
            parity: Parity::Even,
            ..self.clone()
        }
    }

    /// Odd part `(v(w) − v(−w))/2`.
    pub fn odd_part(&self) -> Self {
        let a = self.clone();
        Self {
            value: Arc::new(move |w| 0.5 * (a.value(w) - a.value([-w[0], -w[1]]))),
            parity: Parity::Odd,
            ..self.clone()
        }
    }

    /// Composition with a linear map: `w ↦ factor · v(m w)` where the
    /// support annulus is rescaled by the extreme singular values of `m⁻¹`.
    pub fn linear_pullback(&self, m: [[f64; 2]; 2], factor: f64) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::DomainError("singular linear map".into()));
        }
        let (smin, smax) = singular_values_2x2(m);
        let a = self.clone();
        let parity = self.parity;
        Self::new(
            move |w| {
                let x = [m[0][0] * w[0] + m[0][1] * w[1], m[1][0] * w[0] + m[1][1] * w[1]];
                a.value(x) * factor
            },
            self.support_inner / smax,
            self.support_outer / smin,
            parity,
        )
    }
}

/// Singular values `(σ_min, σ_max)` of a real 2×2 matrix.
pub fn singular_values_2x2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let s1 = a * a + b * b + c * c + d * d;
    let det = (a * d - b * c).abs();
    let disc = (s1 * s1 - 4.0 * det * det).max(0.0).sqrt();
    let smax = (0.5 * (s1 + disc)).sqrt();
    let smin = if smax > 0.0 { det / smax } else { 0.0 };
    (smin, smax)
}

/// Radial bump `exp(−1/(1−((|w|−r₀)/width)²))` supported in
/// `r₀ − width ≤ |w| ≤ r₀ + width`.
pub fn make_bump_radial(r0: f64, width: f64) -> Result<TestFunction2D> {
    if !(width > 0.0) || !(r0 > width) || !r0.is_finite() {
        return Err(Error::InvalidSupport(format!(
            "radial bump needs 0 < width < r0, got r0 = {r0}, width = {width}"
        )));
    }
    TestFunction2D::new(
        move |w| C64::new(mollifier((w[0].hypot(w[1]) - r0) / width), 0.0),
        r0 - width,
        r0 + width,
        Parity::Even,
    )
}

/// Ball bump `exp(−1/(1−|w−c|²/ρ²))` centred at `c` with radius `ρ < |c|`.
pub fn make_bump_at(center: [f64; 2], radius: f64) -> Result<TestFunction2D> {
    let c = center[0].hypot(center[1]);
    if !(radius > 0.0) || !(c > radius) {
        return Err(Error::InvalidSupport(format!(
            "ball bump of radius {radius} at distance {c} from the origin must avoid it"
        )));
    }
    TestFunction2D::new(
        move |w| {
            let d = (w[0] - center[0]).hypot(w[1] - center[1]) / radius;
            C64::new(mollifier(d), 0.0)
        },
        c - radius,
        c + radius,
        Parity::Mixed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        let b = make_bump_radial(2.0, 1.0).unwrap();
        assert!((b.value([2.0, 0.0]).re - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(b.value([0.5, 0.0]), C64::new(0.0, 0.0));
        assert!((b.value([0.0, 2.5]).re - (-1.0 / 0.75f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn bump_rejects_origin() {
        assert!(matches!(make_bump_radial(1.0, 1.0), Err(Error::InvalidSupport(_))));
        assert!(matches!(make_bump_at([0.5, 0.0], 1.0), Err(Error::InvalidSupport(_))));
    }

    #[test]
    fn smooth_step_is_monotone_and_symmetric() {
        let mut last = 0.0;
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let v = smooth_step(x);
            assert!(v >= last);
            assert!((v + smooth_step(1.0 - x) - 1.0).abs() < 1e-15);
            last = v;
        }
    }

    #[test]
    fn singular_values() {
        let (a, b) = singular_values_2x2([[3.0, 0.0], [0.0, -0.5]]);
        assert!((a - 0.5).abs() < 1e-15 && (b - 3.0).abs() < 1e-15);
    }
}
