//! Even entire functions of Paley–Wiener type.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quadrature::FixedRule;
use crate::numerics::testfn::mollifier;

type C64 = Complex64;

/// Shared callable `ℂ → ℂ`.
pub type EntireFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// An even entire function of exponential type `type_bound` satisfying
/// `|f(λ)| ≤ sup_bound · e^{R|Im λ|} / (1 + |Re λ|)³`.
#[derive(Clone)]
pub struct EvenPWFunction {
    value: EntireFn,
    type_bound: f64,
    sup_bound: f64,
}

impl fmt::Debug for EvenPWFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvenPWFunction")
            .field("type_bound", &self.type_bound)
            .field("sup_bound", &self.sup_bound)
            .finish_non_exhaustive()
    }
}

impl EvenPWFunction {
    /// Wraps a callable; the caller guarantees evenness and the growth bound.
    pub fn new<F>(value: F, type_bound: f64, sup_bound: f64) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            type_bound,
            sup_bound,
        }
    }

    /// The zero function.
    pub fn zero() -> Self {
        Self::new(|_| C64::new(0.0, 0.0), 0.0, 0.0)
    }

    /// Evaluates `f(λ)`.
    pub fn value(&self, lambda: C64) -> C64 {
        (self.value)(lambda)
    }

    /// Exponential type `R`.
    pub fn type_bound(&self) -> f64 {
        self.type_bound
    }

    /// Constant in the growth bound.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// True when this is (declared) identically zero.
    pub fn is_zero(&self) -> bool {
        self.sup_bound == 0.0
    }

    /// Upper bound for `|f(λ)|` from the declared growth estimate.
    pub fn bound_at(&self, lambda: C64) -> f64 {
        self.sup_bound * (self.type_bound * lambda.im.abs()).exp() / (1.0 + lambda.re.abs()).powi(3)
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &EvenPWFunction, b: C64) -> Self {
        let (f, g) = (Arc::clone(&self.value), Arc::clone(&other.value));
        let type_bound = self.type_bound.max(other.type_bound);
        let sup_bound = a.norm() * self.sup_bound + b.norm() * other.sup_bound;
        Self {
            value: Arc::new(move |z| a * f(z) + b * g(z)),
            type_bound,
            sup_bound,
        }
    }

    /// Shared handle to the callable.
    pub fn callable(&self) -> EntireFn {
        Arc::clone(&self.value)
    }
}

/// Gauss–Legendre rule on `[0, h]` used for the cosine transform.
fn half_rule(h: f64) -> FixedRule {
    FixedRule::composite_gauss(0.0, h, 64, 20)
}

/// `λ ↦ ∫ φ(t) cos(λt) dt` for the mollifier `φ(t) = exp(−1/(1−(t/h)²))`
/// supported in `[−h, h]`.
pub fn make_even_pw(bump_halfwidth: f64) -> Result<EvenPWFunction> {
    if !(bump_halfwidth > 0.0) || !bump_halfwidth.is_finite() {
        return Err(Error::DomainError(format!(
            "bump half-width must be positive, got {bump_halfwidth}"
        )));
    }
    let h = bump_halfwidth;
    let rule = half_rule(h);
    let phi: Vec<f64> = rule.nodes.iter().map(|&t| mollifier(t / h)).collect();
    let nodes = rule.nodes.clone();
    let weights: Vec<f64> = rule.weights.iter().zip(&phi).map(|(w, p)| 2.0 * w * p).collect();
    let l1: f64 = weights.iter().sum();
    let value = move |lambda: C64| -> C64 {
        nodes
            .iter()
            .zip(&weights)
            .map(|(&t, &w)| (lambda * t).cos() * w)
            .sum()
    };
    // Three integrations by parts: |λ|³|f(λ)| ≤ ‖φ'''‖₁ e^{h|Im λ|}, and
    // (1+|x|)³ ≤ 4(1+|x|³).
    let l1_d3 = third_derivative_l1(h);
    let sup_bound = 4.0 * (l1 + l1_d3);
    Ok(EvenPWFunction::new(value, h, sup_bound))
}

/// `∫|φ'''|` for the mollifier of half-width `h`, by central differences on
/// a fine grid (the bound only needs to be an upper estimate; a 5% margin is
/// added).
fn third_derivative_l1(h: f64) -> f64 {
    let n = 20_000;
    let dt = 2.0 * h / n as f64;
    let f = |t: f64| mollifier(t / h);
    let mut s = 0.0;
    for i in 0..n {
        let t = -h + (i as f64 + 0.5) * dt;
        let d3 = (f(t + 2.0 * dt) - 2.0 * f(t + dt) + 2.0 * f(t - dt) - f(t - 2.0 * dt)) / (2.0 * dt.powi(3));
        s += d3.abs() * dt;
    }
    1.05 * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate_1d, QuadratureConfig};

    #[test]
    fn value_at_zero_is_integral() {
        let f = make_even_pw(1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let oracle = integrate_1d(|t| C64::new(mollifier(t), 0.0), -1.0, 1.0, &cfg).unwrap();
        assert!((f.value(C64::new(0.0, 0.0)) - oracle).norm() < 1e-12);
    }

    #[test]
    fn even_and_bounded() {
        let f = make_even_pw(1.0).unwrap();
        for &z in &[C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(0.0, -3.0)] {
            assert!((f.value(z) - f.value(-z)).norm() < 1e-13);
        }
        assert!(f.value(C64::new(10.0, 0.0)).norm() <= f.value(C64::new(0.0, 0.0)).norm());
        for i in 0..200 {
            let z = C64::new(i as f64 * 0.7, (i % 9) as f64 * 0.5 - 2.0);
            assert!(f.value(z).norm() <= f.bound_at(z));
        }
    }
}
