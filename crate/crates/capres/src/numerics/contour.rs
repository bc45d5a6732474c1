//! Paths in the complex plane and integration along them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_1d, integrate_adaptive_on, QuadratureConfig};

type C64 = Complex64;

/// Direction of traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Counter-clockwise for circles; left to right for horizontal lines;
    /// vertex order for polylines.
    Positive,
    /// The reverse direction.
    Negative,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Geometric shape of a contour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ContourKind {
    /// The full line `{x + i·imag_offset : x ∈ ℝ}`.
    HorizontalLine { imag_offset: f64 },
    /// Circle with given centre and radius.
    Circle { center: C64, radius: f64 },
    /// Chain of straight segments through the vertices.
    Polyline { vertices: Vec<C64> },
}

/// An oriented integration path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    /// Shape.
    pub kind: ContourKind,
    /// Direction.
    pub orientation: Orientation,
}

impl Contour {
    /// Horizontal line `Im λ = c`, traversed left to right.
    pub fn horizontal_line(imag_offset: f64) -> Self {
        Self {
            kind: ContourKind::HorizontalLine { imag_offset },
            orientation: Orientation::Positive,
        }
    }

    /// Positively oriented circle.
    pub fn circle(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::DomainError(format!(
                "circle radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            kind: ContourKind::Circle { center, radius },
            orientation: Orientation::Positive,
        })
    }

    /// Polyline through the given vertices, in order.
    pub fn polyline(vertices: Vec<C64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DomainError(
                "a polyline needs at least two vertices".into(),
            ));
        }
        Ok(Self {
            kind: ContourKind::Polyline { vertices },
            orientation: Orientation::Positive,
        })
    }

    /// Closed rectangle with the given corners, positively oriented.
    pub fn rectangle(lower_left: C64, upper_right: C64) -> Result<Self> {
        let (x0, y0, x1, y1) = (lower_left.re, lower_left.im, upper_right.re, upper_right.im);
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::DomainError("degenerate rectangle".into()));
        }
        Self::polyline(vec![
            C64::new(x0, y0),
            C64::new(x1, y0),
            C64::new(x1, y1),
            C64::new(x0, y1),
            C64::new(x0, y0),
        ])
    }

    /// Same contour traversed in the opposite direction.
    pub fn reversed(mut self) -> Self {
        self.orientation = match self.orientation {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        };
        self
    }

    /// Euclidean distance from `z` to the contour.
    pub fn distance_to(&self, z: C64) -> f64 {
        match &self.kind {
            ContourKind::HorizontalLine { imag_offset } => (z.im - imag_offset).abs(),
            ContourKind::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            ContourKind::Polyline { vertices } => vertices
                .windows(2)
                .map(|s| segment_distance(s[0], s[1], z))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Short human-readable description used in error messages.
    pub fn describe(&self) -> String {
        match &self.kind {
            ContourKind::HorizontalLine { imag_offset } => format!("Im λ = {imag_offset}"),
            ContourKind::Circle { center, radius } => {
                format!("|λ - ({center})| = {radius}")
            }
            ContourKind::Polyline { vertices } => format!("polyline with {} vertices", vertices.len()),
        }
    }
}

fn segment_distance(a: C64, b: C64, z: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * d.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Integrates `f` along the contour: `∮_c f(λ) dλ`.
///
/// Circles use the periodic trapezoid rule with node doubling (spectrally
/// accurate for integrands holomorphic near the circle); horizontal lines are
/// integrated as two half-lines with the adaptive real integrator; polylines
/// use adaptive Gauss–Kronrod on each segment.
pub fn contour_integrate<F: Fn(C64) -> C64>(f: F, c: &Contour, cfg: &QuadratureConfig) -> Result<C64> {
    cfg.validate()?;
    let sign = c.orientation.sign();
    let value = match &c.kind {
        ContourKind::HorizontalLine { imag_offset } => {
            let shift = C64::new(0.0, *imag_offset);
            integrate_1d(|x| f(C64::new(x, 0.0) + shift), f64::NEG_INFINITY, f64::INFINITY, cfg)?
        }
        ContourKind::Circle { center, radius } => circle_trapezoid(&f, *center, *radius, cfg)?,
        ContourKind::Polyline { vertices } => {
            let mut total = C64::new(0.0, 0.0);
            for seg in vertices.windows(2) {
                let (a, b) = (seg[0], seg[1]);
                let d = b - a;
                if d.norm() == 0.0 {
                    continue;
                }
                let g = |t: f64| f(a + d * t) * d;
                let (v, _) = integrate_adaptive_on(&g, &[0.0, 0.5, 1.0], cfg)?;
                total += v;
            }
            total
        }
    };
    Ok(value * sign)
}

fn circle_trapezoid<F: Fn(C64) -> C64>(
    f: &F,
    center: C64,
    radius: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    const MAX_NODES: usize = 1 << 16;
    let point = |theta: f64| {
        let e = C64::from_polar(1.0, theta);
        f(center + e * radius) * (C64::i() * e * radius)
    };
    let mut n = 32usize;
    let mut sum = C64::new(0.0, 0.0);
    // Sum of moduli: sets the rounding floor for integrals that cancel.
    let mut mass = 0.0;
    for j in 0..n {
        let p = point(2.0 * std::f64::consts::PI * j as f64 / n as f64);
        sum += p;
        mass += p.norm();
    }
    let mut estimate = sum * (2.0 * std::f64::consts::PI / n as f64);
    while n < MAX_NODES {
        // Add the midpoints of the current grid.
        for j in 0..n {
            let p = point(2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64);
            sum += p;
            mass += p.norm();
        }
        n *= 2;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let next = sum * h;
        let diff = (next - estimate).norm();
        estimate = next;
        let floor = 64.0 * f64::EPSILON * mass * h;
        // The trapezoid error decays geometrically, so the observed change
        // overestimates the remaining error.
        if diff <= cfg.abs_tol.max(cfg.rel_tol * next.norm()).max(floor) {
            return Ok(next);
        }
    }
    Err(Error::NonConvergence {
        estimate: estimate.norm(),
        error: f64::NAN,
        subdivisions: MAX_NODES,
    })
}

/// Residue of `f` at a point enclosed by a circle of radius `radius`,
/// computed as `(1/2πi)∮ f`.
pub fn residue_on_circle<F: Fn(C64) -> C64>(
    f: F,
    center: C64,
    radius: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    let c = Contour::circle(center, radius)?;
    Ok(contour_integrate(f, &c, cfg)? / (2.0 * std::f64::consts::PI * C64::i()))
}
