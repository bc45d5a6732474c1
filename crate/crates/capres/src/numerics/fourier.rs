//! Fourier analysis on the circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C64 = Complex64;

/// Fourier coefficients `c_k`, `|k| ≤ k_max`, of a function on the circle,
/// with `f(θ) ≈ Σ c_k e^{ikθ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    k_max: usize,
    coeffs: Vec<C64>,
}

impl FourierCoeffs {
    /// All-zero coefficient vector.
    pub fn zeros(k_max: usize) -> Self {
        Self {
            k_max,
            coeffs: vec![C64::new(0.0, 0.0); 2 * k_max + 1],
        }
    }

    /// Builds from a dense vector ordered `−k_max..=k_max`.
    pub fn from_vec(coeffs: Vec<C64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "coefficient vector must have odd length");
        Self {
            k_max: coeffs.len() / 2,
            coeffs,
        }
    }

    /// Largest stored frequency.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Coefficient `c_k` (zero outside the stored range).
    pub fn get(&self, k: i64) -> C64 {
        if k.unsigned_abs() as usize > self.k_max {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k_max as i64) as usize]
        }
    }

    /// Sets coefficient `c_k`; panics when `|k| > k_max`.
    pub fn set(&mut self, k: i64, value: C64) {
        assert!(k.unsigned_abs() as usize <= self.k_max, "frequency {k} out of range");
        let idx = (k + self.k_max as i64) as usize;
        self.coeffs[idx] = value;
    }

    /// Dense coefficient slice ordered `−k_max..=k_max`.
    pub fn as_slice(&self) -> &[C64] {
        &self.coeffs
    }

    /// Iterator over `(k, c_k)`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let off = self.k_max as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - off, c))
    }

    /// Evaluates the truncated series at angle `theta`.
    pub fn eval(&self, theta: f64) -> C64 {
        self.iter()
            .map(|(k, c)| c * C64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    /// Coefficient-wise map.
    pub fn map<F: Fn(i64, C64) -> C64>(&self, f: F) -> Self {
        let off = self.k_max as i64;
        Self {
            k_max: self.k_max,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| f(i as i64 - off, c))
                .collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Number of equispaced samples used by [`circle_fourier`] for a given `k_max`.
pub fn circle_sample_count(k_max: usize) -> usize {
    (4 * k_max + 4).max(256).next_power_of_two()
}

/// Largest number of samples used by [`circle_fourier`].
pub const MAX_CIRCLE_SAMPLES: usize = 1 << 15;

/// Coefficients `c_k = (1/2π)∫₀^{2π} f(θ)e^{−ikθ}dθ`, `|k| ≤ k_max`, by the
/// equispaced trapezoid rule (spectrally accurate for smooth periodic `f`).
///
/// The sample count starts at [`circle_sample_count`] and doubles until the
/// coefficients change by less than `1e−14` of the largest sample modulus
/// (aliasing from frequencies near the sample count is then negligible).
pub fn circle_fourier<F: Fn(f64) -> C64>(f: F, k_max: usize) -> FourierCoeffs {
    let mut n = circle_sample_count(k_max);
    let mut samples: Vec<C64> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
    let mut coeffs = fourier_from_samples(&samples, k_max);
    let mut previous_change = f64::INFINITY;
    while n < MAX_CIRCLE_SAMPLES {
        let mut refined = Vec::with_capacity(2 * n);
        for (j, &v) in samples.iter().enumerate() {
            refined.push(v);
            refined.push(f(2.0 * PI * (j as f64 + 0.5) / n as f64));
        }
        n *= 2;
        samples = refined;
        let next = fourier_from_samples(&samples, k_max);
        let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let change = next
            .iter()
            .map(|(k, c)| (c - coeffs.get(k)).norm())
            .fold(0.0, f64::max);
        coeffs = next;
        // Converged, or stuck at the rounding floor of the samples: spectral
        // convergence would otherwise shrink the change by far more than 2×.
        if change <= 1e-14 * scale || (change <= 1e-11 * scale && change > 0.5 * previous_change) {
            break;
        }
        previous_change = change;
    }
    coeffs
}

/// Coefficients from `n` equispaced samples `f(2πj/n)`; requires `n > 2 k_max`.
pub fn fourier_from_samples(samples: &[C64], k_max: usize) -> FourierCoeffs {
    let n = samples.len();
    assert!(n > 2 * k_max, "too few samples for the requested band");
    let mut out = FourierCoeffs::zeros(k_max);
    // Twiddle table e^{-2πi j/n}.
    let tw: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
        .collect();
    for k in -(k_max as i64)..=(k_max as i64) {
        let kk = k.rem_euclid(n as i64) as usize;
        let mut s = C64::new(0.0, 0.0);
        for (j, &v) in samples.iter().enumerate() {
            s += v * tw[(kk * j) % n];
        }
        out.set(k, s / n as f64);
    }
    out
}
