//! Bessel functions of the first kind of integer order.
//!
//! Small and moderate arguments use Miller's backward recurrence normalised
//! by `J₀ + 2ΣJ_{2m} = 1`; large arguments (`x ≥ 40 + k²`) use Hankel's
//! asymptotic expansion. Both regimes are validated against the integral
//! representation [`bessel_j_integral`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// `J_k(x)` for integer `k` and real `x ≥ 0` (negative `x` is accepted via
/// `J_k(−x) = (−1)^k J_k(x)`).
pub fn bessel_j(k: i32, x: f64) -> f64 {
    if x < 0.0 {
        return parity_sign(k) * bessel_j(k, -x);
    }
    if k < 0 {
        return parity_sign(k) * bessel_j(-k, x);
    }
    let n = k as u32;
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let kf = n as f64;
    if x >= 40.0 + kf * kf {
        hankel_asymptotic(n, x)
    } else {
        miller(n, x)
    }
}

/// All orders `J_0(x), …, J_{k_max}(x)` in one backward sweep (valid in the
/// Miller regime; large arguments fall back to per-order evaluation).
pub fn bessel_j_range(k_max: u32, x: f64) -> Vec<f64> {
    let x = x.abs();
    if x == 0.0 {
        let mut v = vec![0.0; k_max as usize + 1];
        v[0] = 1.0;
        return v;
    }
    let kf = k_max as f64;
    if x >= 40.0 + kf * kf {
        return (0..=k_max).map(|k| hankel_asymptotic(k, x)).collect();
    }
    let mut out = vec![0.0; k_max as usize + 1];
    miller_fill(k_max, x, &mut out);
    out
}

fn parity_sign(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn miller(n: u32, x: f64) -> f64 {
    let mut out = vec![0.0; n as usize + 1];
    miller_fill(n, x, &mut out);
    out[n as usize]
}

/// Backward recurrence from a start index well above `max(n, x)`, storing
/// `J_0..=J_n` into `out`.
fn miller_fill(n: u32, x: f64, out: &mut [f64]) {
    let big = (n as f64).max(x);
    let mut start = (big + 30.0 + 2.0 * (60.0 * big).sqrt()) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{m+1}
    let mut j_cur = 1e-300; // J_m, arbitrary seed
    let mut norm = 0.0;
    for m in (1..=start).rev() {
        // J_{m-1} = (2m/x) J_m - J_{m+1}
        let j_prev = m as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = m - 1;
        if idx <= n as usize {
            out[idx] = j_cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            // Rescale everything accumulated so far.
            let s = 1e-250;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += j_cur; // J_0
    for v in out.iter_mut() {
        *v /= norm;
    }
}

fn hankel_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev_abs = f64::INFINITY;
    for j in 0..200u32 {
        if j > 0 {
            let odd = (2 * j - 1) as f64;
            term *= (mu - odd * odd) / (j as f64 * 8.0 * x);
        }
        let a = term.abs();
        if a > prev_abs {
            break;
        }
        // Terms alternate in pairs: +P0, +Q1, -P2, -Q3, +P4, ...
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if j % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if a < 1e-17 * p.abs().max(1e-300) || term == 0.0 {
            break;
        }
        prev_abs = a;
    }
    let chi = x - (n as f64 * FRAC_PI_2 + FRAC_PI_4);
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Reference evaluation `J_k(x) = (1/π)∫₀^π cos(kθ − x sin θ) dθ` by the
/// trapezoid rule on the full period (spectrally convergent); `nodes` should
/// exceed `x + |k| + 40`.
pub fn bessel_j_integral(k: i32, x: f64, nodes: usize) -> f64 {
    // The integrand over [0, 2π) is periodic, so the equal-weight rule on the
    // full circle converges geometrically.
    let h = 2.0 * PI / nodes as f64;
    let kf = k as f64;
    let s: f64 = (0..nodes)
        .map(|j| {
            let th = h * j as f64;
            (kf * th - x * th.sin()).cos()
        })
        .sum();
    s * h / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Values from standard tables.
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 5.0) - 0.046_565_116_277_752_21).abs() < 1e-14);
        assert!((bessel_j(0, 100.0) - 0.019_985_850_304_223_12).abs() < 1e-14);
    }

    #[test]
    fn regimes_agree_with_integral() {
        for &k in &[0, 1, 2, 5, 10, 33, 64] {
            for &x in &[0.01, 0.5, 3.0, 17.0, 80.0, 250.0, 999.0] {
                let nodes = (x as usize) + 2 * k as usize + 200;
                let r = bessel_j_integral(k, x, nodes);
                let v = bessel_j(k, x);
                assert!((v - r).abs() < 1e-12, "k={k} x={x}: {v} vs {r}");
            }
        }
    }

    #[test]
    fn boundary_between_regimes_is_continuous() {
        for k in 0..8u32 {
            let x = 40.0 + (k * k) as f64;
            let a = hankel_asymptotic(k, x);
            let b = miller(k, x);
            assert!((a - b).abs() < 1e-13, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn range_matches_single() {
        let v = bessel_j_range(20, 7.3);
        for (k, &val) in v.iter().enumerate() {
            assert!((val - bessel_j(k as i32, 7.3)).abs() < 1e-15);
        }
    }
}
