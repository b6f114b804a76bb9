//! Special functions used by the catalog.

use crate::numerics::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Standard normal CDF through `erfc`, accurate to a few ulps in the tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `eᶻ E₁(z)` for `z` off the closed negative real axis.
///
/// Uses the power series of `E₁` near the origin and in the left half-plane,
/// where it does not cancel, and the Stieltjes continued fraction elsewhere.
pub fn exp_e1(z: C64) -> C64 {
    if z.norm() <= 0.5 || (z.re <= 0.0 && z.norm() <= 8.0) {
        let mut sum = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for k in 1..200 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.norm() <= 1e-17 * sum.norm().max(1e-300) {
                break;
            }
        }
        let e1 = -EULER_GAMMA - z.ln() - sum;
        return z.exp() * e1;
    }
    // even contraction 1/(z + 1 − 1²/(z + 3 − 2²/(z + 5 − …))), evaluated
    // backward at increasing depth until two depths agree
    let cf = |n: usize| {
        let mut tail = C64::new(0.0, 0.0);
        for k in (1..=n).rev() {
            let k2 = (k * k) as f64;
            tail = k2 / (z + (2 * k + 1) as f64 - tail);
        }
        (z + 1.0 - tail).inv()
    };
    let mut n = 16;
    let mut prev = cf(n);
    while n < 1 << 14 {
        n *= 2;
        let next = cf(n);
        if (next - prev).norm() <= 1e-17 * next.norm() {
            return next;
        }
        prev = next;
    }
    prev
}
