//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Integral value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub uncertainty: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Piece { a, b, value: k * h, error: ((k - g) * h).abs() }
}

/// Integrate `f` over `[a, b]`, starting from `pieces` equal subintervals and
/// bisecting the worst one until the summed error estimate is below
/// `abs_tol` or `max_pieces` is reached.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize, abs_tol: f64, max_pieces: usize) -> Integral {
    let n = pieces.max(1);
    let mut heap: BinaryHeap<Piece> = (0..n)
        .map(|i| {
            let lo = a + (b - a) * i as f64 / n as f64;
            let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
            gk15(&f, lo, hi)
        })
        .collect();
    loop {
        let err: f64 = heap.iter().map(|p| p.error).sum();
        if err <= abs_tol || heap.len() >= max_pieces {
            let value = heap.iter().map(|p| p.value).sum();
            return Integral { value, uncertainty: err };
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            let value = heap.iter().map(|p| p.value).sum();
            return Integral { value, uncertainty: err };
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        let r = integrate(|x| x * x, 0.0, 3.0, 1, 1e-14, 100);
        assert!((r.value - 9.0).abs() < 1e-13);
        let r = integrate(|x| (-x).exp(), 0.0, 40.0, 8, 1e-13, 1000);
        assert!((r.value - (1.0 - (-40f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn kink_is_resolved() {
        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1, 1e-12, 2000);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-11);
    }
}
