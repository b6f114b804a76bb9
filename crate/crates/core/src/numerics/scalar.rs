//! Real scalar abstraction shared by the binary64 and double-double kernels.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::Num;

use super::dd::Dd;

/// Binary64 complex scalar.
pub type C64 = Complex<f64>;
/// Double-double complex scalar.
pub type Cdd = Complex<Dd>;

/// Unit roundoff of binary64 as used in the error proxies, 2^-52.
pub const U: f64 = f64::EPSILON;

/// Real field used by the generic dense kernels.
pub trait Real: Copy + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// Unit roundoff of the format.
    const EPS: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON / 2.0;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for Dd {
    const EPS: f64 = Dd::EPSILON;
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
}

/// Modulus without intermediate overflow for moderate magnitudes.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    let a = z.re.abs();
    let b = z.im.abs();
    let (big, small) = if a > b { (a, b) } else { (b, a) };
    if big == T::zero() {
        return T::zero();
    }
    let r = small / big;
    big * (T::one() + r * r).sqrt()
}

/// Principal square root.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let two = T::from_f64(2.0);
    let m = cabs(z);
    if m == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    if z.re >= T::zero() {
        let re = ((m + z.re) / two).sqrt();
        Complex::new(re, z.im / (two * re))
    } else {
        let im = ((m - z.re) / two).sqrt();
        let im = if z.im < T::zero() { -im } else { im };
        Complex::new(z.im / (two * im), im)
    }
}

pub fn to_dd(z: C64) -> Cdd {
    Complex::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
}

pub fn from_dd(z: Cdd) -> C64 {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn lift<T: Real>(z: C64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn lower<T: Real>(z: Complex<T>) -> C64 {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn is_finite_c(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Format a binary64 value with 17 significant digits (lossless).
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csqrt_matches_std_on_both_half_planes() {
        for &(re, im) in &[(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (-1.0, 0.0), (0.0, -2.0)] {
            let z = C64::new(re, im);
            let a = csqrt(z);
            let b = z.sqrt();
            assert!((a - b).norm() < 1e-15 * (1.0 + b.norm()), "{z}");
        }
    }

    #[test]
    fn csqrt_in_double_double() {
        let z = to_dd(C64::new(-2.0, 1e-3));
        let r = csqrt(z);
        let back = r * r - z;
        assert!(cabs(back).to_f64() < 1e-30);
    }
}
