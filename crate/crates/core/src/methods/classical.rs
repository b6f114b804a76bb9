//! Euler, Talbot, Gaver–Stehfest and Zakian parameter generators.

use num_complex::Complex;

use super::{is_real_scalar, symmetrize, AwMethod};
use crate::error::{Error, Result};
use crate::numerics::{roots_dd, Cdd, Dd, C64};

const LN2_DD: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

fn dd(x: f64) -> Dd {
    Dd::from_f64(x)
}

/// Exact conversion of an integer below 2^106 to double-double.
fn dd_u128(x: u128) -> Dd {
    let hi = x as f64;
    let rest = x as i128 - hi as i128;
    Dd::from_f64(hi) + Dd::from_f64(rest as f64)
}

fn binom(n: u64, k: u64) -> Dd {
    if k > n {
        return Dd::ZERO;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    dd_u128(r)
}

/// Euler summation method with `n_reduced` (odd, ≥ 3) terms.
pub fn euler_method(n_reduced: usize) -> Result<AwMethod> {
    if n_reduced < 3 || n_reduced % 2 == 0 {
        return Err(Error::InvalidArgument(format!("Euler needs an odd N' >= 3, got {n_reduced}")));
    }
    let np = n_reduced;
    let m = (np - 1) / 2;
    let mut xi = vec![f64::NAN; np + 1];
    xi[1] = 0.5;
    for x in xi.iter_mut().take((np + 1) / 2 + 1).skip(2) {
        *x = 1.0;
    }
    let pow2 = 2f64.powi(-(m as i32));
    let mut acc = Dd::ZERO;
    for j in 0..m {
        acc = acc + binom(m as u64, j as u64);
        let idx = (np + 3) / 2 + j;
        if !xi[idx].is_nan() {
            return Err(Error::InvalidArgument(format!("Euler weight index {idx} assigned twice")));
        }
        xi[idx] = (Dd::ONE - acc * dd(pow2)).to_f64();
    }
    let a = std::f64::consts::LN_10 / 6.0 * (np - 1) as f64;
    let scale = 10f64.powf((np - 1) as f64 / 6.0);
    let mut w = Vec::with_capacity(np);
    let mut b = Vec::with_capacity(np);
    let mut p = Vec::with_capacity(np);
    for n in 1..=np {
        // alternating sign starts positive at the real node
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        w.push(C64::new(sign * scale * xi[n], 0.0));
        b.push(C64::new(a, std::f64::consts::PI * (n - 1) as f64));
        p.push(n > 1);
    }
    AwMethod::reduced(format!("euler({np})"), w, b, p)
}

/// Fixed Talbot method with `n_reduced` (≥ 2) terms.
pub fn talbot_method(n_reduced: usize) -> Result<AwMethod> {
    if n_reduced < 2 {
        return Err(Error::InvalidArgument(format!("Talbot needs N' >= 2, got {n_reduced}")));
    }
    let np = n_reduced as f64;
    let pi = std::f64::consts::PI;
    let b1 = 2.0 * np / 5.0;
    let mut w = vec![C64::new(b1.exp() / 5.0, 0.0)];
    let mut b = vec![C64::new(b1, 0.0)];
    let mut p = vec![false];
    for n in 2..=n_reduced {
        let k = (n - 1) as f64;
        let theta = k * pi / np;
        let cot = theta.cos() / theta.sin();
        let beta = C64::new(cot, 1.0) * (2.0 * k * pi / 5.0);
        let weight = C64::new(1.0, theta * (1.0 + cot * cot) - cot) * beta.exp() * 0.4;
        w.push(weight);
        b.push(beta);
        p.push(true);
    }
    AwMethod::reduced(format!("talbot({n_reduced})"), w, b, p)
}

/// Gaver–Stehfest method with `n_reduced` (even) terms; all real.
pub fn gaver_method(n_reduced: usize) -> Result<AwMethod> {
    if n_reduced < 2 || n_reduced % 2 == 1 {
        return Err(Error::InvalidArgument(format!("Gaver-Stehfest needs an even N' >= 2, got {n_reduced}")));
    }
    let m = n_reduced / 2;
    let mut fact = Dd::ONE;
    for i in 2..=m {
        fact = fact * dd(i as f64);
    }
    let mut w = Vec::with_capacity(n_reduced);
    let mut b = Vec::with_capacity(n_reduced);
    for n in 1..=n_reduced {
        let mut sum = Dd::ZERO;
        for j in (n + 1) / 2..=n.min(m) {
            let pw = dd_u128((j as u128).pow(m as u32 + 1));
            let term = pw / fact * binom(m as u64, j as u64) * binom(2 * j as u64, j as u64) * binom(j as u64, (n - j) as u64);
            sum = sum + term;
        }
        let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
        w.push(C64::new(sign * (LN2_DD * sum).to_f64(), 0.0));
        b.push(C64::new((LN2_DD * dd(n as f64)).to_f64(), 0.0));
    }
    AwMethod::reduced(format!("gaver({n_reduced})"), w, b, vec![false; n_reduced])
}

/// Padé (N−1, N) approximant of `eᶻ` as ascending coefficient lists `(p, q)`.
pub(crate) fn pade_exp(n: usize) -> (Vec<Dd>, Vec<Dd>) {
    let m = n - 1;
    let fact = |k: usize| (1..=k).fold(Dd::ONE, |a, i| a * dd(i as f64));
    let total = fact(m + n);
    let p = (0..=m).map(|j| fact(m + n - j) * fact(m) / (total * fact(j) * fact(m - j))).collect();
    let q = (0..=n)
        .map(|j| {
            let v = fact(m + n - j) * fact(n) / (total * fact(j) * fact(n - j));
            if j % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    (p, q)
}

fn horner(c: &[Cdd], z: Cdd) -> Cdd {
    c.iter().rev().fold(Complex::new(Dd::ZERO, Dd::ZERO), |acc, &ck| acc * z + ck)
}

/// Zakian method of order `n` (full form): poles and residues of the
/// Padé (N−1, N) approximant of `eᶻ`.
pub fn zakian_method(n: usize) -> Result<AwMethod> {
    if n < 1 {
        return Err(Error::InvalidArgument("Zakian needs N >= 1".into()));
    }
    let (p, q) = pade_exp(n);
    let pc: Vec<Cdd> = p.iter().map(|&x| Complex::new(x, Dd::ZERO)).collect();
    let qc: Vec<Cdd> = q.iter().map(|&x| Complex::new(x, Dd::ZERO)).collect();
    let dq: Vec<Cdd> = qc.iter().enumerate().skip(1).map(|(k, &c)| c * Complex::new(dd(k as f64), Dd::ZERO)).collect();
    let roots = roots_dd(&qc).map_err(|e| Error::NoConvergence(format!("Padé denominator roots: {e}")))?;
    if roots.len() != n {
        return Err(Error::NoConvergence(format!("expected {n} Padé poles, found {}", roots.len())));
    }
    let pairs: Vec<(C64, C64)> = roots
        .iter()
        .map(|&beta| {
            // r(z) = Σ w/(β − z) gives w = −P(β)/Q'(β)
            let w = -(horner(&pc, beta) / horner(&dq, beta));
            (C64::new(w.re.to_f64(), w.im.to_f64()), C64::new(beta.re.to_f64(), beta.im.to_f64()))
        })
        .collect();
    let pairs = symmetrize(pairs, |b| b.im.abs() <= 1e-13 * (1.0 + b.norm()) || is_real_scalar(b))?;
    let (w, b): (Vec<C64>, Vec<C64>) = pairs.into_iter().unzip();
    AwMethod::full(format!("zakian({n})"), w, b)
}
