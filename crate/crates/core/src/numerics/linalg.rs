//! Dense kernels: LU, eigenvalues, SVD, symmetric spectra, matrix exponential,
//! polynomial roots. The LU and eigenvalue routines are generic over the real
//! field so the same code runs in binary64 and double-double.

use num_complex::Complex;
use num_traits::Zero;

use super::dd::Dd;
use super::matrix::{CMatrix, Matrix, RMatrix};
use super::scalar::{cabs, csqrt, lift, lower, Cdd, Real, C64};
use crate::error::{Error, Result};

#[inline]
fn abs1<T: Real>(z: Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Working precision selector for [`dense_eigenvalues`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Working,
    Extended,
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    a: Matrix<Complex<T>>,
    lu: Matrix<Complex<T>>,
    perm: Vec<usize>,
    /// Smallest and largest pivot moduli, for conditioning checks.
    pub pivot_range: (f64, f64),
}

pub fn lu<T: Real>(a: &Matrix<Complex<T>>) -> Result<Lu<T>> {
    if !a.is_square() {
        return Err(Error::Dimension("LU of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pmin = f64::INFINITY;
    let mut pmax: f64 = 0.0;
    for k in 0..n {
        let mut p = k;
        let mut best = abs1(m[(k, k)]);
        for i in k + 1..n {
            let v = abs1(m[(i, k)]);
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == T::zero() {
            return Err(Error::Singular(format!("zero pivot in column {k}")));
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            perm.swap(k, p);
        }
        let piv = m[(k, k)];
        let b = best.to_f64();
        pmin = pmin.min(b);
        pmax = pmax.max(b);
        for i in k + 1..n {
            let l = m[(i, k)] / piv;
            m[(i, k)] = l;
            if l.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = m[(i, j)] - l * m[(k, j)];
                m[(i, j)] = v;
            }
        }
    }
    Ok(Lu { a: a.clone(), lu: m, perm, pivot_range: (pmin, pmax) })
}

impl<T: Real> Lu<T> {
    pub fn solve_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.rows();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &Matrix<Complex<T>>) -> Result<Matrix<Complex<T>>> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::Dimension("right-hand side rows".into()));
        }
        let mut out = Matrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<_> = (0..n).map(|i| b[(i, j)]).collect();
            for (i, v) in self.solve_vec(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// Solve `X A = B` for `X`.
    pub fn solve_right(&self, b: &Matrix<Complex<T>>) -> Result<Matrix<Complex<T>>> {
        if b.cols() != self.lu.rows() {
            return Err(Error::Dimension("right-hand side columns".into()));
        }
        let f = lu(&self.a.transpose())?;
        Ok(f.solve(&b.transpose())?.transpose())
    }

    /// Reciprocal pivot growth indicator `min|pivot| / max|pivot|`.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_range.0 / self.pivot_range.1
    }
}

pub fn solve<T: Real>(a: &Matrix<Complex<T>>, b: &Matrix<Complex<T>>) -> Result<Matrix<Complex<T>>> {
    lu(a)?.solve(b)
}

pub fn inverse<T: Real>(a: &Matrix<Complex<T>>) -> Result<Matrix<Complex<T>>> {
    lu(a)?.solve(&Matrix::identity(a.rows()))
}

/// Reduce to upper Hessenberg form by Householder reflections (eigenvalues only).
fn hessenberg<T: Real>(h: &mut Matrix<Complex<T>>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let zero = Complex::new(T::zero(), T::zero());
    for k in 0..n - 2 {
        let mut alpha2 = T::zero();
        for i in k + 1..n {
            alpha2 = alpha2 + h[(i, k)].norm_sqr();
        }
        if alpha2 == T::zero() {
            continue;
        }
        let alpha = alpha2.sqrt();
        let x0 = h[(k + 1, k)];
        let m0 = cabs(x0);
        let phase = if m0 == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / Complex::new(m0, T::zero())
        };
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] = v[0] + phase * Complex::new(alpha, T::zero());
        let vnorm2 = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::from_f64(2.0);
        let beta = Complex::new(two / vnorm2, T::zero());
        // left: rows k+1.., columns k..
        for j in k..n {
            let mut s = zero;
            for (idx, vi) in v.iter().enumerate() {
                s = s + vi.conj() * h[(k + 1 + idx, j)];
            }
            s = s * beta;
            for (idx, vi) in v.iter().enumerate() {
                let t = h[(k + 1 + idx, j)] - *vi * s;
                h[(k + 1 + idx, j)] = t;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let mut s = zero;
            for (idx, vi) in v.iter().enumerate() {
                s = s + h[(i, k + 1 + idx)] * *vi;
            }
            s = s * beta;
            for (idx, vi) in v.iter().enumerate() {
                let t = h[(i, k + 1 + idx)] - s * vi.conj();
                h[(i, k + 1 + idx)] = t;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = zero;
        }
    }
}

/// Eigenvalues of a square complex matrix by Hessenberg reduction and
/// single-shift complex QR iteration.
pub fn eigenvalues<T: Real>(a: &Matrix<Complex<T>>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::Dimension("eigenvalues of a non-square matrix".into()));
    }
    if !a.data().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    let n = a.rows();
    let mut h = a.clone();
    hessenberg(&mut h);
    let eps = T::from_f64(T::EPS);
    let hnorm = h.data().iter().fold(T::zero(), |m, &z| {
        let v = abs1(z);
        if v > m {
            v
        } else {
            m
        }
    });
    let mut eig = vec![Complex::new(T::zero(), T::zero()); n];
    if n == 1 {
        eig[0] = h[(0, 0)];
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(4);
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let mut s = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
            if s == T::zero() {
                s = hnorm;
            }
            if abs1(h[(l, l - 1)]) <= eps * s {
                h[(l, l - 1)] = Complex::new(T::zero(), T::zero());
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NoConvergence("QR eigenvalue iteration".into()));
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            let s = abs1(h[(hi, hi - 1)]) + if hi >= 2 { abs1(h[(hi - 1, hi - 2)]) } else { T::zero() };
            h[(hi, hi)] + Complex::new(s * T::from_f64(0.75), s * T::from_f64(-0.4375))
        } else {
            let a11 = h[(hi - 1, hi - 1)];
            let a12 = h[(hi - 1, hi)];
            let a21 = h[(hi, hi - 1)];
            let a22 = h[(hi, hi)];
            let half = Complex::new(T::from_f64(0.5), T::zero());
            let m = (a11 + a22) * half;
            let d = (a11 - a22) * half;
            let disc = csqrt(d * d + a12 * a21);
            let e1 = m + disc;
            let e2 = m - disc;
            if abs1(e1 - a22) < abs1(e2 - a22) {
                e1
            } else {
                e2
            }
        };
        qr_sweep(&mut h, l, hi, mu);
    }
    Ok(eig)
}

fn qr_sweep<T: Real>(h: &mut Matrix<Complex<T>>, l: usize, hi: usize, mu: Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    for k in l..hi {
        let (x, y) = if k == l { (h[(l, l)] - mu, h[(l + 1, l)]) } else { (h[(k, k - 1)], h[(k + 1, k - 1)]) };
        let ax = cabs(x);
        let ay = cabs(y);
        let rho = cabs(Complex::new(ax, ay));
        let (c, s) = if rho == T::zero() {
            (T::one(), zero)
        } else if ax == T::zero() {
            (T::zero(), Complex::new(T::one(), T::zero()))
        } else {
            let c = ax / rho;
            let s = x * y.conj() / Complex::new(ax * rho, T::zero());
            (c, s)
        };
        let cc = Complex::new(c, T::zero());
        let j0 = if k == l { l } else { k - 1 };
        for j in j0..=hi {
            let t1 = h[(k, j)];
            let t2 = h[(k + 1, j)];
            h[(k, j)] = cc * t1 + s * t2;
            h[(k + 1, j)] = cc * t2 - s.conj() * t1;
        }
        let imax = (k + 2).min(hi);
        for i in l..=imax {
            let t1 = h[(i, k)];
            let t2 = h[(i, k + 1)];
            h[(i, k)] = cc * t1 + s.conj() * t2;
            h[(i, k + 1)] = cc * t2 - s * t1;
        }
        if k > l {
            h[(k + 1, k - 1)] = zero;
        }
    }
}

/// Spectrum of a pencil `(A, B)`: finite eigenvalues plus the count of
/// infinite ones.
#[derive(Clone, Debug)]
pub struct GeneralizedSpectrum {
    pub finite: Vec<C64>,
    pub infinite: usize,
}

/// Generalized eigenvalues of `A x = λ B x`.
///
/// The pencil is mapped to the standard problem `C = (A − σB)⁻¹B` with a
/// shift σ chosen for a well-conditioned LU. An eigenvalue μ of `C` gives
/// `λ = σ + 1/μ`; it is reported as infinite when
/// `|μ| < 1e3·u·‖C‖_F`, with `u` the unit roundoff of the chosen precision.
pub fn dense_eigenvalues(a: &CMatrix, b: &CMatrix, precision: Precision) -> Result<GeneralizedSpectrum> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::Dimension("pencil matrices must be square and of equal size".into()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("pencil entries".into()));
    }
    fn lowered<T: Real>((ev, infinite): (Vec<Complex<T>>, usize)) -> GeneralizedSpectrum {
        GeneralizedSpectrum { finite: ev.into_iter().map(lower).collect(), infinite }
    }
    match precision {
        Precision::Working => generalized::<f64>(a, b).map(lowered),
        Precision::Extended => generalized::<Dd>(a, b).map(lowered),
    }
}

/// Finite generalized eigenvalues in double-double, plus the infinite count.
pub fn dense_eigenvalues_dd(a: &CMatrix, b: &CMatrix) -> Result<(Vec<Cdd>, usize)> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::Dimension("pencil matrices must be square and of equal size".into()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("pencil entries".into()));
    }
    generalized::<Dd>(a, b)
}

fn generalized<T: Real>(a: &CMatrix, b: &CMatrix) -> Result<(Vec<Complex<T>>, usize)> {
    let n = a.rows();
    let ad: Matrix<Complex<T>> = a.map(lift);
    let bd: Matrix<Complex<T>> = b.map(lift);
    if *b == CMatrix::identity(n) {
        return Ok((eigenvalues(&ad)?, 0));
    }
    let an = a.norm_fro();
    let bn = b.norm_fro();
    if bn == 0.0 {
        return Ok((vec![], n));
    }
    let scale = if an > 0.0 { an / bn } else { 1.0 };
    let dirs = [
        C64::new(0.613_512_9, 0.389_571_3),
        C64::new(-0.271_828_2, 0.731_415_9),
        C64::new(0.447_213_6, -0.577_215_7),
        C64::new(1.414_213_6, 0.302_775_6),
        C64::new(-0.918_282_8, -0.236_067_9),
    ];
    let mut best: Option<(Lu<T>, C64)> = None;
    for d in dirs {
        let sigma = d * scale;
        let sig: Complex<T> = lift(sigma);
        let m = Matrix::from_fn(n, n, |i, j| ad[(i, j)] - sig * bd[(i, j)]);
        if let Ok(f) = lu(&m) {
            let better = match &best {
                None => true,
                Some((g, _)) => f.pivot_ratio() > g.pivot_ratio(),
            };
            if better {
                best = Some((f, sigma));
            }
        }
    }
    let (f, sigma) = best.ok_or_else(|| Error::Singular("pencil appears singular for every trial shift".into()))?;
    let c = f.solve(&bd)?;
    let cnorm = c.norm_fro();
    let mus = eigenvalues(&c)?;
    let tol = 1e3 * T::EPS * cnorm;
    let sig: Complex<T> = lift(sigma);
    let one = Complex::new(T::one(), T::zero());
    let mut finite = Vec::new();
    let mut infinite = 0;
    for mu in mus {
        if cabs(mu).to_f64() <= tol {
            infinite += 1;
        } else {
            finite.push(sig + one / mu);
        }
    }
    Ok((finite, infinite))
}

/// Unit vector `u` minimizing `‖A u‖₂` and the minimum singular value.
///
/// Householder QR reduces `A` to its triangular factor, then one-sided Jacobi
/// rotations orthogonalize the columns of `R`.
pub fn smallest_singular_vector(a: &CMatrix) -> Result<(Vec<C64>, f64)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::Dimension(format!("{m}x{n}: fewer rows than columns")));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    let r = qr_r(a);
    let (v, sv) = jacobi_svd_right(&r);
    let mut k = 0;
    for j in 1..n {
        if sv[j] < sv[k] {
            k = j;
        }
    }
    let mut u: Vec<C64> = (0..n).map(|i| v[(i, k)]).collect();
    let nrm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut u {
        *z /= nrm;
    }
    Ok((u, sv[k]))
}

/// Triangular factor of a Householder QR (n×n).
fn qr_r(a: &CMatrix) -> CMatrix {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    for k in 0..n {
        let alpha = (k..m).map(|i| w[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = w[(k, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<C64> = (k..m).map(|i| w[(i, k)]).collect();
        v[0] += phase * alpha;
        let vn2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        for j in k..n {
            let mut s = C64::new(0.0, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                s += vi.conj() * w[(k + idx, j)];
            }
            s *= 2.0 / vn2;
            for (idx, vi) in v.iter().enumerate() {
                w[(k + idx, j)] -= vi * s;
            }
        }
    }
    Matrix::from_fn(n, n, |i, j| if i <= j { w[(i, j)] } else { C64::new(0.0, 0.0) })
}

/// One-sided Jacobi: returns right singular vectors and singular values.
fn jacobi_svd_right(r: &CMatrix) -> (CMatrix, Vec<f64>) {
    let n = r.cols();
    let mut w = r.clone();
    let mut v = CMatrix::identity(n);
    let tol = f64::EPSILON * (n as f64);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..w.rows() {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g; // e^{iφ}
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let e = phase.conj();
                for mat in [&mut w, &mut v] {
                    for i in 0..mat.rows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)];
                        mat[(i, p)] = xp * c - xq * e * s;
                        mat[(i, q)] = xp * s + xq * e * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sv = (0..n).map(|j| (0..w.rows()).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    (v, sv)
}

/// Extreme eigenvalues of a real symmetric matrix (cyclic Jacobi).
pub fn symmetric_eigen_range(s: &RMatrix) -> Result<(f64, f64)> {
    if !s.is_square() {
        return Err(Error::Dimension("symmetric_eigen_range of a non-square matrix".into()));
    }
    if !s.is_finite() {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    let n = s.rows();
    let norm = s.data().iter().map(|x| x * x).sum::<f64>().sqrt();
    for i in 0..n {
        for j in 0..i {
            if (s[(i, j)] - s[(j, i)]).abs() > 1e-12 * norm {
                return Err(Error::Asymmetric(format!("entry ({i},{j})")));
            }
        }
    }
    let mut a = RMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off.sqrt() <= 1e-17 * norm.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Extreme eigenvalues of a Hermitian matrix via its real symmetric embedding
/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn hermitian_eigen_range(h: &CMatrix) -> Result<(f64, f64)> {
    if !h.is_square() {
        return Err(Error::Dimension("hermitian_eigen_range of a non-square matrix".into()));
    }
    let n = h.rows();
    let norm = h.norm_fro();
    for i in 0..n {
        for j in 0..=i {
            if (h[(i, j)] - h[(j, i)].conj()).norm() > 1e-12 * norm {
                return Err(Error::Asymmetric(format!("entry ({i},{j}) is not Hermitian")));
            }
        }
    }
    let big = RMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    symmetric_eigen_range(&big)
}

/// Matrix exponential by scaling and squaring of a Taylor polynomial,
/// evaluated in double-double and rounded.
pub fn matrix_exponential(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("matrix_exponential of a non-square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    let n = a.rows();
    let norm = a.norm_1();
    let mut s = 0i32;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scale = Dd::from_f64(2f64.powi(-s));
    let x: Matrix<Complex<Dd>> = a.map(|z| Complex::new(Dd::from_f64(z.re) * scale, Dd::from_f64(z.im) * scale));
    let mut result: Matrix<Complex<Dd>> = Matrix::identity(n);
    let mut term: Matrix<Complex<Dd>> = Matrix::identity(n);
    for k in 1..60 {
        term = (&term * &x).scale(Complex::new(Dd::ONE / Dd::from_f64(k as f64), Dd::ZERO));
        result = result.add(&term)?;
        if term.max_abs() < 1e-40 * result.max_abs() {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result.map(lower))
}

/// Roots of `c₀ + c₁z + … + c_d z^d` (coefficients in ascending order).
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    if coeffs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("polynomial coefficients".into()));
    }
    let deg = match coeffs.iter().rposition(|z| *z != C64::new(0.0, 0.0)) {
        Some(d) => d,
        None => return Err(Error::InvalidArgument("zero polynomial".into())),
    };
    if deg == 0 {
        return Ok(vec![]);
    }
    let c: Vec<Complex<Dd>> = coeffs[..=deg].iter().map(|&z| lift(z)).collect();
    Ok(roots_dd(&c)?.into_iter().map(lower).collect())
}

/// Roots of a polynomial with double-double coefficients (ascending order,
/// nonzero leading coefficient), via companion eigenvalues and Newton polish.
pub fn roots_dd(c: &[Complex<Dd>]) -> Result<Vec<Complex<Dd>>> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = c[deg];
    if lead.is_zero() {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let comp = Matrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -c[deg - 1 - j] / lead
        } else if i == j + 1 {
            Complex::new(Dd::ONE, Dd::ZERO)
        } else {
            Complex::new(Dd::ZERO, Dd::ZERO)
        }
    });
    let roots = eigenvalues(&comp)?;
    Ok(roots.into_iter().map(|r| newton_polish(c, r)).collect())
}

fn newton_polish<T: Real>(c: &[Complex<T>], mut z: Complex<T>) -> Complex<T> {
    for _ in 0..3 {
        let mut p = Complex::new(T::zero(), T::zero());
        let mut dp = p;
        for &ck in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + ck;
        }
        if dp.is_zero() {
            break;
        }
        let step = p / dp;
        let z_new = z - step;
        // keep the step only if it reduces the residual
        let mut pn = Complex::new(T::zero(), T::zero());
        for &ck in c.iter().rev() {
            pn = pn * z_new + ck;
        }
        if cabs(pn) < cabs(p) {
            z = z_new;
        } else {
            break;
        }
    }
    z
}

/// Evaluate a polynomial with ascending coefficients.
pub fn poly_eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
}
