//! Complex domains Ω, boundary discretizations and field-of-values bounds.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::{fmt17, hermitian_eigen_range, CMatrix, C64};

/// Default number of boundary points.
pub const DEFAULT_COUNT: usize = 1000;
/// Smallest admissible discretization.
pub const MIN_COUNT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// Closed disc `B(center, radius)`.
    Disc { center: C64, radius: f64 },
    /// The segment `[−length, 0]`.
    RealSegment { length: f64 },
    /// The segment `i[−half_length, half_length]`.
    ImagSegment { half_length: f64 },
    /// `[x_min, x_max] + i[y_min, y_max]`.
    Rectangle { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
}

/// Points on the boundary of a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    pub points: Vec<C64>,
    pub source: Domain,
}

impl Discretization {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::InvalidArgument(format!("{what} must be positive and finite, got {x}")))
    }
}

impl Domain {
    pub fn disc(center: f64, radius: f64) -> Result<Domain> {
        Domain::disc_c(C64::new(center, 0.0), radius)
    }

    pub fn disc_c(center: C64, radius: f64) -> Result<Domain> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::NonFinite("disc center".into()));
        }
        Ok(Domain::Disc { center, radius: positive(radius, "radius")? })
    }

    pub fn real_segment(length: f64) -> Result<Domain> {
        Ok(Domain::RealSegment { length: positive(length, "segment length")? })
    }

    pub fn imag_segment(half_length: f64) -> Result<Domain> {
        Ok(Domain::ImagSegment { half_length: positive(half_length, "segment half-length")? })
    }

    /// Rectangle; a side of zero length is widened to half-width
    /// `1e-8·(1 + |x_min|)` so the domain stays two-dimensional.
    pub fn rectangle(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Domain> {
        if ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("rectangle bounds".into()));
        }
        if x_min > x_max || y_min > y_max {
            return Err(Error::InvalidArgument("rectangle bounds are reversed".into()));
        }
        let floor = 1e-8 * (1.0 + x_min.abs());
        let (mut x_min, mut x_max, mut y_min, mut y_max) = (x_min, x_max, y_min, y_max);
        if y_max - y_min < 2.0 * floor {
            let mid = 0.5 * (y_min + y_max);
            let mid = if mid.abs() < floor { 0.0 } else { mid };
            y_min = mid - floor;
            y_max = mid + floor;
        }
        if x_max - x_min < 2.0 * floor {
            let mid = 0.5 * (x_min + x_max);
            x_min = mid - floor;
            x_max = mid + floor;
        }
        Ok(Domain::Rectangle { x_min, x_max, y_min, y_max })
    }

    /// Characteristic size used for relative tolerances.
    pub fn scale(&self) -> f64 {
        match *self {
            Domain::Disc { center, radius } => center.norm() + radius,
            Domain::RealSegment { length } => length,
            Domain::ImagSegment { half_length } => half_length,
            Domain::Rectangle { x_min, x_max, y_min, y_max } => {
                [x_min, x_max, y_min, y_max].iter().map(|v| v.abs()).fold(0.0, f64::max)
            }
        }
    }

    /// Whether the domain is symmetric about the real axis.
    pub fn is_axis_symmetric(&self) -> bool {
        match *self {
            Domain::Disc { center, .. } => center.im == 0.0,
            Domain::RealSegment { .. } | Domain::ImagSegment { .. } => true,
            Domain::Rectangle { y_min, y_max, .. } => y_min == -y_max,
        }
    }

    /// Distance from `z` to the closed domain (zero inside).
    pub fn distance(&self, z: C64) -> f64 {
        match *self {
            Domain::Disc { center, radius } => ((z - center).norm() - radius).max(0.0),
            Domain::RealSegment { length } => (z - C64::new(z.re.clamp(-length, 0.0), 0.0)).norm(),
            Domain::ImagSegment { half_length } => (z - C64::new(0.0, z.im.clamp(-half_length, half_length))).norm(),
            Domain::Rectangle { x_min, x_max, y_min, y_max } => {
                let dx = (x_min - z.re).max(z.re - x_max).max(0.0);
                let dy = (y_min - z.im).max(z.im - y_max).max(0.0);
                dx.hypot(dy)
            }
        }
    }

    /// Distance from `z` to the boundary.
    pub fn boundary_distance(&self, z: C64) -> f64 {
        match *self {
            Domain::Disc { center, radius } => ((z - center).norm() - radius).abs(),
            Domain::Rectangle { x_min, x_max, y_min, y_max } if self.distance(z) == 0.0 => {
                (z.re - x_min).min(x_max - z.re).min(z.im - y_min).min(y_max - z.im)
            }
            _ => self.distance(z),
        }
    }

    /// Whether `z` lies strictly outside the closed domain, with margin
    /// `1e-10·scale`.
    pub fn strictly_outside(&self, z: C64) -> bool {
        self.distance(z) > 1e-10 * self.scale().max(f64::MIN_POSITIVE)
    }

    /// Boundary points; see [`discretize`].
    pub fn discretize(&self, count: usize) -> Result<Discretization> {
        discretize(self, count)
    }

    pub fn to_json(&self) -> Value {
        match *self {
            Domain::Disc { center, radius } => json!({
                "kind": "disc", "center_re": fmt17(center.re), "center_im": fmt17(center.im), "radius": fmt17(radius)
            }),
            Domain::RealSegment { length } => json!({"kind": "real_segment", "length": fmt17(length)}),
            Domain::ImagSegment { half_length } => json!({"kind": "imag_segment", "half_length": fmt17(half_length)}),
            Domain::Rectangle { x_min, x_max, y_min, y_max } => json!({
                "kind": "rectangle", "x_min": fmt17(x_min), "x_max": fmt17(x_max),
                "y_min": fmt17(y_min), "y_max": fmt17(y_max)
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Domain> {
        let num = |key: &str| -> Result<f64> {
            let s = v.get(key).and_then(Value::as_str).ok_or_else(|| Error::Format(format!("domain field {key}")))?;
            s.parse::<f64>().map_err(|_| Error::Format(format!("domain field {key}: {s}")))
        };
        match v.get("kind").and_then(Value::as_str) {
            Some("disc") => Domain::disc_c(C64::new(num("center_re")?, num("center_im")?), num("radius")?),
            Some("real_segment") => Domain::real_segment(num("length")?),
            Some("imag_segment") => Domain::imag_segment(num("half_length")?),
            Some("rectangle") => Domain::rectangle(num("x_min")?, num("x_max")?, num("y_min")?, num("y_max")?),
            other => Err(Error::Format(format!("unknown domain kind {other:?}"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Domain::Disc { center, radius } if center.im == 0.0 => write!(f, "disc:{}:{}", center.re, radius),
            Domain::Disc { center, radius } => write!(f, "disc({center}, {radius})"),
            Domain::RealSegment { length } => write!(f, "rseg:{length}"),
            Domain::ImagSegment { half_length } => write!(f, "iseg:{half_length}"),
            Domain::Rectangle { x_min, x_max, y_min, y_max } => write!(f, "rect:{x_min}:{x_max}:{y_min}:{y_max}"),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;

    /// Grammar: `disc:c_re:R`, `rseg:L`, `iseg:r`, `rect:x0:x1:y0:y1`.
    fn from_str(s: &str) -> Result<Domain> {
        let parts: Vec<&str> = s.split(':').collect();
        let nums = |xs: &[&str]| -> Result<Vec<f64>> {
            xs.iter()
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number {x:?} in domain {s:?}"))))
                .collect()
        };
        match (parts[0], parts.len()) {
            ("disc", 3) => {
                let v = nums(&parts[1..])?;
                Domain::disc(v[0], v[1])
            }
            ("rseg", 2) => Domain::real_segment(nums(&parts[1..])?[0]),
            ("iseg", 2) => Domain::imag_segment(nums(&parts[1..])?[0]),
            ("rect", 5) => {
                let v = nums(&parts[1..])?;
                Domain::rectangle(v[0], v[1], v[2], v[3])
            }
            _ => Err(Error::InvalidArgument(format!(
                "domain {s:?} does not match disc:c:R, rseg:L, iseg:r or rect:x0:x1:y0:y1"
            ))),
        }
    }
}

/// Boundary discretization.
///
/// Discs use equispaced angles starting at the rightmost real point; an odd
/// count is raised by one so both real points are present. Segments use
/// equispaced points including the endpoints. Rectangles place the four
/// corners and equispaced interior points on each side, with the number of
/// points per side proportional to its length. Symmetric domains give
/// conjugate-closed point sets.
pub fn discretize(d: &Domain, count: usize) -> Result<Discretization> {
    if count < MIN_COUNT {
        return Err(Error::InvalidArgument(format!("discretization count {count} below minimum {MIN_COUNT}")));
    }
    let points = match *d {
        Domain::Disc { center, radius } => {
            let n = count + count % 2;
            let mut pts = vec![C64::new(0.0, 0.0); n];
            let half = n / 2;
            for (k, p) in pts.iter_mut().enumerate().take(half + 1) {
                let th = 2.0 * PI * k as f64 / n as f64;
                let off = if k == 0 {
                    C64::new(radius, 0.0)
                } else if k == half {
                    C64::new(-radius, 0.0)
                } else {
                    C64::new(radius * th.cos(), radius * th.sin())
                };
                *p = off;
            }
            for k in half + 1..n {
                pts[k] = pts[n - k].conj();
            }
            pts.into_iter().map(|p| p + center).collect()
        }
        Domain::RealSegment { length } => {
            let n = count;
            (0..n).map(|k| C64::new(if k + 1 == n { 0.0 } else { -length + length * k as f64 / (n - 1) as f64 }, 0.0)).collect()
        }
        Domain::ImagSegment { half_length } => {
            let n = count;
            (0..n)
                .map(|k| {
                    let num = 2.0 * k as f64 - (n - 1) as f64;
                    C64::new(0.0, half_length * num / (n - 1) as f64)
                })
                .collect()
        }
        Domain::Rectangle { x_min, x_max, y_min, y_max } => {
            let w = x_max - x_min;
            let h = y_max - y_min;
            let half = count / 2;
            let nh = ((half as f64 * w / (w + h)).round() as usize).clamp(1, half - 1);
            let nv = (half - nh).max(1);
            let xm = 0.5 * (x_min + x_max);
            let ym = 0.5 * (y_min + y_max);
            let xs = |j: usize| xm + 0.5 * w * ((2 * j) as f64 - nh as f64) / nh as f64;
            let ys = |k: usize| ym + 0.5 * h * ((2 * k) as f64 - nv as f64) / nv as f64;
            let mut pts = Vec::with_capacity(2 * (nh + nv));
            pts.push(C64::new(x_min, y_min));
            pts.extend((1..nh).map(|j| C64::new(xs(j), y_min)));
            pts.push(C64::new(x_max, y_min));
            pts.extend((1..nv).map(|k| C64::new(x_max, ys(k))));
            pts.push(C64::new(x_max, y_max));
            pts.extend((1..nh).rev().map(|j| C64::new(xs(j), y_max)));
            pts.push(C64::new(x_min, y_max));
            pts.extend((1..nv).rev().map(|k| C64::new(x_min, ys(k))));
            pts
        }
    };
    Ok(Discretization { points, source: *d })
}

/// Disc containing the field of values of any generator of size `d` with
/// uniformization rate `lambda`.
pub fn fov_circle_bound(d: usize, lambda: f64) -> Result<Domain> {
    if d < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let lambda = positive(lambda, "lambda")?;
    Domain::disc(-lambda, lambda * (d as f64).sqrt())
}

/// Smallest axis-parallel rectangle containing the field of values of every
/// generator of size `d` with uniformization rate `lambda`.
pub fn fov_rectangle_bound(d: usize, lambda: f64) -> Result<Domain> {
    if d < 2 {
        return Err(Error::InvalidArgument("fov_rectangle_bound needs d >= 2".into()));
    }
    let l = positive(lambda, "lambda")?;
    let (x0, x1, y) = match d {
        2 => (-2.0 * l, l * (2f64.sqrt() - 1.0) / 2.0, l / 2.0),
        3 => (-(1.0 + 5f64.sqrt() / 2.0) * l, l * (3f64.sqrt() - 1.0) / 2.0, 3f64.sqrt() / 2.0 * l),
        4 => (-(1.0 + 6f64.sqrt() / 2.0) * l, l / 2.0, l),
        _ => {
            let df = d as f64;
            let y = 2f64.sqrt() * l / 4.0 * (df + (df * df - 4.0 * df + 12.0).sqrt()).sqrt();
            (-(1.0 + (df + 2.0).sqrt() / 2.0) * l, l / 2.0 * (df.sqrt() - 1.0), y)
        }
    };
    Domain::rectangle(x0, x1, -y, y)
}

/// Rectangle `[λmin(X), λmax(X)] + i[λmin(Y), λmax(Y)]` with
/// `X = (A + A*)/2` and `Y = (A − A*)/(2i)`.
pub fn fov_hermitian_bound(a: &CMatrix) -> Result<Domain> {
    if !a.is_square() {
        return Err(Error::Dimension("fov_hermitian_bound needs a square matrix".into()));
    }
    let ah = a.conj_transpose();
    let x = a.add(&ah)?.scale(C64::new(0.5, 0.0));
    let y = a.sub(&ah)?.scale(C64::new(0.0, -0.5));
    let (x0, x1) = hermitian_eigen_range(&x)?;
    let (y0, y1) = hermitian_eigen_range(&y)?;
    // Y is Hermitian with a real-skew imaginary part for real A; its
    // spectrum is symmetric, keep the rectangle exactly symmetric then.
    let (y0, y1) = if a.data().iter().all(|z| z.im == 0.0) {
        let m = y1.max(-y0);
        (-m, m)
    } else {
        (y0, y1)
    };
    Domain::rectangle(x0, x1, y0, y1)
}

/// Problem classes for the domain selection policy.
#[derive(Clone, Debug)]
pub enum ProblemClass {
    FluidQueue { lambda: f64, t: f64 },
    /// Matrix exponential `exp(tQ)`; with `q` the Hermitian-part rectangle of
    /// `tQ` is used, otherwise the dimension-only rectangle.
    MatrixExponential { q: Option<CMatrix>, dim: usize, lambda: f64, t: f64 },
    LaplaceStieltjes { length: f64 },
    Generic { r: f64 },
}

/// Domain(s) recommended for a problem class. `Generic` yields three
/// candidates; every other class yields one.
pub fn select_domain(class: &ProblemClass) -> Result<Vec<Domain>> {
    match class {
        ProblemClass::FluidQueue { lambda, t } => {
            let r = positive(*lambda, "lambda")? * positive(*t, "t")?;
            Ok(vec![Domain::disc(-r, r)?])
        }
        ProblemClass::MatrixExponential { q, dim, lambda, t } => {
            let t = positive(*t, "t")?;
            match q {
                Some(q) => Ok(vec![fov_hermitian_bound(&q.scale(C64::new(t, 0.0)))?]),
                None => Ok(vec![fov_rectangle_bound(*dim, positive(*lambda, "lambda")? * t)?]),
            }
        }
        ProblemClass::LaplaceStieltjes { length } => Ok(vec![Domain::real_segment(*length)?]),
        ProblemClass::Generic { r } => {
            let r = positive(*r, "r")?;
            Ok(vec![Domain::disc(-r, r)?, Domain::real_segment(r)?, Domain::imag_segment(r)?])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn disc_quarter_points() {
        let d = Domain::disc(-1.0, 1.0).unwrap();
        // four points need the minimum count; check angles through a count-8 grid
        let z = discretize(&d, 8).unwrap().points;
        let expect = [C64::new(0.0, 0.0), C64::new(-1.0, 1.0), C64::new(-2.0, 0.0), C64::new(-1.0, -1.0)];
        for (k, e) in expect.iter().enumerate() {
            assert!(close(z[2 * k], *e), "{k}: {}", z[2 * k]);
        }
        assert!(discretize(&d, 4).is_err());
    }

    #[test]
    fn segments_include_endpoints() {
        let z = discretize(&Domain::real_segment(2.0).unwrap(), 9).unwrap().points;
        assert_eq!(z[0], C64::new(-2.0, 0.0));
        assert_eq!(z[4], C64::new(-1.0, 0.0));
        assert_eq!(z[8], C64::new(0.0, 0.0));
        let z = discretize(&Domain::imag_segment(1.0).unwrap(), 9).unwrap().points;
        assert_eq!(z[0], C64::new(0.0, -1.0));
        assert_eq!(z[4], C64::new(0.0, 0.0));
        assert_eq!(z[8], C64::new(0.0, 1.0));
    }

    #[test]
    fn circle_bound_examples() {
        assert_eq!(fov_circle_bound(2, 1.0).unwrap(), Domain::disc(-1.0, 2f64.sqrt()).unwrap());
        assert_eq!(fov_circle_bound(1, 1.0).unwrap(), Domain::disc(-1.0, 1.0).unwrap());
        if let Domain::Disc { radius, .. } = fov_circle_bound(15, 1.0).unwrap() {
            assert!((radius - 3.872_983_346_207_417).abs() < 1e-15);
        }
    }

    #[test]
    fn rectangle_bound_examples() {
        let r = fov_rectangle_bound(2, 1.0).unwrap();
        assert_eq!(r, Domain::Rectangle { x_min: -2.0, x_max: (2f64.sqrt() - 1.0) / 2.0, y_min: -0.5, y_max: 0.5 });
        let r = fov_rectangle_bound(4, 1.0).unwrap();
        assert_eq!(r, Domain::Rectangle { x_min: -(1.0 + 6f64.sqrt() / 2.0), x_max: 0.5, y_min: -1.0, y_max: 1.0 });
        if let Domain::Rectangle { x_min, x_max, y_max, .. } = fov_rectangle_bound(15, 1.0).unwrap() {
            assert!((x_min + 3.061_552_812_808_830).abs() < 1e-12);
            assert!((x_max - 1.436_491_673_103_708_5).abs() < 1e-12);
            assert!((y_max - 1.881_0).abs() < 1e-4);
        } else {
            panic!()
        }
        assert!(fov_rectangle_bound(1, 1.0).is_err());
    }

    #[test]
    fn hermitian_bound_degenerate_is_widened() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
        ])
        .unwrap();
        match fov_hermitian_bound(&a).unwrap() {
            Domain::Rectangle { x_min, x_max, y_min, y_max } => {
                assert!((x_min + 2.0).abs() < 1e-14 && x_max.abs() < 1e-14);
                assert!((y_max - 3e-8).abs() < 1e-20 && y_min == -y_max);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn selection_policy() {
        let d = select_domain(&ProblemClass::FluidQueue { lambda: 1.0, t: 100.0 }).unwrap();
        assert_eq!(d, vec![Domain::disc(-100.0, 100.0).unwrap()]);
        let d = select_domain(&ProblemClass::LaplaceStieltjes { length: 2.0 }).unwrap();
        assert_eq!(d, vec![Domain::real_segment(2.0).unwrap()]);
        assert_eq!(select_domain(&ProblemClass::Generic { r: 3.0 }).unwrap().len(), 3);
        assert!(select_domain(&ProblemClass::Generic { r: 0.0 }).is_err());
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["disc:-4:4", "rseg:100", "iseg:80", "rect:-3:1:-2:2"] {
            let d: Domain = s.parse().unwrap();
            let back: Domain = d.to_string().parse().unwrap();
            assert_eq!(d, back);
            assert_eq!(Domain::from_json(&d.to_json()).unwrap(), d);
        }
        assert!("circle:1".parse::<Domain>().is_err());
    }
}
