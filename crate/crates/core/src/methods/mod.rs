//! Abate–Whitt methods: weights and nodes, reduced form, generators and
//! parameter files.
//!
//! A method approximates `f(t) ≈ Σ (wₙ/t)·F(βₙ/t)` where `F` is the Laplace
//! transform of `f`. In reduced form each conjugate pair `(w, β), (w̄, β̄)` is
//! stored once with weight `2w`, and the sum becomes `Σ Re((w′ₙ/t)·F(βₙ/t))`.

mod classical;
mod io;

pub use classical::{euler_method, gaver_method, talbot_method, zakian_method};
pub use io::{load_cme, load_method, method_from_json, method_to_json, save_method};

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::numerics::{C64, U};

/// Realness tolerance for scalars in reduced form.
pub fn is_real_scalar(z: C64) -> bool {
    z.im.abs() <= 1e2 * U * (1.0 + z.re.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AwMethod {
    name: String,
    weights: Vec<C64>,
    nodes: Vec<C64>,
    reduced: bool,
    paired: Vec<bool>,
}

/// Quality metadata attached to a method.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MethodMetadata {
    pub epsilon: Option<f64>,
    pub max_abs_weight: Option<f64>,
    pub eta: Option<f64>,
    pub domain: Option<Domain>,
}

impl MethodMetadata {
    pub fn new(epsilon: f64, max_abs_weight: f64, domain: Option<Domain>) -> Self {
        MethodMetadata {
            epsilon: Some(epsilon),
            max_abs_weight: Some(max_abs_weight),
            eta: Some(crate::diagnostics::eta_proxy(epsilon, max_abs_weight)),
            domain,
        }
    }
}

fn check_distinct(nodes: &[C64]) -> Result<()> {
    for i in 0..nodes.len() {
        for j in 0..i {
            if nodes[i] == nodes[j] {
                return Err(Error::DuplicateNodes(format!("node {} repeated", nodes[i])));
            }
        }
    }
    Ok(())
}

fn check_finite(v: &[C64], what: &str) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

impl AwMethod {
    /// Full-form method. Non-real pairs must appear with exact conjugates.
    pub fn full(name: impl Into<String>, weights: Vec<C64>, nodes: Vec<C64>) -> Result<Self> {
        if weights.len() != nodes.len() || nodes.is_empty() {
            return Err(Error::Dimension("weights and nodes must have equal positive length".into()));
        }
        check_finite(&weights, "weights")?;
        check_finite(&nodes, "nodes")?;
        check_distinct(&nodes)?;
        for (i, b) in nodes.iter().enumerate() {
            if b.im != 0.0 {
                let ok = nodes.iter().zip(&weights).any(|(c, w)| *c == b.conj() && *w == weights[i].conj());
                if !ok {
                    return Err(Error::MissingConjugate(format!("node {b}")));
                }
            }
        }
        let n = nodes.len();
        Ok(AwMethod { name: name.into(), weights, nodes, reduced: false, paired: vec![false; n] })
    }

    /// Reduced-form method.
    pub fn reduced(name: impl Into<String>, weights: Vec<C64>, nodes: Vec<C64>, paired: Vec<bool>) -> Result<Self> {
        if weights.len() != nodes.len() || nodes.len() != paired.len() || nodes.is_empty() {
            return Err(Error::Dimension("weights, nodes and pairing flags must have equal positive length".into()));
        }
        check_finite(&weights, "weights")?;
        check_finite(&nodes, "nodes")?;
        check_distinct(&nodes)?;
        for ((w, b), p) in weights.iter().zip(&nodes).zip(&paired) {
            if !p && !(is_real_scalar(*w) && is_real_scalar(*b)) {
                return Err(Error::InvalidArgument(format!("unpaired entry ({w}, {b}) is not real")));
            }
            if *p && is_real_scalar(*b) {
                return Err(Error::InvalidArgument(format!("paired entry has a real node {b}")));
            }
            if *p && nodes.iter().any(|c| *c == b.conj()) {
                return Err(Error::DuplicateNodes(format!("paired node {b} listed together with its conjugate")));
            }
        }
        Ok(AwMethod { name: name.into(), weights, nodes, reduced: true, paired })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn paired(&self) -> &[bool] {
        &self.paired
    }

    /// Number of stored pairs (N' in reduced form, N in full form).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of full-form terms N.
    pub fn full_len(&self) -> usize {
        if self.reduced {
            self.paired.iter().map(|&p| if p { 2 } else { 1 }).sum()
        } else {
            self.nodes.len()
        }
    }

    /// Number of reduced-form terms N' (transform evaluations for real f).
    pub fn reduced_len(&self) -> usize {
        if self.reduced {
            self.nodes.len()
        } else {
            self.nodes.iter().filter(|b| b.im >= 0.0 || is_real_scalar(**b)).count()
        }
    }

    /// Full-form `(w, β)` terms regardless of storage.
    pub fn full_terms(&self) -> Vec<(C64, C64)> {
        if !self.reduced {
            return self.weights.iter().copied().zip(self.nodes.iter().copied()).collect();
        }
        let mut out = Vec::with_capacity(self.full_len());
        for ((&w, &b), &p) in self.weights.iter().zip(&self.nodes).zip(&self.paired) {
            if p {
                out.push((w * 0.5, b));
                out.push((w.conj() * 0.5, b.conj()));
            } else {
                out.push((w, b));
            }
        }
        out
    }

    /// Largest full-form weight modulus.
    pub fn max_abs_weight(&self) -> f64 {
        self.full_terms().iter().map(|(w, _)| w.norm()).fold(0.0, f64::max)
    }

    /// Rational approximant `Σ wₙ/(βₙ − z)` of `eᶻ`.
    pub fn rational(&self, z: C64) -> C64 {
        self.full_terms().iter().map(|&(w, b)| w / (b - z)).sum()
    }

    /// Convert to reduced form.
    pub fn to_reduced(&self) -> Result<AwMethod> {
        if self.reduced {
            return Ok(self.clone());
        }
        let mut w = Vec::new();
        let mut b = Vec::new();
        let mut p = Vec::new();
        let mut used = vec![false; self.nodes.len()];
        for i in 0..self.nodes.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let (wi, bi) = (self.weights[i], self.nodes[i]);
            if is_real_scalar(bi) {
                if !is_real_scalar(wi) {
                    return Err(Error::InvalidArgument(format!("real node {bi} carries non-real weight {wi}")));
                }
                w.push(wi);
                b.push(bi);
                p.push(false);
                continue;
            }
            let j = (0..self.nodes.len())
                .find(|&j| !used[j] && self.nodes[j] == bi.conj())
                .ok_or_else(|| Error::MissingConjugate(format!("node {bi}")))?;
            used[j] = true;
            let (wk, bk) = if bi.im > 0.0 { (wi, bi) } else { (self.weights[j], self.nodes[j]) };
            w.push(wk * 2.0);
            b.push(bk);
            p.push(true);
        }
        AwMethod::reduced(self.name.clone(), w, b, p)
    }

    /// Convert to full form.
    pub fn to_full(&self) -> Result<AwMethod> {
        if !self.reduced {
            return Ok(self.clone());
        }
        let (w, b): (Vec<C64>, Vec<C64>) = self.full_terms().into_iter().unzip();
        AwMethod::full(self.name.clone(), w, b)
    }
}

/// Match conjugate partners and make them exact conjugates; nodes classified
/// as real get zero imaginary parts in both node and weight.
pub(crate) fn symmetrize(pairs: Vec<(C64, C64)>, real_tol: impl Fn(C64) -> bool) -> Result<Vec<(C64, C64)>> {
    let mut out = Vec::with_capacity(pairs.len());
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (w, b) in pairs {
        if real_tol(b) {
            out.push((C64::new(w.re, 0.0), C64::new(b.re, 0.0)));
        } else if b.im > 0.0 {
            upper.push((w, b));
        } else {
            lower.push((w, b));
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::MissingConjugate(format!("{} upper vs {} lower half-plane nodes", upper.len(), lower.len())));
    }
    for (w, b) in upper {
        let (k, _) = lower
            .iter()
            .enumerate()
            .map(|(k, (_, c))| (k, (c.conj() - b).norm()))
            .min_by(|a, c| a.1.total_cmp(&c.1))
            .ok_or_else(|| Error::MissingConjugate(format!("node {b}")))?;
        let (wl, bl) = lower.swap_remove(k);
        let bb = (b + bl.conj()) * 0.5;
        let ww = (w + wl.conj()) * 0.5;
        out.push((ww, bb));
        out.push((ww.conj(), bb.conj()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reduced_of_single_real_pair() {
        let m = AwMethod::full("t", vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let r = m.to_reduced().unwrap();
        assert_eq!(r.weights(), &[c(1.0, 0.0)]);
        assert_eq!(r.paired(), &[false]);
    }

    #[test]
    fn reduced_doubles_paired_weight() {
        let m = AwMethod::full("t", vec![c(1.0, 1.0), c(1.0, -1.0)], vec![c(2.0, 3.0), c(2.0, -3.0)]).unwrap();
        let r = m.to_reduced().unwrap();
        assert_eq!(r.weights(), &[c(2.0, 2.0)]);
        assert_eq!(r.nodes(), &[c(2.0, 3.0)]);
        assert_eq!(r.paired(), &[true]);
        let back = r.to_full().unwrap();
        assert_eq!(back.full_terms(), m.full_terms());
    }

    #[test]
    fn missing_conjugate_is_rejected() {
        assert!(matches!(
            AwMethod::full("t", vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]),
            Err(Error::MissingConjugate(_))
        ));
    }

    #[test]
    fn duplicate_nodes_rejected() {
        assert!(matches!(
            AwMethod::full("t", vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::DuplicateNodes(_))
        ));
    }
}
