//! JSON parameter files.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use super::{AwMethod, MethodMetadata};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::numerics::{fmt17, C64};

pub const SCHEMA_VERSION: u64 = 1;

fn scalar(z: C64) -> Value {
    json!({"re": fmt17(z.re), "im": fmt17(z.im)})
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| Value::String(fmt17(v)))
}

fn parse_f64(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::String(s) => s.trim().parse::<f64>().map_err(|_| Error::Format(format!("{what}: not a number: {s:?}"))),
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Format(format!("{what}: bad number"))),
        _ => Err(Error::Format(format!("{what}: expected a decimal string"))),
    }
}

fn parse_opt(v: Option<&Value>, what: &str) -> Result<Option<f64>> {
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(x) => parse_f64(x, what).map(Some),
    }
}

fn parse_scalars(v: &Value, what: &str) -> Result<Vec<C64>> {
    let arr = v.as_array().ok_or_else(|| Error::Format(format!("{what}: expected an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, z)| {
            let re = z.get("re").ok_or_else(|| Error::Format(format!("{what}[{i}].re missing")))?;
            let im = z.get("im").ok_or_else(|| Error::Format(format!("{what}[{i}].im missing")))?;
            Ok(C64::new(parse_f64(re, what)?, parse_f64(im, what)?))
        })
        .collect()
}

pub fn method_to_json(m: &AwMethod, meta: &MethodMetadata) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "name": m.name(),
        "reduced": m.is_reduced(),
        "nodes": m.nodes().iter().map(|&z| scalar(z)).collect::<Vec<_>>(),
        "weights": m.weights().iter().map(|&z| scalar(z)).collect::<Vec<_>>(),
        "paired": m.paired(),
        "metadata": {
            "epsilon": opt(meta.epsilon),
            "max_abs_weight": opt(meta.max_abs_weight),
            "eta": opt(meta.eta),
            "domain": meta.domain.map_or(Value::Null, |d| d.to_json()),
        }
    })
}

pub fn method_from_json(v: &Value) -> Result<(AwMethod, MethodMetadata)> {
    let schema = v.get("schema").and_then(Value::as_u64).ok_or_else(|| Error::Format("missing schema version".into()))?;
    if schema != SCHEMA_VERSION {
        return Err(Error::Schema(schema));
    }
    let name = v.get("name").and_then(Value::as_str).unwrap_or("unnamed").to_string();
    let reduced = v.get("reduced").and_then(Value::as_bool).ok_or_else(|| Error::Format("missing reduced flag".into()))?;
    let nodes = parse_scalars(v.get("nodes").unwrap_or(&Value::Null), "nodes")?;
    let weights = parse_scalars(v.get("weights").unwrap_or(&Value::Null), "weights")?;
    let m = if reduced {
        let paired = v
            .get("paired")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("missing paired flags".into()))?
            .iter()
            .map(|b| b.as_bool().ok_or_else(|| Error::Format("paired flags must be booleans".into())))
            .collect::<Result<Vec<bool>>>()?;
        AwMethod::reduced(name, weights, nodes, paired)?
    } else {
        AwMethod::full(name, weights, nodes)?
    };
    let md = v.get("metadata").cloned().unwrap_or(Value::Null);
    let domain = match md.get("domain") {
        None | Some(Value::Null) => None,
        Some(d) => Some(Domain::from_json(d)?),
    };
    let meta = MethodMetadata {
        epsilon: parse_opt(md.get("epsilon"), "epsilon")?,
        max_abs_weight: parse_opt(md.get("max_abs_weight"), "max_abs_weight")?,
        eta: parse_opt(md.get("eta"), "eta")?,
        domain,
    };
    Ok((m, meta))
}

pub fn save_method(path: impl AsRef<Path>, m: &AwMethod, meta: &MethodMetadata) -> Result<()> {
    let text = serde_json::to_string_pretty(&method_to_json(m, meta)).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_method(path: impl AsRef<Path>) -> Result<(AwMethod, MethodMetadata)> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    method_from_json(&v)
}

/// Load the CME entry with `n` terms from a JSON list in the format of the
/// public CME parameter dataset (`n, a, b, c, omega, mu1` per entry).
///
/// The result is in reduced form: `w′ = [c, a + ib]·μ₁`,
/// `β = [1, 1 + ikω]·μ₁`, `k = 1..n−1`.
pub fn load_cme(path: impl AsRef<Path>, n: usize) -> Result<AwMethod> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    let list = v.as_array().ok_or_else(|| Error::Format("CME file must hold a JSON array".into()))?;
    let entry = list
        .iter()
        .find(|e| e.get("n").and_then(Value::as_u64) == Some(n as u64))
        .ok_or_else(|| Error::InvalidArgument(format!("no CME entry with n = {n}")))?;
    let num = |k: &str| parse_f64(entry.get(k).unwrap_or(&Value::Null), k);
    let vec = |k: &str| -> Result<Vec<f64>> {
        entry
            .get(k)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format(format!("CME field {k}")))?
            .iter()
            .map(|x| parse_f64(x, k))
            .collect()
    };
    let (a, b) = (vec("a")?, vec("b")?);
    let (c, omega, mu1) = (num("c")?, num("omega")?, num("mu1")?);
    if a.len() != b.len() || a.len() + 1 != n {
        return Err(Error::Format(format!("CME entry n = {n} has {} a and {} b values", a.len(), b.len())));
    }
    let mut w = vec![C64::new(c * mu1, 0.0)];
    let mut nodes = vec![C64::new(mu1, 0.0)];
    let mut paired = vec![false];
    for (k, (&ak, &bk)) in a.iter().zip(&b).enumerate() {
        w.push(C64::new(ak, bk) * mu1);
        nodes.push(C64::new(1.0, (k + 1) as f64 * omega) * mu1);
        paired.push(true);
    }
    AwMethod::reduced(format!("cme({n})"), w, nodes, paired)
}
