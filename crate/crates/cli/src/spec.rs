//! Flag grammars, errors and the experiment description.

use std::fmt;
use std::path::PathBuf;

use aw_core::methods::{euler_method, gaver_method, talbot_method, zakian_method, AwMethod};
use serde_json::json;

use crate::BenchArgs;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(aw_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use aw_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::InvalidArgument(_) | E::Format(_) | E::Schema(_) | E::Io(_)) => 2,
            CliError::Core(_) => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Usage(m) => json!({ "error": "usage", "message": m }),
            CliError::Core(e) => json!({ "error": e.kind(), "message": e.to_string() }),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<aw_core::Error> for CliError {
    fn from(e: aw_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| usage(format!("bad {what} {s:?}")))
}

/// `a:b:n`: n equispaced points from a to b inclusive.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("grid {s:?} is not a:b:n")));
    }
    let a: f64 = number(parts[0], "grid start")?;
    let b: f64 = number(parts[1], "grid end")?;
    let n: usize = number(parts[2], "grid size")?;
    match n {
        0 => Err(usage("empty grid")),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
    }
}

/// `lo:hi[:step]` inclusive range.
pub fn parse_range(s: &str) -> Result<(usize, usize, usize), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(usage(format!("range {s:?} is not lo:hi[:step]")));
    }
    let (lo, hi) = (number(parts[0], "range start")?, number(parts[1], "range end")?);
    let step = match parts.get(2) {
        Some(p) => number(p, "range step")?,
        None => 1,
    };
    if lo > hi || lo == 0 || step == 0 {
        return Err(usage(format!("range {s:?} is empty")));
    }
    Ok((lo, hi, step))
}

/// `i:j` or `all`.
pub fn parse_entry(s: &str) -> Result<Option<(usize, usize)>, CliError> {
    if s == "all" {
        return Ok(None);
    }
    let (i, j) = s.split_once(':').ok_or_else(|| usage(format!("entry {s:?} is not i:j or all")))?;
    Ok(Some((number(i, "row")?, number(j, "column")?)))
}

/// Classical generator by name.
pub fn classical(name: &str, n: usize) -> Result<AwMethod, CliError> {
    let m = match name {
        "euler" => euler_method(n),
        "talbot" => talbot_method(n),
        "gaver" => gaver_method(n),
        "zakian" => zakian_method(n),
        _ => return Err(usage(format!("unknown method {name:?}"))),
    };
    Ok(m?)
}

/// `name:N` or bare `name`.
pub fn parse_method_spec(s: &str) -> Result<(String, Option<usize>), CliError> {
    match s.split_once(':') {
        Some((name, n)) => Ok((name.to_string(), Some(number(n, "node count")?))),
        None => Ok((s.to_string(), None)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentId {
    A,
    B,
    C,
    D,
    E,
}

/// One benchmark run. Defaults reproduce the desk-scale setups:
///
/// * A: 15-state random fluid queue (`d₊ = 5`, `d₋ = 10`, `λ = 1`), `t = 1`,
///   `N′ = 1..25`, pdf and CDF error against Euler `N′ = 31`.
/// * B: same model, TAME on `disc(−r, r)` for `r ∈ {0.5, 1, 3, 10, 100}`
///   and `t ∈ {1, 3, 10, 30, 100}`, `N′ = 2..40` in steps of 2, plus the
///   preset for each `λt`.
/// * C: `exp(tQ)` for the same generator at `t = 1`, `N′ = 1..30`, TAME on
///   the three field-of-values domains and the presets.
/// * D: triangular and square waves on `t = k/100 ≤ 6`.
/// * E: call price `Q = 80`, `K = 100`, `R = 0.05`, `σ = 0.1` on
///   `t = k/4 ≤ 50`.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub seed: u64,
    pub nprime: (usize, usize),
    pub nprime_step: usize,
    pub methods: Option<Vec<String>>,
    pub ts: Vec<f64>,
    pub out: PathBuf,
    pub cme: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_args(a: BenchArgs) -> Result<Self, CliError> {
        let id = match a.id.to_ascii_uppercase().as_str() {
            "A" => ExperimentId::A,
            "B" => ExperimentId::B,
            "C" => ExperimentId::C,
            "D" => ExperimentId::D,
            "E" => ExperimentId::E,
            other => return Err(usage(format!("unknown experiment {other:?}; expected A to E"))),
        };
        let (lo, hi, nprime_step) = match &a.nprime {
            Some(s) => parse_range(s)?,
            None => match id {
                ExperimentId::A => (1, 25, 1),
                ExperimentId::B => (2, 40, 2),
                _ => (1, 30, 1),
            },
        };
        let ts = match &a.t_grid {
            Some(s) => parse_grid(s)?,
            None => match id {
                ExperimentId::A | ExperimentId::C => vec![1.0],
                ExperimentId::B => vec![1.0, 3.0, 10.0, 30.0, 100.0],
                ExperimentId::D => (1..=600).map(|k| k as f64 / 100.0).collect(),
                ExperimentId::E => (1..=200).map(|k| 50.0 * k as f64 / 200.0).collect(),
            },
        };
        if ts.iter().any(|t| !(*t > 0.0)) {
            return Err(usage("times must be positive"));
        }
        let methods = a.methods.map(|m| m.split(',').map(|s| s.trim().to_string()).collect());
        Ok(ExperimentSpec { id, seed: a.seed, nprime: (lo, hi), nprime_step, methods, ts, out: a.out, cme: a.cme })
    }

    pub fn wants(&self, method: &str) -> bool {
        self.methods.as_ref().map_or(true, |m| m.iter().any(|x| x == method))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("2:5:1").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert_eq!(parse_range("3:7").unwrap(), (3, 7, 1));
        assert_eq!(parse_range("2:40:2").unwrap(), (2, 40, 2));
        assert!(parse_range("7:3").is_err());
        assert_eq!(parse_entry("all").unwrap(), None);
        assert_eq!(parse_entry("1:2").unwrap(), Some((1, 2)));
        assert_eq!(parse_method_spec("talbot:20").unwrap(), ("talbot".into(), Some(20)));
    }
}
