//! Thin bindings from subcommands to the library.

use std::fs;
use std::path::Path;

use aw_core::catalog::parse_builtin;
use aw_core::diagnostics::{
    bound_fluid_cdf, bound_fluid_pdf, bound_ls, bound_me, bound_phase_type, bound_se, dirac_eval, dirac_l1_norm,
    epsilon_accuracy, eta_proxy, moments, nu2_tilde, ErrorBoundReport,
};
use aw_core::domains::{discretize, Domain, DEFAULT_COUNT};
use aw_core::invert::{invert as apply, invert_curve, invert_scalar, Transform};
use aw_core::methods::{load_cme, load_method, save_method, AwMethod, MethodMetadata};
use aw_core::numerics::{fmt17, RMatrix, C64};
use aw_core::queueing::{fluid_psi_transform, make_experiment_model, FluidQueueModel};
use aw_core::tame::{build_tame, build_tame_with, preset_file_name, preset_rows, preset_tame_with_metadata, TameOptions};
use rayon::prelude::*;

use crate::spec::{classical, parse_entry, parse_grid, parse_method_spec, usage, CliError};
use crate::{DiagArgs, FluidArgs, GenArgs, InvertArgs, ModelArgs, PresetArgs};

fn parse_domain(s: Option<&str>) -> Result<Option<Domain>, CliError> {
    Ok(s.map(str::parse::<Domain>).transpose()?)
}

/// Metadata with ε measured on `4·count` boundary points of `domain`.
pub fn measured(m: &AwMethod, domain: Option<&Domain>, count: usize) -> Result<MethodMetadata, CliError> {
    match domain {
        Some(d) => {
            let z = discretize(d, 4 * count)?;
            Ok(MethodMetadata::new(epsilon_accuracy(m, &z)?, m.max_abs_weight(), Some(d.clone())))
        }
        None => Ok(MethodMetadata { max_abs_weight: Some(m.max_abs_weight()), ..MethodMetadata::default() }),
    }
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let domain = parse_domain(a.domain.as_deref())?;
    let (m, meta) = match a.method.as_str() {
        "tame" => {
            let d = domain.ok_or_else(|| usage("--method tame needs --domain"))?;
            let b = build_tame_with(&d, a.nprime, TameOptions { tol: a.tol, count: a.count, prune: !a.no_prune })?;
            (b.method, b.metadata)
        }
        "cme" => {
            let path = a.cme_file.as_ref().ok_or_else(|| usage("--method cme needs --cme-file"))?;
            let m = load_cme(path, a.nprime)?;
            let meta = measured(&m, domain.as_ref(), a.count)?;
            (m, meta)
        }
        name => {
            let m = classical(name, a.nprime)?;
            let meta = measured(&m, domain.as_ref(), a.count)?;
            (m, meta)
        }
    };
    save_method(&a.out, &m, &meta)?;
    let eps = meta.epsilon.map(|e| format!(", epsilon {}", fmt17(e))).unwrap_or_default();
    println!("{}: {} with {} reduced terms{eps}", a.out.display(), m.name(), m.reduced_len());
    Ok(())
}

fn load(params: Option<&Path>, preset: Option<f64>) -> Result<(AwMethod, MethodMetadata), CliError> {
    match (params, preset) {
        (Some(p), _) => Ok(load_method(p)?),
        (None, Some(r)) => Ok(preset_tame_with_metadata(r)?),
        (None, None) => Err(usage("need --params or --preset")),
    }
}

pub fn invert(a: InvertArgs) -> Result<(), CliError> {
    let (m, _) = load(a.params.as_deref(), a.preset)?;
    let f = parse_builtin(&a.transform)?;
    if let Some(t) = a.t {
        let v = invert_scalar(&m, &f, t)?;
        if a.compare {
            let r = f.value(t)?;
            println!("value,reference,error");
            println!("{},{},{}", fmt17(v), fmt17(r), fmt17((v - r).abs()));
        } else {
            println!("{}", fmt17(v));
        }
        return Ok(());
    }
    let ts = parse_grid(a.t_grid.as_deref().unwrap_or_default())?;
    println!("{}", if a.compare { "t,value,reference,error" } else { "t,value" });
    let mut failed = None;
    for (t, v) in ts.iter().zip(invert_curve(&m, &f, &ts)) {
        let v = match v {
            Ok(v) => v.re().unwrap_or(f64::NAN),
            Err(e) => {
                failed.get_or_insert(e);
                f64::NAN
            }
        };
        if a.compare {
            let r = f.value(*t)?;
            println!("{},{},{},{}", fmt17(*t), fmt17(v), fmt17(r), fmt17((v - r).abs()));
        } else {
            println!("{},{}", fmt17(*t), fmt17(v));
        }
    }
    match failed {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn bound_rows(spec: &str, eps: f64, m: &AwMethod, eta: f64) -> Result<Vec<ErrorBoundReport>, CliError> {
    let (class, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = |n: usize| -> Result<Vec<f64>, CliError> {
        let v: Vec<f64> = args
            .split(':')
            .filter(|s| !s.is_empty())
            .map(|s| s.trim().parse().map_err(|_| usage(format!("bad number {s:?} in --bounds {spec:?}"))))
            .collect::<Result<_, _>>()?;
        if v.len() != n {
            return Err(usage(format!("--bounds {class} takes {n} numbers, got {}", v.len())));
        }
        Ok(v)
    };
    let rows = match class {
        "se" => {
            let cs = args
                .split(';')
                .map(|s| s.trim().parse::<C64>().map_err(|_| usage(format!("bad coefficient {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            vec![bound_se(eps, &cs)?]
        }
        "me" => {
            let v = nums(2)?;
            vec![bound_me(eps, v[0], v[1])?]
        }
        "phase_type" => {
            let v = nums(3)?;
            let (p, a, b) = bound_phase_type(eps, v[0], v[1] as usize, v[2])?;
            vec![p, a, b]
        }
        "fluid_pdf" => {
            let v = nums(2)?;
            vec![bound_fluid_pdf(eps, v[0], v[1])?]
        }
        "fluid_cdf" => {
            let v = nums(3)?;
            vec![bound_fluid_cdf(eps, v[0], v[1], v[2])?]
        }
        "ls" => {
            let v = nums(1)?;
            vec![bound_ls(eps, eta, v[0], dirac_l1_norm(m)?.value)?]
        }
        _ => return Err(usage(format!("unknown bound class {class:?}"))),
    };
    Ok(rows)
}

pub fn diag(a: DiagArgs) -> Result<(), CliError> {
    let (m, meta) = load_method(&a.params)?;
    let domain = parse_domain(a.domain.as_deref())?;
    let meta = match domain {
        Some(d) => measured(&m, Some(&d), a.count)?,
        None => meta,
    };
    println!("quantity,value");
    println!("method,{}", m.name());
    println!("nprime,{}", m.reduced_len());
    println!("n,{}", m.full_len());
    println!("max_abs_weight,{}", fmt17(m.max_abs_weight()));
    if let Some(e) = meta.epsilon {
        println!("epsilon,{}", fmt17(e));
        println!("eta,{}", fmt17(eta_proxy(e, m.max_abs_weight())));
    }
    if a.moments {
        let ms = moments(&m)?;
        for (k, v) in [("mu0", ms.mu0), ("mu1", ms.mu1), ("mu2", ms.mu2), ("nu2", ms.nu2)] {
            println!("{k},{}", fmt17(v));
        }
        println!("nu2_tilde,{}", fmt17(nu2_tilde(&m)?.value));
        if let Some(s) = ms.scv {
            println!("scv,{}", fmt17(s));
        }
    }
    if let Some(g) = &a.dirac_grid {
        for y in parse_grid(g)? {
            println!("dirac:{},{}", fmt17(y), fmt17(dirac_eval(&m, y)?));
        }
    }
    if !a.bounds.is_empty() {
        let eps = meta.epsilon.ok_or_else(|| usage("--bounds needs ε: pass --domain or a file with an epsilon"))?;
        let eta = eta_proxy(eps, m.max_abs_weight());
        for b in &a.bounds {
            for r in bound_rows(b, eps, &m, eta)? {
                println!("bound:{},{}", r.class, fmt17(r.value));
            }
        }
    }
    Ok(())
}

fn load_model(a: &FluidArgs) -> Result<FluidQueueModel, CliError> {
    if let Some(p) = &a.model {
        let text = fs::read_to_string(p)?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| aw_core::Error::Format(e.to_string()))?;
        return Ok(FluidQueueModel::from_json(&v)?);
    }
    let spec = a.random.as_deref().unwrap_or_default();
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("--random {spec:?} is not d_plus:d_minus:seed"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let dp = parts[0].parse().map_err(|_| bad())?;
    let dm = parts[1].parse().map_err(|_| bad())?;
    let seed = parts[2].parse().map_err(|_| bad())?;
    Ok(make_experiment_model(dp, dm, seed)?)
}

/// Method for `λt` from `tame`, `tame:N` or a classical `name:N`, with ε
/// on `disc(−λt, λt)` when known.
pub fn fluid_method(spec: &str, r: f64) -> Result<(AwMethod, Option<f64>), CliError> {
    match parse_method_spec(spec)? {
        (name, None) if name == "tame" => {
            let (m, meta) = preset_tame_with_metadata(r)?;
            Ok((m, meta.epsilon))
        }
        (name, Some(n)) if name == "tame" => {
            let b = build_tame(&Domain::disc(-r, r)?, n, 0.0, DEFAULT_COUNT)?;
            Ok((b.method, b.metadata.epsilon))
        }
        (name, Some(n)) => Ok((classical(&name, n)?, None)),
        (name, None) => Err(usage(format!("method {name:?} needs a node count, e.g. {name}:20"))),
    }
}

pub fn fluid(a: FluidArgs) -> Result<(), CliError> {
    let model = load_model(&a)?;
    if !(a.t > 0.0) {
        return Err(usage("--t must be positive"));
    }
    let lambda = model.lambda();
    let (m, eps) = fluid_method(&a.method, lambda * a.t)?;
    let (pdf, cdf) = fluid_psi_transform(&model);
    let f: &dyn Transform = match a.quantity.as_str() {
        "psi" => &pdf,
        "Psi" => &cdf,
        q => return Err(usage(format!("--quantity must be psi or Psi, got {q:?}"))),
    };
    let v = apply(&m, f, a.t)?;
    let v = v.as_matrix().ok_or_else(|| usage("fluid transform returned a scalar"))?.re();
    let bounds: Option<RMatrix> = match (a.bound, eps) {
        (false, _) => None,
        (true, None) => return Err(usage("--bound needs a TAME method")),
        (true, Some(eps)) => {
            let inf = model.psi_infinity()?;
            let mean = model.first_moment()?;
            let mut b = RMatrix::zeros(v.rows(), v.cols());
            for i in 0..v.rows() {
                for j in 0..v.cols() {
                    b[(i, j)] = match a.quantity.as_str() {
                        "psi" => bound_fluid_pdf(eps, lambda, inf[(i, j)])?.value,
                        _ => bound_fluid_cdf(eps, lambda, inf[(i, j)], mean[(i, j)])?.value,
                    };
                }
            }
            Some(b)
        }
    };
    let cells: Vec<(usize, usize)> = match parse_entry(&a.entry)? {
        Some((i, j)) if i < v.rows() && j < v.cols() => vec![(i, j)],
        Some((i, j)) => return Err(usage(format!("entry {i}:{j} outside the {}x{} result", v.rows(), v.cols()))),
        None => (0..v.rows()).flat_map(|i| (0..v.cols()).map(move |j| (i, j))).collect(),
    };
    if cells.len() == 1 && bounds.is_none() {
        println!("{}", fmt17(v[cells[0]]));
        return Ok(());
    }
    println!("{}", if bounds.is_some() { "i,j,value,bound" } else { "i,j,value" });
    for (i, j) in cells {
        match &bounds {
            Some(b) => println!("{i},{j},{},{}", fmt17(v[(i, j)]), fmt17(b[(i, j)])),
            None => println!("{i},{j},{}", fmt17(v[(i, j)])),
        }
    }
    Ok(())
}

pub fn model(a: ModelArgs) -> Result<(), CliError> {
    let m = make_experiment_model(a.d_plus, a.d_minus, a.seed)?;
    let text = serde_json::to_string_pretty(&m.to_json()).map_err(|e| aw_core::Error::Format(e.to_string()))?;
    fs::write(&a.out, text + "\n")?;
    println!("{}: {} phases, lambda {}", a.out.display(), m.rates().len(), fmt17(m.lambda()));
    Ok(())
}

pub fn presets(a: PresetArgs) -> Result<(), CliError> {
    fs::create_dir_all(&a.out)?;
    let built: Vec<_> = preset_rows()
        .par_iter()
        .map(|row| {
            let b = build_tame(&Domain::disc(-row.radius, row.radius)?, row.n_reduced, 0.0, a.count)?;
            save_method(a.out.join(preset_file_name(row.n_reduced)), &b.method, &b.metadata)?;
            Ok((row, b.metadata))
        })
        .collect::<Result<_, aw_core::Error>>()?;
    println!("nprime,radius,epsilon,max_abs_weight,eta");
    for (row, meta) in built {
        let f = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        println!("{},{},{},{},{}", row.n_reduced, row.radius, f(meta.epsilon), f(meta.max_abs_weight), f(meta.eta));
    }
    Ok(())
}
