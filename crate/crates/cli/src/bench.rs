//! Experiments A–E.

use std::fs;
use std::path::Path;

use aw_core::catalog::CatalogEntry;
use aw_core::diagnostics::{bound_fluid_cdf, bound_fluid_pdf, bound_me, epsilon_accuracy, moment_error_estimate};
use aw_core::domains::{discretize, fov_circle_bound, fov_hermitian_bound, fov_rectangle_bound, Discretization, Domain, DEFAULT_COUNT};
use aw_core::invert::{invert, invert_curve, MatrixTransform, Transform};
use aw_core::methods::{euler_method, gaver_method, load_cme, talbot_method, zakian_method, AwMethod};
use aw_core::numerics::{fmt17, hermitian_eigen_range, inverse, matrix_exponential, CMatrix, C64};
use aw_core::queueing::{fluid_psi_transform, make_experiment_model};
use aw_core::tame::{build_tame, preset_rows, preset_tame};
use rayon::prelude::*;

use crate::spec::{CliError, ExperimentId, ExperimentSpec};

const FLUID_PLUS: usize = 5;
const FLUID_MINUS: usize = 10;
const B_RADII: [f64; 5] = [0.5, 1.0, 3.0, 10.0, 100.0];

fn write_csv(dir: &Path, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
    let path = dir.join(name);
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(&path, text)?;
    println!("{}: {} rows", path.display(), rows.len());
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn matrix_result(m: &AwMethod, f: &dyn Transform, t: f64) -> aw_core::Result<CMatrix> {
    let v = invert(m, f, t)?;
    let v = v.as_matrix().ok_or_else(|| aw_core::Error::Dimension("expected a matrix transform".into()))?;
    Ok(CMatrix::from_real(&v.re()))
}

/// Method families swept by N′ in A and C.
#[derive(Clone, Debug)]
enum Family {
    Classical(&'static str),
    Cme,
    Tame { label: String, domain: Domain },
}

impl Family {
    fn label(&self) -> &str {
        match self {
            Family::Classical(n) => n,
            Family::Cme => "cme",
            Family::Tame { label, .. } => label,
        }
    }

    fn build(&self, n: usize, spec: &ExperimentSpec) -> Option<aw_core::Result<AwMethod>> {
        match self {
            Family::Classical("euler") => (n >= 3 && n % 2 == 1).then(|| euler_method(n)),
            Family::Classical("gaver") => (n % 2 == 0).then(|| gaver_method(n)),
            Family::Classical("talbot") => (n >= 2).then(|| talbot_method(n)),
            Family::Classical(_) => Some(zakian_method(n)),
            Family::Cme => spec.cme.as_ref().map(|p| load_cme(p, n)),
            Family::Tame { domain, .. } => Some(build_tame(domain, n, 0.0, DEFAULT_COUNT).map(|b| b.method)),
        }
    }
}

fn families(spec: &ExperimentSpec, tame: Vec<(String, Domain)>) -> Vec<Family> {
    let mut out: Vec<Family> =
        ["euler", "gaver", "talbot", "zakian"].into_iter().map(Family::Classical).collect();
    if spec.cme.is_some() {
        out.push(Family::Cme);
    }
    out.extend(tame.into_iter().map(|(label, domain)| Family::Tame { label, domain }));
    out.retain(|f| spec.wants(f.label()));
    out
}

/// Every `(family, N′)` cell with its method, built in parallel. Cells that
/// fail to build are reported and dropped.
fn sweep(spec: &ExperimentSpec, fams: &[Family]) -> Vec<(String, AwMethod)> {
    let cells: Vec<(&Family, usize)> =
        fams.iter().flat_map(|f| (spec.nprime.0..=spec.nprime.1).step_by(spec.nprime_step).map(move |n| (f, n))).collect();
    let built: Vec<Option<(String, AwMethod)>> = cells
        .par_iter()
        .map(|&(f, n)| match f.build(n, spec)? {
            Ok(m) => Some((f.label().to_string(), m)),
            Err(e) => {
                eprintln!("notice: {} N'={n} skipped: {e}", f.label());
                None
            }
        })
        .collect();
    built.into_iter().flatten().collect()
}

fn measured_eps(m: &AwMethod, z: &Discretization) -> Option<f64> {
    epsilon_accuracy(m, z).ok().filter(|e| e.is_finite())
}

fn experiment_a(spec: &ExperimentSpec) -> Result<(), CliError> {
    let model = make_experiment_model(FLUID_PLUS, FLUID_MINUS, spec.seed)?;
    let lambda = model.lambda();
    let t = spec.ts[0];
    let (pdf, cdf) = fluid_psi_transform(&model);
    let reference = euler_method(31)?;
    let ref_pdf = matrix_result(&reference, &pdf, t)?;
    let ref_cdf = matrix_result(&reference, &cdf, t)?;
    let inf = CMatrix::from_real(&model.psi_infinity()?).norm_inf();
    let mean = CMatrix::from_real(&model.first_moment()?).norm_inf();
    let omega = Domain::disc(-lambda * t, lambda * t)?;
    let z = discretize(&omega, 4 * DEFAULT_COUNT)?;
    let fams = families(spec, vec![("tame".into(), omega)]);
    let methods = sweep(spec, &fams);
    let rows: Vec<Option<(String, String)>> = methods
        .par_iter()
        .map(|(label, m)| {
            let eps = measured_eps(m, &z);
            let e_pdf = matrix_result(m, &pdf, t).and_then(|v| Ok(v.sub(&ref_pdf)?.norm_inf()));
            let e_cdf = matrix_result(m, &cdf, t).and_then(|v| Ok(v.sub(&ref_cdf)?.norm_inf()));
            let (e_pdf, e_cdf) = match (e_pdf, e_cdf) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("notice: {label} N'={} skipped: {e}", m.reduced_len());
                    return None;
                }
            };
            let b_pdf = eps.and_then(|e| bound_fluid_pdf(e, lambda, inf).ok()).map(|r| r.value);
            let b_cdf = eps.and_then(|e| bound_fluid_cdf(e, lambda, inf, mean).ok()).map(|r| r.value);
            let est = moment_error_estimate(m, ref_cdf.norm_inf(), ref_pdf.norm_inf(), t).ok();
            let head = format!("{label},{},{}", m.reduced_len(), m.full_len());
            Some((
                format!("{head},{},{},", fmt17(e_pdf), opt(b_pdf)),
                format!("{head},{},{},{}", fmt17(e_cdf), opt(b_cdf), opt(est)),
            ))
        })
        .collect();
    let (pdf_rows, cdf_rows): (Vec<String>, Vec<String>) = rows.into_iter().flatten().unzip();
    let header = "method,nprime,n,error,bound,estimate";
    write_csv(&spec.out, "expA_pdf.csv", header, &pdf_rows)?;
    write_csv(&spec.out, "expA_cdf.csv", header, &cdf_rows)
}

fn experiment_b(spec: &ExperimentSpec) -> Result<(), CliError> {
    let model = make_experiment_model(FLUID_PLUS, FLUID_MINUS, spec.seed)?;
    let lambda = model.lambda();
    let (pdf, _) = fluid_psi_transform(&model);
    let reference = euler_method(31)?;
    let refs = spec.ts.iter().map(|&t| matrix_result(&reference, &pdf, t)).collect::<aw_core::Result<Vec<_>>>()?;
    let mut cells: Vec<(f64, AwMethod)> = Vec::new();
    if spec.wants("tame") {
        let grid: Vec<(f64, usize)> = B_RADII
            .iter()
            .flat_map(|&r| (spec.nprime.0..=spec.nprime.1).step_by(spec.nprime_step).map(move |n| (r, n)))
            .collect();
        let built: Vec<Option<(f64, AwMethod)>> = grid
            .par_iter()
            .map(|&(r, n)| match Domain::disc(-r, r).and_then(|d| build_tame(&d, n, 0.0, DEFAULT_COUNT)) {
                Ok(b) => Some((r, b.method)),
                Err(e) => {
                    eprintln!("notice: tame r={r} N'={n} skipped: {e}");
                    None
                }
            })
            .collect();
        cells.extend(built.into_iter().flatten());
    }
    let jobs: Vec<(&(f64, AwMethod), (f64, &CMatrix))> =
        cells.iter().flat_map(|c| spec.ts.iter().copied().zip(&refs).map(move |tw| (c, tw))).collect();
    let mut rows: Vec<String> = jobs
        .par_iter()
        .map(|&((r, m), (t, want))| match matrix_result(m, &pdf, t).and_then(|v| Ok(v.sub(want)?.norm_inf())) {
            Ok(e) => format!("tame,{r},{t},{},{}", m.reduced_len(), fmt17(e)),
            Err(e) => {
                eprintln!("notice: tame r={r} N'={} t={t} failed, error written as NaN: {e}", m.reduced_len());
                format!("tame,{r},{t},{},NaN", m.reduced_len())
            }
        })
        .collect();
    if spec.wants("tame_preset") {
        for (&t, want) in spec.ts.iter().zip(&refs) {
            let r = lambda * t;
            let Some(row) = preset_rows().iter().find(|row| row.radius >= r) else {
                eprintln!("notice: no preset covers r = {r}; tame_preset row omitted at t = {t}");
                continue;
            };
            let m = preset_tame(r)?;
            let e = matrix_result(&m, &pdf, t)?.sub(want)?.norm_inf();
            rows.push(format!("tame_preset,{},{t},{},{}", row.radius, m.reduced_len(), fmt17(e)));
        }
    }
    write_csv(&spec.out, "expB.csv", "method,r,t,nprime,error", &rows)
}

fn experiment_c(spec: &ExperimentSpec) -> Result<(), CliError> {
    let model = make_experiment_model(FLUID_PLUS, FLUID_MINUS, spec.seed)?;
    let lambda = model.lambda();
    let q = CMatrix::from_real(model.generator().matrix());
    let d = q.rows();
    let t = spec.ts[0];
    let tq = q.scale(C64::new(t, 0.0));
    let qc = q.clone();
    let f = MatrixTransform::new(move |s: C64| inverse(&CMatrix::identity(d).scale(s).sub(&qc)?)).symmetric();
    let exact = matrix_exponential(&tq)?;
    let slope = q.matmul(&exact)?.norm_inf();
    let small = fov_hermitian_bound(&tq)?;
    let z = discretize(&small, 4 * DEFAULT_COUNT)?;
    let tame = vec![
        ("tame_circle".to_string(), fov_circle_bound(d, lambda * t)?),
        ("tame_rect_large".to_string(), fov_rectangle_bound(d, lambda * t)?),
        ("tame_rect_small".to_string(), small),
    ];
    let fams = families(spec, tame);
    let mut methods = sweep(spec, &fams);
    if spec.wants("tame_preset") {
        for row in preset_rows() {
            if (spec.nprime.0..=spec.nprime.1).contains(&row.n_reduced) {
                methods.push(("tame_preset".into(), preset_tame(row.radius)?));
            }
        }
    }
    let rows: Vec<Option<String>> = methods
        .par_iter()
        .map(|(label, m)| {
            let diff = match matrix_result(m, &f, t).and_then(|v| v.sub(&exact)) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("notice: {label} N'={} skipped: {e}", m.reduced_len());
                    return None;
                }
            };
            let e2 = hermitian_eigen_range(&diff.conj_transpose().matmul(&diff).ok()?).ok().map(|(_, hi)| hi.max(0.0).sqrt());
            let bound = measured_eps(m, &z).and_then(|e| bound_me(e, 1.0, 1.0).ok()).map(|r| r.value);
            let est = moment_error_estimate(m, exact.norm_inf(), slope, t).ok();
            Some(format!(
                "{label},{},{},{},{},{},{}",
                m.reduced_len(),
                m.full_len(),
                fmt17(diff.norm_inf()),
                opt(bound),
                opt(est),
                opt(e2)
            ))
        })
        .collect();
    let rows: Vec<String> = rows.into_iter().flatten().collect();
    write_csv(&spec.out, "expC.csv", "method,nprime,n,error,bound,estimate,error_2", &rows)
}

/// Labelled methods for the curve experiments D and E.
fn curve_methods(spec: &ExperimentSpec, tame: &[(&str, Domain, usize)]) -> Result<Vec<(String, AwMethod)>, CliError> {
    let mut out: Vec<(String, AwMethod)> = vec![
        ("euler33".into(), euler_method(33)?),
        ("talbot20".into(), talbot_method(20)?),
        ("gaver16".into(), gaver_method(16)?),
        ("zakian4".into(), zakian_method(4)?),
    ];
    if let Some(p) = &spec.cme {
        out.push(("cme20".into(), load_cme(p, 20)?));
    }
    let built = tame
        .par_iter()
        .map(|(label, d, n)| build_tame(d, *n, 0.0, DEFAULT_COUNT).map(|b| (label.to_string(), b.method)))
        .collect::<aw_core::Result<Vec<_>>>()?;
    out.extend(built);
    let base = |l: &str| l.trim_end_matches(|c: char| c.is_ascii_digit()).to_string();
    out.retain(|(l, _)| spec.wants(l) || spec.wants(&base(l)));
    Ok(out)
}

fn curve(spec: &ExperimentSpec, file: &str, f: &CatalogEntry, m: &AwMethod) -> Result<(), CliError> {
    let values = invert_curve(m, f, &spec.ts);
    let (mut failed, mut undefined) = (0usize, 0usize);
    let mut rows = Vec::with_capacity(spec.ts.len());
    for (&t, v) in spec.ts.iter().zip(values) {
        let v = v.ok().and_then(|v| v.re()).unwrap_or_else(|| {
            failed += 1;
            f64::NAN
        });
        // the closed form is refused at jumps and kinks
        let r = f.value(t).unwrap_or_else(|_| {
            undefined += 1;
            f64::NAN
        });
        rows.push(format!("{},{},{},{}", fmt17(t), fmt17(v), fmt17(r), fmt17((v - r).abs())));
    }
    if failed > 0 {
        eprintln!("notice: {file}: {failed} points failed and are written as NaN");
    }
    if undefined > 0 {
        eprintln!("notice: {file}: no reference at {undefined} non-smooth points");
    }
    write_csv(&spec.out, file, "t,value,reference,error", &rows)
}

fn experiment_d(spec: &ExperimentSpec) -> Result<(), CliError> {
    let methods = curve_methods(spec, &[("tame20", Domain::imag_segment(80.0)?, 20)])?;
    for (wave, f) in [("triangular", CatalogEntry::triangular_wave()), ("square", CatalogEntry::square_wave())] {
        for (label, m) in &methods {
            curve(spec, &format!("expD_{wave}_{label}.csv"), &f, m)?;
        }
    }
    Ok(())
}

fn experiment_e(spec: &ExperimentSpec) -> Result<(), CliError> {
    let tame = [("tame33", Domain::real_segment(100.0)?, 33), ("tame12", Domain::real_segment(50.0)?, 12)];
    let methods = curve_methods(spec, &tame)?;
    let f = CatalogEntry::bs_call(80.0, 100.0, 0.05, 0.1)?;
    for (label, m) in &methods {
        curve(spec, &format!("expE_{label}.csv"), &f, m)?;
    }
    Ok(())
}

pub fn run(spec: ExperimentSpec) -> Result<(), CliError> {
    fs::create_dir_all(&spec.out)?;
    if spec.cme.is_none() && spec.id != ExperimentId::B && spec.wants("cme") {
        eprintln!("notice: no CME parameter file given (--cme); CME rows omitted");
    }
    match spec.id {
        ExperimentId::A => experiment_a(&spec),
        ExperimentId::B => experiment_b(&spec),
        ExperimentId::C => experiment_c(&spec),
        ExperimentId::D => experiment_d(&spec),
        ExperimentId::E => experiment_e(&spec),
    }
}
