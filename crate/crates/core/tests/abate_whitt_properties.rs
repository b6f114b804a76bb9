//! Properties of the linear algebra kernels, the classical generators, the
//! inversion sum, the diagnostics and the fluid-queue transforms.

use aw_core::catalog::{entry, CatalogEntry, NAMES};
use aw_core::diagnostics::{bound_phase_type, bound_se, moments, nu2_tilde, quadrature_moments};
use aw_core::invert::{check_symmetry, invert, invert_scalar, ScalarTransform, Transform};
use aw_core::methods::{euler_method, gaver_method, talbot_method, zakian_method, AwMethod};
use aw_core::numerics::{
    dense_eigenvalues, inverse, matrix_exponential, smallest_singular_vector, CMatrix, Precision, RMatrix, C64, U,
};
use aw_core::queueing::{
    fluid_psi_transform, make_experiment_model, phase_type_ground_truth, phase_type_transform, FluidQueueModel,
    PhaseType,
};
use aw_core::tame::{preset_tame, preset_tame_with_metadata};
use aw_core::diagnostics::bound_fluid_cdf;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0xab47e), failure_persistence: None, ..ProptestConfig::default() }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
}

fn cmatrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), rows * cols).prop_map(move |v| CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

fn sized_matrix() -> impl Strategy<Value = CMatrix> {
    (1usize..=8).prop_flat_map(|n| (n..=n + 4).prop_flat_map(move |m| cmatrix(m, n)))
}

fn square(max: usize) -> impl Strategy<Value = CMatrix> {
    (1usize..=max).prop_flat_map(|n| cmatrix(n, n))
}

fn to_nalgebra(a: &CMatrix) -> nalgebra::DMatrix<C64> {
    nalgebra::DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A classical method with every node in the right half-plane.
fn right_half_plane_method() -> impl Strategy<Value = AwMethod> {
    prop_oneof![
        (1usize..=4).prop_map(|n| zakian_method(n).unwrap()),
        (1usize..=6).prop_map(|k| gaver_method(2 * k).unwrap()),
        (1usize..=8).prop_map(|k| euler_method(2 * k + 1).unwrap()),
    ]
}

fn any_method() -> impl Strategy<Value = AwMethod> {
    prop_oneof![
        right_half_plane_method(),
        (4usize..=24).prop_map(|n| talbot_method(n).unwrap()),
        prop::sample::select(vec![0.6, 1.8, 4.0, 7.0, 11.2]).prop_map(|r| preset_tame(r).unwrap()),
    ]
}

/// Real-valued sum of exponentials: `(c, α)` with conjugate pairs.
fn real_exp_sum() -> impl Strategy<Value = (Vec<C64>, Vec<C64>)> {
    prop::collection::vec((complex(), -3.0f64..0.5, -4.0f64..4.0, any::<bool>()), 1..4).prop_map(|terms| {
        let mut cs = Vec::new();
        let mut al = Vec::new();
        for (cm, re, im, pair) in terms {
            if pair {
                cs.extend([cm, cm.conj()]);
                al.extend([c(re, im), c(re, -im)]);
            } else {
                cs.push(c(cm.re, 0.0));
                al.push(c(re, 0.0));
            }
        }
        (cs, al)
    })
}

fn exp_sum_transform(cs: Vec<C64>, al: Vec<C64>) -> impl Transform + Sync {
    ScalarTransform::new(move |s: C64| cs.iter().zip(&al).map(|(c, a)| c / (s - a)).sum()).symmetric()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn smallest_singular_vector_attains_the_minimum(a in sized_matrix()) {
        let (v, sigma) = smallest_singular_vector(&a).unwrap();
        let oracle = to_nalgebra(&a).singular_values().min();
        let av = vec_norm(&a.mul_vec(&v).unwrap());
        prop_assert!((vec_norm(&v) - 1.0).abs() <= 1e-12);
        prop_assert!(av <= oracle + 1e-12 * a.norm_fro(), "{av} vs {oracle}");
        prop_assert!((sigma - oracle).abs() <= 1e-12 * a.norm_fro().max(1.0));
    }

    #[test]
    fn exponential_of_negation_is_the_inverse(a in square(6), scale in 0.1f64..10.0) {
        let a = a.scale(c(scale / a.norm_fro().max(1e-300), 0.0));
        let p = matrix_exponential(&a).unwrap().matmul(&matrix_exponential(&a.scale(c(-1.0, 0.0))).unwrap()).unwrap();
        let err = p.sub(&CMatrix::identity(a.rows())).unwrap().max_abs();
        prop_assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn eigenvalues_of_a_similarity_transform(d in prop::collection::vec(complex(), 1..7), v in square(6)) {
        let n = d.len();
        let v = CMatrix::from_fn(n, n, |i, j| if i == j { c(2.0, 0.0) } else { c(0.0, 0.0) } + v[(i % v.rows(), j % v.cols())] * 0.3);
        let vinv = inverse(&v).unwrap();
        let a = v.matmul(&CMatrix::from_fn(n, n, |i, j| if i == j { d[i] * 3.0 } else { c(0.0, 0.0) })).unwrap().matmul(&vinv).unwrap();
        let spec = dense_eigenvalues(&a, &CMatrix::identity(n), Precision::Working).unwrap();
        prop_assert_eq!(spec.infinite, 0);
        let mut left: Vec<C64> = d.iter().map(|z| z * 3.0).collect();
        for mu in spec.finite {
            let (k, dist) = left.iter().enumerate().map(|(k, z)| (k, (z - mu).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            prop_assert!(dist <= 1e-10 * mu.norm().max(1.0), "{mu} unmatched ({dist})");
            left.swap_remove(k);
        }
        prop_assert!(left.is_empty());
    }

    #[test]
    fn full_and_reduced_forms_agree((cs, al) in real_exp_sum(), m in any_method(), t in 0.2f64..4.0) {
        let f = exp_sum_transform(cs, al);
        let reduced = m.to_reduced().unwrap();
        let full = m.to_full().unwrap();
        let r = invert(&reduced, &f, t).unwrap().as_scalar().unwrap();
        let g = invert(&full, &f, t).unwrap().as_scalar().unwrap();
        let mag: f64 = full.full_terms().iter().map(|&(w, b)| (w * f.eval(b / t).unwrap().as_scalar().unwrap()).norm() / t).sum();
        prop_assert_eq!(r.im, 0.0);
        prop_assert!((r - g).norm() <= 1e2 * U * mag, "{r} vs {g}");
    }

    #[test]
    fn inversion_is_linear((cs, al) in real_exp_sum(), (ds, be) in real_exp_sum(), a in -2.0f64..2.0, b in -2.0f64..2.0, m in any_method(), t in 0.2f64..4.0) {
        let f = exp_sum_transform(cs.clone(), al.clone());
        let g = exp_sum_transform(ds.clone(), be.clone());
        let (f2, g2) = (exp_sum_transform(cs, al), exp_sum_transform(ds, be));
        let h = ScalarTransform::new(move |s: C64| {
            a * f2.eval(s).unwrap().as_scalar().unwrap() + b * g2.eval(s).unwrap().as_scalar().unwrap()
        }).symmetric();
        let lhs = invert_scalar(&m, &h, t).unwrap();
        let rhs = a * invert_scalar(&m, &f, t).unwrap() + b * invert_scalar(&m, &g, t).unwrap();
        let mag: f64 = m.full_terms().iter().map(|&(w, beta)| {
            let s = beta / t;
            (w / t).norm() * (a.abs() * f.eval(s).unwrap().as_scalar().unwrap().norm() + b.abs() * g.eval(s).unwrap().as_scalar().unwrap().norm())
        }).sum();
        prop_assert!((lhs - rhs).abs() <= 8.0 * U * mag, "{lhs} vs {rhs}");
    }

    #[test]
    fn time_scaling_law((cs, al) in real_exp_sum(), m in any_method(), t in 0.2f64..3.0, k in 0.25f64..4.0) {
        let f = exp_sum_transform(cs.clone(), al.clone());
        let fk = exp_sum_transform(cs, al);
        let scaled = ScalarTransform::new(move |s: C64| fk.eval(s / k).unwrap().as_scalar().unwrap() / k).symmetric();
        let a = invert_scalar(&m, &scaled, t).unwrap();
        let b = invert_scalar(&m, &f, k * t).unwrap();
        let mag: f64 = m.full_terms().iter().map(|&(w, beta)| (w / (k * t)).norm() * f.eval(beta / (k * t)).unwrap().as_scalar().unwrap().norm()).sum();
        prop_assert!((a - b).abs() <= 1e2 * U * mag, "{a} vs {b}");
    }

    #[test]
    fn sum_of_exponentials_respects_its_bound((cs, al) in real_exp_sum(), r in prop::sample::select(vec![1.8, 4.0, 7.0, 11.2]), t in 0.2f64..3.0) {
        let (m, meta) = preset_tame_with_metadata(r).unwrap();
        let eps = meta.epsilon.unwrap();
        // keep every αt inside the disc the preset was built on
        let radius = aw_core::tame::preset_rows().iter().find(|row| row.radius >= r).unwrap().radius;
        let center = c(-radius, 0.0);
        let fits = al.iter().all(|a| (a * t - center).norm() <= radius);
        prop_assume!(fits);
        let exact: f64 = cs.iter().zip(&al).map(|(c, a)| c * (a * t).exp()).sum::<C64>().re;
        let got = invert_scalar(&m, &exp_sum_transform(cs.clone(), al), t).unwrap();
        let bound = bound_se(eps, &cs).unwrap().value;
        prop_assert!((got - exact).abs() <= bound, "{} > {bound}", (got - exact).abs());
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn closed_form_and_quadrature_moments_agree(m in right_half_plane_method()) {
        let closed = moments(&m).unwrap();
        let quad = quadrature_moments(&m).unwrap();
        for (a, q) in [closed.mu0, closed.mu1, closed.mu2].iter().zip(&quad) {
            prop_assert!((a - q.value).abs() <= 1e-8 * a.abs().max(1.0), "{a} vs {}", q.value);
        }
        let nt = nu2_tilde(&m).unwrap();
        prop_assert!(nt.value + nt.uncertainty >= closed.nu2.abs() * (1.0 - 1e-9));
    }

    #[test]
    fn equality_case_on_the_boundary(theta in 0.0f64..std::f64::consts::TAU, r in prop::sample::select(vec![0.6, 1.8, 4.0, 7.0])) {
        let m = preset_tame(r).unwrap().to_full().unwrap();
        let z = c(-r + r * theta.cos(), r * theta.sin());
        let f = ScalarTransform::new(move |s: C64| (s - z).inv());
        let got = invert(&m, &f, 1.0).unwrap().as_scalar().unwrap();
        let approx: C64 = m.full_terms().iter().map(|&(w, b)| w * (b - z).inv()).sum();
        let ez = z.exp();
        prop_assert!(((ez - got).norm() - (ez - approx).norm()).abs() <= 1e2 * U * ez.norm());
    }

    #[test]
    fn phase_type_densities_respect_their_bound(seed in 0u64..1000, t in 0.2f64..2.0) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=5usize);
        let q = RMatrix::from_fn(d, d, |i, j| if i == j { 0.0 } else { rng.gen::<f64>() });
        let q = RMatrix::from_fn(d, d, |i, j| {
            if i == j { -(0..d).filter(|&k| k != i).map(|k| q[(i, k)]).sum::<f64>() - 0.2 - 0.8 * (i as f64 + 1.0) / d as f64 } else { q[(i, j)] }
        });
        let mut alpha: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() + 0.01).collect();
        let total: f64 = alpha.iter().sum();
        alpha.iter_mut().for_each(|a| *a /= total);
        alpha[0] = 1.0 - alpha[1..].iter().sum::<f64>();
        let p = PhaseType::new(alpha, q).unwrap();
        let lambda = p.generator().lambda();
        prop_assume!(lambda * t <= 11.2);
        let (m, meta) = preset_tame_with_metadata(lambda * t).unwrap();
        let eps = meta.epsilon.unwrap();
        let (pdf, cdf) = phase_type_transform(&p).unwrap();
        let (want_pdf, want_cdf) = phase_type_ground_truth(&p, t).unwrap();
        let (bp, bc, _) = bound_phase_type(eps, p.exit_l1(), d, p.mean().unwrap()).unwrap();
        prop_assert!((invert_scalar(&m, &pdf, t).unwrap() - want_pdf).abs() <= bp.value);
        prop_assert!((invert_scalar(&m, &cdf, t).unwrap() - want_cdf).abs() <= bc.value);
    }
}

fn nare_residual(model: &FluidQueueModel, s: C64, x: &CMatrix) -> (f64, f64) {
    let q = model.generator().matrix();
    let r = model.rates();
    let a = |i: usize, j: usize| (if i == j { c(q[(i, j)], 0.0) - s } else { c(q[(i, j)], 0.0) }) / r[i].abs();
    let (p, n) = (model.plus(), model.minus());
    let block = |rows: &[usize], cols: &[usize]| CMatrix::from_fn(rows.len(), cols.len(), |i, j| a(rows[i], cols[j]));
    let (app, apm, amp, amm) = (block(p, p), block(p, n), block(n, p), block(n, n));
    let res = x.matmul(&amp).unwrap().matmul(x).unwrap().add(&app.matmul(x).unwrap()).unwrap().add(&x.matmul(&amm).unwrap()).unwrap().add(&apm).unwrap();
    let d = r.len();
    let norm_a = (0..d).map(|i| (0..d).map(|j| a(i, j).norm()).sum::<f64>()).fold(0.0, f64::max);
    (res.norm_inf(), norm_a)
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn riccati_solutions_are_accurate_and_symmetric(seed in 0u64..500, dp in 1usize..4, dm in 1usize..4, re in -3.0f64..4.0, im in 0.0f64..6.0) {
        let model = make_experiment_model(dp, dm, seed).unwrap();
        let lambda = model.lambda();
        let s = c(re, im);
        prop_assume!((s + lambda).norm() > lambda * 1.01);
        let x = model.psi(s).unwrap();
        let (res, norm_a) = nare_residual(&model, s, &x);
        prop_assert!(res <= 1e-12 * norm_a, "residual {res}");
        let y = model.psi(s.conj()).unwrap();
        let gap = x.map(|z| z.conj()).sub(&y).unwrap().max_abs();
        prop_assert!(gap <= 1e-12, "conjugate gap {gap}");
    }
}

#[test]
fn reconstructed_cdf_is_monotone() {
    let model = make_experiment_model(2, 3, 5).unwrap();
    let lambda = model.lambda();
    let psi_inf = model.psi_infinity().unwrap();
    let mean = model.first_moment().unwrap();
    let (_, cdf) = fluid_psi_transform(&model);
    let ts: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
    let mut prev: Option<(CMatrix, Vec<f64>)> = None;
    for &t in &ts {
        let (m, meta) = preset_tame_with_metadata(lambda * t).unwrap();
        let eps = meta.epsilon.unwrap();
        let v = invert(&m, &cdf, t).unwrap().as_matrix().unwrap().clone();
        let bounds: Vec<f64> = (0..v.rows() * v.cols())
            .map(|k| {
                let (i, j) = (k / v.cols(), k % v.cols());
                bound_fluid_cdf(eps, lambda, psi_inf[(i, j)], mean[(i, j)]).unwrap().value
            })
            .collect();
        if let Some((p, pb)) = &prev {
            for k in 0..bounds.len() {
                let (i, j) = (k / v.cols(), k % v.cols());
                let drop = p[(i, j)].re - v[(i, j)].re;
                assert!(drop <= 10.0 * (pb[k] + bounds[k]), "entry ({i},{j}) falls by {drop} at t = {t}");
            }
        }
        prev = Some((v, bounds));
    }
}

#[test]
fn generated_methods_have_exact_conjugate_pairs() {
    let mut all: Vec<AwMethod> = (1..=4).map(|n| zakian_method(n).unwrap()).collect();
    all.extend((2..=30).map(|n| talbot_method(n).unwrap()));
    all.extend((1..=10).map(|k| euler_method(2 * k + 1).unwrap()));
    all.extend((1..=8).map(|k| gaver_method(2 * k).unwrap()));
    for m in all {
        let terms = m.to_full().unwrap().full_terms();
        for &(w, b) in &terms {
            if b.im != 0.0 {
                assert!(terms.iter().any(|&(v, g)| g == b.conj() && v == w.conj()), "{}: {b}", m.name());
            } else {
                assert_eq!(w.im, 0.0, "{}", m.name());
            }
        }
    }
}

#[test]
fn zakian_reproduces_low_degree_polynomials() {
    for n in 1..=4usize {
        let m = zakian_method(n).unwrap();
        for k in 0..2 * n as i32 {
            let fact: f64 = (1..=k).map(f64::from).product();
            let f = ScalarTransform::new(move |s: C64| fact / s.powi(k + 1)).symmetric();
            let got = invert_scalar(&m, &f, 1.0).unwrap();
            assert!((got - 1.0).abs() <= 1e-10, "N = {n}, k = {k}: {got}");
        }
    }
}

#[test]
fn catalog_waves_are_conjugate_symmetric() {
    for name in NAMES {
        let e: CatalogEntry = entry(name, &[]).unwrap();
        if e.is_symmetric() {
            check_symmetry(&e).unwrap();
        }
    }
    assert!(CatalogEntry::square_wave().is_symmetric() && CatalogEntry::triangular_wave().is_symmetric());
}
