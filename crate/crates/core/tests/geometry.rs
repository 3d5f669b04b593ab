use lagpinch::curvature::{gauss_curvature, intrinsic_curvature_oracle, ricci, sectional};
use lagpinch::fundforms::{
    adapted_frame_ordered, check_shape_operator_identity, frame_residuals, induced_metric,
    point_geometry, second_fundamental_tensor, FundamentalData,
};
use lagpinch::immersions::{
    immersion_jet, immersion_map, sample_sphere_points, whitneycp_homogeneous_eval, ImmersionSpec,
    SpherePoint, SphereChart,
};
use lagpinch::jets::finite_difference_jet;
use lagpinch::optimize::{random_frame, random_unit};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn families(n: usize) -> Vec<ImmersionSpec> {
    vec![
        ImmersionSpec::whitney(n).unwrap(),
        ImmersionSpec::castro(n, 1.5).unwrap(),
        ImmersionSpec::castro(n, 4.0).unwrap(),
        ImmersionSpec::whitney_cp(n, 0.5).unwrap(),
        ImmersionSpec::geodesic_plane(n).unwrap(),
    ]
}

fn points(n: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, SphereChart)> {
    sample_sphere_points(n, count, seed)
        .into_iter()
        .map(|x| {
            let chart = SphereChart::for_point(&x);
            (chart.from_sphere(&x).unwrap(), chart)
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn whitney_equator_metric_matches_finite_differences() {
    let spec = ImmersionSpec::whitney(3).unwrap();
    let x = SpherePoint::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let chart = SphereChart::for_point(&x);
    let u = chart.from_sphere(&x).unwrap();
    let map = immersion_map(&spec, &u, chart).unwrap();
    let fd = finite_difference_jet(&map, &u, 1e-5).unwrap();
    let ad = immersion_jet(&spec, &u, chart).unwrap();
    let g_fd = induced_metric(&fd, spec.ambient()).unwrap();
    let g_ad = induced_metric(&ad, spec.ambient()).unwrap();
    assert!((g_fd - g_ad).abs().max() <= 1e-8);
}

#[test]
fn immersions_have_full_rank_and_lagrangian_frames() {
    for spec in families(3).into_iter().chain(families(4)) {
        for (u, chart) in points(spec.n(), 25, 11) {
            let jet = immersion_jet(&spec, &u, chart).unwrap();
            let sv = jet.first.clone().svd(false, false).singular_values;
            assert!(sv.min() >= 1e-6, "{:?}: {}", spec.family(), sv.min());
            let g = induced_metric(&jet, spec.ambient()).unwrap();
            assert!(g.determinant() > 0.0);
            let geo = point_geometry(&jet, spec.ambient()).unwrap();
            let r = frame_residuals(&geo.frame, spec.ambient()).unwrap();
            assert!(r.orthonormality <= 1e-10 && r.lagrangian <= 1e-9, "{r:?}");
            assert!(geo.fund.symmetry_residual() <= 1e-9);
        }
    }
}

#[test]
fn scalars_do_not_depend_on_gram_schmidt_order() {
    for spec in families(4) {
        for (u, chart) in points(4, 5, 12) {
            let jet = immersion_jet(&spec, &u, chart).unwrap();
            let reference = point_geometry(&jet, spec.ambient()).unwrap().fund;
            let rt0 = gauss_curvature(&reference, spec.ambient().c());
            let scal0: f64 = (0..4).map(|i| (0..4).map(|j| rt0.get(i, j, i, j)).sum::<f64>()).sum();
            for order in permutations(4) {
                let frame = adapted_frame_ordered(&jet, spec.ambient(), &order).unwrap();
                let fund = second_fundamental_tensor(&jet, spec.ambient(), &frame).unwrap();
                assert!((fund.s() - reference.s()).abs() <= 1e-8 * (1.0 + reference.s()));
                assert!((fund.mean_curvature() - reference.mean_curvature()).abs() <= 1e-8);
                let rt = gauss_curvature(&fund, spec.ambient().c());
                let scal: f64 = (0..4).map(|i| (0..4).map(|j| rt.get(i, j, i, j)).sum::<f64>()).sum();
                assert!((scal - scal0).abs() <= 1e-8 * (1.0 + scal0.abs()));
            }
        }
    }
}

#[test]
fn shape_operator_identity_holds() {
    let cases = [
        (ImmersionSpec::whitney(3).unwrap(), 1e-7),
        (ImmersionSpec::whitney_cp(3, 0.5).unwrap(), 1e-6),
        (ImmersionSpec::castro(3, 3.0).unwrap(), 1e-6),
        (ImmersionSpec::geodesic_plane(3).unwrap(), 0.0),
    ];
    for (spec, tol) in cases {
        for (u, chart) in points(3, 20, 13) {
            let jet = immersion_jet(&spec, &u, chart).unwrap();
            let geo = point_geometry(&jet, spec.ambient()).unwrap();
            let r = check_shape_operator_identity(&jet, spec.ambient(), &geo.frame, &geo.fund).unwrap();
            assert!(r <= tol, "{:?}: {r}", spec.family());
        }
    }
}

#[test]
fn gauss_equation_matches_intrinsic_oracle() {
    let cases = [
        (ImmersionSpec::geodesic_plane(3).unwrap(), 1e-8),
        (ImmersionSpec::whitney(3).unwrap(), 1e-5),
        (ImmersionSpec::whitney_cp(3, 0.5).unwrap(), 1e-4),
        (ImmersionSpec::castro(4, 3.0).unwrap(), 1e-4),
    ];
    for (spec, tol) in cases {
        for (u, chart) in points(spec.n(), 5, 14) {
            let jet = immersion_jet(&spec, &u, chart).unwrap();
            let fund = point_geometry(&jet, spec.ambient()).unwrap().fund;
            let rt = gauss_curvature(&fund, spec.ambient().c());
            let oracle = intrinsic_curvature_oracle(&spec, &u, chart).unwrap();
            let rel = oracle.max_abs_diff(&rt) / (1.0 + rt.max_abs());
            assert!(rel <= tol, "{:?}: {rel}", spec.family());
            assert!(rt.symmetry_residual() <= 1e-10 * (1.0 + rt.max_abs()));
            assert!(rt.bianchi_residual() <= 1e-10 * (1.0 + rt.max_abs()));
        }
    }
}

#[test]
fn whitney_cp_lands_on_unit_sphere() {
    for theta in [0.0, 0.3, 0.7, 2.0] {
        for x in sample_sphere_points(4, 30, 15) {
            let z = whitneycp_homogeneous_eval(&x, theta);
            let norm: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn whitney_and_castro_ratios() {
    let n = 3.0;
    for (u, chart) in points(3, 30, 16) {
        let w = ImmersionSpec::whitney(3).unwrap();
        let fund = point_geometry(&immersion_jet(&w, &u, chart).unwrap(), w.ambient()).unwrap().fund;
        assert!((fund.s() * (n + 2.0) / (3.0 * fund.n2h2()) - 1.0).abs() <= 1e-8);
        let c = ImmersionSpec::castro(3, 3.0).unwrap();
        let fund = point_geometry(&immersion_jet(&c, &u, chart).unwrap(), c.ambient()).unwrap().fund;
        assert!((fund.s() / fund.n2h2() - 22.0 / 36.0).abs() <= 1e-8);
    }
}

#[test]
fn ricci_is_frame_invariant() {
    let spec = ImmersionSpec::castro(4, 2.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (u, chart) in points(4, 5, 17) {
        let fund = point_geometry(&immersion_jet(&spec, &u, chart).unwrap(), spec.ambient())
            .unwrap()
            .fund;
        let q = random_frame(&mut rng, 4, 4);
        let rt = gauss_curvature(&fund, 0.0);
        let rotated = gauss_curvature(&fund.rotated(&q), 0.0);
        let v = random_unit(&mut rng, 4);
        // the same vector in the rotated frame has coefficients qᵀv
        let vq: Vec<f64> = (q.transpose() * DMatrix::from_column_slice(4, 1, &v)).iter().copied().collect();
        assert!((ricci(&rt, &v) - ricci(&rotated, &vq)).abs() <= 1e-9);
        let s01 = sectional(&rt.in_frame(&q), 0, 1);
        assert!((s01 - sectional(&rotated, 0, 1)).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn s_and_h_are_rotation_invariant(seed in 0u64..10_000, n in 3usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = random_frame(&mut rng, n * n * n, 1);
        let fund = FundamentalData::symmetric_from_fn(n, 0.0, |i, j, k| vals[((i * n + j) * n + k, 0)] * 5.0);
        let q = random_frame(&mut rng, n, n);
        let r = fund.rotated(&q);
        prop_assert!((r.s() - fund.s()).abs() <= 1e-12 * (1.0 + fund.s()));
        prop_assert!((r.mean_curvature() - fund.mean_curvature()).abs() <= 1e-12);
        prop_assert!(r.symmetry_residual() <= 1e-12);
    }

    #[test]
    fn lower_bound_holds_for_any_symmetric_tensor(seed in 0u64..10_000, n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = random_frame(&mut rng, n * n * n, 1);
        let fund = FundamentalData::symmetric_from_fn(n, 0.0, |i, j, k| vals[((i * n + j) * n + k, 0)]);
        let gap = fund.s() - 3.0 * fund.n2h2() / (n as f64 + 2.0);
        prop_assert!(gap >= -1e-12 * (1.0 + fund.s()));
    }
}
