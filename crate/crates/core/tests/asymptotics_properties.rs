use absum_core::asymptotics::{
    check_envelope, eval_model, fit_leading, residual_series, residuals, ErrorEnvelope,
    ResidualPoint, Shape,
};
use absum_core::summation::weighted_sums;
use absum_core::{CheckpointGrid, FunctionSpec, Model, Series, SieveConfig, Term};
use proptest::prelude::*;

fn series(xs: Vec<f64>, ys: Vec<f64>) -> Series {
    Series {
        source: "synthetic".into(),
        weight: 0,
        grid: CheckpointGrid::new(xs).unwrap(),
        sums: ys,
        exact: None,
    }
}

fn increasing_xs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(3u32..2_000_000, 8..40)
        .prop_map(|s| s.into_iter().map(f64::from).collect())
}

proptest! {
    #[test]
    fn eval_is_linear_in_the_coefficient(
        alpha in -1e3f64..1e3, p in -2.0f64..3.0, k in -2i32..4, j in 0u32..3, x in 20.0f64..1e7,
    ) {
        let env = ErrorEnvelope::big_o(Shape::constant());
        let unit = Model::new(vec![Term::known(1.0, p, k, j)], env.clone());
        let scaled = Model::new(vec![Term::known(alpha, p, k, j)], env);
        let a = eval_model(&scaled, x).unwrap();
        let b = alpha * eval_model(&unit, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn fit_recovers_synthetic_coefficient(c in -1e3f64..1e3, p in 0.5f64..3.0, k in 0i32..3, xs in increasing_xs()) {
        let shape = Shape::new(p, k, 0);
        let ys: Vec<f64> = xs.iter().map(|&x| c * shape.at(x)).collect();
        let m = Model::new(vec![Term::to_fit("c", p, k, 0)], ErrorEnvelope::big_o(Shape::constant()));
        let fitted = fit_leading(&m, &series(xs, ys)).unwrap();
        prop_assert!((fitted - c).abs() <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn verdict_invariant_under_positive_scaling(
        xs in increasing_xs(),
        rs in prop::collection::vec(0.0f64..10.0, 40),
        scale in 1e-6f64..1e6,
        little in any::<bool>(),
    ) {
        let env = if little {
            ErrorEnvelope::little_o(Shape::constant())
        } else {
            ErrorEnvelope::big_o(Shape::new(0.0, 1, 0))
        };
        let model = Model::new(vec![], env.clone());
        let ys: Vec<f64> = rs.iter().take(xs.len()).copied().collect();
        let scaled: Vec<f64> = ys.iter().map(|y| y * scale).collect();
        let a = residuals(&xs, &ys, &model).unwrap();
        let b = residuals(&xs, &scaled, &model).unwrap();
        prop_assert_eq!(check_envelope(&a, &env, 0.5).unwrap(), check_envelope(&b, &env, 0.5).unwrap());
    }

    #[test]
    fn empty_model_leaves_empirical_unchanged(xs in increasing_xs(), seed in -1e6f64..1e6) {
        let ys: Vec<f64> = xs.iter().map(|x| seed + x.sqrt()).collect();
        let m = Model::new(vec![], ErrorEnvelope::big_o(Shape::constant()));
        let pts = residual_series(&series(xs, ys.clone()), &m).unwrap();
        let got: Vec<f64> = pts.iter().map(|p: &ResidualPoint<f64>| p.residual).collect();
        prop_assert_eq!(got, ys);
    }
}

#[test]
fn sigma_squared_cubic_fit_is_stable_across_top_half() {
    let n_max = 1_000_000;
    let t = FunctionSpec::Sigma2
        .build(n_max, &SieveConfig::default())
        .unwrap();
    let g = CheckpointGrid::geometric(1e4, n_max as f64, 16).unwrap();
    let s = absum_core::summation::partial_sums::<f64>(&t, &g).unwrap();
    let ratios: Vec<f64> = g.points()[8..]
        .iter()
        .zip(&s.sums[8..])
        .map(|(x, v)| v / x.powi(3))
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &r| (a.min(r), b.max(r)));
    assert!((hi - lo) / lo < 0.02, "spread {lo}..{hi}");
}

#[test]
fn harmonic_residual_is_euler_gamma() {
    let n_max = 1_000_000;
    let one = FunctionSpec::ONE
        .build(n_max, &SieveConfig::default())
        .unwrap();
    let g = CheckpointGrid::new(vec![n_max as f64]).unwrap();
    let s = weighted_sums::<f64>(&one, 1, &g).unwrap();
    let m = Model::new(
        vec![Term::known(1.0, 0.0, 1, 0)],
        ErrorEnvelope::big_o(Shape::constant()),
    );
    let r = residuals(g.points(), &s.sums, &m).unwrap()[0].residual;
    // γ + 1/(2x) − …
    assert!((r - 0.5772156649015329 - 0.5e-6).abs() < 1e-10, "{r}");
}

#[test]
fn prime_reciprocal_residual_is_near_mertens_constant() {
    let n_max = 1_000_000;
    let cfg = SieveConfig::default();
    let ind = FunctionSpec::Prime.build(n_max, &cfg).unwrap();
    let g = CheckpointGrid::new(vec![n_max as f64]).unwrap();
    let s = weighted_sums::<f64>(&ind, 1, &g).unwrap();
    let m = Model::new(
        vec![Term::known(1.0, 0.0, 0, 1)],
        ErrorEnvelope::big_o(Shape::constant()),
    );
    let r = residuals(g.points(), &s.sums, &m).unwrap()[0].residual;
    assert!((r - 0.2615).abs() < 0.02, "{r}");
}
