use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use weatherwise::models::mlp::loss_and_gradient;
use weatherwise::models::{
    feature_importance, mae, rmse, train, ForestConfig, GbtConfig, GradientBoosting, LinearModel, MlpConfig, ModelKind,
    ModelSpec, RandomForest,
};
use weatherwise::nn::{Activation, Network};
use weatherwise::rng::stream;

fn regression(seed: u64, n: usize, p: usize, noise: f64) -> (Array2<f64>, Array1<f64>) {
    let mut r = stream(seed, 0);
    let x = Array2::from_shape_fn((n, p), |_| r.random::<f64>());
    let beta: Vec<f64> = (0..p).map(|_| r.random_range(-3.0..3.0)).collect();
    let y = Array1::from_shape_fn(n, |i| {
        let e: f64 = StandardNormal.sample(&mut r);
        (0..p).map(|j| beta[j] * x[[i, j]]).sum::<f64>() + (3.0 * x[[i, 0]]).sin() + noise * e
    });
    (x, y)
}

fn baseline_rmse(y: &Array1<f64>) -> f64 {
    let mean = y.sum() / y.len() as f64;
    (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64).sqrt()
}

/// Gaussian elimination with partial pivoting on `[XᵀX | Xᵀy]`, intercept last.
fn normal_equations(x: &Array2<f64>, y: &Array1<f64>) -> Vec<f64> {
    let (n, p) = x.dim();
    let k = p + 1;
    let col = |i: usize, j: usize| if j == p { 1.0 } else { x[[i, j]] };
    let mut a = vec![vec![0.0; k + 1]; k];
    for r in 0..k {
        for c in 0..k {
            a[r][c] = (0..n).map(|i| col(i, r) * col(i, c)).sum();
        }
        a[r][k] = (0..n).map(|i| col(i, r) * y[i]).sum();
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for m in c..=k {
                    a[r][m] -= f * a[c][m];
                }
            }
        }
    }
    (0..k).map(|r| a[r][k] / a[r][r]).collect()
}

/// Largest central-difference mismatch relative to the gradient norm.
fn gradient_check(net: &Network, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let (_, analytic) = loss_and_gradient(net, x, y);
    let base = net.params();
    let h = 1e-5;
    let mut probe = net.clone();
    let mut numeric = vec![0.0; base.len()];
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        probe.set_params(&p);
        let up = weatherwise::models::mlp::loss(&probe, x, y);
        p[i] = base[i] - h;
        probe.set_params(&p);
        let down = weatherwise::models::mlp::loss(&probe, x, y);
        numeric[i] = (up - down) / (2.0 * h);
    }
    let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt() + numeric.iter().map(|b| b * b).sum::<f64>().sqrt();
    diff / scale.max(1e-12)
}

#[test]
fn metric_hand_case() {
    assert!((rmse(&[0.0, 2.0], &[1.0, 3.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!((mae(&[0.0, 2.0], &[1.0, 3.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!(rmse(&[], &[]).is_err());
    assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
}

#[test]
fn boosting_loss_never_increases() {
    let (x, y) = regression(3, 150, 4, 0.3);
    let m = GradientBoosting::fit(x.view(), &y, &GbtConfig::default());
    for pair in m.loss_history.windows(2) {
        assert!(pair[1] <= pair[0], "{} then {}", pair[0], pair[1]);
    }
}

#[test]
fn forest_is_independent_of_thread_count() {
    let (x, y) = regression(4, 120, 5, 0.2);
    let cfg = ForestConfig { n_trees: 24, ..ForestConfig::default() };
    let fit_with = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| RandomForest::fit(x.view(), &y, &cfg, 77).predict(x.view()))
    };
    let one = fit_with(1);
    assert_eq!(one, fit_with(3));
    assert_eq!(one, fit_with(8));
}

#[test]
fn linear_matches_normal_equations() {
    for seed in 0..10 {
        let (x, y) = regression(seed, 60, 1 + seed as usize % 5, 0.5);
        let m = LinearModel::fit(x.view(), &y);
        let oracle = normal_equations(&x, &y);
        let p = x.ncols();
        for j in 0..p {
            assert!((m.coefficients[j] - oracle[j]).abs() < 1e-6, "seed {seed}");
        }
        assert!((m.intercept - oracle[p]).abs() < 1e-6);
    }
}

#[test]
fn forest_importance_finds_the_signal() {
    let mut r = stream(9, 0);
    let x = Array2::from_shape_fn((300, 4), |_| r.random::<f64>());
    let y = x.column(0).mapv(|v| 10.0 * v);
    let spec = ModelSpec::new(ModelKind::RandomForest(ForestConfig::default()), 1);
    let model = train(&spec, &x, &y).unwrap();
    let names: Vec<String> = (0..4).map(|j| format!("f{j}")).collect();
    let imp = feature_importance(&model, &names).unwrap();
    assert!(imp.importance[0] > 0.9, "{:?}", imp.importance);
    assert!((imp.importance.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(!imp.uniform_fallback);
}

#[test]
fn least_squares_models_beat_the_mean() {
    let lineup = [
        ModelKind::Linear,
        ModelKind::RandomForest(ForestConfig { n_trees: 30, ..ForestConfig::default() }),
        ModelKind::Gbt(GbtConfig::default()),
        ModelKind::NeuralNet(MlpConfig::with_epochs(100)),
        ModelKind::NeuralNet(MlpConfig::with_epochs(200)),
    ];
    for seed in 0..6 {
        let noise = [0.1, 1.0, 10.0][seed as usize % 3];
        let (x, y) = regression(seed, 80, 3, noise);
        let base = baseline_rmse(&y);
        for kind in &lineup {
            let model = train(&ModelSpec::new(kind.clone(), seed), &x, &y).unwrap();
            let fit = rmse(y.as_slice().unwrap(), model.predict(&x).unwrap().as_slice().unwrap()).unwrap();
            assert!(fit <= base + 1e-12, "{} seed {seed}: {fit} > {base}", kind.name());
        }
    }
}

#[test]
fn network_gradients_match_finite_differences() {
    for seed in 0..5 {
        let mut r = stream(seed, 3);
        let x = Array2::from_shape_fn((5, 4), |_| r.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(5, |_| r.random_range(-1.0..1.0));
        let net = Network::new(&[4, 16, 16, 1], Activation::Relu, Activation::Identity, &mut r);
        let err = gradient_check(&net, &x, &y);
        assert!(err < 1e-4, "seed {seed}: {err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn rmse_dominates_mae(pairs in prop::collection::vec((-1e4f64..1e4, -1e4f64..1e4), 1..30)) {
        let (t, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (r, m) = (rmse(&t, &p).unwrap(), mae(&t, &p).unwrap());
        prop_assert!(m >= 0.0);
        prop_assert!(r >= m * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn predictions_are_deterministic(seed in any::<u64>()) {
        let (x, y) = regression(seed, 40, 3, 1.0);
        for kind in [ModelKind::Gbt(GbtConfig { n_rounds: 20, ..GbtConfig::default() }), ModelKind::Linear] {
            let spec = ModelSpec::new(kind, seed);
            let a = train(&spec, &x, &y).unwrap().predict(&x).unwrap();
            let b = train(&spec, &x, &y).unwrap().predict(&x).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
