use canonreg::dataset::{scale_target_log10, Dataset, SyntheticOracle};
use canonreg::evolve::{score_model, Scoring, TrainData};
use canonreg::expr::{complexity, format_sig, Model};
use canonreg::fit::{press, RegressionProblem};
use canonreg::grammar::Grammar;
use canonreg::pipeline::*;
use sha2::{Digest, Sha256};

fn small_cfg(seed: u64) -> RunConfig {
    RunConfig { population: 40, generations: 15, seed, ..RunConfig::default() }
}

fn constant_set(points: &[(f64, f64)]) -> TradeoffSet {
    // a constant model with offset a predicts a; on y = 0 with reference 100
    // its error is |a| percent
    let models = points
        .iter()
        .map(|&(c, err)| {
            let mut m = Model::constant(err);
            m.complexity = c;
            m.train_error = 50.0 - c;
            m
        })
        .collect();
    TradeoffSet {
        models,
        var_names: vec!["x1".into()],
        target_name: "y".into(),
        target_log_scaled: false,
        reference: 100.0,
        scoring: RunConfig::default().scoring(),
    }
}

fn zero_target() -> Dataset {
    Dataset::from_columns(vec!["x1".into()], vec![vec![1.0]], vec![0.0], "y").unwrap()
}

#[test]
fn test_filter_keeps_tradeoff() {
    let out = filter_test_tradeoff(&constant_set(&[(0.0, 4.0), (12.0, 3.7), (13.0, 3.9)]), &zero_target()).unwrap();
    let kept: Vec<f64> = out.models.iter().map(|m| m.complexity).collect();
    assert_eq!(kept, vec![0.0, 12.0]);
    assert!((out.models[1].test_error.unwrap() - 3.7).abs() < 1e-12);

    let same = filter_test_tradeoff(&constant_set(&[(0.0, 2.0), (5.0, 2.0), (9.0, 2.0)]), &zero_target()).unwrap();
    assert_eq!(same.len(), 1);
    assert_eq!(same.models[0].complexity, 0.0);
}

#[test]
fn test_filter_never_hurts_best_error() {
    let pts: Vec<(f64, f64)> = (0..30).map(|i| (i as f64, ((i * 37) % 11) as f64 + 0.5)).collect();
    let before = constant_set(&pts);
    let after = filter_test_tradeoff(&before, &zero_target()).unwrap();
    for c in 0..30 {
        let best = |ts: &TradeoffSet| {
            ts.models.iter().filter(|m| m.complexity <= c as f64).map(|m| m.coeffs[0].abs()).fold(f64::INFINITY, f64::min)
        };
        assert_eq!(best(&before), best(&after));
    }
    assert!(after.models.iter().all(|m| before.models.iter().any(|b| b.complexity == m.complexity)));
}

#[test]
fn test_filter_binds_by_name() {
    let (train, test) = benchmark_data(SyntheticOracle::PmLike).unwrap();
    let ts = run_evolution(&small_cfg(1), &train).unwrap();
    let a = filter_test_tradeoff(&ts, &test).unwrap();
    let order = [2, 0, 3, 1];
    let shuffled = Dataset::from_columns(
        order.iter().map(|&i| test.var_names[i].clone()).collect(),
        order.iter().map(|&i| test.columns[i].clone()).collect(),
        test.y.clone(),
        "pm_like",
    )
    .unwrap();
    let b = filter_test_tradeoff(&ts, &shuffled).unwrap();
    assert_eq!(a, b);
    let missing = Dataset::from_columns(vec!["x1".into()], vec![test.columns[0].clone()], test.y.clone(), "y").unwrap();
    assert!(matches!(filter_test_tradeoff(&ts, &missing), Err(PipelineError::Data(_))));
}

#[test]
fn evolution_front_shape() {
    let (train, _) = benchmark_data(SyntheticOracle::SrpLike).unwrap();
    let ts = run_evolution(&small_cfg(4), &train).unwrap();
    assert_eq!(ts.models[0].complexity, 0.0);
    assert_eq!(ts.models[0].n_bases(), 0);
    for w in ts.models.windows(2) {
        assert!(w[1].complexity > w[0].complexity);
        assert!(w[1].train_error < w[0].train_error);
    }
}

#[test]
fn simplification_contracts() {
    let (train, _) = benchmark_data(SyntheticOracle::SrpLike).unwrap();
    let ts = run_evolution(&small_cfg(2), &train).unwrap();
    let after = simplify_after_generation(&ts, &train).unwrap();
    assert_eq!(after.models[0], ts.models[0], "constant model unchanged");
    let data = TrainData::from_dataset(&train);
    let press_of = |m: &Model| {
        let cols = m.basis_columns(&data.columns, data.n(), ts.scoring.weight_bound);
        press(&RegressionProblem::from_bases(&cols, &data.y).unwrap())
    };
    let floor = canonreg::fit::PRESS_FLOOR * train.y.iter().map(|v| v * v).sum::<f64>();
    for m in &ts.models {
        let s = simplify_model(m, &data, &ts.scoring);
        assert!(s.n_bases() <= m.n_bases());
        let (before, now) = (press_of(m), press_of(&s));
        assert!(now <= before + floor + 1e-9 * before.abs(), "{now} > {before}");
    }
    for w in after.models.windows(2) {
        assert!(w[1].complexity > w[0].complexity && w[1].train_error < w[0].train_error);
    }
}

#[test]
fn export_round_trip() {
    let (train, test) = benchmark_data(SyntheticOracle::PmLike).unwrap();
    let cfg = small_cfg(3);
    let g = Grammar::default_grammar();
    let out = run_pipeline(&cfg, &g, &train, &test).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export(&out.front, dir.path(), &cfg, &g).unwrap();

    let csv = std::fs::read_to_string(dir.path().join("front.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "model_id,complexity,n_bases,train_error_pct,test_error_pct");
    assert_eq!(lines.count(), out.front.len());

    for id in 0..out.front.len() {
        let doc = load_model_document(dir.path().join(format!("model_{id}.json"))).unwrap();
        let m = &out.front.models[id];
        assert_eq!(&doc.model, m);
        let (_, train_err) = doc.evaluate(&train).unwrap();
        let (_, test_err) = doc.evaluate(&test).unwrap();
        assert!((train_err - m.train_error).abs() < 1e-10);
        assert!((test_err - m.test_error.unwrap()).abs() < 1e-10);
        assert_eq!(complexity(&doc.model, doc.w_b, doc.w_vc), m.complexity);
        let text = std::fs::read_to_string(dir.path().join(format!("model_{id}.txt"))).unwrap();
        assert_eq!(text.trim_end(), doc.text(cfg.sig_figs));
    }
    let constant = std::fs::read_to_string(dir.path().join("model_0.txt")).unwrap();
    assert_eq!(constant.trim_end(), format_sig(out.front.models[0].coeffs[0], 3));

    let meta: RunMeta = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta.seed, 3);
    assert_eq!(meta.n_models, out.front.len());
    assert_eq!(meta.grammar_sha256, hex::encode(Sha256::digest(g.source().as_bytes())));
    assert_eq!(meta.config["population"], "40");
}

#[test]
fn log_scaled_target() {
    let (train, test) = benchmark_data(SyntheticOracle::SrpLike).unwrap();
    let (train, test) = (scale_target_log10(&train).unwrap(), scale_target_log10(&test).unwrap());
    let out = run_pipeline(&small_cfg(5), &Grammar::default_grammar(), &train, &test).unwrap();
    assert!(out.front.target_log_scaled);
    assert!(out.front.texts(3).iter().all(|t| t.starts_with("10^(")));
}

#[test]
fn rescoring_reproduces_stored_objectives() {
    let (train, _) = benchmark_data(SyntheticOracle::PmLike).unwrap();
    let ts = run_evolution(&small_cfg(6), &train).unwrap();
    let data = TrainData::from_dataset(&train);
    let scoring = Scoring { ..ts.scoring };
    for m in &ts.models {
        let mut again = Model::unfitted(m.bases.clone());
        score_model(&mut again, &data, &scoring);
        assert_eq!(again.complexity, m.complexity);
        assert_eq!(again.train_error, m.train_error);
    }
}
