use miml::fixtures::{d_easy, easy_bag};
use miml::learners::{
    decide, predict_many, KisarParams, M3MimlParams, MimlBoostParams, MimlKnnParams, MimlRbfParams, MimlSvmParams,
    Payload,
};
use miml::metrics::evaluate_all;
use miml::{predict, train, Algorithm, AlgorithmParams, Bag, Case, Execution, LabelSet, Manifest, MimlDataset};

fn easy_params() -> Vec<AlgorithmParams> {
    vec![
        AlgorithmParams::MimlKnn(MimlKnnParams { r: 3, c: 3, ..Default::default() }),
        AlgorithmParams::M3Miml(M3MimlParams { cost: 1.0, max_iters: 2000, ..Default::default() }),
        AlgorithmParams::MimlRbf(MimlRbfParams::default()),
        AlgorithmParams::MimlBoost(MimlBoostParams { rounds: 5, ..Default::default() }),
        AlgorithmParams::MimlSvm(MimlSvmParams { ratio: 0.5, ..Default::default() }),
        AlgorithmParams::Kisar(KisarParams::default()),
    ]
}

#[test]
fn every_learner_recovers_easy_fixture() {
    let d = d_easy();
    let truth: Vec<LabelSet> = d.cases.iter().map(|c| c.labels.clone()).collect();
    for p in easy_params() {
        let m = train(&d, &p, 11).unwrap();
        let preds = predict_many(&m, &d.bags(), Execution::Sequential).unwrap();
        let scores: Vec<Vec<f64>> = preds.iter().map(|p| p.scores.clone()).collect();
        let decided: Vec<LabelSet> = preds.iter().map(|p| p.decided.clone()).collect();
        let r = evaluate_all(&scores, &decided, &truth, 2).unwrap();
        assert_eq!(r.average_precision, 1.0, "{:?} {:?}", p.algorithm(), scores);
        assert_eq!(r.hamming_loss, 0.0, "{:?} {:?}", p.algorithm(), scores);
    }
}

#[test]
fn pure_label_zero_bag_is_decided_zero() {
    let d = d_easy();
    let bag = easy_bag(&[0], 99);
    for p in easy_params() {
        let m = train(&d, &p, 3).unwrap();
        let pred = predict(&m, &bag).unwrap();
        assert!(pred.scores[0] > 0.0 && pred.scores[1] < 0.0, "{:?} {:?}", p.algorithm(), pred.scores);
        assert_eq!(pred.decided, LabelSet::new(vec![0]));
    }
}

#[test]
fn training_is_deterministic() {
    let d = d_easy();
    for a in Algorithm::ALL {
        let p = a.default_params();
        let p = if a == Algorithm::MimlKnn {
            AlgorithmParams::MimlKnn(MimlKnnParams { r: 3, c: 3, ..Default::default() })
        } else {
            p
        };
        let x = train(&d, &p, 5).unwrap().to_json().unwrap();
        let y = train(&d, &p, 5).unwrap().to_json().unwrap();
        assert_eq!(x, y, "{a:?}");
    }
}

#[test]
fn model_json_round_trips_exactly() {
    let d = d_easy();
    for p in easy_params() {
        let m = train(&d, &p, 8).unwrap();
        let back = miml::TrainedModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), m.to_json().unwrap());
    }
}

fn permuted(bag: &Bag) -> Bag {
    let mut rows: Vec<Vec<f64>> = bag.iter().map(|x| x.to_vec()).collect();
    rows.reverse();
    rows.rotate_left(1);
    Bag::from_rows(rows).unwrap()
}

fn duplicated(bag: &Bag) -> Bag {
    let mut rows: Vec<Vec<f64>> = bag.iter().map(|x| x.to_vec()).collect();
    rows.push(rows[0].clone());
    Bag::from_rows(rows).unwrap()
}

#[test]
fn scores_ignore_instance_order() {
    let d = d_easy();
    let probes = [easy_bag(&[0, 1], 1), easy_bag(&[1], 2)];
    for p in easy_params() {
        let m = train(&d, &p, 4).unwrap();
        for b in &probes {
            let a = predict(&m, b).unwrap().scores;
            let c = predict(&m, &permuted(b)).unwrap().scores;
            for (x, y) in a.iter().zip(&c) {
                assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{:?}", p.algorithm());
            }
        }
    }
}

#[test]
fn max_based_scores_ignore_duplicates() {
    let d = d_easy();
    let b = easy_bag(&[0, 1], 6);
    for p in [
        AlgorithmParams::M3Miml(M3MimlParams::default()),
        AlgorithmParams::Kisar(KisarParams::default()),
    ] {
        let m = train(&d, &p, 4).unwrap();
        assert_eq!(predict(&m, &b).unwrap().scores, predict(&m, &duplicated(&b)).unwrap().scores);
    }
}

#[test]
fn scores_have_label_length_and_are_finite() {
    let d = d_easy();
    let far = Bag::from_rows(vec![vec![1e3, -1e3]]).unwrap();
    for p in easy_params() {
        let m = train(&d, &p, 2).unwrap();
        let pred = predict(&m, &far).unwrap();
        assert_eq!(pred.scores.len(), 2);
        assert!(pred.scores.iter().all(|s| s.is_finite()));
        assert!(!pred.decided.is_empty());
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    let d = d_easy();
    let m = train(&d, &AlgorithmParams::MimlRbf(MimlRbfParams::default()), 1).unwrap();
    let wrong = Bag::from_rows(vec![vec![0.0, 0.0, 0.0]]).unwrap();
    assert!(predict(&m, &wrong).is_err());
}

#[test]
fn iterative_objectives_do_not_increase() {
    let d = d_easy();
    for p in [
        AlgorithmParams::M3Miml(M3MimlParams::default()),
        AlgorithmParams::Kisar(KisarParams::default()),
    ] {
        let m = train(&d, &p, 1).unwrap();
        let trace = match &m.payload {
            Payload::M3Miml(x) => x.objective_trace.clone(),
            Payload::Kisar(x) => x.objective_trace.clone(),
            _ => unreachable!(),
        };
        assert!(trace.len() >= 2);
        assert!(trace.last().unwrap() <= &trace[0]);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].abs(), "{:?}", trace);
        }
    }
}

#[test]
fn m3miml_zero_iterations_falls_back_to_top_label() {
    let d = d_easy();
    let p = AlgorithmParams::M3Miml(M3MimlParams { max_iters: 0, ..Default::default() });
    let m = train(&d, &p, 1).unwrap();
    let Payload::M3Miml(inner) = &m.payload else { unreachable!() };
    assert!(inner.weights.iter().flatten().all(|&w| w == 0.0));
    let pred = predict(&m, &easy_bag(&[1], 3)).unwrap();
    assert_eq!(pred.scores, vec![0.0, 0.0]);
    assert_eq!(pred.decided, LabelSet::new(vec![0]));
}

#[test]
fn boost_ensemble_is_bounded_with_positive_coefficients() {
    let d = d_easy();
    let m = train(&d, &AlgorithmParams::MimlBoost(MimlBoostParams::default()), 1).unwrap();
    let Payload::MimlBoost(inner) = &m.payload else { unreachable!() };
    assert!(!inner.rounds.is_empty() && inner.rounds.len() <= 25);
    assert!(inner.rounds.iter().all(|r| r.coef.is_finite() && r.coef > 0.0));
}

#[test]
fn single_label_training_decides_that_label() {
    let cases = (0..6)
        .map(|i| Case {
            case_id: format!("c{i}"),
            expert_id: "e".into(),
            labels: LabelSet::new(vec![0]),
            bag: Bag::from_rows(vec![vec![i as f64, 1.0], vec![0.5, -(i as f64)]]).unwrap(),
        })
        .collect();
    let d = MimlDataset::new(Manifest::new(2, vec!["a".into(), "b".into()]), cases);
    let probe = Bag::from_rows(vec![vec![2.5, 0.0]]).unwrap();
    let m = train(&d, &AlgorithmParams::MimlKnn(MimlKnnParams { r: 2, c: 2, ..Default::default() }), 0).unwrap();
    assert_eq!(predict(&m, &probe).unwrap().decided, LabelSet::new(vec![0]));
    for b in d.bags() {
        assert_eq!(predict(&m, b).unwrap().decided, LabelSet::new(vec![0]));
    }
}

#[test]
fn fallback_rule_examples() {
    assert_eq!(decide(&[-3.0, -2.0, -0.5, -1.0]), LabelSet::new(vec![2]));
    assert_eq!(decide(&[-3.0, -0.5, -2.0, -0.5]), LabelSet::new(vec![1]));
}
