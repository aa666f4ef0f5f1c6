use econet::ensemble::*;
use econet::metrics::MetricsReport;
use econet::mlp::error_percent;
use econet::preprocess::{assemble, preset, PresetFeature, Transform};
use econet::timeseries::*;
use econet::Error;

fn ranges() -> (MonthRange, MonthRange) {
    (
        MonthRange::new("1992-01".parse().unwrap(), "1999-12".parse().unwrap()).unwrap(),
        MonthRange::new("2000-01".parse().unwrap(), "2003-12".parse().unwrap()).unwrap(),
    )
}

fn bundle(seed: u64) -> SyntheticBundle {
    synthesize_economy(seed, 168, 12, 0.1).unwrap()
}

fn trained(seed: u64) -> (SyntheticBundle, EnsembleModel) {
    let b = bundle(seed);
    let (tr, te) = ranges();
    let m = train_ensemble(&EnsembleSpec::default(), &b.series, TARGET_NAME, tr, te).unwrap();
    (b, m)
}

#[test]
fn report_has_nine_rows_in_order() {
    let (_, m) = trained(1);
    let labels: Vec<&str> = m.reports.iter().map(|(l, _)| l.as_str()).collect();
    assert_eq!(
        labels,
        [
            "Network 1", "Network 2", "Network 3", "Network 4", "Network 5", "Network 6",
            "Network 7", "Network 8", "Master Network"
        ]
    );
    assert_eq!(m.cycle_period, 12);
    assert_eq!(m.master.network.n_inputs(), 8);
}

#[test]
fn master_columns_are_sub_predictions() {
    let (b, m) = trained(2);
    let (_, te) = ranges();
    let inputs = m.master_inputs(&b.series, te).unwrap();
    let subs = m.sub_predictions(&b.series, te).unwrap();
    for (j, (name, s)) in subs.iter().enumerate() {
        assert_eq!(&m.subs[j].name, name);
        assert_eq!(inputs.column(j), s.values());
    }
}

#[test]
fn test_range_prediction_reproduces_report() {
    let (b, m) = trained(3);
    let (tr, te) = ranges();
    let pred = predict_ensemble(&m, &b.series, te).unwrap();
    let actual = b.series[TARGET_NAME].slice(te).unwrap();
    let again = MetricsReport::from_predictions(
        &actual,
        &pred,
        m.master_error_percent(&b.series, tr).unwrap(),
        m.master_error_percent(&b.series, te).unwrap(),
    )
    .unwrap();
    assert_eq!(again, m.reports[8].1);
    assert_eq!(m.evaluate(&b.series).unwrap(), m.reports);
}

#[test]
fn prediction_is_row_wise() {
    let (b, m) = trained(4);
    let (_, te) = ranges();
    let whole = predict_ensemble(&m, &b.series, te).unwrap();
    let (h1, h2) = te.split_at(24).unwrap();
    let mut joined = predict_ensemble(&m, &b.series, h1).unwrap().into_values();
    joined.extend(predict_ensemble(&m, &b.series, h2).unwrap().into_values());
    assert_eq!(whole.values(), joined.as_slice());
    let one = MonthRange::new(te.start, te.start).unwrap();
    assert_eq!(predict_ensemble(&m, &b.series, one).unwrap().len(), 1);
}

#[test]
fn predicting_before_warmup_fails() {
    let (b, m) = trained(5);
    let early = MonthRange::new("1990-01".parse().unwrap(), "1990-12".parse().unwrap()).unwrap();
    assert!(predict_ensemble(&m, &b.series, early).is_err());
}

#[test]
fn test_targets_never_reach_training() {
    let (tr, te) = ranges();
    let b = bundle(6);
    let mut altered = b.series.clone();
    let target = &b.series[TARGET_NAME];
    let values = target
        .iter()
        .map(|(d, v)| if te.contains(d) { v * 1.5 + 7.0 } else { v })
        .collect();
    altered.insert(TARGET_NAME.into(), TimeSeries::new(target.start(), values).unwrap());
    let spec = EnsembleSpec::default();
    let a = train_ensemble(&spec, &b.series, TARGET_NAME, tr, te).unwrap();
    let c = train_ensemble(&spec, &altered, TARGET_NAME, tr, te).unwrap();
    assert_eq!(a.subs, c.subs);
    assert_eq!(a.master, c.master);
    assert_eq!(a.cycle_period, c.cycle_period);
    assert_ne!(a.reports, c.reports);
}

#[test]
fn training_is_deterministic_and_round_trips() {
    let (b, m) = trained(7);
    let (_, again) = trained(7);
    assert_eq!(m, again);
    let dir = tempfile::tempdir().unwrap();
    m.save_dir(dir.path()).unwrap();
    let loaded = EnsembleModel::load_dir(dir.path()).unwrap();
    assert_eq!(loaded, m);
    let (_, te) = ranges();
    assert_eq!(
        predict_ensemble(&loaded, &b.series, te).unwrap(),
        predict_ensemble(&m, &b.series, te).unwrap()
    );
    let files: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(files.len(), 10);
    assert!(files.contains(&MANIFEST_FILE.to_string()));
    assert!(files.contains(&MASTER_FILE.to_string()));
}

#[test]
fn duplicated_sub_gives_master_at_least_its_fit() {
    let (tr, te) = ranges();
    let b = bundle(8);
    let p = preset("network3").unwrap();
    let sub = |name: &str| SubSpec {
        name: name.into(),
        label: name.into(),
        features: p.features.clone(),
        hidden: vec![4],
    };
    let mut spec = EnsembleSpec {
        subs: vec![sub("a"), sub("b")],
        ..EnsembleSpec::default()
    };
    // Zero initial weights make both subs train to the same network.
    spec.sub_config.init_weight_bound = 0.0;
    spec.master_config.max_epochs = 2000;
    let m = train_ensemble(&spec, &b.series, TARGET_NAME, tr, te).unwrap();
    assert_eq!(m.subs[0].network, m.subs[1].network);
    let feats = p.expand(12);
    let sub_m = assemble(&feats, &b.series, TARGET_NAME, Transform::Identity, tr).unwrap();
    let best_sub = m
        .subs
        .iter()
        .map(|e| error_percent(e, &sub_m).unwrap())
        .fold(f64::INFINITY, f64::min);
    let master = m.master_error_percent(&b.series, tr).unwrap();
    assert!(master <= best_sub * 1.05, "master {master} vs sub {best_sub}");
}

#[test]
fn ensemble_validation_and_sub_errors() {
    let (tr, te) = ranges();
    let b = bundle(9);
    let mut spec = EnsembleSpec::default();
    spec.subs.truncate(1);
    assert!(matches!(
        train_ensemble(&spec, &b.series, TARGET_NAME, tr, te),
        Err(Error::Config(_))
    ));

    let mut spec = EnsembleSpec::default();
    spec.subs[2].features = vec![PresetFeature::Plain(econet::preprocess::FeatureSpec::raw("missing", 1))];
    match train_ensemble(&spec, &b.series, TARGET_NAME, tr, te) {
        Err(Error::SubNetwork { index, source }) => {
            assert_eq!(index, 3);
            assert!(matches!(*source, Error::UnknownSeries(_)));
        }
        other => panic!("{other:?}"),
    }
    assert!(train_ensemble(&EnsembleSpec::default(), &b.series, TARGET_NAME, te, tr).is_err());

    // 156 months leave no room for the 14-month warm-up of the cycle features.
    let short = synthesize_economy(9, 156, 12, 0.1).unwrap();
    match train_ensemble(&EnsembleSpec::default(), &short.series, TARGET_NAME, tr, te) {
        Err(Error::SubNetwork { source, .. }) => {
            assert!(matches!(*source, Error::InsufficientHistory { .. }), "{source}")
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn restarts_with_both_selection_modes() {
    let (tr, te) = ranges();
    let b = bundle(10);
    for selection in [Selection::CarveOut, Selection::Leaky] {
        let spec = EnsembleSpec {
            restarts: 2,
            selection,
            ..EnsembleSpec::default()
        };
        let m = train_ensemble(&spec, &b.series, TARGET_NAME, tr, te).unwrap();
        assert_eq!(m.reports.len(), 9);
        assert!(m.subs.iter().all(|e| e.train_range == tr));
    }
}
