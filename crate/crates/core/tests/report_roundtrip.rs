use convmax::constants::{diagonal_profile, verify_sharpness};
use convmax::continuous::{step_function_export, upper_bound_sequence};
use convmax::minimax::{diagonal_constant, grid_oracle, FactorMode, MinimaxConfig, DEFAULT_GRID_BUDGET};
use convmax::poisson_binomial::PBParams;
use convmax::report::*;
use convmax::scalar::rational;
use convmax::sidon::*;
use proptest::prelude::*;
use serde::de::DeserializeOwned;
use std::fmt::Debug;

fn round_trip<T: Exportable + DeserializeOwned + PartialEq + Debug>(value: &T) {
    let text = serde_json::to_string(value).unwrap();
    assert_eq!(&serde_json::from_str::<T>(&text).unwrap(), value);
    let envelope: serde_json::Value = serde_json::from_slice(&export_report(value, Format::Json).unwrap()).unwrap();
    assert_eq!(envelope["schema"], SCHEMA);
    assert_eq!(envelope["kind"], value.kind());
    assert_eq!(&serde_json::from_value::<T>(envelope["data"].clone()).unwrap(), value);
    assert!(!export_report(value, Format::Text).unwrap().is_empty());
}

fn quick() -> MinimaxConfig {
    MinimaxConfig { multistarts: 4, ..MinimaxConfig::default() }
}

#[test]
fn every_report_round_trips() {
    round_trip(&verify_sharpness(3, 2).unwrap());
    round_trip(&diagonal_profile(4).unwrap());
    round_trip(&diagonal_constant(3, 2, &quick()).unwrap());
    round_trip(&grid_oracle(2, 2, 6, FactorMode::General, DEFAULT_GRID_BUDGET).unwrap());
    round_trip(&verify_bound(&CubeSet::full(2).unwrap(), 3).unwrap());
    round_trip(&enumerate_verify(2, 3, &SampleConfig::default()).unwrap());
    round_trip(&max_size_g_sidon(3, 3, 2, &SearchConfig::default()).unwrap());
    round_trip(&upper_bound_sequence(2, 2, &quick()).unwrap());
    round_trip(&step_function_export(&[rational(2, 1), rational(1, 3)], 2).unwrap());
    let p = PBParams::new(vec![rational(1, 3), rational(1, 2), rational(3, 4)]).unwrap();
    let checks = [PbCheck::Unimodal, PbCheck::Ulc, PbCheck::Newton, PbCheck::Ratios, PbCheck::Lagrange];
    round_trip(&pb_report(&p, &checks).unwrap());
}

#[test]
fn csv_and_plot_outputs() {
    let t = upper_bound_sequence(2, 2, &quick()).unwrap();
    let csv = String::from_utf8(export_report(&t, Format::Csv).unwrap()).unwrap();
    assert!(csv.starts_with("m,cbar,bound,converged\n1,4/9,16/9,true\n"));
    let plot = String::from_utf8(export_report(&diagonal_profile(3).unwrap(), Format::Plotdata).unwrap()).unwrap();
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#')).count(), PLOT_SAMPLES);
    assert!(export_report(&verify_sharpness(2, 1).unwrap(), Format::Plotdata).is_err());
}

#[test]
fn run_record_payload_ignores_timestamps() {
    let outputs = serde_json::json!({ "value": 0.5 });
    let a = RunRecord::new(vec!["x".into()], serde_json::json!({}), Some(1), outputs.clone(), 10);
    let mut b = RunRecord::new(vec!["x".into()], serde_json::json!({}), Some(1), outputs, 99);
    b.meta.finished_unix_ms += 5;
    assert_eq!(a.payload(), b.payload());
    let text = serde_json::to_string(&a).unwrap();
    assert_eq!(serde_json::from_str::<RunRecord>(&text).unwrap(), a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn floats_survive_json(x in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let step = step_function_export(&x.iter().map(|v| rational((v * 1e6) as i64, 1_000_000)).collect::<Vec<_>>(), 3).unwrap();
        let text = serde_json::to_string(&step).unwrap();
        prop_assert_eq!(serde_json::from_str::<convmax::continuous::StepFunction>(&text).unwrap(), step);
        let text = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<Vec<f64>>(&text).unwrap(), x);
    }

    #[test]
    fn format_names_round_trip(i in 0usize..4) {
        let f = [Format::Json, Format::Csv, Format::Text, Format::Plotdata][i];
        prop_assert_eq!(f.as_str().parse::<Format>().unwrap(), f);
    }
}
