use batchrisk::core::complexity::LossTable;
use batchrisk::core::hypotheses::{generate, SyntheticConfig, Task};
use batchrisk::core::{EvalSet, LabeledPrediction, LossKind};
use batchrisk::io::{
    dataset_csv_string, eval_csv_string, loss_table_csv, read_dataset_csv, read_eval_csv,
    read_loss_table,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn eval_csv_round_trips_bit_for_bit(items in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..40)) {
        let set = EvalSet::new(items.iter().map(|&(p, y)| LabeledPrediction::new(p, y)).collect()).unwrap();
        let text = eval_csv_string(&set);
        let back = read_eval_csv(text.as_bytes(), "mem", None).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn loss_table_round_trips(rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 10), 1..6)) {
        // C(5, 2) = 10 columns
        let table = LossTable::from_raw_rows(&rows, 5, 2).unwrap();
        let (text, sidecar) = loss_table_csv(&table, Some(LossKind::Mse));
        let back = read_loss_table(text.as_bytes(), "mem", &sidecar).unwrap();
        prop_assert_eq!(back.raw_rows(), table.raw_rows());
        prop_assert_eq!(back.scale(), table.scale());
    }
}

#[test]
fn dataset_round_trips() {
    let config = SyntheticConfig {
        n_train: 25,
        n_test: 5,
        task: Task::ClassificationSign,
        noise: 0.2,
        feature_dim: 3,
        seed: 4,
    };
    let (train, _) = generate(&config).unwrap();
    let text = dataset_csv_string(&train);
    assert!(text.starts_with("f0,f1,f2,label\n"));
    let back = read_dataset_csv(text.as_bytes(), "mem", Task::ClassificationSign).unwrap();
    assert_eq!(back, train);
}

#[test]
fn parse_errors_name_the_row() {
    let err = read_eval_csv("prediction,label\n0.1,0\n0.2,oops\n".as_bytes(), "preds.csv", None)
        .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("preds.csv") && msg.contains("row 2"), "{msg}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn bad_inputs_are_rejected() {
    for text in ["", "prediction,label\n", "pred,label\n0,1\n", "prediction,label\nNaN,1\n", "prediction,label\n0.5,inf\n"] {
        let err = read_eval_csv(text.as_bytes(), "x", None).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text:?}: {err}");
    }
    // a mean-valued label is fine for mse but not for the 0-1 loss
    let text = "prediction,label\n0.5,0.5\n";
    assert!(read_eval_csv(text.as_bytes(), "x", Some(LossKind::Mse)).is_ok());
    assert!(read_eval_csv(text.as_bytes(), "x", Some(LossKind::ZeroOne)).is_err());
}
