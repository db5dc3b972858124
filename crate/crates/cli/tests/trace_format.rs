use std::collections::BTreeMap;

use krybound_cli::trace::{Trace, TraceRow, TraceValue};
use krybound_core::DoubleDouble;
use proptest::prelude::*;

fn value() -> impl Strategy<Value = Option<TraceValue>> {
    prop_oneof![
        Just(None),
        (-1e300f64..1e300).prop_map(|x| Some(TraceValue::from_real(x).unwrap())),
        (1e-300f64..1e300, -1e-17f64..1e-17).prop_map(|(hi, lo)| {
            let x = DoubleDouble::from(hi) + DoubleDouble::from(lo * hi);
            Some(TraceValue::from_real(x).unwrap())
        }),
    ]
}

fn row() -> impl Strategy<Value = TraceRow> {
    (value(), value(), value(), value(), value(), value()).prop_map(|(a, b, c, d, e, f)| TraceRow {
        k: 0,
        residual_norm: a,
        preconditioned_residual_norm: b,
        normal_residual_norm: c,
        bound_theorem1: d,
        bound_cluster: e,
        estimate_first_order: f,
    })
}

fn trace() -> impl Strategy<Value = Trace> {
    (
        proptest::collection::btree_map("[a-z_]{1,8}", "[ -~]{0,16}", 0..4),
        proptest::collection::vec(row(), 0..12),
    )
        .prop_map(|(metadata, mut rows): (BTreeMap<String, String>, Vec<TraceRow>)| {
            for (k, r) in rows.iter_mut().enumerate() {
                r.k = k;
            }
            Trace { metadata, rows }
        })
}

proptest! {
    #[test]
    fn csv_round_trip(t in trace()) {
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        prop_assert_eq!(Trace::read_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn json_round_trip(t in trace()) {
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        prop_assert_eq!(Trace::read_json(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn stored_text_parses_to_nearby_value(x in 1e-300f64..1e300) {
        let v = TraceValue::from_real(x).unwrap();
        prop_assert_eq!(v.to_f64(), x);
    }
}
