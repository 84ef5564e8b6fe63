use nucleeg::classify::CmmdcModel;
use nucleeg::Error;
use proptest::prelude::*;

fn labelled(rows: &[(&str, [f64; 2])]) -> (Vec<Vec<f64>>, Vec<String>) {
    rows.iter().map(|(l, v)| (v.to_vec(), l.to_string())).unzip()
}

#[test]
fn nearest_mean_fixture() {
    let (f, l) = labelled(&[("one", [0.0, 0.0]), ("two", [4.0, 0.0])]);
    let m = CmmdcModel::fit(&f, &l).unwrap();
    assert_eq!(m.predict(&[1.0, 0.0]).unwrap(), "one");
    assert_eq!(m.distances(&[1.0, 0.0]).unwrap(), (1.0, 3.0));
    assert_eq!(m.predict(&[2.0, 0.0]).unwrap(), "one");
    assert_eq!(m.predict(&[3.0, 0.0]).unwrap(), "two");
    assert!(m.score(&[3.0, 0.0]).unwrap() > 0.0);
}

#[test]
fn model_round_trips_through_json() {
    let (f, l) = labelled(&[("x", [1.5, 2.0]), ("y", [3.0, -1.0]), ("x", [0.5, 1.0])]);
    let m = CmmdcModel::fit(&f, &l).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    m.save(&path).unwrap();
    let back = CmmdcModel::load(&path).unwrap();
    assert_eq!(back, m);
    assert!(m.to_json().contains("\"metric\": \"euclidean\""));
}

#[test]
fn wrong_dimension_and_class_count_are_rejected() {
    let (f, l) = labelled(&[("x", [1.0, 2.0]), ("y", [3.0, 4.0])]);
    let m = CmmdcModel::fit(&f, &l).unwrap();
    assert!(m.predict(&[1.0]).is_err());
    let (f, l) = labelled(&[("x", [1.0, 2.0]), ("x", [3.0, 4.0])]);
    assert!(matches!(CmmdcModel::fit(&f, &l), Err(Error::ClassCount { .. })));
}

proptest! {
    #[test]
    fn prediction_is_nearest_mean(
        a in proptest::collection::vec(proptest::array::uniform3(-50.0f64..50.0), 1..6),
        b in proptest::collection::vec(proptest::array::uniform3(-50.0f64..50.0), 1..6),
        x in proptest::array::uniform3(-60.0f64..60.0),
    ) {
        let features: Vec<Vec<f64>> = a.iter().chain(&b).map(|v| v.to_vec()).collect();
        let labels: Vec<&str> = a.iter().map(|_| "a").chain(b.iter().map(|_| "b")).collect();
        let m = CmmdcModel::fit(&features, &labels).unwrap();
        let dist = |mean: &[f64]| mean.iter().zip(&x).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let (d1, d2) = (dist(&m.means[0]), dist(&m.means[1]));
        let expected = if d2 < d1 { "b" } else { "a" };
        prop_assert_eq!(m.predict(&x).unwrap(), expected);
        prop_assert!((m.score(&x).unwrap() - (d1 - d2)).abs() <= 1e-9 * (d1 + d2).max(1.0));
    }
}
