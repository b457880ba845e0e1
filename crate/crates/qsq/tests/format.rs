//! JSON round trips and validation of model and bundle files.

use qsq::format::*;
use qsq_core::adversaries::{AdversaryKind, BaseModel};
use qsq_core::gates::{build_cl, build_s, build_u};
use qsq_core::instructions::{gen_x2, gen_xu, ExpectedOutcomeTable};
use qsq_core::{c64, Matrix};

#[test]
fn matrices_round_trip() {
    let m = Matrix::from_vec(2, 3, (0..6).map(|k| c64(k as f64, -(k as f64) / 3.0)).collect()).unwrap();
    let json = matrix_to_json(&m);
    assert_eq!(json[1][2], [5.0, -5.0 / 3.0]);
    assert_eq!(matrix_from_json(&json).unwrap(), m);
    assert!(matrix_from_json(&vec![]).is_err());
    assert!(matrix_from_json(&vec![vec![[1.0, 0.0]], vec![]]).is_err());
}

#[test]
fn models_round_trip_through_text() {
    for m in [build_s(1).unwrap(), build_cl(2).unwrap(), build_u(2).unwrap()] {
        let file = ModelFile::from_model(&m);
        let text = to_json_string(&file);
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let rebuilt = back.to_model().unwrap();
        assert_eq!(ModelFile::from_model(&rebuilt), file);
        let labels: Vec<_> = rebuilt.alphabet().map(|l| l.as_str().to_string()).collect();
        assert_eq!(labels, file.channels.keys().cloned().collect::<Vec<_>>());
    }
}

#[test]
fn invalid_models_are_rejected() {
    let good = ModelFile::from_model(&build_s(1).unwrap());
    let mut wrong_dim = good.clone();
    wrong_dim.dim = 4;
    assert!(matches!(wrong_dim.to_model(), Err(FormatError::Invalid(_))));
    let mut not_tp = good.clone();
    not_tp.channels[0][0][0][0] = [2.0, 0.0];
    assert!(not_tp.to_model().is_err());
    let mut bad_povm = good.clone();
    bad_povm.povm.pop();
    assert!(bad_povm.to_model().is_err());
    let mut bad_label = good;
    bad_label.channels.insert("bad label".into(), vec![vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]]]);
    assert!(bad_label.to_model().is_err());
}

#[test]
fn bundles_round_trip() {
    let table = ExpectedOutcomeTable::from_target(&build_s(2).unwrap(), &gen_x2(), 1e-9).unwrap();
    let file = BundleFile::from_table(&table);
    assert_eq!(file.strings.len(), 19);
    assert_eq!(file.strings[0], "ε");
    let back: BundleFile = serde_json::from_str(&to_json_string(&file)).unwrap();
    assert_eq!(back.to_table().unwrap(), table);
    let (_, xu) = gen_xu(2).unwrap();
    assert_eq!(BundleFile::from_table(&xu).to_table().unwrap(), xu);
}

#[test]
fn inconsistent_bundles_are_rejected() {
    let table = ExpectedOutcomeTable::from_target(&build_s(2).unwrap(), &gen_x2(), 1e-9).unwrap();
    let file = BundleFile::from_table(&table);
    let mut missing = file.clone();
    missing.strings.push("s_a s_a s_a".into());
    assert!(missing.to_table().is_err());
    let mut extra = file.clone();
    extra.strings.pop();
    assert!(extra.to_table().is_err());
    let mut empty = file;
    let key = empty.strings[1].clone();
    empty.table[&key].allowed_values.clear();
    assert!(empty.to_table().is_err());
}

#[test]
fn adversary_files_parse() {
    let f: AdversaryFile = serde_json::from_str(r#"{"kind":"depolarizing","base":"s","n":2,"strength":0.25}"#).unwrap();
    let spec = f.to_spec().unwrap();
    assert_eq!(spec.base, BaseModel::S(2));
    assert_eq!(spec.kind, AdversaryKind::Depolarizing { strength: 0.25 });
    let no_angle = AdversaryFile { kind: "overrotation".into(), base: "s".into(), n: 1, angle: None, strength: None };
    assert!(no_angle.to_spec().is_err());
    let unknown = AdversaryFile { kind: "magic".into(), ..no_angle.clone() };
    assert!(unknown.to_spec().is_err());
    assert!(parse_base("q", 1).is_err());
    assert_eq!(parse_base("sy", 3).unwrap(), BaseModel::Sy(3));
    assert!(!to_json_string(&no_angle).contains("angle"));
}

#[test]
fn files_on_disk() {
    let dir = std::env::temp_dir().join(format!("qsq-format-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.json");
    let m = build_s(2).unwrap();
    write_json(&path, &ModelFile::from_model(&m)).unwrap();
    assert_eq!(ModelFile::from_model(&read_model(&path).unwrap()), ModelFile::from_model(&m));
    std::fs::write(&path, "{ not json").unwrap();
    assert!(matches!(read_model(&path), Err(FormatError::Json { .. })));
    assert!(matches!(read_model(&dir.join("missing.json")), Err(FormatError::Io { .. })));
    std::fs::remove_dir_all(&dir).unwrap();
}
