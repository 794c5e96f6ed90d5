use qcvrp::{generate_instance, Error, Instance};

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let inst = generate_instance(7, 5, 25, 1, 15).unwrap();
    inst.save(&path).unwrap();
    let back = Instance::load(&path).unwrap();
    assert_eq!(back.coords(), inst.coords());
    assert_eq!(back.demands(), inst.demands());
    assert_eq!(back.capacity(), 25);
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(back.dist(i, j), inst.dist(i, j));
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    generate_instance(3, 6, 25, 1, 15)
        .unwrap()
        .save(&a)
        .unwrap();
    generate_instance(3, 6, 25, 1, 15)
        .unwrap()
        .save(&b)
        .unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn missing_file_names_the_path() {
    let err = Instance::load("/definitely/not/here.json").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/definitely/not/here.json"));
}

#[test]
fn bad_field_reports_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let inst = generate_instance(1, 2, 25, 1, 15).unwrap();
    let text = inst
        .to_json()
        .replacen("\"capacity\": 25", "\"capacity\": \"lots\"", 1);
    assert_ne!(text, inst.to_json());
    std::fs::write(&path, text).unwrap();
    match Instance::load(&path).unwrap_err() {
        Error::Schema { path, .. } => assert_eq!(path, "capacity"),
        other => panic!("{other:?}"),
    }
}
