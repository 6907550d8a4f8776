use rattling_wasm::{pattern_values, profile_values, simulation_values, MAX_EVENTS};

#[test]
fn pattern_layout() {
    let v = pattern_values(0.5, 0.25, 10).unwrap();
    assert_eq!(v.len(), 12);
    assert_eq!(
        &v[..11],
        &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]
    );
    let metric = v[11];
    let brute = (1..=4)
        .map(|i| (2.0 * i as f64 / 10.0 - i as f64 / 4.0).abs())
        .fold(0.0, f64::max);
    assert!((metric - brute).abs() < 1e-15);
    assert!(pattern_values(1.5, 0.0, 10).is_err());
    assert!(pattern_values(0.5, 0.0, 0).is_err());
}

#[test]
fn profile_layout() {
    let v = profile_values(10.0, 5).unwrap();
    assert_eq!(v.len(), 1 + 4 * 5);
    assert!((v[0] - 0.181_010_7).abs() < 1e-6);
    assert!(v[1..].chunks(4).all(|r| r[0] > -1.0 && r[0] < 1.0));
    assert!(profile_values(2.0, 5).is_err());
}

#[test]
fn simulation_layout() {
    let v = simulation_values(1.0, 0.0, 0.1, 25).unwrap();
    assert_eq!(v.len(), 2 + 2 * 25);
    assert!((v[0] - v[1]).abs() / v[1] < 0.05);
    let nodes: Vec<f64> = v[2..].chunks(2).map(|e| e[0]).collect();
    assert_eq!(nodes, (0..25).map(f64::from).collect::<Vec<_>>());
    assert!(simulation_values(1.0, 0.0, 0.1, 5).unwrap()[0].is_nan());
    assert!(simulation_values(1.0, 0.0, 0.1, MAX_EVENTS + 1).is_err());
    assert!(simulation_values(1.0, 0.0, 0.6, 10).is_err());
}
