use leakctl_wasm::{offset_sweep, optimize, population_trajectory};
use serde_json::Value;

#[test]
fn sweep_returns_requested_points_in_display_units() {
    let v: Value = serde_json::from_str(&offset_sweep("not", "phase", -0.1, 0.1, 11).unwrap()).unwrap();
    assert_eq!(v["param"], "phase");
    assert_eq!(v["x"].as_array().unwrap().len(), 11);
    assert!((v["x"][0].as_f64().unwrap() + 0.1).abs() < 1e-12);
    assert!(v["fidelity"].as_array().unwrap().iter().all(|f| f.as_f64().unwrap() <= 1.0));
}

#[test]
fn trajectory_populations_sum_to_one() {
    let v: Value = serde_json::from_str(&population_trajectory("stirap", 0.0, 0.0, 0.0, 100).unwrap()).unwrap();
    assert_eq!(v["labels"].as_array().unwrap().len(), 4);
    let pops = v["populations"].as_array().unwrap();
    assert!(pops.len() > 2);
    for row in pops {
        let total: f64 = row.as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn optimisation_improves_the_not_gate() {
    let v: Value = serde_json::from_str(&optimize("not", 3).unwrap()).unwrap();
    assert!(v["tuned"].as_f64().unwrap() > v["uncorrected"].as_f64().unwrap());
}
