use painleve_ds_web::{heisenberg_summary, integrate_reference, weyl_image};
use serde_json::Value;

#[test]
fn heisenberg_json() {
    let v: Value = serde_json::from_str(&heisenberg_summary("2,2,1").unwrap()).unwrap();
    assert_eq!(v["N"], 4);
    assert_eq!(v["s"], serde_json::json!([2, 0, 1, 1, 0]));
    assert!(heisenberg_summary("0").is_err());
}

#[test]
fn trajectory_json() {
    let v: Value = serde_json::from_str(&integrate_reference("3,3", "", 2.0, 3.0, 11).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
    assert_eq!(v["columns"][5], "w3");
    assert_eq!(v["termination"], "reached_end");
    assert!(v["max_residual"].as_f64().unwrap() < 1e-6);
    assert!(integrate_reference("3,3", "", 0.5, 2.0, 11).is_err());
    assert!(integrate_reference("2,2", "0.3,0.1,5", 2.0, 3.0, 5).is_err());
}

#[test]
fn weyl_json() {
    let a = "1/6,1/6,1/6,1/6,1/6,1/6";
    let v: Value = serde_json::from_str(&weyl_image("2", "1,-1,2,3", "3", a, "0").unwrap()).unwrap();
    assert_eq!(v["p"][0], "-11/12");
    assert_eq!(v["alphas"][2], "-1/6");
    assert!(weyl_image("0", "2,1,2,1", "3", a, "0").unwrap_err().contains("q1-q2"));
}
