//! wasm-bindgen exports for the static page in `www/`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use painleve_ds::exact_numerics::Rational;
use painleve_ds::flow_engine::{integrate, reference_start, residual_along, Tolerances};
use painleve_ds::heisenberg::{summarize, Partition};
use painleve_ds::painleve_core::{PainleveParams, PhasePoint, Reduction, SystemId};
use painleve_ds::weyl_symmetry::{apply_word, WeylWord};

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn rationals(s: &str) -> Result<Vec<Rational>, String> {
    s.split(',').map(|x| x.parse::<Rational>().map_err(|e| e.to_string())).collect()
}

pub fn heisenberg_summary(partition: &str) -> Result<String, String> {
    let p: Partition = partition.parse().map_err(|e: painleve_ds::Error| e.to_string())?;
    json(&summarize(&p).map_err(|e| e.to_string())?)
}

#[derive(Serialize)]
struct Curve {
    system: SystemId,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    termination: String,
    message: Option<String>,
    max_residual: Option<f64>,
}

/// Reference start of a reduction, moved to `point` (q1,p1[,q2,p2]) when
/// given, integrated from t0 to t1 and resampled on `grid` points.
pub fn integrate_reference(partition: &str, point: &str, t0: f64, t1: f64, grid: usize) -> Result<String, String> {
    let red: Reduction = partition.parse().map_err(|e: painleve_ds::Error| e.to_string())?;
    let (pb, mut x0, g0) = reference_start(red, t0).map_err(|e| e.to_string())?;
    if !point.trim().is_empty() {
        let v: Vec<f64> = point
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("not a number: `{x}`")))
            .collect::<Result<_, _>>()?;
        if v.len() != 2 * red.system().pairs() {
            return Err(format!("expected {} coordinates", 2 * red.system().pairs()));
        }
        x0 = PhasePoint::from_interleaved(&v, t0);
    }
    let tr = integrate(&pb, &x0, &g0, t1, Tolerances::default()).map_err(|e| e.to_string())?;
    let (a, b) = (tr.samples[0].t, tr.last().t);
    let n = grid.max(2);
    let rows = (0..n)
        .filter_map(|k| tr.interpolate(a + (b - a) * k as f64 / (n - 1) as f64))
        .map(|s| {
            let mut row = vec![s.t];
            for (q, p) in s.q.iter().zip(&s.p) {
                row.push(*q);
                row.push(*p);
            }
            row.extend(s.gauge);
            row
        })
        .collect();
    let curve = Curve {
        system: tr.system,
        columns: tr.csv_header().split(',').map(String::from).collect(),
        rows,
        termination: serde_json::to_value(tr.termination).map_err(|e| e.to_string())?.as_str().unwrap_or("").into(),
        message: tr.message.clone(),
        max_residual: residual_along(&tr, red).ok().map(|r| r.max_residual),
    };
    json(&curve)
}

#[derive(Serialize)]
struct WeylImage {
    word: String,
    q: Vec<Rational>,
    p: Vec<Rational>,
    t: Rational,
    alphas: Vec<Rational>,
    eta: Rational,
}

/// Exact image of (q1,p1,q2,p2) at time t under a word in r0..r5.
pub fn weyl_image(word: &str, point: &str, t: &str, alphas: &str, eta: &str) -> Result<String, String> {
    let w: WeylWord = word.parse().map_err(|e: painleve_ds::Error| e.to_string())?;
    let v = rationals(point)?;
    if v.len() != 4 {
        return Err("expected q1,p1,q2,p2".into());
    }
    let t: Rational = t.parse().map_err(|e: painleve_ds::Error| e.to_string())?;
    let eta: Rational = eta.parse().map_err(|e: painleve_ds::Error| e.to_string())?;
    let params = PainleveParams::new(SystemId::CP6, rationals(alphas)?, Some(eta)).map_err(|e| e.to_string())?;
    let (y, np) = apply_word(&w, &PhasePoint::from_interleaved(&v, t), &params).map_err(|e| e.to_string())?;
    json(&WeylImage { word: w.to_string(), q: y.q, p: y.p, t: y.t, alphas: np.alphas.clone(), eta: np.eta() })
}

#[wasm_bindgen]
pub fn heisenberg(partition: &str) -> Result<String, JsValue> {
    to_js(heisenberg_summary(partition))
}

#[wasm_bindgen]
pub fn trajectory(partition: &str, point: &str, t0: f64, t1: f64, grid: usize) -> Result<String, JsValue> {
    to_js(integrate_reference(partition, point, t0, t1, grid))
}

#[wasm_bindgen]
pub fn weyl(word: &str, point: &str, t: &str, alphas: &str, eta: &str) -> Result<String, JsValue> {
    to_js(weyl_image(word, point, t, alphas, eta))
}
