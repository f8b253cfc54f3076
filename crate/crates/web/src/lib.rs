//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript glue beyond `JSON.parse`.

use gwpoly::birthday::{default_matching, run_birthday, BirthdayParams};
use gwpoly::gwidth::{fit_ladder, ladder_row, PolyMap};
use gwpoly::randsets::{expected_xk, sample_subset_with, ApCounter, RandomSetParams};
use gwpoly::rng::map_streams;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn to_js(e: gwpoly::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Largest hypercube dimension the page will enumerate.
pub const MAX_DEMO_N: usize = 16;

pub fn birthday_curve_json(r: usize, n: usize, points: usize, samples: usize, seed: u64) -> gwpoly::Result<Value> {
    let base = BirthdayParams::new(r, n)?;
    let matching = default_matching(n, r)?;
    let points = points.clamp(2, 40);
    let top = (2 * base.m).max(points);
    let mut rows = Vec::with_capacity(points);
    for i in 1..=points {
        let m = (top * i / points).max(1);
        let params = base.with_m(m)?;
        let rep = run_birthday(&params, &matching, samples, seed)?;
        rows.push(json!({
            "m": m,
            "p_good": rep.p_good.mean,
            "se_good": rep.p_good.std_error,
            "mean_phi": rep.mean_phi.mean,
        }));
    }
    Ok(json!({ "r": r, "n": n, "default_m": base.m, "s": base.s, "rows": rows }))
}

pub fn gw_ladder_json(
    family: &str,
    sizes: &[usize],
    k: usize,
    d: usize,
    t: usize,
    samples: usize,
    seed: u64,
) -> gwpoly::Result<Value> {
    if let Some(&n) = sizes.iter().find(|&&n| n > MAX_DEMO_N) {
        return Err(gwpoly::Error::param("n", format!("{n} exceeds the demo limit {MAX_DEMO_N}")));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let map = match family {
            "identity" => PolyMap::identity(n)?,
            "random" => PolyMap::random(n, k, d, t, gwpoly::rng::derive_seed(seed, n as u64))?,
            other => return Err(gwpoly::Error::param("family", format!("unknown family `{other}`"))),
        };
        rows.push(ladder_row(&map, samples, seed)?);
    }
    let fit = fit_ladder(&rows)?;
    Ok(json!({ "rows": rows, "fit": fit }))
}

pub fn ap_histogram_json(modulus: usize, p: f64, k: usize, delta: f64, samples: usize, seed: u64) -> gwpoly::Result<Value> {
    let params = RandomSetParams::new(modulus, p, seed)?;
    if samples == 0 {
        return Err(gwpoly::Error::param("samples", "must be positive"));
    }
    let counter = ApCounter::new(modulus, k)?;
    let counts = map_streams(samples, seed, |_, rng| {
        counter.count_mask(sample_subset_with(modulus, p, rng).to_mask())
    });
    let max = counts.iter().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max + 1];
    for &c in &counts {
        hist[c as usize] += 1;
    }
    let mean = expected_xk(&params, k);
    let threshold = (1.0 + delta) * mean;
    let tail = counts.iter().filter(|&&c| c as f64 >= threshold).count() as f64 / samples as f64;
    Ok(json!({
        "N": modulus,
        "k": k,
        "expected": mean,
        "threshold": threshold,
        "tail": tail,
        "histogram": hist,
    }))
}

/// `Pr[1 <= φ <= s]` and `E φ` over a range of `m`, up to twice the default.
#[wasm_bindgen]
pub fn birthday_curve(r: usize, n: usize, points: usize, samples: usize, seed: u64) -> Result<String, JsValue> {
    birthday_curve_json(r, n, points, samples, seed)
        .map(|v| v.to_string())
        .map_err(to_js)
}

/// Gaussian width against the bound for each size in the comma-separated
/// `sizes`.
#[wasm_bindgen]
pub fn gw_ladder(family: &str, sizes: &str, k: usize, d: usize, t: usize, samples: usize, seed: u64) -> Result<String, JsValue> {
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| JsValue::from_str(&format!("sizes: {e}")))?;
    gw_ladder_json(family, &sizes, k, d, t, samples, seed)
        .map(|v| v.to_string())
        .map_err(to_js)
}

/// Histogram of `X_k` over random subsets of `Z/NZ` with the upper tail at
/// `(1+δ) E X_k`.
#[wasm_bindgen]
pub fn ap_histogram(modulus: usize, p: f64, k: usize, delta: f64, samples: usize, seed: u64) -> Result<String, JsValue> {
    ap_histogram_json(modulus, p, k, delta, samples, seed)
        .map(|v| v.to_string())
        .map_err(to_js)
}
