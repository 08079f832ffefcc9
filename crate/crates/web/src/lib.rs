//! Browser bindings for `multimoments`.
//!
//! The plain functions return `Result<_, String>` and are what the native tests
//! exercise; the `#[wasm_bindgen]` wrappers only translate errors.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use multimoments::{
    central_from_raw, central_moment, moment_via_enumeration, moment_via_mc, pmf, raw_moment,
    raw_moment_via_mgf, validate_params, Exact, MomentError, MomentKind, MultinomialParams, Scalar,
};

/// Support points the page will enumerate before giving up on that oracle.
pub const ENUM_BUDGET: u64 = 200_000;
/// Largest trial count accepted for heatmaps and curves.
pub const MAX_PLOT_M: u64 = 2_000;

fn err(e: MomentError) -> String {
    e.to_string()
}

fn parse_x<S: Scalar>(x: &str) -> Result<Vec<S>, String> {
    x.split(',').map(|v| S::parse_literal(v).map_err(err)).collect()
}

fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| format!("invalid index {v:?}")))
        .collect()
}

fn parse_kind(kind: &str) -> Result<MomentKind, String> {
    match kind {
        "raw" => Ok(MomentKind::Raw),
        "central" => Ok(MomentKind::Central),
        other => Err(format!("unknown moment kind {other:?}")),
    }
}

/// One moment through every route: closed form, enumeration, the MGF jet (raw),
/// the raw-to-central expansion (central) and Monte Carlo. Returns a JSON object.
pub fn moment_report(
    kind: &str,
    m: u64,
    x: &str,
    indices: &str,
    exact: bool,
    samples: u64,
    seed: u64,
) -> Result<String, String> {
    let kind = parse_kind(kind)?;
    let indices = parse_indices(indices)?;
    let mut report = if exact {
        routes(validate_params::<Exact>(m, parse_x(x)?).map_err(err)?, &indices, kind)?
    } else {
        routes(validate_params::<f64>(m, parse_x(x)?).map_err(err)?, &indices, kind)?
    };
    if samples > 0 {
        let params = validate_params::<f64>(m, parse_x(x)?).map_err(err)?;
        let est = moment_via_mc(&params, &indices, kind, samples, seed).map_err(err)?;
        report["mc"] = json!({
            "estimate": est.estimate,
            "std_error": est.std_error,
            "samples": est.n_samples,
            "seed": est.seed,
        });
    }
    Ok(report.to_string())
}

fn routes<S: Scalar>(params: MultinomialParams<S>, indices: &[usize], kind: MomentKind) -> Result<Value, String> {
    let closed = match kind {
        MomentKind::Raw => raw_moment(&params, indices),
        MomentKind::Central => central_moment(&params, indices),
    }
    .map_err(err)?;
    let enumerated = match moment_via_enumeration(&params, indices, kind, ENUM_BUDGET) {
        Ok(v) => Value::String(v.render()),
        Err(MomentError::BudgetExceeded { .. }) => Value::Null,
        Err(e) => return Err(err(e)),
    };
    let (route, value) = match kind {
        MomentKind::Raw => ("mgf", raw_moment_via_mgf(&params, indices)),
        MomentKind::Central => ("expansion", central_from_raw(&params, indices)),
    };
    let mut out = json!({
        "kind": kind.as_str(),
        "mode": S::MODE.as_str(),
        "closed_form": closed.render(),
        "closed_form_f64": closed.to_f64(),
        "enumeration": enumerated,
    });
    out[route] = Value::String(value.map_err(err)?.render());
    Ok(out)
}

/// Probabilities `P(K1 = a, K2 = b)` for `d = 2`, row-major with `b` as the row
/// and `a` as the column, `(m + 1)²` entries. Cells outside the support are NaN.
pub fn pmf_grid(m: u64, x: &str) -> Result<Vec<f64>, String> {
    if m > MAX_PLOT_M {
        return Err(format!("m is capped at {MAX_PLOT_M} for plotting"));
    }
    let params = validate_params::<f64>(m, parse_x(x)?).map_err(err)?;
    if params.d() != 2 {
        return Err(format!("the heatmap needs exactly 2 probabilities, got {}", params.d()));
    }
    let side = m as i64 + 1;
    let mut cells = Vec::with_capacity((side * side) as usize);
    for b in 0..side {
        for a in 0..side {
            cells.push(if a + b <= m as i64 {
                pmf(&params, &[a, b]).map_err(err)?
            } else {
                f64::NAN
            });
        }
    }
    Ok(cells)
}

/// Central moment for `m = 1..=m_max`; entry `k` holds the value at `m = k + 1`.
pub fn central_curve(x: &str, indices: &str, m_max: u64) -> Result<Vec<f64>, String> {
    if m_max == 0 || m_max > MAX_PLOT_M {
        return Err(format!("m_max must lie in 1..={MAX_PLOT_M}"));
    }
    let indices = parse_indices(indices)?;
    let base = validate_params::<f64>(1, parse_x(x)?).map_err(err)?;
    (1..=m_max)
        .map(|m| central_moment(&base.with_m(m).map_err(err)?, &indices).map_err(err))
        .collect()
}

#[wasm_bindgen(js_name = momentReport)]
pub fn moment_report_js(
    kind: &str,
    m: u64,
    x: &str,
    indices: &str,
    exact: bool,
    samples: u64,
    seed: u64,
) -> Result<String, JsError> {
    moment_report(kind, m, x, indices, exact, samples, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pmfGrid)]
pub fn pmf_grid_js(m: u64, x: &str) -> Result<Vec<f64>, JsError> {
    pmf_grid(m, x).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = centralCurve)]
pub fn central_curve_js(x: &str, indices: &str, m_max: u64) -> Result<Vec<f64>, JsError> {
    central_curve(x, indices, m_max).map_err(|e| JsError::new(&e))
}
