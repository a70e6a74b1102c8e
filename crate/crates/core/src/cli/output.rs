//! CSV and JSON rendering.

use serde_json::{json, Value};

use crate::correlation::CorrelationBreakdown;
use crate::entanglement::{DmaxResult, PairEvaluation, SweepTable};
use crate::error::Error;
use crate::geometry::{ConeParameter, PairConfig};
use crate::special::Complex;

use super::VERSION;

pub const SWEEP_COLUMNS: &str =
    "param,P_A_per_lambda2,P_B_per_lambda2,abs_X_per_lambda2,concurrence_per_lambda2,diverged";
pub const DMAX_COLUMNS: &str = "param,d_max_sigma,found";

pub fn csv_preamble(columns: &str) -> String {
    format!("# conical-harvest v{VERSION}\n{columns}\n")
}

/// Twelve significant digits; `nan` for values that were not computed.
pub fn number(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.11e}"),
        _ => "nan".to_string(),
    }
}

/// CSV for a single-alignment sweep.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = csv_preamble(SWEEP_COLUMNS);
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            number(Some(row.param)),
            number(row.p_a),
            number(row.p_b),
            number(row.abs_x),
            number(row.concurrence),
            row.diverged
        ));
    }
    out
}

pub fn dmax_csv(ls: &[f64], results: &[DmaxResult]) -> String {
    let mut out = csv_preamble(DMAX_COLUMNS);
    for (l, r) in ls.iter().zip(results) {
        out.push_str(&format!("{},{},{}\n", number(Some(*l)), number(r.d_max), r.d_max.is_some()));
    }
    out
}

pub fn complex(z: Complex) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn correlation_json(c: &CorrelationBreakdown) -> Value {
    json!({
        "x_flat": complex(c.x_flat),
        "x_images": complex(c.x_images),
        "x_integral": complex(c.x_integral),
        "total": complex(c.total),
        "images": c.images,
        "integral_error": c.integral_error,
    })
}

pub fn compute_json(config: &PairConfig, nu: ConeParameter, eval: &PairEvaluation) -> Value {
    let r = &eval.result;
    json!({
        "version": VERSION,
        "input": {
            "alignment": config.alignment,
            "nu": nu.value(),
            "l": config.l,
            "d": config.d,
            "gap": config.gap,
        },
        "P_A": r.p_a,
        "P_B": r.p_b,
        "abs_X": r.abs_x,
        "concurrence": r.concurrence,
        "diverged": r.diverged,
        "breakdown": {
            "response_a": eval.response_a,
            "response_b": eval.response_b,
            "correlation": correlation_json(&eval.correlation),
        },
    })
}

pub fn sweep_json(table: &SweepTable, meta: Value) -> Value {
    json!({
        "version": VERSION,
        "input": meta,
        "axis": table.axis,
        "unit": table.unit,
        "alignments": table.alignments,
        "rows": table.rows,
    })
}

pub fn error_json(e: &Error) -> Value {
    let mut body = json!({ "kind": e.kind(), "message": e.to_string() });
    if let Error::DivergentOverlap { image, argument } = e {
        body["image"] = json!(image);
        body["argument"] = json!(argument);
    }
    json!({ "error": body })
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_twelve_significant_digits() {
        assert_eq!(number(Some(0.066267183029373795)), "6.62671830294e-2");
        assert_eq!(number(Some(-1.0)), "-1.00000000000e0");
        assert_eq!(number(None), "nan");
        assert_eq!(number(Some(f64::INFINITY)), "nan");
    }

    #[test]
    fn overlap_errors_carry_the_image() {
        let v = error_json(&Error::DivergentOverlap { image: Some(2), argument: 0.0 });
        assert_eq!(v["error"]["kind"], "divergent_overlap");
        assert_eq!(v["error"]["image"], 2);
    }
}
