//! Trace and report serialization: CSV trace, JSON summary, and the
//! running-product diagnostics curves.

use serde_json::json;

use crate::analysis::ProductStep;
use crate::sim::{ComparisonRow, SimTrace};

/// Nine-significant-digit CSV with header `step,id,x,y,theta`.
pub fn trace_csv(trace: &SimTrace) -> String {
    let mut out = String::from("step,id,x,y,theta\n");
    for (step, snapshot) in trace.steps.iter().enumerate() {
        for r in snapshot {
            out.push_str(&format!(
                "{},{},{:.8e},{:.8e},{:.8e}\n",
                step, r.id, r.position.x, r.position.y, r.heading
            ));
        }
    }
    out
}

/// Run summary as JSON: `{consensus_step, cycle_detected, final_headings,
/// warnings}`.
pub fn summary_json(trace: &SimTrace) -> String {
    let value = json!({
        "consensus_step": trace.consensus_step,
        "cycle_detected": trace.cycle_detected,
        "final_headings": trace.final_headings(),
        "warnings": trace.warnings,
    });
    serde_json::to_string_pretty(&value).expect("summary serializes")
}

/// Product diagnostics as CSV: `step,rank,kappa`.
pub fn diagnostics_csv(steps: &[ProductStep]) -> String {
    let mut out = String::from("step,rank,kappa\n");
    for s in steps {
        out.push_str(&format!("{},{},{:.8e}\n", s.step, s.rank, s.kappa));
    }
    out
}

/// Controller comparison as CSV: `controller,seed,consensus_step` (empty
/// when the run hit max_steps without consensus).
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("controller,seed,consensus_step\n");
    for row in rows {
        match row.consensus_step {
            Some(step) => out.push_str(&format!("{},{},{}\n", row.controller, row.seed, step)),
            None => out.push_str(&format!("{},{},\n", row.controller, row.seed)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::sim::RobotState;

    fn tiny_trace() -> SimTrace {
        SimTrace {
            steps: vec![vec![RobotState {
                id: 0,
                position: Vec2 { x: 1.0, y: -2.5 },
                heading: 0.5,
            }]],
            weight_matrices: None,
            consensus_step: Some(0),
            cycle_detected: false,
            warnings: vec!["note".into()],
        }
    }

    #[test]
    fn csv_format() {
        let csv = trace_csv(&tiny_trace());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,id,x,y,theta"));
        let row = lines.next().unwrap();
        assert_eq!(row, "0,0,1.00000000e0,-2.50000000e0,5.00000000e-1");
    }

    #[test]
    fn summary_fields() {
        let text = summary_json(&tiny_trace());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["consensus_step"], 0);
        assert_eq!(v["cycle_detected"], false);
        assert_eq!(v["final_headings"][0], 0.5);
        assert_eq!(v["warnings"][0], "note");
    }
}
