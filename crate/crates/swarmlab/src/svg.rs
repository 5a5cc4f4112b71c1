//! SVG rendering of a trace: one polyline per robot, arrowheads at the final
//! headings, target markers for sweep scenarios.

use crate::sim::SimTrace;
use crate::sweep::SweepTargets;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a",
];

/// Renders the trajectories; world y points up, so coordinates are emitted
/// with y negated. The viewBox hugs the trace bounding box with a 5% margin.
pub fn render_trajectories(trace: &SimTrace, targets: Option<&SweepTargets>) -> String {
    let n = trace.steps.first().map_or(0, Vec::len);

    let mut world: Vec<(f64, f64)> = trace
        .steps
        .iter()
        .flatten()
        .map(|r| (r.position.x, r.position.y))
        .collect();
    if let Some(t) = targets {
        world.push((t.reference.x, t.reference.y));
        world.extend(t.points.iter().map(|p| (p.x, p.y)));
    }
    if world.is_empty() {
        world.push((0.0, 0.0));
    }
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for &(x, y) in &world {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(-y);
        max_y = max_y.max(-y);
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let margin = 0.05 * span_x.max(span_y);
    let vb = format!(
        "{:.4} {:.4} {:.4} {:.4}",
        min_x - margin,
        min_y - margin,
        span_x + 2.0 * margin,
        span_y + 2.0 * margin
    );
    let stroke = 0.004 * span_x.max(span_y).max(1e-9);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{vb}\">\n"
    ));

    if let Some(t) = targets {
        let r = 2.0 * stroke;
        out.push_str(&format!(
            "  <circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{:.6}\"/>\n",
            t.reference.x, -t.reference.y, r, stroke
        ));
        for p in &t.points {
            out.push_str(&format!(
                "  <circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"#000000\"/>\n",
                p.x, -p.y, r
            ));
        }
    }

    for robot in 0..n {
        let color = PALETTE[robot % PALETTE.len()];
        let points: Vec<String> = trace
            .steps
            .iter()
            .map(|snap| format!("{:.6},{:.6}", snap[robot].position.x, -snap[robot].position.y))
            .collect();
        out.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{:.6}\"/>\n",
            points.join(" "),
            stroke
        ));
    }

    // Arrowheads at the final states.
    if let Some(last) = trace.steps.last() {
        let len = 6.0 * stroke;
        for (robot, state) in last.iter().enumerate() {
            let color = PALETTE[robot % PALETTE.len()];
            let (x, y) = (state.position.x, -state.position.y);
            let h = state.heading;
            let tip = (x + len * h.cos(), y - len * h.sin());
            let left = (
                x + 0.4 * len * (h + 2.5).cos(),
                y - 0.4 * len * (h + 2.5).sin(),
            );
            let right = (
                x + 0.4 * len * (h - 2.5).cos(),
                y - 0.4 * len * (h - 2.5).sin(),
            );
            out.push_str(&format!(
                "  <path d=\"M {:.6} {:.6} L {:.6} {:.6} L {:.6} {:.6} Z\" fill=\"{color}\"/>\n",
                left.0, left.1, tip.0, tip.1, right.0, right.1
            ));
        }
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::sim::RobotState;

    #[test]
    fn one_polyline_per_robot() {
        let mk = |x: f64| -> Vec<RobotState> {
            (0..3)
                .map(|id| RobotState {
                    id,
                    position: Vec2 { x: x + id as f64, y: id as f64 },
                    heading: 0.1,
                })
                .collect()
        };
        let trace = SimTrace {
            steps: vec![mk(0.0), mk(1.0), mk(2.0)],
            weight_matrices: None,
            consensus_step: None,
            cycle_detected: false,
            warnings: vec![],
        };
        let svg = render_trajectories(&trace, None);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
