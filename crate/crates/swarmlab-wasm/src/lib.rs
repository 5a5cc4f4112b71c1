//! Browser demo bindings: three interactive operations, each taking and
//! returning JSON strings so the page needs no framework and the logic runs
//! identically in host-side tests.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use swarmlab::analysis::analyze;
use swarmlab::geometry::Vec2;
use swarmlab::kernels::Bias;
use swarmlab::sim::{
    run, Controller, GuardConfig, InitialStates, PositionBox, RobotState, Scenario, SimTrace,
    SweepSetup,
};
use swarmlab::sweep::{emergent_targets, BoundarySegment, Side};
use swarmlab::graph::SwarmParams;

fn err(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// Downsampled per-step states: `[[x, y, theta], ...]` per kept step.
fn trace_frames(trace: &SimTrace, max_frames: usize) -> Value {
    let total = trace.steps.len();
    let stride = total.div_ceil(max_frames).max(1);
    let frames: Vec<Value> = trace
        .steps
        .iter()
        .enumerate()
        .filter(|(k, _)| k % stride == 0 || *k == total - 1)
        .map(|(_, snap)| {
            Value::Array(
                snap.iter()
                    .map(|r| json!([r.position.x, r.position.y, r.heading]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(frames)
}

fn spread_curve(trace: &SimTrace) -> Vec<f64> {
    trace
        .steps
        .iter()
        .map(|snap| {
            let (lo, hi) = snap.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| {
                (l.min(r.heading), h.max(r.heading))
            });
            hi - lo
        })
        .collect()
}

fn base_params(n: usize) -> SwarmParams {
    SwarmParams {
        n,
        comm_range: 1.4,
        sense_range: 2.0,
        boundary_range: 2.0,
        speed: 0.02,
        sweep_speed: 0.05,
        period: 0.5,
        spacing: 1.0,
        steps_per_rev: 20,
    }
}

fn scenario_defaults(params: SwarmParams, controller: Controller, seed: u64) -> Scenario {
    Scenario {
        params,
        controller,
        initial: InitialStates::Random {
            position_box: PositionBox { min: [0.0, 0.0], max: [5.0, 5.0] },
        },
        max_steps: 2000,
        consensus_tol: 1e-4,
        seed,
        fixed_adjacency: None,
        sweep: None,
        bias: Bias::Nearest,
        guard: GuardConfig::default(),
        record_weights: false,
        stop_at_consensus: true,
    }
}

fn consensus_demo_impl(params_json: &str) -> String {
    let req: Value = match serde_json::from_str(params_json) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let n = req["n"].as_u64().unwrap_or(12).clamp(2, 40) as usize;
    let seed = req["seed"].as_u64().unwrap_or(7);
    let comm_range = req["comm_range"].as_f64().unwrap_or(1.4);
    let controller = match req["controller"].as_str().unwrap_or("similarity_weighted") {
        "simple" => Controller::Simple,
        "vicsek" => Controller::Vicsek,
        "similarity_weighted" => Controller::SimilarityWeighted,
        other => return err(format!("unknown controller {other:?}")),
    };
    let mut params = base_params(n);
    params.comm_range = comm_range;
    let mut scenario = scenario_defaults(params, controller, seed);
    scenario.max_steps = req["max_steps"].as_u64().unwrap_or(500).clamp(1, 5000) as usize;
    let trace = match run(&scenario) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let report = scenario
        .controller
        .is_linear()
        .then(|| {
            swarmlab::sim::expected_weight_matrix(&scenario)
                .and_then(|(w, _)| analyze(&w, 1e-9))
                .ok()
        })
        .flatten();
    json!({
        "frames": trace_frames(&trace, 400),
        "consensus_step": trace.consensus_step,
        "cycle_detected": trace.cycle_detected,
        "spread": spread_curve(&trace),
        "report": report,
    })
    .to_string()
}

fn quantized_demo_impl(params_json: &str) -> String {
    let req: Value = match serde_json::from_str(params_json) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let seed = req["seed"].as_u64().unwrap_or(1);
    let plain = req["plain"].as_bool().unwrap_or(false);
    let radius = req["radius"].as_f64().unwrap_or(1.3).clamp(0.2, 2.0);
    let steps_per_rev = req["steps_per_rev"].as_u64().unwrap_or(20).clamp(4, 360) as u32;

    let mut params = base_params(4);
    params.comm_range = 2.0;
    params.speed = 0.8;
    params.period = 0.05;
    params.steps_per_rev = steps_per_rev;

    let grid = match swarmlab::kernels::QuantizationGrid::new(steps_per_rev) {
        Ok(g) => g,
        Err(e) => return err(e),
    };
    let mut rng = swarmlab::rng::SimRng::new(seed);
    let headings: Vec<f64> = match req["headings"].as_array() {
        Some(ks) if ks.len() == 4 => ks
            .iter()
            .map(|k| grid.value(k.as_i64().unwrap_or(0)))
            .collect(),
        _ => (0..4).map(|_| grid.value(rng.index(steps_per_rev) as i64)).collect(),
    };
    let positions = [
        Vec2 { x: radius, y: 0.0 },
        Vec2 { x: 0.0, y: radius },
        Vec2 { x: -radius, y: 0.0 },
        Vec2 { x: 0.0, y: -radius },
    ];
    let mut scenario = scenario_defaults(
        params,
        if plain { Controller::QuantizedPlain } else { Controller::QuantizedBiased },
        seed,
    );
    scenario.bias = Bias::Floor;
    scenario.max_steps = req["max_steps"].as_u64().unwrap_or(600).clamp(1, 5000) as usize;
    scenario.initial = InitialStates::Explicit {
        robots: positions
            .iter()
            .zip(&headings)
            .enumerate()
            .map(|(id, (&position, &heading))| RobotState { id, position, heading })
            .collect(),
    };
    let trace = match run(&scenario) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    json!({
        "frames": trace_frames(&trace, 400),
        "consensus_step": trace.consensus_step,
        "cycle_detected": trace.cycle_detected,
        "initial_levels": headings.iter().map(|&h| (h / grid.step_size()).round() as i64).collect::<Vec<_>>(),
        "spread": spread_curve(&trace),
    })
    .to_string()
}

fn sweep_demo_impl(params_json: &str) -> String {
    let req: Value = match serde_json::from_str(params_json) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let seed = req["seed"].as_u64().unwrap_or(11);
    let weighted = req["weighted"].as_bool().unwrap_or(true);
    let kink = req["kink"].as_f64().unwrap_or(0.0);
    let spacing = req["spacing"].as_f64().unwrap_or(1.2).clamp(0.5, 1.8);

    let mut params = base_params(6);
    params.comm_range = 2.0;
    params.speed = 1.0;
    params.period = 1.0;
    params.spacing = spacing;

    let mut boundary = vec![BoundarySegment::new(0.0, 0.0).expect("valid segment")];
    if kink.abs() > 1e-6 {
        let kink_y = 8.0;
        match BoundarySegment::new(kink.clamp(-1.2, 1.2), kink_y * kink.clamp(-1.2, 1.2).sin()) {
            Ok(seg) => boundary.push(seg),
            Err(e) => return err(e),
        }
    }

    let mut scenario = scenario_defaults(
        params,
        if weighted { Controller::SweepWeighted } else { Controller::SweepEqual },
        seed,
    );
    scenario.max_steps = req["max_steps"].as_u64().unwrap_or(600).clamp(1, 8000) as usize;
    scenario.consensus_tol = 1e-6;
    scenario.stop_at_consensus = kink.abs() <= 1e-6;
    scenario.initial = InitialStates::Random {
        position_box: PositionBox { min: [0.5, 0.0], max: [4.0, 3.0] },
    };
    scenario.sweep = Some(SweepSetup { boundary: boundary.clone(), c0: 0.0, side: Side::B1 });
    let trace = match run(&scenario) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let positions: Vec<Vec2> = trace.final_states().iter().map(|r| r.position).collect();
    let targets = emergent_targets(&positions, &boundary[0], spacing, Side::B1).ok();
    json!({
        "frames": trace_frames(&trace, 500),
        "consensus_step": trace.consensus_step,
        "boundary": boundary.iter().map(|seg| json!({
            "gamma": seg.gamma,
            "offset": seg.offset,
        })).collect::<Vec<_>>(),
        "targets": targets.map(|t| t.points.iter().map(|p| json!([p.x, p.y])).collect::<Vec<_>>()),
        "warnings": trace.warnings,
    })
    .to_string()
}

/// Heading consensus on a random swarm: choose the averaging rule, watch
/// trajectories and the heading spread shrink.
#[wasm_bindgen]
pub fn consensus_demo(params_json: &str) -> String {
    consensus_demo_impl(params_json)
}

/// Four quantized robots on a square: the plain floor rule oscillates
/// between grid levels, the biased strategy settles on one.
#[wasm_bindgen]
pub fn quantized_demo(params_json: &str) -> String {
    quantized_demo_impl(params_json)
}

/// Barrier formation and sweep along a (possibly kinked) boundary.
#[wasm_bindgen]
pub fn sweep_demo(params_json: &str) -> String {
    sweep_demo_impl(params_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consensus_demo_returns_frames() {
        let out = consensus_demo_impl(
            r#"{"n": 8, "seed": 3, "controller": "simple", "comm_range": 2.5}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["error"].is_null(), "{out}");
        assert!(v["frames"].as_array().unwrap().len() >= 2);
        assert!(v["consensus_step"].is_u64());
    }

    #[test]
    fn quantized_demo_modes() {
        let cycling = quantized_demo_impl(
            r#"{"plain": true, "headings": [0, 1, 11, 10], "radius": 1.3}"#,
        );
        let v: Value = serde_json::from_str(&cycling).unwrap();
        assert_eq!(v["cycle_detected"], Value::Bool(true), "{cycling}");

        let biased = quantized_demo_impl(r#"{"plain": false, "seed": 5, "radius": 0.7}"#);
        let v: Value = serde_json::from_str(&biased).unwrap();
        assert!(v["consensus_step"].is_u64(), "{biased}");
    }

    #[test]
    fn sweep_demo_emits_targets() {
        let out = sweep_demo_impl(r#"{"seed": 11, "weighted": true}"#);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["error"].is_null(), "{out}");
        assert_eq!(v["targets"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn bad_json_reports_error() {
        let out = consensus_demo_impl("not json");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["error"].is_string());
    }
}
