//! Discrete-time simulation loop: synchronous rounds over immutable
//! snapshots, per-step topology rebuild, controller dispatch, consensus and
//! cycle detection.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::graph::{build_adjacency, is_connected, AdjacencyMatrix, SwarmParams};
use crate::kernels::{
    apply_aperiodicity_guard, quantized_plain_update, quantized_update, similarity_weights,
    simple_average_update, vicsek_update, Bias, HeadingState, QuantizationGrid, WeightMatrix,
};
use crate::rng::SimRng;
use crate::sweep::{sweep_step, BoundarySegment, Side};

/// Default iteration cap.
pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// Default consensus tolerance: the reference convention rounds headings to
/// four decimal places.
pub const DEFAULT_CONSENSUS_TOL: f64 = 1e-4;

/// Default aperiodicity-guard mixing weight.
pub const DEFAULT_GUARD_EPSILON: f64 = 0.01;

const MAX_RECORDED_WARNINGS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub id: usize,
    pub position: Vec2,
    pub heading: f64,
}

/// Heading update law driving a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Controller {
    Simple,
    Vicsek,
    SimilarityWeighted,
    QuantizedBiased,
    QuantizedPlain,
    SweepEqual,
    SweepWeighted,
}

impl Controller {
    pub fn is_sweep(self) -> bool {
        matches!(self, Controller::SweepEqual | Controller::SweepWeighted)
    }

    pub fn is_quantized(self) -> bool {
        matches!(self, Controller::QuantizedBiased | Controller::QuantizedPlain)
    }

    /// Controllers whose update is a row-stochastic matrix acting on the
    /// heading vector.
    pub fn is_linear(self) -> bool {
        matches!(self, Controller::Simple | Controller::SimilarityWeighted)
    }

    pub fn name(self) -> &'static str {
        match self {
            Controller::Simple => "simple",
            Controller::Vicsek => "vicsek",
            Controller::SimilarityWeighted => "similarity_weighted",
            Controller::QuantizedBiased => "quantized_biased",
            Controller::QuantizedPlain => "quantized_plain",
            Controller::SweepEqual => "sweep_equal",
            Controller::SweepWeighted => "sweep_weighted",
        }
    }
}

/// Aperiodicity guard applied to similarity weight matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GuardConfig {
    pub enabled: bool,
    pub epsilon: f64,
}

impl Default for GuardConfig {
    fn default() -> Self {
        Self { enabled: true, epsilon: DEFAULT_GUARD_EPSILON }
    }
}

/// Axis-aligned box for random initial positions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

/// Initial swarm state: given explicitly, or drawn from the scenario seed.
///
/// Random draws consume the seed stream in a fixed order: one heading per
/// robot (in index order), then x and y per robot. Averaging controllers
/// draw headings uniform on [0, pi), the Vicsek controller on [0, 2*pi),
/// quantized controllers uniformly from the heading grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum InitialStates {
    Explicit { robots: Vec<RobotState> },
    Random { position_box: PositionBox },
}

/// Boundary setup for sweep scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSetup {
    pub boundary: Vec<BoundarySegment>,
    pub c0: f64,
    pub side: Side,
}

/// A fully resolved simulation scenario. Deterministic: the same scenario
/// and seed produce a bit-identical trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: SwarmParams,
    pub controller: Controller,
    pub initial: InitialStates,
    pub max_steps: usize,
    pub consensus_tol: f64,
    pub seed: u64,
    pub fixed_adjacency: Option<AdjacencyMatrix>,
    pub sweep: Option<SweepSetup>,
    pub bias: Bias,
    pub guard: GuardConfig,
    pub record_weights: bool,
    /// When false the run continues past the first consensus step (useful
    /// for sweep scenarios that keep moving after heading agreement).
    pub stop_at_consensus: bool,
}

/// Full per-step record of a run plus convergence flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub steps: Vec<Vec<RobotState>>,
    pub weight_matrices: Option<Vec<WeightMatrix>>,
    pub consensus_step: Option<usize>,
    pub cycle_detected: bool,
    pub warnings: Vec<String>,
}

impl SimTrace {
    pub fn final_states(&self) -> &[RobotState] {
        self.steps.last().expect("trace has at least the initial step")
    }

    pub fn final_headings(&self) -> Vec<f64> {
        self.final_states().iter().map(|r| r.heading).collect()
    }
}

/// Single-integrator step: the robot moves with the commanded heading for
/// one period and stores that heading.
pub fn kinematics_step(state: &RobotState, speed: f64, heading: f64, period: f64) -> RobotState {
    let dir = Vec2 { x: heading.cos(), y: heading.sin() };
    RobotState {
        id: state.id,
        position: state.position + dir * (period * speed),
        heading,
    }
}

fn max_pairwise_spread(headings: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &h in headings {
        lo = lo.min(h);
        hi = hi.max(h);
    }
    if headings.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Draws the initial swarm for `scenario`, consuming `rng` in the documented
/// order. Explicit states are validated instead.
pub fn initial_states(scenario: &Scenario, rng: &mut SimRng) -> Result<Vec<RobotState>> {
    let n = scenario.params.n;
    match &scenario.initial {
        InitialStates::Explicit { robots } => {
            if robots.len() != n {
                return Err(Error::Scenario(format!(
                    "{} explicit robots for n = {n}",
                    robots.len()
                )));
            }
            for (i, r) in robots.iter().enumerate() {
                if r.id != i {
                    return Err(Error::Scenario(format!(
                        "robot ids must be 0..n in order, found {} at index {i}",
                        r.id
                    )));
                }
                if !r.position.is_finite() || !r.heading.is_finite() {
                    return Err(Error::Scenario(format!("robot {i} has non-finite state")));
                }
            }
            let mut robots = robots.clone();
            match scenario.controller {
                Controller::QuantizedBiased | Controller::QuantizedPlain => {
                    let grid = QuantizationGrid::new(scenario.params.steps_per_rev)?;
                    for r in &mut robots {
                        // Snap to the exact grid value so closure over the
                        // grid holds bit-for-bit.
                        let k = grid.index_of(r.heading)?;
                        r.heading = grid.value(k);
                    }
                }
                Controller::Vicsek => {}
                _ => {
                    for r in &robots {
                        if !(0.0..PI).contains(&r.heading) {
                            return Err(Error::Scenario(format!(
                                "robot {} heading {} outside [0, pi)",
                                r.id, r.heading
                            )));
                        }
                    }
                }
            }
            Ok(robots)
        }
        InitialStates::Random { position_box } => {
            let headings: Vec<f64> = match scenario.controller {
                Controller::QuantizedBiased | Controller::QuantizedPlain => {
                    let grid = QuantizationGrid::new(scenario.params.steps_per_rev)?;
                    (0..n).map(|_| grid.value(rng.index(grid.steps()) as i64)).collect()
                }
                Controller::Vicsek => (0..n).map(|_| rng.range(0.0, 2.0 * PI)).collect(),
                _ => (0..n).map(|_| rng.range(0.0, PI)).collect(),
            };
            let [x0, y0] = position_box.min;
            let [x1, y1] = position_box.max;
            if !(x1 > x0 && y1 > y0) {
                return Err(Error::Scenario("degenerate position box".into()));
            }
            Ok(headings
                .into_iter()
                .enumerate()
                .map(|(id, heading)| RobotState {
                    id,
                    position: Vec2 { x: rng.range(x0, x1), y: rng.range(y0, y1) },
                    heading,
                })
                .collect())
        }
    }
}

fn validate(scenario: &Scenario) -> Result<()> {
    scenario.params.validate()?;
    if scenario.max_steps < 1 {
        return Err(Error::Scenario("max_steps must be at least 1".into()));
    }
    if !(scenario.consensus_tol > 0.0) {
        return Err(Error::Scenario("consensus_tol must be positive".into()));
    }
    if let Some(adj) = &scenario.fixed_adjacency {
        if adj.n() != scenario.params.n {
            return Err(Error::Scenario(format!(
                "fixed adjacency is {}x{} but n = {}",
                adj.n(),
                adj.n(),
                scenario.params.n
            )));
        }
        if scenario.controller.is_sweep() {
            return Err(Error::Scenario(
                "sweep controllers rebuild topology from positions; fixed adjacency unsupported"
                    .into(),
            ));
        }
    }
    if scenario.controller.is_sweep() {
        let sweep = scenario
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Scenario("sweep controller needs a sweep section".into()))?;
        if sweep.boundary.is_empty() {
            return Err(Error::Scenario("sweep boundary chain is empty".into()));
        }
    }
    Ok(())
}

struct CycleDetector {
    seen: HashMap<Vec<u64>, usize>,
    previous: Option<Vec<u64>>,
    detected: bool,
}

impl CycleDetector {
    fn new() -> Self {
        Self { seen: HashMap::new(), previous: None, detected: false }
    }

    /// Flags a revisit of an earlier heading vector that is not a plain hold
    /// of the immediately preceding one.
    fn observe(&mut self, headings: &[f64], step: usize) {
        let key: Vec<u64> = headings.iter().map(|h| h.to_bits()).collect();
        let changed = self.previous.as_ref().is_some_and(|p| *p != key);
        if changed && self.seen.contains_key(&key) {
            self.detected = true;
        }
        self.seen.insert(key.clone(), step);
        self.previous = Some(key);
    }
}

/// Runs a scenario to consensus or `max_steps`. Deterministic given the
/// seed; the trace records every snapshot including the initial one.
pub fn run(scenario: &Scenario) -> Result<SimTrace> {
    validate(scenario)?;
    let params = &scenario.params;
    let mut rng = SimRng::new(scenario.seed);
    let mut robots = initial_states(scenario, &mut rng)?;
    let n = robots.len();

    let mut warnings: Vec<String> = Vec::new();
    let mut suppressed = 0usize;
    let mut warn = |warnings: &mut Vec<String>, msg: String| {
        if warnings.len() < MAX_RECORDED_WARNINGS {
            warnings.push(msg);
        } else {
            suppressed += 1;
        }
    };

    let barrier_length = scenario
        .controller
        .is_sweep()
        .then(|| params.n as f64 * params.spacing);
    for w in params.assumption_warnings(barrier_length) {
        warn(&mut warnings, w);
    }

    // Connectivity-requiring controllers reject a disconnected start.
    if scenario.controller == Controller::SimilarityWeighted {
        let adj = match &scenario.fixed_adjacency {
            Some(a) => a.clone(),
            None => build_adjacency(
                &robots.iter().map(|r| r.position).collect::<Vec<_>>(),
                params.comm_range,
            ),
        };
        if !is_connected(&adj) {
            return Err(Error::Scenario(
                "similarity-weighted controller requires a connected initial graph".into(),
            ));
        }
    }

    let grid = if scenario.controller.is_quantized() {
        Some(QuantizationGrid::new(params.steps_per_rev)?)
    } else {
        None
    };

    let mut record_weights = scenario.record_weights;
    if record_weights && !scenario.controller.is_linear() {
        warn(
            &mut warnings,
            format!(
                "weight recording is only defined for linear controllers, not {}",
                scenario.controller.name()
            ),
        );
        record_weights = false;
    }
    let mut weight_matrices: Vec<WeightMatrix> = Vec::new();

    // Sweep controllers keep the coordination variables as extra state.
    let mut coordination: Vec<f64> = robots.iter().map(|r| r.heading).collect();

    let mut steps = Vec::with_capacity(scenario.max_steps.min(4096) + 1);
    let mut detector = CycleDetector::new();
    let mut consensus_step = None;
    let mut connectivity_violation_reported = false;

    for step in 0..=scenario.max_steps {
        let headings: Vec<f64> = robots.iter().map(|r| r.heading).collect();
        steps.push(robots.clone());
        detector.observe(&headings, step);

        if consensus_step.is_none() && max_pairwise_spread(&headings) < scenario.consensus_tol {
            consensus_step = Some(step);
            if scenario.stop_at_consensus {
                break;
            }
        }
        if step == scenario.max_steps {
            break;
        }

        let positions: Vec<Vec2> = robots.iter().map(|r| r.position).collect();
        let adjacency = match &scenario.fixed_adjacency {
            Some(a) => a.clone(),
            None => build_adjacency(&positions, params.comm_range),
        };
        if !connectivity_violation_reported && !is_connected(&adjacency) {
            warn(
                &mut warnings,
                format!("communication graph disconnected at step {step}"),
            );
            connectivity_violation_reported = true;
        }

        let mut commands: Vec<(f64, f64)> = Vec::with_capacity(n);
        match scenario.controller {
            Controller::Simple => {
                let mut rows = Vec::with_capacity(n);
                for i in 0..n {
                    let nbrs = adjacency.neighbours(i);
                    let phis: Vec<f64> = nbrs.iter().map(|&j| headings[j]).collect();
                    commands.push((params.speed, simple_average_update(headings[i], &phis)));
                    if record_weights {
                        let w = 1.0 / (1 + nbrs.len()) as f64;
                        let mut row = vec![0.0; n];
                        row[i] = w;
                        for &j in &nbrs {
                            row[j] = w;
                        }
                        rows.push(row);
                    }
                }
                if record_weights {
                    weight_matrices.push(WeightMatrix::from_rows(&rows)?);
                }
            }
            Controller::Vicsek => {
                for i in 0..n {
                    let phis: Vec<f64> = adjacency
                        .neighbours(i)
                        .into_iter()
                        .map(|j| headings[j])
                        .collect();
                    let h = match vicsek_update(headings[i], &phis) {
                        Ok(h) => h,
                        Err(Error::DegenerateAverage) => {
                            warn(
                                &mut warnings,
                                format!("robot {i}: degenerate average at step {step}, holding"),
                            );
                            headings[i]
                        }
                        Err(e) => return Err(e),
                    };
                    commands.push((params.speed, h));
                }
            }
            Controller::SimilarityWeighted => {
                let mut rows = Vec::with_capacity(n);
                for i in 0..n {
                    match similarity_weights(&adjacency, i) {
                        Ok(row) => rows.push(row),
                        Err(Error::IsolatedNode(_)) => {
                            // Isolated robots hold their state.
                            let mut row = vec![0.0; n];
                            row[i] = 1.0;
                            rows.push(row);
                        }
                        Err(e) => return Err(e),
                    }
                }
                let mut w = WeightMatrix::from_rows(&rows)?;
                if scenario.guard.enabled {
                    w = apply_aperiodicity_guard(&w, scenario.guard.epsilon);
                }
                for h in w.apply(&headings) {
                    commands.push((params.speed, h));
                }
                if record_weights {
                    weight_matrices.push(w);
                }
            }
            Controller::QuantizedPlain | Controller::QuantizedBiased => {
                let grid = grid.as_ref().expect("grid built for quantized controllers");
                for i in 0..n {
                    let phis: Vec<f64> = adjacency
                        .neighbours(i)
                        .into_iter()
                        .map(|j| headings[j])
                        .collect();
                    let h = if scenario.controller == Controller::QuantizedPlain {
                        quantized_plain_update(headings[i], &phis, grid)?
                    } else {
                        quantized_update(headings[i], &phis, grid, scenario.bias)?
                    };
                    commands.push((params.speed, h));
                }
            }
            Controller::SweepEqual | Controller::SweepWeighted => {
                let setup = scenario.sweep.as_ref().expect("validated above");
                let state = HeadingState::new(headings.clone(), coordination.clone())?;
                let out = sweep_step(
                    &positions,
                    &state,
                    params,
                    &setup.boundary,
                    scenario.controller == Controller::SweepWeighted,
                )?;
                for w in out.warnings {
                    warn(&mut warnings, w);
                }
                coordination = out.coordination;
                commands.extend(out.controls.iter().map(|c| (c.speed, c.heading)));
            }
        }

        for (robot, &(speed, heading)) in robots.iter_mut().zip(&commands) {
            *robot = kinematics_step(robot, speed, heading, params.period);
        }
    }

    if suppressed > 0 {
        warnings.push(format!("{suppressed} further warnings suppressed"));
    }

    Ok(SimTrace {
        steps,
        weight_matrices: record_weights.then_some(weight_matrices),
        consensus_step,
        cycle_detected: detector.detected,
        warnings,
    })
}

/// Re-runs cycle detection over a finished trace: true iff the joint heading
/// vector revisits an earlier value without having converged.
pub fn detect_cycle(trace: &SimTrace) -> bool {
    let mut detector = CycleDetector::new();
    for (step, snapshot) in trace.steps.iter().enumerate() {
        let headings: Vec<f64> = snapshot.iter().map(|r| r.heading).collect();
        detector.observe(&headings, step);
    }
    detector.detected
}

/// One row of a controller comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub controller: String,
    pub seed: u64,
    /// Steps to consensus, or None when the run hit max_steps first.
    pub consensus_step: Option<usize>,
}

/// Runs every controller over `n_seeds` consecutive seeds starting at the
/// scenario seed. Deterministic: outputs are ordered by seed then controller.
pub fn compare_controllers(
    scenario: &Scenario,
    controllers: &[Controller],
    n_seeds: u64,
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::with_capacity(controllers.len() * n_seeds as usize);
    for offset in 0..n_seeds {
        for &controller in controllers {
            let mut variant = scenario.clone();
            variant.controller = controller;
            variant.seed = scenario.seed.wrapping_add(offset);
            let trace = run(&variant)?;
            rows.push(ComparisonRow {
                controller: controller.name().to_string(),
                seed: variant.seed,
                consensus_step: trace.consensus_step,
            });
        }
    }
    Ok(rows)
}

/// Median of the consensus step counts for one controller; runs that never
/// reached consensus count as `max_steps`.
pub fn median_steps(rows: &[ComparisonRow], controller: &str, max_steps: usize) -> f64 {
    let mut counts: Vec<usize> = rows
        .iter()
        .filter(|r| r.controller == controller)
        .map(|r| r.consensus_step.unwrap_or(max_steps))
        .collect();
    counts.sort_unstable();
    if counts.is_empty() {
        return f64::NAN;
    }
    let mid = counts.len() / 2;
    if counts.len() % 2 == 1 {
        counts[mid] as f64
    } else {
        (counts[mid - 1] + counts[mid]) as f64 / 2.0
    }
}

/// How the ensemble-average weight matrix was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightEstimator {
    /// Fixed-graph scenario: the per-step matrix is constant.
    Exact,
    /// Sample mean over seeded draws of the initial deployment.
    SampleMean,
}

/// Number of draws for the sample-mean estimator.
pub const ESTIMATOR_DRAWS: usize = 1000;

fn weight_matrix_for(
    scenario: &Scenario,
    adjacency: &AdjacencyMatrix,
) -> Result<WeightMatrix> {
    let n = adjacency.n();
    let rows: Result<Vec<Vec<f64>>> = (0..n)
        .map(|i| match scenario.controller {
            Controller::Simple => {
                let nbrs = adjacency.neighbours(i);
                let w = 1.0 / (1 + nbrs.len()) as f64;
                let mut row = vec![0.0; n];
                row[i] = w;
                for &j in &nbrs {
                    row[j] = w;
                }
                Ok(row)
            }
            Controller::SimilarityWeighted => match similarity_weights(adjacency, i) {
                Ok(row) => Ok(row),
                Err(Error::IsolatedNode(_)) => {
                    let mut row = vec![0.0; n];
                    row[i] = 1.0;
                    Ok(row)
                }
                Err(e) => Err(e),
            },
            _ => Err(Error::Scenario(format!(
                "controller {} has no weight-matrix form",
                scenario.controller.name()
            ))),
        })
        .collect();
    let mut w = WeightMatrix::from_rows(&rows?)?;
    if scenario.controller == Controller::SimilarityWeighted && scenario.guard.enabled {
        w = apply_aperiodicity_guard(&w, scenario.guard.epsilon);
    }
    Ok(w)
}

/// Ensemble-average weight matrix of a linear-controller scenario: exact for
/// fixed graphs, a seeded sample mean over initial deployments otherwise.
pub fn expected_weight_matrix(scenario: &Scenario) -> Result<(WeightMatrix, WeightEstimator)> {
    if !scenario.controller.is_linear() {
        return Err(Error::Scenario(format!(
            "expected weight matrix undefined for controller {}",
            scenario.controller.name()
        )));
    }
    if let Some(adj) = &scenario.fixed_adjacency {
        return Ok((weight_matrix_for(scenario, adj)?, WeightEstimator::Exact));
    }
    let n = scenario.params.n;
    let mut rng = SimRng::new(scenario.seed);
    let mut sum = vec![vec![0.0; n]; n];
    for _ in 0..ESTIMATOR_DRAWS {
        let robots = initial_states(scenario, &mut rng)?;
        let positions: Vec<Vec2> = robots.iter().map(|r| r.position).collect();
        let adjacency = build_adjacency(&positions, scenario.params.comm_range);
        let w = weight_matrix_for(scenario, &adjacency)?;
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += w.get(i, j);
            }
        }
    }
    for row in &mut sum {
        for v in row.iter_mut() {
            *v /= ESTIMATOR_DRAWS as f64;
        }
        // Renormalize away accumulation error so the mean stays stochastic.
        let s: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= s;
        }
    }
    Ok((WeightMatrix::from_rows(&sum)?, WeightEstimator::SampleMean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::complete_graph;

    pub(crate) fn base_scenario(controller: Controller, n: usize) -> Scenario {
        Scenario {
            params: SwarmParams {
                n,
                comm_range: 1.4,
                sense_range: 2.0,
                boundary_range: 2.0,
                speed: 0.002,
                sweep_speed: 0.05,
                period: 0.5,
                spacing: 1.5,
                steps_per_rev: 20,
            },
            controller,
            initial: InitialStates::Random {
                position_box: PositionBox { min: [0.0, 0.0], max: [3.0, 3.0] },
            },
            max_steps: DEFAULT_MAX_STEPS,
            consensus_tol: DEFAULT_CONSENSUS_TOL,
            seed: 7,
            fixed_adjacency: None,
            sweep: None,
            bias: Bias::Nearest,
            guard: GuardConfig::default(),
            record_weights: false,
            stop_at_consensus: true,
        }
    }

    #[test]
    fn kinematics_examples() {
        let r = RobotState { id: 0, position: Vec2 { x: 1.0, y: 2.0 }, heading: 0.5 };
        let moved = kinematics_step(&r, 0.0, 0.9, 1.0);
        assert_eq!(moved.position, r.position);
        assert_eq!(moved.heading, 0.9);

        let moved = kinematics_step(&r, 0.8, 0.0, 1.0);
        assert!((moved.position.x - 1.8).abs() < 1e-15);
        assert_eq!(moved.position.y, 2.0);
    }

    #[test]
    fn displacement_norm_matches_speed() {
        let mut rng = SimRng::new(3);
        for _ in 0..1000 {
            let r = RobotState {
                id: 0,
                position: Vec2 { x: rng.range(-5.0, 5.0), y: rng.range(-5.0, 5.0) },
                heading: 0.0,
            };
            let speed = rng.range(0.0, 2.0);
            let heading = rng.range(0.0, 2.0 * PI);
            let period = rng.range(0.1, 2.0);
            let moved = kinematics_step(&r, speed, heading, period);
            let d = moved.position.distance(r.position);
            assert!((d - period * speed).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_traces() {
        let scenario = base_scenario(Controller::Simple, 8);
        let a = run(&scenario).unwrap();
        let b = run(&scenario).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complete_graph_simple_consensus_is_immediate() {
        let mut scenario = base_scenario(Controller::Simple, 12);
        scenario.fixed_adjacency = Some(complete_graph(12));
        let trace = run(&scenario).unwrap();
        assert_eq!(trace.consensus_step, Some(1));
    }

    #[test]
    fn contraction_on_fixed_connected_graph() {
        let mut scenario = base_scenario(Controller::SimilarityWeighted, 12);
        scenario.fixed_adjacency = Some(crate::presets::bridged_cliques_12());
        let trace = run(&scenario).unwrap();
        assert!(trace.consensus_step.is_some());
        // Range of the heading vector never grows, and the consensus value
        // stays inside the initial hull.
        let initial = &trace.steps[0];
        let (lo, hi) = initial.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| {
            (l.min(r.heading), h.max(r.heading))
        });
        let mut prev = hi - lo;
        for snapshot in &trace.steps[1..] {
            let headings: Vec<f64> = snapshot.iter().map(|r| r.heading).collect();
            let spread = max_pairwise_spread(&headings);
            assert!(spread <= prev + 1e-12);
            prev = spread;
            for h in headings {
                assert!(h >= lo - 1e-12 && h <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn quantized_headings_stay_on_grid() {
        let mut scenario = base_scenario(Controller::QuantizedBiased, 6);
        scenario.params.speed = 0.8;
        scenario.params.period = 1.0;
        scenario.params.comm_range = 2.0;
        scenario.max_steps = 200;
        let grid = QuantizationGrid::new(20).unwrap();
        let trace = run(&scenario).unwrap();
        for snapshot in &trace.steps {
            for r in snapshot {
                let k = grid.index_of(r.heading).unwrap();
                assert_eq!(r.heading.to_bits(), grid.value(k).to_bits());
            }
        }
    }

    #[test]
    fn cycle_detector_rules() {
        let mk = |headings: &[f64]| -> Vec<RobotState> {
            headings
                .iter()
                .enumerate()
                .map(|(id, &heading)| RobotState {
                    id,
                    position: Vec2 { x: 0.0, y: 0.0 },
                    heading,
                })
                .collect()
        };
        // Constant trace: no cycle.
        let constant = SimTrace {
            steps: vec![mk(&[0.1, 0.2]); 6],
            weight_matrices: None,
            consensus_step: None,
            cycle_detected: false,
            warnings: vec![],
        };
        assert!(!detect_cycle(&constant));
        // Period-2 alternation: cycle.
        let alternating = SimTrace {
            steps: vec![mk(&[0.1, 0.2]), mk(&[0.2, 0.1]), mk(&[0.1, 0.2]), mk(&[0.2, 0.1])],
            ..constant.clone()
        };
        assert!(detect_cycle(&alternating));
    }

    #[test]
    fn permutation_weight_oscillation_detected() {
        // Two robots swapping headings through W = [[0,1],[1,0]] is the
        // canonical periodic case; the fixed path graph of two robots under
        // similarity weights (unguarded) realizes it.
        let mut scenario = base_scenario(Controller::SimilarityWeighted, 2);
        scenario.fixed_adjacency = Some(crate::presets::ring_graph(2));
        scenario.guard.enabled = false;
        scenario.max_steps = 50;
        let trace = run(&scenario).unwrap();
        assert!(trace.consensus_step.is_none());
        assert!(trace.cycle_detected);
        assert!(detect_cycle(&trace));
    }

    #[test]
    fn disconnected_start_rejected_for_similarity() {
        let mut scenario = base_scenario(Controller::SimilarityWeighted, 4);
        scenario.initial = InitialStates::Explicit {
            robots: (0..4)
                .map(|id| RobotState {
                    id,
                    position: Vec2 { x: 10.0 * id as f64, y: 0.0 },
                    heading: 0.3,
                })
                .collect(),
        };
        assert!(matches!(run(&scenario), Err(Error::Scenario(_))));
    }

    #[test]
    fn comparison_is_deterministic() {
        let mut scenario = base_scenario(Controller::Simple, 6);
        scenario.fixed_adjacency = Some(complete_graph(6));
        let rows =
            compare_controllers(&scenario, &[Controller::Simple, Controller::Simple], 3).unwrap();
        assert_eq!(rows.len(), 6);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].consensus_step, pair[1].consensus_step);
        }
    }

    #[test]
    fn expected_weight_estimators() {
        let mut scenario = base_scenario(Controller::SimilarityWeighted, 12);
        scenario.fixed_adjacency = Some(crate::presets::bridged_cliques_12());
        let (_, label) = expected_weight_matrix(&scenario).unwrap();
        assert_eq!(label, WeightEstimator::Exact);

        let mut scenario = base_scenario(Controller::Simple, 5);
        scenario.fixed_adjacency = None;
        let (w, label) = expected_weight_matrix(&scenario).unwrap();
        assert_eq!(label, WeightEstimator::SampleMean);
        assert_eq!(w.n(), 5);
    }
}
