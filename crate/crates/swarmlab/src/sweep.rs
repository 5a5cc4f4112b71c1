//! Sweep coverage controller: a barrier of robots forms on a moving line
//! anchored at a boundary and advances along it, with boundary-biased
//! weighted averaging of headings and velocity scalars.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{line_intersection, project_scalar, unit_vector, LineSpec, Vec2};
use crate::graph::{build_adjacency, SwarmParams};
use crate::kernels::HeadingState;

/// Which half-plane of the boundary the barrier occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    B1,
    B2,
}

/// One straight piece of the boundary: the line `{p : u(gamma)^T p = offset}`
/// with unit normal at `gamma`, swept along `sweep_direction = gamma + pi/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySegment {
    /// Normal angle gamma, restricted to [-pi/2, pi/2).
    pub gamma: f64,
    /// Scalar offset b1 of the boundary line.
    pub offset: f64,
}

impl BoundarySegment {
    pub fn new(gamma: f64, offset: f64) -> Result<Self> {
        if !gamma.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite("BoundarySegment"));
        }
        if !(-FRAC_PI_2..FRAC_PI_2).contains(&gamma) {
            return Err(Error::Scenario(format!(
                "boundary angle {gamma} outside [-pi/2, pi/2)"
            )));
        }
        Ok(Self { gamma, offset })
    }

    /// Sweep direction along the boundary, `gamma + pi/2` exactly.
    pub fn sweep_direction(&self) -> f64 {
        self.gamma + FRAC_PI_2
    }

    pub fn line(&self) -> LineSpec {
        LineSpec::from_normal(self.gamma, self.offset).expect("finite by construction")
    }

    /// Signed distance of `p` from the boundary line (positive on the B1
    /// side, where `u(gamma)^T p > offset`).
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        self.line().signed_residual(p)
    }
}

/// Desired barrier points on the moving line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTargets {
    /// Anchor `p_b`, the intersection of the moving line with the boundary.
    pub reference: Vec2,
    pub points: Vec<Vec2>,
    pub side: Side,
}

/// Control pair emitted for one robot: linear speed and heading command.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepControl {
    pub speed: f64,
    pub heading: f64,
}

/// The moving line at step `k`: normal along the sweep direction, offset
/// `c0 + k*T*v0`.
pub fn moving_line(
    boundary: &BoundarySegment,
    c0: f64,
    k: usize,
    params: &SwarmParams,
) -> LineSpec {
    let offset = c0 + k as f64 * params.period * params.sweep_speed;
    LineSpec::from_normal(boundary.sweep_direction(), offset).expect("finite offset")
}

/// Barrier points spaced `d` along the boundary normal, starting one spacing
/// away from the anchor `p_b` on the requested side.
pub fn sweep_targets(
    line: &LineSpec,
    boundary: &BoundarySegment,
    d: f64,
    n: usize,
    side: Side,
) -> Result<SweepTargets> {
    let reference = line_intersection(line, &boundary.line())?;
    let u = unit_vector(boundary.gamma)?;
    let sign = match side {
        Side::B1 => 1.0,
        Side::B2 => -1.0,
    };
    let points = (1..=n).map(|i| reference + u * (sign * d * i as f64)).collect();
    Ok(SweepTargets { reference, points, side })
}

/// Barrier targets anchored at the swarm's emergent along-boundary offset:
/// the mean of `s_i . u(phi_b)` defines the line the converged barrier
/// actually rides on.
pub fn emergent_targets(
    positions: &[Vec2],
    boundary: &BoundarySegment,
    d: f64,
    side: Side,
) -> Result<SweepTargets> {
    let dir = unit_vector(boundary.sweep_direction())?;
    let mean_offset =
        positions.iter().map(|&p| p.dot(dir)).sum::<f64>() / positions.len() as f64;
    let line = LineSpec::from_normal(boundary.sweep_direction(), mean_offset)?;
    sweep_targets(&line, boundary, d, positions.len(), side)
}

/// Heading and velocity weight rows for one robot. Participants are ordered
/// nearest-to-boundary first; the row layout is `[self, participants...]`.
/// Without boundary detection every weight is `1/(1+n)`; with detection the
/// nearest participant (normally the virtual boundary robot) dominates the
/// heading row and the farthest dominates the velocity row.
pub fn boundary_weights(
    n_participants: usize,
    boundary_detected: bool,
) -> (Vec<f64>, Vec<f64>) {
    if !boundary_detected || n_participants == 0 {
        let w = 1.0 / (1 + n_participants) as f64;
        let row = vec![w; 1 + n_participants];
        return (row.clone(), row);
    }
    match n_participants {
        1 => (vec![1.0 / 3.0, 2.0 / 3.0], vec![2.0 / 3.0, 1.0 / 3.0]),
        2 => (
            vec![2.0 / 6.0, 3.0 / 6.0, 1.0 / 6.0],
            vec![2.0 / 6.0, 1.0 / 6.0, 3.0 / 6.0],
        ),
        n => {
            // The reference scheme only defines one- and two-participant
            // rows; larger sets fall back to equal weighting.
            let w = 1.0 / (1 + n) as f64;
            let row = vec![w; 1 + n];
            (row.clone(), row)
        }
    }
}

/// Output of one synchronous sweep round.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub controls: Vec<SweepControl>,
    /// Updated coordination variables (`phi_i((k+1)T) = Theta_i(kT)`).
    pub coordination: Vec<f64>,
    pub warnings: Vec<String>,
}

/// A piecewise-linear boundary. Consecutive segment lines meet at kink
/// points; each segment is clipped to its piece of the chain so that
/// distance queries localize correctly near a kink.
pub struct BoundaryChain<'a> {
    segments: &'a [BoundarySegment],
    /// Along-sweep parameter range of each clipped piece.
    ranges: Vec<(f64, f64)>,
}

impl<'a> BoundaryChain<'a> {
    pub fn new(segments: &'a [BoundarySegment]) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Scenario("empty boundary chain".into()));
        }
        let mut ranges = vec![(f64::NEG_INFINITY, f64::INFINITY); segments.len()];
        for i in 0..segments.len() - 1 {
            let kink = line_intersection(&segments[i].line(), &segments[i + 1].line())?;
            ranges[i].1 = along_parameter(&segments[i], kink);
            ranges[i + 1].0 = along_parameter(&segments[i + 1], kink);
        }
        Ok(Self { segments, ranges })
    }

    /// Nearest clipped segment within `range`, with the closest boundary
    /// point (the virtual robot's position). Later segments win near-ties
    /// (five percent of the range): a robot approaching a kink commits to
    /// the next piece exactly once instead of flapping while equidistant,
    /// and sweeping forward keeps the commitment stable.
    pub fn detect(&self, p: Vec2, range: f64) -> Option<(&'a BoundarySegment, Vec2, f64)> {
        let band = 0.05 * range;
        let mut best: Option<(&BoundarySegment, Vec2, f64)> = None;
        for (seg, &(lo, hi)) in self.segments.iter().zip(&self.ranges) {
            let t = along_parameter(seg, p).clamp(lo, hi);
            let closest = chain_point(seg, t);
            let dist = p.distance(closest);
            if dist <= range && best.as_ref().is_none_or(|(_, _, d)| dist < *d + band) {
                best = Some((seg, closest, dist));
            }
        }
        best
    }
}

/// Along-sweep coordinate of `p` on a segment's line (parameter of the
/// orthogonal projection).
fn along_parameter(seg: &BoundarySegment, p: Vec2) -> f64 {
    let dir = unit_vector(seg.sweep_direction()).expect("finite angle");
    p.dot(dir)
}

fn chain_point(seg: &BoundarySegment, t: f64) -> Vec2 {
    // Point on the boundary line at along-parameter t.
    let dir = unit_vector(seg.sweep_direction()).expect("finite angle");
    let normal = unit_vector(seg.gamma).expect("finite angle");
    normal * seg.offset + dir * t
}

/// Smallest absolute angular difference between two headings.
pub fn circular_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    d.sin().atan2(d.cos()).abs()
}

struct Participant {
    position: Vec2,
    coordination: f64,
    /// Distance rank key: absolute distance to the active boundary,
    /// infinity when no boundary is visible.
    boundary_distance: f64,
}

/// One synchronous controller round over the snapshot in `state`.
///
/// `state.headings` are the previously commanded headings theta_i (used to
/// hold attitude at zero speed), `state.coordination` the phi_i variables.
pub fn sweep_step(
    positions: &[Vec2],
    state: &HeadingState,
    params: &SwarmParams,
    boundary: &[BoundarySegment],
    weighted: bool,
) -> Result<SweepOutcome> {
    let n = positions.len();
    if state.headings.len() != n || state.coordination.len() != n {
        return Err(Error::Precondition("state length mismatch".into()));
    }
    if boundary.is_empty() {
        return Err(Error::Scenario("sweep controller needs a boundary".into()));
    }
    let chain = BoundaryChain::new(boundary)?;
    let adjacency = build_adjacency(positions, params.comm_range);
    let mut controls = Vec::with_capacity(n);
    let mut coordination = Vec::with_capacity(n);
    let mut warnings = Vec::new();

    // Per-robot boundary detection; when several robots detect at once the
    // boundary-biased averaging role goes to the best-ranked one (nearest to
    // the boundary, ties by index). The others still respect the boundary in
    // their coordinate rule but keep plain neighbour averaging.
    let detections: Vec<Option<(&BoundarySegment, Vec2, f64)>> =
        positions.iter().map(|&p| chain.detect(p, params.boundary_range)).collect();
    let anchor = detections
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.as_ref().map(|&(_, _, dist)| (i, dist)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)))
        .map(|(i, _)| i);

    for i in 0..n {
        let phi = state.coordination[i];
        let pos = positions[i];

        let detected = detections[i];

        // Barrier-local real neighbours: nearest on each side along the
        // robot's own coordination axis (selection predates Theta_i).
        let q_self_sel = project_scalar(pos, phi);
        let mut left: Option<usize> = None;
        let mut right: Option<usize> = None;
        for j in adjacency.neighbours(i) {
            let q = project_scalar(positions[j], phi);
            if q < q_self_sel {
                if left.map_or(true, |l| q > project_scalar(positions[l], phi)) {
                    left = Some(j);
                }
            } else if q > q_self_sel
                && right.map_or(true, |r| q < project_scalar(positions[r], phi))
            {
                right = Some(j);
            }
        }

        let is_anchor = anchor == Some(i);
        let mut participants: Vec<Participant> = Vec::with_capacity(2);
        match detected {
            Some((seg, closest, _)) if is_anchor => {
                // The robot ranked nearest to the boundary couples to the
                // virtual boundary robot plus its real neighbour farther
                // from the boundary.
                participants.push(Participant {
                    position: closest,
                    coordination: seg.sweep_direction(),
                    boundary_distance: 0.0,
                });
                let far = match (left, right) {
                    (Some(l), Some(r)) => {
                        let dl = seg.signed_distance(positions[l]).abs();
                        let dr = seg.signed_distance(positions[r]).abs();
                        Some(if dl >= dr { l } else { r })
                    }
                    (one, None) | (None, one) => one,
                };
                if let Some(j) = far {
                    participants.push(Participant {
                        position: positions[j],
                        coordination: state.coordination[j],
                        boundary_distance: seg.signed_distance(positions[j]).abs(),
                    });
                }
            }
            Some((seg, _, _)) => {
                // Other detecting robots rank their barrier neighbours by
                // boundary distance; the boundary-side one dominates the
                // heading row.
                for j in [left, right].into_iter().flatten() {
                    participants.push(Participant {
                        position: positions[j],
                        coordination: state.coordination[j],
                        boundary_distance: seg.signed_distance(positions[j]).abs(),
                    });
                }
            }
            None => {
                for j in [left, right].into_iter().flatten() {
                    participants.push(Participant {
                        position: positions[j],
                        coordination: state.coordination[j],
                        boundary_distance: f64::INFINITY,
                    });
                }
            }
        }
        participants.sort_by(|a, b| {
            a.boundary_distance.partial_cmp(&b.boundary_distance).unwrap()
        });

        let (w_heading, w_velocity) = if weighted {
            boundary_weights(participants.len(), detected.is_some())
        } else {
            boundary_weights(participants.len(), false)
        };

        // Heading consensus variable Theta_i.
        let mut theta_avg = w_heading[0] * phi;
        for (w, p) in w_heading[1..].iter().zip(&participants) {
            theta_avg += w * p.coordination;
        }

        // Along-sweep scalars c_ij = s_j . u(Theta_i), averaged with the
        // velocity weights.
        let axis = unit_vector(theta_avg)?;
        let c_self = pos.dot(axis);
        let mut c_avg = w_velocity[0] * c_self;
        for (w, p) in w_velocity[1..].iter().zip(&participants) {
            c_avg += w * p.position.dot(axis);
        }

        // Projections onto the robot's own line L_i.
        let q_self = project_scalar(pos, theta_avg);
        let mut q_left: Option<f64> = None;
        let mut q_right: Option<f64> = None;
        let mut push = |q: f64| {
            if q < q_self {
                q_left = Some(q_left.map_or(q, |cur: f64| cur.max(q)));
            } else if q > q_self {
                q_right = Some(q_right.map_or(q, |cur: f64| cur.min(q)));
            }
        };
        for j in adjacency.neighbours(i) {
            push(project_scalar(positions[j], theta_avg));
        }
        if let Some((_, closest, _)) = detected {
            // Boundary coordinate q_b: projection of the nearest boundary
            // point. Agrees with the L_i/B intersection at equilibrium and
            // stays finite and continuous across kinks, where the
            // intersection formula degenerates.
            push(project_scalar(closest, theta_avg));
        }

        let q_target = match (q_left, q_right) {
            (Some(l), Some(r)) => (l + r) / 2.0,
            (Some(l), None) => (l + q_self + params.spacing) / 2.0,
            (None, Some(r)) => (r + q_self - params.spacing) / 2.0,
            (None, None) => q_self,
        };

        let v_transverse = (q_target - q_self) / params.period;
        let v_along =
            (c_avg - c_self + params.sweep_speed * params.period) / params.period;
        let mut speed = v_transverse.hypot(v_along);
        let heading = if speed == 0.0 {
            state.headings[i]
        } else {
            let beta = (v_transverse / speed).acos();
            if v_along >= 0.0 {
                theta_avg + beta - FRAC_PI_2
            } else {
                theta_avg - beta - FRAC_PI_2
            }
        };
        if speed > params.speed {
            warnings.push(format!(
                "robot {i}: speed {speed:.4} clamped to v_max {}",
                params.speed
            ));
            speed = params.speed;
        }

        controls.push(SweepControl { speed, heading });
        coordination.push(theta_avg);
    }

    Ok(SweepOutcome { controls, coordination, warnings })
}

/// Minimum-cost assignment (Hungarian algorithm, O(n^3)). Returns the
/// column matched to each row.
pub fn assign_min_cost(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    assert!(cost.iter().all(|row| row.len() == n));
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        while j0 != 0 {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
        }
    }
    let mut out = vec![0usize; n];
    for j in 1..=n {
        if matched[j] > 0 {
            out[matched[j] - 1] = j - 1;
        }
    }
    out
}

/// Per-robot distance to its target under the minimum-cost assignment.
pub fn assignment_distances(positions: &[Vec2], targets: &[Vec2]) -> Vec<f64> {
    assert_eq!(positions.len(), targets.len());
    let cost: Vec<Vec<f64>> = positions
        .iter()
        .map(|&p| targets.iter().map(|&t| p.distance(t)).collect())
        .collect();
    let assignment = assign_min_cost(&cost);
    positions
        .iter()
        .zip(&assignment)
        .map(|(&p, &j)| p.distance(targets[j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y).unwrap()
    }

    fn params6() -> SwarmParams {
        SwarmParams {
            n: 6,
            comm_range: 2.0,
            sense_range: 2.0,
            boundary_range: 2.0,
            speed: 1.0,
            sweep_speed: 0.05,
            period: 1.0,
            spacing: 1.5,
            steps_per_rev: 20,
        }
    }

    #[test]
    fn boundary_segment_invariants() {
        let seg = BoundarySegment::new(0.0, 0.0).unwrap();
        assert_eq!(seg.sweep_direction() - seg.gamma, FRAC_PI_2);
        assert!(BoundarySegment::new(FRAC_PI_2, 0.0).is_err());
        assert!(BoundarySegment::new(-FRAC_PI_2, 1.0).is_ok());
    }

    #[test]
    fn moving_line_offsets() {
        let seg = BoundarySegment::new(0.0, 0.0).unwrap();
        let p = params6();
        assert_eq!(moving_line(&seg, 0.0, 0, &p).offset(), 0.0);
        let l = moving_line(&seg, 0.0, 10, &p);
        assert!((l.offset() - 0.5).abs() < 1e-12);
        let static_params = SwarmParams { sweep_speed: 0.0, ..p };
        assert_eq!(moving_line(&seg, 2.0, 50, &static_params).offset(), 2.0);
    }

    #[test]
    fn targets_spaced_along_normal() {
        // Horizontal boundary through the origin with normal (0,-1); the
        // sweep line is vertical, so the anchor sits at the origin and the
        // targets stack along the normal.
        let seg = BoundarySegment::new(-FRAC_PI_2, 0.0).unwrap();
        let line = LineSpec::from_normal(seg.sweep_direction(), 0.0).unwrap();
        let t = sweep_targets(&line, &seg, 1.0, 3, Side::B1).unwrap();
        assert!(t.reference.norm() < 1e-9);
        for (i, p) in t.points.iter().enumerate() {
            assert!(p.x.abs() < 1e-9);
            assert!((p.y + (i + 1) as f64).abs() < 1e-9);
        }
        let t2 = sweep_targets(&line, &seg, 1.0, 3, Side::B2).unwrap();
        for (i, p) in t2.points.iter().enumerate() {
            assert!((p.y - (i + 1) as f64).abs() < 1e-9);
        }
        let empty = sweep_targets(&line, &seg, 1.0, 0, Side::B1).unwrap();
        assert!(empty.points.is_empty());
    }

    #[test]
    fn boundary_weight_rows() {
        let (h, m) = boundary_weights(2, false);
        assert_eq!(h, vec![1.0 / 3.0; 3]);
        assert_eq!(m, vec![1.0 / 3.0; 3]);
        let (h, m) = boundary_weights(2, true);
        assert_eq!(h, vec![2.0 / 6.0, 3.0 / 6.0, 1.0 / 6.0]);
        assert_eq!(m, vec![2.0 / 6.0, 1.0 / 6.0, 3.0 / 6.0]);
        let (h, m) = boundary_weights(1, true);
        assert_eq!(h, vec![1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(m, vec![2.0 / 3.0, 1.0 / 3.0]);
        for (row, _) in [boundary_weights(0, false), boundary_weights(3, true)] {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn steady_sweep_is_a_fixed_point() {
        // Vertical boundary x = 0, sweep direction pi/2 (upward). Robots on
        // the barrier at spacing d, all coordination already at phi_b.
        let params = params6();
        let seg = BoundarySegment::new(0.0, 0.0).unwrap();
        let phi_b = seg.sweep_direction();
        let d = params.spacing;
        let n = 4;
        let positions: Vec<Vec2> = (1..=n).map(|i| v(d * i as f64, 0.0)).collect();
        let state = HeadingState::new(vec![phi_b; n], vec![phi_b; n]).unwrap();
        let out = sweep_step(&positions, &state, &params, &[seg], true).unwrap();
        for c in &out.controls {
            assert!((c.speed - params.sweep_speed).abs() < 1e-9, "speed {}", c.speed);
            assert!((c.heading - phi_b).abs() < 1e-9, "heading {}", c.heading);
        }
        for phi in &out.coordination {
            assert!((phi - phi_b).abs() < 1e-12);
        }
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn lone_robot_moves_at_sweep_speed() {
        let params = params6();
        let seg = BoundarySegment::new(0.0, 0.0).unwrap();
        // Far from the boundary and from everyone else.
        let positions = vec![v(50.0, 0.0), v(100.0, 0.0)];
        let state = HeadingState::new(vec![0.3, 0.4], vec![0.3, 0.4]).unwrap();
        let out = sweep_step(&positions, &state, &params, &[seg], true).unwrap();
        for (c, phi) in out.controls.iter().zip(&state.coordination) {
            assert!((c.speed - params.sweep_speed).abs() < 1e-12);
            assert!((c.heading - phi).abs() < 1e-12);
        }
    }

    #[test]
    fn assignment_beats_identity_when_swapped() {
        let robots = vec![v(0.0, 0.0), v(1.0, 0.0)];
        let targets = vec![v(1.0, 0.0), v(0.0, 0.0)];
        let d = assignment_distances(&robots, &targets);
        assert!(d.iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn assignment_matches_brute_force() {
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 1 {
                return vec![vec![0]];
            }
            let mut out = Vec::new();
            for p in permutations(n - 1) {
                for slot in 0..n {
                    let mut q: Vec<usize> = p.iter().map(|&x| x + usize::from(x >= slot)).collect();
                    q.push(slot);
                    out.push(q);
                }
            }
            out
        }
        let mut rng = crate::rng::SimRng::new(99);
        for n in 2..=6usize {
            let cost: Vec<Vec<f64>> =
                (0..n).map(|_| (0..n).map(|_| rng.unit()).collect()).collect();
            let assignment = assign_min_cost(&cost);
            let total: f64 = assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            let best = permutations(n)
                .into_iter()
                .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!((total - best).abs() < 1e-9, "n={n}: {total} vs {best}");
        }
    }
}
