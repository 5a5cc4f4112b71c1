//! Communication graph induced by the disk range, plus the graph-theoretic
//! predicates (connectivity, irreducibility, aperiodicity) the consensus
//! criteria rest on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::kernels::WeightMatrix;

/// Physical swarm parameters. Units: metres, seconds, radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwarmParams {
    /// Number of robots.
    pub n: usize,
    /// Communication disk radius R_c.
    pub comm_range: f64,
    /// Sensing disk radius R_s.
    pub sense_range: f64,
    /// Boundary detection radius R_b.
    pub boundary_range: f64,
    /// Constant or maximum linear speed (m/s).
    pub speed: f64,
    /// Desired sweeping speed v0 (m/s).
    pub sweep_speed: f64,
    /// Sampling period T (s).
    pub period: f64,
    /// Desired inter-robot spacing d (m).
    pub spacing: f64,
    /// Steps per revolution M of the heading quantizer.
    pub steps_per_rev: u32,
}

impl SwarmParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Scenario(format!("need at least 2 robots, got {}", self.n)));
        }
        for (name, v) in [
            ("comm_range", self.comm_range),
            ("sense_range", self.sense_range),
            ("boundary_range", self.boundary_range),
            ("period", self.period),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Scenario(format!("{name} must be positive, got {v}")));
            }
        }
        if self.steps_per_rev < 4 {
            return Err(Error::Scenario(format!(
                "steps_per_rev must be at least 4, got {}",
                self.steps_per_rev
            )));
        }
        if !self.speed.is_finite() || !self.sweep_speed.is_finite() || !self.spacing.is_finite() {
            return Err(Error::Scenario("non-finite speed or spacing".into()));
        }
        Ok(())
    }

    /// Checks the paper-level operating assumptions and returns a warning per
    /// violation. These are diagnostics, not errors: the reference
    /// simulations themselves run outside some of these bounds.
    pub fn assumption_warnings(&self, barrier_length: Option<f64>) -> Vec<String> {
        let mut warnings = Vec::new();
        let sqrt2 = std::f64::consts::SQRT_2;
        if self.comm_range >= self.speed * self.period / sqrt2 {
            warnings.push(format!(
                "communication condition violated: R_c = {} >= v_max*T/sqrt(2) = {}",
                self.comm_range,
                self.speed * self.period / sqrt2
            ));
        }
        if self.boundary_range / self.comm_range <= sqrt2 {
            warnings.push(format!(
                "boundary detection condition violated: R_b/R_c = {} <= sqrt(2)",
                self.boundary_range / self.comm_range
            ));
        }
        if let Some(d) = barrier_length {
            if (self.n as f64 + 1.0) * self.sense_range <= d {
                warnings.push(format!(
                    "barrier condition violated: (n+1)*R_s = {} <= D = {d}",
                    (self.n as f64 + 1.0) * self.sense_range
                ));
            }
            if self.sense_range >= self.comm_range {
                warnings.push(format!(
                    "sensing range condition violated: R_s = {} >= R_c = {}",
                    self.sense_range, self.comm_range
                ));
            }
        }
        let v0_bound = ((self.speed * self.period - self.comm_range * sqrt2)
            .min(self.boundary_range - self.comm_range * sqrt2))
            / self.period;
        if self.sweep_speed != 0.0
            && !(self.sweep_speed.abs() > 0.0 && self.sweep_speed.abs() <= v0_bound)
        {
            warnings.push(format!(
                "sweeping speed condition violated: |v0| = {} not in (0, {v0_bound}]",
                self.sweep_speed.abs()
            ));
        }
        warnings
    }
}

/// Binary symmetric neighbour graph with zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    n: usize,
    entries: Vec<bool>,
}

impl AdjacencyMatrix {
    pub fn empty(n: usize) -> Self {
        Self { n, entries: vec![false; n * n] }
    }

    /// Builds from 0/1 rows, validating symmetry and a zero diagonal.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut a = Self::empty(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Schema(format!(
                    "adjacency row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => a.entries[i * n + j] = true,
                    _ => {
                        return Err(Error::Schema(format!(
                            "adjacency entry ({i},{j}) is {v}, expected 0 or 1"
                        )))
                    }
                }
            }
        }
        for i in 0..n {
            if a.get(i, i) {
                return Err(Error::Schema(format!("adjacency diagonal ({i},{i}) must be 0")));
            }
            for j in 0..i {
                if a.get(i, j) != a.get(j, i) {
                    return Err(Error::Schema(format!("adjacency not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j]
    }

    pub fn set_edge(&mut self, i: usize, j: usize) {
        assert_ne!(i, j);
        self.entries[i * self.n + j] = true;
        self.entries[j * self.n + i] = true;
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.get(i, j)).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.get(i, j)).count()
    }

    /// Row as 0.0/1.0 reals, as consumed by the similarity measure.
    pub fn row_f64(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| if self.get(i, j) { 1.0 } else { 0.0 }).collect()
    }

    pub fn rows_u8(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| u8::from(self.get(i, j))).collect())
            .collect()
    }
}

/// Disk-range graph: robots i != j are neighbours iff their Euclidean
/// distance is at most `comm_range` (ties count as neighbours).
pub fn build_adjacency(positions: &[Vec2], comm_range: f64) -> AdjacencyMatrix {
    let n = positions.len();
    let mut a = AdjacencyMatrix::empty(n);
    for i in 0..n {
        for j in 0..i {
            if positions[i].distance(positions[j]) <= comm_range {
                a.set_edge(i, j);
            }
        }
    }
    a
}

/// True iff one BFS component covers all vertices.
pub fn is_connected(a: &AdjacencyMatrix) -> bool {
    let n = a.n();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if a.get(u, v) && !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

fn reachable_all(w: &WeightMatrix, transpose: bool) -> bool {
    let n = w.n();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            let edge = if transpose { w.get(v, u) } else { w.get(u, v) };
            if edge > 0.0 && !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// True iff the directed graph with an edge i -> j whenever w_ij > 0 is
/// strongly connected.
pub fn is_irreducible(w: &WeightMatrix) -> bool {
    reachable_all(w, false) && reachable_all(w, true)
}

/// True iff the gcd of all directed cycle lengths of G(w) is 1. Requires an
/// irreducible matrix; any strictly positive diagonal entry short-circuits
/// to true.
pub fn is_aperiodic(w: &WeightMatrix) -> Result<bool> {
    if !is_irreducible(w) {
        return Err(Error::Precondition(
            "is_aperiodic called on a reducible matrix".into(),
        ));
    }
    let n = w.n();
    if (0..n).any(|i| w.get(i, i) > 0.0) {
        return Ok(true);
    }
    // BFS levels from vertex 0; the period is the gcd of (level(u)+1-level(v))
    // over all edges u -> v.
    let mut level = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    level[0] = 0;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if w.get(u, v) > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: u64 = 0;
    for u in 0..n {
        for v in 0..n {
            if w.get(u, v) > 0.0 {
                let d = level[u] as i64 + 1 - level[v] as i64;
                g = gcd(g, d.unsigned_abs());
            }
        }
    }
    Ok(g == 1)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y).unwrap()
    }

    #[test]
    fn adjacency_by_range() {
        let a = build_adjacency(&[v(0.0, 0.0), v(1.0, 0.0)], 1.4);
        assert_eq!(a.rows_u8(), vec![vec![0, 1], vec![1, 0]]);
        let a = build_adjacency(&[v(0.0, 0.0), v(2.0, 0.0)], 1.4);
        assert_eq!(a.rows_u8(), vec![vec![0, 0], vec![0, 0]]);
        let a = build_adjacency(&[v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0)], 1.4);
        assert_eq!(a.rows_u8(), vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]]);
    }

    #[test]
    fn range_ties_are_neighbours() {
        let a = build_adjacency(&[v(0.0, 0.0), v(2.0, 0.0)], 2.0);
        assert!(a.get(0, 1));
    }

    #[test]
    fn connectivity() {
        let path = AdjacencyMatrix::from_rows(&[
            vec![0, 1, 0],
            vec![1, 0, 1],
            vec![0, 1, 0],
        ])
        .unwrap();
        assert!(is_connected(&path));
        let disjoint = AdjacencyMatrix::from_rows(&[
            vec![0, 1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, 1, 0],
        ])
        .unwrap();
        assert!(!is_connected(&disjoint));
    }

    #[test]
    fn irreducibility() {
        let perm = WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(is_irreducible(&perm));
        let block = WeightMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!is_irreducible(&block));
        let stuck = WeightMatrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(!is_irreducible(&stuck));
    }

    #[test]
    fn aperiodicity() {
        let perm = WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(!is_aperiodic(&perm).unwrap());
        let guarded = WeightMatrix::from_rows(&[vec![0.01, 0.99], vec![1.0, 0.0]]).unwrap();
        assert!(is_aperiodic(&guarded).unwrap());
        let cycle3 = WeightMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(!is_aperiodic(&cycle3).unwrap());
        // Two interleaved cycle lengths (2 and 3) are coprime.
        let mixed = WeightMatrix::from_rows(&[
            vec![0.0, 0.5, 0.5],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(is_aperiodic(&mixed).unwrap());
        let block = WeightMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(is_aperiodic(&block).is_err());
    }

    #[test]
    fn bridged_cliques_graph_connected() {
        let a = crate::presets::bridged_cliques_12();
        assert!(is_connected(&a));
        assert_eq!(a.degree(1), 6);
        assert_eq!(a.degree(11), 6);
        assert_eq!(a.degree(0), 5);
    }

    #[test]
    fn assumption_warnings_fire() {
        let p = SwarmParams {
            n: 6,
            comm_range: 2.0,
            sense_range: 2.0,
            boundary_range: 2.0,
            speed: 1.0,
            sweep_speed: 0.05,
            period: 1.0,
            spacing: 1.5,
            steps_per_rev: 20,
        };
        let w = p.assumption_warnings(Some(9.0));
        // R_c >= v*T/sqrt(2), R_b/R_c <= sqrt(2), R_s >= R_c, v0 bound: all violated.
        assert_eq!(w.len(), 4);
        assert!(p.validate().is_ok());
    }
}
