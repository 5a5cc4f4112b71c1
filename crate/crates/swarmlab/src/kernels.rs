//! Heading update rules: Vicsek vector averaging, simple and weighted
//! averaging, cosine-similarity weights, and the quantized biased update.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;

/// Row-sum tolerance for stochastic matrices.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Resultant-norm threshold below which the Vicsek average is degenerate.
const DEGENERATE_TOL: f64 = 1e-9;

/// Row-stochastic non-negative influence matrix driving the consensus
/// dynamics. Validated at construction: entries >= 0, each row sums to 1
/// within [`ROW_SUM_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidWeights("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidWeights(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &w in row {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidWeights(format!("row {i} has entry {w}")));
                }
                sum += w;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidWeights(format!(
                    "row {i} sums to {sum}, deviation {:e}",
                    (sum - 1.0).abs()
                )));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Applies the matrix to a state vector: `y = W x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(w, v)| w * v).sum())
            .collect()
    }

    /// Left-multiplies: `self * other` (applies `other` first).
    pub fn matmul(&self, other: &WeightMatrix) -> WeightMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        WeightMatrix { n, entries }
    }

    /// True when every positive off-diagonal entry of row `i` lies inside the
    /// closed neighbourhood of `i`.
    pub fn support_within(&self, adj: &AdjacencyMatrix) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.get(i, j) > 0.0 && !adj.get(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Heading consensus state: the actual headings plus the coordination
/// variables updated by the averaging rules (radians, not wrapped).
#[derive(Clone, Debug, PartialEq)]
pub struct HeadingState {
    pub headings: Vec<f64>,
    pub coordination: Vec<f64>,
}

impl HeadingState {
    pub fn new(headings: Vec<f64>, coordination: Vec<f64>) -> Result<Self> {
        if headings.iter().chain(&coordination).any(|h| !h.is_finite()) {
            return Err(Error::NonFinite("HeadingState"));
        }
        Ok(Self { headings, coordination })
    }
}

/// Vicsek rule: direction of the summed unit velocity vectors of self plus
/// neighbours, mapped to `[0, 2*pi)`.
pub fn vicsek_update(phi_self: f64, phi_neighbours: &[f64]) -> Result<f64> {
    let mut s = phi_self.sin();
    let mut c = phi_self.cos();
    for &phi in phi_neighbours {
        s += phi.sin();
        c += phi.cos();
    }
    if s.hypot(c) < DEGENERATE_TOL {
        return Err(Error::DegenerateAverage);
    }
    Ok(s.atan2(c).rem_euclid(TAU))
}

/// Arithmetic mean of own heading plus neighbour headings; no wrapping.
pub fn simple_average_update(phi_self: f64, phi_neighbours: &[f64]) -> f64 {
    let sum: f64 = phi_self + phi_neighbours.iter().sum::<f64>();
    sum / (1 + phi_neighbours.len()) as f64
}

/// Weighted average `w[0]*phi_self + sum w[1+j]*phi_neighbours[j]`.
/// `weights` must be non-negative and sum to 1 within [`ROW_SUM_TOL`].
pub fn weighted_average_update(
    phi_self: f64,
    phi_neighbours: &[f64],
    weights: &[f64],
) -> Result<f64> {
    if weights.len() != 1 + phi_neighbours.len() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} headings",
            weights.len(),
            1 + phi_neighbours.len()
        )));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) || (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::InvalidWeights(format!("weight sum {sum}")));
    }
    let mut out = weights[0] * phi_self;
    for (w, phi) in weights[1..].iter().zip(phi_neighbours) {
        out += w * phi;
    }
    Ok(out)
}

/// Salton cosine similarity `<a_i|a_j> / (||a_i|| ||a_j||)` between two
/// adjacency rows. Errors on a zero-norm row.
pub fn cosine_similarity(row_i: &[f64], row_j: &[f64]) -> Result<f64> {
    assert_eq!(row_i.len(), row_j.len());
    let dot: f64 = row_i.iter().zip(row_j).map(|(a, b)| a * b).sum();
    let ni2: f64 = row_i.iter().map(|a| a * a).sum();
    let nj2: f64 = row_j.iter().map(|a| a * a).sum();
    if ni2 == 0.0 || nj2 == 0.0 {
        return Err(Error::IsolatedNode(usize::MAX));
    }
    Ok(dot / (ni2 * nj2).sqrt())
}

/// Similarity-based weight row for robot `i`: neighbours receive
/// `1 - cos(v_ij)` (dissimilar neighbours weigh more), rescaled to sum at
/// most 1, with the remainder as self-weight. Returns the full length-n row.
pub fn similarity_weights(adj: &AdjacencyMatrix, i: usize) -> Result<Vec<f64>> {
    let neighbours = adj.neighbours(i);
    if neighbours.is_empty() {
        return Err(Error::IsolatedNode(i));
    }
    let row_i = adj.row_f64(i);
    let mut row = vec![0.0; adj.n()];
    let mut sum = 0.0;
    for &j in &neighbours {
        let cos = cosine_similarity(&row_i, &adj.row_f64(j))
            .map_err(|_| Error::IsolatedNode(j))?;
        let w = 1.0 - cos;
        row[j] = w;
        sum += w;
    }
    if sum > 1.0 {
        for &j in &neighbours {
            row[j] /= sum;
        }
        sum = 1.0;
    }
    row[i] = (1.0 - sum).max(0.0);
    Ok(row)
}

/// Similarity weight rows for every robot of a graph without isolated nodes.
pub fn similarity_weight_matrix(adj: &AdjacencyMatrix) -> Result<WeightMatrix> {
    let rows: Result<Vec<_>> = (0..adj.n()).map(|i| similarity_weights(adj, i)).collect();
    WeightMatrix::from_rows(&rows?)
}

/// Ensures at least one strictly positive self-weight: if the diagonal is
/// all zero, the lowest-index row is mixed with `epsilon` of self-influence.
pub fn apply_aperiodicity_guard(w: &WeightMatrix, epsilon: f64) -> WeightMatrix {
    assert!(epsilon > 0.0 && epsilon < 1.0);
    if (0..w.n()).any(|i| w.get(i, i) > 0.0) {
        return w.clone();
    }
    let mut rows = w.rows();
    for (j, entry) in rows[0].iter_mut().enumerate() {
        *entry = if j == 0 { epsilon } else { *entry * (1.0 - epsilon) };
    }
    WeightMatrix::from_rows(&rows).expect("guarded row stays stochastic")
}

/// Rounding choice for the neighbour-biased quantized update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bias {
    Floor,
    Ceil,
    /// Ceil when the fractional part of the neighbour mean (in grid steps)
    /// is >= 1/2, floor otherwise.
    Nearest,
}

/// Heading grid `{0, Q, 2Q, ..., (M-1)Q}` with `Q = 2*pi/M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizationGrid {
    steps: u32,
    step_size: f64,
}

impl QuantizationGrid {
    pub fn new(steps: u32) -> Result<Self> {
        if steps < 4 {
            return Err(Error::Precondition(format!(
                "quantization grid needs at least 4 steps, got {steps}"
            )));
        }
        Ok(Self { steps, step_size: TAU / steps as f64 })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    /// Grid value for level `k`, reduced mod `2*pi`.
    pub fn value(&self, k: i64) -> f64 {
        let m = self.steps as i64;
        (k.rem_euclid(m)) as f64 * self.step_size
    }

    /// Grid level of an on-grid heading; errors when `theta` is off-grid.
    pub fn index_of(&self, theta: f64) -> Result<i64> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("quantized heading"));
        }
        let k = (theta / self.step_size).round();
        if (theta - k * self.step_size).abs() > 1e-9 {
            return Err(Error::OffGrid(theta));
        }
        Ok((k as i64).rem_euclid(self.steps as i64))
    }
}

/// Switch variable `([theta_i] - mean of neighbour headings) / Q`.
pub fn quantized_delta(
    theta_self: f64,
    theta_neighbours: &[f64],
    grid: &QuantizationGrid,
) -> Result<f64> {
    if theta_neighbours.is_empty() {
        return Err(Error::NoNeighbours);
    }
    let k_self = grid.index_of(theta_self)?;
    let mut sum = 0i64;
    for &t in theta_neighbours {
        sum += grid.index_of(t)?;
    }
    let m = theta_neighbours.len() as i64;
    Ok((m * k_self - sum) as f64 / m as f64)
}

/// Unbiased baseline: the Vicsek vector average of self plus neighbours,
/// snapped down to the grid. This is the rule whose adjacent-grid-level
/// oscillation the biased strategy breaks; a cancelling vector sum (and a
/// lone robot) holds the current heading.
pub fn quantized_plain_update(
    theta_self: f64,
    theta_neighbours: &[f64],
    grid: &QuantizationGrid,
) -> Result<f64> {
    let k_self = grid.index_of(theta_self)?;
    for &t in theta_neighbours {
        grid.index_of(t)?;
    }
    if theta_neighbours.is_empty() {
        return Ok(grid.value(k_self));
    }
    match vicsek_update(theta_self, theta_neighbours) {
        Ok(mean) => {
            // Snap down, tolerating rounding at exact grid multiples.
            let k = (mean / grid.step_size() + 1e-9).floor() as i64;
            Ok(grid.value(k))
        }
        Err(Error::DegenerateAverage) => Ok(grid.value(k_self)),
        Err(e) => Err(e),
    }
}

/// Self-/neighbour-biased quantized update:
/// `|delta| > 1` -> floor of the combined mean; `delta != 0, |delta| <= 1`
/// -> floor or ceil of the neighbour mean per `bias`; `delta = 0` -> hold.
pub fn quantized_update(
    theta_self: f64,
    theta_neighbours: &[f64],
    grid: &QuantizationGrid,
    bias: Bias,
) -> Result<f64> {
    let k_self = grid.index_of(theta_self)?;
    if theta_neighbours.is_empty() {
        return Ok(grid.value(k_self));
    }
    let mut sum = 0i64;
    for &t in theta_neighbours {
        sum += grid.index_of(t)?;
    }
    let m = theta_neighbours.len() as i64;
    let diff = m * k_self - sum; // m * delta, exact
    if diff == 0 {
        return Ok(grid.value(k_self));
    }
    if diff.abs() > m {
        let combined = (k_self + sum).div_euclid(1 + m);
        return Ok(grid.value(combined));
    }
    let floor = sum.div_euclid(m);
    let rem = sum.rem_euclid(m);
    let k = match bias {
        Bias::Floor => floor,
        Bias::Ceil => {
            if rem == 0 {
                floor
            } else {
                floor + 1
            }
        }
        Bias::Nearest => {
            if 2 * rem >= m {
                floor + 1
            } else {
                floor
            }
        }
    };
    Ok(grid.value(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AdjacencyMatrix;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn path3() -> AdjacencyMatrix {
        AdjacencyMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]]).unwrap()
    }

    #[test]
    fn vicsek_examples() {
        assert_eq!(vicsek_update(0.0, &[]).unwrap(), 0.0);
        let v = vicsek_update(0.0, &[FRAC_PI_2]).unwrap();
        assert!((v - FRAC_PI_4).abs() < 1e-12);
        assert!(matches!(vicsek_update(0.0, &[PI]), Err(Error::DegenerateAverage)));
    }

    #[test]
    fn vicsek_output_range() {
        let v = vicsek_update(-FRAC_PI_2, &[-FRAC_PI_2]).unwrap();
        assert!((0.0..TAU).contains(&v));
        assert!((v - 3.0 * FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn simple_average_examples() {
        assert_eq!(simple_average_update(0.4, &[]), 0.4);
        assert!((simple_average_update(0.0, &[FRAC_PI_2]) - FRAC_PI_4).abs() < 1e-15);
        assert!((simple_average_update(0.1, &[0.2, 0.3]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn weighted_average_examples() {
        let third = 1.0 / 3.0;
        let w = weighted_average_update(0.1, &[0.2, 0.3], &[third, third, third]).unwrap();
        assert!((w - 0.2).abs() < 1e-15);

        // Boundary-biased row: self 2/6, far 1/6, boundary 3/6.
        let w = weighted_average_update(
            0.0,
            &[0.0, FRAC_PI_2],
            &[2.0 / 6.0, 1.0 / 6.0, 3.0 / 6.0],
        )
        .unwrap();
        assert!((w - FRAC_PI_4).abs() < 1e-15);

        assert_eq!(weighted_average_update(0.7, &[], &[1.0]).unwrap(), 0.7);
        assert!(weighted_average_update(0.0, &[1.0], &[0.6, 0.6]).is_err());
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[0.0, 1.0, 1.0], &[0.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap(), 0.0);
        let c = cosine_similarity(&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap();
        assert!((c - 0.5).abs() < 1e-15);
        assert!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn similarity_weights_on_path() {
        let a = path3();
        let mid = similarity_weights(&a, 1).unwrap();
        assert!((mid[0] - 0.5).abs() < 1e-15);
        assert!((mid[2] - 0.5).abs() < 1e-15);
        assert_eq!(mid[1], 0.0);
        let end = similarity_weights(&a, 0).unwrap();
        assert_eq!(end[1], 1.0);
        assert_eq!(end[0], 0.0);
    }

    #[test]
    fn similarity_weights_complete_triangle() {
        let k3 = AdjacencyMatrix::from_rows(&[
            vec![0, 1, 1],
            vec![1, 0, 1],
            vec![1, 1, 0],
        ])
        .unwrap();
        let row = similarity_weights(&k3, 0).unwrap();
        assert!((row[1] - 0.5).abs() < 1e-12);
        assert!((row[2] - 0.5).abs() < 1e-12);
        assert!(row[0].abs() < 1e-12);
    }

    #[test]
    fn guard_examples() {
        let perm = WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let g = apply_aperiodicity_guard(&perm, 0.01);
        assert_eq!(g.row(0), &[0.01, 0.99]);
        assert_eq!(g.row(1), &[1.0, 0.0]);

        let with_diag =
            WeightMatrix::from_rows(&[vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        assert_eq!(apply_aperiodicity_guard(&with_diag, 0.01), with_diag);

        let path = similarity_weight_matrix(&path3()).unwrap();
        let g = apply_aperiodicity_guard(&path, 0.01);
        assert_eq!(g.row(0), &[0.01, 0.99, 0.0]);
    }

    #[test]
    fn quantized_delta_examples() {
        let grid = QuantizationGrid::new(20).unwrap();
        let q = grid.step_size();
        assert_eq!(quantized_delta(q, &[q], &grid).unwrap(), 0.0);
        assert_eq!(quantized_delta(2.0 * q, &[q, q], &grid).unwrap(), 1.0);
        assert_eq!(quantized_delta(0.0, &[3.0 * q], &grid).unwrap(), -3.0);
        assert!(matches!(quantized_delta(0.0, &[], &grid), Err(Error::NoNeighbours)));
        assert!(matches!(quantized_delta(0.5 * q, &[q], &grid), Err(Error::OffGrid(_))));
    }

    #[test]
    fn quantized_update_examples() {
        let grid = QuantizationGrid::new(20).unwrap();
        let q = grid.step_size();
        // delta = 0: self-biased hold.
        assert_eq!(
            quantized_update(5.0 * q, &[5.0 * q, 5.0 * q], &grid, Bias::Nearest).unwrap(),
            grid.value(5)
        );
        // delta = 1, floor bias hits the neighbour mean.
        assert_eq!(
            quantized_update(2.0 * q, &[q, q], &grid, Bias::Floor).unwrap(),
            grid.value(1)
        );
        // |delta| > 1: floor of the combined mean 4Q/3.
        assert_eq!(
            quantized_update(4.0 * q, &[0.0, 0.0], &grid, Bias::Floor).unwrap(),
            grid.value(1)
        );
    }

    #[test]
    fn quantized_update_closed_over_grid() {
        // Exhaustive single-neighbour sweep at M = 20: the output is a grid
        // element bit-for-bit.
        let grid = QuantizationGrid::new(20).unwrap();
        for ks in 0..20i64 {
            for kn in 0..20i64 {
                for bias in [Bias::Floor, Bias::Ceil, Bias::Nearest] {
                    let out =
                        quantized_update(grid.value(ks), &[grid.value(kn)], &grid, bias).unwrap();
                    let k = grid.index_of(out).unwrap();
                    assert_eq!(out.to_bits(), grid.value(k).to_bits());
                }
                let out =
                    quantized_plain_update(grid.value(ks), &[grid.value(kn)], &grid).unwrap();
                let k = grid.index_of(out).unwrap();
                assert_eq!(out.to_bits(), grid.value(k).to_bits());
            }
        }
    }

    #[test]
    fn weight_matrix_validation() {
        assert!(WeightMatrix::from_rows(&[vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![-0.1, 1.1], vec![0.5, 0.5]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![0.5, 0.5]]).is_err());
    }
}
