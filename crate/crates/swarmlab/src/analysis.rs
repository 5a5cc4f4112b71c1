//! Spectral and ergodicity analysis of weight matrices: the coefficients of
//! ergodicity, the SLEM consensus criterion, and running-product diagnostics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_aperiodic, is_irreducible};
use crate::kernels::WeightMatrix;

/// Default tolerance on the strict inequality `slem < 1`.
pub const DEFAULT_CONSENSUS_TOL: f64 = 1e-9;

/// Relative singular-value threshold for the numerical rank.
pub const RANK_TOL: f64 = 1e-8;

const MAX_EIGEN_SWEEPS: usize = 10_000;

/// Outcome of [`analyze`]: both ergodicity coefficients, the second largest
/// eigenvalue modulus, the graph classification, and the consensus verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub kappa: f64,
    pub nu: f64,
    pub slem: f64,
    pub irreducible: bool,
    pub aperiodic: bool,
    #[serde(rename = "verdict")]
    pub consensus_verdict: bool,
}

/// Proper coefficient of ergodicity:
/// `kappa(W) = 1/2 max_{i,j} sum_s |w_is - w_js|`.
pub fn kappa(w: &WeightMatrix) -> f64 {
    let n = w.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            let d: f64 = (0..n).map(|s| (w.get(i, s) - w.get(j, s)).abs()).sum();
            worst = worst.max(d);
        }
    }
    0.5 * worst
}

/// Improper coefficient of ergodicity: `nu(W) = 1 - max_j min_i w_ij`.
pub fn nu(w: &WeightMatrix) -> f64 {
    let n = w.n();
    let best_col = (0..n)
        .map(|j| (0..n).map(|i| w.get(i, j)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    1.0 - best_col
}

/// Eigenvalue moduli of a square matrix, descending. The QR iteration can
/// cycle indefinitely on exactly-symmetric spectra (e.g. the +-1 pair of a
/// periodic weight matrix), so failed solves are retried under seeded random
/// orthogonal similarity transforms, which keep the spectrum but break the
/// cycling pattern.
fn eigen_moduli(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut work = m.clone();
    let mut rng = crate::rng::SimRng::new(0x5eed);
    for attempt in 0..6 {
        if let Some(schur) = nalgebra::linalg::Schur::try_new(work.clone(), 1e-12, MAX_EIGEN_SWEEPS)
        {
            let mut moduli: Vec<f64> =
                schur.complex_eigenvalues().iter().map(|c| c.norm()).collect();
            moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
            return Ok(moduli);
        }
        let _ = attempt;
        // Random rotation Q from the QR factorization of a random matrix.
        let random = DMatrix::from_fn(n, n, |_, _| rng.unit() - 0.5);
        let q = random.qr().q();
        work = q.transpose() * m * &q;
    }
    Err(Error::NumericalFailure)
}

/// Second largest eigenvalue modulus of a square real matrix, counted with
/// multiplicity. Dense Schur solve; intended for desk-scale n <= 64.
pub fn slem(rows: &[Vec<f64>]) -> Result<f64> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("slem needs a square matrix".into()));
    }
    if n > 64 {
        return Err(Error::Precondition(format!("slem limited to n <= 64, got {n}")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("slem input"));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(eigen_moduli(&m)?[1])
}

/// Full report for a weight matrix; `consensus_verdict` is
/// `slem < 1 - tol`.
pub fn analyze(w: &WeightMatrix, tol: f64) -> Result<ErgodicityReport> {
    let slem = slem(&w.rows())?;
    let irreducible = is_irreducible(w);
    let aperiodic = if irreducible { is_aperiodic(w)? } else { false };
    Ok(ErgodicityReport {
        kappa: kappa(w),
        nu: nu(w),
        slem,
        irreducible,
        aperiodic,
        consensus_verdict: slem < 1.0 - tol,
    })
}

/// One step of the running left-product `P_k = W_k ... W_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductStep {
    pub step: usize,
    pub rank: usize,
    pub kappa: f64,
}

/// Numerical rank: count of singular values above `RANK_TOL` times the
/// largest one.
pub fn numerical_rank(w: &WeightMatrix) -> usize {
    let n = w.n();
    let m = DMatrix::from_fn(n, n, |i, j| w.get(i, j));
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * largest).count()
}

/// Rank and kappa of the running left-product after each step.
pub fn product_diagnostics(ws: &[WeightMatrix]) -> Result<Vec<ProductStep>> {
    let Some(first) = ws.first() else {
        return Ok(Vec::new());
    };
    let n = first.n();
    if ws.iter().any(|w| w.n() != n) {
        return Err(Error::Precondition("weight matrix sequence not conformable".into()));
    }
    let mut product = WeightMatrix::identity(n);
    let mut out = Vec::with_capacity(ws.len());
    for (k, w) in ws.iter().enumerate() {
        product = w.matmul(&product);
        out.push(ProductStep {
            step: k + 1,
            rank: numerical_rank(&product),
            kappa: kappa(&product),
        });
    }
    Ok(out)
}

/// Checks the submultiplicativity inequality
/// `kappa(W_r ... W_1) <= prod kappa(W_i)` up to 1e-12.
pub fn submultiplicativity_check(ws: &[WeightMatrix]) -> Result<bool> {
    let Some(first) = ws.first() else {
        return Ok(true);
    };
    let n = first.n();
    if ws.iter().any(|w| w.n() != n) {
        return Err(Error::Precondition("weight matrix sequence not conformable".into()));
    }
    let mut product = WeightMatrix::identity(n);
    let mut bound = 1.0;
    for w in ws {
        product = w.matmul(&product);
        bound *= kappa(w);
    }
    Ok(kappa(&product) <= bound + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wm(rows: &[&[f64]]) -> WeightMatrix {
        WeightMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn kappa_examples() {
        let rank_one = wm(&[&[0.3, 0.7], &[0.3, 0.7]]);
        assert_eq!(kappa(&rank_one), 0.0);
        let id = wm(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(kappa(&id), 1.0);
        let flat = wm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(kappa(&flat), 0.0);
    }

    #[test]
    fn nu_examples() {
        let id = wm(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(nu(&id), 1.0);
        let flat = wm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(nu(&flat), 0.5);
        let rank_one = wm(&[&[0.3, 0.7], &[0.3, 0.7]]);
        assert!((nu(&rank_one) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn slem_examples() {
        let perm = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!((slem(&perm).unwrap() - 1.0).abs() < 1e-8);
        let flat = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        assert!(slem(&flat).unwrap().abs() < 1e-8);
        // Equal-weight path of three robots: eigenvalues 1, 1/2, -1/6.
        let third = 1.0 / 3.0;
        let path = vec![
            vec![0.5, 0.5, 0.0],
            vec![third, third, third],
            vec![0.0, 0.5, 0.5],
        ];
        assert!((slem(&path).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn slem_on_periodic_path_matrix() {
        // Bipartite structure with spectrum {1, -1, 0}: the plain QR cycle
        // case that needs the rotated retry.
        let rows = vec![
            vec![0.0, 1.0, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 1.0, 0.0],
        ];
        assert!((slem(&rows).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn slem_rejects_bad_input() {
        assert!(slem(&[vec![1.0, 0.0]]).is_err());
        assert!(slem(&[vec![f64::NAN]]).is_err());
        assert_eq!(slem(&[vec![1.0]]).unwrap(), 0.0);
    }

    #[test]
    fn analyze_verdicts() {
        let perm = wm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let report = analyze(&perm, DEFAULT_CONSENSUS_TOL).unwrap();
        assert!(!report.consensus_verdict);
        assert!(report.irreducible && !report.aperiodic);

        let guarded = crate::kernels::apply_aperiodicity_guard(&perm, 0.01);
        let report = analyze(&guarded, DEFAULT_CONSENSUS_TOL).unwrap();
        assert!(report.consensus_verdict);
        assert!(report.slem < 1.0 && report.slem > 0.9);

        let rank_one = wm(&[&[0.3, 0.7], &[0.3, 0.7]]);
        let report = analyze(&rank_one, DEFAULT_CONSENSUS_TOL).unwrap();
        assert!(report.consensus_verdict);
        assert_eq!(report.kappa, 0.0);
        assert!(report.kappa <= report.nu);
    }

    #[test]
    fn product_diagnostics_rank_one_immediately() {
        let flat = wm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let steps = product_diagnostics(&[flat.clone(), flat]).unwrap();
        assert_eq!(steps[0].rank, 1);
        assert_eq!(steps[0].kappa, 0.0);
        assert_eq!(steps[1].rank, 1);
    }

    #[test]
    fn product_diagnostics_path_converges() {
        let third = 1.0 / 3.0;
        let path = wm(&[
            &[0.5, 0.5, 0.0],
            &[third, third, third],
            &[0.0, 0.5, 0.5],
        ]);
        let seq = vec![path; 60];
        let steps = product_diagnostics(&seq).unwrap();
        let last = steps.last().unwrap();
        assert_eq!(last.rank, 1);
        assert!(last.kappa < 1e-6);
        for pair in steps.windows(2) {
            assert!(pair[1].kappa <= pair[0].kappa + 1e-12);
        }
    }

    #[test]
    fn submultiplicativity_single_and_pair() {
        let a = wm(&[&[0.2, 0.8], &[0.6, 0.4]]);
        assert!(submultiplicativity_check(std::slice::from_ref(&a)).unwrap());
        let b = wm(&[&[0.9, 0.1], &[0.3, 0.7]]);
        assert!(submultiplicativity_check(&[a, b]).unwrap());
    }
}
