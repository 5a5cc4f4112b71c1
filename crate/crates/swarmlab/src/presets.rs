//! Reference graphs used by the comparison scenarios and tests.

use crate::graph::AdjacencyMatrix;

/// Twelve robots in two 6-cliques bridged through robots 2 and 12
/// (1-indexed): a connected graph with a single communication bottleneck.
pub fn bridged_cliques_12() -> AdjacencyMatrix {
    let rows: [[u8; 12]; 12] = [
        [0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 1],
        [1, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0],
        [1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0],
        [1, 1, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0],
        [1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
        [0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1],
        [0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 1],
        [0, 0, 0, 0, 0, 0, 1, 1, 1, 0, 1, 1],
        [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 1],
        [0, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 0],
    ];
    AdjacencyMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .expect("preset graph is valid")
}

/// Complete graph on `n` vertices.
pub fn complete_graph(n: usize) -> AdjacencyMatrix {
    let mut a = AdjacencyMatrix::empty(n);
    for i in 0..n {
        for j in 0..i {
            a.set_edge(i, j);
        }
    }
    a
}

/// Ring graph on `n` vertices.
pub fn ring_graph(n: usize) -> AdjacencyMatrix {
    let mut a = AdjacencyMatrix::empty(n);
    for i in 0..n {
        a.set_edge(i, (i + 1) % n);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_edges_present() {
        let a = bridged_cliques_12();
        assert!(a.get(1, 11) && a.get(11, 1));
        assert!(!a.get(0, 6));
    }

    #[test]
    fn complete_and_ring_degrees() {
        assert_eq!(complete_graph(12).degree(3), 11);
        assert_eq!(ring_graph(6).degree(0), 2);
    }
}
