use nalgebra::DMatrix;

use super::Graph;

/// A real symmetric linear operator applied through matrix-vector products.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `y <- A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Combinatorial Laplacian `L = D - W` stored as CSR, diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    degree: Vec<f64>,
}

impl Laplacian {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n_nodes();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, w) in g.edges() {
            rows[i].push((j, -w));
            rows[j].push((i, -w));
        }
        let mut degree = vec![0.0; n];
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(2 * g.n_edges() + n);
        let mut values = Vec::with_capacity(2 * g.n_edges() + n);
        row_ptr.push(0);
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            let d: f64 = row.iter().map(|&(_, v)| -v).sum();
            degree[i] = d;
            let mut diag_done = false;
            for &(j, v) in row.iter() {
                if !diag_done && j > i {
                    col_idx.push(i);
                    values.push(d);
                    diag_done = true;
                }
                col_idx.push(j);
                values.push(v);
            }
            if !diag_done {
                col_idx.push(i);
                values.push(d);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
            degree,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries, diagonal included.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn max_degree(&self) -> f64 {
        self.degree.iter().cloned().fold(0.0, f64::max)
    }

    /// Gershgorin upper bound on the spectrum: `2 · max degree`.
    pub fn gershgorin_bound(&self) -> f64 {
        2.0 * self.max_degree()
    }

    /// Row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.apply(x, &mut y);
        y
    }

    /// `x^T L x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let y = self.matvec(x);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

impl SymmetricOperator for Laplacian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::Graph;
    use nalgebra::{dmatrix, SymmetricEigen};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_edge() {
        let l = Graph::path(2).unwrap().laplacian();
        assert_eq!(l.to_dense(), dmatrix![1.0, -1.0; -1.0, 1.0]);
    }

    #[test]
    fn three_path() {
        let l = Graph::path(3).unwrap().laplacian();
        assert_eq!(
            l.to_dense(),
            dmatrix![1.0, -1.0, 0.0; -1.0, 2.0, -1.0; 0.0, -1.0, 1.0]
        );
        assert_eq!(l.nnz(), 4 + 3);
    }

    #[test]
    fn complete_five_spectrum() {
        let l = Graph::complete(5).unwrap().laplacian();
        let mut ev: Vec<f64> = SymmetricEigen::new(l.to_dense())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        let expected = [0.0, 5.0, 5.0, 5.0, 5.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn isolated_node_keeps_diagonal_entry() {
        let g = Graph::new(4, [(0, 1, 1.0)]).unwrap();
        let l = g.laplacian();
        assert_eq!(l.nnz(), 2 + 4);
        assert_eq!(l.row(3).collect::<Vec<_>>(), vec![(3, 0.0)]);
    }

    #[test]
    fn row_sums_vanish_and_psd() {
        let g = Graph::new(
            6,
            [
                (0, 1, 0.5),
                (1, 2, 2.0),
                (2, 3, 1.5),
                (3, 4, 0.25),
                (4, 5, 3.0),
                (0, 5, 1.0),
                (1, 4, 0.7),
            ],
        )
        .unwrap();
        let l = g.laplacian();
        let tol = 1e-12 * l.max_degree();
        for i in 0..l.n() {
            let s: f64 = l.row(i).map(|(_, v)| v).sum();
            assert!(s.abs() <= tol);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(l.quadratic_form(&x) >= -1e-10);
        }
    }
}
