//! Dense transportation simplex (MODI potentials over a spanning-tree basis).
//!
//! Rows are sources, columns are targets. The basis always holds exactly
//! `m + k - 1` cells forming a spanning tree of the bipartite row/column
//! graph; degenerate cells with zero flow are kept in the tree. Entering
//! cells follow Bland's rule (first cell in row-major order with negative
//! reduced cost) and ties for the leaving cell go to the smallest row-major
//! index, so the pivot sequence is fully determined by the input.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cell {
    pub row: usize,
    pub col: usize,
    pub flow: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Basis {
    rows: usize,
    cols: usize,
    pub cells: Vec<Cell>,
    /// Basis cells incident to each node; rows are nodes `0..rows`, columns
    /// `rows..rows + cols`.
    adj: Vec<Vec<usize>>,
}

impl Basis {
    /// North-west corner rule in the given index order. On Monge costs
    /// (convex functions of `x - y` with sorted coordinates) this basis is
    /// already optimal.
    pub fn north_west(supply: &[f64], demand: &[f64]) -> Self {
        let (m, k) = (supply.len(), demand.len());
        let mut a = supply.to_vec();
        let mut b = demand.to_vec();
        let mut cells = Vec::with_capacity(m + k - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let x = a[i].min(b[j]);
            cells.push(Cell {
                row: i,
                col: j,
                flow: x,
            });
            a[i] -= x;
            b[j] -= x;
            if i == m - 1 && j == k - 1 {
                break;
            }
            if j == k - 1 || (i < m - 1 && a[i] <= b[j]) {
                // the last row absorbs rounding residue from the columns
                i += 1;
            } else {
                j += 1;
            }
        }
        let mut basis = Self {
            rows: m,
            cols: k,
            cells,
            adj: vec![Vec::new(); m + k],
        };
        basis.rebuild_adjacency();
        basis
    }

    fn rebuild_adjacency(&mut self) {
        self.adj.iter_mut().for_each(|v| v.clear());
        for (e, c) in self.cells.iter().enumerate() {
            self.adj[c.row].push(e);
            self.adj[self.rows + c.col].push(e);
        }
    }

    /// Dual potentials with `u_0 = 0` and `u_r + v_c = cost(r, c)` on every
    /// basis cell.
    pub fn potentials(&self, cost: &impl Fn(usize, usize) -> f64) -> (Vec<f64>, Vec<f64>) {
        let (m, k) = (self.rows, self.cols);
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; k];
        let mut seen = vec![false; m + k];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        while let Some(node) = queue.pop_front() {
            for &e in &self.adj[node] {
                let c = self.cells[e];
                let other = if node < m { m + c.col } else { c.row };
                if seen[other] {
                    continue;
                }
                seen[other] = true;
                let w = cost(c.row, c.col);
                if other >= m {
                    v[c.col] = w - u[c.row];
                } else {
                    u[c.row] = w - v[c.col];
                }
                queue.push_back(other);
            }
        }
        (u, v)
    }

    /// Basis cells on the tree path from column node `col` to row node `row`,
    /// in that order.
    fn path(&self, row: usize, col: usize) -> Vec<usize> {
        let m = self.rows;
        let total = m + self.cols;
        let mut parent_edge = vec![usize::MAX; total];
        let mut seen = vec![false; total];
        let mut queue = VecDeque::new();
        seen[row] = true;
        queue.push_back(row);
        let target = m + col;
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &e in &self.adj[node] {
                let c = self.cells[e];
                let other = if node < m { m + c.col } else { c.row };
                if !seen[other] {
                    seen[other] = true;
                    parent_edge[other] = e;
                    queue.push_back(other);
                }
            }
        }
        let mut out = Vec::new();
        let mut node = target;
        while node != row {
            let e = parent_edge[node];
            out.push(e);
            let c = self.cells[e];
            node = if node < m { m + c.col } else { c.row };
        }
        out
    }

    /// Brings `(row, col)` into the basis, pushing flow around the cycle it
    /// closes. Returns the amount moved.
    fn pivot(&mut self, row: usize, col: usize) -> f64 {
        let path = self.path(row, col);
        // path[0], path[2], ... lose flow; path[1], path[3], ... gain it
        let mut leave = usize::MAX;
        let mut theta = f64::INFINITY;
        for &e in path.iter().step_by(2) {
            let c = self.cells[e];
            let better = c.flow < theta
                || (c.flow == theta && {
                    let l = self.cells[leave];
                    (c.row, c.col) < (l.row, l.col)
                });
            if better {
                theta = c.flow;
                leave = e;
            }
        }
        for (t, &e) in path.iter().enumerate() {
            if t % 2 == 0 {
                self.cells[e].flow -= theta;
            } else {
                self.cells[e].flow += theta;
            }
        }
        self.cells[leave] = Cell {
            row,
            col,
            flow: theta,
        };
        self.rebuild_adjacency();
        theta
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub basis: Basis,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
}

/// Runs the simplex from the north-west corner basis on a dense row-major
/// `m × k` cost matrix.
pub(crate) fn solve_dense(supply: &[f64], demand: &[f64], cost: &[f64]) -> SimplexOutcome {
    let k = demand.len();
    let c = |r: usize, s: usize| cost[r * k + s];
    let scale = cost.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let tol = 1e-12 * scale;
    let mut basis = Basis::north_west(supply, demand);
    let mut iterations = 0;
    loop {
        let (u, v) = basis.potentials(&c);
        let entering = first_negative(&u, &v, cost, k, tol);
        match entering {
            None => {
                return SimplexOutcome {
                    basis,
                    u,
                    v,
                    iterations,
                }
            }
            Some((r, s)) => {
                basis.pivot(r, s);
                iterations += 1;
            }
        }
    }
}

fn first_negative(u: &[f64], v: &[f64], cost: &[f64], k: usize, tol: f64) -> Option<(usize, usize)> {
    for (r, ur) in u.iter().enumerate() {
        let row = &cost[r * k..(r + 1) * k];
        for (s, (cs, vs)) in row.iter().zip(v).enumerate() {
            if cs - ur - vs < -tol {
                return Some((r, s));
            }
        }
    }
    None
}
