//! Profile (skyline) storage with an in-place Crout LU factorization.
//!
//! The profile is symmetric: row `i` of the strict lower triangle and column
//! `i` of the upper triangle both start at `first[i]`. Values need not be
//! symmetric. No pivoting is performed, which is adequate for the
//! positive-definite or mildly non-symmetric tangents of structural problems.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq)]
pub struct SkylineMatrix {
    first: Vec<usize>,
    /// Column `j` of the upper triangle, rows `first[j]..=j`.
    upper: Vec<Vec<f64>>,
    /// Row `i` of the strict lower triangle, columns `first[i]..i`.
    lower: Vec<Vec<f64>>,
    factored: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPivot {
    pub equation: usize,
    pub value: f64,
}

impl SkylineMatrix {
    /// Empty matrix whose profile covers every coupling in `connections`
    /// (each entry lists equations that share an element).
    pub fn with_profile<'a, I>(n: usize, connections: I) -> Self
    where
        I: IntoIterator<Item = &'a [usize]>,
    {
        let mut first: Vec<usize> = (0..n).collect();
        for eqs in connections {
            if let Some(&lo) = eqs.iter().min() {
                for &e in eqs {
                    first[e] = first[e].min(lo);
                }
            }
        }
        let upper = (0..n).map(|j| vec![0.0; j - first[j] + 1]).collect();
        let lower = (0..n).map(|i| vec![0.0; i - first[i]]).collect();
        Self {
            first,
            upper,
            lower,
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Stored entries of the profile.
    pub fn profile_size(&self) -> usize {
        self.upper.iter().map(Vec::len).sum::<usize>() + self.lower.iter().map(Vec::len).sum::<usize>()
    }

    pub fn clear(&mut self) {
        for col in &mut self.upper {
            col.fill(0.0);
        }
        for row in &mut self.lower {
            row.fill(0.0);
        }
        self.factored = false;
    }

    /// Adds `value` to entry `(i, j)`; panics outside the profile.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        if j >= i {
            let f = self.first[j];
            assert!(i >= f, "entry ({i}, {j}) outside the profile");
            self.upper[j][i - f] += value;
        } else {
            let f = self.first[i];
            assert!(j >= f, "entry ({i}, {j}) outside the profile");
            self.lower[i][j - f] += value;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j >= i {
            let f = self.first[j];
            if i < f {
                0.0
            } else {
                self.upper[j][i - f]
            }
        } else {
            let f = self.first[i];
            if j < f {
                0.0
            } else {
                self.lower[i][j - f]
            }
        }
    }

    /// `y = A x` (before factorization).
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for j in 0..n {
            let f = self.first[j];
            for (off, a) in self.upper[j].iter().enumerate() {
                y[f + off] += a * x[j];
            }
            for (off, a) in self.lower[j].iter().enumerate() {
                y[j] += a * x[f + off];
            }
        }
        y
    }

    /// In-place `A = L U` with unit lower `L`.
    pub fn factor(&mut self) -> Result<(), ZeroPivot> {
        let n = self.dim();
        let scale = (0..n).map(|j| self.upper[j].last().map_or(0.0, |d| d.abs())).fold(0.0, f64::max);
        for j in 0..n {
            let fj = self.first[j];
            for i in fj..j {
                let fi = self.first[i];
                let start = fi.max(fj);
                // U(i, j) = A(i, j) - sum_p L(i, p) U(p, j)
                let mut s = 0.0;
                {
                    let li = &self.lower[i];
                    let uj = &self.upper[j];
                    for p in start..i {
                        s += li[p - fi] * uj[p - fj];
                    }
                }
                self.upper[j][i - fj] -= s;
                // L(j, i) = (A(j, i) - sum_p L(j, p) U(p, i)) / U(i, i)
                let mut t = 0.0;
                {
                    let lj = &self.lower[j];
                    let ui = &self.upper[i];
                    for p in start..i {
                        t += lj[p - fj] * ui[p - fi];
                    }
                }
                let pivot = self.upper[i][i - fi];
                self.lower[j][i - fj] = (self.lower[j][i - fj] - t) / pivot;
            }
            let mut d = 0.0;
            {
                let lj = &self.lower[j];
                let uj = &self.upper[j];
                for p in fj..j {
                    d += lj[p - fj] * uj[p - fj];
                }
            }
            let diag = self.upper[j][j - fj] - d;
            if !(diag.abs() > 1e-14 * scale) || !diag.is_finite() {
                return Err(ZeroPivot { equation: j, value: diag });
            }
            self.upper[j][j - fj] = diag;
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` in place after [`factor`](Self::factor).
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert!(self.factored, "matrix must be factored before solving");
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let mut s = 0.0;
            for (off, l) in self.lower[i].iter().enumerate() {
                s += l * b[fi + off];
            }
            b[i] -= s;
        }
        for j in (0..n).rev() {
            let fj = self.first[j];
            let col = &self.upper[j];
            b[j] /= col[j - fj];
            let xj = b[j];
            for (off, u) in col[..j - fj].iter().enumerate() {
                b[fj + off] -= u * xj;
            }
        }
    }
}

/// Reverse Cuthill-McKee ordering of an undirected graph given by adjacency
/// lists. Returns `perm` with `perm[old] = new`.
pub fn reverse_cuthill_mckee(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(adjacency, seed, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().rev().enumerate() {
        perm[old] = new;
    }
    perm
}

/// Breadth-first levels from `root`; returns the last level.
fn last_level(adjacency: &[Vec<usize>], root: usize) -> (Vec<usize>, usize) {
    let mut dist = vec![usize::MAX; adjacency.len()];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut depth = 0;
    let mut last = vec![root];
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                if dist[w] > depth {
                    depth = dist[w];
                    last.clear();
                }
                last.push(w);
                queue.push_back(w);
            }
        }
    }
    (last, depth)
}

fn pseudo_peripheral(adjacency: &[Vec<usize>], seed: usize, degree: &[usize]) -> usize {
    let mut root = seed;
    let (mut last, mut depth) = last_level(adjacency, root);
    for _ in 0..8 {
        let candidate = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap_or(&root);
        let (next_last, next_depth) = last_level(adjacency, candidate);
        if next_depth <= depth {
            break;
        }
        root = candidate;
        last = next_last;
        depth = next_depth;
    }
    root
}
