//! Symmetric positive-definite solvers: Jacobi-preconditioned conjugate
//! gradients and an envelope Cholesky factorization in reverse
//! Cuthill–McKee order for operators that are solved many times.

use std::collections::VecDeque;

use super::sparse::{dot, norm2, CsrMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveStats {
    pub iterations: usize,
    /// `‖Ax − b‖₂ / ‖b‖₂` of the returned solution (0 when `b = 0`).
    pub relative_residual: f64,
}

/// Solves `A x = b` to `‖Ax − b‖₂ ≤ tol·‖b‖₂` with PCG from a zero start.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    pcg(a, b, None, tol, DEFAULT_MAX_ITER).map(|(x, _)| x)
}

/// Jacobi-preconditioned conjugate gradients.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let n = a.dim();
    assert_eq!(b.len(), n);
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }
    let diag = a.diagonal();
    if let Some((row, &pivot)) = diag.iter().enumerate().find(|(_, &d)| !(d > 0.0)) {
        return Err(Error::Indefinite { row, pivot });
    }
    let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();

    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = a.mul_vec(&x);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let target = tol * bnorm;
    let mut rnorm = norm2(&r);
    if rnorm <= target {
        return Ok((x, SolveStats { iterations: 0, relative_residual: rnorm / bnorm }));
    }
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Indefinite { row: it, pivot: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = norm2(&r);
        if rnorm <= target {
            // confirm against the true residual; recurrences drift
            let mut true_r = a.mul_vec(&x);
            true_r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
            let true_norm = norm2(&true_r);
            if true_norm <= target {
                return Ok((x, SolveStats { iterations: it, relative_residual: true_norm / bnorm }));
            }
            r = true_r;
        }
        for i in 0..n {
            z[i] = r[i] * inv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual: rnorm / bnorm, tol })
}

/// `L Lᵀ` factor stored row-wise over each row's envelope, in a
/// bandwidth-reducing permutation.
#[derive(Debug, Clone)]
pub struct Cholesky {
    /// perm[new] = old
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old, &i) in inv.iter().enumerate() {
            for &j in a.col_indices(old) {
                let j = inv[j];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        let mut values = vec![0.0; start[n]];
        for (old, &i) in inv.iter().enumerate() {
            for (j, v) in a.row(old) {
                let j = inv[j];
                if j <= i {
                    values[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = values[start[i] + j - fi];
                let ri = &values[start[i] + lo - fi..start[i] + j - fi];
                let rj = &values[start[j] + lo - fj..start[j] + j - fj];
                s -= dot(ri, rj);
                values[start[i] + j - fi] = s / values[start[j + 1] - 1];
            }
            let row = &values[start[i]..start[i + 1] - 1];
            let d = values[start[i + 1] - 1] - dot(row, row);
            if !(d > 0.0) {
                return Err(Error::Indefinite { row: perm[i], pivot: d });
            }
            values[start[i + 1] - 1] = d.sqrt();
        }
        Ok(Cholesky { perm, first, start, values })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1] - 1];
            let s = y[i] - dot(row, &y[fi..i]);
            y[i] = s / self.values[self.start[i + 1] - 1];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            y[i] /= self.values[self.start[i + 1] - 1];
            let xi = y[i];
            let row = &self.values[self.start[i]..self.start[i + 1] - 1];
            for (yk, l) in y[fi..i].iter_mut().zip(row) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.col_indices(i).len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs_last = |root: usize, visited: &[bool]| -> usize {
        let mut seen = visited.to_vec();
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        let mut last = root;
        while let Some(v) = queue.pop_front() {
            last = v;
            for &w in a.col_indices(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        last
    };
    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        // two sweeps towards a pseudo-peripheral node
        let root = bfs_last(bfs_last(seed, &visited), &visited);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> =
                a.col_indices(v).iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// A fixed SPD operator solved repeatedly: factored once, each solve
/// checked against `tol` and polished with PCG if it falls short.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    matrix: CsrMatrix,
    factor: Option<Cholesky>,
    tol: f64,
}

impl SpdSolver {
    pub fn direct(matrix: CsrMatrix, tol: f64) -> Result<Self> {
        let factor = Some(Cholesky::factor(&matrix)?);
        Ok(SpdSolver { matrix, factor, tol })
    }

    pub fn iterative(matrix: CsrMatrix, tol: f64) -> Self {
        SpdSolver { matrix, factor: None, tol }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn solve(&self, b: &[f64], guess: Option<&[f64]>) -> Result<(Vec<f64>, SolveStats)> {
        match &self.factor {
            Some(f) => {
                let x = f.solve(b);
                let bnorm = norm2(b);
                if bnorm == 0.0 {
                    return Ok((vec![0.0; b.len()], SolveStats::default()));
                }
                let mut r = self.matrix.mul_vec(&x);
                r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= bi);
                let rel = norm2(&r) / bnorm;
                if rel <= self.tol {
                    Ok((x, SolveStats { iterations: 0, relative_residual: rel }))
                } else {
                    pcg(&self.matrix, b, Some(&x), self.tol, DEFAULT_MAX_ITER)
                }
            }
            None => pcg(&self.matrix, b, guess, self.tol, DEFAULT_MAX_ITER),
        }
    }
}
