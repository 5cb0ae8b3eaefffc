use super::{CsrMatrix, TripletBuilder};
use crate::error::{Error, Result};

/// Row/column elimination of fixed degrees of freedom.
///
/// The free block `A_ff` stays symmetric, and the fixed values are folded
/// into the right-hand side as `b_f − A_fd·x_d`.
#[derive(Debug, Clone)]
pub struct DirichletSystem {
    n: usize,
    free: Vec<usize>,
    fixed: Vec<(usize, f64)>,
    slot: Vec<Option<usize>>,
    reduced: CsrMatrix,
    /// `A_fd·x_d`, indexed by free slot.
    fold: Vec<f64>,
}

impl DirichletSystem {
    pub fn new(a: &CsrMatrix, fixed: &[(usize, f64)]) -> Result<Self> {
        let n = a.dim();
        let mut value: Vec<Option<f64>> = vec![None; n];
        for &(i, v) in fixed {
            if i >= n {
                return Err(Error::InvalidParameter(format!("fixed node {i} out of range")));
            }
            match value[i] {
                Some(old) if old != v => {
                    return Err(Error::InvalidParameter(format!(
                        "node {i} fixed to both {old} and {v}"
                    )))
                }
                _ => value[i] = Some(v),
            }
        }
        let mut slot = vec![None; n];
        let mut free = Vec::new();
        let mut fixed = Vec::new();
        for (i, v) in value.iter().enumerate() {
            match v {
                Some(v) => fixed.push((i, *v)),
                None => {
                    slot[i] = Some(free.len());
                    free.push(i);
                }
            }
        }
        let mut b = TripletBuilder::with_capacity(free.len(), a.nnz());
        let mut fold = vec![0.0; free.len()];
        for (i, j, v) in a.triplets() {
            let Some(si) = slot[i] else { continue };
            match slot[j] {
                Some(sj) => b.add(si, sj, v),
                None => fold[si] += v * value[j].unwrap(),
            }
        }
        Ok(DirichletSystem { n, free, fixed, slot, reduced: b.build(), fold })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.reduced
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn fixed(&self) -> &[(usize, f64)] {
        &self.fixed
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.slot[i].is_none()
    }

    /// `b_f − A_fd·x_d` from a full-length right-hand side.
    pub fn reduce_rhs(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        self.free.iter().zip(&self.fold).map(|(&i, f)| b[i] - f).collect()
    }

    pub fn restrict(&self, x: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| x[i]).collect()
    }

    pub fn expand(&self, x_free: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &v) in self.free.iter().zip(x_free) {
            x[i] = v;
        }
        for &(i, v) in &self.fixed {
            x[i] = v;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eliminates_and_folds() {
        // 1D Laplacian on 3 nodes with x0 = 1, x2 = 3: middle value is 2.
        let a = CsrMatrix::from_dense(&[
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ]);
        let sys = DirichletSystem::new(&a, &[(0, 1.0), (2, 3.0)]).unwrap();
        assert_eq!(sys.free_count(), 1);
        let rhs = sys.reduce_rhs(&[0.0; 3]);
        let x = rhs[0] / sys.matrix().get(0, 0);
        assert_eq!(sys.expand(&[x]), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn conflicting_values_rejected() {
        let a = CsrMatrix::identity(2);
        assert!(DirichletSystem::new(&a, &[(0, 1.0), (0, 2.0)]).is_err());
    }
}
