//! Symmetric block-tridiagonal systems, solved by block Cholesky.

use nalgebra::{DMatrix, DVector};

/// `H = tridiag(upperᵀ, diag, upper)` with square blocks of equal size.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub diag: Vec<DMatrix<f64>>,
    /// `upper[t]` couples block `t` (rows) with block `t + 1` (columns).
    pub upper: Vec<DMatrix<f64>>,
}

impl BlockTridiagonal {
    pub fn zeros(blocks: usize, size: usize) -> Self {
        Self {
            diag: vec![DMatrix::zeros(size, size); blocks],
            upper: vec![DMatrix::zeros(size, size); blocks.saturating_sub(1)],
        }
    }

    pub fn block_size(&self) -> usize {
        self.diag.first().map_or(0, |d| d.nrows())
    }

    /// Solves `H x = rhs`. Returns `None` if `H` is not positive definite.
    pub fn solve(&self, rhs: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
        let n = self.diag.len();
        assert_eq!(rhs.len(), n);
        let mut lowers: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        // couplings[t] = L_t⁻¹ upper[t]
        let mut couplings: Vec<DMatrix<f64>> = Vec::with_capacity(n.saturating_sub(1));
        for t in 0..n {
            let mut s = self.diag[t].clone();
            if t > 0 {
                let c = &couplings[t - 1];
                s.gemm_tr(-1.0, c, c, 1.0);
            }
            let l = s.cholesky()?.unpack();
            if t + 1 < n {
                let c = l.solve_lower_triangular(&self.upper[t])?;
                couplings.push(c);
            }
            lowers.push(l);
        }

        let mut y: Vec<DVector<f64>> = Vec::with_capacity(n);
        for t in 0..n {
            let mut b = rhs[t].clone();
            if t > 0 {
                b.gemv_tr(-1.0, &couplings[t - 1], &y[t - 1], 1.0);
            }
            y.push(lowers[t].solve_lower_triangular(&b)?);
        }
        let mut x = vec![DVector::zeros(0); n];
        for t in (0..n).rev() {
            let mut b = y[t].clone();
            if t + 1 < n {
                b.gemv(-1.0, &couplings[t], &x[t + 1], 1.0);
            }
            x[t] = lowers[t].tr_solve_lower_triangular(&b)?;
        }
        Some(x)
    }

    /// Dense `H · x`.
    pub fn mul(&self, x: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let n = self.diag.len();
        (0..n)
            .map(|t| {
                let mut y = &self.diag[t] * &x[t];
                if t + 1 < n {
                    y.gemv(1.0, &self.upper[t], &x[t + 1], 1.0);
                }
                if t > 0 {
                    y.gemv_tr(1.0, &self.upper[t - 1], &x[t - 1], 1.0);
                }
                y
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        let m = self.block_size();
        let mut h = DMatrix::zeros(n * m, n * m);
        for t in 0..n {
            h.view_mut((t * m, t * m), (m, m)).copy_from(&self.diag[t]);
            if t + 1 < n {
                h.view_mut((t * m, (t + 1) * m), (m, m)).copy_from(&self.upper[t]);
                h.view_mut(((t + 1) * m, t * m), (m, m))
                    .copy_from(&self.upper[t].transpose());
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(blocks: usize, m: usize, seed: u64) -> BlockTridiagonal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = BlockTridiagonal::zeros(blocks, m);
        // JᵀJ of a random banded J is SPD when each frame has its own full-rank rows
        for t in 0..blocks {
            let a = DMatrix::from_fn(m + 2, m, |_, _| rng.gen_range(-1.0..1.0));
            h.diag[t].gemm_tr(1.0, &a, &a, 1.0);
            if t + 1 < blocks {
                let b0 = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
                let b1 = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
                h.diag[t].gemm_tr(1.0, &b0, &b0, 1.0);
                h.diag[t + 1].gemm_tr(1.0, &b1, &b1, 1.0);
                h.upper[t].gemm_tr(1.0, &b0, &b1, 1.0);
            }
        }
        h
    }

    #[test]
    fn matches_dense_cholesky() {
        let (n, m) = (7, 5);
        let h = random_spd(n, m, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rhs: Vec<DVector<f64>> = (0..n)
            .map(|_| DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        let x = h.solve(&rhs).unwrap();

        let dense = h.to_dense();
        let b = DVector::from_iterator(n * m, rhs.iter().flat_map(|v| v.iter().copied()));
        let expected = dense.cholesky().unwrap().solve(&b);
        let got = DVector::from_iterator(n * m, x.iter().flat_map(|v| v.iter().copied()));
        assert!((got - expected).amax() < 1e-10);

        let back = h.mul(&x);
        for (a, b) in back.iter().zip(&rhs) {
            assert!((a - b).amax() < 1e-10);
        }
    }

    #[test]
    fn single_block() {
        let h = random_spd(1, 4, 1);
        let rhs = vec![DVector::from_element(4, 1.0)];
        let x = h.solve(&rhs).unwrap();
        assert!((&h.diag[0] * &x[0] - &rhs[0]).amax() < 1e-12);
    }

    #[test]
    fn indefinite_is_rejected() {
        let mut h = BlockTridiagonal::zeros(2, 2);
        h.diag[0] = DMatrix::identity(2, 2);
        h.diag[1] = -DMatrix::identity(2, 2);
        assert!(h.solve(&[DVector::zeros(2), DVector::zeros(2)]).is_none());
    }
}
