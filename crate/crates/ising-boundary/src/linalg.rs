//! Dense LU factorization and a block-tridiagonal (block Thomas) solver used
//! for selected entries of the inverse action matrix.

use crate::error::IsingError;

/// Dense row-major square matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    /// Maximum absolute violation of antisymmetry, relative to the largest entry.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut maxv: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let a = self.at(i, j);
                let b = self.at(j, i);
                maxv = maxv.max(a.abs());
                defect = defect.max((a + b).abs());
            }
        }
        if maxv == 0.0 {
            0.0
        } else {
            defect / maxv
        }
    }
}

/// LU factorization with partial pivoting, PA = LU stored packed.
pub struct LuFactor {
    pub n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
    /// Sign of the permutation.
    pub perm_sign: f64,
}

impl LuFactor {
    pub fn factor(mut a: DenseMatrix) -> Result<Self, IsingError> {
        let n = a.n;
        let mut piv = vec![0usize; n];
        let mut sign = 1.0;
        for k in 0..n {
            // partial pivot: largest magnitude in column k at or below row k
            let mut p = k;
            let mut best = a.at(k, k).abs();
            for i in (k + 1)..n {
                let v = a.at(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(IsingError::Singular);
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            let pivv = a.at(k, k);
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..k * n + n];
            for i in (k + 1)..n {
                let row_i = &mut tail[(i - k - 1) * n..(i - k - 1) * n + n];
                let m = row_i[k] / pivv;
                row_i[k] = m;
                if m != 0.0 {
                    for j in (k + 1)..n {
                        row_i[j] -= m * row_k[j];
                    }
                }
            }
        }
        Ok(LuFactor {
            n,
            lu: a.data,
            piv,
            perm_sign: sign,
        })
    }

    /// Solves A x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
        }
        // forward: L y = Pb (unit lower)
        for i in 1..n {
            let mut s = b[i];
            let row = &self.lu[i * n..i * n + i];
            for (j, lij) in row.iter().enumerate() {
                s -= lij * b[j];
            }
            b[i] = s;
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let mut s = b[i];
            let row = &self.lu[i * n..(i + 1) * n];
            for j in (i + 1)..n {
                s -= row[j] * b[j];
            }
            b[i] = s / row[i];
        }
    }

    /// (sign, log|det|) of the factored matrix.
    pub fn det_sign_log(&self) -> (f64, f64) {
        let mut sign = self.perm_sign;
        let mut log = 0.0;
        for k in 0..self.n {
            let d = self.lu[k * self.n + k];
            if d < 0.0 {
                sign = -sign;
            }
            log += d.abs().ln();
        }
        (sign, log)
    }
}

/// Sparse coupling block stored as triplets (row, col, value) in local block
/// coordinates.
pub type SparseBlock = Vec<(usize, usize, f64)>;

/// Block-tridiagonal matrix with dense diagonal blocks and sparse off-diagonal
/// coupling blocks; factored by the block Thomas algorithm.  The Kasteleyn
/// action in row-major site order has exactly this shape (rows couple only to
/// adjacent rows through the vertical t2 terms).
pub struct BlockTridiagFactor {
    pub block: usize,
    pub nblocks: usize,
    lus: Vec<LuFactor>,
    /// sub[r] = A_{r+1,r}
    sub: Vec<SparseBlock>,
    /// sup[r] = A_{r,r+1}
    sup: Vec<SparseBlock>,
}

impl BlockTridiagFactor {
    /// Factors the block tridiagonal matrix with diagonal blocks `diag` and
    /// couplings `sub`/`sup` between consecutive blocks.
    pub fn factor(
        diag: Vec<DenseMatrix>,
        sub: Vec<SparseBlock>,
        sup: Vec<SparseBlock>,
    ) -> Result<Self, IsingError> {
        let nblocks = diag.len();
        assert_eq!(sub.len(), nblocks.saturating_sub(1));
        assert_eq!(sup.len(), nblocks.saturating_sub(1));
        let b = diag[0].n;
        let mut lus: Vec<LuFactor> = Vec::with_capacity(nblocks);
        let mut diag = diag;
        for r in 0..nblocks {
            let sr = std::mem::replace(&mut diag[r], DenseMatrix::zeros(0));
            let lu = LuFactor::factor(sr)?;
            if r + 1 < nblocks {
                // columns of A_{r,r+1} that are actually nonzero
                let mut cols: Vec<usize> = sup[r].iter().map(|&(_, j, _)| j).collect();
                cols.sort_unstable();
                cols.dedup();
                let mut w = vec![0.0f64; b];
                for &j in &cols {
                    w.iter_mut().for_each(|x| *x = 0.0);
                    for &(i, jj, v) in &sup[r] {
                        if jj == j {
                            w[i] = v;
                        }
                    }
                    lu.solve_in_place(&mut w);
                    // S_{r+1} -= A_{r+1,r} * w e_j^T
                    for &(i, k, v) in &sub[r] {
                        diag[r + 1].add(i, j, -v * w[k]);
                    }
                }
            }
            lus.push(lu);
        }
        Ok(BlockTridiagFactor {
            block: b,
            nblocks,
            lus,
            sub,
            sup,
        })
    }

    /// Solves A x = b for the full vector (length block * nblocks).
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = self.block;
        let mut y = rhs.to_vec();
        // forward sweep: y_{r+1} = b_{r+1} - A_{r+1,r} S_r^{-1} y_r
        let mut tmp = vec![0.0f64; b];
        for r in 0..self.nblocks - 1 {
            tmp.copy_from_slice(&y[r * b..(r + 1) * b]);
            self.lus[r].solve_in_place(&mut tmp);
            for &(i, k, v) in &self.sub[r] {
                y[(r + 1) * b + i] -= v * tmp[k];
            }
        }
        // backward sweep: x_r = S_r^{-1} (y_r - A_{r,r+1} x_{r+1})
        for r in (0..self.nblocks).rev() {
            if r + 1 < self.nblocks {
                let (lo, hi) = y.split_at_mut((r + 1) * b);
                for &(i, j, v) in &self.sup[r] {
                    lo[r * b + i] -= v * hi[j];
                }
            }
            self.lus[r].solve_in_place(&mut y[r * b..(r + 1) * b]);
        }
        y
    }
}

/// Simple linear least squares y = a + b x with optional weights; returns
/// (intercept, slope, r_squared).
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    let sw: f64 = w.iter().sum();
    let mx: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..x.len() {
        let f = intercept + slope * x[i];
        ss_res += w[i] * (y[i] - f) * (y[i] - f);
        ss_tot += w[i] * (y[i] - my) * (y[i] - my);
    }
    (intercept, slope, 1.0 - ss_res / ss_tot)
}
