use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Vectorization convention: row-major stacking, `vec(K)[i·n + j] = K[i, j]`.
///
/// With this ordering `(A ⊗ Bᵀ)·vec(K) = vec(A K B)`, hence
/// `⟨vec K, (A ⊗ Bᵀ) vec K⟩ = Tr K* A K B` with the operators in the order written.
/// Column stacking would need `Bᵀ ⊗ A` instead.
pub const VEC_ROW_MAJOR: bool = true;

/// Kronecker product; block `(i, j)` is `a[i, j]·b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn vec(k: &ComplexMatrix) -> Vec<C64> {
    k.data().to_vec()
}

pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::LengthMismatch {
            expected: rows * cols,
            actual: v.len(),
        });
    }
    ComplexMatrix::new(rows, cols, v.to_vec())
}

/// ⟨u, v⟩ = Σ conj(uᵢ)·vᵢ.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Traces out every tensor factor not listed in `keep` (0-based, any order).
///
/// The kept factors appear in the output in ascending index order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimMismatch(format!(
            "partial trace of non-square {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimMismatch(format!("invalid subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::DimMismatch(format!(
            "dims {dims:?} multiply to {total}, matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::DimMismatch(format!(
                "subsystem {k} out of range for {} factors",
                dims.len()
            )));
        }
        kept[k] = true;
    }

    let kept_dims: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| dims[i]).collect();
    let traced_dims: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept_strides: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| strides[i]).collect();
    let traced_strides: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| strides[i]).collect();

    let offset = |idx: usize, sub_dims: &[usize], sub_strides: &[usize]| -> usize {
        let mut rem = idx;
        let mut off = 0;
        for (d, s) in sub_dims.iter().zip(sub_strides).rev() {
            off += (rem % d) * s;
            rem /= d;
        }
        off
    };

    let kept_offsets: Vec<usize> = (0..out_dim).map(|i| offset(i, &kept_dims, &kept_strides)).collect();
    let traced_offsets: Vec<usize> = (0..traced_total)
        .map(|i| offset(i, &traced_dims, &traced_strides))
        .collect();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for (a, &ra) in kept_offsets.iter().enumerate() {
        for (b, &rb) in kept_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_offsets {
                acc += m[(ra + t, rb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// LU factorization with partial pivoting of a square matrix.
struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn new(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimMismatch(format!(
                "LU of non-square {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs();
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pivot_abs <= f64::EPSILON * scale * n as f64 || pivot_abs == 0.0 {
                return Err(Error::Singular);
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in (k + 1)..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::DimMismatch(format!(
            "solve with {}x{} system and {} right-hand rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let lu = Lu::new(a)?;
    let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
    for j in 0..b.cols() {
        let x = lu.solve_vec(&b.column(j));
        for (i, v) in x.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}
