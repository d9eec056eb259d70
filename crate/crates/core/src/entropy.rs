//! Entropies and trace functionals of positive matrices.
//!
//! Conventions: natural logarithms throughout, `0·ln 0 = 0`, and matrices `K` in the trace
//! functionals map the `B` space to the `A` space (`K` is `dim A × dim B`).

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::functions::OperatorConvexFunction;
use crate::linalg::{
    hermitian_eig, inner, inverse, kron, matrix_log, matrix_power, min_eigenvalue,
    partial_trace, vec, ComplexMatrix, HermitianMatrix, C64, DEFAULT_FLOOR,
};

/// Eigenvalues at or below this value of the second argument span its kernel.
pub const KERNEL_EIGENVALUE: f64 = 1e-10;

/// Largest compression of the first argument onto that kernel still treated as zero.
pub const KERNEL_MASS: f64 = 1e-8;

/// Tolerated negative eigenvalue of a density matrix.
pub const DENSITY_PSD_TOL: f64 = 1e-10;

/// Tolerated trace deviation of a density matrix.
pub const DENSITY_TRACE_TOL: f64 = 1e-12;

/// Largest imaginary part accepted from a trace that should be real, relative to its scale.
pub const IMAG_TOL: f64 = 1e-10;

/// Positive semidefinite matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    inner: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let tr = h.real_trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = min_eigenvalue(&h)?;
        if min < -DENSITY_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self { inner: h })
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            inner: HermitianMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    /// Projector onto the normalization of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(HermitianMatrix::symmetrize(ComplexMatrix::outer(&v, &v)))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.inner
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.inner
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            inner: HermitianMatrix::symmetrize(kron(&self.inner, &other.inner)),
        }
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;

    fn deref(&self) -> &HermitianMatrix {
        &self.inner
    }
}

/// Density matrix on `H₁ ⊗ H₂ ⊗ …` with the factor dimensions attached.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteState {
    dims: Vec<usize>,
    state: DensityMatrix,
}

impl MultipartiteState {
    pub fn new(dims: Vec<usize>, state: DensityMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || total != state.dim() {
            return Err(Error::DimMismatch(format!(
                "dims {dims:?} do not factor a state of dimension {}",
                state.dim()
            )));
        }
        Ok(Self { dims, state })
    }

    /// Product state `ρ₁ ⊗ ρ₂ ⊗ …`.
    pub fn product(factors: &[DensityMatrix]) -> Result<Self> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::DimMismatch("empty product".into()))?;
        let state = rest.iter().fold(first.clone(), |acc, f| acc.tensor(f));
        Self::new(factors.iter().map(|f| f.dim()).collect(), state)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// Reduced state on the listed factors (0-based, ascending order in the result).
    pub fn marginal(&self, keep: &[usize]) -> Result<MultipartiteState> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let reduced = partial_trace(&self.state, &self.dims, &keep)?;
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self {
            dims,
            state: DensityMatrix {
                inner: HermitianMatrix::symmetrize(reduced),
            },
        })
    }

    /// Same state with a different factorization of the same total dimension.
    pub fn regroup(&self, dims: Vec<usize>) -> Result<MultipartiteState> {
        Self::new(dims, self.state.clone())
    }
}

/// `A ⊗ B̄`, the matrix of `K ↦ A K B` on row-major `vec K` for Hermitian `B`.
#[derive(Debug, Clone)]
pub struct ModularRep {
    pub m: usize,
    pub n: usize,
    pub kron_matrix: HermitianMatrix,
}

impl ModularRep {
    pub fn new(a: &HermitianMatrix, b: &HermitianMatrix) -> Self {
        Self {
            m: a.dim(),
            n: b.dim(),
            kron_matrix: HermitianMatrix::symmetrize(kron(a, &b.conj())),
        }
    }

    /// `A K B` computed through the Kronecker representation.
    pub fn apply(&self, k: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_k(k, self.m, self.n)?;
        let v = self.kron_matrix.matvec(&vec(k))?;
        ComplexMatrix::new(self.m, self.n, v)
    }
}

fn check_k(k: &ComplexMatrix, m: usize, n: usize) -> Result<()> {
    if k.shape() != (m, n) {
        return Err(Error::DimMismatch(format!(
            "K is {}x{}, expected {m}x{n}",
            k.rows(),
            k.cols()
        )));
    }
    Ok(())
}

fn check_same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(format!(
            "arguments have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

fn require_pd(h: &HermitianMatrix) -> Result<()> {
    let min = min_eigenvalue(h)?;
    if min <= DEFAULT_FLOOR {
        return Err(Error::DomainViolation {
            value: min,
            floor: DEFAULT_FLOOR,
        });
    }
    Ok(())
}

/// Real part of a trace that must be real, rejecting a material imaginary part.
fn real_trace(z: C64, scale: f64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * (1.0 + scale) {
        return Err(Error::DimMismatch(format!(
            "expected a real trace, imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `S(ρ) = −Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let sd = hermitian_eig(rho)?;
    Ok(-sd
        .eigenvalues
        .iter()
        .filter(|&&l| l > DEFAULT_FLOOR)
        .map(|&l| l * l.ln())
        .sum::<f64>())
}

/// Umegaki relative entropy `Tr ρ(ln ρ − ln γ)` for positive semidefinite `ρ`, `γ`.
///
/// Computed in the eigenbases of the two arguments: `Tr ρ ln γ = Σⱼ ln μⱼ ⟨vⱼ|ρ|vⱼ⟩` over the
/// support of `γ`. Returns `KernelViolation` (the value is +∞) when `ρ` has weight on the
/// kernel of `γ`. No trace normalization is imposed.
pub fn relative_entropy(rho: &HermitianMatrix, gamma: &HermitianMatrix) -> Result<f64> {
    check_same_dim(rho, gamma)?;
    let sr = hermitian_eig(rho)?;
    let sg = hermitian_eig(gamma)?;
    for (sd, _) in [(&sr, "rho"), (&sg, "gamma")] {
        if sd.min() < -DENSITY_PSD_TOL * (1.0 + sd.max().abs()) {
            return Err(Error::DomainViolation {
                value: sd.min(),
                floor: 0.0,
            });
        }
    }

    let n = rho.dim();
    let kernel: Vec<usize> = (0..n).filter(|&j| sg.eigenvalues[j] <= KERNEL_EIGENVALUE).collect();
    if !kernel.is_empty() {
        let vectors: Vec<Vec<C64>> = kernel.iter().map(|&j| sg.vector(j)).collect();
        let rv: Vec<Vec<C64>> = vectors.iter().map(|v| rho.matvec(v)).collect::<Result<_>>()?;
        let mass = vectors
            .iter()
            .map(|vi| rv.iter().map(|rvj| inner(vi, rvj).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        if mass > KERNEL_MASS {
            return Err(Error::KernelViolation { mass });
        }
    }

    let rho_log_rho: f64 = sr
        .eigenvalues
        .iter()
        .filter(|&&l| l > DEFAULT_FLOOR)
        .map(|&l| l * l.ln())
        .sum();
    let mut rho_log_gamma = 0.0;
    for j in 0..n {
        let mu = sg.eigenvalues[j];
        if mu <= KERNEL_EIGENVALUE {
            continue;
        }
        let v = sg.vector(j);
        let weight = inner(&v, &rho.matvec(&v)?).re;
        rho_log_gamma += weight * mu.ln();
    }
    Ok(rho_log_rho - rho_log_gamma)
}

/// `Re Tr K* Aᵖ K B^{1−p}` for `p ∈ [−1, 2]` excluding the limit points 0 and 1.
pub fn lieb_functional(
    k: &ComplexMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    p: f64,
) -> Result<f64> {
    if !(-1.0..=2.0).contains(&p) || p == 0.0 || p == 1.0 {
        return Err(Error::ParameterOutOfRange {
            name: "p",
            value: p,
            range: "[-1, 2] without {0, 1}",
        });
    }
    check_k(k, a.dim(), b.dim())?;
    let ap = matrix_power(a, p, DEFAULT_FLOOR)?;
    let bq = matrix_power(b, 1.0 - p, DEFAULT_FLOOR)?;
    let left = &(&k.adjoint() * &ap) * k;
    let tr = left.trace_product(&bq)?;
    real_trace(tr, left.norm_inf() * bq.norm_inf())
}

/// The four trace functionals obtained from `g_p`, `x ln x`, `h_q` and `−ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFunctional {
    /// `(1/(1−p))·Tr(K*AK − K*AᵖKB^{1−p})`, `p ∈ (0,1) ∪ (1,2]`.
    A,
    /// `Tr(K*(A ln A)K − K*AK ln B)`.
    B,
    /// `(1/q)·Tr(K*KB − K*A^qKB^{1−q})`, `q ∈ [−1,0) ∪ (0,1)`.
    C,
    /// `Tr(K*K(B ln B) − K*(ln A)KB)`.
    D,
}

impl TraceFunctional {
    pub const ALL: [TraceFunctional; 4] = [TraceFunctional::A, TraceFunctional::B, TraceFunctional::C, TraceFunctional::D];
}

impl fmt::Display for TraceFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TraceFunctional::A => "a",
            TraceFunctional::B => "b",
            TraceFunctional::C => "c",
            TraceFunctional::D => "d",
        };
        f.write_str(s)
    }
}

impl FromStr for TraceFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(TraceFunctional::A),
            "b" => Ok(TraceFunctional::B),
            "c" => Ok(TraceFunctional::C),
            "d" => Ok(TraceFunctional::D),
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }
}

/// Evaluates one of the [`TraceFunctional`] trace functionals. `param` is `p` for (a), `q` for (c)
/// and ignored for (b) and (d).
pub fn trace_functional(
    example: TraceFunctional,
    k: &ComplexMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    param: f64,
) -> Result<f64> {
    check_k(k, a.dim(), b.dim())?;
    let kt = k.adjoint();
    let value = match example {
        TraceFunctional::A => {
            let p = param;
            if !(p > 0.0 && p <= 2.0) || p == 1.0 {
                return Err(Error::ParameterOutOfRange {
                    name: "p",
                    value: p,
                    range: "(0, 1) ∪ (1, 2]",
                });
            }
            require_pd(a)?;
            require_pd(b)?;
            let linear = (&(&kt * a) * k).trace();
            let ap = matrix_power(a, p, DEFAULT_FLOOR)?;
            let bq = matrix_power(b, 1.0 - p, DEFAULT_FLOOR)?;
            let power = (&(&kt * &ap) * k).trace_product(&bq)?;
            (linear - power) / (1.0 - p)
        }
        TraceFunctional::B => {
            require_pd(a)?;
            let log_a = matrix_log(a, DEFAULT_FLOOR)?;
            let log_b = matrix_log(b, DEFAULT_FLOOR)?;
            let a_log_a = a.as_matrix() * log_a.as_matrix();
            let first = (&(&kt * &a_log_a) * k).trace();
            let second = (&(&kt * a) * k).trace_product(&log_b)?;
            first - second
        }
        TraceFunctional::C => {
            let q = param;
            if !(-1.0..1.0).contains(&q) || q == 0.0 {
                return Err(Error::ParameterOutOfRange {
                    name: "q",
                    value: q,
                    range: "[-1, 0) ∪ (0, 1)",
                });
            }
            require_pd(a)?;
            require_pd(b)?;
            let linear = (&kt * k).trace_product(b)?;
            let aq = matrix_power(a, q, DEFAULT_FLOOR)?;
            let bq = matrix_power(b, 1.0 - q, DEFAULT_FLOOR)?;
            let power = (&(&kt * &aq) * k).trace_product(&bq)?;
            (linear - power) / q
        }
        TraceFunctional::D => {
            require_pd(b)?;
            let log_a = matrix_log(a, DEFAULT_FLOOR)?;
            let log_b = matrix_log(b, DEFAULT_FLOOR)?;
            let b_log_b = b.as_matrix() * log_b.as_matrix();
            let first = (&kt * k).trace_product(&b_log_b)?;
            let second = (&(&kt * &log_a) * k).trace_product(b)?;
            first - second
        }
    };
    real_trace(value, k.norm_inf().powi(2) * (1.0 + a.norm_inf()) * (1.0 + b.norm_inf()))
}

/// Wigner-Yanase-Dyson form `½ Tr [K, γᵖ][K, γ^{1−p}]` for Hermitian `K`, `p ∈ (0, 1)`.
///
/// Equals `Tr Kγᵖ Kγ^{1−p} − Tr KγK` and is never positive.
pub fn wyd_entropy(k: &HermitianMatrix, gamma: &DensityMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "p",
            value: p,
            range: "(0, 1)",
        });
    }
    check_same_dim(k, gamma)?;
    let gp = matrix_power(gamma, p, DEFAULT_FLOOR)?;
    let gq = matrix_power(gamma, 1.0 - p, DEFAULT_FLOOR)?;
    let comm = |x: &ComplexMatrix| -> ComplexMatrix { &(k.as_matrix() * x) - &(x * k.as_matrix()) };
    let c1 = comm(&gp);
    let c2 = comm(&gq);
    let tr = c1.trace_product(&c2)? * 0.5;
    real_trace(tr, c1.norm_inf() * c2.norm_inf())
}

/// `(I ⊗ B̄)·g(A ⊗ B̄⁻¹)`, an `mn × mn` Hermitian matrix for `m × m` `A` and `n × n` `B`.
///
/// `g(A ⊗ B̄⁻¹)` is evaluated by diagonalizing the Kronecker product itself.
pub fn perspective_map(
    g: &OperatorConvexFunction,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    require_pd(a)?;
    require_pd(b)?;
    let b_inv = HermitianMatrix::symmetrize(inverse(b)?);
    let modular = ModularRep::new(a, &b_inv);
    let gm = g.apply(&modular.kron_matrix, DEFAULT_FLOOR)?;
    let right = kron(&ComplexMatrix::identity(a.dim()), &b.conj());
    Ok(HermitianMatrix::symmetrize(&right * gm.as_matrix()))
}

/// Quasi-entropy `H_g(K, A, B) = Tr K* g(L_A R_B⁻¹) R_B K = ⟨vec K, (I ⊗ B̄) g(A ⊗ B̄⁻¹) vec K⟩`.
pub fn quasi_entropy(
    g: &OperatorConvexFunction,
    k: &ComplexMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<f64> {
    check_k(k, a.dim(), b.dim())?;
    let p = perspective_map(g, a, b)?;
    let v = vec(k);
    let value = inner(&v, &p.matvec(&v)?);
    real_trace(value, p.norm_inf() * k.norm_fro().powi(2))
}
