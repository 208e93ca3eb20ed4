//! Dense complex linear algebra for the small Hilbert spaces used here
//! (dimension 2 to 64).
//!
//! Basis ordering follows the usual big-endian qubit convention: in a
//! product space with factor dimensions `[d0, d1, ..]` the first factor is
//! the most significant digit, so `|abc>` of three qubits sits at index
//! `4a + 2b + c`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance under which a matrix is accepted as Hermitian and symmetrized.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_rows(entries: &[C64]) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || dim == 0 {
            return Err(Error::invalid(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(CMatrix {
            dim,
            data: entries.to_vec(),
        })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// `|v><v|`
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A matrix known to be Hermitian.
///
/// Construction symmetrizes `(M + M^dagger)/2` when the defect is within
/// [`HERMITIAN_TOL`] and rejects anything worse.
#[derive(Clone, PartialEq, Debug)]
pub struct HermMatrix(CMatrix);

impl HermMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if !(defect <= tol) {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian (max |M - M^dagger| = {defect:e})"
            )));
        }
        let n = m.dim();
        let sym = CMatrix::from_fn(n, |i, j| {
            if i == j {
                re(m[(i, i)].re)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Ok(HermMatrix(sym))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

impl std::ops::Deref for HermMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_rows(&[re(0.0), re(1.0), re(1.0), re(0.0)]).unwrap()
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)]).unwrap()
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_diag(&[1.0, -1.0])
}

/// Kronecker product: `(A (x) B)[i*dimB + k, j*dimB + l] = A[i,j] B[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.dim(), b.dim());
    CMatrix::from_fn(na * nb, |r, s| {
        a[(r / nb, s / nb)] * b[(r % nb, s % nb)]
    })
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

fn check_dims(total: usize, subsystem: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::invalid("factor dimensions must be non-empty and positive"));
    }
    let prod: usize = dims.iter().product();
    if prod != total {
        return Err(Error::invalid(format!(
            "factor dimensions {dims:?} multiply to {prod}, matrix has dimension {total}"
        )));
    }
    if subsystem >= dims.len() {
        return Err(Error::invalid(format!(
            "subsystem {subsystem} out of range for {} factors",
            dims.len()
        )));
    }
    Ok(())
}

/// Splits a composite index into (outer, local, inner) with respect to the
/// factor `subsystem`, where `inner` ranges over the factors to its right.
#[inline]
fn split_index(idx: usize, d: usize, inner: usize) -> (usize, usize, usize) {
    (idx / (d * inner), (idx / inner) % d, idx % inner)
}

/// Traces out factor `subsystem` of a matrix on the product space `dims`.
pub fn partial_trace(m: &CMatrix, subsystem: usize, dims: &[usize]) -> Result<CMatrix> {
    check_dims(m.dim(), subsystem, dims)?;
    let d = dims[subsystem];
    let inner: usize = dims[subsystem + 1..].iter().product();
    let out_dim = m.dim() / d;
    Ok(CMatrix::from_fn(out_dim, |i, j| {
        let (io, ii) = (i / inner, i % inner);
        let (jo, ji) = (j / inner, j % inner);
        (0..d)
            .map(|k| {
                let r = (io * d + k) * inner + ii;
                let s = (jo * d + k) * inner + ji;
                m[(r, s)]
            })
            .sum()
    }))
}

/// Partial trace that keeps a Hermitian input Hermitian.
pub fn partial_trace_herm(m: &HermMatrix, subsystem: usize, dims: &[usize]) -> Result<HermMatrix> {
    HermMatrix::new(partial_trace(m, subsystem, dims)?)
}

/// Reduces onto the listed factors (in increasing order), tracing out all others.
pub fn reduce_to(m: &CMatrix, keep: &[usize], dims: &[usize]) -> Result<CMatrix> {
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("kept factors must be strictly increasing"));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::invalid("kept factor out of range"));
    }
    let mut current = m.clone();
    let mut current_dims = dims.to_vec();
    for idx in (0..dims.len()).rev() {
        if !keep.contains(&idx) {
            current = partial_trace(&current, idx, &current_dims)?;
            current_dims.remove(idx);
        }
    }
    Ok(current)
}

/// Transposes the indices of factor `subsystem` only.
pub fn partial_transpose(m: &CMatrix, subsystem: usize, dims: &[usize]) -> Result<CMatrix> {
    check_dims(m.dim(), subsystem, dims)?;
    let d = dims[subsystem];
    let inner: usize = dims[subsystem + 1..].iter().product();
    Ok(CMatrix::from_fn(m.dim(), |i, j| {
        let (io, ik, ii) = split_index(i, d, inner);
        let (jo, jk, ji) = split_index(j, d, inner);
        let r = (io * d + jk) * inner + ii;
        let s = (jo * d + ik) * inner + ji;
        m[(r, s)]
    }))
}

pub fn partial_transpose_herm(m: &HermMatrix, subsystem: usize, dims: &[usize]) -> Result<HermMatrix> {
    HermMatrix::new(partial_transpose(m, subsystem, dims)?)
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// a real Givens rotation, so the iteration is the classical real Jacobi
/// method in a rephased basis. Sweeps stop once the off-diagonal Frobenius
/// norm falls below `1e-12` relative to the full norm.
pub fn herm_eigen(h: &HermMatrix) -> Eigen {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::EPSILON * 1e-3 * scale {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // G = E P with E = diag(1, conj(phase)) on (p, q) and P the
                // real rotation [[c, s], [-s, c]].
                let g_pp = re(cs);
                let g_pq = re(sn);
                let g_qp = phase.conj() * (-sn);
                let g_qq = phase.conj() * cs;
                rotate(&mut a, &mut v, p, q, [g_pp, g_pq, g_qp, g_qq]);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    Eigen {
        values: order.iter().map(|&i| diag[i]).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
            .collect(),
    }
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, g: [C64; 4]) {
    let [g_pp, g_pq, g_qp, g_qq] = g;
    let n = a.dim();
    // A <- A G, V <- V G
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    // A <- G^dagger A
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = re(0.0);
    a[(q, p)] = re(0.0);
    a[(p, p)] = re(a[(p, p)].re);
    a[(q, q)] = re(a[(q, q)].re);
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn herm_eigvals(h: &HermMatrix) -> Vec<f64> {
    herm_eigen(h).values
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(h: &HermMatrix) -> f64 {
    herm_eigvals(h).iter().map(|x| x.abs()).sum()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}
