//! Dense complex linear algebra for operators on C^d and C^d ⊗ C^d.
//!
//! Bipartite index convention: |i⟩⊗|k⟩ is row `i * d + k`. Every module in
//! the crate relies on it.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical slack used by positivity and equality checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Eigenvalues down to `-eig_tol` count as nonnegative.
    pub eig_tol: f64,
    /// Entrywise equality slack.
    pub eq_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eig_tol: 1e-9,
            eq_tol: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn new(eig_tol: f64, eq_tol: f64) -> Result<Self> {
        for (name, v) in [("eig_tol", eig_tol), ("eq_tol", eq_tol)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(Tolerance { eig_tol, eq_tol })
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries; errors if the count is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} entries cannot form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn require_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// max |a_ij - conj(a_ji)|; `f64::INFINITY` for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian within `tol`, measured relative to max(1, largest entry).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.max_abs().max(1.0)
    }

    pub(crate) fn require_hermitian(&self, tol: &Tolerance) -> Result<usize> {
        let n = self.require_square()?;
        let dev = self.hermitian_deviation();
        if dev > tol.eq_tol * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(n)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in addition");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in subtraction");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in multiplication")
    }
}

/// Kronecker product; |i⟩⊗|k⟩ of `a ⊗ b` is row `i * n + k` where `b` is n×n.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = a.require_square()?;
    let n = b.require_square()?;
    Ok(ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        a[(r / n, c / n)] * b[(r % n, c % n)]
    }))
}

/// Direct sum `a ⊕ b` (block diagonal).
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = a.require_square()?;
    let n = b.require_square()?;
    let mut out = ComplexMatrix::zeros(m + n, m + n);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = a[(i, j)];
        }
    }
    for i in 0..n {
        for j in 0..n {
            out[(m + i, m + j)] = b[(i, j)];
        }
    }
    Ok(out)
}

pub(crate) fn require_bipartite(a: &ComplexMatrix, d: usize) -> Result<()> {
    let n = a.require_square()?;
    if d == 0 || n != d * d {
        return Err(Error::NotBipartite { size: n, d });
    }
    Ok(())
}

/// Transposition on the second tensor factor: (1 ⊗ T) A.
pub fn partial_transpose(a: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    require_bipartite(a, d)?;
    Ok(ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        a[(i * d + l, j * d + k)]
    }))
}

/// Entrywise product.
pub fn hadamard(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_same_shape(b)?;
    Ok(ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    })
}

/// Tr(AB) as Σ a_ij b_ji, without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let n = a.require_square()?;
    a.require_same_shape(b)?;
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// Eigenvalues (ascending) with the matching orthonormal eigenvectors stored
/// as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation zeroes one off-diagonal pair: the phase of `a_pq` is moved
/// onto the q-th basis vector, which leaves a real symmetric 2×2 problem
/// solved by the usual stable tangent formula.
pub fn hermitian_eigen(a: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    let n = a.require_hermitian(tol)?;
    if !a.is_finite() {
        return Err(Error::InvalidParameter(
            "matrix has non-finite entries".into(),
        ));
    }
    // work on the exactly Hermitian part
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re).then(x.cmp(&y)));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, c| v[(i, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g; // e^{iφ}
    let zeta = (aqq - app) / (2.0 * g);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    let n = m.rows();

    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * jpp + mkq * jqp;
        m[(k, q)] = mkp * jpq + mkq * jqq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = jpp.conj() * mpk + jqp.conj() * mqk;
        m[(q, k)] = jpq.conj() * mpk + jqq.conj() * mqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// All eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn hermitian_eigenvalues(a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a, tol)?.values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

pub fn is_positive_semidefinite(a: &ComplexMatrix, tol: &Tolerance) -> Result<PsdVerdict> {
    let values = hermitian_eigenvalues(a, tol)?;
    let min_eigenvalue = values.first().copied().unwrap_or(0.0);
    Ok(PsdVerdict {
        psd: min_eigenvalue >= -tol.eig_tol,
        min_eigenvalue,
    })
}

/// Formats a float with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Wire form of a matrix: `{"rows", "cols", "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Deserialize)]
struct MatrixJsonIn {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct MatrixJsonOut {
    rows: usize,
    cols: usize,
    re: Vec<Vec<Box<RawValue>>>,
    im: Vec<Vec<Box<RawValue>>>,
}

impl ComplexMatrix {
    pub(crate) fn to_json_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("matrix JSON is well formed")
    }

    /// Serializes in the matrix exchange format, 17 significant digits per entry.
    pub fn to_json(&self) -> String {
        let raw = |x: f64| RawValue::from_string(sig17(x)).expect("valid JSON number");
        let out = MatrixJsonOut {
            rows: self.rows,
            cols: self.cols,
            re: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| raw(self[(i, j)].re)).collect())
                .collect(),
            im: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| raw(self[(i, j)].im)).collect())
                .collect(),
        };
        serde_json::to_string(&out).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: MatrixJsonIn = serde_json::from_str(s)?;
        Self::from_json_parts(raw)
    }

    pub(crate) fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let raw: MatrixJsonIn = serde_json::from_value(v)?;
        Self::from_json_parts(raw)
    }

    fn from_json_parts(raw: MatrixJsonIn) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("matrix JSON: {what}"));
        if raw.re.len() != raw.rows || raw.im.len() != raw.rows {
            return Err(bad("row count does not match \"rows\""));
        }
        let mut data = Vec::with_capacity(raw.rows * raw.cols);
        for (re_row, im_row) in raw.re.iter().zip(&raw.im) {
            if re_row.len() != raw.cols || im_row.len() != raw.cols {
                return Err(bad("row length does not match \"cols\""));
            }
            data.extend(re_row.iter().zip(im_row).map(|(&r, &i)| C64::new(r, i)));
        }
        let m = Self::from_vec(raw.rows, raw.cols, data)?;
        if !m.is_finite() {
            return Err(bad("non-finite entry"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_of_identities_and_diagonals() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diagonal(&[3.0, 4.0]);
        assert_eq!(
            tensor(&a, &b).unwrap(),
            ComplexMatrix::from_real_diagonal(&[3.0, 4.0, 6.0, 8.0])
        );
    }

    #[test]
    fn tensor_rejects_non_square() {
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            tensor(&r, &ComplexMatrix::identity(2)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn tensor_of_shifts_permutes_basis() {
        // S|k> = |k+1>, so S⊗S maps |ik> to |i+1,k+1>
        let d = 3;
        let s = ComplexMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { ONE } else { ZERO });
        let ss = tensor(&s, &s).unwrap();
        for i in 0..d {
            for k in 0..d {
                let mut ket = vec![ZERO; d * d];
                ket[i * d + k] = ONE;
                let out = ss.mul_vec(&ket);
                let target = ((i + 1) % d) * d + (k + 1) % d;
                for (idx, z) in out.iter().enumerate() {
                    let want = if idx == target { ONE } else { ZERO };
                    assert_eq!(*z, want, "|{i}{k}> component {idx}");
                }
            }
        }
    }

    #[test]
    fn partial_transpose_of_identity_and_errors() {
        let id = ComplexMatrix::identity(9);
        assert_eq!(partial_transpose(&id, 3).unwrap(), id);
        assert!(matches!(
            partial_transpose(&ComplexMatrix::identity(8), 3),
            Err(Error::NotBipartite { .. })
        ));
    }

    #[test]
    fn partial_transpose_of_maximally_entangled_is_scaled_flip() {
        for d in [2usize, 3] {
            let p = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
                if r % (d + 1) == 0 && c % (d + 1) == 0 {
                    c64(1.0 / d as f64)
                } else {
                    ZERO
                }
            });
            let flip = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
                if r == (c % d) * d + c / d {
                    c64(1.0 / d as f64)
                } else {
                    ZERO
                }
            });
            assert!(partial_transpose(&p, d).unwrap().approx_eq(&flip, 0.0));
        }
    }

    fn c64(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn hadamard_identities() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64 - 1.0));
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| ONE);
        assert_eq!(hadamard(&a, &ones).unwrap(), a);
        let diag = ComplexMatrix::from_fn(3, 3, |i, j| if i == j { a[(i, j)] } else { ZERO });
        assert_eq!(hadamard(&ComplexMatrix::identity(3), &a).unwrap(), diag);
        assert!(hadamard(&a, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn eigenvalues_of_diagonal_sorted() {
        let tol = Tolerance::default();
        let m = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(
            hermitian_eigenvalues(&m, &tol).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_eigenvalues(&m, &Tolerance::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rank_one_update_spectrum() {
        // (1/d)I - (1/d)J at d=3, plus a0/d·I with a0=1: {-1/3, 2/3, 2/3}
        let d = 3.0;
        let a0 = 1.0;
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            let id = if i == j { (a0 + 1.0) / d } else { 0.0 };
            c64(id - 1.0 / d)
        });
        let ev = hermitian_eigenvalues(&m, &Tolerance::default()).unwrap();
        let want = [-1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        for (x, y) in ev.iter().zip(want) {
            assert!((x - y).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn eigenvectors_satisfy_residual_contract() {
        let tol = Tolerance::default();
        let n = 7;
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let (lo, hi) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j {
                0.3 * hi
            } else if i > j {
                -0.3 * hi
            } else {
                0.0
            };
            c(1.0 / (1.0 + lo + hi), im)
        });
        let eig = hermitian_eigen(&m, &tol).unwrap();
        let norm = m.frobenius_norm();
        for k in 0..n {
            let v = eig.vector(k);
            let av = m.mul_vec(&v);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y * eig.values[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-10 * norm, "residual {res}");
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn psd_verdicts() {
        let tol = Tolerance::default();
        let v = is_positive_semidefinite(&ComplexMatrix::identity(3), &tol).unwrap();
        assert!(v.psd);
        assert_eq!(v.min_eigenvalue, 1.0);
        let v = is_positive_semidefinite(&ComplexMatrix::from_real_diagonal(&[1.0, -1e-3]), &tol)
            .unwrap();
        assert!(!v.psd);
        assert_eq!(v.min_eigenvalue, -1e-3);
    }

    #[test]
    fn trace_product_against_trace() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| c((i * 4 + j) as f64, i as f64 - j as f64));
        let t = trace_product(&ComplexMatrix::identity(4), &a).unwrap();
        assert_eq!(t, a.trace());
        assert!(trace_product(&a, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn matrix_json_format() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| c(0.1 * (i + j) as f64, -(i as f64) / 3.0));
        let s = m.to_json();
        assert!(s.starts_with(r#"{"rows":2,"cols":2,"re":[["#));
        assert!(s.contains("3.3333333333333331e-1"), "{s}");
        let back = ComplexMatrix::from_json(&s).unwrap();
        assert_eq!(back, m);
        assert!(
            ComplexMatrix::from_json(r#"{"rows":2,"cols":2,"re":[[1,2]],"im":[[0,0]]}"#).is_err()
        );
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        assert!(Tolerance::new(1e-9, f64::NAN).is_err());
        assert!(Tolerance::new(0.0, 0.0).is_ok());
    }
}
