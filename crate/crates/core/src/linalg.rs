//! Dense complex linear algebra at small fixed sizes.
//!
//! Everything here works on matrices of dimension at most a few dozen: the
//! tangent spaces of the classical domains handled by this crate. Hermitian
//! eigenvalues come from cyclic Jacobi sweeps, generalized pencils from a
//! Cholesky reduction, and complex Hessians from Richardson-extrapolated
//! central differences.
//!
//! Sesquilinear convention: a [`HermitianForm`] with matrix `M` evaluates as
//! `H(u, v̄) = v* M u`, so `H(u, ū) = u* M u`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type C64 = Complex64;

/// Elementwise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Off-diagonal tolerance for Jacobi sweeps (relative to the Frobenius norm).
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Default step of [`complex_hessian`].
pub const HESSIAN_STEP: f64 = 1e-4;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let v = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        CMatrix::from_diag(&d)
    }

    /// Builds a matrix from row-major data; validates the entry count and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LabError::validation("matrix dimensions must be positive"));
        }
        LabError::check_len(rows * cols, data.len())?;
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LabError::validation("matrix entries must be finite"));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != cols) {
            return Err(LabError::validation("ragged matrix rows"));
        }
        CMatrix::from_vec(r, cols, rows.concat())
    }

    pub fn row_vector(entries: &[C64]) -> Self {
        CMatrix {
            rows: 1,
            cols: entries.len(),
            data: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for col in 0..self.cols {
                out[(col, r)] = self[(r, col)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for col in 0..self.cols {
                out[(col, r)] = self[(r, col)];
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LabError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        LabError::check_len(self.cols, other.rows)?;
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        LabError::check_len(self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// LU factorization with partial pivoting; returns (LU, permutation, sign).
    fn lu(&self) -> Result<(CMatrix, Vec<usize>, f64)> {
        if !self.is_square() {
            return Err(LabError::validation("LU requires a square matrix"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == 0.0 {
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= factor * t;
                }
            }
        }
        Ok((a, perm, sign))
    }

    pub fn determinant(&self) -> Result<C64> {
        let (lu, _, sign) = self.lu()?;
        let mut det = C64::new(sign, 0.0);
        for i in 0..self.rows {
            det *= lu[(i, i)];
        }
        Ok(det)
    }

    /// Solves `self · x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        LabError::check_len(self.rows, b.len())?;
        let (lu, perm, _) = self.lu()?;
        let n = self.rows;
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n {
            if lu[(i, i)].norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                return Err(LabError::singular("matrix is singular to working precision"));
            }
        }
        let mut y: Vec<C64> = perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = lu[(i, j)] * y[j];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = lu[(i, j)] * y[j];
                y[i] -= t;
            }
            y[i] /= lu[(i, i)];
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.rows;
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    /// Direct sum of square blocks.
    pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = CMatrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Largest singular value, via the Hermitian eigenproblem of `A* A`.
    pub fn spectral_norm(&self) -> f64 {
        let gram = HermitianForm::symmetrized(&self.adjoint().mul(self).expect("shapes agree"));
        gram.eigenvalues().last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + col]
    }
}

/// A square matrix that has been checked to be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    matrix: CMatrix,
}

impl HermitianForm {
    /// Validates `matrix` against [`HERMITIAN_TOL`] and stores its exact Hermitian part.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(LabError::validation(format!(
                "Hermitian form needs a square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let n = matrix.rows();
        for i in 0..n {
            for j in i..n {
                let d = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if d > HERMITIAN_TOL {
                    return Err(LabError::validation(format!(
                        "matrix is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {d:e}"
                    )));
                }
            }
        }
        Ok(HermitianForm::symmetrized(&matrix))
    }

    /// `(M + M*)/2`, with no tolerance check. For internally assembled forms.
    pub fn symmetrized(matrix: &CMatrix) -> Self {
        let n = matrix.rows();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
            }
        }
        HermitianForm { matrix: m }
    }

    pub fn identity(n: usize) -> Self {
        HermitianForm {
            matrix: CMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `H(u, v̄) = v* M u`.
    pub fn eval(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        let mu = self.matrix.mul_vec(u)?;
        LabError::check_len(self.dim(), v.len())?;
        Ok(v.iter().zip(&mu).map(|(a, b)| a.conj() * b).sum())
    }

    /// `H(u, ū)`, always real for a Hermitian form.
    pub fn quadratic(&self, u: &[C64]) -> Result<f64> {
        Ok(self.eval(u, u)?.re)
    }

    /// `S* M S`.
    pub fn congruence(&self, s: &CMatrix) -> Result<HermitianForm> {
        let out = s.adjoint().mul(&self.matrix)?.mul(s)?;
        Ok(HermitianForm::symmetrized(&out))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigen(&self.matrix, false).0
    }

    /// Eigenvalues in ascending order with eigenvectors as matching columns.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let (vals, vecs) = jacobi_eigen(&self.matrix, true);
        (vals, vecs.expect("vectors requested"))
    }

    /// Lower-triangular `L` with `M = L L*`.
    pub fn cholesky(&self) -> Result<CMatrix> {
        let n = self.dim();
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            // Pivots are judged against their own diagonal entry so that badly
            // scaled diagonals (one coordinate near the boundary) stay accepted.
            let own = self.matrix[(j, j)].re.abs().max(f64::MIN_POSITIVE);
            let mut d = self.matrix[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 1e-14 * own) {
                return Err(LabError::NotPositiveDefinite {
                    margin: self.eigenvalues().first().copied().unwrap_or(d),
                });
            }
            let djj = d.sqrt();
            l[(j, j)] = C64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = self.matrix[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }
}

fn forward_substitute(l: &CMatrix, b: &[C64]) -> Vec<C64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            let t = l[(i, j)] * y[j];
            y[i] -= t;
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Cyclic Jacobi on a Hermitian matrix. Eigenvalues ascending.
fn jacobi_eigen(input: &CMatrix, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    let n = input.rows();
    let mut a = input.clone();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let frob = a.frobenius_norm();
    let threshold = (JACOBI_TOL * frob).powi(2).max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // U = D R with D = diag(1, conj(phase)) on (p, q), R = [[c, s], [-s, c]].
                let u_pp = C64::new(cs, 0.0);
                let u_pq = C64::new(sn, 0.0);
                let u_qp = -phase.conj() * sn;
                let u_qq = phase.conj() * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * u_pp + vkq * u_qp;
                        v[(k, q)] = vkp * u_pq + vkq * u_qq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = v.map(|v| {
        let mut out = CMatrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                out[(k, new_col)] = v[(k, old_col)];
            }
        }
        out
    });
    (vals, vecs)
}

/// Positive-definiteness test. Returns the flag and the smallest eigenvalue.
pub fn is_positive_definite(m: &HermitianForm) -> (bool, f64) {
    let min = m.eigenvalues().first().copied().unwrap_or(0.0);
    (min > 0.0, min)
}

/// Largest eigenvalue of the pencil `(G, H)`: `max_u G(u,ū)/H(u,ū)` over nonzero `u`.
pub fn max_generalized_eigenvalue(g: &HermitianForm, h: &HermitianForm) -> Result<f64> {
    LabError::check_len(h.dim(), g.dim())?;
    let l = h.cholesky()?;
    let n = h.dim();
    // C = L⁻¹ G L⁻*, assembled column by column.
    let mut x = CMatrix::zeros(n, n); // X = L⁻¹ G
    for j in 0..n {
        let col: Vec<C64> = (0..n).map(|i| g.matrix()[(i, j)]).collect();
        let y = forward_substitute(&l, &col);
        for i in 0..n {
            x[(i, j)] = y[i];
        }
    }
    // C = X L⁻* = (L⁻¹ X*)*
    let xa = x.adjoint();
    let mut cmat = CMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<C64> = (0..n).map(|i| xa[(i, j)]).collect();
        let y = forward_substitute(&l, &col);
        for i in 0..n {
            cmat[(j, i)] = y[i].conj();
        }
    }
    let pencil = HermitianForm::symmetrized(&cmat);
    Ok(pencil.eigenvalues().last().copied().unwrap_or(0.0))
}

/// `gᵀ H⁻¹ ḡ`, the maximum of `|gᵀu|² / H(u,ū)`.
pub fn hermitian_quadratic_solve(h: &HermitianForm, g: &[C64]) -> Result<f64> {
    LabError::check_len(h.dim(), g.len())?;
    let l = h.cholesky()?;
    let w: Vec<C64> = g.iter().map(|z| z.conj()).collect();
    let y = forward_substitute(&l, &w);
    Ok(y.iter().map(|z| z.norm_sqr()).sum())
}

/// Mixed Wirtinger Hessian `∂²F/∂z_i∂z̄_j` by central differences with one
/// Richardson level, symmetrized to be exactly Hermitian.
pub fn complex_hessian<F>(f: F, z: &[C64], step: f64) -> Result<HermitianForm>
where
    F: Fn(&[C64]) -> f64,
{
    if !(step > 0.0) || z.is_empty() {
        return Err(LabError::validation("complex_hessian needs step > 0 and a nonempty point"));
    }
    let n = z.len();
    let real_dim = 2 * n;
    let shifted = |a: usize, sa: f64, b: usize, sb: f64, h: f64| -> Result<f64> {
        let mut w = z.to_vec();
        for (idx, s) in [(a, sa), (b, sb)] {
            let (k, imag) = (idx % n, idx >= n);
            if imag {
                w[k].im += s * h;
            } else {
                w[k].re += s * h;
            }
        }
        let v = f(&w);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LabError::singular("non-finite sample in complex_hessian"))
        }
    };
    let second = |a: usize, b: usize, h: f64| -> Result<f64> {
        let pp = shifted(a, 1.0, b, 1.0, h)?;
        let pm = shifted(a, 1.0, b, -1.0, h)?;
        let mp = shifted(a, -1.0, b, 1.0, h)?;
        let mm = shifted(a, -1.0, b, -1.0, h)?;
        Ok((pp - pm - mp + mm) / (4.0 * h * h))
    };
    let mut real_hess = vec![0.0; real_dim * real_dim];
    for a in 0..real_dim {
        for b in a..real_dim {
            let coarse = second(a, b, step)?;
            let fine = second(a, b, step / 2.0)?;
            let v = (4.0 * fine - coarse) / 3.0;
            real_hess[a * real_dim + b] = v;
            real_hess[b * real_dim + a] = v;
        }
    }
    let d = |a: usize, b: usize| real_hess[a * real_dim + b];
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi, xj, yj) = (i, n + i, j, n + j);
            out[(i, j)] = C64::new(
                0.25 * (d(xi, xj) + d(yi, yj)),
                0.25 * (d(xi, yj) - d(yi, xj)),
            );
        }
    }
    Ok(HermitianForm::symmetrized(&out))
}
