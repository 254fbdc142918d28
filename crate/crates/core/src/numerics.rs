//! Dependency-free complex linear algebra and quadrature.
//!
//! Everything here targets the small dense matrices this crate works with
//! (channels of a few hundred rows, equivalent channels of at most a few
//! dozen). The SVD is a one-sided Jacobi on columns, the log-determinant
//! goes through a Cholesky factorization, and the integrator is composite
//! Simpson.

use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Column vector from a slice.
    pub fn column_vector(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|x| !(x.re.is_finite() && x.im.is_finite()))
            .map(|k| (k / self.cols, k % self.cols))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Standard complex matrix product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::Shape(format!(
            "matmul {}x{} with {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

/// Ordered singular value decomposition `A = U diag(sigma) V^H`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left_vectors: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right_vectors: ComplexMatrix,
}

impl SvdResult {
    /// `U diag(sigma) V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.left_vectors;
        let v = &self.right_vectors;
        ComplexMatrix::from_fn(u.rows(), v.rows(), |i, j| {
            (0..self.singular_values.len())
                .map(|k| u[(i, k)] * self.singular_values[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 60;

/// Thin SVD via one-sided Jacobi on columns.
///
/// Deterministic for a fixed input: the sweep order is fixed and ties in the
/// final descending sort are broken by preserving the Jacobi output order.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if a.rows == 0 || a.cols == 0 {
        return Err(Error::Shape("svd of empty matrix".into()));
    }
    if let Some((row, col)) = a.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    if a.rows < a.cols {
        // Work on the conjugate transpose and swap the factors back.
        let t = svd(&a.hermitian())?;
        return Ok(SvdResult {
            left_vectors: t.right_vectors,
            singular_values: t.singular_values,
            right_vectors: t.left_vectors,
        });
    }

    let (m, n) = (a.rows, a.cols);
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(n);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut converged = true;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut aa = 0.0;
                let mut bb = 0.0;
                let mut g = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    let ci = u[(r, i)];
                    let cj = u[(r, j)];
                    aa += ci.norm_sqr();
                    bb += cj.norm_sqr();
                    g += ci.conj() * cj;
                }
                let off = g.norm();
                if off <= JACOBI_TOL * (aa * bb).sqrt() || off == 0.0 {
                    continue;
                }
                converged = false;
                // Zero the (i,j) Gram entry with a complex Jacobi rotation.
                let phase = g / off;
                let tau = (aa - bb) / (2.0 * off);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let s_i = sn * phase.conj(); // applied to column j when forming new i
                let s_j = sn * phase;
                for r in 0..m {
                    let ci = u[(r, i)];
                    let cj = u[(r, j)];
                    u[(r, i)] = cs * ci + s_i * cj;
                    u[(r, j)] = -s_j * ci + cs * cj;
                }
                for r in 0..n {
                    let vi = v[(r, i)];
                    let vj = v[(r, j)];
                    v[(r, i)] = cs * vi + s_i * vj;
                    v[(r, j)] = -s_j * vi + cs * vj;
                }
            }
        }
        if converged {
            break;
        }
    }

    let mut sigma: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|r| u[(r, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();

    // Stable descending sort; equal values keep Jacobi output order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap());

    let mut left = ComplexMatrix::zeros(m, n);
    let mut right = ComplexMatrix::zeros(n, n);
    let mut sorted_sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_sigma.push(sigma[src]);
        for r in 0..n {
            right[(r, dst)] = v[(r, src)];
        }
        if sigma[src] > 0.0 {
            let inv = 1.0 / sigma[src];
            for r in 0..m {
                left[(r, dst)] = u[(r, src)] * inv;
            }
        }
    }
    sigma = sorted_sigma;

    // Columns with a zero singular value get an orthonormal completion so
    // that U^H U = I still holds.
    for j in 0..n {
        if sigma[j] > 0.0 {
            continue;
        }
        'candidates: for cand in 0..m {
            let mut col = vec![Complex64::new(0.0, 0.0); m];
            col[cand] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for k in 0..n {
                    if k == j || (sigma[k] == 0.0 && k > j) {
                        continue;
                    }
                    let proj: Complex64 =
                        (0..m).map(|r| left[(r, k)].conj() * col[r]).sum();
                    for r in 0..m {
                        col[r] -= proj * left[(r, k)];
                    }
                }
            }
            let norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for r in 0..m {
                    left[(r, j)] = col[r] / norm;
                }
                break 'candidates;
            }
        }
    }

    Ok(SvdResult {
        left_vectors: left,
        singular_values: sigma,
        right_vectors: right,
    })
}

/// log2 det of a Hermitian positive definite matrix via Cholesky.
///
/// The input is symmetrized before factorization; asymmetry beyond 1e-9
/// (relative to the largest entry) is rejected, as is any non-positive pivot.
pub fn logdet_hermitian_psd(a: &ComplexMatrix) -> Result<f64> {
    if a.rows != a.cols {
        return Err(Error::Shape(format!("logdet of {}x{}", a.rows, a.cols)));
    }
    if let Some((row, col)) = a.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let n = a.rows;
    let scale = a.max_abs().max(1.0);
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    if asym > 1e-9 * scale {
        return Err(Error::NotHermitian(asym));
    }

    let mut l = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut logdet = 0.0;
    for k in 0..n {
        let mut pivot = l[(k, k)].re;
        for j in 0..k {
            pivot -= l[(k, j)].norm_sqr();
        }
        if pivot <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let lkk = pivot.sqrt();
        logdet += 2.0 * lkk.log2();
        l[(k, k)] = Complex64::new(lkk, 0.0);
        for i in (k + 1)..n {
            let mut x = l[(i, k)];
            for j in 0..k {
                x -= l[(i, j)] * l[(k, j)].conj();
            }
            l[(i, k)] = x / lkk;
        }
    }
    Ok(logdet)
}

/// Composite Simpson estimate of `\int_lo^hi f`. `n` is forced even.
pub fn integrate_uniform(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "integration bounds lo={lo} hi={hi}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    let n = n + n % 2;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    Ok(acc * h / 3.0)
}
