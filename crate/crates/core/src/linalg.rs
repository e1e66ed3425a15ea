//! Small dense least-squares kernels used by the regression models and the
//! unit-root test. Problem sizes here are tiny (a few dozen columns at most).

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }
}

/// Ordinary least squares solution via Householder QR.
#[derive(Debug, Clone)]
pub struct OlsFit<T> {
    pub coef: Vec<T>,
    pub rss: T,
    pub nobs: usize,
    r: Matrix<T>,
}

impl<T: Scalar> OlsFit<T> {
    pub fn df_resid(&self) -> usize {
        self.nobs - self.coef.len()
    }

    /// Classical standard errors, `sqrt(s² · diag((XᵀX)⁻¹))`.
    pub fn std_errors(&self) -> Option<Vec<T>> {
        let df = self.df_resid();
        if df == 0 {
            return None;
        }
        let s2 = self.rss / T::from_count(df);
        let rinv = upper_inverse(&self.r);
        let k = self.coef.len();
        Some(
            (0..k)
                .map(|j| {
                    let d: T = (j..k).map(|c| rinv.get(j, c) * rinv.get(j, c)).sum();
                    (s2 * d).sqrt()
                })
                .collect(),
        )
    }
}

fn upper_inverse<T: Scalar>(r: &Matrix<T>) -> Matrix<T> {
    let k = r.cols();
    let mut inv = Matrix::zeros(k, k);
    for col in 0..k {
        for row in (0..=col).rev() {
            let mut acc = if row == col { T::one() } else { T::zero() };
            for j in row + 1..=col {
                acc = acc - r.get(row, j) * inv.get(j, col);
            }
            inv.set(row, col, acc / r.get(row, row));
        }
    }
    inv
}

/// Solves `min ‖Xb − y‖²`. Columns that are numerically dependent on the
/// preceding ones yield [`Error::DegenerateRegression`].
pub fn ols<T: Scalar>(x: &Matrix<T>, y: &[T]) -> Result<OlsFit<T>> {
    let (m, n) = (x.rows(), x.cols());
    assert_eq!(y.len(), m, "response length");
    if m < n || n == 0 {
        return Err(Error::DegenerateRegression);
    }
    let tol = T::epsilon().sqrt();
    let col_norms: Vec<T> = (0..n)
        .map(|c| (0..m).map(|r| x.get(r, c) * x.get(r, c)).sum::<T>().sqrt())
        .collect();

    let mut a = x.clone();
    let mut b = y.to_vec();
    for j in 0..n {
        let norm = (j..m).map(|r| a.get(r, j) * a.get(r, j)).sum::<T>().sqrt();
        if col_norms[j] == T::zero() || norm <= tol * col_norms[j] {
            return Err(Error::DegenerateRegression);
        }
        let ajj = a.get(j, j);
        let alpha = if ajj > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (j..m).map(|r| a.get(r, j)).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&e| e * e).sum();
        if vnorm2 > T::zero() {
            let two = T::lit(2.0);
            for c in j..n {
                let dot: T = v.iter().enumerate().map(|(i, &vi)| vi * a.get(j + i, c)).sum();
                let f = two * dot / vnorm2;
                for (i, &vi) in v.iter().enumerate() {
                    a.set(j + i, c, a.get(j + i, c) - f * vi);
                }
            }
            let dot: T = v.iter().enumerate().map(|(i, &vi)| vi * b[j + i]).sum();
            let f = two * dot / vnorm2;
            for (i, &vi) in v.iter().enumerate() {
                b[j + i] = b[j + i] - f * vi;
            }
        }
    }

    let mut r = Matrix::zeros(n, n);
    for i in 0..n {
        for c in i..n {
            r.set(i, c, a.get(i, c));
        }
    }
    let mut coef = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for (c, &x) in coef.iter().enumerate().skip(i + 1) {
            acc = acc - r.get(i, c) * x;
        }
        coef[i] = acc / r.get(i, i);
    }
    let rss: T = b[n..].iter().map(|&e| e * e).sum();
    if coef.iter().any(|c| !c.is_finite()) || !rss.is_finite() {
        return Err(Error::DegenerateRegression);
    }
    Ok(OlsFit { coef, rss, nobs: m, r })
}

/// Solves the symmetric positive definite system `a · x = b` by Cholesky.
pub fn cholesky_solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "square system");
    assert_eq!(b.len(), n, "rhs length");
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s = s - l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= T::zero() || !s.is_finite() {
                    return Err(Error::DegenerateRegression);
                }
                l.set(i, i, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    let mut z = vec![T::zero(); n];
    for i in 0..n {
        let s: T = (0..i).map(|k| l.get(i, k) * z[k]).sum();
        z[i] = (b[i] - s) / l.get(i, i);
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s: T = (i + 1..n).map(|k| l.get(k, i) * x[k]).sum();
        x[i] = (z[i] - s) / l.get(i, i);
    }
    Ok(x)
}
