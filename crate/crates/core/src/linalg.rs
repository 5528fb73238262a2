//! Dense linear algebra over [`Scalar`] fields.
//!
//! Exact fields use Gaussian elimination to reduced row echelon form. Float
//! fields use the singular value decomposition; singular values below
//! [`RANK_RTOL`] times the largest one count as zero.

use crate::scalar::Scalar;

/// Relative singular-value threshold for float rank decisions.
pub const RANK_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: Vec<T>) {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        T::rank(self)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank of a list of vectors (as rows).
pub fn rank_of<T: Scalar>(vectors: &[Vec<T>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank()
}

/// `2^k` as a scalar, `|k| ≤ 62`.
pub(crate) fn pow2<T: Scalar>(k: i32) -> T {
    let k = k.clamp(-62, 62);
    if k >= 0 {
        T::from_ratio(1 << k, 1)
    } else {
        T::from_ratio(1, 1 << -k)
    }
}

/// [`Scalar::solve`] after scaling every column to about unit size, so
/// that a column of tiny entries is not mistaken for a zero one. Exact
/// fields solve directly. Meant for full-rank systems: the solution picked
/// in a rank-deficient one is no longer the minimum-norm one.
pub fn solve_equilibrated<T: Scalar>(m: &Matrix<T>, b: &[T], tol: f64) -> Option<Vec<T>> {
    if T::is_exact() {
        return T::solve(m, b, tol);
    }
    let exps: Vec<i32> = (0..m.cols)
        .map(|j| {
            let size = (0..m.rows).map(|i| m[(i, j)].abs()).fold(0.0, f64::max);
            if size > 0.0 {
                -size.log2().round() as i32
            } else {
                0
            }
        })
        .collect();
    let mut scaled = m.clone();
    for i in 0..m.rows {
        for (j, &k) in exps.iter().enumerate() {
            scaled[(i, j)] = scaled[(i, j)].clone() * pow2::<T>(k);
        }
    }
    let y = T::solve(&scaled, b, tol)?;
    Some(y.into_iter().zip(&exps).map(|(v, &k)| v * pow2::<T>(k)).collect())
}

pub mod exact {
    use super::Matrix;
    use crate::scalar::Scalar;

    /// Reduced row echelon form and pivot columns, deciding zero exactly.
    pub fn rref<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
        let mut a = m.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..a.cols {
                    let tmp = a[(p, j)].clone();
                    a[(p, j)] = a[(r, j)].clone();
                    a[(r, j)] = tmp;
                }
            }
            let inv = a[(r, c)].inv().expect("pivot is nonzero");
            for j in c..a.cols {
                a[(r, j)] = a[(r, j)].clone() * inv.clone();
            }
            for i in 0..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let factor = a[(i, c)].clone();
                for j in c..a.cols {
                    let v = a[(r, j)].clone() * factor.clone();
                    a[(i, j)] = a[(i, j)].clone() - v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
        rref(m).1.len()
    }

    /// Basis of `{x : m x = 0}`, one vector per free column.
    pub fn null_space<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
        let (r, pivots) = rref(m);
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![T::zero(); m.cols];
                v[fc] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, fc)].clone();
                }
                v
            })
            .collect()
    }

    pub fn solve<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
        let mut aug = Matrix::zeros(m.rows, m.cols + 1);
        for i in 0..m.rows {
            for j in 0..m.cols {
                aug[(i, j)] = m[(i, j)].clone();
            }
            aug[(i, m.cols)] = b[i].clone();
        }
        let (r, pivots) = rref(&aug);
        if pivots.last() == Some(&m.cols) {
            return None;
        }
        let mut x = vec![T::zero(); m.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, m.cols)].clone();
        }
        Some(x)
    }
}

pub mod float {
    use nalgebra::DMatrix;
    use num_complex::Complex;
    use num_traits::FromPrimitive;

    use super::{Matrix, RANK_RTOL};
    use crate::scalar::{Real, Scalar};

    fn to_nalgebra<F: Real>(m: &Matrix<Complex<F>>, min_rows: usize) -> DMatrix<Complex<F>> {
        let rows = m.rows.max(min_rows);
        DMatrix::from_fn(rows, m.cols, |i, j| {
            if i < m.rows {
                m[(i, j)]
            } else {
                Complex::new(F::zero(), F::zero())
            }
        })
    }

    fn threshold(sv: &[f64]) -> f64 {
        let max = sv.iter().cloned().fold(0.0, f64::max);
        if max <= f64::MIN_POSITIVE {
            f64::INFINITY
        } else {
            RANK_RTOL * max
        }
    }

    pub fn rank<F: Real>(m: &Matrix<Complex<F>>) -> usize {
        if m.rows == 0 || m.cols == 0 {
            return 0;
        }
        let svd = to_nalgebra(m, 0).svd(false, false);
        let sv: Vec<f64> = svd
            .singular_values
            .iter()
            .map(|s| s.to_f64().unwrap_or(0.0))
            .collect();
        let t = threshold(&sv);
        sv.iter().filter(|&&s| s > t).count()
    }

    pub fn null_space<F: Real>(m: &Matrix<Complex<F>>) -> Vec<Vec<Complex<F>>> {
        if m.cols == 0 {
            return Vec::new();
        }
        let svd = to_nalgebra(m, m.cols).svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let sv: Vec<f64> = svd
            .singular_values
            .iter()
            .map(|s| s.to_f64().unwrap_or(0.0))
            .collect();
        let t = threshold(&sv);
        sv.iter()
            .enumerate()
            .filter(|(_, &s)| s <= t)
            .map(|(k, _)| (0..m.cols).map(|j| v_t[(k, j)].conj()).collect())
            .collect()
    }

    pub fn solve<F: Real>(
        m: &Matrix<Complex<F>>,
        b: &[Complex<F>],
        tol: f64,
    ) -> Option<Vec<Complex<F>>> {
        if m.cols == 0 {
            return Some(Vec::new());
        }
        let a = to_nalgebra(m, 0);
        let svd = a.clone().svd(true, true);
        let sv: Vec<f64> = svd
            .singular_values
            .iter()
            .map(|s| s.to_f64().unwrap_or(0.0))
            .collect();
        let t = threshold(&sv);
        let eps = <F as FromPrimitive>::from_f64(if t.is_finite() { t } else { f64::MAX })
            .unwrap_or(<F as num_traits::Float>::max_value());
        let rhs = nalgebra::DVector::from_iterator(m.rows, b.iter().cloned());
        let x = svd.solve(&rhs, eps).ok()?;
        let x: Vec<Complex<F>> = x.iter().cloned().collect();
        let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        let resid = m
            .mul_vec(&x)
            .iter()
            .zip(b)
            .map(|(p, q)| (*p - *q).abs())
            .fold(0.0, f64::max);
        (resid <= tol * scale).then_some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclo;
    use num_complex::Complex64;

    fn q(n: i64) -> Cyclo {
        Cyclo::from_int(n)
    }

    #[test]
    fn exact_null_space_of_rank_one() {
        let m = Matrix::from_rows(vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]]);
        assert_eq!(m.rank(), 1);
        let ns = Cyclo::null_space(&m);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(|x| x == &q(0)));
        }
    }

    #[test]
    fn exact_solve_detects_inconsistency() {
        let m = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(2), q(2)]]);
        assert!(Cyclo::solve(&m, &[q(1), q(3)], 0.0).is_none());
        let x = Cyclo::solve(&m, &[q(1), q(2)], 0.0).unwrap();
        assert_eq!(x, vec![q(1), q(0)]);
    }

    #[test]
    fn float_rank_and_null_space_agree_with_exact() {
        let rows = [vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 1.0, 1.0]];
        let m = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        );
        assert_eq!(m.rank(), 2);
        let ns = Complex64::null_space(&m);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn float_least_squares_residual_gate() {
        let m = Matrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
        ]);
        let b = [Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-12, 0.0)];
        assert!(Complex64::solve(&m, &b, 1e-9).is_some());
        let b = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(Complex64::solve(&m, &b, 1e-9).is_none());
    }
}
