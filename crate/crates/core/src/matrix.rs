//! Square matrices over K.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qfield::FieldElem;

/// Row-major `n x n` matrix over K. Indices are 0-based in the API.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<FieldElem>,
}

impl SquareMatrix {
    pub fn new(n: usize, entries: Vec<FieldElem>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("matrix size must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        Ok(SquareMatrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> FieldElem) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        SquareMatrix { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| FieldElem::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { FieldElem::one() } else { FieldElem::zero() })
    }

    /// Matrix unit `E_pq` (0-based).
    pub fn unit(n: usize, p: usize, q: usize) -> Self {
        Self::from_fn(n, |i, j| if (i, j) == (p, q) { FieldElem::one() } else { FieldElem::zero() })
    }

    pub fn diagonal(diag: Vec<FieldElem>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: FieldElem) {
        self.entries[i * self.n + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<FieldElem>]) -> Result<Self> {
        let n = cols.len();
        if let Some(bad) = cols.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
        }
        Ok(Self::from_fn(n, |i, j| cols[j][i].clone()))
    }

    pub fn check_same_size(&self, other: &SquareMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElem::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<(usize, &FieldElem)> {
        self.entries.iter().enumerate().find(|(_, e)| !e.is_zero())
    }

    pub fn trace(&self) -> FieldElem {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Entrywise complex conjugation.
    pub fn conjugate(&self) -> Self {
        SquareMatrix { n: self.n, entries: self.entries.iter().map(FieldElem::conjugate).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conjugate()
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        SquareMatrix { n: self.n, entries: self.entries.iter().map(|e| c * e).collect() }
    }

    pub fn checked_mul(&self, other: &SquareMatrix) -> Result<Self> {
        self.check_same_size(other)?;
        Ok(self * other)
    }

    /// Row echelon reduction over K; returns the reduced rows and pivot columns.
    fn echelon(&self) -> (Vec<Vec<FieldElem>>, Vec<usize>) {
        let n = self.n;
        let mut rows: Vec<Vec<FieldElem>> =
            (0..n).map(|i| self.entries[i * n..(i + 1) * n].to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else { continue };
            rows.swap(r, p);
            let inv = rows[r][c].inv().expect("pivot is nonzero");
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..n {
                if i == r || rows[i][c].is_zero() {
                    continue;
                }
                let f = rows[i][c].clone();
                for j in 0..n {
                    if rows[r][j].is_zero() {
                        continue;
                    }
                    let d = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (rows, pivots)
    }

    /// Rank by exact Gaussian elimination over K.
    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn determinant(&self) -> FieldElem {
        let n = self.n;
        let mut rows: Vec<Vec<FieldElem>> =
            (0..n).map(|i| self.entries[i * n..(i + 1) * n].to_vec()).collect();
        let mut det = FieldElem::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !rows[i][c].is_zero()) else {
                return FieldElem::zero();
            };
            if p != c {
                rows.swap(p, c);
                det = -det;
            }
            det = &det * &rows[c][c];
            let inv = rows[c][c].inv().expect("pivot is nonzero");
            for i in c + 1..n {
                if rows[i][c].is_zero() {
                    continue;
                }
                let f = &rows[i][c] * &inv;
                for j in c..n {
                    let d = &f * &rows[c][j];
                    rows[i][j] = &rows[i][j] - &d;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut rows: Vec<Vec<FieldElem>> = (0..n)
            .map(|i| {
                let mut row = self.entries[i * n..(i + 1) * n].to_vec();
                row.extend((0..n).map(|j| if i == j { FieldElem::one() } else { FieldElem::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !rows[i][c].is_zero()).ok_or(Error::SingularMatrix)?;
            rows.swap(c, p);
            let inv = rows[c][c].inv()?;
            for x in rows[c].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..n {
                if i == c || rows[i][c].is_zero() {
                    continue;
                }
                let f = rows[i][c].clone();
                for j in 0..2 * n {
                    if rows[c][j].is_zero() {
                        continue;
                    }
                    let d = &f * &rows[c][j];
                    rows[i][j] = &rows[i][j] - &d;
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][n + j].clone()))
    }

    /// Numeric embedding, row-major.
    pub fn embed(&self) -> Vec<Complex64> {
        self.entries.iter().map(FieldElem::embed_complex).collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<[String; 6]>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_strings()).collect())
            .collect()
    }
}

impl<'a> Mul<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        SquareMatrix::from_fn(n, |i, j| {
            let mut acc = FieldElem::zero();
            for k in 0..n {
                let (x, y) = (self.get(i, k), rhs.get(k, j));
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                acc += &(x * y);
            }
            acc
        })
    }
}

impl<'a> Add<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;

    fn add(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        SquareMatrix::from_fn(self.n, |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl<'a> Sub<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;

    fn sub(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        SquareMatrix::from_fn(self.n, |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{rat, Tau};

    fn int(n: i64) -> FieldElem {
        FieldElem::from_int(n)
    }

    #[test]
    fn products_and_trace() {
        let e12 = SquareMatrix::unit(3, 0, 1);
        let e23 = SquareMatrix::unit(3, 1, 2);
        let e31 = SquareMatrix::unit(3, 2, 0);
        let p = &(&e12 * &e23) * &e31;
        assert_eq!(p, SquareMatrix::unit(3, 0, 0));
        assert!(SquareMatrix::identity(3).trace() == int(3));
    }

    #[test]
    fn rank_and_determinant() {
        let m = SquareMatrix::from_rows(vec![
            vec![int(1), int(-1), int(0)],
            vec![int(-1), int(1), int(0)],
            vec![int(0), int(0), int(0)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
        assert!(m.determinant().is_zero());
        assert_eq!(SquareMatrix::zeros(3).rank(), 0);
        let z = FieldElem::zeta();
        let d = SquareMatrix::diagonal(vec![int(1), z.clone(), &z * &z]);
        assert_eq!(d.rank(), 3);
        assert!(d.determinant().is_one());
    }

    #[test]
    fn inverse_over_k() {
        let tau = Tau::exact();
        let a = FieldElem::a(&tau);
        let m = SquareMatrix::from_rows(vec![
            vec![a.clone(), int(1), FieldElem::zeta()],
            vec![int(0), int(2), a.clone()],
            vec![FieldElem::from_rational(rat(1, 3)), int(0), int(1)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, SquareMatrix::identity(3));
        assert!(matches!(SquareMatrix::unit(3, 0, 0).inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn size_checks() {
        assert!(SquareMatrix::new(2, vec![int(1); 3]).is_err());
        assert!(SquareMatrix::identity(2).checked_mul(&SquareMatrix::identity(3)).is_err());
    }
}
