use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};

use super::rat::{rat_int, Rat};

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix from its columns (each of length `rows`).
    pub fn from_cols(rows: usize, cols: Vec<Vec<Rat>>) -> Self {
        let c = cols.len();
        let mut m = Mat::zero(rows, c);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
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

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![Rat::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = Rat::zero();
            for j in 0..self.cols {
                let a = self.get(i, j);
                if !a.is_zero() && !v[j].is_zero() {
                    acc += a * &v[j];
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    /// Kronecker product matching row-major tensor bases: the entry at
    /// `((ia, ib), (ja, jb))` is `a[ia, ja] * b[ib, jb]`.
    pub fn kron(&self, b: &Mat) -> Mat {
        let mut out = Mat::zero(self.rows * b.rows, self.cols * b.cols);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.get(ia, ja);
                if a.is_zero() {
                    continue;
                }
                for ib in 0..b.rows {
                    for jb in 0..b.cols {
                        let v = b.get(ib, jb);
                        if !v.is_zero() {
                            out.set(ia * b.rows + ib, ja * b.cols + jb, a * v);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack col mismatch");
        Mat::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut out = Mat::zero(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// In-place reduced row echelon form. Pivot columns are chosen in
    /// ascending order (the first nonzero column of each successive row
    /// block), pivots are normalized to 1 and cleared above and below.
    /// Returns the pivot column indices in ascending order.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = {
                let piv = self.get(r, c).clone();
                Rat::one() / piv
            };
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let factor = self.get(i, c).clone();
                    for j in c..self.cols {
                        let v = self.get(i, j) - &factor * self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Reduced column echelon form: the unique canonical basis of the column
    /// space, with pivot rows ascending left to right. Zero columns are
    /// dropped.
    pub fn rcef(&self) -> Mat {
        let (r, pivots) = self.transpose().rref();
        let k = pivots.len();
        Mat::from_fn(self.rows, k, |i, j| r.get(j, i).clone())
    }

    /// Kernel basis in reduced column echelon form.
    pub fn kernel(&self) -> Mat {
        let (r, pivots) = self.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = Some(row);
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|c| pivot_of_col[*c].is_none()).collect();
        let mut cols = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, fc).clone();
            }
            cols.push(v);
        }
        // The free-column construction is already independent; normalize to
        // the canonical echelon basis so kernels compare by equality.
        Mat::from_cols(self.cols, cols).rcef()
    }

    /// Solves `self * x = b`, returning the unique solution whose free
    /// coordinates are zero, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let mut aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Solves `self * X = rhs` for all columns of `rhs` with one elimination,
    /// returning the solution whose free coordinates are zero, or `None` when
    /// any column is inconsistent.
    pub fn solve_many(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(rhs.rows, self.rows, "rhs row count mismatch");
        let mut aug = Mat::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zero(self.cols, rhs.cols);
        for (row, &c) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(c, j, aug.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        (0..self.rows).flat_map(move |i| {
            (0..self.cols).filter_map(move |j| {
                let v = self.get(i, j);
                (!v.is_zero()).then_some((i, j, v))
            })
        })
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, other: &Mat) -> Mat {
        self.matmul(other)
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn scale_vec(v: &[Rat], c: &Rat) -> Vec<Rat> {
    v.iter().map(|x| x * c).collect()
}

pub fn add_vecs(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn zero_vec(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rat> {
    let mut v = zero_vec(n);
    v[i] = Rat::one();
    v
}

pub fn rat_vec(ints: &[i64]) -> Vec<Rat> {
    ints.iter().map(|&n| rat_int(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat::rat;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| rat_vec(r)).collect())
    }

    #[test]
    fn rref_pivots_ascending() {
        let a = m(&[&[0, 2, 4], &[1, 1, 1], &[1, 3, 5]]);
        let (r, pivots) = a.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(r.get(0, 0), &rat(1, 1));
        assert_eq!(r.get(0, 1), &rat(0, 1));
        assert_eq!(r.row(2), rat_vec(&[0, 0, 0]));
    }

    #[test]
    fn kernel_is_exact() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.cols(), 2);
        for j in 0..k.cols() {
            assert!(a.apply(&k.col(j)).iter().all(Rat::is_zero));
        }
    }

    #[test]
    fn rcef_is_canonical() {
        let a = m(&[&[1, 3], &[2, 6], &[0, 1]]);
        let b = m(&[&[3, 1], &[6, 2], &[1, 0]]);
        assert_eq!(a.rcef(), b.rcef());
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let x = a.solve(&rat_vec(&[3, 2])).unwrap();
        assert_eq!(x, rat_vec(&[1, 1]));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Mat::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn kron_matches_tensor_indexing() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        // entry ((ia,ib),(ja,jb)) = a[ia,ja] b[ib,jb]
        assert_eq!(k.get(0 * 2 + 1, 1 * 2 + 0), &rat(2, 1));
        assert_eq!(k.get(1 * 2 + 0, 0 * 2 + 1), &rat(3, 1));
    }
}
