//! Dense vectors and matrices over ℚ(x₁,…,xₙ) with exact elimination.

use std::fmt;

use cnalg_field::RatFunc;

/// Column vector of rational functions. Vector fields, 1-forms and
/// sections in a fixed frame all use this representation.
pub type Vector = Vec<RatFunc>;

pub fn zeros(n: usize) -> Vector {
    vec![RatFunc::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = RatFunc::one();
    v
}

pub fn vadd(a: &[RatFunc], b: &[RatFunc]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vsub(a: &[RatFunc], b: &[RatFunc]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vneg(a: &[RatFunc]) -> Vector {
    a.iter().map(RatFunc::neg).collect()
}

pub fn vscale(f: &RatFunc, a: &[RatFunc]) -> Vector {
    if f.is_zero() {
        return zeros(a.len());
    }
    a.iter().map(|x| f.mul(x)).collect()
}

pub fn vdot(a: &[RatFunc], b: &[RatFunc]) -> RatFunc {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(RatFunc::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

pub fn is_zero_vec(a: &[RatFunc]) -> bool {
    a.iter().all(RatFunc::is_zero)
}

/// Componentwise partial derivative.
pub fn vpartial(a: &[RatFunc], i: usize) -> Vector {
    a.iter().map(|x| x.partial(i)).collect()
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<RatFunc>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![RatFunc::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, RatFunc::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RatFunc) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_cols(rows: usize, cols: &[Vector]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
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

    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFunc::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(RatFunc::neg).collect(),
        }
    }

    pub fn scale(&self, f: &RatFunc) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a)).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = RatFunc::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        })
    }

    pub fn apply(&self, v: &[RatFunc]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| vdot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    /// Entrywise ∂/∂x_i.
    pub fn partial(&self, i: usize) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.partial(i)).collect(),
        }
    }

    /// `[[a, b], [c, d]]` assembled from four blocks.
    pub fn block(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        assert!(a.rows == b.rows && c.rows == d.rows && a.cols == c.cols && b.cols == d.cols);
        Matrix::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| {
            match (i < a.rows, j < a.cols) {
                (true, true) => a.get(i, j).clone(),
                (true, false) => b.get(i, j - a.cols).clone(),
                (false, true) => c.get(i - a.rows, j).clone(),
                (false, false) => d.get(i - a.rows, j - a.cols).clone(),
            }
        })
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows.start + i, cols.start + j).clone()
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..=i).all(|j| *self.get(i, j) == self.get(j, i).neg()))
    }

    fn check_same_shape(&self, other: &Matrix) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "matrix shape mismatch"
        );
    }

    pub fn det(&self) -> RatFunc {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = RatFunc::one();
        for c in 0..n {
            let Some(p) = pick_pivot(&m, c, c..n) else {
                return RatFunc::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            let pivot = m.get(c, c).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().expect("nonzero pivot");
            for r in c + 1..n {
                let f = m.get(r, c).mul(&inv);
                if !f.is_zero() {
                    m.row_axpy(r, c, &f.neg(), c);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = Matrix::block(
            self,
            &Matrix::identity(n),
            &Matrix::zeros(0, n),
            &Matrix::zeros(0, n),
        );
        let (pivots, _) = m.reduce();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(m.submatrix(0..n, n..2 * n))
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.reduce().0.len()
    }

    /// Basis of the right kernel {v : M v = 0}.
    pub fn nullspace(&self) -> Vec<Vector> {
        let mut m = self.clone();
        let (pivots, _) = m.reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = zeros(self.cols);
                v[f] = RatFunc::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(row, f).neg();
                }
                v
            })
            .collect()
    }

    /// Solves `self * x = b`, returning `None` when `b` is not in the column span.
    /// With dependent columns an arbitrary solution is returned.
    pub fn solve(&self, b: &[RatFunc]) -> Option<Vector> {
        assert_eq!(self.rows, b.len(), "right-hand side length mismatch");
        let mut aug = Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (pivots, _) = aug.reduce();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zeros(self.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(row, self.cols).clone();
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[target] += f * row[source], columns from `from` on.
    fn row_axpy(&mut self, target: usize, source: usize, f: &RatFunc, from: usize) {
        for j in from..self.cols {
            let s = self.get(source, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(target, j).add(&f.mul(s));
            self.set(target, j, v);
        }
    }

    /// In-place reduced row echelon form; returns pivot columns and the
    /// number of row swaps.
    fn reduce(&mut self) -> (Vec<usize>, usize) {
        let mut pivots = Vec::new();
        let mut swaps = 0;
        let mut row = 0;
        for c in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = pick_pivot(self, c, row..self.rows) else {
                continue;
            };
            if p != row {
                self.swap_rows(p, row);
                swaps += 1;
            }
            let inv = self.get(row, c).inv().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self.get(row, j).mul(&inv);
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, c).clone();
                if !f.is_zero() {
                    self.row_axpy(r, row, &f.neg(), c);
                }
            }
            pivots.push(c);
            row += 1;
        }
        (pivots, swaps)
    }
}

/// Prefers constant pivots, then the ones with the fewest terms.
fn pick_pivot(m: &Matrix, c: usize, rows: std::ops::Range<usize>) -> Option<usize> {
    rows.filter(|&r| !m.get(r, c).is_zero()).min_by_key(|&r| {
        let e = m.get(r, c);
        (!e.is_constant(), e.num().len() + e.den().len())
    })
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}
