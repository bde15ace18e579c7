use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut m = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a * &o[(k, j)];
                    m[(i, j)] += t;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix/vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Determinant by fraction-free elimination. Panics if not square.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return Rational::one();
        }
        let (mut a, scale) = integer_rows(self, None);
        let (pivots, swaps) = bareiss(&mut a, self.cols);
        if pivots.len() < self.rows {
            return Rational::zero();
        }
        let last = a[self.rows - 1][self.cols - 1].clone();
        let det = Rational::new(last, scale);
        if swaps % 2 == 1 {
            -det
        } else {
            det
        }
    }

    pub fn rank(&self) -> usize {
        let (mut a, _) = integer_rows(self, None);
        bareiss(&mut a, self.cols).0.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            let s = solve_linear_exact(self, &e);
            if !s.kernel.is_empty() {
                return None;
            }
            cols.push(s.solution?);
        }
        Some(Matrix::from_rows(cols).transpose())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(crate::rational::format_rational).collect();
            writeln!(f, "[{}]", r.join(", "))?;
        }
        Ok(())
    }
}

/// Result of an exact linear solve. `solution` is `None` when the system is
/// inconsistent; the kernel basis is reported either way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub solution: Option<Vec<Rational>>,
    pub kernel: Vec<Vec<Rational>>,
    pub rank: usize,
}

impl LinearSolution {
    pub fn is_unique(&self) -> bool {
        self.solution.is_some() && self.kernel.is_empty()
    }
}

/// Clears denominators row by row. Returns integer rows and, for the
/// determinant, the product of the row multipliers.
fn integer_rows(m: &Matrix, rhs: Option<&[Rational]>) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut total = BigInt::one();
    let rows = (0..m.rows)
        .map(|i| {
            let mut r: Vec<&Rational> = m.row(i).iter().collect();
            if let Some(b) = rhs {
                r.push(&b[i]);
            }
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            total *= &l;
            r.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    (rows, total)
}

/// In-place fraction-free forward elimination on the first `ncols` columns.
/// Returns pivot columns (one per pivot row, in order) and the row swap count.
fn bareiss(a: &mut [Vec<BigInt>], ncols: usize) -> (Vec<usize>, usize) {
    let nrows = a.len();
    let width = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // Prefer the smallest nonzero pivot to limit growth.
        let Some(p) = (r..nrows).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, rest) = a.split_at_mut(r + 1);
        let pr = &top[r];
        let piv = pr[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            if f.is_zero() {
                for x in row.iter_mut().skip(c + 1) {
                    *x = &*x * &piv / &prev;
                }
            } else {
                for j in c + 1..width {
                    row[j] = (&piv * &row[j] - &f * &pr[j]) / &prev;
                }
                row[c] = BigInt::zero();
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    (pivots, swaps)
}

/// Solves `M·x = rhs` exactly. Returns one particular solution (free
/// variables set to zero) and a basis of the null space of `M`.
pub fn solve_linear_exact(m: &Matrix, rhs: &[Rational]) -> LinearSolution {
    assert_eq!(m.rows, rhs.len(), "right-hand side length mismatch");
    let n = m.cols;
    let (mut a, _) = integer_rows(m, Some(rhs));
    let (pivots, _) = bareiss(&mut a, n);
    let rank = pivots.len();
    let consistent = a.iter().skip(rank).all(|row| row[n].is_zero());

    // Back substitution to reduced row echelon form over the rationals.
    let mut e: Vec<Vec<Rational>> = a[..rank]
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let p = &row[pivots[i]];
            row.iter().map(|x| Rational::new(x.clone(), p.clone())).collect()
        })
        .collect();
    for i in (0..rank).rev() {
        let pc = pivots[i];
        for k in 0..i {
            let f = e[k][pc].clone();
            if f.is_zero() {
                continue;
            }
            for j in pc..=n {
                let t = &f * &e[i][j];
                e[k][j] -= t;
            }
        }
    }

    let is_pivot: Vec<bool> = (0..n).map(|c| pivots.contains(&c)).collect();
    let solution = consistent.then(|| {
        let mut x = vec![Rational::zero(); n];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = e[i][n].clone();
        }
        x
    });
    let kernel = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -e[i][free].clone();
            }
            v
        })
        .collect();
    LinearSolution { solution, kernel, rank }
}
