//! Dense linear algebra over a local field at tracked precision.
//!
//! Matrices are row-major `Vec<Vec<FieldElement>>`. Elimination pivots on the
//! entry of smallest valuation in the current column, which keeps the
//! precision lost to divisions as small as possible.

use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};

pub type Matrix = Vec<Vec<FieldElement>>;

/// Reduced row echelon form `R = U · A` together with the transformation.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub transform: Matrix,
    /// `(row, column)` of each pivot, in order.
    pub pivots: Vec<(usize, usize)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.iter().map(|(_, c)| *c).collect()
    }
}

pub fn identity(k: &LocalField, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect())
        .collect()
}

pub fn zeros(k: &LocalField, m: usize, n: usize) -> Matrix {
    vec![vec![k.zero(); n]; m]
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix, k: &LocalField) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = k.zero();
                    for t in 0..inner {
                        acc = &acc + &(&row[t] * &b[t][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, x: &[FieldElement], k: &LocalField) -> Vec<FieldElement> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(k.zero(), |acc, (r, v)| &acc + &(r * v))
        })
        .collect()
}

/// Gauss–Jordan elimination with minimal-valuation pivoting.
pub fn echelon(a: &Matrix, k: &LocalField) -> Result<Echelon> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut r = a.clone();
    let mut u = identity(k, m);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let best = (row..m)
            .filter_map(|i| r[i][col].val_pi().map(|v| (v, i)))
            .min();
        let Some((_, piv)) = best else { continue };
        r.swap(row, piv);
        u.swap(row, piv);
        let pv = r[row][col].clone();
        for j in 0..n {
            r[row][j] = r[row][j].div(&pv)?;
        }
        for j in 0..m {
            u[row][j] = u[row][j].div(&pv)?;
        }
        for i in 0..m {
            if i == row || r[i][col].is_zero() {
                continue;
            }
            let factor = r[i][col].clone();
            for j in 0..n {
                let t = &factor * &r[row][j];
                r[i][j] = &r[i][j] - &t;
            }
            for j in 0..m {
                let t = &factor * &u[row][j];
                u[i][j] = &u[i][j] - &t;
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    Ok(Echelon { reduced: r, transform: u, pivots })
}

pub fn rank(a: &Matrix, k: &LocalField) -> Result<usize> {
    Ok(echelon(a, k)?.rank())
}

/// Basis of `{x : A x = 0}`, one vector per free column.
pub fn kernel(a: &Matrix, k: &LocalField, ncols: usize) -> Result<Vec<Vec<FieldElement>>> {
    if a.is_empty() {
        return Ok(identity(k, ncols));
    }
    let ech = echelon(a, k)?;
    let pivot_cols = ech.pivot_columns();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![k.zero(); ncols];
        v[free] = k.one();
        for (row, col) in &ech.pivots {
            v[*col] = -&ech.reduced[*row][free];
        }
        out.push(v);
    }
    Ok(out)
}

/// Requires the columns of `a` to be independent.
pub fn require_full_column_rank(a: &Matrix, k: &LocalField, what: &str) -> Result<Echelon> {
    let ech = echelon(a, k)?;
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    if ech.rank() < cols {
        return Err(Error::RankDeficiency(format!("{what}: rank {} < {cols}", ech.rank())));
    }
    Ok(ech)
}
