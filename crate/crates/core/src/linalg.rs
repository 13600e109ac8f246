//! Exact dense linear algebra by fraction-free (Bareiss) elimination.
//!
//! Rational rows are first cleared of denominators, so elimination runs on
//! integers and every intermediate entry is a minor of the input matrix.
//! Pivots are taken column by column, left to right, from the first row
//! with a nonzero entry; callers order their columns to fix the pivoting.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{common_denominator, Rational};

/// Integer row-echelon form produced by [`echelon`].
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub cols: usize,
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| {
            let l = common_denominator(r.iter());
            r.iter()
                .map(|q| q.numer() * (&l / q.denom()))
                .collect()
        })
        .collect()
}

/// Fraction-free forward elimination of a `rows x cols` rational matrix.
pub fn echelon(rows: &[Vec<Rational>], cols: usize) -> Echelon {
    let mut a = integer_rows(rows);
    for r in &a {
        assert_eq!(r.len(), cols, "ragged matrix");
    }
    let m = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        // Rows above r are untouched; columns before c in rows below are zero.
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon {
        rows: a,
        cols,
        pivots,
    }
}

pub fn rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    echelon(rows, cols).rank()
}

/// Back substitution on an echelon form with prescribed free values and right-hand side.
fn back_substitute(e: &Echelon, rhs: &[Rational], free: &[Rational]) -> Vec<Rational> {
    let mut x = free.to_vec();
    for (idx, (row, &pc)) in e.rows.iter().zip(&e.pivots).enumerate().rev() {
        let mut acc = rhs[idx].clone();
        for j in pc + 1..e.cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[pc] = acc / Rational::from_integer(row[pc].clone());
    }
    x
}

/// Basis of the right null space, one vector per free column (that entry 1,
/// other free entries 0), in increasing free-column order.
pub fn nullspace(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    nullspace_with_free_columns(rows, cols).1
}

/// Like [`nullspace`], also returning the free column of each vector.
pub fn nullspace_with_free_columns(
    rows: &[Vec<Rational>],
    cols: usize,
) -> (Vec<usize>, Vec<Vec<Rational>>) {
    let e = echelon(rows, cols);
    let zero_rhs = vec![Rational::zero(); e.rank()];
    let free: Vec<usize> = (0..cols).filter(|c| !e.pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&fc| {
            let mut x = vec![Rational::zero(); cols];
            x[fc] = Rational::one();
            back_substitute(&e, &zero_rhs, &x)
        })
        .collect();
    (free, basis)
}

/// Solves `A x = b`. Free variables are set to zero; `None` if inconsistent.
pub fn solve(rows: &[Vec<Rational>], b: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    assert_eq!(rows.len(), b.len(), "right-hand side length");
    let aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let e = echelon(&aug, cols + 1);
    if e.pivots.last() == Some(&cols) {
        return None;
    }
    let rhs: Vec<Rational> = e
        .rows
        .iter()
        .map(|r| Rational::from_integer(r[cols].clone()))
        .collect();
    let core = Echelon {
        rows: e.rows,
        cols,
        pivots: e.pivots,
    };
    Some(back_substitute(&core, &rhs, &vec![Rational::zero(); cols]))
}
