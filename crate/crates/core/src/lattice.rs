//! Exact integer lattice routines: row echelon bases, left kernels and Bareiss determinants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type Row = Vec<BigInt>;

/// An echelon basis of the Z-span of `rows` (zero rows dropped).
pub fn echelon_basis(rows: Vec<Row>) -> Vec<Row> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut rows: Vec<Row> = rows
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut basis = Vec::new();
    for col in 0..width {
        loop {
            let pivot = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by(|(_, a), (_, b)| a[col].abs().cmp(&b[col].abs()))
                .map(|(i, _)| i);
            let Some(p) = pivot else { break };
            let pivot_row = rows.swap_remove(p);
            let mut others_nonzero = false;
            for r in rows.iter_mut() {
                if r[col].is_zero() {
                    continue;
                }
                let q = r[col].div_floor(&pivot_row[col]);
                for (x, y) in r.iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                others_nonzero |= !r[col].is_zero();
            }
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
            if others_nonzero {
                rows.push(pivot_row);
            } else {
                basis.push(pivot_row);
                break;
            }
        }
    }
    basis
}

/// A Z-basis of { c : c·A = 0 } for the rows of A.
pub fn left_kernel(a: &[Row]) -> Vec<Row> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let k = a[0].len();
    let augmented: Vec<Row> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| BigInt::from((i == j) as i64)));
            row
        })
        .collect();
    echelon_basis(augmented)
        .into_iter()
        .filter(|r| r[..k].iter().all(Zero::is_zero))
        .map(|r| r[k..].to_vec())
        .collect()
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_determinant(m: &[Row]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Row> = m.to_vec();
    let mut sign = 1i64;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}
