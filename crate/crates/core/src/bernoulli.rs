//! Bernoulli numbers (B_1 = -1/2) and Bernoulli polynomials, exact.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn memo() -> &'static RwLock<Vec<BigRational>> {
    static TABLE: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![BigRational::one()]))
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// B_n from Σ_{k=0}^{n} C(n+1, k) B_k = 0, memoized.
pub fn bernoulli_number(n: usize) -> BigRational {
    if let Some(b) = memo().read().expect("bernoulli memo poisoned").get(n) {
        return b.clone();
    }
    let mut table = memo().write().expect("bernoulli memo poisoned");
    while table.len() <= n {
        let m = table.len();
        let row = binomial_row(m + 1);
        let s = table
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (k, b)| {
                acc + b * BigRational::from_integer(row[k].clone())
            });
        table.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    table[n].clone()
}

/// B_n(x) = Σ_k C(n, k) B_k x^{n-k}.
pub fn bernoulli_poly(n: usize, x: &BigRational) -> BigRational {
    let row = binomial_row(n);
    // Horner in x over the coefficients C(n,k) B_k, highest power first.
    let mut acc = BigRational::zero();
    for (k, c) in row.iter().enumerate() {
        acc = acc * x + bernoulli_number(k) * BigRational::from_integer(c.clone());
    }
    acc
}
