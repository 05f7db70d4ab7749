//! Partial zeta values ζ_f(a, -n) at non-positive integers.
//!
//! Ray classes for the base field Q are taken modulo f·∞, so classes are the units of Z/fZ
//! and Q(μ_f) is the ray class field. For K = Q the value comes from the Hurwitz zeta
//! function: ζ_f(a, -n) = -f^n B_{n+1}(a/f) / (n+1).

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{self, gcd, reduce, serialize_rational};
use crate::bernoulli::bernoulli_poly;
use crate::error::{Error, Result};

/// A source of exact partial zeta values at s = -n.
pub trait PartialZetaProvider: Sync {
    /// ζ_f(a, -n) for a unit `a` modulo `f`.
    fn value(&self, a: u64, f: u64, n: u32) -> Result<BigRational>;
}

/// The K = Q provider.
#[derive(Debug, Clone, Copy, Default)]
pub struct RationalPartialZeta;

impl PartialZetaProvider for RationalPartialZeta {
    fn value(&self, a: u64, f: u64, n: u32) -> Result<BigRational> {
        partial_zeta_q(a, f, n)
    }
}

pub fn partial_zeta_q(a: u64, f: u64, n: u32) -> Result<BigRational> {
    if f == 0 {
        return Err(Error::ZeroConductor);
    }
    if f > 1 && gcd(a % f, f) != 1 {
        return Err(Error::NotAUnit(a, f));
    }
    let a = reduce(a, f);
    let x = BigRational::new(BigInt::from(a), BigInt::from(f));
    let fn_ = BigRational::from_integer(arith::big_pow(f, n));
    Ok(-fn_ * bernoulli_poly(n as usize + 1, &x) / BigRational::from_integer(BigInt::from(n + 1)))
}

/// Both sides of ζ_f(a,s) - Nl^{-s} ζ_f(l^{-1}a, s) = Σ_{a' ≡ a (f)} ζ_{lf}(a', s) at s = -n.
#[derive(Debug, Clone, Serialize)]
pub struct EulerSplitReport {
    pub a: u64,
    pub f: u64,
    pub l: u64,
    pub n: u32,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: BigRational,
    pub lifts: Vec<u64>,
    pub holds: bool,
}

pub fn euler_factor_split_check(
    provider: &dyn PartialZetaProvider,
    a: u64,
    f: u64,
    l: u64,
    n: u32,
) -> Result<EulerSplitReport> {
    if !arith::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    if f.is_multiple_of(l) {
        return Err(Error::NotCoprime {
            what: "prime l",
            value: l,
            modulus: f,
        });
    }
    let l_inv = arith::mod_inverse(l, f).expect("l is prime to f");
    let l_inv_a = reduce((l_inv as u128 * a as u128 % f as u128) as u64, f);
    let ln = BigRational::from_integer(arith::big_pow(l, n));
    let lhs = provider.value(a, f, n)? - ln * provider.value(l_inv_a, f, n)?;
    let lf = l * f;
    let lifts: Vec<u64> = arith::units(lf)
        .into_iter()
        .filter(|&x| reduce(x, f) == reduce(a, f))
        .collect();
    let mut rhs = BigRational::from_integer(BigInt::from(0));
    for &x in &lifts {
        rhs += provider.value(x, lf, n)?;
    }
    Ok(EulerSplitReport {
        a,
        f,
        l,
        n,
        holds: lhs == rhs,
        lhs,
        rhs,
        lifts,
    })
}
