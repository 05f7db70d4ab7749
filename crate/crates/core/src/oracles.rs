//! Independent arithmetic oracles: analytic minus class numbers, Birch–Tate orders of K_2,
//! and the index of the Stickelberger ideal in the minus part of Z[G(Q(μ_p)/Q)].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{self, reduce, serialize_rational};
use crate::characters::{enumerate_characters, gen_bernoulli, l_value};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::group_ring::{AbelianFieldSpec, GroupRingElement};
use crate::lattice::{bareiss_determinant, echelon_basis, left_kernel, Row};
use crate::stickelberger::classical_theta;
use crate::tower::w_invariant;

/// Which criterion fixed the Hasse unit index Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum UnitIndexBranch {
    FullCyclotomicPrimePower,
    FullCyclotomicComposite,
    PrimePowerConductor,
    ImaginaryQuadratic,
    /// F/F⁺ ramifies at this odd prime, which rules out Q = 2.
    RamifiedAtOddPrime {
        p: u64,
    },
}

/// Whether F/F⁺ is ramified at the odd prime p | f: complex conjugation lies in I_p·H.
fn conjugation_in_inertia(field: &AbelianFieldSpec, p: u64) -> bool {
    let f = field.conductor();
    let prime_to_p = f / p.pow(arith::v_p_u64(f, p));
    arith::units(f)
        .into_iter()
        .filter(|&x| reduce(x, prime_to_p) == 1)
        .any(|x| field.in_subgroup(f - x))
}

pub fn unit_index(field: &AbelianFieldSpec) -> Result<(u32, UnitIndexBranch)> {
    if !field.is_cm() {
        return Err(Error::NotCM);
    }
    let f = field.conductor();
    if field.is_full_cyclotomic() {
        return Ok(if arith::is_prime_power(f) {
            (1, UnitIndexBranch::FullCyclotomicPrimePower)
        } else {
            (2, UnitIndexBranch::FullCyclotomicComposite)
        });
    }
    if arith::is_prime_power(f) {
        return Ok((1, UnitIndexBranch::PrimePowerConductor));
    }
    if field.degree() == 2 {
        return Ok((1, UnitIndexBranch::ImaginaryQuadratic));
    }
    arith::prime_divisors(f)
        .into_iter()
        .filter(|&p| p != 2)
        .find(|&p| conjugation_in_inertia(field, p))
        .map(|p| (1, UnitIndexBranch::RamifiedAtOddPrime { p }))
        .ok_or(Error::UnitIndexUndetermined(f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinusClassNumberReport {
    pub f: u64,
    #[serde(rename = "H")]
    pub subgroup: Vec<u64>,
    #[serde(serialize_with = "arith::serialize_bigint")]
    pub h_minus: BigInt,
    pub roots_of_unity: u64,
    pub unit_index: u32,
    pub unit_index_branch: UnitIndexBranch,
    pub odd_characters: usize,
}

/// h⁻ = Q·w·∏_{χ odd} (-B_{1,χ}/2).
pub fn minus_class_number(field: &AbelianFieldSpec) -> Result<MinusClassNumberReport> {
    let (q, branch) = unit_index(field)?;
    let w = w_invariant(1, field)?;
    let minus_half = -BigRational::new(BigInt::one(), BigInt::from(2));
    let odd: Vec<_> = enumerate_characters(field)
        .into_iter()
        .filter(|c| !c.is_even())
        .collect();
    let mut product = CyclotomicNumber::one(1);
    for chi in &odd {
        let b1 = gen_bernoulli(1, &chi.primitive())?;
        product = &product * &b1.scale(&minus_half);
    }
    let rational = product.as_rational().ok_or_else(|| {
        Error::NonIntegralResult("product over odd characters is not rational".into())
    })?;
    let h = rational * BigRational::from_integer(BigInt::from(q as u64 * w));
    if !h.is_integer() || !h.is_positive() {
        return Err(Error::NonIntegralResult(format!("h⁻ = {h}")));
    }
    Ok(MinusClassNumberReport {
        f: field.conductor(),
        subgroup: field.subgroup().to_vec(),
        h_minus: h.to_integer(),
        roots_of_unity: w,
        unit_index: q,
        unit_index_branch: branch,
        odd_characters: odd.len(),
    })
}

/// ζ_F(-1) = ∏_χ L(-1, χ) with the characters taken in the given order.
pub fn zeta_field_at_minus_one(field: &AbelianFieldSpec, reversed: bool) -> Result<BigRational> {
    let mut chars = enumerate_characters(field);
    if reversed {
        chars.reverse();
    }
    let mut product = CyclotomicNumber::one(1);
    for chi in &chars {
        product = &product * &l_value(1, &chi.primitive(), &[])?;
    }
    product
        .as_rational()
        .ok_or_else(|| Error::NonIntegralResult("ζ_F(-1) is not rational".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BirchTateReport {
    pub f: u64,
    #[serde(rename = "H")]
    pub subgroup: Vec<u64>,
    pub w2: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub zeta_minus_one: BigRational,
    #[serde(serialize_with = "arith::serialize_bigint")]
    pub order: BigInt,
}

/// w_2(F)·|ζ_F(-1)|, the predicted order of K_2(O_F).
pub fn birch_tate_order(field: &AbelianFieldSpec) -> Result<BirchTateReport> {
    if !field.is_totally_real() {
        return Err(Error::NotTotallyReal);
    }
    let zeta = zeta_field_at_minus_one(field, false)?;
    let w2 = w_invariant(2, field)?;
    let order = zeta.abs() * BigRational::from_integer(BigInt::from(w2));
    if !order.is_integer() || order.is_zero() {
        return Err(Error::NonIntegralResult(format!("w_2·|ζ_F(-1)| = {order}")));
    }
    Ok(BirchTateReport {
        f: field.conductor(),
        subgroup: field.subgroup().to_vec(),
        w2,
        zeta_minus_one: zeta,
        order: order.to_integer(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub p: u64,
    pub ideal_rank: usize,
    pub minus_rank: usize,
    #[serde(serialize_with = "arith::serialize_bigint")]
    pub index: BigInt,
}

fn as_row(x: &GroupRingElement, p: u64) -> Row {
    (1..p)
        .map(|a| {
            let c = x.coefficient(a);
            assert!(c.is_integer(), "Stickelberger ideal elements are integral");
            c.to_integer()
        })
        .collect()
}

/// [R⁻ : S⁻] for R = Z[G(Q(μ_p)/Q)] and S = Z[G]θ ∩ Z[G], θ = Σ (a/p) σ_a^{-1}.
///
/// S is spanned over Z by σ_a (c - σ_c) θ. S⁻ = S ∩ R⁻ is cut out by an integer kernel, and
/// the index is the determinant of S⁻ in the basis (1 - j)σ_a, a = 1, …, (p-1)/2.
pub fn stickelberger_index(p: u64) -> Result<IndexReport> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    let field = AbelianFieldSpec::cyclotomic(p)?;
    let theta = classical_theta(p)?;
    let mut generators = Vec::new();
    for c in (2..=p + 1).filter(|c| c % p != 0) {
        let twist = GroupRingElement::from_scalar(&field, arith::rat_int(c))
            .sub(&GroupRingElement::sigma(&field, c)?)?;
        let base = twist.mul(&theta)?;
        for a in 1..p {
            let shifted = GroupRingElement::sigma(&field, a)?.mul(&base)?;
            generators.push(as_row(&shifted, p));
        }
    }
    generators.sort();
    generators.dedup();
    let basis = echelon_basis(generators);

    let half = (p - 1) / 2;
    let plus_parts: Vec<Row> = basis
        .iter()
        .map(|r| {
            (1..=half)
                .map(|a| &r[(a - 1) as usize] + &r[(p - a - 1) as usize])
                .collect()
        })
        .collect();
    let kernel = left_kernel(&plus_parts);
    let minus: Vec<Row> = kernel
        .iter()
        .map(|c| {
            (1..=half)
                .map(|a| {
                    c.iter()
                        .zip(&basis)
                        .map(|(ci, r)| ci * &r[(a - 1) as usize])
                        .sum::<BigInt>()
                })
                .collect()
        })
        .collect();
    if minus.len() != half as usize {
        return Err(Error::NonIntegralResult(format!(
            "minus part has rank {} instead of {half}",
            minus.len()
        )));
    }
    Ok(IndexReport {
        p,
        ideal_rank: basis.len(),
        minus_rank: minus.len(),
        index: bareiss_determinant(&minus).abs(),
    })
}
