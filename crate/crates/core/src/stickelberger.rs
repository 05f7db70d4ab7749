//! Higher Stickelberger elements Θ_n(b, f) and the identities they satisfy.
//!
//! Θ_n(b, f) = (b^{n+1} - σ_b) Σ_a ζ_f(a, -n) σ_a^{-1} = Σ_a Δ_{n+1}(a, b, f) σ_a^{-1},
//! with a running over (Z/fZ)^×. Elements for a proper subfield are always computed in
//! Q[G(Q(μ_f)/Q)] and then restricted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, gcd, rat_int, rat_pow, serialize_rational, v_p_rational, Valuation};
use crate::characters::{enumerate_characters, l_value, DirichletCharacter};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::group_ring::{AbelianFieldSpec, GroupRingElement};
use crate::tower::w_invariant;
use crate::zeta::{PartialZetaProvider, RationalPartialZeta};

fn require_coprime(what: &'static str, value: u64, modulus: u64) -> Result<()> {
    if gcd(value, modulus) != 1 {
        Err(Error::NotCoprime {
            what,
            value,
            modulus,
        })
    } else {
        Ok(())
    }
}

/// Δ_{n+1}(a, b, f) = b^{n+1} ζ_f(a, -n) - ζ_f(ab, -n).
pub fn delta_with(
    provider: &dyn PartialZetaProvider,
    n_plus_1: u32,
    a: u64,
    b: u64,
    f: u64,
) -> Result<BigRational> {
    if n_plus_1 == 0 {
        return Err(Error::InvalidArgument("Δ index must be at least 1".into()));
    }
    require_coprime("a", a, f)?;
    require_coprime("b", b, f)?;
    let n = n_plus_1 - 1;
    let ab = arith::reduce((a as u128 * b as u128 % f as u128) as u64, f);
    let bn = rat_int(arith::big_pow(b, n_plus_1));
    Ok(bn * provider.value(a, f, n)? - provider.value(ab, f, n)?)
}

pub fn delta(n_plus_1: u32, a: u64, b: u64, f: u64) -> Result<BigRational> {
    delta_with(&RationalPartialZeta, n_plus_1, a, b, f)
}

/// Θ_n(b, f) for a specific field, together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StickelbergerElement {
    pub n: u32,
    pub b: u64,
    #[serde(skip)]
    pub field: AbelianFieldSpec,
    pub value: GroupRingElement,
}

impl StickelbergerElement {
    pub fn conductor(&self) -> u64 {
        self.field.conductor()
    }
}

/// b^{n+1} - σ_b in Q[G].
pub fn twist_factor(field: &AbelianFieldSpec, n: u32, b: u64) -> Result<GroupRingElement> {
    let c = GroupRingElement::from_scalar(field, rat_int(arith::big_pow(b, n + 1)));
    c.sub(&GroupRingElement::sigma(field, b)?)
}

/// 1 - p^n σ_p^{-1}, the Euler factor attached to a prime p not dividing the conductor.
pub fn euler_factor(field: &AbelianFieldSpec, p: u64, n: u32) -> Result<GroupRingElement> {
    let sigma_inv = field.element(p)?.inverse().representative();
    let term = GroupRingElement::sigma(field, sigma_inv)?.scale(&rat_int(arith::big_pow(p, n)));
    GroupRingElement::one(field).sub(&term)
}

/// Σ_a ζ_f(a, -n) σ_a^{-1} over the full group (Z/fZ)^×.
fn zeta_sum(
    provider: &dyn PartialZetaProvider,
    full: &AbelianFieldSpec,
    n: u32,
) -> Result<GroupRingElement> {
    let f = full.conductor();
    let mut terms = Vec::new();
    for &a in full.elements() {
        let inv = full.element(a)?.inverse().representative();
        terms.push((inv, provider.value(a, f, n)?));
    }
    GroupRingElement::from_terms(full, terms)
}

pub fn theta_with(
    provider: &dyn PartialZetaProvider,
    n: u32,
    b: u64,
    field: &AbelianFieldSpec,
) -> Result<StickelbergerElement> {
    let f = field.conductor();
    if b == 0 {
        return Err(Error::InvalidArgument("b must be positive".into()));
    }
    require_coprime("b", b, f)?;
    let full = AbelianFieldSpec::cyclotomic(f)?;

    let mut terms = Vec::new();
    for &a in full.elements() {
        let inv = full.element(a)?.inverse().representative();
        terms.push((inv, delta_with(provider, n + 1, a, b, f)?));
    }
    let via_delta = GroupRingElement::from_terms(&full, terms)?;
    let via_product = twist_factor(&full, n, b)?.mul(&zeta_sum(provider, &full, n)?)?;
    if via_delta != via_product {
        return Err(Error::RouteMismatch { f, n, b });
    }

    Ok(StickelbergerElement {
        n,
        b,
        field: field.clone(),
        value: via_delta.restrict(field)?,
    })
}

pub fn theta(n: u32, b: u64, field: &AbelianFieldSpec) -> Result<StickelbergerElement> {
    theta_with(&RationalPartialZeta, n, b, field)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    pub integral: bool,
    pub offending_primes: Vec<u64>,
}

pub fn integrality_check(theta: &StickelbergerElement) -> IntegralityReport {
    let offending_primes = theta.value.denominator_primes();
    IntegralityReport {
        integral: offending_primes.is_empty(),
        offending_primes,
    }
}

/// How a prime dividing the modulus takes part in a congruence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeRole {
    /// Odd l with l ∤ b and l | f: the congruence is asserted.
    Enforced,
    /// Odd l ∤ b with l ∤ f: no Euler factor at l is removed, reported only.
    PrimeToConductor,
    /// l = 2, reported only.
    TwoAdic,
    /// l | b, outside the statement.
    DividesB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeRecord {
    pub l: u64,
    pub role: PrimeRole,
    pub required: i64,
    pub actual: Valuation,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub n: u32,
    pub m: u32,
    pub a: u64,
    pub b: u64,
    pub f: u64,
    /// w_k(Q(μ_f)) with k = n when comparing against Δ_1 and k = min(m, n) otherwise.
    pub modulus: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub difference: BigRational,
    pub primes: Vec<PrimeRecord>,
    /// Every enforced prime holds.
    pub passed: bool,
}

impl CongruenceReport {
    /// Whether every odd l ∤ b holds, regardless of l | f.
    pub fn odd_part_holds(&self) -> bool {
        self.primes
            .iter()
            .filter(|r| matches!(r.role, PrimeRole::Enforced | PrimeRole::PrimeToConductor))
            .all(|r| r.holds)
    }

    pub fn two_adic(&self) -> Option<&PrimeRecord> {
        self.primes.iter().find(|r| r.role == PrimeRole::TwoAdic)
    }
}

fn congruence_report(
    n: u32,
    m: u32,
    a: u64,
    b: u64,
    f: u64,
    difference: BigRational,
    modulus: u64,
) -> CongruenceReport {
    let primes: Vec<PrimeRecord> = arith::factorize(modulus)
        .into_iter()
        .map(|(l, e)| {
            let role = if l == 2 {
                PrimeRole::TwoAdic
            } else if b.is_multiple_of(l) {
                PrimeRole::DividesB
            } else if f.is_multiple_of(l) {
                PrimeRole::Enforced
            } else {
                PrimeRole::PrimeToConductor
            };
            let actual = v_p_rational(&difference, l);
            PrimeRecord {
                l,
                role,
                required: e as i64,
                actual,
                holds: actual.at_least(e as i64),
            }
        })
        .collect();
    let passed = primes
        .iter()
        .filter(|r| r.role == PrimeRole::Enforced)
        .all(|r| r.holds);
    CongruenceReport {
        n,
        m,
        a,
        b,
        f,
        modulus,
        difference,
        primes,
        passed,
    }
}

/// Δ_{n+1}(a,b,f) ≡ (ab)^n Δ_1(a,b,f) mod w_n(Q(μ_f)), checked prime by prime.
pub fn congruence_check(n: u32, a: u64, b: u64, f: u64) -> Result<CongruenceReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let lhs = delta(n + 1, a, b, f)?;
    let rhs = rat_int(arith::big_pow(a * b, n)) * delta(1, a, b, f)?;
    let w = w_invariant(n, &AbelianFieldSpec::cyclotomic(f)?)?;
    Ok(congruence_report(n, 0, a, b, f, lhs - rhs, w))
}

/// Δ_{n+1}(a,b,f) ≡ (ab)^{n-m} Δ_{m+1}(a,b,f) mod w_{min(m,n)}(Q(μ_f)).
pub fn congruence_check_between(
    n: u32,
    m: u32,
    a: u64,
    b: u64,
    f: u64,
) -> Result<CongruenceReport> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("n and m must be at least 1".into()));
    }
    let ab = rat_int(BigInt::from(a) * BigInt::from(b));
    let lhs = delta(n + 1, a, b, f)?;
    let rhs = rat_pow(&ab, n as i64 - m as i64) * delta(m + 1, a, b, f)?;
    let w = w_invariant(n.min(m), &AbelianFieldSpec::cyclotomic(f)?)?;
    Ok(congruence_report(n, m, a, b, f, lhs - rhs, w))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    pub n: u32,
    pub b: u64,
    pub f: u64,
    pub f_prime: u64,
    pub euler_primes: Vec<u64>,
    pub lhs: GroupRingElement,
    pub rhs: GroupRingElement,
    pub holds: bool,
}

/// Res Θ_n(b, f') = ∏_{l | f', l ∤ f} (1 - σ_l^{-1} l^n) · Θ_n(b, f) in Q[G(F/Q)].
pub fn restriction_identity_check(
    n: u32,
    b: u64,
    f_prime: u64,
    field: &AbelianFieldSpec,
) -> Result<RestrictionReport> {
    let f = field.conductor();
    if !f_prime.is_multiple_of(f) {
        return Err(Error::DivisibilityViolation(f, f_prime));
    }
    require_coprime("b", b, f_prime)?;
    let top = AbelianFieldSpec::cyclotomic(f_prime)?;
    let lhs = theta(n, b, &top)?.value.restrict(field)?;
    let euler_primes: Vec<u64> = arith::prime_divisors(f_prime)
        .into_iter()
        .filter(|p| !f.is_multiple_of(*p))
        .collect();
    let mut rhs = theta(n, b, field)?.value;
    for &p in &euler_primes {
        rhs = euler_factor(field, p, n)?.mul(&rhs)?;
    }
    Ok(RestrictionReport {
        n,
        b,
        f,
        f_prime,
        euler_primes,
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// The ring map σ_a ↦ χ(a) applied to Θ.
pub fn character_eval(
    theta: &StickelbergerElement,
    chi: &DirichletCharacter,
) -> Result<CyclotomicNumber> {
    eval_character(&theta.value, chi)
}

pub fn eval_character(x: &GroupRingElement, chi: &DirichletCharacter) -> Result<CyclotomicNumber> {
    if !chi.factors_through(x.field()) {
        return Err(Error::CharacterFieldMismatch);
    }
    let terms = x.coefficients().iter().map(|(&a, c)| {
        (
            chi.exponent(a).expect("coset representatives are units"),
            c.clone(),
        )
    });
    Ok(CyclotomicNumber::from_exponents(chi.order(), terms))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterIdentityReport {
    pub label: String,
    pub direct: CyclotomicNumber,
    pub oracle: CyclotomicNumber,
    pub holds: bool,
}

/// χ(Θ_n(b,f)) against (b^{n+1} - χ(b)) · L_{S(f)}(-n, χ^{-1}).
pub fn character_identity_check(
    theta: &StickelbergerElement,
    chi: &DirichletCharacter,
) -> Result<CharacterIdentityReport> {
    let direct = character_eval(theta, chi)?;
    let f = theta.conductor();
    let bn =
        CyclotomicNumber::from_rational(chi.order(), rat_int(arith::big_pow(theta.b, theta.n + 1)));
    let twist = &bn - &chi.value(theta.b);
    let l = l_value(
        theta.n,
        &chi.inverse().primitive(),
        &arith::prime_divisors(f),
    )?;
    let oracle = &twist * &l;
    Ok(CharacterIdentityReport {
        label: chi.label(),
        holds: direct == oracle,
        direct,
        oracle,
    })
}

/// (1/|G|) Σ_χ χ(x) Σ_a χ^{-1}(a) σ_a, which reproduces x.
pub fn fourier_reconstruct(x: &GroupRingElement) -> Result<GroupRingElement> {
    let field = x.field();
    let chars = enumerate_characters(field);
    let values: Vec<CyclotomicNumber> = chars
        .iter()
        .map(|chi| eval_character(x, chi))
        .collect::<Result<_>>()?;
    let order = BigRational::from_integer(BigInt::from(field.degree()));
    let mut terms = Vec::new();
    for &a in field.elements() {
        let mut acc = CyclotomicNumber::zero(1);
        for (chi, v) in chars.iter().zip(&values) {
            acc = &acc + &(v * &chi.inverse().value(a));
        }
        let c = acc.as_rational().ok_or_else(|| {
            Error::NonIntegralResult(format!("Fourier coefficient at σ_{a} is not rational"))
        })?;
        terms.push((a, c / &order));
    }
    GroupRingElement::from_terms(field, terms)
}

/// Θ_n(b)·(b'^{n+1} - σ_{b'}) = Θ_n(b')·(b^{n+1} - σ_b).
pub fn multiplicativity_check(n: u32, b: u64, b2: u64, field: &AbelianFieldSpec) -> Result<bool> {
    let left = theta(n, b, field)?
        .value
        .mul(&twist_factor(field, n, b2)?)?;
    let right = theta(n, b2, field)?
        .value
        .mul(&twist_factor(field, n, b)?)?;
    Ok(left == right)
}

/// l-adic valuation of N_{Q(χ)/Q} χ(Θ).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityReport {
    pub label: String,
    pub l: u64,
    pub value: CyclotomicNumber,
    #[serde(serialize_with = "serialize_rational")]
    pub norm: BigRational,
    pub valuation: Valuation,
}

pub fn annihilation_divisibility_check(
    theta: &StickelbergerElement,
    chi: &DirichletCharacter,
    l: u64,
) -> Result<DivisibilityReport> {
    if !arith::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    if l == 2 {
        return Err(Error::EvenPrime);
    }
    let value = character_eval(theta, chi)?;
    let norm = if value.is_zero() {
        BigRational::zero()
    } else {
        value.norm()
    };
    Ok(DivisibilityReport {
        label: chi.label(),
        l,
        valuation: v_p_rational(&norm, l),
        value,
        norm,
    })
}

/// Σ_a a/p σ_a^{-1} expressed through partial zeta values: (1/2)N - Σ_a ζ_p(a, 0) σ_a^{-1}.
pub fn classical_theta(p: u64) -> Result<GroupRingElement> {
    let field = AbelianFieldSpec::cyclotomic(p)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let norm =
        GroupRingElement::from_terms(&field, field.elements().iter().map(|&a| (a, half.clone())))?;
    norm.sub(&zeta_sum(&RationalPartialZeta, &field, 0)?)
}
