//! The invariants w_n(L) and k(v), and Stickelberger elements along F(μ_{l^k}).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::arith::{self, gcd, lcm, reduce, v_p_bigint, v_p_u64, Valuation};
use crate::error::{Error, Result};
use crate::group_ring::AbelianFieldSpec;
use crate::stickelberger::{euler_factor, theta, StickelbergerElement};

fn require_odd_prime(l: u64) -> Result<()> {
    if !arith::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    if l == 2 {
        return Err(Error::EvenPrime);
    }
    Ok(())
}

/// Whether Gal(L(μ_{q})/L) has exponent dividing n, for a prime power q.
///
/// By CRT, this Galois group is the set of units y mod q that agree modulo gcd(f, q)
/// with some element of H.
fn exponent_divides(n: u32, field: &AbelianFieldSpec, q: u64) -> bool {
    let f = field.conductor();
    let g = gcd(f, q);
    let h_mod_g: BTreeSet<u64> = field.subgroup().iter().map(|&h| reduce(h, g)).collect();
    arith::units(q)
        .into_iter()
        .filter(|&y| h_mod_g.contains(&reduce(y, g)))
        .all(|y| arith::pow_mod(y, n as u64, q) == 1 % q)
}

/// The exponent a of the l-part l^a of w_n(L).
pub fn w_invariant_prime_part(n: u32, field: &AbelianFieldSpec, l: u64) -> u32 {
    // Gal(L(μ_{l^a})/L) has index at most [L:Q] in (Z/l^a)^×, whose n-torsion has
    // order at most 2n, so φ(l^a) ≤ 2n[L:Q] for every admissible a.
    let bound = 2 * n as u64 * field.degree() as u64;
    let mut a = 0;
    let mut q = l;
    while q / l * (l - 1) <= bound && exponent_divides(n, field, q) {
        a += 1;
        q *= l;
    }
    a
}

/// w_n(L): the largest m such that Gal(L(μ_m)/L) has exponent dividing n.
pub fn w_invariant(n: u32, field: &AbelianFieldSpec) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("w_n needs n ≥ 1".into()));
    }
    Ok(w_invariant_factors(n, field)
        .into_iter()
        .map(|(l, a)| l.pow(a))
        .product())
}

/// The prime factorization of w_n(L), each prime computed independently.
pub fn w_invariant_factors(n: u32, field: &AbelianFieldSpec) -> Vec<(u64, u32)> {
    let bound = 2 * n as u64 * field.degree() as u64;
    arith::primes_up_to(bound + 1)
        .into_iter()
        .map(|l| (l, w_invariant_prime_part(n, field, l)))
        .filter(|&(_, a)| a > 0)
        .collect()
}

/// k(v) = v_l(q^n - 1).
pub fn k_of_v(l: u64, q: u64, n: u32) -> Result<u32> {
    require_odd_prime(l)?;
    if q < 2 {
        return Err(Error::InvalidArgument("q must be at least 2".into()));
    }
    if q.is_multiple_of(l) {
        return Err(Error::NotCoprime {
            what: "q",
            value: q,
            modulus: l,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let x = arith::big_pow(q, n) - BigInt::one();
    let k = match v_p_bigint(&x, l) {
        Valuation::Finite(k) => k as u32,
        Valuation::Infinite => unreachable!("q ≥ 2 so q^n ≠ 1"),
    };
    if (q - 1).is_multiple_of(l) {
        // lifting the exponent
        assert_eq!(k, v_p_u64(q - 1, l) + v_p_u64(n as u64, l));
    }
    Ok(k)
}

/// A base field F, an odd prime l and the layers F_k = F(μ_{l^k}) for k ≤ depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSpec {
    base: AbelianFieldSpec,
    l: u64,
    depth: u32,
    fields: Vec<AbelianFieldSpec>,
}

impl TowerSpec {
    pub fn new(base: &AbelianFieldSpec, l: u64, depth: u32) -> Result<Self> {
        require_odd_prime(l)?;
        let mut fields = vec![base.clone()];
        for k in 1..=depth {
            let mu = AbelianFieldSpec::cyclotomic(l.pow(k))?;
            let layer = base.compositum(&mu);
            assert_eq!(
                layer.conductor(),
                lcm(base.conductor(), l.pow(k)),
                "conductor of F(μ_l^k)"
            );
            fields.push(layer);
        }
        Ok(Self {
            base: base.clone(),
            l,
            depth,
            fields,
        })
    }

    pub fn base(&self) -> &AbelianFieldSpec {
        &self.base
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// F_0, …, F_depth.
    pub fn fields(&self) -> &[AbelianFieldSpec] {
        &self.fields
    }

    /// f_0 = f and f_k = lcm(f, l^k).
    pub fn conductors(&self) -> Vec<u64> {
        self.fields
            .iter()
            .map(AbelianFieldSpec::conductor)
            .collect()
    }
}

/// Θ_n(b, f_0): the element Θ_n(b, f) with the Euler factor at l inserted when l ∤ f.
pub fn theta_f0(n: u32, b: u64, field: &AbelianFieldSpec, l: u64) -> Result<StickelbergerElement> {
    require_odd_prime(l)?;
    let f = field.conductor();
    if gcd(b, l * f) != 1 {
        return Err(Error::NotCoprime {
            what: "b",
            value: b,
            modulus: l * f,
        });
    }
    let mut t = theta(n, b, field)?;
    if !f.is_multiple_of(l) {
        t.value = euler_factor(field, l, n)?.mul(&t.value)?;
    }
    Ok(t)
}

/// A finite truncation of the compatible family (Θ_n(b, f_k))_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTowerFamily {
    pub tower: TowerSpec,
    pub n: u32,
    pub b: u64,
    /// The plain Θ_n(b, f) at level 0.
    pub theta_f: StickelbergerElement,
    /// Level 0 is Θ_n(b, f_0); level k ≥ 1 is Θ_n(b, f_k).
    pub levels: Vec<StickelbergerElement>,
    /// Entry k records Res_{F_{k+1}/F_k} Θ_n(b, f_{k+1}) = Θ_n(b, f_k).
    pub compat: Vec<bool>,
}

pub fn build_theta_tower(tower: &TowerSpec, n: u32, b: u64) -> Result<ThetaTowerFamily> {
    let f = tower.base.conductor();
    let top = tower.fields.last().expect("level 0 always present");
    let w = w_invariant(n + 1, top)?;
    for modulus in [f * tower.l, w] {
        if gcd(b, modulus) != 1 {
            return Err(Error::NotCoprime {
                what: "b",
                value: b,
                modulus,
            });
        }
    }
    let theta_f = theta(n, b, &tower.base)?;
    let level0 = theta_f0(n, b, &tower.base, tower.l)?;
    let upper: Vec<StickelbergerElement> = tower.fields[1..]
        .par_iter()
        .map(|field| theta(n, b, field))
        .collect::<Result<_>>()?;
    let mut levels = vec![level0];
    levels.extend(upper);
    let mut family = ThetaTowerFamily {
        tower: tower.clone(),
        n,
        b,
        theta_f,
        levels,
        compat: Vec::new(),
    };
    family.compat = verify_family(&family)?;
    Ok(family)
}

/// Re-checks every consecutive restriction, failing at the first incompatible level.
pub fn verify_family(family: &ThetaTowerFamily) -> Result<Vec<bool>> {
    let fields = family.tower.fields();
    let mut compat = Vec::with_capacity(family.levels.len().saturating_sub(1));
    for (k, pair) in family.levels.windows(2).enumerate() {
        let restricted = pair[1].value.restrict(&fields[k])?;
        let expected = &pair[0].value;
        if &restricted != expected {
            return Err(Error::CompatibilityFailure {
                level: k,
                restricted: Box::new(restricted),
                expected: Box::new(expected.clone()),
            });
        }
        compat.push(true);
    }
    Ok(compat)
}

impl Serialize for ThetaTowerFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let upper: Vec<_> = self.levels[1..].iter().map(|t| &t.value).collect();
        let mut st = s.serialize_struct("ThetaTowerFamily", 9)?;
        st.serialize_field("f", &self.tower.base.conductor())?;
        st.serialize_field("l", &self.tower.l)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("conductors", &self.tower.conductors())?;
        st.serialize_field("theta_f", &self.theta_f.value)?;
        st.serialize_field("theta_f0", &self.levels[0].value)?;
        st.serialize_field("levels", &upper)?;
        st.serialize_field("compat", &self.compat)?;
        st.end()
    }
}
