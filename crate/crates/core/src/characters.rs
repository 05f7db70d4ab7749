//! Dirichlet characters with exact values, generalized Bernoulli numbers and L(-n, χ).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::Serialize;

use crate::arith::{self, gcd, lcm, mod_inverse, reduce};
use crate::bernoulli::bernoulli_poly;
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::group_ring::AbelianFieldSpec;

/// A fixed cyclic decomposition of (Z/fZ)^× together with a discrete-log table.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    modulus: u64,
    /// (generator, order) pairs: least primitive root per odd prime power, then (-1, 5) at 2^k.
    generators: Vec<(u64, u64)>,
    /// Exponent vector of every unit residue with respect to `generators`; empty for non-units.
    logs: Vec<Vec<u64>>,
}

fn crt_with_one(r: u64, m1: u64, m2: u64) -> u64 {
    // x ≡ r (mod m1), x ≡ 1 (mod m2)
    if m1 == 1 {
        return 1;
    }
    let inv = mod_inverse(m2 % m1, m1).expect("coprime moduli");
    let t = ((r + m1 - 1) % m1) as u128 * inv as u128 % m1 as u128;
    reduce((1 + m2 as u128 * t) as u64 % (m1 * m2), m1 * m2)
}

impl UnitGroup {
    pub fn new(modulus: u64) -> Self {
        let mut local: Vec<(u64, u64, u64)> = Vec::new(); // (generator mod q, order, q)
        for (p, k) in arith::factorize(modulus) {
            let q = p.pow(k);
            if p == 2 {
                if k >= 2 {
                    local.push((q - 1, 2, q));
                }
                if k >= 3 {
                    local.push((5, q / 4, q));
                }
            } else {
                let phi = q / p * (p - 1);
                let g = (2..q)
                    .find(|&g| gcd(g, q) == 1 && arith::unit_order(g, q) == phi)
                    .expect("odd prime powers have primitive roots");
                local.push((g, phi, q));
            }
        }
        let generators: Vec<(u64, u64)> = local
            .iter()
            .map(|&(g, ord, q)| (crt_with_one(g, q, modulus / q), ord))
            .collect();
        let mut logs = vec![Vec::new(); modulus as usize + 1];
        let total: u64 = generators.iter().map(|&(_, o)| o).product();
        for idx in 0..total {
            let mut rest = idx;
            let mut exps = Vec::with_capacity(generators.len());
            let mut x = reduce(1, modulus);
            for &(g, ord) in &generators {
                let e = rest % ord;
                rest /= ord;
                exps.push(e);
                x = reduce(
                    (x as u128 * arith::pow_mod(g, e, modulus) as u128 % modulus as u128) as u64,
                    modulus,
                );
            }
            logs[x as usize] = exps;
        }
        if modulus == 1 {
            logs[1] = Vec::new();
        }
        UnitGroup {
            modulus,
            generators,
            logs,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.generators
    }

    pub fn exponent(&self) -> u64 {
        self.generators.iter().fold(1, |acc, &(_, o)| lcm(acc, o))
    }

    pub fn log(&self, a: u64) -> Option<&[u64]> {
        let r = reduce(a, self.modulus);
        if gcd(r, self.modulus) != 1 && self.modulus != 1 {
            None
        } else {
            Some(&self.logs[r as usize])
        }
    }
}

/// χ(a) = ζ_d^{e(a)} on units of Z/fZ, 0 elsewhere; `d` is the exact order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    /// Indexed by residue 0..=f; entries at non-units are meaningless.
    exps: Vec<u64>,
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64) -> Self {
        Self {
            modulus,
            order: 1,
            exps: vec![0; modulus as usize + 1],
        }
    }

    /// Builds a character from its exponent map modulo `big_order`, reducing to the exact order.
    fn from_exponents(modulus: u64, big_order: u64, mut exps: Vec<u64>) -> Self {
        let units = arith::units(modulus);
        let g = units
            .iter()
            .fold(big_order, |acc, &a| gcd(acc, exps[a as usize]));
        let order = big_order / g;
        for e in &mut exps {
            *e = (*e / g) % order;
        }
        Self {
            modulus,
            order,
            exps,
        }
    }

    /// The character sending the i-th standard generator to ζ_{ord_i}^{j_i}.
    pub fn from_generator_exponents(group: &UnitGroup, js: &[u64]) -> Self {
        assert_eq!(js.len(), group.generators.len());
        let f = group.modulus;
        let big = group.exponent();
        let mut exps = vec![0u64; f as usize + 1];
        for a in arith::units(f) {
            let log = group.log(a).expect("unit");
            let e = log
                .iter()
                .zip(js)
                .zip(&group.generators)
                .map(|((&l, &j), &(_, ord))| (l * j % ord) * (big / ord))
                .sum::<u64>()
                % big;
            exps[a as usize] = e;
        }
        Self::from_exponents(f, big, exps)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// e(a) with χ(a) = ζ_d^{e(a)}; `None` when gcd(a, f) > 1.
    pub fn exponent(&self, a: u64) -> Option<u64> {
        let r = reduce(a, self.modulus);
        if self.modulus != 1 && gcd(r, self.modulus) != 1 {
            None
        } else {
            Some(self.exps[r as usize])
        }
    }

    pub fn value(&self, a: u64) -> CyclotomicNumber {
        match self.exponent(a) {
            Some(e) => CyclotomicNumber::root_power(self.order, e),
            None => CyclotomicNumber::zero(self.order),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// χ(-1) = 1.
    pub fn is_even(&self) -> bool {
        self.modulus <= 2 || self.exps[(self.modulus - 1) as usize] == 0
    }

    pub fn inverse(&self) -> Self {
        let d = self.order;
        Self {
            modulus: self.modulus,
            order: d,
            exps: self.exps.iter().map(|&e| (d - e % d) % d).collect(),
        }
    }

    /// Whether χ is trivial on the subgroup fixing `field` (same modulus required).
    pub fn factors_through(&self, field: &AbelianFieldSpec) -> bool {
        self.modulus == field.conductor()
            && field
                .subgroup()
                .iter()
                .all(|&h| self.exponent(h) == Some(0))
    }

    /// The smallest f_χ | f through which χ factors.
    pub fn conductor(&self) -> u64 {
        let f = self.modulus;
        let units = arith::units(f);
        arith::divisors(f)
            .into_iter()
            .find(|&f0| {
                units
                    .iter()
                    .filter(|&&a| reduce(a, f0) == 1)
                    .all(|&a| self.exps[a as usize] == 0)
            })
            .unwrap_or(f)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing χ.
    pub fn primitive(&self) -> Self {
        let f0 = self.conductor();
        if f0 == self.modulus {
            return self.clone();
        }
        let mut exps = vec![0u64; f0 as usize + 1];
        for a in arith::units(f0) {
            let lift = (0..self.modulus / f0)
                .map(|t| a + t * f0)
                .find(|&x| gcd(x, self.modulus) == 1)
                .expect("every unit mod f0 lifts to a unit mod f");
            exps[a as usize] = self.exps[reduce(lift, self.modulus) as usize];
        }
        Self::from_exponents(f0, self.order, exps)
    }

    /// The same character viewed modulo a multiple `m` of its modulus.
    pub fn induce(&self, m: u64) -> Self {
        assert!(m.is_multiple_of(self.modulus));
        let mut exps = vec![0u64; m as usize + 1];
        for a in arith::units(m) {
            exps[a as usize] = self.exps[reduce(a, self.modulus) as usize];
        }
        Self {
            modulus: m,
            order: self.order,
            exps,
        }
    }

    /// Exponents on the standard generators of (Z/fZ)^×, each in units of 1/ord_i.
    pub fn generator_exponents(&self) -> Vec<u64> {
        let group = UnitGroup::new(self.modulus);
        group
            .generators
            .iter()
            .map(|&(g, ord)| self.exps[reduce(g, self.modulus) as usize] * ord / self.order)
            .collect()
    }

    /// Canonical label: generator exponents joined by '.', "1" for the character mod 1.
    pub fn label(&self) -> String {
        let js = self.generator_exponents();
        if js.is_empty() {
            return "1".to_string();
        }
        js.iter().map(u64::to_string).collect::<Vec<_>>().join(".")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Exps<'a>(&'a DirichletCharacter);
        impl Serialize for Exps<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let units = arith::units(self.0.modulus);
                let mut m = s.serialize_map(Some(units.len()))?;
                for a in units {
                    m.serialize_entry(&a.to_string(), &self.0.exps[a as usize])?;
                }
                m.end()
            }
        }
        let mut st = s.serialize_struct("DirichletCharacter", 3)?;
        st.serialize_field("f", &self.modulus)?;
        st.serialize_field("d", &self.order)?;
        st.serialize_field("e", &Exps(self))?;
        st.end()
    }
}

/// The dual of G(F/Q): characters mod the conductor that kill H, sorted by (order, label).
pub fn enumerate_characters(field: &AbelianFieldSpec) -> Vec<DirichletCharacter> {
    let group = UnitGroup::new(field.conductor());
    let orders: Vec<u64> = group.generators.iter().map(|&(_, o)| o).collect();
    let total: u64 = orders.iter().product();
    let mut out: Vec<(u64, Vec<u64>, DirichletCharacter)> = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let js: Vec<u64> = orders
            .iter()
            .map(|&o| {
                let j = rest % o;
                rest /= o;
                j
            })
            .collect();
        let chi = DirichletCharacter::from_generator_exponents(&group, &js);
        if chi.factors_through(field) {
            out.push((chi.order, js, chi));
        }
    }
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    debug_assert_eq!(out.len(), field.degree());
    out.into_iter().map(|(_, _, c)| c).collect()
}

/// Looks up a character of `field` by its label.
pub fn character_by_label(field: &AbelianFieldSpec, label: &str) -> Result<DirichletCharacter> {
    enumerate_characters(field)
        .into_iter()
        .find(|c| c.label() == label)
        .ok_or_else(|| Error::InvalidArgument(format!("no character labelled {label:?}")))
}

/// B_{n,χ} = F^{n-1} Σ_{a=1}^{F} χ(a) B_n(a/F) for primitive χ of conductor F.
pub fn gen_bernoulli(n: usize, chi: &DirichletCharacter) -> Result<CyclotomicNumber> {
    let conductor = chi.conductor();
    if conductor != chi.modulus {
        return Err(Error::NonPrimitive {
            modulus: chi.modulus,
            conductor,
        });
    }
    let big_f = chi.modulus;
    let scale = BigRational::from_integer(arith::big_pow(big_f, n.saturating_sub(1) as u32));
    let terms = (1..=big_f).filter_map(|a| {
        chi.exponent(a).map(|e| {
            let x = BigRational::new(BigInt::from(a), BigInt::from(big_f));
            (e, bernoulli_poly(n, &x) * &scale)
        })
    });
    let mut out = CyclotomicNumber::from_exponents(chi.order, terms);
    if n == 0 {
        // B_{0,χ} = F^{-1} Σ χ(a)
        out = out.scale(&BigRational::new(BigInt::one(), BigInt::from(big_f)));
    }
    Ok(out)
}

/// L(-n, χ) = -B_{n+1,χ}/(n+1) times ∏_{p ∈ removed, p ∤ F} (1 - χ(p) p^n).
pub fn l_value(
    n: u32,
    chi: &DirichletCharacter,
    removed_primes: &[u64],
) -> Result<CyclotomicNumber> {
    let b = gen_bernoulli(n as usize + 1, chi)?;
    let mut value = b.scale(&-BigRational::new(BigInt::one(), BigInt::from(n + 1)));
    let primes: BTreeSet<u64> = removed_primes.iter().copied().collect();
    for p in primes {
        if chi.modulus.is_multiple_of(p) {
            continue;
        }
        let pn = BigRational::from_integer(arith::big_pow(p, n));
        let factor = &CyclotomicNumber::one(chi.order) - &chi.value(p).scale(&pn);
        value = &value * &factor;
    }
    Ok(value)
}
