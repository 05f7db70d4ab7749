//! Abelian fields Q ⊂ F ⊂ Q(μ_f) and exact arithmetic in the rational group ring Q[G(F/Q)].
//!
//! A field is described by its conductor `f` and the subgroup `H` of (Z/fZ)^× that fixes it,
//! so that G(F/Q) = (Z/fZ)^× / H. Galois elements are cosets keyed by their least positive
//! representative.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::arith::{self, format_rational, gcd, lcm, parse_rational, reduce};
use crate::error::{Error, Result};

struct FieldData {
    conductor: u64,
    subgroup: Vec<u64>,
    /// Canonical coset representative of every residue in 0..f; 0 marks a non-unit.
    coset_rep: Vec<u64>,
    reps: Vec<u64>,
}

/// An abelian number field given by its conductor and the subgroup of (Z/fZ)^× fixing it.
#[derive(Clone)]
pub struct AbelianFieldSpec(Arc<FieldData>);

impl PartialEq for AbelianFieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.conductor == other.0.conductor && self.0.subgroup == other.0.subgroup)
    }
}

impl Eq for AbelianFieldSpec {}

impl fmt::Debug for AbelianFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Field(f = {}, H = {:?})",
            self.0.conductor, self.0.subgroup
        )
    }
}

fn check_subgroup(f: u64, h: &BTreeSet<u64>) -> Result<()> {
    if !h.contains(&reduce(1, f)) {
        return Err(Error::NonSubgroup(f));
    }
    for &x in h {
        for &y in h {
            if !h.contains(&reduce(x * y % f.max(1), f)) {
                return Err(Error::NonSubgroup(f));
            }
        }
    }
    Ok(())
}

fn reduce_subgroup(f: u64, subgroup: &[u64]) -> Result<BTreeSet<u64>> {
    let mut h = BTreeSet::new();
    for &a in subgroup {
        if gcd(a % f, f) != 1 && f != 1 {
            return Err(Error::NotAUnit(a, f));
        }
        h.insert(reduce(a, f));
    }
    Ok(h)
}

/// Smallest divisor `f0` of `f` with ker((Z/f)^× → (Z/f0)^×) ⊂ H.
///
/// The set of admissible `f0` is closed under gcd, so the smallest one is the conductor.
pub fn minimal_conductor(f: u64, subgroup: &BTreeSet<u64>) -> u64 {
    let units = arith::units(f);
    arith::divisors(f)
        .into_iter()
        .find(|&f0| {
            units
                .iter()
                .filter(|&&x| reduce(x, f0) == 1)
                .all(|x| subgroup.contains(x))
        })
        .unwrap_or(f)
}

impl AbelianFieldSpec {
    /// Validating constructor: `subgroup` must be a subgroup of (Z/fZ)^× and `f` the true conductor.
    pub fn new(f: u64, subgroup: &[u64]) -> Result<Self> {
        if f == 0 {
            return Err(Error::ZeroConductor);
        }
        if f % 4 == 2 {
            return Err(Error::ConductorTwoModFour(f));
        }
        let h = reduce_subgroup(f, subgroup)?;
        check_subgroup(f, &h)?;
        let minimal = minimal_conductor(f, &h);
        if minimal != f {
            return Err(Error::NonMinimalConductor { given: f, minimal });
        }
        Ok(Self::build(f, h))
    }

    /// Q(μ_f).
    pub fn cyclotomic(f: u64) -> Result<Self> {
        Self::new(f, &[1])
    }

    pub fn rationals() -> Self {
        Self::build(1, BTreeSet::from([1]))
    }

    /// The subgroup generated by `generators`, then validated as in [`AbelianFieldSpec::new`].
    pub fn from_generators(f: u64, generators: &[u64]) -> Result<Self> {
        if f == 0 {
            return Err(Error::ZeroConductor);
        }
        let gens = reduce_subgroup(f, generators)?;
        let mut h = BTreeSet::from([reduce(1, f)]);
        let mut frontier: Vec<u64> = h.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = reduce(x * g % f, f);
                if h.insert(y) {
                    frontier.push(y);
                }
            }
        }
        let h: Vec<u64> = h.into_iter().collect();
        Self::new(f, &h)
    }

    /// The field fixed by `subgroup ⊂ (Z/mZ)^×`, re-expressed at its true conductor.
    /// Accepts any modulus `m`, including m ≡ 2 mod 4.
    pub fn normalized(m: u64, subgroup: &[u64]) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroConductor);
        }
        let h = reduce_subgroup(m, subgroup)?;
        check_subgroup(m, &h)?;
        let f0 = minimal_conductor(m, &h);
        let image: BTreeSet<u64> = h.iter().map(|&x| reduce(x, f0)).collect();
        Ok(Self::build(f0, image))
    }

    fn build(f: u64, h: BTreeSet<u64>) -> Self {
        let mut coset_rep = vec![0u64; f as usize + 1];
        let mut reps = Vec::new();
        for a in arith::units(f) {
            if coset_rep[a as usize] != 0 {
                continue;
            }
            reps.push(a);
            for &x in &h {
                let b = reduce(a * x % f.max(1), f);
                coset_rep[b as usize] = a;
            }
        }
        AbelianFieldSpec(Arc::new(FieldData {
            conductor: f,
            subgroup: h.into_iter().collect(),
            coset_rep,
            reps,
        }))
    }

    pub fn conductor(&self) -> u64 {
        self.0.conductor
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.0.subgroup
    }

    /// [F : Q] = |G(F/Q)|.
    pub fn degree(&self) -> usize {
        self.0.reps.len()
    }

    /// Canonical coset representatives, in increasing order.
    pub fn elements(&self) -> &[u64] {
        &self.0.reps
    }

    pub fn is_full_cyclotomic(&self) -> bool {
        self.0.subgroup.len() == 1
    }

    pub fn in_subgroup(&self, a: u64) -> bool {
        self.0
            .subgroup
            .binary_search(&reduce(a, self.0.conductor))
            .is_ok()
    }

    /// Canonical representative of the coset of `a`, i.e. the image of σ_a in G(F/Q).
    pub fn coset_rep(&self, a: u64) -> Result<u64> {
        let f = self.0.conductor;
        let r = self.0.coset_rep[reduce(a, f) as usize];
        if r == 0 {
            Err(Error::NotAUnit(a, f))
        } else {
            Ok(r)
        }
    }

    pub fn element(&self, a: u64) -> Result<GaloisElement> {
        Ok(GaloisElement {
            field: self.clone(),
            rep: self.coset_rep(a)?,
        })
    }

    pub(crate) fn mul_reps(&self, a: u64, b: u64) -> u64 {
        let f = self.0.conductor;
        self.0.coset_rep[reduce((a as u128 * b as u128 % f as u128) as u64, f) as usize]
    }

    pub(crate) fn inv_rep(&self, a: u64) -> u64 {
        let f = self.0.conductor;
        let inv = arith::mod_inverse(a, f).expect("coset representatives are units");
        self.0.coset_rep[inv as usize]
    }

    /// Complex conjugation σ_{-1} lies in H.
    pub fn is_totally_real(&self) -> bool {
        let f = self.0.conductor;
        f <= 2 || self.in_subgroup(f - 1)
    }

    pub fn is_cm(&self) -> bool {
        !self.is_totally_real()
    }

    /// Whether `self ⊂ other`.
    pub fn is_subfield_of(&self, other: &AbelianFieldSpec) -> bool {
        let (f, g) = (self.conductor(), other.conductor());
        g % f == 0
            && other
                .subgroup()
                .iter()
                .all(|&h| self.in_subgroup(reduce(h, f)))
    }

    /// The compositum, with its conductor recomputed from the intersected subgroup.
    pub fn compositum(&self, other: &AbelianFieldSpec) -> AbelianFieldSpec {
        let m = lcm(self.conductor(), other.conductor());
        let h: Vec<u64> = arith::units(m)
            .into_iter()
            .filter(|&x| self.in_subgroup(x) && other.in_subgroup(x))
            .collect();
        Self::normalized(m, &h).expect("intersection of subgroups is a subgroup")
    }

    /// The maximal real subfield F⁺.
    pub fn maximal_real_subfield(&self) -> AbelianFieldSpec {
        let f = self.conductor();
        let mut h: BTreeSet<u64> = self.subgroup().iter().copied().collect();
        if f > 2 {
            h.extend(self.subgroup().iter().map(|&x| reduce(f - x, f)));
        }
        let h: Vec<u64> = h.into_iter().collect();
        Self::normalized(f, &h).expect("H·{±1} is a subgroup")
    }
}

/// σ_a viewed in G(F/Q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisElement {
    field: AbelianFieldSpec,
    rep: u64,
}

impl GaloisElement {
    pub fn field(&self) -> &AbelianFieldSpec {
        &self.field
    }

    pub fn representative(&self) -> u64 {
        self.rep
    }

    pub fn inverse(&self) -> GaloisElement {
        GaloisElement {
            field: self.field.clone(),
            rep: self.field.inv_rep(self.rep),
        }
    }

    pub fn compose(&self, other: &GaloisElement) -> Result<GaloisElement> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(GaloisElement {
            field: self.field.clone(),
            rep: self.field.mul_reps(self.rep, other.rep),
        })
    }
}

/// A finitely supported map G(F/Q) → Q, stored sparsely with zero coefficients dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement {
    field: AbelianFieldSpec,
    coeffs: BTreeMap<u64, BigRational>,
}

impl GroupRingElement {
    pub fn zero(field: &AbelianFieldSpec) -> Self {
        Self {
            field: field.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(field: &AbelianFieldSpec) -> Self {
        Self::from_scalar(field, BigRational::one())
    }

    pub fn from_scalar(field: &AbelianFieldSpec, c: BigRational) -> Self {
        Self::from_terms(field, [(1, c)]).expect("1 is a unit")
    }

    /// The basis element σ_a.
    pub fn sigma(field: &AbelianFieldSpec, a: u64) -> Result<Self> {
        Self::from_terms(field, [(a, BigRational::one())])
    }

    /// Σ c·σ_a over the given terms; residues are reduced to coset representatives and merged.
    pub fn from_terms<I>(field: &AbelianFieldSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, BigRational)>,
    {
        let mut coeffs: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (a, c) in terms {
            let rep = field.coset_rep(a)?;
            *coeffs.entry(rep).or_insert_with(BigRational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn field(&self) -> &AbelianFieldSpec {
        &self.field
    }

    pub fn coefficients(&self) -> &BTreeMap<u64, BigRational> {
        &self.coeffs
    }

    pub fn coefficient(&self, a: u64) -> BigRational {
        self.field
            .coset_rep(a)
            .ok()
            .and_then(|r| self.coeffs.get(&r).cloned())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(arith::is_integral)
    }

    /// Re-runs canonicalization; the result always equals `self`.
    pub fn canonicalize(&self) -> Self {
        Self::from_terms(
            &self.field,
            self.coeffs.iter().map(|(&a, c)| (a, c.clone())),
        )
        .expect("keys are coset representatives")
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            Err(Error::FieldMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let mut coeffs = self.coeffs.clone();
        for (&a, c) in &other.coeffs {
            *coeffs.entry(a).or_insert_with(BigRational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field);
        }
        Self {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|(&a, x)| (a, x * c)).collect(),
        }
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let mut coeffs: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (&a, x) in &self.coeffs {
            for (&b, y) in &other.coeffs {
                let ab = self.field.mul_reps(a, b);
                *coeffs.entry(ab).or_insert_with(BigRational::zero) += x * y;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self {
            field: self.field.clone(),
            coeffs,
        })
    }

    /// The involution σ ↦ σ^{-1} extended linearly.
    pub fn invert_group_elements(&self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&a, c) in &self.coeffs {
            coeffs.insert(self.field.inv_rep(a), c.clone());
        }
        Self {
            field: self.field.clone(),
            coeffs,
        }
    }

    /// Restriction Q[G(E/Q)] → Q[G(F/Q)] for a subfield F of E.
    pub fn restrict(&self, target: &AbelianFieldSpec) -> Result<Self> {
        if !target.is_subfield_of(&self.field) {
            return Err(Error::NotASubfield);
        }
        Self::from_terms(target, self.coeffs.iter().map(|(&a, c)| (a, c.clone())))
    }

    /// Primes dividing some coefficient denominator.
    pub fn denominator_primes(&self) -> Vec<u64> {
        let mut primes = BTreeSet::new();
        for c in self.coeffs.values() {
            let d = c.denom();
            if !d.is_one() {
                let d = u64::try_from(d.clone()).expect("denominators stay small");
                primes.extend(arith::prime_divisors(d));
            }
        }
        primes.into_iter().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(a, c)| format!("({c})·σ_{a}"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

struct CoeffMap<'a>(&'a BTreeMap<u64, BigRational>);

impl Serialize for CoeffMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (a, c) in self.0 {
            map.serialize_entry(&a.to_string(), &format_rational(c))?;
        }
        map.end()
    }
}

impl Serialize for GroupRingElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GroupRingElement", 3)?;
        st.serialize_field("f", &self.field.conductor())?;
        st.serialize_field("H", self.field.subgroup())?;
        st.serialize_field("coeffs", &CoeffMap(&self.coeffs))?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawElement {
    f: u64,
    #[serde(rename = "H")]
    h: Vec<u64>,
    coeffs: BTreeMap<String, String>,
}

impl<'de> Deserialize<'de> for GroupRingElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawElement::deserialize(d)?;
        let field = AbelianFieldSpec::new(raw.f, &raw.h).map_err(de::Error::custom)?;
        let mut terms = Vec::with_capacity(raw.coeffs.len());
        for (k, v) in raw.coeffs {
            let a: u64 = k.parse().map_err(de::Error::custom)?;
            if field.coset_rep(a).map_err(de::Error::custom)? != a {
                return Err(de::Error::custom(format!(
                    "{a} is not a canonical coset representative"
                )));
            }
            terms.push((a, parse_rational(&v).map_err(de::Error::custom)?));
        }
        GroupRingElement::from_terms(&field, terms).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn q(n: i64) -> BigRational {
        rat(n, 1)
    }

    #[test]
    fn cyclotomic_three() {
        let f = AbelianFieldSpec::cyclotomic(3).unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.elements(), &[1, 2]);
        assert!(f.is_cm());
    }

    #[test]
    fn real_quadratic_five() {
        let f = AbelianFieldSpec::new(5, &[1, 4]).unwrap();
        assert_eq!(f.degree(), 2);
        assert!(f.is_totally_real());
        assert_eq!(f.coset_rep(4).unwrap(), 1);
        assert_eq!(f.coset_rep(3).unwrap(), 2);
    }

    #[test]
    fn fifteen_with_minus_four() {
        // ker to mod 5 is {1, 11}, ker to mod 3 is {1, 4, 7, 13}: neither lies in {1, 4}.
        let f = AbelianFieldSpec::new(15, &[1, 4]).unwrap();
        assert_eq!(f.degree(), 4);
        // {1, 4, 11, 14} fixes Q(sqrt 5) and is caught by the minimality check.
        assert_eq!(
            AbelianFieldSpec::new(15, &[1, 4, 11, 14]),
            Err(Error::NonMinimalConductor {
                given: 15,
                minimal: 5
            })
        );
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(AbelianFieldSpec::new(0, &[1]), Err(Error::ZeroConductor));
        assert_eq!(
            AbelianFieldSpec::new(6, &[1]),
            Err(Error::ConductorTwoModFour(6))
        );
        assert_eq!(
            AbelianFieldSpec::new(7, &[1, 2]),
            Err(Error::NonSubgroup(7))
        );
        assert_eq!(
            AbelianFieldSpec::new(7, &[1, 7]),
            Err(Error::NotAUnit(7, 7))
        );
        assert!(matches!(
            AbelianFieldSpec::new(4, &[1, 3]),
            Err(Error::NonMinimalConductor { minimal: 1, .. })
        ));
    }

    #[test]
    fn generators_and_normalization() {
        let f = AbelianFieldSpec::from_generators(7, &[2]).unwrap();
        assert_eq!(f.subgroup(), &[1, 2, 4]);
        let g = AbelianFieldSpec::normalized(15, &[1, 4, 11, 14]).unwrap();
        assert_eq!(g, AbelianFieldSpec::new(5, &[1, 4]).unwrap());
        let q = AbelianFieldSpec::normalized(6, &[1]).unwrap();
        assert_eq!(q.conductor(), 3);
    }

    #[test]
    fn compositum_conductor() {
        let a = AbelianFieldSpec::new(5, &[1, 4]).unwrap();
        let b = AbelianFieldSpec::cyclotomic(3).unwrap();
        let c = a.compositum(&b);
        assert_eq!(c.conductor(), 15);
        assert_eq!(c.degree(), 4);
        assert!(a.is_subfield_of(&c) && b.is_subfield_of(&c));
    }

    #[test]
    fn identity_and_two_element_convolution() {
        let f = AbelianFieldSpec::cyclotomic(3).unwrap();
        let s1 = GroupRingElement::sigma(&f, 1).unwrap();
        let s2 = GroupRingElement::sigma(&f, 2).unwrap();
        let x = s1.scale(&q(3)).add(&s2.scale(&rat(-1, 2))).unwrap();
        assert_eq!(x.mul(&GroupRingElement::one(&f)).unwrap(), x);
        let prod = s1.sub(&s2).unwrap().mul(&s1.add(&s2).unwrap()).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn mismatched_fields() {
        let a = GroupRingElement::one(&AbelianFieldSpec::cyclotomic(3).unwrap());
        let b = GroupRingElement::one(&AbelianFieldSpec::cyclotomic(5).unwrap());
        assert_eq!(a.mul(&b), Err(Error::FieldMismatch));
        assert_eq!(a.add(&b), Err(Error::FieldMismatch));
    }

    #[test]
    fn restriction_counts_cosets() {
        let big = AbelianFieldSpec::cyclotomic(15).unwrap();
        let small = AbelianFieldSpec::cyclotomic(3).unwrap();
        let one = GroupRingElement::one(&big).restrict(&small).unwrap();
        assert_eq!(one, GroupRingElement::one(&small));
        let norm =
            GroupRingElement::from_terms(&big, arith::units(15).into_iter().map(|a| (a, q(1))))
                .unwrap();
        let r = norm.restrict(&small).unwrap();
        assert_eq!(r.coefficient(1), q(4));
        assert_eq!(r.coefficient(2), q(4));
        assert_eq!(
            GroupRingElement::one(&small).restrict(&big),
            Err(Error::NotASubfield)
        );
    }

    #[test]
    fn json_form() {
        let f = AbelianFieldSpec::cyclotomic(3).unwrap();
        let x = GroupRingElement::from_terms(&f, [(1, q(1)), (2, q(-1))]).unwrap();
        assert_eq!(
            x.to_json(),
            r#"{"f":3,"H":[1],"coeffs":{"1":"1/1","2":"-1/1"}}"#
        );
        assert_eq!(GroupRingElement::from_json(&x.to_json()).unwrap(), x);
        assert!(GroupRingElement::from_json(r#"{"f":5,"H":[1,4],"coeffs":{"4":"1/1"}}"#).is_err());
    }

    #[test]
    fn numeric_key_order() {
        let f = AbelianFieldSpec::cyclotomic(11).unwrap();
        let x = GroupRingElement::from_terms(&f, [(10, q(1)), (2, q(1))]).unwrap();
        assert_eq!(
            x.to_json(),
            r#"{"f":11,"H":[1],"coeffs":{"2":"1/1","10":"1/1"}}"#
        );
    }
}
