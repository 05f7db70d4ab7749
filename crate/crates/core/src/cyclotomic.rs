//! Exact elements of Q(ζ_d) in the power basis 1, ζ_d, …, ζ_d^{φ(d)-1}.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::arith::{self, format_rational, lcm};

/// Coefficients of Φ_d, lowest degree first.
pub fn cyclotomic_polynomial(d: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cyclotomic cache poisoned").get(&d) {
        return p.clone();
    }
    assert!(d >= 1);
    // x^d - 1 divided by Φ_e for every proper divisor e.
    let mut num = vec![BigInt::zero(); d as usize + 1];
    num[0] = BigInt::from(-1);
    num[d as usize] = BigInt::one();
    for e in arith::divisors(d).into_iter().filter(|&e| e < d) {
        num = exact_div(&num, &cyclotomic_polynomial(e));
    }
    let p = Arc::new(num);
    cache
        .lock()
        .expect("cyclotomic cache poisoned")
        .insert(d, p.clone());
    p
}

fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn].clone();
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// An element of Q(ζ_d).
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    order: u64,
    coords: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn degree(order: u64) -> usize {
        arith::euler_phi(order) as usize
    }

    /// Reduces an arbitrary polynomial in ζ_d modulo Φ_d.
    pub fn from_poly(order: u64, mut poly: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        for i in (deg..poly.len()).rev() {
            let c = std::mem::take(&mut poly[i]);
            if c.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate().take(deg) {
                poly[i - deg + j] -= &c * BigRational::from_integer(pj.clone());
            }
        }
        poly.resize(deg, BigRational::zero());
        Self {
            order,
            coords: poly,
        }
    }

    /// Σ c·ζ_d^k over `(k, c)` terms.
    pub fn from_exponents<I>(order: u64, terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, BigRational)>,
    {
        let mut poly = vec![BigRational::zero(); order as usize];
        for (k, c) in terms {
            poly[(k % order) as usize] += c;
        }
        Self::from_poly(order, poly)
    }

    pub fn zero(order: u64) -> Self {
        Self::from_poly(order, Vec::new())
    }

    pub fn from_rational(order: u64, q: BigRational) -> Self {
        Self::from_poly(order, vec![q])
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    /// ζ_d^k.
    pub fn root_power(order: u64, k: u64) -> Self {
        Self::from_exponents(order, [(k, BigRational::one())])
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// Re-expresses `self` in Q(ζ_m) for a multiple m of the current order.
    pub fn lift(&self, m: u64) -> Self {
        assert!(
            m.is_multiple_of(self.order),
            "lift target must be a multiple of the order"
        );
        if m == self.order {
            return self.clone();
        }
        let step = m / self.order;
        Self::from_exponents(
            m,
            self.coords
                .iter()
                .enumerate()
                .map(|(j, c)| (j as u64 * step, c.clone())),
        )
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = lcm(self.order, other.order);
        (self.lift(m), other.lift(m))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational value, when `self` lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords.iter().skip(1).all(Zero::is_zero) {
            Some(
                self.coords
                    .first()
                    .cloned()
                    .unwrap_or_else(BigRational::zero),
            )
        } else {
            None
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            order: self.order,
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    /// The automorphism ζ ↦ ζ^k, k a unit mod the order.
    pub fn conjugate(&self, k: u64) -> Self {
        debug_assert_eq!(arith::gcd(k % self.order, self.order).max(1), 1);
        Self::from_exponents(
            self.order,
            self.coords
                .iter()
                .enumerate()
                .map(|(j, c)| (j as u64 * k % self.order, c.clone())),
        )
    }

    /// N_{Q(ζ_d)/Q}, the product of all conjugates.
    pub fn norm(&self) -> BigRational {
        let prod = arith::units(self.order)
            .into_iter()
            .fold(Self::one(self.order), |acc, k| &acc * &self.conjugate(k));
        prod.as_rational()
            .expect("the norm of a cyclotomic number is rational")
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coords == b.coords
    }
}

impl Eq for CyclotomicNumber {}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: Self) -> CyclotomicNumber {
        let (a, b) = self.common(rhs);
        CyclotomicNumber {
            order: a.order,
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: Self) -> CyclotomicNumber {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: Self) -> CyclotomicNumber {
        let (a, b) = self.common(rhs);
        let n = a.coords.len();
        let mut poly = vec![BigRational::zero(); 2 * n.max(1)];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        CyclotomicNumber::from_poly(a.order, poly)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => format!("{c}"),
                _ => format!("({c})·ζ{}^{j}", self.order),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coords: Vec<String> = self.coords.iter().map(format_rational).collect();
        let mut st = s.serialize_struct("CyclotomicNumber", 2)?;
        st.serialize_field("d", &self.order)?;
        st.serialize_field("coords", &coords)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn poly(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), poly(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(2), poly(&[1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), poly(&[1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(6), poly(&[1, -1, 1]));
        assert_eq!(*cyclotomic_polynomial(12), poly(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
        assert!(cyclotomic_polynomial(105).contains(&BigInt::from(-2)));
    }

    #[test]
    fn roots_of_unity() {
        let z = CyclotomicNumber::root_power(3, 1);
        let one = CyclotomicNumber::one(3);
        // 1 + ζ + ζ² = 0
        let s = &(&one + &z) + &(&z * &z);
        assert!(s.is_zero());
        assert_eq!(
            CyclotomicNumber::root_power(2, 1).as_rational(),
            Some(rat(-1, 1))
        );
        // ζ_4^2 = -1 seen from order 12
        let i = CyclotomicNumber::root_power(4, 1).lift(12);
        assert_eq!((&i * &i).as_rational(), Some(rat(-1, 1)));
    }

    #[test]
    fn equality_across_orders() {
        let a = CyclotomicNumber::root_power(6, 2);
        let b = CyclotomicNumber::root_power(3, 1);
        assert_eq!(a, b);
        assert_eq!(
            CyclotomicNumber::from_rational(5, rat(2, 3)),
            CyclotomicNumber::from_rational(7, rat(2, 3))
        );
    }

    #[test]
    fn norms() {
        // N(1 - ζ_p) = p
        for p in [3u64, 5, 7, 11] {
            let x = &CyclotomicNumber::one(p) - &CyclotomicNumber::root_power(p, 1);
            assert_eq!(x.norm(), rat(p as i64, 1));
        }
        assert_eq!(
            CyclotomicNumber::from_rational(4, rat(3, 1)).norm(),
            rat(9, 1)
        );
    }

    #[test]
    fn json() {
        let z = CyclotomicNumber::root_power(3, 2);
        assert_eq!(
            serde_json::to_string(&z).unwrap(),
            r#"{"d":3,"coords":["-1/1","-1/1"]}"#
        );
    }
}
