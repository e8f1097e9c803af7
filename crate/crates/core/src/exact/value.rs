use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::primes::PrimeFactors;

/// Exact number `q * sqrt(p)`.
///
/// Normal form: `p` is a square-free positive integer and every square factor
/// of the radicand lives in the rational `q`. Zero is `q = 0, p = 1`. Two
/// values are equal iff their normal forms are identical, so `==` is exact
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactValue {
    q: BigRational,
    p: BigUint,
}

impl ExactValue {
    pub fn zero() -> Self {
        ExactValue { q: BigRational::zero(), p: BigUint::one() }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        ExactValue { q, p: BigUint::one() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `sign * coeff * sqrt(radicand)` for a radicand given by prime exponents.
    pub fn from_factored(sign: i32, coeff: BigRational, radicand: &PrimeFactors) -> Self {
        if sign == 0 || coeff.is_zero() {
            return Self::zero();
        }
        let mut outside = PrimeFactors::new();
        let mut inside = BigUint::one();
        for (p, e) in radicand.exponents() {
            let half = e.div_euclid(2);
            if e.rem_euclid(2) == 1 {
                inside *= p;
            }
            if half != 0 {
                outside.mul_int(u64::from(p), half);
            }
        }
        let (num, den) = outside.to_ratio();
        let mut q = coeff * BigRational::new(BigInt::from(num), BigInt::from(den));
        if sign < 0 {
            q = -q;
        }
        ExactValue { q, p: inside }
    }

    /// `sqrt(n)` for a nonnegative integer.
    pub fn sqrt_int(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let mut f = PrimeFactors::new();
        f.mul_int(n, 1);
        Self::from_factored(1, BigRational::one(), &f)
    }

    /// Rational coefficient `q`.
    pub fn coefficient(&self) -> &BigRational {
        &self.q
    }

    /// Square-free radicand `p`.
    pub fn radicand(&self) -> &BigUint {
        &self.p
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.q.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// The exact square `q^2 p`.
    pub fn square(&self) -> BigRational {
        &self.q * &self.q * BigRational::from_integer(BigInt::from(self.p.clone()))
    }

    pub fn abs(&self) -> Self {
        ExactValue { q: self.q.abs(), p: self.p.clone() }
    }

    /// Nearest double: the square is rounded once, then square-rooted, which
    /// keeps the result within one ulp of the correctly rounded value.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let sq = self.square().to_f64().unwrap_or(f64::INFINITY);
        f64::from(self.signum()) * sq.sqrt()
    }
}

impl Default for ExactValue {
    fn default() -> Self {
        Self::zero()
    }
}

impl Mul for &ExactValue {
    type Output = ExactValue;

    fn mul(self, rhs: &ExactValue) -> ExactValue {
        if self.is_zero() || rhs.is_zero() {
            return ExactValue::zero();
        }
        let g = self.p.gcd(&rhs.p);
        let p = (&self.p / &g) * (&rhs.p / &g);
        let q = &self.q * &rhs.q * BigRational::from_integer(BigInt::from(g));
        ExactValue { q, p }
    }
}

impl Mul for ExactValue {
    type Output = ExactValue;

    fn mul(self, rhs: ExactValue) -> ExactValue {
        &self * &rhs
    }
}

impl Neg for ExactValue {
    type Output = ExactValue;

    fn neg(self) -> ExactValue {
        ExactValue { q: -self.q, p: self.p }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_one() {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}*sqrt({})", self.q, self.p)
        }
    }
}

/// Exact sum of `q_i sqrt(p_i)` grouped by square-free radicand.
///
/// Square roots of distinct square-free integers are linearly independent
/// over the rationals, so the sum is zero iff every group coefficient is.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactSum {
    terms: BTreeMap<BigUint, BigRational>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: &ExactValue) {
        if v.is_zero() {
            return;
        }
        let slot = self.terms.entry(v.p.clone()).or_insert_with(BigRational::zero);
        *slot += &v.q;
        if slot.is_zero() {
            self.terms.remove(&v.p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The sum as a single value, when it has at most one radicand group.
    pub fn as_single(&self) -> Option<ExactValue> {
        match self.terms.len() {
            0 => Some(ExactValue::zero()),
            1 => {
                let (p, q) = self.terms.iter().next().unwrap();
                Some(ExactValue { q: q.clone(), p: p.clone() })
            }
            _ => None,
        }
    }

    pub fn groups(&self) -> usize {
        self.terms.len()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, q)| ExactValue { q: q.clone(), p: p.clone() }.to_f64())
            .sum()
    }
}

impl<'a> FromIterator<&'a ExactValue> for ExactSum {
    fn from_iter<I: IntoIterator<Item = &'a ExactValue>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn normal_form_moves_squares_out() {
        let v = ExactValue::sqrt_int(72); // 6 sqrt 2
        assert_eq!(v.coefficient(), &rat(6, 1));
        assert_eq!(v.radicand(), &BigUint::from(2u32));
        let mut f = PrimeFactors::new();
        f.mul_int(3, -3); // 3^-3 -> (1/9) sqrt 3
        let w = ExactValue::from_factored(-1, rat(1, 1), &f);
        assert_eq!(w.coefficient(), &rat(-1, 9));
        assert_eq!(w.radicand(), &BigUint::from(3u32));
    }

    #[test]
    fn multiplication_is_exact() {
        let a = ExactValue::sqrt_int(6);
        let b = ExactValue::sqrt_int(10);
        let p = &a * &b; // sqrt 60 = 2 sqrt 15
        assert_eq!(p, {
            let mut v = ExactValue::sqrt_int(15);
            v.q *= rat(2, 1);
            v
        });
        assert_eq!(&ExactValue::sqrt_int(7) * &ExactValue::sqrt_int(7), ExactValue::from_int(7));
        assert!((&a * &ExactValue::zero()).is_zero());
    }

    #[test]
    fn to_f64_is_close() {
        let v = ExactValue::sqrt_int(2);
        assert_eq!(v.to_f64(), std::f64::consts::SQRT_2);
        assert_eq!((-ExactValue::sqrt_int(9)).to_f64(), -3.0);
        // huge numerator and denominator still convert
        let big = BigInt::from(10u32).pow(400);
        let q = BigRational::new(big.clone() + 1u32, big * 3u32);
        let w = ExactValue::from_rational(q);
        assert!((w.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn sums_group_by_radicand() {
        let a = ExactValue::sqrt_int(2);
        let b = ExactValue::sqrt_int(8); // 2 sqrt 2
        let c = ExactValue::sqrt_int(3);
        let mut s = ExactSum::new();
        s.add(&b);
        s.add(&(-a.clone()));
        s.add(&(-a));
        assert!(s.is_zero());
        s.add(&c);
        assert_eq!(s.as_single(), Some(c));
    }
}
