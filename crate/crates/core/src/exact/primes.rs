//! Prime sieve shared across threads and prime-exponent bookkeeping for
//! products of factorials and small integers.

use std::collections::BTreeMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::One;

struct Sieve {
    bound: u32,
    primes: Vec<u32>,
}

static PRIMES: OnceLock<RwLock<Sieve>> = OnceLock::new();

fn table() -> &'static RwLock<Sieve> {
    PRIMES.get_or_init(|| RwLock::new(sieve(1 << 12)))
}

fn sieve(bound: u32) -> Sieve {
    let n = bound as usize + 1;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 2..n {
        if !composite[i] {
            primes.push(i as u32);
            let mut k = i * i;
            while k < n {
                composite[k] = true;
                k += i;
            }
        }
    }
    Sieve { bound, primes }
}

/// Run `f` over every prime `<= limit`. The table only ever grows; readers
/// share it and growth takes the write lock.
pub(crate) fn with_primes_up_to<R>(limit: u32, f: impl FnOnce(&[u32]) -> R) -> R {
    {
        let guard = table().read().unwrap();
        if guard.bound >= limit {
            let end = guard.primes.partition_point(|&p| p <= limit);
            return f(&guard.primes[..end]);
        }
    }
    {
        let mut guard = table().write().unwrap();
        if guard.bound < limit {
            *guard = sieve(limit.max(guard.bound.saturating_mul(2)));
        }
    }
    let guard = table().read().unwrap();
    let end = guard.primes.partition_point(|&p| p <= limit);
    f(&guard.primes[..end])
}

/// A rational number `prod p^e` held as prime exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimeFactors {
    exps: BTreeMap<u32, i64>,
}

impl PrimeFactors {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.exps.iter().map(|(&p, &e)| (p, e))
    }

    fn bump(&mut self, p: u32, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.exps.entry(p).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exps.remove(&p);
        }
    }

    /// Multiply by `n^power` (`power` may be negative). `n` must be nonzero.
    pub fn mul_int(&mut self, n: u64, power: i64) {
        assert!(n > 0, "cannot factor zero");
        let mut rest = n;
        let limit = (n as f64).sqrt() as u32 + 1;
        with_primes_up_to(limit.max(2), |primes| {
            for &p in primes {
                let p64 = u64::from(p);
                if p64 * p64 > rest {
                    break;
                }
                let mut e = 0;
                while rest.is_multiple_of(p64) {
                    rest /= p64;
                    e += 1;
                }
                self.bump(p, e * power);
            }
        });
        if rest > 1 {
            let p = u32::try_from(rest).expect("prime factor exceeds u32");
            self.bump(p, power);
        }
    }

    /// Multiply by `(n!)^power` using Legendre's formula.
    pub fn mul_factorial(&mut self, n: u32, power: i64) {
        if n < 2 {
            return;
        }
        with_primes_up_to(n, |primes| {
            for &p in primes {
                let mut e = 0i64;
                let mut q = u64::from(n);
                while q > 0 {
                    q /= u64::from(p);
                    e += q as i64;
                }
                self.bump(p, e * power);
            }
        });
    }

    /// Split into `(numerator, denominator)` big integers.
    pub fn to_ratio(&self) -> (BigUint, BigUint) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (&p, &e) in &self.exps {
            let v = BigUint::from(p).pow(e.unsigned_abs() as u32);
            if e > 0 {
                num.push(v);
            } else {
                den.push(v);
            }
        }
        (product(num), product(den))
    }
}

/// Balanced product tree; keeps operand sizes similar.
pub(crate) fn product(mut v: Vec<BigUint>) -> BigUint {
    if v.is_empty() {
        return BigUint::one();
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small_integers() {
        let mut f = PrimeFactors::new();
        f.mul_int(360, 1);
        assert_eq!(f.exponents().collect::<Vec<_>>(), vec![(2, 3), (3, 2), (5, 1)]);
        f.mul_int(12, -1);
        assert_eq!(f.exponents().collect::<Vec<_>>(), vec![(2, 1), (3, 1), (5, 1)]);
        let (n, d) = f.to_ratio();
        assert_eq!((n, d), (BigUint::from(30u32), BigUint::one()));
    }

    #[test]
    fn factorial_matches_product() {
        let mut f = PrimeFactors::new();
        f.mul_factorial(20, 1);
        let (n, _) = f.to_ratio();
        let direct: BigUint = (1u32..=20).map(BigUint::from).product();
        assert_eq!(n, direct);
    }

    #[test]
    fn large_prime_and_growth() {
        let mut f = PrimeFactors::new();
        f.mul_int(1_000_003, 1);
        assert_eq!(f.exponents().collect::<Vec<_>>(), vec![(1_000_003, 1)]);
        let mut g = PrimeFactors::new();
        g.mul_factorial(5000, 1);
        assert_eq!(g.exponents().find(|&(p, _)| p == 4999).map(|x| x.1), Some(1));
    }
}
