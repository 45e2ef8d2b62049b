//! Exact integer and rational helpers: factorization, valuations, the
//! Kronecker symbol and the local data of a real quadratic field.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    /// Builds a factorization from `(prime, exponent)` pairs. Zero exponents
    /// are dropped and the pairs are sorted.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, e) in pairs {
            if e > 0 {
                *map.entry(p).or_insert(0) += e;
            }
        }
        Factorization(map.into_iter().collect())
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.0
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &(p, e)| {
            acc * num_traits::pow(BigInt::from(p), e as usize)
        })
    }
}

impl fmt::Display for Factorization {
    /// Renders as `2^6·3·5`; the empty product renders as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

const TRIAL_LIMIT: u64 = 1 << 20;

/// Factors `|n|`. Trial division with a mod-30 wheel up to 2^20, then
/// Miller-Rabin and Pollard rho for any cofactor left over.
pub fn factorize(n: impl Into<BigInt>) -> Result<Factorization> {
    let n: BigInt = n.into();
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut m = n.abs();
    let mut out: Vec<(u64, u32)> = Vec::new();

    // Strip small primes with big arithmetic until the cofactor fits a u64.
    let mut wheel = Wheel::new();
    let mut next = wheel.next_candidate();
    while m.to_u64().is_none() && next < TRIAL_LIMIT {
        let p = BigInt::from(next);
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((next, e));
        }
        next = wheel.next_candidate();
    }

    if let Some(small) = m.to_u64() {
        factor_u64_from(small, next, wheel, &mut out);
    } else {
        // Cofactor beyond 64 bits with no factor below 2^20.
        let mut big = Vec::new();
        factor_big(m, &mut big);
        for p in big {
            let p = p
                .to_u64()
                .ok_or(Error::Parse(format!("prime factor {p} exceeds 64 bits")))?;
            out.push((p, 1));
        }
    }
    Ok(Factorization::from_pairs(out))
}

struct Wheel {
    idx: usize,
    base: u64,
}

impl Wheel {
    const SMALL: [u64; 3] = [2, 3, 5];
    const OFFSETS: [u64; 8] = [1, 7, 11, 13, 17, 19, 23, 29];

    fn new() -> Self {
        Wheel { idx: 0, base: 0 }
    }

    fn next_candidate(&mut self) -> u64 {
        if self.idx < 3 {
            self.idx += 1;
            return Self::SMALL[self.idx - 1];
        }
        loop {
            let k = self.idx - 3;
            let c = self.base + Self::OFFSETS[k];
            if k == 7 {
                self.idx = 3;
                self.base += 30;
            } else {
                self.idx += 1;
            }
            if c > 1 {
                return c;
            }
        }
    }
}

fn factor_u64_from(mut m: u64, mut cand: u64, mut wheel: Wheel, out: &mut Vec<(u64, u32)>) {
    while m > 1 && cand < TRIAL_LIMIT {
        if cand.saturating_mul(cand) > m {
            out.push((m, 1));
            return;
        }
        let mut e = 0;
        while m.is_multiple_of(cand) {
            m /= cand;
            e += 1;
        }
        if e > 0 {
            out.push((cand, e));
        }
        cand = wheel.next_candidate();
    }
    if m > 1 {
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            if x == 1 {
                continue;
            }
            if is_prime(x) {
                out.push((x, 1));
            } else {
                let f = pollard_rho_u64(x);
                stack.push(f);
                stack.push(x / f);
            }
        }
    }
}

fn pollard_rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn factor_big(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime_big(&n) {
        out.push(n);
        return;
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % &n;
        let (mut x, mut y) = (BigInt::from(2), BigInt::from(2));
        let mut d = BigInt::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(&n);
        }
        if d != n {
            let other = &n / &d;
            factor_big(d, out);
            factor_big(other, out);
            return;
        }
        c += 1;
    }
}

fn is_probable_prime_big(n: &BigInt) -> bool {
    let one = BigInt::one();
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let a = BigInt::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo a prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    factorize(n)
        .map(|f| f.pairs().iter().all(|&(_, e)| e == 1))
        .unwrap_or(false)
}

/// Squarefree test for a signed integer (sign ignored, 0 is not squarefree).
pub fn is_squarefree_signed(n: i64) -> bool {
    is_squarefree(n.unsigned_abs())
}

/// `v_p(n)` for a nonzero integer.
pub fn valuation_int(n: &BigInt, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Ok(v);
        }
        m = q;
        v += 1;
    }
}

/// `v_p(q)` for a nonzero rational in lowest terms.
pub fn valuation(q: &BigRational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let num = valuation_int(q.numer(), p)? as i64;
    let den = valuation_int(q.denom(), p)? as i64;
    Ok(num - den)
}

/// Residue of `n` in `[0, p)`.
pub fn mod_u64(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(d/n)`.
pub fn kronecker(d: i64, n: i64) -> i8 {
    let mut a = d as i128;
    let mut b = n as i128;
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while b % 2 == 0 {
        v += 1;
        b /= 2;
    }
    // (a/2) = 1 for a = ±1 mod 8, -1 for a = ±3 mod 8
    let mut k: i8 = if v % 2 == 0 || matches!(a.rem_euclid(8), 1 | 7) {
        1
    } else {
        -1
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // b is odd and positive; a may be negative (Cohen's binary algorithm).
    loop {
        if a == 0 {
            return if b == 1 { k } else { 0 };
        }
        let mut v = 0;
        while a % 2 == 0 {
            v += 1;
            a /= 2;
        }
        if v % 2 == 1 && matches!(b.rem_euclid(8), 3 | 5) {
            k = -k;
        }
        if a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// Discriminant and ramification data of `Q(sqrt(d))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadFieldData {
    pub d: i64,
    /// Fundamental discriminant.
    pub disc: i64,
    /// Conductor exponent of the quadratic character at each ramified prime.
    pub conductor_exponents: BTreeMap<u64, u32>,
}

impl QuadFieldData {
    pub fn conductor_exponent(&self, p: u64) -> u32 {
        self.conductor_exponents.get(&p).copied().unwrap_or(0)
    }

    /// The quadratic character `n -> (D/n)`.
    pub fn character(&self, n: i64) -> i8 {
        kronecker(self.disc, n)
    }
}

/// Local data of `Q(sqrt(d))` for squarefree `d > 1`.
pub fn quad_field_data(d: i64) -> Result<QuadFieldData> {
    if d <= 1 {
        return Err(Error::Parse(format!("d must be > 1, got {d}")));
    }
    if !is_squarefree_signed(d) {
        return Err(Error::NotSquarefree(d));
    }
    let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
    let mut conductor_exponents = BTreeMap::new();
    match d.rem_euclid(4) {
        2 => {
            conductor_exponents.insert(2, 3);
        }
        3 => {
            conductor_exponents.insert(2, 2);
        }
        _ => {}
    }
    for p in factorize(d)?.primes().filter(|&p| p != 2) {
        conductor_exponents.insert(p, 1);
    }
    Ok(QuadFieldData {
        d,
        disc,
        conductor_exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_legendre(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| (x * x) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(960).unwrap().pairs(), &[(2, 6), (3, 1), (5, 1)]);
        assert!(factorize(1).unwrap().is_empty());
        // 35301 = 3·7·41^2, checked by hand: 3·7 = 21, 41^2 = 1681, 21·1681 = 35301
        assert_eq!(
            factorize(35301).unwrap().pairs(),
            &[(3, 1), (7, 1), (41, 2)]
        );
        assert_eq!(factorize(0), Err(Error::ZeroInput));
        assert_eq!(factorize(-12).unwrap().pairs(), &[(2, 2), (3, 1)]);
    }

    #[test]
    fn factorize_large_cofactors() {
        // two primes above the trial-division limit
        let p = 1_000_003u64;
        let q = 998_244_353u64;
        let n = BigInt::from(p) * BigInt::from(q) * BigInt::from(q);
        let f = factorize(n).unwrap();
        assert_eq!(f.pairs(), &[(p, 1), (q, 2)]);
        let big = BigInt::from(u64::MAX) * BigInt::from(1u64 << 40);
        let f = factorize(big.clone()).unwrap();
        assert_eq!(f.value(), big);
    }

    #[test]
    fn display_factorization() {
        assert_eq!(factorize(960).unwrap().to_string(), "2^6·3·5");
        assert_eq!(factorize(1).unwrap().to_string(), "1");
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(15));
        assert!(!is_squarefree(12));
        assert!(is_squarefree(39));
        assert!(is_squarefree(1));
        assert!(!is_squarefree(0));
    }

    #[test]
    fn valuation_examples() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(valuation(&q(1, 8), 2).unwrap(), -3);
        assert_eq!(valuation(&q(1, 8), 7).unwrap(), 0);
        assert_eq!(valuation(&q(16, 1), 2).unwrap(), 4);
        assert_eq!(valuation(&q(0, 1), 2), Err(Error::ZeroInput));
    }

    #[test]
    fn quad_field_examples() {
        let q = quad_field_data(5).unwrap();
        assert_eq!(q.disc, 5);
        assert_eq!(q.conductor_exponent(2), 0);
        assert_eq!(q.conductor_exponent(5), 1);

        let q = quad_field_data(2).unwrap();
        assert_eq!(q.disc, 8);
        assert_eq!(q.conductor_exponent(2), 3);
        assert_eq!(q.conductor_exponents.len(), 1);

        let q = quad_field_data(3).unwrap();
        assert_eq!(q.disc, 12);
        assert_eq!(q.conductor_exponent(2), 2);
        assert_eq!(q.conductor_exponent(3), 1);

        assert_eq!(quad_field_data(12), Err(Error::NotSquarefree(12)));
    }

    #[test]
    fn kronecker_examples() {
        for n in -20..20 {
            assert_eq!(kronecker(1, n), 1);
        }
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(5, 3), -1);
        assert_eq!(kronecker(12, 6), 0);
    }

    #[test]
    fn kronecker_matches_brute_force_legendre() {
        for p in primes_up_to(200).into_iter().filter(|&p| p > 2) {
            for d in -200i64..=200 {
                if d % p as i64 == 0 {
                    continue;
                }
                assert_eq!(
                    kronecker(d, p as i64),
                    brute_legendre(d, p as i64),
                    "d={d} p={p}"
                );
            }
        }
    }

    #[test]
    fn wheel_yields_primes_in_order() {
        let mut w = Wheel::new();
        let cands: Vec<u64> = (0..12).map(|_| w.next_candidate()).collect();
        assert_eq!(cands, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn primality() {
        let sieve = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), sieve.binary_search(&n).is_ok(), "{n}");
        }
        assert!(is_prime(998_244_353));
        assert!(!is_prime(1_000_003 * 998_244_353));
    }
}
