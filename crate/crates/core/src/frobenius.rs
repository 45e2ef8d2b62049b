//! Frobenius traces, Dirichlet coefficients and ordinary/supersingular
//! classification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{inv_mod, is_prime, mod_u64, mul_mod, pow_mod, primes_up_to};
use crate::curves::{minimal_model, CurveModel};
use crate::error::{Error, Result};
use crate::local_invariants::{conductor, tate_local, ReductionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApRecord {
    pub p: u64,
    pub ap: i64,
    pub kind: ReductionKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Ordinary,
    Supersingular,
}

fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let den = mod_u64(q.denom(), p);
    if den == 0 {
        return None;
    }
    Some(mul_mod(mod_u64(q.numer(), p), inv_mod(den, p), p))
}

/// Coefficients reduced mod `p`; `None` if some denominator is divisible by `p`.
pub(crate) fn coeffs_mod(e: &CurveModel, p: u64) -> Option<[u64; 5]> {
    let mut out = [0u64; 5];
    for (slot, c) in out.iter_mut().zip(e.coeffs()) {
        *slot = rational_mod(c, p)?;
    }
    Some(out)
}

fn disc_mod(e: &CurveModel, p: u64) -> Option<u64> {
    rational_mod(&e.discriminant(), p)
}

/// Quadratic-residue table for an odd prime: `table[x] ∈ {-1, 0, 1}`.
fn residue_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..=(p / 2) {
        t[mul_mod(x, x, p) as usize] = 1;
    }
    t
}

/// `#E(F_p)` including the point at infinity, for a model with good
/// reduction at `p`. One pass over `x` using
/// `(2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6`.
pub(crate) fn count_points_mod(a: [u64; 5], p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = a;
    if p == 2 {
        let mut n = 1;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = (y * y + a1 * x * y + a3 * y) % 2;
                let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % 2;
                if lhs == rhs {
                    n += 1;
                }
            }
        }
        return n;
    }
    let b2 = (mul_mod(a1, a1, p) + mul_mod(4, a2, p)) % p;
    let b4 = (mul_mod(a1, a3, p) + mul_mod(2, a4, p)) % p;
    let b6 = (mul_mod(a3, a3, p) + mul_mod(4, a6, p)) % p;
    let four = 4 % p;
    let two_b4 = mul_mod(2, b4, p);
    let use_table = p <= 1 << 22;
    let table = if use_table {
        residue_table(p)
    } else {
        Vec::new()
    };
    let chi = |v: u64| -> i64 {
        if use_table {
            table[v as usize] as i64
        } else if v == 0 {
            0
        } else if pow_mod(v, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        }
    };
    let mut sum: i64 = 0;
    for x in 0..p {
        // Horner: ((4x + b2) x + 2b4) x + b6
        let mut g = (mul_mod(four, x, p) + b2) % p;
        g = (mul_mod(g, x, p) + two_b4) % p;
        g = (mul_mod(g, x, p) + b6) % p;
        sum += chi(g);
    }
    (p as i64 + 1 + sum) as u64
}

/// `a_p` of a model minimal at `p`.
pub fn ap(e: &CurveModel, p: u64) -> Result<ApRecord> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let good = matches!(disc_mod(e, p), Some(v) if v != 0);
    if good {
        let a = coeffs_mod(e, p).expect("integral at p");
        let count = count_points_mod(a, p);
        return Ok(ApRecord {
            p,
            ap: p as i64 + 1 - count as i64,
            kind: ReductionKind::Good,
        });
    }
    let local = tate_local(e, p)?;
    Ok(ApRecord {
        p,
        ap: bad_ap(local.reduction),
        kind: local.reduction,
    })
}

fn bad_ap(kind: ReductionKind) -> i64 {
    match kind {
        ReductionKind::SplitMultiplicative => 1,
        ReductionKind::NonsplitMultiplicative => -1,
        ReductionKind::Additive => 0,
        ReductionKind::Good => unreachable!("good reduction handled by point counting"),
    }
}

/// Dirichlet coefficients of `L(E, s)`: the returned vector has length
/// `n_max + 1`, entry `n` holding `a_n` (entry 0 is unused and zero).
pub fn an_coefficients(e: &CurveModel, n_max: usize) -> Result<Vec<i64>> {
    let min = minimal_model(e)?;
    let report = conductor(&min)?;
    let primes = primes_up_to(n_max as u64);
    let aps: Vec<i64> = primes
        .par_iter()
        .map(|&p| match report.at(p) {
            Some(l) => bad_ap(l.reduction),
            None => {
                let a = coeffs_mod(&min, p).expect("integral");
                p as i64 + 1 - count_points_mod(a, p) as i64
            }
        })
        .collect();

    let n = n_max;
    let mut a = vec![0i64; n + 1];
    if n == 0 {
        return Ok(a);
    }
    a[1] = 1;
    // smallest prime factor sieve
    let mut spf = vec![0u32; n + 1];
    for &p in &primes {
        let p = p as usize;
        let mut m = p;
        while m <= n {
            if spf[m] == 0 {
                spf[m] = p as u32;
            }
            m += p;
        }
    }
    for (&p, &app) in primes.iter().zip(&aps) {
        let good = report.at(p).is_none();
        let p_us = p as usize;
        let (mut prev2, mut prev) = (1i64, app);
        a[p_us] = app;
        let mut pk = p_us;
        while let Some(next) = pk.checked_mul(p_us).filter(|&v| v <= n) {
            let cur = if good {
                app * prev - p as i64 * prev2
            } else {
                app * prev
            };
            a[next] = cur;
            prev2 = prev;
            prev = cur;
            pk = next;
        }
    }
    for m in 2..=n {
        let p = spf[m] as usize;
        let mut pk = p;
        let mut rest = m / p;
        while rest.is_multiple_of(p) {
            rest /= p;
            pk *= p;
        }
        if rest > 1 {
            a[m] = a[pk] * a[rest];
        }
    }
    Ok(a)
}

/// Ordinary iff `a_p ≢ 0 (mod p)`. Requires `p >= 5` and good reduction.
pub fn is_ordinary(e: &CurveModel, p: u64) -> Result<Reduction> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::SmallPrime(p));
    }
    let min = minimal_model(e)?;
    let disc: BigInt = min.discriminant().to_integer();
    if disc.is_multiple_of(&BigInt::from(p)) {
        return Err(Error::BadReduction(p));
    }
    let rec = ap(&min, p)?;
    if rec.ap.rem_euclid(p as i64) == 0 {
        Ok(Reduction::Supersingular)
    } else {
        Ok(Reduction::Ordinary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{base_curve, quadratic_twist, Family};

    /// Direct double loop over `F_p × F_p`.
    fn naive_count(a: [u64; 5], p: u64) -> u64 {
        let [a1, a2, a3, a4, a6] = a.map(|v| v as u128);
        let p128 = p as u128;
        let mut n = 1;
        for x in 0..p128 {
            let rhs = (x * x % p128 * x + a2 * x % p128 * x + a4 * x + a6) % p128;
            for y in 0..p128 {
                let lhs = (y * y + a1 * x % p128 * y + a3 * y) % p128;
                if lhs == rhs {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn fast_count_matches_naive_on_base_curves() {
        for fam in Family::ALL {
            let e = base_curve(fam);
            for p in primes_up_to(200) {
                if p == 3 || p == 5 || p == 7 {
                    continue;
                }
                let a = coeffs_mod(&e, p).unwrap();
                assert_eq!(count_points_mod(a, p), naive_count(a, p), "{fam} p={p}");
            }
        }
    }

    #[test]
    fn known_traces_of_11a1() {
        // y^2 + y = x^3 - x^2 - 10x - 20: a_2..a_13 = -2, -1, 1, -2, 1, 4
        let e = CurveModel::from_integers([0, -1, 1, -10, -20]).unwrap();
        let got: Vec<i64> = [2, 3, 5, 7, 11, 13]
            .iter()
            .map(|&p| ap(&e, p).unwrap().ap)
            .collect();
        assert_eq!(got, vec![-2, -1, 1, -2, 1, 4]);
    }

    #[test]
    fn bad_primes_of_x15() {
        let e = base_curve(Family::X15);
        let r3 = ap(&e, 3).unwrap();
        assert_eq!(r3.kind, ReductionKind::NonsplitMultiplicative);
        assert_eq!(r3.ap, -1);
        let r5 = ap(&e, 5).unwrap();
        assert_eq!(r5.ap, 1);
        assert_eq!(r5.kind, ReductionKind::SplitMultiplicative);
    }

    #[test]
    fn rational_two_torsion_forces_four_divides_count() {
        let e = base_curve(Family::X15);
        for p in primes_up_to(2000).into_iter().filter(|&p| p > 5) {
            let r = ap(&e, p).unwrap();
            assert_eq!((p as i64 + 1 - r.ap) % 4, 0, "p={p}");
        }
    }

    #[test]
    fn not_minimal_rejected() {
        let e = CurveModel::from_integers([0, 0, 0, 0, 16]).unwrap();
        assert_eq!(ap(&e, 2), Err(Error::NotMinimalAtP(2)));
    }

    #[test]
    fn a1_and_a4() {
        let e = base_curve(Family::X21);
        let a = an_coefficients(&e, 10).unwrap();
        assert_eq!(a[1], 1);
        assert_eq!(a[4], a[2] * a[2] - 2);
        assert_eq!(a[6], a[2] * a[3]);
    }

    /// Dirichlet series as the product of local factors
    /// `1 / (1 - a_p X + p X^2)` (or `1 / (1 - a_p X)`), expanded by power
    /// series division and multiplied out term by term.
    fn euler_product(e: &CurveModel, n: usize) -> Vec<i64> {
        let bad: Vec<u64> = conductor(e).unwrap().local.iter().map(|l| l.p).collect();
        let mut series = vec![0i64; n + 1];
        series[1] = 1;
        for p in primes_up_to(n as u64) {
            let app = ap(e, p).unwrap().ap;
            let q = if bad.contains(&p) { 0 } else { p as i64 };
            // local power series c_k with c_0 = 1, c_k = a_p c_{k-1} - q c_{k-2}
            let mut local = vec![1i64];
            let mut pk = 1usize;
            while pk * p as usize <= n {
                pk *= p as usize;
                let k = local.len();
                let prev = local[k - 1];
                let prev2 = if k >= 2 { local[k - 2] } else { 0 };
                local.push(app * prev - q * prev2);
            }
            let mut next = vec![0i64; n + 1];
            for m in 1..=n {
                if series[m] == 0 {
                    continue;
                }
                let mut pk = 1usize;
                for &c in &local {
                    if m * pk > n {
                        break;
                    }
                    next[m * pk] += series[m] * c;
                    pk *= p as usize;
                }
            }
            series = next;
        }
        series
    }

    #[test]
    fn an_matches_euler_product() {
        for e in [base_curve(Family::X15), base_curve(Family::X21)] {
            let n = 500;
            assert_eq!(an_coefficients(&e, n).unwrap(), euler_product(&e, n));
        }
        let e = quadratic_twist(&base_curve(Family::X15), 6).unwrap();
        assert_eq!(an_coefficients(&e, 300).unwrap(), euler_product(&e, 300));
    }

    #[test]
    fn ordinary_and_supersingular() {
        let e = base_curve(Family::X15);
        assert_eq!(is_ordinary(&e, 3), Err(Error::SmallPrime(3)));
        assert_eq!(is_ordinary(&e, 5), Err(Error::BadReduction(5)));
        for p in primes_up_to(1000).into_iter().filter(|&p| p > 5) {
            let a = ap(&e, p).unwrap().ap;
            let want = if a == 0 {
                Reduction::Supersingular
            } else {
                Reduction::Ordinary
            };
            assert_eq!(is_ordinary(&e, p).unwrap(), want);
        }
    }

    #[test]
    fn smallest_supersingular_prime_of_x15() {
        // scan with the naive counter
        let e = base_curve(Family::X15);
        let first = primes_up_to(1000)
            .into_iter()
            .filter(|&p| p >= 7)
            .find(|&p| {
                let a = coeffs_mod(&e, p).unwrap();
                naive_count(a, p) == p + 1
            })
            .expect("a supersingular prime below 1000");
        assert_eq!(is_ordinary(&e, first).unwrap(), Reduction::Supersingular);
        for p in primes_up_to(first - 1).into_iter().filter(|&p| p >= 7) {
            assert_eq!(is_ordinary(&e, p).unwrap(), Reduction::Ordinary);
        }
    }
}
