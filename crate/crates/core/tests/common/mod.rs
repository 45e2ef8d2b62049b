//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use x0twist::curves::{minimal_model, CurveModel};

fn f64_of(q: &BigRational) -> f64 {
    q.to_f64().unwrap()
}

/// Largest real root of `4x^3 + b2 x^2 + 2 b4 x + b6` by bisection on a
/// bracket where the cubic is monotone.
fn largest_root(b2: f64, b4: f64, b6: f64) -> f64 {
    let f = |x: f64| ((4.0 * x + b2) * x + 2.0 * b4) * x + b6;
    let r = 2.0 + b2.abs() + (2.0 * b4).abs().sqrt() + b6.abs().cbrt();
    // critical points: 12x^2 + 2 b2 x + 2 b4 = 0
    let disc = 4.0 * b2 * b2 - 96.0 * b4;
    let (mut lo, mut hi) = if disc <= 0.0 {
        (-r, r)
    } else {
        let c_hi = (-2.0 * b2 + disc.sqrt()) / 24.0;
        let c_lo = (-2.0 * b2 - disc.sqrt()) / 24.0;
        if f(c_hi) <= 0.0 {
            (c_hi, r)
        } else {
            (-r, c_lo)
        }
    };
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `Ω = (2 if Δ > 0 else 1) · 2∫_{e1}^∞ dx / sqrt(4x^3 + b2 x^2 + 2 b4 x + b6)`
/// on the minimal model, by adaptive Simpson after `x = e1 + u^2`,
/// `u = s/(1-s)`.
pub fn quadrature_period(e: &CurveModel) -> f64 {
    let m = minimal_model(e).unwrap();
    let inv = m.invariants();
    let (b2, b4, b6) = (f64_of(&inv.b2), f64_of(&inv.b4), f64_of(&inv.b6));
    let e1 = largest_root(b2, b4, b6);
    let g0 = 12.0 * e1 * e1 + 2.0 * b2 * e1 + 2.0 * b4;
    let g1 = 12.0 * e1 + b2;
    // f(e1 + t) = t (4t^2 + g1 t + g0)
    let integrand = |s: f64| {
        if s >= 1.0 {
            return 1.0;
        }
        let u = s / (1.0 - s);
        let t = u * u;
        let g = (4.0 * t + g1) * t + g0;
        2.0 / g.sqrt() / ((1.0 - s) * (1.0 - s))
    };
    let (fa, fm, fb) = (integrand(0.0), integrand(0.5), integrand(1.0));
    let whole = simpson(0.0, 1.0, fa, fm, fb);
    let omega1 = 2.0 * adaptive(&integrand, 0.0, 1.0, fa, fm, fb, whole, 1e-14, 50);
    if inv.disc > BigRational::zero() {
        2.0 * omega1
    } else {
        omega1
    }
}

/// `a_p` by counting solutions of the Weierstrass equation over all of `F_p^2`.
pub fn naive_ap(e: &CurveModel, p: u64) -> i64 {
    let a: Vec<i64> = e
        .integral_coeffs()
        .unwrap()
        .iter()
        .map(|c| {
            let r = c % BigInt::from(p);
            (r.to_i64().unwrap() + p as i64) % p as i64
        })
        .collect();
    let p = p as i64;
    let mut count = 1;
    for x in 0..p {
        for y in 0..p {
            let lhs = (y * y + a[0] * x * y + a[2] * y) % p;
            let rhs = (((x * x % p) * x) + a[1] * x % p * x + a[3] * x + a[4]) % p;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    p + 1 - count
}

/// Nonsingular integral curves with small random coefficients.
pub fn random_curves(seed: u64, n: usize, want_positive_disc: Option<bool>) -> Vec<CurveModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let a = [
            rng.gen_range(0..=1),
            rng.gen_range(-1..=1),
            rng.gen_range(0..=1),
            rng.gen_range(-60..=60),
            rng.gen_range(-200..=200),
        ];
        let Ok(e) = CurveModel::from_integers(a) else {
            continue;
        };
        let positive = e.discriminant() > BigRational::zero();
        if want_positive_disc.is_none_or(|w| w == positive) {
            out.push(e);
        }
    }
    out
}

/// Legendre symbol by Euler's criterion.
pub fn euler_legendre(a: i64, p: u64) -> i8 {
    let p = p as i128;
    let mut base = (a as i128).rem_euclid(p);
    if base == 0 {
        return 0;
    }
    let mut e = (p - 1) / 2;
    let mut r = 1i128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

pub fn squarefree_up_to(n: i64) -> Vec<i64> {
    (2..=n)
        .filter(|&d| (2..).take_while(|k| k * k <= d).all(|k| d % (k * k) != 0))
        .collect()
}
