//! Rational torsion (Lutz–Nagell on a short integral model, bounded by
//! reduction) and a one-sided certifier for surjectivity of mod-l images.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{factorize, is_prime, legendre, mod_u64, mul_mod, primes_up_to};
use crate::curves::{minimal_model, CurveModel};
use crate::error::{Error, Result};
use crate::frobenius::{coeffs_mod, count_points_mod};

/// Affine rational point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `E(Q)_tors ≅ Z/n1 × ... ` with `n1 | n2 | ...`. Generators are points on
/// the minimal model, one per invariant factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionStructure {
    pub invariants: Vec<u64>,
    pub order: u64,
    pub generators: Vec<Point>,
}

impl TorsionStructure {
    pub fn is_two_group(&self) -> bool {
        self.order.is_power_of_two()
    }

    /// Contains `Z/2 × Z/2`, i.e. all 2-torsion is rational.
    pub fn has_full_two_torsion(&self) -> bool {
        self.invariants.len() == 2 && self.invariants[0].is_multiple_of(2)
    }
}

impl fmt::Display for TorsionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return f.write_str("trivial");
        }
        let parts: Vec<String> = self.invariants.iter().map(|n| format!("Z/{n}")).collect();
        f.write_str(&parts.join(" × "))
    }
}

/// `y^2 = x^3 + a x + b` with integral coefficients.
struct ShortModel {
    a: BigInt,
    b: BigInt,
}

type Affine = Option<(BigRational, BigRational)>;

impl ShortModel {
    /// The model `x' = 36x + 3 b2`, `y' = 108 (2y + a1 x + a3)`.
    fn of(e: &CurveModel) -> Self {
        let inv = e.invariants();
        ShortModel {
            a: (-BigRational::from_integer(27.into()) * &inv.c4).to_integer(),
            b: (-BigRational::from_integer(54.into()) * &inv.c6).to_integer(),
        }
    }

    fn rhs(&self, x: &BigInt) -> BigInt {
        x * x * x + &self.a * x + &self.b
    }

    fn add(&self, p: &Affine, q: &Affine) -> Affine {
        let (p, q) = match (p, q) {
            (None, _) => return q.clone(),
            (_, None) => return p.clone(),
            (Some(p), Some(q)) => (p, q),
        };
        let lambda = if p.0 == q.0 {
            if (&p.1 + &q.1).is_zero() {
                return None;
            }
            let three = BigRational::from_integer(3.into());
            (three * &p.0 * &p.0 + BigRational::from_integer(self.a.clone()))
                / (BigRational::from_integer(2.into()) * &p.1)
        } else {
            (&q.1 - &p.1) / (&q.0 - &p.0)
        };
        let x = &lambda * &lambda - &p.0 - &q.0;
        let y = &lambda * (&p.0 - &x) - &p.1;
        Some((x, y))
    }

    /// Order of an integral point if it is torsion. Multiples of a torsion
    /// point stay integral, and no rational torsion point has order above 12.
    fn torsion_order(&self, pt: &Affine) -> Option<u64> {
        let mut acc = pt.clone();
        for k in 1..=12u64 {
            match &acc {
                None => return Some(k),
                Some((x, y)) if !x.is_integer() || !y.is_integer() => return None,
                _ => {}
            }
            acc = self.add(&acc, pt);
        }
        None
    }

    /// All integers `x` with `x^3 + a x + b = c`.
    fn integer_solutions(&self, c: &BigInt) -> Vec<BigInt> {
        let k = &self.b - c;
        let g = |x: &BigInt| x * x * x + &self.a * x + &k;
        let bound: BigInt =
            BigInt::from(2) * (Roots::sqrt(&self.a.abs()) + Roots::cbrt(&k.abs())) + 2;
        let mut roots = Vec::new();
        let push = |x: BigInt, roots: &mut Vec<BigInt>| {
            if g(&x).is_zero() && !roots.contains(&x) {
                roots.push(x);
            }
        };
        if self.a.is_negative() {
            // critical points at ±s, s = sqrt(-a/3) ∈ [c, c+1)
            let c: BigInt = Roots::sqrt(&(-&self.a / BigInt::from(3)));
            for off in -1..=1 {
                push(-&c + off, &mut roots);
                push(&c + off, &mut roots);
            }
            let pieces = [
                (-&bound, -&c - 2, true),
                (-&c + 2, &c - 2, false),
                (&c + 2, bound.clone(), true),
            ];
            for (lo, hi, inc) in pieces {
                if let Some(x) = monotone_root(&g, lo, hi, inc) {
                    push(x, &mut roots);
                }
            }
        } else if let Some(x) = monotone_root(&g, -&bound, bound, true) {
            push(x, &mut roots);
        }
        roots.sort();
        roots
    }

    fn to_curve(&self, e: &CurveModel, pt: &(BigRational, BigRational)) -> Point {
        let inv = e.invariants();
        let [a1, _, a3, _, _] = e.coeffs();
        let x = (&pt.0 - BigRational::from_integer(3.into()) * &inv.b2)
            / BigRational::from_integer(36.into());
        let eta = &pt.1 / BigRational::from_integer(108.into());
        let y = (eta - a1 * &x - a3) / BigRational::from_integer(2.into());
        Point { x, y }
    }
}

/// Integer root of `g` on `[lo, hi]` where `g` is monotone.
fn monotone_root(
    g: &impl Fn(&BigInt) -> BigInt,
    mut lo: BigInt,
    mut hi: BigInt,
    increasing: bool,
) -> Option<BigInt> {
    if lo > hi {
        return None;
    }
    let sign = |x: &BigInt| {
        let v = g(x);
        if increasing {
            v
        } else {
            -v
        }
    };
    if sign(&lo).is_positive() || sign(&hi).is_negative() {
        return None;
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        if sign(&mid).is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    [lo, hi].into_iter().find(|x| g(x).is_zero())
}

/// gcd of `#Ẽ(F_p)` over the first `count` odd primes of good reduction.
pub fn torsion_bound(e: &CurveModel, count: usize) -> Result<u64> {
    let min = minimal_model(e)?;
    let disc: BigInt = min.discriminant().to_integer();
    let mut g = 0u64;
    let mut used = 0;
    for p in (3u64..).filter(|&p| is_prime(p)) {
        if mod_u64(&disc, p) == 0 {
            continue;
        }
        let a = coeffs_mod(&min, p).expect("integral model");
        g = g.gcd(&count_points_mod(a, p));
        used += 1;
        if used >= count {
            break;
        }
    }
    Ok(g)
}

/// Exact `E(Q)_tors`.
pub fn torsion_subgroup(e: &CurveModel) -> Result<TorsionStructure> {
    let min = minimal_model(e)?;
    let short = ShortModel::of(&min);
    let bound = torsion_bound(&min, 10)?;

    // Lutz–Nagell: y = 0 or y^2 | 4a^3 + 27b^2
    let d: BigInt =
        BigInt::from(4) * &short.a * &short.a * &short.a + BigInt::from(27) * &short.b * &short.b;
    let fac = factorize(d.abs())?;
    let mut ys = vec![BigInt::one()];
    for &(p, k) in fac.pairs() {
        let mut next = Vec::with_capacity(ys.len() * (k as usize / 2 + 1));
        for y in &ys {
            let mut v = y.clone();
            for _ in 0..=k / 2 {
                next.push(v.clone());
                v *= p;
            }
        }
        ys = next;
    }
    ys.push(BigInt::zero());
    ys.sort();

    let mut points: Vec<((BigRational, BigRational), u64)> = Vec::new();
    for y in &ys {
        let c = y * y;
        for x in short.integer_solutions(&c) {
            debug_assert_eq!(short.rhs(&x), c);
            let signs: &[i32] = if y.is_zero() { &[1] } else { &[1, -1] };
            for &s in signs {
                let pt = (
                    BigRational::from_integer(x.clone()),
                    BigRational::from_integer(y * s),
                );
                if let Some(ord) = short.torsion_order(&Some(pt.clone())) {
                    points.push((pt, ord));
                }
            }
        }
    }

    let order = points.len() as u64 + 1;
    assert!(
        bound % order == 0,
        "torsion order {order} does not divide reduction bound {bound}"
    );
    let two_torsion = points.iter().filter(|(_, o)| *o == 2).count();
    let (gen, max_ord) = points
        .iter()
        .max_by_key(|(_, o)| *o)
        .map(|(p, o)| (Some(p.clone()), *o))
        .unwrap_or((None, 1));

    let (invariants, generators) = if two_torsion == 3 {
        let m = order / 2;
        debug_assert_eq!(max_ord, m);
        // a 2-torsion point outside <gen>
        let half = multiple(&short, &gen, m / 2);
        let other = points
            .iter()
            .find(|(p, o)| *o == 2 && Some(p) != half.as_ref())
            .map(|(p, _)| p.clone())
            .expect("three 2-torsion points");
        (
            vec![2, m],
            vec![
                short.to_curve(&min, &other),
                short.to_curve(&min, gen.as_ref().expect("nontrivial")),
            ],
        )
    } else if order == 1 {
        (vec![], vec![])
    } else {
        debug_assert_eq!(max_ord, order);
        (
            vec![order],
            vec![short.to_curve(&min, gen.as_ref().expect("nontrivial"))],
        )
    };
    Ok(TorsionStructure {
        invariants,
        order,
        generators,
    })
}

fn multiple(short: &ShortModel, p: &Affine, k: u64) -> Affine {
    let mut acc = None;
    for _ in 0..k {
        acc = short.add(&acc, p);
    }
    acc
}

/// Multiplication by `k` on the curve itself (general Weierstrass law).
pub fn point_multiple(e: &CurveModel, pt: &Point, k: u64) -> Option<Point> {
    let [a1, a2, a3, a4, a6] = e.coeffs();
    let neg = |p: &Point| Point {
        x: p.x.clone(),
        y: -&p.y - a1 * &p.x - a3,
    };
    let add = |p: &Option<Point>, q: &Option<Point>| -> Option<Point> {
        let (p, q) = match (p, q) {
            (None, _) => return q.clone(),
            (_, None) => return p.clone(),
            (Some(p), Some(q)) => (p, q),
        };
        if p.x == q.x && neg(p).y == q.y {
            return None;
        }
        let (lambda, nu) = if p.x == q.x {
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            let den = &two * &p.y + a1 * &p.x + a3;
            let num = three * &p.x * &p.x + &two * a2 * &p.x + a4 - a1 * &p.y;
            let lambda = num / &den;
            let nu = (-(&p.x * &p.x * &p.x) + a4 * &p.x + &two * a6 - a3 * &p.y) / den;
            (lambda, nu)
        } else {
            let lambda = (&q.y - &p.y) / (&q.x - &p.x);
            let nu = (&p.y * &q.x - &q.y * &p.x) / (&q.x - &p.x);
            (lambda, nu)
        };
        let x = &lambda * &lambda + a1 * &lambda - a2 - &p.x - &q.x;
        let y = -(&lambda + a1) * &x - nu - a3;
        Some(Point { x, y })
    };
    let mut acc = None;
    let base = Some(pt.clone());
    for _ in 0..k {
        acc = add(&acc, &base);
    }
    acc
}

/// True iff `4x^3 + b2 x^2 + 2 b4 x + b6` has three rational roots.
pub fn two_torsion_rational(e: &CurveModel) -> Result<bool> {
    let min = minimal_model(e)?;
    let short = ShortModel::of(&min);
    Ok(short.integer_solutions(&BigInt::zero()).len() == 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImageVerdict {
    Surjective,
    Undetermined,
}

impl fmt::Display for ImageVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageVerdict::Surjective => "Surjective",
            ImageVerdict::Undetermined => "Undetermined",
        })
    }
}

/// Smallest prime supplying each exclusion flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Witnesses {
    /// Irreducible characteristic polynomial, nonzero trace.
    pub irreducible: Option<u64>,
    /// Distinct rational eigenvalues, nonzero trace.
    pub split: Option<u64>,
    /// Projective trace outside the exceptional set.
    pub exceptional: Option<u64>,
    /// At `l = 3`: the 3-division polynomial has exactly one root mod `p`,
    /// so Frobenius acts on `P^1(F_3)` as a 3-cycle.
    pub three_cycle: Option<u64>,
}

/// Lists the witnessed flags, e.g. `irreducible 17, split 13`.
impl fmt::Display for Witnesses {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let found: Vec<String> = [
            ("irreducible", self.irreducible),
            ("split", self.split),
            ("exceptional", self.exceptional),
            ("3-cycle", self.three_cycle),
        ]
        .iter()
        .filter_map(|(name, p)| p.map(|p| format!("{name} {p}")))
        .collect();
        if found.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&found.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisImageVerdict {
    pub l: u64,
    pub verdict: ImageVerdict,
    pub witnesses: Witnesses,
    /// Flags that must all be witnessed at this `l`.
    pub required: Vec<&'static str>,
    pub sample_bound: u64,
}

fn flags(t: u64, det: u64, l: u64) -> (bool, bool, bool) {
    let disc = (t * t + 4 * (l - det)) % l;
    let chi = legendre(disc, l);
    let a = t != 0 && chi == -1;
    let b = t != 0 && chi == 1;
    let inv_det = crate::arith::inv_mod(det, l);
    let u = t * t % l * inv_det % l;
    let c = u != 0
        && u != 1
        && u != 2 % l
        && u != 4 % l
        && !(u * u + 1 + 3 * (l - u)).is_multiple_of(l);
    (a, b, c)
}

/// Certifies `ρ_{E,l}` surjective from Frobenius traces at good
/// `p ∤ l·N`, `p <= sample_bound`. Never asserts non-surjectivity.
pub fn mod_l_image(e: &CurveModel, l: u64, sample_bound: u64) -> Result<GaloisImageVerdict> {
    if l < 3 {
        return Err(Error::InvalidL(l));
    }
    if !is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    let min = minimal_model(e)?;
    let disc: BigInt = min.discriminant().to_integer();
    // Over F_3 the split and exceptional flags are vacuous; PGL_2(F_3) ≅ S_4
    // acting on the roots of the 3-division polynomial, and a 4-cycle with a
    // 3-cycle generate S_4.
    let required: Vec<&'static str> = if l == 3 {
        vec!["irreducible", "three_cycle"]
    } else {
        vec!["irreducible", "split", "exceptional"]
    };
    let psi3 = (l == 3).then(|| three_division_poly(&min));
    let mut w = Witnesses::default();
    let complete = |w: &Witnesses| {
        w.irreducible.is_some()
            && if l == 3 {
                w.three_cycle.is_some()
            } else {
                w.split.is_some() && w.exceptional.is_some()
            }
    };
    for p in primes_up_to(sample_bound) {
        if complete(&w) {
            break;
        }
        // p ∤ Δ_min is good reduction
        if p == l || mod_u64(&disc, p) == 0 {
            continue;
        }
        let a = coeffs_mod(&min, p).expect("integral model");
        let a_p = p as i64 + 1 - count_points_mod(a, p) as i64;
        let t = a_p.rem_euclid(l as i64) as u64;
        let (a, b, c) = flags(t, p % l, l);
        if a && w.irreducible.is_none() {
            w.irreducible = Some(p);
        }
        if l == 3 {
            if p > 3 && w.three_cycle.is_none() {
                let f = psi3
                    .as_ref()
                    .expect("l = 3")
                    .each_ref()
                    .map(|c| mod_u64(c, p));
                if quartic_root_count(f, p) == 1 {
                    w.three_cycle = Some(p);
                }
            }
            continue;
        }
        if b && w.split.is_none() {
            w.split = Some(p);
        }
        if c && w.exceptional.is_none() {
            w.exceptional = Some(p);
        }
    }
    Ok(GaloisImageVerdict {
        l,
        verdict: if complete(&w) {
            ImageVerdict::Surjective
        } else {
            ImageVerdict::Undetermined
        },
        witnesses: w,
        required,
        sample_bound,
    })
}

/// `3x^4 + b2 x^3 + 3 b4 x^2 + 3 b6 x + b8`, constant term first.
fn three_division_poly(e: &CurveModel) -> [BigInt; 5] {
    let inv = e.invariants();
    let z = |q: &BigRational| q.to_integer();
    [
        z(&inv.b8),
        BigInt::from(3) * z(&inv.b6),
        BigInt::from(3) * z(&inv.b4),
        z(&inv.b2),
        BigInt::from(3),
    ]
}

fn quartic_root_count(f: [u64; 5], p: u64) -> usize {
    (0..p)
        .filter(|&x| {
            f.iter()
                .rev()
                .fold(0u64, |acc, &c| (mul_mod(acc, x, p) + c) % p)
                == 0
        })
        .count()
}

impl GaloisImageVerdict {
    pub fn is_surjective(&self) -> bool {
        self.verdict == ImageVerdict::Surjective
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{base_curve, quadratic_twist, Family};

    #[test]
    fn base_torsion() {
        for fam in Family::ALL {
            let t = torsion_subgroup(&base_curve(fam)).unwrap();
            assert_eq!(t.invariants, vec![2, 4], "{fam}");
            assert_eq!(t.to_string(), "Z/2 × Z/4");
            let e = minimal_model(&base_curve(fam)).unwrap();
            assert!(point_multiple(&e, &t.generators[1], 4).is_none());
            assert!(point_multiple(&e, &t.generators[1], 2).is_some());
            assert!(point_multiple(&e, &t.generators[0], 2).is_none());
        }
    }

    #[test]
    fn classical_torsion() {
        for (a, expect) in [
            ([0, -1, 1, -10, -20], vec![5]),
            ([0, 0, 1, -1, 0], vec![]),
            ([1, 0, 1, 4, -6], vec![6]),
            ([0, 0, 1, 0, -7], vec![3]),
            ([0, 0, 0, 4, 0], vec![4]),
            ([0, 0, 0, 0, 1], vec![6]),
            ([0, -1, 0, -4, 4], vec![2, 4]),
            ([1, -1, 0, -2, -1], vec![2]),
        ] {
            let e = CurveModel::from_integers(a).unwrap();
            assert_eq!(torsion_subgroup(&e).unwrap().invariants, expect, "{e}");
        }
    }

    #[test]
    fn twist_torsion_contains_two_torsion() {
        let t = torsion_subgroup(&quadratic_twist(&base_curve(Family::X15), 17).unwrap()).unwrap();
        assert!(t.is_two_group());
        assert!(t.has_full_two_torsion());
    }

    #[test]
    fn two_torsion_examples() {
        assert!(two_torsion_rational(&base_curve(Family::X15)).unwrap());
        assert!(
            two_torsion_rational(&quadratic_twist(&base_curve(Family::X21), 5).unwrap()).unwrap()
        );
        let e = CurveModel::from_integers([0, 0, 0, 1, 1]).unwrap();
        assert!(!two_torsion_rational(&e).unwrap());
    }

    #[test]
    fn galois_examples() {
        assert!(mod_l_image(&base_curve(Family::X15), 5, 10_000)
            .unwrap()
            .is_surjective());
        assert!(mod_l_image(&base_curve(Family::X21), 7, 10_000)
            .unwrap()
            .is_surjective());
        let t2 = quadratic_twist(&base_curve(Family::X15), 2).unwrap();
        assert!(mod_l_image(&t2, 3, 10_000).unwrap().is_surjective());
        assert!(matches!(
            mod_l_image(&base_curve(Family::X15), 2, 100),
            Err(Error::InvalidL(2))
        ));
    }

    #[test]
    fn base_curves_small_l() {
        for fam in Family::ALL {
            for l in [3, 5, 7, 11, 13] {
                let v = mod_l_image(&base_curve(fam), l, 10_000).unwrap();
                assert!(v.is_surjective(), "{fam} l={l}: {v:?}");
            }
        }
    }

    #[test]
    fn rational_isogeny_is_never_surjective() {
        // 11a1 has a rational 5-isogeny
        let e = CurveModel::from_integers([0, -1, 1, -10, -20]).unwrap();
        let v = mod_l_image(&e, 5, 10_000).unwrap();
        assert_eq!(v.verdict, ImageVerdict::Undetermined);
        assert!(v.witnesses.irreducible.is_none());
        // 19a1 has a rational 3-torsion point
        let e = CurveModel::from_integers([0, 1, 1, -9, -15]).unwrap();
        assert!(!mod_l_image(&e, 3, 10_000).unwrap().is_surjective());
    }
}
