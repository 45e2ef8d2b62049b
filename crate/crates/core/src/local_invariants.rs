//! Tate's algorithm: Kodaira symbols, conductor exponents and Tamagawa
//! numbers at every prime, plus the closed-form conductor of a twist of a
//! semistable curve.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{
    factorize, inv_mod, is_prime, is_squarefree, legendre, mod_u64, mul_mod, quad_field_data,
    valuation_int, Factorization,
};
use crate::curves::{minimal_model, CurveModel};
use crate::error::{Error, Result};

/// Kodaira symbol of the special fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Number of irreducible components of the special fibre.
    pub fn components(self) -> u32 {
        match self {
            Kodaira::I0 => 1,
            Kodaira::In(n) => n,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::I0Star => 5,
            Kodaira::InStar(n) => n + 5,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::InStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::Good => "good",
            ReductionKind::SplitMultiplicative => "split-multiplicative",
            ReductionKind::NonsplitMultiplicative => "nonsplit-multiplicative",
            ReductionKind::Additive => "additive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub p: u64,
    pub kodaira: Kodaira,
    pub conductor_exponent: u32,
    pub tamagawa: u32,
    pub reduction: ReductionKind,
    /// `v_p(Δ)` of the model the algorithm ran on.
    pub disc_valuation: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConductorReport {
    pub conductor: u64,
    pub factorization: Factorization,
    pub local: Vec<LocalData>,
}

impl ConductorReport {
    pub fn at(&self, p: u64) -> Option<&LocalData> {
        self.local.iter().find(|l| l.p == p)
    }

    pub fn tamagawa_product(&self) -> u64 {
        self.local.iter().map(|l| l.tamagawa as u64).product()
    }
}

/// Integral Weierstrass model used internally by Tate's algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntModel {
    a: [BigInt; 5],
}

impl IntModel {
    pub(crate) fn new(a: [BigInt; 5]) -> Self {
        IntModel { a }
    }

    pub(crate) fn coeffs(&self) -> &[BigInt; 5] {
        &self.a
    }

    fn a1(&self) -> &BigInt {
        &self.a[0]
    }
    fn a2(&self) -> &BigInt {
        &self.a[1]
    }
    fn a3(&self) -> &BigInt {
        &self.a[2]
    }
    fn a4(&self) -> &BigInt {
        &self.a[3]
    }
    fn a6(&self) -> &BigInt {
        &self.a[4]
    }

    fn b2(&self) -> BigInt {
        self.a1() * self.a1() + 4 * self.a2()
    }
    fn b4(&self) -> BigInt {
        self.a1() * self.a3() + 2 * self.a4()
    }
    fn b6(&self) -> BigInt {
        self.a3() * self.a3() + 4 * self.a6()
    }
    fn b8(&self) -> BigInt {
        let [a1, a2, a3, a4, a6] = &self.a;
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }
    fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }
    fn c6(&self) -> BigInt {
        let b2 = self.b2();
        -(&b2 * &b2 * &b2) + 36 * &b2 * self.b4() - 216 * self.b6()
    }
    pub(crate) fn disc(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// `x = x' + r`, `y = y' + s x' + t`.
    pub(crate) fn transform(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        let [a1, a2, a3, a4, a6] = &self.a;
        IntModel {
            a: [
                a1 + 2 * s,
                a2 - s * a1 + 3 * r - s * s,
                a3 + r * a1 + 2 * t,
                a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
                a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
            ],
        }
    }

    /// Divides `a_i` by `p^i`; the caller guarantees exactness.
    fn scale_down(&self, p: u64) -> Self {
        let mut out = self.a.clone();
        for (i, w) in [1u32, 2, 3, 4, 6].into_iter().enumerate() {
            let pk = bpow(p, w);
            debug_assert!(out[i].is_multiple_of(&pk));
            out[i] = &out[i] / &pk;
        }
        IntModel { a: out }
    }
}

fn divides(p_pow: &BigInt, n: &BigInt) -> bool {
    n.is_multiple_of(p_pow)
}

fn bpow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// Whether `a x^2 + b x + c` has a root mod `p`.
fn quad_has_root(a: &BigInt, b: &BigInt, c: &BigInt, p: u64) -> bool {
    let (a, b, c) = (mod_u64(a, p), mod_u64(b, p), mod_u64(c, p));
    if p == 2 {
        return (0..2).any(|x| (a * x * x + b * x + c) % 2 == 0);
    }
    if a == 0 {
        return b != 0 || c == 0;
    }
    let disc = (mul_mod(b, b, p) + p - mul_mod(4 % p, mul_mod(a, c, p), p)) % p;
    legendre(disc, p) != -1
}

/// Number of distinct roots mod `p` of the monic cubic `x^3 + b x^2 + c x + d`.
fn cubic_root_count(b: &BigInt, c: &BigInt, d: &BigInt, p: u64) -> u32 {
    let (b, c, d) = (mod_u64(b, p), mod_u64(c, p), mod_u64(d, p));
    if p < 1000 {
        return (0..p)
            .filter(|&x| {
                let v = (mul_mod(mul_mod(x, x, p), x, p)
                    + mul_mod(b, mul_mod(x, x, p), p)
                    + mul_mod(c, x, p)
                    + d)
                    % p;
                v == 0
            })
            .count() as u32;
    }
    // deg gcd(x^p - x, f)
    let f = [d, c, b, 1];
    let xp = poly_pow_x(p, &f, p);
    let mut g = vec![xp[0], (xp[1] + p - 1) % p, xp[2]];
    trim(&mut g);
    if g.is_empty() {
        return 3;
    }
    let mut h = f.to_vec();
    while !g.is_empty() {
        let r = poly_rem(&h, &g, p);
        h = g;
        g = r;
    }
    (h.len() - 1) as u32
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1;
        let q = mul_mod(r[k], lead_inv, p);
        for (i, &mi) in m.iter().enumerate() {
            let idx = k - dm + i;
            r[idx] = (r[idx] + p - mul_mod(q, mi, p)) % p;
        }
        trim(&mut r);
    }
    r
}

/// `x^e mod f` for a monic cubic `f`, as three coefficients.
fn poly_pow_x(e: u64, f: &[u64; 4], p: u64) -> [u64; 3] {
    let mulmod = |a: &[u64; 3], b: &[u64; 3]| -> [u64; 3] {
        let mut prod = [0u64; 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] = (prod[i + j] + mul_mod(a[i], b[j], p)) % p;
            }
        }
        let r = poly_rem(&prod, f, p);
        let mut out = [0u64; 3];
        out[..r.len()].copy_from_slice(&r);
        out
    };
    let mut acc = [1, 0, 0];
    let mut base = [0, 1, 0];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base);
        }
        base = mulmod(&base, &base);
        e >>= 1;
    }
    acc
}

pub(crate) enum TateOutcome {
    Minimal(LocalData),
    NonMinimal(IntModel),
}

fn local(p: u64, kodaira: Kodaira, f: u32, c: u32, red: ReductionKind, v: u32) -> TateOutcome {
    TateOutcome::Minimal(LocalData {
        p,
        kodaira,
        conductor_exponent: f,
        tamagawa: c,
        reduction: red,
        disc_valuation: v,
    })
}

/// One pass of Tate's algorithm at `p`. Returns either the local data or a
/// transformed model whose coefficients satisfy `p^i | a_i`.
pub(crate) fn tate_pass(model: &IntModel, p: u64) -> TateOutcome {
    use Kodaira::*;
    use ReductionKind::*;

    let disc = model.disc();
    let n = valuation_int(&disc, p).expect("nonsingular");
    if n == 0 {
        return local(p, I0, 0, 1, Good, 0);
    }
    let pb = BigInt::from(p);
    let p2 = bpow(p, 2);
    let p3 = bpow(p, 3);
    let p4 = bpow(p, 4);
    let zero = BigInt::zero();
    let md = |x: &BigInt| BigInt::from(mod_u64(x, p));

    // Move the singular point of the reduction to (0, 0).
    let m = model;
    let (r, t) = if p == 2 {
        if m.b2().is_even() {
            let r = md(m.a4());
            let t = md(&(&r * (1 + m.a2() + m.a4()) + m.a6()));
            (r, t)
        } else {
            let r = md(m.a3());
            let t = md(&(&r + m.a4()));
            (r, t)
        }
    } else if p == 3 {
        let r = if divides(&pb, &m.b2()) {
            md(&-m.b6())
        } else {
            md(&-(m.b2() * m.b4()))
        };
        let t = md(&(m.a1() * &r + m.a3()));
        (r, t)
    } else {
        let c4 = m.c4();
        let r = if divides(&pb, &c4) {
            md(&(-BigInt::from(inv_mod(12 % p, p)) * m.b2()))
        } else {
            let inv = inv_mod(mod_u64(&(12 * &c4), p), p);
            md(&(-BigInt::from(inv) * (m.c6() + m.b2() * &c4)))
        };
        let t = md(&(-BigInt::from(inv_mod(2, p)) * (m.a1() * &r + m.a3())));
        (r, t)
    };
    let mut m = m.transform(&r, &zero, &t);

    // Multiplicative reduction.
    if !divides(&pb, &m.c4()) {
        let split = if p == 2 {
            quad_has_root(&BigInt::from(1), m.a1(), &-m.a2(), 2)
        } else {
            legendre(mod_u64(&-m.c6(), p), p) == 1
        };
        let (c, kind) = if split {
            (n, SplitMultiplicative)
        } else {
            (
                if n.is_multiple_of(2) { 2 } else { 1 },
                NonsplitMultiplicative,
            )
        };
        return local(p, In(n), 1, c, kind, n);
    }

    if !divides(&p2, m.a6()) {
        return local(p, II, n, 1, Additive, n);
    }
    if !divides(&p3, &m.b8()) {
        return local(p, III, n - 1, 2, Additive, n);
    }
    if !divides(&p3, &m.b6()) {
        let c = if quad_has_root(&BigInt::from(1), &(m.a3() / &pb), &-(m.a6() / &p2), p) {
            3
        } else {
            1
        };
        return local(p, IV, n - 2, c, Additive, n);
    }

    // Now p | a1, a2; p^2 | a3, a4; p^3 | a6.
    let (s, t) = if p == 2 {
        (md(m.a2()), 2 * md(&(m.a6() / 4)))
    } else {
        let inv2 = BigInt::from(inv_mod(2, p));
        (md(&(-m.a1() * &inv2)), -m.a3() * &inv2)
    };
    m = m.transform(&zero, &s, &t);

    let b = m.a2() / &pb;
    let c = m.a4() / &p2;
    let d = m.a6() / &p3;
    let w = 27 * &d * &d - &b * &b * &c * &c + 4 * &b * &b * &b * &d - 18 * &b * &c * &d
        + 4 * &c * &c * &c;
    let x = 3 * &c - &b * &b;

    if !divides(&pb, &w) {
        let roots = cubic_root_count(&b, &c, &d, p);
        return local(p, I0Star, n - 4, 1 + roots, Additive, n);
    }

    if !divides(&pb, &x) {
        // Double root: move it to 0.
        let r = if p == 2 {
            md(&c)
        } else if p == 3 {
            md(&(&b * &c))
        } else {
            let inv = inv_mod(mod_u64(&(2 * &x), p), p);
            md(&((&b * &c - 9 * &d) * BigInt::from(inv)))
        };
        m = m.transform(&(&pb * r), &zero, &zero);
        let (mut ix, mut iy) = (3u32, 3u32);
        let (mut mx, mut my) = (p2.clone(), p2.clone());
        let tamagawa;
        loop {
            let a3t = m.a3() / &my;
            let a6t = m.a6() / (&mx * &my);
            if !divides(&pb, &(&a3t * &a3t + 4 * &a6t)) {
                tamagawa = if quad_has_root(&BigInt::from(1), &a3t, &-&a6t, p) {
                    4
                } else {
                    2
                };
                break;
            }
            let t = if p == 2 {
                &my * md(&a6t)
            } else {
                &my * md(&(-&a3t * BigInt::from(inv_mod(2, p))))
            };
            m = m.transform(&zero, &zero, &t);
            my *= &pb;
            iy += 1;

            let a2t = m.a2() / &pb;
            let a4t = m.a4() / (&pb * &mx);
            let a6t = m.a6() / (&mx * &my);
            if !divides(&pb, &(&a4t * &a4t - 4 * &a6t * &a2t)) {
                tamagawa = if quad_has_root(&a2t, &a4t, &a6t, p) {
                    4
                } else {
                    2
                };
                break;
            }
            let r = if p == 2 {
                &mx * md(&(&a6t * &a2t))
            } else {
                let inv = inv_mod(mod_u64(&(2 * &a2t), p), p);
                &mx * md(&(-&a4t * BigInt::from(inv)))
            };
            m = m.transform(&r, &zero, &zero);
            mx *= &pb;
            ix += 1;
        }
        let k = ix + iy - 5;
        return local(p, InStar(k), n - ix - iy + 1, tamagawa, Additive, n);
    }

    // Triple root: move it to 0.
    let r = if p == 2 {
        md(&b)
    } else if p == 3 {
        md(&-&d)
    } else {
        md(&(-&b * BigInt::from(inv_mod(3, p))))
    };
    m = m.transform(&(&pb * r), &zero, &zero);
    let x3 = m.a3() / &p2;
    let x6 = m.a6() / &p4;
    if !divides(&pb, &(&x3 * &x3 + 4 * &x6)) {
        let c = if quad_has_root(&BigInt::from(1), &x3, &-&x6, p) {
            3
        } else {
            1
        };
        return local(p, IVStar, n - 6, c, Additive, n);
    }
    let t = if p == 2 {
        md(&x6)
    } else {
        md(&(&x3 * BigInt::from(inv_mod(2, p))))
    };
    m = m.transform(&zero, &zero, &(-&p2 * t));
    if !divides(&p4, m.a4()) {
        return local(p, IIIStar, n - 7, 2, Additive, n);
    }
    if !divides(&bpow(p, 6), m.a6()) {
        return local(p, IIStar, n - 8, 1, Additive, n);
    }
    TateOutcome::NonMinimal(m)
}

/// Repeats Tate's algorithm at `p`, scaling by `p` while the model is not
/// minimal there.
pub(crate) fn minimize_at(mut model: IntModel, p: u64) -> IntModel {
    loop {
        match tate_pass(&model, p) {
            TateOutcome::Minimal(_) => return model,
            TateOutcome::NonMinimal(m) => model = m.scale_down(p),
        }
    }
}

/// Local reduction data at `p` of a model that is integral and minimal at `p`.
pub fn tate_local(e: &CurveModel, p: u64) -> Result<LocalData> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pb = BigInt::from(p);
    if e.coeffs().iter().any(|c| c.denom().is_multiple_of(&pb)) {
        return Err(Error::NotIntegral(p));
    }
    // Denominators prime to p are harmless; clear them with a unit at p.
    let model = if e.is_integral() {
        e.to_int_model().expect("integral")
    } else {
        let den = e
            .coeffs()
            .iter()
            .fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        e.scaled(&num_rational::BigRational::from_integer(den))
            .to_int_model()
            .expect("integral after scaling")
    };
    match tate_pass(&model, p) {
        TateOutcome::Minimal(data) => Ok(data),
        TateOutcome::NonMinimal(_) => Err(Error::NotMinimalAtP(p)),
    }
}

/// Global conductor with the local data at every bad prime of the minimal
/// model.
pub fn conductor(e: &CurveModel) -> Result<ConductorReport> {
    let min = minimal_model(e)?;
    let disc = min.discriminant().to_integer();
    let mut local = Vec::new();
    for p in factorize(disc)?.primes() {
        local.push(tate_local(&min, p)?);
    }
    let factorization =
        Factorization::from_pairs(local.iter().map(|l| (l.p, l.conductor_exponent)));
    let conductor = factorization
        .value()
        .to_u64()
        .ok_or_else(|| Error::Parse("conductor exceeds 64 bits".into()))?;
    Ok(ConductorReport {
        conductor,
        factorization,
        local,
    })
}

/// Product of the Tamagawa numbers over all bad primes.
pub fn tamagawa_product(e: &CurveModel) -> Result<u64> {
    Ok(conductor(e)?.tamagawa_product())
}

/// Conductor of the twist of a semistable curve of conductor `n_e` by the
/// character of `Q(sqrt(d))`: `e_p = 2 c_p` where the character ramifies,
/// `v_p(n_e)` elsewhere.
pub fn twisted_conductor_closed_form(n_e: u64, d: i64) -> Result<Factorization> {
    if n_e == 0 || !is_squarefree(n_e) {
        return Err(Error::NotSquarefree(n_e as i64));
    }
    let field = quad_field_data(d)?;
    let base = factorize(n_e)?;
    let mut pairs: Vec<(u64, u32)> = field
        .conductor_exponents
        .iter()
        .map(|(&p, &c)| (p, 2 * c))
        .collect();
    for p in base.primes() {
        if field.conductor_exponent(p) == 0 {
            pairs.push((p, 1));
        }
    }
    Ok(Factorization::from_pairs(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{base_curve, quadratic_twist, Family};

    #[test]
    fn good_prime_of_x15() {
        let l = tate_local(&base_curve(Family::X15), 7).unwrap();
        assert_eq!(l.kodaira, Kodaira::I0);
        assert_eq!(l.conductor_exponent, 0);
        assert_eq!(l.tamagawa, 1);
        assert_eq!(l.reduction, ReductionKind::Good);
    }

    #[test]
    fn multiplicative_primes_of_x15() {
        let e = base_curve(Family::X15);
        let l3 = tate_local(&e, 3).unwrap();
        let l5 = tate_local(&e, 5).unwrap();
        assert!(matches!(l3.kodaira, Kodaira::In(_)));
        assert!(matches!(l5.kodaira, Kodaira::In(_)));
        assert_eq!(l3.tamagawa * l5.tamagawa, 8);
    }

    #[test]
    fn twist_by_3_is_additive_at_3() {
        let e = quadratic_twist(&base_curve(Family::X15), 3).unwrap();
        let l = tate_local(&e, 3).unwrap();
        assert_eq!(l.reduction, ReductionKind::Additive);
        assert_eq!(l.conductor_exponent, 2);
    }

    #[test]
    fn non_minimal_is_rejected() {
        let e = CurveModel::from_integers([0, 0, 0, 0, 16]).unwrap();
        assert_eq!(tate_local(&e, 2), Err(Error::NotMinimalAtP(2)));
        let big =
            base_curve(Family::X15).scaled(&num_rational::BigRational::from_integer(5.into()));
        assert_eq!(tate_local(&big, 5), Err(Error::NotMinimalAtP(5)));
        let e = base_curve(Family::X15).scaled(&num_rational::BigRational::new(1.into(), 3.into()));
        assert_eq!(tate_local(&e, 3), Err(Error::NotIntegral(3)));
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(conductor(&base_curve(Family::X15)).unwrap().conductor, 15);
        assert_eq!(conductor(&base_curve(Family::X21)).unwrap().conductor, 21);
        let e = quadratic_twist(&base_curve(Family::X21), 2).unwrap();
        let r = conductor(&e).unwrap();
        assert_eq!(r.conductor, 1344);
        assert_eq!(r.factorization.pairs(), &[(2, 6), (3, 1), (7, 1)]);
        let e = quadratic_twist(&base_curve(Family::X15), 17).unwrap();
        assert_eq!(conductor(&e).unwrap().conductor, 4335);
    }

    #[test]
    fn classical_conductors() {
        // 11a1, 37a1, 27a1, 32a1, 36a1, 49a1, 64a1, 11a3, 14a1, 24a1
        let cases: [([i64; 5], u64); 10] = [
            ([0, -1, 1, -10, -20], 11),
            ([0, 0, 1, -1, 0], 37),
            ([0, 0, 1, 0, -7], 27),
            ([0, 0, 0, 4, 0], 32),
            ([0, 0, 0, 0, 1], 36),
            ([1, -1, 0, -2, -1], 49),
            ([0, 0, 0, -4, 0], 64),
            ([0, -1, 1, 0, 0], 11),
            ([1, 0, 1, 4, -6], 14),
            ([0, -1, 0, -4, 4], 24),
        ];
        for (a, n) in cases {
            let e = CurveModel::from_integers(a).unwrap();
            assert_eq!(conductor(&e).unwrap().conductor, n, "{a:?}");
        }
    }

    #[test]
    fn tamagawa_products_of_base_curves() {
        assert_eq!(tamagawa_product(&base_curve(Family::X15)).unwrap(), 8);
        assert_eq!(tamagawa_product(&base_curve(Family::X21)).unwrap(), 8);
        let e = quadratic_twist(&base_curve(Family::X15), 2).unwrap();
        let mut t = tamagawa_product(&e).unwrap();
        for q in [2, 3] {
            while t.is_multiple_of(q) {
                t /= q;
            }
        }
        assert_eq!(t, 1);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            twisted_conductor_closed_form(15, 3).unwrap().pairs(),
            &[(2, 4), (3, 2), (5, 1)]
        );
        assert_eq!(
            twisted_conductor_closed_form(21, 5).unwrap().pairs(),
            &[(3, 1), (5, 2), (7, 1)]
        );
        let f = twisted_conductor_closed_form(15, 41).unwrap();
        assert_eq!(f.pairs(), &[(3, 1), (5, 1), (41, 2)]);
        let tate = conductor(&quadratic_twist(&base_curve(Family::X15), 41).unwrap()).unwrap();
        assert_eq!(tate.factorization, f);
        assert_eq!(
            twisted_conductor_closed_form(12, 3),
            Err(Error::NotSquarefree(12))
        );
        assert_eq!(
            twisted_conductor_closed_form(15, 18),
            Err(Error::NotSquarefree(18))
        );
    }

    #[test]
    fn split_and_nonsplit_primes_of_x15() {
        // 15a1: a_3 = -1 (nonsplit I4, c = 2), a_5 = +1 (split I4, c = 4)
        let e = base_curve(Family::X15);
        let l3 = tate_local(&e, 3).unwrap();
        let l5 = tate_local(&e, 5).unwrap();
        assert_eq!(l3.kodaira, Kodaira::In(4));
        assert_eq!(l3.reduction, ReductionKind::NonsplitMultiplicative);
        assert_eq!(l3.tamagawa, 2);
        assert_eq!(l5.kodaira, Kodaira::In(4));
        assert_eq!(l5.reduction, ReductionKind::SplitMultiplicative);
        assert_eq!(l5.tamagawa, 4);
    }

    #[test]
    fn cubic_root_count_large_prime() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        let p = 1_000_003;
        let n = cubic_root_count(&BigInt::from(-6), &BigInt::from(11), &BigInt::from(-6), p);
        assert_eq!(n, 3);
        // cubing is a bijection mod 1_000_037 (= 2 mod 3)
        let n = cubic_root_count(
            &BigInt::zero(),
            &BigInt::zero(),
            &BigInt::from(-2),
            1_000_037,
        );
        assert_eq!(n, 1);
        // (x-5)(x^2+1); p = 3 mod 4 so x^2+1 irreducible
        let n = cubic_root_count(&BigInt::from(-5), &BigInt::from(1), &BigInt::from(-5), p);
        assert_eq!(n, 1);
    }
}
