//! Weierstrass models over Q, quadratic twists and global minimal models.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{factorize, is_squarefree_signed, valuation_int};
use crate::error::{Error, Result};
use crate::local_invariants::{self, IntModel};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Standard Weierstrass invariants of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub b2: BigRational,
    pub b4: BigRational,
    pub b6: BigRational,
    pub b8: BigRational,
    pub c4: BigRational,
    pub c6: BigRational,
    pub disc: BigRational,
    pub j: BigRational,
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with rational
/// coefficients. Always nonsingular.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveModel {
    a: [BigRational; 5],
}

/// Computes `(b2, b4, b6, b8, c4, c6, Δ, j)` for a coefficient quintuple.
pub fn invariants(a: &[BigRational; 5]) -> Result<Invariants> {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + rat(4) * a2;
    let b4 = a1 * a3 + rat(2) * a4;
    let b6 = a3 * a3 + rat(4) * a6;
    let b8 = a1 * a1 * a6 + rat(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4 = &b2 * &b2 - rat(24) * &b4;
    let c6 = -(&b2 * &b2 * &b2) + rat(36) * &b2 * &b4 - rat(216) * &b6;
    let disc = -(&b2 * &b2 * &b8) - rat(8) * &b4 * &b4 * &b4 - rat(27) * &b6 * &b6
        + rat(9) * &b2 * &b4 * &b6;
    if disc.is_zero() {
        return Err(Error::SingularCurve);
    }
    let j = &c4 * &c4 * &c4 / &disc;
    Ok(Invariants {
        b2,
        b4,
        b6,
        b8,
        c4,
        c6,
        disc,
        j,
    })
}

impl CurveModel {
    pub fn new(a: [BigRational; 5]) -> Result<Self> {
        invariants(&a)?;
        Ok(CurveModel { a })
    }

    pub fn from_integers(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(rat))
    }

    pub fn coeffs(&self) -> &[BigRational; 5] {
        &self.a
    }

    pub fn invariants(&self) -> Invariants {
        invariants(&self.a).expect("nonsingular by construction")
    }

    pub fn discriminant(&self) -> BigRational {
        self.invariants().disc
    }

    pub fn j_invariant(&self) -> BigRational {
        self.invariants().j
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    pub fn integral_coeffs(&self) -> Option<[BigInt; 5]> {
        if !self.is_integral() {
            return None;
        }
        Some(self.a.clone().map(|c| c.to_integer()))
    }

    pub(crate) fn to_int_model(&self) -> Option<IntModel> {
        self.integral_coeffs().map(IntModel::new)
    }

    pub(crate) fn from_int_model(m: &IntModel) -> Self {
        CurveModel {
            a: m.coeffs().clone().map(BigRational::from_integer),
        }
    }

    /// Applies `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
    pub fn change_coords(
        &self,
        u: &BigRational,
        r: &BigRational,
        s: &BigRational,
        t: &BigRational,
    ) -> Self {
        let [a1, a2, a3, a4, a6] = &self.a;
        let two = rat(2);
        let three = rat(3);
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        let na1 = (a1 + &two * s) / u;
        let na2 = (a2 - s * a1 + &three * r - s * s) / &u2;
        let na3 = (a3 + r * a1 + &two * t) / &u3;
        let na4 =
            (a4 - s * a3 + &two * r * a2 - (t + r * s) * a1 + &three * r * r - &two * s * t) / &u4;
        let na6 = (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / &u6;
        CurveModel {
            a: [na1, na2, na3, na4, na6],
        }
    }

    /// The model `(x, y) -> (u^2 x, u^3 y)`, i.e. coefficients `a_i * u^i`.
    pub fn scaled(&self, u: &BigRational) -> Self {
        let zero = BigRational::zero();
        self.change_coords(&u.recip(), &zero, &zero, &zero)
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.a.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for CurveModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.a.iter().map(|c| c.to_string()))
    }
}

/// Parses `"a1,a2,a3,a4,a6"`, optionally bracketed; entries may be `p/q`.
impl FromStr for CurveModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!(
                "expected 5 a-invariants, got {}",
                parts.len()
            )));
        }
        let mut a: [BigRational; 5] = Default::default();
        for (slot, part) in a.iter_mut().zip(&parts) {
            *slot = parse_rational(part)?;
        }
        CurveModel::new(a)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// The two base curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    X15,
    X21,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::X15, Family::X21];

    pub fn level(self) -> u64 {
        match self {
            Family::X15 => 15,
            Family::X21 => 21,
        }
    }

    /// Cremona label of the base curve.
    pub fn label(self) -> &'static str {
        match self {
            Family::X15 => "15a1",
            Family::X21 => "21a1",
        }
    }

    /// The odd prime of the level other than 3.
    pub fn partner_prime(self) -> u64 {
        match self {
            Family::X15 => 5,
            Family::X21 => 7,
        }
    }

    fn coefficients(self) -> [i64; 5] {
        match self {
            Family::X15 => [1, 1, 1, -10, -10],
            Family::X21 => [1, 0, 0, -4, -1],
        }
    }

    /// j-invariant as a factored rational: 13^3·37^3/(3^4·5^4) and
    /// 193^3/(3^4·7^2).
    pub fn expected_j(self) -> BigRational {
        let pw = |b: i64, e: u32| BigInt::from(b).pow(e);
        match self {
            Family::X15 => BigRational::new(pw(13, 3) * pw(37, 3), pw(3, 4) * pw(5, 4)),
            Family::X21 => BigRational::new(pw(193, 3), pw(3, 4) * pw(7, 2)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X0({})", self.level())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "15" | "x15" | "x0(15)" | "15a1" => Ok(Family::X15),
            "21" | "x21" | "x0(21)" | "21a1" => Ok(Family::X21),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// Global minimal model of 15a1 or 21a1. The embedded coefficients are
/// checked against the expected j-invariant and conductor on first use.
pub fn base_curve(family: Family) -> CurveModel {
    static BASES: OnceLock<[CurveModel; 2]> = OnceLock::new();
    let bases = BASES.get_or_init(|| {
        Family::ALL.map(|fam| {
            let e = CurveModel::from_integers(fam.coefficients()).expect("nonsingular");
            assert_eq!(e.j_invariant(), fam.expected_j(), "j-invariant of {fam}");
            let n = local_invariants::conductor(&e)
                .expect("conductor")
                .conductor;
            assert_eq!(n, fam.level(), "conductor of {fam}");
            assert_eq!(
                minimal_model(&e).expect("minimal"),
                e,
                "{fam} not reduced minimal"
            );
            e
        })
    });
    match family {
        Family::X15 => bases[0].clone(),
        Family::X21 => bases[1].clone(),
    }
}

/// Quadratic twist by `d`: the short model `y^2 = x^3 - 27 c4 d^2 x - 54 c6 d^3`,
/// returned as a reduced global minimal model.
pub fn quadratic_twist(e: &CurveModel, d: i64) -> Result<CurveModel> {
    if d == 0 || !is_squarefree_signed(d) {
        return Err(Error::NotSquarefree(d));
    }
    let inv = e.invariants();
    let d = rat(d);
    let zero = BigRational::zero();
    let twisted = CurveModel::new([
        zero.clone(),
        zero.clone(),
        zero,
        rat(-27) * &inv.c4 * &d * &d,
        rat(-54) * &inv.c6 * &d * &d * &d,
    ])?;
    minimal_model(&twisted)
}

/// Reduced global minimal model: integral, minimal at every prime, with
/// `a1, a3 ∈ {0,1}` and `a2 ∈ {-1,0,1}`.
pub fn minimal_model(e: &CurveModel) -> Result<CurveModel> {
    invariants(e.coeffs())?;
    let mut model = make_integral(e)?
        .to_int_model()
        .expect("integral after scaling");

    let disc = model.disc();
    for (p, v) in factorize(disc.clone())?.pairs().iter().copied() {
        if v >= 12 {
            model = local_invariants::minimize_at(model, p);
        }
    }
    Ok(CurveModel::from_int_model(&reduce_normal_form(model)))
}

/// Scales away denominators with the smallest `u = ∏ p^k`.
fn make_integral(e: &CurveModel) -> Result<CurveModel> {
    if e.is_integral() {
        return Ok(e.clone());
    }
    let mut need: BTreeMap<u64, u32> = BTreeMap::new();
    for (i, c) in e.coeffs().iter().enumerate() {
        let weight = [1u32, 2, 3, 4, 6][i];
        if c.denom().is_one() {
            continue;
        }
        for (p, v) in factorize(c.denom().clone())?.pairs().iter().copied() {
            let k = v.div_ceil(weight);
            let slot = need.entry(p).or_insert(0);
            *slot = (*slot).max(k);
        }
    }
    let u = need
        .iter()
        .fold(BigInt::one(), |acc, (&p, &k)| acc * BigInt::from(p).pow(k));
    Ok(e.scaled(&BigRational::from_integer(u)))
}

fn reduce_normal_form(m: IntModel) -> IntModel {
    let zero = BigInt::zero();
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let s = -m.coeffs()[0].div_floor(&two);
    let m = m.transform(&zero, &s, &zero);
    let r = -(&m.coeffs()[1] + BigInt::one()).div_floor(&three);
    let m = m.transform(&r, &zero, &zero);
    let t = -m.coeffs()[2].div_floor(&two);
    m.transform(&zero, &zero, &t)
}

/// `v_p(Δ)` of an integral model.
pub fn disc_valuation(e: &CurveModel, p: u64) -> Result<u32> {
    let m = e.to_int_model().ok_or(Error::NotIntegral(p))?;
    valuation_int(&m.disc(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_invariants() {
        let e = CurveModel::from_integers([0, 0, 0, -1, 0]).unwrap();
        let inv = e.invariants();
        assert_eq!(inv.disc, rat(64));
        assert_eq!(inv.j, rat(1728));
    }

    #[test]
    fn invariant_identities_hold() {
        for fam in Family::ALL {
            let inv = base_curve(fam).invariants();
            assert_eq!(rat(4) * &inv.b8, &inv.b2 * &inv.b6 - &inv.b4 * &inv.b4);
            assert_eq!(
                rat(1728) * &inv.disc,
                &inv.c4 * &inv.c4 * &inv.c4 - &inv.c6 * &inv.c6
            );
        }
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(
            CurveModel::from_integers([0, 0, 0, 0, 0]),
            Err(Error::SingularCurve)
        );
        assert_eq!(
            "0,0,0,-3,2".parse::<CurveModel>(),
            Err(Error::SingularCurve)
        );
    }

    #[test]
    fn base_curve_j_invariants() {
        assert_eq!(
            base_curve(Family::X15).j_invariant(),
            Family::X15.expected_j()
        );
        assert_eq!(
            base_curve(Family::X21).j_invariant(),
            Family::X21.expected_j()
        );
    }

    #[test]
    fn x21_discriminant_valuations() {
        // v_q(j) = -v_q(Δ) at the multiplicative primes 3 and 7
        let e = base_curve(Family::X21);
        assert_eq!(disc_valuation(&e, 3).unwrap(), 4);
        assert_eq!(disc_valuation(&e, 7).unwrap(), 2);
    }

    #[test]
    fn minimal_model_is_fixed_on_base_curves() {
        for fam in Family::ALL {
            let e = base_curve(fam);
            assert_eq!(minimal_model(&e).unwrap(), e);
        }
    }

    #[test]
    fn minimal_model_scales_down_y2_x3_16() {
        // y^2 = x^3 + 16: u = 2 gives y^2 + y = x^3, v_2(Δ) drops by 12
        let e = CurveModel::from_integers([0, 0, 0, 0, 16]).unwrap();
        let m = minimal_model(&e).unwrap();
        assert_eq!(disc_valuation(&e, 2).unwrap(), 12);
        assert_eq!(disc_valuation(&m, 2).unwrap(), 0);
        assert_eq!(m, CurveModel::from_integers([0, 0, 1, 0, 0]).unwrap());
        assert_eq!(m.j_invariant(), e.j_invariant());
    }

    #[test]
    fn minimal_model_clears_denominators() {
        // 15a1 rescaled by u = 1/6 has denominators
        let e = base_curve(Family::X15);
        let scaled = e.scaled(&BigRational::new(1.into(), 6.into()));
        assert!(!scaled.is_integral());
        assert_eq!(minimal_model(&scaled).unwrap(), e);
    }

    #[test]
    fn trivial_twist_is_identity() {
        for fam in Family::ALL {
            let e = base_curve(fam);
            assert_eq!(quadratic_twist(&e, 1).unwrap(), e);
        }
    }

    #[test]
    fn twist_by_13_has_expected_support() {
        let e = quadratic_twist(&base_curve(Family::X15), 13).unwrap();
        let disc = e.discriminant().to_integer();
        let primes: Vec<u64> = factorize(disc).unwrap().primes().collect();
        assert_eq!(primes, vec![3, 5, 13]);
    }

    #[test]
    fn twist_rejects_non_squarefree() {
        let e = base_curve(Family::X15);
        assert_eq!(quadratic_twist(&e, 12), Err(Error::NotSquarefree(12)));
        assert_eq!(quadratic_twist(&e, 0), Err(Error::NotSquarefree(0)));
    }

    #[test]
    fn parse_and_display() {
        let e: CurveModel = "1,1,1,-10,-10".parse().unwrap();
        assert_eq!(e, base_curve(Family::X15));
        assert_eq!(e.to_string(), "[1,1,1,-10,-10]");
        let f: CurveModel = "[0, 0, 0, -1/4, 1/2]".parse().unwrap();
        assert_eq!(f.coeffs()[3], BigRational::new((-1).into(), 4.into()));
        assert!("1,2,3".parse::<CurveModel>().is_err());
        assert!("1,2,x,4,5".parse::<CurveModel>().is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("15".parse::<Family>().unwrap(), Family::X15);
        assert_eq!("21a1".parse::<Family>().unwrap(), Family::X21);
        assert!("11".parse::<Family>().is_err());
    }
}
