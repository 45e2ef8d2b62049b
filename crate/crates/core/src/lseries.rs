//! Real period, `L(E,1)` by the rapidly convergent series, and exact
//! recognition of the rational number `L(E,1)/Ω`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::valuation;
use crate::curves::{minimal_model, CurveModel};
use crate::error::{Error, Result};
use crate::frobenius::an_coefficients;
use crate::local_invariants::conductor;

/// Numeric knobs for the analytic side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LConfig {
    /// Largest series length allowed before giving up.
    pub nmax_cap: usize,
    /// Maximum distance between `L/Ω` and the recognized rational.
    pub tolerance: f64,
    pub max_denominator: u64,
    /// `|L| < zero_threshold · Ω` counts as a vanishing value.
    pub zero_threshold: f64,
    /// Required agreement of the two functional-equation evaluations.
    pub consistency: f64,
    /// Target for the truncation error of each series.
    pub tail_target: f64,
}

impl Default for LConfig {
    fn default() -> Self {
        LConfig {
            nmax_cap: 1_000_000,
            tolerance: 1e-6,
            max_denominator: 128,
            zero_threshold: 1e-8,
            consistency: 1e-8,
            tail_target: 1e-12,
        }
    }
}

/// Second evaluation point of the functional equation.
const T_ALT: f64 = 1.2;

/// Neumaier's compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let next = ((a + b) / 2.0, (a * b).sqrt());
        a = next.0;
        b = next.1;
    }
    (a + b) / 2.0
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("finite")
}

/// Real roots of the depressed cubic `z^3 - (c4/48) z - c6/864`, which is
/// `(4x^3 + b2 x^2 + 2 b4 x + b6)/4` under `x = z - b2/12`. Sorted
/// descending.
fn depressed_roots(c4: f64, c6: f64, positive_disc: bool) -> Vec<f64> {
    let p = -c4 / 48.0;
    let q = -c6 / 864.0;
    let f = |z: f64| z * z * z + p * z + q;
    let df = |z: f64| 3.0 * z * z + p;
    let polish = |mut z: f64| {
        for _ in 0..4 {
            let d = df(z);
            if d == 0.0 {
                break;
            }
            let step = f(z) / d;
            z -= step;
            if step.abs() <= 1e-17 * z.abs().max(1.0) {
                break;
            }
        }
        z
    };
    let mut roots = if positive_disc {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| polish(m * (theta - 2.0 * PI * k as f64 / 3.0).cos()))
            .collect::<Vec<_>>()
    } else {
        let disc = q * q / 4.0 + p * p * p / 27.0;
        let s = disc.sqrt();
        vec![polish((-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt())]
    };
    roots.sort_by(|a, b| b.partial_cmp(a).expect("finite roots"));
    roots
}

/// Period of the given model's invariant differential over `E(R)`,
/// without minimalizing.
pub fn period_of_model(e: &CurveModel) -> f64 {
    let inv = e.invariants();
    let (c4, c6) = (to_f64(&inv.c4), to_f64(&inv.c6));
    if inv.disc > BigRational::zero() {
        let r = depressed_roots(c4, c6, true);
        let (e1, e2, e3) = (r[0], r[1], r[2]);
        let omega1 = PI / agm((e1 - e3).sqrt(), (e1 - e2).sqrt());
        2.0 * omega1
    } else {
        let z = depressed_roots(c4, c6, false)[0];
        let beta = (3.0 * z * z - c4 / 48.0).sqrt();
        2.0 * PI / agm(2.0 * beta.sqrt(), (2.0 * beta + 3.0 * z).sqrt())
    }
}

/// Real period `Ω` of the minimal model: the full measure of `E(R)`,
/// twice the least real period when `Δ > 0`.
pub fn real_period(e: &CurveModel) -> Result<f64> {
    Ok(period_of_model(&minimal_model(e)?))
}

/// `L(E, 1)` together with the resolved root number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LValue {
    pub value: f64,
    pub root_number: i8,
    pub n_max: usize,
    /// Agreement of the two functional-equation evaluations for the chosen sign.
    pub discrepancy: f64,
    pub tail_bound: f64,
}

/// Bound on `Σ_{n>m} 2 n^{-1/2} e^{-α n}` by a geometric majorant.
fn tail_bound(m: usize, alpha: f64) -> f64 {
    let m = m.max(1) as f64;
    2.0 / m.sqrt() * (-alpha * (m + 1.0)).exp() / (1.0 - (-alpha).exp())
}

/// Number of terms needed for the slowest of the three series.
pub fn series_length(conductor: u64, cfg: &LConfig) -> Result<usize> {
    let alpha = 2.0 * PI / (T_ALT * (conductor as f64).sqrt());
    // tail_bound is decreasing in m; bracket then bisect
    let mut hi = 1usize;
    while tail_bound(hi, alpha) >= cfg.tail_target {
        hi *= 2;
        if hi > 2 * cfg.nmax_cap.max(1) {
            break;
        }
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if tail_bound(mid, alpha) < cfg.tail_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi > cfg.nmax_cap {
        return Err(Error::PrecisionExhausted {
            needed: hi,
            cap: cfg.nmax_cap,
        });
    }
    Ok(hi)
}

fn partial_sum(an: &[i64], sqrt_n: f64, t: f64) -> f64 {
    let step = (-2.0 * PI * t / sqrt_n).exp();
    let mut q = 1.0;
    let mut acc = CompensatedSum::default();
    for (n, &a) in an.iter().enumerate().skip(1) {
        q *= step;
        if q == 0.0 {
            break;
        }
        if a != 0 {
            acc.add(a as f64 / n as f64 * q);
        }
    }
    acc.value()
}

/// `L(E,1) = F(t) + w F(1/t)` with `F(t) = Σ a_n/n e^{-2πnt/√N}`; the sign
/// `w` is the one for which `t = 1` and `t = 1.2` agree.
pub fn l_value_at_1(e: &CurveModel, cfg: &LConfig) -> Result<LValue> {
    let min = minimal_model(e)?;
    let n = conductor(&min)?.conductor;
    let n_max = series_length(n, cfg)?;
    l_value_with_terms(&min, n, n_max, cfg)
}

/// As [`l_value_at_1`] with an explicit conductor and series length.
pub fn l_value_with_terms(
    e: &CurveModel,
    conductor: u64,
    n_max: usize,
    cfg: &LConfig,
) -> Result<LValue> {
    let an = an_coefficients(e, n_max)?;
    let sqrt_n = (conductor as f64).sqrt();
    let f1 = partial_sum(&an, sqrt_n, 1.0);
    let ft = partial_sum(&an, sqrt_n, T_ALT);
    let finv = partial_sum(&an, sqrt_n, 1.0 / T_ALT);

    let plus = (2.0 * f1 - (ft + finv)).abs();
    let minus = (ft - finv).abs();
    let (w, discrepancy) = if plus <= minus {
        (1i8, plus)
    } else {
        (-1, minus)
    };
    if discrepancy >= cfg.consistency {
        return Err(Error::RootNumberAmbiguous { plus, minus });
    }
    // both signs consistent: only acceptable when they give the same value
    if plus < cfg.consistency && minus < cfg.consistency && (2.0 * f1).abs() >= cfg.consistency {
        return Err(Error::RootNumberAmbiguous { plus, minus });
    }
    let alpha = 2.0 * PI / (T_ALT * sqrt_n);
    Ok(LValue {
        value: f1 * (1.0 + w as f64),
        root_number: w,
        n_max,
        discrepancy,
        tail_bound: tail_bound(n_max, alpha),
    })
}

/// Best rational approximation `h/k` with `k <= max_den`, from the
/// continued fraction convergents and the last admissible semiconvergent.
pub fn best_rational(x: f64, max_den: u64) -> BigRational {
    let neg = x < 0.0;
    let mut r = x.abs();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let max_den = max_den.max(1) as i128;
    loop {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            let m = (max_den - k0) / k1;
            let (hs, ks) = (m * h1 + h0, m * k1 + k0);
            let err_s = (x.abs() - hs as f64 / ks as f64).abs();
            let err_c = (x.abs() - h1 as f64 / k1 as f64).abs();
            if m > 0 && err_s < err_c {
                h1 = hs;
                k1 = ks;
            }
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a as f64;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    let h = if neg { -h1 } else { h1 };
    BigRational::new(BigInt::from(h), BigInt::from(k1))
}

fn ser_rational<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LRatioResult {
    pub l_value: f64,
    pub omega: f64,
    pub root_number: i8,
    /// Exact `L(E,1)/Ω`; zero when the value vanishes.
    #[serde(serialize_with = "ser_rational")]
    pub ratio: BigRational,
    pub n_max: usize,
    pub error_bound: f64,
}

/// `L(E,1)/Ω` as an exact rational.
pub fn algebraic_l_ratio(e: &CurveModel, cfg: &LConfig) -> Result<LRatioResult> {
    let min = minimal_model(e)?;
    let omega = period_of_model(&min);
    let l = l_value_at_1(&min, cfg)?;
    let error_bound = l.tail_bound + l.discrepancy;
    let zero = l.root_number == -1 || l.value.abs() < cfg.zero_threshold * omega;
    let ratio = if zero {
        BigRational::zero()
    } else {
        let x = l.value / omega;
        let q = best_rational(x, cfg.max_denominator);
        let err = (x - q.to_f64().expect("small rational")).abs();
        if err >= cfg.tolerance {
            return Err(Error::RecognitionFailed {
                value: x,
                max_den: cfg.max_denominator,
                tolerance: cfg.tolerance,
            });
        }
        q
    };
    Ok(LRatioResult {
        l_value: l.value,
        omega,
        root_number: l.root_number,
        ratio,
        n_max: l.n_max,
        error_bound,
    })
}

/// Nonzero with `v_p = 0`.
pub fn is_p_adic_unit(q: &BigRational, p: u64) -> bool {
    !q.is_zero() && valuation(q, p).map(|v| v == 0).unwrap_or(false)
}
