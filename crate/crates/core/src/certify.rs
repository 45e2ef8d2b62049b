//! Hypothesis checks for the modularity criteria, the per-prime deep
//! conditions, admissible primes, and table reproduction.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorize, is_prime, is_squarefree_signed, primes_up_to, Factorization};
use crate::curves::{base_curve, minimal_model, quadratic_twist, CurveModel, Family};
use crate::frobenius::{ap, is_ordinary, Reduction};
use crate::local_invariants::{conductor, ConductorReport};
use crate::lseries::{algebraic_l_ratio, is_p_adic_unit, LConfig, LRatioResult};
use crate::tables::{table_rows, TableRow};
use crate::torsion_galois::{mod_l_image, torsion_subgroup, ImageVerdict, TorsionStructure};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    pub lseries: LConfig,
    pub sample_bound: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            lseries: LConfig::default(),
            sample_bound: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Applies,
    DoesNotApply,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Applies => "Applies",
            Verdict::DoesNotApply => "DoesNotApply",
            Verdict::Undetermined => "Undetermined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Path {
    #[serde(rename = "ordinary")]
    Ordinary,
    #[serde(rename = "supersingular")]
    Supersingular,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Path::Ordinary => "ordinary",
            Path::Supersingular => "supersingular",
            Path::NotApplicable => "n/a",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    /// Stable identifier of the hypothesis, e.g. `shallow:d-not-5`.
    pub tag: String,
    pub evidence: String,
    pub status: Status,
}

/// Evaluation of the alternative phrasing of the shallow hypotheses, kept
/// for comparison with the primary list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Restatement {
    pub statement: String,
    pub holds: bool,
    pub agrees: bool,
    /// The same phrasing with the excluded primes `{2,3,7}`, for `X0(21)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected: Option<Box<Restatement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub family: Family,
    pub d: i64,
    pub p: u64,
    pub conditions: Vec<Condition>,
    pub verdict: Verdict,
    pub path: Path,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restatement: Option<Restatement>,
}

impl Certificate {
    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.status == Status::Fail)
    }
}

fn base_primes(family: Family) -> [u64; 3] {
    [2, 3, family.partner_prime()]
}

/// Lazily computed data of one twist, shared across many primes.
pub struct Twist {
    family: Family,
    d: i64,
    cfg: CertifyConfig,
    model: OnceLock<std::result::Result<CurveModel, String>>,
    ratio: OnceLock<std::result::Result<LRatioResult, String>>,
    conductor: OnceLock<std::result::Result<ConductorReport, String>>,
    torsion: OnceLock<std::result::Result<TorsionStructure, String>>,
}

impl Twist {
    pub fn new(family: Family, d: i64, cfg: CertifyConfig) -> Self {
        Twist {
            family,
            d,
            cfg,
            model: OnceLock::new(),
            ratio: OnceLock::new(),
            conductor: OnceLock::new(),
            torsion: OnceLock::new(),
        }
    }

    pub fn model(&self) -> std::result::Result<&CurveModel, String> {
        self.model
            .get_or_init(|| {
                quadratic_twist(&base_curve(self.family), self.d)
                    .and_then(|t| minimal_model(&t))
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn ratio(&self) -> std::result::Result<&LRatioResult, String> {
        self.ratio
            .get_or_init(|| {
                let m = self.model()?;
                algebraic_l_ratio(m, &self.cfg.lseries).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn conductor(&self) -> std::result::Result<&ConductorReport, String> {
        self.conductor
            .get_or_init(|| conductor(self.model()?).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn torsion(&self) -> std::result::Result<&TorsionStructure, String> {
        self.torsion
            .get_or_init(|| torsion_subgroup(self.model()?).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }
}

struct Builder {
    conditions: Vec<Condition>,
    failed: bool,
}

impl Builder {
    fn new() -> Self {
        Builder {
            conditions: Vec::new(),
            failed: false,
        }
    }

    /// Records a condition unless an earlier one failed.
    fn check(&mut self, name: &str, tag: &str, eval: impl FnOnce() -> (Status, String)) {
        if self.failed {
            return;
        }
        let (status, evidence) = eval();
        self.failed = status == Status::Fail;
        self.conditions.push(Condition {
            name: name.to_string(),
            tag: tag.to_string(),
            evidence,
            status,
        });
    }

    fn verdict(&self) -> Verdict {
        if self.failed {
            Verdict::DoesNotApply
        } else if self
            .conditions
            .iter()
            .any(|c| c.status == Status::Undetermined)
        {
            Verdict::Undetermined
        } else {
            Verdict::Applies
        }
    }
}

fn pass_if(ok: bool, evidence: String) -> (Status, String) {
    (if ok { Status::Pass } else { Status::Fail }, evidence)
}

fn gcd(d: i64, m: u64) -> u64 {
    (d.unsigned_abs()).gcd(&m)
}

fn unit_condition(twist: &Twist, p: u64) -> (Status, String) {
    match twist.ratio() {
        Ok(r) => pass_if(is_p_adic_unit(&r.ratio, p), format!("L/Ω = {}", r.ratio)),
        Err(e) => (Status::Fail, format!("L/Ω unavailable: {e}")),
    }
}

/// Structural part of the alternative phrasing: `d ≠ 5` (resp. `7 ∤ d`),
/// for `X0(15)` also `(d,3) = 1` or `(d,5) = 1`, and `p ∤ (excluded)·d`.
fn restated_structure(family: Family, d: i64, p: u64, excluded: [u64; 3]) -> bool {
    let p_ok = !excluded.contains(&p) && d % p as i64 != 0;
    match family {
        Family::X15 => d != 5 && (gcd(d, 3) == 1 || gcd(d, 5) == 1) && p_ok,
        Family::X21 => d % 7 != 0 && p_ok,
    }
}

fn restatement(family: Family, d: i64, p: u64, unit: bool, primary: Verdict) -> Restatement {
    let primary_holds = primary == Verdict::Applies;
    let eval = |excluded: [u64; 3]| -> (bool, String) {
        let set = excluded.map(|q| q.to_string()).join("·");
        let lead = match family {
            Family::X15 => "d ≠ 5; (d,3)=1 or (d,5)=1".to_string(),
            Family::X21 => "7 ∤ d".to_string(),
        };
        let statement = format!("{lead}; p ∤ {set}·d; L/Ω a p-adic unit");
        (
            restated_structure(family, d, p, excluded) && unit,
            statement,
        )
    };
    match family {
        Family::X15 => {
            let (holds, statement) = eval([2, 3, 5]);
            Restatement {
                statement,
                holds,
                agrees: holds == primary_holds,
                corrected: None,
            }
        }
        Family::X21 => {
            let (holds, statement) = eval([2, 3, 5]);
            let (c_holds, c_statement) = eval([2, 3, 7]);
            Restatement {
                statement,
                holds,
                agrees: holds == primary_holds,
                corrected: Some(Box::new(Restatement {
                    statement: c_statement,
                    holds: c_holds,
                    agrees: c_holds == primary_holds,
                    corrected: None,
                })),
            }
        }
    }
}

/// Shallow hypotheses for the twist by `d` at `p`.
pub fn check_theorem(family: Family, d: i64, p: u64) -> Certificate {
    check_theorem_in(&Twist::new(family, d, CertifyConfig::default()), p)
}

pub fn check_theorem_in(twist: &Twist, p: u64) -> Certificate {
    let (family, d) = (twist.family, twist.d);
    let q = family.partner_prime();
    let mut b = Builder::new();
    b.check("p prime", "input:p-prime", || {
        pass_if(is_prime(p), format!("p = {p}"))
    });
    b.check("d squarefree and d > 1", "shallow:d-squarefree", || {
        pass_if(d > 1 && is_squarefree_signed(d), format!("d = {d}"))
    });
    match family {
        Family::X15 => b.check("d ≠ 5", "shallow:d-not-5", || {
            pass_if(d != 5, format!("d = {d}"))
        }),
        Family::X21 => b.check("7 ∤ d", "shallow:7-not-dividing-d", || {
            pass_if(d % 7 != 0, format!("d mod 7 = {}", d % 7))
        }),
    }
    b.check(
        &format!("(d,3p) = 1 or (d,{q}p) = 1"),
        "shallow:coprimality",
        || {
            let g3 = gcd(d, 3 * p);
            let gq = gcd(d, q * p);
            pass_if(
                g3 == 1 || gq == 1,
                format!("(d,3p) = {g3}, (d,{q}p) = {gq}"),
            )
        },
    );
    let excluded = base_primes(family);
    b.check(
        &format!("p ∉ {{2,3,{q}}}"),
        "shallow:p-not-excluded",
        || pass_if(!excluded.contains(&p), format!("p = {p}")),
    );
    b.check("L/Ω is a p-adic unit", "shallow:unit", || {
        unit_condition(twist, p)
    });
    let verdict = b.verdict();
    let restatement = (d > 1 && is_squarefree_signed(d) && is_prime(p)).then(|| {
        let needs_unit = restated_structure(family, d, p, [2, 3, 5])
            || restated_structure(family, d, p, [2, 3, 7]);
        let unit = needs_unit
            && twist
                .ratio()
                .map(|r| is_p_adic_unit(&r.ratio, p))
                .unwrap_or(false);
        restatement(family, d, p, unit, verdict)
    });
    Certificate {
        family,
        d,
        p,
        conditions: b.conditions,
        verdict,
        path: Path::NotApplicable,
        restatement,
    }
}

/// Shallow hypotheses followed by the per-prime conditions that make
/// `E(Q_∞)` finite for the twist.
pub fn deep_certificate(family: Family, d: i64, p: u64, cfg: &CertifyConfig) -> Certificate {
    deep_certificate_in(&Twist::new(family, d, *cfg), p)
}

pub fn deep_certificate_in(twist: &Twist, p: u64) -> Certificate {
    let shallow = check_theorem_in(twist, p);
    if shallow.verdict != Verdict::Applies {
        return Certificate {
            verdict: Verdict::DoesNotApply,
            ..shallow
        };
    }
    let mut b = Builder::new();
    b.conditions = shallow.conditions;
    let model = match twist.model() {
        Ok(m) => m.clone(),
        Err(e) => {
            b.check("twist model", "deep:model", || (Status::Fail, e));
            return finish(twist, p, b, Path::NotApplicable, shallow.restatement);
        }
    };
    let report = match twist.conductor() {
        Ok(r) => r.clone(),
        Err(e) => {
            b.check("conductor", "deep:conductor", || (Status::Fail, e));
            return finish(twist, p, b, Path::NotApplicable, shallow.restatement);
        }
    };
    b.check("good reduction at p", "deep:good-reduction", || {
        let good = report.conductor % p != 0;
        let evidence = format!("N = {} = {}", report.conductor, report.factorization);
        if good {
            (Status::Pass, evidence)
        } else {
            (
                Status::Fail,
                format!("internal inconsistency: shallow checks passed but p | N; {evidence}"),
            )
        }
    });
    if b.failed {
        return finish(twist, p, b, Path::NotApplicable, shallow.restatement);
    }
    let a_p = match ap(&model, p) {
        Ok(r) => r.ap,
        Err(e) => {
            b.check("a_p", "deep:ap", || (Status::Fail, e.to_string()));
            return finish(twist, p, b, Path::NotApplicable, shallow.restatement);
        }
    };
    let path = match is_ordinary(&model, p) {
        Ok(Reduction::Ordinary) => Path::Ordinary,
        Ok(Reduction::Supersingular) => Path::Supersingular,
        Err(e) => {
            b.check("reduction type", "deep:reduction", || {
                (Status::Fail, e.to_string())
            });
            return finish(twist, p, b, Path::NotApplicable, shallow.restatement);
        }
    };
    let sample_bound = twist.cfg.sample_bound;
    let surjective = |b: &mut Builder, tag: &str| {
        b.check(
            "mod-p representation surjective",
            tag,
            || match mod_l_image(&model, p, sample_bound) {
                Ok(v) => {
                    let w = v.witnesses;
                    let evidence = format!("{} (witnesses {w}, bound {sample_bound})", v.verdict);
                    match v.verdict {
                        ImageVerdict::Surjective => (Status::Pass, evidence),
                        ImageVerdict::Undetermined => (Status::Undetermined, evidence),
                    }
                }
                Err(e) => (Status::Fail, e.to_string()),
            },
        )
    };
    match path {
        Path::Ordinary => {
            b.check("ordinary at p", "ordinary:1-ordinary", || {
                pass_if(a_p % p as i64 != 0, format!("a_p = {a_p}"))
            });
            surjective(&mut b, "ordinary:2-surjective");
            b.check(
                "some q ≠ p with q ‖ N and p ∤ v_q(Δ_min)",
                "ordinary:3-ramified-at-q",
                || ramified_prime(&model, &report, p),
            );
            b.check("L/Ω is a p-adic unit", "ordinary:4-unit", || {
                unit_condition(twist, p)
            });
            b.check("p ∤ #Ẽ(F_p)", "ordinary:5-anomalous", || {
                let count = p as i64 + 1 - a_p;
                pass_if(
                    count % p as i64 != 0,
                    format!("#Ẽ(F_p) = {count}, a_p = {a_p}"),
                )
            });
            b.check(
                "p ∤ #E(Q)_tors",
                "ordinary:6-torsion",
                || match torsion_subgroup(&model) {
                    Ok(t) => pass_if(
                        t.order % p != 0,
                        format!("E(Q)_tors ≅ {t}, order {}", t.order),
                    ),
                    Err(e) => (Status::Fail, e.to_string()),
                },
            );
        }
        Path::Supersingular => {
            b.check("a_p = 0", "supersingular:1-trace-zero", || {
                pass_if(a_p == 0, format!("a_p = {a_p}"))
            });
            surjective(&mut b, "supersingular:2-surjective");
            b.check("L/Ω is a p-adic unit", "supersingular:3-unit", || {
                unit_condition(twist, p)
            });
            b.check("p ∤ Tamagawa product", "supersingular:4-tamagawa", || {
                let c = report.tamagawa_product();
                pass_if(c % p != 0, format!("∏ c_q = {c}"))
            });
        }
        Path::NotApplicable => unreachable!(),
    }
    finish(twist, p, b, path, shallow.restatement)
}

fn finish(
    twist: &Twist,
    p: u64,
    b: Builder,
    path: Path,
    restatement: Option<Restatement>,
) -> Certificate {
    Certificate {
        family: twist.family,
        d: twist.d,
        p,
        verdict: b.verdict(),
        conditions: b.conditions,
        path,
        restatement,
    }
}

fn ramified_prime(model: &CurveModel, report: &ConductorReport, p: u64) -> (Status, String) {
    let disc: BigInt = model.discriminant().to_integer();
    let mut seen = Vec::new();
    for &(q, e) in report.factorization.pairs() {
        if q == p || e != 1 {
            continue;
        }
        let v = crate::arith::valuation_int(&disc, q).unwrap_or(0);
        seen.push(format!("v_{q}(Δ) = {v}"));
        if !(v as u64).is_multiple_of(p) {
            return (Status::Pass, format!("q = {q}, v_{q}(Δ_min) = {v}"));
        }
    }
    (
        Status::Fail,
        if seen.is_empty() {
            "no multiplicative prime q ≠ p".to_string()
        } else {
            seen.join(", ")
        },
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissible {
    pub family: Family,
    pub d: i64,
    /// `None` when `L/Ω` vanishes and no prime is admissible.
    pub excluded: Option<Vec<u64>>,
    pub description: String,
    pub p_max: u64,
    /// Primes `p <= p_max` where the shallow check disagrees with the set.
    pub violations: Vec<u64>,
}

pub fn describe_excluded(excluded: Option<&[u64]>) -> String {
    match excluded {
        None => "none".to_string(),
        Some(set) => {
            let list: Vec<String> = set.iter().map(u64::to_string).collect();
            format!("p ≠ {}", list.join(","))
        }
    }
}

/// The finite set of primes outside which the shallow hypotheses hold
/// (`None` when no prime is admissible), cross-checked against [`check_theorem`] for all `p <= p_max`.
pub fn admissible_primes(family: Family, d: i64, p_max: u64, cfg: &CertifyConfig) -> Admissible {
    admissible_primes_in(&Twist::new(family, d, *cfg), p_max)
}

/// The conditions of [`check_theorem`] that depend on `d` alone.
fn d_admissible(family: Family, d: i64) -> bool {
    let q = family.partner_prime() as i64;
    let structural = match family {
        Family::X15 => d != 5,
        Family::X21 => d % 7 != 0,
    };
    d > 1 && is_squarefree_signed(d) && structural && (d % 3 != 0 || d % q != 0)
}

pub fn admissible_primes_in(twist: &Twist, p_max: u64) -> Admissible {
    let (family, d) = (twist.family, twist.d);
    let excluded = match twist.ratio() {
        Ok(r) if d_admissible(family, d) && !r.ratio.is_zero() => {
            let mut set: BTreeSet<u64> = base_primes(family).into_iter().collect();
            let factor = |n: &BigInt| -> Factorization {
                factorize(n.clone()).unwrap_or_else(|_| Factorization::from_pairs([]))
            };
            set.extend(factor(&BigInt::from(d)).primes());
            set.extend(factor(r.ratio.numer()).primes());
            set.extend(factor(r.ratio.denom()).primes());
            Some(set.into_iter().collect::<Vec<_>>())
        }
        _ => None,
    };
    let violations = primes_up_to(p_max)
        .into_iter()
        .filter(|&p| {
            let expected = excluded.as_ref().is_some_and(|set| !set.contains(&p));
            let applies = check_theorem_in(twist, p).verdict == Verdict::Applies;
            expected != applies
        })
        .collect();
    Admissible {
        family,
        d,
        description: describe_excluded(excluded.as_deref()),
        excluded,
        p_max,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub d: i64,
    pub label: &'static str,
    pub conductor_expected: String,
    pub conductor_computed: String,
    pub conductor_match: bool,
    pub ratio_expected: String,
    pub ratio_computed: String,
    pub ratio_match: bool,
    pub admissible_expected: String,
    pub admissible_computed: String,
    pub admissible_match: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erratum: Option<String>,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub family: Family,
    pub rows: Vec<RowReport>,
}

impl TableReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

fn reproduce_row(family: Family, row: &TableRow, p_max: u64, cfg: &CertifyConfig) -> RowReport {
    let twist = Twist::new(family, row.d, *cfg);
    let expected_n = Factorization::from_pairs(row.conductor.iter().copied());
    let conductor_computed = match twist.conductor() {
        Ok(r) => r.factorization.to_string(),
        Err(e) => format!("error: {e}"),
    };
    let ratio_computed = match twist.ratio() {
        Ok(r) => r.ratio.to_string(),
        Err(e) => format!("error: {e}"),
    };
    let admissible = admissible_primes_in(&twist, p_max);
    let expected_set = (!row.excluded.is_empty()).then_some(row.excluded);
    let admissible_expected = describe_excluded(expected_set);
    let conductor_expected = expected_n.to_string();
    let ratio_expected = row.ratio.to_string();
    let conductor_match = conductor_expected == conductor_computed;
    let ratio_match = ratio_expected == ratio_computed;
    let admissible_match =
        admissible_expected == admissible.description && admissible.violations.is_empty();
    let erratum = row
        .erratum
        .map(|e| format!("printed conductor {}: {}", e.printed_conductor, e.note));
    RowReport {
        d: row.d,
        label: row.label,
        conductor_expected,
        conductor_computed,
        conductor_match,
        ratio_expected,
        ratio_computed,
        ratio_match,
        admissible_expected,
        admissible_computed: admissible.description,
        admissible_match,
        erratum,
        matches: conductor_match && ratio_match && admissible_match,
    }
}

/// Recomputes every embedded row of the table for `family`.
pub fn reproduce_table(family: Family, p_max: u64, cfg: &CertifyConfig) -> TableReport {
    let rows = table_rows(family)
        .par_iter()
        .map(|row| reproduce_row(family, row, p_max, cfg))
        .collect();
    TableReport { family, rows }
}
