//! Reference-table ingestion, cross-checking, and plain-text reports.

use std::fmt::Write as _;
use std::io::BufRead;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorize, Factorization};
use crate::certify::{Admissible, Certificate, Status, TableReport};
use crate::curves::{minimal_model, CurveModel};
use crate::error::Result;
use crate::local_invariants::{conductor, LocalData};
use crate::lseries::LRatioResult;
use crate::torsion_galois::{torsion_subgroup, TorsionStructure};

/// One record of an external curve table, e.g.
/// `15 A 1 [1,1,1,-10,-10] 0 8` (conductor, class, index, a-invariants,
/// rank, torsion order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExternalCurveRow {
    pub line: usize,
    pub conductor: u64,
    pub class: String,
    pub index: u32,
    pub curve: CurveModel,
    pub rank: Option<u32>,
    pub torsion: Option<u64>,
}

impl ExternalCurveRow {
    pub fn label(&self) -> String {
        format!(
            "{}{}{}",
            self.conductor,
            self.class.to_lowercase(),
            self.index
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParsedTable {
    pub rows: Vec<ExternalCurveRow>,
    pub diagnostics: Vec<Diagnostic>,
}

fn parse_line(line: &str, number: usize) -> std::result::Result<ExternalCurveRow, String> {
    let open = line.find('[').ok_or("missing '[' before a-invariants")?;
    let close = line[open..]
        .find(']')
        .map(|i| open + i)
        .ok_or("missing ']' after a-invariants")?;
    let head: Vec<&str> = line[..open].split_whitespace().collect();
    let [n, class, index] = head[..] else {
        return Err(format!(
            "expected conductor, class and index before '[', found {} fields",
            head.len()
        ));
    };
    let conductor: u64 = n.parse().map_err(|_| format!("bad conductor {n:?}"))?;
    if !class.chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(format!("bad isogeny class {class:?}"));
    }
    let index: u32 = index
        .parse()
        .map_err(|_| format!("bad curve index {index:?}"))?;

    let parts: Vec<&str> = line[open + 1..close].split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(format!("expected 5 a-invariants, found {}", parts.len()));
    }
    let mut a: [BigRational; 5] = Default::default();
    for (slot, p) in a.iter_mut().zip(&parts) {
        let v: BigInt = p.parse().map_err(|_| format!("bad a-invariant {p:?}"))?;
        *slot = BigRational::from_integer(v);
    }
    let curve = CurveModel::new(a).map_err(|e| e.to_string())?;

    let tail: Vec<&str> = line[close + 1..].split_whitespace().collect();
    if tail.len() > 2 {
        return Err(format!(
            "unexpected trailing fields: {}",
            tail[2..].join(" ")
        ));
    }
    let rank = match tail.first() {
        Some(r) => Some(r.parse().map_err(|_| format!("bad rank {r:?}"))?),
        None => None,
    };
    let torsion = match tail.get(1) {
        Some(t) => Some(t.parse().map_err(|_| format!("bad torsion order {t:?}"))?),
        None => None,
    };
    Ok(ExternalCurveRow {
        line: number,
        conductor,
        class: class.to_string(),
        index,
        curve,
        rank,
        torsion,
    })
}

/// Parses a whitespace-separated curve table. Malformed lines become
/// diagnostics; blank lines and `#` comments are skipped.
pub fn parse_curve_table(input: impl BufRead) -> ParsedTable {
    let mut out = ParsedTable::default();
    for (i, line) in input.lines().enumerate() {
        let number = i + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                out.diagnostics.push(Diagnostic {
                    line: number,
                    message: format!("unreadable line: {e}"),
                });
                continue;
            }
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_line(trimmed, number) {
            Ok(row) => out.rows.push(row),
            Err(message) => out.diagnostics.push(Diagnostic {
                line: number,
                message,
            }),
        }
    }
    out
}

pub fn parse_curve_table_str(text: &str) -> ParsedTable {
    parse_curve_table(text.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckRow {
    pub line: usize,
    pub label: String,
    pub conductor_expected: u64,
    pub conductor_computed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_expected: Option<u64>,
    pub torsion_computed: Option<u64>,
    #[serde(rename = "match")]
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Recomputes conductor and torsion order of every row.
pub fn crosscheck(rows: &[ExternalCurveRow]) -> Vec<CrosscheckRow> {
    rows.par_iter()
        .map(|row| {
            let computed = conductor(&row.curve).and_then(|c| {
                let t = torsion_subgroup(&row.curve)?;
                Ok((c.conductor, t.order))
            });
            let (n, t, error) = match computed {
                Ok((n, t)) => (Some(n), Some(t), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            let matches =
                n == Some(row.conductor) && row.torsion.is_none_or(|expected| t == Some(expected));
            CrosscheckRow {
                line: row.line,
                label: row.label(),
                conductor_expected: row.conductor,
                conductor_computed: n,
                torsion_expected: row.torsion,
                torsion_computed: t,
                matches,
                error,
            }
        })
        .collect()
}

/// Everything the `invariants` command prints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantsReport {
    pub model: CurveModel,
    pub minimal_model: CurveModel,
    pub discriminant: String,
    pub discriminant_factorization: Factorization,
    pub j_invariant: String,
    pub conductor: u64,
    pub conductor_factorization: Factorization,
    pub local: Vec<LocalData>,
    pub tamagawa_product: u64,
    pub torsion: TorsionStructure,
}

pub fn invariants_report(e: &CurveModel) -> Result<InvariantsReport> {
    let min = minimal_model(e)?;
    let disc: BigInt = min.discriminant().to_integer();
    let report = conductor(&min)?;
    let torsion = torsion_subgroup(&min)?;
    let disc_fac = factorize(disc.clone())?;
    Ok(InvariantsReport {
        model: e.clone(),
        minimal_model: min.clone(),
        discriminant: disc.to_string(),
        discriminant_factorization: disc_fac,
        j_invariant: min.j_invariant().to_string(),
        conductor: report.conductor,
        conductor_factorization: report.factorization.clone(),
        tamagawa_product: report.tamagawa_product(),
        local: report.local,
        torsion,
    })
}

pub fn invariants_text(r: &InvariantsReport) -> String {
    let sign = if r.discriminant.starts_with('-') {
        "-"
    } else {
        ""
    };
    let mut s = String::new();
    let _ = writeln!(s, "model          {}", r.model);
    let _ = writeln!(s, "minimal model  {}", r.minimal_model);
    let _ = writeln!(
        s,
        "discriminant   {} = {sign}{}",
        r.discriminant, r.discriminant_factorization
    );
    let _ = writeln!(s, "j-invariant    {}", r.j_invariant);
    let _ = writeln!(
        s,
        "conductor      {} = {}",
        r.conductor, r.conductor_factorization
    );
    for l in &r.local {
        let _ = writeln!(
            s,
            "  p = {:<5} {:<6} f = {}  c = {}  v(Δ) = {}  {}",
            l.p,
            l.kodaira.to_string(),
            l.conductor_exponent,
            l.tamagawa,
            l.disc_valuation,
            l.reduction
        );
    }
    let _ = writeln!(s, "tamagawa       {}", r.tamagawa_product);
    let _ = write!(
        s,
        "torsion        {} (order {})",
        r.torsion, r.torsion.order
    );
    s
}

pub fn lratio_text(label: &str, r: &LRatioResult) -> String {
    format!(
        "{label}\n  L(E,1)    {:.12}\n  Ω         {:.12}\n  w         {:+}\n  L/Ω       {}\n  n_max     {}\n  error     {:.1e}",
        r.l_value, r.omega, r.root_number, r.ratio, r.n_max, r.error_bound
    )
}

pub fn certificate_text(c: &Certificate) -> String {
    let mut s = format!(
        "{} twist d = {}, p = {}: {} (path {})\n",
        c.family, c.d, c.p, c.verdict, c.path
    );
    for cond in &c.conditions {
        let mark = match cond.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Undetermined => "????",
        };
        let _ = writeln!(s, "  [{mark}] {:<44} {}", cond.name, cond.evidence);
    }
    if let Some(r) = &c.restatement {
        let _ = writeln!(
            s,
            "  restated: {} -> {} ({})",
            r.statement,
            r.holds,
            if r.agrees { "agrees" } else { "DISAGREES" }
        );
        if let Some(cr) = &r.corrected {
            let _ = writeln!(
                s,
                "  restated with 7 for 5: {} -> {} ({})",
                cr.statement,
                cr.holds,
                if cr.agrees { "agrees" } else { "DISAGREES" }
            );
        }
    }
    s.pop();
    s
}

pub fn admissible_text(a: &Admissible) -> String {
    let mut s = format!("{} twist d = {}: {}", a.family, a.d, a.description);
    if !a.violations.is_empty() {
        let v: Vec<String> = a.violations.iter().map(u64::to_string).collect();
        let _ = write!(s, "\n  inconsistent at p = {}", v.join(","));
    } else {
        let _ = write!(s, "\n  checked against all p <= {}", a.p_max);
    }
    s
}

pub fn table_text(t: &TableReport) -> String {
    let mut s = format!(
        "{:>3}  {:<11} {:<22} {:<22} {:>5} {:>5}  {:<16} {}\n",
        "d", "label", "conductor", "computed", "L/Ω", "calc", "primes", "match"
    );
    for r in &t.rows {
        let _ = writeln!(
            s,
            "{:>3}  {:<11} {:<22} {:<22} {:>5} {:>5}  {:<16} {}{}",
            r.d,
            r.label,
            r.conductor_expected,
            r.conductor_computed,
            r.ratio_expected,
            r.ratio_computed,
            r.admissible_computed,
            if r.matches { "yes" } else { "NO" },
            r.erratum
                .as_ref()
                .map(|e| format!("  [erratum: {e}]"))
                .unwrap_or_default()
        );
    }
    let matched = t.rows.iter().filter(|r| r.matches).count();
    let _ = write!(s, "{}: {matched}/{} rows match", t.family, t.rows.len());
    s
}

pub fn crosscheck_text(rows: &[CrosscheckRow], diagnostics: &[Diagnostic]) -> String {
    let mut s = String::new();
    for d in diagnostics {
        let _ = writeln!(s, "line {}: {}", d.line, d.message);
    }
    for r in rows {
        let fmt_opt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(
            s,
            "line {:<4} {:<10} N {} / {}  tors {} / {}  {}{}",
            r.line,
            r.label,
            r.conductor_expected,
            fmt_opt(r.conductor_computed),
            fmt_opt(r.torsion_expected),
            fmt_opt(r.torsion_computed),
            if r.matches { "ok" } else { "FLAGGED" },
            r.error
                .as_ref()
                .map(|e| format!(" ({e})"))
                .unwrap_or_default()
        );
    }
    let ok = rows.iter().filter(|r| r.matches).count();
    let _ = write!(
        s,
        "{ok}/{} rows agree, {} diagnostics",
        rows.len(),
        diagnostics.len()
    );
    s
}
