//! Family sweeps: one bounding report per family member.

use std::fmt;
use std::str::FromStr;

use brieskorn::invariants::{bounding_report_with, BoundingReport};
use brieskorn::seifert::{family, BrieskornTriple, Family};
use brieskorn::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cache;
use brieskorn::lattice::SearchOptions;

/// Inclusive integer range written `2..6`, `2..=6` or `3`. `5..2` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub start: i64,
    pub end: i64,
}

impl IntRange {
    pub fn iter(self) -> impl Iterator<Item = i64> {
        self.start..=self.end
    }

    pub fn len(self) -> u64 {
        if self.end < self.start {
            0
        } else {
            (self.end as i128 - self.start as i128 + 1) as u64
        }
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("bad range bound {t:?}: {e}"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        Ok(IntRange { start, end })
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..={}", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyName {
    /// Σ(2m−1, 2m, 2m+1)
    SigmaM,
    /// Σ(2m−1, m, 2m+1), the ℤ/2 quotient of Σ(2m−1, 2m, 2m+1)
    SigmaMQuotient,
    /// Σ(p, ps−1, ps+1), p even, s odd
    CassonHarerEven,
    /// Σ(p, ps±1, ps±2), p odd
    CassonHarerOdd,
    /// Σ(r, rs±2, 2r(rs±2) + rs±1)
    Stern,
}

impl FamilyName {
    pub fn label(self) -> &'static str {
        match self {
            FamilyName::SigmaM => "sigma-m",
            FamilyName::SigmaMQuotient => "sigma-m-quotient",
            FamilyName::CassonHarerEven => "casson-harer-even",
            FamilyName::CassonHarerOdd => "casson-harer-odd",
            FamilyName::Stern => "stern",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Sign {
    Plus,
    Minus,
    Both,
}

impl Sign {
    fn choices(self) -> &'static [bool] {
        match self {
            Sign::Plus => &[true],
            Sign::Minus => &[false],
            Sign::Both => &[true, false],
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepParams {
    pub m: Option<IntRange>,
    pub p: Option<IntRange>,
    pub s: Option<IntRange>,
    pub r: Option<IntRange>,
    pub sign: Option<Sign>,
}

/// Largest number of members a single sweep may enumerate.
pub const MAX_MEMBERS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub params: String,
    pub triple: BrieskornTriple,
}

fn need(r: Option<IntRange>, flag: &str, fam: FamilyName) -> Result<IntRange> {
    r.ok_or_else(|| Error::Invalid(format!("{} needs {flag}", fam.label())))
}

/// Lists the valid members of a family over the parameter ranges, in
/// parameter order. Parameter combinations outside the family's domain are
/// skipped.
pub fn members(fam: FamilyName, params: &SweepParams) -> Result<Vec<Member>> {
    let unexpected = |flag: &str| Err(Error::Invalid(format!("{} does not take {flag}", fam.label())));
    let mut raw: Vec<(String, Result<BrieskornTriple>)> = Vec::new();
    let mut total: u64 = 1;
    let mut count = |r: IntRange| -> Result<()> {
        total = total.saturating_mul(r.len());
        if total > MAX_MEMBERS {
            Err(Error::Invalid(format!("sweep has more than {MAX_MEMBERS} members")))
        } else {
            Ok(())
        }
    };
    match fam {
        FamilyName::SigmaM | FamilyName::SigmaMQuotient => {
            if params.p.is_some() || params.s.is_some() || params.r.is_some() || params.sign.is_some() {
                return unexpected("--p/--s/--r/--sign");
            }
            let m = need(params.m, "an m range", fam)?;
            count(m)?;
            for m in m.iter() {
                let t = family(Family::SigmaM { m }).and_then(|t| {
                    if fam == FamilyName::SigmaM {
                        Ok(t)
                    } else {
                        let [a, b, c] = t.as_given();
                        BrieskornTriple::new(a, b / 2, c)
                    }
                });
                raw.push((format!("m={m}"), t));
            }
        }
        FamilyName::CassonHarerEven => {
            if params.m.is_some() || params.r.is_some() || params.sign.is_some() {
                return unexpected("an m range, --r or --sign");
            }
            let (pr, sr) = (need(params.p, "--p", fam)?, need(params.s, "--s", fam)?);
            count(pr)?;
            count(sr)?;
            for p in pr.iter() {
                for s in sr.iter() {
                    raw.push((format!("p={p},s={s}"), family(Family::CassonHarerEven { p, s })));
                }
            }
        }
        FamilyName::CassonHarerOdd | FamilyName::Stern => {
            if params.m.is_some() {
                return unexpected("an m range");
            }
            let stern = fam == FamilyName::Stern;
            let (first, flag) = if stern { (params.r, "--r") } else { (params.p, "--p") };
            if (stern && params.p.is_some()) || (!stern && params.r.is_some()) {
                return unexpected(if stern { "--p" } else { "--r" });
            }
            let (fr, sr) = (need(first, flag, fam)?, need(params.s, "--s", fam)?);
            let signs = params.sign.unwrap_or(Sign::Both).choices();
            count(fr)?;
            count(sr)?;
            count(IntRange { start: 1, end: signs.len() as i64 })?;
            let name = &flag[2..];
            for x in fr.iter() {
                for s in sr.iter() {
                    for &plus in signs {
                        let f = if stern {
                            Family::Stern { r: x, s, plus }
                        } else {
                            Family::CassonHarerOdd { p: x, s, plus }
                        };
                        let sg = if plus { '+' } else { '-' };
                        raw.push((format!("{name}={x},s={s},{sg}"), family(f)));
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for (params, t) in raw {
        match t {
            Ok(triple) if !triple.is_sphere() => out.push(Member { params, triple }),
            Ok(_) => {}
            Err(e) if e.is_internal() => return Err(e),
            Err(_) => {}
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub family: &'static str,
    pub params: String,
    pub report: BoundingReport,
}

pub fn run(fam: FamilyName, params: &SweepParams, cache: &Cache, opts: &SearchOptions) -> Result<Vec<Row>> {
    members(fam, params)?
        .into_par_iter()
        .map(|m| {
            let report = bounding_report_with(&m.triple, &mut |q| cache.find(q, opts))?;
            Ok(Row {
                family: fam.label(),
                params: m.params,
                report,
            })
        })
        .collect()
}

pub const TSV_COLUMNS: [&str; 12] = [
    "family",
    "params",
    "a",
    "b",
    "c",
    "mu",
    "mu_bar",
    "delta",
    "R",
    "donaldson_embeddable",
    "obstructed",
    "reasons",
];

pub fn tsv_record(row: &Row) -> Vec<String> {
    let r = &row.report;
    let embeddable = match r.donaldson_embeddable {
        Some(b) => b.to_string(),
        None => "unknown".to_string(),
    };
    let reasons: Vec<String> = r
        .reasons
        .iter()
        .map(|x| match serde_json::to_value(x.code) {
            Ok(serde_json::Value::String(s)) => s,
            _ => format!("{:?}", x.code),
        })
        .collect();
    vec![
        row.family.to_string(),
        row.params.clone(),
        r.triple[0].to_string(),
        r.triple[1].to_string(),
        r.triple[2].to_string(),
        r.mu.to_string(),
        r.mu_bar.to_string(),
        r.delta.to_string(),
        r.r.to_string(),
        embeddable,
        r.obstructed.to_string(),
        if reasons.is_empty() { "-".to_string() } else { reasons.join(",") },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(s: &str) -> IntRange {
        s.parse().unwrap()
    }

    #[test]
    fn ranges() {
        assert_eq!(range("2..6"), IntRange { start: 2, end: 6 });
        assert_eq!(range("2..=6"), IntRange { start: 2, end: 6 });
        assert_eq!(range("3"), IntRange { start: 3, end: 3 });
        assert_eq!(range("-1..1").len(), 3);
        assert_eq!(range("5..2").len(), 0);
        assert_eq!(range("5..2").iter().count(), 0);
        assert!("a..b".parse::<IntRange>().is_err());
        assert!("".parse::<IntRange>().is_err());
    }

    #[test]
    fn quotient_members() {
        let ms = members(
            FamilyName::SigmaMQuotient,
            &SweepParams {
                m: Some(range("2..4")),
                ..Default::default()
            },
        )
        .unwrap();
        let got: Vec<[i64; 3]> = ms.iter().map(|m| m.triple.as_given()).collect();
        assert_eq!(got, vec![[3, 2, 5], [5, 3, 7], [7, 4, 9]]);
    }

    #[test]
    fn invalid_members_are_skipped() {
        let ms = members(
            FamilyName::CassonHarerEven,
            &SweepParams {
                p: Some(range("1..4")),
                s: Some(range("1..3")),
                ..Default::default()
            },
        )
        .unwrap();
        let got: Vec<&str> = ms.iter().map(|m| m.params.as_str()).collect();
        assert_eq!(got, vec!["p=2,s=3", "p=4,s=1", "p=4,s=3"]);
    }

    #[test]
    fn missing_and_stray_flags() {
        assert!(members(FamilyName::CassonHarerOdd, &SweepParams::default()).is_err());
        let stray = SweepParams {
            m: Some(range("2")),
            p: Some(range("3")),
            ..Default::default()
        };
        assert!(members(FamilyName::SigmaM, &stray).is_err());
        let huge = SweepParams {
            p: Some(range("0..100000")),
            s: Some(range("0..100000")),
            ..Default::default()
        };
        assert!(members(FamilyName::CassonHarerEven, &huge).is_err());
    }
}
