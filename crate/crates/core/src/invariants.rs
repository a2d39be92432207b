//! Homology cobordism invariants read off a plumbing presentation, and the
//! combined acyclic-bounding report.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{signature, IntegerMatrix};
use crate::lattice::{find_embedding, DiagonalEmbedding};
use crate::plumbing::{canonical_graph, intersection_matrix, wu_class, PlumbingGraph};
use crate::seifert::{normalize, BrieskornTriple};

/// μ̄ = (σ − ω²)/8 for a unimodular plumbing tree.
pub fn mu_bar(g: &PlumbingGraph) -> Result<i64> {
    let q = intersection_matrix(g);
    let det = q.determinant()?;
    if det != BigInt::from(1) && det != BigInt::from(-1) {
        return Err(Error::NotUnimodular(det));
    }
    let sigma = BigInt::from(signature(&q)?.signature());
    let w = wu_class(g)?;
    let diff = sigma - &w.square;
    let (quot, rem) = diff.div_rem(&BigInt::from(8));
    if !rem.is_zero() {
        return Err(Error::internal(format!("σ − ω² = {diff} is not divisible by 8")));
    }
    quot.to_i64().ok_or_else(|| Error::invalid("μ̄ does not fit in 64 bits"))
}

pub fn rokhlin_mu(g: &PlumbingGraph) -> Result<u8> {
    Ok(mu_bar(g)?.rem_euclid(2) as u8)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FintushelSternR {
    pub delta: i64,
    #[serde(rename = "R")]
    pub r: i64,
}

/// δ is the central weight of the canonical graph and R = −2δ − 3.
pub fn fintushel_stern_r(t: &BrieskornTriple) -> Result<FintushelSternR> {
    t.require_proper()?;
    let delta = normalize(t)?.central;
    let r = delta
        .checked_mul(-2)
        .and_then(|x| x.checked_sub(3))
        .ok_or_else(|| Error::invalid("R overflows"))?;
    Ok(FintushelSternR { delta, r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonCode {
    MuBarNonzero,
    RPositive,
    CentralWeight,
    NoDiagonalEmbedding,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reason {
    pub code: ReasonCode,
    pub detail: String,
    /// Name of the invariant or theorem behind the obstruction.
    pub citation: &'static str,
}

pub const R_SCOPE_NOTE: &str =
    "R is evaluated as -2*delta-3 from the canonical central weight; the formula is applied to every three-fiber Brieskorn sphere";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundingReport {
    pub triple: [i64; 3],
    pub mu: u8,
    pub mu_bar: i64,
    pub delta: i64,
    #[serde(rename = "R")]
    pub r: i64,
    /// `None` when the embedding search stopped at its node limit.
    pub donaldson_embeddable: Option<bool>,
    pub obstructed: bool,
    pub reasons: Vec<Reason>,
    pub notes: Vec<String>,
}

impl BoundingReport {
    pub fn fires(&self, code: ReasonCode) -> bool {
        self.reasons.iter().any(|r| r.code == code)
    }
}

pub fn bounding_report(t: &BrieskornTriple) -> Result<BoundingReport> {
    bounding_report_with(t, &mut |q| find_embedding(q))
}

/// Like [`bounding_report`], with the embedding search supplied by the
/// caller (for caching or custom limits). A `SearchLimit` error from `embed`
/// leaves `donaldson_embeddable` unset instead of failing the report.
pub fn bounding_report_with(
    t: &BrieskornTriple,
    embed: &mut dyn FnMut(&IntegerMatrix) -> Result<Option<DiagonalEmbedding>>,
) -> Result<BoundingReport> {
    t.require_proper()?;
    let g = canonical_graph(&normalize(t)?)?;
    let mu_bar = mu_bar(&g)?;
    let FintushelSternR { delta, r } = fintushel_stern_r(t)?;
    let mut notes = vec![R_SCOPE_NOTE.to_string()];
    let donaldson_embeddable = match embed(&intersection_matrix(&g)) {
        Ok(e) => Some(e.is_some()),
        Err(Error::SearchLimit(n)) => {
            notes.push(format!("embedding search stopped after {n} node expansions"));
            None
        }
        Err(e) => return Err(e),
    };
    let mut reasons = Vec::new();
    if mu_bar != 0 {
        reasons.push(Reason {
            code: ReasonCode::MuBarNonzero,
            detail: format!("mu_bar = {mu_bar}"),
            citation: "Neumann-Siebenmann invariant",
        });
    }
    if r > 0 {
        reasons.push(Reason {
            code: ReasonCode::RPositive,
            detail: format!("R = {r}"),
            citation: "Fintushel-Stern R-invariant (Neumann-Zagier formula)",
        });
    }
    if delta != -1 {
        reasons.push(Reason {
            code: ReasonCode::CentralWeight,
            detail: format!("central weight {delta}, expected -1"),
            citation: "central weight criterion for acyclic bounding",
        });
    }
    if donaldson_embeddable == Some(false) {
        reasons.push(Reason {
            code: ReasonCode::NoDiagonalEmbedding,
            detail: format!("the rank {} form has no diagonal embedding", g.len()),
            citation: "Donaldson diagonalization",
        });
    }
    Ok(BoundingReport {
        triple: t.as_given(),
        mu: mu_bar.rem_euclid(2) as u8,
        mu_bar,
        delta,
        r,
        donaldson_embeddable,
        obstructed: !reasons.is_empty(),
        reasons,
        notes,
    })
}
