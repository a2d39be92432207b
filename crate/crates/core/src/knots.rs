//! Slice obstructions: torus knot signatures and the Fox–Milnor condition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{signature_i64, IntegerMatrix};

/// Longest polynomial accepted from input.
pub const MAX_DEGREE: usize = 64;

/// Integer polynomial with coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl TryFrom<Vec<i64>> for IntPolynomial {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        IntPolynomial::new(v)
    }
}

impl From<IntPolynomial> for Vec<i64> {
    fn from(p: IntPolynomial) -> Self {
        p.coeffs
    }
}

impl IntPolynomial {
    /// Drops trailing zero coefficients; the empty list is the zero polynomial.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::invalid(format!("degree above {MAX_DEGREE}")));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Vec<i64> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(IntPolynomial { coeffs: Vec::new() });
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            for (j, &y) in other.coeffs.iter().enumerate() {
                out[i + j] = x
                    .checked_mul(y)
                    .and_then(|v| out[i + j].checked_add(v))
                    .ok_or_else(|| Error::invalid("polynomial product overflows"))?;
            }
        }
        Self::new(out)
    }

    /// `t^deg · f(1/t)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPolynomial { coeffs: c }.strip_low()
    }

    pub fn neg(&self) -> Self {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }

    /// Divides out the largest power of t.
    pub fn strip_low(&self) -> Self {
        let k = self.coeffs.iter().take_while(|&&c| c == 0).count();
        IntPolynomial {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    pub fn eval(&self, t: i64) -> Option<i64> {
        self.coeffs
            .iter()
            .rev()
            .try_fold(0i64, |acc, &c| acc.checked_mul(t)?.checked_add(c))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let coef = if mag == 1 && i > 0 { String::new() } else { mag.to_string() };
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            if first {
                write!(f, "{sign}{coef}{var}")?;
            } else {
                write!(f, " {sign} {coef}{var}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FoxMilnorOutcome {
    Pass { f: IntPolynomial },
    Fail { reason: String },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoxMilnorReport {
    pub delta: IntPolynomial,
    pub bound: u64,
    pub default_bound: u64,
    #[serde(flatten)]
    pub outcome: FoxMilnorOutcome,
}

impl FoxMilnorReport {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, FoxMilnorOutcome::Pass { .. })
    }

    pub fn failed(&self) -> bool {
        matches!(self.outcome, FoxMilnorOutcome::Fail { .. })
    }
}

/// `max(1, 2^d · max|δᵢ|)` for a polynomial of degree `2d`.
pub fn default_bound(delta: &IntPolynomial) -> u64 {
    let d = delta.degree().unwrap_or(0) / 2;
    let m = delta.coeffs().iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    1u64.checked_shl(d as u32)
        .and_then(|p| p.checked_mul(m))
        .unwrap_or(u64::MAX)
        .max(1)
}

/// Looks for `f` of degree `d` with `δ(t) = ±t^d f(t) f(1/t)`.
pub fn fox_milnor_test(delta: &IntPolynomial, bound: Option<u64>) -> Result<FoxMilnorReport> {
    let delta = delta.strip_low();
    let deg = delta
        .degree()
        .ok_or_else(|| Error::invalid("the zero polynomial is not an Alexander polynomial"))?;
    if deg % 2 != 0 {
        return Err(Error::invalid(format!("degree {deg} is odd")));
    }
    if delta.reversed() != delta {
        return Err(Error::invalid(format!("{delta} is not symmetric")));
    }
    let d = deg / 2;
    let default = default_bound(&delta);
    let bound = bound.unwrap_or(default);
    if bound == 0 {
        return Err(Error::invalid("coefficient bound must be positive"));
    }
    let report = |outcome| FoxMilnorReport {
        delta: delta.clone(),
        bound,
        default_bound: default,
        outcome,
    };
    let at_minus_one = delta
        .eval(-1)
        .ok_or_else(|| Error::invalid("Δ(−1) overflows"))?
        .unsigned_abs();
    let root = at_minus_one.isqrt();
    if root * root != at_minus_one {
        return Ok(report(FoxMilnorOutcome::Fail {
            reason: format!("|Δ(−1)| = {at_minus_one} is not a square"),
        }));
    }
    let c = delta.coeffs();
    for eps in [1i64, -1] {
        let target = eps * c[d];
        if target <= 0 {
            continue;
        }
        let mut f = vec![0i64; d + 1];
        let lim = bound.min(target.unsigned_abs().isqrt()) as i64;
        if search(&mut f, 0, target, lim, eps, &delta) {
            return Ok(report(FoxMilnorOutcome::Pass {
                f: IntPolynomial::new(f)?,
            }));
        }
    }
    if bound >= default {
        Ok(report(FoxMilnorOutcome::Fail {
            reason: format!("no factor with coefficients bounded by {bound}"),
        }))
    } else {
        Ok(report(FoxMilnorOutcome::Inconclusive {
            reason: format!("no factor with coefficients bounded by {bound}, below the exhaustive bound {default}"),
        }))
    }
}

/// Fills `f[i..]` in lexicographically decreasing order; `budget` is the
/// remaining sum of squares `Σ f_j²` must reach.
fn search(f: &mut Vec<i64>, i: usize, budget: i64, lim: i64, eps: i64, delta: &IntPolynomial) -> bool {
    let d = f.len() - 1;
    if i > d {
        return budget == 0 && matches_delta(f, eps, delta);
    }
    let c = delta.coeffs();
    let top = lim.min((budget as u64).isqrt() as i64);
    for v in (-top..=top).rev() {
        if i == 0 && (v == 0 || c[0] % v != 0) {
            continue;
        }
        let first = if i == 0 { v } else { f[0] };
        if i == d && first * v != eps * c[0] {
            continue;
        }
        f[i] = v;
        if search(f, i + 1, budget - v * v, lim, eps, delta) {
            return true;
        }
    }
    f[i] = 0;
    false
}

fn matches_delta(f: &[i64], eps: i64, delta: &IntPolynomial) -> bool {
    let d = f.len() - 1;
    (0..=d).all(|j| {
        let corr: i64 = (0..=d - j).map(|i| f[i] * f[i + j]).sum();
        delta.coeffs()[d + j] == eps * corr && delta.coeffs()[d - j] == eps * corr
    })
}

/// `V_n`: (n−1)×(n−1), −1 on the diagonal, +1 on the superdiagonal.
fn band(n: i64) -> Vec<Vec<i64>> {
    let m = (n - 1) as usize;
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { -1 } else if j == i + 1 { 1 } else { 0 }).collect())
        .collect()
}

/// Seifert matrix of the right-handed (p,q) torus knot, `−(V_p ⊗ V_q)`.
pub fn torus_seifert_matrix(p: i64, q: i64) -> Result<IntegerMatrix> {
    Ok(IntegerMatrix::from_rows(&torus_seifert_rows(p, q)?))
}

fn torus_seifert_rows(p: i64, q: i64) -> Result<Vec<Vec<i64>>> {
    if p < 1 || q < 1 {
        return Err(Error::invalid("torus knot parameters must be positive"));
    }
    if num_integer::gcd(p, q) != 1 {
        return Err(Error::invalid(format!("({p},{q}) are not coprime")));
    }
    let size = (p - 1).checked_mul(q - 1).filter(|&s| s <= 4096).ok_or_else(|| Error::invalid("torus knot too large"))?;
    let (vp, vq) = (band(p), band(q));
    let (m, n) = ((p - 1) as usize, (q - 1) as usize);
    let mut rows = vec![vec![0i64; size as usize]; size as usize];
    for i in 0..m {
        for j in 0..m {
            if vp[i][j] == 0 {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    rows[i * n + k][j * n + l] = -(vp[i][j] * vq[k][l]);
                }
            }
        }
    }
    Ok(rows)
}

/// Signature of `V + Vᵗ` for the right-handed (p,q) torus knot;
/// σ(T(2,3)) = −2.
pub fn torus_signature(p: i64, q: i64) -> Result<i64> {
    let v = torus_seifert_rows(p, q)?;
    let sym: Vec<Vec<i64>> = (0..v.len())
        .map(|i| (0..v.len()).map(|j| v[i][j] + v[j][i]).collect())
        .collect();
    Ok(signature_i64(&sym)?.signature())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceReport {
    pub p: i64,
    pub q: i64,
    pub signature: i64,
    pub obstructed: bool,
    pub reason: Option<String>,
}

pub fn slice_obstruction_report(p: i64, q: i64) -> Result<SliceReport> {
    let sigma = torus_signature(p, q)?;
    Ok(SliceReport {
        p,
        q,
        signature: sigma,
        obstructed: sigma != 0,
        reason: (sigma != 0).then(|| format!("knot signature {sigma} is nonzero, so T({p},{q}) is not slice")),
    })
}
