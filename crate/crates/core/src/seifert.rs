//! Brieskorn triples, Seifert invariants and the standard cyclic quotients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Largest accepted triple component. Products of three components must
/// stay well inside `i128` for the modular arithmetic in [`normalize`].
pub const MAX_COMPONENT: i64 = 1 << 40;

/// A pairwise coprime triple `(a1, a2, a3)` naming Σ(a1, a2, a3).
///
/// Components are stored sorted ascending. The order in which they were
/// supplied is kept for display only; equality ignores it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "[i64; 3]")]
pub struct BrieskornTriple {
    sorted: [i64; 3],
    given: [i64; 3],
}

impl BrieskornTriple {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let given = [a, b, c];
        if given.iter().any(|&x| x < 1) {
            return Err(Error::invalid(format!("components must be positive: {given:?}")));
        }
        if given.iter().any(|&x| x > MAX_COMPONENT) {
            return Err(Error::invalid(format!("component exceeds {MAX_COMPONENT}")));
        }
        if given.iter().filter(|&&x| x == 1).count() > 1 {
            return Err(Error::invalid(format!("at most one component may be 1: {given:?}")));
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if given[i].gcd(&given[j]) != 1 {
                return Err(Error::invalid(format!(
                    "components {} and {} are not coprime",
                    given[i], given[j]
                )));
            }
        }
        let mut sorted = given;
        sorted.sort_unstable();
        Ok(Self { sorted, given })
    }

    pub fn components(&self) -> [i64; 3] {
        self.sorted
    }

    /// Components in the order they were supplied.
    pub fn as_given(&self) -> [i64; 3] {
        self.given
    }

    /// Product `a1 a2 a3`.
    pub fn product(&self) -> BigInt {
        self.sorted.iter().map(|&x| BigInt::from(x)).product()
    }

    /// True when one component is 1, i.e. the triple names S³.
    pub fn is_sphere(&self) -> bool {
        self.sorted[0] == 1
    }

    pub(crate) fn require_proper(&self) -> Result<()> {
        if self.is_sphere() {
            Err(Error::invalid(format!(
                "{self} has a component equal to 1; every component must be at least 2"
            )))
        } else {
            Ok(())
        }
    }
}

impl PartialEq for BrieskornTriple {
    fn eq(&self, other: &Self) -> bool {
        self.sorted == other.sorted
    }
}

impl Eq for BrieskornTriple {}

impl std::hash::Hash for BrieskornTriple {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.sorted.hash(state);
    }
}

impl TryFrom<Vec<i64>> for BrieskornTriple {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        match v.as_slice() {
            &[a, b, c] => Self::new(a, b, c),
            _ => Err(Error::Parse(format!("expected three components, got {}", v.len()))),
        }
    }
}

impl From<BrieskornTriple> for [i64; 3] {
    fn from(t: BrieskornTriple) -> Self {
        t.sorted
    }
}

impl fmt::Display for BrieskornTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.given;
        write!(f, "Σ({a},{b},{c})")
    }
}

/// Accepts `3,4,5`, `3 4 5`, `(3,4,5)` or the JSON array `[3,4,5]`.
impl FromStr for BrieskornTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .trim_start_matches(['(', '['])
            .trim_end_matches([')', ']']);
        let parts: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<i64>().map_err(|e| Error::Parse(format!("{p:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::try_from(nums)
    }
}

/// One exceptional fiber `(alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeifertPair {
    pub alpha: i64,
    pub beta: i64,
}

impl SeifertPair {
    pub fn new(alpha: i64, beta: i64) -> Result<Self> {
        if alpha < 2 {
            return Err(Error::invalid(format!("fiber order must be at least 2, got {alpha}")));
        }
        if alpha.gcd(&beta) != 1 {
            return Err(Error::invalid(format!("({alpha},{beta}) is not a coprime pair")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(self.beta.into(), self.alpha.into())
    }
}

/// Unnormalized Seifert invariants `(b; (α1,β1), ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeifert", into = "RawSeifert")]
pub struct SeifertData {
    pub central: i64,
    pub pairs: Vec<SeifertPair>,
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeifert {
    b: i64,
    pairs: Vec<(i64, i64)>,
}

impl TryFrom<RawSeifert> for SeifertData {
    type Error = Error;

    fn try_from(raw: RawSeifert) -> Result<Self> {
        let pairs = raw
            .pairs
            .into_iter()
            .map(|(a, b)| SeifertPair::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        SeifertData::new(raw.b, pairs)
    }
}

impl From<SeifertData> for RawSeifert {
    fn from(d: SeifertData) -> Self {
        RawSeifert {
            b: d.central,
            pairs: d.pairs.iter().map(|p| (p.alpha, p.beta)).collect(),
        }
    }
}

impl SeifertData {
    /// Wraps arbitrary invariants; `is_normalized` reports whether they
    /// satisfy the canonical convention.
    pub fn new(central: i64, pairs: Vec<SeifertPair>) -> Result<Self> {
        if pairs.len() > 64 {
            return Err(Error::invalid("too many exceptional fibers"));
        }
        if pairs.iter().any(|p| p.alpha > MAX_COMPONENT || p.beta.abs() > MAX_COMPONENT) {
            return Err(Error::invalid(format!("fiber data exceeds {MAX_COMPONENT}")));
        }
        let mut d = SeifertData {
            central,
            pairs,
            normalized: false,
        };
        d.normalized = d.pairs.iter().all(|p| 0 < p.beta && p.beta < p.alpha)
            && d.euler_times_order() == -BigInt::one();
        Ok(d)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `A = ∏ αi`.
    pub fn order_product(&self) -> BigInt {
        self.pairs.iter().map(|p| BigInt::from(p.alpha)).product()
    }

    /// Rational Euler number `b + Σ βi/αi`.
    pub fn euler_number(&self) -> Rational {
        self.pairs
            .iter()
            .fold(Rational::from_integer(self.central.into()), |acc, p| acc + p.ratio())
    }

    /// `A · (b + Σ βi/αi)`; equals −1 for canonical homology-sphere data.
    pub fn euler_times_order(&self) -> BigInt {
        let e = self.euler_number() * Rational::from_integer(self.order_product());
        if e.is_integer() {
            e.to_integer()
        } else {
            // Non-integral products only arise for non-sphere data; report 0.
            BigInt::zero()
        }
    }
}

/// Canonical Seifert invariants of Σ(a1,a2,a3) with `0 < βi < αi` and
/// `A (b + Σ βi/αi) = −1`.
pub fn normalize(t: &BrieskornTriple) -> Result<SeifertData> {
    t.require_proper()?;
    let comps = t.components();
    let mut pairs = Vec::with_capacity(3);
    for (i, &alpha) in comps.iter().enumerate() {
        let others: i128 = comps
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &x)| x as i128 % alpha as i128)
            .product::<i128>()
            % alpha as i128;
        let inv = mod_inverse(others, alpha as i128)
            .ok_or_else(|| Error::internal("cofactor is not invertible for a coprime triple"))?;
        let beta = (-inv).rem_euclid(alpha as i128) as i64;
        pairs.push(SeifertPair::new(alpha, beta)?);
    }
    let a = t.product();
    let sum: BigInt = pairs
        .iter()
        .map(|p| BigInt::from(p.beta) * (&a / p.alpha))
        .sum();
    // b = -(1 + Σ βi A/αi) / A
    let numer = -(BigInt::one() + sum);
    let (b, rem) = numer.div_rem(&a);
    if !rem.is_zero() {
        return Err(Error::internal(format!("central weight of {t} is not integral")));
    }
    let central = b
        .to_i64()
        .ok_or_else(|| Error::internal("central weight overflows i64"))?;
    let d = SeifertData::new(central, pairs)?;
    if d.euler_times_order() != -BigInt::one() || !d.is_normalized() {
        return Err(Error::internal(format!("normalization identity fails for {t}")));
    }
    Ok(d)
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let ext = a.rem_euclid(m).extended_gcd(&m);
    (ext.gcd == 1).then(|| ext.x.rem_euclid(m))
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3i64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Quotient of Σ(pa,b,c) by the semi-free standard ℤ/p action: Σ(a,b,c).
///
/// A component equal to 1 in the result means the quotient is S³ and the
/// branch set is the (b,c) torus knot.
pub fn quotient(t: &BrieskornTriple, p: i64) -> Result<BrieskornTriple> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let given = t.as_given();
    let hits: Vec<usize> = (0..3).filter(|&i| given[i] % p == 0).collect();
    match hits.as_slice() {
        [i] => {
            let mut out = given;
            out[*i] /= p;
            BrieskornTriple::new(out[0], out[1], out[2])
        }
        [] => Err(Error::invalid(format!("{p} divides no component of {t}; the action is free"))),
        _ => Err(Error::invalid(format!("{p} divides more than one component of {t}"))),
    }
}

/// Named infinite families of Brieskorn spheres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    /// Σ(p, ps−1, ps+1) with p even and s odd.
    CassonHarerEven { p: i64, s: i64 },
    /// Σ(p, ps±1, ps±2) with p odd; `plus` selects the sign.
    CassonHarerOdd { p: i64, s: i64, plus: bool },
    /// Σ(r, rs±2, 2r(rs±2) + rs±1).
    Stern { r: i64, s: i64, plus: bool },
    /// Σ(2m−1, 2m, 2m+1), m ≥ 2.
    SigmaM { m: i64 },
}

pub fn family(f: Family) -> Result<BrieskornTriple> {
    let too_big = || Error::invalid("family parameters overflow");
    let triple = match f {
        Family::CassonHarerEven { p, s } => {
            if p <= 0 || p % 2 != 0 {
                return Err(Error::invalid(format!("p must be positive and even, got {p}")));
            }
            if s <= 0 || s % 2 == 0 {
                return Err(Error::invalid(format!("s must be positive and odd, got {s}")));
            }
            let ps = p.checked_mul(s).ok_or_else(too_big)?;
            [p, ps - 1, ps + 1]
        }
        Family::CassonHarerOdd { p, s, plus } => {
            if p <= 0 || p % 2 == 0 {
                return Err(Error::invalid(format!("p must be positive and odd, got {p}")));
            }
            if s <= 0 {
                return Err(Error::invalid(format!("s must be positive, got {s}")));
            }
            let ps = p.checked_mul(s).ok_or_else(too_big)?;
            let sg = if plus { 1 } else { -1 };
            [p, ps + sg, ps + 2 * sg]
        }
        Family::Stern { r, s, plus } => {
            if r <= 0 || s <= 0 {
                return Err(Error::invalid("Stern parameters must be positive"));
            }
            let sg = if plus { 1 } else { -1 };
            let rs = r.checked_mul(s).ok_or_else(too_big)?;
            let second = rs + 2 * sg;
            let third = (2 * r)
                .checked_mul(second)
                .and_then(|x| x.checked_add(rs + sg))
                .ok_or_else(too_big)?;
            [r, second, third]
        }
        Family::SigmaM { m } => {
            if m < 2 {
                return Err(Error::invalid(format!("m must be at least 2, got {m}")));
            }
            let two_m = m.checked_mul(2).ok_or_else(too_big)?;
            [two_m - 1, two_m, two_m + 1]
        }
    };
    if triple.iter().any(|&x| x < 2) {
        return Err(Error::invalid(format!("{f:?} yields a component below 2: {triple:?}")));
    }
    BrieskornTriple::new(triple[0], triple[1], triple[2])
}

/// Central integer and rational fiber parameters of the Montesinos knot
/// obtained from complex conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MontesinosParameters {
    pub e: i64,
    pub fractions: Vec<Rational>,
}

impl fmt::Display for MontesinosParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fr: Vec<String> = self.fractions.iter().map(ToString::to_string).collect();
        write!(f, "({}; {})", self.e, fr.join(", "))
    }
}

pub fn montesinos_parameters(t: &BrieskornTriple) -> Result<MontesinosParameters> {
    let d = normalize(t)?;
    Ok(MontesinosParameters {
        e: d.central,
        fractions: d.pairs.iter().map(SeifertPair::ratio).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triple(a: i64, b: i64, c: i64) -> BrieskornTriple {
        BrieskornTriple::new(a, b, c).unwrap()
    }

    /// Exhaustive oracle: every (β1,β2,β3) in range with the exact identity.
    fn brute_normalize(t: [i64; 3]) -> Vec<(i64, [i64; 3])> {
        let a: i64 = t.iter().product();
        let mut out = Vec::new();
        for b1 in 1..t[0] {
            for b2 in 1..t[1] {
                for b3 in 1..t[2] {
                    let s = b1 * (a / t[0]) + b2 * (a / t[1]) + b3 * (a / t[2]);
                    if (-1 - s) % a == 0 {
                        out.push(((-1 - s) / a, [b1, b2, b3]));
                    }
                }
            }
        }
        out
    }

    fn pairs(d: &SeifertData) -> Vec<(i64, i64)> {
        d.pairs.iter().map(|p| (p.alpha, p.beta)).collect()
    }

    #[test]
    fn normalize_examples_match_oracle() {
        for (t, b, want) in [
            ([3, 4, 5], -1, vec![(3, 1), (4, 1), (5, 2)]),
            ([2, 3, 5], -2, vec![(2, 1), (3, 2), (5, 4)]),
            ([2, 3, 13], -1, vec![(2, 1), (3, 1), (13, 2)]),
        ] {
            let oracle = brute_normalize(t);
            assert_eq!(oracle.len(), 1);
            assert_eq!(oracle[0].0, b);
            let d = normalize(&triple(t[0], t[1], t[2])).unwrap();
            assert_eq!(d.central, b);
            assert_eq!(pairs(&d), want);
            assert_eq!(
                oracle[0].1.to_vec(),
                want.iter().map(|p| p.1).collect::<Vec<_>>()
            );
            assert!(d.is_normalized());
        }
    }

    #[test]
    fn normalize_rejects_bad_triples() {
        assert!(BrieskornTriple::new(4, 6, 9).is_err());
        assert!(BrieskornTriple::new(1, 1, 5).is_err());
        assert!(BrieskornTriple::new(0, 3, 5).is_err());
        assert!(normalize(&triple(1, 5, 7)).is_err());
    }

    #[test]
    fn order_insensitive() {
        let a = normalize(&triple(5, 3, 4)).unwrap();
        let b = normalize(&triple(3, 4, 5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(triple(5, 3, 4), triple(3, 4, 5));
        assert_eq!(triple(5, 3, 4).to_string(), "Σ(5,3,4)");
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient(&triple(4, 3, 5), 2).unwrap(), triple(2, 3, 5));
        let s3 = quotient(&triple(2, 5, 7), 2).unwrap();
        assert!(s3.is_sphere());
        assert_eq!(s3.components(), [1, 5, 7]);
        assert_eq!(quotient(&triple(5, 6, 7), 2).unwrap(), triple(5, 3, 7));
        assert!(quotient(&triple(3, 5, 7), 2).is_err());
        assert!(quotient(&triple(3, 4, 5), 6).is_err());
        assert!(quotient(&triple(2, 3, 5), 7).is_err());
    }

    #[test]
    fn family_examples() {
        assert_eq!(family(Family::CassonHarerEven { p: 2, s: 3 }).unwrap(), triple(2, 5, 7));
        assert_eq!(
            family(Family::Stern { r: 3, s: 1, plus: true }).unwrap(),
            triple(3, 5, 34)
        );
        assert_eq!(family(Family::SigmaM { m: 2 }).unwrap(), triple(3, 4, 5));
        assert_eq!(
            family(Family::CassonHarerOdd { p: 3, s: 1, plus: true }).unwrap(),
            triple(3, 4, 5)
        );
        assert!(family(Family::CassonHarerEven { p: 3, s: 1 }).is_err());
        assert!(family(Family::CassonHarerEven { p: 2, s: 2 }).is_err());
        assert!(family(Family::CassonHarerEven { p: 2, s: 1 }).is_err());
        assert!(family(Family::CassonHarerOdd { p: 4, s: 1, plus: true }).is_err());
        assert!(family(Family::CassonHarerOdd { p: 3, s: 1, plus: false }).is_err());
        assert!(family(Family::SigmaM { m: 1 }).is_err());
    }

    #[test]
    fn montesinos_examples() {
        let r = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let m = montesinos_parameters(&triple(3, 4, 5)).unwrap();
        assert_eq!((m.e, m.fractions.clone()), (-1, vec![r(1, 3), r(1, 4), r(2, 5)]));
        let m = montesinos_parameters(&triple(2, 3, 5)).unwrap();
        assert_eq!((m.e, m.fractions), (-2, vec![r(1, 2), r(2, 3), r(4, 5)]));
        let m = montesinos_parameters(&triple(2, 3, 13)).unwrap();
        assert_eq!((m.e, m.fractions), (-1, vec![r(1, 2), r(1, 3), r(2, 13)]));
    }

    #[test]
    fn triple_parsing() {
        assert_eq!("3,4,5".parse::<BrieskornTriple>().unwrap(), triple(3, 4, 5));
        assert_eq!(" (5 3 4) ".parse::<BrieskornTriple>().unwrap(), triple(3, 4, 5));
        assert_eq!(serde_json::from_str::<BrieskornTriple>("[4,3,5]").unwrap(), triple(3, 4, 5));
        assert_eq!(serde_json::to_string(&triple(5, 4, 3)).unwrap(), "[3,4,5]");
        assert!("3,4".parse::<BrieskornTriple>().is_err());
        assert!("3,x,5".parse::<BrieskornTriple>().is_err());
        assert!(serde_json::from_str::<BrieskornTriple>("[2,4,5]").is_err());
    }

    #[test]
    fn seifert_json() {
        let d = normalize(&triple(3, 4, 5)).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"b":-1,"pairs":[[3,1],[4,1],[5,2]]}"#);
        let back = SeifertData::from_json(&s).unwrap();
        assert!(back.is_normalized());
        assert_eq!(back, d);
        let gp = SeifertData::from_json(r#"{"b":0,"pairs":[[3,1],[2,-1],[5,1]]}"#).unwrap();
        assert!(!gp.is_normalized());
        // Σ'_m data evaluates to +1/A under the canonical formula.
        assert_eq!(gp.euler_times_order(), BigInt::one());
        assert!(SeifertData::from_json(r#"{"b":0,"pairs":[[4,2]]}"#).is_err());
        assert!(SeifertData::from_json(r#"{"b":0,"pairs":[[1,0]]}"#).is_err());
    }

    #[test]
    fn family_members_are_coprime() {
        for p in 1..20 {
            for s in 1..8 {
                for plus in [true, false] {
                    for f in [
                        Family::CassonHarerEven { p, s },
                        Family::CassonHarerOdd { p, s, plus },
                        Family::Stern { r: p, s, plus },
                        Family::SigmaM { m: p },
                    ] {
                        if let Ok(t) = family(f) {
                            let [a, b, c] = t.components();
                            assert_eq!(a.gcd(&b), 1);
                            assert_eq!(a.gcd(&c), 1);
                            assert_eq!(b.gcd(&c), 1);
                            assert!(normalize(&t).is_ok());
                        }
                    }
                }
            }
        }
    }

    fn coprime_triple() -> impl Strategy<Value = BrieskornTriple> {
        (2i64..=200, 2i64..=200, 2i64..=200)
            .prop_filter_map("pairwise coprime", |(a, b, c)| BrieskornTriple::new(a, b, c).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn normalization_identity_holds(t in coprime_triple()) {
            let d = normalize(&t).unwrap();
            prop_assert_eq!(d.euler_times_order(), -BigInt::one());
            for p in &d.pairs {
                prop_assert!(0 < p.beta && p.beta < p.alpha);
            }
            let [a, b, c] = t.as_given();
            prop_assert_eq!(normalize(&BrieskornTriple::new(c, a, b).unwrap()).unwrap(), d);
        }

        #[test]
        fn quotient_normalizes(t in coprime_triple(), p in prop::sample::select(vec![2i64, 3, 5, 7, 11, 13])) {
            if let Ok(q) = quotient(&t, p) {
                if !q.is_sphere() {
                    prop_assert!(normalize(&q).is_ok());
                }
            }
        }
    }
}
