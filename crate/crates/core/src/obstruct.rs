//! Certificates that the standard ℤ/p action on Σ(pa,b,c) does not extend
//! over an acyclic filling, and the two-route pipeline that produces them.
//!
//! In the closed model X = M(Γ) ∪ (−W) the central node F₁ is a fixed sphere
//! of square −1 and the first nodes F₂, F₃ of two arms are invariant spheres
//! meeting F₁ once and each other not at all. In a diagonal basis F₁ must
//! have 0/1 coordinates and F₂, F₃ coordinates of one sign each, which the
//! lattice rules out: F₁ = ±e_k forces F₂ and F₃ to both use e_k, while
//! F₂·F₃ = 0 for sign-coherent vectors forces disjoint supports.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::equivariant::{census, fixed_sphere_class, g_signature_solve, FixedPointCensus};
use crate::error::{Error, Result};
use crate::exact::IntegerMatrix;
use crate::invariants::{bounding_report_with, BoundingReport};
use crate::knots::{slice_obstruction_report, SliceReport};
use crate::lattice::{find_embedding, validate_embedding, DiagonalEmbedding};
use crate::plumbing::{canonical_graph, intersection_matrix, PlumbingGraph};
use crate::seifert::{is_prime, normalize, BrieskornTriple, SeifertData};

/// Largest rank for which certificates include the exhaustive signed
/// permutation search.
pub const BRUTE_FORCE_MAX_RANK: usize = 8;

/// Basis indices of the three spheres, and the arms F₂ and F₃ start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Configuration {
    pub f1: usize,
    pub f2: usize,
    pub f3: usize,
    pub arms: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Selection {
    Selected { configuration: Configuration },
    /// δ ≠ −1: no acyclic filling exists, so there is nothing to extend over.
    AcyclicHypothesisFails { delta: i64 },
}

/// Picks F₁ = central node and F₂, F₃ = first nodes of two arms. By default
/// the arms avoid the one whose fiber order is divisible by p; `arms`
/// overrides the choice.
pub fn select_configuration(
    g: &PlumbingGraph,
    census: &FixedPointCensus,
    arms: Option<(usize, usize)>,
) -> Result<Selection> {
    let c = g.central().ok_or_else(|| Error::invalid("graph has no central node"))?;
    let delta = g.weight(c);
    if delta != -1 {
        return Ok(Selection::AcyclicHypothesisFails { delta });
    }
    let all = g.arms();
    let (i, j) = match arms {
        Some((i, j)) => {
            if i == j || i >= all.len() || j >= all.len() {
                return Err(Error::invalid(format!("arms ({i},{j}) are not two distinct arms")));
            }
            (i, j)
        }
        None => {
            let divisible = |k: usize| all[k].pair.is_some_and(|p| p.alpha % census.p == 0);
            let mut free: Vec<usize> = (0..all.len()).filter(|&k| !divisible(k)).collect();
            if free.len() < 2 {
                free = (0..all.len()).collect();
            }
            match free.as_slice() {
                [i, j, ..] => (*i, *j),
                _ => return Err(Error::invalid("graph has fewer than two arms")),
            }
        }
    };
    let (f2, f3) = (all[i].nodes[0], all[j].nodes[0]);
    let id = |k: usize| g.nodes()[k].id;
    if !census.fixed_spheres.iter().any(|s| s.node == id(c)) {
        return Err(Error::internal("central node is not fixed"));
    }
    for f in [f2, f3] {
        if !census.invariant_spheres.contains(&id(f)) {
            return Err(Error::internal(format!("first arm node {} is not invariant", id(f))));
        }
    }
    let q = intersection_matrix(g);
    let one = BigInt::one();
    if q[(c, c)] != -&one || q[(c, f2)] != one || q[(c, f3)] != one || !q[(f2, f3)].is_zero() {
        return Err(Error::internal("configuration intersection numbers are wrong"));
    }
    Ok(Selection::Selected {
        configuration: Configuration {
            f1: c,
            f2,
            f3,
            arms: Some((i, j)),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, expected: impl ToString, actual: impl ToString) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        Check {
            name: name.to_string(),
            passed: expected == actual,
            expected,
            actual,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateVerdict {
    Obstructed,
    NoCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Columns {
    #[serde(with = "crate::json::bigint_vec")]
    pub f1: Vec<BigInt>,
    #[serde(with = "crate::json::bigint_vec")]
    pub f2: Vec<BigInt>,
    #[serde(with = "crate::json::bigint_vec")]
    pub f3: Vec<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BruteForce {
    pub signed_permutations: u64,
    pub admissible: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionCertificate {
    /// (p, a, b, c) when produced by the pipeline.
    pub input: Option<[i64; 4]>,
    pub configuration: Configuration,
    pub checks: Vec<Check>,
    pub columns: Option<Columns>,
    /// Row where F₁ = ±e_k.
    pub k: Option<usize>,
    pub contradiction: Option<String>,
    pub brute_force: Option<BruteForce>,
    pub verdict: CertificateVerdict,
    pub failing_check: Option<String>,
}

impl ObstructionCertificate {
    pub fn is_obstructed(&self) -> bool {
        self.verdict == CertificateVerdict::Obstructed
    }
}

/// Re-verifies every premise from `q` and `b` and emits OBSTRUCTED only when
/// all of them hold.
pub fn certify(q: &IntegerMatrix, b: &DiagonalEmbedding, config: &Configuration) -> Result<ObstructionCertificate> {
    let mut cert = ObstructionCertificate {
        input: None,
        configuration: *config,
        checks: Vec::new(),
        columns: None,
        k: None,
        contradiction: None,
        brute_force: None,
        verdict: CertificateVerdict::NoCertificate,
        failing_check: None,
    };
    let fail = |mut cert: ObstructionCertificate| {
        cert.failing_check = cert.checks.iter().find(|c| !c.passed).map(|c| c.name.clone());
        cert.verdict = CertificateVerdict::NoCertificate;
        Ok(cert)
    };
    let n = q.rows();
    let Configuration { f1, f2, f3, .. } = *config;

    let valid = validate_embedding(q, b.matrix());
    cert.checks.push(Check::new(
        "embedding: BtB = -Q and |det B| = 1",
        "valid",
        match &valid {
            Ok(()) => "valid".to_string(),
            Err(d) => d.to_string(),
        },
    ));
    let in_range = f1 < n && f2 < n && f3 < n;
    let distinct = f1 != f2 && f1 != f3 && f2 != f3;
    cert.checks.push(Check::new("F1, F2, F3 are distinct basis vectors", true, in_range && distinct));
    if cert.checks.iter().any(|c| !c.passed) {
        return fail(cert);
    }
    cert.checks.push(Check::new("[F1]^2", -1, &q[(f1, f1)]));
    cert.checks.push(Check::new("F1.F2", 1, &q[(f1, f2)]));
    cert.checks.push(Check::new("F1.F3", 1, &q[(f1, f3)]));
    cert.checks.push(Check::new("F2.F3", 0, &q[(f2, f3)]));

    let m = b.matrix();
    let (u, v, w) = (m.column(f1), m.column(f2), m.column(f3));
    cert.columns = Some(Columns {
        f1: u.clone(),
        f2: v.clone(),
        f3: w.clone(),
    });
    let support: Vec<usize> = (0..n).filter(|&i| !u[i].is_zero()).collect();
    cert.checks.push(Check::new("number of nonzero entries of F1", 1, support.len()));
    if let [k] = support[..] {
        cert.k = Some(k);
        cert.checks.push(Check::new("|F1[k]|", 1, u[k].abs()));
        cert.checks.push(Check::new("|F2[k]|", 1, v[k].abs()));
        cert.checks.push(Check::new("|F3[k]|", 1, w[k].abs()));
    }
    let dot: BigInt = v.iter().zip(&w).map(|(x, y)| x * y).sum();
    cert.checks.push(Check::new("sum_i F2[i] F3[i]", 0, &dot));
    if cert.checks.iter().any(|c| !c.passed) {
        return fail(cert);
    }
    let k = cert.k.expect("set above");
    cert.contradiction = Some(format!(
        "F1 = ±e_{k}. Choose orientations of F2 and F3 that are coordinate-wise sign-coherent. \
         Then every product F2[i]F3[i] is >= 0 and they sum to 0, so the supports of F2 and F3 \
         are disjoint. Yet F2[{k}] and F3[{k}] are both ±1, so index {k} lies in both supports. \
         No diagonal basis gives F1 0/1 coordinates and F2, F3 sign-coherent coordinates."
    ));
    if n <= BRUTE_FORCE_MAX_RANK {
        let bf = brute_force(&u, &v, &w);
        if bf.admissible != 0 {
            return Err(Error::internal(format!(
                "signed permutation search found {} admissible bases despite the support argument",
                bf.admissible
            )));
        }
        cert.brute_force = Some(bf);
    }
    cert.verdict = CertificateVerdict::Obstructed;
    Ok(cert)
}

/// Tries every signed permutation of the diagonal basis and counts those
/// under which F₁ ∈ {0,1}ⁿ and F₂, F₃ are each sign-coherent, all up to a
/// global sign of each vector.
pub fn brute_force(u: &[BigInt], v: &[BigInt], w: &[BigInt]) -> BruteForce {
    let n = u.len();
    assert!(n <= 16, "brute force is only for small ranks");
    let masks = |x: &[BigInt]| -> (u32, u32) {
        let mut pos = 0;
        let mut neg = 0;
        for (i, e) in x.iter().enumerate() {
            if e.is_positive() {
                pos |= 1 << i;
            } else if e.is_negative() {
                neg |= 1 << i;
            }
        }
        (pos, neg)
    };
    let u_unit = u.iter().all(|e| e.is_zero() || e.abs().is_one());
    let mut vecs = [masks(u), masks(v), masks(w)];
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut visited = 0u64;
    let mut admissible = 0u64;
    let mut check = |vecs: &[(u32, u32); 3]| {
        for flips in 0..=full {
            visited += 1;
            let coherent = |(pos, neg): (u32, u32)| {
                let p = (pos & !flips) | (neg & flips);
                let q = (neg & !flips) | (pos & flips);
                p == 0 || q == 0
            };
            if u_unit && coherent(vecs[0]) && coherent(vecs[1]) && coherent(vecs[2]) {
                admissible += 1;
            }
        }
    };
    // Heap's algorithm; each swap of basis rows i and j is applied to the masks.
    let swap_bits = |x: u32, i: usize, j: usize| -> u32 {
        let (bi, bj) = ((x >> i) & 1, (x >> j) & 1);
        if bi == bj {
            x
        } else {
            x ^ ((1 << i) | (1 << j))
        }
    };
    check(&vecs);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            let j = if i % 2 == 0 { 0 } else { counters[i] };
            perm.swap(i, j);
            for m in vecs.iter_mut() {
                *m = (swap_bits(m.0, i, j), swap_bits(m.1, i, j));
            }
            check(&vecs);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    BruteForce {
        signed_permutations: visited,
        admissible,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertificateRoute {
    Certified { certificate: ObstructionCertificate },
    NoCertificate { certificate: ObstructionCertificate },
    AcyclicHypothesisFails { delta: i64 },
    /// The form of M(Γ) has no diagonal embedding, so no negative definite
    /// closed model exists at all.
    DonaldsonObstructs,
    /// The embedding search stopped at its node limit.
    Undecided { reason: String },
}

impl CertificateRoute {
    pub fn obstructs(&self) -> bool {
        matches!(
            self,
            CertificateRoute::Certified { .. }
                | CertificateRoute::AcyclicHypothesisFails { .. }
                | CertificateRoute::DonaldsonObstructs
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuotientRoute {
    /// The quotient Σ(a,b,c) would bound an acyclic manifold.
    Bounding { quotient: [i64; 3], report: BoundingReport },
    /// a = 1: the quotient is S³ and the branch set is the (b,c) torus knot,
    /// which would bound a smooth disk in a homology ball.
    TorusKnot { report: SliceReport },
}

impl QuotientRoute {
    pub fn obstructs(&self) -> bool {
        match self {
            QuotientRoute::Bounding { report, .. } => report.obstructed,
            QuotientRoute::TorusKnot { report } => report.obstructed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Obstructed,
    NotObstructed,
}

/// Square of the capped fixed sphere by the two independent computations
/// (p = 2 only). Both presuppose an extension; a mismatch is a further
/// obstruction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareComparison {
    #[serde(with = "crate::json::bigint")]
    pub from_intersections: BigInt,
    pub from_g_signature: i64,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub p: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    /// Σ(pa, b, c).
    pub sphere: [i64; 3],
    pub seifert: SeifertData,
    pub census: FixedPointCensus,
    pub certificate_route: CertificateRoute,
    pub quotient_route: QuotientRoute,
    pub fixed_sphere_square: Option<SquareComparison>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PipelineOptions {
    pub arms: Option<(usize, usize)>,
}

pub fn theorem_a_pipeline(p: i64, a: i64, b: i64, c: i64) -> Result<PipelineReport> {
    theorem_a_pipeline_with(p, a, b, c, &PipelineOptions::default(), &mut |q| find_embedding(q))
}

/// Checks p prime, p ∤ b, p ∤ c and Σ(pa,b,c) pairwise coprime, returning
/// Σ(pa,b,c).
pub fn check_input(p: i64, a: i64, b: i64, c: i64) -> Result<BrieskornTriple> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if a < 1 || b < 2 || c < 2 {
        return Err(Error::invalid("need a >= 1 and b, c >= 2"));
    }
    if b % p == 0 || c % p == 0 {
        return Err(Error::invalid(format!("{p} must not divide b or c")));
    }
    let pa = p.checked_mul(a).ok_or_else(|| Error::invalid("pa overflows"))?;
    BrieskornTriple::new(pa, b, c)
}

pub fn theorem_a_pipeline_with(
    p: i64,
    a: i64,
    b: i64,
    c: i64,
    opts: &PipelineOptions,
    embed: &mut dyn FnMut(&IntegerMatrix) -> Result<Option<DiagonalEmbedding>>,
) -> Result<PipelineReport> {
    let sphere = check_input(p, a, b, c)?;
    let seifert = normalize(&sphere)?;
    let g = canonical_graph(&seifert)?;
    let cen = census(&g, p)?;
    let q = intersection_matrix(&g);

    let certificate_route = match embed(&q) {
        Err(Error::SearchLimit(n)) => CertificateRoute::Undecided {
            reason: format!("embedding search stopped after {n} node expansions"),
        },
        Err(e) => return Err(e),
        Ok(None) => CertificateRoute::DonaldsonObstructs,
        Ok(Some(emb)) => match select_configuration(&g, &cen, opts.arms)? {
            Selection::AcyclicHypothesisFails { delta } => CertificateRoute::AcyclicHypothesisFails { delta },
            Selection::Selected { configuration } => {
                let mut cert = certify(&q, &emb, &configuration)?;
                cert.input = Some([p, a, b, c]);
                if cert.is_obstructed() {
                    CertificateRoute::Certified { certificate: cert }
                } else {
                    CertificateRoute::NoCertificate { certificate: cert }
                }
            }
        },
    };

    let quotient_route = if a == 1 {
        QuotientRoute::TorusKnot {
            report: slice_obstruction_report(b, c)?,
        }
    } else {
        let t = BrieskornTriple::new(a, b, c)?;
        QuotientRoute::Bounding {
            quotient: [a, b, c],
            report: bounding_report_with(&t, embed)?,
        }
    };

    let fixed_sphere_square = if p == 2 && cen.fixed_disks.len() == 1 {
        let f = fixed_sphere_class(&g, &cen)?;
        let gs = g_signature_solve(&cen, g.len())?;
        Some(SquareComparison {
            consistent: f.square == BigInt::from(gs),
            from_intersections: f.square,
            from_g_signature: gs,
        })
    } else {
        None
    };

    let verdict = if certificate_route.obstructs() || quotient_route.obstructs() {
        Verdict::Obstructed
    } else {
        Verdict::NotObstructed
    };
    Ok(PipelineReport {
        p,
        a,
        b,
        c,
        sphere: sphere.as_given(),
        seifert,
        census: cen,
        certificate_route,
        quotient_route,
        fixed_sphere_square,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{c_inv_345, c_inv_358, q345, q358};
    use crate::lattice::enumerate_embeddings;
    use crate::seifert::{family, Family};
    use proptest::prelude::*;

    fn graph(a: i64, b: i64, c: i64) -> PlumbingGraph {
        canonical_graph(&normalize(&BrieskornTriple::new(a, b, c).unwrap()).unwrap()).unwrap()
    }

    fn config(g: &PlumbingGraph, p: i64, arms: Option<(usize, usize)>) -> Configuration {
        match select_configuration(g, &census(g, p).unwrap(), arms).unwrap() {
            Selection::Selected { configuration } => configuration,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn configuration_345() {
        let g = graph(3, 4, 5);
        let explicit = config(&g, 2, Some((0, 1)));
        assert_eq!((explicit.f1, explicit.f2, explicit.f3), (0, 1, 2));
        assert_eq!((g.weight(1), g.weight(2)), (-3, -4));
        let default = config(&g, 2, None);
        assert_eq!((default.f1, default.f2, default.f3), (0, 1, 3));
        assert_eq!(default.arms, Some((0, 2)));
    }

    #[test]
    fn central_weight_failure_is_terminal() {
        let g = graph(2, 3, 5);
        let sel = select_configuration(&g, &census(&g, 2).unwrap(), None).unwrap();
        assert_eq!(sel, Selection::AcyclicHypothesisFails { delta: -2 });
    }

    #[test]
    fn certify_345_with_printed_inverse() {
        let g = graph(3, 4, 5);
        let emb = DiagonalEmbedding::new(&q345(), c_inv_345()).unwrap();
        for arms in [Some((0, 1)), None] {
            let cert = certify(&q345(), &emb, &config(&g, 2, arms)).unwrap();
            assert!(cert.is_obstructed(), "{:?}", cert.failing_check);
            assert_eq!(cert.k, Some(0));
            let cols = cert.columns.as_ref().unwrap();
            assert!(!cols.f2[0].is_zero() && !cols.f3[0].is_zero());
            let bf = cert.brute_force.unwrap();
            assert_eq!(bf.signed_permutations, 120 * 32);
            assert_eq!(bf.admissible, 0);
        }
    }

    #[test]
    fn certify_is_independent_of_embedding_class() {
        for (t, q) in [((3, 4, 5), q345()), ((3, 5, 8), q358())] {
            let g = graph(t.0, t.1, t.2);
            let p = 2;
            let cfg = config(&g, p, None);
            let all = enumerate_embeddings(&q, 1000).unwrap();
            assert!(!all.embeddings.is_empty());
            for e in &all.embeddings {
                assert!(certify(&q, e, &cfg).unwrap().is_obstructed());
            }
        }
        let g = graph(3, 5, 8);
        let emb = DiagonalEmbedding::new(&q358(), c_inv_358()).unwrap();
        assert!(certify(&q358(), &emb, &config(&g, 2, None)).unwrap().is_obstructed());
    }

    #[test]
    fn premise_failures_give_no_certificate() {
        let emb = DiagonalEmbedding::new(&q345(), c_inv_345()).unwrap();
        let same = Configuration {
            f1: 0,
            f2: 1,
            f3: 1,
            arms: None,
        };
        let cert = certify(&q345(), &emb, &same).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::NoCertificate);
        assert!(cert.failing_check.is_some());
        // F2 and F3 adjacent: F2.F3 = 1
        let adjacent = Configuration {
            f1: 0,
            f2: 3,
            f3: 4,
            arms: None,
        };
        assert!(!certify(&q345(), &emb, &adjacent).unwrap().is_obstructed());
        // a form the embedding does not realize
        let mut q = q345();
        q[(1, 1)] = BigInt::from(-5);
        assert!(!certify(&q, &emb, &config(&graph(3, 4, 5), 2, None)).unwrap().is_obstructed());
    }

    #[test]
    fn brute_force_finds_admissible_bases_when_they_exist() {
        // u = e_0, v = e_1, w = e_2: trivially admissible
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let bf = brute_force(&big(&[1, 0, 0]), &big(&[0, 1, 0]), &big(&[0, 0, -1]));
        assert_eq!(bf.signed_permutations, 6 * 8);
        assert_eq!(bf.admissible, 6 * 8);
        let bf = brute_force(&big(&[1, 0, 0]), &big(&[1, 1, 0]), &big(&[1, -1, 0]));
        assert_eq!(bf.admissible, 0);
    }

    #[test]
    fn pipeline_345() {
        let r = theorem_a_pipeline(2, 2, 3, 5).unwrap();
        assert_eq!(r.sphere, [4, 3, 5]);
        assert_eq!(r.verdict, Verdict::Obstructed);
        assert!(matches!(r.certificate_route, CertificateRoute::Certified { .. }));
        match &r.quotient_route {
            QuotientRoute::Bounding { quotient, report } => {
                assert_eq!(*quotient, [2, 3, 5]);
                assert!(report.obstructed);
            }
            other => panic!("{other:?}"),
        }
        let sq = r.fixed_sphere_square.unwrap();
        assert_eq!((sq.from_g_signature, sq.consistent), (-4, true));
    }

    #[test]
    fn pipeline_torus_knot_quotient() {
        let r = theorem_a_pipeline(2, 1, 5, 7).unwrap();
        assert_eq!(r.sphere, [2, 5, 7]);
        assert!(matches!(r.certificate_route, CertificateRoute::Certified { .. }));
        match &r.quotient_route {
            QuotientRoute::TorusKnot { report } => assert!(report.obstructed),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pipeline_sigma_m_quotients() {
        for m in 2..=6i64 {
            // Σ(2m−1, 2m, 2m+1) with p = 2 has quotient Σ(2m−1, m, 2m+1)
            let r = theorem_a_pipeline(2, m, 2 * m - 1, 2 * m + 1).unwrap();
            match &r.quotient_route {
                QuotientRoute::Bounding { report, .. } => {
                    if m % 2 == 0 {
                        assert_eq!(report.mu_bar, -m / 2);
                    } else {
                        assert_eq!(report.r, 1);
                    }
                    assert!(report.obstructed);
                }
                other => panic!("{other:?}"),
            }
            assert_eq!(r.verdict, Verdict::Obstructed);
        }
    }

    #[test]
    fn pipeline_rejects_bad_input() {
        assert!(theorem_a_pipeline(6, 2, 3, 5).is_err());
        assert!(theorem_a_pipeline(2, 1, 4, 5).is_err());
        assert!(theorem_a_pipeline(3, 1, 3, 5).is_err());
        assert!(theorem_a_pipeline(2, 3, 9, 5).is_err());
    }

    #[test]
    fn casson_harer_members_are_obstructed() {
        for p in (2..=8).step_by(2) {
            for s in (1..=5).step_by(2) {
                let Ok(t) = family(Family::CassonHarerEven { p, s }) else { continue };
                let comps = t.as_given();
                for prime in [2, 3, 5, 7, 11, 13] {
                    let hits: Vec<usize> = (0..3).filter(|&i| comps[i] % prime == 0).collect();
                    let [i] = hits[..] else { continue };
                    let rest: Vec<i64> = (0..3).filter(|&j| j != i).map(|j| comps[j]).collect();
                    let r = theorem_a_pipeline(prime, comps[i] / prime, rest[0], rest[1]).unwrap();
                    assert_eq!(r.verdict, Verdict::Obstructed, "{t} p={prime}");
                    assert!(r.certificate_route.obstructs(), "{t} p={prime}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn perturbed_inputs_never_certify(i in 0usize..5, j in 0usize..5, delta in -2i64..=2, on_q in prop::bool::ANY) {
            prop_assume!(delta != 0);
            let g = graph(3, 4, 5);
            let cfg = config(&g, 2, None);
            let mut q = q345();
            let mut b = c_inv_345();
            if on_q {
                q[(i, j)] = &q[(i, j)] + delta;
                if i != j {
                    q[(j, i)] = &q[(j, i)] + delta;
                }
            } else {
                b[(i, j)] = &b[(i, j)] + delta;
            }
            let emb = DiagonalEmbedding::unchecked(b);
            let cert = certify(&q, &emb, &cfg).unwrap();
            prop_assert!(!cert.is_obstructed());
        }
    }
}
