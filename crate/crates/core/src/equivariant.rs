//! Rotation data of the cyclic subgroup ℤ/p ⊂ S¹ acting on an equivariant
//! plumbing, and the resulting fixed-point set.
//!
//! Each node is glued from two charts `D²(a₁)×D²(b₁)` and `D²(a₂)×D²(b₂)`
//! with `(a₂,b₂) = T(w)(a₁,b₁)`, `T(w) = [[-1,0],[-w,1]]`. Moving to the next
//! node swaps base and fiber via `A = [[0,1],[1,0]]`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{neg_continued_fraction, solve_unimodular};
use crate::plumbing::{intersection_matrix, PlumbingGraph};
use crate::seifert::is_prime;

pub type Mat2 = [[i64; 2]; 2];

pub const SWAP: Mat2 = [[0, 1], [1, 0]];

pub fn transfer(w: i64) -> Mat2 {
    [[-1, 0], [-w, 1]]
}

fn mul(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0]
                .checked_mul(y[0][j])
                .and_then(|s| x[i][1].checked_mul(y[1][j]).and_then(|t| s.checked_add(t)))
                .ok_or_else(|| Error::invalid("rotation data overflow 64 bits"))?;
        }
    }
    Ok(out)
}

fn apply(m: &Mat2, v: RotationDatum) -> RotationDatum {
    RotationDatum {
        base: m[0][0] * v.base + m[0][1] * v.fiber,
        fiber: m[1][0] * v.base + m[1][1] * v.fiber,
    }
}

pub fn det2(m: &Mat2) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Exact rotation pair of one chart, in base and fiber coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RotationDatum {
    pub base: i64,
    pub fiber: i64,
}

impl RotationDatum {
    pub const fn new(base: i64, fiber: i64) -> Self {
        RotationDatum { base, fiber }
    }

    pub fn class(&self, p: i64) -> RotationClass {
        RotationClass::new(self.base, self.fiber, p)
    }
}

/// A rotation pair mod p, unordered and up to a common sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RotationClass {
    pub a: i64,
    pub b: i64,
    pub p: i64,
}

impl RotationClass {
    pub fn new(a: i64, b: i64, p: i64) -> Self {
        let red = |x: i64| x.rem_euclid(p);
        let neg = |x: i64| (-x).rem_euclid(p);
        let candidates = [(red(a), red(b)), (red(b), red(a)), (neg(a), neg(b)), (neg(b), neg(a))];
        let (a, b) = candidates.into_iter().min().expect("nonempty");
        RotationClass { a, b, p }
    }
}

impl std::fmt::Display for RotationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{}) mod {}", self.a, self.b, self.p)
    }
}

/// The two charts of a node and the accumulated transfer `L_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NodeCharts {
    pub first: RotationDatum,
    pub second: RotationDatum,
    pub transfer: Mat2,
}

impl NodeCharts {
    pub const CENTRAL: NodeCharts = NodeCharts {
        first: RotationDatum::new(0, 1),
        second: RotationDatum::new(0, 1),
        transfer: [[1, 0], [0, 1]],
    };
}

/// Charts along an arm with weights `w₁..wₙ` (central end first). Node `k`
/// carries `T_k⁻¹ L_k v` and `L_k v` where `v = (1,0)` and
/// `L_k = T_k A L_{k-1}`, `L_1 = T_1`.
pub fn propagate_arm(weights: &[i64]) -> Result<Vec<NodeCharts>> {
    let v = RotationDatum::new(1, 0);
    let mut out = Vec::with_capacity(weights.len());
    let mut prev: Option<Mat2> = None;
    for &w in weights {
        let t = transfer(w);
        let l = match prev {
            None => t,
            Some(p) => mul(&t, &mul(&SWAP, &p)?)?,
        };
        let first = match prev {
            None => v,
            Some(p) => apply(&SWAP, apply(&p, v)),
        };
        let second = apply(&l, v);
        if apply(&t, first) != second {
            return Err(Error::internal("chart transfer identity failed"));
        }
        out.push(NodeCharts {
            first,
            second,
            transfer: l,
        });
        prev = Some(l);
    }
    Ok(out)
}

/// Bottom row of `L_n` for the arm resolving the fiber of order `pa` with
/// Seifert invariant `q₁`.
pub fn last_node_form(p: i64, a: i64, q1: i64) -> Result<(i64, i64)> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let pa = p.checked_mul(a).ok_or_else(|| Error::invalid("pa overflows"))?;
    let weights: Vec<i64> = neg_continued_fraction(pa, q1)?.into_iter().map(|x| -x).collect();
    let charts = propagate_arm(&weights)?;
    let l = charts.last().expect("nonempty arm").transfer;
    let (x, y) = (l[1][0], l[1][1]);
    if x.abs() != pa || y.abs() != q1 {
        return Err(Error::internal(format!("bottom row ({x},{y}) is not (±{pa},±{q1})")));
    }
    if l[0][0].rem_euclid(p) == 0 {
        return Err(Error::internal(format!("r = {} vanishes mod {p}", l[0][0])));
    }
    if det2(&l).abs() != 1 {
        return Err(Error::internal("transfer matrix is not unimodular"));
    }
    Ok((x, y))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsolatedPoint {
    /// Id of the node on the central side of the point.
    pub node: i64,
    pub rotation: RotationDatum,
    pub class: RotationClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedSphere {
    pub node: i64,
    pub square: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedDisk {
    pub node: i64,
    pub fiber_order: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointCensus {
    pub p: i64,
    pub isolated_points: Vec<IsolatedPoint>,
    pub fixed_spheres: Vec<FixedSphere>,
    pub fixed_disks: Vec<FixedDisk>,
    pub invariant_spheres: Vec<i64>,
    /// Observations that depart from the pattern of a pa-arm (for example a
    /// fixed terminal node on another arm).
    pub flags: Vec<String>,
    pub nodes: usize,
}

impl FixedPointCensus {
    /// 2·spheres + isolated points + disks, which must equal χ(M(Γ)) = n + 1.
    pub fn lefschetz_count(&self) -> i64 {
        2 * self.fixed_spheres.len() as i64 + self.isolated_points.len() as i64 + self.fixed_disks.len() as i64
    }

    /// Euler characteristic of the fixed set after each disk is capped to a
    /// sphere in the closed model.
    pub fn closed_euler_count(&self) -> i64 {
        self.lefschetz_count() + self.fixed_disks.len() as i64
    }
}

/// Fixed-point data of ℤ/p ⊂ S¹ on the plumbing of a star-shaped canonical
/// graph. A node is fixed when its base rotation vanishes mod p; the point
/// between two consecutive invariant nodes, and the outer pole of a terminal
/// node, is isolated when neither coordinate vanishes; the outer pole lies on
/// a fixed disk when the fiber coordinate (the fiber order) vanishes.
pub fn census(g: &PlumbingGraph, p: i64) -> Result<FixedPointCensus> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let c = g.central().ok_or_else(|| Error::invalid("census needs a central node"))?;
    if g.arms().is_empty() && g.len() > 1 {
        return Err(Error::invalid("census needs a star-shaped graph"));
    }
    let pairs: Vec<_> = g
        .arms()
        .iter()
        .map(|a| a.pair.ok_or_else(|| Error::invalid("arm does not realize a Seifert pair")))
        .collect::<Result<_>>()?;
    let divisible: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].alpha % p == 0).collect();
    if divisible.len() > 1 {
        return Err(Error::invalid(format!("{p} divides more than one fiber order")));
    }
    let id = |i: usize| g.nodes()[i].id;
    let zero = |x: i64| x.rem_euclid(p) == 0;
    let mut out = FixedPointCensus {
        p,
        isolated_points: Vec::new(),
        fixed_spheres: vec![FixedSphere {
            node: id(c),
            square: g.weight(c),
        }],
        fixed_disks: Vec::new(),
        invariant_spheres: Vec::new(),
        flags: Vec::new(),
        nodes: g.len(),
    };
    if divisible.is_empty() {
        out.flags.push(format!("{p} divides no fiber order; the action on the boundary is free"));
    }
    for (ai, arm) in g.arms().iter().enumerate() {
        let charts = propagate_arm(&g.arm_weights(ai))?;
        let last = arm.nodes.len() - 1;
        for (k, (&node, ch)) in arm.nodes.iter().zip(&charts).enumerate() {
            if zero(ch.first.base) != zero(ch.second.base) {
                return Err(Error::internal("chart base rotations disagree mod p"));
            }
            if zero(ch.first.base) {
                out.fixed_spheres.push(FixedSphere {
                    node: id(node),
                    square: g.weight(node),
                });
                if k == 0 || (k == last && divisible.contains(&ai)) {
                    return Err(Error::internal(format!(
                        "node {} at the end of an arm is fixed",
                        id(node)
                    )));
                }
                if k == last {
                    out.flags.push(format!(
                        "terminal node {} of the arm with fiber order {} is fixed",
                        id(node),
                        pairs[ai].alpha
                    ));
                }
            } else {
                out.invariant_spheres.push(id(node));
            }
            let pole = ch.second;
            if k == last {
                if pole.fiber.abs() != pairs[ai].alpha {
                    return Err(Error::internal(format!(
                        "terminal fiber rotation {} differs from the fiber order {}",
                        pole.fiber, pairs[ai].alpha
                    )));
                }
                if zero(pole.fiber) {
                    out.fixed_disks.push(FixedDisk {
                        node: id(node),
                        fiber_order: pairs[ai].alpha,
                    });
                    continue;
                }
            }
            if !zero(pole.base) && !zero(pole.fiber) {
                out.isolated_points.push(IsolatedPoint {
                    node: id(node),
                    rotation: pole,
                    class: pole.class(p),
                });
            }
        }
    }
    out.invariant_spheres.sort_unstable();
    if out.lefschetz_count() != g.len() as i64 + 1 {
        return Err(Error::internal(format!(
            "Lefschetz count {} differs from χ = {}",
            out.lefschetz_count(),
            g.len() + 1
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedSphereClass {
    /// Coordinates in the plumbing basis.
    #[serde(with = "crate::json::bigint_vec")]
    pub x: Vec<BigInt>,
    #[serde(with = "crate::json::bigint")]
    pub square: BigInt,
    pub disk_node: i64,
}

/// Homology class of the sphere formed by capping the fixed disk: the
/// solution of `Qx = b` with `b = -1` at the disk node. The opposite
/// orientation is `-x`.
pub fn fixed_sphere_class(g: &PlumbingGraph, census: &FixedPointCensus) -> Result<FixedSphereClass> {
    let disk = match census.fixed_disks.as_slice() {
        [d] => d,
        [] => return Err(Error::invalid("census has no fixed disk")),
        _ => return Err(Error::invalid("census has more than one fixed disk")),
    };
    let idx = g
        .nodes()
        .iter()
        .position(|v| v.id == disk.node)
        .ok_or_else(|| Error::invalid("fixed disk node is not in the graph"))?;
    let q = intersection_matrix(g);
    let mut b = vec![BigInt::from(0); g.len()];
    b[idx] = BigInt::from(-1);
    let x = solve_unimodular(&q, &b)?;
    let square = q.quadratic(&x)?;
    Ok(FixedSphereClass {
        x,
        square,
        disk_node: disk.node,
    })
}

/// Square of the capped fixed sphere forced by the G-signature theorem for
/// p = 2 on a homologically trivial closed model with b₂ = `rank`.
///
/// For an involution every isolated point has rotation (1,1) mod 2 and
/// contributes cot²(π/2) = 0; each fixed sphere contributes its square.
pub fn g_signature_solve(census: &FixedPointCensus, rank: usize) -> Result<i64> {
    if census.p != 2 {
        return Err(Error::invalid(format!(
            "exact G-signature evaluation is implemented for p = 2 only, got {}",
            census.p
        )));
    }
    if census.isolated_points.iter().any(|pt| pt.class != RotationClass::new(1, 1, 2)) {
        return Err(Error::internal("isolated point with a rotation that vanishes mod 2"));
    }
    let known: i64 = census.fixed_spheres.iter().map(|s| s.square).sum();
    Ok(-(rank as i64) - known)
}
