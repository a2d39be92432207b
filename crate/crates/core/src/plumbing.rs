//! Weighted plumbing trees and their intersection lattices.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, eval_neg_continued_fraction, IntegerMatrix};
use crate::seifert::{SeifertData, SeifertPair};

/// Upper bound on node count accepted from untrusted graph input.
pub const MAX_NODES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub id: i64,
    pub weight: i64,
}

/// A chain of nodes hanging off the central node, listed from the central
/// end outward, with the Seifert pair it realizes when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arm {
    pub nodes: Vec<usize>,
    pub pair: Option<SeifertPair>,
}

/// A weighted tree of 2-spheres. Node indices (positions in `nodes`) define
/// the basis order of the intersection form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlumbingGraph {
    nodes: Vec<Node>,
    edges: Vec<(usize, usize)>,
    central: Option<usize>,
    arms: Vec<Arm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    nodes: Vec<Node>,
    edges: Vec<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    central: Option<i64>,
}

impl PlumbingGraph {
    /// Builds a graph from explicit nodes and index edges, checking that the
    /// edges form a tree.
    pub fn new(nodes: Vec<Node>, edges: Vec<(usize, usize)>, central: Option<usize>) -> Result<Self> {
        let n = nodes.len();
        if n > MAX_NODES {
            return Err(Error::invalid(format!("graph has more than {MAX_NODES} nodes")));
        }
        let ids: BTreeSet<i64> = nodes.iter().map(|v| v.id).collect();
        if ids.len() != n {
            return Err(Error::invalid("node ids are not unique"));
        }
        if let Some(c) = central {
            if c >= n {
                return Err(Error::invalid("central node out of range"));
            }
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) references a missing node")));
            }
            if a == b {
                return Err(Error::invalid("self-loop in plumbing graph"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::invalid(format!("duplicate edge ({a},{b})")));
            }
        }
        if n > 0 && edges.len() != n - 1 {
            return Err(Error::invalid(format!(
                "a tree on {n} nodes has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        if n == 0 && !edges.is_empty() {
            return Err(Error::invalid("edges given for an empty graph"));
        }
        let mut g = PlumbingGraph {
            nodes,
            edges,
            central,
            arms: Vec::new(),
        };
        if n > 0 && g.distances_from(0).iter().any(Option::is_none) {
            return Err(Error::invalid("plumbing graph is not connected"));
        }
        g.arms = g.detect_arms();
        Ok(g)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.nodes.len() > MAX_NODES {
            return Err(Error::invalid(format!("graph has more than {MAX_NODES} nodes")));
        }
        let index: HashMap<i64, usize> = raw
            .nodes
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, i))
            .collect();
        let lookup = |id: i64| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::invalid(format!("edge references unknown node id {id}")))
        };
        let edges = raw
            .edges
            .iter()
            .map(|&(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let central = raw.central.map(lookup).transpose()?;
        Self::new(raw.nodes, edges, central)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = GraphJson {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (self.nodes[a].id, self.nodes[b].id))
                .collect(),
            central: self.central.map(|c| self.nodes[c].id),
        };
        serde_json::to_value(raw).expect("graph serializes")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn central(&self) -> Option<usize> {
        self.central
    }

    pub fn central_weight(&self) -> Option<i64> {
        self.central.map(|c| self.nodes[c].weight)
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.nodes[i].weight
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    /// Weights along an arm, central end first.
    pub fn arm_weights(&self, arm: usize) -> Vec<i64> {
        self.arms[arm].nodes.iter().map(|&i| self.nodes[i].weight).collect()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut dist = vec![None; n];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &w in &adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Splits a star-shaped tree into simple paths from the central node.
    /// Non-star trees (a branch point away from the center) yield no arms.
    fn detect_arms(&self) -> Vec<Arm> {
        let Some(c) = self.central else {
            return Vec::new();
        };
        let mut arms = Vec::new();
        let mut starts = self.neighbors(c);
        starts.sort_unstable();
        for start in starts {
            let mut chain = vec![start];
            let mut prev = c;
            let mut cur = start;
            loop {
                let next: Vec<usize> = self.neighbors(cur).into_iter().filter(|&w| w != prev).collect();
                match next.as_slice() {
                    [] => break,
                    [w] => {
                        chain.push(*w);
                        prev = cur;
                        cur = *w;
                    }
                    _ => return Vec::new(),
                }
            }
            let pair = arm_pair(&chain.iter().map(|&i| self.nodes[i].weight).collect::<Vec<_>>());
            arms.push(Arm { nodes: chain, pair });
        }
        arms
    }

    fn with_arm_pairs(mut self, pairs: &[SeifertPair]) -> Self {
        for (arm, p) in self.arms.iter_mut().zip(pairs) {
            arm.pair = Some(*p);
        }
        self
    }
}

/// Seifert pair realized by an arm of weights `-x1, ..., -xk` with all
/// `xi >= 2`.
fn arm_pair(weights: &[i64]) -> Option<SeifertPair> {
    if weights.is_empty() || weights.iter().any(|&w| w > -2) {
        return None;
    }
    let entries: Vec<BigInt> = weights.iter().map(|&w| BigInt::from(-w)).collect();
    let r = eval_neg_continued_fraction(&entries)?;
    let alpha = i64::try_from(r.numer()).ok()?;
    let beta = i64::try_from(r.denom()).ok()?;
    SeifertPair::new(alpha, beta).ok()
}

/// Builds a star: central node 0, then each arm's chain in order.
fn star(central_weight: i64, arms: &[Vec<i64>]) -> Result<PlumbingGraph> {
    let mut nodes = vec![Node {
        id: 0,
        weight: central_weight,
    }];
    let mut edges = Vec::new();
    for arm in arms {
        let mut prev = 0usize;
        for &w in arm {
            let idx = nodes.len();
            nodes.push(Node {
                id: idx as i64,
                weight: w,
            });
            edges.push((prev, idx));
            prev = idx;
        }
    }
    PlumbingGraph::new(nodes, edges, Some(0))
}

/// Minimal negative definite resolution graph of normalized Seifert data.
pub fn canonical_graph(d: &SeifertData) -> Result<PlumbingGraph> {
    if !d.is_normalized() {
        return Err(Error::invalid("canonical_graph needs normalized Seifert data"));
    }
    let arms = d
        .pairs
        .iter()
        .map(|p| {
            exact::neg_continued_fraction(p.alpha, p.beta)
                .map(|cf| cf.into_iter().map(|x| -x).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let total: usize = 1 + arms.iter().map(Vec::len).sum::<usize>();
    if total > MAX_NODES {
        return Err(Error::invalid(format!("resolution graph would exceed {MAX_NODES} nodes")));
    }
    let g = star(d.central, &arms)?.with_arm_pairs(&d.pairs);
    let inertia = exact::signature(&intersection_matrix(&g))?;
    if !inertia.is_negative_definite() {
        return Err(Error::internal("canonical plumbing form is not negative definite"));
    }
    Ok(g)
}

/// Star graph with one node of weight `alpha * beta` per pair, for data
/// with every `beta = ±1`.
pub fn direct_graph(b: i64, pairs: &[(i64, i64)]) -> Result<PlumbingGraph> {
    let mut checked = Vec::with_capacity(pairs.len());
    for &(alpha, beta) in pairs {
        if beta.abs() != 1 {
            return Err(Error::invalid(format!("direct graph needs beta = ±1, got ({alpha},{beta})")));
        }
        checked.push(SeifertPair::new(alpha, beta)?);
    }
    let arms: Vec<Vec<i64>> = checked.iter().map(|p| vec![p.alpha * p.beta]).collect();
    Ok(star(b, &arms)?.with_arm_pairs(&checked))
}

/// The graph Γ'_m presenting Σ(2m−1, m, 2m+1).
pub fn gamma_prime(m: i64) -> Result<PlumbingGraph> {
    if m < 2 {
        return Err(Error::invalid("m must be at least 2"));
    }
    direct_graph(0, &[(2 * m - 1, 1), (m, -1), (2 * m + 1, 1)])
}

pub fn intersection_matrix(g: &PlumbingGraph) -> IntegerMatrix {
    let n = g.len();
    let mut q = IntegerMatrix::zeros(n, n);
    for (i, v) in g.nodes.iter().enumerate() {
        q[(i, i)] = v.weight.into();
    }
    for &(a, b) in &g.edges {
        q[(a, b)] = 1.into();
        q[(b, a)] = 1.into();
    }
    q
}

/// Characteristic 0/1 vector of the intersection form and its square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WuClass {
    pub coordinates: Vec<bool>,
    #[serde(with = "crate::json::bigint")]
    pub square: BigInt,
}

impl WuClass {
    pub fn support(&self) -> Vec<usize> {
        (0..self.coordinates.len()).filter(|&i| self.coordinates[i]).collect()
    }
}

pub fn wu_class(g: &PlumbingGraph) -> Result<WuClass> {
    let q = intersection_matrix(g);
    let d: Vec<bool> = g.nodes.iter().map(|v| v.weight.rem_euclid(2) == 1).collect();
    let w = exact::solve_mod2(&q, &d)?;
    let v: Vec<BigInt> = w.iter().map(|&b| BigInt::from(b as i64)).collect();
    let square = q.quadratic(&v)?;
    Ok(WuClass {
        coordinates: w,
        square,
    })
}

/// χ of the closed model M(Γ) ∪ (−W) for acyclic W: `b2 + 2`.
pub fn euler_characteristic_closed(g: &PlumbingGraph) -> i64 {
    g.len() as i64 + 2
}

/// |det Q| for the graph's form.
pub fn determinant_abs(g: &PlumbingGraph) -> Result<BigInt> {
    Ok(intersection_matrix(g).determinant()?.abs())
}
