//! Embeddings of negative definite plumbing lattices into the standard
//! diagonal lattice.
//!
//! An embedding is an integer matrix `B` whose column `j` writes the plumbing
//! basis vector `F_j` in a diagonal basis with `e_i · e_j = -δ_ij`, so
//! `BᵗB = -Q`. Two embeddings are identified when they differ by a signed
//! permutation of the rows of `B`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{signature, IntegerMatrix};

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

/// Largest |Q_jj| the search accepts.
const MAX_NORM: i64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DiagonalEmbedding {
    #[serde(with = "crate::json::matrix")]
    matrix: IntegerMatrix,
}

impl DiagonalEmbedding {
    /// Wraps `b` after checking it against `q`.
    pub fn new(q: &IntegerMatrix, b: IntegerMatrix) -> Result<Self> {
        validate_embedding(q, &b).map_err(|d| Error::invalid(format!("not an embedding: {d}")))?;
        Ok(DiagonalEmbedding { matrix: b })
    }

    /// Parses a JSON matrix (array of rows) and validates it against `q`.
    pub fn from_json(q: &IntegerMatrix, s: &str) -> Result<Self> {
        Self::new(q, crate::json::matrix_from_str(s)?)
    }

    #[cfg(test)]
    pub(crate) fn unchecked(b: IntegerMatrix) -> Self {
        DiagonalEmbedding { matrix: b }
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntegerMatrix {
        self.matrix
    }

    pub fn canonical(&self) -> DiagonalEmbedding {
        DiagonalEmbedding {
            matrix: canonical_form(&self.matrix),
        }
    }

    /// Image of a lattice vector given in plumbing coordinates.
    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        self.matrix.mul_vec(x)
    }
}

/// Why a candidate matrix fails to be an embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingDefect {
    Shape {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    Gram {
        i: usize,
        j: usize,
        #[serde(with = "crate::json::bigint")]
        expected: BigInt,
        #[serde(with = "crate::json::bigint")]
        actual: BigInt,
    },
    Determinant {
        #[serde(with = "crate::json::bigint")]
        det: BigInt,
    },
}

impl std::fmt::Display for EmbeddingDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmbeddingDefect::Shape { expected, actual } => write!(
                f,
                "shape {}x{} where {}x{} was expected",
                actual.0, actual.1, expected.0, expected.1
            ),
            EmbeddingDefect::Gram {
                i,
                j,
                expected,
                actual,
            } => write!(f, "(BᵗB)[{i}][{j}] = {actual}, expected {expected}"),
            EmbeddingDefect::Determinant { det } => write!(f, "det B = {det}"),
        }
    }
}

/// Checks `BᵗB = -Q` and `|det B| = 1`, reporting the first offending entry.
pub fn validate_embedding(q: &IntegerMatrix, b: &IntegerMatrix) -> std::result::Result<(), EmbeddingDefect> {
    let n = q.rows();
    if !q.is_square() || b.rows() != n || b.cols() != n {
        return Err(EmbeddingDefect::Shape {
            expected: (n, n),
            actual: (b.rows(), b.cols()),
        });
    }
    let gram = b.transpose().mul(b).expect("shapes checked");
    for i in 0..n {
        for j in 0..n {
            let expected = -&q[(i, j)];
            if gram[(i, j)] != expected {
                return Err(EmbeddingDefect::Gram {
                    i,
                    j,
                    expected,
                    actual: gram[(i, j)].clone(),
                });
            }
        }
    }
    let det = b.determinant().expect("square");
    if !det.abs().is_one() {
        return Err(EmbeddingDefect::Determinant { det });
    }
    Ok(())
}

/// Representative of the signed row permutation class of `b`: each row is
/// flipped so its first nonzero entry is positive, then rows are sorted by
/// (first nonzero column, entries).
pub fn canonical_form(b: &IntegerMatrix) -> IntegerMatrix {
    let mut rows: Vec<Vec<BigInt>> = b
        .to_rows()
        .into_iter()
        .map(|r| match r.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => r.into_iter().map(|v| -v).collect(),
            _ => r,
        })
        .collect();
    let lead = |r: &Vec<BigInt>| r.iter().position(|x| !x.is_zero()).unwrap_or(r.len());
    rows.sort_by(|x, y| lead(x).cmp(&lead(y)).then_with(|| x.cmp(y)));
    IntegerMatrix::try_from_rows(&rows).unwrap_or_else(|_| b.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryCount {
    #[serde(with = "crate::json::bigint")]
    pub value: BigInt,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryProfile {
    /// Multiset of |B_ij|, ascending by value.
    pub counts: Vec<EntryCount>,
    pub has_non_unit: bool,
}

impl EntryProfile {
    pub fn max_abs(&self) -> BigInt {
        self.counts.last().map(|c| c.value.clone()).unwrap_or_default()
    }
}

pub fn entry_profile(e: &DiagonalEmbedding) -> EntryProfile {
    let mut counts = std::collections::BTreeMap::<BigInt, usize>::new();
    for r in e.matrix.to_rows() {
        for x in r {
            *counts.entry(x.abs()).or_default() += 1;
        }
    }
    let two = BigInt::from(2);
    let has_non_unit = counts.keys().any(|v| *v >= two);
    EntryProfile {
        counts: counts
            .into_iter()
            .map(|(value, count)| EntryCount { value, count })
            .collect(),
        has_non_unit,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_limit: u64,
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_limit: DEFAULT_NODE_LIMIT,
            parallel: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationStatus {
    Exhaustive,
    CountLimitReached,
    NodeLimitReached,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    /// Canonical representatives in ascending canonical order.
    pub embeddings: Vec<DiagonalEmbedding>,
    pub status: EnumerationStatus,
    pub nodes: u64,
}

pub fn find_embedding(q: &IntegerMatrix) -> Result<Option<DiagonalEmbedding>> {
    find_embedding_with(q, &SearchOptions::default())
}

pub fn find_embedding_with(q: &IntegerMatrix, opts: &SearchOptions) -> Result<Option<DiagonalEmbedding>> {
    let problem = Problem::new(q)?;
    let counter = Counter::new(opts.node_limit);
    let frontier = problem
        .frontier(&counter, if opts.parallel { 64 } else { 1 })
        .map_err(|_| Error::SearchLimit(opts.node_limit))?;
    let best = AtomicUsize::new(usize::MAX);
    let run = |(idx, state): (usize, &Vec<Vec<i64>>)| -> Option<std::result::Result<Vec<Vec<i64>>, Limit>> {
        let mut local = counter.local();
        let mut partial = state.clone();
        let mut found = None;
        let stop = || best.load(Ordering::Relaxed) < idx;
        let r = problem.extend(&mut partial, &mut local, &stop, &mut |cols| {
            found = Some(cols.to_vec());
            ControlFlow::Break(())
        });
        local.flush();
        match r {
            Err(l) => Some(Err(l)),
            Ok(_) => found.map(|f| {
                best.fetch_min(idx, Ordering::Relaxed);
                Ok(f)
            }),
        }
    };
    let result = if opts.parallel {
        frontier.par_iter().enumerate().find_map_first(run)
    } else {
        frontier.iter().enumerate().find_map(run)
    };
    match result {
        None => Ok(None),
        Some(Err(Limit)) => Err(Error::SearchLimit(opts.node_limit)),
        Some(Ok(cols)) => {
            let b = problem.assemble(&cols);
            validate_embedding(q, &b)
                .map_err(|d| Error::internal(format!("search produced an invalid embedding: {d}")))?;
            Ok(Some(DiagonalEmbedding { matrix: b }))
        }
    }
}

pub fn enumerate_embeddings(q: &IntegerMatrix, limit: usize) -> Result<Enumeration> {
    enumerate_embeddings_with(q, limit, &SearchOptions::default())
}

pub fn enumerate_embeddings_with(q: &IntegerMatrix, limit: usize, opts: &SearchOptions) -> Result<Enumeration> {
    let problem = Problem::new(q)?;
    let counter = Counter::new(opts.node_limit);
    let frontier = match problem.frontier(&counter, if opts.parallel { 64 } else { 1 }) {
        Ok(f) => f,
        Err(_) => {
            return Ok(Enumeration {
                embeddings: Vec::new(),
                status: EnumerationStatus::NodeLimitReached,
                nodes: counter.total(),
            })
        }
    };
    let found = Mutex::new(BTreeSet::<Vec<Vec<BigInt>>>::new());
    let full = AtomicBool::new(false);
    let hit_limit = AtomicBool::new(false);
    let run = |state: &Vec<Vec<i64>>| {
        let mut local = counter.local();
        let mut partial = state.clone();
        let stop = || full.load(Ordering::Relaxed);
        let r = problem.extend(&mut partial, &mut local, &stop, &mut |cols| {
            let canon = canonical_form(&problem.assemble(cols)).to_rows();
            let mut set = found.lock().expect("enumeration set poisoned");
            set.insert(canon);
            if set.len() > limit {
                full.store(true, Ordering::Relaxed);
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        local.flush();
        if r.is_err() {
            hit_limit.store(true, Ordering::Relaxed);
            full.store(true, Ordering::Relaxed);
        }
    };
    if opts.parallel {
        frontier.par_iter().for_each(run);
    } else {
        frontier.iter().for_each(run);
    }
    let set = found.into_inner().expect("enumeration set poisoned");
    let status = if hit_limit.load(Ordering::Relaxed) {
        EnumerationStatus::NodeLimitReached
    } else if set.len() > limit {
        EnumerationStatus::CountLimitReached
    } else {
        EnumerationStatus::Exhaustive
    };
    let mut embeddings = Vec::with_capacity(set.len().min(limit));
    for rows in set.into_iter().take(limit) {
        let b = IntegerMatrix::try_from_rows(&rows)?;
        validate_embedding(q, &b)
            .map_err(|d| Error::internal(format!("search produced an invalid embedding: {d}")))?;
        embeddings.push(DiagonalEmbedding { matrix: b });
    }
    Ok(Enumeration {
        embeddings,
        status,
        nodes: counter.total(),
    })
}

#[derive(Debug, Clone, Copy)]
struct Limit;

struct Counter {
    total: AtomicU64,
    limit: u64,
}

impl Counter {
    fn new(limit: u64) -> Self {
        Counter {
            total: AtomicU64::new(0),
            limit,
        }
    }

    fn local(&self) -> LocalCounter<'_> {
        LocalCounter {
            shared: self,
            pending: 0,
            batch: (self.limit / 256).clamp(1, 1024),
        }
    }

    fn total(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }
}

struct LocalCounter<'a> {
    shared: &'a Counter,
    pending: u64,
    batch: u64,
}

impl LocalCounter<'_> {
    fn tick(&mut self) -> std::result::Result<(), Limit> {
        self.pending += 1;
        if self.pending >= self.batch {
            self.flush();
            if self.shared.total() > self.shared.limit {
                return Err(Limit);
            }
        }
        Ok(())
    }

    fn flush(&mut self) {
        self.shared.total.fetch_add(self.pending, Ordering::Relaxed);
        self.pending = 0;
    }
}

/// Search data in i64 with `G = -Q` and columns permuted into placement order.
struct Problem {
    n: usize,
    order: Vec<usize>,
    gram: Vec<Vec<i64>>,
}

impl Problem {
    fn new(q: &IntegerMatrix) -> Result<Self> {
        if !q.is_square() || !q.is_symmetric() {
            return Err(Error::invalid("embedding search needs a symmetric square matrix"));
        }
        let inertia = signature(q)?;
        if !inertia.is_negative_definite() {
            return Err(Error::NotNegativeDefinite);
        }
        let det = q.determinant()?;
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(det));
        }
        let n = q.rows();
        let mut gram = vec![vec![0i64; n]; n];
        for (i, row) in gram.iter_mut().enumerate() {
            for (j, g) in row.iter_mut().enumerate() {
                *g = (-&q[(i, j)])
                    .to_i64()
                    .filter(|v| v.abs() <= MAX_NORM)
                    .ok_or_else(|| Error::invalid("matrix entries too large for the embedding search"))?;
            }
        }
        let dist = graph_distances(&gram);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| (std::cmp::Reverse(gram[j][j]), dist[j], j));
        Ok(Problem { n, order, gram })
    }

    fn assemble(&self, cols: &[Vec<i64>]) -> IntegerMatrix {
        let mut b = IntegerMatrix::zeros(self.n, self.n);
        for (k, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                b[(r, self.order[k])] = v.into();
            }
        }
        b
    }

    /// Partial solutions after enough columns to give `target` independent
    /// subtrees, in deterministic order.
    fn frontier(&self, counter: &Counter, target: usize) -> std::result::Result<Vec<Vec<Vec<i64>>>, Limit> {
        let mut level: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
        let mut local = counter.local();
        let never = || false;
        while level.len() < target && level.first().is_some_and(|s| s.len() < self.n) {
            let mut next = Vec::new();
            for state in &level {
                let mut partial = state.clone();
                self.columns(&partial.clone(), &mut local, &never, &mut |col| {
                    partial.push(col.to_vec());
                    next.push(partial.clone());
                    partial.pop();
                    ControlFlow::Continue(())
                })?;
            }
            level = next;
        }
        local.flush();
        Ok(level)
    }

    /// Depth-first completion of `partial`. `visit` sees complete column
    /// lists and may stop the search.
    fn extend(
        &self,
        partial: &mut Vec<Vec<i64>>,
        counter: &mut LocalCounter<'_>,
        stop: &dyn Fn() -> bool,
        visit: &mut dyn FnMut(&[Vec<i64>]) -> ControlFlow<()>,
    ) -> std::result::Result<ControlFlow<()>, Limit> {
        if partial.len() == self.n {
            return Ok(visit(partial));
        }
        if stop() {
            return Ok(ControlFlow::Break(()));
        }
        let mut candidates = Vec::new();
        self.columns(partial, counter, stop, &mut |col| {
            candidates.push(col.to_vec());
            ControlFlow::Continue(())
        })?;
        for col in candidates {
            partial.push(col);
            let r = self.extend(partial, counter, stop, visit);
            partial.pop();
            if r? == ControlFlow::Break(()) {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Enumerates admissible next columns up to the row symmetries that fix
    /// the placed columns.
    fn columns(
        &self,
        partial: &[Vec<i64>],
        counter: &mut LocalCounter<'_>,
        stop: &dyn Fn() -> bool,
        emit: &mut dyn FnMut(&[i64]) -> ControlFlow<()>,
    ) -> std::result::Result<(), Limit> {
        let n = self.n;
        let k = partial.len();
        let j = self.order[k];
        // Rows are kept oriented (first nonzero entry positive), so rows with
        // equal history are interchangeable and zero rows may be flipped.
        let mut zero = vec![true; n];
        let mut pred = vec![None; n];
        let mut last: HashMap<Vec<i64>, usize> = HashMap::new();
        for r in 0..n {
            let hist: Vec<i64> = partial.iter().map(|c| c[r]).collect();
            zero[r] = hist.iter().all(|&v| v == 0);
            pred[r] = last.insert(hist, r);
        }
        let rows: Vec<usize> = (0..n).filter(|&r| !zero[r]).chain((0..n).filter(|&r| zero[r])).collect();
        let mut suffix = vec![vec![0i64; k]; n + 1];
        for pos in (0..n).rev() {
            let r = rows[pos];
            for m in 0..k {
                suffix[pos][m] = suffix[pos + 1][m] + partial[m][r] * partial[m][r];
            }
        }
        let mut resid: Vec<i64> = (0..k).map(|m| self.gram[j][self.order[m]]).collect();
        let mut search = RowSearch {
            partial,
            rows: &rows,
            zero: &zero,
            pred: &pred,
            suffix: &suffix,
            x: vec![0; n],
            counter,
            stop,
            emit,
        };
        let _ = search.run(0, self.gram[j][j], &mut resid)?;
        Ok(())
    }
}

struct RowSearch<'a, 'b> {
    partial: &'a [Vec<i64>],
    rows: &'a [usize],
    zero: &'a [bool],
    pred: &'a [Option<usize>],
    suffix: &'a [Vec<i64>],
    x: Vec<i64>,
    counter: &'a mut LocalCounter<'b>,
    stop: &'a dyn Fn() -> bool,
    emit: &'a mut dyn FnMut(&[i64]) -> ControlFlow<()>,
}

impl RowSearch<'_, '_> {
    fn run(&mut self, pos: usize, rem: i64, resid: &mut [i64]) -> std::result::Result<ControlFlow<()>, Limit> {
        if pos == self.rows.len() {
            if rem == 0 && resid.iter().all(|&v| v == 0) {
                return Ok((self.emit)(&self.x));
            }
            return Ok(ControlFlow::Continue(()));
        }
        let r = self.rows[pos];
        let s = isqrt(rem);
        let lo = if self.zero[r] { 0 } else { -s };
        let hi = match self.pred[r] {
            Some(p) => s.min(self.x[p]),
            None => s,
        };
        let mut v = hi;
        while v >= lo {
            self.counter.tick()?;
            let rem2 = rem - v * v;
            for (m, t) in resid.iter_mut().enumerate() {
                *t -= v * self.partial[m][r];
            }
            let ok = resid
                .iter()
                .zip(&self.suffix[pos + 1])
                .all(|(&t, &s2)| (t as i128) * (t as i128) <= (rem2 as i128) * (s2 as i128));
            let mut flow = ControlFlow::Continue(());
            if ok {
                self.x[r] = v;
                flow = self.run(pos + 1, rem2, resid)?;
                self.x[r] = 0;
            }
            for (m, t) in resid.iter_mut().enumerate() {
                *t += v * self.partial[m][r];
            }
            if flow == ControlFlow::Break(()) || (self.counter.pending == 0 && (self.stop)()) {
                return Ok(ControlFlow::Break(()));
            }
            v -= 1;
        }
        Ok(ControlFlow::Continue(()))
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut s = (n as f64).sqrt() as i64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

/// BFS distance from index 0 in the graph of nonzero off-diagonal entries.
fn graph_distances(gram: &[Vec<i64>]) -> Vec<usize> {
    let n = gram.len();
    let mut dist = vec![usize::MAX; n];
    if n == 0 {
        return dist;
    }
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for w in 0..n {
            if w != v && gram[v][w] != 0 && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}
