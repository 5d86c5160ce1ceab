//! Markov clustering on a sparse column-stochastic matrix.
//!
//! Starting from the canonical transition matrix of `W + I`, each iteration
//! squares the matrix (expansion), raises entries to the power `r` and
//! renormalizes columns (inflation), then drops entries below a threshold and
//! renormalizes again (pruning). Iteration stops once no entry moves by more
//! than the convergence tolerance.
//!
//! Columns are processed independently and each column is summed in a fixed
//! order, so results are bit-identical for any number of worker threads.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialGraph};
use crate::similarity::AugmentedAdjacency;

const STOCHASTIC_TOL: f64 = 1e-9;

/// Square matrix stored column-major (CSC); each column sums to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<f64>,
}

type Column = Vec<(u32, f64)>;

impl StochasticMatrix {
    fn from_columns_unchecked(n: usize, cols: Vec<Column>) -> Self {
        let nnz = cols.iter().map(Vec::len).sum();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut rows = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        col_ptr.push(0);
        for col in cols {
            for (r, v) in col {
                rows.push(r);
                vals.push(v);
            }
            col_ptr.push(rows.len());
        }
        StochasticMatrix { n, col_ptr, rows, vals }
    }

    /// Builds a matrix from per-column `(row, value)` lists, checking that rows
    /// are strictly ascending, values are non-negative and columns sum to 1.
    pub fn from_columns(n: usize, cols: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        if cols.len() != n {
            return Err(Error::InvalidParam(format!("expected {n} columns, got {}", cols.len())));
        }
        for (j, col) in cols.iter().enumerate() {
            if col.windows(2).any(|w| w[0].0 >= w[1].0) || col.iter().any(|&(r, _)| r as usize >= n) {
                return Err(Error::InvalidParam(format!(
                    "column {j}: rows must be ascending and < {n}"
                )));
            }
            if col.iter().any(|&(_, v)| v.is_nan() || v < 0.0) {
                return Err(Error::InvalidParam(format!("column {j}: negative entry")));
            }
            let sum: f64 = col.iter().map(|e| e.1).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidParam(format!("column {j} sums to {sum}")));
            }
        }
        Ok(Self::from_columns_unchecked(n, cols))
    }

    /// Builds a matrix from a dense row-major array; zeros are not stored.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let cols = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&i| rows[i][j] != 0.0)
                    .map(|i| (i as u32, rows[i][j]))
                    .collect()
            })
            .collect();
        Self::from_columns(n, cols)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_columns_unchecked(n, (0..n).map(|j| vec![(j as u32, 1.0)]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Row indices and values of column `j`, rows ascending.
    pub fn column(&self, j: usize) -> (&[u32], &[f64]) {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.rows[span.clone()], &self.vals[span])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (rows, vals) = self.column(j);
        rows.binary_search(&(i as u32)).map_or(0.0, |k| vals[k])
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.column(j).1.iter().sum()).collect()
    }

    #[allow(clippy::needless_range_loop)]
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for j in 0..self.n {
            let (rows, vals) = self.column(j);
            for (&r, &v) in rows.iter().zip(vals) {
                out[r as usize][j] = v;
            }
        }
        out
    }

    fn owned_column(&self, j: usize) -> Column {
        let (rows, vals) = self.column(j);
        rows.iter().copied().zip(vals.iter().copied()).collect()
    }

    fn map_columns(&self, f: impl Fn(usize, Column) -> Result<Column> + Sync) -> Result<Self> {
        let cols = (0..self.n)
            .into_par_iter()
            .map(|j| f(j, self.owned_column(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_columns_unchecked(self.n, cols))
    }
}

/// `M = (W + I) D^-1` where `D` holds the column sums of `W + I`.
pub fn canonical_transition(w: &AugmentedAdjacency) -> StochasticMatrix {
    let n = w.n();
    let cols = (0..n)
        .into_par_iter()
        .map(|j| {
            let row = w.row(j);
            let mut col: Column = Vec::with_capacity(row.len() + 1);
            let split = row.partition_point(|&(c, _)| (c as usize) < j);
            col.extend(row[..split].iter().map(|&(c, v)| (c, v as f64)));
            col.push((j as u32, 1.0));
            col.extend(row[split..].iter().map(|&(c, v)| (c, v as f64)));
            let total: f64 = col.iter().map(|e| e.1).sum();
            for e in &mut col {
                e.1 /= total;
            }
            col
        })
        .collect();
    StochasticMatrix::from_columns_unchecked(n, cols)
}

/// Dense scatter buffer reused across columns of one worker.
struct Scratch {
    acc: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            acc: vec![0.0; n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }
}

/// Column `j` of `M * M`.
fn expand_column(m: &StochasticMatrix, j: usize, s: &mut Scratch) -> Column {
    scatter_product(m, j, s);
    let out = s
        .touched
        .iter()
        .map(|&r| (r, s.acc[r as usize]))
        .filter(|e| e.1 > 0.0)
        .collect();
    clear(s);
    out
}

/// `M * M`.
pub fn expand(m: &StochasticMatrix) -> StochasticMatrix {
    let n = m.n;
    let cols = (0..n)
        .into_par_iter()
        .map_init(|| Scratch::new(n), |s, j| expand_column(m, j, s))
        .collect();
    StochasticMatrix::from_columns_unchecked(n, cols)
}

#[inline]
fn power(x: f64, r: f64) -> f64 {
    if r == 2.0 {
        x * x
    } else {
        x.powf(r)
    }
}

fn normalize(mut col: Column) -> Column {
    let total: f64 = col.iter().map(|e| e.1).sum();
    for e in &mut col {
        e.1 /= total;
    }
    col
}

fn inflate_column(j: usize, mut col: Column, r: f64) -> Result<Column> {
    for e in &mut col {
        e.1 = power(e.1, r);
    }
    col.retain(|e| e.1 > 0.0);
    if col.is_empty() {
        return Err(Error::EmptyColumn(j));
    }
    Ok(normalize(col))
}

/// Element-wise power `r` followed by column renormalization.
pub fn inflate(m: &StochasticMatrix, r: f64) -> Result<StochasticMatrix> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::InvalidParam(format!("inflation must be > 1, got {r}")));
    }
    m.map_columns(|j, col| inflate_column(j, col, r))
}

fn prune_column(mut col: Column, eps: f64) -> Column {
    if eps <= 0.0 || col.iter().all(|e| e.1 >= eps) {
        return col;
    }
    let best = col
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(b.0.cmp(&a.0)))
        .map(|(k, _)| k);
    let keep = best.map(|k| col[k].0);
    col.retain(|e| e.1 >= eps || Some(e.0) == keep);
    normalize(col)
}

/// Zeroes entries below `eps` and renormalizes. A column keeps its largest
/// entry even when every entry falls below `eps`.
pub fn prune(m: &StochasticMatrix, eps: f64) -> StochasticMatrix {
    m.map_columns(|_, col| Ok(prune_column(col, eps)))
        .expect("pruning cannot fail")
}

fn max_abs_diff(a: &[(u32, f64)], b: (&[u32], &[f64])) -> f64 {
    let (brows, bvals) = b;
    let (mut x, mut y) = (0, 0);
    let mut worst = 0.0f64;
    while x < a.len() || y < brows.len() {
        let ra = a.get(x).map_or(u32::MAX, |e| e.0);
        let rb = brows.get(y).copied().unwrap_or(u32::MAX);
        let d = if ra == rb {
            let d = (a[x].1 - bvals[y]).abs();
            x += 1;
            y += 1;
            d
        } else if ra < rb {
            x += 1;
            a[x - 1].1
        } else {
            y += 1;
            bvals[y - 1]
        };
        worst = worst.max(d);
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MclParams {
    /// Inflation exponent `r`, must exceed 1.
    pub inflation: f64,
    pub prune_threshold: f64,
    pub convergence_tol: f64,
    pub max_iterations: usize,
}

impl Default for MclParams {
    fn default() -> Self {
        MclParams {
            inflation: 2.0,
            prune_threshold: 1e-4,
            convergence_tol: 1e-6,
            max_iterations: 100,
        }
    }
}

impl MclParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.inflation > 1.0 && self.inflation.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "inflation must be > 1, got {}",
                self.inflation
            )));
        }
        if self.prune_threshold.is_nan() || self.prune_threshold < 0.0 {
            return Err(Error::InvalidParam("prune threshold must be >= 0".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidParam("convergence tolerance must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParam("max_iterations must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub max_delta: f64,
    pub nonzeros: usize,
}

/// Writes per-iteration convergence metrics as `iteration,max_delta,nonzeros`.
pub fn write_trace_csv(trace: &[IterationStats], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "iteration,max_delta,nonzeros")?;
    for s in trace {
        writeln!(out, "{},{:e},{}", s.iteration, s.max_delta, s.nonzeros)?;
    }
    Ok(())
}

/// A partition of the node indices into clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    /// Members of each cluster, ascending; clusters ordered by smallest member.
    pub clusters: Vec<Vec<usize>>,
    /// Cluster index of every node.
    pub assignment: Vec<usize>,
    pub converged: bool,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<IterationStats>,
}

impl ClusterSet {
    /// Builds a cluster set from explicit member lists, normalizing order.
    pub fn from_clusters(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (c, members) in clusters.iter().enumerate() {
            for &v in members {
                if v >= n || assignment[v] != usize::MAX {
                    return Err(Error::InvalidParam(format!(
                        "node index {v} is out of range or assigned twice"
                    )));
                }
                assignment[v] = c;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(Error::InvalidParam("clusters do not cover every node".into()));
        }
        Ok(Self::from_labels(&assignment, true, 0))
    }

    fn from_labels(labels: &[usize], converged: bool, iterations: usize) -> Self {
        let n = labels.len();
        // Clusters are numbered by their smallest member.
        let mut number = vec![usize::MAX; n.max(labels.iter().copied().max().map_or(0, |m| m + 1))];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut assignment = vec![0; n];
        for (v, &label) in labels.iter().enumerate() {
            if number[label] == usize::MAX {
                number[label] = clusters.len();
                clusters.push(Vec::new());
            }
            assignment[v] = number[label];
            clusters[number[label]].push(v);
        }
        ClusterSet {
            clusters,
            assignment,
            converged,
            iterations,
            trace: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// Cluster members translated to external ids.
    pub fn with_ids(&self, graph: &SocialGraph) -> Vec<Vec<NodeId>> {
        self.clusters
            .iter()
            .map(|c| c.iter().map(|&v| graph.id(v)).collect())
            .collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Smaller root wins so labels do not depend on union order.
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

/// Reads clusters off a (converged) flow matrix.
///
/// Attractors are nodes with a positive diagonal entry. Every node joins the
/// attractor holding most of its mass (lowest attractor index on ties); a node
/// whose column reaches no attractor follows its largest entry instead.
/// Nodes linked this way, directly or through chains, form one cluster.
pub fn interpret(m: &StochasticMatrix) -> Vec<Vec<usize>> {
    let labels = attractor_labels(m);
    ClusterSet::from_labels(&labels, true, 0).clusters
}

fn attractor_labels(m: &StochasticMatrix) -> Vec<usize> {
    let n = m.n();
    let attractor: Vec<bool> = (0..n).map(|i| m.get(i, i) > 0.0).collect();
    let mut uf = UnionFind((0..n).collect());
    for q in 0..n {
        let (rows, vals) = m.column(q);
        let pick = |only_attractors: bool| {
            rows.iter()
                .zip(vals)
                .filter(|(&r, _)| !only_attractors || attractor[r as usize])
                .fold(None::<(u32, f64)>, |best, (&r, &v)| match best {
                    Some((_, bv)) if bv >= v => best,
                    _ => Some((r, v)),
                })
        };
        if let Some((target, _)) = pick(true).or_else(|| pick(false)) {
            uf.union(q, target as usize);
        }
    }
    (0..n).map(|v| uf.find(v)).collect()
}

/// Scatters column `j` of `M * M` into `s`, leaving the touched rows sorted.
fn scatter_product(m: &StochasticMatrix, j: usize, s: &mut Scratch) {
    let (krows, kvals) = m.column(j);
    for (&k, &mkj) in krows.iter().zip(kvals) {
        let (rows, vals) = m.column(k as usize);
        for (&r, &mrk) in rows.iter().zip(vals) {
            let r_us = r as usize;
            if !s.seen[r_us] {
                s.seen[r_us] = true;
                s.touched.push(r);
            }
            s.acc[r_us] += mkj * mrk;
        }
    }
    s.touched.sort_unstable();
}

fn clear(s: &mut Scratch) {
    for &r in &s.touched {
        s.acc[r as usize] = 0.0;
        s.seen[r as usize] = false;
    }
    s.touched.clear();
}

/// Column `j` of `prune(inflate(M * M))`, built from the scatter buffer so
/// that only surviving entries are ever allocated. Produces the same floats
/// as the three separate steps.
fn fused_column(m: &StochasticMatrix, j: usize, s: &mut Scratch, params: &MclParams) -> Result<Column> {
    scatter_product(m, j, s);
    let mut total = 0.0;
    for &r in &s.touched {
        let v = &mut s.acc[r as usize];
        *v = if *v > 0.0 { power(*v, params.inflation) } else { 0.0 };
        total += *v;
    }
    if total == 0.0 {
        clear(s);
        return Err(Error::EmptyColumn(j));
    }
    let eps = params.prune_threshold;
    let mut best: Option<(u32, f64)> = None;
    let mut survivors = 0usize;
    let mut pruned = false;
    for &r in &s.touched {
        let p = s.acc[r as usize];
        if p <= 0.0 {
            continue;
        }
        let q = p / total;
        if best.is_none_or(|(_, b)| q > b) {
            best = Some((r, q));
        }
        if eps > 0.0 && q < eps {
            pruned = true;
        } else {
            survivors += 1;
        }
    }
    let keep = best.map(|(r, _)| r);
    let mut col: Column = Vec::with_capacity(survivors + 1);
    for &r in &s.touched {
        let p = s.acc[r as usize];
        if p <= 0.0 {
            continue;
        }
        let q = p / total;
        if !pruned || q >= eps || Some(r) == keep {
            col.push((r, q));
        }
    }
    clear(s);
    Ok(if pruned { normalize(col) } else { col })
}

/// One fused expand, inflate, prune step. Returns the new matrix and the
/// largest absolute entry change.
fn iterate(m: &StochasticMatrix, params: &MclParams) -> Result<(StochasticMatrix, f64)> {
    let n = m.n;
    let results = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |s, j| -> Result<(Column, f64)> {
                let col = fused_column(m, j, s, params)?;
                let delta = max_abs_diff(&col, m.column(j));
                Ok((col, delta))
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let delta = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let cols = results.into_iter().map(|r| r.0).collect();
    Ok((StochasticMatrix::from_columns_unchecked(n, cols), delta))
}

/// Runs MCL on `w` and interprets the final matrix as a clustering. When the
/// iteration limit is hit first, the clustering of the last matrix is
/// returned with `converged = false`.
pub fn run_mcl(w: &AugmentedAdjacency, params: &MclParams) -> Result<ClusterSet> {
    params.validate()?;
    let mut m = canonical_transition(w);
    let mut trace = Vec::new();
    let mut converged = false;
    for iteration in 1..=params.max_iterations {
        let (next, delta) = iterate(&m, params)?;
        m = next;
        trace.push(IterationStats {
            iteration,
            max_delta: delta,
            nonzeros: m.nnz(),
        });
        if delta < params.convergence_tol {
            converged = true;
            break;
        }
    }
    let labels = attractor_labels(&m);
    let mut set = ClusterSet::from_labels(&labels, converged, trace.len());
    set.trace = trace;
    Ok(set)
}
