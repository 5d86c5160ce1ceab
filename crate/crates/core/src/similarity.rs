//! Attribute similarity and the attribute-augmented adjacency `W = A + S`.
//!
//! Every pair of profiles gets a score in `[0, 1]`: the mean of a normalized
//! Levenshtein similarity of the names and exact-match indicators for the
//! eight categorical attributes. The `K = floor(alpha * |E|)` best-scoring
//! pairs form the augmentation `S`, and `W` is the plain sum of the 0/1
//! friendship adjacency and the 0/1 indicator of `S`, so an augmented pair
//! that is already a friendship has weight 2.
//!
//! Pair ranking uses one total order everywhere: higher score first, then
//! the lexicographically smaller `(lo, hi)` index pair.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Attribute, AttributeProfile, SocialGraph};

/// Above this many nodes, exhaustive pair enumeration gives way to blocking.
pub const EXACT_PAIR_LIMIT: usize = 10_000;

/// Default sorted-neighbourhood window of the blocked candidate generator.
pub const DEFAULT_BLOCK_WINDOW: usize = 12;

const CATEGORICAL: [Attribute; 8] = [
    Attribute::Gender,
    Attribute::School,
    Attribute::Degree,
    Attribute::Employer,
    Attribute::Position,
    Attribute::BirthYear,
    Attribute::Location,
    Attribute::Relationship,
];

/// `1 - lev(a, b) / max(|a|, |b|)` over Unicode scalar values; 1 for two empty names.
pub fn name_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    chars_similarity(&a, &b)
}

// strsim's generic entry point wants `&T: IntoIterator`, which rules out slices.
#[allow(clippy::ptr_arg)]
fn chars_similarity(a: &Vec<char>, b: &Vec<char>) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::generic_levenshtein(a, b) as f64 / longest as f64
}

fn categorical_matches(a: &AttributeProfile, b: &AttributeProfile) -> u32 {
    let mut matches = u32::from(a.birth_year.is_some() && a.birth_year == b.birth_year);
    for attr in CATEGORICAL {
        if attr == Attribute::BirthYear {
            continue;
        }
        if let (Some(x), Some(y)) = (a.categorical(attr), b.categorical(attr)) {
            matches += u32::from(x == y);
        }
    }
    matches
}

/// Equal-weight mean of the name similarity and the eight categorical
/// exact-match indicators. Absent values never match.
pub fn profile_similarity(a: &AttributeProfile, b: &AttributeProfile) -> f64 {
    combine(name_similarity(&a.name, &b.name), categorical_matches(a, b))
}

#[inline]
fn combine(name: f64, matches: u32) -> f64 {
    (name + matches as f64) / 9.0
}

/// Symmetric similarity matrix with a zero diagonal, stored as its strict
/// upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(i, j));
            }
        }
        SimilarityMatrix { n, upper }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            Ordering::Equal => 0.0,
            Ordering::Less => self.upper[self.offset(i, j)],
            Ordering::Greater => self.upper[self.offset(j, i)],
        }
    }

    pub fn pair_count(&self) -> usize {
        self.upper.len()
    }
}

/// Profile data reduced to what pair scoring needs: name characters and
/// interned categorical codes.
struct Encoded {
    names: Vec<Vec<char>>,
    codes: Vec<[Option<u32>; 8]>,
}

impl Encoded {
    fn new(graph: &SocialGraph) -> Self {
        let mut tables: Vec<HashMap<String, u32>> = vec![HashMap::new(); 8];
        let codes = graph
            .profiles()
            .iter()
            .map(|p| {
                let mut row = [None; 8];
                for (k, attr) in CATEGORICAL.into_iter().enumerate() {
                    if let Some(v) = p.get(attr) {
                        let next = tables[k].len() as u32;
                        row[k] = Some(*tables[k].entry(v).or_insert(next));
                    }
                }
                row
            })
            .collect();
        Encoded {
            names: graph.profiles().iter().map(|p| p.name.chars().collect()).collect(),
            codes,
        }
    }

    fn matches(&self, i: usize, j: usize) -> u32 {
        self.codes[i]
            .iter()
            .zip(&self.codes[j])
            .filter(|(a, b)| a.is_some() && a == b)
            .count() as u32
    }

    fn score(&self, i: usize, j: usize) -> f64 {
        combine(chars_similarity(&self.names[i], &self.names[j]), self.matches(i, j))
    }
}

/// `C[i][j] = profile_similarity(i, j)` for every pair of nodes.
pub fn similarity_matrix(graph: &SocialGraph) -> SimilarityMatrix {
    let enc = Encoded::new(graph);
    let n = graph.node_count();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| enc.score(i, j)).collect())
        .collect();
    SimilarityMatrix {
        n,
        upper: rows.into_iter().flatten().collect(),
    }
}

/// `floor(alpha * edge_count)`.
///
/// The product is nudged by a few ulps before flooring so that decimal
/// inputs such as `0.29 * 100` land on the integer they denote.
pub fn compute_k(alpha: f64, edge_count: usize) -> usize {
    assert!(
        alpha >= 0.0 && alpha.is_finite(),
        "alpha must be a finite non-negative number"
    );
    let product = alpha * edge_count as f64;
    (product + product * 1e-12).floor() as usize
}

/// A scored node pair with `lo < hi`, ordered best-first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredPair {
    pub score: f64,
    pub lo: u32,
    pub hi: u32,
}

impl Eq for ScoredPair {}

impl Ord for ScoredPair {
    /// `Less` means ranked earlier.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.lo.cmp(&other.lo))
            .then(self.hi.cmp(&other.hi))
    }
}

impl PartialOrd for ScoredPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Keeps the `k` best pairs seen so far. The heap top is the worst kept pair.
struct TopK {
    k: usize,
    heap: BinaryHeap<ScoredPair>,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK {
            k,
            // Grows on demand: rayon creates one of these per split.
            heap: BinaryHeap::new(),
        }
    }

    /// Score a candidate must reach to possibly enter.
    fn floor(&self) -> Option<f64> {
        (self.heap.len() == self.k).then(|| self.heap.peek().map_or(f64::INFINITY, |p| p.score))
    }

    fn offer(&mut self, pair: ScoredPair) {
        if self.k == 0 {
            return;
        }
        if self.heap.len() < self.k {
            self.heap.push(pair);
        } else if let Some(worst) = self.heap.peek() {
            if pair < *worst {
                self.heap.pop();
                self.heap.push(pair);
            }
        }
    }

    fn merge(mut self, other: TopK) -> TopK {
        for p in other.heap {
            self.offer(p);
        }
        self
    }

    fn into_sorted(self) -> Vec<ScoredPair> {
        self.heap.into_sorted_vec()
    }
}

/// The `k` highest-scoring pairs of `c`, best first.
pub fn top_k_pairs(c: &SimilarityMatrix, k: usize) -> Result<Vec<(usize, usize)>> {
    let max = c.pair_count();
    if k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let n = c.n();
    let top = (0..n)
        .into_par_iter()
        .fold(
            || TopK::new(k),
            |mut top, i| {
                for j in i + 1..n {
                    top.offer(ScoredPair {
                        score: c.get(i, j),
                        lo: i as u32,
                        hi: j as u32,
                    });
                }
                top
            },
        )
        .reduce(|| TopK::new(k), TopK::merge);
    Ok(top
        .into_sorted()
        .into_iter()
        .map(|p| (p.lo as usize, p.hi as usize))
        .collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairStrategy {
    /// Exhaustive up to [`EXACT_PAIR_LIMIT`] nodes, blocked above.
    #[default]
    Auto,
    Exact,
    Blocked {
        window: usize,
    },
}

/// Selects the top-`k` attribute-similar pairs of `graph` without
/// materializing the similarity matrix. Exact mode returns the same pairs as
/// `top_k_pairs(&similarity_matrix(graph), k)`. Blocked mode may return
/// fewer than `k` pairs when the candidate pool is smaller.
pub fn select_similar_pairs(graph: &SocialGraph, k: usize, strategy: PairStrategy) -> Result<Vec<ScoredPair>> {
    let n = graph.node_count();
    let strategy = match strategy {
        PairStrategy::Auto if n > EXACT_PAIR_LIMIT => PairStrategy::Blocked {
            window: DEFAULT_BLOCK_WINDOW,
        },
        PairStrategy::Auto => PairStrategy::Exact,
        s => s,
    };
    let enc = Encoded::new(graph);
    let top = match strategy {
        PairStrategy::Exact | PairStrategy::Auto => {
            let max = n * n.saturating_sub(1) / 2;
            if k > max {
                return Err(Error::KOutOfRange { k, max });
            }
            (0..n)
                .into_par_iter()
                .fold(
                    || TopK::new(k),
                    |mut top, i| {
                        for j in i + 1..n {
                            let matches = enc.matches(i, j);
                            // The name term is at most 1, so skip the edit
                            // distance when even a perfect name cannot enter.
                            if let Some(floor) = top.floor() {
                                if combine(1.0, matches) < floor {
                                    continue;
                                }
                            }
                            let score = combine(chars_similarity(&enc.names[i], &enc.names[j]), matches);
                            top.offer(ScoredPair {
                                score,
                                lo: i as u32,
                                hi: j as u32,
                            });
                        }
                        top
                    },
                )
                .reduce(|| TopK::new(k), TopK::merge)
        }
        PairStrategy::Blocked { window } => {
            if window == 0 {
                return Err(Error::InvalidParam("blocking window must be positive".into()));
            }
            let candidates = blocked_candidates(graph, window);
            candidates
                .par_iter()
                .fold(
                    || TopK::new(k),
                    |mut top, &(i, j)| {
                        let (i, j) = (i as usize, j as usize);
                        top.offer(ScoredPair {
                            score: enc.score(i, j),
                            lo: i as u32,
                            hi: j as u32,
                        });
                        top
                    },
                )
                .reduce(|| TopK::new(k), TopK::merge)
        }
    };
    Ok(top.into_sorted())
}

type SortKey<'a> = Box<dyn Fn(&AttributeProfile) -> String + Sync + 'a>;

/// Sorted-neighbourhood blocking: nodes are sorted under several keys and
/// each node is paired with the next `window` nodes in each order.
fn blocked_candidates(graph: &SocialGraph, window: usize) -> Vec<(u32, u32)> {
    let n = graph.node_count();
    let profiles = graph.profiles();
    let norm = |s: &str| -> String {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .flat_map(char::to_lowercase)
            .collect()
    };
    let opt = |v: &Option<String>| v.clone().unwrap_or_default();
    let keys: [SortKey; 4] = [
        Box::new(|p| norm(&p.name)),
        Box::new(|p| format!("{}\u{1}{}\u{1}{}", opt(&p.location), opt(&p.school), norm(&p.name))),
        Box::new(|p| format!("{}\u{1}{}\u{1}{}", opt(&p.employer), opt(&p.position), norm(&p.name))),
        Box::new(|p| {
            format!(
                "{}\u{1}{}\u{1}{}\u{1}{}",
                opt(&p.school),
                opt(&p.degree),
                p.birth_year.unwrap_or_default(),
                norm(&p.name)
            )
        }),
    ];
    let mut pairs: Vec<(u32, u32)> = keys
        .par_iter()
        .flat_map_iter(|key| {
            let mut order: Vec<(String, u32)> = (0..n).map(|i| (key(&profiles[i]), i as u32)).collect();
            order.sort_unstable();
            let mut out = Vec::with_capacity(n * window);
            for a in 0..n {
                for b in a + 1..(a + 1 + window).min(n) {
                    let (x, y) = (order[a].1, order[b].1);
                    out.push((x.min(y), x.max(y)));
                }
            }
            out
        })
        .collect();
    pairs.par_sort_unstable();
    pairs.dedup();
    pairs
}

/// `W = A + S` as symmetric sparse rows with entries in `{1, 2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedAdjacency {
    rows: Vec<Vec<(u32, u8)>>,
    augmented: Vec<(u32, u32)>,
}

impl AugmentedAdjacency {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Non-zero entries of row `i`, ascending by column.
    pub fn row(&self, i: usize) -> &[(u32, u8)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        let row = &self.rows[i];
        row.binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map_or(0, |k| row[k].1)
    }

    /// The augmentation `S` as sorted `(lo, hi)` pairs.
    pub fn augmented_pairs(&self) -> &[(u32, u32)] {
        &self.augmented
    }

    /// Number of unordered pairs with a non-zero entry.
    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Adds the indicator of `pairs` to the friendship adjacency of `graph`.
pub fn augment(graph: &SocialGraph, pairs: &[(usize, usize)]) -> Result<AugmentedAdjacency> {
    let n = graph.node_count();
    let mut augmented = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(Error::InvalidParam(format!(
                "augmented pair ({a}, {b}) references a node outside 0..{n}"
            )));
        }
        if a == b {
            return Err(Error::SameNode(graph.id(a)));
        }
        augmented.push((a.min(b) as u32, a.max(b) as u32));
    }
    augmented.sort_unstable();
    augmented.dedup();

    let mut extra: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(a, b) in &augmented {
        extra[a as usize].push(b);
        extra[b as usize].push(a);
    }
    let rows = extra
        .into_par_iter()
        .enumerate()
        .map(|(i, mut extra)| {
            extra.sort_unstable();
            let friends = graph.friends(i);
            let mut row = Vec::with_capacity(friends.len() + extra.len());
            let (mut x, mut y) = (0, 0);
            while x < friends.len() || y < extra.len() {
                let f = friends.get(x).copied().unwrap_or(u32::MAX);
                let e = extra.get(y).copied().unwrap_or(u32::MAX);
                match f.cmp(&e) {
                    Ordering::Less => {
                        row.push((f, 1));
                        x += 1;
                    }
                    Ordering::Greater => {
                        row.push((e, 1));
                        y += 1;
                    }
                    Ordering::Equal => {
                        row.push((f, 2));
                        x += 1;
                        y += 1;
                    }
                }
            }
            row
        })
        .collect();
    Ok(AugmentedAdjacency { rows, augmented })
}

/// `K = floor(alpha * |E|)` followed by pair selection and augmentation.
pub fn augment_by_alpha(graph: &SocialGraph, alpha: f64, strategy: PairStrategy) -> Result<AugmentedAdjacency> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParam(format!("alpha must be >= 0, got {alpha}")));
    }
    let n = graph.node_count();
    let k = compute_k(alpha, graph.edge_count()).min(n * n.saturating_sub(1) / 2);
    let pairs: Vec<(usize, usize)> = select_similar_pairs(graph, k, strategy)?
        .into_iter()
        .map(|p| (p.lo as usize, p.hi as usize))
        .collect();
    augment(graph, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, NodeId};
    use proptest::prelude::*;

    fn profile(name: &str, fields: [&str; 8]) -> AttributeProfile {
        let mut p = AttributeProfile::named(name);
        for (attr, v) in CATEGORICAL.into_iter().zip(fields) {
            p.set(attr, Some(v)).unwrap();
        }
        p
    }

    fn sara() -> AttributeProfile {
        profile(
            "Sara Abraham",
            [
                "Female",
                "Arcadia University",
                "Master's",
                "Owens",
                "Web Developer",
                "1980",
                "USA",
                "Single",
            ],
        )
    }

    #[test]
    fn name_similarity_cases() {
        assert_eq!(name_similarity("Sara Abraham", "Sara Abraham"), 1.0);
        assert!((name_similarity("Sara Abraham", "Sara Abram") - (1.0 - 2.0 / 12.0)).abs() < 1e-15);
        assert_eq!(name_similarity("Sara Abraham", ""), 0.0);
        assert_eq!(name_similarity("", ""), 1.0);
    }

    #[test]
    fn profile_similarity_cases() {
        assert_eq!(profile_similarity(&sara(), &sara()), 1.0);
        let mut clone = sara();
        clone.degree = Some("Bachelor".into());
        assert!((profile_similarity(&sara(), &clone) - 8.0 / 9.0).abs() < 1e-15);

        let other = profile("Tim", ["Male", "X", "PhD", "Y", "Z", "1950", "UK", "Married"]);
        // Only the name term survives.
        let expected = name_similarity("Sara Abraham", "Tim") / 9.0;
        assert!((profile_similarity(&sara(), &other) - expected).abs() < 1e-15);
    }

    #[test]
    fn absent_values_never_match() {
        let a = AttributeProfile::named("x");
        let b = AttributeProfile::named("x");
        assert!((profile_similarity(&a, &b) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn k_table() {
        assert_eq!(compute_k(0.68, 50), 34);
        assert_eq!(compute_k(0.78, 50), 39);
        assert_eq!(compute_k(0.88, 50), 44);
        assert_eq!(compute_k(1.0, 50), 50);
        assert_eq!(compute_k(0.5, 0), 0);
        assert_eq!(compute_k(0.29, 100), 29);
        assert_eq!(compute_k(0.5, 3), 1);
    }

    #[test]
    fn top_k_small() {
        let vals = [[0.0, 0.9, 0.5], [0.9, 0.0, 0.1], [0.5, 0.1, 0.0]];
        let c = SimilarityMatrix::from_fn(3, |i, j| vals[i][j]);
        assert_eq!(top_k_pairs(&c, 1).unwrap(), vec![(0, 1)]);
        assert_eq!(top_k_pairs(&c, 0).unwrap(), vec![]);
        assert_eq!(top_k_pairs(&c, 3).unwrap(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(matches!(top_k_pairs(&c, 4), Err(Error::KOutOfRange { k: 4, max: 3 })));
    }

    #[test]
    fn top_k_ties_break_on_pair() {
        let c = SimilarityMatrix::from_fn(4, |_, _| 0.5);
        assert_eq!(top_k_pairs(&c, 3).unwrap(), vec![(0, 1), (0, 2), (0, 3)]);
    }

    fn two_node_graph(edge: bool) -> SocialGraph {
        let mut b = GraphBuilder::new();
        b.add_node(NodeId(1), sara()).unwrap();
        b.add_node(NodeId(2), sara()).unwrap();
        if edge {
            b.add_edge(NodeId(1), NodeId(2));
        }
        b.build().unwrap()
    }

    #[test]
    fn matrix_of_identical_profiles() {
        let c = similarity_matrix(&two_node_graph(false));
        assert_eq!(c.get(0, 1), 1.0);
        assert_eq!(c.get(1, 0), 1.0);
        assert_eq!(c.get(0, 0), 0.0);
    }

    #[test]
    fn augment_sums_literally() {
        let g = two_node_graph(true);
        let w = augment(&g, &[]).unwrap();
        assert_eq!(w.get(0, 1), 1);
        let w = augment(&g, &[(1, 0)]).unwrap();
        assert_eq!(w.get(0, 1), 2);
        assert_eq!(w.get(1, 0), 2);
        assert_eq!(w.get(0, 0), 0);
        assert_eq!(w.augmented_pairs(), &[(0, 1)]);
        assert!(augment(&g, &[(0, 5)]).is_err());
        assert!(augment(&g, &[(1, 1)]).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = SocialGraph> {
        let names = prop::sample::select(vec!["Ann Lee", "Ann Le", "Bo Chen", "Bob Chen", "Cy", "Dana Ruiz"]);
        let cat = prop::option::of(prop::sample::select(vec!["a", "b", "c"]));
        let prof = (names, prop::collection::vec(cat, 8));
        (
            prop::collection::vec(prof, 2..14),
            prop::collection::vec((0u64..14, 0u64..14), 0..30),
        )
            .prop_map(|(profiles, edges)| {
                let n = profiles.len() as u64;
                let mut b = GraphBuilder::new();
                for (i, (name, fields)) in profiles.into_iter().enumerate() {
                    let mut p = AttributeProfile::named(name);
                    for (attr, v) in CATEGORICAL.into_iter().zip(fields) {
                        let v = v.map(|s| if attr == Attribute::BirthYear { "1990" } else { s });
                        p.set(attr, v).unwrap();
                    }
                    b.add_node(NodeId(i as u64 * 3), p).unwrap();
                }
                for (x, y) in edges {
                    let (x, y) = (x % n, y % n);
                    if x != y {
                        b.add_edge(NodeId(x * 3), NodeId(y * 3));
                    }
                }
                b.build().unwrap()
            })
    }

    proptest! {
        #[test]
        fn matrix_is_symmetric_bounded(g in arb_graph()) {
            let c = similarity_matrix(&g);
            for i in 0..g.node_count() {
                prop_assert_eq!(c.get(i, i), 0.0);
                for j in 0..g.node_count() {
                    let v = c.get(i, j);
                    prop_assert_eq!(v, c.get(j, i));
                    prop_assert!((0.0..=1.0).contains(&v));
                    if i != j {
                        prop_assert_eq!(v, profile_similarity(g.profile(i), g.profile(j)));
                    }
                }
            }
        }

        #[test]
        fn streaming_selection_matches_matrix(g in arb_graph(), frac in 0.0f64..1.0) {
            let n = g.node_count();
            let k = ((n * (n - 1) / 2) as f64 * frac) as usize;
            let from_matrix = top_k_pairs(&similarity_matrix(&g), k).unwrap();
            let streamed: Vec<_> = select_similar_pairs(&g, k, PairStrategy::Exact)
                .unwrap()
                .into_iter()
                .map(|p| (p.lo as usize, p.hi as usize))
                .collect();
            prop_assert_eq!(from_matrix, streamed);
        }

        #[test]
        fn top_k_matches_brute_force_sort(g in arb_graph(), frac in 0.0f64..1.0) {
            let n = g.node_count();
            let c = similarity_matrix(&g);
            let mut all: Vec<(f64, usize, usize)> = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    all.push((c.get(i, j), i, j));
                }
            }
            all.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
            let k = (all.len() as f64 * frac) as usize;
            let expected: Vec<_> = all[..k].iter().map(|&(_, i, j)| (i, j)).collect();
            prop_assert_eq!(top_k_pairs(&c, k).unwrap(), expected);
        }

        #[test]
        fn larger_alpha_keeps_smaller_selection(g in arb_graph(), a1 in 0.0f64..2.0, a2 in 0.0f64..2.0) {
            let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let max = g.node_count() * (g.node_count() - 1) / 2;
            let c = similarity_matrix(&g);
            let small = top_k_pairs(&c, compute_k(lo, g.edge_count()).min(max)).unwrap();
            let large = top_k_pairs(&c, compute_k(hi, g.edge_count()).min(max)).unwrap();
            prop_assert!(small.iter().all(|p| large.contains(p)));
        }

        #[test]
        fn augment_never_removes_adjacency(g in arb_graph(), alpha in 0.0f64..2.0) {
            let w = augment_by_alpha(&g, alpha, PairStrategy::Exact).unwrap();
            for i in 0..g.node_count() {
                prop_assert_eq!(w.get(i, i), 0);
                for j in 0..g.node_count() {
                    prop_assert_eq!(w.get(i, j), w.get(j, i));
                    prop_assert!(w.get(i, j) >= u8::from(g.are_friends(i, j)));
                }
            }
            let max = g.node_count() * (g.node_count() - 1) / 2;
            prop_assert_eq!(w.augmented_pairs().len(), compute_k(alpha, g.edge_count()).min(max));
        }
    }

    #[test]
    fn blocked_candidates_are_valid_pairs() {
        let mut b = GraphBuilder::new();
        for i in 0..40u64 {
            let mut p = sara();
            p.name = format!("Sara Abraham {}", i % 7);
            p.school = Some(format!("School {}", i % 5));
            b.add_node(NodeId(i), p).unwrap();
        }
        let g = b.build().unwrap();
        let pairs = blocked_candidates(&g, 4);
        assert!(pairs.windows(2).all(|w| w[0] < w[1]));
        assert!(pairs.iter().all(|&(a, b)| a < b && (b as usize) < g.node_count()));
        let top = select_similar_pairs(&g, 30, PairStrategy::Blocked { window: 4 }).unwrap();
        assert_eq!(top.len(), 30);
        assert!(top.windows(2).all(|w| w[0] < w[1]));
    }
}
