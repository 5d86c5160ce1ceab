//! Interaction-based edge weights.
//!
//! For a pair `(i, j)` the weight is
//! `|Fa_i ∩ Fa_j| + |P_i ∩ P_j| + |U_i ∩ U_j| / |U_i ∪ U_j|`
//! where `Fa_i = F_i ∩ I_i` are the friends `i` actually interacted with,
//! `P` the liked pages and `U` the shared URLs. The URL term is a fraction in
//! `[0, 1]` (0 when neither side shared anything) and is added as-is to the
//! two counts. Weights keep their components so that sums over many edges
//! can be taken exactly.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialGraph};

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut x, mut y) = (0, 0);
    let mut out = Vec::new();
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            Ordering::Less => x += 1,
            Ordering::Greater => y += 1,
            Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
    out
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut x, mut y, mut n) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            Ordering::Less => x += 1,
            Ordering::Greater => y += 1,
            Ordering::Equal => {
                n += 1;
                x += 1;
                y += 1;
            }
        }
    }
    n
}

fn pair_indices(graph: &SocialGraph, i: NodeId, j: NodeId) -> Result<(usize, usize)> {
    let (a, b) = (graph.index_of(i)?, graph.index_of(j)?);
    if a == b {
        return Err(Error::SameNode(i));
    }
    Ok((a, b))
}

pub(crate) fn active_friend_indices(graph: &SocialGraph, i: usize) -> Vec<u32> {
    intersect(graph.friends(i), graph.interactions(i))
}

/// Friends of `i` that `i` has interacted with.
pub fn active_friends(graph: &SocialGraph, i: NodeId) -> Result<Vec<NodeId>> {
    let idx = graph.index_of(i)?;
    Ok(active_friend_indices(graph, idx)
        .into_iter()
        .map(|v| graph.id(v as usize))
        .collect())
}

pub fn common_active_friends(graph: &SocialGraph, i: NodeId, j: NodeId) -> Result<Vec<NodeId>> {
    let (a, b) = pair_indices(graph, i, j)?;
    Ok(
        intersect(&active_friend_indices(graph, a), &active_friend_indices(graph, b))
            .into_iter()
            .map(|v| graph.id(v as usize))
            .collect(),
    )
}

pub fn common_page_likes(graph: &SocialGraph, i: NodeId, j: NodeId) -> Result<Vec<&str>> {
    let (a, b) = pair_indices(graph, i, j)?;
    Ok(intersect(graph.page_likes(a), graph.page_likes(b))
        .into_iter()
        .map(|p| graph.page_name(p))
        .collect())
}

/// Jaccard coefficient of the two URL sets, 0 when both are empty.
pub fn common_url_fraction(graph: &SocialGraph, i: NodeId, j: NodeId) -> Result<f64> {
    let (a, b) = pair_indices(graph, i, j)?;
    Ok(url_overlap(graph, a, b).fraction())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct UrlOverlap {
    shared: u32,
    union: u32,
}

impl UrlOverlap {
    fn fraction(self) -> f64 {
        if self.union == 0 {
            0.0
        } else {
            self.shared as f64 / self.union as f64
        }
    }
}

fn url_overlap(graph: &SocialGraph, a: usize, b: usize) -> UrlOverlap {
    let (ua, ub) = (graph.urls(a), graph.urls(b));
    let shared = intersection_len(ua, ub) as u32;
    UrlOverlap {
        shared,
        union: ua.len() as u32 + ub.len() as u32 - shared,
    }
}

/// Weight of one edge, kept as its three components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeWeight {
    pub common_active_friends: u32,
    pub common_page_likes: u32,
    pub shared_urls: u32,
    /// Size of the URL union; 0 when neither side shared a URL.
    pub url_union: u32,
}

impl EdgeWeight {
    /// A weight with no URL term.
    pub fn from_counts(common_active_friends: u32, common_page_likes: u32) -> Self {
        EdgeWeight {
            common_active_friends,
            common_page_likes,
            ..Default::default()
        }
    }

    pub fn url_fraction(&self) -> f64 {
        UrlOverlap {
            shared: self.shared_urls,
            union: self.url_union,
        }
        .fraction()
    }

    pub fn value(&self) -> f64 {
        (self.common_active_friends + self.common_page_likes) as f64 + self.url_fraction()
    }

    pub fn to_ratio(&self) -> BigRational {
        let int = BigRational::from_integer(BigInt::from(
            u64::from(self.common_active_friends) + u64::from(self.common_page_likes),
        ));
        if self.url_union == 0 {
            int
        } else {
            int + BigRational::new(BigInt::from(self.shared_urls), BigInt::from(self.url_union))
        }
    }
}

impl fmt::Display for EdgeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.value())
    }
}

fn weight_from_active(graph: &SocialGraph, active: &[Vec<u32>], a: usize, b: usize) -> EdgeWeight {
    let urls = url_overlap(graph, a, b);
    EdgeWeight {
        common_active_friends: intersection_len(&active[a], &active[b]) as u32,
        common_page_likes: intersection_len(graph.page_likes(a), graph.page_likes(b)) as u32,
        shared_urls: urls.shared,
        url_union: urls.union,
    }
}

fn weight_by_index(graph: &SocialGraph, a: usize, b: usize) -> EdgeWeight {
    let urls = url_overlap(graph, a, b);
    EdgeWeight {
        common_active_friends: intersection_len(&active_friend_indices(graph, a), &active_friend_indices(graph, b))
            as u32,
        common_page_likes: intersection_len(graph.page_likes(a), graph.page_likes(b)) as u32,
        shared_urls: urls.shared,
        url_union: urls.union,
    }
}

/// Weight of the pair `(i, j)`; defined for any two distinct nodes.
pub fn edge_weight(graph: &SocialGraph, i: NodeId, j: NodeId) -> Result<EdgeWeight> {
    let (a, b) = pair_indices(graph, i, j)?;
    Ok(weight_by_index(graph, a, b))
}

/// Weights keyed by unordered node-index pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedEdgeSet {
    pairs: Vec<(u32, u32)>,
    weights: Vec<EdgeWeight>,
}

impl WeightedEdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: usize, b: usize) -> (u32, u32) {
        (a.min(b) as u32, a.max(b) as u32)
    }

    /// Sets the weight of pair `(a, b)` (node indices).
    pub fn insert(&mut self, a: usize, b: usize, w: EdgeWeight) {
        let key = Self::key(a, b);
        match self.pairs.binary_search(&key) {
            Ok(k) => self.weights[k] = w,
            Err(k) => {
                self.pairs.insert(k, key);
                self.weights.insert(k, w);
            }
        }
    }

    pub fn get(&self, a: usize, b: usize) -> Option<&EdgeWeight> {
        self.pairs
            .binary_search(&Self::key(a, b))
            .ok()
            .map(|k| &self.weights[k])
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `((lo, hi), weight)` in ascending pair order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &EdgeWeight)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (a as usize, b as usize))
            .zip(&self.weights)
    }

    /// Writes `src,dst,weight` rows with external ids and six decimals.
    pub fn write_csv(&self, graph: &SocialGraph, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "src,dst,weight")?;
        for ((a, b), w) in self.iter() {
            writeln!(out, "{},{},{:.6}", graph.id(a), graph.id(b), w.value())?;
        }
        Ok(())
    }
}

/// Weights for the given index pairs.
pub fn weigh_pairs(graph: &SocialGraph, pairs: &[(usize, usize)]) -> WeightedEdgeSet {
    let mut keyed: Vec<(u32, u32)> = pairs
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| WeightedEdgeSet::key(a, b))
        .collect();
    keyed.sort_unstable();
    keyed.dedup();
    let weights = keyed
        .par_iter()
        .map(|&(a, b)| weight_by_index(graph, a as usize, b as usize))
        .collect();
    WeightedEdgeSet { pairs: keyed, weights }
}

/// Weights for every friendship edge.
pub fn weigh_graph(graph: &SocialGraph) -> WeightedEdgeSet {
    let active: Vec<Vec<u32>> = (0..graph.node_count())
        .into_par_iter()
        .map(|i| active_friend_indices(graph, i))
        .collect();
    let pairs: Vec<(u32, u32)> = graph.edges().map(|(a, b)| (a as u32, b as u32)).collect();
    let weights = pairs
        .par_iter()
        .map(|&(a, b)| weight_from_active(graph, &active, a as usize, b as usize))
        .collect();
    WeightedEdgeSet { pairs, weights }
}
