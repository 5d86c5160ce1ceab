//! Friendship graphs, mutual-friends graphs and the strength of relationship.
//!
//! `FG(v)` is the subgraph induced by `v` and its friends. `MFG(v, c)` is the
//! subgraph induced by `v`, `c` and their common friends. The strength of
//! relationship is the weight mass of `MFG(v, c)` over the combined weight
//! mass of `FG(v)` and `FG(c)`; an edge lying in both friendship graphs is
//! counted once for each. Every `MFG` edge also lies in `FG(v)` or `FG(c)`,
//! so the score never exceeds 1.
//!
//! Sums are exact rationals. Only friendship edges take part, never
//! attribute-augmented pairs.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialGraph};
use crate::weights::{weigh_pairs, WeightedEdgeSet};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    /// Ascending.
    pub nodes: Vec<NodeId>,
    /// `(lo, hi)` pairs in ascending order.
    pub edges: Vec<(NodeId, NodeId)>,
}

/// Parent edges with both endpoints in `nodes` (sorted indices).
fn induced_edges(graph: &SocialGraph, nodes: &[u32]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &a in nodes {
        for &b in graph.friends(a as usize) {
            if b > a && nodes.binary_search(&b).is_ok() {
                out.push((a as usize, b as usize));
            }
        }
    }
    out
}

fn fg_nodes(graph: &SocialGraph, v: usize) -> Vec<u32> {
    let mut nodes = graph.friends(v).to_vec();
    let at = nodes.partition_point(|&x| (x as usize) < v);
    nodes.insert(at, v as u32);
    nodes
}

fn mfg_nodes(graph: &SocialGraph, v: usize, c: usize) -> Vec<u32> {
    let mut nodes = common_friends(graph, v, c);
    nodes.extend([v as u32, c as u32]);
    nodes.sort_unstable();
    nodes
}

pub(crate) fn common_friends(graph: &SocialGraph, a: usize, b: usize) -> Vec<u32> {
    let (fa, fb) = (graph.friends(a), graph.friends(b));
    let (mut x, mut y) = (0, 0);
    let mut out = Vec::new();
    while x < fa.len() && y < fb.len() {
        match fa[x].cmp(&fb[y]) {
            Ordering::Less => x += 1,
            Ordering::Greater => y += 1,
            Ordering::Equal => {
                out.push(fa[x]);
                x += 1;
                y += 1;
            }
        }
    }
    out
}

fn to_subgraph(graph: &SocialGraph, nodes: &[u32], edges: &[(usize, usize)]) -> Subgraph {
    Subgraph {
        nodes: nodes.iter().map(|&v| graph.id(v as usize)).collect(),
        edges: edges.iter().map(|&(a, b)| (graph.id(a), graph.id(b))).collect(),
    }
}

pub fn friendship_graph(graph: &SocialGraph, v: NodeId) -> Result<Subgraph> {
    let vi = graph.index_of(v)?;
    let nodes = fg_nodes(graph, vi);
    Ok(to_subgraph(graph, &nodes, &induced_edges(graph, &nodes)))
}

pub fn mutual_friends_graph(graph: &SocialGraph, v: NodeId, c: NodeId) -> Result<Subgraph> {
    let (vi, ci) = (graph.index_of(v)?, graph.index_of(c)?);
    if vi == ci {
        return Err(Error::SameNode(v));
    }
    let nodes = mfg_nodes(graph, vi, ci);
    Ok(to_subgraph(graph, &nodes, &induced_edges(graph, &nodes)))
}

/// Strength of relationship between two profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrScore {
    pub value: f64,
    /// Set when both friendship graphs carry zero weight; `value` is then 0.
    pub degenerate: bool,
    /// The exact value, serialized as `"num/den"`.
    #[serde(with = "ratio_string")]
    pub exact: BigRational,
}

mod ratio_string {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse()
            .map_err(|_| D::Error::custom(format!("not a rational: {text}")))
    }
}

impl SrScore {
    fn degenerate() -> Self {
        SrScore {
            value: 0.0,
            degenerate: true,
            exact: BigRational::zero(),
        }
    }

    fn from_ratio(exact: BigRational) -> Self {
        SrScore {
            value: exact.to_f64().unwrap_or(f64::NAN),
            degenerate: false,
            exact,
        }
    }
}

impl PartialOrd for SrScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.exact.cmp(&other.exact))
    }
}

/// Exact sum of edge weights: integer parts and URL fractions grouped by
/// denominator.
#[derive(Default)]
struct MassSum {
    integer: u64,
    fractions: BTreeMap<u32, u64>,
}

impl MassSum {
    fn add_edges(&mut self, graph: &SocialGraph, weights: &WeightedEdgeSet, edges: &[(usize, usize)]) -> Result<()> {
        for &(a, b) in edges {
            let w = weights
                .get(a, b)
                .ok_or_else(|| Error::MissingWeight(graph.id(a), graph.id(b)))?;
            self.integer += u64::from(w.common_active_friends) + u64::from(w.common_page_likes);
            if w.url_union > 0 && w.shared_urls > 0 {
                *self.fractions.entry(w.url_union).or_default() += u64::from(w.shared_urls);
            }
        }
        Ok(())
    }

    fn total(&self) -> BigRational {
        let mut sum = BigRational::from_integer(BigInt::from(self.integer));
        for (&den, &num) in &self.fractions {
            sum += BigRational::new(BigInt::from(num), BigInt::from(den));
        }
        sum
    }
}

/// Edge lists of `MFG(v, c)`, `FG(v)` and `FG(c)` by node index.
pub(crate) fn sr_edge_sets(graph: &SocialGraph, v: usize, c: usize) -> [Vec<(usize, usize)>; 3] {
    [
        induced_edges(graph, &mfg_nodes(graph, v, c)),
        induced_edges(graph, &fg_nodes(graph, v)),
        induced_edges(graph, &fg_nodes(graph, c)),
    ]
}

pub(crate) fn strength_by_index(weights: &WeightedEdgeSet, graph: &SocialGraph, v: usize, c: usize) -> Result<SrScore> {
    let [t, r, p] = sr_edge_sets(graph, v, c);
    let mut numerator = MassSum::default();
    numerator.add_edges(graph, weights, &t)?;
    let mut denominator = MassSum::default();
    denominator.add_edges(graph, weights, &r)?;
    denominator.add_edges(graph, weights, &p)?;
    let den = denominator.total();
    if den.is_zero() {
        return Ok(SrScore::degenerate());
    }
    Ok(SrScore::from_ratio(numerator.total() / den))
}

/// `SR(v, c)` from precomputed weights. Fails if any edge of the three
/// subgraphs has no weight.
pub fn strength_of_relationship(
    weights: &WeightedEdgeSet,
    graph: &SocialGraph,
    v: NodeId,
    c: NodeId,
) -> Result<SrScore> {
    let (vi, ci) = (graph.index_of(v)?, graph.index_of(c)?);
    if vi == ci {
        return Err(Error::SameNode(v));
    }
    strength_by_index(weights, graph, vi, ci)
}

/// `SR(v, c)`, weighing only the edges it needs.
pub fn strength_on_demand(graph: &SocialGraph, v: NodeId, c: NodeId) -> Result<SrScore> {
    let (vi, ci) = (graph.index_of(v)?, graph.index_of(c)?);
    if vi == ci {
        return Err(Error::SameNode(v));
    }
    let [_, r, p] = sr_edge_sets(graph, vi, ci);
    let needed: Vec<(usize, usize)> = r.into_iter().chain(p).collect();
    strength_by_index(&weigh_pairs(graph, &needed), graph, vi, ci)
}
