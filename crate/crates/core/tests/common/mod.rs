//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cloneguard::{AttributeProfile, GraphBuilder, NodeId, SocialGraph};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Small random graph with random interactions, page likes and URLs drawn
/// from tiny pools so that overlaps are common. Ids are spaced out and not
/// contiguous.
pub fn random_graph(seed: u64, max_nodes: usize) -> SocialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let p_edge = rng.random_range(0.05..0.6);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(NodeId(3 * i as u64 + 7), AttributeProfile::named(format!("user{i}")))
            .unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p_edge) {
                let (a, c) = (NodeId(3 * i as u64 + 7), NodeId(3 * j as u64 + 7));
                b.add_edge(a, c);
                if rng.random_bool(0.6) {
                    b.add_interaction(a, c);
                }
            }
        }
    }
    for i in 0..n {
        let id = NodeId(3 * i as u64 + 7);
        for p in 0..6 {
            if rng.random_bool(0.35) {
                b.add_page_like(id, format!("page{p}"));
            }
        }
        for u in 0..5 {
            if rng.random_bool(0.3) {
                b.add_url(id, format!("url{u}"));
            }
        }
    }
    b.build().unwrap()
}

/// Friends of `v` by id, straight from the edge list.
fn neighbours(g: &SocialGraph, v: NodeId) -> BTreeSet<NodeId> {
    g.edges()
        .filter_map(|(a, b)| {
            let (a, b) = (g.id(a), g.id(b));
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
        .collect()
}

fn interacted(g: &SocialGraph, v: NodeId) -> BTreeSet<NodeId> {
    g.interaction_pairs()
        .filter_map(|(a, b)| {
            let (a, b) = (g.id(a), g.id(b));
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
        .collect()
}

fn names(g: &SocialGraph, v: NodeId, urls: bool) -> BTreeSet<String> {
    let i = g.index_of(v).unwrap();
    if urls {
        g.urls(i).iter().map(|&u| g.url_name(u).to_owned()).collect()
    } else {
        g.page_likes(i).iter().map(|&p| g.page_name(p).to_owned()).collect()
    }
}

/// Pair weight recomputed from set definitions, as an exact rational.
pub fn oracle_weight(g: &SocialGraph, a: NodeId, b: NodeId) -> BigRational {
    let active = |v| -> BTreeSet<NodeId> { neighbours(g, v).intersection(&interacted(g, v)).copied().collect() };
    let friends = active(a).intersection(&active(b)).count();
    let pages = names(g, a, false).intersection(&names(g, b, false)).count();
    let (ua, ub) = (names(g, a, true), names(g, b, true));
    let union = ua.union(&ub).count();
    let mut w = BigRational::from_integer(BigInt::from(friends + pages));
    if union > 0 {
        w += BigRational::new(BigInt::from(ua.intersection(&ub).count()), BigInt::from(union));
    }
    w
}

/// Strength of relationship by enumerating every friendship and testing
/// membership of both endpoints in `MFG(v, c)`, `FG(v)` and `FG(c)`.
/// Returns `None` for a zero denominator.
pub fn oracle_sr(g: &SocialGraph, v: NodeId, c: NodeId) -> Option<BigRational> {
    let (nv, nc) = (neighbours(g, v), neighbours(g, c));
    let in_fg_v = |x: NodeId| x == v || nv.contains(&x);
    let in_fg_c = |x: NodeId| x == c || nc.contains(&x);
    let in_mfg = |x: NodeId| x == v || x == c || (nv.contains(&x) && nc.contains(&x));
    let (mut t, mut r, mut p) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    for (a, b) in g.edges() {
        let (a, b) = (g.id(a), g.id(b));
        let w = oracle_weight(g, a, b);
        if in_mfg(a) && in_mfg(b) {
            t += &w;
        }
        if in_fg_v(a) && in_fg_v(b) {
            r += &w;
        }
        if in_fg_c(a) && in_fg_c(b) {
            p += &w;
        }
    }
    let den = r + p;
    if den.is_zero() {
        None
    } else {
        Some(t / den)
    }
}

/// Connected components of the friendship graph plus `extra` pairs, as a
/// component label per node index.
pub fn component_labels(g: &SocialGraph, extra: &[(u32, u32)]) -> Vec<usize> {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let pairs = g.edges().chain(extra.iter().map(|&(a, b)| (a as usize, b as usize)));
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    (0..n).map(|x| find(&mut parent, x)).collect()
}
