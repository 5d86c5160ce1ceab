use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Attribute, NodeId, SocialGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub field: Attribute,
    /// `None` clears the attribute.
    pub value: Option<String>,
}

/// How to forge a clone of `victim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloneInjectionSpec {
    pub victim: NodeId,
    #[serde(default)]
    pub attribute_perturbations: Vec<Perturbation>,
    /// Share of the victim's friends the clone befriends.
    pub friend_fraction: f64,
    /// Share of the clone's new friends it also interacts with.
    pub interaction_fraction: f64,
    /// Share of the victim's liked pages the clone likes too.
    pub like_overlap: f64,
    /// Share of the victim's shared URLs the clone shares too.
    pub url_overlap: f64,
    pub seed: u64,
}

impl CloneInjectionSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("friend_fraction", self.friend_fraction),
            ("interaction_fraction", self.interaction_fraction),
            ("like_overlap", self.like_overlap),
            ("url_overlap", self.url_overlap),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParam(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

fn sample<T: Copy>(items: &[T], fraction: f64, rng: &mut ChaCha8Rng) -> Vec<T> {
    let take = (fraction * items.len() as f64).round() as usize;
    let mut pool = items.to_vec();
    pool.shuffle(rng);
    pool.truncate(take);
    pool
}

/// Adds a forged copy of the victim to `graph`. The clone gets id
/// `max_id + 1`, never befriends the victim itself, and is built from the
/// seeded stream of `spec.seed` only.
pub fn inject_clone(graph: &SocialGraph, spec: &CloneInjectionSpec) -> Result<(SocialGraph, NodeId)> {
    spec.validate()?;
    let v = graph.index_of(spec.victim)?;
    let clone = NodeId(graph.max_id().map_or(0, |m| m.0 + 1));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut profile = graph.profile(v).clone();
    for p in &spec.attribute_perturbations {
        profile.set(p.field, p.value.as_deref())?;
    }

    let mut builder = graph.to_builder();
    builder.add_node(clone, profile)?;

    let friends = sample(graph.friends(v), spec.friend_fraction, &mut rng);
    for &f in &friends {
        builder.add_edge(clone, graph.id(f as usize));
    }
    for f in sample(&friends, spec.interaction_fraction, &mut rng) {
        builder.add_interaction(clone, graph.id(f as usize));
    }
    for p in sample(graph.page_likes(v), spec.like_overlap, &mut rng) {
        builder.add_page_like(clone, graph.page_name(p));
    }
    for u in sample(graph.urls(v), spec.url_overlap, &mut rng) {
        builder.add_url(clone, graph.url_name(u));
    }
    Ok((builder.build()?, clone))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AttributeProfile, GraphBuilder};

    fn star() -> SocialGraph {
        let mut b = GraphBuilder::new();
        let mut victim = AttributeProfile::named("Sara Abraham");
        victim.degree = Some("Master's".into());
        b.add_node(NodeId(1), victim).unwrap();
        for f in 2..12 {
            b.add_node(NodeId(f), AttributeProfile::named(format!("f{f}"))).unwrap();
            b.add_edge(NodeId(1), NodeId(f)).add_interaction(NodeId(1), NodeId(f));
        }
        b.add_page_like(NodeId(1), "p1").add_page_like(NodeId(1), "p2");
        b.add_url(NodeId(1), "u1");
        b.build().unwrap()
    }

    fn spec(friend_fraction: f64) -> CloneInjectionSpec {
        CloneInjectionSpec {
            victim: NodeId(1),
            attribute_perturbations: vec![Perturbation {
                field: Attribute::Degree,
                value: Some("Bachelor".into()),
            }],
            friend_fraction,
            interaction_fraction: 0.5,
            like_overlap: 0.5,
            url_overlap: 1.0,
            seed: 3,
        }
    }

    #[test]
    fn clone_copies_profile_with_perturbation() {
        let g = star();
        let (out, clone) = inject_clone(&g, &spec(0.6)).unwrap();
        assert_eq!(clone, NodeId(12));
        let ci = out.index_of(clone).unwrap();
        let mut expected = g.profile(0).clone();
        expected.degree = Some("Bachelor".into());
        assert_eq!(out.profile(ci), &expected);
        assert_eq!(out.degree(ci), 6);
        assert!(!out.are_friends(ci, out.index_of(NodeId(1)).unwrap()));
        assert_eq!(out.interactions(ci).len(), 3);
        assert_eq!(out.page_likes(ci).len(), 1);
        assert_eq!(out.urls(ci).len(), 1);
        assert_eq!(out.edge_count(), g.edge_count() + 6);
    }

    #[test]
    fn zero_fraction_gives_isolated_clone() {
        let (out, clone) = inject_clone(&star(), &spec(0.0)).unwrap();
        assert_eq!(out.degree(out.index_of(clone).unwrap()), 0);
    }

    #[test]
    fn deterministic_under_seed() {
        let g = star();
        assert_eq!(
            inject_clone(&g, &spec(0.5)).unwrap(),
            inject_clone(&g, &spec(0.5)).unwrap()
        );
    }

    #[test]
    fn rejects_bad_specs() {
        let g = star();
        let mut s = spec(1.5);
        assert!(inject_clone(&g, &s).is_err());
        s.friend_fraction = 0.5;
        s.victim = NodeId(99);
        assert!(matches!(inject_clone(&g, &s), Err(Error::UnknownNode(NodeId(99)))));
    }
}
