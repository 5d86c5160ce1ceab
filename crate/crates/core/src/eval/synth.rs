use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributeProfile, GraphBuilder, NodeId, SocialGraph};

/// Parameters of the planted-community social graph generator.
///
/// Nodes are split into consecutive groups of `community_size`. Each group
/// has a home location, school, employer and page/URL pool; members mostly
/// draw from them, which is what makes attribute similarity and friendship
/// line up the way they do in real networks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub node_count: usize,
    pub avg_degree: f64,
    pub community_size: usize,
    /// Share of edges with both endpoints in one group.
    pub intra_fraction: f64,
    pub first_names: usize,
    pub last_names: usize,
    pub schools: usize,
    pub employers: usize,
    pub positions: usize,
    pub locations: usize,
    /// Probability that a node reuses the name of an earlier group member.
    pub name_duplication_rate: f64,
    /// Probability that a friendship also carries an interaction.
    pub interaction_density: f64,
    pub pages_per_node: usize,
    pub urls_per_node: usize,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            node_count: 1000,
            avg_degree: 10.0,
            community_size: 50,
            intra_fraction: 0.9,
            first_names: 300,
            last_names: 600,
            schools: 120,
            employers: 150,
            positions: 40,
            locations: 25,
            name_duplication_rate: 0.01,
            interaction_density: 0.6,
            pages_per_node: 6,
            urls_per_node: 4,
            seed: 0,
        }
    }
}

impl SynthParams {
    /// Target number of undirected edges.
    pub fn edge_target(&self) -> usize {
        (self.node_count as f64 * self.avg_degree / 2.0).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("node_count", self.node_count),
            ("community_size", self.community_size),
            ("first_names", self.first_names),
            ("last_names", self.last_names),
            ("schools", self.schools),
            ("employers", self.employers),
            ("positions", self.positions),
            ("locations", self.locations),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidParam(format!("{name} must be positive")));
            }
        }
        for (name, v) in [
            ("intra_fraction", self.intra_fraction),
            ("name_duplication_rate", self.name_duplication_rate),
            ("interaction_density", self.interaction_density),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParam(format!("{name} must lie in [0, 1]")));
            }
        }
        if !(self.avg_degree >= 0.0 && self.avg_degree.is_finite()) {
            return Err(Error::InvalidParam("avg_degree must be >= 0".into()));
        }
        let n = self.node_count;
        let m = self.edge_target();
        if m > n * (n - 1) / 2 {
            return Err(Error::InvalidParam(format!(
                "{m} edges do not fit in a simple graph on {n} nodes"
            )));
        }
        // Intra-group sampling must be able to find enough distinct pairs.
        let s = self.community_size.min(n);
        let groups = n.div_ceil(s);
        let intra_capacity = groups * s * (s - 1) / 2;
        if m > 0 && s > 1 && (self.intra_fraction * m as f64) > 0.8 * intra_capacity as f64 {
            return Err(Error::InvalidParam(format!(
                "community_size {s} is too small for {m} edges at intra_fraction {}",
                self.intra_fraction
            )));
        }
        Ok(())
    }
}

const SYLLABLES: [&str; 16] = [
    "ka", "lo", "mi", "ra", "ten", "vo", "shi", "an", "del", "bru", "zo", "pe", "mar", "li", "sa", "nu",
];

/// Deterministic pronounceable token for vocabulary slot `k`.
fn word(mut k: usize, min_syllables: usize) -> String {
    let mut out = String::new();
    let mut count = 0;
    while count < min_syllables || k > 0 {
        out.push_str(SYLLABLES[k % SYLLABLES.len()]);
        k /= SYLLABLES.len();
        count += 1;
    }
    let mut chars = out.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => out,
    }
}

const DEGREES: [&str; 5] = ["Diploma", "Bachelor", "Master's", "PhD", "Associate"];
const RELATIONSHIPS: [&str; 3] = ["Single", "Married", "In a relationship"];

/// Random social graph with planted communities. Node ids are `0..node_count`.
pub fn generate_synthetic(params: &SynthParams) -> Result<SocialGraph> {
    params.validate()?;
    let n = params.node_count;
    let s = params.community_size.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let group_of = |i: usize| i / s;
    let group_range = |g: usize| (g * s)..((g + 1) * s).min(n);

    let mut builder = GraphBuilder::new();
    let mut names: Vec<String> = Vec::with_capacity(n);
    for i in 0..n {
        let g = group_of(i);
        let pick = |rng: &mut ChaCha8Rng, home: usize, size: usize, p_home: f64| {
            if rng.random::<f64>() < p_home {
                home % size
            } else {
                rng.random_range(0..size)
            }
        };
        let start = group_range(g).start;
        let name = if i > start && rng.random::<f64>() < params.name_duplication_rate {
            names[rng.random_range(start..i)].clone()
        } else {
            format!(
                "{} {}",
                word(rng.random_range(0..params.first_names), 1),
                word(rng.random_range(0..params.last_names), 2)
            )
        };
        names.push(name.clone());
        let profile = AttributeProfile {
            name,
            gender: Some(if rng.random::<bool>() { "Female" } else { "Male" }.to_owned()),
            school: Some(format!(
                "{} University",
                word(pick(&mut rng, g * 7 + 3, params.schools, 0.6), 2)
            )),
            degree: Some(DEGREES.choose(&mut rng).expect("non-empty").to_string()),
            employer: Some(format!(
                "{} Corp",
                word(pick(&mut rng, g * 11 + 5, params.employers, 0.5), 2)
            )),
            position: Some(format!("{} Officer", word(rng.random_range(0..params.positions), 1))),
            birth_year: Some(rng.random_range(1950..=2005)),
            location: Some(format!("{}land", word(pick(&mut rng, g, params.locations, 0.9), 1))),
            relationship: Some(RELATIONSHIPS.choose(&mut rng).expect("non-empty").to_string()),
        };
        builder.add_node(NodeId(i as u64), profile)?;
    }

    let m = params.edge_target();
    let mut seen: HashSet<u64> = HashSet::with_capacity(m);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m);
    let budget = m.saturating_mul(50).max(1000);
    let mut attempts = 0usize;
    while edges.len() < m {
        attempts += 1;
        if attempts > budget {
            return Err(Error::InvalidParam(format!(
                "could only place {} of {m} edges; lower avg_degree or raise community_size",
                edges.len()
            )));
        }
        let a = rng.random_range(0..n);
        let b = if rng.random::<f64>() < params.intra_fraction {
            let r = group_range(group_of(a));
            rng.random_range(r)
        } else {
            rng.random_range(0..n)
        };
        if a == b {
            continue;
        }
        let (lo, hi) = (a.min(b) as u64, a.max(b) as u64);
        if seen.insert(lo << 32 | hi) {
            edges.push((lo as u32, hi as u32));
        }
    }
    drop(seen);
    for &(a, b) in &edges {
        builder.add_edge(NodeId(a as u64), NodeId(b as u64));
        if rng.random::<f64>() < params.interaction_density {
            builder.add_interaction(NodeId(a as u64), NodeId(b as u64));
        }
    }

    let pool = |rng: &mut ChaCha8Rng, g: usize, per_node: usize| {
        // Three times the per-node count of group items, plus a global tail.
        if rng.random::<f64>() < 0.8 {
            g * per_node * 3 + rng.random_range(0..per_node * 3)
        } else {
            usize::MAX / 2 + rng.random_range(0..per_node * 50)
        }
    };
    for i in 0..n {
        let g = group_of(i);
        for _ in 0..params.pages_per_node {
            let p = pool(&mut rng, g, params.pages_per_node);
            builder.add_page_like(NodeId(i as u64), format!("page-{p:x}"));
        }
        for _ in 0..params.urls_per_node {
            let u = pool(&mut rng, g, params.urls_per_node);
            builder.add_url(NodeId(i as u64), format!("url-{u:x}"));
        }
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_count_tracks_degree() {
        let params = SynthParams {
            node_count: 100,
            avg_degree: 4.0,
            community_size: 20,
            seed: 9,
            ..SynthParams::default()
        };
        let g = generate_synthetic(&params).unwrap();
        let m = g.edge_count() as f64;
        assert!((m - 200.0).abs() <= 20.0, "{m}");
        // Independent recount of the degree sum.
        let degree_sum: usize = (0..g.node_count()).map(|i| g.degree(i)).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn single_node() {
        let params = SynthParams {
            node_count: 1,
            avg_degree: 0.0,
            ..SynthParams::default()
        };
        let g = generate_synthetic(&params).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn same_seed_same_graph() {
        let params = SynthParams {
            node_count: 300,
            seed: 4,
            ..SynthParams::default()
        };
        assert_eq!(
            generate_synthetic(&params).unwrap(),
            generate_synthetic(&params).unwrap()
        );
        let other = SynthParams {
            seed: 5,
            ..params.clone()
        };
        assert_ne!(
            generate_synthetic(&params).unwrap(),
            generate_synthetic(&other).unwrap()
        );
    }

    #[test]
    fn infeasible_parameters() {
        let dense = SynthParams {
            node_count: 10,
            avg_degree: 20.0,
            ..SynthParams::default()
        };
        assert!(generate_synthetic(&dense).is_err());
        let zero = SynthParams {
            locations: 0,
            ..SynthParams::default()
        };
        assert!(generate_synthetic(&zero).is_err());
    }

    #[test]
    fn words_are_distinct() {
        let words: HashSet<String> = (0..500).map(|k| word(k, 2)).collect();
        assert_eq!(words.len(), 500);
    }
}
