//! The detection pipeline for one victim profile.
//!
//! 1. Cluster the attribute-augmented graph (once per graph).
//! 2. Take the victim's stored profile.
//! 3. Search the victim's cluster for name-similar profiles.
//! 4. Keep candidates that share friends with the victim but are not its
//!    friends.
//! 5. Rank them by ascending strength of relationship.
//! 6. Ask a verification oracle about each, weakest tie first.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributeProfile, NodeId, SocialGraph};
use crate::mcl::{run_mcl, ClusterSet, MclParams};
use crate::similarity::{augment_by_alpha, name_similarity, PairStrategy};
use crate::strength::{common_friends, strength_by_index, SrScore};
use crate::weights::{weigh_graph, WeightedEdgeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Clone,
    Genuine,
    Unverified,
}

/// Decides whether a suspect is a clone of the victim.
///
/// Implementations must be deterministic for a fixed configuration; they may
/// be queried from several threads at once.
pub trait VerificationOracle: Sync {
    fn verify(&self, victim: NodeId, candidate: NodeId, mutual_friends: &[NodeId]) -> Result<Verdict, String>;
}

/// Answers from a known set of clone ids.
#[derive(Clone, Debug, Default)]
pub struct GroundTruthOracle {
    pub clones: BTreeSet<NodeId>,
}

impl GroundTruthOracle {
    pub fn new(clones: impl IntoIterator<Item = NodeId>) -> Self {
        GroundTruthOracle {
            clones: clones.into_iter().collect(),
        }
    }
}

impl VerificationOracle for GroundTruthOracle {
    fn verify(&self, _: NodeId, candidate: NodeId, _: &[NodeId]) -> Result<Verdict, String> {
        Ok(if self.clones.contains(&candidate) {
            Verdict::Clone
        } else {
            Verdict::Genuine
        })
    }
}

/// An imperfect verifier: flags a true clone with probability `clone_rate`
/// and a genuine profile with probability `false_alarm_rate`. Each
/// `(victim, candidate)` query draws from its own seeded stream, so answers
/// do not depend on query order.
#[derive(Clone, Debug)]
pub struct StochasticOracle {
    pub truth: GroundTruthOracle,
    pub clone_rate: f64,
    pub false_alarm_rate: f64,
    pub seed: u64,
}

impl StochasticOracle {
    pub const DEFAULT_CLONE_RATE: f64 = 0.9;
    pub const DEFAULT_FALSE_ALARM_RATE: f64 = 0.1;

    pub fn new(clones: impl IntoIterator<Item = NodeId>, seed: u64) -> Self {
        StochasticOracle {
            truth: GroundTruthOracle::new(clones),
            clone_rate: Self::DEFAULT_CLONE_RATE,
            false_alarm_rate: Self::DEFAULT_FALSE_ALARM_RATE,
            seed,
        }
    }

    pub fn with_rates(mut self, clone_rate: f64, false_alarm_rate: f64) -> Self {
        self.clone_rate = clone_rate;
        self.false_alarm_rate = false_alarm_rate;
        self
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl VerificationOracle for StochasticOracle {
    fn verify(&self, victim: NodeId, candidate: NodeId, _: &[NodeId]) -> Result<Verdict, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(splitmix64(victim.0) ^ splitmix64(candidate.0).rotate_left(17));
        let is_clone = self.truth.clones.contains(&candidate);
        let p = if is_clone {
            self.clone_rate
        } else {
            self.false_alarm_rate
        };
        Ok(if rng.random::<f64>() < p {
            Verdict::Clone
        } else {
            Verdict::Genuine
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopPolicy {
    /// Every suspect is verified.
    #[default]
    Exhaustive,
    /// Stop after the first clone verdict; the rest stay unverified.
    FirstHit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub alpha: f64,
    pub mcl: MclParams,
    pub name_threshold: f64,
    pub stop_policy: StopPolicy,
    #[serde(skip)]
    pub pair_strategy: PairStrategy,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            alpha: 0.68,
            mcl: MclParams::default(),
            name_threshold: 0.75,
            stop_policy: StopPolicy::Exhaustive,
            pair_strategy: PairStrategy::Auto,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParam(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.name_threshold) {
            return Err(Error::InvalidParam(format!(
                "name threshold must lie in [0, 1], got {}",
                self.name_threshold
            )));
        }
        self.mcl.validate()
    }
}

/// A name-similar profile found in the victim's cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: NodeId,
    pub similarity: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suspect {
    pub id: NodeId,
    pub mutual_friends: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedSuspect {
    pub id: NodeId,
    pub sr: SrScore,
    pub mutual_friends: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportCandidate {
    pub id: NodeId,
    pub sr: f64,
    pub degenerate: bool,
    pub mutual_friends: Vec<NodeId>,
    pub verdict: Verdict,
}

/// Ranked, verified suspects for one victim. Candidates are in ascending
/// SR order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspectReport {
    pub victim: NodeId,
    pub community: usize,
    pub candidates: Vec<ReportCandidate>,
}

impl SuspectReport {
    pub fn flagged(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.candidates
            .iter()
            .filter(|c| c.verdict == Verdict::Clone)
            .map(|c| c.id)
    }
}

pub fn extract_profile(graph: &SocialGraph, victim: NodeId) -> Result<AttributeProfile> {
    Ok(graph.profile(graph.index_of(victim)?).clone())
}

/// Index of the cluster containing `v`.
pub fn community_of(graph: &SocialGraph, clustering: &ClusterSet, v: NodeId) -> Result<usize> {
    let idx = graph.index_of(v)?;
    clustering
        .assignment
        .get(idx)
        .copied()
        .ok_or_else(|| Error::InvalidParam(format!("node {v} is not assigned to a cluster")))
}

/// Members of `cluster` (node indices) other than the victim whose name
/// similarity to the victim's name is at least `threshold`, most similar
/// first, then by ascending id.
pub fn search_similar_names(
    graph: &SocialGraph,
    cluster: &[usize],
    victim: NodeId,
    threshold: f64,
) -> Result<Vec<Candidate>> {
    let vi = graph.index_of(victim)?;
    if !cluster.contains(&vi) {
        return Err(Error::InvalidParam(format!(
            "victim {victim} is not in the searched cluster"
        )));
    }
    let name = &graph.profile(vi).name;
    let mut found: Vec<(f64, usize)> = cluster
        .iter()
        .filter(|&&n| n != vi)
        .map(|&n| (name_similarity(name, &graph.profile(n).name), n))
        .filter(|&(s, _)| s >= threshold)
        .collect();
    found.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(found
        .into_iter()
        .map(|(similarity, n)| Candidate {
            id: graph.id(n),
            similarity,
        })
        .collect())
}

/// Keeps candidates that have at least one mutual friend with the victim
/// and are not the victim's friends.
pub fn filter_candidates(graph: &SocialGraph, victim: NodeId, candidates: &[Candidate]) -> Result<Vec<Suspect>> {
    let vi = graph.index_of(victim)?;
    let mut out = Vec::new();
    for c in candidates {
        let ci = graph.index_of(c.id)?;
        if ci == vi || graph.are_friends(vi, ci) {
            continue;
        }
        let mutual = common_friends(graph, vi, ci);
        if !mutual.is_empty() {
            out.push(Suspect {
                id: c.id,
                mutual_friends: mutual.into_iter().map(|m| graph.id(m as usize)).collect(),
            });
        }
    }
    Ok(out)
}

/// Orders suspects by ascending SR, then ascending id.
pub fn rank_suspects(
    weights: &WeightedEdgeSet,
    graph: &SocialGraph,
    victim: NodeId,
    suspects: &[Suspect],
) -> Result<Vec<RankedSuspect>> {
    let vi = graph.index_of(victim)?;
    let mut ranked = suspects
        .iter()
        .map(|s| {
            let ci = graph.index_of(s.id)?;
            if ci == vi {
                return Err(Error::SameNode(victim));
            }
            Ok(RankedSuspect {
                id: s.id,
                sr: strength_by_index(weights, graph, vi, ci)?,
                mutual_friends: s.mutual_friends.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| a.sr.exact.cmp(&b.sr.exact).then(a.id.cmp(&b.id)));
    Ok(ranked)
}

/// Queries the oracle in rank order. On failure the verdicts collected so
/// far are returned inside [`Error::Oracle`].
pub fn verify_suspects(
    victim: NodeId,
    ranked: &[RankedSuspect],
    oracle: &dyn VerificationOracle,
    policy: StopPolicy,
) -> Result<Vec<Verdict>> {
    let mut verdicts = Vec::with_capacity(ranked.len());
    let mut stopped = false;
    for s in ranked {
        if stopped {
            verdicts.push(Verdict::Unverified);
            continue;
        }
        match oracle.verify(victim, s.id, &s.mutual_friends) {
            Ok(v) => {
                stopped = policy == StopPolicy::FirstHit && v == Verdict::Clone;
                verdicts.push(v);
            }
            Err(message) => {
                return Err(Error::Oracle {
                    message,
                    partial: verdicts,
                })
            }
        }
    }
    Ok(verdicts)
}

/// Shares the victim-independent work (clustering and edge weights) across
/// victim queries on one graph.
#[derive(Clone, Debug)]
pub struct Detector<'g> {
    graph: &'g SocialGraph,
    config: DetectionConfig,
    clustering: ClusterSet,
    weights: WeightedEdgeSet,
}

impl<'g> Detector<'g> {
    pub fn new(graph: &'g SocialGraph, config: DetectionConfig) -> Result<Self> {
        config.validate()?;
        let w = augment_by_alpha(graph, config.alpha, config.pair_strategy).map_err(|e| e.in_stage("augmentation"))?;
        let clustering = run_mcl(&w, &config.mcl).map_err(|e| e.in_stage("clustering"))?;
        let weights = weigh_graph(graph);
        Ok(Detector {
            graph,
            config,
            clustering,
            weights,
        })
    }

    pub fn graph(&self) -> &'g SocialGraph {
        self.graph
    }

    pub fn clustering(&self) -> &ClusterSet {
        &self.clustering
    }

    pub fn weights(&self) -> &WeightedEdgeSet {
        &self.weights
    }

    pub fn config(&self) -> &DetectionConfig {
        &self.config
    }

    pub fn detect(&self, victim: NodeId, oracle: &dyn VerificationOracle) -> Result<SuspectReport> {
        let g = self.graph;
        extract_profile(g, victim).map_err(|e| e.in_stage("extract"))?;
        let community = community_of(g, &self.clustering, victim).map_err(|e| e.in_stage("community"))?;
        let cluster = &self.clustering.clusters[community];
        let candidates =
            search_similar_names(g, cluster, victim, self.config.name_threshold).map_err(|e| e.in_stage("search"))?;
        let suspects = filter_candidates(g, victim, &candidates).map_err(|e| e.in_stage("select"))?;
        let ranked = rank_suspects(&self.weights, g, victim, &suspects).map_err(|e| e.in_stage("rank"))?;
        let verdicts =
            verify_suspects(victim, &ranked, oracle, self.config.stop_policy).map_err(|e| e.in_stage("verify"))?;
        Ok(SuspectReport {
            victim,
            community,
            candidates: ranked
                .into_iter()
                .zip(verdicts)
                .map(|(r, verdict)| ReportCandidate {
                    id: r.id,
                    sr: r.sr.value,
                    degenerate: r.sr.degenerate,
                    mutual_friends: r.mutual_friends,
                    verdict,
                })
                .collect(),
        })
    }
}

/// Runs the whole pipeline for one victim.
pub fn detect(
    graph: &SocialGraph,
    victim: NodeId,
    config: &DetectionConfig,
    oracle: &dyn VerificationOracle,
) -> Result<SuspectReport> {
    graph.index_of(victim).map_err(|e| e.in_stage("extract"))?;
    Detector::new(graph, config.clone())?.detect(victim, oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::weights::EdgeWeight;

    fn sr(value: i64) -> SrScore {
        SrScore {
            value: value as f64,
            degenerate: false,
            exact: num_rational::BigRational::from_integer(value.into()),
        }
    }

    fn ranked(ids: &[u64]) -> Vec<RankedSuspect> {
        ids.iter()
            .map(|&i| RankedSuspect {
                id: NodeId(i),
                sr: sr(0),
                mutual_friends: vec![],
            })
            .collect()
    }

    struct Failing;
    impl VerificationOracle for Failing {
        fn verify(&self, _: NodeId, c: NodeId, _: &[NodeId]) -> Result<Verdict, String> {
            if c == NodeId(3) {
                Err("no answer".into())
            } else {
                Ok(Verdict::Genuine)
            }
        }
    }

    #[test]
    fn verification_policies() {
        let oracle = GroundTruthOracle::new([NodeId(2)]);
        let list = ranked(&[1, 2, 3]);
        assert_eq!(
            verify_suspects(NodeId(0), &list, &oracle, StopPolicy::Exhaustive).unwrap(),
            vec![Verdict::Genuine, Verdict::Clone, Verdict::Genuine]
        );
        assert_eq!(
            verify_suspects(NodeId(0), &list, &oracle, StopPolicy::FirstHit).unwrap(),
            vec![Verdict::Genuine, Verdict::Clone, Verdict::Unverified]
        );
        assert!(verify_suspects(NodeId(0), &[], &oracle, StopPolicy::Exhaustive)
            .unwrap()
            .is_empty());
        let none = GroundTruthOracle::default();
        assert!(verify_suspects(NodeId(0), &list, &none, StopPolicy::Exhaustive)
            .unwrap()
            .iter()
            .all(|v| *v == Verdict::Genuine));
    }

    #[test]
    fn oracle_failure_keeps_partial_verdicts() {
        match verify_suspects(NodeId(0), &ranked(&[1, 2, 3, 4]), &Failing, StopPolicy::Exhaustive) {
            Err(Error::Oracle { partial, .. }) => assert_eq!(partial, vec![Verdict::Genuine; 2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stochastic_oracle_is_order_independent() {
        let o = StochasticOracle::new([NodeId(5)], 42);
        let a = o.verify(NodeId(1), NodeId(5), &[]).unwrap();
        let _ = o.verify(NodeId(1), NodeId(6), &[]).unwrap();
        assert_eq!(a, o.verify(NodeId(1), NodeId(5), &[]).unwrap());
        let certain = StochasticOracle::new([NodeId(5)], 1).with_rates(1.0, 0.0);
        assert_eq!(certain.verify(NodeId(1), NodeId(5), &[]).unwrap(), Verdict::Clone);
        assert_eq!(certain.verify(NodeId(1), NodeId(6), &[]).unwrap(), Verdict::Genuine);
    }

    #[test]
    fn stochastic_oracle_rates() {
        let o = StochasticOracle::new((0..1000).map(NodeId), 7);
        let flagged = (0..1000)
            .filter(|&c| o.verify(NodeId(9999), NodeId(c), &[]).unwrap() == Verdict::Clone)
            .count();
        assert!((850..=950).contains(&flagged), "{flagged}");
        let genuine = (2000..3000)
            .filter(|&c| o.verify(NodeId(9999), NodeId(c), &[]).unwrap() == Verdict::Clone)
            .count();
        assert!((50..=150).contains(&genuine), "{genuine}");
    }

    /// Victim 0 with friends 1, 2; candidates 3 (shares friend 1), 4 (shares
    /// nothing), 2 (a direct friend, also named alike).
    fn small() -> SocialGraph {
        let mut b = GraphBuilder::new();
        for (id, name) in [
            (0, "Sara Abraham"),
            (1, "Tom"),
            (2, "Sara Abram"),
            (3, "Sara Abrahama"),
            (4, "Sara Abraha"),
        ] {
            b.add_node(NodeId(id), AttributeProfile::named(name)).unwrap();
        }
        b.add_edge(NodeId(0), NodeId(1))
            .add_edge(NodeId(0), NodeId(2))
            .add_edge(NodeId(3), NodeId(1));
        b.build().unwrap()
    }

    #[test]
    fn search_filter_and_rank() {
        let g = small();
        let cluster: Vec<usize> = (0..5).collect();
        let found = search_similar_names(&g, &cluster, NodeId(0), 0.75).unwrap();
        let ids: Vec<NodeId> = found.iter().map(|c| c.id).collect();
        assert_eq!(ids, vec![NodeId(3), NodeId(4), NodeId(2)]);
        assert!(!ids.contains(&NodeId(0)));

        let exact = search_similar_names(&g, &cluster, NodeId(0), 1.0).unwrap();
        assert!(exact.is_empty());
        assert!(search_similar_names(&g, &[1, 2], NodeId(0), 0.5).is_err());

        let suspects = filter_candidates(&g, NodeId(0), &found).unwrap();
        assert_eq!(
            suspects,
            vec![Suspect {
                id: NodeId(3),
                mutual_friends: vec![NodeId(1)]
            }]
        );
        assert!(filter_candidates(&g, NodeId(0), &[]).unwrap().is_empty());

        let mut w = WeightedEdgeSet::new();
        for (a, b) in g.edges() {
            w.insert(a, b, EdgeWeight::from_counts(1, 0));
        }
        let r = rank_suspects(&w, &g, NodeId(0), &suspects).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].id, NodeId(3));
    }

    #[test]
    fn equal_sr_ranks_lower_id_first() {
        // Two symmetric candidates 3 and 4 around victim 0 through friend 1.
        let mut b = GraphBuilder::new();
        for id in 0..5 {
            b.add_node(NodeId(id), AttributeProfile::named("Same Name")).unwrap();
        }
        b.add_edge(NodeId(0), NodeId(1))
            .add_edge(NodeId(4), NodeId(1))
            .add_edge(NodeId(3), NodeId(1));
        let g = b.build().unwrap();
        let mut w = WeightedEdgeSet::new();
        for (a, bb) in g.edges() {
            w.insert(a, bb, EdgeWeight::from_counts(1, 0));
        }
        let suspects = vec![
            Suspect {
                id: NodeId(4),
                mutual_friends: vec![NodeId(1)],
            },
            Suspect {
                id: NodeId(3),
                mutual_friends: vec![NodeId(1)],
            },
        ];
        let r = rank_suspects(&w, &g, NodeId(0), &suspects).unwrap();
        assert_eq!(r[0].sr, r[1].sr);
        assert_eq!(r.iter().map(|s| s.id).collect::<Vec<_>>(), vec![NodeId(3), NodeId(4)]);
    }

    #[test]
    fn community_lookup() {
        let g = small();
        let one = ClusterSet::from_clusters(5, vec![(0..5).collect()]).unwrap();
        assert_eq!(community_of(&g, &one, NodeId(3)).unwrap(), 0);
        let three = ClusterSet::from_clusters(5, vec![vec![0], vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(community_of(&g, &three, NodeId(2)).unwrap(), 1);
        assert!(community_of(&g, &three, NodeId(77)).is_err());
    }

    #[test]
    fn extract_is_stable() {
        let g = small();
        assert_eq!(extract_profile(&g, NodeId(0)).unwrap().name, "Sara Abraham");
        assert_eq!(
            extract_profile(&g, NodeId(0)).unwrap(),
            extract_profile(&g, NodeId(0)).unwrap()
        );
        assert!(extract_profile(&g, NodeId(9999)).is_err());
    }

    #[test]
    fn victim_without_lookalikes_gives_empty_report() {
        let g = small();
        let report = detect(
            &g,
            NodeId(1),
            &DetectionConfig::default(),
            &GroundTruthOracle::default(),
        )
        .unwrap();
        assert!(report.candidates.is_empty());
        assert!(matches!(
            detect(
                &g,
                NodeId(99),
                &DetectionConfig::default(),
                &GroundTruthOracle::default()
            ),
            Err(Error::Stage { stage: "extract", .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = DetectionConfig {
            name_threshold: 1.5,
            ..DetectionConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = DetectionConfig {
            alpha: -0.1,
            ..DetectionConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
