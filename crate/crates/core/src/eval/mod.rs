//! Clone injection, synthetic graphs, TP/FP evaluation and alpha sweeps.

mod fixture;
mod inject;
mod synth;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{DetectionConfig, Detector, SuspectReport, VerificationOracle};
use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialGraph};
use crate::mcl::{run_mcl, ClusterSet, MclParams};
use crate::similarity::{augment_by_alpha, compute_k, AugmentedAdjacency, PairStrategy};

pub use fixture::{build_fixture20, build_fixture20_with_clone, fixture_clone_spec, FIXTURE_CLONE_SEED};
pub use inject::{inject_clone, CloneInjectionSpec, Perturbation};
pub use synth::{generate_synthetic, SynthParams};

/// Conventional name of the ground-truth file next to a graph.
pub const TRUTH_FILE: &str = "truth.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InjectedClone {
    pub id: NodeId,
    pub victim: NodeId,
}

/// Which nodes are clones, and of whom.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub clones: Vec<InjectedClone>,
}

impl GroundTruth {
    pub fn ids(&self) -> BTreeSet<NodeId> {
        self.clones.iter().map(|c| c.id).collect()
    }

    /// Distinct victims in ascending id order.
    pub fn victims(&self) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = self.clones.iter().map(|c| c.victim).collect();
        set.into_iter().collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// A clustering with node ids in place of indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub alpha: f64,
    pub k: usize,
    pub converged: bool,
    pub iterations: usize,
    pub clusters: Vec<Vec<NodeId>>,
}

impl ClusterReport {
    pub fn new(graph: &SocialGraph, alpha: f64, clustering: &ClusterSet) -> Self {
        ClusterReport {
            alpha,
            k: compute_k(alpha, graph.edge_count()),
            converged: clustering.converged,
            iterations: clustering.iterations,
            clusters: clustering.with_ids(graph),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VictimOutcome {
    pub victim: NodeId,
    pub flagged: Vec<NodeId>,
    pub report: SuspectReport,
}

/// TP/FP counts over a set of victim queries. A node flagged by several
/// victims counts once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub injected: usize,
    pub tp: usize,
    pub fp: usize,
    pub per_victim: Vec<VictimOutcome>,
}

impl EvalReport {
    /// One summary row: `injected,tp,fp`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "injected,tp,fp")?;
        writeln!(out, "{},{},{}", self.injected, self.tp, self.fp)
    }

    /// One row per flagged node: `victim,candidate,sr,verdict`.
    pub fn write_detail_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "victim,candidate,sr,verdict")?;
        for v in &self.per_victim {
            for c in &v.report.candidates {
                let verdict = serde_json::to_value(c.verdict).map_err(std::io::Error::other)?;
                writeln!(
                    out,
                    "{},{},{:.6},{}",
                    v.victim,
                    c.id,
                    c.sr,
                    verdict.as_str().unwrap_or_default()
                )?;
            }
        }
        Ok(())
    }
}

/// Runs detection for every victim and counts distinct flagged nodes.
/// `ground_truth` is the set of clone ids.
pub fn evaluate(
    graph: &SocialGraph,
    ground_truth: &BTreeSet<NodeId>,
    victims: &[NodeId],
    config: &DetectionConfig,
    oracle: &dyn VerificationOracle,
) -> Result<EvalReport> {
    for &id in ground_truth {
        graph.index_of(id)?;
    }
    for &v in victims {
        graph.index_of(v)?;
    }
    let detector = Detector::new(graph, config.clone())?;
    evaluate_with(&detector, ground_truth, victims, oracle)
}

/// [`evaluate`] on an already-built detector.
pub fn evaluate_with(
    detector: &Detector<'_>,
    ground_truth: &BTreeSet<NodeId>,
    victims: &[NodeId],
    oracle: &dyn VerificationOracle,
) -> Result<EvalReport> {
    let per_victim = victims
        .par_iter()
        .map(|&victim| {
            let report = detector.detect(victim, oracle)?;
            Ok(VictimOutcome {
                victim,
                flagged: report.flagged().collect(),
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged: BTreeSet<NodeId> = per_victim.iter().flat_map(|v| v.flagged.iter().copied()).collect();
    let tp = flagged.iter().filter(|id| ground_truth.contains(id)).count();
    Ok(EvalReport {
        injected: ground_truth.len(),
        tp,
        fp: flagged.len() - tp,
        per_victim,
    })
}

/// Share of a cluster's internal W-edges that came from augmentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityRate {
    pub augmented: usize,
    pub internal: usize,
}

impl SimilarityRate {
    /// 0 for a cluster without internal edges.
    pub fn value(&self) -> f64 {
        if self.internal == 0 {
            0.0
        } else {
            self.augmented as f64 / self.internal as f64
        }
    }
}

/// Per-cluster similarity rates: internal pairs of S over internal pairs of
/// E ∪ S. A pair of S that is also a friendship counts in both.
pub fn similarity_rate(clustering: &ClusterSet, w: &AugmentedAdjacency) -> Vec<SimilarityRate> {
    let mut rates = vec![
        SimilarityRate {
            augmented: 0,
            internal: 0
        };
        clustering.len()
    ];
    for i in 0..w.n() {
        let ci = clustering.assignment[i];
        for &(j, _) in w.row(i) {
            let j = j as usize;
            if j > i && clustering.assignment[j] == ci {
                rates[ci].internal += 1;
            }
        }
    }
    for &(a, b) in w.augmented_pairs() {
        let ca = clustering.assignment[a as usize];
        if ca == clustering.assignment[b as usize] {
            rates[ca].augmented += 1;
        }
    }
    rates
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub k: usize,
    pub augmented_pairs: usize,
    pub cluster_count: usize,
    pub cluster_sizes: Vec<usize>,
    pub similarity_rates: Vec<f64>,
    pub converged: bool,
}

/// Augments and clusters `graph` once per alpha.
pub fn alpha_sweep(graph: &SocialGraph, alphas: &[f64], mcl: &MclParams) -> Result<Vec<SweepRow>> {
    alpha_sweep_with(graph, alphas, mcl, PairStrategy::Auto)
}

pub fn alpha_sweep_with(
    graph: &SocialGraph,
    alphas: &[f64],
    mcl: &MclParams,
    strategy: PairStrategy,
) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(Error::InvalidParam("at least one alpha is required".into()));
    }
    mcl.validate()?;
    alphas
        .iter()
        .map(|&alpha| {
            let w = augment_by_alpha(graph, alpha, strategy)?;
            let clustering = run_mcl(&w, mcl)?;
            Ok(SweepRow {
                alpha,
                k: compute_k(alpha, graph.edge_count()),
                augmented_pairs: w.augmented_pairs().len(),
                cluster_count: clustering.len(),
                cluster_sizes: clustering.sizes(),
                similarity_rates: similarity_rate(&clustering, &w)
                    .iter()
                    .map(SimilarityRate::value)
                    .collect(),
                converged: clustering.converged,
            })
        })
        .collect()
}

/// `alpha,k,augmented_pairs,cluster_count,cluster_sizes,similarity_rates,converged`
/// with list columns joined by `;`.
pub fn write_sweep_csv(rows: &[SweepRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "alpha,k,augmented_pairs,cluster_count,cluster_sizes,similarity_rates,converged"
    )?;
    for r in rows {
        let sizes: Vec<String> = r.cluster_sizes.iter().map(usize::to_string).collect();
        let rates: Vec<String> = r.similarity_rates.iter().map(|x| format!("{x:.6}")).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.alpha,
            r.k,
            r.augmented_pairs,
            r.cluster_count,
            sizes.join(";"),
            rates.join(";"),
            r.converged
        )?;
    }
    Ok(())
}
