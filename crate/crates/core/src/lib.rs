//! Profile-clone detection in social networks.
//!
//! A clone is a forged profile that copies a real user's attributes and
//! befriends that user's friends. Detection runs in two phases:
//!
//! - the friendship graph is augmented with edges between the most
//!   attribute-similar pairs and clustered with Markov Clustering, so that a
//!   victim's look-alikes land in its community;
//! - name-similar profiles in that community which share friends with the
//!   victim, without being its friends, are ranked by how weakly they are tied
//!   to the victim's circle and handed to a verifier in that order.
//!
//! ```
//! use cloneguard::{detect, eval, DetectionConfig, GroundTruthOracle};
//!
//! let (graph, clone) = eval::build_fixture20_with_clone().unwrap();
//! let oracle = GroundTruthOracle::new([clone]);
//! let report = detect(&graph, 35.into(), &DetectionConfig::default(), &oracle).unwrap();
//! assert_eq!(report.flagged().collect::<Vec<_>>(), vec![clone]);
//! ```

pub mod detect;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod mcl;
pub mod similarity;
pub mod strength;
pub mod weights;

pub use detect::{
    detect, DetectionConfig, Detector, GroundTruthOracle, StochasticOracle, StopPolicy, SuspectReport, Verdict,
    VerificationOracle,
};
pub use error::{Error, Result};
pub use graph::{Attribute, AttributeProfile, GraphBuilder, NodeId, SocialGraph, ValidationReport};
pub use io::{load_graph, save_csv_dir, save_json, LoadOptions};
pub use mcl::{run_mcl, ClusterSet, MclParams};
pub use similarity::{augment, augment_by_alpha, compute_k, profile_similarity, PairStrategy};
pub use strength::{strength_of_relationship, SrScore};
pub use weights::{weigh_graph, EdgeWeight, WeightedEdgeSet};

/// The guide's snippets run as doc-tests so they stay in sync with the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graph.md")]
    mod graph {}
    #[doc = include_str!("../../../book/src/augmentation.md")]
    mod augmentation {}
    #[doc = include_str!("../../../book/src/clustering.md")]
    mod clustering {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/strength.md")]
    mod strength {}
    #[doc = include_str!("../../../book/src/detection.md")]
    mod detection {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
