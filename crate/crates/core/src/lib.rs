#![allow(clippy::manual_is_multiple_of)]

//! Circulant graphs, their canonical double covers, and graph stability.
//!
//! The crate constructs circulants and graph products, computes full
//! automorphism groups by partition refinement with individualization
//! backtracking, decides stability by three independent criteria, and runs
//! exhaustive desk-scale verification sweeps over all connection sets of a
//! given order. A `u128` bit row per vertex caps graphs at 128 vertices,
//! which comfortably covers double covers of every order the sweeps visit.
//!
//! Organization:
//! - [`graph`]: [`Graph`], [`ConnectionSet`], [`Partition`], constructions
//!   (circulant, double cover, wreath and deleted wreath products, quotient)
//!   and structural predicates.
//! - [`perm`] and [`group`]: permutation arithmetic and a deterministic
//!   Schreier-Sims engine ([`PermGroup`]) for order, membership, stabilizers,
//!   orbits, centrality and normality.
//! - [`aut`]: the automorphism-group search plus a factorial-time oracle for
//!   cross-checking on up to 8 vertices.
//! - [`stability`]: stability verdicts, the order / centrality / stabilizer
//!   criteria, strongly switching involutions and double-cover recognition.
//! - [`circulant_analysis`]: circulant-specific machinery (the k + 2S double
//!   cover formula, arc-transitivity, normality, wreath decompositions,
//!   lemma audits).
//! - [`sweep`]: connection-set enumeration, per-instance classification
//!   records, the main-theorem verification sweep and report writing.

pub mod aut;
pub mod circulant_analysis;
pub mod error;
pub mod graph;
pub mod group;
pub mod perm;
pub mod stability;
pub mod sweep;

pub use aut::{automorphism_group, equitable_refinement, naive_automorphisms};
pub use circulant_analysis::{
    connection_orbits, deleted_wreath_aut_check, double_cover_connection_set, is_arc_transitive,
    is_normal_circulant, key_lemma_audit, kovacs_li_diagnosis, normal_implies_stable_audit,
    reducible_decomposition, regular_cyclic_subgroup_census, subcirculant_audit, KeyLemmaCase,
    KovacsLiCase, KovacsLiDiagnosis,
};
pub use error::{Error, Result};
pub use graph::{
    bipartite_double_cover, circulant, deleted_wreath_product, find_isomorphism, quotient_graph,
    wreath_product, ConnectionSet, Graph, Partition, MAX_VERTICES,
};
pub use group::PermGroup;
pub use perm::Perm;
pub use stability::{
    classify, is_stable_by_order, is_stable_by_stabilizer, is_stable_by_tau_central,
    recover_base_graphs, strongly_switching_involutions, worthiness_check, Reason,
    StabilityVerdict, Status,
};
pub use sweep::{
    analyze_one, enumerate_connection_sets, run_sweep, run_sweep_with, summary_path,
    verify_main_theorem, AuditOutcome, ClassificationRecord, Parity, SweepOptions, SweepReport,
    TheoremReport,
};
