//! Hierarchical congestion approximators (tree cut sparsifiers) for undirected
//! capacitated graphs.
//!
//! The construction combines exact fair cuts, a vertex-weighted cut-matching game
//! that approximates sparse cuts, and recursive cluster partitioning. Exhaustive
//! oracles in [`oracle`] verify the guarantees on small inputs.
//!
//! Combinatorial quantities are exact: capacities are integers and thresholds are
//! [`Rational`]. The random-walk cut player is generic over the float type; the
//! aliases below fix it to `f32` or `f64`.
//!
//! ```
//! use treecut::generators::diamond;
//! use treecut::{construct_hierarchy, opt_congestion, predict_congestion, to_tree_sparsifier, HierarchyConfig};
//!
//! let g = diamond(3)?.graph;
//! let h = construct_hierarchy(&g, &HierarchyConfig { seed: 1, ..Default::default() })?;
//! let tree = to_tree_sparsifier(&h, &g)?;
//! let mut d = vec![0i64; g.n()];
//! d[0] = 4;
//! d[1] = -4;
//! assert!(predict_congestion(&tree, &d)? <= opt_congestion(&g, &d)?);
//! # Ok::<(), treecut::Error>(())
//! ```

pub mod cutmatch;
pub mod error;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod hierarchy;
pub mod io;
pub mod oracle;
pub mod partition;
pub mod rational;

pub use cutmatch::{sparsest_cut_apx, CutMatchingGame, CutParameters, GameConfig, SparsestCutOutcome};
pub use error::{Error, Result};
pub use flow::{fair_cut, max_flow, opt_congestion, path_decomposition, verify_fair_cut, FairCutResult, FlowAssignment};
pub use graph::{Graph, Partition, VertexWeights};
pub use hierarchy::{
    certify_well_expanding, construct_hierarchy, predict_congestion, quality_ratio, to_tree_sparsifier,
    HierarchicalDecomposition, HierarchyConfig, TreeSparsifier,
};
pub use partition::{check_border_routable, partition_cluster, two_way_trim, PartitionClusterResult, TrimResult};
pub use rational::Rational;

pub type DenseMatrixF32 = cutmatch::DenseMatrix<f32>;
pub type DenseMatrixF64 = cutmatch::DenseMatrix<f64>;
pub type DenseWalkF32 = cutmatch::DenseWalk<f32>;
pub type DenseWalkF64 = cutmatch::DenseWalk<f64>;
pub type SweepCutF32 = cutmatch::SweepCut<f32>;
pub type SweepCutF64 = cutmatch::SweepCut<f64>;
