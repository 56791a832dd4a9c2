//! Vertex-weighted cut-matching game: random-walk cut player, fair-cut matching
//! player and the sparsest-cut approximation driving them.

mod game;
mod matching;
pub mod sweep;
pub mod walk;

pub use game::{
    cut_player_step, round_budget, slowdown, sparsest_cut_apx, sparsity_parameter, CutMatchingGame,
    CutParameters, GameConfig, RoundTrace, SparsestCutOutcome,
};
pub use matching::{MatchingPlayer, MatchingRound, UnitMapping};
pub use sweep::{check_sweep_cut, sweep_cut, SweepCut};
pub use walk::{
    apply_n, apply_p, dense_flow_matrix, dense_walk_matrix, potential, DenseMatrix, DenseWalk, Matching,
};
