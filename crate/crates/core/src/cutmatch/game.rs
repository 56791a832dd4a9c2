//! The cut-matching game driver and the sparsest-cut approximation built on it.

use num_integer::Integer;
use num_traits::{Float, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::graph::{weight_of, Graph};
use crate::rational::{ceil_log2, rat, Rational};

use super::matching::{MatchingPlayer, MatchingRound};
use super::sweep::{sweep_cut, SweepCut};
use super::walk::{potential, walk_vector, DenseWalk, Matching, DENSE_MAX_UNITS};

/// Quality, balance and trim thresholds shared by the partitioning routines.
#[derive(Clone, Debug, PartialEq)]
pub struct CutParameters {
    /// `q* = max(⌈log₂ π(V)⌉, ⌈log₂(n)/125⌉)`, at least 1.
    pub q_star: u64,
    /// `β* = 1/(2 log₂ π(V))`.
    pub beta_star: f64,
    /// `τ* = 1/(440 q*)`, which never exceeds `β*`.
    pub tau_star: Rational,
}

impl CutParameters {
    pub fn new(total_weight: u128, n: usize) -> Self {
        let from_weight = ceil_log2(total_weight) as u64;
        let from_n = ((n.max(1) as f64).log2() / 125.0).ceil() as u64;
        let q_star = from_weight.max(from_n).max(1);
        let lg = (total_weight.max(2) as f64).log2();
        CutParameters { q_star, beta_star: 1.0 / (2.0 * lg), tau_star: rat(1, 440 * q_star as i128) }
    }
}

/// Slow-down `δ`: the largest power of two at most `max(2, ⌊3 ln k / (2 ln 20)⌋)`.
pub fn slowdown(k: usize) -> usize {
    let raw = (3.0 * (k.max(1) as f64).ln() / (2.0 * 20f64.ln())).floor() as usize;
    let cap = raw.max(2);
    1 << (usize::BITS - 1 - cap.leading_zeros())
}

/// Round budget `T = ⌈C_T (log₂ k)²⌉`.
pub fn round_budget(k: usize, round_constant: f64) -> usize {
    let lg = (k.max(2) as f64).log2();
    (round_constant * lg * lg).ceil() as usize
}

/// Tunables of the game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig {
    /// `C_T` in the round budget.
    pub round_constant: f64,
    pub seed: u64,
    /// Record the potential after every round (costly; uses a dense flow matrix).
    pub track_potential: bool,
    /// Stop once the recorded potential falls below `1/k³`.
    pub stop_on_potential: bool,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { round_constant: 10.0, seed: 0, track_potential: false, stop_on_potential: false }
    }
}

/// Per-round record, serialised one JSON object per line by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTrace {
    pub round: usize,
    pub active: usize,
    pub deleted: usize,
    pub source_side: usize,
    pub target_side: usize,
    pub matching: usize,
    /// Largest cumulative embedding load relative to capacity.
    pub max_load: f64,
    pub potential: Option<f64>,
}

/// Cut-player step: `u = W r` for a random unit `r`, then a sweep cut.
pub fn cut_player_step<T: Float, R: rand::Rng + ?Sized>(
    matchings: &[Matching],
    active: &[bool],
    delta: usize,
    rng: &mut R,
) -> Result<(Vec<T>, SweepCut<T>)> {
    let units: Vec<usize> = (0..active.len()).filter(|&i| active[i]).collect();
    if units.len() < 2 {
        return Err(Error::State(format!("cut player needs two active units, got {}", units.len())));
    }
    let u: Vec<T> = walk_vector(matchings, active, delta, rng);
    let sum = units.iter().fold(T::zero(), |s, &i| s + u[i]);
    let big = units.iter().fold(T::zero(), |m, &i| m.max(u[i].abs()));
    let tol = T::from(1e-9).unwrap().max(T::epsilon() * T::from(1e3).unwrap());
    debug_assert!(
        sum.abs() <= tol * T::from(units.len()).unwrap() * big,
        "walk vector is not orthogonal to the active indicator"
    );
    let cut = sweep_cut(&units, &u)?;
    Ok((u, cut))
}

/// State of one cut-matching game over the units of `π`.
pub struct CutMatchingGame<'g> {
    player: MatchingPlayer<'g>,
    active: Vec<bool>,
    matchings: Vec<Matching>,
    delta: usize,
    budget: usize,
    rng: ChaCha8Rng,
    config: GameConfig,
    dense: Option<DenseWalk<f64>>,
    stopped: bool,
    last_sweep_sizes_ok: bool,
    trace: Vec<RoundTrace>,
}

impl<'g> CutMatchingGame<'g> {
    /// Sets up a game with matching-player parameter `c` over `k = π(V)` units.
    pub fn new(g: &'g Graph, pi: &[u64], c: u64, config: GameConfig) -> Result<Self> {
        if pi.len() != g.n() {
            return arg(format!("weights have {} entries for {} vertices", pi.len(), g.n()));
        }
        let player = MatchingPlayer::new(g, pi, c);
        let k = player.theta().k();
        let delta = slowdown(k);
        let dense = if config.track_potential {
            if k > DENSE_MAX_UNITS {
                return Err(Error::Refused(format!("potential tracking over {k} units")));
            }
            Some(DenseWalk::new(k, delta)?)
        } else {
            None
        };
        Ok(CutMatchingGame {
            player,
            active: vec![true; k],
            matchings: Vec::new(),
            delta,
            budget: round_budget(k, config.round_constant),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            dense,
            stopped: false,
            last_sweep_sizes_ok: true,
            trace: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.active.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    pub fn player(&self) -> &MatchingPlayer<'g> {
        &self.player
    }

    pub fn trace(&self) -> &[RoundTrace] {
        &self.trace
    }

    pub fn is_finished(&self) -> bool {
        self.stopped || self.matchings.len() >= self.budget || self.active_count() < 2
    }

    /// Whether the last sweep cut met `|A^ℓ| ≤ |A|/8` and `|A^r| ≥ |A|/2` without rounding,
    /// which the survivor bound `|A∖D| ≥ |A|/5` relies on.
    pub fn last_sweep_sizes_ok(&self) -> bool {
        self.last_sweep_sizes_ok
    }

    /// Current potential, from the dense tracker when enabled and otherwise column by column.
    pub fn potential(&self) -> Result<f64> {
        match &self.dense {
            Some(d) => Ok(d.potential(&self.active)),
            None => potential(&self.matchings, &self.active, self.delta),
        }
    }

    /// Plays one round. Returns `None` once the game is over.
    pub fn step(&mut self) -> Result<Option<(RoundTrace, MatchingRound)>> {
        if self.is_finished() {
            return Ok(None);
        }
        let k = self.k();
        let before = self.active_count();
        let (_, cut) = cut_player_step::<f64, _>(&self.matchings, &self.active, self.delta, &mut self.rng)?;
        let units = self.active_count();
        self.last_sweep_sizes_ok = 8 * cut.left.len() <= units && 2 * cut.right.len() >= units;
        let round = self.player.step(&self.active, &cut.left, &cut.right)?;
        for &i in &round.deleted {
            self.active[i] = false;
        }
        if let Some(d) = &mut self.dense {
            d.push(&round.matching);
        }
        self.matchings.push(round.matching.clone());
        let after = self.active_count();
        let pot = if self.dense.is_some() { Some(self.potential()?) } else { None };
        let lg = (k as f64).log2();
        if (after as f64) < (1.0 - 1.0 / (2.0 * lg)) * k as f64 {
            self.stopped = true;
        }
        if self.config.stop_on_potential {
            if let Some(p) = pot {
                if p <= 1.0 / (k as f64).powi(3) {
                    self.stopped = true;
                }
            }
        }
        let tr = RoundTrace {
            round: self.matchings.len(),
            active: after,
            deleted: before - after,
            source_side: cut.left.len(),
            target_side: cut.right.len(),
            matching: round.matching.len(),
            max_load: self.player.max_relative_load(),
            potential: pot,
        };
        self.trace.push(tr.clone());
        Ok(Some((tr, round)))
    }

    /// Plays until the game is over.
    pub fn run(&mut self) -> Result<()> {
        while self.step()?.is_some() {}
        Ok(())
    }
}

/// Result of [`sparsest_cut_apx`].
#[derive(Clone, Debug)]
pub struct SparsestCutOutcome {
    /// The returned side `R` (the lighter of the inactive set and its complement).
    pub cut: Vec<usize>,
    pub rounds: usize,
    /// Whether the deletion rule ended the game early.
    pub balanced_stop: bool,
    pub final_active: usize,
    pub k: usize,
    pub c: u64,
    pub trace: Vec<RoundTrace>,
}

/// `c = ⌈10/φ⌉`.
pub fn sparsity_parameter(phi: &Rational) -> Result<u64> {
    if *phi <= Rational::zero() || *phi >= Rational::one() {
        return arg(format!("sparsity target {phi} is outside (0, 1)"));
    }
    let q = rat(10, 1) / phi;
    Ok(q.numer().div_ceil(q.denom()) as u64)
}

/// Approximate sparsest cut via the cut-matching game on `π(V)` units.
///
/// The returned `R` satisfies `cap(R, V∖R) ≤ φ·π(R)` and `π(R) ≤ π(V∖R)`; when it is
/// light, the rest of the graph is expanding with high probability.
pub fn sparsest_cut_apx(g: &Graph, pi: &[u64], phi: &Rational, config: GameConfig) -> Result<SparsestCutOutcome> {
    let total = weight_of(pi, &(0..g.n()).collect::<Vec<_>>());
    if total < 2 {
        return arg(format!("total weight {total} is below 2"));
    }
    let c = sparsity_parameter(phi)?;
    let mut game = CutMatchingGame::new(g, pi, c, config)?;
    game.run()?;
    let r = game.player().removed();
    let pi_r = weight_of(pi, &r);
    let cut = if 2 * pi_r <= total {
        r
    } else {
        crate::graph::difference(&(0..g.n()).collect::<Vec<_>>(), &r)
    };
    Ok(SparsestCutOutcome {
        cut,
        rounds: game.matchings().len(),
        balanced_stop: game.stopped,
        final_active: game.active_count(),
        k: game.k(),
        c,
        trace: game.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_values() {
        assert_eq!(slowdown(2), 2);
        assert_eq!(slowdown(64), 2);
        assert_eq!(slowdown(20usize.pow(4)), 4);
        assert_eq!(round_budget(16, 10.0), 160);
        let p = CutParameters::new(56, 8);
        assert_eq!(p.q_star, 6);
        assert_eq!(p.tau_star, rat(1, 2640));
        assert!(crate::rational::to_f64(&p.tau_star) <= p.beta_star);
        assert_eq!(sparsity_parameter(&rat(1, 4)).unwrap(), 40);
        assert_eq!(sparsity_parameter(&rat(3, 7)).unwrap(), 24);
        assert!(sparsity_parameter(&rat(1, 1)).is_err());
    }

    #[test]
    fn fixed_seed_gives_golden_sweep() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let m: Vec<Matching> = vec![vec![]];
            cut_player_step::<f64, _>(&m, &[true; 8], 2, &mut rng).unwrap().1
        };
        let first = run();
        assert_eq!(first, run());
        assert_eq!(first.left, vec![6]);
        assert_eq!(first.right, vec![3, 4, 5, 7]);
    }

    #[test]
    fn round_zero_is_a_projection() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let active = vec![true; 6];
        let (u, _) = cut_player_step::<f64, _>(&[], &active, 2, &mut a).unwrap();
        let mut r: Vec<f64> = super::super::walk::random_unit_vector(6, &mut b);
        super::super::walk::apply_p(&mut r, &active);
        for (x, y) in u.iter().zip(&r) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn too_little_weight_is_rejected() {
        let g = Graph::new(2, [(0, 1, 1)]).unwrap();
        assert!(sparsest_cut_apx(&g, &[1, 0], &rat(1, 4), GameConfig::default()).is_err());
    }

    #[test]
    fn dumbbell_cut_is_sparse() {
        let mut e = Vec::new();
        for base in [0, 8] {
            for a in 0..8 {
                for b in a + 1..8 {
                    e.push((base + a, base + b, 1));
                }
            }
        }
        e.push((7, 8, 1));
        let g = Graph::new_connected(16, e).unwrap();
        let deg = g.degrees();
        let phi = rat(1, 4);
        let out = sparsest_cut_apx(&g, &deg, &phi, GameConfig { seed: 1, ..Default::default() }).unwrap();
        let all: Vec<usize> = (0..16).collect();
        let cap = crate::graph::boundary_capacity(&g, &out.cut, &all).unwrap();
        assert!(Rational::from_integer(cap as i128) <= phi * Rational::from_integer(weight_of(&deg, &out.cut) as i128));
    }
}
