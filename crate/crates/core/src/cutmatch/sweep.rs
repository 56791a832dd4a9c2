//! Sweep cut over the projected walk values.

use num_traits::Float;

use crate::error::{internal, Result};

/// Source side `A^ℓ`, target side `A^r` and separation value `η`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCut<T> {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub eta: T,
}

/// Indices of the sweep-cut properties, reported by [`check_sweep_cut`].
pub mod property {
    /// `η` separates the two sides and they are disjoint subsets of `A`.
    pub const SEPARATED: u8 = 1;
    /// `|A^r| ≥ |A|/2` and `|A^ℓ| ≤ ⌈|A|/8⌉`.
    pub const SIZES: u8 = 2;
    /// `(u_i − η)² ≥ u_i²/9` on `A^ℓ`.
    pub const FAR_FROM_ETA: u8 = 3;
    /// `Σ_{A^ℓ} u_i² ≥ (1/80) Σ_A u_i²`.
    pub const MASS: u8 = 4;
}

/// Checks the four sweep-cut properties and returns the violated indices.
pub fn check_sweep_cut<T: Float>(active: &[usize], u: &[T], cut: &SweepCut<T>) -> Vec<u8> {
    use property::*;
    let mut bad = Vec::new();
    let n = u.len();
    let mut in_a = vec![false; n];
    for &i in active {
        in_a[i] = true;
    }
    let mut seen = vec![0u8; n];
    for &i in &cut.left {
        seen[i] |= 1;
    }
    for &i in &cut.right {
        seen[i] |= 2;
    }
    let disjoint = cut.left.iter().chain(&cut.right).all(|&i| in_a[i] && seen[i] != 3);
    let lmax = cut.left.iter().map(|&i| u[i]).fold(T::neg_infinity(), T::max);
    let lmin = cut.left.iter().map(|&i| u[i]).fold(T::infinity(), T::min);
    let rmax = cut.right.iter().map(|&i| u[i]).fold(T::neg_infinity(), T::max);
    let rmin = cut.right.iter().map(|&i| u[i]).fold(T::infinity(), T::min);
    let below = lmax <= cut.eta && cut.eta <= rmin;
    let above = lmin >= cut.eta && cut.eta >= rmax;
    if !disjoint || !(below || above) {
        bad.push(SEPARATED);
    }
    let a = active.len();
    if 2 * cut.right.len() < a || cut.left.len() > a.div_ceil(8) {
        bad.push(SIZES);
    }
    let nine = T::from(9.0).unwrap();
    if cut.left.iter().any(|&i| nine * (u[i] - cut.eta).powi(2) < u[i].powi(2)) {
        bad.push(FAR_FROM_ETA);
    }
    let total = active.iter().fold(T::zero(), |s, &i| s + u[i] * u[i]);
    let left = cut.left.iter().fold(T::zero(), |s, &i| s + u[i] * u[i]);
    if T::from(80.0).unwrap() * left < total {
        bad.push(MASS);
    }
    bad
}

/// One orientation of the construction: `o = +1` puts the largest values into `A^r`.
fn orient<T: Float>(active: &[usize], u: &[T], flip: bool) -> SweepCut<T> {
    let key = |i: usize| if flip { -u[i] } else { u[i] };
    let mut order: Vec<usize> = active.to_vec();
    order.sort_by(|&a, &b| key(b).partial_cmp(&key(a)).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let a = order.len();
    let r_len = a.div_ceil(2);
    let right: Vec<usize> = order[..r_len].to_vec();
    let eta = u[right[r_len - 1]];
    let nine = T::from(9.0).unwrap();
    let mut pool: Vec<usize> = order[r_len..]
        .iter()
        .copied()
        .filter(|&i| nine * (u[i] - eta).powi(2) >= u[i].powi(2))
        .collect();
    pool.sort_by(|&x, &y| {
        (u[y] * u[y]).partial_cmp(&(u[x] * u[x])).unwrap_or(std::cmp::Ordering::Equal).then(x.cmp(&y))
    });
    pool.truncate(a.div_ceil(8));
    let mut left = pool;
    left.sort_unstable();
    let mut right = right;
    right.sort_unstable();
    SweepCut { left, right, eta }
}

/// Splits `A` into a small, heavy source side `A^ℓ` and a large target side `A^r`.
///
/// `A^r` is the upper half of `A` by value and `η` its smallest value; `A^ℓ` holds the
/// up to `⌈|A|/8⌉` largest-magnitude entries below `η` that are not close to `η`.
/// If this orientation lacks the required mass the mirrored one is used. Both failing
/// is reported as an internal error.
pub fn sweep_cut<T: Float>(active: &[usize], u: &[T]) -> Result<SweepCut<T>> {
    if active.len() < 2 {
        return Err(crate::error::Error::State(format!(
            "sweep cut needs at least two active units, got {}",
            active.len()
        )));
    }
    let mut last = Vec::new();
    for flip in [false, true] {
        let cut = orient(active, u, flip);
        last = check_sweep_cut(active, u, &cut);
        if last.is_empty() {
            return Ok(cut);
        }
    }
    internal(format!("sweep cut violates properties {last:?} in both orientations"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outlier_lands_on_the_source_side() {
        let u = [-7.0f64, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let a: Vec<usize> = (0..8).collect();
        let cut = sweep_cut(&a, &u).unwrap();
        assert_eq!(cut.left, vec![0]);
        assert!(check_sweep_cut(&a, &u, &cut).is_empty());
    }

    #[test]
    fn symmetric_pattern() {
        let u = [2.0f64, -2.0, 2.0, -2.0, 2.0, -2.0];
        let a: Vec<usize> = (0..6).collect();
        let cut = sweep_cut(&a, &u).unwrap();
        assert!(check_sweep_cut(&a, &u, &cut).is_empty());
        assert_eq!(cut.left.len(), 1);
    }

    #[test]
    fn two_units() {
        let u = [3.0f64, -3.0];
        let cut = sweep_cut(&[0, 1], &u).unwrap();
        assert_eq!(cut.left.len(), 1);
        assert_eq!(cut.right.len(), 1);
        assert!(check_sweep_cut(&[0, 1], &u, &cut).is_empty());
    }

    #[test]
    fn inactive_units_are_ignored() {
        let u = [0.0f32, 5.0, -1.0, -4.0];
        let a = [1usize, 2, 3];
        let cut = sweep_cut(&a, &u).unwrap();
        assert!(!cut.left.contains(&0) && !cut.right.contains(&0));
        assert!(check_sweep_cut(&a, &u, &cut).is_empty());
    }

    #[test]
    fn too_few_units_is_a_state_error() {
        assert!(sweep_cut(&[0], &[0.0f64]).is_err());
    }
}
