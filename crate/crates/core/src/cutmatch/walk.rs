//! Matrix-free random-walk operators of the cut player, generic over the float type.
//!
//! Units are `0..k`. A matching is a list of disjoint unit pairs; unmatched units
//! behave as self-loops.

use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Disjoint unit pairs matched in one round.
pub type Matching = Vec<(usize, usize)>;

/// Largest `k` accepted by the dense and column-by-column helpers.
pub const DENSE_MAX_UNITS: usize = 512;

fn cast<T: Float>(x: f64) -> T {
    T::from(x).expect("float conversion")
}

/// `x ← N x` with `N = I − (1/δ)(I_t − M_t)`: each matched pair is mixed with weight `1/δ`.
pub fn apply_n<T: Float>(x: &mut [T], m: &[(usize, usize)], delta: usize) {
    let w = T::one() / cast(delta as f64);
    let keep = T::one() - w;
    for &(i, j) in m {
        let (a, b) = (x[i], x[j]);
        x[i] = keep * a + w * b;
        x[j] = keep * b + w * a;
    }
}

/// `x ← P x` with `P = I_t − Q_t`: zero outside `A`, subtract the `A`-mean inside.
pub fn apply_p<T: Float>(x: &mut [T], active: &[bool]) {
    let mut sum = T::zero();
    let mut cnt = 0usize;
    for (xi, &a) in x.iter().zip(active) {
        if a {
            sum = sum + *xi;
            cnt += 1;
        }
    }
    let mean = if cnt == 0 { T::zero() } else { sum / cast(cnt as f64) };
    for (xi, &a) in x.iter_mut().zip(active) {
        *xi = if a { *xi - mean } else { T::zero() };
    }
}

/// `x ← F x` with `F = N_t ⋯ N_1 N_1 ⋯ N_t`.
pub fn apply_f<T: Float>(x: &mut [T], matchings: &[Matching], delta: usize) {
    for m in matchings.iter().rev() {
        apply_n(x, m, delta);
    }
    for m in matchings {
        apply_n(x, m, delta);
    }
}

/// `x ← W x` with `W = (P F P)^δ`.
pub fn apply_w<T: Float>(x: &mut [T], matchings: &[Matching], active: &[bool], delta: usize) {
    for _ in 0..delta {
        apply_p(x, active);
        apply_f(x, matchings, delta);
        apply_p(x, active);
    }
}

/// `k` standard Gaussians scaled to unit length.
pub fn random_unit_vector<T: Float, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<T> {
    let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| cast(if norm > 0.0 { x / norm } else { 0.0 })).collect()
}

/// The projection `u = W r` of the cut player for a random unit vector `r`.
pub fn walk_vector<T: Float, R: Rng + ?Sized>(
    matchings: &[Matching],
    active: &[bool],
    delta: usize,
    rng: &mut R,
) -> Vec<T> {
    let mut u = random_unit_vector(active.len(), rng);
    apply_w(&mut u, matchings, active, delta);
    // P is idempotent; a second pass removes the rounding drift of the first.
    apply_p(&mut u, active);
    u
}

fn refuse_dense(k: usize, limit: usize) -> Result<()> {
    if k > limit {
        return Err(Error::Refused(format!("{k} units exceed the dense limit of {limit}")));
    }
    Ok(())
}

/// Potential `Tr[W²] = Σ_i ‖W e_i‖²`, evaluated column by column.
pub fn potential<T: Float>(matchings: &[Matching], active: &[bool], delta: usize) -> Result<T> {
    let k = active.len();
    refuse_dense(k, DENSE_MAX_UNITS)?;
    let mut total = T::zero();
    let mut col = vec![T::zero(); k];
    for i in 0..k {
        if !active[i] {
            continue;
        }
        col.iter_mut().for_each(|c| *c = T::zero());
        col[i] = T::one();
        apply_w(&mut col, matchings, active, delta);
        total = total + col.iter().fold(T::zero(), |acc, &c| acc + c * c);
    }
    Ok(total)
}

/// Dense square matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    pub k: usize,
    pub data: Vec<T>,
}

impl<T: Float> DenseMatrix<T> {
    pub fn identity(k: usize) -> Self {
        let mut data = vec![T::zero(); k * k];
        for i in 0..k {
            data[i * k + i] = T::one();
        }
        DenseMatrix { k, data }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.k + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.k + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.k;
        let mut data = vec![T::zero(); k * k];
        for i in 0..k {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == T::zero() {
                    continue;
                }
                for j in 0..k {
                    data[i * k + j] = data[i * k + j] + a * other.data[l * k + j];
                }
            }
        }
        DenseMatrix { k, data }
    }

    /// `N M N` for a matching operator `N`, in `O(k²)`.
    pub fn conjugate_by_n(&mut self, m: &[(usize, usize)], delta: usize) {
        let k = self.k;
        let w = T::one() / cast(delta as f64);
        let keep = T::one() - w;
        for &(i, j) in m {
            for c in 0..k {
                let (a, b) = (self.data[i * k + c], self.data[j * k + c]);
                self.data[i * k + c] = keep * a + w * b;
                self.data[j * k + c] = keep * b + w * a;
            }
        }
        for &(i, j) in m {
            for r in 0..k {
                let (a, b) = (self.data[r * k + i], self.data[r * k + j]);
                self.data[r * k + i] = keep * a + w * b;
                self.data[r * k + j] = keep * b + w * a;
            }
        }
    }

    /// The matrix of the operator `N` for one matching.
    pub fn matching_operator(k: usize, m: &[(usize, usize)], delta: usize) -> Self {
        let mut out = Self::identity(k);
        let w = T::one() / cast(delta as f64);
        for &(i, j) in m {
            out.set(i, i, T::one() - w);
            out.set(j, j, T::one() - w);
            out.set(i, j, w);
            out.set(j, i, w);
        }
        out
    }

    /// `P A P` for the projection onto the mean-free part of `active`.
    pub fn project(&self, active: &[bool]) -> Self {
        let k = self.k;
        let mut cols = self.clone();
        for r in 0..k {
            apply_p(&mut cols.data[r * k..(r + 1) * k], active);
        }
        // Rows: apply P to each column.
        let mut out = cols.clone();
        let mut col = vec![T::zero(); k];
        for c in 0..k {
            for (r, x) in col.iter_mut().enumerate() {
                *x = cols.data[r * k + c];
            }
            apply_p(&mut col, active);
            for (r, &x) in col.iter().enumerate() {
                out.data[r * k + c] = x;
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// Explicit flow matrix `F_t = N_t F_{t−1} N_t` with `F_0 = I`.
pub fn dense_flow_matrix<T: Float>(k: usize, matchings: &[Matching], delta: usize) -> Result<DenseMatrix<T>> {
    refuse_dense(k, 256)?;
    let mut f = DenseMatrix::identity(k);
    for m in matchings {
        f.conjugate_by_n(m, delta);
    }
    Ok(f)
}

/// Dense walk matrix `W = (P F P)^δ`.
pub fn dense_walk_matrix<T: Float>(f: &DenseMatrix<T>, active: &[bool], delta: usize) -> DenseMatrix<T> {
    let pfp = f.project(active);
    let mut w = pfp.clone();
    for _ in 1..delta {
        w = w.mul(&pfp);
    }
    w
}

/// Incrementally maintained flow matrix, for cheap per-round potentials on moderate `k`.
#[derive(Clone, Debug)]
pub struct DenseWalk<T> {
    pub f: DenseMatrix<T>,
    pub delta: usize,
}

impl<T: Float> DenseWalk<T> {
    pub fn new(k: usize, delta: usize) -> Result<Self> {
        refuse_dense(k, DENSE_MAX_UNITS)?;
        Ok(DenseWalk { f: DenseMatrix::identity(k), delta })
    }

    pub fn push(&mut self, m: &[(usize, usize)]) {
        self.f.conjugate_by_n(m, self.delta);
    }

    /// `Tr[W²] = ‖W‖_F²` for the given active set.
    pub fn potential(&self, active: &[bool]) -> T {
        dense_walk_matrix(&self.f, active, self.delta).frobenius_sq()
    }
}
