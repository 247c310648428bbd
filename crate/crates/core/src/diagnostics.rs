//! Seeded Monte Carlo estimates over the uniform hypercube: means, L² errors
//! and the ridge-approximation floor.
//!
//! Points are drawn in fixed-size chunks, chunk `k` from RNG stream `k`, so
//! results do not depend on the thread count.

use rand::Rng;

use crate::density::RidgeDirection;
use crate::error::Result;
use crate::nearridge::{hit_and_run_step, mean_and_std_error, stream_rng};
use crate::par;

const CHUNK: usize = 1024;

fn uniform_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// `g` applied to `n` seeded uniform points of `[-1,1]^dim`, in draw order.
pub fn map_uniform<T, G>(dim: usize, n: usize, seed: u64, g: G) -> Vec<T>
where
    T: Send,
    G: Fn(&[f64]) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    par::map_range(chunks, |k| {
        let mut rng = stream_rng(seed, k as u64);
        let len = CHUNK.min(n - k * CHUNK);
        (0..len)
            .map(|_| g(&uniform_point(&mut rng, dim)))
            .collect::<Vec<T>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// The `n` seeded uniform points themselves.
pub fn uniform_points(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    map_uniform(dim, n, seed, |x| x.to_vec())
}

/// Sample mean of `f` and its standard error.
pub fn monte_carlo_mean<F>(f: F, dim: usize, n: usize, seed: u64) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    mean_and_std_error(&map_uniform(dim, n, seed, f))
}

/// Root-mean-square error and the same relative to the RMS of the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Error {
    pub absolute: f64,
    pub relative: f64,
}

impl L2Error {
    fn from_sums(squared_error: f64, squared_target: f64) -> Self {
        let absolute = squared_error.sqrt();
        Self {
            absolute,
            relative: absolute / squared_target.sqrt(),
        }
    }
}

/// Monte Carlo L² error of `approx` against `f` on `n` seeded points.
pub fn l2_error<F, A>(f: F, approx: A, dim: usize, n: usize, seed: u64) -> L2Error
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
    A: Fn(&[f64]) -> f64 + Sync + Send,
{
    let pairs = map_uniform(dim, n, seed, |x| {
        let y = f(x);
        ((y - approx(x)).powi(2), y * y)
    });
    let count = pairs.len() as f64;
    let err = pairs.iter().map(|p| p.0).sum::<f64>() / count;
    let target = pairs.iter().map(|p| p.1).sum::<f64>() / count;
    L2Error::from_sums(err, target)
}

/// Estimate of `‖f − E[f | aᵀx]‖`: the root of the mean slice variance, with
/// `inner` hit-and-run samples on the slice through each of `outer` uniform
/// points.
pub fn ridge_floor<F>(f: F, a: &RidgeDirection, outer: usize, inner: usize, seed: u64) -> Result<L2Error>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let per_point = par::try_map_range(outer, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let start = uniform_point(&mut rng, a.dim());
        let anchor = f(&start);
        let mut current = start;
        let mut values = Vec::with_capacity(inner);
        for _ in 0..inner {
            current = hit_and_run_step(a, &current, &mut rng)?;
            values.push(f(&current));
        }
        let (mean, _) = mean_and_std_error(&values);
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            / (values.len().max(2) - 1) as f64;
        Ok((var, anchor * anchor))
    })?;
    let count = per_point.len() as f64;
    let var = per_point.iter().map(|p| p.0).sum::<f64>() / count;
    let target = per_point.iter().map(|p| p.1).sum::<f64>() / count;
    Ok(L2Error::from_sums(var, target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_draws_are_reproducible() {
        let a = uniform_points(3, 2500, 4);
        assert_eq!(a, uniform_points(3, 2500, 4));
        assert_eq!(a.len(), 2500);
        assert_ne!(a, uniform_points(3, 2500, 5));
        assert!(a.iter().flatten().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn mean_of_square() {
        let (m, se) = monte_carlo_mean(|x| x[0] * x[0], 2, 100_000, 1);
        assert!((m - 1.0 / 3.0).abs() < 3.0 * se + 1e-12);
    }

    #[test]
    fn l2_error_of_perfect_fit_is_zero() {
        let e = l2_error(|x| x[0] + 2.0, |x| x[0] + 2.0, 4, 1000, 0);
        assert_eq!(e.absolute, 0.0);
        let e = l2_error(|_| 2.0, |_| 1.0, 4, 1000, 0);
        assert!((e.absolute - 1.0).abs() < 1e-15 && (e.relative - 0.5).abs() < 1e-15);
    }

    #[test]
    fn floor_of_exact_ridge_vanishes() {
        let a = RidgeDirection::ones(4).unwrap();
        let floor = ridge_floor(|x| a.project(x).sin(), &a, 50, 20, 3).unwrap();
        assert!(floor.absolute < 1e-12);
    }

    #[test]
    fn floor_of_orthogonal_term() {
        // f = x₂ with a = e₁: each slice is a full unit cube in x₂.
        let a = RidgeDirection::new(vec![1.0, 0.0]).unwrap();
        let floor = ridge_floor(|x| x[1], &a, 200, 100, 8).unwrap();
        assert!((floor.absolute - (1.0f64 / 3.0).sqrt()).abs() < 0.05);
    }
}
