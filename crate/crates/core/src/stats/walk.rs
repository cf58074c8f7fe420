use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiid::{Configuration, Symbol};
use crate::graph::Graph;
use crate::rng::{stream, Domain};

/// Number of batches used for the batch-means standard error.
pub const BATCHES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkSample {
    pub symbol: Symbol,
    /// `steps + 1` positions, starting at the start vertex.
    pub trajectory: Vec<u32>,
    /// Steps on which the proposed target lacked the symbol.
    pub holding: usize,
}

/// Delayed simple random walk on the clusters of `symbol`: each step picks
/// one of the current vertex's half-edges uniformly and moves along it only
/// if the target carries the symbol. On a regular graph the uniform measure
/// on each cluster is stationary.
pub fn delayed_srw(
    g: &Graph,
    c: &Configuration,
    symbol: Symbol,
    start: usize,
    steps: usize,
    seed: u64,
) -> Result<WalkSample> {
    if start >= g.n() {
        return Err(Error::invalid(format!("start vertex {start} out of range")));
    }
    if c.symbols[start] != symbol {
        return Err(Error::NotInSupport(start));
    }
    let mut rng = stream(seed, Domain::Walk, start as u64);
    let mut trajectory = Vec::with_capacity(steps + 1);
    let mut x = start;
    let mut holding = 0;
    trajectory.push(x as u32);
    for _ in 0..steps {
        let slots = g.slots(x);
        if slots.is_empty() {
            holding += 1;
        } else {
            let y = g.slot_target(rng.random_range(slots));
            if c.symbols[y] == symbol {
                x = y;
            } else {
                holding += 1;
            }
        }
        trajectory.push(x as u32);
    }
    Ok(WalkSample {
        symbol,
        trajectory,
        holding,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffAverage {
    /// Mean of `1[colour(X_k) = target]` over `k <= n`, for every `n`.
    pub running_mean: Vec<f64>,
    pub final_mean: f64,
    /// Batch-means standard error over [`BATCHES`] consecutive blocks; it
    /// absorbs the autocorrelation of the walk as long as a block is much
    /// longer than the mixing time.
    pub stderr: f64,
}

/// Time averages of the indicator that the walk sits on colour `target`.
pub fn birkhoff_average(
    w: &WalkSample,
    colouring: &Configuration,
    target: Symbol,
) -> Result<BirkhoffAverage> {
    if w.trajectory.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut values = Vec::with_capacity(w.trajectory.len());
    for &x in &w.trajectory {
        let s = colouring
            .symbols
            .get(x as usize)
            .ok_or(Error::UndefinedColour { vertex: x as usize })?;
        values.push(f64::from(u8::from(*s == target)));
    }
    let mut running_mean = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        running_mean.push(sum / (i + 1) as f64);
    }
    let final_mean = sum / values.len() as f64;
    Ok(BirkhoffAverage {
        running_mean,
        final_mean,
        stderr: batch_means_stderr(&values, BATCHES),
    })
}

pub fn batch_means_stderr(values: &[f64], batches: usize) -> f64 {
    let len = values.len() / batches;
    if len == 0 || batches < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = values
        .chunks_exact(len)
        .take(batches)
        .map(|b| b.iter().sum::<f64>() / len as f64)
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiid::BlockFactor;
    use crate::graph::{complete_graph, cycle_graph};

    fn config(symbols: Vec<Symbol>) -> Configuration {
        Configuration {
            symbols,
            factor: BlockFactor::new("two_colour_threshold", &[]).unwrap(),
            label_seed: 0,
        }
    }

    #[test]
    fn isolated_vertex_holds() {
        let g = cycle_graph(5);
        let w = delayed_srw(&g, &config(vec![0, 1, 0, 0, 0]), 1, 1, 100, 3).unwrap();
        assert!(w.trajectory.iter().all(|&x| x == 1));
        assert_eq!(w.holding, 100);
    }

    #[test]
    fn start_must_carry_symbol() {
        let g = cycle_graph(5);
        assert!(matches!(
            delayed_srw(&g, &config(vec![0; 5]), 1, 2, 10, 0),
            Err(Error::NotInSupport(2))
        ));
    }

    #[test]
    fn moves_follow_edges() {
        let g = complete_graph(6);
        let c = config(vec![1, 1, 0, 1, 1, 0]);
        let w = delayed_srw(&g, &c, 1, 0, 2000, 9).unwrap();
        for p in w.trajectory.windows(2) {
            assert!(p[0] == p[1] || g.neighbours(p[0] as usize).contains(&p[1]));
            assert_eq!(c.symbols[p[1] as usize], 1);
        }
    }

    #[test]
    fn constant_colouring_and_triangle() {
        let g = cycle_graph(3);
        let all = config(vec![1; 3]);
        let w = delayed_srw(&g, &all, 1, 0, 60_000, 1).unwrap();
        let b = birkhoff_average(&w, &all, 1).unwrap();
        assert!(b.running_mean.iter().all(|&m| m == 1.0));
        let one = config(vec![1, 0, 0]);
        let b = birkhoff_average(&w, &one, 1).unwrap();
        assert!((b.final_mean - 1.0 / 3.0).abs() < 4.0 * b.stderr, "{b:?}");
    }

    #[test]
    fn undefined_colour() {
        let g = cycle_graph(4);
        let w = delayed_srw(&g, &config(vec![1; 4]), 1, 3, 5, 0).unwrap();
        let short = config(vec![1; 2]);
        assert!(matches!(
            birkhoff_average(&w, &short, 1),
            Err(Error::UndefinedColour { vertex: 3 })
        ));
    }
}
