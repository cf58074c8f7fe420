use super::{is_connected, Graph};
use crate::error::{Error, Result};
use crate::rng::{child_seed, unit};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralGap {
    /// Second-largest adjacency eigenvalue.
    pub lambda2: f64,
    /// `(d - lambda2) / 2`, a lower bound on the edge Cheeger constant.
    pub cheeger_lower_bound: f64,
    pub iterations: usize,
}

/// Second adjacency eigenvalue of a connected regular graph.
///
/// Power iteration on `A + dI` (which is positive semidefinite, so the
/// dominant eigenvalue is the algebraically largest one) restricted to the
/// complement of the constant vector. Stops when successive Rayleigh
/// quotients differ by less than `tol`.
pub fn spectral_gap(g: &Graph, tol: f64, max_iters: usize) -> Result<SpectralGap> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::invalid("tol must be positive"));
    }
    let d = g
        .regular_degree()
        .ok_or_else(|| Error::invalid("spectral gap needs a regular graph"))? as f64;
    let n = g.n();
    if n < 2 {
        return Err(Error::invalid("need at least 2 vertices"));
    }
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let mut x: Vec<f64> = (0..n as u64)
        .map(|i| unit(child_seed(0x5EED, i)) - 0.5)
        .collect();
    deflate_and_normalise(&mut x);
    let mut y = vec![0.0; n];
    let mut previous = f64::NAN;
    for it in 1..=max_iters {
        multiply(g, &x, &mut y);
        let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += d * xi;
        }
        std::mem::swap(&mut x, &mut y);
        deflate_and_normalise(&mut x);
        if (rayleigh - previous).abs() < tol {
            return Ok(SpectralGap {
                lambda2: rayleigh,
                cheeger_lower_bound: (d - rayleigh) / 2.0,
                iterations: it,
            });
        }
        previous = rayleigh;
    }
    Err(Error::NonConvergence {
        iterations: max_iters,
        best: previous,
    })
}

fn multiply(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        *o = g.neighbours(v).iter().map(|&w| x[w as usize]).sum();
    }
}

fn deflate_and_normalise(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, petersen_graph};

    #[test]
    fn k4_bound_is_two() {
        let s = spectral_gap(&complete_graph(4), 1e-12, 1000).unwrap();
        assert!((s.lambda2 + 1.0).abs() < 1e-12);
        assert!((s.cheeger_lower_bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_matches_closed_form() {
        for n in [5usize, 8, 12, 17] {
            let s = spectral_gap(&cycle_graph(n), 1e-14, 100_000).unwrap();
            let exact = 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
            assert!(
                (s.lambda2 - exact).abs() < 1e-6,
                "n={n}: {} vs {exact}",
                s.lambda2
            );
        }
    }

    #[test]
    fn petersen_second_eigenvalue_is_one() {
        let s = spectral_gap(&petersen_graph(), 1e-14, 10_000).unwrap();
        assert!((s.lambda2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let g = Graph::from_edges(6, vec![[0, 1], [1, 2], [2, 0], [3, 4], [4, 5], [5, 3]]).unwrap();
        assert!(matches!(
            spectral_gap(&g, 1e-9, 100),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn iteration_budget_is_enforced() {
        assert!(matches!(
            spectral_gap(&cycle_graph(200), 1e-15, 3),
            Err(Error::NonConvergence { iterations: 3, .. })
        ));
    }
}
