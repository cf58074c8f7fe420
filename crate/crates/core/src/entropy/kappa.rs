//! Closed-vertex neighbour fractions forced by a density and a conditional
//! degree.
//!
//! Counting open neighbours over all half-edges of the root's star in two
//! ways fixes the mean open fraction `kappa` around closed vertices.

use crate::error::{Error, Result};

fn check_unit(kappa: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&kappa) {
        Ok(kappa)
    } else {
        Err(Error::InconsistentParameters(format!(
            "{what} = {kappa} lies outside [0, 1]"
        )))
    }
}

/// Sparse regime: open density `epsilon`, open vertices have on average
/// `2 + delta` open neighbours. Returns the expected open fraction among the
/// neighbours of a closed vertex,
/// `kappa = (d - 2 - delta) * epsilon / (d * (1 - epsilon))`.
pub fn kappa_sparse(epsilon: f64, delta: f64, d: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    if d < 2 {
        return Err(Error::invalid("degree must be at least 2"));
    }
    let df = d as f64;
    if !(0.0..=df - 2.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in [0, d - 2]"
        )));
    }
    check_unit(
        (df - 2.0 - delta) * epsilon / (df * (1.0 - epsilon)),
        "kappa",
    )
}

/// Dense regime: closed density `epsilon`, open vertices miss on average a
/// `delta` fraction of their neighbours. Returns the expected closed fraction
/// among the neighbours of a closed vertex, `kappa = 1 + delta - delta / epsilon`.
pub fn kappa_dense(epsilon: f64, delta: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in [0, 1]"
        )));
    }
    check_unit(1.0 + delta - delta / epsilon, "kappa")
}

/// `d*eps - (eps*(2 + delta) + (1 - eps)*d*kappa)`; zero when `kappa` is
/// consistent with the sparse counting identity.
pub fn sparse_bookkeeping_residual(epsilon: f64, delta: f64, d: usize, kappa: f64) -> f64 {
    let df = d as f64;
    df * epsilon - (epsilon * (2.0 + delta) + (1.0 - epsilon) * df * kappa)
}

/// `d*eps - ((1 - eps)*d*delta + eps*d*kappa)`; zero when `kappa` is
/// consistent with the dense counting identity.
pub fn dense_bookkeeping_residual(epsilon: f64, delta: f64, d: usize, kappa: f64) -> f64 {
    let df = d as f64;
    df * epsilon - ((1.0 - epsilon) * df * delta + epsilon * df * kappa)
}
