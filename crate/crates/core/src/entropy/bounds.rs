use std::io::Write;

use serde::{Deserialize, Serialize};

use super::dist::h2;
use super::kappa::{kappa_dense, kappa_sparse};
use crate::error::{Error, Result};

/// Coarse grid size used before bisection.
pub const SCAN_POINTS: usize = 2000;
/// Smallest density considered by the sparse scan.
const SPARSE_FLOOR: f64 = 1e-300;
/// Bisection is abandoned after this many halvings.
const MAX_BISECTIONS: usize = 4000;

/// One evaluation of a finite entropy chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub epsilon: f64,
    pub delta: f64,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub feasible: bool,
    pub margin: f64,
}

impl FeasibilityResult {
    fn new(epsilon: f64, delta: f64, d: usize, gamma: Option<f64>, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        FeasibilityResult {
            epsilon,
            delta,
            d,
            gamma,
            lhs,
            rhs,
            feasible: margin >= 0.0,
            margin,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric record")
    }
}

/// Sparse chain for an open set of density `epsilon` whose vertices have
/// `2 + delta` open neighbours on average:
/// `(d - 2) h(eps) <= eps d + d h(kappa)`.
pub fn sit_feasible(epsilon: f64, delta: f64, d: usize) -> Result<FeasibilityResult> {
    let kappa = kappa_sparse(epsilon, delta, d)?;
    let df = d as f64;
    let lhs = (df - 2.0) * h2(epsilon);
    let rhs = epsilon * df + df * h2(kappa);
    Ok(FeasibilityResult::new(epsilon, delta, d, None, lhs, rhs))
}

/// Dense chain for a closed set of density `epsilon` in a process whose open
/// vertices miss a `delta` fraction of their neighbours, on a graph with
/// vertex expansion `gamma`: `gamma h(eps) <= d [(1 - eps) h(delta) + eps h(kappa)]`.
pub fn dense_feasible(epsilon: f64, delta: f64, gamma: f64, d: usize) -> Result<FeasibilityResult> {
    check_gamma(gamma)?;
    if d == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    let kappa = kappa_dense(epsilon, delta)?;
    let df = d as f64;
    let lhs = gamma * h2(epsilon);
    let rhs = df * ((1.0 - epsilon) * h2(delta) + epsilon * h2(kappa));
    Ok(FeasibilityResult::new(
        epsilon,
        delta,
        d,
        Some(gamma),
        lhs,
        rhs,
    ))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("gamma = {gamma} must be positive")))
    }
}

/// How a bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    /// Bisection on a bracketing sign change.
    Bracketed,
    /// The whole scanned domain is feasible.
    NoInfeasibleRegion,
    /// Nothing in the scanned domain is feasible.
    NoFeasibleRegion,
}

/// A sign change of the margin between two adjacent grid points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignChange {
    pub lo: f64,
    pub hi: f64,
    /// True when the margin goes from negative (at `lo`) to non-negative.
    pub to_feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub delta: f64,
    pub value: f64,
    pub status: BoundStatus,
    /// Final bisection bracket; degenerate when nothing was bracketed.
    pub bracket: (f64, f64),
    pub sign_changes: Vec<SignChange>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chain {
    Sparse,
    Dense,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub chain: Chain,
    pub d: usize,
    pub gamma: Option<f64>,
    pub tol: f64,
    pub points: Vec<BoundPoint>,
}

impl BoundCurve {
    pub fn sparse(d: usize, deltas: &[f64], tol: f64) -> Result<Self> {
        let points = deltas
            .iter()
            .map(|&delta| sit_bound(d, delta, tol))
            .collect::<Result<_>>()?;
        Ok(BoundCurve {
            chain: Chain::Sparse,
            d,
            gamma: None,
            tol,
            points,
        })
    }

    pub fn dense(d: usize, gamma: f64, deltas: &[f64], tol: f64) -> Result<Self> {
        let points = deltas
            .iter()
            .map(|&delta| dense_bound(delta, gamma, d, tol))
            .collect::<Result<_>>()?;
        Ok(BoundCurve {
            chain: Chain::Dense,
            d,
            gamma: Some(gamma),
            tol,
            points,
        })
    }

    /// `delta,c,tol,sign_changes`, one row per grid point. Values are printed
    /// with Rust's shortest round-trip formatting, so output is byte-stable.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "delta,c,tol,sign_changes")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{}",
                p.delta,
                p.value,
                self.tol,
                p.sign_changes.len()
            )?;
        }
        Ok(())
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

fn sign_changes(grid: &[f64], feasible: &[bool]) -> Vec<SignChange> {
    (1..grid.len())
        .filter(|&i| feasible[i] != feasible[i - 1])
        .map(|i| SignChange {
            lo: grid[i - 1],
            hi: grid[i],
            to_feasible: feasible[i],
        })
        .collect()
}

/// Bisects `[lo, hi]` where `feasible(lo) != feasible(hi)` until the bracket
/// is narrower than `tol * hi`. Midpoints are geometric while the bracket
/// spans more than a factor of two, so tiny roots are reached quickly.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, feasible: impl Fn(f64) -> bool) -> (f64, f64) {
    let lo_side = feasible(lo);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * hi {
            break;
        }
        let mid = if lo > 0.0 && hi > 2.0 * lo {
            (lo * hi).sqrt()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) == lo_side {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance {tol} must be positive")))
    }
}

/// Largest density admitted by the sparse chain's `kappa <= 1` constraint.
pub fn sit_domain_upper(delta: f64, d: usize) -> f64 {
    let df = d as f64;
    let edge = df / (2.0 * df - 2.0 - delta);
    // stay strictly inside so rounding cannot push kappa past 1
    (edge * (1.0 - 1e-12)).min(1.0 - 1e-12)
}

/// Smallest density an open set can have when its vertices average
/// `2 + delta` open neighbours, as allowed by the sparse chain.
///
/// The margin is scanned on a log grid from `1e-300` to the top of the
/// domain; the first infeasible-to-feasible change is bisected to relative
/// width `tol` (so also absolute width `tol`, since the value is below 1) and
/// the feasible end is returned. Every sign change is recorded. If the
/// bottom of the grid is already feasible the constraint is invisible in
/// double precision and 0 is returned with [`BoundStatus::NoInfeasibleRegion`].
pub fn sit_bound(d: usize, delta: f64, tol: f64) -> Result<BoundPoint> {
    check_tol(tol)?;
    if d < 3 {
        return Err(Error::invalid("degree must be at least 3"));
    }
    if !(delta > 0.0 && delta <= d as f64 - 2.0) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in (0, d - 2]"
        )));
    }
    let feasible = |eps: f64| {
        sit_feasible(eps, delta, d)
            .map(|r| r.feasible)
            .expect("grid stays inside the domain")
    };
    let grid = log_grid(SPARSE_FLOOR, sit_domain_upper(delta, d), SCAN_POINTS);
    let verdicts: Vec<bool> = grid.iter().map(|&e| feasible(e)).collect();
    let changes = sign_changes(&grid, &verdicts);
    if verdicts[0] {
        return Ok(BoundPoint {
            delta,
            value: 0.0,
            status: BoundStatus::NoInfeasibleRegion,
            bracket: (0.0, grid[0]),
            sign_changes: changes,
        });
    }
    match changes.iter().find(|c| c.to_feasible) {
        Some(c) => {
            let (lo, hi) = bisect(c.lo, c.hi, tol, feasible);
            Ok(BoundPoint {
                delta,
                value: hi,
                status: BoundStatus::Bracketed,
                bracket: (lo, hi),
                sign_changes: changes,
            })
        }
        None => {
            let top = *grid.last().expect("non-empty grid");
            Ok(BoundPoint {
                delta,
                value: top,
                status: BoundStatus::NoFeasibleRegion,
                bracket: (top, top),
                sign_changes: changes,
            })
        }
    }
}

/// Largest closed density consistent with the dense chain.
///
/// Densities run over `(delta / (1 + delta), 1)`, where `kappa` is a
/// probability. Because `h` is symmetric the finite chain becomes feasible
/// again as the density approaches 1, so the returned value is the upper end
/// of the feasible stretch starting at the bottom of the domain. The grid is
/// log-spaced in the distance to the lower end to resolve values close to it.
/// With an infeasible lower end the lower end is returned with
/// [`BoundStatus::NoFeasibleRegion`]; with no crossing at all, 1 is returned
/// with [`BoundStatus::NoInfeasibleRegion`].
pub fn dense_bound(delta: f64, gamma: f64, d: usize, tol: f64) -> Result<BoundPoint> {
    check_tol(tol)?;
    check_gamma(gamma)?;
    if d == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in [0, 1]"
        )));
    }
    let floor = delta / (1.0 + delta);
    let width = 1.0 - floor;
    let first_offset = if floor > 0.0 { floor * 1e-9 } else { 1e-300 };
    let offsets = log_grid(first_offset, width * (1.0 - 1e-12), SCAN_POINTS);
    let grid: Vec<f64> = offsets.iter().map(|&t| floor + t).collect();
    let feasible = |eps: f64| match dense_feasible(eps, delta, gamma, d) {
        Ok(r) => r.feasible,
        // rounding at the domain edge
        Err(_) => false,
    };
    let verdicts: Vec<bool> = grid.iter().map(|&e| feasible(e)).collect();
    let changes = sign_changes(&grid, &verdicts);
    if !verdicts[0] {
        return Ok(BoundPoint {
            delta,
            value: floor,
            status: BoundStatus::NoFeasibleRegion,
            bracket: (floor, floor),
            sign_changes: changes,
        });
    }
    match changes.iter().find(|c| !c.to_feasible) {
        Some(c) => {
            let (lo, hi) = bisect(c.lo, c.hi, tol, feasible);
            Ok(BoundPoint {
                delta,
                value: lo,
                status: BoundStatus::Bracketed,
                bracket: (lo, hi),
                sign_changes: changes,
            })
        }
        None => Ok(BoundPoint {
            delta,
            value: 1.0,
            status: BoundStatus::NoInfeasibleRegion,
            bracket: (1.0, 1.0),
            sign_changes: changes,
        }),
    }
}

/// Density guaranteed for an open set with average degree at least
/// `(1 - delta) d` on a graph with edge Cheeger constant `h_edge`:
/// `max(0, 1 - delta d / h_edge)`.
///
/// The complement `A` of the open set has at most `delta d n` boundary
/// edges. When `|A| <= n/2` the claim is only about `|A|`, and otherwise
/// expansion of the open set gives `h_edge (n - |A|) <= delta d n`.
pub fn expander_density_bound(delta: f64, d: usize, h_edge: f64) -> Result<f64> {
    if !(h_edge.is_finite() && h_edge > 0.0) {
        return Err(Error::invalid(format!(
            "h_edge = {h_edge} must be positive"
        )));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!(
            "delta = {delta} must be non-negative"
        )));
    }
    if d == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    Ok((1.0 - delta * d as f64 / h_edge).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sit_examples() {
        let r = sit_feasible(0.5, 0.1, 4).unwrap();
        assert!(r.feasible);
        assert!((r.lhs - 2.0).abs() < 1e-15);
        let r = sit_feasible(1e-6, 0.5, 4).unwrap();
        assert!(!r.feasible);
        // leading-order values 3.99e-5 and 3.6e-5; the x/ln 2 terms add under 10%
        assert!((r.lhs / 3.99e-5 - 1.0).abs() < 0.1, "{}", r.lhs);
        assert!((r.rhs / 3.6e-5 - 1.0).abs() < 0.1, "{}", r.rhs);
        assert_eq!(r.feasible, r.margin >= 0.0);
    }

    #[test]
    fn feasibility_json_round_trip() {
        let r = dense_feasible(0.3, 0.1, 0.5, 4).unwrap();
        let back: FeasibilityResult = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(!sit_feasible(0.2, 0.5, 4)
            .unwrap()
            .to_json()
            .contains("gamma"));
    }

    #[test]
    fn dense_rejects_bad_gamma_and_domain() {
        assert!(dense_feasible(0.3, 0.1, 0.0, 4).is_err());
        assert!(dense_feasible(0.3, 0.1, -1.0, 4).is_err());
        assert!(matches!(
            dense_feasible(0.05, 0.1, 0.5, 4),
            Err(Error::InconsistentParameters(_))
        ));
        assert!(dense_bound(0.1, 0.0, 4, 1e-10).is_err());
    }

    #[test]
    fn sit_bound_is_bracketed() {
        let p = sit_bound(4, 1.0, 1e-12).unwrap();
        assert_eq!(p.status, BoundStatus::Bracketed);
        assert!(!sit_feasible(p.bracket.0, 1.0, 4).unwrap().feasible);
        assert!(sit_feasible(p.bracket.1, 1.0, 4).unwrap().feasible);
        assert!(p.bracket.1 - p.bracket.0 <= 1e-12 * p.bracket.1);
        assert!(sit_bound(4, 0.0, 1e-9).is_err());
        assert!(sit_bound(4, 2.5, 1e-9).is_err());
        assert!(sit_bound(4, 1.0, 0.0).is_err());
    }

    #[test]
    fn tiny_delta_has_no_visible_constraint() {
        let p = sit_bound(4, 1e-3, 1e-9).unwrap();
        assert_eq!(p.status, BoundStatus::NoInfeasibleRegion);
        assert_eq!(p.value, 0.0);
    }

    #[test]
    fn dense_bound_brackets_first_crossing() {
        let p = dense_bound(0.01, 2.0, 4, 1e-12).unwrap();
        assert_eq!(p.status, BoundStatus::Bracketed);
        assert!(dense_feasible(p.bracket.0, 0.01, 2.0, 4).unwrap().feasible);
        assert!(!dense_feasible(p.bracket.1, 0.01, 2.0, 4).unwrap().feasible);
        // infeasible only very close to density 1
        let p = dense_bound(0.1, 0.5, 4, 1e-12).unwrap();
        assert_eq!(p.status, BoundStatus::Bracketed);
        assert!(p.value > 1.0 - 1e-6 && p.value < 1.0, "{}", p.value);
        // gamma below d * delta: feasible all the way up
        let p = dense_bound(0.2, 0.5, 4, 1e-10).unwrap();
        assert_eq!(p.status, BoundStatus::NoInfeasibleRegion);
        assert_eq!(p.value, 1.0);
        // delta = 0 leaves no room at all
        let p = dense_bound(0.0, 1.0, 4, 1e-10).unwrap();
        assert_eq!(p.status, BoundStatus::NoFeasibleRegion);
        assert_eq!(p.value, 0.0);
    }

    #[test]
    fn expander_bound_examples() {
        assert_eq!(expander_density_bound(0.0, 4, 0.4).unwrap(), 1.0);
        assert!((expander_density_bound(0.01, 4, 0.4).unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(expander_density_bound(1.0, 4, 0.4).unwrap(), 0.0);
        assert!(expander_density_bound(0.1, 4, 0.0).is_err());
    }

    #[test]
    fn csv_shape() {
        let deltas: Vec<f64> = (1..=40).map(|i| i as f64 * 0.045).collect();
        let c = BoundCurve::sparse(4, &deltas, 1e-10).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 41);
        assert_eq!(text.lines().next(), Some("delta,c,tol,sign_changes"));
    }
}
