mod common;

use common::{dense_grid_threshold, h, sparse_grid_threshold};
use fiid_perc::entropy::{
    beta_weight, binary_entropy, conditional_entropy, dense_bound, dense_feasible,
    expander_density_bound, kappa_dense, kappa_sparse, leaf_entropy_check, sit_bound,
    sit_domain_upper, sit_feasible, star_entropy_check, BoundStatus, Distribution, Given,
    JointDistribution, StarSample,
};
use fiid_perc::fiid::{apply_factor, sample_labels, BlockFactor};
use fiid_perc::graph::{
    complete_graph, generate_configuration_model, petersen_graph, regular_tree_ball,
    tree_like_vertices,
};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

#[test]
fn binary_entropy_at_quarter() {
    // h(1/4) = 2 - (3/4) log2 3
    let exact = 2.0 - 0.75 * 3f64.log2();
    assert!((binary_entropy(0.25).unwrap() - exact).abs() < 1e-15);
}

/// All ways to spread `units` indistinguishable units over `cells` cells.
fn compositions(units: usize, cells: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(left: usize, cells: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() + 1 == cells {
            cur.push(left);
            f(cur);
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, cells, cur, f);
            cur.pop();
        }
    }
    rec(units, cells, &mut Vec::new(), f);
}

/// `H(A | B)` from the definition `sum_b p(b) H(A | B = b)`.
fn conditional_by_definition(rows: usize, cols: usize, p: &[f64]) -> f64 {
    (0..cols)
        .map(|j| {
            let pb: f64 = (0..rows).map(|i| p[i * cols + j]).sum();
            if pb == 0.0 {
                return 0.0;
            }
            let ha: f64 = (0..rows)
                .map(|i| p[i * cols + j] / pb)
                .filter(|&q| q > 0.0)
                .map(|q| -q * q.log2())
                .sum();
            pb * ha
        })
        .sum()
}

#[test]
fn chain_rule_on_all_dyadic_tables() {
    let mut cases = 0;
    for rows in 1..=4 {
        for cols in 1..=4 {
            compositions(8, rows * cols, &mut |c| {
                let p: Vec<f64> = c.iter().map(|&x| x as f64 / 8.0).collect();
                let j = JointDistribution::new(rows, cols, p.clone()).unwrap();
                let hb = Distribution::from_probs(j.marginal(Given::Second))
                    .unwrap()
                    .entropy();
                let ours = conditional_entropy(&j, Given::Second);
                assert!((j.entropy() - (hb + ours)).abs() < 1e-12);
                assert!((ours - conditional_by_definition(rows, cols, &p)).abs() < 1e-12);
                cases += 1;
            });
        }
    }
    assert!(cases > 100_000);
}

#[test]
fn kappa_identities_on_random_triples() {
    let mut rng = SmallRng::seed_from_u64(4);
    let mut checked = (0, 0);
    while checked.0 < 10_000 || checked.1 < 10_000 {
        let d = rng.random_range(3..=8usize);
        let eps: f64 = rng.random_range(1e-6..1.0 - 1e-6);
        let delta = rng.random_range(0.0..=(d as f64 - 2.0));
        if let Ok(k) = kappa_sparse(eps, delta, d) {
            let df = d as f64;
            let lhs = df * eps;
            let rhs = eps * (2.0 + delta) + (1.0 - eps) * df * k;
            assert!((lhs - rhs).abs() < 1e-12, "{eps} {delta} {d}");
            checked.0 += 1;
        }
        let delta = rng.random_range(0.0..=1.0);
        if let Ok(k) = kappa_dense(eps, delta) {
            let df = d as f64;
            let rhs = (1.0 - eps) * df * delta + eps * df * k;
            assert!((df * eps - rhs).abs() < 1e-12, "{eps} {delta}");
            checked.1 += 1;
        }
    }
}

#[test]
fn no_constraint_without_excess_degree() {
    let grid = |d: usize| {
        let top = sit_domain_upper(0.0, d);
        (1..=10_000).map(move |i| top * i as f64 / 10_001.0)
    };
    for d in [3usize, 4] {
        for eps in grid(d) {
            assert!(
                sit_feasible(eps, 0.0, d).unwrap().feasible,
                "d={d} eps={eps}"
            );
        }
    }
    // at d = 6 the entropy side wins again once kappa gets close to 1
    let bad: Vec<f64> = grid(6)
        .filter(|&e| !sit_feasible(e, 0.0, 6).unwrap().feasible)
        .collect();
    assert!(bad.iter().all(|&e| e > 0.5), "{:?}", bad.first());
    assert!(!bad.is_empty());
}

#[test]
fn solvers_agree_with_grid_scans() {
    for d in [3usize, 4, 6] {
        for delta in [0.1, 0.5, 1.0] {
            let c = sit_bound(d, delta, 1e-10).unwrap();
            let oracle = sparse_grid_threshold(d, delta, 100_000);
            assert!(
                (c.value - oracle).abs() <= 1e-4,
                "c({d},{delta}) = {} vs {oracle}",
                c.value
            );
        }
    }
    let p = dense_bound(0.1, 0.5, 4, 1e-10).unwrap();
    let oracle = dense_grid_threshold(0.1, 0.5, 4, 100_000);
    assert!((p.value - oracle).abs() <= 1e-4, "{} vs {oracle}", p.value);
}

#[test]
fn sign_changes_are_recorded() {
    // for d = 6 the feasible region is not an interval: the margin turns
    // negative again before the end of the domain
    let p = sit_bound(6, 0.1, 1e-10).unwrap();
    assert_eq!(p.status, BoundStatus::Bracketed);
    assert!(p.sign_changes.len() >= 2, "{:?}", p.sign_changes);
    assert!(p.sign_changes[0].to_feasible);
    assert!(!p.sign_changes[1].to_feasible);
}

#[test]
fn sparse_margin_is_continuous() {
    let (d, delta) = (4, 0.5);
    let top = sit_domain_upper(delta, d);
    let jumps = |points: usize| {
        let m: Vec<f64> = (1..=points)
            .map(|i| {
                sit_feasible(top * i as f64 / (points + 1) as f64, delta, d)
                    .unwrap()
                    .margin
            })
            .collect();
        m.windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (jumps(1000), jumps(10_000));
    assert!(fine < 0.2 * coarse, "{fine} vs {coarse}");
}

#[test]
fn feasibility_matches_oracle_pointwise() {
    let mut rng = SmallRng::seed_from_u64(8);
    for _ in 0..10_000 {
        let d = rng.random_range(3..=6usize);
        let delta = rng.random_range(0.01..=d as f64 - 2.0);
        let eps = rng.random_range(1e-9..sit_domain_upper(delta, d));
        let r = sit_feasible(eps, delta, d).unwrap();
        let df = d as f64;
        let k = (df - 2.0 - delta) * eps / (df * (1.0 - eps));
        let m = eps * df + df * h(k) - (df - 2.0) * h(eps);
        assert!((r.margin - m).abs() < 1e-12, "{eps} {delta} {d}");
    }
    let r = dense_feasible(0.5, 0.1, 0.5, 4).unwrap();
    let m = 4.0 * (0.5 * h(0.1) + 0.5 * h(0.9)) - 0.5 * h(0.5);
    assert!((r.margin - m).abs() < 1e-12);
}

#[test]
fn expander_bound_is_monotone() {
    let mut prev_delta = f64::INFINITY;
    for i in 0..=100 {
        let delta = i as f64 * 0.002;
        let v = expander_density_bound(delta, 4, 0.5).unwrap();
        assert!(v <= prev_delta);
        prev_delta = v;
        let mut prev_h = -1.0;
        for j in 1..=50 {
            let w = expander_density_bound(delta, 4, j as f64 * 0.1).unwrap();
            assert!(w >= prev_h);
            prev_h = w;
        }
    }
}

/// Star tallies of `factor` over vertices whose radius-(r+1) ball is a tree.
fn tree_region_stars(n: usize, factor: &str, seed: u64) -> (StarSample, u8) {
    let g = generate_configuration_model(n, 4, seed).unwrap();
    let b = BlockFactor::parse(factor).unwrap();
    let c = apply_factor(&g, &sample_labels(&g, seed), &b).unwrap();
    let r = b.radius() + 1;
    let keep = tree_like_vertices(&g, r);
    (
        StarSample::from_configuration(&g, &c, 4, |v| keep[v]),
        b.symbol("open").unwrap_or(1),
    )
}

#[test]
fn iid_star_entropy_is_additive() {
    let p = 0.3;
    let (s, _) = tree_region_stars(100_000, "bernoulli_threshold:p=0.3", 2);
    let r = star_entropy_check(&s, 3.0, 200, 2).unwrap();
    let exact = 5.0 * h(p);
    assert!(
        (r.h_star - exact).abs() < 3.0 * r.se_h_star,
        "{} vs {exact}",
        r.h_star
    );
    assert!(r.h_star <= 5.0 + 1e-12);
    assert!((r.h_star - r.h_root - r.h_leaves_given_root).abs() < 1e-12);
}

#[test]
fn leaf_entropy_never_exceeds_kappa_bound() {
    for factor in [
        "bernoulli_threshold:p=0.6",
        "ball_union:r=1,p_seed=0.1",
        "local_min_forest:r=1",
    ] {
        let (s, open) = tree_region_stars(20_000, factor, 3);
        let c = leaf_entropy_check(&s, open, 100, 3).unwrap();
        assert!(
            c.conditional_entropy <= c.bound + 3.0 * c.se_difference + 1e-12,
            "{factor}: {c:?}"
        );
    }
}

#[test]
fn star_entropy_within_alphabet_bound() {
    let mut rng = SmallRng::seed_from_u64(6);
    for _ in 0..100 {
        let mut s = StarSample::new(3);
        for _ in 0..rng.random_range(1..200) {
            s.record((0..4).map(|_| rng.random_range(0..3u8)).collect());
        }
        let r = star_entropy_check(&s, 2.0, 0, 0).unwrap();
        assert!(r.h_star >= 0.0 && r.h_root >= 0.0);
        assert!(r.h_star <= 4.0 * 3f64.log2() + 1e-12);
    }
}

#[test]
fn beta_examples() {
    let p = petersen_graph();
    assert_eq!(
        beta_weight(&p, 1, 1000, false).unwrap().connected.value,
        4.0
    );
    let k4 = complete_graph(4);
    assert_eq!(
        beta_weight(&k4, 4, 1000, false).unwrap().connected.value,
        1.0
    );
    // paths in the interior of a tree ball approach d - 1 from above
    let t = regular_tree_ball(4, 5);
    let interior =
        fiid_perc::graph::VertexSet::from_vertices(t.n(), (0..t.n()).filter(|&v| t.degree(v) == 4));
    let mut prev = f64::INFINITY;
    for k in 1..=4 {
        let e = fiid_perc::graph::vertex_expansion_within(&t, &interior, k, 10_000_000).unwrap();
        let path_value = (k * 3 + 2) as f64 / k as f64;
        assert!((e.value - path_value).abs() < 1e-12, "k={k}: {}", e.value);
        assert!(e.value < prev);
        prev = e.value;
    }
}

#[test]
fn distribution_csv_and_entropy() {
    let d =
        Distribution::read_csv("symbol,probability\na,0.5\nb,0.25\nc,0.25\n".as_bytes()).unwrap();
    assert!((d.entropy() - 1.5).abs() < 1e-15);
    assert!(Distribution::read_csv("a,0.5\nb,0.6\n".as_bytes()).is_err());
}

/// For tiny epsilon, `h(x) = x log2(1/x) + x / ln 2 + O(x^2)`, and the sparse
/// constraint reduces to `delta (L + 1/ln 2) <= d - (d - 2 - delta) log2 a`
/// with `L = log2(1/eps)` and `a = (d - 2 - delta) / d`.
#[test]
fn tiny_thresholds_match_first_order_expansion() {
    let inv_ln2 = 1.0 / std::f64::consts::LN_2;
    for d in [3usize, 4, 6] {
        let df = d as f64;
        for delta in [0.02, 0.05, 0.1] {
            let a = (df - 2.0 - delta) / df;
            let l = (df - (df - 2.0 - delta) * a.log2()) / delta - inv_ln2;
            let expected = (-l).exp2();
            assert!(expected < 1e-9, "expansion only valid for tiny values");
            let c = sit_bound(d, delta, 1e-12).unwrap().value;
            assert!(
                (c / expected - 1.0).abs() < 1e-6,
                "c({d},{delta}) = {c:e} vs {expected:e}"
            );
        }
    }
}
