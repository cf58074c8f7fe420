mod common;

use common::{bfs_components, bfs_edge_counts, densest_subset_edges};
use fiid_perc::fiid::{apply_factor, sample_labels, BlockFactor, Configuration};
use fiid_perc::graph::{
    cycle_graph, generate_configuration_model, generate_simple_configuration_model, Graph,
};
use fiid_perc::stats::{
    adversarial_subgraph_search, birkhoff_average, cluster_stats, delayed_srw, density_report,
    mixed_edge_density, pc_sweep, AnnealSchedule, SweepOptions,
};
use proptest::prelude::*;

fn configure(g: &Graph, factor: &str, seed: u64) -> Configuration {
    let b = BlockFactor::parse(factor).unwrap();
    apply_factor(g, &sample_labels(g, seed), &b).unwrap()
}

fn with_symbols(symbols: Vec<u8>) -> Configuration {
    Configuration {
        symbols,
        factor: BlockFactor::parse("bernoulli_threshold").unwrap(),
        label_seed: 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clusters_match_bfs(n in 2usize..=200, seed: u64, bits: Vec<bool>) {
        let g = generate_configuration_model(n - n % 2, 3, seed).unwrap();
        let set: Vec<bool> = (0..g.n()).map(|v| bits.get(v).copied().unwrap_or(v % 3 == 0)).collect();
        let c = with_symbols(set.iter().map(|&b| u8::from(b)).collect());
        let st = cluster_stats(&g, &c, 1);
        let mut ours: Vec<(usize, usize)> = st.clusters.iter().map(|c| (c.size, c.internal_edges)).collect();
        ours.sort_unstable();
        prop_assert_eq!(&ours, &bfs_edge_counts(&g, &set));
        prop_assert_eq!(st.largest, bfs_components(&g, &set).iter().map(|c| c.len()).max().unwrap_or(0));
        let trees = ours.iter().filter(|(s, e)| e + 1 == *s).count();
        prop_assert_eq!(st.tree_clusters, trees);
    }
}

#[test]
fn bernoulli_conditional_degree() {
    let g = generate_configuration_model(200_000, 4, 11).unwrap();
    for p in [0.2, 0.5, 0.8] {
        let c = configure(&g, &format!("bernoulli_threshold:p={p}"), 11);
        let r = density_report(&g, &c, 1);
        assert!(
            (r.density - p).abs() < 3.0 * r.density_stderr,
            "{p}: {}",
            r.density
        );
        let a = r.conditional_avg_degree.unwrap();
        let se = r.conditional_avg_degree_stderr.unwrap();
        assert!((a - 4.0 * p).abs() < 3.0 * se, "{p}: {a} +- {se}");
        // independent sites: a closed vertex sees open neighbours at rate p
        let k = r.kappa_hat.unwrap();
        assert!((k - p).abs() < 0.01, "{k}");
    }
}

#[test]
fn red_clusters_are_critical() {
    let g = generate_configuration_model(1_000_000, 4, 12).unwrap();
    let c = configure(&g, "red_blue", 12);
    let r = density_report(&g, &c, 1);
    assert!(
        (r.density - 0.5).abs() < 3.0 * r.density_stderr,
        "{}",
        r.density
    );
    let a = r.conditional_avg_degree.unwrap();
    assert!(
        (a - 2.0).abs() < 3.0 * r.conditional_avg_degree_stderr.unwrap(),
        "{a}"
    );
    let b = density_report(&g, &c, 2);
    assert!((b.density - 0.4).abs() < 3.0 * b.density_stderr);
}

#[test]
fn independent_colouring_mixes_half_the_edges() {
    let g = generate_configuration_model(100_000, 4, 13).unwrap();
    let c = configure(&g, "bernoulli_threshold:p=0.7", 13);
    let colours = configure(&g, "two_colour_threshold:t=0.5", 14);
    let m = mixed_edge_density(&g, &c, 1, &colours);
    let f = m.fraction.unwrap();
    assert!((f - 0.5).abs() < 3.0 * m.stderr.unwrap(), "{f}");
    assert_eq!(m.internal_edges, g.internal_edges(&c.support(1)));
}

#[test]
fn bookkeeping_identity_for_every_factor() {
    let g = generate_configuration_model(20_000, 4, 15).unwrap();
    for f in [
        "bernoulli_threshold:p=0.4",
        "ball_union:r=1,p_seed=0.1",
        "local_min_forest:r=2",
        "red_blue",
    ] {
        let c = configure(&g, f, 15);
        for sym in [1, 2] {
            let r = density_report(&g, &c, sym);
            let (Some(a), Some(k)) = (r.conditional_avg_degree, r.kappa_hat) else {
                continue;
            };
            let e = r.density;
            assert!(
                (4.0 * e - (e * a + (1.0 - e) * 4.0 * k)).abs() < 1e-9,
                "{f}"
            );
        }
    }
}

#[test]
fn walk_occupation_is_uniform_on_connected_graph() {
    let g = cycle_graph(7);
    let c = with_symbols(vec![1; 7]);
    let w = delayed_srw(&g, &c, 1, 0, 700_000, 3).unwrap();
    assert_eq!(w.holding, 0);
    let mut visits = [0usize; 7];
    for &x in &w.trajectory {
        visits[x as usize] += 1;
    }
    for v in visits {
        let f = v as f64 / w.trajectory.len() as f64;
        assert!((f - 1.0 / 7.0).abs() < 0.01, "{f}");
    }
}

#[test]
fn walk_stays_in_its_cluster() {
    let g = generate_configuration_model(5000, 4, 16).unwrap();
    let c = configure(&g, "bernoulli_threshold:p=0.5", 16);
    let start = c.symbols.iter().position(|&s| s == 1).unwrap();
    let w = delayed_srw(&g, &c, 1, start, 10_000, 16).unwrap();
    let comp = bfs_components(&g, &c.indicator(1))
        .into_iter()
        .find(|cl| cl.contains(&start))
        .unwrap();
    assert!(w.trajectory.iter().all(|&x| comp.contains(&(x as usize))));
}

#[test]
fn birkhoff_on_triangle() {
    let g = cycle_graph(3);
    let c = with_symbols(vec![1; 3]);
    let colours = with_symbols(vec![1, 0, 0]);
    let w = delayed_srw(&g, &c, 1, 0, 300_000, 5).unwrap();
    let b = birkhoff_average(&w, &colours, 1).unwrap();
    assert!(
        (b.final_mean - 1.0 / 3.0).abs() < 3.0 * b.stderr,
        "{} +- {}",
        b.final_mean,
        b.stderr
    );
    assert_eq!(b.running_mean.len(), w.trajectory.len());
}

#[test]
fn annealing_matches_exhaustive_on_small_graphs() {
    let schedule = AnnealSchedule {
        iterations: 20_000,
        ..Default::default()
    };
    let mut hits = 0;
    let mut total = 0;
    for seed in 0..20 {
        let g = generate_simple_configuration_model(20, 4, seed, 1000).unwrap();
        for k in [4, 6, 8, 10] {
            let best = densest_subset_edges(&g, k);
            let r = adversarial_subgraph_search(&g, k as f64 / 20.0, &schedule, seed).unwrap();
            assert!(r.internal_edges <= best);
            total += 1;
            hits += usize::from(r.internal_edges as f64 >= 0.95 * best as f64);
        }
    }
    assert!(hits as f64 >= 0.9 * total as f64, "{hits}/{total}");
}

#[test]
fn small_sweep_is_coupled() {
    let g = generate_configuration_model(20_000, 4, 17).unwrap();
    let c = with_symbols(vec![1; g.n()]);
    let grid: Vec<f64> = (1..=16).map(|i| 0.2 + 0.02 * i as f64).collect();
    let r = pc_sweep(&g, &c, 1, &grid, 4, 17, &SweepOptions::default()).unwrap();
    assert!(r.monotone);
    for rep in 0..4 {
        assert!((1..grid.len()).all(|i| r.giant_fraction[i][rep] >= r.giant_fraction[i - 1][rep]));
    }
    let pc = r.p_c_estimate.unwrap();
    assert!((0.3..0.4).contains(&pc), "{pc}");
    assert_eq!(
        r,
        pc_sweep(&g, &c, 1, &grid, 4, 17, &SweepOptions::default()).unwrap()
    );
}
