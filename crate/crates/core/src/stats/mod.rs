//! Measurable statistics of a configuration: densities, clusters, thinning
//! sweeps, walks on clusters, and adversarial dense subsets.

mod adversarial;
mod density;
mod sweep;
mod walk;

pub use adversarial::{adversarial_subgraph_search, AdversarialResult, AnnealSchedule};
pub use density::{
    cluster_stats, cluster_stats_of, density_report, design_effect, mixed_edge_density,
    ClusterStats, ClusterSummary, DensityReport, MixedEdges,
};
pub use sweep::{pc_sweep, PcSweepResult, SweepOptions};
pub use walk::{
    batch_means_stderr, birkhoff_average, delayed_srw, BirkhoffAverage, WalkSample, BATCHES,
};
