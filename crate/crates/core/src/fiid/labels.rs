use rand::RngCore;
use rayon::prelude::*;

use crate::graph::Graph;
use crate::rng::{seek_u64, stream, unit, Domain};

const CHUNK: usize = 1 << 14;

/// One IID uniform label per vertex.
///
/// The label of vertex `v` is word `v` of the label stream of `seed`, so it
/// depends on `(seed, v)` only and not on how the field was evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelField {
    pub labels: Vec<f64>,
    pub seed: u64,
}

impl LabelField {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The label of a single vertex, without materialising the field.
    pub fn label_at(seed: u64, v: usize) -> f64 {
        let mut rng = stream(seed, Domain::Labels, 0);
        seek_u64(&mut rng, v as u64);
        unit(rng.next_u64())
    }
}

pub fn sample_labels(g: &Graph, seed: u64) -> LabelField {
    let mut labels = vec![0.0; g.n()];
    labels
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut rng = stream(seed, Domain::Labels, 0);
            seek_u64(&mut rng, (c * CHUNK) as u64);
            for x in chunk {
                *x = unit(rng.next_u64());
            }
        });
    LabelField { labels, seed }
}
