#![allow(dead_code)]

use std::sync::Arc;

use pmodulus::{fixtures, Family, Graph, UsageRow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graph(rng: &mut ChaCha8Rng, n: usize, weighted: bool) -> Arc<Graph> {
    let chords = rng.random_range(0..=n);
    Arc::new(fixtures::random_connected(rng, n, chords, weighted))
}

pub fn pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.random_range(0..n);
    (a, (a + rng.random_range(1..n)) % n)
}

pub fn positive(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(0.1..3.0)).collect()
}

/// `count` random rows with usages in {1, 2} over `m` edges.
pub fn rows(rng: &mut ChaCha8Rng, m: usize, count: usize) -> Vec<UsageRow> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut entries = Vec::new();
        for e in 0..m {
            if rng.random_bool(0.5) {
                entries.push((e, if rng.random_bool(0.7) { 1.0 } else { 2.0 }));
            }
        }
        if !entries.is_empty() {
            out.push(UsageRow::new(entries, None).unwrap());
        }
    }
    out
}

pub fn explicit(g: &Arc<Graph>, rows: Vec<UsageRow>) -> Family {
    Family::explicit(g.clone(), rows).unwrap()
}
