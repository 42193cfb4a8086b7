//! Small graphs with known moduli, plus a random connected graph generator.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Graph;

/// `k` internally disjoint s–t paths, each with `len` unit-weight edges.
/// Internal vertices are labelled `p{i}_{j}`.
pub fn parallel_paths(k: usize, len: usize) -> Graph {
    assert!(k >= 1 && len >= 1);
    let mut edges: Vec<(String, String, f64)> = Vec::with_capacity(k * len);
    for i in 0..k {
        let mut prev = "s".to_string();
        for j in 1..len {
            let v = format!("p{i}_{j}");
            edges.push((prev, v.clone(), 1.0));
            prev = v;
        }
        edges.push((prev, "t".to_string(), 1.0));
    }
    Graph::from_labeled_edges(false, &edges).expect("parallel path fixture")
}

/// Path through the given labels in order, unit weights.
pub fn path(labels: &[&str]) -> Graph {
    let edges: Vec<_> = labels.windows(2).map(|w| (w[0], w[1], 1.0)).collect();
    Graph::from_labeled_edges(false, &edges).expect("path fixture")
}

/// Unit triangle with edges ab, bc, ac (ids 0, 1, 2).
pub fn triangle() -> Graph {
    Graph::from_labeled_edges(false, &[("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)]).expect("triangle fixture")
}

/// Two triangles sharing the edge cd: a–c, a–d, c–d, c–b, d–b, unit weights.
pub fn diamond() -> Graph {
    Graph::from_labeled_edges(
        false,
        &[("a", "c", 1.0), ("a", "d", 1.0), ("c", "d", 1.0), ("c", "b", 1.0), ("d", "b", 1.0)],
    )
    .expect("diamond fixture")
}

/// Complete graph on `n` vertices labelled `0..n`, unit weights.
pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v, 1.0));
        }
    }
    Graph::from_indexed_edges(n, false, &edges).expect("complete graph fixture")
}

/// Simple connected graph: a uniformly shuffled random tree plus up to
/// `chords` extra edges. Weights are 1, or uniform in [0.5, 2) when
/// `weighted`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, chords: usize, weighted: bool) -> Graph {
    assert!(n >= 2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        pairs.push((order[j].min(order[i]), order[j].max(order[i])));
    }
    let max_edges = n * (n - 1) / 2;
    let target = (pairs.len() + chords).min(max_edges);
    let mut attempts = 0;
    while pairs.len() < target && attempts < 100 * (chords + 1) {
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if !pairs.contains(&key) {
            pairs.push(key);
        }
    }
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, if weighted { rng.random_range(0.5..2.0) } else { 1.0 }))
        .collect();
    Graph::from_indexed_edges(n, false, &edges).expect("random graph fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parallel_shape() {
        let g = parallel_paths(3, 2);
        assert_eq!((g.n(), g.m()), (5, 6));
        let g = parallel_paths(4, 1);
        assert_eq!((g.n(), g.m()), (2, 4));
    }

    #[test]
    fn random_graphs_are_connected_and_simple() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(2..=10);
            let g = random_connected(&mut rng, n, 4, true);
            assert!(g.is_connected());
            for e in g.edges() {
                assert_eq!(g.find_edge(e.tail, e.head), Some(e.id));
            }
        }
    }
}
