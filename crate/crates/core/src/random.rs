//! Seeded random networks and sampled functions for property checks.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, Uniform};

use crate::edge_function::SampledEdgeFunction;
use crate::error::Result;
use crate::network::Network;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected network on `2..=max_vertices` vertices named `v0, v1, ...`:
/// a random spanning tree plus each remaining pair with probability 0.3.
/// Conductances are uniform in `[0.5, 2]`.
pub fn random_network<R: Rng>(rng: &mut R, max_vertices: usize) -> Network {
    let n = rng.random_range(2..=max_vertices.max(2));
    let conductance = Uniform::new_inclusive(0.5, 2.0).expect("valid range");
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        pairs.push((order[i].min(order[j]), order[i].max(order[j])));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !pairs.contains(&(a, b)) && rng.random_bool(0.3) {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    let edges: Vec<(String, String, f64)> = pairs
        .into_iter()
        .map(|(a, b)| (names[a].clone(), names[b].clone(), rng.sample(conductance)))
        .collect();
    Network::new(&names, &edges).expect("spanning tree keeps it connected")
}

/// Independent standard normal real and imaginary parts at every node.
pub fn random_sampled<'a, R: Rng>(
    net: &'a Network,
    n: usize,
    rng: &mut R,
) -> Result<SampledEdgeFunction<'a>> {
    SampledEdgeFunction::from_fn(net, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn networks_are_reproducible_and_in_range() {
        let mut a = rng(7);
        let mut b = rng(7);
        for _ in 0..20 {
            let net = random_network(&mut a, 8);
            assert_eq!(net.to_json(), random_network(&mut b, 8).to_json());
            assert!((2..=8).contains(&net.num_vertices()));
            assert!(net.edges().iter().all(|e| (0.5..=2.0).contains(&e.c)));
        }
    }

    #[test]
    fn samples_are_reproducible() {
        let net = Network::from_edges(&[("x", "y", 1.0)]).unwrap();
        let f = random_sampled(&net, 8, &mut rng(3)).unwrap();
        let g = random_sampled(&net, 8, &mut rng(3)).unwrap();
        assert_eq!(f.values(), g.values());
        assert!(f.max_abs() > 0.0);
    }
}
