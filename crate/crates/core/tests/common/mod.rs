#![allow(dead_code)]

use adoptnet::generate::{gen_random, RandomSpec};
use adoptnet::rational::rat;
use adoptnet::Network;

/// Parameters for the `k`-th corpus network: sizes, densities and threshold
/// ranges cycle so that every combination shows up.
pub fn corpus_spec(k: u64, max_nodes: usize, max_products: usize) -> RandomSpec {
    const DENSITIES: [f64; 4] = [0.1, 0.25, 0.4, 0.6];
    let ranges = [(rat(1, 8), rat(1, 1)), (rat(1, 8), rat(1, 2)), (rat(1, 2), rat(1, 1))];
    let (lo, hi) = ranges[(k / 4 % 3) as usize];
    RandomSpec {
        nodes: max_nodes - (k as usize * 7 + 3) % max_nodes.min(4),
        products: 1 + (k as usize / 3) % max_products,
        density: DENSITIES[(k % 4) as usize],
        equitable: k.is_multiple_of(2),
        threshold_min: lo,
        threshold_max: hi,
        threshold_denominator: 8,
        product_independent: k.is_multiple_of(3),
        adopted_fraction: [0.2, 0.35, 0.5][(k % 3) as usize],
        isolated_adopted: k.is_multiple_of(7),
        offer_all: k % 3 != 1,
        seed_product: None,
        seed: 1000 + k,
    }
}

pub fn corpus(count: u64, max_nodes: usize, max_products: usize) -> Vec<Network> {
    (0..count)
        .map(|k| gen_random(&corpus_spec(k, max_nodes, max_products)).expect("valid corpus spec"))
        .collect()
}

/// Corpus restricted to exactly two products.
pub fn two_product_corpus(count: u64, max_nodes: usize) -> Vec<Network> {
    (0..count)
        .map(|k| {
            let spec = RandomSpec {
                products: 2,
                ..corpus_spec(k, max_nodes, 2)
            };
            gen_random(&spec).expect("valid corpus spec")
        })
        .collect()
}
