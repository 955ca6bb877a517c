//! Instance generators: the PARTITION gadgets behind the hardness results,
//! a small network with two outcomes, and seeded random networks.
//!
//! Gadget layouts are fixed so callers can address nodes by position. Every
//! gadget starts with one "layer" node per PARTITION item; those nodes have
//! no neighbours and offer `{t1, t2}`, so each of them eventually picks a
//! side.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedDigraph};
use crate::network::{Network, NetworkBuilder, ProductId, ProductSet};
use crate::rational::{self, one, rat, Rational};

/// A generated network together with the node a decision problem asks about.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub network: Network,
    pub designated: usize,
}

/// Rescales positive `a` to sum to `target`.
pub fn normalize(a: &[Rational], target: Rational) -> Result<Vec<Rational>> {
    if a.is_empty() {
        return Err(Error::argument("the PARTITION vector is empty"));
    }
    if let Some(x) = a.iter().find(|x| **x <= rational::zero()) {
        return Err(Error::argument(format!(
            "PARTITION entries must be positive, got {}",
            rational::format(x)
        )));
    }
    let sum: Rational = a.iter().sum();
    Ok(a.iter().map(|x| x * target / sum).collect())
}

/// True iff `a` splits into two parts of equal sum.
pub fn partition_solvable(a: &[Rational]) -> bool {
    let total: Rational = a.iter().sum();
    let n = a.len();
    assert!(n < 64, "brute-force PARTITION is limited to small vectors");
    (0u64..(1 << n)).any(|mask| {
        let part: Rational = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).sum();
        part * 2 == total
    })
}

fn layer(b: &mut NetworkBuilder, len: usize) {
    for _ in 0..len {
        b.node(&[0, 1], one());
    }
}

/// FINAL gadget. Layout: layer `0..n`, then `A`, `B`, then anchors `x`
/// (adopted `t1`, feeding `A`) and `y` (adopted `t2`, feeding `B`).
///
/// `A` can only ever adopt `t1` and `B` only `t2`, each needing a quarter of
/// layer weight, so an all-adopted final exists iff `a` splits evenly.
pub fn gen_final_gadget(a: &[Rational]) -> Result<Network> {
    let a = normalize(a, rat(1, 2))?;
    let n = a.len();
    let mut b = NetworkBuilder::new(&["t1", "t2"]);
    layer(&mut b, n);
    let node_a = b.node(&[0, 1], rat(3, 4));
    let node_b = b.node(&[0, 1], rat(3, 4));
    let x = b.node(&[0], one());
    let y = b.node(&[1], one());
    for (i, w) in a.iter().enumerate() {
        b.edge(i, node_a, *w).edge(i, node_b, *w);
    }
    b.edge(x, node_a, rat(1, 2)).edge(y, node_b, rat(1, 2));
    b.build()
}

fn adoption1_core(a: &[Rational], products: &[&str]) -> Result<(NetworkBuilder, usize, usize)> {
    let a = normalize(a, one())?;
    let mut b = NetworkBuilder::new(products);
    layer(&mut b, a.len());
    let node_a = b.node(&[0, 1], rat(1, 2));
    let node_b = b.node(&[0, 1], rat(1, 2));
    for (i, w) in a.iter().enumerate() {
        b.edge(i, node_a, *w).edge(i, node_b, *w);
    }
    Ok((b, node_a, node_b))
}

/// ADOPTION 1 gadget. Layout: layer `0..n`, `A`, `B`, `C`; `C` is designated.
///
/// `C` needs both `A` and `B` to agree. They can disagree iff `a` splits
/// evenly; otherwise both are pulled to the majority product.
pub fn gen_adoption1_gadget(a: &[Rational]) -> Result<Gadget> {
    let (mut b, node_a, node_b) = adoption1_core(a, &["t1", "t2"])?;
    let c = b.node(&[0, 1], one());
    b.edge(node_a, c, rat(1, 2)).edge(node_b, c, rat(1, 2));
    Ok(Gadget {
        network: b.build()?,
        designated: c,
    })
}

fn check_eps(eps: Rational) -> Result<()> {
    if eps <= rational::zero() || eps > rat(1, 4) {
        return Err(Error::argument(format!(
            "eps must lie in (0,1/4], got {}",
            rational::format(&eps)
        )));
    }
    Ok(())
}

fn adoption2_builder(a: &[Rational], eps: Rational) -> Result<(NetworkBuilder, usize)> {
    check_eps(eps)?;
    let (mut b, node_a, node_b) = adoption1_core(a, &["t1", "t2", "t3"])?;
    let seed_c = b.node(&[2], one());
    let seed_d = b.node(&[2], one());
    let seed_e = b.node(&[2], one());
    let c = b.node(&[0, 2], rat(1, 2));
    let d = b.node(&[1, 2], rat(1, 2));
    let e = b.node(&[0, 1, 2], rat(1, 2) + eps);
    b.edge(node_a, c, rat(1, 2)).edge(seed_c, c, rat(1, 2));
    b.edge(node_b, d, rat(1, 2)).edge(seed_d, d, rat(1, 2));
    b.edge(seed_e, e, rat(1, 2))
        .edge(c, e, rat(1, 4))
        .edge(d, e, rat(1, 4));
    Ok((b, e))
}

/// ADOPTION 2 gadget. Layout: layer `0..n`, `A`, `B`, three `t3` seeds
/// (feeding `C`, `D`, `E`), then `C` (`{t1,t3}`), `D` (`{t2,t3}`) and the
/// designated `E` (`{t1,t2,t3}`), with `0 < eps ≤ 1/4`.
///
/// `E` gets half its threshold from its seed and adopts `t3` as soon as
/// `C` or `D` does. Both avoid `t3` only if `A` took `t1` and `B` took `t2`,
/// which needs an even split of `a`.
pub fn gen_adoption2_gadget(a: &[Rational], eps: Rational) -> Result<Gadget> {
    let (b, e) = adoption2_builder(a, eps)?;
    Ok(Gadget {
        network: b.build()?,
        designated: e,
    })
}

/// The number of pre-adopted `t3` nodes in the ADOPTION 2 and MIN gadgets.
pub const T3_SEEDS: usize = 3;

/// MIN-ADOPTION gadget: the ADOPTION 2 gadget plus a chain of `m` nodes
/// hanging off `E` with weight-1 edges. The chain follows `E` in id order.
pub fn gen_min_adoption_gadget(a: &[Rational], eps: Rational, m: usize) -> Result<Gadget> {
    if m == 0 {
        return Err(Error::argument("the chain needs at least one node"));
    }
    let (mut b, e) = adoption2_builder(a, eps)?;
    let mut prev = e;
    for _ in 0..m {
        let next = b.node(&[0, 1, 2], one());
        b.edge(prev, next, one());
        prev = next;
    }
    Ok(Gadget {
        network: b.build()?,
        designated: e,
    })
}

/// Nodes `s1`, `s2`, `m`, `c` in that order. `s1` hands `t1` to `m` with
/// full weight; `c` listens to `m` and `s2` with half weight each, so a fast
/// reduction makes `c` adopt `t2` although `t1` was equally possible.
pub fn gen_switch_witness() -> Network {
    let mut b = NetworkBuilder::new(&["t1", "t2"]);
    let s1 = b.node(&[0], one());
    let s2 = b.node(&[1], one());
    let m = b.node(&[0, 1], one());
    let c = b.node(&[0, 1], rat(1, 2));
    b.edge(s1, m, one()).edge(m, c, rat(1, 2)).edge(s2, c, rat(1, 2));
    b.build().expect("the switch witness is valid")
}

/// Parameters for [`gen_random`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub nodes: usize,
    pub products: usize,
    /// Probability of each ordered pair of distinct nodes being an edge.
    pub density: f64,
    /// All in-edges of a node weigh `1/|N(i)|`; otherwise weights are random
    /// positive rationals with sum at most 1.
    pub equitable: bool,
    /// Thresholds are drawn from `{k/denominator}` within `[min, max]`.
    pub threshold_min: Rational,
    pub threshold_max: Rational,
    pub threshold_denominator: i64,
    /// One threshold per node shared by all its products.
    pub product_independent: bool,
    /// Probability that a node starts adopted.
    pub adopted_fraction: f64,
    /// Nodes without in-neighbours always start adopted.
    pub isolated_adopted: bool,
    /// Undecided nodes offer every product instead of a random subset.
    pub offer_all: bool,
    /// Adopted nodes all start with this product instead of a random one.
    pub seed_product: Option<ProductId>,
    pub seed: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            nodes: 6,
            products: 2,
            density: 0.3,
            equitable: false,
            threshold_min: rat(1, 4),
            threshold_max: one(),
            threshold_denominator: 4,
            product_independent: false,
            adopted_fraction: 0.3,
            isolated_adopted: false,
            offer_all: false,
            seed_product: None,
            seed: 0,
        }
    }
}

impl RandomSpec {
    /// Equitable, sparse, high thresholds: the shape used for scaling runs.
    pub fn sparse_equitable(nodes: usize, products: usize, avg_in_degree: f64, seed: u64) -> Self {
        RandomSpec {
            nodes,
            products,
            density: if nodes > 1 {
                (avg_in_degree / (nodes - 1) as f64).min(1.0)
            } else {
                0.0
            },
            equitable: true,
            threshold_min: rat(5, 8),
            threshold_max: one(),
            threshold_denominator: 8,
            product_independent: true,
            adopted_fraction: 0.05,
            isolated_adopted: true,
            offer_all: false,
            seed_product: None,
            seed,
        }
    }

    fn validate(&self) -> Result<Vec<i64>> {
        if self.nodes == 0 {
            return Err(Error::argument("a random network needs at least one node"));
        }
        if self.products == 0 || self.products > crate::network::MAX_PRODUCTS {
            return Err(Error::argument(format!(
                "product count must be in 1..={}",
                crate::network::MAX_PRODUCTS
            )));
        }
        for (name, p) in [("density", self.density), ("adopted fraction", self.adopted_fraction)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::argument(format!("{name} must lie in [0,1], got {p}")));
            }
        }
        if let Some(t) = self.seed_product {
            if t.0 >= self.products {
                return Err(Error::argument(format!("seed product {t} outside the universe")));
            }
        }
        let q = self.threshold_denominator;
        if q <= 0 {
            return Err(Error::argument("threshold denominator must be positive"));
        }
        let grid: Vec<i64> = (1..=q)
            .filter(|&k| {
                let v = rat(k, q);
                v >= self.threshold_min && v <= self.threshold_max
            })
            .collect();
        if grid.is_empty() {
            return Err(Error::argument(format!(
                "no threshold k/{q} in (0,1] lies within [{}, {}]",
                rational::format(&self.threshold_min),
                rational::format(&self.threshold_max)
            )));
        }
        Ok(grid)
    }
}

/// Product names `t1..tk`.
pub fn product_names(count: usize) -> Vec<String> {
    (1..=count).map(|k| format!("t{k}")).collect()
}

/// A seeded random network. Equal specs give identical networks. Edges are
/// drawn per target (binomial in-degree, then a uniform source sample), so
/// sparse large networks cost time proportional to their size.
pub fn gen_random(spec: &RandomSpec) -> Result<Network> {
    let grid = spec.validate()?;
    let n = spec.nodes;
    let pc = spec.products;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    let mut in_degree = vec![0usize; n];
    if n > 1 && spec.density > 0.0 {
        let degree = Binomial::new((n - 1) as u64, spec.density)
            .map_err(|e| Error::argument(format!("invalid density: {e}")))?;
        for (target, slot) in in_degree.iter_mut().enumerate() {
            let k = degree.sample(&mut rng) as usize;
            *slot = k;
            if k == 0 {
                continue;
            }
            let mut sources: Vec<usize> = index::sample(&mut rng, n - 1, k)
                .into_iter()
                .map(|s| if s >= target { s + 1 } else { s })
                .collect();
            sources.sort_unstable();
            if spec.equitable {
                let w = rat(1, k as i64);
                edges.extend(sources.into_iter().map(|source| Edge { source, target, weight: w }));
            } else {
                let parts: Vec<i64> = (0..k).map(|_| rng.random_range(1..=4)).collect();
                let total: i64 = parts.iter().sum();
                let denom = total + rng.random_range(0..=total);
                edges.extend(sources.into_iter().zip(parts).map(|(source, part)| Edge {
                    source,
                    target,
                    weight: rat(part, denom),
                }));
            }
        }
    }
    let mut availability = Vec::with_capacity(n);
    let mut thresholds = Vec::with_capacity(n);
    for &deg in &in_degree {
        let adopted = pc == 1
            || (spec.isolated_adopted && deg == 0)
            || rng.random_bool(spec.adopted_fraction);
        let avail = if adopted {
            let t = spec.seed_product.unwrap_or_else(|| ProductId(rng.random_range(0..pc)));
            ProductSet::singleton(t)
        } else if spec.offer_all {
            ProductSet::all(pc)
        } else {
            loop {
                let s: ProductSet = (0..pc)
                    .filter(|_| rng.random_bool(0.5))
                    .map(ProductId)
                    .collect();
                if s.len() >= 2 {
                    break s;
                }
            }
        };
        let mut draw = || rat(grid[rng.random_range(0..grid.len())], spec.threshold_denominator);
        let shared = draw();
        let theta: Vec<(ProductId, Rational)> = avail
            .iter()
            .map(|t| (t, if spec.product_independent { shared } else { draw() }))
            .collect();
        availability.push(avail);
        thresholds.push(theta);
    }
    let graph = WeightedDigraph::new(n, edges)?;
    Network::new(graph, product_names(pc), availability, thresholds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    const T1: ProductId = ProductId(0);
    const T2: ProductId = ProductId(1);
    const T3: ProductId = ProductId(2);

    fn v(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    #[test]
    fn normalization_and_partition() {
        assert_eq!(normalize(&v(&[(1, 1), (3, 1)]), one()).unwrap(), v(&[(1, 4), (3, 4)]));
        assert!(normalize(&[], one()).is_err());
        assert!(normalize(&v(&[(0, 1)]), one()).is_err());
        assert!(partition_solvable(&v(&[(1, 8), (1, 8), (1, 4)])));
        assert!(!partition_solvable(&v(&[(3, 10), (1, 10), (1, 10)])));
    }

    #[test]
    fn final_gadget_examples() {
        let yes = gen_final_gadget(&v(&[(1, 8), (1, 8), (1, 4)])).unwrap();
        assert!(oracle::final_exists_all_adopted(&yes, 100_000).unwrap());
        let no = gen_final_gadget(&v(&[(3, 10), (1, 10), (1, 10)])).unwrap();
        assert!(!oracle::final_exists_all_adopted(&no, 100_000).unwrap());
        // A never adopts t2, B never t1
        let space = oracle::explore(&yes, &oracle::SearchOptions::with_budget(100_000)).unwrap();
        for s in space.states() {
            assert_ne!(s.adopted(3), Some(T2));
            assert_ne!(s.adopted(4), Some(T1));
        }
    }

    #[test]
    fn adoption1_gadget_examples() {
        let g = gen_adoption1_gadget(&v(&[(1, 4), (1, 4), (1, 2)])).unwrap();
        assert!(!oracle::adoption1_unavoidable_some(&g.network, g.designated, 100_000).unwrap());
        let g = gen_adoption1_gadget(&v(&[(3, 5), (1, 5), (1, 5)])).unwrap();
        assert!(oracle::adoption1_unavoidable_some(&g.network, g.designated, 100_000).unwrap());
        let finals = oracle::enumerate(&g.network, 100_000).unwrap();
        assert!((0..3).all(|i| finals.always_adopts_some(i)));
    }

    #[test]
    fn adoption2_gadget_examples() {
        let eps = rat(1, 8);
        let g = gen_adoption2_gadget(&v(&[(1, 4), (1, 4), (1, 2)]), eps).unwrap();
        assert!(!oracle::adoption2_unavoidable_given(&g.network, g.designated, T3, 100_000).unwrap());
        let g = gen_adoption2_gadget(&v(&[(3, 5), (1, 5), (1, 5)]), eps).unwrap();
        assert!(oracle::adoption2_unavoidable_given(&g.network, g.designated, T3, 100_000).unwrap());
        let space = oracle::explore(&g.network, &oracle::SearchOptions::with_budget(100_000)).unwrap();
        for s in space.states() {
            assert!(matches!(s.adopted(g.designated), None | Some(T3)));
        }
        assert!(gen_adoption2_gadget(&v(&[(1, 2)]), rat(1, 2)).is_err());
    }

    #[test]
    fn min_gadget_counts() {
        let eps = rat(1, 8);
        for m in 1..=3 {
            let yes = gen_min_adoption_gadget(&v(&[(1, 4), (1, 4), (1, 2)]), eps, m).unwrap();
            assert_eq!(oracle::min_adoption_exact(&yes.network, T3, 1_000_000).unwrap(), T3_SEEDS);
            let no = gen_min_adoption_gadget(&v(&[(3, 5), (1, 5), (1, 5)]), eps, m).unwrap();
            assert_eq!(oracle::min_adoption_exact(&no.network, T3, 1_000_000).unwrap(), m + 5);
        }
        assert!(gen_min_adoption_gadget(&v(&[(1, 2)]), eps, 0).is_err());
    }

    #[test]
    fn switch_witness_shape() {
        let net = gen_switch_witness();
        assert_eq!(net.node_count(), 4);
        assert_eq!(oracle::enumerate(&net, 100).unwrap().len(), 2);
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        let spec = RandomSpec { seed: 7, ..RandomSpec::default() };
        let a = gen_random(&spec).unwrap();
        let b = gen_random(&spec).unwrap();
        assert_eq!(a, b);
        let other = gen_random(&RandomSpec { seed: 8, ..spec.clone() }).unwrap();
        assert_eq!(other.node_count(), 6);

        let eq = gen_random(&RandomSpec { equitable: true, density: 0.6, ..spec.clone() }).unwrap();
        assert!(eq.is_equitable());

        let empty = gen_random(&RandomSpec { density: 0.0, ..spec.clone() }).unwrap();
        assert_eq!(empty.graph().edge_count(), 0);
    }

    #[test]
    fn random_rejects_bad_parameters() {
        let bad = [
            RandomSpec { nodes: 0, ..RandomSpec::default() },
            RandomSpec { products: 0, ..RandomSpec::default() },
            RandomSpec { density: 1.5, ..RandomSpec::default() },
            RandomSpec { threshold_min: rat(1, 3), threshold_max: rat(1, 3), threshold_denominator: 4, ..RandomSpec::default() },
        ];
        for spec in bad {
            assert!(matches!(gen_random(&spec), Err(Error::Argument(_))), "{spec:?}");
        }
    }

    #[test]
    fn sparse_equitable_has_expected_shape() {
        let net = gen_random(&RandomSpec::sparse_equitable(2000, 4, 8.0, 3)).unwrap();
        assert!(net.is_equitable());
        assert!(net.has_product_independent_thresholds());
        let avg = net.graph().edge_count() as f64 / 2000.0;
        assert!((6.0..10.0).contains(&avg), "{avg}");
        let _ = T1;
    }
}
