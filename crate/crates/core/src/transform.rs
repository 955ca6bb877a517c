//! Rewriting networks into equitable networks with product-independent
//! thresholds.
//!
//! Both transformations subdivide the in-edges of every node `i` that still
//! has a choice (`N(i) ≠ ∅`, `|p(i)| ≥ 2`): the old in-edges are replaced by
//! auxiliary nodes that each decide one product for `i`, and `i` adopts as
//! soon as one of its auxiliaries has. Auxiliaries offer their product and
//! a fresh neutral product `t0` that no node ever adopts. Every node of the
//! output then gets equal in-weights `1/|N(i)|`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedDigraph};
use crate::network::{Network, ProductId, ProductSet};
use crate::oracle::{self, SearchOptions};
use crate::rational::{self, Rational};

/// Default cap on the number of auxiliary nodes `transform_general` may add.
pub const DEFAULT_AUX_CAP: usize = 4096;

/// Largest in-neighbourhood whose subsets `transform_general` enumerates.
pub const MAX_SUBSET_NEIGHBOURS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AuxKind {
    /// Fires for `target` once every member of `members` adopted `product`.
    Subset {
        members: Vec<usize>,
        product: ProductId,
        target: usize,
    },
    /// Fires for `target` once `target`'s original condition for `product`
    /// holds.
    Product { product: ProductId, target: usize },
    /// Never fires. Added for a node that has neighbours but no way to reach
    /// any threshold, so that it does not become isolated.
    Blocker { target: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuxNode {
    pub id: usize,
    #[serde(flatten)]
    pub kind: AuxKind,
}

/// How a transformed network relates to the one it came from. Original nodes
/// keep their ids `0..original_nodes`; auxiliaries follow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformMap {
    pub original_nodes: usize,
    pub aux: Vec<AuxNode>,
    pub neutral: ProductId,
    pub neutral_name: String,
}

impl TransformMap {
    /// The availability map of `state` on original nodes.
    pub fn restrict(&self, state: &[ProductSet]) -> Vec<ProductSet> {
        state[..self.original_nodes].to_vec()
    }
}

fn neutral_name(products: &[String]) -> String {
    let mut name = "t0".to_string();
    let mut k = 0;
    while products.contains(&name) {
        k += 1;
        name = format!("t0_{k}");
    }
    name
}

/// Minimal `S ⊆ candidates` (as sorted index lists into `candidates`) whose
/// weights sum to at least `theta`.
pub fn minimal_subsets(weights: &[Rational], theta: Rational) -> Vec<Vec<usize>> {
    let k = weights.len();
    assert!(k <= MAX_SUBSET_NEIGHBOURS, "too many candidates for subset enumeration");
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << k) {
        let members: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).collect();
        let sum: Rational = members.iter().map(|&b| weights[b]).sum();
        if sum >= theta && members.iter().all(|&b| sum - weights[b] < theta) {
            out.push(members);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Output under construction: original nodes first, auxiliaries appended.
struct Assembly {
    products: Vec<String>,
    neutral: ProductId,
    availability: Vec<ProductSet>,
    thresholds: Vec<Vec<(ProductId, Rational)>>,
    /// `(source, target)` pairs; weights are assigned at the end.
    edges: Vec<(usize, usize)>,
    aux: Vec<AuxNode>,
    original_nodes: usize,
}

impl Assembly {
    fn start(net: &Network) -> Assembly {
        let mut products = net.product_names().to_vec();
        let name = neutral_name(&products);
        products.push(name);
        let neutral = ProductId(products.len() - 1);
        let n = net.node_count();
        let graph = net.graph();
        let thresholds = (0..n)
            .map(|i| {
                if graph.has_neighbours(i) && net.availability(i).len() == 1 {
                    net.node_thresholds(i)
                } else {
                    // replaced later for qualifying nodes; never consulted for
                    // nodes without neighbours
                    net.availability(i).iter().map(|t| (t, rational::one())).collect()
                }
            })
            .collect();
        Assembly {
            products,
            neutral,
            availability: net.availability_map().to_vec(),
            thresholds,
            edges: Vec::new(),
            aux: Vec::new(),
            original_nodes: n,
        }
    }

    fn add_aux(&mut self, product: ProductId, theta: Rational, kind: AuxKind) -> usize {
        let id = self.availability.len();
        self.availability
            .push(ProductSet::singleton(product).with(self.neutral));
        self.thresholds
            .push(vec![(product, theta), (self.neutral, theta)]);
        self.aux.push(AuxNode { id, kind });
        id
    }

    fn finish(self) -> Result<(Network, TransformMap)> {
        let n = self.availability.len();
        let mut in_degree = vec![0i64; n];
        for &(_, t) in &self.edges {
            in_degree[t] += 1;
        }
        let graph = WeightedDigraph::new(
            n,
            self.edges.iter().map(|&(source, target)| Edge {
                source,
                target,
                weight: Rational::new(1, in_degree[target]),
            }),
        )?;
        let net = Network::new(graph, self.products.clone(), self.availability, self.thresholds)?;
        let map = TransformMap {
            original_nodes: self.original_nodes,
            aux: self.aux,
            neutral: self.neutral,
            neutral_name: self.products[self.neutral.0].clone(),
        };
        Ok((net, map))
    }
}

fn qualifies(net: &Network, i: usize) -> bool {
    net.graph().has_neighbours(i) && net.availability(i).len() >= 2
}

/// The subset transformation with the default auxiliary cap.
pub fn transform_general(net: &Network) -> Result<(Network, TransformMap)> {
    transform_general_with_cap(net, DEFAULT_AUX_CAP)
}

/// Works for arbitrary networks. For a qualifying node `i` and `t ∈ p(i)`,
/// one auxiliary per minimal `S` among the in-neighbours offering `t` whose
/// weight into `i` reaches `θ(i,t)`; it needs all of `S` to adopt `t`.
/// The output can be exponentially larger than the input.
pub fn transform_general_with_cap(net: &Network, cap: usize) -> Result<(Network, TransformMap)> {
    let mut out = Assembly::start(net);
    let graph = net.graph();
    for i in 0..net.node_count() {
        if !qualifies(net, i) {
            for &(j, _) in graph.incoming(i) {
                out.edges.push((j, i));
            }
            continue;
        }
        let incoming = graph.incoming(i);
        if incoming.len() > MAX_SUBSET_NEIGHBOURS {
            return Err(Error::SizeCap(format!(
                "node {i} has {} in-neighbours; subset enumeration is limited to {MAX_SUBSET_NEIGHBOURS}",
                incoming.len()
            )));
        }
        let avail = net.availability(i);
        let mut own = Vec::new();
        for t in avail.iter() {
            let theta = net.threshold(i, t)?;
            let candidates: Vec<(usize, Rational)> = incoming
                .iter()
                .copied()
                .filter(|(j, _)| net.availability(*j).contains(t))
                .collect();
            let weights: Vec<Rational> = candidates.iter().map(|(_, w)| *w).collect();
            for subset in minimal_subsets(&weights, theta) {
                if out.aux.len() >= cap {
                    return Err(Error::SizeCap(format!(
                        "the transformation needs more than {cap} auxiliary nodes"
                    )));
                }
                let members: Vec<usize> = subset.iter().map(|&b| candidates[b].0).collect();
                let a = out.add_aux(
                    t,
                    rational::one(),
                    AuxKind::Subset {
                        members: members.clone(),
                        product: t,
                        target: i,
                    },
                );
                out.edges.extend(members.iter().map(|&j| (j, a)));
                own.push(a);
            }
        }
        if own.is_empty() {
            if out.aux.len() >= cap {
                return Err(Error::SizeCap(format!(
                    "the transformation needs more than {cap} auxiliary nodes"
                )));
            }
            let t = avail.first().expect("non-empty availability");
            let a = out.add_aux(t, rational::one(), AuxKind::Blocker { target: i });
            out.edges.push((i, a));
            own.push(a);
        }
        let share = 1i64
            .checked_shl(incoming.len() as u32)
            .and_then(|x| x.checked_mul(avail.len() as i64))
            .expect("neighbourhood size is bounded");
        let theta = Rational::new(1, share);
        out.thresholds[i] = avail.iter().map(|t| (t, theta)).collect();
        out.edges.extend(own.iter().map(|&a| (a, i)));
    }
    out.finish()
}

/// The per-product transformation for equitable networks. For a qualifying
/// node `i` and `t ∈ p(i)`, one auxiliary with `θ(i,t)` fed by all of
/// `N(i)`; `i` itself gets `θ = 1/|p(i)|`. Adds at most `n·|P|` nodes.
pub fn transform_equitable(net: &Network) -> Result<(Network, TransformMap)> {
    if !net.is_equitable() {
        return Err(Error::precondition(
            "the per-product transformation needs an equitable network",
        ));
    }
    let mut out = Assembly::start(net);
    let graph = net.graph();
    for i in 0..net.node_count() {
        if !qualifies(net, i) {
            for &(j, _) in graph.incoming(i) {
                out.edges.push((j, i));
            }
            continue;
        }
        let avail = net.availability(i);
        for t in avail.iter() {
            let theta = net.threshold(i, t)?;
            let a = out.add_aux(t, theta, AuxKind::Product { product: t, target: i });
            out.edges.extend(graph.incoming(i).iter().map(|&(j, _)| (j, a)));
            out.edges.push((a, i));
        }
        let theta = Rational::new(1, avail.len() as i64);
        out.thresholds[i] = avail.iter().map(|t| (t, theta)).collect();
    }
    out.finish()
}

/// Outcome of comparing final networks on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    pub original_finals: usize,
    pub transformed_finals: usize,
    /// Original finals that no transformed final restricts to.
    pub missing: usize,
    /// Transformed finals whose restriction is not an original final.
    pub spurious: usize,
}

impl Correspondence {
    pub fn holds(&self) -> bool {
        self.missing == 0 && self.spurious == 0
    }
}

pub fn compare_finals(
    original: &Network,
    transformed: &Network,
    map: &TransformMap,
    opts: &SearchOptions,
) -> Result<Correspondence> {
    let left = oracle::enumerate_with(original, opts)?;
    let right = oracle::enumerate_with(transformed, opts)?;
    let originals: BTreeSet<Vec<ProductSet>> = left
        .finals()
        .iter()
        .map(|f| f.availability_map().to_vec())
        .collect();
    let restricted: Vec<Vec<ProductSet>> = right
        .finals()
        .iter()
        .map(|f| map.restrict(f.availability_map()))
        .collect();
    let covered: BTreeSet<&Vec<ProductSet>> = restricted.iter().collect();
    Ok(Correspondence {
        original_finals: originals.len(),
        transformed_finals: right.len(),
        missing: originals.iter().filter(|f| !covered.contains(f)).count(),
        spurious: restricted.iter().filter(|r| !originals.contains(*r)).count(),
    })
}

/// Every original final network is the restriction of a transformed final
/// network, and every transformed final restricts to an original final.
pub fn check_correspondence(
    original: &Network,
    transformed: &Network,
    map: &TransformMap,
    budget: usize,
) -> Result<bool> {
    Ok(compare_finals(original, transformed, map, &SearchOptions::with_budget(budget))?.holds())
}

/// Every reachable transformed network restricts to a reachable original one.
pub fn check_reachable_restriction(
    original: &Network,
    transformed: &Network,
    map: &TransformMap,
    opts: &SearchOptions,
) -> Result<bool> {
    let left = oracle::explore(original, opts)?;
    let right = oracle::explore(transformed, opts)?;
    let all = right
        .states()
        .all(|s| left.contains(&map.restrict(s.availability_map())));
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;
    use crate::rational::{one, rat};

    const T1: ProductId = ProductId(0);

    fn chain() -> Network {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        let a = b.node(&[0], one());
        let c = b.node(&[0, 1], one());
        b.edge(a, c, one());
        b.build().unwrap()
    }

    #[test]
    fn minimal_subsets_of_three_halves() {
        let subsets = minimal_subsets(&[rat(1, 2); 3], one());
        assert_eq!(subsets, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert!(minimal_subsets(&[rat(1, 4)], one()).is_empty());
        // a zero-weight member never belongs to a minimal subset
        assert_eq!(minimal_subsets(&[one(), rat(0, 1)], one()), vec![vec![0]]);
    }

    #[test]
    fn minimal_subsets_match_brute_force() {
        let weights = [rat(1, 3), rat(1, 6), rat(1, 4), rat(1, 4)];
        let theta = rat(1, 2);
        let got = minimal_subsets(&weights, theta);
        let sum = |s: &[usize]| -> Rational { s.iter().map(|&b| weights[b]).sum() };
        for mask in 1u32..16 {
            let s: Vec<usize> = (0..4).filter(|b| mask >> b & 1 == 1).collect();
            let qualifies = sum(&s) >= theta;
            let minimal = qualifies
                && (1u32..16).all(|m| m & mask != m || m == mask || {
                    let sub: Vec<usize> = (0..4).filter(|b| m >> b & 1 == 1).collect();
                    sum(&sub) < theta
                });
            assert_eq!(got.contains(&s), minimal, "{s:?}");
        }
    }

    #[test]
    fn all_singleton_network_only_gains_t0() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0], one());
        b.node(&[1], rat(1, 2));
        b.edge(0, 1, one());
        let net = b.build().unwrap();
        for (out, map) in [transform_general(&net).unwrap(), transform_equitable(&net).unwrap()] {
            assert_eq!(out.node_count(), 2);
            assert!(map.aux.is_empty());
            assert_eq!(out.product_names(), &["t1", "t2", "t0"]);
            assert!(out.is_equitable());
            assert!(check_correspondence(&net, &out, &map, 10).unwrap());
        }
    }

    #[test]
    fn general_chain_gets_one_aux() {
        let net = chain();
        let (out, map) = transform_general(&net).unwrap();
        assert_eq!(
            map.aux,
            vec![AuxNode {
                id: 2,
                kind: AuxKind::Subset {
                    members: vec![0],
                    product: T1,
                    target: 1
                }
            }]
        );
        assert_eq!(out.availability(2), ProductSet::singleton(T1).with(map.neutral));
        assert_eq!(out.threshold(1, T1).unwrap(), rat(1, 4));
        assert!(out.is_equitable());
        assert!(out.has_product_independent_thresholds());
        assert!(check_correspondence(&net, &out, &map, 1000).unwrap());
    }

    #[test]
    fn equitable_chain_gets_one_aux_per_product() {
        let net = chain();
        let (out, map) = transform_equitable(&net).unwrap();
        assert_eq!(map.aux.len(), 2);
        assert_eq!(out.threshold(1, T1).unwrap(), rat(1, 2));
        assert!(out.node_count() <= net.node_count() * (net.product_count() + 1));
        let finals = oracle::enumerate(&out, 1000).unwrap();
        assert_eq!(finals.len(), 1);
        let f = &finals.finals()[0];
        assert_eq!(f.adopted(1), Some(T1));
        assert_eq!(f.adopted(map.aux[1].id), None);
        assert!(check_correspondence(&net, &out, &map, 1000).unwrap());
    }

    #[test]
    fn non_equitable_input_is_rejected() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0], one());
        b.node(&[0, 1], one());
        b.edge(0, 1, rat(1, 2));
        assert!(matches!(
            transform_equitable(&b.build().unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn unreachable_threshold_gets_a_blocker() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0], one());
        b.node(&[0, 1], one());
        b.edge(0, 1, rat(1, 2));
        let net = b.build().unwrap();
        let (out, map) = transform_general(&net).unwrap();
        assert_eq!(map.aux, vec![AuxNode { id: 2, kind: AuxKind::Blocker { target: 1 } }]);
        assert!(check_correspondence(&net, &out, &map, 1000).unwrap());
        let finals = oracle::enumerate(&out, 1000).unwrap();
        assert!(finals.finals().iter().all(|f| f.adopted(1).is_none()));
    }

    #[test]
    fn competing_seeds_correspond() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        let s1 = b.node(&[0], one());
        let s2 = b.node(&[1], one());
        let c = b.node(&[0, 1], rat(1, 2));
        b.edge(s1, c, rat(1, 2)).edge(s2, c, rat(1, 2));
        let net = b.build().unwrap();
        for (out, map) in [transform_general(&net).unwrap(), transform_equitable(&net).unwrap()] {
            assert!(check_correspondence(&net, &out, &map, 10_000).unwrap());
            assert!(check_reachable_restriction(&net, &out, &map, &SearchOptions::with_budget(10_000)).unwrap());
        }
    }

    #[test]
    fn aux_cap_is_enforced() {
        let net = chain();
        assert!(matches!(
            transform_general_with_cap(&net, 0),
            Err(Error::SizeCap(_))
        ));
    }

    #[test]
    fn neutral_name_avoids_collisions() {
        assert_eq!(neutral_name(&["t0".into(), "t0_1".into()]), "t0_2");
    }
}
