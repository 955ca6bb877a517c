//! Polynomial answers to the adoption questions, with exhaustive fallbacks
//! for the variants that are hard in general.
//!
//! Everything here is built on the single-product closure: starting from the
//! current adopters of `t`, let every node that can adopt `t` do so, round
//! after round, and never adopt anything else. Because a node's `t`-weight
//! only grows along any reduction, the closure's `t`-adopters are exactly the
//! nodes that adopt `t` in at least one final network.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{AdoptionEvent, Network, ProductId, ProductSet, ReductionTrace};
use crate::oracle::{self, SearchOptions};
use crate::rational;

/// The `t`-closure of `net` together with its fast `t`-only rounds.
pub fn product_closure_trace(net: &Network, t: ProductId) -> Result<(Network, ReductionTrace)> {
    net.check_product(t)?;
    let n = net.node_count();
    let graph = net.graph();
    let mut avail = net.availability_map().to_vec();
    let open = |avail: &[ProductSet], i: usize| avail[i].len() >= 2 && avail[i].contains(t);

    let mut support = vec![rational::zero(); n];
    let mut trace = ReductionTrace::new();
    let mut frontier: Vec<usize> = (0..n).filter(|&i| avail[i].single() == Some(t)).collect();
    let mut round: Vec<usize> = (0..n)
        .filter(|&i| open(&avail, i) && !graph.has_neighbours(i))
        .collect();
    loop {
        for &i in &frontier {
            for &(j, w) in graph.outgoing(i) {
                if open(&avail, j) {
                    let theta = net.stored_threshold(j, t).expect("t available");
                    let was = support[j] >= theta;
                    support[j] += w;
                    if !was && support[j] >= theta {
                        round.push(j);
                    }
                }
            }
        }
        if round.is_empty() {
            break;
        }
        round.sort_unstable();
        for &j in &round {
            avail[j] = ProductSet::singleton(t);
        }
        trace.push_step(round.iter().map(|&j| AdoptionEvent::new(j, t)));
        frontier = std::mem::take(&mut round);
    }
    Ok((net.with_availability(avail), trace))
}

/// Adopt `t` wherever possible, and nothing else.
pub fn product_closure(net: &Network, t: ProductId) -> Result<Network> {
    Ok(product_closure_trace(net, t)?.0)
}

/// Completes `net` to a final network: repeatedly the lowest-id node that
/// can adopt something adopts its lowest-id adoptable product.
pub fn complete_in_id_order(net: &Network, mut on_adopt: impl FnMut(AdoptionEvent)) -> Network {
    let graph = net.graph();
    let mut current = net.clone();
    let mut candidates: BTreeSet<usize> = (0..net.node_count()).collect();
    while let Some(i) = candidates.pop_first() {
        if let Some(t) = current.adoptable_products(i).first() {
            let event = AdoptionEvent::new(i, t);
            on_adopt(event);
            current = current.with_adoption(i, t);
            candidates.extend(graph.outgoing(i).iter().map(|(j, _)| *j));
        }
    }
    current
}

/// ADOPTION 4: does `node` adopt `t` in some final network?
pub fn adoption4_possible_given(net: &Network, node: usize, t: ProductId) -> Result<bool> {
    net.check_node(node)?;
    Ok(product_closure(net, t)?.adopted(node) == Some(t))
}

/// ADOPTION 3: does `node` adopt anything in some final network?
pub fn adoption3_possible_some(net: &Network, node: usize) -> Result<bool> {
    net.check_node(node)?;
    for t in net.availability(node).iter() {
        if adoption4_possible_given(net, node, t)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn competitor(net: &Network, t: ProductId) -> Result<ProductId> {
    net.check_product(t)?;
    if net.product_count() != 2 {
        return Err(Error::precondition(format!(
            "the polynomial algorithm needs exactly 2 products, the network has {}",
            net.product_count()
        )));
    }
    Ok(ProductId(1 - t.0))
}

/// The worst final network for `t` among two products: flood with the
/// competitor first, then let `t` take what is left.
fn worst_case_for(net: &Network, t: ProductId) -> Result<Network> {
    let other = competitor(net, t)?;
    let flooded = product_closure(net, other)?;
    let worst = product_closure(&flooded, t)?;
    debug_assert!(
        (0..worst.node_count()).all(|i| !worst.adoptable_products(i).contains(other)),
        "t-adoptions never enable the saturated competitor"
    );
    Ok(worst)
}

/// ADOPTION 2 for two products: does `node` adopt `t` in every final network?
pub fn adoption2_two_products(net: &Network, node: usize, t: ProductId) -> Result<bool> {
    net.check_node(node)?;
    Ok(worst_case_for(net, t)?.adopted(node) == Some(t))
}

/// A number of adopters together with a final network achieving it.
#[derive(Debug, Clone)]
pub struct Spread {
    pub count: usize,
    pub witness: Network,
}

/// MAX-ADOPTION: the most `t`-adopters over all final networks.
pub fn max_adoption(net: &Network, t: ProductId) -> Result<Spread> {
    let closed = product_closure(net, t)?;
    let count = closed.adopter_count(t);
    let witness = complete_in_id_order(&closed, |e| {
        debug_assert_ne!(e.product, t, "the t-closure is saturated");
    });
    Ok(Spread { count, witness })
}

/// MIN-ADOPTION for two products: saturate the competitor, then perform only
/// the adoptions needed to reach a final network.
pub fn min_adoption_two_products(net: &Network, t: ProductId) -> Result<Spread> {
    let other = competitor(net, t)?;
    let flooded = product_closure(net, other)?;
    let witness = complete_in_id_order(&flooded, |e| {
        debug_assert_eq!(e.product, t, "only t-adoptions remain after flooding");
    });
    Ok(Spread {
        count: witness.adopter_count(t),
        witness,
    })
}

/// How an answer was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Polynomial,
    /// Exhaustive enumeration of final networks; exponential in general.
    ExhaustiveFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solved<T> {
    pub value: T,
    pub method: Method,
}

impl<T> Solved<T> {
    fn polynomial(value: T) -> Self {
        Solved {
            value,
            method: Method::Polynomial,
        }
    }

    fn exhaustive(value: T) -> Self {
        Solved {
            value,
            method: Method::ExhaustiveFallback,
        }
    }
}

/// ADOPTION 1 (hard even for two products): always exhaustive.
pub fn adoption1(net: &Network, node: usize, opts: &SearchOptions) -> Result<Solved<bool>> {
    oracle::adoption1_unavoidable_some_with(net, node, opts).map(Solved::exhaustive)
}

/// ADOPTION 2: polynomial for two products, exhaustive otherwise.
pub fn adoption2(
    net: &Network,
    node: usize,
    t: ProductId,
    opts: &SearchOptions,
) -> Result<Solved<bool>> {
    if net.product_count() == 2 {
        adoption2_two_products(net, node, t).map(Solved::polynomial)
    } else {
        oracle::adoption2_unavoidable_given_with(net, node, t, opts).map(Solved::exhaustive)
    }
}

/// MIN-ADOPTION: polynomial for two products, exhaustive otherwise.
pub fn min_adoption(net: &Network, t: ProductId, opts: &SearchOptions) -> Result<Solved<usize>> {
    if net.product_count() == 2 {
        min_adoption_two_products(net, t).map(|s| Solved::polynomial(s.count))
    } else {
        oracle::min_adoption_exact_with(net, t, opts).map(Solved::exhaustive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;
    use crate::rational::{one, rat};

    const T1: ProductId = ProductId(0);
    const T2: ProductId = ProductId(1);

    fn switch_witness() -> Network {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        let s1 = b.node(&[0], one());
        let s2 = b.node(&[1], one());
        let m = b.node(&[0, 1], one());
        let c = b.node(&[0, 1], rat(1, 2));
        b.edge(s1, m, one()).edge(m, c, rat(1, 2)).edge(s2, c, rat(1, 2));
        b.build().unwrap()
    }

    #[test]
    fn closure_without_seeds_is_identity() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[1], one());
        b.node(&[0, 1], one());
        b.edge(0, 1, one());
        let net = b.build().unwrap();
        assert_eq!(product_closure(&net, T1).unwrap(), net);
    }

    #[test]
    fn closure_runs_down_a_chain() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0], one());
        for i in 1..5 {
            b.node(&[0, 1], one());
            b.edge(i - 1, i, one());
        }
        let net = b.build().unwrap();
        let (closed, trace) = product_closure_trace(&net, T1).unwrap();
        assert!(closed.is_constant(T1));
        assert_eq!(trace.step_count(), 4);
        assert_eq!(trace.replay(&net).unwrap(), closed);
        assert_eq!(product_closure(&closed, T1).unwrap(), closed);
    }

    #[test]
    fn adoption4_cases() {
        let net = switch_witness();
        assert!(adoption4_possible_given(&net, 0, T1).unwrap());
        assert!(!adoption4_possible_given(&net, 0, T2).unwrap());
        assert!(adoption4_possible_given(&net, 3, T1).unwrap());
        assert!(adoption4_possible_given(&net, 3, T2).unwrap());
        assert!(!adoption4_possible_given(&net, 2, T2).unwrap());
    }

    #[test]
    fn adoption3_cases() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        let isolated = b.node(&[0, 1], one());
        let x = b.node(&[0, 1], one());
        let y = b.node(&[0, 1], one());
        b.edge(x, y, rat(0, 1));
        let net = b.build().unwrap();
        assert!(adoption3_possible_some(&net, isolated).unwrap());
        assert!(!adoption3_possible_some(&net, y).unwrap());
    }

    #[test]
    fn adoption2_cases() {
        let net = switch_witness();
        assert!(adoption2_two_products(&net, 0, T1).unwrap());
        assert!(!adoption2_two_products(&net, 3, T1).unwrap());
        assert!(!adoption2_two_products(&net, 3, T2).unwrap());
        assert!(adoption2_two_products(&net, 2, T1).unwrap());

        let mut b = NetworkBuilder::new(&["t1", "t2", "t3"]);
        b.node(&[0], one());
        assert!(matches!(
            adoption2_two_products(&b.build().unwrap(), 0, T1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn max_and_min_on_switch_witness() {
        let net = switch_witness();
        let max = max_adoption(&net, T2).unwrap();
        assert_eq!(max.count, 2);
        assert!(max.witness.is_final());
        assert_eq!(max.witness.adopter_count(T2), 2);
        let min = min_adoption_two_products(&net, T2).unwrap();
        assert_eq!(min.count, 1);
        assert!(min.witness.is_final());
    }

    #[test]
    fn constant_network_spreads() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        for _ in 0..3 {
            b.node(&[0], one());
        }
        let net = b.build().unwrap();
        assert_eq!(max_adoption(&net, T1).unwrap().count, 3);
        assert_eq!(min_adoption_two_products(&net, T1).unwrap().count, 3);
        assert_eq!(max_adoption(&net, T2).unwrap().count, 0);
    }

    #[test]
    fn dispatch_marks_the_method() {
        let net = switch_witness();
        let opts = SearchOptions::default();
        assert_eq!(adoption2(&net, 3, T1, &opts).unwrap().method, Method::Polynomial);
        assert_eq!(adoption1(&net, 3, &opts).unwrap().method, Method::ExhaustiveFallback);

        let mut b = NetworkBuilder::new(&["t1", "t2", "t3"]);
        b.node(&[0, 2], one());
        let three = b.build().unwrap();
        let got = adoption2(&three, 0, T1, &opts).unwrap();
        assert_eq!(got, Solved { value: false, method: Method::ExhaustiveFallback });
        let min = min_adoption(&three, ProductId(2), &opts).unwrap();
        assert_eq!(min, Solved { value: 0, method: Method::ExhaustiveFallback });
    }
}
