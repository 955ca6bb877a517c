//! Fast reductions, switching, and the unique-outcome decision.
//!
//! A fast step lets every node that can adopt something adopt it at once.
//! Running fast steps from the initial network until the network is final
//! or first becomes ambivalent (some node can adopt two products, or some
//! adopter could have taken a different product it was initially offered)
//! gives the contraction sequence; the initial network has a unique outcome
//! iff that sequence ends in a non-ambivalent network.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{AdoptionEvent, Network, ProductId, ProductSet, ReductionTrace};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    UniqueOutcome,
    AmbivalentMultiAdopt {
        node: usize,
        products: Vec<ProductId>,
    },
    AmbivalentSwitch {
        node: usize,
        from: ProductId,
        to: ProductId,
    },
}

impl Verdict {
    pub fn is_unique(&self) -> bool {
        matches!(self, Verdict::UniqueOutcome)
    }
}

#[derive(Debug, Clone)]
pub struct ContractionResult {
    /// The fast steps performed, one trace step per round.
    pub trace: ReductionTrace,
    /// The final network, or the first ambivalent one.
    pub terminal: Network,
    pub verdict: Verdict,
}

/// Whether node `i`, adopted in `current`, could instead have adopted another
/// product from its initial set given the adopters in `current`. Returns
/// `(from, to)` with the lowest such `to`.
pub fn can_switch(
    initial: &Network,
    current: &Network,
    node: usize,
) -> Result<Option<(ProductId, ProductId)>> {
    initial.check_node(node)?;
    current.check_node(node)?;
    let Some(from) = current.adopted(node) else {
        return Ok(None);
    };
    for to in initial.availability(node).iter().filter(|&t| t != from) {
        let theta = initial.threshold(node, to)?;
        if current.adopted_weight(node, to) >= theta {
            return Ok(Some((from, to)));
        }
    }
    Ok(None)
}

/// Some node of `current` can adopt two products, or can switch given
/// `initial`.
pub fn is_ambivalent(initial: &Network, current: &Network) -> Result<bool> {
    for i in 0..current.node_count() {
        if current.adoptable_products(i).len() >= 2 || can_switch(initial, current, i)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Runs the contraction sequence with per-(node, product) weight counters.
///
/// Counters exist for every product of a node's initial set, including after
/// the node adopts, so that switches are caught as soon as the competing
/// weight arrives. Each edge is processed once, when its source adopts.
pub fn contraction_sequence(net: &Network) -> ContractionResult {
    let n = net.node_count();
    let pc = net.product_count();
    let graph = net.graph();
    let initial = net.availability_map();

    if let Some(i) = (0..n).find(|&i| !graph.has_neighbours(i) && initial[i].len() >= 2) {
        return ContractionResult {
            trace: ReductionTrace::new(),
            terminal: net.clone(),
            verdict: Verdict::AmbivalentMultiAdopt {
                node: i,
                products: initial[i].iter().collect(),
            },
        };
    }

    let theta = |j: usize, t: ProductId| -> Rational {
        net.stored_threshold(j, t)
            .expect("threshold defined on the initial availability")
    };
    let mut support = vec![rational::zero(); n * pc];
    let mut reached = vec![ProductSet::EMPTY; n];
    let mut avail = initial.to_vec();
    let mut trace = ReductionTrace::new();
    let mut last: Vec<usize> = (0..n).filter(|&i| initial[i].len() == 1).collect();
    let mut queued = vec![false; n];

    while !last.is_empty() {
        let mut touched = Vec::new();
        for &i in &last {
            let t = avail[i].single().expect("nodes in the last round adopted");
            for &(j, w) in graph.outgoing(i) {
                if initial[j].contains(t) {
                    let slot = &mut support[j * pc + t.0];
                    *slot += w;
                    if *slot >= theta(j, t) {
                        reached[j] = reached[j].with(t);
                    }
                }
                if !queued[j] {
                    queued[j] = true;
                    touched.push(j);
                }
            }
        }
        touched.sort_unstable();
        for &j in &touched {
            queued[j] = false;
        }

        if let Some(&j) = touched.iter().find(|&&j| reached[j].len() >= 2) {
            let verdict = match avail[j].single() {
                None => Verdict::AmbivalentMultiAdopt {
                    node: j,
                    products: reached[j].iter().collect(),
                },
                Some(from) => Verdict::AmbivalentSwitch {
                    node: j,
                    from,
                    to: reached[j]
                        .iter()
                        .find(|&t| t != from)
                        .expect("two reached products"),
                },
            };
            return ContractionResult {
                trace,
                terminal: net.with_availability(avail),
                verdict,
            };
        }

        let step: Vec<AdoptionEvent> = touched
            .iter()
            .filter(|&&j| avail[j].len() >= 2)
            .filter_map(|&j| reached[j].single().map(|t| AdoptionEvent::new(j, t)))
            .collect();
        if step.is_empty() {
            break;
        }
        for e in &step {
            avail[e.node] = ProductSet::singleton(e.product);
        }
        last = step.iter().map(|e| e.node).collect();
        trace.push_step(step);
    }

    ContractionResult {
        trace,
        terminal: net.with_availability(avail),
        verdict: Verdict::UniqueOutcome,
    }
}

pub fn has_unique_outcome(net: &Network) -> bool {
    contraction_sequence(net).verdict.is_unique()
}

/// Unique-outcome test for networks whose thresholds all exceed 1/2: the
/// outcome is unique iff every node without neighbours has already adopted.
pub fn unique_outcome_high_threshold(net: &Network) -> Result<bool> {
    let half = rational::rat(1, 2);
    for i in 0..net.node_count() {
        for (t, theta) in net.node_thresholds(i) {
            if theta <= half {
                return Err(Error::precondition(format!(
                    "threshold of node {i} for product {} is {}, not above 1/2",
                    net.product_name(t),
                    rational::format(&theta)
                )));
            }
        }
    }
    Ok((0..net.node_count())
        .filter(|&i| !net.graph().has_neighbours(i))
        .all(|i| net.availability(i).len() == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;
    use crate::rational::{one, rat};

    const T1: ProductId = ProductId(0);
    const T2: ProductId = ProductId(1);

    /// s1 -> m -> c <- s2, where m can only take t1 and c first sees t2.
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
    fn all_adopted_network_is_unique_with_empty_trace() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0], one());
        b.node(&[1], one());
        b.edge(0, 1, one());
        let res = contraction_sequence(&b.build().unwrap());
        assert_eq!(res.verdict, Verdict::UniqueOutcome);
        assert!(res.trace.is_empty());
    }

    #[test]
    fn isolated_multi_product_node_exits_immediately() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0], one());
        b.node(&[0, 1], one());
        let net = b.build().unwrap();
        let res = contraction_sequence(&net);
        assert_eq!(
            res.verdict,
            Verdict::AmbivalentMultiAdopt {
                node: 1,
                products: vec![T1, T2]
            }
        );
        assert!(res.trace.is_empty());
        assert!(!has_unique_outcome(&net));
        assert!(is_ambivalent(&net, &net).unwrap());
    }

    #[test]
    fn switch_witness_contracts_to_a_switch() {
        let net = switch_witness();
        let res = contraction_sequence(&net);
        assert_eq!(
            res.verdict,
            Verdict::AmbivalentSwitch {
                node: 3,
                from: T2,
                to: T1
            }
        );
        assert_eq!(
            res.trace.steps(),
            vec![vec![AdoptionEvent::new(2, T1), AdoptionEvent::new(3, T2)]]
        );
        assert_eq!(can_switch(&net, &res.terminal, 3).unwrap(), Some((T2, T1)));
        assert!(is_ambivalent(&net, &res.terminal).unwrap());
        assert!(res.terminal.is_final());
        assert!(!has_unique_outcome(&net));
    }

    #[test]
    fn can_switch_negative_cases() {
        let net = switch_witness();
        // c not adopted yet
        assert_eq!(can_switch(&net, &net, 3).unwrap(), None);
        // c adopted t2 while m still undecided: t1 weight 0 < 1/2
        let mid = net.with_adoption(3, T2);
        assert_eq!(can_switch(&net, &mid, 3).unwrap(), None);
        assert!(can_switch(&net, &net, 17).is_err());
    }

    #[test]
    fn chain_has_unique_outcome() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        let s = b.node(&[0], one());
        let a = b.node(&[0, 1], one());
        let c = b.node(&[0, 1], one());
        b.edge(s, a, one()).edge(a, c, one());
        let net = b.build().unwrap();
        let res = contraction_sequence(&net);
        assert!(res.verdict.is_unique());
        assert_eq!(res.trace.step_count(), 2);
        assert!(res.terminal.is_constant(T1));
        assert!(!is_ambivalent(&net, &res.terminal).unwrap());
    }

    #[test]
    fn multi_adopt_stops_before_the_round() {
        // x adopts t1 in round one; y can adopt both products in the same
        // round, so nothing is applied.
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        let s1 = b.node(&[0], one());
        let s2 = b.node(&[1], one());
        let x = b.node(&[0, 1], one());
        let y = b.node(&[0, 1], rat(1, 2));
        b.edge(s1, x, one()).edge(s1, y, rat(1, 2)).edge(s2, y, rat(1, 2));
        let net = b.build().unwrap();
        let res = contraction_sequence(&net);
        assert_eq!(
            res.verdict,
            Verdict::AmbivalentMultiAdopt {
                node: y,
                products: vec![T1, T2]
            }
        );
        assert!(res.trace.is_empty());
        assert_eq!(res.terminal, net);
        let _ = x;
    }

    #[test]
    fn high_threshold_shortcut() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        let s = b.node(&[0], rat(3, 4));
        let a = b.node(&[0, 1], rat(3, 4));
        b.edge(s, a, one());
        let net = b.build().unwrap();
        assert!(unique_outcome_high_threshold(&net).unwrap());
        assert_eq!(unique_outcome_high_threshold(&net).unwrap(), has_unique_outcome(&net));

        b.node(&[0, 1], rat(3, 4));
        let net = b.build().unwrap();
        assert!(!unique_outcome_high_threshold(&net).unwrap());
        assert!(!has_unique_outcome(&net));

        b.node(&[0], rat(1, 2));
        let err = unique_outcome_high_threshold(&b.build().unwrap()).unwrap_err();
        assert!(matches!(err, Error::Precondition(msg) if msg.contains("node 3")));
    }
}
