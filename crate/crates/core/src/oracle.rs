//! Exhaustive exploration of every network reachable from an initial one.
//!
//! The search is breadth-first over single adoptions, memoized on the
//! adoption vector: per node either "still its initial set" or "adopted
//! product k". A simultaneous multi-node step is a sequence of single
//! adoptions that stay enabled (the weight of adopters only grows), so the
//! single-step space has the same final networks; the multi-step mode exists
//! to check exactly that. Frontier expansion can run data-parallel; the
//! memo table is updated sequentially in frontier order, so both strategies
//! visit states in the same order and produce identical results.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::network::{AdoptionEvent, Network, ProductId, ProductSet};

pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    /// One node adopts one product per step.
    #[default]
    Single,
    /// Any non-empty set of enabled adoptions, at most one per node.
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of distinct states to visit.
    pub budget: usize,
    pub steps: StepMode,
    pub execution: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            steps: StepMode::Single,
            execution: Execution::default(),
        }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: usize) -> Self {
        SearchOptions {
            budget,
            ..Self::default()
        }
    }
}

type Code = Box<[u8]>;

fn encode(initial: &[ProductSet], state: &[ProductSet]) -> Code {
    initial
        .iter()
        .zip(state)
        .map(|(init, s)| if s == init { 0 } else { s.single().expect("adopted").0 as u8 + 1 })
        .collect()
}

fn decode(initial: &[ProductSet], code: &[u8]) -> Vec<ProductSet> {
    initial
        .iter()
        .zip(code)
        .map(|(init, &c)| if c == 0 { *init } else { ProductSet::singleton(ProductId(c as usize - 1)) })
        .collect()
}

/// Every network reachable from `initial`, final or not.
#[derive(Debug, Clone)]
pub struct StateSpace {
    initial: Network,
    visited: HashSet<Code>,
    finals: Vec<Code>,
}

impl StateSpace {
    pub fn initial(&self) -> &Network {
        &self.initial
    }

    pub fn reachable_count(&self) -> usize {
        self.visited.len()
    }

    /// True iff the availability map `state` is reachable.
    pub fn contains(&self, state: &[ProductSet]) -> bool {
        let init = self.initial.availability_map();
        if state.len() != init.len() {
            return false;
        }
        let shaped = init
            .iter()
            .zip(state)
            .all(|(i, s)| s == i || (s.len() == 1 && s.is_subset(*i)));
        shaped && self.visited.contains(&encode(init, state))
    }

    /// Reachable networks in no particular order.
    pub fn states(&self) -> impl Iterator<Item = Network> + '_ {
        let init = self.initial.availability_map();
        self.visited
            .iter()
            .map(move |code| self.initial.with_availability(decode(init, code)))
    }

    pub fn final_set(&self) -> FinalSet {
        let init = self.initial.availability_map();
        let mut finals: Vec<Network> = self
            .finals
            .iter()
            .map(|code| self.initial.with_availability(decode(init, code)))
            .collect();
        finals.sort_by(|a, b| a.canonical_cmp(b));
        FinalSet {
            initial: self.initial.clone(),
            finals,
            reachable_count: self.visited.len(),
        }
    }
}

/// All distinct final networks reachable from `initial`, canonically ordered
/// by availability map.
#[derive(Debug, Clone)]
pub struct FinalSet {
    initial: Network,
    finals: Vec<Network>,
    reachable_count: usize,
}

impl FinalSet {
    pub fn initial(&self) -> &Network {
        &self.initial
    }

    pub fn finals(&self) -> &[Network] {
        &self.finals
    }

    pub fn len(&self) -> usize {
        self.finals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.finals.is_empty()
    }

    pub fn reachable_count(&self) -> usize {
        self.reachable_count
    }

    pub fn is_unique(&self) -> bool {
        self.finals.len() == 1
    }

    pub fn contains_constant(&self, t: ProductId) -> bool {
        self.finals.iter().any(|f| f.is_constant(t))
    }

    /// The only outcome is `[t]`.
    pub fn is_exactly_constant(&self, t: ProductId) -> bool {
        self.is_unique() && self.finals[0].is_constant(t)
    }

    pub fn min_adopters(&self, t: ProductId) -> Option<usize> {
        self.finals.iter().map(|f| f.adopter_count(t)).min()
    }

    pub fn max_adopters(&self, t: ProductId) -> Option<usize> {
        self.finals.iter().map(|f| f.adopter_count(t)).max()
    }

    /// `node` adopted `t` in every final network.
    pub fn always_adopts(&self, node: usize, t: ProductId) -> bool {
        self.finals.iter().all(|f| f.adopted(node) == Some(t))
    }

    /// `node` adopted `t` in some final network.
    pub fn sometimes_adopts(&self, node: usize, t: ProductId) -> bool {
        self.finals.iter().any(|f| f.adopted(node) == Some(t))
    }

    /// `node` adopted some product in every final network.
    pub fn always_adopts_some(&self, node: usize) -> bool {
        self.finals.iter().all(|f| f.adopted(node).is_some())
    }

    pub fn sometimes_adopts_some(&self, node: usize) -> bool {
        self.finals.iter().any(|f| f.adopted(node).is_some())
    }

    /// Some final network in which every node adopted.
    pub fn some_all_adopted(&self) -> Option<&Network> {
        self.finals.iter().find(|f| f.all_adopted())
    }
}

fn successors(net: &Network, init: &[ProductSet], code: &Code, steps: StepMode) -> Vec<Code> {
    let state = net.with_availability(decode(init, code));
    let events = state.enabled_events();
    match steps {
        StepMode::Single => events
            .iter()
            .map(|e| {
                let mut next = code.clone();
                next[e.node] = e.product.0 as u8 + 1;
                next
            })
            .collect(),
        StepMode::Multi => {
            // group enabled events by node, then take every non-empty choice
            let mut groups: Vec<Vec<AdoptionEvent>> = Vec::new();
            for e in events {
                match groups.last_mut() {
                    Some(g) if g[0].node == e.node => g.push(e),
                    _ => groups.push(vec![e]),
                }
            }
            let mut out = vec![code.clone()];
            for group in &groups {
                let mut extended = Vec::with_capacity(out.len() * (group.len() + 1));
                for partial in &out {
                    extended.push(partial.clone());
                    for e in group {
                        let mut next = partial.clone();
                        next[e.node] = e.product.0 as u8 + 1;
                        extended.push(next);
                    }
                }
                out = extended;
            }
            out.retain(|c| c != code);
            out
        }
    }
}

/// Explores the full reachable state space.
pub fn explore(net: &Network, opts: &SearchOptions) -> Result<StateSpace> {
    if opts.budget == 0 {
        return Err(Error::argument("the state budget must be positive"));
    }
    let init = net.availability_map();
    let start: Code = vec![0u8; net.node_count()].into_boxed_slice();
    let mut visited: HashSet<Code> = HashSet::new();
    visited.insert(start.clone());
    let mut finals = Vec::new();
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let expanded = exec::map(opts.execution, &frontier, |code| {
            successors(net, init, code, opts.steps)
        });
        let mut next = Vec::new();
        for (code, succs) in frontier.into_iter().zip(expanded) {
            if succs.is_empty() {
                finals.push(code);
                continue;
            }
            for s in succs {
                if !visited.contains(&s) {
                    if visited.len() >= opts.budget {
                        return Err(Error::Budget {
                            visited: visited.len() + 1,
                            limit: opts.budget,
                        });
                    }
                    visited.insert(s.clone());
                    next.push(s);
                }
            }
        }
        frontier = next;
    }
    Ok(StateSpace {
        initial: net.clone(),
        visited,
        finals,
    })
}

pub fn enumerate_with(net: &Network, opts: &SearchOptions) -> Result<FinalSet> {
    Ok(explore(net, opts)?.final_set())
}

/// Every distinct final network reachable from `net`, exploring at most
/// `budget` states.
pub fn enumerate(net: &Network, budget: usize) -> Result<FinalSet> {
    enumerate_with(net, &SearchOptions::with_budget(budget))
}

/// FINAL: does some final network have every node adopted?
pub fn final_exists_all_adopted(net: &Network, budget: usize) -> Result<bool> {
    Ok(enumerate(net, budget)?.some_all_adopted().is_some())
}

pub fn adoption1_unavoidable_some_with(net: &Network, node: usize, opts: &SearchOptions) -> Result<bool> {
    net.check_node(node)?;
    Ok(enumerate_with(net, opts)?.always_adopts_some(node))
}

/// ADOPTION 1: does `node` adopt some product in every final network?
pub fn adoption1_unavoidable_some(net: &Network, node: usize, budget: usize) -> Result<bool> {
    adoption1_unavoidable_some_with(net, node, &SearchOptions::with_budget(budget))
}

pub fn adoption2_unavoidable_given_with(
    net: &Network,
    node: usize,
    t: ProductId,
    opts: &SearchOptions,
) -> Result<bool> {
    net.check_node(node)?;
    net.check_product(t)?;
    Ok(enumerate_with(net, opts)?.always_adopts(node, t))
}

/// ADOPTION 2: does `node` adopt `t` in every final network?
pub fn adoption2_unavoidable_given(net: &Network, node: usize, t: ProductId, budget: usize) -> Result<bool> {
    adoption2_unavoidable_given_with(net, node, t, &SearchOptions::with_budget(budget))
}

pub fn min_adoption_exact_with(net: &Network, t: ProductId, opts: &SearchOptions) -> Result<usize> {
    net.check_product(t)?;
    Ok(enumerate_with(net, opts)?
        .min_adopters(t)
        .expect("every reduction space has a final network"))
}

/// MIN-ADOPTION: the fewest `t`-adopters over all final networks.
pub fn min_adoption_exact(net: &Network, t: ProductId, budget: usize) -> Result<usize> {
    min_adoption_exact_with(net, t, &SearchOptions::with_budget(budget))
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
    fn all_adopted_network_is_its_own_outcome() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0], one());
        b.node(&[1], one());
        let net = b.build().unwrap();
        let fs = enumerate(&net, 10).unwrap();
        assert_eq!(fs.finals(), std::slice::from_ref(&net));
        assert_eq!(fs.reachable_count(), 1);
        assert!(final_exists_all_adopted(&net, 10).unwrap());
    }

    #[test]
    fn isolated_two_product_node_has_two_outcomes() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        b.node(&[0, 1], one());
        let fs = enumerate(&b.build().unwrap(), 10).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs.finals()[0].adopted(0), Some(T1));
        assert_eq!(fs.finals()[1].adopted(0), Some(T2));
    }

    #[test]
    fn switch_witness_has_two_outcomes_differing_at_c() {
        // reachable: initial, {m}, {c=t1? no: c needs m}, ...
        // states: {}, {m:t1}, {c:t2}, {m:t1,c:t2}, {m:t1,c:t1} = 5
        let net = switch_witness();
        let fs = enumerate(&net, 100).unwrap();
        assert_eq!(fs.reachable_count(), 5);
        assert_eq!(fs.len(), 2);
        let (a, b) = (&fs.finals()[0], &fs.finals()[1]);
        assert_eq!(a.adopted(3), Some(T1));
        assert_eq!(b.adopted(3), Some(T2));
        for i in 0..3 {
            assert_eq!(a.availability(i), b.availability(i));
        }
        assert!(fs.finals().iter().all(Network::is_final));
    }

    #[test]
    fn multi_step_mode_agrees() {
        let net = switch_witness();
        let single = enumerate(&net, 100).unwrap();
        let multi = enumerate_with(
            &net,
            &SearchOptions {
                steps: StepMode::Multi,
                ..SearchOptions::with_budget(100)
            },
        )
        .unwrap();
        assert_eq!(single.finals(), multi.finals());
    }

    #[test]
    fn budget_is_enforced() {
        let mut b = NetworkBuilder::new(&["t1", "t2"]);
        for _ in 0..4 {
            b.node(&[0, 1], one());
        }
        let net = b.build().unwrap();
        // 3^4 = 81 reachable states
        assert_eq!(enumerate(&net, 81).unwrap().reachable_count(), 81);
        assert!(matches!(
            enumerate(&net, 80),
            Err(Error::Budget { visited: 81, limit: 80 })
        ));
        assert!(enumerate(&net, 0).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let net = switch_witness();
        let mut opts = SearchOptions::with_budget(100);
        opts.execution = Execution::Sequential;
        let a = enumerate_with(&net, &opts).unwrap();
        opts.execution = Execution::Parallel;
        let b = enumerate_with(&net, &opts).unwrap();
        assert_eq!(a.finals(), b.finals());
        assert_eq!(a.reachable_count(), b.reachable_count());
    }

    #[test]
    fn state_space_membership() {
        let net = switch_witness();
        let space = explore(&net, &SearchOptions::with_budget(100)).unwrap();
        assert!(space.contains(net.availability_map()));
        let mut bogus = net.availability_map().to_vec();
        bogus[3] = ProductSet::singleton(T1);
        assert!(!space.contains(&bogus));
        assert_eq!(space.states().count(), 5);
    }

    #[test]
    fn query_helpers() {
        let net = switch_witness();
        assert!(adoption1_unavoidable_some(&net, 3, 100).unwrap());
        assert!(adoption2_unavoidable_given(&net, 2, T1, 100).unwrap());
        assert!(!adoption2_unavoidable_given(&net, 3, T1, 100).unwrap());
        assert_eq!(min_adoption_exact(&net, T2, 100).unwrap(), 1);
        assert!(adoption1_unavoidable_some(&net, 17, 100).is_err());
    }
}
