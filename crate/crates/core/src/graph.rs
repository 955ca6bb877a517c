//! Weighted directed graphs with exact weights.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A weighted edge `source -> target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: Rational,
}

/// Node set `0..n` plus weighted directed edges.
///
/// Both incoming and outgoing adjacency lists are kept, sorted by the other
/// endpoint, so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    incoming: Vec<Vec<(usize, Rational)>>,
    outgoing: Vec<Vec<(usize, Rational)>>,
    edge_count: usize,
}

impl WeightedDigraph {
    pub fn empty(node_count: usize) -> Self {
        WeightedDigraph {
            incoming: vec![Vec::new(); node_count],
            outgoing: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph, rejecting self-loops, parallel edges, weights outside
    /// `[0,1]` and nodes whose incoming weight exceeds 1.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut graph = WeightedDigraph::empty(node_count);
        for edge in edges {
            if edge.source >= node_count || edge.target >= node_count {
                return Err(Error::semantic(
                    Some(edge.target.min(edge.source)),
                    format!(
                        "edge {} -> {} references a node outside 0..{}",
                        edge.source, edge.target, node_count
                    ),
                ));
            }
            if edge.source == edge.target {
                return Err(Error::semantic(
                    Some(edge.target),
                    format!("self-loop on node {}", edge.target),
                ));
            }
            if !rational::in_unit_closed(&edge.weight) {
                return Err(Error::semantic(
                    Some(edge.target),
                    format!(
                        "weight {} of edge {} -> {} is outside [0,1]",
                        rational::format(&edge.weight),
                        edge.source,
                        edge.target
                    ),
                ));
            }
            graph.incoming[edge.target].push((edge.source, edge.weight));
            graph.outgoing[edge.source].push((edge.target, edge.weight));
            graph.edge_count += 1;
        }
        for (target, list) in graph.incoming.iter_mut().enumerate() {
            list.sort_by_key(|(source, _)| *source);
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::semantic(
                    Some(target),
                    format!("parallel edges {} -> {}", w[0].0, target),
                ));
            }
            let total: Rational = list.iter().map(|(_, w)| *w).sum();
            if total > rational::one() {
                return Err(Error::semantic(
                    Some(target),
                    format!(
                        "incoming weight of node {} sums to {} > 1",
                        target,
                        rational::format(&total)
                    ),
                ));
            }
        }
        for list in graph.outgoing.iter_mut() {
            list.sort_by_key(|(target, _)| *target);
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.incoming.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `N(i)` with weights `w_ji`, sorted by `j`.
    pub fn incoming(&self, node: usize) -> &[(usize, Rational)] {
        &self.incoming[node]
    }

    pub fn outgoing(&self, node: usize) -> &[(usize, Rational)] {
        &self.outgoing[node]
    }

    pub fn has_neighbours(&self, node: usize) -> bool {
        !self.incoming[node].is_empty()
    }

    pub fn weight(&self, source: usize, target: usize) -> Option<Rational> {
        self.incoming[target]
            .binary_search_by_key(&source, |(s, _)| *s)
            .ok()
            .map(|idx| self.incoming[target][idx].1)
    }

    /// All edges, ordered by `(target, source)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.incoming.iter().enumerate().flat_map(|(target, list)| {
            list.iter().map(move |(source, weight)| Edge {
                source: *source,
                target,
                weight: *weight,
            })
        })
    }

    /// The same graph without any edge into a node for which `drop_into` holds.
    pub fn without_edges_into(&self, mut drop_into: impl FnMut(usize) -> bool) -> Self {
        let keep: Vec<bool> = (0..self.node_count()).map(|i| !drop_into(i)).collect();
        let incoming: Vec<Vec<(usize, Rational)>> = self
            .incoming
            .iter()
            .enumerate()
            .map(|(i, list)| if keep[i] { list.clone() } else { Vec::new() })
            .collect();
        let outgoing = self
            .outgoing
            .iter()
            .map(|list| list.iter().filter(|(t, _)| keep[*t]).cloned().collect())
            .collect();
        let edge_count = incoming.iter().map(Vec::len).sum();
        WeightedDigraph {
            incoming,
            outgoing,
            edge_count,
        }
    }
}
