//! Networks, the adoption condition and the reduction relation.
//!
//! A [`Network`] is an immutable value: the graph, product names and
//! thresholds are shared behind `Arc`s and only the availability map changes
//! from one state to the next. Reductions return new networks.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedDigraph};
use crate::rational::{self, Rational};

/// Maximum size of a product universe.
pub const MAX_PRODUCTS: usize = 64;

/// Dense index into a network's product universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProductId(pub usize);

impl fmt::Display for ProductId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A set of products, stored as a bit mask.
///
/// Ordering is lexicographic over the ascending list of member ids, which is
/// the order used for canonical listings of networks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ProductSet(u64);

impl ProductSet {
    pub const EMPTY: ProductSet = ProductSet(0);

    pub fn singleton(t: ProductId) -> Self {
        ProductSet(1 << t.0)
    }

    /// The set `{0, .., count-1}`.
    pub fn all(count: usize) -> Self {
        if count >= 64 {
            ProductSet(u64::MAX)
        } else {
            ProductSet((1u64 << count) - 1)
        }
    }

    pub fn contains(self, t: ProductId) -> bool {
        t.0 < 64 && self.0 & (1 << t.0) != 0
    }

    pub fn with(self, t: ProductId) -> Self {
        ProductSet(self.0 | (1 << t.0))
    }

    pub fn without(self, t: ProductId) -> Self {
        ProductSet(self.0 & !(1 << t.0))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The adopted product, if the set is a singleton.
    pub fn single(self) -> Option<ProductId> {
        (self.len() == 1).then(|| ProductId(self.0.trailing_zeros() as usize))
    }

    pub fn first(self) -> Option<ProductId> {
        (!self.is_empty()).then(|| ProductId(self.0.trailing_zeros() as usize))
    }

    pub fn is_subset(self, other: ProductSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ProductId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let t = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(ProductId(t))
        })
    }

    pub fn bits(self) -> u64 {
        self.0
    }
}

impl FromIterator<ProductId> for ProductSet {
    fn from_iter<I: IntoIterator<Item = ProductId>>(iter: I) -> Self {
        iter.into_iter().fold(ProductSet::EMPTY, ProductSet::with)
    }
}

impl Ord for ProductSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for ProductSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ProductSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|t| t.0)).finish()
    }
}

/// One node adopting one product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AdoptionEvent {
    pub node: usize,
    pub product: ProductId,
}

impl AdoptionEvent {
    pub fn new(node: usize, product: ProductId) -> Self {
        AdoptionEvent { node, product }
    }
}

/// An adoption event tagged with the index of the reduction step it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub node: usize,
    pub product: ProductId,
    pub step: usize,
}

/// Ordered adoption events from an initial network. Events sharing a step
/// index were applied simultaneously.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ReductionTrace {
    events: Vec<TraceEvent>,
}

impl ReductionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one simultaneous step. Empty steps are ignored.
    pub fn push_step(&mut self, events: impl IntoIterator<Item = AdoptionEvent>) {
        let step = self.step_count();
        self.events.extend(events.into_iter().map(|e| TraceEvent {
            node: e.node,
            product: e.product,
            step,
        }));
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn step_count(&self) -> usize {
        self.events.last().map_or(0, |e| e.step + 1)
    }

    pub fn steps(&self) -> Vec<Vec<AdoptionEvent>> {
        let mut steps = vec![Vec::new(); self.step_count()];
        for e in &self.events {
            steps[e.step].push(AdoptionEvent::new(e.node, e.product));
        }
        steps
    }

    /// The same events, one per step, in their original order.
    pub fn serialized(&self) -> ReductionTrace {
        ReductionTrace {
            events: self
                .events
                .iter()
                .enumerate()
                .map(|(step, e)| TraceEvent { step, ..*e })
                .collect(),
        }
    }

    /// Applies every step in order, validating each against the network it
    /// is applied to.
    pub fn replay(&self, initial: &Network) -> Result<Network> {
        self.steps()
            .iter()
            .try_fold(initial.clone(), |net, step| net.apply_events(step))
    }
}

/// A social network `(G, P, p, θ)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Network {
    graph: Arc<WeightedDigraph>,
    products: Arc<Vec<String>>,
    /// `θ(i,t)` at `i * |P| + t`, present exactly for the initial availability.
    thresholds: Arc<Vec<Option<Rational>>>,
    availability: Vec<ProductSet>,
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("nodes", &self.node_count())
            .field("edges", &self.graph.edge_count())
            .field("products", &self.products)
            .field("availability", &self.availability)
            .finish()
    }
}

impl Network {
    /// Validates and assembles a network. `thresholds[i]` must list exactly
    /// the products of `availability[i]`, each with a value in `(0,1]`.
    pub fn new(
        graph: WeightedDigraph,
        products: Vec<String>,
        availability: Vec<ProductSet>,
        thresholds: Vec<Vec<(ProductId, Rational)>>,
    ) -> Result<Self> {
        let n = graph.node_count();
        let pc = products.len();
        if pc == 0 {
            return Err(Error::semantic(None, "the product universe is empty"));
        }
        if pc > MAX_PRODUCTS {
            return Err(Error::semantic(
                None,
                format!("at most {MAX_PRODUCTS} products are supported, got {pc}"),
            ));
        }
        for (idx, name) in products.iter().enumerate() {
            if products[..idx].contains(name) {
                return Err(Error::semantic(None, format!("duplicate product `{name}`")));
            }
        }
        if availability.len() != n || thresholds.len() != n {
            return Err(Error::semantic(
                None,
                format!(
                    "graph has {n} nodes but {} availability sets and {} threshold lists",
                    availability.len(),
                    thresholds.len()
                ),
            ));
        }
        let universe = ProductSet::all(pc);
        let mut table = vec![None; n * pc];
        for (i, (&avail, theta)) in availability.iter().zip(&thresholds).enumerate() {
            if avail.is_empty() {
                return Err(Error::semantic(
                    Some(i),
                    format!("node {i} has an empty product set"),
                ));
            }
            if !avail.is_subset(universe) {
                return Err(Error::semantic(
                    Some(i),
                    format!("node {i} offers a product outside the universe"),
                ));
            }
            for &(t, value) in theta {
                if !avail.contains(t) {
                    return Err(Error::semantic(
                        Some(i),
                        format!("node {i} has a threshold for unavailable product {t}"),
                    ));
                }
                if !rational::in_unit_open_closed(&value) {
                    return Err(Error::semantic(
                        Some(i),
                        format!(
                            "threshold must be positive and at most 1 (node {i}, got {})",
                            rational::format(&value)
                        ),
                    ));
                }
                let slot = &mut table[i * pc + t.0];
                if slot.is_some() {
                    return Err(Error::semantic(
                        Some(i),
                        format!("node {i} lists product {t} twice"),
                    ));
                }
                *slot = Some(value);
            }
            if let Some(t) = avail.iter().find(|t| table[i * pc + t.0].is_none()) {
                return Err(Error::semantic(
                    Some(i),
                    format!("node {i} has no threshold for available product {t}"),
                ));
            }
        }
        Ok(Network {
            graph: Arc::new(graph),
            products: Arc::new(products),
            thresholds: Arc::new(table),
            availability,
        })
    }

    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.availability.len()
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    pub fn products(&self) -> impl Iterator<Item = ProductId> {
        (0..self.product_count()).map(ProductId)
    }

    pub fn product_names(&self) -> &[String] {
        &self.products
    }

    pub fn product_name(&self, t: ProductId) -> &str {
        &self.products[t.0]
    }

    pub fn product_id(&self, name: &str) -> Option<ProductId> {
        self.products.iter().position(|p| p == name).map(ProductId)
    }

    pub fn availability(&self, node: usize) -> ProductSet {
        self.availability[node]
    }

    pub fn availability_map(&self) -> &[ProductSet] {
        &self.availability
    }

    pub fn adopted(&self, node: usize) -> Option<ProductId> {
        self.availability[node].single()
    }

    pub fn adopter_count(&self, t: ProductId) -> usize {
        self.availability
            .iter()
            .filter(|s| s.single() == Some(t))
            .count()
    }

    /// True iff every node has adopted some product.
    pub fn all_adopted(&self) -> bool {
        self.availability.iter().all(|s| s.len() == 1)
    }

    /// True iff this is `[t]`: every node adopted `t`.
    pub fn is_constant(&self, t: ProductId) -> bool {
        self.availability
            .iter()
            .all(|s| *s == ProductSet::singleton(t))
    }

    /// `θ(i,t)`; defined only for `t ∈ p(i)`.
    pub fn threshold(&self, node: usize, t: ProductId) -> Result<Rational> {
        self.check_node(node)?;
        self.check_product(t)?;
        if !self.availability[node].contains(t) {
            return Err(Error::argument(format!(
                "threshold of node {node} is undefined for unavailable product {t}"
            )));
        }
        Ok(self.threshold_unchecked(node, t))
    }

    /// `θ(i,t)` for any product that was available when the thresholds were
    /// fixed, which includes every product of every reachable state.
    pub(crate) fn stored_threshold(&self, node: usize, t: ProductId) -> Option<Rational> {
        self.thresholds[node * self.product_count() + t.0]
    }

    fn threshold_unchecked(&self, node: usize, t: ProductId) -> Rational {
        self.stored_threshold(node, t)
            .expect("threshold defined for every available product")
    }

    /// `θ(·,t)` for every node, if `t` is available everywhere.
    pub fn thresholds_for(&self, t: ProductId) -> Option<Vec<Rational>> {
        (0..self.node_count())
            .map(|i| {
                self.availability[i]
                    .contains(t)
                    .then(|| self.threshold_unchecked(i, t))
            })
            .collect()
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::argument(format!(
                "node {node} does not exist (network has {} nodes)",
                self.node_count()
            )))
        }
    }

    pub(crate) fn check_product(&self, t: ProductId) -> Result<()> {
        if t.0 < self.product_count() {
            Ok(())
        } else {
            Err(Error::argument(format!(
                "product {t} does not exist (universe has {} products)",
                self.product_count()
            )))
        }
    }

    /// Weight into `node` from neighbours that adopted `t`.
    pub fn adopted_weight(&self, node: usize, t: ProductId) -> Rational {
        self.graph
            .incoming(node)
            .iter()
            .filter(|(j, _)| self.availability[*j].single() == Some(t))
            .map(|(_, w)| *w)
            .sum()
    }

    /// `A(t,i)`: vacuously true without neighbours, otherwise the weight of
    /// `t`-adopting neighbours reaches `θ(i,t)`.
    pub fn adoption_condition(&self, node: usize, t: ProductId) -> Result<bool> {
        self.check_node(node)?;
        self.check_product(t)?;
        if !self.graph.has_neighbours(node) {
            return Ok(true);
        }
        let theta = self.threshold(node, t)?;
        Ok(self.adopted_weight(node, t) >= theta)
    }

    pub fn can_adopt(&self, node: usize, t: ProductId) -> Result<bool> {
        self.check_node(node)?;
        self.check_product(t)?;
        let avail = self.availability[node];
        Ok(avail.contains(t) && avail.len() >= 2 && self.adoption_condition(node, t)?)
    }

    /// Every product `node` can adopt right now.
    pub fn adoptable_products(&self, node: usize) -> ProductSet {
        let avail = self.availability[node];
        if avail.len() < 2 {
            return ProductSet::EMPTY;
        }
        if !self.graph.has_neighbours(node) {
            return avail;
        }
        let mut weights = [rational::zero(); MAX_PRODUCTS];
        let mut seen = ProductSet::EMPTY;
        for (j, w) in self.graph.incoming(node) {
            if let Some(t) = self.availability[*j].single() {
                if avail.contains(t) {
                    weights[t.0] += *w;
                    seen = seen.with(t);
                }
            }
        }
        seen.iter()
            .filter(|t| weights[t.0] >= self.threshold_unchecked(node, *t))
            .collect()
    }

    /// All enabled single adoptions, by node then product.
    pub fn enabled_events(&self) -> Vec<AdoptionEvent> {
        (0..self.node_count())
            .flat_map(|i| {
                self.adoptable_products(i)
                    .iter()
                    .map(move |t| AdoptionEvent::new(i, t))
            })
            .collect()
    }

    /// One reduction step: every event's node adopts its product
    /// simultaneously.
    pub fn apply_events(&self, events: &[AdoptionEvent]) -> Result<Network> {
        if events.is_empty() {
            return Err(Error::Reduction {
                event: None,
                reason: "a reduction step needs at least one adoption".into(),
            });
        }
        let mut next = self.availability.clone();
        let mut touched = vec![false; self.node_count()];
        for &event in events {
            let reject = |reason: String| Error::Reduction {
                event: Some(event),
                reason,
            };
            self.check_node(event.node).map_err(|e| reject(e.to_string()))?;
            self.check_product(event.product)
                .map_err(|e| reject(e.to_string()))?;
            if touched[event.node] {
                return Err(reject(format!("node {} adopts twice in one step", event.node)));
            }
            touched[event.node] = true;
            if !self.can_adopt(event.node, event.product)? {
                return Err(reject(format!(
                    "node {} cannot adopt {}",
                    event.node,
                    self.product_name(event.product)
                )));
            }
            next[event.node] = ProductSet::singleton(event.product);
        }
        Ok(self.with_availability(next))
    }

    /// Same graph and thresholds with a different availability map. Callers
    /// guarantee the map is a reachable-shaped refinement of this one.
    pub(crate) fn with_availability(&self, availability: Vec<ProductSet>) -> Network {
        debug_assert_eq!(availability.len(), self.node_count());
        Network {
            graph: Arc::clone(&self.graph),
            products: Arc::clone(&self.products),
            thresholds: Arc::clone(&self.thresholds),
            availability,
        }
    }

    pub(crate) fn with_adoption(&self, node: usize, t: ProductId) -> Network {
        let mut next = self.availability.clone();
        next[node] = ProductSet::singleton(t);
        self.with_availability(next)
    }

    pub fn is_final(&self) -> bool {
        (0..self.node_count()).all(|i| self.adoptable_products(i).is_empty())
    }

    /// Products of `p(i)` that can never be adopted by `node`: even all
    /// neighbours still offering `t` fall short of `θ(i,t)`.
    pub fn infeasible_products(&self, node: usize) -> Result<ProductSet> {
        self.check_node(node)?;
        let avail = self.availability[node];
        if avail.len() < 2 || !self.graph.has_neighbours(node) {
            return Ok(ProductSet::EMPTY);
        }
        Ok(avail
            .iter()
            .filter(|&t| {
                let support: Rational = self
                    .graph
                    .incoming(node)
                    .iter()
                    .filter(|(j, _)| self.availability[*j].contains(t))
                    .map(|(_, w)| *w)
                    .sum();
                support < self.threshold_unchecked(node, t)
            })
            .collect())
    }

    /// Drops infeasible products from every node that keeps at least two
    /// feasible ones. Nodes left with fewer are untouched, since shrinking
    /// them to a singleton would turn them into adopters.
    pub fn discard_infeasible(&self) -> Network {
        let availability = (0..self.node_count())
            .map(|i| {
                let avail = self.availability[i];
                let infeasible = self.infeasible_products(i).expect("valid node");
                let feasible: ProductSet = avail.iter().filter(|t| !infeasible.contains(*t)).collect();
                if feasible.len() >= 2 {
                    feasible
                } else {
                    avail
                }
            })
            .collect();
        self.with_availability(availability)
    }

    /// `G_{p,t}`: `G` without edges into nodes that adopted `t`.
    pub fn derived_graph(&self, t: ProductId) -> Result<WeightedDigraph> {
        self.check_product(t)?;
        Ok(self
            .graph
            .without_edges_into(|i| self.availability[i].single() == Some(t)))
    }

    /// Every edge into `i` weighs exactly `1/|N(i)|`.
    pub fn is_equitable(&self) -> bool {
        (0..self.node_count()).all(|i| {
            let incoming = self.graph.incoming(i);
            let share = Rational::new(1, incoming.len().max(1) as i64);
            incoming.iter().all(|(_, w)| *w == share)
        })
    }

    /// True iff `θ(i,t) = θ(i,t')` for every node and every pair of its
    /// available products.
    pub fn has_product_independent_thresholds(&self) -> bool {
        (0..self.node_count()).all(|i| {
            let mut values = self.availability[i]
                .iter()
                .map(|t| self.threshold_unchecked(i, t));
            match values.next() {
                Some(first) => values.all(|v| v == first),
                None => true,
            }
        })
    }

    /// Thresholds of `node` in product order, for the node's current
    /// availability.
    pub fn node_thresholds(&self, node: usize) -> Vec<(ProductId, Rational)> {
        self.availability[node]
            .iter()
            .map(|t| (t, self.threshold_unchecked(node, t)))
            .collect()
    }

    /// Canonical comparison key: the availability map as sorted id lists.
    pub fn canonical_cmp(&self, other: &Network) -> Ordering {
        self.availability.cmp(&other.availability)
    }
}

/// Incremental construction of networks, mostly for generators and tests.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    products: Vec<String>,
    availability: Vec<ProductSet>,
    thresholds: Vec<Vec<(ProductId, Rational)>>,
    edges: Vec<Edge>,
}

impl NetworkBuilder {
    pub fn new<S: AsRef<str>>(products: &[S]) -> Self {
        NetworkBuilder {
            products: products.iter().map(|s| s.as_ref().to_string()).collect(),
            availability: Vec::new(),
            thresholds: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Adds a node offering `products`, all with threshold `theta`.
    pub fn node(&mut self, products: &[usize], theta: Rational) -> usize {
        let with: Vec<(usize, Rational)> = products.iter().map(|&t| (t, theta)).collect();
        self.node_with(&with)
    }

    /// Adds a node with per-product thresholds.
    pub fn node_with(&mut self, thresholds: &[(usize, Rational)]) -> usize {
        self.availability
            .push(thresholds.iter().map(|&(t, _)| ProductId(t)).collect());
        self.thresholds
            .push(thresholds.iter().map(|&(t, v)| (ProductId(t), v)).collect());
        self.availability.len() - 1
    }

    pub fn edge(&mut self, source: usize, target: usize, weight: Rational) -> &mut Self {
        self.edges.push(Edge {
            source,
            target,
            weight,
        });
        self
    }

    pub fn node_count(&self) -> usize {
        self.availability.len()
    }

    pub fn build(&self) -> Result<Network> {
        let graph = WeightedDigraph::new(self.availability.len(), self.edges.iter().cloned())?;
        Network::new(
            graph,
            self.products.clone(),
            self.availability.clone(),
            self.thresholds.clone(),
        )
    }
}
