//! Level certificates: deciding whether a product can cascade through a
//! graph level by level.
//!
//! A graph is well-structured for thresholds `θ` when nodes can be assigned
//! natural-number levels so that every node with in-neighbours receives at
//! least `θ(i)` of weight from strictly lower levels. The decision procedure
//! assigns level 0 to every node without in-neighbours, then repeatedly
//! assigns the next level to every node whose weight from already-levelled
//! neighbours reaches its threshold. Each edge is looked at once, when its
//! source gets a level.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::rational::{self, Rational};

/// A level per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCertificate(Vec<usize>);

impl LevelCertificate {
    pub fn new(levels: Vec<usize>) -> Self {
        LevelCertificate(levels)
    }

    pub fn level(&self, node: usize) -> usize {
        self.0[node]
    }

    pub fn levels(&self) -> &[usize] {
        &self.0
    }

    pub fn max_level(&self) -> Option<usize> {
        self.0.iter().copied().max()
    }

    /// Nodes grouped by level, ascending, each group sorted by id.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers = vec![Vec::new(); self.max_level().map_or(0, |m| m + 1)];
        for (node, &level) in self.0.iter().enumerate() {
            layers[level].push(node);
        }
        layers
    }
}

fn check_thresholds(g: &WeightedDigraph, thresholds: &[Rational]) -> Result<()> {
    if thresholds.len() != g.node_count() {
        return Err(Error::argument(format!(
            "expected {} thresholds, got {}",
            g.node_count(),
            thresholds.len()
        )));
    }
    if let Some((i, theta)) = thresholds
        .iter()
        .enumerate()
        .find(|(_, t)| !rational::in_unit_open_closed(t))
    {
        return Err(Error::argument(format!(
            "threshold of node {i} is {}, outside (0,1]",
            rational::format(theta)
        )));
    }
    Ok(())
}

/// Returns the pointwise-minimal certificate, or `None` if the graph is not
/// well-structured for `thresholds` (one value per node).
pub fn check_well_structured(
    g: &WeightedDigraph,
    thresholds: &[Rational],
) -> Result<Option<LevelCertificate>> {
    check_thresholds(g, thresholds)?;
    let n = g.node_count();
    let mut level: Vec<Option<usize>> = vec![None; n];
    let mut frontier: Vec<usize> = (0..n).filter(|&i| !g.has_neighbours(i)).collect();
    if frontier.is_empty() {
        return Ok((n == 0).then(|| LevelCertificate::new(Vec::new())));
    }
    for &i in &frontier {
        level[i] = Some(0);
    }
    let mut assigned = frontier.len();
    let mut support = vec![rational::zero(); n];
    let mut current = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &source in &frontier {
            for &(target, w) in g.outgoing(source) {
                if level[target].is_none() {
                    let before = support[target] >= thresholds[target];
                    support[target] += w;
                    if !before && support[target] >= thresholds[target] {
                        next.push(target);
                    }
                }
            }
        }
        current += 1;
        next.sort_unstable();
        for &i in &next {
            level[i] = Some(current);
        }
        assigned += next.len();
        frontier = next;
    }
    if assigned < n {
        return Ok(None);
    }
    Ok(Some(LevelCertificate::new(
        level.into_iter().map(|l| l.expect("all assigned")).collect(),
    )))
}

/// True iff every node with in-neighbours gets at least its threshold from
/// strictly lower levels.
pub fn verify_certificate(
    g: &WeightedDigraph,
    thresholds: &[Rational],
    cert: &LevelCertificate,
) -> bool {
    if cert.levels().len() != g.node_count() || thresholds.len() != g.node_count() {
        return false;
    }
    (0..g.node_count()).all(|i| {
        !g.has_neighbours(i) || lower_level_weight(g, cert.levels(), i, cert.level(i)) >= thresholds[i]
    })
}

/// Weight into `node` from neighbours whose level is below `below`.
pub fn lower_level_weight(g: &WeightedDigraph, levels: &[usize], node: usize, below: usize) -> Rational {
    g.incoming(node)
        .iter()
        .filter(|(j, _)| levels[*j] < below)
        .map(|(_, w)| *w)
        .sum()
}

/// True iff no node's level can be lowered: each node with in-neighbours sits
/// at the least `k` whose lower-level weight reaches its threshold, and nodes
/// without in-neighbours sit at 0.
pub fn is_minimal(g: &WeightedDigraph, thresholds: &[Rational], cert: &LevelCertificate) -> bool {
    (0..g.node_count()).all(|i| {
        if !g.has_neighbours(i) {
            return cert.level(i) == 0;
        }
        let least = (0..=cert.level(i))
            .find(|&k| lower_level_weight(g, cert.levels(), i, k) >= thresholds[i]);
        least == Some(cert.level(i))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::rational::{one, rat};

    fn graph(n: usize, edges: &[(usize, usize, Rational)]) -> WeightedDigraph {
        WeightedDigraph::new(
            n,
            edges.iter().map(|&(source, target, weight)| Edge {
                source,
                target,
                weight,
            }),
        )
        .unwrap()
    }

    fn three_node() -> (WeightedDigraph, Vec<Rational>) {
        // a -> b (1), a -> c (1/2), b -> c (1/2); θ(b) = 1, θ(c) = 7/10
        let g = graph(3, &[(0, 1, one()), (0, 2, rat(1, 2)), (1, 2, rat(1, 2))]);
        (g, vec![one(), one(), rat(7, 10)])
    }

    /// Pointwise minimum over every valid level function with levels < n.
    fn brute_force_minimum(g: &WeightedDigraph, thresholds: &[Rational]) -> Option<Vec<usize>> {
        let n = g.node_count();
        let mut best: Option<Vec<usize>> = None;
        let mut levels = vec![0usize; n];
        loop {
            let cert = LevelCertificate::new(levels.clone());
            if verify_certificate(g, thresholds, &cert) {
                best = Some(match best {
                    None => levels.clone(),
                    Some(b) => b.iter().zip(&levels).map(|(x, y)| *x.min(y)).collect(),
                });
            }
            let mut k = 0;
            while k < n && levels[k] == n - 1 {
                levels[k] = 0;
                k += 1;
            }
            if k == n {
                return best;
            }
            levels[k] += 1;
        }
    }

    #[test]
    fn edgeless_graph_is_all_level_zero() {
        let g = graph(4, &[]);
        let cert = check_well_structured(&g, &[one(); 4]).unwrap().unwrap();
        assert_eq!(cert.levels(), &[0, 0, 0, 0]);
    }

    #[test]
    fn two_cycle_is_not_well_structured() {
        let g = graph(2, &[(0, 1, one()), (1, 0, one())]);
        assert_eq!(check_well_structured(&g, &[one(), one()]).unwrap(), None);
    }

    #[test]
    fn three_node_example_levels() {
        let (g, theta) = three_node();
        assert_eq!(brute_force_minimum(&g, &theta), Some(vec![0, 1, 2]));
        let cert = check_well_structured(&g, &theta).unwrap().unwrap();
        assert_eq!(cert.levels(), &[0, 1, 2]);
        assert!(verify_certificate(&g, &theta, &cert));
        assert!(is_minimal(&g, &theta, &cert));
    }

    #[test]
    fn all_zero_certificate_fails_for_nodes_with_neighbours() {
        let (g, theta) = three_node();
        assert!(!verify_certificate(&g, &theta, &LevelCertificate::new(vec![0, 0, 0])));
    }

    #[test]
    fn shifted_certificate_still_verifies() {
        let (g, theta) = three_node();
        let shifted = LevelCertificate::new(vec![0, 2, 3]);
        assert!(verify_certificate(&g, &theta, &shifted));
        assert!(!is_minimal(&g, &theta, &shifted));
    }

    #[test]
    fn thresholds_out_of_range_are_rejected() {
        let g = graph(1, &[]);
        assert!(matches!(
            check_well_structured(&g, &[rat(0, 1)]),
            Err(Error::Argument(_))
        ));
        assert!(check_well_structured(&g, &[rat(3, 2)]).is_err());
        assert!(check_well_structured(&g, &[]).is_err());
    }

    #[test]
    fn well_structured_cycles_exist() {
        // 0 isolated, feeds 1 and 2 with 1/2; 1 <-> 2 with 1/2 each.
        let g = graph(
            3,
            &[(0, 1, rat(1, 2)), (0, 2, rat(1, 2)), (1, 2, rat(1, 2)), (2, 1, rat(1, 2))],
        );
        let cert = check_well_structured(&g, &[one(), rat(1, 2), rat(1, 2)])
            .unwrap()
            .unwrap();
        assert_eq!(cert.levels(), &[0, 1, 1]);
        assert_eq!(check_well_structured(&g, &[one(), one(), one()]).unwrap(), None);
    }

    #[test]
    fn agrees_with_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1..=5);
            let mut edges = Vec::new();
            for target in 0..n {
                let sources: Vec<usize> = (0..n)
                    .filter(|&s| s != target && rng.random_bool(0.4))
                    .collect();
                for s in &sources {
                    edges.push((*s, target, rat(1, sources.len() as i64)));
                }
            }
            let g = graph(n, &edges);
            let theta: Vec<Rational> = (0..n).map(|_| rat(rng.random_range(1..=4), 4)).collect();
            let expected = brute_force_minimum(&g, &theta);
            let got = check_well_structured(&g, &theta).unwrap();
            assert_eq!(got.as_ref().map(|c| c.levels().to_vec()), expected);
            if let Some(cert) = got {
                assert!(is_minimal(&g, &theta, &cert));
            }
        }
    }
}
