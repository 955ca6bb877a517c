//! Line-oriented text format for networks.
//!
//! ```text
//! # anything after '#' is a comment
//! products t1 t2
//! node 0 t1,t2 t1=1/2 t2=3/4
//! node 1 t1 t1=1/1
//! edge 1 0 1/2
//! ```
//!
//! `products` comes first and appears once. Node ids must cover `0..n`
//! exactly, in any order. Every node lists its available products and one
//! threshold per available product. Numbers are exact `num/den` rationals.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedDigraph};
use crate::network::{Network, ProductId, ProductSet};
use crate::rational::{self, Rational};

/// A whitespace-separated token with its 1-based column.
#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..idx], column: s + 1 });
                start = None;
            }
            (false, None) => start = Some(idx),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

struct Parser<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn get(&self, idx: usize, what: &str) -> Result<Token<'a>> {
        self.tokens
            .get(idx)
            .copied()
            .ok_or_else(|| self.syntax(self.end_column, format!("expected {what}")))
    }

    fn usize_at(&self, idx: usize, what: &str) -> Result<usize> {
        let tok = self.get(idx, what)?;
        tok.text
            .parse()
            .map_err(|_| self.syntax(tok.column, format!("expected {what}, found `{}`", tok.text)))
    }

    fn rational(&self, tok: Token<'_>) -> Result<Rational> {
        rational::parse(tok.text).map_err(|e| self.syntax(tok.column, format!("`{}`: {e}", tok.text)))
    }

    fn exact_len(&self, len: usize) -> Result<()> {
        match self.tokens.get(len) {
            Some(extra) => Err(self.syntax(extra.column, format!("unexpected `{}`", extra.text))),
            None => Ok(()),
        }
    }
}

fn semantic_at(line: usize, node: Option<usize>, message: impl std::fmt::Display) -> Error {
    Error::Semantic {
        node,
        message: format!("line {line}: {message}"),
    }
}

struct NodeRecord {
    line: usize,
    availability: ProductSet,
    thresholds: Vec<(ProductId, Rational)>,
}

/// Parses a network document.
pub fn parse(text: &str) -> Result<Network> {
    let mut products: Option<Vec<String>> = None;
    let mut nodes: Vec<(usize, NodeRecord)> = Vec::new();
    let mut edges: Vec<(usize, Edge)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let p = Parser {
            line: idx + 1,
            tokens: tokens(content),
            end_column: content.trim_end().len() + 1,
        };
        let Some(keyword) = p.tokens.first().copied() else {
            continue;
        };
        match keyword.text {
            "products" => {
                if products.is_some() {
                    return Err(p.syntax(keyword.column, "duplicate `products` line"));
                }
                let names: Vec<String> = p.tokens[1..].iter().map(|t| t.text.to_string()).collect();
                if names.is_empty() {
                    return Err(p.syntax(p.end_column, "expected at least one product name"));
                }
                for (k, tok) in p.tokens[1..].iter().enumerate() {
                    if tok.text.contains([',', '=']) {
                        return Err(p.syntax(tok.column, format!("invalid product name `{}`", tok.text)));
                    }
                    if names[..k].contains(&names[k]) {
                        return Err(p.syntax(tok.column, format!("duplicate product `{}`", tok.text)));
                    }
                }
                products = Some(names);
            }
            "node" => {
                let Some(names) = products.as_ref() else {
                    return Err(p.syntax(keyword.column, "`node` before `products`"));
                };
                let lookup = |tok: Token<'_>, name: &str| -> Result<ProductId> {
                    names
                        .iter()
                        .position(|n| n == name)
                        .map(ProductId)
                        .ok_or_else(|| p.syntax(tok.column, format!("unknown product `{name}`")))
                };
                let id = p.usize_at(1, "a node id")?;
                let set_tok = p.get(2, "a comma-separated product list")?;
                let mut availability = ProductSet::EMPTY;
                for name in set_tok.text.split(',') {
                    let t = lookup(set_tok, name)?;
                    if availability.contains(t) {
                        return Err(p.syntax(set_tok.column, format!("product `{name}` listed twice")));
                    }
                    availability = availability.with(t);
                }
                let mut thresholds = Vec::new();
                for tok in &p.tokens[3..] {
                    let (name, value) = tok
                        .text
                        .split_once('=')
                        .ok_or_else(|| p.syntax(tok.column, "expected product=num/den"))?;
                    let t = lookup(*tok, name)?;
                    let value_tok = Token {
                        text: value,
                        column: tok.column + name.len() + 1,
                    };
                    let theta = p.rational(value_tok)?;
                    if !availability.contains(t) {
                        return Err(semantic_at(
                            p.line,
                            Some(id),
                            format!("node {id} has a threshold for unavailable product `{name}`"),
                        ));
                    }
                    if thresholds.iter().any(|(u, _)| *u == t) {
                        return Err(semantic_at(
                            p.line,
                            Some(id),
                            format!("node {id} repeats the threshold for `{name}`"),
                        ));
                    }
                    if theta <= rational::zero() {
                        return Err(semantic_at(
                            p.line,
                            Some(id),
                            format!("node {id}: threshold must be positive, got {}", value),
                        ));
                    }
                    if theta > rational::one() {
                        return Err(semantic_at(
                            p.line,
                            Some(id),
                            format!("node {id}: threshold must be at most 1, got {}", value),
                        ));
                    }
                    thresholds.push((t, theta));
                }
                if let Some(t) = availability.iter().find(|t| thresholds.iter().all(|(u, _)| u != t)) {
                    return Err(semantic_at(
                        p.line,
                        Some(id),
                        format!("node {id} has no threshold for `{}`", names[t.0]),
                    ));
                }
                thresholds.sort_by_key(|(t, _)| *t);
                nodes.push((
                    id,
                    NodeRecord {
                        line: p.line,
                        availability,
                        thresholds,
                    },
                ));
            }
            "edge" => {
                let source = p.usize_at(1, "a source node id")?;
                let target = p.usize_at(2, "a target node id")?;
                let weight = p.rational(p.get(3, "a weight num/den")?)?;
                p.exact_len(4)?;
                edges.push((p.line, Edge { source, target, weight }));
            }
            other => {
                return Err(p.syntax(keyword.column, format!("unknown record `{other}`")));
            }
        }
    }

    let Some(products) = products else {
        return Err(Error::Syntax {
            line: text.lines().count().max(1),
            column: 1,
            message: "missing `products` line".into(),
        });
    };
    let n = nodes.len();
    let mut slots: Vec<Option<NodeRecord>> = (0..n).map(|_| None).collect();
    for (id, record) in nodes {
        if id >= n {
            return Err(semantic_at(
                record.line,
                Some(id),
                format!("node id {id} out of range; ids must be 0..{n}"),
            ));
        }
        if let Some(prev) = &slots[id] {
            return Err(semantic_at(
                record.line,
                Some(id),
                format!("node {id} already defined on line {}", prev.line),
            ));
        }
        slots[id] = Some(record);
    }
    let records: Vec<NodeRecord> = slots.into_iter().map(|r| r.expect("ids are a permutation")).collect();

    let mut in_weight = vec![rational::zero(); n];
    let mut seen = std::collections::HashSet::new();
    for (line, e) in &edges {
        for end in [e.source, e.target] {
            if end >= n {
                return Err(semantic_at(*line, Some(end), format!("edge mentions unknown node {end}")));
            }
        }
        if e.source == e.target {
            return Err(semantic_at(*line, Some(e.target), format!("self-loop at node {}", e.target)));
        }
        if !rational::in_unit_closed(&e.weight) {
            return Err(semantic_at(
                *line,
                Some(e.target),
                format!("edge weight {} outside [0,1]", rational::format(&e.weight)),
            ));
        }
        if !seen.insert((e.source, e.target)) {
            return Err(semantic_at(
                *line,
                Some(e.target),
                format!("duplicate edge {} -> {}", e.source, e.target),
            ));
        }
        in_weight[e.target] += e.weight;
        if in_weight[e.target] > rational::one() {
            return Err(semantic_at(
                *line,
                Some(e.target),
                format!(
                    "in-weights into node {} sum to {}, more than 1",
                    e.target,
                    rational::format(&in_weight[e.target])
                ),
            ));
        }
    }

    let graph = WeightedDigraph::new(n, edges.into_iter().map(|(_, e)| e))?;
    let (availability, thresholds) = records
        .into_iter()
        .map(|r| (r.availability, r.thresholds))
        .unzip();
    Network::new(graph, products, availability, thresholds)
}

/// Canonical text for `net`: products, nodes by id, edges by target then
/// source. `parse(&serialize(net))` rebuilds an equal network.
pub fn serialize(net: &Network) -> String {
    let mut out = String::new();
    let names = net.product_names();
    writeln!(out, "products {}", names.join(" ")).unwrap();
    for i in 0..net.node_count() {
        let set: Vec<&str> = net.availability(i).iter().map(|t| names[t.0].as_str()).collect();
        write!(out, "node {i} {}", set.join(",")).unwrap();
        for (t, theta) in net.node_thresholds(i) {
            write!(out, " {}={}", names[t.0], rational::format(&theta)).unwrap();
        }
        out.push('\n');
    }
    for e in net.graph().edges() {
        writeln!(out, "edge {} {} {}", e.source, e.target, rational::format(&e.weight)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_switch_witness;

    const SWITCH: &str = "\
products t1 t2
node 0 t1 t1=1/1
node 1 t2 t2=1/1
node 2 t1,t2 t1=1/1 t2=1/1
node 3 t1,t2 t1=1/2 t2=1/2
edge 0 2 1/1
edge 1 3 1/2
edge 2 3 1/2
";

    #[test]
    fn switch_witness_round_trips() {
        let net = gen_switch_witness();
        assert_eq!(serialize(&net), SWITCH);
        assert_eq!(parse(SWITCH).unwrap(), net);
    }

    #[test]
    fn comments_blank_lines_and_order() {
        let doc = "# header\n\nproducts a b  # trailing\nnode 1 a a=1/1\nnode 0 a,b b=1/3 a=2/4\nedge 1 0 1/1\n";
        let net = parse(doc).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.threshold(0, ProductId(0)).unwrap(), rational::rat(1, 2));
        assert_eq!(parse(&serialize(&net)).unwrap(), net);
    }

    fn err(doc: &str) -> Error {
        parse(doc).unwrap_err()
    }

    #[test]
    fn zero_threshold_is_rejected() {
        let e = err("products t1\nnode 0 t1 t1=0/1\n");
        assert!(matches!(&e, Error::Semantic { node: Some(0), message } if message.contains("threshold must be positive")), "{e}");
    }

    #[test]
    fn overweight_node_is_rejected() {
        let e = err("products t1 t2\nnode 0 t1 t1=1/1\nnode 1 t2 t2=1/1\nnode 2 t1,t2 t1=1/1 t2=1/1\nedge 0 2 1/2\nedge 1 2 2/3\n");
        assert!(matches!(&e, Error::Semantic { node: Some(2), message } if message.contains("more than 1") && message.contains("line 6")), "{e}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match err("products t1\nnode 0 t1 t1=0.5\n") {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 14)),
            e => panic!("{e}"),
        }
        match err("products t1\nnodes 0\n") {
            Error::Syntax { line: 2, column: 1, message } => assert!(message.contains("nodes")),
            e => panic!("{e}"),
        }
        assert!(matches!(err("node 0 t1 t1=1/1\n"), Error::Syntax { line: 1, .. }));
        assert!(matches!(err(""), Error::Syntax { .. }));
        assert!(matches!(err("products t1\nedge 0 1\n"), Error::Syntax { line: 2, column: 9, .. }));
        assert!(matches!(err("products t1\nnode 0 t1 t1=1/1 \nedge 0 0 1/1 x\n"), Error::Syntax { line: 3, column: 14, .. }));
    }

    #[test]
    fn semantic_errors_name_nodes() {
        assert!(matches!(err("products t1\nnode 0 t1\n"), Error::Semantic { node: Some(0), .. }));
        assert!(matches!(err("products t1\nnode 1 t1 t1=1/1\n"), Error::Semantic { node: Some(1), .. }));
        assert!(matches!(err("products t1\nnode 0 t1 t1=1/1\nnode 0 t1 t1=1/1\n"), Error::Semantic { .. }));
        assert!(matches!(err("products t1 t2\nnode 0 t1 t2=1/1\n"), Error::Semantic { node: Some(0), .. }));
        assert!(matches!(err("products t1\nnode 0 t1 t1=1/1\nedge 0 3 1/2\n"), Error::Semantic { node: Some(3), .. }));
        assert!(matches!(err("products t1\nnode 0 t1 t1=3/2\n"), Error::Semantic { node: Some(0), .. }));
    }
}
