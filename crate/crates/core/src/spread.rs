//! Whether a product can, or must, end up adopted by every node.

use crate::adoption::product_closure;
use crate::error::Result;
use crate::levels::check_well_structured;
use crate::network::{AdoptionEvent, Network, ProductId, ReductionTrace};

/// Certificate-based test for `[top]` being reachable: `top` is available
/// everywhere and `G_{p,top}` is well-structured for `θ(·,top)`.
pub fn is_reachable_all(net: &Network, top: ProductId) -> Result<bool> {
    net.check_product(top)?;
    let Some(thresholds) = net.thresholds_for(top) else {
        return Ok(false);
    };
    let derived = net.derived_graph(top)?;
    Ok(check_well_structured(&derived, &thresholds)?.is_some())
}

/// Closure-based test for the same question: adopt only `top` until nothing
/// changes and see whether every node took it.
pub fn is_reachable_all_by_closure(net: &Network, top: ProductId) -> Result<bool> {
    Ok(product_closure(net, top)?.is_constant(top))
}

/// A reduction sequence from `net` to `[top]`, one step per certificate
/// level, or `None` when `[top]` is not reachable.
pub fn reachability_witness(net: &Network, top: ProductId) -> Result<Option<ReductionTrace>> {
    net.check_product(top)?;
    let Some(thresholds) = net.thresholds_for(top) else {
        return Ok(None);
    };
    let derived = net.derived_graph(top)?;
    let Some(cert) = check_well_structured(&derived, &thresholds)? else {
        return Ok(None);
    };
    let mut trace = ReductionTrace::new();
    for layer in cert.layers() {
        let step: Vec<AdoptionEvent> = layer
            .into_iter()
            .filter(|&i| net.adopted(i).is_none())
            .map(|i| AdoptionEvent::new(i, top))
            .collect();
        trace.push_step(step);
    }
    Ok(Some(trace))
}

/// `[top]` is the only possible outcome: it is reachable and every node
/// without neighbours has already adopted `top`.
pub fn is_unavoidable_all(net: &Network, top: ProductId) -> Result<bool> {
    net.check_product(top)?;
    let isolated_ok = (0..net.node_count())
        .filter(|&i| !net.graph().has_neighbours(i))
        .all(|i| net.adopted(i) == Some(top));
    Ok(isolated_ok && is_reachable_all(net, top)?)
}
