//! Canonical enumeration of graphs over a universe.
//!
//! Graphs stream in ascending order of their edge mask read as an integer.
//! This order is stable across runs and is what "canonically smallest
//! counterexample" means everywhere else in the crate.

use std::sync::Arc;

use crate::graph::{Graph, VertexUniverse};
use crate::property::GraphProperty;
use crate::search::{CapExceeded, Caps};

/// Deterministic stream of graphs in canonical order, optionally filtered by
/// a property. A filtered stream visits exactly the graphs the unfiltered
/// stream would, in the same order, keeping those satisfying the property.
pub fn enumerate_graphs<'a>(
    universe: &'a Arc<VertexUniverse>,
    filter: Option<&'a GraphProperty>,
    caps: &Caps,
) -> Result<impl Iterator<Item = Graph> + 'a, CapExceeded> {
    check_enumeration_cap(universe, filter.is_some(), caps)?;
    let total = universe.graph_count();
    Ok((0..total)
        .filter(move |&mask| filter.is_none_or(|p| p.check_mask(mask, universe)))
        .map(move |mask| Graph::from_mask(universe, mask)))
}

/// Sorted mask pool of all graphs satisfying `filter` (all graphs when
/// `None`). The workhorse behind profile-space scans.
pub fn graph_pool(
    universe: &Arc<VertexUniverse>,
    filter: Option<&GraphProperty>,
    caps: &Caps,
) -> Result<Vec<u64>, CapExceeded> {
    check_enumeration_cap(universe, filter.is_some(), caps)?;
    let total = universe.graph_count();
    Ok(match filter {
        None => (0..total).collect(),
        Some(p) => (0..total).filter(|&m| p.check_mask(m, universe)).collect(),
    })
}

fn check_enumeration_cap(
    universe: &VertexUniverse,
    filtered: bool,
    caps: &Caps,
) -> Result<(), CapExceeded> {
    let bits = universe.edge_count() as u32;
    let limit = if filtered { caps.max_filtered_graph_bits } else { caps.max_unfiltered_graph_bits };
    if bits > limit {
        let kind = if filtered { "filtered graph enumeration" } else { "graph enumeration" };
        return Err(CapExceeded::new(
            kind,
            1u128 << bits,
            1u128 << limit,
            "reduce the vertex count or raise the enumeration cap",
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::property::GraphProperty;

    #[test]
    fn unfiltered_count_is_two_to_the_edges() {
        let u = VertexUniverse::with_default_labels(3).unwrap();
        let caps = Caps::default();
        assert_eq!(enumerate_graphs(&u, None, &caps).unwrap().count(), 512);
    }

    #[test]
    fn stream_is_ascending_and_stable() {
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let caps = Caps::default();
        let masks: Vec<u64> = enumerate_graphs(&u, None, &caps)
            .unwrap()
            .map(|g| g.canonical_index())
            .collect();
        assert_eq!(masks, (0..16).collect::<Vec<u64>>());
    }

    #[test]
    fn filtered_stream_is_the_restriction_of_the_unfiltered_one() {
        let u = VertexUniverse::with_default_labels(3).unwrap();
        let caps = Caps::default();
        let p = GraphProperty::by_name("transitivity").unwrap();
        let filtered: Vec<u64> = enumerate_graphs(&u, Some(&p), &caps)
            .unwrap()
            .map(|g| g.canonical_index())
            .collect();
        let by_hand: Vec<u64> = enumerate_graphs(&u, None, &caps)
            .unwrap()
            .filter(|g| p.check(g))
            .map(|g| g.canonical_index())
            .collect();
        assert_eq!(filtered, by_hand);
    }

    #[test]
    fn caps_are_enforced() {
        let u = VertexUniverse::with_default_labels(4).unwrap();
        let caps = Caps::default();
        // 16 edge bits: above the unfiltered cap, within the filtered one.
        assert!(enumerate_graphs(&u, None, &caps).is_err());
        let p = GraphProperty::by_name("reflexivity").unwrap();
        assert!(enumerate_graphs(&u, Some(&p), &caps).is_ok());
    }
}
