//! Brute-force deciders for the three meta-properties of graph properties:
//! contagiousness, implicativeness, and disjunctiveness.
//!
//! All three quantify existentially over disjoint restriction pairs
//! `(S+, S-)` and distinguished edges, demanding an entailment over the
//! restricted class `P[S+, S-]` plus richness exemplars inside it. The
//! search walks restriction pairs as base-3 vectors over the edge indices
//! (0 = unconstrained, 1 = in `S+`, 2 = in `S-`), ascending, and edge tuples
//! lexicographically within each pair, so the first witness found is
//! canonical. Candidates failing the cheap richness scans are skipped before
//! the entailment scan; the `3^(|V|^2)` outer loop runs in parallel with a
//! smallest-candidate reduction.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::enumerate::graph_pool;
use crate::graph::{EdgeSetPair, Graph, VertexUniverse};
use crate::property::GraphProperty;
use crate::search::{CapExceeded, Caps};

#[derive(Debug, Error)]
pub enum MetaError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("this check needs at least {needed} vertices, the universe has {got}")]
    UniverseTooSmall { needed: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaKind {
    Contagious,
    Implicative,
    Disjunctive,
}

impl MetaKind {
    pub fn name(self) -> &'static str {
        match self {
            MetaKind::Contagious => "contagious",
            MetaKind::Implicative => "implicative",
            MetaKind::Disjunctive => "disjunctive",
        }
    }
}

/// A witness for one of the meta-properties.
///
/// Exemplar order is fixed per kind:
/// - contagious: `[graph lacking the implied edge, graph containing the
///   triggering edge]`;
/// - implicative: `[none of the three edges, only the first, only the
///   second, first and third, all three]`;
/// - disjunctive: `[only the first edge, only the second]`.
#[derive(Clone, Debug)]
pub struct MetaWitness {
    pub kind: MetaKind,
    pub restriction: EdgeSetPair,
    /// The distinguished edges: `[xy, zw]`, `[e1, e2, e3]`, or `[e1, e2]`.
    pub edges: Vec<usize>,
    pub exemplars: Vec<Graph>,
}

/// Result of one existential search.
#[derive(Clone, Debug)]
pub struct MetaSearch {
    pub witness: Option<MetaWitness>,
    /// Candidate tuples examined. On a negative verdict this equals the full
    /// analytic search-space size.
    pub candidates_examined: u64,
}

impl MetaSearch {
    pub fn holds(&self) -> bool {
        self.witness.is_some()
    }
}

struct SearchContext {
    universe: Arc<VertexUniverse>,
    /// Masks of all graphs with the property, ascending.
    pool: Vec<u64>,
    edge_count: usize,
}

fn context(
    property: &GraphProperty,
    universe: &Arc<VertexUniverse>,
    caps: &Caps,
) -> Result<SearchContext, MetaError> {
    let edge_count = universe.edge_count();
    if edge_count as u32 > caps.max_meta_edge_bits {
        return Err(MetaError::Cap(CapExceeded::new(
            "meta-property restriction space",
            3u128.pow(edge_count as u32),
            3u128.pow(caps.max_meta_edge_bits),
            "reduce |V| or raise the meta-search cap",
        )));
    }
    let pool = graph_pool(universe, Some(property), caps)?;
    Ok(SearchContext { universe: Arc::clone(universe), pool, edge_count })
}

/// Decodes restriction-pair index `t` (base-3 over edges, edge 0 least
/// significant) into `(plus, minus)` masks.
fn decode_restriction(mut t: u64, edge_count: usize) -> (u64, u64) {
    let mut plus = 0u64;
    let mut minus = 0u64;
    for e in 0..edge_count {
        match t % 3 {
            1 => plus |= 1 << e,
            2 => minus |= 1 << e,
            _ => {}
        }
        t /= 3;
    }
    (plus, minus)
}

fn restriction_count(edge_count: usize) -> u64 {
    3u64.pow(edge_count as u32)
}

/// Searches for a restriction pair witnessing that accepting `(x, y)` forces
/// accepting `(z, w)` inside the restricted class, with both an exemplar
/// avoiding `(z, w)` and one containing `(x, y)`.
pub fn is_xyzw_contagious(
    property: &GraphProperty,
    universe: &Arc<VertexUniverse>,
    x: usize,
    y: usize,
    z: usize,
    w: usize,
    caps: &Caps,
) -> Result<MetaSearch, MetaError> {
    let ctx = context(property, universe, caps)?;
    Ok(xyzw_search(&ctx, x, y, z, w))
}

fn xyzw_search(ctx: &SearchContext, x: usize, y: usize, z: usize, w: usize) -> MetaSearch {
    let trigger = 1u64 << ctx.universe.edge_index(x, y);
    let implied = 1u64 << ctx.universe.edge_index(z, w);
    let pairs = restriction_count(ctx.edge_count);

    let hit = (0..pairs)
        .into_par_iter()
        .find_first(|&t| {
            let (plus, minus) = decode_restriction(t, ctx.edge_count);
            let mut entailed = true;
            let mut has_without_implied = false;
            let mut has_with_trigger = false;
            for &g in &ctx.pool {
                if g & plus != plus || g & minus != 0 {
                    continue;
                }
                if g & trigger != 0 && g & implied == 0 {
                    entailed = false;
                    break;
                }
                has_without_implied |= g & implied == 0;
                has_with_trigger |= g & trigger != 0;
            }
            entailed && has_without_implied && has_with_trigger
        });

    match hit {
        None => MetaSearch { witness: None, candidates_examined: pairs },
        Some(t) => {
            let (plus, minus) = decode_restriction(t, ctx.edge_count);
            let e0 = first_matching(ctx, plus, minus, |g| g & implied == 0);
            let e1 = first_matching(ctx, plus, minus, |g| g & trigger != 0);
            MetaSearch {
                witness: Some(MetaWitness {
                    kind: MetaKind::Contagious,
                    restriction: EdgeSetPair::new(plus, minus).expect("trits are disjoint"),
                    edges: vec![
                        ctx.universe.edge_index(x, y),
                        ctx.universe.edge_index(z, w),
                    ],
                    exemplars: vec![e0.unwrap(), e1.unwrap()],
                }),
                candidates_examined: t + 1,
            }
        }
    }
}

fn first_matching(
    ctx: &SearchContext,
    plus: u64,
    minus: u64,
    pred: impl Fn(u64) -> bool,
) -> Option<Graph> {
    ctx.pool
        .iter()
        .find(|&&g| g & plus == plus && g & minus == 0 && pred(g))
        .map(|&g| Graph::from_mask(&ctx.universe, g))
}

/// Outcome of one of the three edge-pattern conditions of contagiousness.
#[derive(Clone, Debug)]
pub struct ConditionOutcome {
    pub holds: bool,
    /// First ordered triple `(x, y, z)` of distinct vertices on which the
    /// condition failed.
    pub first_failure: Option<(usize, usize, usize)>,
    /// A witness for the first triple, when the condition holds.
    pub sample: Option<MetaWitness>,
}

/// Full contagiousness verdict: at least one of the three edge-pattern
/// conditions must hold for every ordered triple of distinct vertices.
#[derive(Clone, Debug)]
pub struct ContagiousReport {
    pub contagious: bool,
    /// Accepting an edge forces its successor edge: `xy` forces `yz`.
    pub successor: ConditionOutcome,
    /// Accepting an edge forces its predecessor edge: `xy` forces `zx`.
    pub predecessor: ConditionOutcome,
    /// Accepting an edge forces edges sharing its source and its target:
    /// `xy` forces `xz`, and `xy` forces `zy`.
    pub shared_endpoint: ConditionOutcome,
    pub candidates_examined: u64,
}

pub fn is_contagious(
    property: &GraphProperty,
    universe: &Arc<VertexUniverse>,
    caps: &Caps,
) -> Result<ContagiousReport, MetaError> {
    if universe.size() < 3 {
        return Err(MetaError::UniverseTooSmall { needed: 3, got: universe.size() });
    }
    let ctx = context(property, universe, caps)?;
    let mut examined = 0u64;

    let mut run = |patterns: &[(usize, usize, usize, usize)]| -> ConditionOutcome {
        // Each ordered triple must admit every pattern in the condition.
        let mut sample = None;
        for (x, y, z) in distinct_triples(universe.size()) {
            for &(a, b, c, d) in patterns {
                let pick = |slot: usize| [x, y, z][slot];
                let search = xyzw_search(&ctx, pick(a), pick(b), pick(c), pick(d));
                examined += search.candidates_examined;
                match search.witness {
                    None => {
                        return ConditionOutcome {
                            holds: false,
                            first_failure: Some((x, y, z)),
                            sample: None,
                        }
                    }
                    Some(w) => {
                        if sample.is_none() {
                            sample = Some(w);
                        }
                    }
                }
            }
        }
        ConditionOutcome { holds: true, first_failure: None, sample }
    };

    // Patterns are index quadruples into (x, y, z): xy/yz, xy/zx, and the
    // two shared-endpoint transfers xy/xz, xy/zy.
    let successor = run(&[(0, 1, 1, 2)]);
    let predecessor = run(&[(0, 1, 2, 0)]);
    let shared_endpoint = run(&[(0, 1, 0, 2), (0, 1, 2, 1)]);

    Ok(ContagiousReport {
        contagious: successor.holds || predecessor.holds || shared_endpoint.holds,
        successor,
        predecessor,
        shared_endpoint,
        candidates_examined: examined,
    })
}

fn distinct_triples(v: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for x in 0..v {
        for y in 0..v {
            for z in 0..v {
                if x != y && y != z && x != z {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

/// Searches for two antecedent edges whose joint acceptance forces a third,
/// with the five richness exemplars establishing that no smaller pattern is
/// forced.
pub fn is_implicative(
    property: &GraphProperty,
    universe: &Arc<VertexUniverse>,
    caps: &Caps,
) -> Result<MetaSearch, MetaError> {
    let ctx = context(property, universe, caps)?;
    Ok(tuple_search(&ctx, TupleKind::Implicative))
}

/// Searches for two edges of which every graph in some restricted class must
/// contain at least one, each avoidable on its own.
pub fn is_disjunctive(
    property: &GraphProperty,
    universe: &Arc<VertexUniverse>,
    caps: &Caps,
) -> Result<MetaSearch, MetaError> {
    let ctx = context(property, universe, caps)?;
    Ok(tuple_search(&ctx, TupleKind::Disjunctive))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TupleKind {
    Implicative,
    Disjunctive,
}

impl TupleKind {
    fn arity(self) -> usize {
        match self {
            TupleKind::Implicative => 3,
            TupleKind::Disjunctive => 2,
        }
    }

    fn meta(self) -> MetaKind {
        match self {
            TupleKind::Implicative => MetaKind::Implicative,
            TupleKind::Disjunctive => MetaKind::Disjunctive,
        }
    }
}

/// Ordered tuples of `arity` distinct elements from `k` free edges.
fn tuples_of_free(k: u64, arity: usize) -> u64 {
    (0..arity as u64).map(|i| k.saturating_sub(i)).product()
}

fn tuple_search(ctx: &SearchContext, kind: TupleKind) -> MetaSearch {
    let pairs = restriction_count(ctx.edge_count);
    let arity = kind.arity();

    let hit = (0..pairs)
        .into_par_iter()
        .filter_map(|t| pair_search(ctx, kind, t).map(|(inner, w)| (t, inner, w)))
        .find_first(|_| true);

    match hit {
        None => {
            let total: u64 = (0..pairs)
                .into_par_iter()
                .map(|t| {
                    let (plus, minus) = decode_restriction(t, ctx.edge_count);
                    let free = ctx.edge_count as u64 - (plus | minus).count_ones() as u64;
                    tuples_of_free(free, arity)
                })
                .sum();
            MetaSearch { witness: None, candidates_examined: total }
        }
        Some((t, inner, witness)) => {
            // Count = candidates before this pair plus the position inside it.
            let before: u64 = (0..t)
                .map(|p| {
                    let (plus, minus) = decode_restriction(p, ctx.edge_count);
                    let free = ctx.edge_count as u64 - (plus | minus).count_ones() as u64;
                    tuples_of_free(free, arity)
                })
                .sum();
            MetaSearch { witness: Some(witness), candidates_examined: before + inner + 1 }
        }
    }
}

/// Searches one restriction pair; returns the inner candidate index and the
/// witness if the pair works.
fn pair_search(ctx: &SearchContext, kind: TupleKind, t: u64) -> Option<(u64, MetaWitness)> {
    let (plus, minus) = decode_restriction(t, ctx.edge_count);
    let admitted: Vec<u64> = ctx
        .pool
        .iter()
        .copied()
        .filter(|g| g & plus == plus && g & minus == 0)
        .collect();
    let free: Vec<usize> = (0..ctx.edge_count)
        .filter(|e| (plus | minus) >> e & 1 == 0)
        .collect();

    if admitted.is_empty() {
        return None;
    }

    let first_with_pattern = |total: u64, want: u64| -> Option<u64> {
        admitted.iter().copied().find(|g| g & total == want)
    };

    let mut inner = 0u64;
    match kind {
        TupleKind::Implicative => {
            for &e1 in &free {
                let b1 = 1u64 << e1;
                for &e2 in &free {
                    if e2 == e1 {
                        continue;
                    }
                    let b2 = 1u64 << e2;
                    for &e3 in &free {
                        if e3 == e1 || e3 == e2 {
                            continue;
                        }
                        let b3 = 1u64 << e3;
                        let candidate = inner;
                        inner += 1;
                        let total = b1 | b2 | b3;
                        // Richness gates first; they are cheap existence
                        // scans and they prune almost everything.
                        let Some(g0) = first_with_pattern(total, 0) else { continue };
                        let Some(g1) = first_with_pattern(total, b1) else { continue };
                        let Some(g2) = first_with_pattern(total, b2) else { continue };
                        let Some(g13) = first_with_pattern(total, b1 | b3) else { continue };
                        let Some(g123) = admitted.iter().copied().find(|g| g & total == total)
                        else {
                            continue;
                        };
                        // Entailment: accepting e1 and e2 forces e3.
                        let violated = admitted
                            .iter()
                            .any(|g| g & (b1 | b2) == (b1 | b2) && g & b3 == 0);
                        if violated {
                            continue;
                        }
                        let mk = |m: u64| Graph::from_mask(&ctx.universe, m);
                        return Some((
                            candidate,
                            MetaWitness {
                                kind: kind.meta(),
                                restriction: EdgeSetPair::new(plus, minus).unwrap(),
                                edges: vec![e1, e2, e3],
                                exemplars: vec![mk(g0), mk(g1), mk(g2), mk(g13), mk(g123)],
                            },
                        ));
                    }
                }
            }
        }
        TupleKind::Disjunctive => {
            for &e1 in &free {
                let b1 = 1u64 << e1;
                for &e2 in &free {
                    if e2 == e1 {
                        continue;
                    }
                    let b2 = 1u64 << e2;
                    let candidate = inner;
                    inner += 1;
                    let total = b1 | b2;
                    let Some(g1) = first_with_pattern(total, b1) else { continue };
                    let Some(g2) = first_with_pattern(total, b2) else { continue };
                    // Entailment: every admitted graph has e1 or e2.
                    if admitted.iter().any(|g| g & total == 0) {
                        continue;
                    }
                    let mk = |m: u64| Graph::from_mask(&ctx.universe, m);
                    return Some((
                        candidate,
                        MetaWitness {
                            kind: kind.meta(),
                            restriction: EdgeSetPair::new(plus, minus).unwrap(),
                            edges: vec![e1, e2],
                            exemplars: vec![mk(g1), mk(g2)],
                        },
                    ));
                }
            }
        }
    }
    None
}

/// Re-validates a witness by enumerating the restricted class from scratch.
pub fn validate_witness(
    property: &GraphProperty,
    universe: &Arc<VertexUniverse>,
    witness: &MetaWitness,
) -> bool {
    let total = universe.graph_count();
    let restricted: Vec<u64> = (0..total)
        .filter(|&g| witness.restriction.admits(g) && property.check_mask(g, universe))
        .collect();
    let bit = |slot: usize| 1u64 << witness.edges[slot];

    // Exemplars must live in the restricted class and show their patterns.
    let in_class = |g: &Graph| {
        witness.restriction.admits(g.edge_mask()) && property.check(g)
    };
    if !witness.exemplars.iter().all(in_class) {
        return false;
    }

    match witness.kind {
        MetaKind::Contagious => {
            let (trigger, implied) = (bit(0), bit(1));
            let entailed =
                restricted.iter().all(|g| g & trigger == 0 || g & implied != 0);
            let [e0, e1] = &witness.exemplars[..] else { return false };
            entailed && e0.edge_mask() & implied == 0 && e1.edge_mask() & trigger != 0
        }
        MetaKind::Implicative => {
            let (b1, b2, b3) = (bit(0), bit(1), bit(2));
            let total = b1 | b2 | b3;
            if witness.edges.iter().any(|&e| {
                witness.restriction.plus() >> e & 1 == 1
                    || witness.restriction.minus() >> e & 1 == 1
            }) {
                return false;
            }
            let entailed =
                restricted.iter().all(|g| g & (b1 | b2) != (b1 | b2) || g & b3 != 0);
            let [g0, g1, g2, g13, g123] = &witness.exemplars[..] else { return false };
            entailed
                && g0.edge_mask() & total == 0
                && g1.edge_mask() & total == b1
                && g2.edge_mask() & total == b2
                && g13.edge_mask() & total == (b1 | b3)
                && g123.edge_mask() & total == total
        }
        MetaKind::Disjunctive => {
            let (b1, b2) = (bit(0), bit(1));
            let total = b1 | b2;
            if witness.edges.iter().any(|&e| {
                witness.restriction.plus() >> e & 1 == 1
                    || witness.restriction.minus() >> e & 1 == 1
            }) {
                return false;
            }
            let entailed = restricted.iter().all(|g| g & total != 0);
            let [g1, g2] = &witness.exemplars[..] else { return false };
            entailed && g1.edge_mask() & total == b1 && g2.edge_mask() & total == b2
        }
    }
}

/// One row of the meta-property grid.
#[derive(Clone, Debug)]
pub struct MetaRow {
    pub property: String,
    pub contagious: bool,
    pub implicative: bool,
    pub disjunctive: bool,
}

/// Classifies each property against all three meta-properties.
pub fn meta_table(
    universe: &Arc<VertexUniverse>,
    properties: &[GraphProperty],
    caps: &Caps,
) -> Result<Vec<MetaRow>, MetaError> {
    properties
        .iter()
        .map(|p| {
            Ok(MetaRow {
                property: p.name().to_string(),
                contagious: is_contagious(p, universe, caps)?.contagious,
                implicative: is_implicative(p, universe, caps)?.holds(),
                disjunctive: is_disjunctive(p, universe, caps)?.holds(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::property::BuiltinProperty;

    fn xyz() -> Arc<VertexUniverse> {
        VertexUniverse::with_default_labels(3).unwrap()
    }

    fn prop(name: &str) -> GraphProperty {
        GraphProperty::by_name(name).unwrap()
    }

    #[test]
    fn right_euclidean_transfer_from_xy_to_yz() {
        let u = xyz();
        let caps = Caps::default();
        let search =
            is_xyzw_contagious(&prop("right-euclidean"), &u, 0, 1, 1, 2, &caps).unwrap();
        let w = search.witness.expect("right-euclidean transfers along successors");
        assert!(validate_witness(&prop("right-euclidean"), &u, &w));
        // The restriction S+ = {(x,z)}, S- = {} also validates, with
        // exemplars closed under the property (successor sets are cliques
        // with loops).
        let manual = MetaWitness {
            kind: MetaKind::Contagious,
            restriction: EdgeSetPair::new(1 << u.edge_index(0, 2), 0).unwrap(),
            edges: vec![u.edge_index(0, 1), u.edge_index(1, 2)],
            exemplars: vec![
                Graph::from_edges(&u, [("x", "z"), ("z", "z")]).unwrap(),
                Graph::from_edges(
                    &u,
                    [("x", "y"), ("x", "z"), ("y", "z"), ("z", "y"), ("y", "y"), ("z", "z")],
                )
                .unwrap(),
            ],
        };
        assert!(validate_witness(&prop("right-euclidean"), &u, &manual));
    }

    #[test]
    fn reflexivity_has_no_contagious_transfer() {
        let u = xyz();
        let caps = Caps::default();
        let search = is_xyzw_contagious(&prop("reflexivity"), &u, 0, 1, 2, 0, &caps).unwrap();
        assert!(search.witness.is_none());
        // Negative answers are exhaustive: every restriction pair examined.
        assert_eq!(search.candidates_examined, 3u64.pow(9));
    }

    #[test]
    fn contagiousness_conditions_match_the_known_classification() {
        let u = xyz();
        let caps = Caps::default();

        let transitivity = is_contagious(&prop("transitivity"), &u, &caps).unwrap();
        assert!(transitivity.contagious);
        assert!(transitivity.shared_endpoint.holds);

        let connectedness = is_contagious(&prop("connectedness"), &u, &caps).unwrap();
        assert!(connectedness.contagious);
        assert!(connectedness.successor.holds);

        let completeness = is_contagious(&prop("completeness"), &u, &caps).unwrap();
        assert!(!completeness.contagious);
    }

    #[test]
    fn transitivity_is_implicative_with_an_unrestricted_witness() {
        let u = xyz();
        let caps = Caps::default();
        let search = is_implicative(&prop("transitivity"), &u, &caps).unwrap();
        let w = search.witness.expect("transitivity is implicative");
        // The canonical-first witness needs no restriction at all.
        assert_eq!(w.restriction.plus(), 0);
        assert_eq!(w.restriction.minus(), 0);
        assert!(validate_witness(&prop("transitivity"), &u, &w));

        // The chain witness e1=(x,y), e2=(y,z), e3=(x,z) validates too.
        let chain = MetaWitness {
            kind: MetaKind::Implicative,
            restriction: EdgeSetPair::new(0, 0).unwrap(),
            edges: vec![u.edge_index(0, 1), u.edge_index(1, 2), u.edge_index(0, 2)],
            exemplars: vec![
                Graph::empty(&u),
                Graph::from_edges(&u, [("x", "y")]).unwrap(),
                Graph::from_edges(&u, [("y", "z")]).unwrap(),
                Graph::from_edges(&u, [("x", "y"), ("x", "z")]).unwrap(),
                Graph::from_edges(&u, [("x", "y"), ("y", "z"), ("x", "z")]).unwrap(),
            ],
        };
        assert!(validate_witness(&prop("transitivity"), &u, &chain));
    }

    #[test]
    fn negative_transitivity_and_symmetry_are_not_implicative() {
        let u = xyz();
        let caps = Caps::default();
        for name in ["negative-transitivity", "symmetry"] {
            let search = is_implicative(&prop(name), &u, &caps).unwrap();
            assert!(search.witness.is_none(), "{name} should not be implicative");
            assert_eq!(search.candidates_examined, analytic_tuple_space(9, 3));
        }
    }

    #[test]
    fn completeness_is_disjunctive_via_opposite_edges() {
        let u = xyz();
        let caps = Caps::default();
        let search = is_disjunctive(&prop("completeness"), &u, &caps).unwrap();
        let w = search.witness.expect("completeness is disjunctive");
        assert_eq!(w.restriction.plus(), 0);
        assert_eq!(w.restriction.minus(), 0);
        // First such pair in canonical order: (x,y) and (y,x).
        assert_eq!(w.edges, vec![u.edge_index(0, 1), u.edge_index(1, 0)]);
        assert!(validate_witness(&prop("completeness"), &u, &w));
    }

    #[test]
    fn seriality_is_disjunctive_and_transitivity_is_not() {
        let u = xyz();
        let caps = Caps::default();
        let search = is_disjunctive(&prop("seriality"), &u, &caps).unwrap();
        let w = search.witness.expect("seriality is disjunctive");
        assert!(validate_witness(&prop("seriality"), &u, &w));
        // Masking all but two successors of x forces one of the survivors.
        let manual = MetaWitness {
            kind: MetaKind::Disjunctive,
            restriction: EdgeSetPair::new(0, 1 << u.edge_index(0, 0)).unwrap(),
            edges: vec![u.edge_index(0, 1), u.edge_index(0, 2)],
            exemplars: vec![
                Graph::from_edges(&u, [("x", "y"), ("y", "y"), ("z", "z")]).unwrap(),
                Graph::from_edges(&u, [("x", "z"), ("y", "y"), ("z", "z")]).unwrap(),
            ],
        };
        assert!(validate_witness(&prop("seriality"), &u, &manual));

        let search = is_disjunctive(&prop("transitivity"), &u, &caps).unwrap();
        assert!(search.witness.is_none());
        assert_eq!(search.candidates_examined, analytic_tuple_space(9, 2));
    }

    fn analytic_tuple_space(edges: u64, arity: usize) -> u64 {
        // Sum over the number of constrained edges k: choose(E,k) ways to
        // pick them, 2^k sign assignments, falling-factorial tuples of the
        // free rest.
        let choose = |n: u64, k: u64| -> u64 {
            let mut c = 1u64;
            for i in 0..k {
                c = c * (n - i) / (i + 1);
            }
            c
        };
        (0..=edges)
            .map(|k| {
                let free = edges - k;
                choose(edges, k) * 2u64.pow(k as u32) * tuples_of_free(free, arity)
            })
            .sum()
    }

    #[test]
    fn pruned_search_agrees_with_an_unpruned_reference_on_two_vertices() {
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let caps = Caps::default();
        for b in BuiltinProperty::RELATIONAL {
            let p = GraphProperty::builtin(b);
            let fast = is_implicative(&p, &u, &caps).unwrap();
            let slow = reference_implicative(&p, &u);
            assert_eq!(fast.holds(), slow, "implicative mismatch on {}", b.name());
            let fast = is_disjunctive(&p, &u, &caps).unwrap();
            let slow = reference_disjunctive(&p, &u);
            assert_eq!(fast.holds(), slow, "disjunctive mismatch on {}", b.name());
        }
    }

    // Unpruned reference: enumerate everything, no richness-first gating.
    fn reference_implicative(p: &GraphProperty, u: &Arc<VertexUniverse>) -> bool {
        let edges = u.edge_count();
        for t in 0..restriction_count(edges) {
            let (plus, minus) = decode_restriction(t, edges);
            let class: Vec<u64> = (0..u.graph_count())
                .filter(|&g| {
                    g & plus == plus && g & minus == 0 && p.check_mask(g, u)
                })
                .collect();
            for e1 in 0..edges {
                for e2 in 0..edges {
                    for e3 in 0..edges {
                        if e1 == e2 || e2 == e3 || e1 == e3 {
                            continue;
                        }
                        let (b1, b2, b3) = (1u64 << e1, 1u64 << e2, 1u64 << e3);
                        if (plus | minus) & (b1 | b2 | b3) != 0 {
                            continue;
                        }
                        let total = b1 | b2 | b3;
                        let entailed = class
                            .iter()
                            .all(|g| g & (b1 | b2) != (b1 | b2) || g & b3 != 0);
                        let rich = [0, b1, b2, b1 | b3].iter().all(|&want| {
                            class.iter().any(|g| g & total == want)
                        }) && class.iter().any(|g| g & total == total);
                        if entailed && rich {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn reference_disjunctive(p: &GraphProperty, u: &Arc<VertexUniverse>) -> bool {
        let edges = u.edge_count();
        for t in 0..restriction_count(edges) {
            let (plus, minus) = decode_restriction(t, edges);
            let class: Vec<u64> = (0..u.graph_count())
                .filter(|&g| {
                    g & plus == plus && g & minus == 0 && p.check_mask(g, u)
                })
                .collect();
            if class.is_empty() {
                continue;
            }
            for e1 in 0..edges {
                for e2 in 0..edges {
                    if e1 == e2 {
                        continue;
                    }
                    let (b1, b2) = (1u64 << e1, 1u64 << e2);
                    if (plus | minus) & (b1 | b2) != 0 {
                        continue;
                    }
                    let entailed = class.iter().all(|g| g & (b1 | b2) != 0);
                    let rich = class.iter().any(|g| g & (b1 | b2) == b1)
                        && class.iter().any(|g| g & (b1 | b2) == b2);
                    if entailed && rich {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn contagiousness_needs_three_vertices() {
        let u = VertexUniverse::with_default_labels(2).unwrap();
        assert!(matches!(
            is_contagious(&prop("transitivity"), &u, &Caps::default()),
            Err(MetaError::UniverseTooSmall { needed: 3, got: 2 })
        ));
    }
}
