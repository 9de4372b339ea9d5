//! Graph properties: the builtin first-order conditions, named composites,
//! and user-supplied predicates.
//!
//! Quantifiers are evaluated by exhaustive iteration over vertices, with the
//! usual classical reading of vacuous cases (the empty graph is transitive,
//! symmetric, and so on).

use std::fmt;
use std::sync::Arc;

use crate::graph::{predecessor_column, successor_row, Graph, VertexUniverse};

/// The builtin single-condition properties.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum BuiltinProperty {
    Reflexivity,
    Irreflexivity,
    Symmetry,
    Antisymmetry,
    RightEuclidean,
    LeftEuclidean,
    Transitivity,
    NegativeTransitivity,
    Connectedness,
    Completeness,
    Nontriviality,
    Seriality,
    Acyclicity,
    HasMaxima,
    HasMinima,
}

use BuiltinProperty::*;

impl BuiltinProperty {
    pub const ALL: [BuiltinProperty; 15] = [
        Reflexivity,
        Irreflexivity,
        Symmetry,
        Antisymmetry,
        RightEuclidean,
        LeftEuclidean,
        Transitivity,
        NegativeTransitivity,
        Connectedness,
        Completeness,
        Nontriviality,
        Seriality,
        Acyclicity,
        HasMaxima,
        HasMinima,
    ];

    /// The twelve relational conditions usually tabulated together, in their
    /// conventional order.
    pub const RELATIONAL: [BuiltinProperty; 12] = [
        Reflexivity,
        Irreflexivity,
        Symmetry,
        Antisymmetry,
        RightEuclidean,
        LeftEuclidean,
        Transitivity,
        NegativeTransitivity,
        Connectedness,
        Completeness,
        Nontriviality,
        Seriality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Reflexivity => "reflexivity",
            Irreflexivity => "irreflexivity",
            Symmetry => "symmetry",
            Antisymmetry => "antisymmetry",
            RightEuclidean => "right-euclidean",
            LeftEuclidean => "left-euclidean",
            Transitivity => "transitivity",
            NegativeTransitivity => "negative-transitivity",
            Connectedness => "connectedness",
            Completeness => "completeness",
            Nontriviality => "nontriviality",
            Seriality => "seriality",
            Acyclicity => "acyclicity",
            HasMaxima => "has-maxima",
            HasMinima => "has-minima",
        }
    }

    /// Evaluates the first-order condition on a raw edge mask.
    pub fn holds_mask(self, mask: u64, v: usize) -> bool {
        let edge = |x: usize, y: usize| mask >> (x * v + y) & 1 == 1;
        match self {
            Reflexivity => (0..v).all(|x| edge(x, x)),
            Irreflexivity => (0..v).all(|x| !edge(x, x)),
            Symmetry => pairs(v).all(|(x, y)| !edge(x, y) || edge(y, x)),
            Antisymmetry => pairs(v).all(|(x, y)| !(edge(x, y) && edge(y, x)) || x == y),
            RightEuclidean => triples(v).all(|(x, y, z)| !(edge(x, y) && edge(x, z)) || edge(y, z)),
            LeftEuclidean => triples(v).all(|(x, y, z)| !(edge(x, y) && edge(z, y)) || edge(z, x)),
            Transitivity => triples(v).all(|(x, y, z)| !(edge(x, y) && edge(y, z)) || edge(x, z)),
            NegativeTransitivity => {
                triples(v).all(|(x, y, z)| !edge(x, y) || edge(x, z) || edge(z, y))
            }
            Connectedness => {
                triples(v).all(|(x, y, z)| !(edge(x, y) && edge(x, z)) || edge(y, z) || edge(z, y))
            }
            Completeness => pairs(v).all(|(x, y)| x == y || edge(x, y) || edge(y, x)),
            Nontriviality => mask != 0,
            Seriality => (0..v).all(|x| successor_row(mask, v, x) != 0),
            Acyclicity => is_acyclic(mask, v),
            HasMaxima => (0..v).any(|x| successor_row(mask, v, x).count_ones() as usize == v),
            HasMinima => (0..v).any(|x| predecessor_column(mask, v, x).count_ones() as usize == v),
        }
    }

    pub fn holds(self, g: &Graph) -> bool {
        self.holds_mask(g.edge_mask(), g.universe().size())
    }
}

fn pairs(v: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..v).flat_map(move |x| (0..v).map(move |y| (x, y)))
}

fn triples(v: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..v).flat_map(move |x| (0..v).flat_map(move |y| (0..v).map(move |z| (x, y, z))))
}

/// Cycle detection by computing reachability rows to a fixed point. A self
/// loop counts as a cycle.
#[allow(clippy::needless_range_loop)]
fn is_acyclic(mask: u64, v: usize) -> bool {
    let mut reach: [u64; 8] = [0; 8];
    for x in 0..v {
        reach[x] = successor_row(mask, v, x);
    }
    loop {
        let mut changed = false;
        for x in 0..v {
            let mut row = reach[x];
            let mut targets = row;
            while targets != 0 {
                let y = targets.trailing_zeros() as usize;
                targets &= targets - 1;
                row |= reach[y];
            }
            if row != reach[x] {
                reach[x] = row;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..v).all(|x| reach[x] >> x & 1 == 0)
}

type Predicate = Arc<dyn Fn(&Graph) -> bool + Send + Sync>;

#[derive(Clone)]
enum PropertyKind {
    Builtin(BuiltinProperty),
    /// Conjunction of builtins, evaluated left to right with no simplification.
    Conjunction(Vec<BuiltinProperty>),
    Custom(Predicate),
}

/// A named, total, deterministic predicate on graphs.
#[derive(Clone)]
pub struct GraphProperty {
    name: String,
    kind: PropertyKind,
}

impl GraphProperty {
    pub fn builtin(b: BuiltinProperty) -> Self {
        GraphProperty { name: b.name().to_string(), kind: PropertyKind::Builtin(b) }
    }

    pub fn conjunction(name: &str, parts: Vec<BuiltinProperty>) -> Self {
        GraphProperty { name: name.to_string(), kind: PropertyKind::Conjunction(parts) }
    }

    pub fn custom<F>(name: &str, predicate: F) -> Self
    where
        F: Fn(&Graph) -> bool + Send + Sync + 'static,
    {
        GraphProperty { name: name.to_string(), kind: PropertyKind::Custom(Arc::new(predicate)) }
    }

    /// Looks a property up by its CLI name. Covers the builtins, the named
    /// composites, and two derived predicates used by the theorem presets.
    pub fn by_name(name: &str) -> Option<Self> {
        if let Some(b) = BuiltinProperty::ALL.iter().find(|b| b.name() == name) {
            return Some(GraphProperty::builtin(*b));
        }
        match name {
            "preorder" => Some(GraphProperty::conjunction(name, vec![Reflexivity, Transitivity])),
            "weak-order" => Some(GraphProperty::conjunction(
                name,
                vec![Reflexivity, Transitivity, Completeness],
            )),
            "equivalence" => Some(GraphProperty::conjunction(
                name,
                vec![Reflexivity, Symmetry, Transitivity],
            )),
            "strict-linear-order" => Some(GraphProperty::conjunction(
                name,
                vec![Irreflexivity, Transitivity, Completeness],
            )),
            "has-maxima-or-minima" => Some(GraphProperty::custom(name, |g| {
                HasMaxima.holds(g) || HasMinima.holds(g)
            })),
            // Nontriviality on the nonreflexive part: some two distinct
            // vertices are related.
            "has-nonreflexive-edge" => Some(GraphProperty::custom(name, |g| {
                g.edge_mask() & !g.universe().diagonal_mask() != 0
            })),
            _ => None,
        }
    }

    /// All names accepted by [`GraphProperty::by_name`].
    pub fn known_names() -> Vec<&'static str> {
        let mut names: Vec<&'static str> = BuiltinProperty::ALL.iter().map(|b| b.name()).collect();
        names.extend([
            "preorder",
            "weak-order",
            "equivalence",
            "strict-linear-order",
            "has-maxima-or-minima",
            "has-nonreflexive-edge",
        ]);
        names
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn check(&self, g: &Graph) -> bool {
        match &self.kind {
            PropertyKind::Builtin(b) => b.holds(g),
            PropertyKind::Conjunction(parts) => parts.iter().all(|b| b.holds(g)),
            PropertyKind::Custom(p) => p(g),
        }
    }

    /// Mask-level check used by enumeration and search loops. Custom
    /// predicates see a materialized graph.
    pub fn check_mask(&self, mask: u64, universe: &Arc<VertexUniverse>) -> bool {
        match &self.kind {
            PropertyKind::Builtin(b) => b.holds_mask(mask, universe.size()),
            PropertyKind::Conjunction(parts) => {
                parts.iter().all(|b| b.holds_mask(mask, universe.size()))
            }
            PropertyKind::Custom(p) => p(&Graph::from_mask(universe, mask)),
        }
    }
}

impl fmt::Debug for GraphProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphProperty({})", self.name)
    }
}
