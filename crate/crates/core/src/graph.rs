//! Vertex universes, graphs as edge bitmasks, profiles, and coalitions.
//!
//! A graph over a universe of `v` vertices is a set of directed edges stored
//! as a `u64` bitmask: edge `(x, y)` occupies bit `x * v + y` (source-major).
//! Reading the mask as an unsigned integer gives the canonical index of the
//! graph; all enumeration, search, and counterexample-minimality guarantees
//! in this crate are stated in terms of that order.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Hard limit so that `|V|^2` edge bits fit in a `u64`.
pub const MAX_VERTICES: usize = 8;

/// Labels used by [`VertexUniverse::with_default_labels`].
const DEFAULT_LABELS: [&str; MAX_VERTICES] = ["x", "y", "z", "w", "u", "v", "s", "t"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("universe must have between 1 and {MAX_VERTICES} vertices, got {0}")]
    BadUniverseSize(usize),
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error("graphs belong to different universes")]
    UniverseMismatch,
    #[error("a profile needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("agent index {index} out of range 1..={n}")]
    AgentOutOfRange { index: usize, n: usize },
    #[error("edge sets S+ and S- overlap")]
    OverlappingRestriction,
}

/// An ordered, fixed set of distinct vertex labels.
///
/// Universes are shared behind `Arc` so graphs and profiles stay cheap to
/// clone during exhaustive search.
#[derive(Debug, PartialEq, Eq)]
pub struct VertexUniverse {
    names: Vec<String>,
}

impl VertexUniverse {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_VERTICES {
            return Err(GraphError::BadUniverseSize(names.len()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(GraphError::DuplicateLabel(name.clone()));
            }
        }
        Ok(Arc::new(VertexUniverse { names }))
    }

    /// Universe with the standard labels `x, y, z, w, u, v, s, t`.
    pub fn with_default_labels(size: usize) -> Result<Arc<Self>, GraphError> {
        if size == 0 || size > MAX_VERTICES {
            return Err(GraphError::BadUniverseSize(size));
        }
        Self::new(DEFAULT_LABELS[..size].iter().copied())
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn label(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    pub fn require(&self, label: &str) -> Result<usize, GraphError> {
        self.index_of(label)
            .ok_or_else(|| GraphError::UnknownLabel(label.to_string()))
    }

    /// Number of possible edges, `|V|^2`.
    pub fn edge_count(&self) -> usize {
        self.size() * self.size()
    }

    /// Bit position of edge `(source, target)`.
    pub fn edge_index(&self, source: usize, target: usize) -> usize {
        debug_assert!(source < self.size() && target < self.size());
        source * self.size() + target
    }

    pub fn edge_at(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.edge_count());
        (index / self.size(), index % self.size())
    }

    /// Mask with every edge bit set.
    pub fn full_mask(&self) -> u64 {
        mask_with_low_bits(self.edge_count())
    }

    /// Mask selecting the reflexive edges `(x, x)`.
    pub fn diagonal_mask(&self) -> u64 {
        let mut m = 0u64;
        for x in 0..self.size() {
            m |= 1 << self.edge_index(x, x);
        }
        m
    }

    /// Mask with every vertex bit set (for successor/world sets).
    pub fn vertex_mask(&self) -> u64 {
        mask_with_low_bits(self.size())
    }

    /// Total number of graphs over this universe, `2^(|V|^2)`.
    pub fn graph_count(&self) -> u64 {
        1u64 << self.edge_count()
    }

    pub fn describe_edge(&self, index: usize) -> String {
        let (s, t) = self.edge_at(index);
        format!("({},{})", self.label(s), self.label(t))
    }
}

fn mask_with_low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A directed graph over a fixed universe; just an edge bitmask plus the
/// shared universe handle.
#[derive(Clone)]
pub struct Graph {
    universe: Arc<VertexUniverse>,
    mask: u64,
}

impl Graph {
    pub fn empty(universe: &Arc<VertexUniverse>) -> Self {
        Graph { universe: Arc::clone(universe), mask: 0 }
    }

    pub fn full(universe: &Arc<VertexUniverse>) -> Self {
        Graph { universe: Arc::clone(universe), mask: universe.full_mask() }
    }

    pub fn from_mask(universe: &Arc<VertexUniverse>, mask: u64) -> Self {
        debug_assert_eq!(mask & !universe.full_mask(), 0, "mask has bits outside the universe");
        Graph { universe: Arc::clone(universe), mask: mask & universe.full_mask() }
    }

    /// Builds a graph from labelled edge pairs.
    pub fn from_edges<'a, I>(universe: &Arc<VertexUniverse>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut mask = 0u64;
        for (s, t) in edges {
            let s = universe.require(s)?;
            let t = universe.require(t)?;
            mask |= 1 << universe.edge_index(s, t);
        }
        Ok(Graph::from_mask(universe, mask))
    }

    pub fn universe(&self) -> &Arc<VertexUniverse> {
        &self.universe
    }

    pub fn edge_mask(&self) -> u64 {
        self.mask
    }

    /// Canonical index of this graph: the edge mask read as an integer.
    pub fn canonical_index(&self) -> u64 {
        self.mask
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.mask >> self.universe.edge_index(source, target) & 1 == 1
    }

    pub fn has_edge_labelled(&self, source: &str, target: &str) -> Result<bool, GraphError> {
        let s = self.universe.require(source)?;
        let t = self.universe.require(target)?;
        Ok(self.has_edge(s, t))
    }

    pub fn edge_count(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let v = self.universe.size();
        let mask = self.mask;
        (0..self.universe.edge_count())
            .filter(move |i| mask >> i & 1 == 1)
            .map(move |i| (i / v, i % v))
    }

    /// Successor set `E(x)` of vertex `x`, as a vertex bitmask.
    pub fn successors(&self, x: usize) -> u64 {
        successor_row(self.mask, self.universe.size(), x)
    }

    /// Predecessor set `E^{-1}(y)` of vertex `y`, as a vertex bitmask.
    pub fn predecessors(&self, y: usize) -> u64 {
        predecessor_column(self.mask, self.universe.size(), y)
    }

    pub fn successor_labels(&self, x: &str) -> Result<Vec<String>, GraphError> {
        let xi = self.universe.require(x)?;
        Ok(self.vertex_set_labels(self.successors(xi)))
    }

    pub fn predecessor_labels(&self, y: &str) -> Result<Vec<String>, GraphError> {
        let yi = self.universe.require(y)?;
        Ok(self.vertex_set_labels(self.predecessors(yi)))
    }

    fn vertex_set_labels(&self, set: u64) -> Vec<String> {
        (0..self.universe.size())
            .filter(|i| set >> i & 1 == 1)
            .map(|i| self.universe.label(i).to_string())
            .collect()
    }
}

/// Successor row of `x` in an edge mask (vertex bitmask of targets).
pub(crate) fn successor_row(mask: u64, v: usize, x: usize) -> u64 {
    (mask >> (x * v)) & mask_with_low_bits(v)
}

/// Predecessor column of `y` in an edge mask (vertex bitmask of sources).
pub(crate) fn predecessor_column(mask: u64, v: usize, y: usize) -> u64 {
    let mut col = 0u64;
    for x in 0..v {
        col |= (mask >> (x * v + y) & 1) << x;
    }
    col
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask && self.universe == other.universe
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .map(|(s, t)| format!("({},{})", self.universe.label(s), self.universe.label(t)))
            .collect();
        write!(f, "Graph{{{}}}", edges.join(" "))
    }
}

/// A coalition of agents, stored as a bitmask with bit `i` = agent `i + 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(pub u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn grand(n: usize) -> Coalition {
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(agent: usize) -> Coalition {
        Coalition(1 << agent)
    }

    pub fn from_agents<I: IntoIterator<Item = usize>>(agents: I) -> Coalition {
        Coalition(agents.into_iter().fold(0, |m, a| m | 1 << a))
    }

    pub fn contains(self, agent: usize) -> bool {
        self.0 >> agent & 1 == 1
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn agents(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    pub fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn complement(self, n: usize) -> Coalition {
        Coalition(!self.0 & Coalition::grand(n).0)
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based on the outside.
        let agents: Vec<String> = self.agents().map(|a| (a + 1).to_string()).collect();
        write!(f, "{{{}}}", agents.join(","))
    }
}

/// A profile: one graph per agent, all over the same universe.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Profile {
    universe: Arc<VertexUniverse>,
    graphs: Vec<Graph>,
}

impl Profile {
    pub fn new(graphs: Vec<Graph>) -> Result<Self, GraphError> {
        if graphs.len() < 2 {
            return Err(GraphError::TooFewAgents(graphs.len()));
        }
        let universe = Arc::clone(graphs[0].universe());
        if graphs.iter().any(|g| g.universe() != &universe) {
            return Err(GraphError::UniverseMismatch);
        }
        Ok(Profile { universe, graphs })
    }

    pub fn from_masks(universe: &Arc<VertexUniverse>, masks: &[u64]) -> Result<Self, GraphError> {
        Profile::new(masks.iter().map(|&m| Graph::from_mask(universe, m)).collect())
    }

    pub fn universe(&self) -> &Arc<VertexUniverse> {
        &self.universe
    }

    /// Number of agents `n`.
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 2 by construction
    }

    /// Graph of agent `i` (0-based).
    pub fn graph(&self, agent: usize) -> &Graph {
        &self.graphs[agent]
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn masks(&self) -> Vec<u64> {
        self.graphs.iter().map(Graph::edge_mask).collect()
    }

    /// Coalition of agents accepting edge `(source, target)`.
    pub fn supporters(&self, source: usize, target: usize) -> Coalition {
        let bit = self.universe.edge_index(source, target);
        let mut c = 0u32;
        for (i, g) in self.graphs.iter().enumerate() {
            c |= ((g.edge_mask() >> bit & 1) as u32) << i;
        }
        Coalition(c)
    }

    pub fn supporters_labelled(&self, source: &str, target: &str) -> Result<Coalition, GraphError> {
        let s = self.universe.require(source)?;
        let t = self.universe.require(target)?;
        Ok(self.supporters(s, t))
    }
}

/// A disjoint pair of edge sets used to carve out `P[S+, S-]`: graphs that
/// contain every edge of `plus` and no edge of `minus`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EdgeSetPair {
    plus: u64,
    minus: u64,
}

impl EdgeSetPair {
    pub fn new(plus: u64, minus: u64) -> Result<Self, GraphError> {
        if plus & minus != 0 {
            return Err(GraphError::OverlappingRestriction);
        }
        Ok(EdgeSetPair { plus, minus })
    }

    pub fn from_edges<'a, I, J>(
        universe: &VertexUniverse,
        plus: I,
        minus: J,
    ) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
        J: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut p = 0u64;
        for (s, t) in plus {
            p |= 1 << universe.edge_index(universe.require(s)?, universe.require(t)?);
        }
        let mut m = 0u64;
        for (s, t) in minus {
            m |= 1 << universe.edge_index(universe.require(s)?, universe.require(t)?);
        }
        EdgeSetPair::new(p, m)
    }

    pub fn plus(&self) -> u64 {
        self.plus
    }

    pub fn minus(&self) -> u64 {
        self.minus
    }

    /// Does `mask` belong to the restriction window (`S+ ⊆ E`, `S- ∩ E = ∅`)?
    pub fn admits(&self, mask: u64) -> bool {
        mask & self.plus == self.plus && mask & self.minus == 0
    }

    pub fn describe(&self, universe: &VertexUniverse) -> String {
        let fmt_set = |set: u64| {
            let edges: Vec<String> = (0..universe.edge_count())
                .filter(|i| set >> i & 1 == 1)
                .map(|i| universe.describe_edge(i))
                .collect();
            format!("{{{}}}", edges.join(","))
        };
        format!("S+={} S-={}", fmt_set(self.plus), fmt_set(self.minus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Arc<VertexUniverse> {
        VertexUniverse::with_default_labels(3).unwrap()
    }

    #[test]
    fn universe_rejects_duplicates_and_bad_sizes() {
        assert!(matches!(
            VertexUniverse::new(["a", "a"]),
            Err(GraphError::DuplicateLabel(_))
        ));
        assert!(matches!(
            VertexUniverse::new(Vec::<String>::new()),
            Err(GraphError::BadUniverseSize(0))
        ));
        assert!(VertexUniverse::with_default_labels(9).is_err());
    }

    #[test]
    fn successors_read_off_edges() {
        let u = xyz();
        let g = Graph::from_edges(&u, [("x", "y"), ("x", "z")]).unwrap();
        assert_eq!(g.successor_labels("x").unwrap(), vec!["y", "z"]);

        let empty = Graph::empty(&u);
        assert_eq!(empty.successor_labels("x").unwrap(), Vec::<String>::new());

        let incoming = Graph::from_edges(&u, [("y", "x")]).unwrap();
        assert_eq!(incoming.successor_labels("x").unwrap(), Vec::<String>::new());
    }

    #[test]
    fn predecessors_are_the_dual() {
        let u = xyz();
        let g = Graph::from_edges(&u, [("x", "y")]).unwrap();
        assert_eq!(g.predecessor_labels("y").unwrap(), vec!["x"]);
        assert_eq!(g.predecessor_labels("x").unwrap(), Vec::<String>::new());

        let g2 = Graph::from_edges(&u, [("x", "y"), ("z", "y")]).unwrap();
        assert_eq!(g2.predecessor_labels("y").unwrap(), vec!["x", "z"]);
    }

    #[test]
    fn unknown_labels_are_usage_errors() {
        let u = xyz();
        let g = Graph::empty(&u);
        assert!(matches!(g.successor_labels("q"), Err(GraphError::UnknownLabel(_))));
        assert!(Graph::from_edges(&u, [("x", "q")]).is_err());
    }

    #[test]
    fn edge_indexing_is_source_major() {
        let u = xyz();
        assert_eq!(u.edge_index(0, 1), 1); // (x,y)
        assert_eq!(u.edge_index(1, 0), 3); // (y,x)
        assert_eq!(u.edge_at(5), (1, 2)); // (y,z)
        let g = Graph::from_edges(&u, [("y", "z")]).unwrap();
        assert_eq!(g.canonical_index(), 1 << 5);
    }

    #[test]
    fn profile_needs_two_agents_on_one_universe() {
        let u = xyz();
        let g = Graph::empty(&u);
        assert!(matches!(
            Profile::new(vec![g.clone()]),
            Err(GraphError::TooFewAgents(1))
        ));
        let other = VertexUniverse::with_default_labels(2).unwrap();
        assert!(matches!(
            Profile::new(vec![g, Graph::empty(&other)]),
            Err(GraphError::UniverseMismatch)
        ));
    }

    #[test]
    fn supporters_collects_accepting_agents() {
        let u = xyz();
        // Three cyclically shifted strict orders.
        let e1 = Graph::from_edges(&u, [("x", "y"), ("y", "z"), ("x", "z")]).unwrap();
        let e2 = Graph::from_edges(&u, [("z", "x"), ("x", "y"), ("z", "y")]).unwrap();
        let e3 = Graph::from_edges(&u, [("y", "z"), ("z", "x"), ("y", "x")]).unwrap();
        let pr = Profile::new(vec![e1, e2, e3]).unwrap();
        assert_eq!(pr.supporters_labelled("x", "y").unwrap(), Coalition::from_agents([0, 1]));
        assert_eq!(pr.supporters_labelled("x", "x").unwrap(), Coalition::EMPTY);

        let g = Graph::from_edges(&u, [("x", "y")]).unwrap();
        let unanimous = Profile::new(vec![g.clone(), g.clone(), g]).unwrap();
        assert_eq!(unanimous.supporters_labelled("x", "y").unwrap(), Coalition::grand(3));
    }

    #[test]
    fn edge_set_pair_rejects_overlap() {
        assert!(EdgeSetPair::new(0b10, 0b11).is_err());
        let p = EdgeSetPair::new(0b01, 0b10).unwrap();
        assert!(p.admits(0b101));
        assert!(!p.admits(0b110));
        assert!(!p.admits(0b000));
    }

    #[test]
    fn coalition_display_is_one_based() {
        assert_eq!(Coalition::from_agents([0, 2]).to_string(), "{1,3}");
        assert_eq!(Coalition::EMPTY.to_string(), "{}");
    }
}
