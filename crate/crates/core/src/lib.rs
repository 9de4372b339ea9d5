//! Brute-force verification toolkit for directed-graph aggregation.
//!
//! The crate models agents submitting directed graphs over a shared vertex
//! set, aggregation rules combining them into a collective graph, and the
//! machinery to interrogate such rules exhaustively at small scale:
//!
//! - [`graph`]: universes, graphs as edge bitmasks, profiles, coalitions;
//! - [`property`]: first-order graph properties and named composites;
//! - [`enumerate`]: canonical graph enumeration with configurable caps;
//! - [`io`]: the line-oriented graph/profile text format and DOT output;
//! - [`rules`]: quota, successor-approval, representative-voter, dictator,
//!   and oligarchy rules compiled to fast mask evaluators;
//! - [`axioms`]: exhaustive axiom deciders, winning-coalition extraction,
//!   filter/ultrafilter classification, and regime detection;
//! - [`metaprops`]: searches for the contagious/implicative/disjunctive
//!   structure of a property;
//! - [`modal`]: a modal-logic constraint language with Kripke semantics;
//! - [`cr`]: collective-rationality deciders at the property, frame, model,
//!   and world level;
//! - [`theoremlab`]: enumeration of all neutral coalition rules and
//!   machine-checked survivor sets for the classic impossibility results.
//!
//! Everything that searches reports the counterexample with the smallest
//! canonical index, independent of the worker count.

pub mod axioms;
pub mod cr;
pub mod enumerate;
pub mod family;
pub mod graph;
pub mod io;
pub mod metaprops;
pub mod modal;
pub mod property;
pub mod rules;
pub mod search;
pub mod theoremlab;

pub use graph::{Coalition, EdgeSetPair, Graph, GraphError, Profile, VertexUniverse};
pub use property::{BuiltinProperty, GraphProperty};
pub use rules::{AggregationRule, ChoiceFunction, RepresentativeMetric, RuleSpec};
pub use search::{CapExceeded, Caps};
