//! The line-oriented text format for graphs and profiles, plus DOT output.
//!
//! ```text
//! # comment
//! vertices: x y z
//! agent 1:
//! x y
//! y z
//! agent 2:
//! z x
//! ```
//!
//! A single-graph file is the same format with exactly one `agent 1:` block.
//! The canonical serialization lists edges in canonical index order, so
//! `write(parse(f))` normalizes `f` and `parse(write(p)) == p`.

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Profile, VertexUniverse};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("a profile needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("expected a single-graph file with one agent block, got {0}")]
    NotSingleGraph(usize),
    #[error("could not read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

struct RawProfile {
    universe: Arc<VertexUniverse>,
    masks: Vec<u64>,
}

fn parse_raw(text: &str) -> Result<RawProfile, ParseError> {
    let mut universe: Option<Arc<VertexUniverse>> = None;
    let mut masks: Vec<u64> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        if let Some(rest) = line.strip_prefix("vertices:") {
            if universe.is_some() {
                return Err(syntax(lineno, "duplicate `vertices:` line"));
            }
            let labels: Vec<&str> = rest.split_whitespace().collect();
            universe = Some(
                VertexUniverse::new(labels)
                    .map_err(|source| ParseError::Graph { line: lineno, source })?,
            );
            continue;
        }

        let Some(universe) = universe.as_ref() else {
            return Err(syntax(lineno, "expected `vertices: <label> ...` first"));
        };

        if let Some(rest) = line.strip_prefix("agent") {
            let rest = rest.trim();
            let Some(number) = rest.strip_suffix(':') else {
                return Err(syntax(lineno, "agent header must end with `:`"));
            };
            let k: usize = number
                .trim()
                .parse()
                .map_err(|_| syntax(lineno, format!("bad agent number `{}`", number.trim())))?;
            if k != masks.len() + 1 {
                return Err(syntax(
                    lineno,
                    format!("expected `agent {}:`, got `agent {}:`", masks.len() + 1, k),
                ));
            }
            masks.push(0);
            continue;
        }

        // Anything else must be an edge line inside an agent block.
        if masks.is_empty() {
            return Err(syntax(lineno, "edge line before any `agent <k>:` header"));
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(syntax(lineno, format!("expected `<source> <target>`, got `{line}`")));
        }
        let s = universe
            .require(parts[0])
            .map_err(|source| ParseError::Graph { line: lineno, source })?;
        let t = universe
            .require(parts[1])
            .map_err(|source| ParseError::Graph { line: lineno, source })?;
        *masks.last_mut().unwrap() |= 1 << universe.edge_index(s, t);
    }

    let universe = universe.ok_or_else(|| syntax(text.lines().count(), "missing `vertices:` line"))?;
    Ok(RawProfile { universe, masks })
}

pub fn parse_profile_str(text: &str) -> Result<Profile, ParseError> {
    let raw = parse_raw(text)?;
    if raw.masks.len() < 2 {
        return Err(ParseError::TooFewAgents(raw.masks.len()));
    }
    Ok(Profile::from_masks(&raw.universe, &raw.masks).expect("raw profile is well-formed"))
}

pub fn parse_graph_str(text: &str) -> Result<Graph, ParseError> {
    let raw = parse_raw(text)?;
    if raw.masks.len() != 1 {
        return Err(ParseError::NotSingleGraph(raw.masks.len()));
    }
    Ok(Graph::from_mask(&raw.universe, raw.masks[0]))
}

pub fn parse_profile_file(path: impl AsRef<Path>) -> Result<Profile, ParseError> {
    parse_profile_str(&read(path.as_ref())?)
}

pub fn parse_graph_file(path: impl AsRef<Path>) -> Result<Graph, ParseError> {
    parse_graph_str(&read(path.as_ref())?)
}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path)
        .map_err(|source| ParseError::Io { path: path.display().to_string(), source })
}

fn write_header(universe: &VertexUniverse, out: &mut String) {
    out.push_str("vertices:");
    for label in universe.labels() {
        out.push(' ');
        out.push_str(label);
    }
    out.push('\n');
}

fn write_agent_block(universe: &VertexUniverse, mask: u64, agent: usize, out: &mut String) {
    out.push_str(&format!("agent {}:\n", agent + 1));
    for i in 0..universe.edge_count() {
        if mask >> i & 1 == 1 {
            let (s, t) = universe.edge_at(i);
            out.push_str(&format!("{} {}\n", universe.label(s), universe.label(t)));
        }
    }
}

/// Canonical serialization of a profile.
pub fn write_profile(profile: &Profile) -> String {
    let mut out = String::new();
    write_header(profile.universe(), &mut out);
    for (i, g) in profile.graphs().iter().enumerate() {
        write_agent_block(profile.universe(), g.edge_mask(), i, &mut out);
    }
    out
}

/// Canonical serialization of a single graph.
pub fn write_graph(graph: &Graph) -> String {
    let mut out = String::new();
    write_header(graph.universe(), &mut out);
    write_agent_block(graph.universe(), graph.edge_mask(), 0, &mut out);
    out
}

/// Graphviz DOT rendering: one node per vertex, one arrow per edge.
pub fn graph_to_dot(graph: &Graph) -> String {
    let mut out = String::from("digraph {\n");
    for label in graph.universe().labels() {
        out.push_str(&format!("  \"{label}\";\n"));
    }
    for (s, t) in graph.edges() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            graph.universe().label(s),
            graph.universe().label(t)
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let pr = parse_profile_str("vertices: x y z\nagent 1:\nx y\nagent 2:\n").unwrap();
        assert_eq!(pr.len(), 2);
        assert!(pr.graph(0).has_edge_labelled("x", "y").unwrap());
        assert_eq!(pr.graph(1).edge_count(), 0);
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let pr = parse_profile_str(
            "# three agents\nvertices: x y\n\nagent 1:\nx y\n# inner comment\nagent 2:\ny x\n",
        )
        .unwrap();
        assert_eq!(pr.len(), 2);
    }

    #[test]
    fn duplicate_agent_header_is_an_error() {
        let err = parse_profile_str("vertices: x y\nagent 1:\nagent 1:\n").unwrap_err();
        assert!(err.to_string().contains("expected `agent 2:`"));
    }

    #[test]
    fn agent_blocks_must_be_consecutive_from_one() {
        let err = parse_profile_str("vertices: x y\nagent 2:\n").unwrap_err();
        assert!(err.to_string().contains("expected `agent 1:`"));
    }

    #[test]
    fn error_positions_carry_line_numbers() {
        let err = parse_profile_str("vertices: x y\nagent 1:\nx q\nagent 2:\n").unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        let err = parse_profile_str("vertices: x x\n").unwrap_err();
        assert!(err.to_string().starts_with("line 1:"), "{err}");
    }

    #[test]
    fn profile_needs_two_agents() {
        assert!(matches!(
            parse_profile_str("vertices: x y\nagent 1:\n"),
            Err(ParseError::TooFewAgents(1))
        ));
    }

    #[test]
    fn graph_files_are_single_block() {
        let g = parse_graph_str("vertices: x y\nagent 1:\nx y\n").unwrap();
        assert!(g.has_edge_labelled("x", "y").unwrap());
        assert!(matches!(
            parse_graph_str("vertices: x y\nagent 1:\nagent 2:\n"),
            Err(ParseError::NotSingleGraph(2))
        ));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = "vertices: x y z\nagent 1:\nx y\ny z\nagent 2:\nz x\n";
        let pr = parse_profile_str(text).unwrap();
        let written = write_profile(&pr);
        let reparsed = parse_profile_str(&written).unwrap();
        assert_eq!(pr, reparsed);
        // And writing normalizes to the canonical edge order.
        let scrambled = "vertices: x y z\nagent 1:\ny z\nx y\nagent 2:\nz x\n";
        assert_eq!(write_profile(&parse_profile_str(scrambled).unwrap()), written);
    }

    #[test]
    fn dot_lists_isolated_vertices() {
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let g = Graph::from_edges(&u, [("x", "y")]).unwrap();
        let dot = graph_to_dot(&g);
        assert!(dot.contains("\"y\";"));
        assert!(dot.contains("\"x\" -> \"y\";"));
    }
}
