//! Exhaustive axiom deciders for black-box aggregation rules, plus
//! winning-coalition extraction and dictatorship/oligarchy detection.
//!
//! Each check quantifies over the whole profile space at the rule's
//! `(universe, n)`, optionally restricted to profiles of graphs satisfying a
//! property. Rules are treated as black boxes: nothing inspects the rule
//! description, so synthetic rules get the same treatment as builtin ones.
//!
//! Witness order. Single-profile axioms (unanimity, groundedness,
//! neutrality) order witnesses by the profile's canonical index, then by the
//! edge indices involved. Pairwise axioms order witnesses by the profile
//! that completes the violation, then the earlier profile, then the edge or
//! vertex; monotonicity orders by the base profile, edge, agent. The first
//! witness in that order is the one reported, independent of thread count.

use std::sync::Arc;

use thiserror::Error;

use crate::enumerate::graph_pool;
use crate::family::CoalitionFamily;
use crate::graph::{predecessor_column, successor_row, Coalition, Graph, Profile, VertexUniverse};
use crate::property::GraphProperty;
use crate::rules::AggregationRule;
use crate::search::{profile_masks, profile_space, scan_profiles_fold, scan_profiles_min, CapExceeded, Caps};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axiom {
    Iie,
    Iis,
    Iit,
    Unanimity,
    Groundedness,
    Anonymity,
    Neutrality,
    NrNeutrality,
    Monotonicity,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::Iie,
        Axiom::Iis,
        Axiom::Iit,
        Axiom::Unanimity,
        Axiom::Groundedness,
        Axiom::Anonymity,
        Axiom::Neutrality,
        Axiom::NrNeutrality,
        Axiom::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Iie => "iie",
            Axiom::Iis => "iis",
            Axiom::Iit => "iit",
            Axiom::Unanimity => "unanimity",
            Axiom::Groundedness => "groundedness",
            Axiom::Anonymity => "anonymity",
            Axiom::Neutrality => "neutrality",
            Axiom::NrNeutrality => "nr-neutrality",
            Axiom::Monotonicity => "monotonicity",
        }
    }

    pub fn parse(name: &str) -> Option<Axiom> {
        Axiom::ALL.iter().copied().find(|a| a.name() == name)
    }
}

/// What the profile quantifier ranges over.
#[derive(Clone, Debug, Default)]
pub enum AxiomScope {
    #[default]
    AllGraphs,
    /// Profiles whose graphs all satisfy the property.
    Restricted(GraphProperty),
}

impl AxiomScope {
    fn pool(&self, universe: &Arc<VertexUniverse>, caps: &Caps) -> Result<Vec<u64>, CapExceeded> {
        match self {
            AxiomScope::AllGraphs => graph_pool(universe, None, caps),
            AxiomScope::Restricted(p) => graph_pool(universe, Some(p), caps),
        }
    }
}

/// A re-checkable counterexample to an axiom.
#[derive(Clone, Debug)]
pub struct AxiomWitness {
    /// One profile for single-profile axioms, two for pairwise ones
    /// (earlier profile first).
    pub profiles: Vec<Profile>,
    /// Outputs of the rule on those profiles, in the same order.
    pub outputs: Vec<Graph>,
    /// Edge indices involved in the violation.
    pub edges: Vec<usize>,
    /// Agents involved (monotonicity only), 0-based.
    pub agents: Vec<usize>,
    /// Vertices involved (IIS source / IIT target).
    pub vertices: Vec<usize>,
    pub note: String,
}

#[derive(Clone, Debug)]
pub enum AxiomOutcome {
    Pass { profiles_scanned: u64 },
    Fail(AxiomWitness),
}

#[derive(Clone, Debug)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub outcome: AxiomOutcome,
}

impl AxiomVerdict {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, AxiomOutcome::Pass { .. })
    }

    pub fn witness(&self) -> Option<&AxiomWitness> {
        match &self.outcome {
            AxiomOutcome::Pass { .. } => None,
            AxiomOutcome::Fail(w) => Some(w),
        }
    }
}

/// Decides `axiom` for `rule` by exhaustive search over the scoped profile
/// space. Fails with the canonically smallest witness.
pub fn check_axiom(
    rule: &AggregationRule,
    axiom: Axiom,
    scope: &AxiomScope,
    caps: &Caps,
) -> Result<AxiomVerdict, CapExceeded> {
    let universe = rule.universe();
    let n = rule.agents();
    let pool = scope.pool(universe, caps)?;
    let total = checked_space(&pool, n, axiom.name(), caps)?;

    let outcome = match axiom {
        Axiom::Unanimity => check_unanimity(rule, &pool, total),
        Axiom::Groundedness => check_groundedness(rule, &pool, total),
        Axiom::Neutrality => check_neutrality(rule, &pool, total, false),
        Axiom::NrNeutrality => check_neutrality(rule, &pool, total, true),
        Axiom::Anonymity => check_anonymity(rule, &pool, total),
        Axiom::Monotonicity => check_monotonicity(rule, scope, &pool, total),
        Axiom::Iie => check_iie(rule, &pool, total),
        Axiom::Iis => check_iis_or_iit(rule, &pool, total, Direction::Sources),
        Axiom::Iit => check_iis_or_iit(rule, &pool, total, Direction::Targets),
    };
    Ok(AxiomVerdict { axiom, outcome })
}

fn checked_space(
    pool: &[u64],
    n: usize,
    what: &str,
    caps: &Caps,
) -> Result<u64, CapExceeded> {
    match profile_space(pool.len(), n) {
        Some(total) if total <= caps.max_profiles => Ok(total),
        other => Err(CapExceeded::new(
            &format!("profile space for {what}"),
            other.map(u128::from).unwrap_or(u128::MAX),
            caps.max_profiles as u128,
            "reduce |V| or n, restrict the scope, or raise --max-profiles",
        )),
    }
}

fn build_profile(universe: &Arc<VertexUniverse>, masks: &[u64]) -> Profile {
    Profile::from_masks(universe, masks).expect("scan profiles are well-formed")
}

fn pass(total: u64) -> AxiomOutcome {
    AxiomOutcome::Pass { profiles_scanned: total }
}

fn check_unanimity(rule: &AggregationRule, pool: &[u64], total: u64) -> AxiomOutcome {
    let universe = rule.universe();
    let hit = scan_profiles_min(pool, rule.agents(), total, |_, masks| {
        let intersection = masks.iter().fold(u64::MAX, |a, m| a & m) & universe.full_mask();
        let out = rule.eval_masks(masks);
        let missing = intersection & !out;
        (missing != 0).then(|| (masks.to_vec(), out, missing.trailing_zeros() as usize))
    });
    match hit {
        None => pass(total),
        Some((_, (masks, out, edge))) => AxiomOutcome::Fail(AxiomWitness {
            profiles: vec![build_profile(universe, &masks)],
            outputs: vec![Graph::from_mask(universe, out)],
            edges: vec![edge],
            agents: vec![],
            vertices: vec![],
            note: format!(
                "edge {} is accepted by every agent but missing from the outcome",
                universe.describe_edge(edge)
            ),
        }),
    }
}

fn check_groundedness(rule: &AggregationRule, pool: &[u64], total: u64) -> AxiomOutcome {
    let universe = rule.universe();
    let hit = scan_profiles_min(pool, rule.agents(), total, |_, masks| {
        let union = masks.iter().fold(0u64, |a, m| a | m);
        let out = rule.eval_masks(masks);
        let extra = out & !union & universe.full_mask();
        (extra != 0).then(|| (masks.to_vec(), out, extra.trailing_zeros() as usize))
    });
    match hit {
        None => pass(total),
        Some((_, (masks, out, edge))) => AxiomOutcome::Fail(AxiomWitness {
            profiles: vec![build_profile(universe, &masks)],
            outputs: vec![Graph::from_mask(universe, out)],
            edges: vec![edge],
            agents: vec![],
            vertices: vec![],
            note: format!(
                "edge {} appears in the outcome although no agent accepts it",
                universe.describe_edge(edge)
            ),
        }),
    }
}

fn check_neutrality(
    rule: &AggregationRule,
    pool: &[u64],
    total: u64,
    nonreflexive_only: bool,
) -> AxiomOutcome {
    let universe = rule.universe();
    let n = rule.agents();
    let edges = universe.edge_count();
    let diagonal = universe.diagonal_mask();

    let hit = scan_profiles_min(pool, n, total, |_, masks| {
        let out = rule.eval_masks(masks);
        // Per coalition: first accepted and first rejected edge.
        let mut first_acc = [usize::MAX; 64];
        let mut first_rej = [usize::MAX; 64];
        let mut best: Option<(usize, usize)> = None;
        for e in 0..edges {
            if nonreflexive_only && diagonal >> e & 1 == 1 {
                continue;
            }
            let mut coalition = 0usize;
            for (i, m) in masks.iter().enumerate() {
                coalition |= ((m >> e & 1) as usize) << i;
            }
            let slot = if out >> e & 1 == 1 { &mut first_acc } else { &mut first_rej };
            if slot[coalition] == usize::MAX {
                slot[coalition] = e;
            }
            let (a, r) = (first_acc[coalition], first_rej[coalition]);
            if a != usize::MAX && r != usize::MAX {
                let pair = (a.min(r), a.max(r));
                if best.is_none_or(|b| pair < b) {
                    best = Some(pair);
                }
            }
        }
        best.map(|pair| (masks.to_vec(), out, pair))
    });

    match hit {
        None => pass(total),
        Some((_, (masks, out, (e1, e2)))) => AxiomOutcome::Fail(AxiomWitness {
            profiles: vec![build_profile(universe, &masks)],
            outputs: vec![Graph::from_mask(universe, out)],
            edges: vec![e1, e2],
            agents: vec![],
            vertices: vec![],
            note: format!(
                "edges {} and {} have the same supporters but only one is accepted",
                universe.describe_edge(e1),
                universe.describe_edge(e2)
            ),
        }),
    }
}

fn check_anonymity(rule: &AggregationRule, pool: &[u64], total: u64) -> AxiomOutcome {
    let universe = rule.universe();
    let n = rule.agents();
    let hit = scan_profiles_min(pool, n, total, |_, masks| {
        let mut sorted = masks.to_vec();
        sorted.sort_unstable();
        if sorted == masks {
            return None;
        }
        let out = rule.eval_masks(masks);
        let out_repr = rule.eval_masks(&sorted);
        (out != out_repr).then_some((masks.to_vec(), sorted, out, out_repr))
    });
    match hit {
        None => pass(total),
        Some((_, (masks, sorted, out, out_repr))) => AxiomOutcome::Fail(AxiomWitness {
            profiles: vec![build_profile(universe, &sorted), build_profile(universe, &masks)],
            outputs: vec![
                Graph::from_mask(universe, out_repr),
                Graph::from_mask(universe, out),
            ],
            edges: vec![],
            agents: vec![],
            vertices: vec![],
            note: "permuting the agents changes the outcome".to_string(),
        }),
    }
}

fn check_monotonicity(
    rule: &AggregationRule,
    scope: &AxiomScope,
    pool: &[u64],
    total: u64,
) -> AxiomOutcome {
    let universe = rule.universe();
    let n = rule.agents();
    let edges = universe.edge_count();
    // In a restricted scope the incremented graph must stay inside the pool.
    let member: Option<Vec<bool>> = match scope {
        AxiomScope::AllGraphs => None,
        AxiomScope::Restricted(_) => {
            let mut bits = vec![false; universe.graph_count() as usize];
            for &m in pool {
                bits[m as usize] = true;
            }
            Some(bits)
        }
    };

    let hit = scan_profiles_min(pool, n, total, |_, masks| {
        let out = rule.eval_masks(masks);
        if out == 0 {
            return None;
        }
        let mut raised = masks.to_vec();
        for e in 0..edges {
            if out >> e & 1 == 0 {
                continue;
            }
            for i in 0..n {
                if masks[i] >> e & 1 == 1 {
                    continue;
                }
                let lifted = masks[i] | 1 << e;
                if member.as_ref().is_some_and(|bits| !bits[lifted as usize]) {
                    continue;
                }
                raised[i] = lifted;
                let out2 = rule.eval_masks(&raised);
                raised[i] = masks[i];
                if out2 >> e & 1 == 0 {
                    return Some((masks.to_vec(), e, i, out, out2));
                }
            }
        }
        None
    });

    match hit {
        None => pass(total),
        Some((_, (masks, e, i, out, out2))) => {
            let mut raised = masks.clone();
            raised[i] |= 1 << e;
            AxiomOutcome::Fail(AxiomWitness {
                profiles: vec![build_profile(universe, &masks), build_profile(universe, &raised)],
                outputs: vec![Graph::from_mask(universe, out), Graph::from_mask(universe, out2)],
                edges: vec![e],
                agents: vec![i],
                vertices: vec![],
                note: format!(
                    "agent {} additionally accepting {} removes it from the outcome",
                    i + 1,
                    universe.describe_edge(e)
                ),
            })
        }
    }
}

/// Per-cell record for the map-based pairwise scans: the first profile that
/// hit the cell (with its observed value) and the first profile whose value
/// disagreed with it.
#[derive(Clone, Copy)]
struct Cell {
    first_idx: u64,
    first_val: u16,
    conflict_idx: u64,
    conflict_val: u16,
}

const EMPTY_CELL: Cell = Cell {
    first_idx: u64::MAX,
    first_val: 0,
    conflict_idx: u64::MAX,
    conflict_val: 0,
};

impl Cell {
    fn observe(&mut self, idx: u64, val: u16) {
        if self.first_idx == u64::MAX {
            self.first_idx = idx;
            self.first_val = val;
        } else if val != self.first_val && idx < self.conflict_idx {
            self.conflict_idx = idx;
            self.conflict_val = val;
        }
    }

    /// Merge keeps the invariant: `first` is the least index seen, `conflict`
    /// the least index whose value differs from `first_val`.
    fn merge(self, other: Cell) -> Cell {
        if self.first_idx == u64::MAX {
            return other;
        }
        if other.first_idx == u64::MAX {
            return self;
        }
        let (base, rest) = if self.first_idx <= other.first_idx {
            (self, other)
        } else {
            (other, self)
        };
        let mut merged = Cell {
            first_idx: base.first_idx,
            first_val: base.first_val,
            conflict_idx: u64::MAX,
            conflict_val: 0,
        };
        for (idx, val) in [
            (base.conflict_idx, base.conflict_val),
            (rest.first_idx, rest.first_val),
            (rest.conflict_idx, rest.conflict_val),
        ] {
            if idx != u64::MAX && val != merged.first_val && idx < merged.conflict_idx {
                merged.conflict_idx = idx;
                merged.conflict_val = val;
            }
        }
        merged
    }

    fn violated(&self) -> bool {
        self.conflict_idx != u64::MAX
    }
}

fn merge_cells(mut a: Vec<Cell>, b: Vec<Cell>) -> Vec<Cell> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.merge(y);
    }
    a
}

fn check_iie(rule: &AggregationRule, pool: &[u64], total: u64) -> AxiomOutcome {
    let universe = rule.universe();
    let n = rule.agents();
    let edges = universe.edge_count();
    let cells_per_edge = 1usize << n;

    let cells = scan_profiles_fold(
        pool,
        n,
        total,
        || vec![EMPTY_CELL; edges * cells_per_edge],
        |cells, idx, masks| {
            let out = rule.eval_masks(masks);
            for e in 0..edges {
                let mut coalition = 0usize;
                for (i, m) in masks.iter().enumerate() {
                    coalition |= ((m >> e & 1) as usize) << i;
                }
                cells[e * cells_per_edge + coalition].observe(idx, (out >> e & 1) as u16);
            }
        },
        merge_cells,
    );

    // Violations ordered by (completing profile, earlier profile, edge).
    let best = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.violated())
        .map(|(slot, c)| (c.conflict_idx, c.first_idx, slot / cells_per_edge))
        .min();

    match best {
        None => pass(total),
        Some((later, earlier, edge)) => {
            let m1 = profile_masks(pool, n, earlier);
            let m2 = profile_masks(pool, n, later);
            let o1 = rule.eval_masks(&m1);
            let o2 = rule.eval_masks(&m2);
            AxiomOutcome::Fail(AxiomWitness {
                profiles: vec![build_profile(universe, &m1), build_profile(universe, &m2)],
                outputs: vec![Graph::from_mask(universe, o1), Graph::from_mask(universe, o2)],
                edges: vec![edge],
                agents: vec![],
                vertices: vec![],
                note: format!(
                    "edge {} has the same supporters in both profiles but different acceptance",
                    universe.describe_edge(edge)
                ),
            })
        }
    }
}

enum Direction {
    Sources,
    Targets,
}

fn check_iis_or_iit(
    rule: &AggregationRule,
    pool: &[u64],
    total: u64,
    direction: Direction,
) -> AxiomOutcome {
    let universe = rule.universe();
    let n = rule.agents();
    let v = universe.size();
    let cells_per_vertex = 1usize << (n * v);

    let line = |mask: u64, vertex: usize| -> u64 {
        match direction {
            Direction::Sources => successor_row(mask, v, vertex),
            Direction::Targets => predecessor_column(mask, v, vertex),
        }
    };

    let cells = scan_profiles_fold(
        pool,
        n,
        total,
        || vec![EMPTY_CELL; v * cells_per_vertex],
        |cells, idx, masks| {
            let out = rule.eval_masks(masks);
            for x in 0..v {
                let mut key = 0usize;
                for (i, m) in masks.iter().enumerate() {
                    key |= (line(*m, x) as usize) << (i * v);
                }
                cells[x * cells_per_vertex + key].observe(idx, line(out, x) as u16);
            }
        },
        merge_cells,
    );

    let best = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.violated())
        .map(|(slot, c)| (c.conflict_idx, c.first_idx, slot / cells_per_vertex))
        .min();

    match best {
        None => pass(total),
        Some((later, earlier, vertex)) => {
            let m1 = profile_masks(pool, n, earlier);
            let m2 = profile_masks(pool, n, later);
            let o1 = rule.eval_masks(&m1);
            let o2 = rule.eval_masks(&m2);
            let what = match direction {
                Direction::Sources => "successors",
                Direction::Targets => "predecessors",
            };
            AxiomOutcome::Fail(AxiomWitness {
                profiles: vec![build_profile(universe, &m1), build_profile(universe, &m2)],
                outputs: vec![Graph::from_mask(universe, o1), Graph::from_mask(universe, o2)],
                edges: vec![],
                agents: vec![],
                vertices: vec![vertex],
                note: format!(
                    "every agent gives {} the same {what} in both profiles, \
                     but the outcome {what} differ",
                    universe.label(vertex)
                ),
            })
        }
    }
}

/// Re-derives the reported violation from the stored profiles, independently
/// of the search that found it.
pub fn revalidate_axiom_witness(
    rule: &AggregationRule,
    axiom: Axiom,
    witness: &AxiomWitness,
) -> bool {
    let universe = rule.universe();
    let outputs: Vec<u64> = witness.profiles.iter().map(|p| rule.apply(p).edge_mask()).collect();
    // Stored outputs must re-derive.
    if outputs.len() != witness.outputs.len()
        || outputs
            .iter()
            .zip(&witness.outputs)
            .any(|(m, g)| *m != g.edge_mask())
    {
        return false;
    }
    match axiom {
        Axiom::Unanimity => {
            let pr = &witness.profiles[0];
            let e = witness.edges[0];
            let all = pr.masks().iter().fold(u64::MAX, |a, m| a & m);
            all >> e & 1 == 1 && outputs[0] >> e & 1 == 0
        }
        Axiom::Groundedness => {
            let pr = &witness.profiles[0];
            let e = witness.edges[0];
            let any = pr.masks().iter().fold(0u64, |a, m| a | m);
            any >> e & 1 == 0 && outputs[0] >> e & 1 == 1
        }
        Axiom::Neutrality | Axiom::NrNeutrality => {
            let pr = &witness.profiles[0];
            let (e1, e2) = (witness.edges[0], witness.edges[1]);
            if axiom == Axiom::NrNeutrality {
                let diag = universe.diagonal_mask();
                if diag >> e1 & 1 == 1 || diag >> e2 & 1 == 1 {
                    return false;
                }
            }
            let sup = |e: usize| {
                let (s, t) = universe.edge_at(e);
                pr.supporters(s, t)
            };
            sup(e1) == sup(e2) && (outputs[0] >> e1 & 1) != (outputs[0] >> e2 & 1)
        }
        Axiom::Anonymity => {
            let mut a = witness.profiles[0].masks();
            let mut b = witness.profiles[1].masks();
            a.sort_unstable();
            b.sort_unstable();
            a == b && outputs[0] != outputs[1]
        }
        Axiom::Monotonicity => {
            let e = witness.edges[0];
            let before = witness.profiles[0].masks();
            let after = witness.profiles[1].masks();
            let only_gains_e = before
                .iter()
                .zip(&after)
                .all(|(b, a)| (a & !b) & !(1u64 << e) == 0 && b & !a == 0);
            only_gains_e && outputs[0] >> e & 1 == 1 && outputs[1] >> e & 1 == 0
        }
        Axiom::Iie => {
            let e = witness.edges[0];
            let (s, t) = universe.edge_at(e);
            witness.profiles[0].supporters(s, t) == witness.profiles[1].supporters(s, t)
                && (outputs[0] >> e & 1) != (outputs[1] >> e & 1)
        }
        Axiom::Iis => {
            let x = witness.vertices[0];
            let v = universe.size();
            let rows_equal = witness.profiles[0]
                .masks()
                .iter()
                .zip(witness.profiles[1].masks())
                .all(|(a, b)| successor_row(*a, v, x) == successor_row(b, v, x));
            rows_equal && successor_row(outputs[0], v, x) != successor_row(outputs[1], v, x)
        }
        Axiom::Iit => {
            let y = witness.vertices[0];
            let v = universe.size();
            let cols_equal = witness.profiles[0]
                .masks()
                .iter()
                .zip(witness.profiles[1].masks())
                .all(|(a, b)| predecessor_column(*a, v, y) == predecessor_column(b, v, y));
            cols_equal
                && predecessor_column(outputs[0], v, y) != predecessor_column(outputs[1], v, y)
        }
    }
}

/// How winning families are validated after extraction.
#[derive(Clone, Copy, Debug)]
pub enum FamilyValidation {
    /// Check the family law on a seeded sample of arbitrary profiles.
    RandomSample { samples: u32, seed: u64 },
    /// Check the family law on every profile.
    Exhaustive,
}

impl Default for FamilyValidation {
    fn default() -> Self {
        FamilyValidation::RandomSample { samples: 256, seed: 0x5eed }
    }
}

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error("rule is not independent of irrelevant edges; extraction refused")]
    NotIie(Box<AxiomWitness>),
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error(
        "validation found a profile where acceptance of {edge} disagrees with the extracted family"
    )]
    ValidationFailed { edge: String },
}

/// Winning-coalition families of an IIE rule, one per edge.
#[derive(Clone, Debug)]
pub struct WinningFamilies {
    pub per_edge: Vec<CoalitionFamily>,
}

impl WinningFamilies {
    /// The single family shared by all edges, if there is one.
    pub fn uniform(&self) -> Option<CoalitionFamily> {
        let first = *self.per_edge.first()?;
        self.per_edge.iter().all(|f| *f == first).then_some(first)
    }

    /// The single family shared by all nonreflexive edges, if any.
    pub fn uniform_nonreflexive(&self, universe: &VertexUniverse) -> Option<CoalitionFamily> {
        let diag = universe.diagonal_mask();
        let mut result: Option<CoalitionFamily> = None;
        for (e, f) in self.per_edge.iter().enumerate() {
            if diag >> e & 1 == 1 {
                continue;
            }
            match result {
                None => result = Some(*f),
                Some(r) if r == *f => {}
                Some(_) => return None,
            }
        }
        result
    }
}

/// Reads off the winning coalitions of an IIE rule from single-edge
/// profiles: exactly the agents of a coalition accept the edge and nothing
/// else. Refuses with the IIE counterexample when the rule is not IIE.
pub fn extract_winning_families(
    rule: &AggregationRule,
    validation: FamilyValidation,
    caps: &Caps,
) -> Result<WinningFamilies, ExtractionError> {
    let verdict = check_axiom(rule, Axiom::Iie, &AxiomScope::AllGraphs, caps)?;
    if let AxiomOutcome::Fail(w) = verdict.outcome {
        return Err(ExtractionError::NotIie(Box::new(w)));
    }

    let universe = rule.universe();
    let n = rule.agents();
    let edges = universe.edge_count();
    let mut per_edge = Vec::with_capacity(edges);
    let mut masks = vec![0u64; n];
    for e in 0..edges {
        let mut members = 0u64;
        for c in 0..(1u32 << n) {
            for (i, m) in masks.iter_mut().enumerate() {
                *m = if c >> i & 1 == 1 { 1 << e } else { 0 };
            }
            if rule.eval_masks(&masks) >> e & 1 == 1 {
                members |= 1 << c;
            }
        }
        per_edge.push(CoalitionFamily::new(n, members));
    }
    let families = WinningFamilies { per_edge };

    let law_holds = |masks: &[u64]| -> Option<usize> {
        let out = rule.eval_masks(masks);
        (0..edges).find(|&e| {
            let mut coalition = 0u32;
            for (i, m) in masks.iter().enumerate() {
                coalition |= ((m >> e & 1) as u32) << i;
            }
            (out >> e & 1 == 1) != families.per_edge[e].contains(Coalition(coalition))
        })
    };

    match validation {
        FamilyValidation::RandomSample { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sample = vec![0u64; n];
            for _ in 0..samples {
                for m in sample.iter_mut() {
                    *m = rng.gen_range(0..universe.graph_count());
                }
                if let Some(e) = law_holds(&sample) {
                    return Err(ExtractionError::ValidationFailed {
                        edge: universe.describe_edge(e),
                    });
                }
            }
        }
        FamilyValidation::Exhaustive => {
            let pool = graph_pool(universe, None, caps)?;
            let total = checked_space(&pool, n, "family validation", caps)?;
            if let Some((_, e)) =
                scan_profiles_min(&pool, n, total, |_, masks| law_holds(masks))
            {
                return Err(ExtractionError::ValidationFailed {
                    edge: universe.describe_edge(e),
                });
            }
        }
    }
    Ok(families)
}

/// Extensional dictatorship/oligarchy detection over the whole profile
/// space. `None` entries mean no candidate of that shape survived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegimeReport {
    pub dictator: Option<usize>,
    pub oligarchy: Option<Coalition>,
    pub nr_dictator: Option<usize>,
    pub nr_oligarchy: Option<Coalition>,
    pub profiles_scanned: u64,
}

#[derive(Clone, Copy)]
struct Viability {
    dict: u32,
    olig: u64,
    nr_dict: u32,
    nr_olig: u64,
}

/// Scans every profile and reports which fixed agent (dictator) or coalition
/// (oligarchy) reproduces the rule, on all edges and on the nonreflexive
/// ones. The smallest surviving candidate is reported.
#[allow(clippy::needless_range_loop)]
pub fn detect_regime(rule: &AggregationRule, caps: &Caps) -> Result<RegimeReport, CapExceeded> {
    let universe = rule.universe();
    let n = rule.agents();
    let pool = graph_pool(universe, None, caps)?;
    let total = checked_space(&pool, n, "regime detection", caps)?;
    let nr_mask = universe.full_mask() & !universe.diagonal_mask();
    let coalition_count = 1usize << n;
    let all_nonempty = ((1u128 << coalition_count) - 2) as u64; // drop bit 0 = empty coalition

    let start = Viability {
        dict: (Coalition::grand(n)).0,
        olig: all_nonempty,
        nr_dict: (Coalition::grand(n)).0,
        nr_olig: all_nonempty,
    };

    let survived = scan_profiles_fold(
        &pool,
        n,
        total,
        || start,
        |viable, _, masks| {
            if viable.dict == 0 && viable.olig == 0 && viable.nr_dict == 0 && viable.nr_olig == 0 {
                return;
            }
            let out = rule.eval_masks(masks);
            for (i, m) in masks.iter().enumerate() {
                if m ^ out != 0 {
                    viable.dict &= !(1 << i);
                }
                if (m ^ out) & nr_mask != 0 {
                    viable.nr_dict &= !(1 << i);
                }
            }
            // Subset intersections by dynamic programming over the coalition
            // index: drop the lowest agent bit and AND its mask back in.
            let mut inter = [u64::MAX; 64];
            for c in 1..coalition_count {
                let low = c.trailing_zeros() as usize;
                inter[c] = inter[c & (c - 1)] & masks[low];
            }
            for c in 1..coalition_count {
                if inter[c] ^ out != 0 {
                    viable.olig &= !(1u64 << c);
                }
                if (inter[c] ^ out) & nr_mask != 0 {
                    viable.nr_olig &= !(1u64 << c);
                }
            }
        },
        |a, b| Viability {
            dict: a.dict & b.dict,
            olig: a.olig & b.olig,
            nr_dict: a.nr_dict & b.nr_dict,
            nr_olig: a.nr_olig & b.nr_olig,
        },
    );

    let lowest_agent = |bits: u32| (bits != 0).then(|| bits.trailing_zeros() as usize);
    let lowest_coalition =
        |bits: u64| (bits != 0).then(|| Coalition(bits.trailing_zeros()));
    Ok(RegimeReport {
        dictator: lowest_agent(survived.dict),
        oligarchy: lowest_coalition(survived.olig),
        nr_dictator: lowest_agent(survived.nr_dict),
        nr_oligarchy: lowest_coalition(survived.nr_olig),
        profiles_scanned: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::RuleSpec;

    fn setup(v: usize, n: usize, spec: RuleSpec) -> AggregationRule {
        let u = VertexUniverse::with_default_labels(v).unwrap();
        spec.compile(&u, n).unwrap()
    }

    #[test]
    fn union_is_unanimous() {
        let rule = setup(3, 2, RuleSpec::Union);
        let verdict =
            check_axiom(&rule, Axiom::Unanimity, &AxiomScope::AllGraphs, &Caps::default()).unwrap();
        assert!(verdict.passed());
    }

    #[test]
    fn dictatorship_fails_anonymity_with_a_swap_witness() {
        let rule = setup(3, 2, RuleSpec::Dictator(1));
        let verdict =
            check_axiom(&rule, Axiom::Anonymity, &AxiomScope::AllGraphs, &Caps::default()).unwrap();
        let w = verdict.witness().expect("dictatorships are not anonymous");
        assert_eq!(w.profiles.len(), 2);
        // The two profiles are permutations of each other with different outcomes.
        assert!(revalidate_axiom_witness(&rule, Axiom::Anonymity, w));
        // Smallest witness: agent 1 empty, agent 2 the single-edge graph (x,x).
        assert_eq!(w.profiles[0].masks(), vec![0, 1]);
        assert_eq!(w.profiles[1].masks(), vec![1, 0]);
    }

    #[test]
    fn quota_rules_are_anonymous_monotonic_iie() {
        let caps = Caps::default();
        for q in 0..=3u32 {
            let rule = setup(3, 2, RuleSpec::UniformQuota(q));
            for axiom in [Axiom::Anonymity, Axiom::Monotonicity, Axiom::Iie] {
                let verdict =
                    check_axiom(&rule, axiom, &AxiomScope::AllGraphs, &caps).unwrap();
                assert!(verdict.passed(), "quota:{q} failed {}", axiom.name());
            }
        }
    }

    #[test]
    fn majority_is_neutral_but_a_loop_lover_is_only_nr_neutral() {
        let caps = Caps::default();
        let majority = setup(2, 2, RuleSpec::Majority);
        assert!(check_axiom(&majority, Axiom::Neutrality, &AxiomScope::AllGraphs, &caps)
            .unwrap()
            .passed());

        // Majority on nonreflexive edges, loops always accepted.
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let diag = u.diagonal_mask();
        let loop_lover = AggregationRule::custom("loops-free", &u, 2, move |masks| {
            (masks[0] & masks[1]) | diag
        });
        let verdict =
            check_axiom(&loop_lover, Axiom::Neutrality, &AxiomScope::AllGraphs, &caps).unwrap();
        let w = verdict.witness().expect("loop lover is not fully neutral");
        assert!(revalidate_axiom_witness(&loop_lover, Axiom::Neutrality, w));
        assert!(check_axiom(&loop_lover, Axiom::NrNeutrality, &AxiomScope::AllGraphs, &caps)
            .unwrap()
            .passed());
    }

    #[test]
    fn support_sensitive_rule_fails_iie_with_minimal_witness() {
        // Accept edge 0 iff edge 1 is unanimous: clearly edge-entangled.
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let rule = AggregationRule::custom("entangled", &u, 2, |masks| {
            if masks.iter().all(|m| m >> 1 & 1 == 1) {
                1
            } else {
                0
            }
        });
        let caps = Caps::default();
        let verdict = check_axiom(&rule, Axiom::Iie, &AxiomScope::AllGraphs, &caps).unwrap();
        let w = verdict.witness().expect("rule is not IIE");
        assert!(revalidate_axiom_witness(&rule, Axiom::Iie, w));

        // Independent brute force over all profile pairs, ordered by
        // (completing profile, earlier profile, edge).
        let pool: Vec<u64> = (0..16).collect();
        let mut best: Option<(u64, u64, usize)> = None;
        for late in 0..256u64 {
            for early in 0..late {
                let m1 = profile_masks(&pool, 2, early);
                let m2 = profile_masks(&pool, 2, late);
                let o1 = rule.eval_masks(&m1);
                let o2 = rule.eval_masks(&m2);
                for e in 0..4 {
                    let same_supporters =
                        (0..2).all(|i| (m1[i] >> e & 1) == (m2[i] >> e & 1));
                    if same_supporters && (o1 >> e & 1) != (o2 >> e & 1) {
                        let key = (late, early, e);
                        if best.is_none() || key < best.unwrap() {
                            best = Some(key);
                        }
                    }
                }
            }
        }
        let (late, early, edge) = best.unwrap();
        assert_eq!(w.edges[0], edge);
        assert_eq!(w.profiles[0].masks(), profile_masks(&pool, 2, early));
        assert_eq!(w.profiles[1].masks(), profile_masks(&pool, 2, late));
    }

    #[test]
    fn successor_approval_is_iis_but_not_iit() {
        let caps = Caps::default();
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let rule = RuleSpec::SuccessorApproval(crate::rules::ChoiceFunction::ArgmaxApproval)
            .compile(&u, 2)
            .unwrap();
        assert!(check_axiom(&rule, Axiom::Iis, &AxiomScope::AllGraphs, &caps).unwrap().passed());
        let verdict = check_axiom(&rule, Axiom::Iit, &AxiomScope::AllGraphs, &caps).unwrap();
        let w = verdict.witness().expect("argmax approval should not be IIT");
        assert!(revalidate_axiom_witness(&rule, Axiom::Iit, w));
    }

    #[test]
    fn single_supporter_rule_fails_monotonicity() {
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let rule = AggregationRule::custom("exactly-one", &u, 2, |masks| {
            let mut out = 0;
            for e in 0..4 {
                let count = masks.iter().filter(|m| *m >> e & 1 == 1).count();
                if count == 1 {
                    out |= 1 << e;
                }
            }
            out
        });
        let caps = Caps::default();
        let verdict =
            check_axiom(&rule, Axiom::Monotonicity, &AxiomScope::AllGraphs, &caps).unwrap();
        let w = verdict.witness().expect("exactly-one is not monotonic");
        assert!(revalidate_axiom_witness(&rule, Axiom::Monotonicity, w));
        // Canonically first base profile: agent 2 alone accepts edge 0, and
        // agent 1 gaining it kills the edge.
        assert_eq!(w.profiles[0].masks(), vec![0, 1]);
        assert_eq!(w.profiles[1].masks(), vec![1, 1]);
    }

    #[test]
    fn restricted_scope_quantifies_over_property_profiles_only() {
        // Intersection preserves reflexivity, so unanimity over reflexive
        // graphs is the same; but a rule that drops loops unless unanimous
        // passes unanimity on reflexive profiles while failing it globally.
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let diag = u.diagonal_mask();
        let rule = AggregationRule::custom("diag-strip", &u, 2, move |masks| {
            let inter = masks[0] & masks[1];
            let union = masks[0] | masks[1];
            inter | (union & !diag)
        });
        let caps = Caps::default();
        // Globally grounded? yes. Unanimous? yes (keeps the intersection).
        // Neutrality distinguishes loops from the rest.
        let global =
            check_axiom(&rule, Axiom::Neutrality, &AxiomScope::AllGraphs, &caps).unwrap();
        assert!(!global.passed());
        let scope =
            AxiomScope::Restricted(crate::property::GraphProperty::by_name("reflexivity").unwrap());
        let restricted = check_axiom(&rule, Axiom::Neutrality, &scope, &caps).unwrap();
        // On reflexive profiles every loop is unanimous, so the asymmetry
        // never shows on a same-supporters pair... unless a nonreflexive
        // unanimous edge is compared against a loop. Both are accepted, so
        // neutrality holds.
        assert!(restricted.passed());
    }

    #[test]
    fn extract_families_for_majority_and_dictator() {
        let caps = Caps::default();
        let u = VertexUniverse::with_default_labels(2).unwrap();

        let majority = RuleSpec::Majority.compile(&u, 3).unwrap();
        let fams = extract_winning_families(&majority, FamilyValidation::default(), &caps).unwrap();
        let expected = CoalitionFamily::from_coalitions(
            3,
            (0..8u32).map(Coalition).filter(|c| c.len() >= 2),
        );
        assert_eq!(fams.uniform(), Some(expected));

        let dictator = RuleSpec::Dictator(2).compile(&u, 3).unwrap();
        let fams = extract_winning_families(&dictator, FamilyValidation::Exhaustive, &caps).unwrap();
        let expected = CoalitionFamily::principal(3, Coalition::singleton(1));
        assert_eq!(fams.uniform(), Some(expected));

        let intersection = RuleSpec::Intersection.compile(&u, 3).unwrap();
        let fams =
            extract_winning_families(&intersection, FamilyValidation::default(), &caps).unwrap();
        let expected = CoalitionFamily::from_coalitions(3, [Coalition::grand(3)]);
        assert_eq!(fams.uniform(), Some(expected));
    }

    #[test]
    fn extraction_refuses_non_iie_rules() {
        let caps = Caps::default();
        let u = VertexUniverse::with_default_labels(2).unwrap();
        let rule = RuleSpec::RepresentativeVoter(crate::rules::RepresentativeMetric::MajorityClosest)
            .compile(&u, 2)
            .unwrap();
        match extract_winning_families(&rule, FamilyValidation::default(), &caps) {
            Err(ExtractionError::NotIie(w)) => {
                assert!(revalidate_axiom_witness(&rule, Axiom::Iie, &w));
            }
            other => panic!("expected IIE refusal, got {other:?}"),
        }
    }

    #[test]
    fn regime_detection_recognizes_the_usual_suspects() {
        let caps = Caps::default();
        let u = VertexUniverse::with_default_labels(2).unwrap();

        let olig = RuleSpec::Oligarchy(vec![1, 3]).compile(&u, 3).unwrap();
        let report = detect_regime(&olig, &caps).unwrap();
        assert_eq!(report.oligarchy, Some(Coalition::from_agents([0, 2])));
        assert_eq!(report.dictator, None);

        let majority = RuleSpec::Majority.compile(&u, 3).unwrap();
        let report = detect_regime(&majority, &caps).unwrap();
        assert_eq!(report, RegimeReport {
            dictator: None,
            oligarchy: None,
            nr_dictator: None,
            nr_oligarchy: None,
            profiles_scanned: report.profiles_scanned,
        });

        let dictator = RuleSpec::Dictator(1).compile(&u, 3).unwrap();
        let report = detect_regime(&dictator, &caps).unwrap();
        assert_eq!(report.dictator, Some(0));
        assert_eq!(report.nr_dictator, Some(0));
        assert_eq!(report.oligarchy, Some(Coalition::singleton(0)));
    }

    #[test]
    fn cap_violations_are_refusals() {
        let rule = setup(3, 4, RuleSpec::Majority);
        let tight = Caps { max_profiles: 1 << 10, ..Caps::default() };
        assert!(check_axiom(&rule, Axiom::Unanimity, &AxiomScope::AllGraphs, &tight).is_err());
    }
}
