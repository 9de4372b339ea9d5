//! Machine-checked survivor sets for the classic impossibility results, at
//! desk scale: enumerate every neutral coalition rule, impose unanimity,
//! groundedness, and a collective-rationality constraint, and compare the
//! survivors against the filter or ultrafilter families predicted by the
//! theory. Also ships the walkthrough demos and the application presets.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::enumerate::graph_pool;
use crate::family::{classify_family, CoalitionFamily, FamilyClass};
use crate::graph::{Coalition, Graph, Profile, VertexUniverse};
use crate::metaprops::{is_disjunctive, is_implicative, MetaError};
use crate::modal::{fragment, parse_formula, Alphabet, Fragment, ModalFormula};
use crate::property::GraphProperty;
use crate::rules::{AggregationRule, RepresentativeMetric, RuleSpec};
use crate::search::{profile_space, scan_profiles_min, CapExceeded, Caps};

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error("property `{0}` is not implicative on this universe; pipeline refused")]
    NotImplicative(String),
    #[error("property `{0}` is not disjunctive on this universe; pipeline refused")]
    NotDisjunctive(String),
    #[error("no graph satisfies the imposed constraints")]
    EmptyPool,
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error(transparent)]
    Meta(#[from] MetaError),
}

/// The rule induced by a single family of winning coalitions, applied
/// uniformly to every edge: an edge is accepted iff its supporters form a
/// member coalition.
pub fn rule_from_family(
    universe: &Arc<VertexUniverse>,
    family: &CoalitionFamily,
) -> AggregationRule {
    let members = family.bit_pattern();
    let n = family.agents();
    let edges = universe.edge_count();
    AggregationRule::custom(&format!("family:{members:#06x}"), universe, n, move |masks| {
        let mut out = 0u64;
        for e in 0..edges {
            let mut coalition = 0usize;
            for (i, m) in masks.iter().enumerate() {
                coalition |= ((m >> e & 1) as usize) << i;
            }
            if members >> coalition & 1 == 1 {
                out |= 1 << e;
            }
        }
        out
    })
}

/// Every coalition family over `n` agents together with its induced rule,
/// in ascending bit-pattern order.
pub fn enumerate_neutral_rules(
    universe: &Arc<VertexUniverse>,
    n: usize,
    caps: &Caps,
) -> Result<impl Iterator<Item = (CoalitionFamily, AggregationRule)> + '_, CapExceeded> {
    if n as u32 > caps.max_family_agents {
        return Err(CapExceeded::new(
            "coalition-family space",
            1u128 << (1u32 << n.min(7)),
            1u128 << (1u32 << caps.max_family_agents),
            "reduce the agent count or raise the family cap",
        ));
    }
    let universe = Arc::clone(universe);
    Ok((0..(1u64 << (1 << n))).map(move |members| {
        let family = CoalitionFamily::new(n, members);
        let rule = rule_from_family(&universe, &family);
        (family, rule)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedSurvivors {
    /// The filters: exactly the oligarchies.
    Filters,
    /// The ultrafilters: exactly the dictatorships.
    Ultrafilters,
}

impl ExpectedSurvivors {
    fn matches(self, class: &FamilyClass) -> bool {
        match self {
            ExpectedSurvivors::Filters => class.is_filter,
            ExpectedSurvivors::Ultrafilters => class.is_ultrafilter,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurvivorEntry {
    pub family: CoalitionFamily,
    pub class: FamilyClass,
}

#[derive(Clone, Debug)]
pub struct EliminatedEntry {
    pub family: CoalitionFamily,
    /// Name of the first constraint the candidate failed.
    pub failed: String,
    /// A profile demonstrating the failure, with the rule's output on it.
    pub witness: Option<(Profile, Graph)>,
}

#[derive(Clone, Debug)]
pub struct SurvivorReport {
    pub agents: usize,
    pub universe: Arc<VertexUniverse>,
    pub constraints: Vec<String>,
    pub expected: ExpectedSurvivors,
    pub survivors: Vec<SurvivorEntry>,
    pub eliminated: Vec<EliminatedEntry>,
    /// Survivor set equals the families the classification predicts.
    pub confirmed: bool,
    pub families_examined: u64,
    pub admissible_graphs: usize,
    pub elapsed: Duration,
}

impl SurvivorReport {
    pub fn survivor_patterns(&self) -> BTreeSet<u64> {
        self.survivors.iter().map(|s| s.family.bit_pattern()).collect()
    }
}

/// Oligarchy pipeline: filters every neutral coalition rule by unanimity,
/// groundedness, and collective rationality with respect to `implicative`
/// (conjoined with `scope` when given), then asserts the survivors are
/// exactly the filter families. Refuses when `implicative` is not in fact
/// implicative on this universe.
pub fn verify_oligarchy_theorem(
    universe: &Arc<VertexUniverse>,
    n: usize,
    implicative: &GraphProperty,
    scope: Option<&GraphProperty>,
    caps: &Caps,
) -> Result<SurvivorReport, TheoremError> {
    if !is_implicative(implicative, universe, caps)?.holds() {
        return Err(TheoremError::NotImplicative(implicative.name().to_string()));
    }
    survivor_pipeline(universe, n, implicative, scope, None, ExpectedSurvivors::Filters, caps)
}

/// Dictatorship pipeline: as the oligarchy pipeline, but the constraint also
/// includes a disjunctive property and the survivors must be exactly the
/// ultrafilter families (the dictatorships).
pub fn verify_dictatorship_theorem(
    universe: &Arc<VertexUniverse>,
    n: usize,
    implicative: &GraphProperty,
    disjunctive: &GraphProperty,
    scope: Option<&GraphProperty>,
    caps: &Caps,
) -> Result<SurvivorReport, TheoremError> {
    if !is_implicative(implicative, universe, caps)?.holds() {
        return Err(TheoremError::NotImplicative(implicative.name().to_string()));
    }
    if !is_disjunctive(disjunctive, universe, caps)?.holds() {
        return Err(TheoremError::NotDisjunctive(disjunctive.name().to_string()));
    }
    survivor_pipeline(
        universe,
        n,
        implicative,
        scope,
        Some(disjunctive),
        ExpectedSurvivors::Ultrafilters,
        caps,
    )
}

fn survivor_pipeline(
    universe: &Arc<VertexUniverse>,
    n: usize,
    implicative: &GraphProperty,
    scope: Option<&GraphProperty>,
    disjunctive: Option<&GraphProperty>,
    expected: ExpectedSurvivors,
    caps: &Caps,
) -> Result<SurvivorReport, TheoremError> {
    let start = Instant::now();
    if n as u32 > caps.max_family_agents {
        return Err(TheoremError::Cap(CapExceeded::new(
            "coalition-family space",
            1u128 << (1u32 << n.min(7)),
            1u128 << (1u32 << caps.max_family_agents),
            "reduce the agent count",
        )));
    }

    let mut parts: Vec<GraphProperty> = vec![implicative.clone()];
    parts.extend(disjunctive.cloned());
    parts.extend(scope.cloned());
    let constraints: Vec<String> = parts.iter().map(|p| p.name().to_string()).collect();
    let combined = move |mask: u64, u: &Arc<VertexUniverse>, parts: &[GraphProperty]| {
        parts.iter().all(|p| p.check_mask(mask, u))
    };

    // Admissible graphs: those satisfying every imposed property.
    let pool: Vec<u64> = graph_pool(universe, None, caps)
        .or_else(|_| {
            // Above the unfiltered cap we can still enumerate through the
            // filtered allowance, filtering as we go.
            let bits = universe.edge_count() as u32;
            if bits <= caps.max_filtered_graph_bits {
                Ok((0..universe.graph_count()).collect())
            } else {
                Err(CapExceeded::new(
                    "graph space",
                    1u128 << bits,
                    1u128 << caps.max_filtered_graph_bits,
                    "reduce the vertex count",
                ))
            }
        })?
        .into_iter()
        .filter(|&g| combined(g, universe, &parts))
        .collect();
    if pool.is_empty() {
        return Err(TheoremError::EmptyPool);
    }
    let space = profile_space(pool.len(), n).filter(|&s| s <= caps.max_profiles).ok_or_else(
        || {
            TheoremError::Cap(CapExceeded::new(
                "constraint-restricted profile space",
                profile_space(pool.len(), n).map(u128::from).unwrap_or(u128::MAX),
                caps.max_profiles as u128,
                "reduce |V| or n",
            ))
        },
    )?;

    let family_count = 1u64 << (1 << n);
    let grand = Coalition::grand(n);
    let full_profile = vec![universe.full_mask(); n];
    let empty_profile = vec![0u64; n];

    enum Outcome {
        Survived(SurvivorEntry),
        Died(EliminatedEntry),
    }

    let outcomes: Vec<Outcome> = (0..family_count)
        .into_par_iter()
        .map(|members| {
            let family = CoalitionFamily::new(n, members);
            let rule = rule_from_family(universe, &family);
            if !family.contains(grand) {
                // A unanimous edge would be dropped.
                let out = Graph::from_mask(universe, rule.eval_masks(&full_profile));
                return Outcome::Died(EliminatedEntry {
                    family,
                    failed: "unanimity".to_string(),
                    witness: Some((
                        Profile::from_masks(universe, &full_profile).unwrap(),
                        out,
                    )),
                });
            }
            if family.contains(Coalition::EMPTY) {
                // An unsupported edge would be accepted.
                let out = Graph::from_mask(universe, rule.eval_masks(&empty_profile));
                return Outcome::Died(EliminatedEntry {
                    family,
                    failed: "groundedness".to_string(),
                    witness: Some((
                        Profile::from_masks(universe, &empty_profile).unwrap(),
                        out,
                    )),
                });
            }
            let hit = scan_profiles_min(&pool, n, space, |_, masks| {
                let out = rule.eval_masks(masks);
                (!combined(out, universe, &parts)).then_some(out)
            });
            match hit {
                Some((idx, out)) => {
                    let masks = crate::search::profile_masks(&pool, n, idx);
                    Outcome::Died(EliminatedEntry {
                        family,
                        failed: "collective rationality".to_string(),
                        witness: Some((
                            Profile::from_masks(universe, &masks).unwrap(),
                            Graph::from_mask(universe, out),
                        )),
                    })
                }
                None => Outcome::Survived(SurvivorEntry {
                    family,
                    class: classify_family(&family),
                }),
            }
        })
        .collect();

    let mut survivors = Vec::new();
    let mut eliminated = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Survived(s) => survivors.push(s),
            Outcome::Died(e) => eliminated.push(e),
        }
    }

    // Independent cross-check: the survivors must be exactly the families
    // the classification predicts.
    let predicted: BTreeSet<u64> = (0..family_count)
        .filter(|&m| expected.matches(&classify_family(&CoalitionFamily::new(n, m))))
        .collect();
    let actual: BTreeSet<u64> = survivors.iter().map(|s| s.family.bit_pattern()).collect();
    let confirmed = predicted == actual;

    Ok(SurvivorReport {
        agents: n,
        universe: Arc::clone(universe),
        constraints,
        expected,
        survivors,
        eliminated,
        confirmed,
        families_examined: family_count,
        admissible_graphs: pool.len(),
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DemoName {
    Condorcet,
    Seriality,
    UnionTransitivity,
}

impl DemoName {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "condorcet" => Some(DemoName::Condorcet),
            "seriality" => Some(DemoName::Seriality),
            "union-transitivity" => Some(DemoName::UnionTransitivity),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DemoName::Condorcet => "condorcet",
            DemoName::Seriality => "seriality",
            DemoName::UnionTransitivity => "union-transitivity",
        }
    }
}

/// A computed walkthrough: the profile, the rule, its freshly computed
/// output, and the property observations that make the example interesting.
#[derive(Clone, Debug)]
pub struct Demo {
    pub name: DemoName,
    pub title: String,
    pub rule: RuleSpec,
    pub profile: Profile,
    pub output: Graph,
    pub observations: Vec<String>,
}

pub fn demo(name: DemoName) -> Demo {
    match name {
        DemoName::Condorcet => {
            let u = VertexUniverse::with_default_labels(3).unwrap();
            let e1 = Graph::from_edges(&u, [("x", "y"), ("y", "z"), ("x", "z")]).unwrap();
            let e2 = Graph::from_edges(&u, [("z", "x"), ("x", "y"), ("z", "y")]).unwrap();
            let e3 = Graph::from_edges(&u, [("y", "z"), ("z", "x"), ("y", "x")]).unwrap();
            let profile = Profile::new(vec![e1, e2, e3]).unwrap();
            let rule = RuleSpec::Majority;
            let output = rule.compile(&u, 3).unwrap().apply(&profile);
            let trans = GraphProperty::by_name("transitivity").unwrap();
            let complete = GraphProperty::by_name("completeness").unwrap();
            let observations = vec![
                format!(
                    "every input is transitive ({}) and complete ({})",
                    profile.graphs().iter().all(|g| trans.check(g)),
                    profile.graphs().iter().all(|g| complete.check(g)),
                ),
                format!("output transitivity: {}", trans.check(&output)),
                format!("output completeness: {}", complete.check(&output)),
                "pairwise majorities between three cyclically shifted rankings \
                 form a cycle"
                    .to_string(),
            ];
            Demo {
                name,
                title: "majority voting over three linear orders".to_string(),
                rule,
                profile,
                output,
                observations,
            }
        }
        DemoName::Seriality => {
            let u = VertexUniverse::with_default_labels(4).unwrap();
            let e1 = Graph::from_edges(&u, [("x", "w"), ("w", "x"), ("y", "y"), ("z", "z")])
                .unwrap();
            let e2 = Graph::from_edges(&u, [("y", "w"), ("w", "y"), ("x", "x"), ("z", "z")])
                .unwrap();
            let e3 = Graph::from_edges(&u, [("z", "w"), ("w", "z"), ("x", "x"), ("y", "y")])
                .unwrap();
            let profile = Profile::new(vec![e1, e2, e3]).unwrap();
            let rule = RuleSpec::Majority;
            let output = rule.compile(&u, 3).unwrap().apply(&profile);
            let serial = GraphProperty::by_name("seriality").unwrap();
            let observations = vec![
                format!(
                    "every input is serial: {}",
                    profile.graphs().iter().all(|g| serial.check(g))
                ),
                format!("output seriality: {}", serial.check(&output)),
                format!(
                    "successors of w in the output: {:?}",
                    output.successor_labels("w").unwrap()
                ),
            ];
            Demo {
                name,
                title: "majority can starve a vertex of successors".to_string(),
                rule,
                profile,
                output,
                observations,
            }
        }
        DemoName::UnionTransitivity => {
            let u = VertexUniverse::with_default_labels(3).unwrap();
            let e1 = Graph::from_edges(&u, [("x", "y")]).unwrap();
            let e2 = Graph::from_edges(&u, [("y", "z")]).unwrap();
            let profile = Profile::new(vec![e1, e2]).unwrap();
            let rule = RuleSpec::Union;
            let output = rule.compile(&u, 2).unwrap().apply(&profile);
            let trans = GraphProperty::by_name("transitivity").unwrap();
            let observations = vec![
                format!(
                    "both inputs are (vacuously) transitive: {}",
                    profile.graphs().iter().all(|g| trans.check(g))
                ),
                format!("output transitivity: {}", trans.check(&output)),
                format!(
                    "the union holds (x,y) and (y,z) but lacks (x,z): {}",
                    !output.has_edge_labelled("x", "z").unwrap()
                ),
            ];
            Demo {
                name,
                title: "the union rule loses transitivity".to_string(),
                rule,
                profile,
                output,
                observations,
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PresetName {
    Arrow,
    Clustering,
    PreorderOligarchy,
    Argumentation,
}

impl PresetName {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "arrow" => Some(PresetName::Arrow),
            "clustering" => Some(PresetName::Clustering),
            "preorder-oligarchy" => Some(PresetName::PreorderOligarchy),
            "argumentation" => Some(PresetName::Argumentation),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PresetName::Arrow => "arrow",
            PresetName::Clustering => "clustering",
            PresetName::PreorderOligarchy => "preorder-oligarchy",
            PresetName::Argumentation => "argumentation",
        }
    }
}

/// One world-level preservation check inside the argumentation preset.
#[derive(Clone, Debug)]
pub struct WorldCheck {
    pub rule: String,
    pub formula: String,
    pub fragment: Fragment,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub enum PresetStage {
    Survivors { label: String, expected_count: usize, report: SurvivorReport },
    WorldChecks { label: String, checks: Vec<WorldCheck> },
}

#[derive(Clone, Debug)]
pub struct PresetReport {
    pub name: PresetName,
    pub stages: Vec<PresetStage>,
}

impl PresetReport {
    /// All stages matched their expectations.
    pub fn confirmed(&self) -> bool {
        self.stages.iter().all(|s| match s {
            PresetStage::Survivors { expected_count, report, .. } => {
                report.confirmed && report.survivors.len() == *expected_count
            }
            PresetStage::WorldChecks { checks, .. } => checks.iter().all(|c| c.passed),
        })
    }
}

/// Runs one of the application presets at the given scale.
pub fn run_preset(
    name: PresetName,
    vertices: usize,
    agents: usize,
    caps: &Caps,
) -> Result<PresetReport, TheoremError> {
    let universe = VertexUniverse::with_default_labels(vertices)
        .map_err(|_| TheoremError::EmptyPool)?;
    let by_name = |n: &str| GraphProperty::by_name(n).expect("registered property");
    let mut stages = Vec::new();

    match name {
        PresetName::Arrow => {
            // Total preferences with ties: transitive, complete, reflexive.
            let report = verify_dictatorship_theorem(
                &universe,
                agents,
                &by_name("transitivity"),
                &by_name("completeness"),
                Some(&by_name("reflexivity")),
                caps,
            )?;
            stages.push(PresetStage::Survivors {
                label: "weak orders: survivors must be the dictatorships".to_string(),
                expected_count: agents,
                report,
            });
        }
        PresetName::PreorderOligarchy => {
            let report = verify_oligarchy_theorem(
                &universe,
                agents,
                &by_name("preorder"),
                None,
                caps,
            )?;
            stages.push(PresetStage::Survivors {
                label: "preorders: survivors must be the oligarchies".to_string(),
                expected_count: (1 << agents) - 1,
                report,
            });
        }
        PresetName::Clustering => {
            let report = verify_oligarchy_theorem(
                &universe,
                agents,
                &by_name("transitivity"),
                Some(&by_name("equivalence")),
                caps,
            )?;
            stages.push(PresetStage::Survivors {
                label: "equivalence relations: survivors must be the oligarchies".to_string(),
                expected_count: (1 << agents) - 1,
                report,
            });
            // Ruling out the all-singletons clustering (no two distinct
            // points related) tightens the survivors to the dictatorships.
            let report = verify_dictatorship_theorem(
                &universe,
                agents,
                &by_name("transitivity"),
                &by_name("has-nonreflexive-edge"),
                Some(&by_name("equivalence")),
                caps,
            )?;
            stages.push(PresetStage::Survivors {
                label: "nontrivial equivalence relations: survivors must be the dictatorships"
                    .to_string(),
                expected_count: agents,
                report,
            });
        }
        PresetName::Argumentation => {
            stages.push(argumentation_stage(&universe, agents, caps)?);
        }
    }

    Ok(PresetReport { name, stages })
}

/// Labelling constraints over the inverted attack relation, with the
/// world-level checks the fragment classification licenses: rules that
/// shrink towards one agent's graph preserve box constraints, rules that
/// grow from one agent's graph preserve diamond constraints, and rules that
/// copy an agent's graph preserve everything.
fn argumentation_stage(
    universe: &Arc<VertexUniverse>,
    agents: usize,
    caps: &Caps,
) -> Result<PresetStage, TheoremError> {
    use crate::cr::{check_world_cr, CrMode};

    let alphabet = Alphabet::new(["in", "out", "undec"]).expect("fixed alphabet");
    let texts = [
        "in -> []out",
        "[]out -> in",
        "out -> <>in",
        "<>in -> out",
        "(in & ~out & ~undec) | (~in & out & ~undec) | (~in & ~out & undec)",
    ];
    let formulas: Vec<(String, ModalFormula)> = texts
        .iter()
        .map(|t| {
            let (f, _) = parse_formula(t, Some(&alphabet)).expect("preset formula");
            (t.to_string(), f)
        })
        .collect();

    let oligarchs: Vec<usize> = (1..=agents.min(2)).collect();
    let oligarchy = RuleSpec::Oligarchy(oligarchs).compile(universe, agents).unwrap();
    let union = RuleSpec::Union.compile(universe, agents).unwrap();
    let representative = RuleSpec::RepresentativeVoter(RepresentativeMetric::MajorityClosest)
        .compile(universe, agents)
        .unwrap();

    let mut checks = Vec::new();
    for (text, f) in &formulas {
        let frag = fragment(f);
        // Box constraints for the oligarchy, diamond constraints for the
        // union; the representative voter gets everything.
        let relevant: Vec<&AggregationRule> = match frag {
            Fragment::Box => vec![&oligarchy, &representative],
            Fragment::Diamond => vec![&union, &representative],
            _ => vec![&representative],
        };
        for rule in relevant {
            let verdict = check_world_cr(rule, f, &alphabet, caps, CrMode::Exhaustive)
                .map_err(|e| match e {
                    crate::cr::CrError::Cap(c) => TheoremError::Cap(c),
                    crate::cr::CrError::EmptyConstraint => TheoremError::EmptyPool,
                })?;
            checks.push(WorldCheck {
                rule: rule.name().to_string(),
                formula: text.clone(),
                fragment: frag,
                passed: verdict.passed(),
            });
        }
    }
    Ok(PresetStage::WorldChecks {
        label: "argument-labelling constraints preserved at the world level".to_string(),
        checks,
    })
}
