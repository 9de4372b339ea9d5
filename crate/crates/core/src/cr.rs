//! Collective-rationality deciders: does a rule preserve a constraint from
//! the individual graphs to the collective one?
//!
//! Four levels. The property level quantifies over profiles of graphs
//! satisfying a first-order property. The three modal levels interpret a
//! formula as a frame validity, a global truth (per valuation), or a truth
//! at each world (per valuation), mirroring the three ways of reading a
//! modal constraint on a graph.
//!
//! Search order: valuations ascend by index (atom 0 in the low bits),
//! profiles lexicographically by graph mask; the reported counterexample is
//! the first in that order. When the space exceeds the caps the scan still
//! hunts for a counterexample within the cap budget (a found failure is
//! sound); certifying a pass past the cap is refused unless sampling was
//! requested, and sampled runs never report "pass".

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::enumerate::graph_pool;
use crate::graph::{Graph, Profile, VertexUniverse};
use crate::modal::{
    frame_valid, globally_true, sat_worlds, truth_at, Alphabet, KripkeModel, ModalFormula,
    Valuation,
};
use crate::property::GraphProperty;
use crate::rules::AggregationRule;
use crate::search::{profile_space, scan_profiles_min, CapExceeded, Caps};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CrLevel {
    Property,
    Frame,
    Model,
    World,
}

impl CrLevel {
    pub fn name(self) -> &'static str {
        match self {
            CrLevel::Property => "property",
            CrLevel::Frame => "frame",
            CrLevel::Model => "model",
            CrLevel::World => "world",
        }
    }
}

/// A counterexample: a profile whose inputs all satisfy the constraint while
/// the output does not (at the stated level, under the stated valuation and
/// world where applicable).
#[derive(Clone, Debug)]
pub struct CrWitness {
    pub level: CrLevel,
    pub profile: Profile,
    pub output: Graph,
    pub valuation: Option<Valuation>,
    pub world: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum CrOutcome {
    Pass { profiles_scanned: u64, valuations_scanned: u64 },
    Fail(CrWitness),
    /// Sampling found nothing; deliberately not called a pass.
    SampledClean { samples: u64 },
}

#[derive(Clone, Debug)]
pub struct CrVerdict {
    pub level: CrLevel,
    pub outcome: CrOutcome,
}

impl CrVerdict {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, CrOutcome::Pass { .. })
    }

    pub fn witness(&self) -> Option<&CrWitness> {
        match &self.outcome {
            CrOutcome::Fail(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub enum CrMode {
    #[default]
    Exhaustive,
    Sampled {
        samples: u64,
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum CrError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("no graph satisfies the constraint; the quantifier is empty")]
    EmptyConstraint,
}

/// Property-level check: if every input satisfies `property`, must the
/// output?
pub fn check_cr(
    rule: &AggregationRule,
    property: &GraphProperty,
    caps: &Caps,
    mode: CrMode,
) -> Result<CrVerdict, CrError> {
    let universe = rule.universe();
    let pool = graph_pool(universe, Some(property), caps)?;
    if pool.is_empty() {
        return Err(CrError::EmptyConstraint);
    }
    let bad_output = |out: u64| !property.check_mask(out, universe);

    match mode {
        CrMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rule.agents();
            let mut masks = vec![0u64; n];
            for _ in 0..samples {
                for m in masks.iter_mut() {
                    *m = pool[rng.gen_range(0..pool.len())];
                }
                let out = rule.eval_masks(&masks);
                if bad_output(out) {
                    return Ok(fail_verdict(CrLevel::Property, universe, &masks, out, None, None));
                }
            }
            Ok(CrVerdict {
                level: CrLevel::Property,
                outcome: CrOutcome::SampledClean { samples },
            })
        }
        CrMode::Exhaustive => {
            let (hit, scanned, complete) =
                bounded_scan(rule, &pool, caps, caps.max_profiles, |_, out| {
                    bad_output(out).then_some(())
                });
            match hit {
                Some((masks, out, ())) => {
                    Ok(fail_verdict(CrLevel::Property, universe, &masks, out, None, None))
                }
                None if complete => Ok(CrVerdict {
                    level: CrLevel::Property,
                    outcome: CrOutcome::Pass { profiles_scanned: scanned, valuations_scanned: 0 },
                }),
                None => Err(space_too_big("property-level profile space", &pool, rule, caps)),
            }
        }
    }
}

/// Frame-level check: validity of the formula on every input frame must
/// imply validity on the output frame.
pub fn check_frame_cr(
    rule: &AggregationRule,
    formula: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    caps: &Caps,
    mode: CrMode,
) -> Result<CrVerdict, CrError> {
    let universe = rule.universe();
    check_filtered_bits(universe, caps)?;
    // Frame validity is profile-independent: classify every graph once.
    let valid = frame_validity_table(universe, formula, alphabet, caps)?;
    let pool: Vec<u64> = (0..universe.graph_count()).filter(|&g| valid[g as usize]).collect();
    if pool.is_empty() {
        return Err(CrError::EmptyConstraint);
    }
    let valuations = crate::modal::valuation_space(alphabet, universe.size(), caps)?;

    match mode {
        CrMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rule.agents();
            let mut masks = vec![0u64; n];
            for _ in 0..samples {
                for m in masks.iter_mut() {
                    *m = pool[rng.gen_range(0..pool.len())];
                }
                let out = rule.eval_masks(&masks);
                if !valid[out as usize] {
                    return Ok(fail_verdict(CrLevel::Frame, universe, &masks, out, None, None));
                }
            }
            Ok(CrVerdict { level: CrLevel::Frame, outcome: CrOutcome::SampledClean { samples } })
        }
        CrMode::Exhaustive => {
            let (hit, scanned, complete) =
                bounded_scan(rule, &pool, caps, caps.max_profiles, |_, out| {
                    (!valid[out as usize]).then_some(())
                });
            match hit {
                Some((masks, out, ())) => {
                    Ok(fail_verdict(CrLevel::Frame, universe, &masks, out, None, None))
                }
                None if complete => Ok(CrVerdict {
                    level: CrLevel::Frame,
                    outcome: CrOutcome::Pass {
                        profiles_scanned: scanned,
                        valuations_scanned: valuations,
                    },
                }),
                None => Err(space_too_big("frame-level profile space", &pool, rule, caps)),
            }
        }
    }
}

/// Model-level check: for every valuation, global truth in all input models
/// must imply global truth in the output model. The valuation loop is
/// outermost because the set of admissible inputs depends on it.
pub fn check_model_cr(
    rule: &AggregationRule,
    formula: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    caps: &Caps,
    mode: CrMode,
) -> Result<CrVerdict, CrError> {
    modal_level_check(rule, formula, alphabet, caps, mode, CrLevel::Model)
}

/// World-level check: for every valuation and world, truth at that world in
/// all inputs must imply truth at that world in the output.
pub fn check_world_cr(
    rule: &AggregationRule,
    formula: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    caps: &Caps,
    mode: CrMode,
) -> Result<CrVerdict, CrError> {
    modal_level_check(rule, formula, alphabet, caps, mode, CrLevel::World)
}

fn modal_level_check(
    rule: &AggregationRule,
    formula: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    caps: &Caps,
    mode: CrMode,
    level: CrLevel,
) -> Result<CrVerdict, CrError> {
    let universe = rule.universe();
    let v = universe.size();
    check_filtered_bits(universe, caps)?;
    let valuations = crate::modal::valuation_space(alphabet, v, caps)?;
    let world_full = universe.vertex_mask();
    let graph_count = universe.graph_count();

    if let CrMode::Sampled { samples, seed } = mode {
        return modal_level_sampled(rule, formula, alphabet, level, samples, seed);
    }

    let mut profiles_scanned = 0u64;
    let mut truncated = false;
    let mut sets = vec![0u64; alphabet.len()];
    // When the profile spaces exceed the cap, spread the counterexample-hunt
    // budget evenly over the valuations.
    let per_valuation_budget = (caps.max_profiles / valuations.max(1)).max(1 << 16);
    for index in 0..valuations {
        for (i, s) in sets.iter_mut().enumerate() {
            *s = (index >> (i * v)) & world_full;
        }
        // Truth mask of the formula on every graph under this valuation.
        let sat: Vec<u64> =
            (0..graph_count).map(|g| sat_worlds(g, v, &sets, formula)).collect();

        type Check<'a> = Box<dyn Fn(&[u64], u64) -> Option<usize> + Sync + 'a>;
        let (pool, check): (Vec<u64>, Check) =
            match level {
                CrLevel::Model => {
                    // No output can violate if the formula is globally true
                    // on every graph under this valuation.
                    if sat.iter().all(|&s| s == world_full) {
                        continue;
                    }
                    // Inputs must make the formula globally true.
                    let pool: Vec<u64> =
                        (0..graph_count).filter(|&g| sat[g as usize] == world_full).collect();
                    let sat = &sat;
                    (
                        pool,
                        Box::new(move |_masks, out| {
                            (sat[out as usize] != world_full).then_some(usize::MAX)
                        }),
                    )
                }
                CrLevel::World => {
                    // No violation is possible under this valuation if the
                    // formula holds everywhere on every graph.
                    if sat.iter().all(|&s| s == world_full) {
                        continue;
                    }
                    let pool: Vec<u64> = (0..graph_count).collect();
                    let sat = &sat;
                    (
                        pool,
                        Box::new(move |masks: &[u64], out| {
                            let required =
                                masks.iter().fold(world_full, |a, &m| a & sat[m as usize]);
                            let violated = required & !sat[out as usize];
                            (violated != 0).then(|| violated.trailing_zeros() as usize)
                        }),
                    )
                }
                _ => unreachable!(),
            };
        if pool.is_empty() {
            continue;
        }

        let (hit, scanned, complete) =
            bounded_scan(rule, &pool, caps, per_valuation_budget, |masks, out| {
                check(masks, out)
            });
        profiles_scanned += scanned;
        truncated |= !complete;
        if let Some((masks, out, world)) = hit {
            let valuation = Valuation::new(alphabet, sets.clone());
            let world = (world != usize::MAX).then_some(world);
            return Ok(fail_verdict(level, universe, &masks, out, Some(valuation), world));
        }
    }

    if truncated {
        return Err(CrError::Cap(CapExceeded::new(
            &format!("{}-level profile space", level.name()),
            0,
            caps.max_profiles as u128,
            "use --sample or raise --max-profiles",
        )));
    }
    Ok(CrVerdict {
        level,
        outcome: CrOutcome::Pass { profiles_scanned, valuations_scanned: valuations },
    })
}

fn modal_level_sampled(
    rule: &AggregationRule,
    formula: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    level: CrLevel,
    samples: u64,
    seed: u64,
) -> Result<CrVerdict, CrError> {
    let universe = rule.universe();
    let v = universe.size();
    let world_full = universe.vertex_mask();
    let graph_count = universe.graph_count();
    let n = rule.agents();
    let bits = alphabet.len() * v;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masks = vec![0u64; n];

    for _ in 0..samples {
        let index: u64 = if bits >= 64 { rng.gen() } else { rng.gen_range(0..1u64 << bits) };
        let sets: Vec<u64> =
            (0..alphabet.len()).map(|i| (index >> (i * v)) & world_full).collect();
        match level {
            CrLevel::Model => {
                let pool: Vec<u64> = (0..graph_count)
                    .filter(|&g| sat_worlds(g, v, &sets, formula) == world_full)
                    .collect();
                if pool.is_empty() {
                    continue;
                }
                for m in masks.iter_mut() {
                    *m = pool[rng.gen_range(0..pool.len())];
                }
                let out = rule.eval_masks(&masks);
                if sat_worlds(out, v, &sets, formula) != world_full {
                    let valuation = Valuation::new(alphabet, sets);
                    return Ok(fail_verdict(level, universe, &masks, out, Some(valuation), None));
                }
            }
            CrLevel::World => {
                for m in masks.iter_mut() {
                    *m = rng.gen_range(0..graph_count);
                }
                let required = masks
                    .iter()
                    .fold(world_full, |a, &m| a & sat_worlds(m, v, &sets, formula));
                let out = rule.eval_masks(&masks);
                let violated = required & !sat_worlds(out, v, &sets, formula);
                if violated != 0 {
                    let valuation = Valuation::new(alphabet, sets);
                    return Ok(fail_verdict(
                        level,
                        universe,
                        &masks,
                        out,
                        Some(valuation),
                        Some(violated.trailing_zeros() as usize),
                    ));
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(CrVerdict { level, outcome: CrOutcome::SampledClean { samples } })
}

/// Scans `pool^n` profiles (bounded by the cap budget) for the first one
/// where `verdict` reports a violation of the output. Returns the hit, the
/// number of profiles scanned, and whether the whole space was covered.
type ScanHit<T> = Option<(Vec<u64>, u64, T)>;

fn bounded_scan<T: Send>(
    rule: &AggregationRule,
    pool: &[u64],
    caps: &Caps,
    hunt_budget: u64,
    verdict: impl Fn(&[u64], u64) -> Option<T> + Sync,
) -> (ScanHit<T>, u64, bool) {
    let n = rule.agents();
    let space = profile_space(pool.len(), n);
    let (budget, complete) = match space {
        Some(total) if total <= caps.max_profiles => (total, true),
        _ => (hunt_budget, false),
    };
    let hit = scan_profiles_min(pool, n, budget, |_, masks| {
        let out = rule.eval_masks(masks);
        verdict(masks, out).map(|t| (masks.to_vec(), out, t))
    });
    match hit {
        Some((_, payload)) => (Some(payload), budget, complete),
        None => (None, budget, complete),
    }
}

fn fail_verdict(
    level: CrLevel,
    universe: &Arc<VertexUniverse>,
    masks: &[u64],
    out: u64,
    valuation: Option<Valuation>,
    world: Option<usize>,
) -> CrVerdict {
    CrVerdict {
        level,
        outcome: CrOutcome::Fail(CrWitness {
            level,
            profile: Profile::from_masks(universe, masks).expect("scan profile"),
            output: Graph::from_mask(universe, out),
            valuation,
            world,
        }),
    }
}

fn check_filtered_bits(universe: &VertexUniverse, caps: &Caps) -> Result<(), CapExceeded> {
    let bits = universe.edge_count() as u32;
    if bits > caps.max_filtered_graph_bits {
        return Err(CapExceeded::new(
            "graph space",
            1u128 << bits,
            1u128 << caps.max_filtered_graph_bits,
            "reduce the vertex count",
        ));
    }
    Ok(())
}

fn space_too_big(
    what: &str,
    pool: &[u64],
    rule: &AggregationRule,
    caps: &Caps,
) -> CrError {
    CrError::Cap(CapExceeded::new(
        what,
        profile_space(pool.len(), rule.agents()).map(u128::from).unwrap_or(u128::MAX),
        caps.max_profiles as u128,
        "use --sample or raise --max-profiles",
    ))
}

/// Table of frame validity for every graph over the universe.
fn frame_validity_table(
    universe: &Arc<VertexUniverse>,
    formula: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    caps: &Caps,
) -> Result<Vec<bool>, CapExceeded> {
    (0..universe.graph_count())
        .map(|g| frame_valid(&Graph::from_mask(universe, g), formula, alphabet, caps))
        .collect()
}

/// Re-validates a property-level witness from scratch.
pub fn revalidate_property_witness(
    rule: &AggregationRule,
    property: &GraphProperty,
    witness: &CrWitness,
) -> bool {
    let out = rule.apply(&witness.profile);
    out == witness.output
        && witness.profile.graphs().iter().all(|g| property.check(g))
        && !property.check(&out)
}

/// Re-validates a modal-level witness from scratch through the formula
/// semantics (frame validity, global truth, or truth at the stored world).
pub fn revalidate_modal_witness(
    rule: &AggregationRule,
    formula: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    caps: &Caps,
    witness: &CrWitness,
) -> bool {
    let out = rule.apply(&witness.profile);
    if out != witness.output {
        return false;
    }
    match witness.level {
        CrLevel::Frame => {
            let inputs_valid = witness
                .profile
                .graphs()
                .iter()
                .all(|g| frame_valid(g, formula, alphabet, caps).unwrap_or(false));
            inputs_valid && !frame_valid(&out, formula, alphabet, caps).unwrap_or(true)
        }
        CrLevel::Model => {
            let Some(valuation) = &witness.valuation else { return false };
            let model = |g: &Graph| KripkeModel::new(g.clone(), valuation.clone());
            witness.profile.graphs().iter().all(|g| globally_true(&model(g), formula))
                && !globally_true(&model(&out), formula)
        }
        CrLevel::World => {
            let (Some(valuation), Some(world)) = (&witness.valuation, witness.world) else {
                return false;
            };
            let model = |g: &Graph| KripkeModel::new(g.clone(), valuation.clone());
            witness.profile.graphs().iter().all(|g| truth_at(&model(g), world, formula))
                && !truth_at(&model(&out), world, formula)
        }
        CrLevel::Property => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::parse_formula;
    use crate::rules::RuleSpec;

    fn universe(v: usize) -> Arc<VertexUniverse> {
        VertexUniverse::with_default_labels(v).unwrap()
    }

    #[test]
    fn majority_preserves_symmetry_but_not_transitivity() {
        let u = universe(3);
        let caps = Caps::default();
        let rule = RuleSpec::Majority.compile(&u, 3).unwrap();

        let sym = GraphProperty::by_name("symmetry").unwrap();
        assert!(check_cr(&rule, &sym, &caps, CrMode::Exhaustive).unwrap().passed());

        let trans = GraphProperty::by_name("transitivity").unwrap();
        let verdict = check_cr(&rule, &trans, &caps, CrMode::Exhaustive).unwrap();
        let w = verdict.witness().expect("three cyclic orders break transitivity");
        assert!(revalidate_property_witness(&rule, &trans, w));
    }

    #[test]
    fn majority_completeness_needs_an_odd_electorate() {
        let u = universe(3);
        let caps = Caps::default();
        let complete = GraphProperty::by_name("completeness").unwrap();

        let odd = RuleSpec::Majority.compile(&u, 3).unwrap();
        assert!(check_cr(&odd, &complete, &caps, CrMode::Exhaustive).unwrap().passed());

        let even = RuleSpec::Majority.compile(&u, 2).unwrap();
        let verdict = check_cr(&even, &complete, &caps, CrMode::Exhaustive).unwrap();
        let w = verdict.witness().expect("two opposed orders leave pairs unrelated");
        assert!(revalidate_property_witness(&even, &complete, w));
    }

    #[test]
    fn unanimous_rules_preserve_reflexivity() {
        let u = universe(3);
        let caps = Caps::default();
        let refl = GraphProperty::by_name("reflexivity").unwrap();
        for spec in [
            RuleSpec::Majority,
            RuleSpec::Union,
            RuleSpec::Intersection,
            RuleSpec::Oligarchy(vec![1, 2]),
        ] {
            let rule = spec.compile(&u, 3).unwrap();
            assert!(
                check_cr(&rule, &refl, &caps, CrMode::Exhaustive).unwrap().passed(),
                "{} dropped a loop",
                rule.name()
            );
        }
    }

    #[test]
    fn frame_level_examples() {
        let caps = Caps::default();
        let u = universe(3);
        let majority = RuleSpec::Majority.compile(&u, 3).unwrap();

        // Validity of the reflexivity constraint transfers under majority.
        let (refl, alphabet) = parse_formula("p -> <>p", None).unwrap();
        let verdict =
            check_frame_cr(&majority, &refl, &alphabet, &caps, CrMode::Exhaustive).unwrap();
        assert!(verdict.passed());

        // A propositional constraint is frame-independent.
        let (prop, alphabet) = parse_formula("p | ~p", None).unwrap();
        let verdict =
            check_frame_cr(&majority, &prop, &alphabet, &caps, CrMode::Exhaustive).unwrap();
        assert!(verdict.passed());
    }

    #[test]
    fn seriality_frame_failure_is_found_beyond_the_cap() {
        // The profile space over serial four-vertex graphs is astronomically
        // larger than the cap; the counterexample hunt must still land one.
        let caps = Caps::default();
        let u = universe(4);
        let majority = RuleSpec::Majority.compile(&u, 3).unwrap();
        let (serial, alphabet) = parse_formula("<>(p | ~p)", None).unwrap();
        let verdict =
            check_frame_cr(&majority, &serial, &alphabet, &caps, CrMode::Exhaustive).unwrap();
        let w = verdict.witness().expect("majority starves a vertex of successors");
        assert!(revalidate_modal_witness(&majority, &serial, &alphabet, &caps, w));
    }

    #[test]
    fn intersection_model_level_counterexamples() {
        let caps = Caps::default();

        // p -> <>p on two worlds.
        let u = universe(2);
        let rule = RuleSpec::Intersection.compile(&u, 2).unwrap();
        let (f, alphabet) = parse_formula("p -> <>p", None).unwrap();
        let verdict = check_model_cr(&rule, &f, &alphabet, &caps, CrMode::Exhaustive).unwrap();
        let w = verdict.witness().expect("intersection can strand a p-world");
        assert!(revalidate_modal_witness(&rule, &f, &alphabet, &caps, w));

        // The documented witness re-checks end to end: both inputs globally
        // satisfy the constraint under p everywhere, the intersection does not.
        let e1 = Graph::from_edges(&u, [("x", "y"), ("y", "y")]).unwrap();
        let e2 = Graph::from_edges(&u, [("y", "x"), ("x", "x")]).unwrap();
        let val = Valuation::from_labels(&alphabet, &u, &[("p", vec!["x", "y"])]).unwrap();
        let manual = CrWitness {
            level: CrLevel::Model,
            profile: Profile::new(vec![e1, e2]).unwrap(),
            output: Graph::empty(&u),
            valuation: Some(val),
            world: None,
        };
        assert!(revalidate_modal_witness(&rule, &f, &alphabet, &caps, &manual));
    }

    #[test]
    fn dictatorships_are_world_rational_for_everything() {
        let caps = Caps::default();
        let u = universe(2);
        let rule = RuleSpec::Dictator(1).compile(&u, 2).unwrap();
        for text in ["p -> <>p", "[]p -> p", "<><>p -> <>p", "p -> []<>p", "<>(p | ~p)"] {
            let (f, alphabet) = parse_formula(text, None).unwrap();
            let verdict =
                check_world_cr(&rule, &f, &alphabet, &caps, CrMode::Exhaustive).unwrap();
            assert!(verdict.passed(), "dictator failed world-level check for {text}");
        }
    }

    #[test]
    fn serial_reward_rule_separates_model_from_world_level() {
        // Full graph when all inputs are serial, empty graph otherwise:
        // global truth of the seriality constraint transfers, truth at a
        // world does not.
        let caps = Caps::default();
        let u = universe(2);
        let serial = GraphProperty::by_name("seriality").unwrap();
        let pool_check = {
            let u = Arc::clone(&u);
            let serial = serial.clone();
            move |masks: &[u64]| {
                if masks.iter().all(|&m| serial.check_mask(m, &u)) {
                    u.full_mask()
                } else {
                    0
                }
            }
        };
        let rule = AggregationRule::custom("serial-reward", &u, 2, pool_check);
        let (f, alphabet) = parse_formula("<>(p | ~p)", None).unwrap();

        let model = check_model_cr(&rule, &f, &alphabet, &caps, CrMode::Exhaustive).unwrap();
        assert!(model.passed());

        let world = check_world_cr(&rule, &f, &alphabet, &caps, CrMode::Exhaustive).unwrap();
        let w = world.witness().expect("a lone successor edge is not rewarded");
        assert!(revalidate_modal_witness(&rule, &f, &alphabet, &caps, w));
    }

    #[test]
    fn majority_is_frame_but_not_model_rational_for_reflexivity_constraint() {
        let caps = Caps::default();
        let u = universe(3);
        let rule = RuleSpec::Majority.compile(&u, 3).unwrap();
        let (f, alphabet) = parse_formula("p -> <>p", None).unwrap();
        assert!(check_frame_cr(&rule, &f, &alphabet, &caps, CrMode::Exhaustive)
            .unwrap()
            .passed());
        let verdict = check_model_cr(&rule, &f, &alphabet, &caps, CrMode::Exhaustive).unwrap();
        let w = verdict.witness().expect("majority drops all of a world's successors");
        assert!(revalidate_modal_witness(&rule, &f, &alphabet, &caps, w));
    }

    #[test]
    fn sampled_mode_is_deterministic_and_never_passes() {
        let caps = Caps::default();
        let u = universe(3);
        let rule = RuleSpec::Majority.compile(&u, 3).unwrap();
        let sym = GraphProperty::by_name("symmetry").unwrap();
        let mode = CrMode::Sampled { samples: 200, seed: 42 };
        let a = check_cr(&rule, &sym, &caps, mode).unwrap();
        let b = check_cr(&rule, &sym, &caps, mode).unwrap();
        assert!(matches!(a.outcome, CrOutcome::SampledClean { samples: 200 }));
        assert!(matches!(b.outcome, CrOutcome::SampledClean { samples: 200 }));

        let trans = GraphProperty::by_name("transitivity").unwrap();
        let mode = CrMode::Sampled { samples: 5000, seed: 7 };
        let v1 = check_cr(&rule, &trans, &caps, mode).unwrap();
        let v2 = check_cr(&rule, &trans, &caps, mode).unwrap();
        match (&v1.outcome, &v2.outcome) {
            (CrOutcome::Fail(w1), CrOutcome::Fail(w2)) => {
                assert_eq!(w1.profile, w2.profile);
            }
            other => panic!("expected two identical sampled failures, got {other:?}"),
        }
    }

    #[test]
    fn empty_constraints_are_rejected() {
        let u = universe(2);
        let caps = Caps::default();
        let rule = RuleSpec::Majority.compile(&u, 2).unwrap();
        let never = GraphProperty::custom("never", |_| false);
        assert!(matches!(
            check_cr(&rule, &never, &caps, CrMode::Exhaustive),
            Err(CrError::EmptyConstraint)
        ));
    }
}
