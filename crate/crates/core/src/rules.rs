//! Aggregation rules: parsing rule descriptions, compiling them against a
//! universe and agent count, and evaluating them on profiles.
//!
//! Compiled rules evaluate on raw mask slices (`eval_masks`) so exhaustive
//! scans stay allocation-free; [`AggregationRule::apply`] is the typed entry
//! point.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{successor_row, Graph, Profile, VertexUniverse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("could not parse rule `{input}`: {message}")]
    Parse { input: String, message: String },
    #[error("dictator index {index} out of range 1..={n}")]
    DictatorOutOfRange { index: usize, n: usize },
    #[error("oligarchy coalition must be a nonempty subset of 1..={n}")]
    BadOligarchy { n: usize },
    #[error("quota {q} for edge {edge} out of range 0..={max}")]
    QuotaOutOfRange { edge: String, q: u32, max: u32 },
    #[error("quota map is missing edge {edge}")]
    QuotaMissingEdge { edge: String },
    #[error("unknown vertex label `{0}` in quota map")]
    QuotaUnknownLabel(String),
}

/// Choice functions for successor-approval rules, applied per source vertex
/// to the agents' approval sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChoiceFunction {
    /// Accept the successors with maximal support; nobody approving anything
    /// yields the empty set rather than all of `V`.
    ArgmaxApproval,
    /// Accept successors with strictly above-average support, averaging the
    /// approval counts over all of `V`.
    AboveAverage,
    /// Each agent splits one unit of weight evenly over her approved
    /// successors; accept the maximal-weight vertices. Exact arithmetic.
    EvenEqualCumulative,
}

impl ChoiceFunction {
    pub fn name(self) -> &'static str {
        match self {
            ChoiceFunction::ArgmaxApproval => "argmax",
            ChoiceFunction::AboveAverage => "above-avg",
            ChoiceFunction::EvenEqualCumulative => "even-equal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepresentativeMetric {
    /// Return the input graph with least Hamming distance to the majority
    /// outcome, ties broken towards the lowest agent index.
    MajorityClosest,
}

/// A textual description of an aggregation rule, as accepted on the command
/// line. Agent indices are 1-based here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleSpec {
    Majority,
    Union,
    Intersection,
    UniformQuota(u32),
    /// Per-edge quotas keyed by labelled edges; must cover every edge of the
    /// universe it is compiled against.
    QuotaMap(BTreeMap<(String, String), u32>),
    Dictator(usize),
    Oligarchy(Vec<usize>),
    SuccessorApproval(ChoiceFunction),
    RepresentativeVoter(RepresentativeMetric),
}

impl RuleSpec {
    /// Parses the CLI syntax: `majority`, `union`, `intersection`,
    /// `quota:<k>`, `dictator:<i>`, `oligarchy:<i,j,...>`,
    /// `succ:<argmax|above-avg|even-equal>`, `rep:majority-closest`.
    /// (`quota-file:<path>` is resolved by the CLI before reaching here.)
    pub fn parse(input: &str) -> Result<RuleSpec, RuleError> {
        let parse_err = |message: &str| RuleError::Parse {
            input: input.to_string(),
            message: message.to_string(),
        };
        match input {
            "majority" => return Ok(RuleSpec::Majority),
            "union" => return Ok(RuleSpec::Union),
            "intersection" => return Ok(RuleSpec::Intersection),
            _ => {}
        }
        if let Some(k) = input.strip_prefix("quota:") {
            let q = k.parse().map_err(|_| parse_err("quota must be a number"))?;
            return Ok(RuleSpec::UniformQuota(q));
        }
        if let Some(i) = input.strip_prefix("dictator:") {
            let i = i.parse().map_err(|_| parse_err("dictator index must be a number"))?;
            return Ok(RuleSpec::Dictator(i));
        }
        if let Some(list) = input.strip_prefix("oligarchy:") {
            let agents = list
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| parse_err("oligarchy must be a comma-separated agent list"))?;
            return Ok(RuleSpec::Oligarchy(agents));
        }
        if let Some(choice) = input.strip_prefix("succ:") {
            let c = match choice {
                "argmax" => ChoiceFunction::ArgmaxApproval,
                "above-avg" => ChoiceFunction::AboveAverage,
                "even-equal" => ChoiceFunction::EvenEqualCumulative,
                _ => return Err(parse_err("choice must be argmax, above-avg, or even-equal")),
            };
            return Ok(RuleSpec::SuccessorApproval(c));
        }
        if let Some(metric) = input.strip_prefix("rep:") {
            if metric == "majority-closest" {
                return Ok(RuleSpec::RepresentativeVoter(RepresentativeMetric::MajorityClosest));
            }
            return Err(parse_err("metric must be majority-closest"));
        }
        Err(parse_err(
            "expected one of majority, union, intersection, quota:<k>, dictator:<i>, \
             oligarchy:<i,...>, succ:<choice>, rep:majority-closest",
        ))
    }

    /// Validates the description against a universe and agent count and
    /// produces an evaluator. Configuration errors surface here, not during
    /// evaluation.
    pub fn compile(
        &self,
        universe: &Arc<VertexUniverse>,
        n: usize,
    ) -> Result<AggregationRule, RuleError> {
        let max_q = n as u32 + 1;
        let eval = match self {
            RuleSpec::Majority => Eval::Majority,
            RuleSpec::Union => Eval::Quota(vec![1; universe.edge_count()]),
            RuleSpec::Intersection => Eval::Quota(vec![n as u32; universe.edge_count()]),
            RuleSpec::UniformQuota(q) => {
                if *q > max_q {
                    return Err(RuleError::QuotaOutOfRange {
                        edge: "<uniform>".to_string(),
                        q: *q,
                        max: max_q,
                    });
                }
                Eval::Quota(vec![*q; universe.edge_count()])
            }
            RuleSpec::QuotaMap(map) => {
                let mut quotas = vec![u32::MAX; universe.edge_count()];
                for ((s, t), q) in map {
                    let si = universe
                        .index_of(s)
                        .ok_or_else(|| RuleError::QuotaUnknownLabel(s.clone()))?;
                    let ti = universe
                        .index_of(t)
                        .ok_or_else(|| RuleError::QuotaUnknownLabel(t.clone()))?;
                    if *q > max_q {
                        return Err(RuleError::QuotaOutOfRange {
                            edge: format!("({s},{t})"),
                            q: *q,
                            max: max_q,
                        });
                    }
                    quotas[universe.edge_index(si, ti)] = *q;
                }
                if let Some(missing) = quotas.iter().position(|&q| q == u32::MAX) {
                    return Err(RuleError::QuotaMissingEdge {
                        edge: universe.describe_edge(missing),
                    });
                }
                Eval::Quota(quotas)
            }
            RuleSpec::Dictator(i) => {
                if *i == 0 || *i > n {
                    return Err(RuleError::DictatorOutOfRange { index: *i, n });
                }
                Eval::Dictator(i - 1)
            }
            RuleSpec::Oligarchy(agents) => {
                if agents.is_empty() || agents.iter().any(|&a| a == 0 || a > n) {
                    return Err(RuleError::BadOligarchy { n });
                }
                let mut bits = 0u32;
                for &a in agents {
                    bits |= 1 << (a - 1);
                }
                Eval::Oligarchy(bits)
            }
            RuleSpec::SuccessorApproval(c) => Eval::SuccessorApproval(*c),
            RuleSpec::RepresentativeVoter(m) => Eval::RepresentativeVoter(*m),
        };
        Ok(AggregationRule {
            name: self.to_string(),
            universe: Arc::clone(universe),
            n,
            eval,
        })
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Majority => write!(f, "majority"),
            RuleSpec::Union => write!(f, "union"),
            RuleSpec::Intersection => write!(f, "intersection"),
            RuleSpec::UniformQuota(q) => write!(f, "quota:{q}"),
            RuleSpec::QuotaMap(_) => write!(f, "quota-map"),
            RuleSpec::Dictator(i) => write!(f, "dictator:{i}"),
            RuleSpec::Oligarchy(agents) => {
                let list: Vec<String> = agents.iter().map(usize::to_string).collect();
                write!(f, "oligarchy:{}", list.join(","))
            }
            RuleSpec::SuccessorApproval(c) => write!(f, "succ:{}", c.name()),
            RuleSpec::RepresentativeVoter(RepresentativeMetric::MajorityClosest) => {
                write!(f, "rep:majority-closest")
            }
        }
    }
}

type MaskEvaluator = Arc<dyn Fn(&[u64]) -> u64 + Send + Sync>;

#[derive(Clone)]
enum Eval {
    Majority,
    Quota(Vec<u32>),
    Dictator(usize),
    Oligarchy(u32),
    SuccessorApproval(ChoiceFunction),
    RepresentativeVoter(RepresentativeMetric),
    Custom(MaskEvaluator),
}

/// A compiled aggregation rule, bound to a universe and agent count. The
/// evaluator is total and deterministic on profiles over that universe.
#[derive(Clone)]
pub struct AggregationRule {
    name: String,
    universe: Arc<VertexUniverse>,
    n: usize,
    eval: Eval,
}

impl AggregationRule {
    /// Wraps an arbitrary mask evaluator; used for synthetic rules such as
    /// the ones induced by coalition families.
    pub fn custom<F>(name: &str, universe: &Arc<VertexUniverse>, n: usize, eval: F) -> Self
    where
        F: Fn(&[u64]) -> u64 + Send + Sync + 'static,
    {
        AggregationRule {
            name: name.to_string(),
            universe: Arc::clone(universe),
            n,
            eval: Eval::Custom(Arc::new(eval)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Arc<VertexUniverse> {
        &self.universe
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn apply(&self, profile: &Profile) -> Graph {
        assert_eq!(profile.universe(), &self.universe, "profile universe mismatch");
        assert_eq!(profile.len(), self.n, "profile agent count mismatch");
        let masks = profile.masks();
        Graph::from_mask(&self.universe, self.eval_masks(&masks))
    }

    /// Mask-level evaluation; `masks` must hold one edge mask per agent.
    #[allow(clippy::needless_range_loop)]
    pub fn eval_masks(&self, masks: &[u64]) -> u64 {
        debug_assert_eq!(masks.len(), self.n);
        let v = self.universe.size();
        let edges = self.universe.edge_count();
        match &self.eval {
            Eval::Majority => {
                let mut out = 0u64;
                for e in 0..edges {
                    let count = masks.iter().filter(|m| *m >> e & 1 == 1).count();
                    if 2 * count > self.n {
                        out |= 1 << e;
                    }
                }
                out
            }
            Eval::Quota(quotas) => {
                let mut out = 0u64;
                for e in 0..edges {
                    let count = masks.iter().filter(|m| *m >> e & 1 == 1).count() as u32;
                    if count >= quotas[e] {
                        out |= 1 << e;
                    }
                }
                out
            }
            Eval::Dictator(i) => masks[*i],
            Eval::Oligarchy(bits) => {
                let mut out = self.universe.full_mask();
                for (i, m) in masks.iter().enumerate() {
                    if bits >> i & 1 == 1 {
                        out &= m;
                    }
                }
                out
            }
            Eval::SuccessorApproval(choice) => {
                let mut out = 0u64;
                let mut rows = [0u64; 8];
                for x in 0..v {
                    for (i, m) in masks.iter().enumerate() {
                        rows[i] = successor_row(*m, v, x);
                    }
                    let winners = match choice {
                        ChoiceFunction::ArgmaxApproval => choice_argmax(&rows[..self.n], v),
                        ChoiceFunction::AboveAverage => choice_above_average(&rows[..self.n], v),
                        ChoiceFunction::EvenEqualCumulative => {
                            choice_even_equal(&rows[..self.n], v)
                        }
                    };
                    out |= winners << (x * v);
                }
                out
            }
            Eval::RepresentativeVoter(RepresentativeMetric::MajorityClosest) => {
                masks[representative_pick_majority_closest(masks, edges)]
            }
            Eval::Custom(f) => f(masks) & self.universe.full_mask(),
        }
    }
}

impl fmt::Debug for AggregationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AggregationRule({}, n={})", self.name, self.n)
    }
}

/// Approval voting on successor sets: the vertices with maximal support,
/// except that all-empty approvals yield the empty set.
pub fn choice_argmax(approvals: &[u64], v: usize) -> u64 {
    let counts = support_counts(approvals, v);
    let max = counts[..v].iter().copied().max().unwrap_or(0);
    if max == 0 {
        return 0;
    }
    vertex_set_where(v, |x| counts[x] == max)
}

/// Vertices whose support count is strictly above the mean count taken over
/// all of `V`. All-zero support yields the empty set.
pub fn choice_above_average(approvals: &[u64], v: usize) -> u64 {
    let counts = support_counts(approvals, v);
    let total: u32 = counts[..v].iter().sum();
    // c(x) > total / v without leaving the integers.
    vertex_set_where(v, |x| counts[x] * v as u32 > total)
}

/// Even-and-equal cumulative voting: agent `i` contributes `1/|S_i|` to each
/// approved successor; the maximal-weight vertices win. Weights are compared
/// exactly by scaling with `lcm(1..=v)`.
#[allow(clippy::needless_range_loop)]
pub fn choice_even_equal(approvals: &[u64], v: usize) -> u64 {
    let scale = lcm_up_to(v as u64);
    let mut weights = [0u64; 8];
    for &set in approvals {
        let size = set.count_ones() as u64;
        if size == 0 {
            continue;
        }
        let share = scale / size;
        for x in 0..v {
            if set >> x & 1 == 1 {
                weights[x] += share;
            }
        }
    }
    let max = weights[..v].iter().copied().max().unwrap_or(0);
    if max == 0 {
        return 0;
    }
    vertex_set_where(v, |x| weights[x] == max)
}

/// The agent whose graph is Hamming-closest to the majority outcome, ties
/// to the lowest index.
pub fn representative_pick_majority_closest(masks: &[u64], edges: usize) -> usize {
    let n = masks.len();
    let mut majority = 0u64;
    for e in 0..edges {
        let count = masks.iter().filter(|m| *m >> e & 1 == 1).count();
        if 2 * count > n {
            majority |= 1 << e;
        }
    }
    let mut best = 0usize;
    let mut best_distance = u32::MAX;
    for (i, m) in masks.iter().enumerate() {
        let d = (m ^ majority).count_ones();
        if d < best_distance {
            best = i;
            best_distance = d;
        }
    }
    best
}

#[allow(clippy::needless_range_loop)]
fn support_counts(approvals: &[u64], v: usize) -> [u32; 8] {
    let mut counts = [0u32; 8];
    for &set in approvals {
        for x in 0..v {
            counts[x] += (set >> x & 1) as u32;
        }
    }
    counts
}

fn vertex_set_where(v: usize, pred: impl Fn(usize) -> bool) -> u64 {
    let mut set = 0u64;
    for x in 0..v {
        if pred(x) {
            set |= 1 << x;
        }
    }
    set
}

fn lcm_up_to(v: u64) -> u64 {
    (1..=v).fold(1, |acc, k| acc / gcd(acc, k) * k)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Profile;

    fn xyz() -> Arc<VertexUniverse> {
        VertexUniverse::with_default_labels(3).unwrap()
    }

    fn condorcet(u: &Arc<VertexUniverse>) -> Profile {
        let e1 = Graph::from_edges(u, [("x", "y"), ("y", "z"), ("x", "z")]).unwrap();
        let e2 = Graph::from_edges(u, [("z", "x"), ("x", "y"), ("z", "y")]).unwrap();
        let e3 = Graph::from_edges(u, [("y", "z"), ("z", "x"), ("y", "x")]).unwrap();
        Profile::new(vec![e1, e2, e3]).unwrap()
    }

    #[test]
    fn majority_on_cyclic_orders_yields_a_cycle() {
        let u = xyz();
        let pr = condorcet(&u);
        let rule = RuleSpec::Majority.compile(&u, 3).unwrap();
        let out = rule.apply(&pr);
        let expected = Graph::from_edges(&u, [("x", "y"), ("y", "z"), ("z", "x")]).unwrap();
        assert_eq!(out, expected);
        assert!(!crate::property::BuiltinProperty::Transitivity.holds(&out));
    }

    #[test]
    fn union_of_transitive_graphs_can_lose_transitivity() {
        let u = xyz();
        let e1 = Graph::from_edges(&u, [("x", "y")]).unwrap();
        let e2 = Graph::from_edges(&u, [("y", "z")]).unwrap();
        let pr = Profile::new(vec![e1, e2]).unwrap();
        let rule = RuleSpec::Union.compile(&u, 2).unwrap();
        let out = rule.apply(&pr);
        assert_eq!(out, Graph::from_edges(&u, [("x", "y"), ("y", "z")]).unwrap());
        assert!(!crate::property::BuiltinProperty::Transitivity.holds(&out));
    }

    #[test]
    fn quota_zero_accepts_everything() {
        let u = xyz();
        let pr = Profile::new(vec![Graph::empty(&u), Graph::empty(&u)]).unwrap();
        let rule = RuleSpec::UniformQuota(0).compile(&u, 2).unwrap();
        assert_eq!(rule.apply(&pr), Graph::full(&u));
    }

    #[test]
    fn majority_can_starve_a_vertex_of_successors() {
        let u = VertexUniverse::with_default_labels(4).unwrap();
        let e1 = Graph::from_edges(&u, [("x", "w"), ("w", "x"), ("y", "y"), ("z", "z")]).unwrap();
        let e2 = Graph::from_edges(&u, [("y", "w"), ("w", "y"), ("x", "x"), ("z", "z")]).unwrap();
        let e3 = Graph::from_edges(&u, [("z", "w"), ("w", "z"), ("x", "x"), ("y", "y")]).unwrap();
        let pr = Profile::new(vec![e1, e2, e3]).unwrap();
        let rule = RuleSpec::Majority.compile(&u, 3).unwrap();
        let out = rule.apply(&pr);
        let expected = Graph::from_edges(&u, [("x", "x"), ("y", "y"), ("z", "z")]).unwrap();
        assert_eq!(out, expected);
        assert!(!crate::property::BuiltinProperty::Seriality.holds(&out));
    }

    #[test]
    fn argmax_choice_examples() {
        // S = ({y},{y},{z}): y has 2 votes.
        assert_eq!(choice_argmax(&[0b010, 0b010, 0b100], 3), 0b010);
        // All empty: exception case, keep the set empty.
        assert_eq!(choice_argmax(&[0, 0, 0], 3), 0);
        // Tie at one vote each.
        assert_eq!(choice_argmax(&[0b010, 0b100], 3), 0b110);
    }

    #[test]
    fn above_average_choice_examples() {
        // Counts (2,1,0), mean 1: only x is strictly above.
        assert_eq!(choice_above_average(&[0b001, 0b011, 0b000], 3), 0b001);
        // All counts equal: nothing strictly above the mean.
        assert_eq!(choice_above_average(&[0b111, 0b111], 3), 0);
        // Counts (3,0,0), mean 1.
        assert_eq!(choice_above_average(&[0b001, 0b001, 0b001], 3), 0b001);
    }

    #[test]
    fn even_equal_choice_examples() {
        // S = ({y,z},{y}): w(y) = 1/2 + 1 = 3/2, w(z) = 1/2.
        assert_eq!(choice_even_equal(&[0b110, 0b010], 3), 0b010);
        // Symmetric tie.
        assert_eq!(choice_even_equal(&[0b010, 0b100], 3), 0b110);
        // Exception case.
        assert_eq!(choice_even_equal(&[0, 0], 3), 0);
    }

    #[test]
    fn representative_voter_picks() {
        let u = xyz();
        // Unanimous profile: all distances zero, tie to agent 1.
        let g = Graph::from_edges(&u, [("x", "y")]).unwrap();
        let unanimous = Profile::new(vec![g.clone(), g.clone(), g]).unwrap();
        assert_eq!(representative_pick_majority_closest(&unanimous.masks(), 9), 0);

        // All three cyclic orders are at distance 2 from the majority cycle.
        let pr = condorcet(&u);
        assert_eq!(representative_pick_majority_closest(&pr.masks(), 9), 0);
        let rule = RuleSpec::RepresentativeVoter(RepresentativeMetric::MajorityClosest)
            .compile(&u, 3)
            .unwrap();
        assert_eq!(rule.apply(&pr), *pr.graph(0));

        // An agent matching the majority graph exactly wins outright:
        // majority accepts (x,y) via agents 1,2 and (y,z) via agents 2,3.
        let e1 = Graph::from_edges(&u, [("x", "y")]).unwrap();
        let e2 = Graph::from_edges(&u, [("x", "y"), ("y", "z")]).unwrap();
        let e3 = Graph::from_edges(&u, [("y", "z")]).unwrap();
        let pr2 = Profile::new(vec![e1, e2, e3]).unwrap();
        assert_eq!(representative_pick_majority_closest(&pr2.masks(), 9), 1);
    }

    #[test]
    fn configuration_errors_surface_at_compile_time() {
        let u = xyz();
        assert!(matches!(
            RuleSpec::Dictator(4).compile(&u, 3),
            Err(RuleError::DictatorOutOfRange { index: 4, n: 3 })
        ));
        assert!(matches!(
            RuleSpec::Oligarchy(vec![]).compile(&u, 3),
            Err(RuleError::BadOligarchy { n: 3 })
        ));
        let mut partial = BTreeMap::new();
        partial.insert(("x".to_string(), "y".to_string()), 1);
        assert!(matches!(
            RuleSpec::QuotaMap(partial).compile(&u, 2),
            Err(RuleError::QuotaMissingEdge { .. })
        ));
        assert!(RuleSpec::UniformQuota(4).compile(&u, 2).is_err());
    }

    #[test]
    fn rule_spec_round_trips_through_parse() {
        for text in [
            "majority",
            "union",
            "intersection",
            "quota:2",
            "dictator:1",
            "oligarchy:1,3",
            "succ:argmax",
            "succ:above-avg",
            "succ:even-equal",
            "rep:majority-closest",
        ] {
            let spec = RuleSpec::parse(text).unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!(RuleSpec::parse("quota:x").is_err());
        assert!(RuleSpec::parse("nonsense").is_err());
    }
}
