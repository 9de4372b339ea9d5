use std::time::Instant;
use graphagg::cr::*;
use graphagg::modal::parse_formula;
use graphagg::rules::RuleSpec;
use graphagg::search::Caps;
use graphagg::graph::VertexUniverse;

fn main() {
    println!("rayon threads: {}", rayon::current_num_threads());
    let caps = Caps::default();
    let u = VertexUniverse::with_default_labels(3).unwrap();
    let rule = RuleSpec::Majority.compile(&u, 3).unwrap();
    let (f, alphabet) = parse_formula("p -> <>p", None).unwrap();
    let t = Instant::now();
    let verdict = check_model_cr(&rule, &f, &alphabet, &caps, CrMode::Exhaustive).unwrap();
    println!("model check: {:?} passed={}", t.elapsed(), verdict.passed());
}
