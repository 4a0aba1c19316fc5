use std::collections::HashMap;

use drsmatch_core::convert::{amr_to_drs, parse_penman, ConversionDictionary, UnmappedPolicy};
use drsmatch_core::synth::{random_form, random_pair, SynthParams};
use drsmatch_core::{
    infer_variable_kinds, match_forms, optimal_match, parse_document, remove_redundant_refs, serialize_form,
    validate_form, ClausalForm, MatchConfig, OracleLimits, VariableId,
};
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(seed: u64) -> (ClausalForm, ClausalForm) {
    random_pair(&mut ChaCha8Rng::seed_from_u64(seed), &SynthParams::default())
}

fn renamed(form: &ClausalForm, seed: u64) -> ClausalForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fresh: Vec<usize> = (0..form.kinds().len()).collect();
    fresh.shuffle(&mut rng);
    let table: HashMap<&VariableId, VariableId> = form
        .kinds()
        .keys()
        .zip(fresh)
        .map(|(v, i)| (v, VariableId::new(format!("q{i}")).unwrap()))
        .collect();
    ClausalForm::new(form.clauses().iter().map(|c| c.map_variables(|v| table[v].clone())))
}

fn config() -> MatchConfig {
    MatchConfig::default().with_restarts(5)
}

/// Random PENMAN tree with optional re-entrancies and constants, plus its
/// node, edge and verb counts.
fn random_amr(seed: u64) -> (String, usize, usize, bool) {
    const CONCEPTS: [&str; 7] = ["she", "dish", "table", "remove-01", "see-01", "boy", "it"];
    const RELS: [&str; 5] = ["ARG0", "ARG1", "ARG2", "mod", "location"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=6);
    let concepts: Vec<&str> = (0..n).map(|_| *CONCEPTS.choose(&mut rng).unwrap()).collect();
    let parent: Vec<usize> = (1..n).map(|i| rng.random_range(0..i)).collect();
    let mut extra: Vec<(usize, String)> = Vec::new();
    for i in 0..n {
        if rng.random_bool(0.2) {
            extra.push((i, format!(":poss n{}", rng.random_range(0..n))));
        }
        if rng.random_bool(0.1) {
            extra.push((i, ":name \"x y\"".into()));
        }
    }
    fn emit(
        i: usize,
        concepts: &[&str],
        parent: &[usize],
        extra: &[(usize, String)],
        rels: &mut impl FnMut() -> &'static str,
    ) -> String {
        let mut s = format!("(n{i} / {}", concepts[i]);
        for (j, p) in parent.iter().enumerate() {
            if *p == i {
                let rel = rels();
                s.push_str(&format!(" :{rel} {}", emit(j + 1, concepts, parent, extra, rels)));
            }
        }
        for (k, e) in extra {
            if *k == i {
                s.push(' ');
                s.push_str(e);
            }
        }
        s.push(')');
        s
    }
    let mut rel_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut rels = || *RELS.choose(&mut rel_rng).unwrap();
    let text = emit(0, &concepts, &parent, &extra, &mut rels);
    let edges = (n - 1) + extra.len();
    let has_verb = concepts.iter().any(|c| c.ends_with("-01"));
    (text, n, edges, has_verb)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn round_trip(seed in any::<u64>()) {
        let (a, _) = pair(seed);
        let again = parse_document(&serialize_form(&a)).unwrap();
        prop_assert_eq!(again.clauses(), a.clauses());
        prop_assert_eq!(again.kinds(), a.kinds());
    }

    #[test]
    fn kinds_do_not_depend_on_clause_order(seed in any::<u64>()) {
        let (a, _) = pair(seed);
        let mut clauses = a.clauses().to_vec();
        clauses.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(&infer_variable_kinds(&clauses), a.kinds());
    }

    #[test]
    fn ref_removal_is_idempotent(seed in any::<u64>()) {
        let (a, _) = pair(seed);
        let once = remove_redundant_refs(&a);
        prop_assert_eq!(remove_redundant_refs(&once), once);
    }

    #[test]
    fn alpha_invariance(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let base = match_forms(&a, &b, &config());
        prop_assert_eq!(match_forms(&renamed(&a, seed), &b, &config()).matched, base.matched);
        prop_assert_eq!(match_forms(&a, &renamed(&b, seed + 1), &config()).matched, base.matched);
    }

    #[test]
    fn symmetry(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let ab = match_forms(&a, &b, &config());
        let ba = match_forms(&b, &a, &config());
        prop_assert_eq!(ab.matched, ba.matched);
        prop_assert_eq!(ab.f1, ba.f1);
        prop_assert_eq!(ab.precision, ba.recall);
    }

    #[test]
    fn more_restarts_never_hurt(seed in any::<u64>(), k in 1usize..6, extra in 0usize..10) {
        let (a, b) = pair(seed);
        let few = match_forms(&a, &b, &MatchConfig::default().with_restarts(k));
        let many = match_forms(&a, &b, &MatchConfig::default().with_restarts(k + extra));
        prop_assert!(few.matched <= many.matched);
    }

    #[test]
    fn matcher_never_beats_oracle(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let exact = optimal_match(&a, &b, &OracleLimits::default()).unwrap();
        let approx = match_forms(&a, &b, &config().with_keep_refs(true));
        prop_assert!(approx.matched <= exact.matched);
    }

    #[test]
    fn self_match_is_perfect(seed in any::<u64>()) {
        let a = random_form(&mut ChaCha8Rng::seed_from_u64(seed), &SynthParams::default());
        let exact = optimal_match(&a, &a, &OracleLimits::default()).unwrap();
        prop_assert_eq!(exact.f1, 1.0);
        prop_assert_eq!(match_forms(&a, &a, &MatchConfig::default()).f1, 1.0);
    }

    #[test]
    fn amr_clause_count_and_validity(seed in any::<u64>()) {
        let (text, nodes, edges, has_verb) = random_amr(seed);
        let graph = parse_penman(&text).unwrap();
        let conv = amr_to_drs(&graph, &ConversionDictionary::default(), UnmappedPolicy::Fail).unwrap();
        let expected = 2 * nodes + edges + if has_verb { 4 } else { 0 };
        prop_assert_eq!(conv.form.len(), expected, "{}", text);
        prop_assert!(validate_form(&conv.form).is_empty(), "{}\n{}", text, conv.form);
    }
}
