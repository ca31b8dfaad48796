use lfq_core::fixture;
use lfq_core::frontend::Frontend;
use lfq_core::llf::{validate, FunctionCatalog, LfNode, Polarity};
use proptest::prelude::*;

const FILLER: &[&str] = &[
    "and", "or", "with", "who", "have", "history", "of", "no", "over", "under", "at", "least", "within", "days",
    "after", "before", ",", "=<", ">", "between", "older", "Patients", "in", "the", "opinion", "'s",
];

fn phrases() -> Vec<String> {
    let mut out: Vec<String> = fixture::lexicon().entries().iter().map(|e| e.phrase.clone()).collect();
    out.extend(["women", "men", "age"].map(String::from));
    out.sort();
    out.dedup();
    out
}

fn sentence() -> impl Strategy<Value = String> {
    let p = phrases();
    let word = prop_oneof![
        proptest::sample::select(p),
        proptest::sample::select(FILLER.to_vec()).prop_map(String::from),
        (0u32..200).prop_map(|n| n.to_string()),
    ];
    proptest::collection::vec((word, any::<bool>()), 0..12).prop_map(|ws| {
        ws.into_iter().map(|(w, upper)| if upper { w.to_uppercase() } else { w }).collect::<Vec<_>>().join(" ")
    })
}

fn quoted(n: &LfNode, out: &mut Vec<String>) {
    if let Some(q) = n.quoted() {
        if n.function != "val" && n.function != "unit" {
            out.push(q.to_string());
        }
    }
    for a in n.node_args().chain(n.predicates.iter()) {
        quoted(a, out);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn augment_invariants(text in sentence()) {
        let lex = fixture::lexicon();
        let cat = FunctionCatalog::builtin();
        let fe = Frontend::new(&lex, &cat);
        let a = fe.augment(&text);
        prop_assert_eq!(&a.render(), &a.augmented);
        for w in a.spans.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        // already-augmented regions are never re-tagged
        let again = fe.augment(&a.augmented);
        prop_assert_eq!(&again.augmented, &a.augmented);
        prop_assert!(again.spans.is_empty());

        for polarity in [Polarity::Inclusion, Polarity::Exclusion] {
            if let Ok(lf) = fe.translate(&a.augmented, polarity) {
                prop_assert_eq!(validate(&lf, &cat), vec![]);
                let mut values = Vec::new();
                quoted(&lf, &mut values);
                let originals: Vec<&str> = a.spans.iter().map(|s| &a.original[s.start..s.end]).collect();
                for v in values {
                    prop_assert!(originals.contains(&v.as_str()), "{} not a span of {}", v, text);
                }
            }
        }
    }
}
