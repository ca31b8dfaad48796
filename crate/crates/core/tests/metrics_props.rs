use lfq_core::metrics::{bleu, corpus_agreement, rouge_l, tokenize};
use proptest::prelude::*;

/// Naive BLEU: counts n-grams by linear scans instead of hashing.
fn naive_bleu(c: &[String], r: &[String], max_n: usize) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let grams = |t: &[String], n: usize| -> Vec<Vec<String>> {
        if t.len() < n {
            vec![]
        } else {
            (0..=t.len() - n).map(|i| t[i..i + n].to_vec()).collect()
        }
    };
    let mut logs = vec![];
    for n in 1..=max_n {
        let cg = grams(c, n);
        if cg.is_empty() {
            continue;
        }
        let mut pool = grams(r, n);
        let mut m = 0usize;
        for g in &cg {
            if let Some(i) = pool.iter().position(|x| x == g) {
                pool.remove(i);
                m += 1;
            }
        }
        let p = if m == 0 { 1e-9 / cg.len() as f64 } else { m as f64 / cg.len() as f64 };
        logs.push(p.ln());
    }
    let bp = if c.len() < r.len() { (1.0 - r.len() as f64 / c.len() as f64).exp() } else { 1.0 };
    bp * (logs.iter().sum::<f64>() / logs.len() as f64).exp()
}

fn lf_like() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["cond", "(", ")", "\"", "x", "y", ",", "male", "."]), 1..20)
        .prop_map(|v| v.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bounded_and_matches_naive(c in lf_like(), r in lf_like()) {
        let b = bleu(&c, &r, 4).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        let oracle = naive_bleu(&tokenize(&c), &tokenize(&r), 4);
        prop_assert!((b - oracle).abs() < 1e-12, "{} vs {}", b, oracle);
        let rl = rouge_l(&c, &r).unwrap();
        prop_assert!((0.0..=1.0).contains(&rl.f1));
        let swapped = rouge_l(&r, &c).unwrap();
        prop_assert!((rl.precision - swapped.recall).abs() < 1e-12);
        prop_assert!((rl.f1 - swapped.f1).abs() < 1e-12);
    }

    #[test]
    fn self_scores_are_one(s in "[a-z(),.\" ]{1,30}") {
        prop_assume!(!tokenize(&s).is_empty());
        prop_assert_eq!(bleu(&s, &s, 4).unwrap(), 1.0);
        prop_assert_eq!(rouge_l(&s, &s).unwrap().f1, 1.0);
    }

    #[test]
    fn agreement_equals_mean_of_pairs(pairs in prop::collection::vec((lf_like(), lf_like()), 10)) {
        let mean = pairs.iter().map(|(c, r)| bleu(c, r, 4).unwrap()).sum::<f64>() / 10.0;
        prop_assert!((corpus_agreement(&pairs).unwrap() - mean).abs() < 1e-12);
    }

    #[test]
    fn appending_a_reference_token_never_lowers_bleu(r in lf_like(), k in 1usize..20) {
        // prefixes of the reference have unigram precision 1, so BLEU-1 is the brevity penalty
        let toks = tokenize(&r);
        prop_assume!(toks.len() > 1);
        let k = k.min(toks.len() - 1);
        let short = bleu(&toks[..k].join(" "), &r, 1).unwrap();
        let longer = bleu(&toks[..k + 1].join(" "), &r, 1).unwrap();
        prop_assert!(longer >= short);
    }
}
