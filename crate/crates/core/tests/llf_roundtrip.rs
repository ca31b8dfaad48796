use lfq_core::llf::{
    convert_style, extract_spans, parse, serialize, tokenize, validate, FunctionCatalog, LfNode, Style,
};
use proptest::prelude::*;

fn quoted() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 ,.()\\-\"\\\\@é]{0,10}"
}

fn num_filter() -> impl Strategy<Value = LfNode> {
    let op = prop::sample::select(vec!["GT", "GTEQ", "LT", "LTEQ", "EQ", "NEQ"]);
    prop::collection::vec((op, 0u32..1000), 1..3).prop_map(|cmps| {
        cmps.into_iter().fold(LfNode::new("num_filter"), |f, (op, v)| {
            f.with_node(
                LfNode::new("eq")
                    .with_node(LfNode::new("op").with_symbol(op))
                    .with_node(LfNode::new("val").with_quoted(v.to_string())),
            )
        })
    })
}

fn leaf() -> impl Strategy<Value = LfNode> {
    let entity = (
        prop::sample::select(vec!["cond", "obs", "proc", "drug", "lab", "allergy"]),
        prop::option::of(quoted()),
        prop::option::of(num_filter()),
    )
        .prop_map(|(f, q, nf)| {
            let mut n = LfNode::new(f);
            if let Some(q) = q {
                n = n.with_quoted(q);
            }
            if let Some(nf) = nf {
                n = n.with_predicate(nf);
            }
            n
        });
    prop_oneof![
        4 => entity,
        1 => Just(LfNode::new("female")),
        1 => Just(LfNode::new("male")),
        1 => num_filter().prop_map(|f| LfNode::new("age").with_predicate(f)),
    ]
}

fn ast() -> impl Strategy<Value = LfNode> {
    leaf().prop_recursive(4, 40, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4)
                .prop_map(|xs| xs.into_iter().fold(LfNode::new("intersect"), LfNode::with_node)),
            prop::collection::vec(inner.clone(), 2..4)
                .prop_map(|xs| xs.into_iter().fold(LfNode::new("union"), LfNode::with_node)),
            inner.clone().prop_map(|x| LfNode::new("not").with_node(x)),
            (leaf(), inner.clone(), 1u32..500, prop::sample::select(vec!["minutes", "hours", "days"])).prop_map(
                |(x, y, n, u)| {
                    let mut x = x;
                    if x.function == "female" || x.function == "male" {
                        x = LfNode::new("cond").with_quoted("x");
                    }
                    x.with_predicate(
                        LfNode::new("within")
                            .with_node(y)
                            .with_node(LfNode::new("val").with_quoted(n.to_string()))
                            .with_node(LfNode::new("unit").with_quoted(u)),
                    )
                }
            ),
            (inner.clone(), prop::sample::select(vec!["before", "after", "caused_by", "contraindication", "if_then"]))
                .prop_map(|(y, p)| LfNode::new("drug").with_predicate(LfNode::new(p).with_node(y))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parse_inverts_serialize(mut node in ast()) {
        // span indices are derived from source order on parse
        node.assign_span_indices();
        let cat = FunctionCatalog::builtin();
        prop_assert!(validate(&node, &cat).is_empty());
        for pretty in [false, true] {
            let text = serialize(&node, pretty);
            let back = parse(&text, &cat).unwrap();
            prop_assert_eq!(&back, &node);
            prop_assert_eq!(serialize(&back, pretty), text);
        }
    }

    #[test]
    fn styles_round_trip(node in ast()) {
        let std = serialize(&node, false);
        let spans = extract_spans(&std).unwrap();
        let sr = convert_style(&std, Style::Standard, Style::ShiftReduce, None).unwrap();
        prop_assert_eq!(convert_style(&sr, Style::ShiftReduce, Style::Standard, None).unwrap(), std.clone());
        let si = convert_style(&std, Style::Standard, Style::SpanIndex, None).unwrap();
        prop_assert_eq!(convert_style(&si, Style::SpanIndex, Style::Standard, Some(&spans)).unwrap(), std);
    }

    #[test]
    fn tokens_concatenate_to_input(s in "[a-z(),. \\[\\]\"@0-9]{0,40}") {
        if let Ok(tokens) = tokenize(&s) {
            let joined: String = tokens.iter().map(|t| t.text.as_str()).collect();
            prop_assert_eq!(joined, s);
        }
    }
}

#[test]
fn syntax_error_points_at_offending_character() {
    let cat = FunctionCatalog::builtin();
    for (text, pos) in [
        ("cond(\"a\"", 8),
        ("cond(\"a\" \"b\")", 9),
        ("intersect(cond(\"a\"),, male())", 20),
        ("female())", 8),
        ("age().", 6),
    ] {
        let err = parse(text, &cat).unwrap_err();
        assert_eq!(err.position(), Some(pos), "{text}: {err}");
    }
}
