use super::ast::{LfArg, LfNode};
use super::token::escape;

const INDENT: &str = "    ";
const STRUCTURAL: [&str; 3] = ["intersect", "union", "not"];

/// Renders `node` in canonical Standard syntax.
///
/// Compact mode has no whitespace except one space after each comma. Pretty
/// mode puts each argument of a structural call (`intersect`, `union`,
/// `not`) on its own line whenever one of those arguments has arguments or
/// predicates of its own; everything else stays compact.
pub fn serialize(node: &LfNode, pretty: bool) -> String {
    let mut out = String::new();
    if pretty {
        write_pretty(node, 0, &mut out);
    } else {
        write_compact(node, &mut out);
    }
    out
}

fn write_arg(arg: &LfArg, out: &mut String, node: impl FnOnce(&LfNode, &mut String)) {
    match arg {
        LfArg::Node(n) => node(n, out),
        LfArg::Quoted(s) => {
            out.push('"');
            out.push_str(&escape(s));
            out.push('"');
        }
        LfArg::Symbol(s) => out.push_str(s),
    }
}

fn write_compact(node: &LfNode, out: &mut String) {
    out.push_str(&node.function);
    out.push('(');
    for (i, arg) in node.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_arg(arg, out, write_compact);
    }
    out.push(')');
    for p in &node.predicates {
        out.push('.');
        write_compact(p, out);
    }
}

fn expands(node: &LfNode) -> bool {
    STRUCTURAL.contains(&node.function.as_str())
        && node.node_args().any(|a| !a.args.is_empty() || !a.predicates.is_empty())
}

fn write_pretty(node: &LfNode, depth: usize, out: &mut String) {
    if !expands(node) {
        write_compact(node, out);
        return;
    }
    out.push_str(&node.function);
    out.push_str("(\n");
    for (i, arg) in node.args.iter().enumerate() {
        for _ in 0..=depth {
            out.push_str(INDENT);
        }
        write_arg(arg, out, |n, o| write_pretty(n, depth + 1, o));
        if i + 1 < node.args.len() {
            out.push(',');
        }
        out.push('\n');
    }
    for _ in 0..depth {
        out.push_str(INDENT);
    }
    out.push(')');
    for p in &node.predicates {
        out.push('.');
        write_pretty(p, depth, out);
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, FunctionCatalog};
    use super::*;

    const DIABETES: &str =
        r#"intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65"))))"#;

    #[test]
    fn compact_is_byte_identical() {
        let n = parse(DIABETES, &FunctionCatalog::builtin()).unwrap();
        assert_eq!(serialize(&n, false), DIABETES);
    }

    #[test]
    fn pretty_matches_block_layout() {
        let n = parse(DIABETES, &FunctionCatalog::builtin()).unwrap();
        let expected = "intersect(\n    cond(\"Diabetic\"),\n    union(female(), male()),\n    age().num_filter(eq(op(GT), val(\"65\")))\n)";
        assert_eq!(serialize(&n, true), expected);
        assert_eq!(serialize(&n, true).lines().count(), 5);
    }

    #[test]
    fn nested_structures_indent() {
        let text = r#"union(intersect(cond("a"), drug("b")), not(proc("c")))"#;
        let n = parse(text, &FunctionCatalog::builtin()).unwrap();
        let expected = "union(\n    intersect(\n        cond(\"a\"),\n        drug(\"b\")\n    ),\n    not(\n        proc(\"c\")\n    )\n)";
        assert_eq!(serialize(&n, true), expected);
        assert_eq!(parse(expected, &FunctionCatalog::builtin()).unwrap(), n);
    }

    #[test]
    fn zero_arity() {
        assert_eq!(serialize(&LfNode::new("male"), false), "male()");
        assert_eq!(serialize(&LfNode::new("male"), true), "male()");
    }

    #[test]
    fn quotes_are_escaped() {
        let n = LfNode::new("cond").with_quoted(r#"say "hi" \o/"#);
        let s = serialize(&n, false);
        assert_eq!(s, r#"cond("say \"hi\" \\o/")"#);
        let mut back = parse(&s, &FunctionCatalog::builtin()).unwrap();
        back.span_index = None;
        assert_eq!(back.quoted(), n.quoted());
    }
}
