//! Deterministic text frontend: a lexicon tagger that produces augmented
//! criteria text, and a pattern translator from augmented text to logical
//! forms.
//!
//! Translator patterns:
//!
//! | shape | result |
//! |---|---|
//! | `A and B`, `A, B`, `A who B` | `intersect(A, B)` |
//! | `A or B` | `union(A, B)` (binds tighter than `and`) |
//! | `female() and male()` | `union(female(), male())` |
//! | `over`/`>`/`at least`/`=<`/... `N` next to `age()`, `lab()` or `obs()` | `.num_filter(eq(op(..), val("N")))` |
//! | `N or older`, `N or more` / `N or younger`, `N or less` | `GTEQ` / `LTEQ` |
//! | `between N and M` | `GTEQ N`, `LTEQ M` |
//! | `A within N unit of B` | `A.within(B, val("N"), unit("unit"))` |
//! | `A after B`, `A before B` | `A.after(B)`, `A.before(B)` |
//! | `no history of A`, `without A`, `no A` (inclusion only) | `not(A)` |
//!
//! Anything else, including text without entities, is not translatable.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::llf::{escape, parse, FunctionCatalog, LfNode, Polarity};
use crate::normalize::{function_for_semtypes, tokenize, Lexicon};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSpan {
    /// Byte offsets into the original text.
    pub start: usize,
    pub end: usize,
    pub function: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedCriterion {
    pub original: String,
    pub augmented: String,
    pub spans: Vec<TaggedSpan>,
}

impl TaggedSpan {
    /// `fn("text")` for entities, `fn()` for demographics.
    pub fn render(&self, original: &str) -> String {
        if is_demographic(&self.function) {
            format!("{}()", self.function)
        } else {
            format!("{}(\"{}\")", self.function, escape(&original[self.start..self.end]))
        }
    }
}

impl AugmentedCriterion {
    /// Rebuilds the augmented text from the original and the spans.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut at = 0;
        for s in &self.spans {
            out.push_str(&self.original[at..s.start]);
            out.push_str(&s.render(&self.original));
            at = s.end;
        }
        out.push_str(&self.original[at..]);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotTranslatable {
    pub reason: String,
}

impl fmt::Display for NotTranslatable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not translatable: {}", self.reason)
    }
}

impl std::error::Error for NotTranslatable {}

fn untranslatable<T>(reason: impl Into<String>) -> Result<T, NotTranslatable> {
    Err(NotTranslatable { reason: reason.into() })
}

fn is_demographic(f: &str) -> bool {
    matches!(f, "female" | "male" | "age")
}

fn demographic_word(w: &str) -> Option<&'static str> {
    Some(match w {
        "women" | "woman" | "female" | "females" => "female",
        "men" | "man" | "male" | "males" => "male",
        "age" | "aged" | "ages" => "age",
        _ => return None,
    })
}

pub struct Frontend<'a> {
    lexicon: &'a Lexicon,
    catalog: &'a FunctionCatalog,
}

impl<'a> Frontend<'a> {
    pub fn new(lexicon: &'a Lexicon, catalog: &'a FunctionCatalog) -> Self {
        Frontend { lexicon, catalog }
    }

    /// Tags lexicon entities and demographic words, longest match first,
    /// leaving existing logical-form calls untouched.
    pub fn augment(&self, text: &str) -> AugmentedCriterion {
        let mut spans = Vec::new();
        let mut at = 0;
        let mut segments = Vec::new();
        for (s, e) in self.calls(text) {
            segments.push((at, s));
            at = e;
        }
        segments.push((at, text.len()));
        for (seg_start, seg_end) in segments {
            let tokens = tokenize(&text[seg_start..seg_end]);
            let words: Vec<String> = tokens.iter().map(|t| t.text.clone()).collect();
            let matches = self.lexicon.longest_matches(&words, |e| function_for_semtypes(&e.semantic_types).is_some());
            let mut covered = vec![false; tokens.len()];
            let mut found = Vec::new();
            for (s, e, entries) in matches {
                let semtypes = entries.iter().flat_map(|e| e.semantic_types.iter().cloned()).collect();
                let function = function_for_semtypes(&semtypes).expect("accepted entries have a function");
                covered[s..e].iter_mut().for_each(|c| *c = true);
                found.push((s, e, function));
            }
            for (i, w) in words.iter().enumerate() {
                if !covered[i] {
                    if let Some(f) = demographic_word(w) {
                        found.push((i, i + 1, f));
                    }
                }
            }
            found.sort();
            spans.extend(found.into_iter().map(|(s, e, f)| TaggedSpan {
                start: seg_start + tokens[s].start,
                end: seg_start + tokens[e - 1].end,
                function: f.to_string(),
            }));
        }
        let mut aug = AugmentedCriterion { original: text.to_string(), augmented: String::new(), spans };
        aug.augmented = aug.render();
        aug
    }

    /// Byte ranges of logical-form calls (`name(...)` with a catalog name,
    /// plus chained `.pred(...)`).
    fn calls(&self, text: &str) -> Vec<(usize, usize)> {
        let b = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < b.len() {
            let c = b[i];
            let boundary = i == 0 || !(b[i - 1].is_ascii_alphanumeric() || b[i - 1] == b'_' || b[i - 1] == b'"');
            if boundary && (c.is_ascii_lowercase() || c == b'_') {
                let mut j = i;
                while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
                    j += 1;
                }
                if j < b.len() && b[j] == b'(' && self.catalog.get(&text[i..j]).is_some() {
                    if let Some(mut end) = close_paren(b, j) {
                        while let Some(next) = chained(b, end) {
                            end = next;
                        }
                        out.push((i, end));
                        i = end;
                        continue;
                    }
                }
                i = j.max(i + 1);
                continue;
            }
            i += 1;
        }
        out
    }

    /// Translates augmented text; exclusion lines may not contain negation.
    pub fn translate(&self, augmented: &str, polarity: Polarity) -> Result<LfNode, NotTranslatable> {
        let items = self.lex(augmented)?;
        let items = comparators(items);
        let items = numeric_filters(items)?;
        let items = temporal(items)?;
        let items = negation(items, polarity)?;
        combine(items)
    }

    fn lex(&self, text: &str) -> Result<Vec<Item>, NotTranslatable> {
        let mut items = Vec::new();
        let mut at = 0;
        let calls = self.calls(text);
        let push_words = |s: &str, items: &mut Vec<Item>| {
            for w in words(s) {
                items.push(w);
            }
        };
        for (s, e) in calls {
            push_words(&text[at..s], &mut items);
            match parse(&text[s..e], self.catalog) {
                Ok(node) => items.push(Item::Node(node)),
                Err(err) => return untranslatable(format!("malformed call `{}`: {err}", &text[s..e])),
            }
            at = e;
        }
        push_words(&text[at..], &mut items);
        Ok(items)
    }
}

fn close_paren(b: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0;
    let mut i = open;
    let mut in_str = false;
    while i < b.len() {
        let c = b[i];
        if in_str {
            match c {
                b'\\' => i += 1,
                b'"' => in_str = false,
                _ => {}
            }
        } else {
            match c {
                b'"' => in_str = true,
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i + 1);
                    }
                }
                _ => {}
            }
        }
        i += 1;
    }
    None
}

fn chained(b: &[u8], end: usize) -> Option<usize> {
    if b.get(end) != Some(&b'.') {
        return None;
    }
    let mut j = end + 1;
    while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
        j += 1;
    }
    if j == end + 1 || b.get(j) != Some(&b'(') {
        return None;
    }
    close_paren(b, j)
}

#[derive(Debug, Clone, PartialEq)]
enum Item {
    Node(LfNode),
    Word(String),
    Num(String),
    Sym(String),
    Cmp(&'static str),
    /// A comparator following its number, as in `65 or older`.
    PostCmp(&'static str),
    Neg(LfNode),
}

fn words(s: &str) -> Vec<Item> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let st = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let n: String = chars[st..i].iter().collect();
            out.push(Item::Num(n.trim_end_matches('.').to_string()));
        } else if c.is_alphanumeric() {
            let st = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '\'' || chars[i] == '-') {
                i += 1;
            }
            out.push(Item::Word(chars[st..i].iter().collect::<String>().to_lowercase()));
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if matches!(two.as_str(), ">=" | "<=" | "=<" | "=>") {
                out.push(Item::Sym(two));
                i += 2;
            } else {
                out.push(Item::Sym(c.to_string()));
                i += 1;
            }
        }
    }
    out
}

const PREFIX_COMPARATORS: &[(&[&str], &str)] = &[
    (&["greater", "than", "or", "equal", "to"], "GTEQ"),
    (&["less", "than", "or", "equal", "to"], "LTEQ"),
    (&["no", "more", "than"], "LTEQ"),
    (&["no", "less", "than"], "GTEQ"),
    (&["not", "more", "than"], "LTEQ"),
    (&["not", "less", "than"], "GTEQ"),
    (&["greater", "than"], "GT"),
    (&["more", "than"], "GT"),
    (&["higher", "than"], "GT"),
    (&["older", "than"], "GT"),
    (&["less", "than"], "LT"),
    (&["fewer", "than"], "LT"),
    (&["lower", "than"], "LT"),
    (&["younger", "than"], "LT"),
    (&["at", "least"], "GTEQ"),
    (&["at", "most"], "LTEQ"),
    (&["up", "to"], "LTEQ"),
    (&["equal", "to"], "EQ"),
    (&["over"], "GT"),
    (&["above"], "GT"),
    (&["exceeding"], "GT"),
    (&["under"], "LT"),
    (&["below"], "LT"),
    (&[">"], "GT"),
    (&[">="], "GTEQ"),
    (&["=>"], "GTEQ"),
    (&["≥"], "GTEQ"),
    (&["<"], "LT"),
    (&["<="], "LTEQ"),
    (&["=<"], "LTEQ"),
    (&["≤"], "LTEQ"),
    (&["="], "EQ"),
];

const POSTFIX_COMPARATORS: &[(&[&str], &str)] = &[
    (&["or", "older"], "GTEQ"),
    (&["or", "more"], "GTEQ"),
    (&["or", "greater"], "GTEQ"),
    (&["or", "above"], "GTEQ"),
    (&["or", "higher"], "GTEQ"),
    (&["or", "younger"], "LTEQ"),
    (&["or", "less"], "LTEQ"),
    (&["or", "fewer"], "LTEQ"),
    (&["or", "below"], "LTEQ"),
    (&["or", "lower"], "LTEQ"),
];

fn text_of(item: &Item) -> Option<&str> {
    match item {
        Item::Word(w) | Item::Sym(w) => Some(w),
        _ => None,
    }
}

fn matches_at(items: &[Item], i: usize, phrase: &[&str]) -> bool {
    phrase.iter().enumerate().all(|(k, p)| items.get(i + k).and_then(text_of) == Some(*p))
}

/// Rewrites comparator phrases into `Cmp`/`PostCmp` items, and
/// `between N and M` into two comparisons.
fn comparators(items: Vec<Item>) -> Vec<Item> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        if matches_at(&items, i, &["between"]) {
            if let (Some(Item::Num(a)), Some("and"), Some(Item::Num(b))) =
                (items.get(i + 1), items.get(i + 2).and_then(text_of), items.get(i + 3))
            {
                out.extend([Item::Cmp("GTEQ"), Item::Num(a.clone()), Item::Cmp("LTEQ"), Item::Num(b.clone())]);
                i += 4;
                continue;
            }
        }
        if matches!(out.last(), Some(Item::Num(_))) {
            if let Some((p, op)) = POSTFIX_COMPARATORS.iter().find(|(p, _)| matches_at(&items, i, p)) {
                out.push(Item::PostCmp(op));
                i += p.len();
                continue;
            }
        }
        if let Some((p, op)) = PREFIX_COMPARATORS.iter().find(|(p, _)| matches_at(&items, i, p)) {
            out.push(Item::Cmp(op));
            i += p.len();
            continue;
        }
        out.push(items[i].clone());
        i += 1;
    }
    out
}

fn measurable(item: &Item) -> bool {
    matches!(item, Item::Node(n) if matches!(n.function.as_str(), "age" | "lab" | "obs"))
}

fn comparison(op: &str, value: &str) -> LfNode {
    LfNode::new("eq").with_node(LfNode::new("op").with_symbol(op)).with_node(LfNode::new("val").with_quoted(value))
}

fn add_filter(node: &mut LfNode, cmp: LfNode) {
    match node.predicates.iter_mut().find(|p| p.function == "num_filter") {
        Some(p) => p.args.push(crate::llf::LfArg::Node(cmp)),
        None => node.predicates.push(LfNode::new("num_filter").with_node(cmp)),
    }
}

/// Attaches each comparison to the measurable node it qualifies: one
/// between the comparator and its number, or else the nearest before it.
fn numeric_filters(items: Vec<Item>) -> Result<Vec<Item>, NotTranslatable> {
    let mut out: Vec<Item> = Vec::new();
    let mut pending: Option<&'static str> = None;
    let mut pending_target: Option<usize> = None;
    for item in items {
        match item {
            Item::Cmp(op) => {
                if pending.is_some() {
                    return untranslatable("comparator without a number");
                }
                pending = Some(op);
                pending_target = None;
            }
            Item::Num(n) => {
                let (op, target) = match pending.take() {
                    Some(op) => (op, pending_target.take()),
                    None => ("", None),
                };
                if op.is_empty() {
                    out.push(Item::Num(n));
                    continue;
                }
                let target = target.or_else(|| out.iter().rposition(measurable));
                let Some(t) = target else {
                    return untranslatable(format!("no age, lab or observation for `{n}`"));
                };
                let Item::Node(node) = &mut out[t] else { unreachable!() };
                add_filter(node, comparison(op, &n));
            }
            Item::PostCmp(op) => {
                let Some(Item::Num(n)) = out.pop() else {
                    return untranslatable("comparator without a number");
                };
                let Some(t) = out.iter().rposition(measurable) else {
                    return untranslatable(format!("no age, lab or observation for `{n}`"));
                };
                let Item::Node(node) = &mut out[t] else { unreachable!() };
                add_filter(node, comparison(op, &n));
            }
            Item::Word(w) if w == "age" && pending.is_some() => {
                out.push(Item::Node(LfNode::new("age")));
                pending_target = Some(out.len() - 1);
            }
            other => {
                if pending.is_some() && measurable(&other) {
                    pending_target = Some(out.len());
                }
                out.push(other);
            }
        }
    }
    if pending.is_some() {
        return untranslatable("comparator without a number");
    }
    Ok(out)
}

const TIME_UNITS: &[&str] =
    &["minute", "minutes", "hour", "hours", "day", "days", "week", "weeks", "month", "months", "year", "years"];

fn is_node(item: Option<&Item>) -> bool {
    matches!(item, Some(Item::Node(_)))
}

/// `A within N unit of B`, `A after B`, `A before B`.
fn temporal(items: Vec<Item>) -> Result<Vec<Item>, NotTranslatable> {
    let mut out: Vec<Item> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let word = text_of(&items[i]);
        let (pred, skip) = match word {
            Some("within") => match (items.get(i + 1), items.get(i + 2).and_then(text_of)) {
                (Some(Item::Num(n)), Some(u)) if TIME_UNITS.contains(&u) => {
                    let mut k = i + 3;
                    while matches!(
                        items.get(k).and_then(text_of),
                        Some("of" | "after" | "following" | "from" | "prior" | "to")
                    ) {
                        k += 1;
                    }
                    let pred = LfNode::new("within");
                    let window = (n.clone(), u.to_string());
                    if !is_node(items.get(k)) {
                        return untranslatable("`within` without an anchor entity");
                    }
                    (Some((pred, Some(window))), k - i)
                }
                _ => (None, 0),
            },
            Some("after" | "following" | "since") => (Some((LfNode::new("after"), None)), 1),
            Some("before") => (Some((LfNode::new("before"), None)), 1),
            Some("prior") if items.get(i + 1).and_then(text_of) == Some("to") => {
                (Some((LfNode::new("before"), None)), 2)
            }
            _ => (None, 0),
        };
        let Some((mut pred, window)) = pred else {
            out.push(items[i].clone());
            i += 1;
            continue;
        };
        let Some(Item::Node(anchor)) = items.get(i + skip).cloned() else {
            out.push(items[i].clone());
            i += 1;
            continue;
        };
        let Some(t) = out.iter().rposition(|it| matches!(it, Item::Node(n) if crate::reason::is_entity(&n.function)))
        else {
            return untranslatable(format!("`{}` without a preceding entity", pred.function));
        };
        pred = pred.with_node(anchor);
        if let Some((n, u)) = window {
            pred = pred.with_node(LfNode::new("val").with_quoted(n)).with_node(LfNode::new("unit").with_quoted(u));
        }
        let Item::Node(target) = &mut out[t] else { unreachable!() };
        target.predicates.push(pred);
        i += skip + 1;
    }
    Ok(out)
}

const NEGATION_LEAD: &[&[&str]] =
    &[&["no"], &["not"], &["without"], &["never"], &["absence", "of"], &["free", "of"], &["negative", "for"]];
const NEGATION_FILLER: &[&str] = &["history", "of", "prior", "previous", "known", "any", "current", "active", "a"];

fn negation(items: Vec<Item>, polarity: Polarity) -> Result<Vec<Item>, NotTranslatable> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        if let Some(lead) = NEGATION_LEAD.iter().find(|p| matches_at(&items, i, p)) {
            let mut k = i + lead.len();
            while items.get(k).and_then(text_of).is_some_and(|w| NEGATION_FILLER.contains(&w)) {
                k += 1;
            }
            if let Some(Item::Node(n)) = items.get(k) {
                if polarity == Polarity::Exclusion {
                    return untranslatable("negation in an exclusion criterion");
                }
                out.push(Item::Neg(LfNode::new("not").with_node(n.clone())));
                i = k + 1;
                continue;
            }
        }
        out.push(items[i].clone());
        i += 1;
    }
    Ok(out)
}

fn operand(item: &Item) -> Option<&LfNode> {
    match item {
        Item::Node(n) | Item::Neg(n) => Some(n),
        _ => None,
    }
}

fn gender(n: &LfNode) -> bool {
    matches!(n.function.as_str(), "female" | "male")
}

fn join(function: &str, mut nodes: Vec<LfNode>) -> LfNode {
    if nodes.len() == 1 {
        return nodes.pop().unwrap();
    }
    nodes.into_iter().fold(LfNode::new(function), LfNode::with_node)
}

/// `or` between two operands groups them into a union; any other
/// separator intersects. Adjacent gender terms always form a union.
fn combine(items: Vec<Item>) -> Result<LfNode, NotTranslatable> {
    if let Some(Item::Num(n)) = items.iter().find(|i| matches!(i, Item::Num(_))) {
        return untranslatable(format!("quantity `{n}` qualifies nothing"));
    }
    let mut groups: Vec<Vec<LfNode>> = Vec::new();
    let mut saw_or = false;
    for item in &items {
        match operand(item) {
            Some(n) => {
                let merge = match groups.last() {
                    Some(last) => saw_or || (gender(n) && last.iter().all(gender)),
                    None => false,
                };
                if merge {
                    groups.last_mut().unwrap().push(n.clone());
                } else {
                    groups.push(vec![n.clone()]);
                }
                saw_or = false;
            }
            None => saw_or |= text_of(item) == Some("or"),
        }
    }
    if groups.is_empty() {
        return untranslatable("no entities");
    }
    let parts: Vec<LfNode> = groups.into_iter().map(|g| join("union", g)).collect();
    Ok(join("intersect", parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::llf::serialize;

    fn fe_parts() -> (Lexicon, FunctionCatalog) {
        (fixture::lexicon(), FunctionCatalog::builtin())
    }

    #[test]
    fn diabetics_who_smoke() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let a = fe.augment("Diabetics who smoke");
        assert_eq!(a.augmented, r#"cond("Diabetics") who obs("smoke")"#);
        assert_eq!(a.spans.len(), 2);
    }

    #[test]
    fn longest_match_wins() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let a = fe.augment("History of diabetes mellitus");
        assert_eq!(a.spans.len(), 1);
        assert_eq!(&a.original[a.spans[0].start..a.spans[0].end], "diabetes mellitus");
    }

    #[test]
    fn diabetes_women_and_men_example() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let a = fe.augment("Diabetic women and men over age 65");
        assert_eq!(a.augmented, r#"cond("Diabetic") female() and male() over age() 65"#);
        let lf = fe.translate(&a.augmented, Polarity::Inclusion).unwrap();
        assert_eq!(
            serialize(&lf, false),
            r#"intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65"))))"#
        );
    }

    #[test]
    fn or_binds_tighter_than_and() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let lf = fe.translate(r#"cond("a") or cond("b") and lab("c") =< 2"#, Polarity::Inclusion).unwrap();
        assert_eq!(
            serialize(&lf, false),
            r#"intersect(union(cond("a"), cond("b")), lab("c").num_filter(eq(op(LTEQ), val("2"))))"#
        );
    }

    #[test]
    fn negation_only_in_inclusions() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let lf = fe.translate(r#"no history of cond("stroke")"#, Polarity::Inclusion).unwrap();
        assert_eq!(serialize(&lf, false), r#"not(cond("stroke"))"#);
        assert!(fe.translate(r#"no history of cond("stroke")"#, Polarity::Exclusion).is_err());
    }

    #[test]
    fn temporal_shapes() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let lf = fe.translate(r#"lab("x") within 2 days of drug("y")"#, Polarity::Inclusion).unwrap();
        assert_eq!(serialize(&lf, false), r#"lab("x").within(drug("y"), val("2"), unit("days"))"#);
        let lf = fe.translate(r#"cond("x") after proc("y")"#, Polarity::Inclusion).unwrap();
        assert_eq!(serialize(&lf, false), r#"cond("x").after(proc("y"))"#);
    }

    #[test]
    fn between_and_postfix() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let lf = fe.translate("age() between 18 and 65", Polarity::Inclusion).unwrap();
        assert_eq!(serialize(&lf, false), r#"age().num_filter(eq(op(GTEQ), val("18")), eq(op(LTEQ), val("65")))"#);
        let lf = fe.translate("age() 18 or older", Polarity::Inclusion).unwrap();
        assert_eq!(serialize(&lf, false), r#"age().num_filter(eq(op(GTEQ), val("18")))"#);
    }

    #[test]
    fn no_entities() {
        let (lex, cat) = fe_parts();
        let fe = Frontend::new(&lex, &cat);
        let a = fe.augment("In the opinion of investigators");
        assert!(a.spans.is_empty());
        assert!(fe.translate(&a.augmented, Polarity::Inclusion).is_err());
    }
}
