use serde::{Deserialize, Serialize};

/// An argument of a logical-form call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfArg {
    Node(LfNode),
    /// A quoted free-text value, stored unescaped.
    Quoted(String),
    /// A bare upper-case symbol such as the `GT` in `op(GT)`.
    Symbol(String),
}

impl LfArg {
    pub fn as_node(&self) -> Option<&LfNode> {
        match self {
            LfArg::Node(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_quoted(&self) -> Option<&str> {
        match self {
            LfArg::Quoted(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            LfArg::Symbol(s) => Some(s),
            _ => None,
        }
    }
}

/// A logical-form call: `function(args...)` followed by any number of
/// chained `.predicate(...)` calls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfNode {
    pub function: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<LfArg>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub predicates: Vec<LfNode>,
    /// Position of this node's quoted value among all quoted spans of the
    /// criterion, in source order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_index: Option<usize>,
}

impl LfNode {
    pub fn new(function: impl Into<String>) -> Self {
        LfNode { function: function.into(), args: Vec::new(), predicates: Vec::new(), span_index: None }
    }

    pub fn with_arg(mut self, arg: LfArg) -> Self {
        self.args.push(arg);
        self
    }

    pub fn with_node(self, node: LfNode) -> Self {
        self.with_arg(LfArg::Node(node))
    }

    pub fn with_quoted(self, value: impl Into<String>) -> Self {
        self.with_arg(LfArg::Quoted(value.into()))
    }

    pub fn with_symbol(self, value: impl Into<String>) -> Self {
        self.with_arg(LfArg::Symbol(value.into()))
    }

    pub fn with_predicate(mut self, pred: LfNode) -> Self {
        self.predicates.push(pred);
        self
    }

    /// The node's quoted value, if it is "named".
    pub fn quoted(&self) -> Option<&str> {
        self.args.iter().find_map(LfArg::as_quoted)
    }

    pub fn node_args(&self) -> impl Iterator<Item = &LfNode> {
        self.args.iter().filter_map(LfArg::as_node)
    }

    /// Quoted values in source order.
    pub fn spans(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_spans(&mut |s| out.push(s.to_string()));
        out
    }

    fn visit_spans(&self, f: &mut impl FnMut(&str)) {
        for arg in &self.args {
            match arg {
                LfArg::Node(n) => n.visit_spans(f),
                LfArg::Quoted(s) => f(s),
                LfArg::Symbol(_) => {}
            }
        }
        for p in &self.predicates {
            p.visit_spans(f);
        }
    }

    /// Recomputes `span_index` for every node from source order.
    pub fn assign_span_indices(&mut self) {
        let mut next = 0;
        self.assign_from(&mut next);
    }

    fn assign_from(&mut self, next: &mut usize) {
        self.span_index = None;
        for arg in &mut self.args {
            match arg {
                LfArg::Node(n) => n.assign_from(next),
                LfArg::Quoted(_) => {
                    if self.span_index.is_none() {
                        self.span_index = Some(*next);
                    }
                    *next += 1;
                }
                LfArg::Symbol(_) => {}
            }
        }
        for p in &mut self.predicates {
            p.assign_from(next);
        }
    }

    /// Total number of calls in the tree, predicates included.
    pub fn size(&self) -> usize {
        1 + self.node_args().map(LfNode::size).sum::<usize>() + self.predicates.iter().map(LfNode::size).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Inclusion,
    Exclusion,
}

impl Polarity {
    pub fn header(self) -> &'static str {
        match self {
            Polarity::Inclusion => "INC",
            Polarity::Exclusion => "EXC",
        }
    }

    pub fn from_header(s: &str) -> Option<Self> {
        match s.trim() {
            "INC" => Some(Polarity::Inclusion),
            "EXC" => Some(Polarity::Exclusion),
            _ => None,
        }
    }
}

/// One line of eligibility criteria.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub polarity: Polarity,
    pub raw_text: String,
    pub augmented_text: Option<String>,
    pub logical_form: Option<LfNode>,
    /// 1-based.
    pub line_number: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_indices_follow_source_order() {
        let mut n = LfNode::new("intersect").with_node(LfNode::new("cond").with_quoted("a")).with_node(
            LfNode::new("age").with_predicate(
                LfNode::new("num_filter").with_node(
                    LfNode::new("eq")
                        .with_node(LfNode::new("op").with_symbol("GT"))
                        .with_node(LfNode::new("val").with_quoted("65")),
                ),
            ),
        );
        n.assign_span_indices();
        assert_eq!(n.spans(), vec!["a", "65"]);
        assert_eq!(n.args[0].as_node().unwrap().span_index, Some(0));
        let val = &n.args[1].as_node().unwrap().predicates[0].args[0].as_node().unwrap().args[1];
        assert_eq!(val.as_node().unwrap().span_index, Some(1));
        assert_eq!(n.span_index, None);
    }
}
