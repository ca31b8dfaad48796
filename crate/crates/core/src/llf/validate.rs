use serde::{Deserialize, Serialize};

use super::ast::{LfArg, LfNode};
use super::catalog::{FunctionCatalog, FunctionKind};

/// Comparison operators accepted by `op(...)`.
pub const OPERATORS: [&str; 6] = ["GT", "GTEQ", "LT", "LTEQ", "EQ", "NEQ"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagnosticKind {
    UnknownFunction,
    ArityError { got: usize, allowed: String },
    ArgumentKindError { index: usize, expected: String },
    ChainingError,
}

/// A catalog violation at `path` (argument/predicate indices from the root,
/// e.g. `2.p0.0` = first argument of the first predicate of the third
/// argument).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub path: String,
    pub function: String,
    #[serde(flatten)]
    pub kind: DiagnosticKind,
    pub message: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// Root of a criterion or operand of a structural / predicate call.
    Operand,
    Predicate,
    Other,
}

pub fn validate(node: &LfNode, catalog: &FunctionCatalog) -> Vec<Diagnostic> {
    let mut v = Validator { catalog, out: Vec::new() };
    v.node(node, "", Slot::Operand);
    v.out
}

struct Validator<'a> {
    catalog: &'a FunctionCatalog,
    out: Vec<Diagnostic>,
}

fn child_path(path: &str, step: &str) -> String {
    if path.is_empty() {
        step.to_string()
    } else {
        format!("{path}.{step}")
    }
}

impl Validator<'_> {
    fn report(&mut self, path: &str, node: &LfNode, kind: DiagnosticKind, message: String) {
        self.out.push(Diagnostic { path: path.to_string(), function: node.function.clone(), kind, message });
    }

    fn arg_kind(&mut self, path: &str, node: &LfNode, index: usize, expected: &str) {
        self.report(
            path,
            node,
            DiagnosticKind::ArgumentKindError { index, expected: expected.to_string() },
            format!("argument {index} of {} must be {expected}", node.function),
        );
    }

    fn kind_of(&self, n: &LfNode) -> Option<FunctionKind> {
        self.catalog.kind(&n.function)
    }

    /// Unknown functions count as operands here; they are reported on their own.
    fn is_operand(&self, arg: &LfArg) -> bool {
        match arg.as_node() {
            Some(n) => matches!(
                self.kind_of(n),
                None | Some(FunctionKind::Entity | FunctionKind::Demographic | FunctionKind::Structural)
            ),
            None => false,
        }
    }

    fn is_call(&self, arg: &LfArg, name: &str) -> bool {
        arg.as_node().is_some_and(|n| n.function == name)
    }

    fn node(&mut self, node: &LfNode, path: &str, slot: Slot) {
        let Some(entry) = self.catalog.get(&node.function).cloned() else {
            self.report(path, node, DiagnosticKind::UnknownFunction, format!("unknown function `{}`", node.function));
            return;
        };

        match (slot, entry.kind) {
            (Slot::Predicate, FunctionKind::Predicate) => {}
            (Slot::Predicate, _) => self.report(
                path,
                node,
                DiagnosticKind::ChainingError,
                format!("`{}` cannot be chained as a predicate", node.function),
            ),
            (Slot::Operand, FunctionKind::Entity | FunctionKind::Demographic | FunctionKind::Structural) => {}
            (Slot::Operand, _) => self.report(
                path,
                node,
                DiagnosticKind::ArgumentKindError {
                    index: 0,
                    expected: "entity, demographic or structural call".into(),
                },
                format!("`{}` cannot stand alone here", node.function),
            ),
            (Slot::Other, _) => {}
        }

        if !entry.arity.accepts(node.args.len()) {
            self.report(
                path,
                node,
                DiagnosticKind::ArityError { got: node.args.len(), allowed: entry.arity.to_string() },
                format!("{} takes {} argument(s), got {}", node.function, entry.arity, node.args.len()),
            );
        }

        if !node.predicates.is_empty() && !entry.chainable {
            self.report(
                path,
                node,
                DiagnosticKind::ChainingError,
                format!("`{}` does not accept chained predicates", node.function),
            );
        }

        self.arguments(node, path, entry.kind);

        for (i, p) in node.predicates.iter().enumerate() {
            self.node(p, &child_path(path, &format!("p{i}")), Slot::Predicate);
        }
    }

    fn arguments(&mut self, node: &LfNode, path: &str, kind: FunctionKind) {
        let args = &node.args;
        // slot each argument is checked in when it is itself a call
        let mut slots = vec![Slot::Other; args.len()];
        match (kind, node.function.as_str()) {
            (FunctionKind::Entity, _) => {
                for (i, a) in args.iter().enumerate() {
                    let ok = match a {
                        LfArg::Quoted(_) => true,
                        LfArg::Node(n) => matches!(self.kind_of(n), None | Some(FunctionKind::Entity)),
                        LfArg::Symbol(_) => false,
                    };
                    if !ok {
                        self.arg_kind(path, node, i, "a quoted value or entity call");
                    }
                    slots[i] = Slot::Operand;
                }
            }
            (FunctionKind::Structural, _) => {
                for (i, a) in args.iter().enumerate() {
                    if !self.is_operand(a) {
                        self.arg_kind(path, node, i, "an entity, demographic or structural call");
                    }
                    slots[i] = Slot::Operand;
                }
            }
            (FunctionKind::Value, "op") => {
                for (i, a) in args.iter().enumerate() {
                    if !a.as_symbol().is_some_and(|s| OPERATORS.contains(&s)) {
                        self.arg_kind(path, node, i, "one of GT, GTEQ, LT, LTEQ, EQ, NEQ");
                    }
                }
            }
            (FunctionKind::Value, _) => {
                for (i, a) in args.iter().enumerate() {
                    if a.as_quoted().is_none() {
                        self.arg_kind(path, node, i, "a quoted value");
                    }
                }
            }
            (FunctionKind::Comparison, _) => {
                if let Some(a) = args.first() {
                    if !self.is_call(a, "op") {
                        self.arg_kind(path, node, 0, "op(...)");
                    }
                }
                if let Some(a) = args.get(1) {
                    if !self.is_call(a, "val") {
                        self.arg_kind(path, node, 1, "val(...)");
                    }
                }
                for i in 2..args.len() {
                    self.arg_kind(path, node, i, "nothing");
                }
            }
            (FunctionKind::Predicate, "num_filter") => {
                for (i, a) in args.iter().enumerate() {
                    if !self.is_call(a, "eq") {
                        self.arg_kind(path, node, i, "eq(...)");
                    }
                }
            }
            (FunctionKind::Predicate, "within") => {
                if let Some(a) = args.first() {
                    if !self.is_operand(a) {
                        self.arg_kind(path, node, 0, "an entity call");
                    }
                    slots[0] = Slot::Operand;
                }
                if let Some(a) = args.get(1) {
                    if !self.is_call(a, "val") {
                        self.arg_kind(path, node, 1, "val(...)");
                    }
                }
                if let Some(a) = args.get(2) {
                    if !self.is_call(a, "unit") {
                        self.arg_kind(path, node, 2, "unit(...)");
                    }
                }
            }
            (FunctionKind::Predicate, _) => {
                for (i, a) in args.iter().enumerate() {
                    if !self.is_operand(a) {
                        self.arg_kind(path, node, i, "an entity, demographic or structural call");
                    }
                    slots[i] = Slot::Operand;
                }
            }
            (FunctionKind::Demographic, _) => {}
        }
        for (i, a) in args.iter().enumerate() {
            if let LfArg::Node(n) = a {
                // operands that already failed the kind check are not re-reported
                let slot = if slots[i] == Slot::Operand && !self.is_operand(a) { Slot::Other } else { slots[i] };
                self.node(n, &child_path(path, &i.to_string()), slot);
            }
        }
    }
}
