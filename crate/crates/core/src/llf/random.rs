//! Seeded generator of catalog-conformant logical forms, used by the
//! round-trip checks and the randomized harness.

use rand::seq::SliceRandom;
use rand::Rng;

use super::ast::LfNode;
use super::validate::OPERATORS;

const ENTITIES: [&str; 6] = ["cond", "obs", "proc", "drug", "lab", "allergy"];
const UNITS: [&str; 4] = ["minutes", "hours", "days", "weeks"];
const ALPHABET: &[char] =
    &['a', 'b', 'c', 'x', 'y', 'z', 'A', 'Q', '0', '7', ' ', '-', '(', ')', ',', '.', '"', '\\', '@', '[', 'é', 'µ'];

fn random_text(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(0..12);
    (0..len).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

fn number(rng: &mut impl Rng) -> String {
    if rng.gen_bool(0.2) {
        format!("{}.{}", rng.gen_range(0..100), rng.gen_range(0..10))
    } else {
        rng.gen_range(0..500).to_string()
    }
}

fn num_filter(rng: &mut impl Rng) -> LfNode {
    let mut f = LfNode::new("num_filter");
    for _ in 0..rng.gen_range(1..=2) {
        f = f.with_node(
            LfNode::new("eq")
                .with_node(LfNode::new("op").with_symbol(*OPERATORS.choose(rng).unwrap()))
                .with_node(LfNode::new("val").with_quoted(number(rng))),
        );
    }
    f
}

fn entity(rng: &mut impl Rng, depth: u32) -> LfNode {
    let mut n = LfNode::new(*ENTITIES.choose(rng).unwrap());
    match rng.gen_range(0..6) {
        0 => {}
        1 if depth > 0 => n = n.with_node(entity(rng, depth - 1)),
        _ => n = n.with_quoted(random_text(rng)),
    }
    predicates(rng, n, depth)
}

fn predicates(rng: &mut impl Rng, mut n: LfNode, depth: u32) -> LfNode {
    for _ in 0..rng.gen_range(0..=2) {
        let p = match rng.gen_range(0..7) {
            0 => num_filter(rng),
            1 if depth > 0 => LfNode::new("within")
                .with_node(entity(rng, depth - 1))
                .with_node(LfNode::new("val").with_quoted(number(rng)))
                .with_node(LfNode::new("unit").with_quoted(*UNITS.choose(rng).unwrap())),
            2 if depth > 0 => LfNode::new("before").with_node(operand(rng, depth - 1)),
            3 if depth > 0 => LfNode::new("after").with_node(operand(rng, depth - 1)),
            4 if depth > 0 => LfNode::new("caused_by").with_node(operand(rng, depth - 1)),
            5 if depth > 0 => LfNode::new("contraindication").with_node(operand(rng, depth - 1)),
            6 if depth > 0 => LfNode::new("if_then").with_node(operand(rng, depth - 1)),
            _ => num_filter(rng),
        };
        n = n.with_predicate(p);
    }
    n
}

/// A random operand (entity, demographic or structural call) of at most
/// `depth` levels of nesting.
pub fn random_node(rng: &mut impl Rng, depth: u32) -> LfNode {
    operand(rng, depth)
}

fn operand(rng: &mut impl Rng, depth: u32) -> LfNode {
    let choice = if depth == 0 { rng.gen_range(0..5) } else { rng.gen_range(0..8) };
    match choice {
        0..=2 => entity(rng, depth),
        3 => LfNode::new(if rng.gen_bool(0.5) { "female" } else { "male" }),
        4 => {
            let age = LfNode::new("age");
            if rng.gen_bool(0.7) {
                age.with_predicate(num_filter(rng))
            } else {
                age
            }
        }
        5 => LfNode::new("not").with_node(operand(rng, depth - 1)),
        _ => {
            let mut n = LfNode::new(if choice == 6 { "intersect" } else { "union" });
            for _ in 0..rng.gen_range(2..=4) {
                n = n.with_node(operand(rng, depth - 1));
            }
            n
        }
    }
}
