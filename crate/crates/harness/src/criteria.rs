//! Seeded random criteria over the lexicon's vocabulary, for randomized
//! comparison of generated SQL against the oracle.

use lfq_core::llf::{LfNode, OPERATORS};
use lfq_core::normalize::{function_for_semtypes, Lexicon};
use rand::seq::SliceRandom;
use rand::Rng;

const UNITS: [&str; 4] = ["minutes", "hours", "days", "weeks"];

pub struct CriteriaGenerator {
    /// (entity function, phrase)
    terms: Vec<(&'static str, String)>,
    labs: Vec<String>,
}

impl CriteriaGenerator {
    pub fn new(lexicon: &Lexicon) -> Self {
        let mut terms: Vec<(&'static str, String)> = lexicon
            .entries()
            .iter()
            .filter_map(|e| function_for_semtypes(&e.semantic_types).map(|f| (f, e.phrase.clone())))
            .collect();
        terms.sort();
        terms.dedup();
        let labs = terms.iter().filter(|(f, _)| *f == "lab").map(|(_, p)| p.clone()).collect();
        CriteriaGenerator { terms, labs }
    }

    /// A random logical form of at most `depth` levels of set operators.
    pub fn criterion(&self, rng: &mut impl Rng, depth: u32) -> LfNode {
        let pick = if depth == 0 { rng.gen_range(0..10) } else { rng.gen_range(0..16) };
        match pick {
            0..=5 => self.entity(rng, true),
            6 => LfNode::new(if rng.gen_bool(0.5) { "female" } else { "male" }),
            7..=9 => LfNode::new("age").with_predicate(num_filter(rng, 1..=95)),
            10 => LfNode::new("not").with_node(self.criterion(rng, depth - 1)),
            11 | 12 => {
                let mut n = LfNode::new("intersect");
                for _ in 0..rng.gen_range(2..=3) {
                    n = n.with_node(self.criterion(rng, depth - 1));
                }
                n
            }
            13 | 14 => {
                let mut n = LfNode::new("union");
                for _ in 0..rng.gen_range(2..=3) {
                    n = n.with_node(self.criterion(rng, depth - 1));
                }
                n
            }
            _ => {
                self.entity(rng, false).with_predicate(LfNode::new("if_then").with_node(self.criterion(rng, depth - 1)))
            }
        }
    }

    fn term(&self, rng: &mut impl Rng) -> LfNode {
        if rng.gen_bool(0.3) && !self.labs.is_empty() {
            return LfNode::new("lab").with_quoted(self.labs.choose(rng).unwrap().clone());
        }
        let (f, phrase) = self.terms.choose(rng).expect("lexicon has entity terms");
        LfNode::new(*f).with_quoted(phrase.clone())
    }

    fn entity(&self, rng: &mut impl Rng, constrained: bool) -> LfNode {
        let mut n = self.term(rng);
        if n.function == "lab" && rng.gen_bool(0.5) {
            n = n.with_predicate(num_filter(rng, 0..=500));
        }
        if constrained && rng.gen_bool(0.35) {
            let mut anchor = self.term(rng);
            if anchor.function == "lab" && rng.gen_bool(0.3) {
                anchor = anchor.with_predicate(num_filter(rng, 0..=500));
            }
            let p = match rng.gen_range(0..4) {
                0 => LfNode::new("before").with_node(anchor),
                1 => LfNode::new("after").with_node(anchor),
                2 => LfNode::new("caused_by").with_node(anchor),
                _ => {
                    let value = if rng.gen_bool(0.2) { "1.5".to_string() } else { rng.gen_range(0..=240).to_string() };
                    LfNode::new("within")
                        .with_node(anchor)
                        .with_node(LfNode::new("val").with_quoted(value))
                        .with_node(LfNode::new("unit").with_quoted(*UNITS.choose(rng).unwrap()))
                }
            };
            n = n.with_predicate(p);
        }
        n
    }
}

fn num_filter(rng: &mut impl Rng, range: std::ops::RangeInclusive<i64>) -> LfNode {
    let mut f = LfNode::new("num_filter");
    for _ in 0..rng.gen_range(1..=2) {
        let v = rng.gen_range(range.clone());
        let value = if rng.gen_bool(0.2) { format!("{v}.5") } else { v.to_string() };
        f = f.with_node(
            LfNode::new("eq")
                .with_node(LfNode::new("op").with_symbol(*OPERATORS.choose(rng).unwrap()))
                .with_node(LfNode::new("val").with_quoted(value)),
        );
    }
    f
}
