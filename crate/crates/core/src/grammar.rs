//! Problem-specific BNF grammar and the genotype-to-phenotype mapping of
//! grammatical evolution.
//!
//! Terminals carry canonical spacing, so the text a genome maps to is
//! exactly the rendering of the program it parses to.

use std::fmt::Write as _;

use indexmap::IndexMap;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::Model;
use crate::ndl::{parse, Program};

pub const DEFAULT_GENOME_LEN: usize = 80;
pub const DEFAULT_WRAP_LIMIT: usize = 2;
pub const DEFAULT_MAX_DEPTH: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(String),
    NonTerminal(String),
}

fn t(s: &str) -> Symbol {
    Symbol::Terminal(s.to_string())
}

fn n(s: &str) -> Symbol {
    Symbol::NonTerminal(s.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub start: String,
    /// Alternatives in order; the order decides which codon picks which
    /// alternative.
    pub rules: IndexMap<String, Vec<Vec<Symbol>>>,
}

impl Grammar {
    pub fn alternatives(&self, nonterminal: &str) -> &[Vec<Symbol>] {
        &self.rules[nonterminal]
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (lhs, alts) in &self.rules {
            let rendered: Vec<String> = alts
                .iter()
                .map(|alt| {
                    alt.iter()
                        .map(|s| match s {
                            Symbol::Terminal(t) => format!("\"{}\"", t.replace('\\', "\\\\").replace('"', "\\\"")),
                            Symbol::NonTerminal(n) => format!("<{n}>"),
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            let _ = writeln!(out, "<{lhs}> ::= {}", rendered.join(" | "));
        }
        out
    }
}

/// Grammar over the model's constraint names and program variables
/// `t0..t{budget-1}`. `redirect` is only offered when the model has a
/// structural constraint.
pub fn derive_grammar(model: &Model, budget: usize) -> Grammar {
    let mut rules = IndexMap::new();
    rules.insert("program".to_string(), vec![vec![n("conj")]]);
    rules.insert(
        "conj".to_string(),
        vec![vec![n("atom")], vec![n("atom"), t(", "), n("conj")]],
    );
    rules.insert(
        "atom".to_string(),
        vec![vec![n("test")], vec![n("effect")], vec![n("loop")]],
    );
    rules.insert(
        "test".to_string(),
        vec![vec![
            t("constraint("),
            n("cname"),
            t(", "),
            n("var"),
            t(", "),
            n("var"),
            t(")"),
        ]],
    );
    let mut effects = vec![vec![t("swap_values("), n("var"), t(", "), n("var"), t(")")]];
    if model.structural.is_some() {
        effects.push(vec![t("redirect("), n("var"), t(", "), n("var"), t(")")]);
    }
    rules.insert("effect".to_string(), effects);
    rules.insert(
        "loop".to_string(),
        vec![vec![
            t("iterate("),
            n("var"),
            t(" - "),
            n("var"),
            t(", "),
            n("var"),
            t(", ("),
            n("conj"),
            t("))"),
        ]],
    );
    rules.insert(
        "cname".to_string(),
        model.constraint_names().into_iter().map(|c| vec![t(c)]).collect(),
    );
    rules.insert(
        "var".to_string(),
        (0..budget).map(|i| vec![t(&format!("t{i}"))]).collect(),
    );
    Grammar {
        start: "program".to_string(),
        rules,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genome {
    pub codons: Vec<u8>,
}

impl Genome {
    pub fn new(codons: Vec<u8>) -> Self {
        Genome { codons }
    }

    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        Genome {
            codons: (0..len).map(|_| rng.gen()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.codons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codons.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapParams {
    pub wrap_limit: usize,
    pub max_depth: usize,
}

impl Default for MapParams {
    fn default() -> Self {
        MapParams {
            wrap_limit: DEFAULT_WRAP_LIMIT,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InvalidReason {
    WrapLimit,
    DepthLimit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MappingOutcome {
    Mapped {
        program: Program,
        text: String,
        /// Codons read, counting re-reads after wrapping.
        consumed: usize,
    },
    Invalid(InvalidReason),
}

impl MappingOutcome {
    pub fn program(&self) -> Option<&Program> {
        match self {
            MappingOutcome::Mapped { program, .. } => Some(program),
            MappingOutcome::Invalid(_) => None,
        }
    }
}

/// Leftmost derivation; each choice among k > 1 alternatives reads the next
/// codon and takes `codon mod k`. Single-alternative rules read nothing.
pub fn map_genome(grammar: &Grammar, genome: &Genome, params: MapParams) -> MappingOutcome {
    let available = genome.len() * (params.wrap_limit + 1);
    let mut read = 0;
    let mut text = String::new();
    let mut stack = vec![(Symbol::NonTerminal(grammar.start.clone()), 1usize)];
    while let Some((sym, depth)) = stack.pop() {
        match sym {
            Symbol::Terminal(s) => text.push_str(&s),
            Symbol::NonTerminal(nt) => {
                if depth > params.max_depth {
                    return MappingOutcome::Invalid(InvalidReason::DepthLimit);
                }
                let alts = grammar.alternatives(&nt);
                let choice = if alts.len() == 1 {
                    0
                } else {
                    if read == available {
                        return MappingOutcome::Invalid(InvalidReason::WrapLimit);
                    }
                    let codon = genome.codons[read % genome.len()];
                    read += 1;
                    codon as usize % alts.len()
                };
                stack.extend(alts[choice].iter().rev().map(|s| (s.clone(), depth + 1)));
            }
        }
    }
    let program = parse(&text).unwrap_or_else(|e| panic!("grammar produced unparseable text `{text}`: {e}"));
    MappingOutcome::Mapped {
        program,
        text,
        consumed: read,
    }
}
