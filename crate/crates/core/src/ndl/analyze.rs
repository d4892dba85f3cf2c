//! Static checks run before a program is executed.
//!
//! Binding discipline: a `constraint` atom binds both its variables, an
//! `iterate` header binds `x`, `y` and `start`. Effects never bind. Variables
//! first bound inside an `iterate` body are local to that body.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::ast::{Atom, ProgVar, Program};
use crate::model::Model;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    UnboundEffect,
    NoEffect,
    SelfSwap,
    DuplicateTest,
    UnknownConstraint,
    VarBudgetExceeded,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::UnboundEffect => "UNBOUND_EFFECT",
            Code::NoEffect => "NO_EFFECT",
            Code::SelfSwap => "SELF_SWAP",
            Code::DuplicateTest => "DUPLICATE_TEST",
            Code::UnknownConstraint => "UNKNOWN_CONSTRAINT",
            Code::VarBudgetExceeded => "VAR_BUDGET_EXCEEDED",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    /// Pre-order index of the offending atom; `None` for program-wide findings.
    pub atom: Option<usize>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.atom {
            Some(i) => write!(f, "{} (atom {i}): {}", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has(&self, code: Code) -> bool {
        self.errors.iter().chain(&self.warnings).any(|d| d.code == code)
    }
}

struct Analyzer<'m> {
    model: &'m Model,
    diags: Diagnostics,
    next_index: usize,
    effects: usize,
    over_budget: BTreeSet<ProgVar>,
}

impl Analyzer<'_> {
    fn error(&mut self, code: Code, message: String, atom: usize) {
        self.diags.errors.push(Diagnostic {
            code,
            message,
            atom: Some(atom),
        });
    }

    fn warn(&mut self, code: Code, message: String, atom: usize) {
        self.diags.warnings.push(Diagnostic {
            code,
            message,
            atom: Some(atom),
        });
    }

    fn walk(&mut self, atoms: &[Atom], bound: &mut BTreeSet<ProgVar>) {
        let mut prev: Option<&Atom> = None;
        for atom in atoms {
            let idx = self.next_index;
            self.next_index += 1;
            for v in atom.head_vars() {
                if v.index() >= self.model.budget && self.over_budget.insert(v) {
                    self.error(
                        Code::VarBudgetExceeded,
                        format!("{v} exceeds the variable budget of {}", self.model.budget),
                        idx,
                    );
                }
            }
            match atom {
                Atom::Constraint { name, a, b } => {
                    if self.model.resolve(name).is_empty() {
                        self.error(Code::UnknownConstraint, format!("no constraint named `{name}`"), idx);
                    }
                    if prev == Some(atom) {
                        self.warn(Code::DuplicateTest, format!("`{atom}` repeats the previous test"), idx);
                    }
                    bound.insert(*a);
                    bound.insert(*b);
                }
                Atom::Swap { a, b } | Atom::Redirect { a, b } => {
                    let self_swap = matches!(atom, Atom::Swap { .. }) && a == b;
                    if self_swap {
                        self.warn(Code::SelfSwap, format!("`{atom}` has no effect"), idx);
                    } else {
                        self.effects += 1;
                    }
                    for v in if a == b { vec![*a] } else { vec![*a, *b] } {
                        if !bound.contains(&v) {
                            self.error(Code::UnboundEffect, format!("{v} is not bound before `{atom}`"), idx);
                        }
                    }
                }
                Atom::Iterate { x, y, start, body } => {
                    bound.insert(*start);
                    let mut inner = bound.clone();
                    inner.insert(*x);
                    inner.insert(*y);
                    self.walk(body, &mut inner);
                    bound.insert(*x);
                    bound.insert(*y);
                }
            }
            prev = Some(atom);
        }
    }
}

pub fn analyze(program: &Program, model: &Model) -> Diagnostics {
    let mut an = Analyzer {
        model,
        diags: Diagnostics::default(),
        next_index: 0,
        effects: 0,
        over_budget: BTreeSet::new(),
    };
    an.walk(&program.body, &mut BTreeSet::new());
    if an.effects == 0 {
        an.diags.errors.push(Diagnostic {
            code: Code::NoEffect,
            message: "program never changes the assignment".into(),
            atom: None,
        });
    }
    an.diags
}
