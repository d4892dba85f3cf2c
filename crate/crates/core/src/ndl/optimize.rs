//! Semantics-preserving clean-up: drops `swap_values(t, t)` on bound `t` and
//! a `constraint` test identical to the atom right before it.

use std::collections::BTreeSet;

use super::ast::{Atom, ProgVar, Program};

fn pass(atoms: &[Atom], bound: &mut BTreeSet<ProgVar>) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    let mut last_removed = None;
    for atom in atoms {
        match atom {
            Atom::Swap { a, b } if a == b && bound.contains(a) => {
                last_removed = Some(atom.clone());
                continue;
            }
            Atom::Constraint { .. } if out.last() == Some(atom) => {
                last_removed = Some(atom.clone());
                continue;
            }
            Atom::Constraint { a, b, .. } => {
                bound.insert(*a);
                bound.insert(*b);
                out.push(atom.clone());
            }
            Atom::Iterate { x, y, start, body } => {
                bound.insert(*start);
                let mut inner = bound.clone();
                inner.insert(*x);
                inner.insert(*y);
                let body = pass(body, &mut inner);
                bound.insert(*x);
                bound.insert(*y);
                out.push(Atom::Iterate {
                    x: *x,
                    y: *y,
                    start: *start,
                    body,
                });
            }
            _ => out.push(atom.clone()),
        }
    }
    // A conjunction is never empty; every removed atom is a no-op, keep one.
    if out.is_empty() {
        out.extend(last_removed);
    }
    out
}

pub fn optimize(program: &Program) -> Program {
    let mut current = program.clone();
    loop {
        let next = Program::new(pass(&current.body, &mut BTreeSet::new()));
        if next == current {
            return current;
        }
        current = next;
    }
}
