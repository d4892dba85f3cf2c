//! Depth-first, fuel-bounded interpreter materializing the neighborhood a
//! program induces on an assignment.
//!
//! Atom semantics:
//!
//! * `constraint(name, a, b)` reads the live relation of every constraint
//!   `name` resolves to. Unbound operands branch over the matching pairs;
//!   fully bound operands make it a test.
//! * `swap_values(a, b)` exchanges two values; the branch fails if either
//!   value leaves the other variable's domain.
//! * `redirect(a, b)` sets `a` to `b`'s 1-based position in the walk group
//!   (structural scope, else all variables in order).
//! * `iterate(x - y, start, body)` snapshots the successor relation at loop
//!   entry and walks it from `start`. Each step unifies `(x, y)` with the next
//!   pair and runs `body` with committed choice. The walk ends when the body
//!   fails, the next node is `start`, the successor is missing, or the group
//!   size is reached. Every prefix of successful steps (length >= 1) is a
//!   separate branch. An unbound `start` branches over the walk group.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::ast::{Atom, ProgVar, Program};
use crate::model::{Assignment, ConstraintId, ConstraintKind, Model, VarId};

pub const DEFAULT_FUEL: u64 = 1_000_000;
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Interpreter step budget.
    pub fuel: u64,
    /// Maximum number of distinct neighbors.
    pub cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            fuel: DEFAULT_FUEL,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborSet {
    /// Distinct neighbors in discovery order; never contains the start.
    pub members: Vec<Assignment>,
    pub truncated: bool,
    pub fuel_used: u64,
}

impl NeighborSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

type Env = Vec<Option<VarId>>;
type Cont<'c> = dyn FnMut(&mut Ctx, &Env, &Assignment) -> Flow + 'c;

struct Ctx {
    fuel_left: u64,
    used: u64,
    exhausted: bool,
}

impl Ctx {
    fn tick(&mut self) -> bool {
        if self.fuel_left == 0 {
            self.exhausted = true;
            return false;
        }
        self.fuel_left -= 1;
        self.used += 1;
        true
    }
}

fn unify(env: &mut Env, var: ProgVar, value: VarId) -> bool {
    match env[var.index()] {
        Some(v) => v == value,
        None => {
            env[var.index()] = Some(value);
            true
        }
    }
}

struct Interp<'m> {
    model: &'m Model,
    names: HashMap<&'m str, Vec<ConstraintId>>,
    walk_group: Vec<VarId>,
    /// 1-based position in `walk_group`, indexed by variable.
    position: Vec<Option<i64>>,
}

fn collect_names<'p>(atoms: &'p [Atom], out: &mut Vec<&'p str>) {
    for atom in atoms {
        match atom {
            Atom::Constraint { name, .. } => out.push(name),
            Atom::Iterate { body, .. } => collect_names(body, out),
            _ => {}
        }
    }
}

impl<'m> Interp<'m> {
    fn new(model: &'m Model, program: &'m Program) -> Self {
        let mut wanted = Vec::new();
        collect_names(&program.body, &mut wanted);
        let names = wanted.into_iter().map(|n| (n, model.resolve(n))).collect();
        let walk_group = match model.structural_constraint() {
            Some(c) => c.scope.clone(),
            None => model.variables.iter().map(|v| v.id).collect(),
        };
        let mut position = vec![None; model.len()];
        for (i, v) in walk_group.iter().enumerate() {
            position[v.index()] = Some(i as i64 + 1);
        }
        Interp {
            model,
            names,
            walk_group,
            position,
        }
    }

    /// Unique successor of every variable in the loop relation.
    fn snapshot(&self, state: &Assignment) -> Vec<Option<VarId>> {
        match self.model.structural_constraint() {
            Some(c) => {
                let mut succ = vec![None; self.model.len()];
                for &v in &c.scope {
                    succ[v.index()] = c.successor(state, v);
                }
                succ
            }
            None => {
                let mut succ = vec![None; self.model.len()];
                for w in self.walk_group.windows(2) {
                    succ[w[0].index()] = Some(w[1]);
                }
                succ
            }
        }
    }

    fn run(&self, ctx: &mut Ctx, atoms: &[Atom], env: &Env, state: &Assignment, k: &mut Cont<'_>) -> Flow {
        let Some((atom, rest)) = atoms.split_first() else {
            return k(ctx, env, state);
        };
        if !ctx.tick() {
            return Flow::Stop;
        }
        match atom {
            Atom::Constraint { name, a, b } => {
                let ids = &self.names[name.as_str()];
                if let (Some(x), Some(y)) = (env[a.index()], env[b.index()]) {
                    let holds = ids.iter().any(|id| self.model.constraints[id.0].relates(state, x, y));
                    return if holds {
                        self.run(ctx, rest, env, state, k)
                    } else {
                        Flow::Continue
                    };
                }
                let mut pairs: Vec<(VarId, VarId)> = ids
                    .iter()
                    .flat_map(|id| self.model.constraints[id.0].pairs(state))
                    .collect();
                if ids.len() > 1 {
                    pairs.sort_unstable();
                    pairs.dedup();
                }
                for (x, y) in pairs {
                    let mut e = env.clone();
                    if !unify(&mut e, *a, x) || !unify(&mut e, *b, y) {
                        continue;
                    }
                    if !ctx.tick() || self.run(ctx, rest, &e, state, k) == Flow::Stop {
                        return Flow::Stop;
                    }
                }
                Flow::Continue
            }
            Atom::Swap { a, b } => {
                let (Some(x), Some(y)) = (env[a.index()], env[b.index()]) else {
                    return Flow::Continue;
                };
                let (vx, vy) = (state.value(x), state.value(y));
                if !self.model.var(x).domain.contains(vy) || !self.model.var(y).domain.contains(vx) {
                    return Flow::Continue;
                }
                let mut next = state.clone();
                next.swap(x, y);
                self.run(ctx, rest, env, &next, k)
            }
            Atom::Redirect { a, b } => {
                let (Some(x), Some(y)) = (env[a.index()], env[b.index()]) else {
                    return Flow::Continue;
                };
                let Some(pos) = self.position[y.index()] else {
                    return Flow::Continue;
                };
                if !self.model.var(x).domain.contains(pos) {
                    return Flow::Continue;
                }
                let mut next = state.clone();
                next.set(x, pos);
                self.run(ctx, rest, env, &next, k)
            }
            Atom::Iterate { x, y, start, body } => {
                let starts = match env[start.index()] {
                    Some(s) => vec![s],
                    None => self.walk_group.clone(),
                };
                for s in starts {
                    let mut entry = env.clone();
                    entry[start.index()] = Some(s);
                    let succ = self.snapshot(state);
                    let mut current = state.clone();
                    let mut node = s;
                    let mut prefixes = Vec::new();
                    for _ in 0..self.walk_group.len() {
                        if !ctx.tick() {
                            return Flow::Stop;
                        }
                        let Some(next) = succ[node.index()] else { break };
                        if next == s {
                            break;
                        }
                        let mut e = entry.clone();
                        if !unify(&mut e, *x, node) || !unify(&mut e, *y, next) {
                            break;
                        }
                        let mut committed = None;
                        self.run(ctx, body, &e, &current, &mut |_, _, st| {
                            committed = Some(st.clone());
                            Flow::Stop
                        });
                        if ctx.exhausted {
                            return Flow::Stop;
                        }
                        let Some(st) = committed else { break };
                        current = st;
                        prefixes.push((current.clone(), e));
                        node = next;
                    }
                    for (st, e) in prefixes {
                        if self.run(ctx, rest, &e, &st, k) == Flow::Stop {
                            return Flow::Stop;
                        }
                    }
                }
                Flow::Continue
            }
        }
    }
}

/// Enumerate the neighborhood of `start` under `program`.
///
/// Never fails: running out of fuel abandons the remaining branches and
/// reaching `cap` stops enumeration, both setting `truncated`.
pub fn neighbors(program: &Program, model: &Model, start: &Assignment, limits: Limits) -> NeighborSet {
    let interp = Interp::new(model, program);
    let width = program.vars().iter().map(|v| v.index() + 1).max().unwrap_or(0);
    let mut ctx = Ctx {
        fuel_left: limits.fuel,
        used: 0,
        exhausted: false,
    };
    let mut seen: HashSet<Assignment> = HashSet::new();
    let mut members = Vec::new();
    let mut capped = false;
    interp.run(&mut ctx, &program.body, &vec![None; width], start, &mut |_, _, st| {
        if st == start || seen.contains(st) {
            return Flow::Continue;
        }
        if members.len() >= limits.cap {
            capped = true;
            return Flow::Stop;
        }
        seen.insert(st.clone());
        members.push(st.clone());
        Flow::Continue
    });
    NeighborSet {
        members,
        truncated: capped || ctx.exhausted,
        fuel_used: ctx.used,
    }
}

/// Whether `kind` holds on every member of `set`.
pub fn preserves(model: &Model, set: &NeighborSet, kind: ConstraintKind) -> bool {
    set.members.iter().all(|m| model.violations(m).get(kind) == 0)
}
