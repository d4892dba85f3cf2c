//! Constraint-programming problem representation.
//!
//! A [`Model`] is a flat list of finite-domain integer variables, named
//! groups over them, a small catalog of constraints and an objective. The
//! model never propagates anything: it only answers questions about total
//! [`Assignment`]s (is a constraint satisfied, which pairs of variables does a
//! constraint relate right now, what does the assignment cost).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variable budget used when a model document does not declare one.
pub const DEFAULT_VAR_BUDGET: usize = 6;

/// Surface names that resolve to a constraint kind even when the model does
/// not declare them as an alias.
pub const BUILTIN_ALIASES: &[(&str, ConstraintKind)] = &[("all_diff_next", ConstraintKind::Circuit)];

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("schema violation: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("{path}: unknown constraint kind `{kind}`")]
    UnknownKind { path: String, kind: String },
    #[error("{path}: dangling variable reference `{name}`")]
    DanglingReference { path: String, name: String },
    #[error("{path}: empty domain")]
    EmptyDomain { path: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unknown constraint id {0}")]
    UnknownConstraint(usize),
    #[error("assignment has {found} values, model has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },
    #[error("value {value} of {var} lies outside its domain")]
    OutOfDomain { var: String, value: i64 },
    #[error("infeasible seed: {0}")]
    InfeasibleSeed(String),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

/// Dense variable index. Stored 0-based, displayed 1-based (`x1`, `x2`, ...).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(u32);

impl VarId {
    pub fn new(index: usize) -> Self {
        VarId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based id as used in documents and diagnostics.
    pub fn number(self) -> usize {
        self.0 as usize + 1
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstraintId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    Interval {
        lo: i64,
        hi: i64,
    },
    /// Sorted, duplicate-free.
    Set(Vec<i64>),
}

impl Domain {
    pub fn contains(&self, value: i64) -> bool {
        match self {
            Domain::Interval { lo, hi } => *lo <= value && value <= *hi,
            Domain::Set(values) => values.binary_search(&value).is_ok(),
        }
    }

    pub fn min(&self) -> i64 {
        match self {
            Domain::Interval { lo, .. } => *lo,
            Domain::Set(values) => values[0],
        }
    }

    /// Values in ascending order.
    pub fn values(&self) -> Box<dyn Iterator<Item = i64> + '_> {
        match self {
            Domain::Interval { lo, hi } => Box::new(*lo..=*hi),
            Domain::Set(values) => Box::new(values.iter().copied()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub id: VarId,
    pub name: String,
    pub domain: Domain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Circuit,
    AllDifferent,
    NotEqual,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 3] = [
        ConstraintKind::Circuit,
        ConstraintKind::AllDifferent,
        ConstraintKind::NotEqual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::Circuit => "circuit",
            ConstraintKind::AllDifferent => "all_different",
            ConstraintKind::NotEqual => "not_equal",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintDecl {
    pub id: ConstraintId,
    pub kind: ConstraintKind,
    pub scope: Vec<VarId>,
    pub alias: Option<String>,
}

impl ConstraintDecl {
    /// The name a program uses to refer to this constraint: its alias if it
    /// has one, otherwise its kind.
    pub fn name(&self) -> &str {
        self.alias.as_deref().unwrap_or(self.kind.name())
    }

    fn position_of(&self, var: VarId) -> Option<usize> {
        self.scope.iter().position(|&v| v == var)
    }

    pub fn holds(&self, assignment: &Assignment) -> bool {
        match self.kind {
            ConstraintKind::Circuit => {
                let n = self.scope.len();
                let mut seen = vec![false; n];
                let mut cur = 0;
                for _ in 0..n {
                    if seen[cur] {
                        return false;
                    }
                    seen[cur] = true;
                    let v = assignment.value(self.scope[cur]);
                    if v < 1 || v > n as i64 {
                        return false;
                    }
                    cur = (v - 1) as usize;
                }
                cur == 0
            }
            ConstraintKind::AllDifferent => {
                let mut seen = BTreeSet::new();
                self.scope.iter().all(|&v| seen.insert(assignment.value(v)))
            }
            ConstraintKind::NotEqual => assignment.value(self.scope[0]) != assignment.value(self.scope[1]),
        }
    }

    /// Successor of `var` under a circuit's current value, if `var` is in the
    /// scope and its value names a scope position.
    pub fn successor(&self, assignment: &Assignment, var: VarId) -> Option<VarId> {
        debug_assert_eq!(self.kind, ConstraintKind::Circuit);
        self.position_of(var)?;
        let v = assignment.value(var);
        if v < 1 || v > self.scope.len() as i64 {
            return None;
        }
        Some(self.scope[(v - 1) as usize])
    }

    /// Whether `(a, b)` is in [`ConstraintDecl::pairs`], without materializing
    /// the relation.
    pub fn relates(&self, assignment: &Assignment, a: VarId, b: VarId) -> bool {
        match self.kind {
            ConstraintKind::Circuit => self.successor(assignment, a) == Some(b),
            ConstraintKind::AllDifferent => {
                a != b
                    && self.position_of(a).is_some()
                    && self.position_of(b).is_some()
                    && assignment.value(a) == assignment.value(b)
            }
            ConstraintKind::NotEqual => {
                let (x, y) = (self.scope[0], self.scope[1]);
                (a, b) == (x, y) || (a, b) == (y, x)
            }
        }
    }

    /// The binary relation this constraint induces on the current assignment,
    /// sorted and duplicate-free.
    pub fn pairs(&self, assignment: &Assignment) -> Vec<(VarId, VarId)> {
        let mut out = match self.kind {
            ConstraintKind::Circuit => self
                .scope
                .iter()
                .filter_map(|&x| self.successor(assignment, x).map(|y| (x, y)))
                .collect::<Vec<_>>(),
            ConstraintKind::AllDifferent => {
                let mut out = Vec::new();
                for &x in &self.scope {
                    for &y in &self.scope {
                        if x != y && assignment.value(x) == assignment.value(y) {
                            out.push((x, y));
                        }
                    }
                }
                out
            }
            ConstraintKind::NotEqual => {
                let (x, y) = (self.scope[0], self.scope[1]);
                vec![(x, y), (y, x)]
            }
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    None,
    /// `matrix[i][j]` is the cost of position `i` pointing at position `j` in
    /// the structural group.
    NextCost {
        matrix: Vec<Vec<f64>>,
    },
    DistinctCount {
        group: String,
        vars: Vec<VarId>,
    },
}

/// A total map from variables to values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<i64>,
}

impl Assignment {
    pub fn new(values: Vec<i64>) -> Self {
        Assignment { values }
    }

    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn value(&self, var: VarId) -> i64 {
        self.values[var.index()]
    }

    pub fn set(&mut self, var: VarId, value: i64) {
        self.values[var.index()] = value;
    }

    pub fn swap(&mut self, a: VarId, b: VarId) {
        self.values.swap(a.index(), b.index());
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<i64>> for Assignment {
    fn from(values: Vec<i64>) -> Self {
        Assignment::new(values)
    }
}

/// Unsatisfied-constraint counts per kind. Every kind present in the model has
/// an entry, including kinds with zero violations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violations(pub BTreeMap<ConstraintKind, usize>);

impl Violations {
    pub fn get(&self, kind: ConstraintKind) -> usize {
        self.0.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.total() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub name: String,
    pub variables: Vec<VarDecl>,
    pub groups: IndexMap<String, Vec<VarId>>,
    pub constraints: Vec<ConstraintDecl>,
    pub structural: Option<ConstraintId>,
    pub objective: Objective,
    /// Number of program variables (`t0..t{budget-1}`) an operator may use.
    pub budget: usize,
}

// Raw document shapes. Validation happens after deserialization so that
// errors can carry a path into the document.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: String,
    variables: Vec<RawVar>,
    #[serde(default)]
    groups: IndexMap<String, Vec<String>>,
    #[serde(default)]
    constraints: Vec<RawConstraint>,
    #[serde(default)]
    structural: Option<usize>,
    #[serde(default)]
    objective: Option<RawObjective>,
    #[serde(default)]
    budget: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVar {
    name: String,
    domain: RawDomain,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawDomain {
    Interval { lo: i64, hi: i64 },
    Set { set: Vec<i64> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    kind: String,
    scope: RawScope,
    #[serde(default)]
    alias: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawScope {
    Group(String),
    Vars(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObjective {
    kind: String,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    group: Option<String>,
    #[serde(default)]
    sense: Option<String>,
}

impl Model {
    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let raw: RawModel = serde_json::from_str(text)?;
        Self::from_raw(raw)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self, ModelError> {
        let raw: RawModel = serde_json::from_value(value)?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawModel) -> Result<Self, ModelError> {
        let mut variables = Vec::with_capacity(raw.variables.len());
        let mut by_name: IndexMap<String, VarId> = IndexMap::new();
        for (i, rv) in raw.variables.into_iter().enumerate() {
            let path = format!("/variables/{i}");
            let domain = match rv.domain {
                RawDomain::Interval { lo, hi } => {
                    if lo > hi {
                        return Err(ModelError::EmptyDomain {
                            path: format!("{path}/domain"),
                        });
                    }
                    Domain::Interval { lo, hi }
                }
                RawDomain::Set { set } => {
                    if set.is_empty() {
                        return Err(ModelError::EmptyDomain {
                            path: format!("{path}/domain"),
                        });
                    }
                    let mut sorted = set.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != set.len() {
                        return Err(invalid(format!("{path}/domain/set"), "duplicate domain value"));
                    }
                    Domain::Set(sorted)
                }
            };
            let id = VarId::new(i);
            if by_name.insert(rv.name.clone(), id).is_some() {
                return Err(invalid(
                    format!("{path}/name"),
                    format!("duplicate variable name `{}`", rv.name),
                ));
            }
            variables.push(VarDecl {
                id,
                name: rv.name,
                domain,
            });
        }
        if variables.is_empty() {
            return Err(invalid("/variables", "model declares no variables"));
        }

        let lookup = |path: String, name: &str| -> Result<VarId, ModelError> {
            by_name.get(name).copied().ok_or(ModelError::DanglingReference {
                path,
                name: name.to_string(),
            })
        };

        let mut groups = IndexMap::new();
        for (gname, members) in &raw.groups {
            let mut ids = Vec::with_capacity(members.len());
            for (j, m) in members.iter().enumerate() {
                let id = lookup(format!("/groups/{gname}/{j}"), m)?;
                if ids.contains(&id) {
                    return Err(invalid(
                        format!("/groups/{gname}/{j}"),
                        format!("duplicate group member `{m}`"),
                    ));
                }
                ids.push(id);
            }
            if ids.is_empty() {
                return Err(invalid(format!("/groups/{gname}"), "empty group"));
            }
            groups.insert(gname.clone(), ids);
        }

        let mut constraints = Vec::with_capacity(raw.constraints.len());
        for (i, rc) in raw.constraints.into_iter().enumerate() {
            let path = format!("/constraints/{i}");
            let kind = ConstraintKind::from_name(&rc.kind).ok_or_else(|| ModelError::UnknownKind {
                path: format!("{path}/kind"),
                kind: rc.kind.clone(),
            })?;
            let scope = match &rc.scope {
                RawScope::Group(g) => groups.get(g).cloned().ok_or(ModelError::DanglingReference {
                    path: format!("{path}/scope"),
                    name: g.clone(),
                })?,
                RawScope::Vars(names) => names
                    .iter()
                    .enumerate()
                    .map(|(j, n)| lookup(format!("{path}/scope/{j}"), n))
                    .collect::<Result<Vec<_>, _>>()?,
            };
            match kind {
                ConstraintKind::NotEqual if scope.len() != 2 => {
                    return Err(invalid(format!("{path}/scope"), "not_equal takes exactly 2 variables"));
                }
                ConstraintKind::NotEqual if scope[0] == scope[1] => {
                    return Err(invalid(format!("{path}/scope"), "not_equal over a single variable"));
                }
                ConstraintKind::Circuit | ConstraintKind::AllDifferent if scope.is_empty() => {
                    return Err(invalid(format!("{path}/scope"), "empty scope"));
                }
                _ => {}
            }
            let distinct: BTreeSet<_> = scope.iter().collect();
            if distinct.len() != scope.len() {
                return Err(invalid(format!("{path}/scope"), "duplicate variable in scope"));
            }
            if kind == ConstraintKind::Circuit {
                let n = scope.len() as i64;
                for &v in &scope {
                    let decl = &variables[v.index()];
                    if decl.domain.values().any(|x| x < 1 || x > n) {
                        return Err(invalid(
                            format!("{path}/scope"),
                            format!("domain of `{}` is not within circuit positions 1..{n}", decl.name),
                        ));
                    }
                }
            }
            if let Some(alias) = &rc.alias {
                if ConstraintKind::from_name(alias).is_some_and(|k| k != kind) {
                    return Err(invalid(
                        format!("{path}/alias"),
                        format!("alias `{alias}` names another kind"),
                    ));
                }
            }
            constraints.push(ConstraintDecl {
                id: ConstraintId(i),
                kind,
                scope,
                alias: rc.alias,
            });
        }

        if let Some(s) = raw.structural {
            match constraints.get(s) {
                None => return Err(invalid("/structural", format!("no constraint with index {s}"))),
                Some(c) if c.kind != ConstraintKind::Circuit => {
                    return Err(invalid("/structural", "structural constraint must be a circuit"));
                }
                _ => {}
            }
        }

        let objective = match raw.objective {
            None => Objective::None,
            Some(ro) => {
                if let Some(sense) = &ro.sense {
                    if sense != "minimize" {
                        return Err(invalid("/objective/sense", format!("unsupported sense `{sense}`")));
                    }
                }
                match ro.kind.as_str() {
                    "none" => Objective::None,
                    "next_cost" => {
                        let matrix = ro
                            .matrix
                            .ok_or_else(|| invalid("/objective/matrix", "missing cost matrix"))?;
                        let Some(s) = raw.structural else {
                            return Err(invalid("/objective", "next_cost requires a structural constraint"));
                        };
                        let n = constraints[s].scope.len();
                        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                            return Err(invalid("/objective/matrix", format!("matrix must be {n}x{n}")));
                        }
                        for (i, row) in matrix.iter().enumerate() {
                            if let Some(j) = row.iter().position(|c| !c.is_finite() || *c < 0.0) {
                                return Err(invalid(
                                    format!("/objective/matrix/{i}/{j}"),
                                    "cost must be non-negative",
                                ));
                            }
                        }
                        Objective::NextCost { matrix }
                    }
                    "distinct_count" => {
                        let group = ro.group.ok_or_else(|| invalid("/objective/group", "missing group"))?;
                        let vars = groups.get(&group).cloned().ok_or(ModelError::DanglingReference {
                            path: "/objective/group".into(),
                            name: group.clone(),
                        })?;
                        Objective::DistinctCount { group, vars }
                    }
                    other => return Err(invalid("/objective/kind", format!("unknown objective kind `{other}`"))),
                }
            }
        };

        let budget = raw.budget.unwrap_or(DEFAULT_VAR_BUDGET);
        if budget < 2 {
            return Err(invalid("/budget", "variable budget must be at least 2"));
        }

        Ok(Model {
            name: raw.name,
            variables,
            groups,
            constraints,
            structural: raw.structural.map(ConstraintId),
            objective,
            budget,
        })
    }

    /// Successor-array TSP model: `n` variables `next1..nextn`, one circuit
    /// (aliased `all_diff_next`) over group `next`, `next_cost` objective.
    pub fn successor_tsp(name: &str, matrix: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let n = matrix.len();
        let names: Vec<String> = (1..=n).map(|i| format!("next{i}")).collect();
        Self::from_json_value(serde_json::json!({
            "name": name,
            "variables": names.iter().map(|v| serde_json::json!({"name": v, "domain": {"lo": 1, "hi": n}})).collect::<Vec<_>>(),
            "groups": {"next": names},
            "constraints": [{"kind": "circuit", "scope": "next", "alias": "all_diff_next"}],
            "structural": 0,
            "objective": {"kind": "next_cost", "matrix": matrix},
        }))
    }

    /// Graph coloring model: one variable per vertex with colors `1..=colors`,
    /// one `not_equal` per edge (1-based vertex numbers), `distinct_count`
    /// objective.
    pub fn graph_coloring(
        name: &str,
        vertices: usize,
        edges: &[(usize, usize)],
        colors: i64,
    ) -> Result<Self, ModelError> {
        let names: Vec<String> = (1..=vertices).map(|i| format!("v{i}")).collect();
        Self::from_json_value(serde_json::json!({
            "name": name,
            "variables": names.iter().map(|v| serde_json::json!({"name": v, "domain": {"lo": 1, "hi": colors}})).collect::<Vec<_>>(),
            "groups": {"vertices": names},
            "constraints": edges.iter().map(|&(a, b)| serde_json::json!({
                "kind": "not_equal",
                "scope": [format!("v{a}"), format!("v{b}")],
            })).collect::<Vec<_>>(),
            "objective": {"kind": "distinct_count", "group": "vertices"},
        }))
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn var(&self, id: VarId) -> &VarDecl {
        &self.variables[id.index()]
    }

    pub fn constraint(&self, id: ConstraintId) -> Result<&ConstraintDecl, ModelError> {
        self.constraints.get(id.0).ok_or(ModelError::UnknownConstraint(id.0))
    }

    pub fn structural_constraint(&self) -> Option<&ConstraintDecl> {
        self.structural.map(|id| &self.constraints[id.0])
    }

    /// Kinds present in the model, in catalog order.
    pub fn kinds(&self) -> Vec<ConstraintKind> {
        let present: BTreeSet<_> = self.constraints.iter().map(|c| c.kind).collect();
        present.into_iter().collect()
    }

    /// Distinct constraint names (alias, else kind) in declaration order.
    pub fn constraint_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for c in &self.constraints {
            if !names.contains(&c.name()) {
                names.push(c.name());
            }
        }
        names
    }

    /// Constraints a program name refers to: those declaring it as alias,
    /// else those whose kind it names (directly or through a builtin alias).
    pub fn resolve(&self, name: &str) -> Vec<ConstraintId> {
        let by_alias: Vec<_> = self
            .constraints
            .iter()
            .filter(|c| c.alias.as_deref() == Some(name))
            .map(|c| c.id)
            .collect();
        if !by_alias.is_empty() {
            return by_alias;
        }
        let kind = ConstraintKind::from_name(name)
            .or_else(|| BUILTIN_ALIASES.iter().find(|(a, _)| *a == name).map(|(_, k)| *k));
        match kind {
            Some(kind) => self
                .constraints
                .iter()
                .filter(|c| c.kind == kind)
                .map(|c| c.id)
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn validate_assignment(&self, assignment: &Assignment) -> Result<(), ModelError> {
        if assignment.len() != self.len() {
            return Err(ModelError::AssignmentLength {
                expected: self.len(),
                found: assignment.len(),
            });
        }
        for decl in &self.variables {
            let value = assignment.value(decl.id);
            if !decl.domain.contains(value) {
                return Err(ModelError::OutOfDomain {
                    var: decl.name.clone(),
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn check(&self, id: ConstraintId, assignment: &Assignment) -> Result<bool, ModelError> {
        Ok(self.constraint(id)?.holds(assignment))
    }

    pub fn violations(&self, assignment: &Assignment) -> Violations {
        let mut counts: BTreeMap<ConstraintKind, usize> = BTreeMap::new();
        for c in &self.constraints {
            let entry = counts.entry(c.kind).or_insert(0);
            if !c.holds(assignment) {
                *entry += 1;
            }
        }
        Violations(counts)
    }

    pub fn is_feasible(&self, assignment: &Assignment) -> bool {
        self.constraints.iter().all(|c| c.holds(assignment))
    }

    pub fn relation_pairs(&self, id: ConstraintId, assignment: &Assignment) -> Result<Vec<(VarId, VarId)>, ModelError> {
        Ok(self.constraint(id)?.pairs(assignment))
    }

    pub fn objective(&self, assignment: &Assignment) -> f64 {
        match &self.objective {
            Objective::None => 0.0,
            Objective::NextCost { matrix } => {
                let scope = &self.structural_constraint().expect("validated").scope;
                let n = scope.len() as i64;
                scope
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let to = assignment.value(v);
                        if to < 1 || to > n || (to - 1) as usize == i {
                            0.0
                        } else {
                            matrix[i][(to - 1) as usize]
                        }
                    })
                    .sum()
            }
            Objective::DistinctCount { vars, .. } => {
                let distinct: BTreeSet<i64> = vars.iter().map(|&v| assignment.value(v)).collect();
                distinct.len() as f64
            }
        }
    }

    /// A feasible assignment drawn deterministically from `seed`.
    ///
    /// Circuits get a random single cycle. Variables under `not_equal` /
    /// `all_different` are colored greedily (smallest free value) in a seeded
    /// graph-search order, so every vertex but a component's root has a
    /// colored neighbor when it is reached. Remaining variables take their
    /// domain minimum.
    pub fn seed_assignment(&self, seed: u64) -> Result<Assignment, ModelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<Option<i64>> = vec![None; self.len()];

        for c in self.constraints.iter().filter(|c| c.kind == ConstraintKind::Circuit) {
            let n = c.scope.len();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for i in 0..n {
                let var = c.scope[order[i]];
                let value = order[(i + 1) % n] as i64 + 1;
                if !self.var(var).domain.contains(value) {
                    return Err(ModelError::InfeasibleSeed(format!(
                        "circuit position {value} not in domain of `{}`",
                        self.var(var).name
                    )));
                }
                values[var.index()] = Some(value);
            }
        }

        let mut adjacency: BTreeMap<VarId, BTreeSet<VarId>> = BTreeMap::new();
        for c in &self.constraints {
            if matches!(c.kind, ConstraintKind::NotEqual | ConstraintKind::AllDifferent) {
                for &a in &c.scope {
                    for &b in &c.scope {
                        if a != b {
                            adjacency.entry(a).or_default().insert(b);
                        }
                    }
                }
            }
        }
        let mut pending: Vec<VarId> = adjacency
            .keys()
            .copied()
            .filter(|v| values[v.index()].is_none())
            .collect();
        pending.shuffle(&mut rng);
        let mut visited: BTreeSet<VarId> = BTreeSet::new();
        for root in pending {
            if !visited.insert(root) {
                continue;
            }
            let mut frontier = vec![root];
            while !frontier.is_empty() {
                let v = frontier.swap_remove(rng.gen_range(0..frontier.len()));
                let taken: BTreeSet<i64> = adjacency[&v].iter().filter_map(|u| values[u.index()]).collect();
                let decl = self.var(v);
                let value = decl
                    .domain
                    .values()
                    .find(|x| !taken.contains(x))
                    .ok_or_else(|| ModelError::InfeasibleSeed(format!("no free value left for `{}`", decl.name)))?;
                values[v.index()] = Some(value);
                for &u in &adjacency[&v] {
                    if values[u.index()].is_none() && visited.insert(u) {
                        frontier.push(u);
                    }
                }
            }
        }

        let assignment = Assignment::new(
            values
                .iter()
                .zip(&self.variables)
                .map(|(v, decl)| v.unwrap_or_else(|| decl.domain.min()))
                .collect(),
        );
        if !self.is_feasible(&assignment) {
            return Err(ModelError::InfeasibleSeed(
                "sampled assignment violates a constraint".into(),
            ));
        }
        Ok(assignment)
    }
}
