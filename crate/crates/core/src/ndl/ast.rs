use std::collections::BTreeSet;
use std::fmt;

/// Program variable `tN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgVar(pub u16);

impl ProgVar {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ProgVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `constraint(name, a, b)`: generator over, or test against, the
    /// relation the named constraint induces on the current state.
    Constraint { name: String, a: ProgVar, b: ProgVar },
    /// `swap_values(a, b)`
    Swap { a: ProgVar, b: ProgVar },
    /// `redirect(a, b)`: point `a` at `b`'s position in the structural group.
    Redirect { a: ProgVar, b: ProgVar },
    /// `iterate(x - y, start, (body))`: walk the structural successor
    /// relation from `start`, running `body` on each visited pair.
    Iterate {
        x: ProgVar,
        y: ProgVar,
        start: ProgVar,
        body: Vec<Atom>,
    },
}

impl Atom {
    pub fn is_effect(&self) -> bool {
        matches!(self, Atom::Swap { .. } | Atom::Redirect { .. })
    }

    /// Variables appearing in this atom's own arguments (not its body).
    pub fn head_vars(&self) -> Vec<ProgVar> {
        match self {
            Atom::Constraint { a, b, .. } | Atom::Swap { a, b } | Atom::Redirect { a, b } => vec![*a, *b],
            Atom::Iterate { x, y, start, .. } => vec![*x, *y, *start],
        }
    }
}

/// A conjunction of atoms. Order matters: atoms run left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    pub body: Vec<Atom>,
}

fn count_atoms(atoms: &[Atom]) -> usize {
    atoms
        .iter()
        .map(|a| match a {
            Atom::Iterate { body, .. } => 1 + count_atoms(body),
            _ => 1,
        })
        .sum()
}

fn collect_vars(atoms: &[Atom], out: &mut BTreeSet<ProgVar>) {
    for atom in atoms {
        out.extend(atom.head_vars());
        if let Atom::Iterate { body, .. } = atom {
            collect_vars(body, out);
        }
    }
}

impl Program {
    pub fn new(body: Vec<Atom>) -> Self {
        Program { body }
    }

    /// Number of atoms, counting nested bodies.
    pub fn atom_count(&self) -> usize {
        count_atoms(&self.body)
    }

    pub fn vars(&self) -> BTreeSet<ProgVar> {
        let mut out = BTreeSet::new();
        collect_vars(&self.body, &mut out);
        out
    }

    /// Canonical text; `parse(render(p)) == p`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn write_conj(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    for (i, atom) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{atom}")?;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Constraint { name, a, b } => write!(f, "constraint({name}, {a}, {b})"),
            Atom::Swap { a, b } => write!(f, "swap_values({a}, {b})"),
            Atom::Redirect { a, b } => write!(f, "redirect({a}, {b})"),
            Atom::Iterate { x, y, start, body } => {
                write!(f, "iterate({x} - {y}, {start}, (")?;
                write_conj(f, body)?;
                f.write_str("))")
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_conj(f, &self.body)
    }
}
