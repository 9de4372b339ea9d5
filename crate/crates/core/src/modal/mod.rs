//! Modal integrity constraints: formula syntax, Kripke semantics over the
//! crate's graphs, negation normal form, and box/diamond fragment
//! classification.
//!
//! Concrete syntax: `~` negation, `&` conjunction, `|` disjunction, `->`
//! implication (right-associative), `[]` box, `<>` diamond, identifiers as
//! atoms, parentheses. Unary binds tightest, then `&`, then `|`, then `->`.

mod semantics;
mod syntax;

pub use semantics::{
    frame_valid, globally_true, sat_worlds, satisfying_worlds, truth_at, valuation_space,
    KripkeModel, Valuation,
};
pub use syntax::{parse_formula, print_formula, FormulaParseError};

use std::fmt;
use std::sync::Arc;

/// The declared (or inferred) atom alphabet of a formula. Valuation spaces
/// quantify over exactly these atoms, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    atoms: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(atoms: I) -> Result<Arc<Self>, FormulaParseError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(FormulaParseError::DuplicateAtom(a.clone()));
            }
        }
        Ok(Arc::new(Alphabet { atoms }))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, index: usize) -> &str {
        &self.atoms[index]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }
}

/// Abstract syntax of modal formulas; atoms are indices into an [`Alphabet`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ModalFormula {
    Atom(usize),
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Implies(Box<ModalFormula>, Box<ModalFormula>),
    Box(Box<ModalFormula>),
    Diamond(Box<ModalFormula>),
}

impl ModalFormula {
    pub fn atom(i: usize) -> Self {
        ModalFormula::Atom(i)
    }

    pub fn negated(f: ModalFormula) -> Self {
        ModalFormula::Not(Box::new(f))
    }

    pub fn and(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(f: ModalFormula) -> Self {
        ModalFormula::Box(Box::new(f))
    }

    pub fn diamond(f: ModalFormula) -> Self {
        ModalFormula::Diamond(Box::new(f))
    }

    /// Greatest nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            ModalFormula::Atom(_) => 0,
            ModalFormula::Not(f) => f.modal_depth(),
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Implies(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
            ModalFormula::Box(f) | ModalFormula::Diamond(f) => f.modal_depth() + 1,
        }
    }
}

/// Rewrites into negation normal form: no implications, negation only on
/// atoms, with the modal dualities applied. Box and diamond stay primitive.
pub fn to_nnf(f: &ModalFormula) -> ModalFormula {
    match f {
        ModalFormula::Atom(_) => f.clone(),
        ModalFormula::Not(g) => negate_nnf(g),
        ModalFormula::And(a, b) => ModalFormula::and(to_nnf(a), to_nnf(b)),
        ModalFormula::Or(a, b) => ModalFormula::or(to_nnf(a), to_nnf(b)),
        ModalFormula::Implies(a, b) => ModalFormula::or(negate_nnf(a), to_nnf(b)),
        ModalFormula::Box(g) => ModalFormula::boxed(to_nnf(g)),
        ModalFormula::Diamond(g) => ModalFormula::diamond(to_nnf(g)),
    }
}

fn negate_nnf(f: &ModalFormula) -> ModalFormula {
    match f {
        ModalFormula::Atom(_) => ModalFormula::negated(f.clone()),
        ModalFormula::Not(g) => to_nnf(g),
        ModalFormula::And(a, b) => ModalFormula::or(negate_nnf(a), negate_nnf(b)),
        ModalFormula::Or(a, b) => ModalFormula::and(negate_nnf(a), negate_nnf(b)),
        ModalFormula::Implies(a, b) => ModalFormula::and(to_nnf(a), negate_nnf(b)),
        ModalFormula::Box(g) => ModalFormula::diamond(negate_nnf(g)),
        ModalFormula::Diamond(g) => ModalFormula::boxed(negate_nnf(g)),
    }
}

/// NNF fragment of a formula: no modalities, box-only, diamond-only, or
/// mixed. Box formulas survive edge deletion, diamond formulas edge
/// addition.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Fragment {
    Propositional,
    Box,
    Diamond,
    Mixed,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Fragment::Propositional => "propositional",
            Fragment::Box => "box",
            Fragment::Diamond => "diamond",
            Fragment::Mixed => "mixed",
        };
        write!(f, "{name}")
    }
}

/// Classifies the negation normal form of `f`.
pub fn fragment(f: &ModalFormula) -> Fragment {
    fn scan(f: &ModalFormula, boxes: &mut bool, diamonds: &mut bool) {
        match f {
            ModalFormula::Atom(_) => {}
            ModalFormula::Not(g) => scan(g, boxes, diamonds),
            ModalFormula::And(a, b)
            | ModalFormula::Or(a, b)
            | ModalFormula::Implies(a, b) => {
                scan(a, boxes, diamonds);
                scan(b, boxes, diamonds);
            }
            ModalFormula::Box(g) => {
                *boxes = true;
                scan(g, boxes, diamonds);
            }
            ModalFormula::Diamond(g) => {
                *diamonds = true;
                scan(g, boxes, diamonds);
            }
        }
    }
    let nnf = to_nnf(f);
    let (mut boxes, mut diamonds) = (false, false);
    scan(&nnf, &mut boxes, &mut diamonds);
    match (boxes, diamonds) {
        (false, false) => Fragment::Propositional,
        (true, false) => Fragment::Box,
        (false, true) => Fragment::Diamond,
        (true, true) => Fragment::Mixed,
    }
}
