//! Kripke semantics: truth at a world, global truth, and frame validity,
//! evaluated set-wise over world bitmasks.

use std::sync::Arc;

use crate::graph::{successor_row, Graph, GraphError, VertexUniverse};
use crate::search::{CapExceeded, Caps};

use super::{Alphabet, ModalFormula};

/// Assignment of a world set to every atom of an alphabet.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Valuation {
    alphabet: Arc<Alphabet>,
    sets: Vec<u64>,
}

impl Valuation {
    pub fn new(alphabet: &Arc<Alphabet>, sets: Vec<u64>) -> Self {
        assert_eq!(sets.len(), alphabet.len(), "one world set per atom");
        Valuation { alphabet: Arc::clone(alphabet), sets }
    }

    /// Decodes a valuation index: atom `i` takes bits `i*v .. (i+1)*v`.
    /// Ascending indices enumerate the full valuation space canonically.
    pub fn from_index(alphabet: &Arc<Alphabet>, v: usize, index: u64) -> Self {
        let mask = if v >= 64 { u64::MAX } else { (1 << v) - 1 };
        let sets = (0..alphabet.len()).map(|i| (index >> (i * v)) & mask).collect();
        Valuation::new(alphabet, sets)
    }

    /// Builds a valuation from labelled world sets; atoms not mentioned get
    /// the empty set.
    pub fn from_labels(
        alphabet: &Arc<Alphabet>,
        universe: &VertexUniverse,
        assignments: &[(&str, Vec<&str>)],
    ) -> Result<Self, GraphError> {
        let mut sets = vec![0u64; alphabet.len()];
        for (atom, worlds) in assignments {
            let Some(i) = alphabet.index_of(atom) else {
                return Err(GraphError::UnknownLabel(atom.to_string()));
            };
            for w in worlds {
                sets[i] |= 1 << universe.require(w)?;
            }
        }
        Ok(Valuation::new(alphabet, sets))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn world_set(&self, atom: usize) -> u64 {
        self.sets[atom]
    }

    pub fn describe(&self, universe: &VertexUniverse) -> String {
        let parts: Vec<String> = self
            .alphabet
            .atoms()
            .enumerate()
            .map(|(i, a)| {
                let worlds: Vec<&str> = (0..universe.size())
                    .filter(|w| self.sets[i] >> w & 1 == 1)
                    .map(|w| universe.label(w))
                    .collect();
                format!("{a}={{{}}}", worlds.join(","))
            })
            .collect();
        parts.join(" ")
    }
}

/// A graph read as an accessibility relation, together with a valuation.
#[derive(Clone, Debug)]
pub struct KripkeModel {
    pub frame: Graph,
    pub valuation: Valuation,
}

impl KripkeModel {
    pub fn new(frame: Graph, valuation: Valuation) -> Self {
        let world_mask = frame.universe().vertex_mask();
        assert!(
            valuation.sets.iter().all(|s| s & !world_mask == 0),
            "valuation mentions worlds outside the frame"
        );
        KripkeModel { frame, valuation }
    }
}

/// Worlds of the model at which the formula is true, as a bitmask.
/// Diamond looks for a successor inside the argument's world set; box
/// checks that all successors are inside it.
pub fn sat_worlds(edges: u64, v: usize, valuation_sets: &[u64], f: &ModalFormula) -> u64 {
    let full = if v >= 64 { u64::MAX } else { (1u64 << v) - 1 };
    match f {
        ModalFormula::Atom(i) => valuation_sets[*i],
        ModalFormula::Not(g) => full & !sat_worlds(edges, v, valuation_sets, g),
        ModalFormula::And(a, b) => {
            sat_worlds(edges, v, valuation_sets, a) & sat_worlds(edges, v, valuation_sets, b)
        }
        ModalFormula::Or(a, b) => {
            sat_worlds(edges, v, valuation_sets, a) | sat_worlds(edges, v, valuation_sets, b)
        }
        ModalFormula::Implies(a, b) => {
            (full & !sat_worlds(edges, v, valuation_sets, a))
                | sat_worlds(edges, v, valuation_sets, b)
        }
        ModalFormula::Diamond(g) => {
            let s = sat_worlds(edges, v, valuation_sets, g);
            let mut out = 0u64;
            for x in 0..v {
                if successor_row(edges, v, x) & s != 0 {
                    out |= 1 << x;
                }
            }
            out
        }
        ModalFormula::Box(g) => {
            let s = sat_worlds(edges, v, valuation_sets, g);
            let mut out = 0u64;
            for x in 0..v {
                if successor_row(edges, v, x) & !s & full == 0 {
                    out |= 1 << x;
                }
            }
            out
        }
    }
}

pub fn satisfying_worlds(model: &KripkeModel, f: &ModalFormula) -> u64 {
    sat_worlds(
        model.frame.edge_mask(),
        model.frame.universe().size(),
        model.valuation.sets(),
        f,
    )
}

pub fn truth_at(model: &KripkeModel, world: usize, f: &ModalFormula) -> bool {
    assert!(world < model.frame.universe().size(), "unknown world");
    satisfying_worlds(model, f) >> world & 1 == 1
}

pub fn globally_true(model: &KripkeModel, f: &ModalFormula) -> bool {
    satisfying_worlds(model, f) == model.frame.universe().vertex_mask()
}

/// Frame validity: global truth under every valuation of the alphabet.
/// The valuation space has `2^(|atoms| * |V|)` elements and is capped.
pub fn frame_valid(
    frame: &Graph,
    f: &ModalFormula,
    alphabet: &Arc<Alphabet>,
    caps: &Caps,
) -> Result<bool, CapExceeded> {
    let v = frame.universe().size();
    let count = valuation_space(alphabet, v, caps)?;
    let full = frame.universe().vertex_mask();
    let edges = frame.edge_mask();
    let mut sets = vec![0u64; alphabet.len()];
    for index in 0..count {
        for (i, s) in sets.iter_mut().enumerate() {
            *s = (index >> (i * v)) & full;
        }
        if sat_worlds(edges, v, &sets, f) != full {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checked size of the valuation space `2^(|atoms| * |V|)`.
pub fn valuation_space(
    alphabet: &Alphabet,
    v: usize,
    caps: &Caps,
) -> Result<u64, CapExceeded> {
    let bits = alphabet.len() as u32 * v as u32;
    let size: u128 = 1u128 << bits.min(127);
    if bits >= 63 || size > caps.max_valuations as u128 {
        return Err(CapExceeded::new(
            "valuation space",
            size,
            caps.max_valuations as u128,
            "fewer atoms or worlds, or raise --max-valuations",
        ));
    }
    Ok(1u64 << bits)
}
