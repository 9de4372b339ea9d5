//! Families of winning coalitions and their filter/ultrafilter structure.
//!
//! A family over `n` agents is a set of coalitions, stored as a bitmask over
//! coalition indices: bit `c` is set when the coalition whose agent bitmask
//! is `c` belongs to the family. This supports `n <= 6` comfortably; the
//! enumeration entry points cap tighter.

use std::fmt;

use crate::graph::Coalition;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoalitionFamily {
    n: usize,
    members: u64,
}

impl CoalitionFamily {
    pub fn new(n: usize, members: u64) -> Self {
        assert!(n <= 6, "coalition families support at most 6 agents");
        let all = if 1usize << n == 64 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
        CoalitionFamily { n, members: members & all }
    }

    pub fn from_coalitions<I: IntoIterator<Item = Coalition>>(n: usize, coalitions: I) -> Self {
        let mut members = 0u64;
        for c in coalitions {
            members |= 1 << c.0;
        }
        CoalitionFamily::new(n, members)
    }

    /// All coalitions that contain `seed` (the principal family generated by
    /// it).
    pub fn principal(n: usize, seed: Coalition) -> Self {
        let mut members = 0u64;
        for c in 0..(1u32 << n) {
            if seed.0 & !c == 0 {
                members |= 1 << c;
            }
        }
        CoalitionFamily::new(n, members)
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    /// The raw membership bitmask; also the canonical index of the family.
    pub fn bit_pattern(&self) -> u64 {
        self.members
    }

    pub fn contains(&self, c: Coalition) -> bool {
        self.members >> c.0 & 1 == 1
    }

    pub fn len(&self) -> u32 {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn coalitions(&self) -> impl Iterator<Item = Coalition> + '_ {
        let members = self.members;
        (0..(1u32 << self.n)).filter(move |c| members >> c & 1 == 1).map(Coalition)
    }
}

impl fmt::Debug for CoalitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CoalitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coalitions().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Structural classification of a coalition family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyClass {
    pub is_filter: bool,
    pub is_ultrafilter: bool,
    /// Intersection of all members, when the family is a filter (it is then
    /// the principal generator).
    pub principal_generator: Option<Coalition>,
}

/// Tests the filter conditions (no empty coalition, closure under
/// intersection, closure under supersets) and the ultrafilter conditions
/// (no empty coalition, closure under intersection, maximality). The empty
/// family is vacuously closed but generates no oligarchy, so it is counted
/// as neither.
pub fn classify_family(w: &CoalitionFamily) -> FamilyClass {
    let n = w.agents();
    let no_empty = !w.contains(Coalition::EMPTY);
    let nonempty = !w.is_empty();

    let mut intersection_closed = true;
    'outer: for c1 in w.coalitions() {
        for c2 in w.coalitions() {
            if !w.contains(c1.intersection(c2)) {
                intersection_closed = false;
                break 'outer;
            }
        }
    }

    let mut superset_closed = true;
    'outer2: for c1 in w.coalitions() {
        for c2 in 0..(1u32 << n) {
            let c2 = Coalition(c2);
            if c1.is_subset(c2) && !w.contains(c2) {
                superset_closed = false;
                break 'outer2;
            }
        }
    }

    let maximal = (0..(1u32 << n)).all(|c| {
        let c = Coalition(c);
        w.contains(c) || w.contains(c.complement(n))
    });

    let is_filter = nonempty && no_empty && intersection_closed && superset_closed;
    let is_ultrafilter = no_empty && intersection_closed && maximal;
    let principal_generator = is_filter.then(|| {
        w.coalitions()
            .fold(Coalition::grand(n), |acc, c| acc.intersection(c))
    });

    FamilyClass { is_filter, is_ultrafilter, principal_generator }
}
