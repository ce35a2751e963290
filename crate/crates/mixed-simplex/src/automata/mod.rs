//! Finite-state automata whose transitions consume simplex points.
//!
//! A classical automaton reads symbols from a finite alphabet; the automata
//! here read *mixed strings* — sequences of points of Δ_{K−1}.  An edge
//! carries a [`FaceSet`] support, and a symbol can traverse the edge iff
//! the face containing the symbol belongs to that support:
//!
//! ```text
//! y traverses (s --S--> t)   iff   face_of(y) ∈ S
//! ```
//!
//! Because membership depends only on the face of each symbol, every
//! question about which strings are accepted reduces to a classical
//! automaton over face labels; this keeps determinization, Boolean closure
//! (complement/union/intersection/concatenation), and exact equivalence
//! decidable, which [`boolean`]-layer operations and [`classical`]-layer
//! extraction implement.  In the probability semiring, edges also carry
//! weights and emit points uniformly over their support's measure; the
//! [`weighted`] layer computes string weights and locally normalized
//! (stochastic) reweightings.
//!
//! Two derived views connect mixed strings back to classical languages:
//! the *skeleton* (the sequence of faces) and the *projections* (all pure
//! strings obtainable by picking one supported symbol per position).

mod boolean;
mod classical;
mod weighted;

pub use boolean::{
    complement, complete, concatenation, determinize, epsilon_removal, intersection, union,
};
pub use classical::{equivalent, projection_automaton, skeleton_automaton, Fsa};
pub use weighted::{string_weight, weight_push};

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{face_of, Face, FaceSet, SimplexPoint};
use crate::tol;

/// What an edge consumes: a region of the simplex, or nothing.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeLabel {
    /// Consumes one symbol whose face lies in the set.
    FaceSupport(FaceSet),
    /// Consumes no input.
    Epsilon,
}

/// One transition of an [`Mfsa`].
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: EdgeLabel,
    pub weight: f64,
}

impl Edge {
    /// Weight-1 symbol-consuming edge.
    pub fn face(src: usize, dst: usize, faces: FaceSet) -> Edge {
        Edge::face_weighted(src, dst, faces, 1.0)
    }

    pub fn face_weighted(src: usize, dst: usize, faces: FaceSet, weight: f64) -> Edge {
        Edge {
            src,
            dst,
            label: EdgeLabel::FaceSupport(faces),
            weight,
        }
    }

    /// Weight-1 edge consuming no input.
    pub fn epsilon(src: usize, dst: usize) -> Edge {
        Edge::epsilon_weighted(src, dst, 1.0)
    }

    pub fn epsilon_weighted(src: usize, dst: usize, weight: f64) -> Edge {
        Edge {
            src,
            dst,
            label: EdgeLabel::Epsilon,
            weight,
        }
    }

    /// The face-set support, if this is a symbol-consuming edge.
    pub fn face_set(&self) -> Option<&FaceSet> {
        match &self.label {
            EdgeLabel::FaceSupport(fs) => Some(fs),
            EdgeLabel::Epsilon => None,
        }
    }

    pub fn is_epsilon(&self) -> bool {
        matches!(self.label, EdgeLabel::Epsilon)
    }
}

/// A finite sequence of simplex points over a shared alphabet size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixedStringJson", into = "MixedStringJson")]
pub struct MixedString {
    k: u32,
    symbols: Vec<SimplexPoint>,
}

#[derive(Serialize, Deserialize)]
struct MixedStringJson {
    #[serde(rename = "K")]
    k: u32,
    symbols: Vec<SimplexPoint>,
}

impl TryFrom<MixedStringJson> for MixedString {
    type Error = Error;
    fn try_from(j: MixedStringJson) -> Result<Self> {
        MixedString::new(j.k, j.symbols)
    }
}

impl From<MixedString> for MixedStringJson {
    fn from(x: MixedString) -> Self {
        MixedStringJson {
            k: x.k,
            symbols: x.symbols,
        }
    }
}

impl MixedString {
    pub fn new(k: u32, symbols: Vec<SimplexPoint>) -> Result<Self> {
        if k == 0 || k > tol::HARD_MAX_K {
            return Err(Error::InvalidArgument(format!(
                "alphabet size {k} outside 1..={}",
                tol::HARD_MAX_K
            )));
        }
        for s in &symbols {
            if s.k() != k as usize {
                return Err(Error::AlphabetMismatch {
                    expected: k as usize,
                    got: s.k(),
                });
            }
        }
        Ok(MixedString { k, symbols })
    }

    /// The empty string over alphabet size `k`.
    pub fn empty(k: u32) -> Result<Self> {
        MixedString::new(k, Vec::new())
    }

    /// A pure string: each 1-based symbol index becomes a vertex point.
    pub fn from_pure(k: u32, symbols: &[u32]) -> Result<Self> {
        let points = symbols
            .iter()
            .map(|&s| {
                if s == 0 || s > k {
                    return Err(Error::InvalidArgument(format!(
                        "symbol {s} outside alphabet 1..={k}"
                    )));
                }
                SimplexPoint::vertex(k as usize, (s - 1) as usize)
            })
            .collect::<Result<Vec<_>>>()?;
        MixedString::new(k, points)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[SimplexPoint] {
        &self.symbols
    }
}

/// Automaton over mixed strings: weighted initial and final states, and
/// edges labeled with face-set supports or ε.
///
/// Boolean mode is the sub-case where every weight (initial, final, edge)
/// is exactly 1; language operations require it.  The probability-semiring
/// operations ([`string_weight`], [`weight_push`]) use the weights, with
/// each symbol-consuming edge emitting uniformly over its support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MfsaJson", into = "MfsaJson")]
pub struct Mfsa {
    k: u32,
    num_states: usize,
    initial: BTreeMap<usize, f64>,
    finals: BTreeMap<usize, f64>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct WeightedStateJson {
    state: usize,
    weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    src: usize,
    dst: usize,
    #[serde(default)]
    faces: Vec<Vec<u32>>,
    #[serde(default = "default_weight")]
    weight: f64,
    #[serde(default)]
    epsilon: bool,
}

#[derive(Serialize, Deserialize)]
struct MfsaJson {
    #[serde(rename = "K")]
    k: u32,
    states: usize,
    initial: Vec<WeightedStateJson>,
    #[serde(rename = "final")]
    finals: Vec<WeightedStateJson>,
    edges: Vec<EdgeJson>,
}

impl TryFrom<MfsaJson> for Mfsa {
    type Error = Error;
    fn try_from(j: MfsaJson) -> Result<Self> {
        let edges = j
            .edges
            .into_iter()
            .map(|e| {
                if e.epsilon {
                    if !e.faces.is_empty() {
                        return Err(Error::InvalidArgument(
                            "epsilon edge must not carry faces".into(),
                        ));
                    }
                    Ok(Edge::epsilon_weighted(e.src, e.dst, e.weight))
                } else {
                    let fs = FaceSet::from_index_lists(j.k, &e.faces)?;
                    Ok(Edge::face_weighted(e.src, e.dst, fs, e.weight))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Mfsa::new(
            j.k,
            j.states,
            j.initial.into_iter().map(|w| (w.state, w.weight)).collect(),
            j.finals.into_iter().map(|w| (w.state, w.weight)).collect(),
            edges,
        )
    }
}

impl From<Mfsa> for MfsaJson {
    fn from(a: Mfsa) -> Self {
        let weighted = |m: &BTreeMap<usize, f64>| {
            m.iter()
                .map(|(&state, &weight)| WeightedStateJson { state, weight })
                .collect()
        };
        MfsaJson {
            k: a.k,
            states: a.num_states,
            initial: weighted(&a.initial),
            finals: weighted(&a.finals),
            edges: a
                .edges
                .iter()
                .map(|e| EdgeJson {
                    src: e.src,
                    dst: e.dst,
                    faces: e
                        .face_set()
                        .map(|fs| fs.iter().map(|f| f.indices()).collect())
                        .unwrap_or_default(),
                    weight: e.weight,
                    epsilon: e.is_epsilon(),
                })
                .collect(),
        }
    }
}

impl Mfsa {
    /// Build an automaton, checking state bounds, weight domains, and that
    /// every face-set support shares the automaton's alphabet size.
    pub fn new(
        k: u32,
        num_states: usize,
        initial: Vec<(usize, f64)>,
        finals: Vec<(usize, f64)>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let cap = tol::automaton_cap();
        if k == 0 || k > cap {
            return Err(Error::KTooLarge {
                k: k as usize,
                cap: cap as usize,
                operation: "automaton construction",
            });
        }
        if num_states == 0 {
            return Err(Error::InvalidArgument(
                "automaton needs at least one state".into(),
            ));
        }
        let check_state = |s: usize| {
            if s >= num_states {
                Err(Error::InvalidArgument(format!(
                    "state {s} out of range 0..{num_states}"
                )))
            } else {
                Ok(())
            }
        };
        let check_weight = |w: f64| {
            if !(w.is_finite() && w >= 0.0) {
                Err(Error::InvalidArgument(format!(
                    "weights must be finite and non-negative, got {w}"
                )))
            } else {
                Ok(())
            }
        };
        let mut initial_map = BTreeMap::new();
        for (s, w) in initial {
            check_state(s)?;
            check_weight(w)?;
            if initial_map.insert(s, w).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate initial state {s}")));
            }
        }
        let mut final_map = BTreeMap::new();
        for (s, w) in finals {
            check_state(s)?;
            check_weight(w)?;
            if final_map.insert(s, w).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate final state {s}")));
            }
        }
        for e in &edges {
            check_state(e.src)?;
            check_state(e.dst)?;
            check_weight(e.weight)?;
            if let Some(fs) = e.face_set() {
                if fs.k() != k {
                    return Err(Error::AlphabetMismatch {
                        expected: k as usize,
                        got: fs.k() as usize,
                    });
                }
            }
        }
        Ok(Mfsa {
            k,
            num_states,
            initial: initial_map,
            finals: final_map,
            edges,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Initial states with their weights, in state order.
    pub fn initial(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.initial.iter().map(|(&s, &w)| (s, w))
    }

    /// Final states with their weights, in state order.
    pub fn finals(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.finals.iter().map(|(&s, &w)| (s, w))
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals.contains_key(&s)
    }

    pub fn initial_weight(&self, s: usize) -> f64 {
        self.initial.get(&s).copied().unwrap_or(0.0)
    }

    pub fn final_weight(&self, s: usize) -> f64 {
        self.finals.get(&s).copied().unwrap_or(0.0)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// True iff all initial, final, and edge weights are exactly 1 — the
    /// Boolean (unweighted language) mode all set operations require.
    pub fn is_boolean(&self) -> bool {
        self.initial.values().all(|&w| w == 1.0)
            && self.finals.values().all(|&w| w == 1.0)
            && self.edges.iter().all(|e| e.weight == 1.0)
    }

    pub(crate) fn require_boolean(&self, operation: &str) -> Result<()> {
        if self.is_boolean() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{operation} requires a Boolean-mode automaton (all weights 1)"
            )))
        }
    }

    /// True iff there is at most one initial state, no ε-edges, and the
    /// outgoing supports of every state are pairwise disjoint — each symbol
    /// then has at most one way forward.
    pub fn is_deterministic(&self) -> bool {
        if self.initial.len() > 1 {
            return false;
        }
        if self.edges.iter().any(Edge::is_epsilon) {
            return false;
        }
        for s in 0..self.num_states {
            let mut seen: BTreeSet<u64> = BTreeSet::new();
            for e in self.edges.iter().filter(|e| e.src == s) {
                let fs = e.face_set().expect("no epsilon edges here");
                for f in fs.iter() {
                    if !seen.insert(f.mask()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True iff deterministic and, at every state, the outgoing supports
    /// cover all 2^K − 1 faces — each symbol then has exactly one way
    /// forward.
    pub fn is_complete(&self) -> bool {
        if !self.is_deterministic() {
            return false;
        }
        let all = (1u128 << self.k) - 1; // number of non-empty faces
        for s in 0..self.num_states {
            let covered: usize = self
                .edges
                .iter()
                .filter(|e| e.src == s)
                .map(|e| e.face_set().expect("deterministic is epsilon-free").len())
                .sum();
            if (covered as u128) != all {
                return false;
            }
        }
        true
    }

    /// ε-closure of a state set (Boolean view: weights ignored).
    pub(crate) fn eps_closure(&self, seed: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut closure: BTreeSet<usize> = seed.into_iter().collect();
        let mut frontier: Vec<usize> = closure.iter().copied().collect();
        while let Some(s) = frontier.pop() {
            for e in self.edges.iter().filter(|e| e.src == s && e.is_epsilon()) {
                if closure.insert(e.dst) {
                    frontier.push(e.dst);
                }
            }
        }
        closure
    }

    pub(crate) fn check_same_k(&self, other: &Mfsa) -> Result<()> {
        if self.k != other.k {
            return Err(Error::AlphabetMismatch {
                expected: self.k as usize,
                got: other.k as usize,
            });
        }
        Ok(())
    }
}

/// Does the automaton accept the mixed string?  Each symbol is mapped to
/// its face (with tolerance `tol`) and simulated through all nondeterministic
/// paths at once; ε-edges consume nothing.
pub fn accepts(a: &Mfsa, x: &MixedString, tol: f64) -> Result<bool> {
    a.require_boolean("acceptance")?;
    if x.k() != a.k {
        return Err(Error::AlphabetMismatch {
            expected: a.k as usize,
            got: x.k() as usize,
        });
    }
    let mut current = a.eps_closure(a.initial.keys().copied());
    for symbol in x.symbols() {
        if current.is_empty() {
            return Ok(false);
        }
        let face = face_of(symbol, tol)?;
        let mut next = BTreeSet::new();
        for e in &a.edges {
            if current.contains(&e.src) {
                if let Some(fs) = e.face_set() {
                    if fs.contains(face) {
                        next.insert(e.dst);
                    }
                }
            }
        }
        current = a.eps_closure(next);
    }
    Ok(current.iter().any(|s| a.finals.contains_key(s)))
}

/// The face sequence of a mixed string.
pub fn skeleton_string(x: &MixedString, tol: f64) -> Result<Vec<Face>> {
    x.symbols().iter().map(|p| face_of(p, tol)).collect()
}

/// All pure strings obtained by choosing one supported symbol per position,
/// as 1-based symbol indices, in lexicographic order.  The enumeration is
/// refused when it would exceed [`tol::MAX_PROJECTIONS`] strings.
pub fn projection_string(x: &MixedString, tol: f64) -> Result<Vec<Vec<u32>>> {
    let supports: Vec<Vec<u32>> = skeleton_string(x, tol)?
        .into_iter()
        .map(|f| f.indices())
        .collect();
    let mut count: u128 = 1;
    for s in &supports {
        count = count.saturating_mul(s.len() as u128);
        if count > tol::MAX_PROJECTIONS as u128 {
            return Err(Error::TooManyProjections {
                count,
                limit: tol::MAX_PROJECTIONS,
            });
        }
    }
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for s in &supports {
        let mut grown = Vec::with_capacity(out.len() * s.len());
        for prefix in &out {
            for &sym in s {
                let mut next = prefix.clone();
                next.push(sym);
                grown.push(next);
            }
        }
        out = grown;
    }
    Ok(out)
}
