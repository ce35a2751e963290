//! Classical finite-state machinery over an opaque label alphabet.
//!
//! Whether a mixed string is accepted depends only on its skeleton — the
//! sequence of faces its symbols lie on.  Relabeling each edge by the faces
//! it supports therefore turns language questions about automata over the
//! simplex into ordinary regular-language questions, which [`Fsa`] answers
//! exactly: determinize, complete, minimize, and compare canonical forms.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

use super::{epsilon_removal, Mfsa};

/// An unweighted finite automaton over `u64` labels.
///
/// Labels are opaque: callers decide whether a label is a face bitmask, a
/// vertex index, or anything else.  No ε-transitions; build them out before
/// constructing (see [`epsilon_removal`] for the weighted source).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fsa {
    num_states: usize,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
    edges: BTreeSet<(usize, u64, usize)>,
}

impl Fsa {
    /// Build an automaton, checking state bounds.
    pub fn new(
        num_states: usize,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, u64, usize)>,
    ) -> Result<Self> {
        let initial: BTreeSet<usize> = initial.into_iter().collect();
        let finals: BTreeSet<usize> = finals.into_iter().collect();
        let edges: BTreeSet<(usize, u64, usize)> = edges.into_iter().collect();
        let check = |s: usize| -> Result<()> {
            if s >= num_states {
                Err(Error::InvalidArgument(format!(
                    "state {s} out of bounds for {num_states} states"
                )))
            } else {
                Ok(())
            }
        };
        for &s in initial.iter().chain(finals.iter()) {
            check(s)?;
        }
        for &(s, _, t) in &edges {
            check(s)?;
            check(t)?;
        }
        Ok(Self {
            num_states,
            initial,
            finals,
            edges,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// All labels that appear on some edge.
    pub fn labels(&self) -> BTreeSet<u64> {
        self.edges.iter().map(|&(_, l, _)| l).collect()
    }

    pub fn initial(&self) -> impl Iterator<Item = usize> + '_ {
        self.initial.iter().copied()
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        self.finals.iter().copied()
    }

    /// Edges as `(src, label, dst)` triples in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, u64, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Subset simulation: does the automaton accept this label sequence?
    pub fn accepts(&self, labels: &[u64]) -> bool {
        let mut current = self.initial.clone();
        for &l in labels {
            let mut next = BTreeSet::new();
            for &(s, el, t) in &self.edges {
                if el == l && current.contains(&s) {
                    next.insert(t);
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|s| self.finals.contains(s))
    }

    /// True when there is at most one initial state and no two edges leave
    /// the same state with the same label.
    pub fn is_deterministic(&self) -> bool {
        if self.initial.len() > 1 {
            return false;
        }
        let mut seen = BTreeSet::new();
        for &(s, l, _) in &self.edges {
            if !seen.insert((s, l)) {
                return false;
            }
        }
        true
    }

    /// Subset construction.  The result is deterministic and reachable,
    /// possibly partial (missing transitions mean rejection).
    pub fn determinize(&self) -> Fsa {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut order: Vec<Vec<usize>> = Vec::new();
        let start: Vec<usize> = self.initial.iter().copied().collect();
        ids.insert(start.clone(), 0);
        order.push(start);
        let mut edges = BTreeSet::new();
        let mut i = 0;
        while i < order.len() {
            let subset = order[i].clone();
            let mut per_label: BTreeMap<u64, BTreeSet<usize>> = BTreeMap::new();
            for &(s, l, t) in &self.edges {
                if subset.binary_search(&s).is_ok() {
                    per_label.entry(l).or_default().insert(t);
                }
            }
            for (l, succ) in per_label {
                let key: Vec<usize> = succ.into_iter().collect();
                let id = *ids.entry(key.clone()).or_insert_with(|| {
                    order.push(key);
                    order.len() - 1
                });
                edges.insert((i, l, id));
            }
            i += 1;
        }
        let finals: BTreeSet<usize> = order
            .iter()
            .enumerate()
            .filter(|(_, subset)| subset.iter().any(|s| self.finals.contains(s)))
            .map(|(i, _)| i)
            .collect();
        Fsa {
            num_states: order.len(),
            initial: BTreeSet::from([0]),
            finals,
            edges,
        }
    }

    /// Add a sink so every state has an edge for every label in `alphabet`.
    /// Requires a deterministic machine; the result stays deterministic.
    fn complete_over(&self, alphabet: &BTreeSet<u64>) -> Fsa {
        debug_assert!(self.is_deterministic());
        let mut missing: Vec<(usize, u64)> = Vec::new();
        let present: BTreeSet<(usize, u64)> =
            self.edges.iter().map(|&(s, l, _)| (s, l)).collect();
        for s in 0..self.num_states {
            for &l in alphabet {
                if !present.contains(&(s, l)) {
                    missing.push((s, l));
                }
            }
        }
        if missing.is_empty() && !self.initial.is_empty() {
            return self.clone();
        }
        let sink = self.num_states;
        let mut edges = self.edges.clone();
        for (s, l) in missing {
            edges.insert((s, l, sink));
        }
        for &l in alphabet {
            edges.insert((sink, l, sink));
        }
        let initial = if self.initial.is_empty() {
            BTreeSet::from([sink])
        } else {
            self.initial.clone()
        };
        Fsa {
            num_states: self.num_states + 1,
            initial,
            finals: self.finals.clone(),
            edges,
        }
    }

    /// Hopcroft-style canonical form over the given alphabet: determinize,
    /// complete, drop unreachable states, merge behaviorally equivalent
    /// ones (Moore refinement), then rename states in breadth-first order
    /// with labels sorted.  Two machines recognize the same language over
    /// `alphabet` iff their canonical forms are structurally equal.
    fn canonical_over(&self, alphabet: &BTreeSet<u64>) -> Fsa {
        let dfa = self.determinize().complete_over(alphabet);
        // Reachability (determinize already prunes, but the sink logic and
        // empty-initial edge cases are easier to reason about re-pruned).
        let mut reach = vec![false; dfa.num_states];
        let mut queue: VecDeque<usize> = dfa.initial.iter().copied().collect();
        for &s in &dfa.initial {
            reach[s] = true;
        }
        while let Some(s) = queue.pop_front() {
            for &(src, _, dst) in &dfa.edges {
                if src == s && !reach[dst] {
                    reach[dst] = true;
                    queue.push_back(dst);
                }
            }
        }
        // Moore partition refinement on the complete DFA.
        let labels: Vec<u64> = alphabet.iter().copied().collect();
        let mut step: HashMap<(usize, u64), usize> = HashMap::new();
        for &(s, l, t) in &dfa.edges {
            step.insert((s, l), t);
        }
        let mut class = vec![0usize; dfa.num_states];
        for s in 0..dfa.num_states {
            class[s] = usize::from(dfa.finals.contains(&s));
        }
        loop {
            let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0usize; dfa.num_states];
            for s in 0..dfa.num_states {
                if !reach[s] {
                    continue;
                }
                let sig: Vec<usize> = labels.iter().map(|&l| class[step[&(s, l)]]).collect();
                let id = sig_ids.len();
                next[s] = *sig_ids.entry((class[s], sig)).or_insert(id);
            }
            let changed = (0..dfa.num_states).any(|s| reach[s] && next[s] != class[s]);
            class = next;
            if !changed {
                break;
            }
        }
        // Quotient, then canonical BFS renaming (deterministic because the
        // alphabet iteration order is sorted).
        let root = class[*dfa.initial.iter().next().expect("complete DFA has an initial state")];
        let mut rename: HashMap<usize, usize> = HashMap::new();
        rename.insert(root, 0);
        let mut bfs = VecDeque::from([root]);
        let mut edges = BTreeSet::new();
        let mut finals = BTreeSet::new();
        let mut visited = BTreeSet::from([root]);
        // Representative state per class for stepping.
        let mut rep: HashMap<usize, usize> = HashMap::new();
        for s in (0..dfa.num_states).rev() {
            if reach[s] {
                rep.insert(class[s], s);
            }
        }
        while let Some(c) = bfs.pop_front() {
            let s = rep[&c];
            if dfa.finals.contains(&s) {
                finals.insert(rename[&c]);
            }
            for &l in &labels {
                let tc = class[step[&(s, l)]];
                if visited.insert(tc) {
                    rename.insert(tc, rename.len());
                    bfs.push_back(tc);
                }
                edges.insert((rename[&c], l, rename[&tc]));
            }
        }
        Fsa {
            num_states: rename.len(),
            initial: BTreeSet::from([0]),
            finals,
            edges,
        }
    }

    /// Exact language equality, decided over the union of both machines'
    /// label sets.
    pub fn equivalent(a: &Fsa, b: &Fsa) -> bool {
        let alphabet: BTreeSet<u64> = a.labels().union(&b.labels()).copied().collect();
        if alphabet.is_empty() {
            // No edges anywhere: both languages are subsets of {ε}.
            let ea = a.initial.iter().any(|s| a.finals.contains(s));
            let eb = b.initial.iter().any(|s| b.finals.contains(s));
            return ea == eb;
        }
        a.canonical_over(&alphabet) == b.canonical_over(&alphabet)
    }
}

/// Relabel each edge by the faces it supports, one classical edge per face.
///
/// Acceptance of a mixed string by the source automaton depends only on
/// which faces its symbols lie on, so the result accepts exactly the
/// skeletons (as face bitmask sequences) of accepted strings.
pub fn skeleton_automaton(a: &Mfsa) -> Result<Fsa> {
    a.require_boolean("skeleton extraction")?;
    let e = epsilon_removal(a)?;
    let mut edges = BTreeSet::new();
    for edge in e.edges() {
        if let Some(fs) = edge.face_set() {
            for face in fs.iter() {
                edges.insert((edge.src, face.mask(), edge.dst));
            }
        }
    }
    let fsa = Fsa::new(
        e.num_states(),
        e.initial().map(|(s, _)| s),
        e.finals().map(|(s, _)| s),
        edges,
    )?;
    Ok(fsa.determinize())
}

/// Relabel each edge by the vertex indices (1-based) of the faces it
/// supports: the automaton of pure-symbol projections of accepted strings.
pub fn projection_automaton(a: &Mfsa) -> Result<Fsa> {
    a.require_boolean("projection extraction")?;
    let e = epsilon_removal(a)?;
    let mut edges = BTreeSet::new();
    for edge in e.edges() {
        if let Some(fs) = edge.face_set() {
            let mut symbols = BTreeSet::new();
            for face in fs.iter() {
                symbols.extend(face.indices());
            }
            for sym in symbols {
                edges.insert((edge.src, sym as u64, edge.dst));
            }
        }
    }
    let fsa = Fsa::new(
        e.num_states(),
        e.initial().map(|(s, _)| s),
        e.finals().map(|(s, _)| s),
        edges,
    )?;
    Ok(fsa.determinize())
}

/// Exact language equivalence of two Boolean-mode automata.
///
/// Membership of a mixed string is a function of its skeleton alone, so the
/// mixed languages are equal iff the skeleton languages are — a decidable
/// classical question, answered with no sampling and no tolerance.
pub fn equivalent(a: &Mfsa, b: &Mfsa) -> Result<bool> {
    a.check_same_k(b)?;
    a.require_boolean("equivalence")?;
    b.require_boolean("equivalence")?;
    Ok(Fsa::equivalent(&skeleton_automaton(a)?, &skeleton_automaton(b)?))
}

/// Test helper: lift a classical automaton over labels `1..=k` into a
/// mixed automaton whose edges support exactly the matching vertex faces.
#[cfg(test)]
pub(crate) fn embed_pure(fsa: &Fsa, k: u32) -> Mfsa {
    use crate::simplex::{Face, FaceSet};
    let edges = fsa
        .edges
        .iter()
        .map(|&(s, l, t)| {
            let face = Face::singleton(l as usize - 1);
            super::Edge::face(s, t, FaceSet::new(k, [face]).unwrap())
        })
        .collect();
    Mfsa::new(
        k,
        fsa.num_states,
        fsa.initial.iter().map(|&s| (s, 1.0)).collect(),
        fsa.finals.iter().map(|&s| (s, 1.0)).collect(),
        edges,
    )
    .unwrap()
}
