//! Language operations on Boolean-mode automata.
//!
//! All constructions work at the granularity of single faces — the atoms of
//! the face-set algebra — which makes them exact: a subset construction
//! determinizes, completion adds a sink over the uncovered faces, and
//! complement, union, intersection, and concatenation are the classical
//! constructions with face sets in place of alphabet symbols.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::simplex::{Face, FaceLattice, FaceSet};

use super::{Edge, Mfsa};

/// Remove ε-edges: each state gains the symbol-consuming edges of its
/// ε-closure and becomes final if its closure touches a final state.
/// Parallel supports between the same state pair are merged.
pub fn epsilon_removal(a: &Mfsa) -> Result<Mfsa> {
    a.require_boolean("epsilon removal")?;
    let n = a.num_states();
    let mut merged: BTreeMap<(usize, usize), FaceSet> = BTreeMap::new();
    let mut finals: BTreeSet<usize> = BTreeSet::new();
    for s in 0..n {
        let closure = a.eps_closure([s]);
        if closure.iter().any(|c| a.is_final(*c)) {
            finals.insert(s);
        }
        for e in a.edges() {
            if !closure.contains(&e.src) {
                continue;
            }
            if let Some(fs) = e.face_set() {
                match merged.get_mut(&(s, e.dst)) {
                    Some(existing) => *existing = existing.union(fs)?,
                    None => {
                        merged.insert((s, e.dst), fs.clone());
                    }
                }
            }
        }
    }
    let edges = merged
        .into_iter()
        .map(|((src, dst), fs)| Edge::face(src, dst, fs))
        .collect();
    Mfsa::new(
        a.k(),
        n,
        a.initial().collect(),
        finals.into_iter().map(|s| (s, 1.0)).collect(),
        edges,
    )
}

/// Powerset determinization.  States of the result are reachable subsets;
/// for each face appearing on an outgoing edge of the subset, the successor
/// is the ε-closure of everything that face can reach, and faces with the
/// same successor are grouped into one edge.  The result has one initial
/// state, no ε-edges, and pairwise-disjoint outgoing supports.
///
/// Weighted automata are rejected: grouping paths by subset discards
/// weight multiplicity.
pub fn determinize(a: &Mfsa) -> Result<Mfsa> {
    if !a.is_boolean() {
        return Err(Error::NotDeterminizable);
    }
    let start: Vec<usize> = a
        .eps_closure(a.initial().map(|(s, _)| s))
        .into_iter()
        .collect();
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut order: Vec<Vec<usize>> = Vec::new();
    ids.insert(start.clone(), 0);
    order.push(start);
    let mut edges: Vec<Edge> = Vec::new();
    let mut finals: Vec<(usize, f64)> = Vec::new();
    let mut next_to_visit = 0usize;
    while next_to_visit < order.len() {
        let subset = order[next_to_visit].clone();
        let sid = next_to_visit;
        next_to_visit += 1;
        if subset.iter().any(|&s| a.is_final(s)) {
            finals.push((sid, 1.0));
        }
        // Successor state set per face atom.
        let mut per_face: BTreeMap<u64, BTreeSet<usize>> = BTreeMap::new();
        for e in a.edges() {
            if !subset.contains(&e.src) {
                continue;
            }
            if let Some(fs) = e.face_set() {
                for f in fs.iter() {
                    per_face.entry(f.mask()).or_default().insert(e.dst);
                }
            }
        }
        // Group atoms with identical successor subsets into one edge.
        let mut grouped: BTreeMap<Vec<usize>, Vec<u64>> = BTreeMap::new();
        for (mask, raw) in per_face {
            let successor: Vec<usize> = a.eps_closure(raw).into_iter().collect();
            grouped.entry(successor).or_default().push(mask);
        }
        for (successor, masks) in grouped {
            let tid = match ids.get(&successor) {
                Some(&t) => t,
                None => {
                    let t = order.len();
                    ids.insert(successor.clone(), t);
                    order.push(successor);
                    t
                }
            };
            let faces = masks
                .into_iter()
                .map(|m| Face::from_mask(m).expect("masks come from valid faces"));
            edges.push(Edge::face(sid, tid, FaceSet::new(a.k(), faces)?));
        }
    }
    Mfsa::new(a.k(), order.len(), vec![(0, 1.0)], finals, edges)
}

/// Add a sink state so every face is consumable at every state.  Requires a
/// deterministic input and preserves the language; the output satisfies
/// [`Mfsa::is_complete`].
pub fn complete(a: &Mfsa) -> Result<Mfsa> {
    a.require_boolean("completion")?;
    if !a.is_deterministic() {
        return Err(Error::InvalidArgument(
            "completion requires a deterministic automaton".into(),
        ));
    }
    let lattice = FaceLattice::new(a.k())?;
    let full = FaceSet::full(a.k())?;
    debug_assert_eq!(lattice.len(), full.len());
    let n = a.num_states();
    let mut missing: Vec<FaceSet> = Vec::with_capacity(n);
    let mut any_missing = false;
    for s in 0..n {
        let mut covered = FaceSet::empty(a.k())?;
        for e in a.edges().iter().filter(|e| e.src == s) {
            covered = covered.union(e.face_set().expect("deterministic is epsilon-free"))?;
        }
        let m = full.difference(&covered)?;
        any_missing |= !m.is_empty();
        missing.push(m);
    }
    if !any_missing {
        return Ok(a.clone());
    }
    let sink = n;
    let mut edges = a.edges().to_vec();
    for (s, m) in missing.into_iter().enumerate() {
        if !m.is_empty() {
            edges.push(Edge::face(s, sink, m));
        }
    }
    edges.push(Edge::face(sink, sink, full));
    Mfsa::new(
        a.k(),
        n + 1,
        a.initial().collect(),
        a.finals().collect(),
        edges,
    )
}

/// Complement of the mixed language: determinize, complete with a sink,
/// then swap final and non-final states.
pub fn complement(a: &Mfsa) -> Result<Mfsa> {
    let complete_dfa = complete(&determinize(a)?)?;
    let finals: Vec<(usize, f64)> = (0..complete_dfa.num_states())
        .filter(|&s| !complete_dfa.is_final(s))
        .map(|s| (s, 1.0))
        .collect();
    Mfsa::new(
        complete_dfa.k(),
        complete_dfa.num_states(),
        complete_dfa.initial().collect(),
        finals,
        complete_dfa.edges().to_vec(),
    )
}

/// Union of the two mixed languages: juxtapose the automata, keep both
/// initial sets, and determinize.
pub fn union(a: &Mfsa, b: &Mfsa) -> Result<Mfsa> {
    a.check_same_k(b)?;
    a.require_boolean("union")?;
    b.require_boolean("union")?;
    let offset = a.num_states();
    let mut initial: Vec<(usize, f64)> = a.initial().collect();
    initial.extend(b.initial().map(|(s, w)| (s + offset, w)));
    let mut finals: Vec<(usize, f64)> = a.finals().collect();
    finals.extend(b.finals().map(|(s, w)| (s + offset, w)));
    let mut edges = a.edges().to_vec();
    edges.extend(b.edges().iter().map(|e| Edge {
        src: e.src + offset,
        dst: e.dst + offset,
        label: e.label.clone(),
        weight: e.weight,
    }));
    let merged = Mfsa::new(a.k(), offset + b.num_states(), initial, finals, edges)?;
    determinize(&merged)
}

/// Intersection of the two mixed languages via the product construction:
/// paired states, edge supports intersected face-set-wise.
pub fn intersection(a: &Mfsa, b: &Mfsa) -> Result<Mfsa> {
    a.check_same_k(b)?;
    a.require_boolean("intersection")?;
    b.require_boolean("intersection")?;
    let ea = epsilon_removal(a)?;
    let eb = epsilon_removal(b)?;
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    for (sa, _) in ea.initial() {
        for (sb, _) in eb.initial() {
            if !ids.contains_key(&(sa, sb)) {
                ids.insert((sa, sb), order.len());
                order.push((sa, sb));
            }
        }
    }
    let num_initial_pairs = order.len();
    let mut edges: Vec<Edge> = Vec::new();
    let mut finals: Vec<(usize, f64)> = Vec::new();
    let mut visit = 0usize;
    while visit < order.len() {
        let (sa, sb) = order[visit];
        let sid = visit;
        visit += 1;
        if ea.is_final(sa) && eb.is_final(sb) {
            finals.push((sid, 1.0));
        }
        for e1 in ea.edges().iter().filter(|e| e.src == sa) {
            let f1 = e1.face_set().expect("epsilon-free");
            for e2 in eb.edges().iter().filter(|e| e.src == sb) {
                let f2 = e2.face_set().expect("epsilon-free");
                let both = f1.intersection(f2)?;
                if both.is_empty() {
                    continue;
                }
                let pair = (e1.dst, e2.dst);
                let tid = match ids.get(&pair) {
                    Some(&t) => t,
                    None => {
                        let t = order.len();
                        ids.insert(pair, t);
                        order.push(pair);
                        t
                    }
                };
                edges.push(Edge::face(sid, tid, both));
            }
        }
    }
    let initial: Vec<(usize, f64)> = (0..num_initial_pairs).map(|i| (i, 1.0)).collect();
    let product = Mfsa::new(a.k(), order.len().max(1), initial, finals, edges)?;
    determinize(&product)
}

/// Concatenation: ε-edges from the finals of `a` to the initials of `b`,
/// then ε-removal and determinization.
pub fn concatenation(a: &Mfsa, b: &Mfsa) -> Result<Mfsa> {
    a.check_same_k(b)?;
    a.require_boolean("concatenation")?;
    b.require_boolean("concatenation")?;
    let offset = a.num_states();
    let mut edges = a.edges().to_vec();
    edges.extend(b.edges().iter().map(|e| Edge {
        src: e.src + offset,
        dst: e.dst + offset,
        label: e.label.clone(),
        weight: e.weight,
    }));
    for (f, _) in a.finals() {
        for (i, _) in b.initial() {
            edges.push(Edge::epsilon(f, i + offset));
        }
    }
    let merged = Mfsa::new(
        a.k(),
        offset + b.num_states(),
        a.initial().collect(),
        b.finals().map(|(s, w)| (s + offset, w)).collect(),
        edges,
    )?;
    determinize(&epsilon_removal(&merged)?)
}
