//! Shared oracles for the integration suites.
//!
//! Everything here recomputes a quantity the library also computes, by a
//! deliberately different algorithm: quadrature instead of closed forms,
//! bisection or grid search instead of sort-based thresholds, brute-force
//! path and subset enumeration instead of algebraic constructions.  Tests
//! compare the two routes; nothing here calls the code path it checks.

#![allow(dead_code)] // each integration test binary uses a subset

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mixed_simplex::automata::{Edge, MixedString, Mfsa};
use mixed_simplex::{Face, FaceSet, SimplexPoint};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute accuracy
/// about `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

// ---------------------------------------------------------------------------
// Normal distribution, by quadrature of the density (no erf)
// ---------------------------------------------------------------------------

pub fn normal_pdf_oracle(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF via quadrature from 0, accurate to ~1e-13.
pub fn normal_cdf_oracle(x: f64) -> f64 {
    if x < -10.0 {
        return 0.0;
    }
    if x > 10.0 {
        return 1.0;
    }
    0.5 + integrate(normal_pdf_oracle, 0.0, x, 1e-14)
}

// ---------------------------------------------------------------------------
// Euclidean projection onto the simplex (two independent QP algorithms)
// ---------------------------------------------------------------------------

/// Projection by bisecting the dual variable: the unique τ with
/// Σ max(z_i − τ, 0) = 1 lies in [max z − 1, max z]; the map is continuous
/// and non-increasing, so plain bisection needs no sorting and no
/// closed-form threshold rule.
pub fn project_simplex_bisection(z: &[f64]) -> Vec<f64> {
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = zmax - 1.0;
    let mut hi = zmax;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let s: f64 = z.iter().map(|&v| (v - mid).max(0.0)).sum();
        if s >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    z.iter().map(|&v| (v - tau).max(0.0)).collect()
}

/// Projection by Dykstra's alternating projections between the affine
/// hyperplane {Σx = 1} and the non-negative orthant.  Slow but entirely
/// different machinery; used as a spot check.
pub fn project_simplex_dykstra(z: &[f64], iterations: usize) -> Vec<f64> {
    let k = z.len() as f64;
    let mut x: Vec<f64> = z.to_vec();
    let mut p = vec![0.0; z.len()];
    let mut q = vec![0.0; z.len()];
    for _ in 0..iterations {
        // Project x + p onto the hyperplane.
        let v: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let shift = (1.0 - v.iter().sum::<f64>()) / k;
        let y: Vec<f64> = v.iter().map(|a| a + shift).collect();
        for i in 0..p.len() {
            p[i] = v[i] - y[i];
        }
        // Project y + q onto the orthant.
        let w: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        x = w.iter().map(|a| a.max(0.0)).collect();
        for i in 0..q.len() {
            q[i] = w[i] - x[i];
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Entmax threshold by staged grid search
// ---------------------------------------------------------------------------

/// Solve Σ [(α−1)(z_i − t)]₊^{1/(α−1)} = 1 for t by repeatedly refining a
/// uniform grid over the bracket below max z, then report the closed-form
/// threshold τ = t + 1/(α−1).  No bisection logic is shared with the
/// library implementation.
pub fn entmax_tau_grid(z: &[f64], alpha: f64) -> f64 {
    let am1 = alpha - 1.0;
    let inv = 1.0 / am1;
    let s = |t: f64| -> f64 {
        z.iter()
            .map(|&zi| {
                let base = am1 * (zi - t);
                if base > 0.0 {
                    base.powf(inv)
                } else {
                    0.0
                }
            })
            .sum()
    };
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = zmax - inv;
    let mut hi = zmax;
    const CELLS: usize = 4096;
    while hi - lo > 1e-10 {
        let step = (hi - lo) / CELLS as f64;
        if step == 0.0 {
            break;
        }
        // Find the first grid point where the decreasing sum falls below 1.
        let mut crossing = CELLS;
        for i in 1..=CELLS {
            if s(lo + step * i as f64) < 1.0 {
                crossing = i;
                break;
            }
        }
        let new_lo = lo + step * (crossing - 1) as f64;
        let new_hi = lo + step * crossing as f64;
        if new_hi - new_lo >= hi - lo {
            break;
        }
        lo = new_lo;
        hi = new_hi;
    }
    0.5 * (lo + hi) + inv
}

// ---------------------------------------------------------------------------
// Maximum entropy over faces by composition-grid search
// ---------------------------------------------------------------------------

fn ln_factorial(n: u32) -> f64 {
    (1..=n as u64).map(|i| (i as f64).ln()).sum()
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Best achievable coding entropy over distributions that are uniform
/// within each face-dimension class, by grid search over class masses.
///
/// The full objective (face entropy plus per-face flat entropy plus N bits
/// per dimension) is concave and symmetric under vertex permutations, so
/// its maximum is attained at a class-symmetric distribution; the grid
/// therefore only needs the K class masses.  Two refinement stages around
/// the coarse argmax give ~1e-5 resolution.
pub fn maxent_value_grid(k: u32, n_bits: u32) -> f64 {
    // Per-class score: a face with j vertices contributes
    // ln C(K, j) (count), −ln (j−1)! (flat entropy), N (j−1) ln 2 (coding).
    let score: Vec<f64> = (1..=k)
        .map(|j| {
            ln_binomial(k, j) + n_bits as f64 * (j - 1) as f64 * std::f64::consts::LN_2
                - ln_factorial(j - 1)
        })
        .collect();
    let objective = |m: &[f64]| -> f64 {
        m.iter()
            .zip(&score)
            .map(|(&mi, &si)| if mi > 0.0 { mi * (si - mi.ln()) } else { 0.0 })
            .sum()
    };
    // Stage 1: compositions of M over k parts.
    let mut best = f64::NEG_INFINITY;
    let mut best_m = vec![0.0; k as usize];
    let m_cells: u32 = match k {
        0..=2 => 4000,
        3 => 400,
        _ => 120,
    };
    let mut counts = vec![0u32; k as usize];
    enumerate_compositions(m_cells, k as usize, &mut counts, &mut |c| {
        let m: Vec<f64> = c.iter().map(|&x| x as f64 / m_cells as f64).collect();
        let v = objective(&m);
        if v > best {
            best = v;
            best_m = m;
        }
    });
    // Stage 2: local box refinement around the winner.
    let mut width = 2.0 / m_cells as f64;
    for _ in 0..3 {
        let steps = 24;
        let mut improved = best_m.clone();
        refine_box(&best_m, width, steps, &mut |m| {
            let v = objective(m);
            if v > best {
                best = v;
                improved = m.to_vec();
            }
        });
        best_m = improved;
        width /= steps as f64 / 4.0;
    }
    best
}

fn enumerate_compositions(total: u32, parts: usize, scratch: &mut [u32], f: &mut impl FnMut(&[u32])) {
    if parts == 1 {
        scratch[scratch.len() - 1] = total;
        f(scratch);
        return;
    }
    let idx = scratch.len() - parts;
    for v in 0..=total {
        scratch[idx] = v;
        enumerate_compositions(total - v, parts - 1, scratch, f);
    }
}

/// Walk a small grid in the probability simplex around `center`, moving
/// mass between coordinate pairs in steps of `width / steps`.
fn refine_box(center: &[f64], width: f64, steps: usize, f: &mut impl FnMut(&[f64])) {
    let k = center.len();
    let delta = width / steps as f64;
    let mut m = center.to_vec();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            for s in 1..=steps {
                let d = delta * s as f64;
                if center[i] - d < 0.0 {
                    break;
                }
                m.copy_from_slice(center);
                m[i] -= d;
                m[j] += d;
                f(&m);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo helpers
// ---------------------------------------------------------------------------

pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

/// Sample mean and its standard error.
pub fn mean_se(samples: &[f64]) -> MeanSe {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    MeanSe {
        mean,
        se: (var / n).sqrt(),
    }
}

/// Standard error of a binomial proportion.
pub fn proportion_se(p_hat: f64, n: u64) -> f64 {
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Faces and strings
// ---------------------------------------------------------------------------

/// All non-empty faces of the (K−1)-simplex, by direct bitmask counting.
pub fn all_faces(k: u32) -> Vec<Face> {
    (1u64..(1u64 << k))
        .map(|mask| {
            let indices: Vec<u32> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            Face::from_indices(&indices).unwrap()
        })
        .collect()
}

/// The barycenter of a face: a canonical point in its relative interior.
pub fn face_representative(face: Face, k: u32) -> SimplexPoint {
    let mut coords = vec![0.0; k as usize];
    let members: Vec<usize> = face.coord_positions().collect();
    let w = 1.0 / members.len() as f64;
    for i in members {
        coords[i] = w;
    }
    SimplexPoint::new(coords).unwrap()
}

/// A mixed string whose symbols are the barycenters of the given faces.
pub fn string_of_faces(k: u32, faces: &[Face]) -> MixedString {
    MixedString::new(
        k,
        faces.iter().map(|&f| face_representative(f, k)).collect(),
    )
    .unwrap()
}

/// Every face string of length ≤ `max_len` over all faces of Δ_{K−1}.
pub fn all_face_strings(k: u32, max_len: usize) -> Vec<Vec<Face>> {
    let faces = all_faces(k);
    let mut out: Vec<Vec<Face>> = vec![vec![]];
    let mut frontier: Vec<Vec<Face>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &f in &faces {
                let mut t = s.clone();
                t.push(f);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

// ---------------------------------------------------------------------------
// Independent classical automaton (for equivalence oracles)
// ---------------------------------------------------------------------------

/// A plain NFA over u64 labels, with its own subset construction and a
/// product-reachability equivalence check — shares no code with the
/// library's canonical-minimal-form approach.
pub struct OracleFsa {
    pub num_states: usize,
    pub initial: BTreeSet<usize>,
    pub finals: BTreeSet<usize>,
    pub delta: BTreeMap<(usize, u64), BTreeSet<usize>>,
}

impl OracleFsa {
    /// Skeleton NFA of a Boolean-mode mixed automaton: ε-closure done here
    /// (independently of the library's ε-removal), one labeled edge per
    /// face in each support.
    pub fn skeleton_of(a: &Mfsa) -> OracleFsa {
        assert!(a.is_boolean(), "oracle skeleton needs Boolean mode");
        let n = a.num_states();
        // ε-closure by fixed-point iteration.
        let mut closure: Vec<BTreeSet<usize>> = (0..n).map(|s| BTreeSet::from([s])).collect();
        let eps: Vec<(usize, usize)> = a
            .edges()
            .iter()
            .filter(|e| e.is_epsilon())
            .map(|e| (e.src, e.dst))
            .collect();
        loop {
            let mut changed = false;
            for &(s, t) in &eps {
                let add: Vec<usize> = closure[t].iter().copied().collect();
                for u in add {
                    if closure[s].insert(u) {
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut delta: BTreeMap<(usize, u64), BTreeSet<usize>> = BTreeMap::new();
        for e in a.edges() {
            if let Some(fs) = e.face_set() {
                for face in fs.iter() {
                    // src's closure can start the edge; dst's closure is reached.
                    for s in 0..n {
                        if closure[s].contains(&e.src) {
                            delta
                                .entry((s, face.mask()))
                                .or_default()
                                .extend(closure[e.dst].iter().copied());
                        }
                    }
                }
            }
        }
        let finals: BTreeSet<usize> = (0..n)
            .filter(|&s| closure[s].iter().any(|t| a.final_weight(*t) > 0.0))
            .collect();
        OracleFsa {
            num_states: n,
            initial: a.initial().map(|(s, _)| s).collect(),
            finals,
            delta,
        }
    }

    pub fn accepts(&self, labels: &[u64]) -> bool {
        let mut current = self.initial.clone();
        for &l in labels {
            let mut next = BTreeSet::new();
            for &s in &current {
                if let Some(ts) = self.delta.get(&(s, l)) {
                    next.extend(ts.iter().copied());
                }
            }
            current = next;
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|s| self.finals.contains(s))
    }

    /// Deterministic transition table over `alphabet` via subset
    /// construction, with the empty subset as an explicit dead state.
    fn subset_table(&self, alphabet: &[u64]) -> (Vec<Vec<usize>>, Vec<bool>, usize) {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut order: Vec<Vec<usize>> = Vec::new();
        let start: Vec<usize> = self.initial.iter().copied().collect();
        ids.insert(start.clone(), 0);
        order.push(start);
        let mut table: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let subset = order[i].clone();
            let mut row = Vec::with_capacity(alphabet.len());
            for &l in alphabet {
                let mut succ: BTreeSet<usize> = BTreeSet::new();
                for &s in &subset {
                    if let Some(ts) = self.delta.get(&(s, l)) {
                        succ.extend(ts.iter().copied());
                    }
                }
                let key: Vec<usize> = succ.into_iter().collect();
                let id = *ids.entry(key.clone()).or_insert_with(|| {
                    order.push(key);
                    order.len() - 1
                });
                row.push(id);
            }
            table.push(row);
            i += 1;
        }
        let accepting: Vec<bool> = order
            .iter()
            .map(|subset| subset.iter().any(|s| self.finals.contains(s)))
            .collect();
        (table, accepting, 0)
    }

    /// Language equality by breadth-first search over the product of the
    /// two subset automata: a reachable pair with disagreeing acceptance
    /// is a counterexample.
    pub fn equivalent(a: &OracleFsa, b: &OracleFsa) -> bool {
        let alphabet: Vec<u64> = a
            .delta
            .keys()
            .chain(b.delta.keys())
            .map(|&(_, l)| l)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let (ta, fa, sa) = a.subset_table(&alphabet);
        let (tb, fb, sb) = b.subset_table(&alphabet);
        let mut seen = BTreeSet::from([(sa, sb)]);
        let mut queue = VecDeque::from([(sa, sb)]);
        while let Some((x, y)) = queue.pop_front() {
            if fa[x] != fb[y] {
                return false;
            }
            for li in 0..alphabet.len() {
                let next = (ta[x][li], tb[y][li]);
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        true
    }

    /// Is the accepted language empty? (No final subset reachable.)
    pub fn is_empty_language(&self) -> bool {
        let alphabet: Vec<u64> = self
            .delta
            .keys()
            .map(|&(_, l)| l)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let (table, accepting, start) = self.subset_table(&alphabet);
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            if accepting[s] {
                return false;
            }
            for &t in &table[s] {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Brute-force path enumeration for weighted automata
// ---------------------------------------------------------------------------

/// Total accepting-path weight of an ε-free weighted automaton on a face
/// string, by enumerating every state sequence of length L+1.
pub fn path_enumeration_weight(a: &Mfsa, faces: &[Face]) -> f64 {
    assert!(
        a.edges().iter().all(|e| !e.is_epsilon()),
        "path enumeration oracle is for epsilon-free automata"
    );
    let n = a.num_states();
    let l = faces.len();
    // Edge factors per (src, dst, position): weight / measure if the face
    // at that position is in the support.
    let mut total = 0.0;
    let mut stack: Vec<(usize, usize, f64)> = (0..n)
        .filter_map(|s| {
            let w = a.initial_weight(s);
            (w > 0.0).then_some((s, 0, w))
        })
        .collect();
    while let Some((state, pos, acc)) = stack.pop() {
        if pos == l {
            total += acc * a.final_weight(state);
            continue;
        }
        for e in a.edges() {
            if e.src != state {
                continue;
            }
            if let Some(fs) = e.face_set() {
                if fs.contains(faces[pos]) {
                    stack.push((e.dst, pos + 1, acc * e.weight / fs.measure()));
                }
            }
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Random generators (seeded; oracle-side randomness only)
// ---------------------------------------------------------------------------

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_logits(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> Vec<f64> {
    (0..k).map(|_| (rng.gen::<f64>() - 0.5) * 2.0 * scale).collect()
}

pub fn random_face(rng: &mut ChaCha8Rng, k: u32) -> Face {
    let mask = rng.gen_range(1..(1u64 << k));
    let indices: Vec<u32> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
    Face::from_indices(&indices).unwrap()
}

pub fn random_face_set(rng: &mut ChaCha8Rng, k: u32) -> FaceSet {
    let all = all_faces(k);
    let faces: Vec<Face> = all
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    if faces.is_empty() {
        FaceSet::new(k, [random_face(rng, k)]).unwrap()
    } else {
        FaceSet::new(k, faces).unwrap()
    }
}

/// A random Boolean-mode automaton: `states` states, random supports,
/// optional ε edges, random initial/final sets (always at least one of
/// each).
pub fn random_boolean_mfsa(
    rng: &mut ChaCha8Rng,
    k: u32,
    states: usize,
    edges: usize,
    eps_prob: f64,
) -> Mfsa {
    let mut es = Vec::new();
    for _ in 0..edges {
        let src = rng.gen_range(0..states);
        let dst = rng.gen_range(0..states);
        if rng.gen_bool(eps_prob) {
            if src != dst {
                es.push(Edge::epsilon(src, dst)); // ε self-loops add nothing
            }
        } else {
            es.push(Edge::face(src, dst, random_face_set(rng, k)));
        }
    }
    let initial: Vec<(usize, f64)> = std::iter::once((rng.gen_range(0..states), 1.0))
        .chain((0..states).filter_map(|s| rng.gen_bool(0.2).then_some((s, 1.0))))
        .collect::<BTreeMap<usize, f64>>()
        .into_iter()
        .collect();
    let finals: Vec<(usize, f64)> = std::iter::once((rng.gen_range(0..states), 1.0))
        .chain((0..states).filter_map(|s| rng.gen_bool(0.2).then_some((s, 1.0))))
        .collect::<BTreeMap<usize, f64>>()
        .into_iter()
        .collect();
    Mfsa::new(k, states, initial, finals, es).unwrap()
}

/// A random ε-free weighted automaton with sub-unit edge weights and a
/// positive final weight at every state (hence trim and convergent).
pub fn random_weighted_mfsa(rng: &mut ChaCha8Rng, k: u32, states: usize, edges: usize) -> Mfsa {
    let es: Vec<Edge> = (0..edges)
        .map(|_| {
            Edge::face_weighted(
                rng.gen_range(0..states),
                rng.gen_range(0..states),
                random_face_set(rng, k),
                rng.gen_range(0.05..0.35),
            )
        })
        .collect();
    let initial = vec![(rng.gen_range(0..states), rng.gen_range(0.5..1.0))];
    let finals: Vec<(usize, f64)> = (0..states)
        .map(|s| (s, rng.gen_range(0.1..1.0)))
        .collect();
    Mfsa::new(k, states, initial, finals, es).unwrap()
}

/// A random face string of the given length.
pub fn random_face_string(rng: &mut ChaCha8Rng, k: u32, len: usize) -> Vec<Face> {
    (0..len).map(|_| random_face(rng, k)).collect()
}
