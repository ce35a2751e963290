//! Probability-semiring operations: string weights and local normalization.
//!
//! A weighted automaton assigns each mixed string the sum over consistent
//! paths of
//!
//! ```text
//! λ(s₀) · Π_i  w(eᵢ) · p(yᵢ | eᵢ)  · ρ(s_L)
//! ```
//!
//! where the emission density of an edge is uniform over its support:
//! p(y|e) = 1/μ(S_e) whenever face(y) ∈ S_e.  ε-edges contribute their
//! weight and consume nothing; arbitrarily long ε-runs are summed in closed
//! form through a linear solve, which requires the ε-cycle weights to be
//! summable (spectral radius below one).
//!
//! [`weight_push`] renormalizes an automaton into stochastic form: each
//! state's outgoing weights plus its final weight sum to 1, string weights
//! unchanged.

use crate::error::{Error, Result};
use crate::num::solve_dense;
use crate::simplex::face_of;

use super::{Edge, MixedString, Mfsa};

/// Apply the ε-closure in weight space: given accumulated forward mass
/// `alpha`, return the mass after following any number of ε-edges.
/// Computes y = (I − Eᵀ)⁻¹ alpha, where E[s][t] is the total ε-weight from
/// s to t.
fn eps_closure_weights(a: &Mfsa, alpha: &[f64]) -> Result<Vec<f64>> {
    let n = a.num_states();
    let eps_edges: Vec<&Edge> = a.edges().iter().filter(|e| e.is_epsilon()).collect();
    if eps_edges.is_empty() {
        return Ok(alpha.to_vec());
    }
    // Transposed system: mass flows src → dst, so column src, row dst.
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for e in &eps_edges {
        m[e.dst][e.src] -= e.weight;
    }
    let mut rhs = alpha.to_vec();
    solve_dense(&mut m, &mut rhs).ok_or_else(|| {
        Error::InvalidArgument("epsilon-cycle weights are not summable".into())
    })
}

/// Total weight of all paths consistent with the string: the forward
/// algorithm over states, with one transition matrix per symbol and ε-runs
/// folded in between.
pub fn string_weight(a: &Mfsa, x: &MixedString, tol: f64) -> Result<f64> {
    if x.k() != a.k() {
        return Err(Error::AlphabetMismatch {
            expected: a.k() as usize,
            got: x.k() as usize,
        });
    }
    let n = a.num_states();
    let mut alpha = vec![0.0; n];
    for (s, w) in a.initial() {
        alpha[s] = w;
    }
    alpha = eps_closure_weights(a, &alpha)?;
    for symbol in x.symbols() {
        let face = face_of(symbol, tol)?;
        let mut next = vec![0.0; n];
        for e in a.edges() {
            if let Some(fs) = e.face_set() {
                if fs.contains(face) && alpha[e.src] != 0.0 {
                    next[e.dst] += alpha[e.src] * e.weight / fs.measure();
                }
            }
        }
        alpha = eps_closure_weights(a, &next)?;
    }
    Ok(alpha
        .iter()
        .enumerate()
        .map(|(s, &v)| v * a.final_weight(s))
        .sum())
}

/// Reweight into stochastic form with identical string weights.
///
/// Solves for each state's future mass β(s) = ρ(s) + Σ_t W(s,t) β(t),
/// then rescales: w′ = w·β(dst)/β(src), ρ′ = ρ/β, λ′ = λ·β.  After the
/// push, outgoing weight plus final weight is 1 at every state.
///
/// Every state must be co-accessible (some final state reachable from it);
/// the first violating state is reported otherwise.
pub fn weight_push(a: &Mfsa) -> Result<Mfsa> {
    let n = a.num_states();
    // Co-accessibility sweep over reversed edges.
    let mut co = vec![false; n];
    let mut frontier: Vec<usize> = a.finals().map(|(s, _)| s).collect();
    for &s in &frontier {
        co[s] = true;
    }
    while let Some(t) = frontier.pop() {
        for e in a.edges() {
            if e.dst == t && !co[e.src] {
                co[e.src] = true;
                frontier.push(e.src);
            }
        }
    }
    if let Some(state) = co.iter().position(|&c| !c) {
        return Err(Error::NotTrim { state });
    }
    // β = ρ + Wβ  ⇔  (I − W)β = ρ.
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for e in a.edges() {
        m[e.src][e.dst] -= e.weight;
    }
    let mut rhs = vec![0.0; n];
    for (s, w) in a.finals() {
        rhs[s] = w;
    }
    let beta = solve_dense(&mut m, &mut rhs).ok_or_else(|| {
        Error::Overflow("total path weight diverges; cycle weights reach 1".into())
    })?;
    if let Some(s) = beta.iter().position(|&b| !(b > 0.0) || !b.is_finite()) {
        return Err(Error::Overflow(format!(
            "future mass at state {s} is {}; weights do not form a convergent sum",
            beta[s]
        )));
    }
    let edges = a
        .edges()
        .iter()
        .map(|e| Edge {
            src: e.src,
            dst: e.dst,
            label: e.label.clone(),
            weight: e.weight * beta[e.dst] / beta[e.src],
        })
        .collect();
    Mfsa::new(
        a.k(),
        n,
        a.initial().map(|(s, w)| (s, w * beta[s])).collect(),
        a.finals().map(|(s, w)| (s, w / beta[s])).collect(),
        edges,
    )
}
