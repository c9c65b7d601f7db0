//! Greedy permutations, perturbed distances and sparse (weighted) Rips
//! filtrations.
//!
//! A point `p` inserted with radius `lambda_p` by the greedy permutation takes
//! part in the sparse complex `Q_a` only while `a <= lambda_p / (eps (1 - eps))`,
//! and its distances are inflated by `s_p(a)`. The sparse filtration `S` is the
//! union of the `Q_a`. Its weighted variant is `T_a = S_a ∩ R_a` with `R` the
//! weighted Rips filtration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtm::WeightedPointSet;
use crate::error::{Error, Result};
use crate::filtration::{expand_flag, Filtration, FlagEdge, FlagVertex};
use crate::metric::MetricSpace;
use crate::weighted_rips::edge_birth_unchecked;

/// Furthest-point ordering of a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyPermutation {
    /// Point ids in insertion order.
    pub order: Vec<usize>,
    /// Insertion radius of `order[i]`; the first is infinite.
    pub lambda: Vec<f64>,
}

impl GreedyPermutation {
    /// Starts at `seed` and repeatedly inserts the point furthest from those
    /// already inserted, ties going to the lowest id.
    pub fn new(space: &MetricSpace, ids: &[usize], seed: usize) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::EmptySet);
        }
        for &id in ids {
            space.check_id(id)?;
        }
        let start = ids
            .iter()
            .position(|&p| p == seed)
            .ok_or_else(|| Error::InvalidParameter(format!("seed {seed} is not in the point set")))?;
        let n = ids.len();
        let mut order = Vec::with_capacity(n);
        let mut lambda = Vec::with_capacity(n);
        let mut inserted = vec![false; n];
        let mut to_prefix = vec![f64::INFINITY; n];
        let mut next = start;
        let mut radius = f64::INFINITY;
        for _ in 0..n {
            inserted[next] = true;
            order.push(ids[next]);
            lambda.push(radius);
            let p = ids[next];
            let mut best: Option<(f64, usize)> = None;
            for slot in 0..n {
                if inserted[slot] {
                    continue;
                }
                let d = space.dist(p, ids[slot]);
                if d < to_prefix[slot] {
                    to_prefix[slot] = d;
                }
                let cand = (to_prefix[slot], ids[slot]);
                best = match best {
                    Some(b) if b.0 > cand.0 || (b.0 == cand.0 && b.1 < cand.1) => Some(b),
                    _ => Some(cand),
                };
            }
            if let Some((r, id)) = best {
                radius = r;
                next = ids.iter().position(|&q| q == id).expect("id from set");
            }
        }
        Ok(Self { order, lambda })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Insertion radius for each id of `ids`, aligned with `ids`.
    pub fn radii_for(&self, ids: &[usize]) -> Result<Vec<f64>> {
        let lookup: std::collections::HashMap<usize, f64> =
            self.order.iter().copied().zip(self.lambda.iter().copied()).collect();
        ids.iter()
            .map(|id| {
                lookup
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::InvalidParameter(format!("id {id} not in permutation")))
            })
            .collect()
    }

    /// Points with insertion radius above `gamma` (at least `gamma` when
    /// `closed`).
    pub fn net(&self, gamma: f64, closed: bool) -> Vec<usize> {
        self.order
            .iter()
            .zip(&self.lambda)
            .filter(|&(_, &l)| if closed { l >= gamma } else { l > gamma })
            .map(|(&p, _)| p)
            .collect()
    }
}

/// Sparsity parameter and the Lipschitz constant of the weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseParams {
    pub epsilon: f64,
    pub lipschitz: f64,
}

impl SparseParams {
    pub fn new(epsilon: f64, lipschitz: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!("lipschitz constant {lipschitz}")));
        }
        Ok(Self { epsilon, lipschitz })
    }

    /// Multiplicative interleaving constant
    /// `(1 + sqrt(1 + t^2) eps) / (1 - eps)`.
    pub fn kappa(&self) -> f64 {
        let t = self.lipschitz;
        (1.0 + (1.0 + t * t).sqrt() * self.epsilon) / (1.0 - self.epsilon)
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} not in (0, 1)")));
    }
    Ok(())
}

/// Distance perturbation `s_p(alpha)` for a point with insertion radius
/// `lambda_p`.
pub fn perturbation_s(lambda_p: f64, eps: f64, alpha: f64) -> f64 {
    if lambda_p == f64::INFINITY {
        return 0.0;
    }
    let start = lambda_p / eps;
    let end = lambda_p / (eps * (1.0 - eps));
    if alpha <= start {
        0.0
    } else if alpha < end {
        alpha - start
    } else {
        eps * alpha
    }
}

/// Last scale at which a point with insertion radius `lambda_p` belongs to
/// the vertex set of the sparse complex.
pub fn vertex_cap(lambda_p: f64, eps: f64) -> f64 {
    if lambda_p == f64::INFINITY {
        f64::INFINITY
    } else {
        lambda_p / (eps * (1.0 - eps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseEdge {
    /// Smallest `alpha` with `d + s_p(alpha) + s_q(alpha) <= 2 alpha`.
    pub birth: f64,
    /// Whether both endpoints are still net points at `birth`.
    pub present: bool,
}

/// `s` restricted to one linear piece: `offset + slope * alpha`.
fn piece(lambda: f64, eps: f64, alpha: f64) -> (f64, f64) {
    if lambda == f64::INFINITY || alpha <= lambda / eps {
        (0.0, 0.0)
    } else if alpha < lambda / (eps * (1.0 - eps)) {
        (-lambda / eps, 1.0)
    } else {
        (0.0, eps)
    }
}

pub fn sparse_edge_birth(d: f64, lp: f64, lq: f64, eps: f64) -> SparseEdge {
    let mut breaks: Vec<f64> = [lp, lq]
        .iter()
        .filter(|l| l.is_finite())
        .flat_map(|&l| [l / eps, l / (eps * (1.0 - eps))])
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks.push(f64::INFINITY);

    // The deficit d + s_p + s_q - 2 alpha is continuous, piecewise linear and
    // nonincreasing; find its first zero segment by segment.
    let mut lo = 0.0;
    let mut birth = f64::INFINITY;
    for &hi in &breaks {
        if hi <= lo {
            continue;
        }
        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
        let (op, sp) = piece(lp, eps, mid);
        let (oq, sq) = piece(lq, eps, mid);
        let slope = 2.0 - sp - sq;
        if slope > 0.0 {
            let root = (d + op + oq) / slope;
            if root <= hi {
                birth = root.max(lo);
                break;
            }
        } else if d + op + oq <= 0.0 {
            birth = lo;
            break;
        }
        lo = hi;
    }
    let cap = vertex_cap(lp, eps).min(vertex_cap(lq, eps));
    SparseEdge {
        birth,
        present: birth <= cap,
    }
}

/// Sparse Rips filtration `S` on `ids`, greedy permutation seeded at `ids[0]`.
pub fn build_sparse_rips(
    space: &MetricSpace,
    ids: &[usize],
    eps: f64,
    max_dim: usize,
) -> Result<Filtration> {
    check_epsilon(eps)?;
    let seed = *ids.first().ok_or(Error::EmptySet)?;
    let perm = GreedyPermutation::new(space, ids, seed)?;
    let weights = WeightedPointSet::unweighted(ids.to_vec());
    build_sparse(space, &weights, &perm, eps, max_dim, false)
}

/// Sparse weighted Rips filtration `T = S ∩ R`, greedy permutation seeded at
/// the first weighted point.
pub fn build_sparse_weighted_rips(
    space: &MetricSpace,
    weights: &WeightedPointSet,
    eps: f64,
    max_dim: usize,
) -> Result<Filtration> {
    check_epsilon(eps)?;
    let seed = *weights.ids.first().ok_or(Error::EmptySet)?;
    let perm = GreedyPermutation::new(space, &weights.ids, seed)?;
    build_sparse(space, weights, &perm, eps, max_dim, true)
}

/// Sparse filtration over a given permutation. With `weighted` unset the
/// weights are ignored and `S` is returned.
pub fn build_sparse(
    space: &MetricSpace,
    weights: &WeightedPointSet,
    perm: &GreedyPermutation,
    eps: f64,
    max_dim: usize,
    weighted: bool,
) -> Result<Filtration> {
    check_epsilon(eps)?;
    let radii = perm.radii_for(&weights.ids)?;
    let vertices: Vec<FlagVertex> = weights
        .ids
        .iter()
        .zip(&weights.weights)
        .zip(&radii)
        .map(|((&id, &w), &l)| FlagVertex {
            id,
            value: if weighted { w } else { 0.0 },
            cap: vertex_cap(l, eps),
        })
        .collect();
    let edges: Vec<FlagEdge> = if max_dim == 0 {
        Vec::new()
    } else {
        let vertices = &vertices;
        let radii = &radii;
        (0..vertices.len())
            .into_par_iter()
            .flat_map_iter(|a| {
                ((a + 1)..vertices.len()).filter_map(move |b| {
                    let cap = vertices[a].cap.min(vertices[b].cap);
                    let d = space.dist(weights.ids[a], weights.ids[b]);
                    // birth >= d / 2, so such pairs can never be admitted
                    if d / 2.0 > cap {
                        return None;
                    }
                    let se = sparse_edge_birth(d, radii[a], radii[b], eps);
                    if !se.present {
                        return None;
                    }
                    let value = if weighted {
                        se.birth
                            .max(edge_birth_unchecked(d, weights.weights[a], weights.weights[b]))
                    } else {
                        se.birth
                    };
                    Some(FlagEdge {
                        a,
                        b,
                        value,
                        gate: se.birth,
                    })
                })
            })
            .collect()
    };
    Ok(expand_flag(&vertices, &edges, max_dim))
}
