//! Weighted Rips filtration.
//!
//! A point `p` with weight `w_p` carries a ball of radius
//! `r_p(a) = sqrt(a^2 - w_p^2)` at scale `a` (empty while `a < w_p`). The
//! weighted Rips complex at scale `a` is the clique complex of the pairs whose
//! balls touch, `d(p, q) <= r_p(a) + r_q(a)`.

use rayon::prelude::*;

use crate::dtm::WeightedPointSet;
use crate::error::{Error, Result};
use crate::filtration::{expand_flag, Filtration, FlagEdge, FlagVertex};
use crate::metric::MetricSpace;

/// Smallest scale at which the balls around two weighted points touch.
pub fn edge_birth(d: f64, wp: f64, wq: f64) -> Result<f64> {
    for (what, value) in [("distance", d), ("weight", wp), ("weight", wq)] {
        if value < 0.0 || value.is_nan() {
            return Err(Error::NegativeInput { what, value });
        }
    }
    Ok(edge_birth_unchecked(d, wp, wq))
}

#[inline]
pub(crate) fn edge_birth_unchecked(d: f64, wp: f64, wq: f64) -> f64 {
    let (a, b) = if wp <= wq { (wp, wq) } else { (wq, wp) };
    // at scale b the heavier ball is a point; the lighter one already covers it
    if d * d <= b * b - a * a {
        return b;
    }
    let rb = if a == b {
        d / 2.0
    } else {
        (d * d + a * a - b * b) / (2.0 * d)
    };
    (b * b + rb * rb).sqrt()
}

/// Weighted Rips filtration up to simplices of dimension `max_dim`, omitting
/// everything born after `alpha_max` (pass `f64::INFINITY` for no cutoff).
pub fn build_weighted_rips(
    space: &MetricSpace,
    weights: &WeightedPointSet,
    max_dim: usize,
    alpha_max: f64,
) -> Result<Filtration> {
    if alpha_max.is_nan() || alpha_max <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha_max must be positive, got {alpha_max}"
        )));
    }
    for &id in &weights.ids {
        space.check_id(id)?;
    }
    let vertices: Vec<FlagVertex> = weights
        .ids
        .iter()
        .zip(&weights.weights)
        .map(|(&id, &w)| FlagVertex {
            id,
            value: w,
            cap: f64::INFINITY,
        })
        .collect();
    let (vertices, local): (Vec<FlagVertex>, Vec<usize>) = {
        let kept: Vec<usize> = (0..vertices.len())
            .filter(|&i| vertices[i].value <= alpha_max)
            .collect();
        (kept.iter().map(|&i| vertices[i]).collect(), kept)
    };
    let edges: Vec<FlagEdge> = if max_dim == 0 {
        Vec::new()
    } else {
        (0..vertices.len())
            .into_par_iter()
            .flat_map_iter(|a| {
                let pa = local[a];
                let vertices = &vertices;
                let local = &local;
                ((a + 1)..vertices.len()).filter_map(move |b| {
                    let pb = local[b];
                    let d = space.dist(weights.ids[pa], weights.ids[pb]);
                    let value = edge_birth_unchecked(d, vertices[a].value, vertices[b].value);
                    (value <= alpha_max).then_some(FlagEdge {
                        a,
                        b,
                        value,
                        gate: 0.0,
                    })
                })
            })
            .collect()
    };
    Ok(expand_flag(&vertices, &edges, max_dim))
}
