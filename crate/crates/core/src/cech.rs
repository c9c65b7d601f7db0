//! Čech filtration of a Euclidean point cloud: a simplex enters at the radius
//! of the smallest ball enclosing its vertices. By the nerve theorem its
//! persistence matches the sublevel sets of the distance to the point cloud.

use rayon::prelude::*;

use crate::dtm::WeightedPointSet;
use crate::error::{Error, Result};
use crate::filtration::{Filtration, FiltrationEntry};
use crate::metric::{MetricKind, MetricSpace};
use crate::weighted_rips::build_weighted_rips;

const MAX_POINTS: usize = 12;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Inner product of `a - o` and `b - o`.
fn rel(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).zip(o).map(|((x, y), z)| (x - z) * (y - z)).sum()
}

/// Center of the ball through the points of `mask` with center in their
/// affine hull, written into `center`. False when the points are affinely
/// dependent. Only the members' coordinates (in index order) enter the
/// computation, so a face gets bit-identical results alone or inside a
/// coface.
fn circumcenter(pts: &[&[f64]], mask: usize, center: &mut [f64]) -> bool {
    let mut members = [0usize; MAX_POINTS];
    let mut count = 0;
    for (i, _) in pts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1) {
        members[count] = i;
        count += 1;
    }
    let base = pts[members[0]];
    let others = &members[1..count];
    let m = others.len();
    let mut a = [[0.0; MAX_POINTS + 1]; MAX_POINTS];
    for (r, &i) in others.iter().enumerate() {
        for (c, &j) in others.iter().enumerate() {
            a[r][c] = 2.0 * rel(base, pts[i], pts[j]);
        }
        a[r][m] = rel(base, pts[i], pts[i]);
    }
    let scale = (0..m).map(|i| a[i][i]).fold(0.0, f64::max);
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col].abs() <= 1e-12 * scale {
            return false;
        }
        a.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    center.copy_from_slice(base);
    for (r, &i) in others.iter().enumerate() {
        let lambda = a[r][m] / a[r][r];
        for ((c, x), o) in center.iter_mut().zip(pts[i]).zip(base) {
            *c += lambda * (x - o);
        }
    }
    true
}

/// For every nonempty subset (bit mask) of `pts`, the radius of its smallest
/// enclosing ball. The ball of a set is the ball of any facet that covers
/// the remaining vertex, and otherwise the circumball of the whole set.
/// Submasks are numerically smaller, so one pass in mask order suffices.
fn subset_radii(pts: &[&[f64]]) -> Vec<f64> {
    let k = pts.len();
    let dim = pts[0].len();
    let full = 1usize << k;
    let mut centers = vec![0.0; full * dim];
    let mut r2 = vec![0.0f64; full];
    for s in 1..full {
        if s.count_ones() == 1 {
            let i = s.trailing_zeros() as usize;
            centers[s * dim..(s + 1) * dim].copy_from_slice(pts[i]);
            continue;
        }
        if s.count_ones() == 2 {
            let (i, j) = (s.trailing_zeros() as usize, (s & (s - 1)).trailing_zeros() as usize);
            let c = &mut centers[s * dim..(s + 1) * dim];
            for ((c, x), y) in c.iter_mut().zip(pts[i]).zip(pts[j]) {
                *c = 0.5 * (x + y);
            }
            r2[s] = sq_dist(pts[i], c).max(sq_dist(pts[j], c));
            continue;
        }
        let low = pts[s.trailing_zeros() as usize];
        let spread = (0..k)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| sq_dist(pts[i], low))
            .fold(0.0, f64::max);
        let mut covering = None;
        let mut largest = s & (s - 1);
        for i in (0..k).filter(|i| s >> i & 1 == 1) {
            let t = s & !(1 << i);
            if r2[t] > r2[largest] {
                largest = t;
            }
            let c = &centers[t * dim..(t + 1) * dim];
            if sq_dist(pts[i], c) <= r2[t] + 1e-10 * r2[t].max(spread) {
                covering = Some(t);
                break;
            }
        }
        let (head, tail) = centers.split_at_mut(s * dim);
        let c = &mut tail[..dim];
        match covering {
            Some(t) => {
                c.copy_from_slice(&head[t * dim..(t + 1) * dim]);
                r2[s] = r2[t];
            }
            None if circumcenter(pts, s, c) => {
                r2[s] = (0..k)
                    .filter(|i| s >> i & 1 == 1)
                    .map(|i| sq_dist(pts[i], c))
                    .fold(0.0, f64::max);
            }
            None => {
                // affinely dependent and no facet ball covers it up to
                // tolerance: fall back to the largest facet ball
                c.copy_from_slice(&head[largest * dim..(largest + 1) * dim]);
                r2[s] = r2[largest];
            }
        }
    }
    r2.into_iter().map(f64::sqrt).collect()
}

/// Radius of the smallest ball enclosing `pts` (at most 12 points).
pub fn min_enclosing_radius(pts: &[&[f64]]) -> Result<f64> {
    if pts.is_empty() {
        return Err(Error::EmptySet);
    }
    if pts.len() > MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "enclosing ball of {} points requested, at most {MAX_POINTS} supported",
            pts.len()
        )));
    }
    Ok(*subset_radii(pts).last().unwrap())
}

/// The largest enclosing radius over all faces. Equal to the enclosing radius
/// up to rounding, and monotone under inclusion by construction.
fn filtration_value(pts: &[&[f64]]) -> f64 {
    subset_radii(pts).into_iter().fold(0.0, f64::max)
}

/// Čech filtration on `ids` up to dimension `max_dim`, omitting simplices
/// whose radius exceeds `alpha_max`.
pub fn build_cech(space: &MetricSpace, ids: &[usize], max_dim: usize, alpha_max: f64) -> Result<Filtration> {
    if space.kind() != MetricKind::L2 {
        return Err(Error::NotEuclidean);
    }
    if max_dim >= MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "Čech simplices of dimension {max_dim} are not supported"
        )));
    }
    // every Čech simplex is in the Rips complex at the same radius
    let rips = build_weighted_rips(space, &WeightedPointSet::unweighted(ids.to_vec()), max_dim, alpha_max)?;
    let entries: Vec<FiltrationEntry> = rips
        .into_entries()
        .into_par_iter()
        .filter_map(|e| {
            let value = if e.simplex.dim() == 0 {
                0.0
            } else {
                let pts: Vec<&[f64]> = e.simplex.vertices().iter().map(|&v| space.point(v).unwrap()).collect();
                filtration_value(&pts)
            };
            (value <= alpha_max).then_some(FiltrationEntry {
                simplex: e.simplex,
                value,
            })
        })
        .collect();
    Ok(Filtration::from_entries(entries))
}
