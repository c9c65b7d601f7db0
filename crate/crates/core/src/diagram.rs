//! Distances between persistence diagrams and signal-to-noise ratios.
//!
//! Finite points may be matched to each other (L-infinity cost) or to the
//! diagonal (half their lifespan). Essential points (infinite death) only
//! match essential points, at the cost of their birth difference; a different
//! number of essential points makes the distance infinite.

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

fn split(d: &PersistenceDiagram, dim: usize) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut finite = Vec::new();
    let mut essential = Vec::new();
    for p in d.in_dim(dim) {
        if p.is_essential() {
            essential.push(p.birth);
        } else {
            finite.push((p.birth, p.death));
        }
    }
    (finite, essential)
}

/// Bottleneck distance between the `dim`-dimensional parts of two diagrams.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: usize) -> f64 {
    let (fa, ea) = split(a, dim);
    let (fb, eb) = split(b, dim);
    essential_cost(ea, eb).max(finite_bottleneck(&fa, &fb))
}

/// Bottleneck distance after `(birth, death) -> (ln birth, ln death)`.
pub fn log_bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: usize) -> Result<f64> {
    let to_log = |d: &PersistenceDiagram| -> Result<(Vec<(f64, f64)>, Vec<f64>)> {
        let (f, e) = split(d, dim);
        for &(birth, death) in &f {
            if birth <= 0.0 || death <= 0.0 {
                return Err(Error::Scale { birth, death });
            }
        }
        if let Some(&birth) = e.iter().find(|&&b| b <= 0.0) {
            return Err(Error::Scale {
                birth,
                death: f64::INFINITY,
            });
        }
        Ok((
            f.into_iter().map(|(b, d)| (b.ln(), d.ln())).collect(),
            e.into_iter().map(f64::ln).collect(),
        ))
    };
    let (fa, ea) = to_log(a)?;
    let (fb, eb) = to_log(b)?;
    Ok(essential_cost(ea, eb).max(finite_bottleneck(&fa, &fb)))
}

/// On a line, matching sorted values in order minimizes the largest gap.
fn essential_cost(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

fn half_life(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

/// Exact bottleneck cost of finite points: binary search over the candidate
/// costs, each tested by a perfect-matching search.
fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len());
    for &p in a {
        candidates.push(half_life(p));
        for &q in b {
            candidates.push(linf(p, q));
        }
    }
    candidates.extend(b.iter().map(|&q| half_life(q)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // the largest candidate (deleting everything) is always feasible
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Left side: points of `a`, then one diagonal slot per point of `b`.
/// Right side: points of `b`, then one diagonal slot per point of `a`.
fn perfect_matching(a: &[(f64, f64)], b: &[(f64, f64)], r: f64) -> bool {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            if u < na {
                let p = a[u];
                let mut out: Vec<usize> = (0..nb).filter(|&j| linf(p, b[j]) <= r).collect();
                if half_life(p) <= r {
                    out.push(nb + u);
                }
                out
            } else {
                let j = u - na;
                let mut out = Vec::new();
                if half_life(b[j]) <= r {
                    out.push(j);
                }
                out.extend(nb..nb + na);
                out
            }
        })
        .collect();
    hopcroft_karp(&adj, n) == n
}

fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left = adj.len();
    let mut match_l = vec![FREE; left];
    let mut match_r = vec![FREE; right];
    let mut dist = vec![0usize; left];
    let mut matched = 0;
    loop {
        // BFS layering from free left vertices
        let mut queue = std::collections::VecDeque::new();
        for u in 0..left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        fn dfs(
            u: usize,
            adj: &[Vec<usize>],
            match_l: &mut [usize],
            match_r: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && dfs(w, adj, match_l, match_r, dist)) {
                    match_l[u] = v;
                    match_r[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..left {
            if match_l[u] == FREE && dfs(u, adj, &mut match_l, &mut match_r, &mut dist) {
                matched += 1;
            }
        }
    }
    matched
}

/// Ratio between the `j`-th and `(j+1)`-th largest lifespans of the
/// `dim`-dimensional points. Infinite when there are at most `j` points or the
/// `(j+1)`-th lifespan is zero; 1 when both lifespans are infinite.
pub fn snr(d: &PersistenceDiagram, dim: usize, j: usize) -> Result<f64> {
    if j < 1 {
        return Err(Error::InvalidParameter("feature count j must be at least 1".into()));
    }
    let mut spans: Vec<f64> = d.in_dim(dim).map(|p| p.lifespan()).collect();
    spans.sort_by(|a, b| b.total_cmp(a));
    if spans.len() <= j || spans[j] == 0.0 {
        return Ok(f64::INFINITY);
    }
    let (signal, noise) = (spans[j - 1], spans[j]);
    if noise == f64::INFINITY {
        return Ok(1.0);
    }
    Ok(signal / noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::DiagramPoint;
    use proptest::prelude::*;

    fn dgm(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            points
                .iter()
                .map(|&(birth, death)| DiagramPoint { dim: 1, birth, death })
                .collect(),
        )
    }

    /// Minimum over all partial matchings of the largest cost.
    fn brute_force(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        fn rec(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, worst: f64) -> f64 {
            if i == a.len() {
                let rest = b
                    .iter()
                    .zip(used.iter())
                    .filter(|(_, &u)| !u)
                    .map(|(&q, _)| half_life(q))
                    .fold(0.0, f64::max);
                return worst.max(rest);
            }
            let mut best = rec(i + 1, a, b, used, worst.max(half_life(a[i])));
            for j in 0..b.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(rec(i + 1, a, b, used, worst.max(linf(a[i], b[j]))));
                    used[j] = false;
                }
            }
            best
        }
        rec(0, a, b, &mut vec![false; b.len()], 0.0)
    }

    #[test]
    fn examples() {
        let d = dgm(&[(0.0, 2.0), (1.0, 4.0)]);
        assert_eq!(bottleneck(&d, &d, 1), 0.0);
        assert_eq!(bottleneck(&dgm(&[(0.0, 2.0)]), &dgm(&[]), 1), 1.0);
        assert_eq!(bottleneck(&dgm(&[(0.0, 2.0)]), &dgm(&[(0.5, 2.5)]), 1), 0.5);
        let e = std::f64::consts::E;
        let v = log_bottleneck(&dgm(&[(1.0, e)]), &dgm(&[(1.0, e * e)]), 1).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(log_bottleneck(&d.clone(), &dgm(&[(1.0, 4.0), (2.0, 3.0)]), 1).is_err());
    }

    #[test]
    fn essential_points() {
        let inf = f64::INFINITY;
        let a = dgm(&[(0.0, inf), (0.0, 1.0)]);
        let b = dgm(&[(0.3, inf)]);
        assert_eq!(bottleneck(&a, &b, 1), 0.5);
        assert_eq!(bottleneck(&a, &dgm(&[(0.0, 1.0)]), 1), inf);
        let c = dgm(&[(1.0, inf)]);
        let e = dgm(&[(2.0, inf)]);
        assert!((log_bottleneck(&c, &e, 1).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(log_bottleneck(&dgm(&[(0.0, inf)]), &e, 1).is_err());
    }

    #[test]
    fn snr_examples() {
        let inf = f64::INFINITY;
        assert_eq!(snr(&dgm(&[(0.0, 10.0), (0.0, 5.0)]), 1, 2).unwrap(), inf);
        assert_eq!(snr(&dgm(&[(0.0, 10.0), (1.0, 6.0), (2.0, 3.0)]), 1, 2).unwrap(), 5.0);
        assert_eq!(snr(&dgm(&[(0.0, inf), (0.0, 3.0)]), 1, 1).unwrap(), inf);
        assert_eq!(snr(&dgm(&[(0.0, inf), (1.0, inf)]), 1, 1).unwrap(), 1.0);
        assert!(snr(&dgm(&[]), 1, 0).is_err());
    }

    fn small_diagram(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0..5.0f64, 0.0..3.0f64).prop_map(|(b, l)| (b, b + l)), 0..max)
    }

    proptest! {
        #[test]
        fn matches_brute_force(a in small_diagram(6), b in small_diagram(6)) {
            let got = bottleneck(&dgm(&a), &dgm(&b), 1);
            let want = brute_force(&a, &b);
            prop_assert!((got - want).abs() <= 1e-12, "{} vs {}", got, want);
        }

        #[test]
        fn metric_axioms(a in small_diagram(9), b in small_diagram(9), c in small_diagram(9)) {
            let (a, b, c) = (dgm(&a), dgm(&b), dgm(&c));
            let ab = bottleneck(&a, &b, 1);
            prop_assert_eq!(ab, bottleneck(&b, &a, 1));
            prop_assert!(bottleneck(&a, &c, 1) <= ab + bottleneck(&b, &c, 1) + 1e-12);
        }

        #[test]
        fn log_scale_invariance(a in small_diagram(7), b in small_diagram(7), c in 0.1..10.0f64) {
            let shift = |d: &[(f64, f64)]| -> Vec<(f64, f64)> { d.iter().map(|&(x, y)| (x + 0.1, y + 0.2)).collect() };
            let (a, b) = (shift(&a), shift(&b));
            let scale = |d: &[(f64, f64)]| -> Vec<(f64, f64)> { d.iter().map(|&(x, y)| (c * x, c * y)).collect() };
            let plain = log_bottleneck(&dgm(&a), &dgm(&b), 1).unwrap();
            let scaled = log_bottleneck(&dgm(&scale(&a)), &dgm(&scale(&b)), 1).unwrap();
            prop_assert!((plain - scaled).abs() <= 1e-9);
        }
    }
}
