//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
//! when any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparse_dtm::cech::build_cech;
use sparse_dtm::diagram::{bottleneck, log_bottleneck, snr};
use sparse_dtm::dtm::{
    dp_eval, dtm_eval, dtm_measure_eval, dtm_weights, power_distance_eval, DiscreteMeasure,
    MassParameter, WeightedPointSet,
};
use sparse_dtm::experiments::{build_filtration, gen_cube_skeleton, gen_torus_spiral, BuildParams, Mode};
use sparse_dtm::filtration::{Filtration, FiltrationEntry, Simplex};
use sparse_dtm::metric::{MetricKind, MetricSpace, Query};
use sparse_dtm::persistence::{betti_at, reduce, PersistenceDiagram};
use sparse_dtm::sparse_rips::build_sparse_weighted_rips;
use sparse_dtm::transport::wasserstein2;
use sparse_dtm::weighted_rips::{build_weighted_rips, edge_birth};
use sparse_dtm::witnessed::witnessed_kdistance_eval;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_points(r: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| r.random::<f64>()).collect()).collect()
}

fn tight_euclidean_ratio() -> Outcome {
    let start = Instant::now();
    let s = MetricSpace::from_points(&[vec![-1.0], vec![1.0]], MetricKind::L2).unwrap();
    let ids = s.all_ids();
    let m = MassParameter::Count(2.0);
    let x = [0.0];
    let dtm = dtm_eval(&s, &ids, m, Query::Point(&x)).unwrap();
    let dp = dp_eval(&s, &ids, m, Query::Point(&x)).unwrap();
    let elapsed = start.elapsed();
    let ratio = dp / dtm;
    let want = 3f64.sqrt();
    let err = (ratio - want).abs() / want;
    outcome(
        err <= 1e-12 && elapsed < Duration::from_millis(1),
        format!("ratio {ratio:.17} (relative error {err:.1e}), {elapsed:?}"),
    )
}

fn l1_tightness() -> Outcome {
    let mut ok = true;
    let mut ro = Vec::new();
    let mut rq = Vec::new();
    for d in 2..=10usize {
        let mut pts = Vec::new();
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut p = vec![0.0; d];
                p[i] = s;
                pts.push(p);
            }
        }
        let space = MetricSpace::from_points(&pts, MetricKind::L1).unwrap();
        let ids = space.all_ids();
        let m = MassParameter::Count(2.0 * d as f64);
        let o = vec![0.0; d];
        let mut q = vec![0.0; d];
        q[0] = -3.0;
        let df = d as f64;
        let dtm_o = dtm_eval(&space, &ids, m, Query::Point(&o)).unwrap();
        let dp_o = dp_eval(&space, &ids, m, Query::Point(&o)).unwrap();
        let dtm_q = dtm_eval(&space, &ids, m, Query::Point(&q)).unwrap();
        let dp_q = dp_eval(&space, &ids, m, Query::Point(&q)).unwrap();
        ok &= (dtm_o - 1.0).abs() <= 1e-9;
        ok &= (dp_o * dp_o - (5.0 - 2.0 / df)).abs() <= 1e-9;
        ok &= (dtm_q * dtm_q - (16.0 - 6.0 / df)).abs() <= 1e-9;
        ok &= (dp_q * dp_q - (8.0 - 2.0 / df)).abs() <= 1e-9;
        ro.push(dp_o / dtm_o);
        rq.push(dp_q / dtm_q);
    }
    let up = ro.windows(2).all(|w| w[1] > w[0]) && ro.iter().all(|&r| r < 5f64.sqrt());
    let down = rq.windows(2).all(|w| w[1] < w[0]) && rq.iter().all(|&r| r > 0.5f64.sqrt());
    outcome(
        ok && up && down,
        format!(
            "values {}, dP/dtm at o: {:.4} -> {:.4} (limit {:.4}), at q: {:.4} -> {:.4} (limit {:.4})",
            if ok { "exact" } else { "WRONG" },
            ro[0],
            ro[ro.len() - 1],
            5f64.sqrt(),
            rq[0],
            rq[rq.len() - 1],
            0.5f64.sqrt()
        ),
    )
}

/// Shortest-path metric of a random connected weighted graph.
fn graph_metric(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
        if i > 0 {
            let j = r.random_range(0..i);
            let w = r.random_range(0.1..2.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for _ in 0..2 * n {
        let (i, j) = (r.random_range(0..n), r.random_range(0..n));
        if i != j {
            let w = r.random_range(0.1..2.0);
            d[i][j] = d[i][j].min(w);
            d[j][i] = d[i][j];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn sandwich() -> Outcome {
    let mut r = rng(3);
    let slack = 1e-9;
    let (mut matrix_bad, mut euclid_bad, mut witnessed_bad, mut checks) = (0, 0, 0, 0);
    for trial in 0..200 {
        let n = r.random_range(1..=50usize);
        let extra = 10;
        // general metric: sample P and extra query points of one finite metric space
        let rows = if trial % 2 == 0 {
            MetricSpace::from_points(&random_points(&mut r, n + extra, 3), MetricKind::L1)
                .unwrap()
                .to_matrix()
        } else {
            MetricSpace::from_matrix(&graph_metric(&mut r, n + extra), false).unwrap()
        };
        let ids: Vec<usize> = (0..n).collect();
        let m = MassParameter::Fraction(r.random_range(0.01..=1.0));
        let w = dtm_weights(&rows, &ids, m).unwrap();
        for x in 0..n + extra {
            let dtm = dtm_eval(&rows, &ids, m, Query::Id(x)).unwrap();
            let dp = power_distance_eval(&rows, &w, Query::Id(x)).unwrap();
            checks += 1;
            if dp < dtm / 2f64.sqrt() - slack || dp > 5f64.sqrt() * dtm + slack {
                matrix_bad += 1;
            }
        }

        let dim = r.random_range(1..=4usize);
        let space = MetricSpace::from_points(&random_points(&mut r, n, dim), MetricKind::L2).unwrap();
        let ids = space.all_ids();
        let k = r.random_range(1..=n);
        let mk = MassParameter::Count(k as f64);
        let w = dtm_weights(&space, &ids, mk).unwrap();
        for _ in 0..extra {
            let x: Vec<f64> = (0..dim).map(|_| r.random_range(-0.5..1.5)).collect();
            let q = Query::Point(&x);
            let dtm = dtm_eval(&space, &ids, mk, q).unwrap();
            let dp = power_distance_eval(&space, &w, q).unwrap();
            let dw = witnessed_kdistance_eval(&space, &ids, k, q).unwrap();
            checks += 1;
            if dp < dtm / 2f64.sqrt() - slack || dp > 3f64.sqrt() * dtm + slack {
                euclid_bad += 1;
            }
            if dw < dtm - slack || dw > 6f64.sqrt() * dtm + slack {
                witnessed_bad += 1;
            }
        }
    }
    outcome(
        matrix_bad + euclid_bad + witnessed_bad == 0,
        format!(
            "{checks} queries; violations: general {matrix_bad}, euclidean {euclid_bad}, witnessed {witnessed_bad}"
        ),
    )
}

fn witnessed_lower_bound() -> Outcome {
    let d = 2usize;
    let eps = 0.1;
    let far = 1.0 + 2f64.sqrt() - eps;
    let mut pts = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; d];
            p[i] = s;
            pts.push(p.clone());
            p[i] = s * far;
            for _ in 0..2 * d - 1 {
                pts.push(p.clone());
            }
        }
    }
    let space = MetricSpace::from_points(&pts, MetricKind::L2).unwrap();
    let ids = space.all_ids();
    let k = 2 * d;
    let o = vec![0.0; d];
    let dtm = dtm_eval(&space, &ids, MassParameter::Count(k as f64), Query::Point(&o)).unwrap();
    let dw = witnessed_kdistance_eval(&space, &ids, k, Query::Point(&o)).unwrap();
    let df = 2.0 * d as f64;
    let want = 1.0 / df + (df - 1.0) / df * far * far;
    outcome(
        pts.len() == 4 * d * d && (dtm - 1.0).abs() <= 1e-9 && (dw * dw - want).abs() <= 1e-9,
        format!("{} points, dtm(o) = {dtm}, dW(o)^2 = {} vs {want}", pts.len(), dw * dw),
    )
}

fn bisect_birth(d: f64, wp: f64, wq: f64) -> f64 {
    let r = |a: f64, w: f64| (a * a - w * w).max(0.0).sqrt();
    let f = |a: f64| r(a, wp) + r(a, wq) - d;
    let mut lo = wp.max(wq);
    if f(lo) >= 0.0 {
        return lo;
    }
    let mut hi = lo + d + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn edge_birth_closed_form() -> Outcome {
    let mut r = rng(5);
    let start = Instant::now();
    let (mut flat, mut curved, mut worst) = (0, 0, 0.0f64);
    for _ in 0..10_000 {
        let d = r.random_range(0.0..6.0);
        let (wp, wq) = (r.random_range(0.0..5.0), r.random_range(0.0..5.0));
        let (a, b) = if wp <= wq { (wp, wq) } else { (wq, wp) };
        if d * d <= b * b - a * a {
            flat += 1;
        } else {
            curved += 1;
        }
        let got = edge_birth(d, wp, wq).unwrap();
        worst = worst.max((got - bisect_birth(d, wp, wq)).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && flat >= 1000 && curved >= 1000 && elapsed < Duration::from_secs(1),
        format!("max error {worst:.1e}, branches {flat}/{curved}, {elapsed:?}"),
    )
}

/// Rank over Z/2 of a set of columns given as bit masks.
fn rank_z2(mut cols: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        if let Some(pos) = cols.iter().position(|&c| c >> bit & 1 == 1) {
            let pivot = cols.swap_remove(pos);
            for c in cols.iter_mut() {
                if *c >> bit & 1 == 1 {
                    *c ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

fn brute_betti(entries: &[FiltrationEntry], dim: usize, alpha: f64) -> usize {
    let alive: Vec<&FiltrationEntry> = entries.iter().filter(|e| e.value <= alpha).collect();
    let index_of = |s: &Simplex| alive.iter().position(|e| &e.simplex == s).unwrap();
    let boundary = |p: usize| -> Vec<u64> {
        alive
            .iter()
            .filter(|e| e.simplex.dim() == p)
            .map(|e| e.simplex.facets().fold(0u64, |acc, f| acc | 1 << index_of(&f)))
            .collect()
    };
    let n_dim = alive.iter().filter(|e| e.simplex.dim() == dim).count();
    let rank_here = if dim == 0 { 0 } else { rank_z2(boundary(dim)) };
    n_dim - rank_here - rank_z2(boundary(dim + 1))
}

fn random_complex(r: &mut ChaCha8Rng) -> Filtration {
    let mut chosen: Vec<(Simplex, f64)> = Vec::new();
    for _ in 0..20 {
        let size = r.random_range(1..=4usize);
        let mut vs: Vec<usize> = (0..5).collect();
        for i in 0..size {
            let j = r.random_range(i..5);
            vs.swap(i, j);
        }
        let top = Simplex::new(vs[..size].to_vec()).unwrap();
        // all faces of `top`
        let mut closure = Vec::new();
        for mask in 1u32..(1 << size) {
            let face: Vec<usize> = (0..size).filter(|i| mask >> i & 1 == 1).map(|i| top.vertices()[i]).collect();
            let face = Simplex::new(face).unwrap();
            if !chosen.iter().any(|(s, _)| s == &face) {
                closure.push(face);
            }
        }
        if chosen.len() + closure.len() > 12 {
            continue;
        }
        closure.sort_by_key(|s| s.dim());
        for s in closure {
            let own = r.random_range(0..5u32) as f64;
            let faces = s
                .facets()
                .map(|f| chosen.iter().find(|(c, _)| c == &f).unwrap().1)
                .fold(0.0, f64::max);
            let value = if s.dim() == 0 { own } else { own.max(faces) };
            chosen.push((s, value));
        }
    }
    Filtration::from_entries(
        chosen
            .into_iter()
            .map(|(simplex, value)| FiltrationEntry { simplex, value })
            .collect(),
    )
}

fn persistence_correctness() -> Outcome {
    let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let s = MetricSpace::from_points(&sq, MetricKind::L2).unwrap();
    let f = build_weighted_rips(&s, &WeightedPointSet::unweighted(s.all_ids()), 2, f64::INFINITY).unwrap();
    let dgm = reduce(&f, 1).unwrap();
    let loops: Vec<(f64, f64)> = dgm.in_dim(1).map(|p| (p.birth, p.death)).collect();
    let square_ok = loops == vec![(0.5, std::f64::consts::FRAC_1_SQRT_2)];

    let mut r = rng(6);
    let (mut mismatches, mut sizes) = (0, 0);
    let trials = 2000;
    for _ in 0..trials {
        let f = random_complex(&mut r);
        assert!(f.len() <= 12);
        sizes += f.len();
        let dgm = reduce(&f, 3).unwrap();
        for alpha in [-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5] {
            for dim in 0..=3 {
                if betti_at(&dgm, dim, alpha) != brute_betti(f.entries(), dim, alpha) {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(
        square_ok && mismatches == 0,
        format!(
            "square loop {loops:?}; {trials} random filtrations (mean size {:.1}), {mismatches} Betti mismatches",
            sizes as f64 / trials as f64
        ),
    )
}

fn stability() -> Outcome {
    let mut r = rng(7);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_ratio = 0.0f64;
    let mut ok = true;
    for _ in 0..50 {
        let n = r.random_range(3..=40usize);
        let delta = r.random_range(0.001..=0.05);
        let p = random_points(&mut r, n, 2);
        let q: Vec<Vec<f64>> = p
            .iter()
            .map(|x| {
                let angle = r.random_range(0.0..std::f64::consts::TAU);
                let len = delta * r.random::<f64>().sqrt();
                vec![x[0] + len * angle.cos(), x[1] + len * angle.sin()]
            })
            .collect();
        let all: Vec<Vec<f64>> = p.iter().chain(&q).cloned().collect();
        let space = MetricSpace::from_points(&all, MetricKind::L2).unwrap();
        let pid: Vec<usize> = (0..n).collect();
        let qid: Vec<usize> = (n..2 * n).collect();
        // one 1-Lipschitz weight function on the plane, evaluated on both sets
        let m = MassParameter::Count(3.0f64.min(n as f64));
        let weight = |id: usize| dtm_eval(&space, &pid, m, Query::Id(id)).unwrap();
        let wp = WeightedPointSet::new(pid.clone(), pid.iter().map(|&i| weight(i)).collect(), 1.0).unwrap();
        let wq = WeightedPointSet::new(qid.clone(), qid.iter().map(|&i| weight(i)).collect(), 1.0).unwrap();
        let dp = reduce(&build_weighted_rips(&space, &wp, 2, f64::INFINITY).unwrap(), 1).unwrap();
        let dq = reduce(&build_weighted_rips(&space, &wq, 2, f64::INFINITY).unwrap(), 1).unwrap();
        let dh = space.hausdorff(&pid, &qid).unwrap();
        for dim in 0..=1 {
            let db = bottleneck(&dp, &dq, dim);
            ok &= db <= 2.0 * delta + 1e-9 && db <= 2.0 * dh + 1e-9;
            worst_excess = worst_excess.max(db - 2.0 * delta);
            if dh > 0.0 {
                worst_ratio = worst_ratio.max(db / dh);
            }
        }
    }
    outcome(
        ok,
        format!("max d_B - 2 delta = {worst_excess:.3e}, max d_B / d_H = {worst_ratio:.3}"),
    )
}

fn sparse_interleaving() -> Outcome {
    let start = Instant::now();
    let mut r = rng(8);
    let mut ok = true;
    let mut report = Vec::new();
    for eps in [0.1, 0.3, 0.5] {
        let bound = ((1.0 + 2f64.sqrt() * eps) / (1.0 - eps)).ln();
        let mut worst = 0.0f64;
        for _ in 0..30 {
            let n = r.random_range(4..=40usize);
            let space = MetricSpace::from_points(&random_points(&mut r, n, 2), MetricKind::L2).unwrap();
            let w = dtm_weights(&space, &space.all_ids(), MassParameter::Count(3.0)).unwrap();
            let full = reduce(&build_weighted_rips(&space, &w, 2, f64::INFINITY).unwrap(), 1).unwrap();
            let sparse = reduce(&build_sparse_weighted_rips(&space, &w, eps, 2).unwrap(), 1).unwrap();
            for dim in 0..=1 {
                let d = log_bottleneck(&sparse, &full, dim).unwrap();
                worst = worst.max(d);
                ok &= d <= bound + 1e-9;
            }
        }
        report.push(format!("eps {eps}: max {worst:.4} <= {bound:.4}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    outcome(ok, format!("{}, {elapsed:?}", report.join("; ")))
}

fn wasserstein_stability() -> Outcome {
    let mut r = rng(9);
    let mut ok = true;
    let mut tightest = f64::INFINITY;
    let grid: Vec<Vec<f64>> = (0..=20)
        .flat_map(|i| (0..=20).map(move |j| vec![-0.5 + 0.1 * i as f64, -0.5 + 0.1 * j as f64]))
        .collect();
    for _ in 0..30 {
        let (a, b) = (r.random_range(1..=15usize), r.random_range(1..=15usize));
        let pts = random_points(&mut r, a + b, 2);
        let space = MetricSpace::from_points(&pts, MetricKind::L2).unwrap();
        let masses = |r: &mut ChaCha8Rng, len: usize| -> Vec<f64> {
            let raw: Vec<f64> = (0..len).map(|_| r.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / total).collect()
        };
        let mu = DiscreteMeasure::new((0..a).collect(), masses(&mut r, a)).unwrap();
        let nu = DiscreteMeasure::new((a..a + b).collect(), masses(&mut r, b)).unwrap();
        let w2 = wasserstein2(&space, &mu, &nu).unwrap();
        for m in [0.2, 0.5, 1.0] {
            let mut sup = 0.0f64;
            for x in &grid {
                let q = Query::Point(x);
                let gap = (dtm_measure_eval(&space, &mu, m, q).unwrap() - dtm_measure_eval(&space, &nu, m, q).unwrap()).abs();
                sup = sup.max(gap);
            }
            let bound = w2 / m.sqrt();
            ok &= sup <= bound + 1e-9;
            tightest = tightest.min(bound - sup);
        }
    }
    outcome(ok, format!("smallest slack W2/sqrt(m) - sup gap = {tightest:.3e}"))
}

fn spiral_space(n: usize) -> MetricSpace {
    MetricSpace::from_points(&gen_torus_spiral(n, 2.0, 0.5, 20).unwrap(), MetricKind::L2).unwrap()
}

fn sparse_params(eps: f64, max_dim: usize) -> BuildParams {
    BuildParams {
        mode: Mode::SparseRips,
        mass: None,
        epsilon: Some(eps),
        max_dim,
        alpha_max: None,
    }
}

fn linear_size() -> Outcome {
    let small = spiral_space(1000);
    let large = spiral_space(2000);
    let edges = |space: &MetricSpace| build_filtration(space, &sparse_params(0.5, 2)).unwrap().simplices_per_dim()[1];
    let (e1, e2) = (edges(&small), edges(&large));
    let full = |space: &MetricSpace| {
        build_weighted_rips(space, &WeightedPointSet::unweighted(space.all_ids()), 1, f64::INFINITY)
            .unwrap()
            .simplices_per_dim()[1]
    };
    let (f1, f2) = (full(&small), full(&large));
    let sparse_ratio = e2 as f64 / e1 as f64;
    let full_ratio = f2 as f64 / f1 as f64;

    let eps_values: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let sizes: Vec<usize> = eps_values
        .iter()
        .map(|&eps| build_filtration(&large, &sparse_params(eps, 2)).unwrap().len())
        .collect();
    let argmin = (0..sizes.len()).min_by_key(|&i| sizes[i]).unwrap();
    let interior = argmin > 0 && argmin < sizes.len() - 1;
    outcome(
        sparse_ratio <= 2.2 && (full_ratio - 4.0).abs() <= 0.1 && interior,
        format!(
            "sparse edges {e1} -> {e2} (x{sparse_ratio:.3}), full edges {f1} -> {f2} (x{full_ratio:.3}); sizes by eps {sizes:?}, minimum at eps {}",
            eps_values[argmin]
        ),
    )
}

fn cube_inference() -> Outcome {
    let start = Instant::now();
    let space = MetricSpace::from_points(&gen_cube_skeleton(), MetricKind::L2).unwrap();
    let w = dtm_weights(&space, &space.all_ids(), MassParameter::Count(5.0)).unwrap();
    let t = reduce(&build_sparse_weighted_rips(&space, &w, 0.5, 3).unwrap(), 2).unwrap();
    // sublevel sets of the distance to the sample, through the Čech nerve
    let plain: PersistenceDiagram = reduce(&build_cech(&space, &space.all_ids(), 3, f64::INFINITY).unwrap(), 2).unwrap();
    let t1 = snr(&t, 1, 5).unwrap();
    let t2 = snr(&t, 2, 1).unwrap();
    let p2 = snr(&plain, 2, 1).unwrap();
    let elapsed = start.elapsed();
    outcome(
        t1 >= 5.0 && t2 >= 5.0 && p2 <= 2.0 && elapsed < Duration::from_secs(60),
        format!("sparse weighted SNR dim1 {t1:.3}, dim2 {t2:.3}; unweighted SNR dim2 {p2:.3}; {elapsed:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("tight Euclidean ratio", tight_euclidean_ratio),
        ("L1 tightness family", l1_tightness),
        ("sandwich bounds", sandwich),
        ("witnessed lower-bound construction", witnessed_lower_bound),
        ("edge-birth closed form", edge_birth_closed_form),
        ("persistence correctness", persistence_correctness),
        ("stability under Hausdorff perturbation", stability),
        ("sparse interleaving", sparse_interleaving),
        ("Wasserstein stability", wasserstein_stability),
        ("linear-size behavior", linear_size),
        ("cube-skeleton inference", cube_inference),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
