//! Exact 2-Wasserstein distance between finitely supported measures.
//!
//! The transportation problem with squared ground cost is solved with
//! successive shortest augmenting paths (Dijkstra with node potentials).
//! Intended as a test oracle on small supports.

use crate::dtm::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::metric::MetricSpace;

/// Largest support accepted by [`wasserstein2`].
pub const MAX_SUPPORT: usize = 512;

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: f64,
    cost: f64,
}

/// Residual network with paired forward/backward arcs (`arc ^ 1`).
struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: f64, cost: f64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap, cost });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: 0.0,
            cost: -cost,
        });
    }

    /// Sends up to `demand` units from `source` to `sink` at minimum cost;
    /// returns (flow, cost). Capacities below `tol` count as saturated.
    fn min_cost_flow(&mut self, source: usize, sink: usize, demand: f64, tol: f64) -> (f64, f64) {
        let n = self.adj.len();
        let mut potential = vec![0.0; n];
        let mut flow = 0.0;
        let mut cost = 0.0;
        while demand - flow > tol {
            // dense Dijkstra on reduced costs
            let mut dist = vec![f64::INFINITY; n];
            let mut parent = vec![usize::MAX; n];
            let mut done = vec![false; n];
            dist[source] = 0.0;
            loop {
                let mut u = usize::MAX;
                for v in 0..n {
                    if !done[v] && dist[v].is_finite() && (u == usize::MAX || dist[v] < dist[u]) {
                        u = v;
                    }
                }
                if u == usize::MAX {
                    break;
                }
                done[u] = true;
                for &a in &self.adj[u] {
                    let arc = self.arcs[a];
                    if arc.cap <= tol || done[arc.to] {
                        continue;
                    }
                    let reduced = (arc.cost + potential[u] - potential[arc.to]).max(0.0);
                    let nd = dist[u] + reduced;
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        parent[arc.to] = a;
                    }
                }
            }
            if !dist[sink].is_finite() {
                break;
            }
            for v in 0..n {
                if dist[v].is_finite() {
                    potential[v] += dist[v];
                }
            }
            let mut push = demand - flow;
            let mut path_cost = 0.0;
            let mut v = sink;
            while v != source {
                let a = parent[v];
                push = push.min(self.arcs[a].cap);
                path_cost += self.arcs[a].cost;
                v = self.arcs[a ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let a = parent[v];
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                v = self.arcs[a ^ 1].to;
            }
            flow += push;
            cost += push * path_cost;
        }
        (flow, cost)
    }
}

/// Minimum of `sum_ij plan_ij * cost_ij` over transport plans between
/// `supply` and `demand` (equal totals).
pub fn transport_cost(supply: &[f64], demand: &[f64], cost: impl Fn(usize, usize) -> f64) -> f64 {
    let (ns, nd) = (supply.len(), demand.len());
    let source = ns + nd;
    let sink = source + 1;
    let mut net = Network::new(ns + nd + 2);
    let total: f64 = supply.iter().sum();
    for (i, &a) in supply.iter().enumerate() {
        net.add_arc(source, i, a, 0.0);
    }
    for (j, &b) in demand.iter().enumerate() {
        net.add_arc(ns + j, sink, b, 0.0);
    }
    for i in 0..ns {
        for j in 0..nd {
            net.add_arc(i, ns + j, f64::INFINITY, cost(i, j));
        }
    }
    let tol = 1e-13 * total.max(f64::MIN_POSITIVE);
    net.min_cost_flow(source, sink, total, tol).1
}

/// `W_2(mu, nu)`: square root of the optimal transport cost under `d(x, y)^2`.
pub fn wasserstein2(space: &MetricSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::EmptySet);
    }
    if mu.len() > MAX_SUPPORT || nu.len() > MAX_SUPPORT {
        return Err(Error::InvalidMeasure(format!(
            "support larger than {MAX_SUPPORT} points"
        )));
    }
    for &id in mu.ids.iter().chain(&nu.ids) {
        space.check_id(id)?;
    }
    let (tm, tn) = (mu.total(), nu.total());
    if (tm - tn).abs() > 1e-9 * tm.max(tn) {
        return Err(Error::MassMismatch(tm, tn));
    }
    // rescale nu onto mu's total so the flow problem is exactly balanced
    let demand: Vec<f64> = nu.masses.iter().map(|b| b * tm / tn).collect();
    let cost = transport_cost(&mu.masses, &demand, |i, j| {
        let d = space.dist(mu.ids[i], nu.ids[j]);
        d * d
    });
    Ok(cost.max(0.0).sqrt())
}
