//! Simplices, filtrations and clique expansion.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Strictly increasing vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts and deduplicates-checks the vertices.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::MalformedFiltration("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedFiltration(format!(
                "repeated vertex in {vertices:?}"
            )));
        }
        Ok(Self(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, in the order obtained by dropping vertex `i`.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub value: f64,
}

/// Global order: value, then dimension, then lexicographic vertices.
pub fn entry_order(a: &FiltrationEntry, b: &FiltrationEntry) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.cmp(&b.simplex))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
}

impl Filtration {
    /// Sorts entries into the global order. Does not validate closure; see
    /// [`Filtration::validate`].
    pub fn from_entries(mut entries: Vec<FiltrationEntry>) -> Self {
        entries.par_sort_unstable_by(entry_order);
        Self { entries }
    }

    /// Keeps the given order as is.
    pub fn from_ordered(entries: Vec<FiltrationEntry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<FiltrationEntry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FiltrationEntry> {
        self.entries.iter()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.entries.iter().map(|e| e.simplex.dim()).max()
    }

    /// Number of simplices in each dimension `0..=max_dim`.
    pub fn simplices_per_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim().map_or(0, |d| d + 1)];
        for e in &self.entries {
            counts[e.simplex.dim()] += 1;
        }
        counts
    }

    /// Value of each simplex, keyed by simplex.
    pub fn value_map(&self) -> std::collections::HashMap<&Simplex, f64> {
        self.entries.iter().map(|e| (&e.simplex, e.value)).collect()
    }

    /// Every facet is listed earlier with a value no larger than its coface,
    /// and no simplex is listed twice.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashMap::with_capacity(self.entries.len());
        for e in &self.entries {
            if e.value.is_nan() {
                return Err(Error::MalformedFiltration(format!(
                    "bad value {} for [{}]",
                    e.value, e.simplex
                )));
            }
            for facet in e.simplex.facets() {
                match seen.get(&facet) {
                    None => {
                        return Err(Error::MalformedFiltration(format!(
                            "face [{facet}] of [{}] not listed before it",
                            e.simplex
                        )))
                    }
                    Some(&v) if v > e.value => {
                        return Err(Error::MalformedFiltration(format!(
                            "face [{facet}] has value {v} above its coface [{}] at {}",
                            e.simplex, e.value
                        )))
                    }
                    Some(_) => {}
                }
            }
            if seen.insert(e.simplex.clone(), e.value).is_some() {
                return Err(Error::MalformedFiltration(format!(
                    "simplex [{}] listed twice",
                    e.simplex
                )));
            }
        }
        Ok(())
    }

    /// Text format: one `v1 v2 ... vk ; value` line per simplex, values with
    /// 17 significant digits, `inf` for infinity.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.entries {
            writeln!(out, "{} ; {}", e.simplex, format_value(e.value))?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
            let (verts, value) = line
                .split_once(';')
                .ok_or_else(|| parse_err("missing ';'".into()))?;
            let vertices = verts
                .split_whitespace()
                .map(|v| v.parse::<usize>().map_err(|e| parse_err(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let value = parse_value(value.trim()).map_err(parse_err)?;
            let simplex = Simplex::new(vertices).map_err(|e| parse_err(e.to_string()))?;
            entries.push(FiltrationEntry { simplex, value });
        }
        Ok(Self { entries })
    }
}

pub(crate) fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub(crate) fn parse_value(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "+inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| format!("bad value '{s}': {e}")),
    }
}

/// Vertex of a flag complex: filtration value and the largest scale at which
/// it may still be part of a new simplex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FlagVertex {
    pub id: usize,
    pub value: f64,
    pub cap: f64,
}

/// Edge between local vertex indices `a < b`. A clique is admitted iff the
/// largest `gate` of its edges does not exceed the smallest `cap` of its
/// vertices.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FlagEdge {
    pub a: usize,
    pub b: usize,
    pub value: f64,
    pub gate: f64,
}

#[derive(Clone, Copy)]
struct Candidate {
    v: usize,
    value: f64,
    gate: f64,
}

/// Clique expansion up to `max_dim`. Simplex values are maxima over their
/// vertices and edges.
pub(crate) fn expand_flag(vertices: &[FlagVertex], edges: &[FlagEdge], max_dim: usize) -> Filtration {
    let n = vertices.len();
    let mut upper: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); n];
    for e in edges {
        debug_assert!(e.a < e.b);
        upper[e.a].push((e.b, e.value, e.gate));
    }
    upper.par_iter_mut().for_each(|l| l.sort_unstable_by_key(|x| x.0));

    let per_root: Vec<Vec<FiltrationEntry>> = (0..n)
        .into_par_iter()
        .map(|root| {
            let mut out = Vec::new();
            let rv = vertices[root];
            out.push(FiltrationEntry {
                simplex: Simplex::from_sorted(vec![rv.id]),
                value: rv.value,
            });
            if max_dim == 0 {
                return out;
            }
            let cands: Vec<Candidate> = upper[root]
                .iter()
                .map(|&(v, value, gate)| Candidate { v, value, gate })
                .collect();
            let mut clique = vec![root];
            extend(
                vertices, &upper, max_dim, &mut clique, rv.value, f64::NEG_INFINITY, rv.cap, &cands, &mut out,
            );
            out
        })
        .collect();

    let mut entries: Vec<FiltrationEntry> = per_root.into_iter().flatten().collect();
    entries.par_sort_unstable_by(entry_order);
    Filtration { entries }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    vertices: &[FlagVertex],
    upper: &[Vec<(usize, f64, f64)>],
    max_dim: usize,
    clique: &mut Vec<usize>,
    value: f64,
    gate: f64,
    cap: f64,
    cands: &[Candidate],
    out: &mut Vec<FiltrationEntry>,
) {
    for (idx, c) in cands.iter().enumerate() {
        let u = vertices[c.v];
        let new_value = value.max(c.value).max(u.value);
        let new_gate = gate.max(c.gate);
        let new_cap = cap.min(u.cap);
        if new_gate > new_cap {
            continue;
        }
        clique.push(c.v);
        let mut ids: Vec<usize> = clique.iter().map(|&l| vertices[l].id).collect();
        ids.sort_unstable();
        out.push(FiltrationEntry {
            simplex: Simplex::from_sorted(ids),
            value: new_value,
        });
        if clique.len() <= max_dim {
            // candidates after c that are also upper neighbors of c
            let nbrs = &upper[c.v];
            let mut next = Vec::new();
            let mut j = 0;
            for d in &cands[idx + 1..] {
                while j < nbrs.len() && nbrs[j].0 < d.v {
                    j += 1;
                }
                if j < nbrs.len() && nbrs[j].0 == d.v {
                    next.push(Candidate {
                        v: d.v,
                        value: d.value.max(nbrs[j].1),
                        gate: d.gate.max(nbrs[j].2),
                    });
                }
            }
            if !next.is_empty() {
                extend(vertices, upper, max_dim, clique, new_value, new_gate, new_cap, &next, out);
            }
        }
        clique.pop();
    }
}
