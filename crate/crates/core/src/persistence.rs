//! Persistence diagrams over Z/2, computed by reducing coboundary matrices.

use std::io::{Read, Write};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{format_value, parse_value, Filtration};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn lifespan(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    /// Sorts by (dim, birth, death).
    pub fn new(mut points: Vec<DiagramPoint>) -> Self {
        points.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.dim == dim)
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.points.iter().map(|p| p.dim).max()
    }

    /// Diagram CSV with header `dim,birth,death`; infinite deaths as `inf`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dim", "birth", "death"])?;
        for p in &self.points {
            w.write_record([p.dim.to_string(), format_value(p.birth), format_value(p.death)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let mut points = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let field = |k: usize| {
                rec.get(k).ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("missing column {k}"),
                })
            };
            let dim = field(0)?.parse::<usize>().map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            let birth = parse_value(field(1)?).map_err(|msg| Error::Parse { line, msg })?;
            let death = parse_value(field(2)?).map_err(|msg| Error::Parse { line, msg })?;
            if death < birth {
                return Err(Error::Parse {
                    line,
                    msg: format!("death {death} before birth {birth}"),
                });
            }
            points.push(DiagramPoint { dim, birth, death });
        }
        Ok(Self::new(points))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Highest homology dimension reported.
    pub max_dim: usize,
    /// Keep pairs with `birth == death`.
    pub keep_zero_length: bool,
}

/// Persistence diagram of `filtration` in dimensions `0..=max_dim`.
///
/// Classes in the top dimension of the filtration never die, so build the
/// filtration one dimension higher than the last diagram dimension of
/// interest.
pub fn reduce(filtration: &Filtration, max_dim: usize) -> Result<PersistenceDiagram> {
    reduce_with(
        filtration,
        ReduceOptions {
            max_dim,
            keep_zero_length: false,
        },
    )
}

pub fn reduce_with(filtration: &Filtration, opts: ReduceOptions) -> Result<PersistenceDiagram> {
    let entries = filtration.entries();
    let n = entries.len();
    if n >= NONE as usize {
        return Err(Error::MalformedFiltration(format!("{n} simplices is too many")));
    }
    let boundary = boundary_csr(filtration)?;
    let cofaces = transpose(&boundary, n);

    let mut by_dim: Vec<Vec<u32>> = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let d = e.simplex.dim();
        if d >= by_dim.len() {
            by_dim.resize(d + 1, Vec::new());
        }
        by_dim[d].push(i as u32);
    }

    // Cohomology: coboundary columns in reverse filtration order, pivot at the
    // earliest coface. A simplex that kills a class one dimension below has a
    // zero coboundary column, so it is skipped outright.
    let mut cleared = vec![false; n];
    let mut owner = vec![NONE; n];
    let mut points = Vec::new();
    for (dim, simplices) in by_dim.iter().enumerate().take(opts.max_dim + 1) {
        let mut reduced: Vec<Vec<u32>> = Vec::new();
        let mut pivots: Vec<u32> = Vec::new();
        for &s in simplices.iter().rev() {
            if cleared[s as usize] {
                continue;
            }
            let mut col: Vec<u32> = cofaces.column(s as usize).to_vec();
            while let Some(&pivot) = col.first() {
                let k = owner[pivot as usize];
                if k == NONE {
                    break;
                }
                col = symmetric_difference(&col, &reduced[k as usize]);
            }
            let birth = entries[s as usize].value;
            match col.first() {
                Some(&pivot) => {
                    owner[pivot as usize] = reduced.len() as u32;
                    pivots.push(pivot);
                    cleared[pivot as usize] = true;
                    let death = entries[pivot as usize].value;
                    if opts.keep_zero_length || death > birth {
                        points.push(DiagramPoint { dim, birth, death });
                    }
                    reduced.push(col);
                }
                None => points.push(DiagramPoint {
                    dim,
                    birth,
                    death: f64::INFINITY,
                }),
            }
        }
        for p in pivots {
            owner[p as usize] = NONE;
        }
    }
    Ok(PersistenceDiagram::new(points))
}

const NONE: u32 = u32::MAX;

/// Sparse 0/1 matrix in compressed column form; rows sorted within columns.
struct Csr {
    offsets: Vec<usize>,
    rows: Vec<u32>,
}

impl Csr {
    fn column(&self, j: usize) -> &[u32] {
        &self.rows[self.offsets[j]..self.offsets[j + 1]]
    }
}

/// Combinatorial number system: the sorted simplex `v_0 < ... < v_k` is
/// keyed by the sum of `C(v_i, i + 1)`, a bijection onto integers.
struct SimplexKeys {
    /// `binom[k][v] = C(v, k)`
    binom: Vec<Vec<u128>>,
}

impl SimplexKeys {
    fn new(max_vertex: usize, max_len: usize) -> Result<Self> {
        let n = max_vertex + 1;
        let mut binom = vec![vec![1u128; n + 1]];
        for k in 1..=max_len {
            let prev = &binom[k - 1];
            let mut row = vec![0u128; n + 1];
            for v in 1..=n {
                row[v] = row[v - 1].checked_add(prev[v - 1]).ok_or_else(|| {
                    Error::MalformedFiltration(format!(
                        "{n} vertices in dimension {} overflow the simplex index",
                        max_len - 1
                    ))
                })?;
            }
            binom.push(row);
        }
        Ok(Self { binom })
    }

    fn key(&self, vertices: &[usize]) -> u128 {
        vertices.iter().enumerate().map(|(i, &v)| self.binom[i + 1][v]).sum()
    }

    /// Key of the facet that drops position `skip`.
    fn facet_key(&self, vertices: &[usize], skip: usize) -> u128 {
        let below: u128 = vertices[..skip].iter().enumerate().map(|(i, &v)| self.binom[i + 1][v]).sum();
        let above: u128 = vertices[skip + 1..]
            .iter()
            .enumerate()
            .map(|(i, &v)| self.binom[skip + i + 1][v])
            .sum();
        below + above
    }
}

/// Position in the filtration by simplex key, for one dimension.
enum KeyIndex {
    Dense(Vec<u32>),
    Sparse(FxHashMap<u128, u32>),
}

impl KeyIndex {
    fn new(range: u128, count: usize) -> Self {
        if range <= (4 * count as u128).max(1 << 16) {
            KeyIndex::Dense(vec![NONE; range as usize])
        } else {
            KeyIndex::Sparse(FxHashMap::with_capacity_and_hasher(count, Default::default()))
        }
    }

    fn get(&self, key: u128) -> Option<u32> {
        match self {
            KeyIndex::Dense(v) => Some(v[key as usize]).filter(|&i| i != NONE),
            KeyIndex::Sparse(m) => m.get(&key).copied(),
        }
    }

    /// False if the key was already present.
    fn insert(&mut self, key: u128, value: u32) -> bool {
        match self {
            KeyIndex::Dense(v) => std::mem::replace(&mut v[key as usize], value) == NONE,
            KeyIndex::Sparse(m) => m.insert(key, value).is_none(),
        }
    }
}

/// Boundary of every simplex as row indices into the filtration.
fn boundary_csr(filtration: &Filtration) -> Result<Csr> {
    let entries = filtration.entries();
    // keys are built on vertex ranks so sparse labels keep the tables small
    let mut labels: Vec<usize> = entries
        .iter()
        .filter(|e| e.simplex.dim() == 0)
        .map(|e| e.simplex.vertices()[0])
        .collect();
    labels.sort_unstable();
    labels.dedup();
    let rank: FxHashMap<usize, usize> = labels.iter().enumerate().map(|(r, &v)| (v, r)).collect();
    let per_dim = filtration.simplices_per_dim();
    let keys = SimplexKeys::new(labels.len().saturating_sub(1), per_dim.len())?;
    // one index per dimension keeps the facet lookups in a small table
    let mut index: Vec<KeyIndex> = per_dim
        .into_iter()
        .enumerate()
        .map(|(d, count)| KeyIndex::new(keys.binom[d + 1][labels.len()], count))
        .collect();
    let mut offsets = Vec::with_capacity(entries.len() + 1);
    let mut rows = Vec::new();
    let mut ranks: Vec<usize> = Vec::new();
    offsets.push(0);
    for (j, e) in entries.iter().enumerate() {
        let start = rows.len();
        let vertices = e.simplex.vertices();
        let facet = |skip: usize| -> Vec<usize> {
            let mut f = vertices.to_vec();
            f.remove(skip);
            f
        };
        ranks.clear();
        for &v in vertices {
            let &r = rank.get(&v).ok_or_else(|| {
                Error::MalformedFiltration(format!("vertex {v} of [{}] is not listed before it", e.simplex))
            })?;
            ranks.push(r);
        }
        if vertices.len() > 1 {
            for skip in 0..vertices.len() {
                let i = index[vertices.len() - 2]
                    .get(keys.facet_key(&ranks, skip))
                    .ok_or_else(|| {
                        Error::MalformedFiltration(format!(
                            "face {:?} of [{}] is not listed before it",
                            facet(skip),
                            e.simplex
                        ))
                    })?;
                if entries[i as usize].value > e.value {
                    return Err(Error::MalformedFiltration(format!(
                        "face {:?} enters after its coface [{}]",
                        facet(skip),
                        e.simplex
                    )));
                }
                rows.push(i);
            }
        }
        rows[start..].sort_unstable();
        if !index[vertices.len() - 1].insert(keys.key(&ranks), j as u32) {
            return Err(Error::MalformedFiltration(format!(
                "simplex [{}] listed twice",
                e.simplex
            )));
        }
        offsets.push(rows.len());
    }
    Ok(Csr { offsets, rows })
}

/// Columns become rows; each output column comes out sorted because input
/// columns are visited in order.
fn transpose(m: &Csr, n: usize) -> Csr {
    let mut counts = vec![0usize; n + 1];
    for &r in &m.rows {
        counts[r as usize + 1] += 1;
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let offsets = counts.clone();
    let mut next = counts;
    let mut rows = vec![0u32; m.rows.len()];
    for j in 0..n {
        for &r in m.column(j) {
            rows[next[r as usize]] = j as u32;
            next[r as usize] += 1;
        }
    }
    Csr { offsets, rows }
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Number of classes of dimension `dim` alive at `alpha`
/// (`birth <= alpha < death`).
pub fn betti_at(diagram: &PersistenceDiagram, dim: usize, alpha: f64) -> usize {
    diagram
        .in_dim(dim)
        .filter(|p| p.birth <= alpha && alpha < p.death)
        .count()
}
