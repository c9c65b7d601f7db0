//! Point clouds, distance oracles and brute-force neighbor queries.
//!
//! A [`MetricSpace`] either stores coordinates (with an L2 or L1 norm) or an
//! explicit symmetric matrix of pairwise lengths. Points are addressed by id
//! (`0..len`). Subsets of the space are plain id slices, so a sample `P` and a
//! perturbed copy `Q` can live in the same space and be compared directly.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    L2,
    L1,
    Matrix,
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" | "euclidean" => Ok(MetricKind::L2),
            "l1" | "manhattan" => Ok(MetricKind::L1),
            "matrix" => Ok(MetricKind::Matrix),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

/// A point of the space or an arbitrary coordinate vector.
#[derive(Debug, Clone, Copy)]
pub enum Query<'a> {
    Id(usize),
    Point(&'a [f64]),
}

impl From<usize> for Query<'_> {
    fn from(id: usize) -> Self {
        Query::Id(id)
    }
}

impl<'a> From<&'a [f64]> for Query<'a> {
    fn from(p: &'a [f64]) -> Self {
        Query::Point(p)
    }
}

impl<'a> From<&'a Vec<f64>> for Query<'a> {
    fn from(p: &'a Vec<f64>) -> Self {
        Query::Point(p.as_slice())
    }
}

#[derive(Debug, Clone)]
enum Storage {
    Coords { dim: usize, data: Vec<f64> },
    Matrix { data: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct MetricSpace {
    kind: MetricKind,
    len: usize,
    storage: Storage,
}

/// Neighbors of a query, nearest first. Ties are broken by ascending id.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub ids: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

impl MetricSpace {
    /// Coordinate space. All points must share the same dimension.
    pub fn from_points(points: &[Vec<f64>], kind: MetricKind) -> Result<Self> {
        if kind == MetricKind::Matrix {
            return Err(Error::InvalidParameter(
                "coordinate input cannot use the matrix metric".into(),
            ));
        }
        let dim = points.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coordinate".into()));
            }
            data.extend_from_slice(p);
        }
        Ok(Self {
            kind,
            len: points.len(),
            storage: Storage::Coords { dim, data },
        })
    }

    /// Explicit distance matrix. Shape, symmetry, zero diagonal and
    /// nonnegativity are always checked; the cubic triangle-inequality check
    /// only runs when `check_triangle` is set and `n <= 500`.
    pub fn from_matrix(rows: &[Vec<f64>], check_triangle: bool) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMatrix(format!("bad entry {v} at ({i},{j})")));
                }
                if v != data[j * n + i] {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        if check_triangle && n <= 500 {
            let tol = 1e-12;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let lhs = data[i * n + k];
                        let rhs = data[i * n + j] + data[j * n + k];
                        if lhs > rhs + tol * rhs.max(1.0) {
                            return Err(Error::InvalidMatrix(format!(
                                "triangle inequality fails for ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self {
            kind: MetricKind::Matrix,
            len: n,
            storage: Storage::Matrix { data },
        })
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Ambient dimension in coordinate mode, `None` for matrices.
    pub fn dim(&self) -> Option<usize> {
        match &self.storage {
            Storage::Coords { dim, .. } => Some(*dim),
            Storage::Matrix { .. } => None,
        }
    }

    pub fn point(&self, id: usize) -> Option<&[f64]> {
        match &self.storage {
            Storage::Coords { dim, data } if id < self.len => {
                Some(&data[id * dim..(id + 1) * dim])
            }
            _ => None,
        }
    }

    /// All coordinate vectors, cloned. Empty in matrix mode.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len)
            .filter_map(|i| self.point(i).map(<[f64]>::to_vec))
            .collect()
    }

    /// Ids `0..len`.
    pub fn all_ids(&self) -> Vec<usize> {
        (0..self.len).collect()
    }

    /// Materializes all pairwise distances as a matrix-mode space.
    pub fn to_matrix(&self) -> MetricSpace {
        let n = self.len;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.dist(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        MetricSpace {
            kind: MetricKind::Matrix,
            len: n,
            storage: Storage::Matrix { data },
        }
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len {
            Ok(())
        } else {
            Err(Error::IdOutOfRange { id, len: self.len })
        }
    }

    fn check_query(&self, q: Query<'_>) -> Result<()> {
        match q {
            Query::Id(id) => self.check_id(id),
            Query::Point(p) => match &self.storage {
                Storage::Coords { dim, .. } if p.len() == *dim => Ok(()),
                Storage::Coords { dim, .. } => Err(Error::DimensionMismatch {
                    expected: *dim,
                    got: p.len(),
                }),
                Storage::Matrix { .. } => Err(Error::CoordinatesUnavailable),
            },
        }
    }

    /// Distance between two stored points. Panics if an id is out of range.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Coords { dim, data } => {
                let a = &data[i * dim..(i + 1) * dim];
                let b = &data[j * dim..(j + 1) * dim];
                norm(self.kind, a, b)
            }
            Storage::Matrix { data } => data[i * self.len + j],
        }
    }

    /// Distance from a validated query to a stored point.
    #[inline]
    fn dist_query(&self, q: Query<'_>, id: usize) -> f64 {
        match q {
            Query::Id(i) => self.dist(i, id),
            Query::Point(p) => {
                let Storage::Coords { dim, data } = &self.storage else {
                    unreachable!("validated query")
                };
                norm(self.kind, p, &data[id * dim..(id + 1) * dim])
            }
        }
    }

    pub fn distance(&self, x: Query<'_>, y: Query<'_>) -> Result<f64> {
        self.check_query(x)?;
        self.check_query(y)?;
        Ok(match (x, y) {
            (Query::Id(i), _) => self.dist_query(y, i),
            (_, Query::Id(j)) => self.dist_query(x, j),
            (Query::Point(a), Query::Point(b)) => norm(self.kind, a, b),
        })
    }

    fn check_ids(&self, ids: &[usize]) -> Result<()> {
        ids.iter().try_for_each(|&id| self.check_id(id))
    }

    /// All points of `ids` sorted by distance to `x`, ties by id.
    pub fn sorted_neighbors(&self, ids: &[usize], x: Query<'_>) -> Result<NeighborList> {
        self.check_query(x)?;
        self.check_ids(ids)?;
        let mut all: Vec<(f64, usize)> = ids.iter().map(|&p| (self.dist_query(x, p), p)).collect();
        all.sort_unstable_by(neighbor_order);
        Ok(split(all))
    }

    /// The `j` nearest points of `ids` to `x`.
    pub fn knn(&self, ids: &[usize], x: Query<'_>, j: usize) -> Result<NeighborList> {
        self.check_query(x)?;
        self.check_ids(ids)?;
        if j == 0 || j > ids.len() {
            return Err(Error::CountOutOfRange {
                count: j as f64,
                len: ids.len(),
            });
        }
        let mut all: Vec<(f64, usize)> = ids.iter().map(|&p| (self.dist_query(x, p), p)).collect();
        if j < all.len() {
            all.select_nth_unstable_by(j - 1, neighbor_order);
            all.truncate(j);
        }
        all.sort_unstable_by(neighbor_order);
        Ok(split(all))
    }

    /// Distance from `x` to the nearest point of `ids`.
    pub fn distance_to_set(&self, ids: &[usize], x: Query<'_>) -> Result<f64> {
        if ids.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(self.knn(ids, x, 1)?.distances[0])
    }

    pub fn hausdorff(&self, p: &[usize], q: &[usize]) -> Result<f64> {
        if p.is_empty() || q.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_ids(p)?;
        self.check_ids(q)?;
        let directed = |a: &[usize], b: &[usize]| {
            a.iter()
                .map(|&x| b.iter().map(|&y| self.dist(x, y)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        Ok(directed(p, q).max(directed(q, p)))
    }
}

fn neighbor_order(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

fn split(v: Vec<(f64, usize)>) -> NeighborList {
    let (distances, ids) = v.into_iter().unzip();
    NeighborList { ids, distances }
}

#[inline]
fn norm(kind: MetricKind, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        MetricKind::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        _ => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
    }
}
