//! Euclidean barycenter decomposition and the witnessed k-distance.
//!
//! In L2 the mean squared distance from `x` to a k-subset `S` splits as the
//! cell energy of `S` plus the squared distance from `x` to the barycenter of
//! `S`. The witnessed k-distance keeps only the barycenters of the k-NN sets of
//! sample points, which turns it into a power distance over at most `|P|`
//! weighted barycenters.

use crate::dtm::WeightedPointSet;
use crate::error::{Error, Result};
use crate::metric::{MetricKind, MetricSpace, Query};

fn integer_count(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::CountOutOfRange {
            count: k as f64,
            len: n,
        });
    }
    Ok(())
}

/// Accepts a floating count only if it is (numerically) an integer.
pub fn require_integer_count(k: f64) -> Result<usize> {
    let r = k.round();
    if (k - r).abs() > 1e-9 * k.abs().max(1.0) || r < 1.0 {
        return Err(Error::NonIntegerCount(k));
    }
    Ok(r as usize)
}

fn require_euclidean(space: &MetricSpace) -> Result<()> {
    if space.kind() != MetricKind::L2 {
        return Err(Error::NotEuclidean);
    }
    Ok(())
}

fn query_coords<'a>(space: &'a MetricSpace, x: Query<'a>) -> Result<&'a [f64]> {
    match x {
        Query::Id(id) => {
            space.check_id(id)?;
            Ok(space.point(id).expect("coordinate space"))
        }
        Query::Point(p) => {
            let dim = space.dim().unwrap_or(0);
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            Ok(p)
        }
    }
}

/// Barycenter of the `k` nearest sample points to `x` and their cell energy
/// (mean squared distance to that barycenter).
pub fn barycenter_and_energy(
    space: &MetricSpace,
    ids: &[usize],
    k: usize,
    x: Query<'_>,
) -> Result<(Vec<f64>, f64)> {
    require_euclidean(space)?;
    if ids.is_empty() {
        return Err(Error::EmptySet);
    }
    integer_count(k, ids.len())?;
    let nl = space.knn(ids, x, k)?;
    Ok(centroid_energy(space, &nl.ids))
}

fn centroid_energy(space: &MetricSpace, subset: &[usize]) -> (Vec<f64>, f64) {
    let dim = space.dim().unwrap_or(0);
    let k = subset.len() as f64;
    let mut bary = vec![0.0; dim];
    for &p in subset {
        for (b, c) in bary.iter_mut().zip(space.point(p).expect("coordinate space")) {
            *b += c;
        }
    }
    bary.iter_mut().for_each(|b| *b /= k);
    let energy = subset
        .iter()
        .map(|&p| sq_dist(space.point(p).expect("coordinate space"), &bary))
        .sum::<f64>()
        / k;
    (bary, energy)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Barycenters witnessed by the sample points, with their cell energies.
#[derive(Debug, Clone)]
pub struct WitnessSet {
    pub barycenters: Vec<Vec<f64>>,
    pub energies: Vec<f64>,
}

impl WitnessSet {
    pub fn build(space: &MetricSpace, ids: &[usize], k: usize) -> Result<Self> {
        require_euclidean(space)?;
        if ids.is_empty() {
            return Err(Error::EmptySet);
        }
        integer_count(k, ids.len())?;
        let mut barycenters = Vec::with_capacity(ids.len());
        let mut energies = Vec::with_capacity(ids.len());
        for &p in ids {
            let nl = space.knn(ids, Query::Id(p), k)?;
            let (b, e) = centroid_energy(space, &nl.ids);
            barycenters.push(b);
            energies.push(e);
        }
        Ok(Self {
            barycenters,
            energies,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.barycenters
            .iter()
            .zip(&self.energies)
            .map(|(b, e)| e + sq_dist(b, x))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    /// The barycenters as an L2 point cloud weighted by `sqrt(energy)`, so that
    /// its power distance is the witnessed k-distance.
    pub fn to_weighted_space(&self) -> Result<(MetricSpace, WeightedPointSet)> {
        let space = MetricSpace::from_points(&self.barycenters, MetricKind::L2)?;
        let weights = self.energies.iter().map(|e| e.max(0.0).sqrt()).collect();
        let w = WeightedPointSet::new(space.all_ids(), weights, 1.0)?;
        Ok((space, w))
    }
}

pub fn witnessed_kdistance_eval(
    space: &MetricSpace,
    ids: &[usize],
    k: usize,
    x: Query<'_>,
) -> Result<f64> {
    let witnesses = WitnessSet::build(space, ids, k)?;
    let x = query_coords(space, x)?;
    Ok(witnesses.eval(x))
}
