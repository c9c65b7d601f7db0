//! Distance to a measure and its power-distance approximation.
//!
//! For an empirical measure on `n` points and mass `m`, the distance to the
//! measure at `x` is the root mean square distance from `x` to its
//! `k = m * n` nearest sample points. A fractional `k` weights the
//! `ceil(k)`-th neighbor by `k - floor(k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Query};

/// Smoothing mass, either as a fraction of the total mass or as a neighbor
/// count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassParameter {
    Fraction(f64),
    Count(f64),
}

impl MassParameter {
    /// Neighbor count `k` for a sample of `n` points. Counts within `1e-9` of
    /// an integer are snapped to it.
    pub fn neighbor_count(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let k = match *self {
            MassParameter::Fraction(m) => {
                if !(m > 0.0 && m <= 1.0) {
                    return Err(Error::InvalidMass(format!("mass {m} not in (0, 1]")));
                }
                m * n as f64
            }
            MassParameter::Count(k) => k,
        };
        let rounded = k.round();
        let k = if (k - rounded).abs() <= 1e-9 * k.abs().max(1.0) {
            rounded
        } else {
            k
        };
        if !(k > 0.0 && k <= n as f64) {
            return Err(Error::CountOutOfRange { count: k, len: n });
        }
        Ok(k)
    }

    /// Mass fraction `m` for a sample of `n` points.
    pub fn fraction(&self, n: usize) -> Result<f64> {
        Ok(self.neighbor_count(n)? / n as f64)
    }
}

/// Points paired with nonnegative weights. `lipschitz` is the asserted
/// Lipschitz constant of the weight function (1 for distance-to-measure
/// weights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    pub ids: Vec<usize>,
    pub weights: Vec<f64>,
    pub lipschitz: f64,
}

impl WeightedPointSet {
    pub fn new(ids: Vec<usize>, weights: Vec<f64>, lipschitz: f64) -> Result<Self> {
        if ids.len() != weights.len() {
            return Err(Error::InvalidWeight(format!(
                "{} ids but {} weights",
                ids.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidWeight(format!("weight {w} is not finite and nonnegative")));
        }
        if !(lipschitz.is_finite() && lipschitz >= 0.0) {
            return Err(Error::InvalidWeight(format!("lipschitz constant {lipschitz}")));
        }
        Ok(Self {
            ids,
            weights,
            lipschitz,
        })
    }

    /// All-zero weights, i.e. the plain distance function.
    pub fn unweighted(ids: Vec<usize>) -> Self {
        let weights = vec![0.0; ids.len()];
        Self {
            ids,
            weights,
            lipschitz: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Largest `|w_p - w_q| - t * d(p, q)` over all pairs; nonpositive when the
    /// asserted Lipschitz constant holds.
    pub fn lipschitz_excess(&self, space: &MetricSpace) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for a in 0..self.len() {
            for b in (a + 1)..self.len() {
                let d = space.dist(self.ids[a], self.ids[b]);
                let excess = (self.weights[a] - self.weights[b]).abs() - self.lipschitz * d;
                worst = worst.max(excess);
            }
        }
        worst
    }
}

/// Finitely supported measure. Support ids may repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub ids: Vec<usize>,
    pub masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(ids: Vec<usize>, masses: Vec<f64>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::EmptySet);
        }
        if ids.len() != masses.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} ids but {} masses",
                ids.len(),
                masses.len()
            )));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("mass {m} is not finite and nonnegative")));
        }
        if masses.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidMeasure("zero total mass".into()));
        }
        Ok(Self { ids, masses })
    }

    /// Checks a declared total against the sum of masses (relative `1e-12`).
    pub fn with_total(ids: Vec<usize>, masses: Vec<f64>, total: f64) -> Result<Self> {
        let mu = Self::new(ids, masses)?;
        let sum = mu.total();
        if (sum - total).abs() > 1e-12 * total.abs().max(sum.abs()) {
            return Err(Error::InvalidMeasure(format!(
                "declared total {total} but masses sum to {sum}"
            )));
        }
        Ok(mu)
    }

    /// Empirical probability measure on `ids`.
    pub fn uniform(ids: Vec<usize>) -> Result<Self> {
        let n = ids.len();
        Self::new(ids, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Mean squared neighbor distance for a (possibly fractional) count `k`.
pub(crate) fn mean_square_prefix(distances: &[f64], k: f64) -> f64 {
    let whole = k.floor() as usize;
    let frac = k - k.floor();
    let mut sum: f64 = distances[..whole].iter().map(|d| d * d).sum();
    if frac > 0.0 {
        sum += frac * distances[whole] * distances[whole];
    }
    sum / k
}

/// Distance from `x` to the empirical measure on `ids`.
pub fn dtm_eval(
    space: &MetricSpace,
    ids: &[usize],
    mass: MassParameter,
    x: Query<'_>,
) -> Result<f64> {
    if ids.is_empty() {
        return Err(Error::EmptySet);
    }
    let k = mass.neighbor_count(ids.len())?;
    let nl = space.knn(ids, x, k.ceil() as usize)?;
    Ok(mean_square_prefix(&nl.distances, k).sqrt())
}

/// Distance to a general discrete measure with mass fraction `m` of its total.
pub fn dtm_measure_eval(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    m: f64,
    x: Query<'_>,
) -> Result<f64> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::InvalidMass(format!("mass {m} not in (0, 1]")));
    }
    let mut order: Vec<(f64, usize)> = measure
        .ids
        .iter()
        .enumerate()
        .map(|(slot, &id)| space.distance(x, id.into()).map(|d| (d, slot)))
        .collect::<Result<_>>()?;
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(measure.ids[a.1].cmp(&measure.ids[b.1])));
    let target = m * measure.total();
    let mut remaining = target;
    let mut sum = 0.0;
    for (d, slot) in order {
        if remaining <= 0.0 {
            break;
        }
        let take = measure.masses[slot].min(remaining);
        sum += take * d * d;
        remaining -= take;
    }
    Ok((sum / target).sqrt())
}

/// Distance-to-measure value at every sample point, as a weighted set with
/// Lipschitz constant 1.
pub fn dtm_weights(space: &MetricSpace, ids: &[usize], mass: MassParameter) -> Result<WeightedPointSet> {
    if ids.is_empty() {
        return Err(Error::EmptySet);
    }
    let k = mass.neighbor_count(ids.len())?;
    let j = k.ceil() as usize;
    let weights = ids
        .iter()
        .map(|&p| {
            let nl = space.knn(ids, Query::Id(p), j)?;
            Ok(mean_square_prefix(&nl.distances, k).sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedPointSet {
        ids: ids.to_vec(),
        weights,
        lipschitz: 1.0,
    })
}

/// `sqrt(min_p d(p, x)^2 + w_p^2)`.
pub fn power_distance_eval(space: &MetricSpace, w: &WeightedPointSet, x: Query<'_>) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = f64::INFINITY;
    for (&p, &wp) in w.ids.iter().zip(&w.weights) {
        let d = space.distance(x, p.into())?;
        best = best.min(d * d + wp * wp);
    }
    Ok(best.sqrt())
}

/// Power distance with distance-to-measure weights.
pub fn dp_eval(
    space: &MetricSpace,
    ids: &[usize],
    mass: MassParameter,
    x: Query<'_>,
) -> Result<f64> {
    let w = dtm_weights(space, ids, mass)?;
    power_distance_eval(space, &w, x)
}
