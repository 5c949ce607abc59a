//! The training collocation set and its invariants.

use crate::domain::Point;
use crate::error::{Error, Result};

/// Collocation points used in the residual loss: interior, distinct, and at
/// most `capacity` of them.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    points: Vec<Point>,
    capacity: usize,
}

impl TrainingSet {
    pub fn new(points: Vec<Point>, capacity: usize) -> Result<Self> {
        if points.len() > capacity {
            return Err(Error::Argument(format!(
                "{} points exceed capacity {capacity}",
                points.len()
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() || !p.is_interior() {
                return Err(Error::Argument(format!(
                    "point {i} ({}, {}) is not in the open interior",
                    p.x, p.t
                )));
            }
        }
        if has_duplicates(&points) {
            return Err(Error::Argument("training set has duplicate points".into()));
        }
        Ok(TrainingSet { points, capacity })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.iter().any(|q| q.x == p.x && q.t == p.t)
    }

    /// Replace the whole set, re-validating invariants.
    pub fn replace(&mut self, points: Vec<Point>) -> Result<()> {
        *self = TrainingSet::new(points, self.capacity)?;
        Ok(())
    }

    /// Append points, growing capacity (used by the growing-set strategies).
    pub fn append(&mut self, new_points: &[Point]) -> Result<()> {
        let mut points = self.points.clone();
        points.extend_from_slice(new_points);
        let capacity = self.capacity.max(points.len());
        *self = TrainingSet::new(points, capacity)?;
        Ok(())
    }

    /// Remove the points at `remove` (indices into the current set) and add
    /// `add`, keeping the size fixed.
    pub fn swap_points(&mut self, remove: &[usize], add: &[Point]) -> Result<()> {
        if remove.len() != add.len() {
            return Err(Error::Argument(format!(
                "swap of {} removals vs {} additions would change the set size",
                remove.len(),
                add.len()
            )));
        }
        let mut drop_flags = vec![false; self.points.len()];
        for &i in remove {
            if i >= self.points.len() {
                return Err(Error::Argument(format!("remove index {i} out of range")));
            }
            drop_flags[i] = true;
        }
        let mut points: Vec<Point> = self
            .points
            .iter()
            .zip(&drop_flags)
            .filter_map(|(p, &d)| (!d).then_some(*p))
            .collect();
        points.extend_from_slice(add);
        *self = TrainingSet::new(points, self.capacity)?;
        Ok(())
    }
}

/// Sort-based duplicate detection; exact coordinate equality.
fn has_duplicates(points: &[Point]) -> bool {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        points[a]
            .x
            .partial_cmp(&points[b].x)
            .unwrap()
            .then(points[a].t.partial_cmp(&points[b].t).unwrap())
    });
    order.windows(2).any(|w| {
        let (a, b) = (points[w[0]], points[w[1]]);
        a.x == b.x && a.t == b.t
    })
}
