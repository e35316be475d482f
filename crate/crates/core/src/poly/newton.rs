use num_rational::Ratio;
use serde::Serialize;

use super::{Poly, PolyError, Ring};
use crate::arith::Val;

/// One edge of a lower convex hull, from `start` to `end` (x, y).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: (usize, i64),
    pub end: (usize, i64),
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end.0 - self.start.0
    }

    pub fn slope(&self) -> Ratio<i64> {
        Ratio::new(self.end.1 - self.start.1, self.length() as i64)
    }

    /// Denominator of the slope in lowest terms.
    pub fn ramification(&self) -> usize {
        *self.slope().denom() as usize
    }

    /// Number of lattice steps `length / e`.
    pub fn degree(&self) -> usize {
        self.length() / self.ramification()
    }
}

/// Lower convex hull of the points `(i, v_i)` with finite `v_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    pub fn slopes(&self) -> Vec<Ratio<i64>> {
        self.segments.iter().map(Segment::slope).collect()
    }

    /// Valuations of roots with multiplicity, for a polynomial indexed by
    /// ascending degree: a segment of slope σ and length ℓ gives ℓ roots of
    /// valuation -σ.
    pub fn root_valuations(&self) -> Vec<(Ratio<i64>, usize)> {
        self.segments.iter().map(|s| (-s.slope(), s.length())).collect()
    }
}

/// Newton polygon of points `(i, vals[i])`; infinite values are skipped.
pub fn newton_polygon(vals: &[Val]) -> Result<NewtonPolygon, PolyError> {
    let pts: Vec<(usize, i64)> = vals.iter().enumerate().filter_map(|(i, v)| v.finite().map(|y| (i, y))).collect();
    if pts.is_empty() {
        return Err(PolyError::Zero);
    }
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b if it lies on or above segment a -> p
            let cross = (b.0 as i128 - a.0 as i128) * (p.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (p.0 as i128 - a.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let segments = hull.windows(2).map(|w| Segment { start: w[0], end: w[1] }).collect();
    Ok(NewtonPolygon { segments })
}

/// Newton polygon of a polynomial under a valuation on its coefficients.
pub fn newton_polygon_of<R: Ring>(f: &Poly<R>, val: impl Fn(&R) -> Val) -> Result<NewtonPolygon, PolyError> {
    let vals: Vec<Val> = f.coeffs().iter().map(val).collect();
    newton_polygon(&vals)
}
