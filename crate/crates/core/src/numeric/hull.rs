/// Upper concave envelope of a sampled function, linearly interpolated.
#[derive(Debug, Clone)]
pub struct ConcaveEnvelope {
    vertices: Vec<(f64, f64)>,
}

/// Monotone-chain upper hull of points sorted by abscissa.
pub fn upper_concave_envelope(xs: &[f64], ys: &[f64]) -> ConcaveEnvelope {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys) {
        while hull.len() >= 2 {
            let (ax, ay) = hull[hull.len() - 2];
            let (bx, by) = hull[hull.len() - 1];
            // pop b when it lies on or below the chord a -> (x, y)
            let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    ConcaveEnvelope { vertices: hull }
}

impl ConcaveEnvelope {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Evaluate by linear interpolation; clamps outside the sampled range.
    pub fn eval(&self, x: f64) -> f64 {
        let v = &self.vertices;
        if x <= v[0].0 {
            return v[0].1;
        }
        if x >= v[v.len() - 1].0 {
            return v[v.len() - 1].1;
        }
        let j = v.partition_point(|p| p.0 <= x);
        let (x0, y0) = v[j - 1];
        let (x1, y1) = v[j];
        if x1 == x0 {
            return y0.max(y1);
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}
