use crate::error::{Error, Result};
use crate::numeric::{mul0, GEOM_TOL};

/// A planar max-zonoid `conv{0, a^0, …, a^m}` given by its outer boundary
/// chain, listed anticlockwise from `a^0 = (z_1, 0)` on the first axis to
/// `a^m = (0, z_2)` on the second. Every edge points up-left, successive
/// edges turn left.
///
/// A dependency polygon has `a^0 = e_1`, `a^m = e_2` and lies in the unit
/// square; see [`Polygon2D::is_dependency`].
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<[f64; 2]>,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn len(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

impl Polygon2D {
    /// Validates and canonicalizes a boundary chain. Leading/trailing origins
    /// are stripped, duplicate and collinear vertices removed, and reflex
    /// vertices that sit within 1e-9 of the chord are repaired by hull;
    /// larger violations are errors.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let scale = vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(1.0_f64, |m, c| m.max(c.abs()));
        let tol = GEOM_TOL * scale;
        let mut v: Vec<[f64; 2]> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::MalformedPolygon(format!("non-finite vertex {p:?}")));
            }
            if p[0] < -tol || p[1] < -tol {
                return Err(Error::MalformedPolygon(format!("vertex {p:?} outside the nonnegative quadrant")));
            }
            v.push([p[0].max(0.0), p[1].max(0.0)]);
        }
        while v.first().is_some_and(|p| p[0] <= tol && p[1] <= tol) {
            v.remove(0);
        }
        while v.last().is_some_and(|p| p[0] <= tol && p[1] <= tol) {
            v.pop();
        }
        v.dedup_by(|b, a| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol);
        if v.len() < 2 {
            return Err(Error::MalformedPolygon("need at least a vertex on each axis".into()));
        }
        let first = v[0];
        let last = v[v.len() - 1];
        if first[1] > tol || first[0] <= tol {
            return Err(Error::MalformedPolygon(format!("first vertex {first:?} must lie on the positive first axis")));
        }
        if last[0] > tol || last[1] <= tol {
            return Err(Error::MalformedPolygon(format!("last vertex {last:?} must lie on the positive second axis")));
        }
        v[0][1] = 0.0;
        let n = v.len();
        v[n - 1][0] = 0.0;
        for w in v.windows(2) {
            let e = sub(w[1], w[0]);
            if e[0] > tol || e[1] < -tol {
                return Err(Error::MalformedPolygon(format!(
                    "edge {:?} -> {:?} is not monotone (x must decrease, y increase)",
                    w[0], w[1]
                )));
            }
        }
        // Remove collinear vertices and repair tiny reflex ones.
        loop {
            let mut changed = false;
            let mut i = 1;
            while i + 1 < v.len() {
                let a = v[i - 1];
                let b = v[i];
                let c = v[i + 1];
                let chord = sub(c, a);
                let chord_len = len(chord);
                let turn = cross(sub(b, a), sub(c, b));
                // distance of b from the chord a–c
                let offset = cross(chord, sub(b, a)) / chord_len.max(f64::MIN_POSITIVE);
                if turn.abs() <= tol * len(sub(b, a)) * len(sub(c, b)) || offset.abs() <= tol {
                    v.remove(i);
                    changed = true;
                    continue;
                }
                if turn < 0.0 {
                    return Err(Error::MalformedPolygon(format!("vertex {b:?} is reflex (not convex)")));
                }
                i += 1;
            }
            if !changed {
                break;
            }
        }
        Ok(Polygon2D { vertices: v })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Unit square `[0,1]²`.
    pub fn unit_square() -> Self {
        Polygon2D { vertices: vec![[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] }
    }

    /// Unit cross-polytope `conv{0, e_1, e_2}`.
    pub fn unit_cross() -> Self {
        Polygon2D { vertices: vec![[1.0, 0.0], [0.0, 1.0]] }
    }

    /// Extents `(z_1, z_2)`; the support values at `e_1`, `e_2`.
    pub fn extents(&self) -> [f64; 2] {
        [self.vertices[0][0], self.vertices[self.vertices.len() - 1][1]]
    }

    /// Whether `a^0 = e_1`, `a^m = e_2` and the polygon lies in the unit square.
    pub fn is_dependency(&self) -> bool {
        let [z1, z2] = self.extents();
        (z1 - 1.0).abs() <= GEOM_TOL
            && (z2 - 1.0).abs() <= GEOM_TOL
            && self.vertices.iter().all(|v| v[0] <= 1.0 + GEOM_TOL && v[1] <= 1.0 + GEOM_TOL)
    }

    /// `h(P, x) = max(0, max_v ⟨v, x⟩)` for `x` in the orthant (entries may be `+∞`).
    pub fn support(&self, x: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| mul0(v[0], x[0]) + mul0(v[1], x[1]))
            .fold(0.0, f64::max)
    }

    /// Coordinatewise maxima over the support set `F(P, x)`.
    pub fn support_gradient(&self, x: &[f64]) -> [f64; 2] {
        let h = self.support(x);
        let slack = GEOM_TOL * h.max(1e-300);
        let mut y = [0.0_f64, 0.0];
        for v in &self.vertices {
            if mul0(v[0], x[0]) + mul0(v[1], x[1]) >= h - slack {
                y[0] = y[0].max(v[0]);
                y[1] = y[1].max(v[1]);
            }
        }
        y
    }

    /// Area of `conv{0, a^0, …, a^m}` (shoelace).
    pub fn area(&self) -> f64 {
        0.5 * self.vertices.windows(2).map(|w| cross(w[0], w[1])).sum::<f64>()
    }

    /// Outward edge normals (unnormalized), one per edge.
    pub fn edge_normals(&self) -> Vec<[f64; 2]> {
        self.vertices
            .windows(2)
            .map(|w| {
                let e = sub(w[1], w[0]);
                [e[1], -e[0]]
            })
            .collect()
    }

    /// Simplex parameters `t` at which `(t, 1−t)` is an edge normal; the
    /// support function restricted to the simplex has its kinks there.
    pub fn kink_parameters(&self) -> Vec<f64> {
        self.edge_normals()
            .into_iter()
            .map(|n| n[0] / (n[0] + n[1]))
            .collect()
    }

    /// Polar set `{x ∈ E : h(P, x) ≤ 1}`. Each edge of `P` with outward
    /// normal `n` becomes the polar vertex `n / h(P, n)`; the axis vertices are
    /// `(1/z_1, 0)` and `(0, 1/z_2)`.
    pub fn polar(&self) -> Polygon2D {
        let [z1, z2] = self.extents();
        let mut out = Vec::with_capacity(self.vertices.len() + 2);
        out.push([1.0 / z1, 0.0]);
        for (k, n) in self.edge_normals().into_iter().enumerate() {
            let hn = n[0] * self.vertices[k + 1][0] + n[1] * self.vertices[k + 1][1];
            out.push([n[0] / hn, n[1] / hn]);
        }
        out.push([0.0, 1.0 / z2]);
        Polygon2D::new(out).expect("polar of a valid polygon is valid")
    }

    /// `{(λ_1 x_1, λ_2 x_2) : x ∈ P}` for positive `λ`.
    pub fn scaled(&self, lambda: [f64; 2]) -> Polygon2D {
        Polygon2D {
            vertices: self.vertices.iter().map(|v| [v[0] * lambda[0], v[1] * lambda[1]]).collect(),
        }
    }

    /// Down-closed convex hull `conv{0, p, (p_1, 0), (0, p_2) : p ∈ points}`.
    pub fn from_points_downclosed(points: &[[f64; 2]]) -> Result<Polygon2D> {
        let mut pts: Vec<[f64; 2]> = Vec::with_capacity(3 * points.len() + 1);
        pts.push([0.0, 0.0]);
        for p in points {
            if !(p[0] >= 0.0 && p[1] >= 0.0) || !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::MalformedPolygon(format!("point {p:?} outside the nonnegative quadrant")));
            }
            pts.push(*p);
            pts.push([p[0], 0.0]);
            pts.push([0.0, p[1]]);
        }
        let hull = convex_hull(pts);
        // hull is anticlockwise starting at the origin (lowest-leftmost point)
        let start = hull.iter().position(|p| p[0] > 0.0 || p[1] > 0.0).ok_or_else(|| {
            Error::MalformedPolygon("points span no area".into())
        })?;
        let chain: Vec<[f64; 2]> = hull[start..].to_vec();
        Polygon2D::new(chain)
    }

    /// Convex hull of the union.
    pub fn hull(&self, other: &Polygon2D) -> Polygon2D {
        let mut pts = self.vertices.clone();
        pts.extend_from_slice(&other.vertices);
        Polygon2D::from_points_downclosed(&pts).expect("hull of valid polygons is valid")
    }

    /// Intersection, by clipping the closed polygon of `self` against each
    /// boundary edge of `other`.
    pub fn intersection(&self, other: &Polygon2D) -> Polygon2D {
        let mut subject: Vec<[f64; 2]> = std::iter::once([0.0, 0.0]).chain(self.vertices.iter().copied()).collect();
        for w in other.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let inside = |p: [f64; 2]| cross(sub(b, a), sub(p, a)) >= -1e-15;
            let mut clipped = Vec::with_capacity(subject.len() + 2);
            for i in 0..subject.len() {
                let cur = subject[i];
                let prev = subject[(i + subject.len() - 1) % subject.len()];
                let (ci, pi) = (inside(cur), inside(prev));
                if ci != pi {
                    let d1 = cross(sub(b, a), sub(prev, a));
                    let d2 = cross(sub(b, a), sub(cur, a));
                    let t = d1 / (d1 - d2);
                    clipped.push([prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])]);
                }
                if ci {
                    clipped.push(cur);
                }
            }
            subject = clipped;
        }
        Polygon2D::from_points_downclosed(&subject).expect("intersection of polygons containing a cross-polytope is valid")
    }

    /// Supporting-line envelope `{x ∈ E : ⟨x, u_j⟩ ≤ h_j}` of support values
    /// given at orthant directions. Both axis directions must be present.
    pub fn from_support_values(directions: &[[f64; 2]], values: &[f64]) -> Result<Polygon2D> {
        if directions.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: directions.len(), found: values.len() });
        }
        let mut has_axis = [false, false];
        let mut dual = Vec::with_capacity(directions.len());
        for (u, &h) in directions.iter().zip(values) {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter(format!("support value {h} must be positive and finite")));
            }
            if u[1] == 0.0 && u[0] > 0.0 {
                has_axis[0] = true;
            }
            if u[0] == 0.0 && u[1] > 0.0 {
                has_axis[1] = true;
            }
            dual.push([u[0] / h, u[1] / h]);
        }
        if !(has_axis[0] && has_axis[1]) {
            return Err(Error::InvalidParameter("envelope is unbounded: both axis directions are required".into()));
        }
        Ok(Polygon2D::from_points_downclosed(&dual)?.polar())
    }
}

/// Andrew's monotone chain; anticlockwise, starting at the lexicographically
/// smallest point, collinear points dropped.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(sub(lower[lower.len() - 1], lower[lower.len() - 2]), sub(p, lower[lower.len() - 2])) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(sub(upper[upper.len() - 1], upper[upper.len() - 2]), sub(p, upper[upper.len() - 2])) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
