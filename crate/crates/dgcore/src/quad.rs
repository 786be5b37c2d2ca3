//! Mapped quadrature on mesh entities: centroid-fan triangles for cells,
//! Gauss–Legendre for faces. Weights carry all Jacobians, so integrals are
//! plain weighted sums at the returned physical points.

use crate::DgError;
use geomkit::{quadrature, Point};
use polymesh::PolyMesh;

#[derive(Debug, Clone)]
pub struct MappedQuadrature {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl MappedQuadrature {
    pub fn integrate<F: FnMut(Point) -> f64>(&self, mut f: F) -> f64 {
        let mut s = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            s += w * f(*p);
        }
        s
    }
}

/// Quadrature over a cell, exact to `degree`, via the centroid fan.
pub fn cell_quadrature(mesh: &PolyMesh, cell: usize, degree: usize) -> Result<MappedQuadrature, DgError> {
    let rule = quadrature::triangle_quadrature(degree)?;
    let tris = mesh.subtriangulate(cell);
    let mut points = Vec::with_capacity(rule.points.len() * tris.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for t in &tris {
        let jac = (t[1] - t[0]).cross(t[2] - t[0]); // 2 |T|
        for (q, w) in rule.points.iter().zip(&rule.weights) {
            points.push(Point::new(
                t[0].x + q[0] * (t[1].x - t[0].x) + q[1] * (t[2].x - t[0].x),
                t[0].y + q[0] * (t[1].y - t[0].y) + q[1] * (t[2].y - t[0].y),
            ));
            weights.push(w * jac);
        }
    }
    Ok(MappedQuadrature { points, weights })
}

/// Quadrature along a face segment, exact to `degree`.
pub fn face_quadrature(mesh: &PolyMesh, face: usize, degree: usize) -> Result<MappedQuadrature, DgError> {
    let rule = quadrature::segment_quadrature(degree)?;
    let f = &mesh.faces[face];
    let a = mesh.vertices[f.a];
    let b = mesh.vertices[f.b];
    let half = 0.5 * f.length;
    let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let dir = Point::new(0.5 * (b.x - a.x), 0.5 * (b.y - a.y));
    let points = rule.points.iter().map(|&t| mid + dir.scale(t)).collect();
    let weights = rule.weights.iter().map(|&w| w * half).collect();
    Ok(MappedQuadrature { points, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use geomkit::Rect;
    use polymesh::generate_voronoi_mesh;

    #[test]
    fn cell_rule_integrates_area_and_moments() {
        let mesh = generate_voronoi_mesh(&Rect::UNIT, 20, 3, 5).unwrap();
        let mut total = 0.0;
        for c in 0..mesh.n_cells() {
            let q = cell_quadrature(&mesh, c, 4).unwrap();
            let a = q.integrate(|_| 1.0);
            assert!((a - mesh.cell_area[c]).abs() < 1e-13 * mesh.cell_area[c].max(1e-3));
            total += a;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn face_rule_integrates_length_and_linears() {
        let mesh = generate_voronoi_mesh(&Rect::UNIT, 12, 9, 5).unwrap();
        for id in 0..mesh.faces.len() {
            let q = face_quadrature(&mesh, id, 3).unwrap();
            let len = q.integrate(|_| 1.0);
            assert!((len - mesh.faces[id].length).abs() < 1e-13);
            // ∫_F x ds equals length times midpoint x
            let mx = q.integrate(|p| p.x);
            let mid = mesh.faces[id].midpoint(&mesh);
            assert!((mx - mid.x * mesh.faces[id].length).abs() < 1e-13);
        }
    }
}
