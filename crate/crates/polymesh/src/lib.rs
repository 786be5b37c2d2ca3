//! Convex polygonal meshes: Voronoi generation with Lloyd relaxation,
//! hierarchies of mutually independent meshes with a fixed coarsening ratio,
//! face topology extraction, and mesh-quality diagnostics.

pub mod hierarchy;
pub mod io;
mod prng;
pub mod quality;
pub mod voronoi;

pub use hierarchy::{build_hierarchy, build_hierarchy_with_lloyd, MeshHierarchy};
pub use quality::{check_assumptions, MeshQualityReport};
pub use voronoi::{generate_voronoi_mesh, voronoi_from_generators};

use geomkit::{ConvexPolygon, Point, Rect};

/// Index marking a boundary face's missing neighbor in error messages.
pub const BOUNDARY: &str = "boundary";

#[derive(Debug, Clone)]
pub enum MeshError {
    DegenerateDomain,
    InvalidCellCount,
    DegenerateCell { cell: usize, area: f64 },
    GenerationFailed { attempts: usize },
    Topology(String),
    InvalidMesh(String),
    HierarchyTooDeep { n_finest: usize, n_levels: usize },
    Io(String),
    Parse(String),
}

impl std::fmt::Display for MeshError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeshError::DegenerateDomain => write!(f, "degenerate domain rectangle"),
            MeshError::InvalidCellCount => write!(f, "cell count must be at least 1"),
            MeshError::DegenerateCell { cell, area } => {
                write!(f, "degenerate Voronoi cell {cell} (area {area:.3e})")
            }
            MeshError::GenerationFailed { attempts } => {
                write!(f, "mesh generation failed after {attempts} attempts")
            }
            MeshError::Topology(msg) => write!(f, "topology error: {msg}"),
            MeshError::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            MeshError::HierarchyTooDeep { n_finest, n_levels } => write!(
                f,
                "{n_finest} finest cells cannot support {n_levels} levels at ratio 1/4"
            ),
            MeshError::Io(msg) => write!(f, "i/o error: {msg}"),
            MeshError::Parse(msg) => write!(f, "mesh parse error: {msg}"),
        }
    }
}

impl std::error::Error for MeshError {}

/// An oriented mesh face (a segment between two vertices).
#[derive(Debug, Clone)]
pub struct Face {
    pub a: usize,
    pub b: usize,
    pub owner: usize,
    /// `None` for boundary faces.
    pub neighbor: Option<usize>,
    /// Unit normal pointing from owner to neighbor (outward on the boundary).
    pub normal: Point,
    pub length: f64,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }

    pub fn midpoint(&self, mesh: &PolyMesh) -> Point {
        let pa = mesh.vertices[self.a];
        let pb = mesh.vertices[self.b];
        Point::new(0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y))
    }
}

/// A planar tessellation of an axis-aligned rectangle into convex cells.
///
/// Immutable once built; faces are populated by [`PolyMesh::extract_faces`].
#[derive(Debug, Clone)]
pub struct PolyMesh {
    pub domain: Rect,
    pub vertices: Vec<Point>,
    /// CCW vertex-index loops, one per cell.
    pub cells: Vec<Vec<usize>>,
    pub faces: Vec<Face>,
    /// Face ids incident to each cell (filled by `extract_faces`).
    pub cell_faces: Vec<Vec<usize>>,
    pub cell_area: Vec<f64>,
    pub cell_diameter: Vec<f64>,
    pub cell_centroid: Vec<Point>,
    pub cell_bbox: Vec<Rect>,
}

impl PolyMesh {
    /// Build from a deduplicated vertex table and CCW index loops; validates
    /// convexity, orientation and the area partition.
    pub fn from_cells(
        domain: Rect,
        vertices: Vec<Point>,
        cells: Vec<Vec<usize>>,
    ) -> Result<Self, MeshError> {
        if domain.is_degenerate() {
            return Err(MeshError::DegenerateDomain);
        }
        let n = cells.len();
        let mut mesh = PolyMesh {
            domain,
            vertices,
            cells,
            faces: Vec::new(),
            cell_faces: Vec::new(),
            cell_area: Vec::with_capacity(n),
            cell_diameter: Vec::with_capacity(n),
            cell_centroid: Vec::with_capacity(n),
            cell_bbox: Vec::with_capacity(n),
        };
        for c in 0..n {
            let poly = mesh.cell_polygon(c);
            if poly.is_empty() {
                return Err(MeshError::DegenerateCell { cell: c, area: 0.0 });
            }
            if !poly.is_ccw_convex() {
                return Err(MeshError::InvalidMesh(format!(
                    "cell {c} is not a CCW convex loop"
                )));
            }
            let area = poly.area();
            if area <= 0.0 {
                return Err(MeshError::DegenerateCell { cell: c, area });
            }
            mesh.cell_area.push(area);
            mesh.cell_diameter.push(poly.diameter());
            mesh.cell_centroid.push(poly.centroid());
            mesh.cell_bbox.push(poly.bbox());
        }
        let total: f64 = mesh.cell_area.iter().sum();
        let expected = domain.area();
        if (total - expected).abs() > 1e-12 * expected {
            return Err(MeshError::InvalidMesh(format!(
                "cell areas sum to {total:.17}, domain area is {expected:.17}"
            )));
        }
        Ok(mesh)
    }

    /// Build from raw per-cell point loops: vertices shared between cells are
    /// identified within `1e-12 * diagonal`, which also collapses degenerate
    /// short edges consistently on both sides.
    pub fn from_loops(domain: Rect, loops: &[Vec<Point>]) -> Result<Self, MeshError> {
        let eps = 1e-12 * domain.diagonal();
        let merged = merge_vertices(loops, eps);
        let (vertices, raw_cells) = merged;
        let mut cells = Vec::with_capacity(raw_cells.len());
        for (c, loop_idx) in raw_cells.into_iter().enumerate() {
            let mut cleaned: Vec<usize> = Vec::with_capacity(loop_idx.len());
            for idx in loop_idx {
                if cleaned.last() != Some(&idx) {
                    cleaned.push(idx);
                }
            }
            while cleaned.len() > 1 && cleaned.first() == cleaned.last() {
                cleaned.pop();
            }
            if cleaned.len() < 3 {
                return Err(MeshError::DegenerateCell { cell: c, area: 0.0 });
            }
            cells.push(cleaned);
        }
        Self::from_cells(domain, vertices, cells)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_polygon(&self, c: usize) -> ConvexPolygon {
        ConvexPolygon::new(self.cells[c].iter().map(|&i| self.vertices[i]).collect())
    }

    /// Mesh size h = max cell diameter.
    pub fn h_max(&self) -> f64 {
        self.cell_diameter.iter().fold(0.0f64, |m, &d| m.max(d))
    }

    pub fn total_area(&self) -> f64 {
        self.cell_area.iter().sum()
    }

    pub fn faces_extracted(&self) -> bool {
        !self.faces.is_empty()
    }

    /// Fan triangulation of a convex cell from its centroid. Triangle areas
    /// sum to the cell area (shoelace) up to round-off.
    pub fn subtriangulate(&self, c: usize) -> Vec<[Point; 3]> {
        let loop_idx = &self.cells[c];
        let centroid = self.cell_centroid[c];
        let n = loop_idx.len();
        (0..n)
            .map(|i| {
                [
                    centroid,
                    self.vertices[loop_idx[i]],
                    self.vertices[loop_idx[(i + 1) % n]],
                ]
            })
            .collect()
    }

    /// Classify every cell edge as interior (shared by exactly two cells) or
    /// boundary (on the domain rectangle) and orient normals owner→neighbor.
    pub fn extract_faces(&mut self) -> Result<(), MeshError> {
        let tol = 1e-10 * self.domain.diagonal();
        let mut edge_map: std::collections::BTreeMap<(usize, usize), Vec<(usize, usize, usize)>> =
            std::collections::BTreeMap::new();
        for (c, loop_idx) in self.cells.iter().enumerate() {
            let n = loop_idx.len();
            for i in 0..n {
                let a = loop_idx[i];
                let b = loop_idx[(i + 1) % n];
                if a == b {
                    return Err(MeshError::Topology(format!("cell {c} has a zero edge")));
                }
                let key = (a.min(b), a.max(b));
                edge_map.entry(key).or_default().push((c, a, b));
            }
        }
        let mut faces = Vec::with_capacity(edge_map.len());
        let mut cell_faces = vec![Vec::new(); self.n_cells()];
        for ((lo, hi), users) in edge_map {
            if users.len() > 2 {
                return Err(MeshError::Topology(format!(
                    "edge ({lo},{hi}) is shared by {} cells",
                    users.len()
                )));
            }
            let (owner, a, b) = users[0];
            let pa = self.vertices[a];
            let pb = self.vertices[b];
            let t = pb - pa;
            let length = t.norm();
            if length <= tol {
                return Err(MeshError::Topology(format!(
                    "edge ({lo},{hi}) on cell {owner} has near-zero length {length:.3e}"
                )));
            }
            let normal = Point::new(t.y / length, -t.x / length);
            let neighbor = if users.len() == 2 {
                let (nbr, na, nb) = users[1];
                if (na, nb) != (b, a) {
                    return Err(MeshError::Topology(format!(
                        "edge ({lo},{hi}) traversed in the same direction by cells {owner} and {nbr}"
                    )));
                }
                Some(nbr)
            } else {
                // Unmatched edge: must lie on the domain boundary.
                if !on_rect_boundary(&self.domain, pa, tol) || !on_rect_boundary(&self.domain, pb, tol)
                {
                    return Err(MeshError::Topology(format!(
                        "unmatched interior edge ({lo},{hi}) of cell {owner}; nearest neighbor edge is farther than {tol:.1e} (neighbor: {BOUNDARY}?)"
                    )));
                }
                None
            };
            let id = faces.len();
            cell_faces[owner].push(id);
            if let Some(nbr) = neighbor {
                cell_faces[nbr].push(id);
            }
            faces.push(Face { a, b, owner, neighbor, normal, length });
        }
        self.faces = faces;
        self.cell_faces = cell_faces;
        Ok(())
    }

    pub fn n_interior_faces(&self) -> usize {
        self.faces.iter().filter(|f| !f.is_boundary()).count()
    }

    pub fn n_boundary_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.is_boundary()).count()
    }

    /// Topological and geometric audit: Euler relation, mutual adjacency,
    /// unit owner→neighbor normals, area partition.
    pub fn audit(&self) -> Result<(), MeshError> {
        if !self.faces_extracted() {
            return Err(MeshError::Topology("faces not extracted".into()));
        }
        let v = self.n_vertices() as i64;
        let e = self.faces.len() as i64;
        let c = self.n_cells() as i64;
        if v - e + c != 1 {
            return Err(MeshError::Topology(format!(
                "Euler relation violated: V={v} E={e} C={c}, V-E+C={}",
                v - e + c
            )));
        }
        for (id, f) in self.faces.iter().enumerate() {
            if (f.normal.norm() - 1.0).abs() > 1e-12 {
                return Err(MeshError::Topology(format!("face {id} normal is not unit")));
            }
            let to = match f.neighbor {
                Some(nbr) => self.cell_centroid[nbr] - self.cell_centroid[f.owner],
                None => self.faces[id].midpoint(self) - self.cell_centroid[f.owner],
            };
            if f.normal.dot(to) <= 0.0 {
                return Err(MeshError::Topology(format!(
                    "face {id} normal does not point owner→neighbor"
                )));
            }
            if let Some(nbr) = f.neighbor {
                if !self.cell_faces[nbr].contains(&id) || !self.cell_faces[f.owner].contains(&id) {
                    return Err(MeshError::Topology(format!(
                        "face {id} missing from incident cell lists"
                    )));
                }
            }
        }
        let total = self.total_area();
        let expected = self.domain.area();
        if (total - expected).abs() > 1e-12 * expected {
            return Err(MeshError::InvalidMesh(format!(
                "area partition violated: {total} vs {expected}"
            )));
        }
        Ok(())
    }
}

fn on_rect_boundary(r: &Rect, p: Point, tol: f64) -> bool {
    let on_x = (p.x - r.x0).abs() <= tol || (p.x - r.x1).abs() <= tol;
    let on_y = (p.y - r.y0).abs() <= tol || (p.y - r.y1).abs() <= tol;
    (on_x && p.y >= r.y0 - tol && p.y <= r.y1 + tol)
        || (on_y && p.x >= r.x0 - tol && p.x <= r.x1 + tol)
}

/// Identify points within `eps` across all loops (union-find over a bucket
/// grid) and return the compact vertex table plus index loops.
fn merge_vertices(loops: &[Vec<Point>], eps: f64) -> (Vec<Point>, Vec<Vec<usize>>) {
    let all: Vec<Point> = loops.iter().flatten().copied().collect();
    let n = all.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    // Bucket by eps-sized squares; compare against the 3x3 neighborhood.
    let key = |p: Point| -> (i64, i64) {
        ((p.x / eps).floor() as i64, (p.y / eps).floor() as i64)
    };
    let mut buckets: std::collections::BTreeMap<(i64, i64), Vec<usize>> =
        std::collections::BTreeMap::new();
    for (i, p) in all.iter().enumerate() {
        buckets.entry(key(*p)).or_default().push(i);
    }
    for (i, p) in all.iter().enumerate() {
        let (kx, ky) = key(*p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        if j < i && all[j].dist(*p) <= eps {
                            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                            if ri != rj {
                                // Smaller index wins so representatives are stable.
                                let (lo, hi) = (ri.min(rj), ri.max(rj));
                                parent[hi] = lo;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut compact: Vec<usize> = vec![usize::MAX; n];
    let mut vertices: Vec<Point> = Vec::new();
    let mut flat = 0usize;
    let mut out_loops = Vec::with_capacity(loops.len());
    for l in loops {
        let mut idx_loop = Vec::with_capacity(l.len());
        for _ in 0..l.len() {
            let root = find(&mut parent, flat);
            if compact[root] == usize::MAX {
                compact[root] = vertices.len();
                vertices.push(all[root]);
            }
            idx_loop.push(compact[root]);
            flat += 1;
        }
        out_loops.push(idx_loop);
    }
    (vertices, out_loops)
}
