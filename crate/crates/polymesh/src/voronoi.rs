//! Voronoi tessellation of a rectangle by half-plane clipping, with Lloyd
//! relaxation towards a centroidal diagram.
//!
//! Each cell starts as the domain rectangle and is clipped against the
//! perpendicular bisectors of its generator with nearby generators, visited
//! in order of increasing distance. Once the next candidate is farther than
//! twice the current max vertex distance its bisector cannot cut, and the
//! cell is final. A bucket grid supplies candidates ring by ring, so the
//! whole diagram costs roughly O(n) per Lloyd sweep at uniform density.

use crate::prng::SplitMix64;
use crate::{MeshError, PolyMesh};
use geomkit::polygon::clip_halfplane;
use geomkit::{ConvexPolygon, Point, Rect};

/// Cells with area below `1e-14 * |domain|` are treated as degenerate.
const DEGENERATE_AREA_REL: f64 = 1e-14;

struct BucketGrid {
    nx: usize,
    ny: usize,
    bw: f64,
    bh: f64,
    origin: Point,
    buckets: Vec<Vec<u32>>,
}

impl BucketGrid {
    fn build(domain: &Rect, pts: &[Point]) -> Self {
        let n = pts.len().max(1);
        let aspect = domain.width() / domain.height();
        let nx = ((n as f64 * aspect).sqrt().ceil() as usize).max(1);
        let ny = n.div_ceil(nx).max(1);
        let bw = domain.width() / nx as f64;
        let bh = domain.height() / ny as f64;
        let origin = Point::new(domain.x0, domain.y0);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, p) in pts.iter().enumerate() {
            let bx = (((p.x - origin.x) / bw) as usize).min(nx - 1);
            let by = (((p.y - origin.y) / bh) as usize).min(ny - 1);
            buckets[by * nx + bx].push(i as u32);
        }
        BucketGrid { nx, ny, bw, bh, origin, buckets }
    }

    fn bucket_of(&self, p: Point) -> (i64, i64) {
        let bx = (((p.x - self.origin.x) / self.bw) as i64).clamp(0, self.nx as i64 - 1);
        let by = (((p.y - self.origin.y) / self.bh) as i64).clamp(0, self.ny as i64 - 1);
        (bx, by)
    }

    /// Indices stored in the Chebyshev ring of radius `r` around `(bx, by)`.
    fn ring(&self, bx: i64, by: i64, r: i64, out: &mut Vec<u32>) {
        out.clear();
        let push = |out: &mut Vec<u32>, x: i64, y: i64, grid: &BucketGrid| {
            if x >= 0 && y >= 0 && (x as usize) < grid.nx && (y as usize) < grid.ny {
                out.extend_from_slice(&grid.buckets[y as usize * grid.nx + x as usize]);
            }
        };
        if r == 0 {
            push(out, bx, by, self);
            return;
        }
        for x in (bx - r)..=(bx + r) {
            push(out, x, by - r, self);
            push(out, x, by + r, self);
        }
        for y in (by - r + 1)..=(by + r - 1) {
            push(out, bx - r, y, self);
            push(out, bx + r, y, self);
        }
    }

    fn max_rings(&self) -> i64 {
        self.nx.max(self.ny) as i64
    }

    fn min_bucket_dim(&self) -> f64 {
        self.bw.min(self.bh)
    }
}

fn max_dist2(from: Point, poly: &[Point]) -> f64 {
    poly.iter().fold(0.0f64, |m, p| {
        let d = *p - from;
        m.max(d.dot(d))
    })
}

/// Clipped Voronoi cells of `gens` inside `domain`, in generator order.
fn voronoi_cells(domain: &Rect, gens: &[Point]) -> Result<Vec<Vec<Point>>, MeshError> {
    let grid = BucketGrid::build(domain, gens);
    let min_area = DEGENERATE_AREA_REL * domain.area();
    let mut cells = Vec::with_capacity(gens.len());
    let mut ring_buf: Vec<u32> = Vec::new();
    let mut cand: Vec<(f64, u32)> = Vec::new();
    for (i, &g) in gens.iter().enumerate() {
        let mut poly: Vec<Point> = domain.corners().to_vec();
        let mut r2 = max_dist2(g, &poly);
        let (bx, by) = grid.bucket_of(g);
        let mut ring = 0i64;
        while ring <= grid.max_rings() {
            let lower = (ring - 1).max(0) as f64 * grid.min_bucket_dim();
            if lower * lower > 4.0 * r2 {
                break;
            }
            grid.ring(bx, by, ring, &mut ring_buf);
            cand.clear();
            for &j in &ring_buf {
                if j as usize == i {
                    continue;
                }
                let d = gens[j as usize] - g;
                cand.push((d.dot(d), j));
            }
            cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(d2, j) in cand.iter() {
                if d2 > 4.0 * r2 {
                    break;
                }
                let other = gens[j as usize];
                let n = other - g;
                let mid = Point::new(0.5 * (g.x + other.x), 0.5 * (g.y + other.y));
                poly = clip_halfplane(&poly, n, n.dot(mid));
                if poly.len() < 3 {
                    return Err(MeshError::DegenerateCell { cell: i, area: 0.0 });
                }
                r2 = max_dist2(g, &poly);
            }
            ring += 1;
        }
        let area = ConvexPolygon::new(poly.clone()).area();
        if area < min_area {
            return Err(MeshError::DegenerateCell { cell: i, area });
        }
        cells.push(poly);
    }
    Ok(cells)
}

/// Voronoi mesh from explicit generator positions, with `lloyd_iters`
/// centroidal relaxation sweeps. Faces are extracted before returning.
pub fn voronoi_from_generators(
    domain: &Rect,
    generators: &[Point],
    lloyd_iters: usize,
) -> Result<PolyMesh, MeshError> {
    if domain.is_degenerate() {
        return Err(MeshError::DegenerateDomain);
    }
    if generators.is_empty() {
        return Err(MeshError::InvalidCellCount);
    }
    let mut gens = generators.to_vec();
    for _ in 0..lloyd_iters {
        let cells = voronoi_cells(domain, &gens)?;
        for (g, loop_pts) in gens.iter_mut().zip(&cells) {
            *g = ConvexPolygon::new(loop_pts.clone()).centroid();
        }
    }
    let cells = voronoi_cells(domain, &gens)?;
    let mut mesh = PolyMesh::from_loops(*domain, &cells)?;
    mesh.extract_faces()?;
    Ok(mesh)
}

fn seed_points(domain: &Rect, n: usize, rng: &mut SplitMix64) -> Vec<Point> {
    (0..n)
        .map(|_| {
            let x = domain.x0 + domain.width() * rng.next_f64();
            let y = domain.y0 + domain.height() * rng.next_f64();
            Point::new(x, y)
        })
        .collect()
}

/// Deterministic Voronoi mesh with `n_cells` cells: random generators from
/// `seed`, `lloyd_iters` relaxation sweeps, clipped to `domain`. Degenerate
/// outcomes retry with a perturbed seed, up to 10 attempts.
pub fn generate_voronoi_mesh(
    domain: &Rect,
    n_cells: usize,
    seed: u64,
    lloyd_iters: usize,
) -> Result<PolyMesh, MeshError> {
    if domain.is_degenerate() {
        return Err(MeshError::DegenerateDomain);
    }
    if n_cells == 0 {
        return Err(MeshError::InvalidCellCount);
    }
    const MAX_ATTEMPTS: usize = 10;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng =
            SplitMix64::new(seed.wrapping_add(0x5851_F42D_4C95_7F2D_u64.wrapping_mul(attempt as u64)));
        let gens = seed_points(domain, n_cells, &mut rng);
        match voronoi_from_generators(domain, &gens, lloyd_iters) {
            Ok(mesh) => return Ok(mesh),
            Err(MeshError::DegenerateCell { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(MeshError::GenerationFailed { attempts: MAX_ATTEMPTS })
}
