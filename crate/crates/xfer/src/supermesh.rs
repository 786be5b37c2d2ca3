//! The common refinement of two tessellations of the same rectangle: every
//! nonempty pairwise cell intersection, found by bounding-box pruning over a
//! uniform background grid and cut by convex clipping.

use crate::XferError;
use geomkit::{clip_convex, ConvexPolygon, Rect};
use polymesh::PolyMesh;

/// Intersections below `1e-12 * min(|κ_f|, |κ_c|)` are dropped; they sit
/// under round-off and destabilize the mixed mass.
const SLIVER_REL: f64 = 1e-12;

/// Per-fine-cell area deficit above this is a geometry error.
const CONSERVATION_REL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SupermeshPiece {
    pub fine_cell: usize,
    pub coarse_cell: usize,
    pub polygon: ConvexPolygon,
    pub area: f64,
}

#[derive(Debug, Clone)]
pub struct Supermesh {
    pub pieces: Vec<SupermeshPiece>,
    pub n_fine_cells: usize,
    pub n_coarse_cells: usize,
}

impl Supermesh {
    pub fn total_area(&self) -> f64 {
        self.pieces.iter().map(|p| p.area).sum()
    }

    /// min/max piece area, for debugging dumps.
    pub fn area_range(&self) -> (f64, f64) {
        self.pieces.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p.area), hi.max(p.area))
        })
    }

    /// One-line statistics CSV for debugging.
    pub fn stats_csv(&self) -> String {
        let (lo, hi) = self.area_range();
        format!(
            "fine_cells,coarse_cells,pieces,total_area,min_piece_area,max_piece_area\n{},{},{},{},{},{}\n",
            self.n_fine_cells,
            self.n_coarse_cells,
            self.pieces.len(),
            self.total_area(),
            lo,
            hi
        )
    }
}

struct BboxGrid {
    nx: usize,
    ny: usize,
    domain: Rect,
    buckets: Vec<Vec<u32>>,
}

impl BboxGrid {
    fn build(domain: &Rect, boxes: &[Rect]) -> Self {
        let n = boxes.len().max(1);
        let aspect = domain.width() / domain.height();
        let nx = ((n as f64 * aspect).sqrt().ceil() as usize).max(1);
        let ny = n.div_ceil(nx).max(1);
        let mut grid = BboxGrid { nx, ny, domain: *domain, buckets: vec![Vec::new(); nx * ny] };
        for (i, b) in boxes.iter().enumerate() {
            let (x0, y0, x1, y1) = grid.cover(b);
            for by in y0..=y1 {
                for bx in x0..=x1 {
                    grid.buckets[by * grid.nx + bx].push(i as u32);
                }
            }
        }
        grid
    }

    fn cover(&self, b: &Rect) -> (usize, usize, usize, usize) {
        let fx = |x: f64| {
            (((x - self.domain.x0) / self.domain.width() * self.nx as f64) as i64)
                .clamp(0, self.nx as i64 - 1) as usize
        };
        let fy = |y: f64| {
            (((y - self.domain.y0) / self.domain.height() * self.ny as f64) as i64)
                .clamp(0, self.ny as i64 - 1) as usize
        };
        (fx(b.x0), fy(b.y0), fx(b.x1), fy(b.y1))
    }

    fn candidates(&self, b: &Rect, out: &mut Vec<u32>) {
        out.clear();
        let (x0, y0, x1, y1) = self.cover(b);
        for by in y0..=y1 {
            for bx in x0..=x1 {
                out.extend_from_slice(&self.buckets[by * self.nx + bx]);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// All nonempty fine∩coarse cell intersections, with a per-fine-cell
/// conservation audit.
pub fn build_supermesh(fine: &PolyMesh, coarse: &PolyMesh) -> Result<Supermesh, XferError> {
    let d = &fine.domain;
    let dc = &coarse.domain;
    let tol = 1e-10 * d.diagonal();
    if (d.x0 - dc.x0).abs() > tol
        || (d.y0 - dc.y0).abs() > tol
        || (d.x1 - dc.x1).abs() > tol
        || (d.y1 - dc.y1).abs() > tol
    {
        return Err(XferError::DomainMismatch);
    }
    let grid = BboxGrid::build(d, &coarse.cell_bbox);
    let mut pieces = Vec::new();
    let mut cand: Vec<u32> = Vec::new();
    for fc in 0..fine.n_cells() {
        let fine_poly = fine.cell_polygon(fc);
        let fine_area = fine.cell_area[fc];
        grid.candidates(&fine.cell_bbox[fc], &mut cand);
        let mut covered = 0.0;
        for &cc in &cand {
            let cc = cc as usize;
            if !fine.cell_bbox[fc].intersects(&coarse.cell_bbox[cc]) {
                continue;
            }
            let clip = clip_convex(&fine_poly, &coarse.cell_polygon(cc));
            if clip.is_empty() {
                continue;
            }
            let area = clip.area();
            if area < SLIVER_REL * fine_area.min(coarse.cell_area[cc]) {
                continue;
            }
            covered += area;
            pieces.push(SupermeshPiece { fine_cell: fc, coarse_cell: cc, polygon: clip, area });
        }
        let deficit_rel = (fine_area - covered).abs() / fine_area;
        if deficit_rel > CONSERVATION_REL {
            return Err(XferError::Conservation { fine_cell: fc, deficit_rel });
        }
    }
    Ok(Supermesh { pieces, n_fine_cells: fine.n_cells(), n_coarse_cells: coarse.n_cells() })
}
