//! Mesh-quality diagnostics: runnable surrogates for the shape assumptions
//! the analysis rests on. Pure reporting, no pass/fail thresholds.

use crate::{MeshError, PolyMesh};

/// Per-cell and per-face quality surrogates.
///
/// * `cell_isoperimetric`: h_κ²/|κ| (d = 2), bounded below by the shape
///   assumption on element measures.
/// * `face_support`: d·|T_F|/|F| per face side, where T_F is the centroid fan
///   triangle supporting F; comparable against h_κ.
/// * `min_subtri_fraction`: min over the fan of |s_i|/|κ|.
/// * `bbox_overlap`: number of cells whose bounding box meets the cell's
///   bounding box, a covering-overlap surrogate.
#[derive(Debug, Clone)]
pub struct MeshQualityReport {
    pub cell_h: Vec<f64>,
    pub cell_area: Vec<f64>,
    pub cell_isoperimetric: Vec<f64>,
    pub face_support: Vec<f64>,
    pub face_support_vs_h: Vec<f64>,
    pub min_subtri_fraction: Vec<f64>,
    pub bbox_overlap: Vec<usize>,
}

impl MeshQualityReport {
    pub fn summary(&self) -> QualitySummary {
        let minmax = |v: &[f64]| {
            v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
        };
        QualitySummary {
            isoperimetric: minmax(&self.cell_isoperimetric),
            face_support_vs_h: minmax(&self.face_support_vs_h),
            min_subtri_fraction: minmax(&self.min_subtri_fraction),
            max_bbox_overlap: self.bbox_overlap.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn all_finite_positive(&self) -> bool {
        let ok = |v: &[f64]| v.iter().all(|&x| x.is_finite() && x > 0.0);
        ok(&self.cell_h)
            && ok(&self.cell_area)
            && ok(&self.cell_isoperimetric)
            && ok(&self.face_support)
            && ok(&self.face_support_vs_h)
            && ok(&self.min_subtri_fraction)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QualitySummary {
    pub isoperimetric: (f64, f64),
    pub face_support_vs_h: (f64, f64),
    pub min_subtri_fraction: (f64, f64),
    pub max_bbox_overlap: usize,
}

/// Compute the quality report. Requires faces to be extracted.
pub fn check_assumptions(mesh: &PolyMesh) -> Result<MeshQualityReport, MeshError> {
    if !mesh.faces_extracted() {
        return Err(MeshError::Topology("faces must be extracted first".into()));
    }
    let n = mesh.n_cells();
    let cell_h = mesh.cell_diameter.clone();
    let cell_area = mesh.cell_area.clone();
    let cell_isoperimetric: Vec<f64> =
        (0..n).map(|c| cell_h[c] * cell_h[c] / cell_area[c]).collect();

    // Face support triangles from the centroid fan of each incident cell.
    let mut face_support = Vec::new();
    let mut face_support_vs_h = Vec::new();
    for f in &mesh.faces {
        let mut sides = vec![f.owner];
        if let Some(nbr) = f.neighbor {
            sides.push(nbr);
        }
        let mut best = f64::INFINITY;
        let mut best_vs_h = f64::INFINITY;
        for c in sides {
            let centroid = mesh.cell_centroid[c];
            let pa = mesh.vertices[f.a];
            let pb = mesh.vertices[f.b];
            let t_area = 0.5 * ((pa - centroid).cross(pb - centroid)).abs();
            let surrogate = 2.0 * t_area / f.length;
            best = best.min(surrogate);
            best_vs_h = best_vs_h.min(surrogate / mesh.cell_diameter[c]);
        }
        face_support.push(best);
        face_support_vs_h.push(best_vs_h);
    }

    let min_subtri_fraction: Vec<f64> = (0..n)
        .map(|c| {
            let tris = mesh.subtriangulate(c);
            tris.iter()
                .map(|t| 0.5 * ((t[1] - t[0]).cross(t[2] - t[0])).abs() / cell_area[c])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let bbox_overlap: Vec<usize> = (0..n)
        .map(|c| {
            let b = &mesh.cell_bbox[c];
            (0..n).filter(|&o| mesh.cell_bbox[o].intersects(b)).count()
        })
        .collect();

    Ok(MeshQualityReport {
        cell_h,
        cell_area,
        cell_isoperimetric,
        face_support,
        face_support_vs_h,
        min_subtri_fraction,
        bbox_overlap,
    })
}
