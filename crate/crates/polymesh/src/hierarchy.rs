//! Hierarchies of mutually independent Voronoi meshes with cell counts
//! coarsened by a factor of 4 per level. No nesting is assumed anywhere:
//! every level is generated from its own derived seed.

use crate::prng::SplitMix64;
use crate::voronoi::generate_voronoi_mesh;
use crate::{MeshError, PolyMesh};
use geomkit::Rect;

pub const COARSENING_RATIO: f64 = 0.25;
pub const DEFAULT_LLOYD_ITERS: usize = 20;

#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    /// Coarsest (level 1) first, finest (level J) last.
    pub levels: Vec<PolyMesh>,
    pub seeds: Vec<u64>,
    pub target_ratio: f64,
}

impl MeshHierarchy {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn finest(&self) -> &PolyMesh {
        self.levels.last().unwrap()
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|m| m.n_cells()).collect()
    }

    /// Measured mesh sizes h_j, coarsest first.
    pub fn h_values(&self) -> Vec<f64> {
        self.levels.iter().map(|m| m.h_max()).collect()
    }

    /// Measured h_{j-1}/h_j ratios between consecutive levels.
    pub fn h_ratios(&self) -> Vec<f64> {
        self.h_values().windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// Build a hierarchy with cell counts n_finest, ⌈n_finest/4⌉, ⌈n_finest/16⌉,
/// …, each level generated independently from a distinct derived seed.
pub fn build_hierarchy(
    domain: &Rect,
    n_finest: usize,
    n_levels: usize,
    seed: u64,
) -> Result<MeshHierarchy, MeshError> {
    build_hierarchy_with_lloyd(domain, n_finest, n_levels, seed, DEFAULT_LLOYD_ITERS)
}

pub fn build_hierarchy_with_lloyd(
    domain: &Rect,
    n_finest: usize,
    n_levels: usize,
    seed: u64,
    lloyd_iters: usize,
) -> Result<MeshHierarchy, MeshError> {
    if n_levels == 0 {
        return Err(MeshError::HierarchyTooDeep { n_finest, n_levels });
    }
    if n_finest < 4usize.saturating_pow(n_levels as u32 - 1) {
        return Err(MeshError::HierarchyTooDeep { n_finest, n_levels });
    }
    let mut counts = Vec::with_capacity(n_levels);
    let mut c = n_finest;
    for _ in 0..n_levels {
        counts.push(c);
        c = c.div_ceil(4);
    }
    counts.reverse(); // coarsest first

    let mut stream = SplitMix64::new(seed);
    let seeds: Vec<u64> = (0..n_levels).map(|_| stream.next_u64()).collect();
    let mut levels = Vec::with_capacity(n_levels);
    for (count, s) in counts.iter().zip(&seeds) {
        levels.push(generate_voronoi_mesh(domain, *count, *s, lloyd_iters)?);
    }
    Ok(MeshHierarchy { levels, seeds, target_ratio: COARSENING_RATIO })
}
