//! The experiment runners behind each CLI command. Every runner emits CSV
//! with a stable header and a `# seed=` disclosure line, and rows in a
//! deterministic configuration order.

use crate::config::{DegreeSpec, ExperimentConfig, TableId};
use crate::{mms_forcing, mms_gradient, mms_solution, CliError};
use dgcore::{assemble_dg_norm_gram, assemble_rhs, error_norms, DgSpace};
use mgsolve::{
    cg_solve, estimate_cstab, estimate_delta, mg_solve, LevelStack, SmootherKind, SolveReport,
};
use polymesh::{
    build_hierarchy_with_lloyd, check_assumptions, generate_voronoi_mesh, io::write_mesh_file,
    MeshHierarchy,
};
use std::path::PathBuf;
use std::sync::Arc;
use xfer::{build_supermesh, TransferPair};

pub const SOLVE_HEADER: &str = "method,levels,p,m,cells,iterations,rho,converged,wall_ms";
pub const SOLVE_HEADER_MMS: &str =
    "method,levels,p,m,cells,iterations,rho,converged,l2_error,dg_error,wall_ms";
pub const TABLE_HEADER: &str = "table,cells,levels,p,m,smoother,method,iterations,rho,converged";
pub const CSTAB_HEADER: &str = "mesh_pair,kind,p,value,converged";
pub const DELTA_HEADER: &str = "levels,p,m,delta,converged";
pub const QUALITY_CELLS_HEADER: &str =
    "level,cell,h,area,h2_over_area,min_subtri_fraction,bbox_overlap";
pub const QUALITY_FACES_HEADER: &str = "level,face,support,support_vs_h";

pub struct RunOutcome {
    pub csv: String,
    pub all_converged: bool,
    /// Extra artifacts as (file name, contents); the CLI writes them next to
    /// the CSV.
    pub files: Vec<(String, String)>,
}

fn smoother_name(s: SmootherKind) -> &'static str {
    match s {
        SmootherKind::Richardson => "richardson",
        SmootherKind::AdditiveSchwarz => "as",
    }
}

fn hierarchy_for(
    cfg: &ExperimentConfig,
    cells: usize,
    levels: usize,
) -> Result<MeshHierarchy, CliError> {
    Ok(build_hierarchy_with_lloyd(&cfg.domain, cells, levels, cfg.seed, cfg.lloyd)?)
}

/// The last `j` levels of a hierarchy: same finest mesh, fewer levels.
fn slice_hierarchy(h: &MeshHierarchy, j: usize) -> MeshHierarchy {
    let skip = h.levels.len() - j;
    MeshHierarchy {
        levels: h.levels[skip..].to_vec(),
        seeds: h.seeds[skip..].to_vec(),
        target_ratio: h.target_ratio,
    }
}

/// Write a hierarchy's mesh files and quality reports into `cfg.out`.
pub fn cmd_mesh(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(format!("{:?}: {e}", cfg.out)))?;
    let h = hierarchy_for(cfg, cfg.cells[0], cfg.levels)?;
    let mut written = Vec::new();
    let mut cells_csv = format!("# seed={}\n{QUALITY_CELLS_HEADER}\n", cfg.seed);
    let mut faces_csv = format!("# seed={}\n{QUALITY_FACES_HEADER}\n", cfg.seed);
    for (idx, mesh) in h.levels.iter().enumerate() {
        let level = idx + 1;
        let path = cfg.out.join(format!("mesh_L{level}.mesh"));
        write_mesh_file(&path, mesh)?;
        written.push(path);
        let q = check_assumptions(mesh)?;
        for c in 0..mesh.n_cells() {
            cells_csv.push_str(&format!(
                "{level},{c},{},{},{},{},{}\n",
                q.cell_h[c],
                q.cell_area[c],
                q.cell_isoperimetric[c],
                q.min_subtri_fraction[c],
                q.bbox_overlap[c]
            ));
        }
        for f in 0..mesh.faces.len() {
            faces_csv.push_str(&format!(
                "{level},{f},{},{}\n",
                q.face_support[f], q.face_support_vs_h[f]
            ));
        }
    }
    for (name, text) in [("quality_cells.csv", cells_csv), ("quality_faces.csv", faces_csv)] {
        let path = cfg.out.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{path:?}: {e}")))?;
        written.push(path);
    }
    Ok(written)
}

fn solve_row(
    csv: &mut String,
    method: &str,
    levels: usize,
    p_label: &str,
    m: usize,
    cells: usize,
    rep: &SolveReport,
    errors: Option<(f64, f64)>,
    with_error_cols: bool,
) {
    csv.push_str(&format!(
        "{method},{levels},{p_label},{m},{cells},{},{:.6},{}",
        rep.iterations, rep.rho, rep.converged
    ));
    if with_error_cols {
        match errors {
            Some((l2, dg)) => csv.push_str(&format!(",{l2:.6e},{dg:.6e}")),
            None => csv.push_str(",,"),
        }
    }
    csv.push_str(&format!(",{}\n", rep.wall_time.as_millis()));
}

/// One multigrid solve per requested finest size, with optional
/// manufactured-solution error columns.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let mut csv = format!(
        "# seed={}\n{}\n",
        cfg.seed,
        if cfg.mms { SOLVE_HEADER_MMS } else { SOLVE_HEADER }
    );
    let mut all_converged = true;
    let mut files = Vec::new();
    let degrees = cfg.degrees.for_levels(cfg.levels)?;
    let p_label = cfg.degrees.label(cfg.levels);
    for &cells in &cfg.cells {
        let h = hierarchy_for(cfg, cells, cfg.levels)?;
        let stack = LevelStack::from_hierarchy(&h, &degrees, cfg.c_sigma, cfg.smoother)?;
        let f = assemble_rhs(&stack.finest().space, mms_forcing)?;
        let (u, rep) = mg_solve(&stack, &f, cfg.tol, cfg.max_iters, cfg.m1, cfg.m2);
        all_converged &= rep.converged;
        let errors = if cfg.mms {
            let e = error_norms(&stack.finest().space, &u, mms_solution, mms_gradient, cfg.c_sigma)?;
            Some((e.l2, e.dg))
        } else {
            None
        };
        solve_row(
            &mut csv,
            &format!("mg-{}", smoother_name(cfg.smoother)),
            cfg.levels,
            &p_label,
            cfg.m1,
            cells,
            &rep,
            errors,
            cfg.mms,
        );
        let space = &stack.finest().space;
        let mut dump = format!(
            "# polymg solution cells={cells} p={p_label} n_dofs={} seed={}\n",
            space.n_dofs(),
            cfg.seed
        );
        for v in &u {
            dump.push_str(&format!("{v}\n"));
        }
        files.push((format!("solution_{cells}.txt"), dump));
    }
    Ok(RunOutcome { csv, all_converged, files })
}

/// Reproduce one of the experiment tables: a grid of smoothing counts by
/// level counts per mesh set, with an unpreconditioned CG baseline per set.
/// Failures (non-converged cells) are recorded and the run continues.
pub fn cmd_table(cfg: &ExperimentConfig, table: TableId) -> Result<RunOutcome, CliError> {
    // T4 is the hp variant with degree j on level j; the others take a
    // uniform degree (overridable by --p).
    let (smoother, degrees): (SmootherKind, Option<DegreeSpec>) = match table {
        TableId::T1 => (
            SmootherKind::Richardson,
            Some(if cfg.degrees_explicit { cfg.degrees.clone() } else { DegreeSpec::Uniform(1) }),
        ),
        TableId::T2 => (
            SmootherKind::Richardson,
            Some(if cfg.degrees_explicit { cfg.degrees.clone() } else { DegreeSpec::Uniform(3) }),
        ),
        TableId::T3 => (
            SmootherKind::AdditiveSchwarz,
            Some(if cfg.degrees_explicit { cfg.degrees.clone() } else { DegreeSpec::Uniform(1) }),
        ),
        TableId::T4 => (SmootherKind::AdditiveSchwarz, None),
    };
    let m_values = [3usize, 5, 8];
    let deepest = if cfg.levels_explicit { cfg.levels.max(2) } else { 4 };
    let level_values: Vec<usize> = (2..=deepest)
        .filter(|&j| cfg.cells.iter().all(|&c| c >= 4usize.pow(j as u32 - 1)))
        .collect();
    let max_levels = *level_values.last().unwrap_or(&2);

    let mut csv = format!("# seed={}\n{TABLE_HEADER}\n", cfg.seed);
    let mut all_converged = true;
    for &cells in &cfg.cells {
        let full = hierarchy_for(cfg, cells, max_levels)?;
        for &j in &level_values {
            let h = slice_hierarchy(&full, j);
            let degs = match &degrees {
                None => (1..=j).collect::<Vec<_>>(),
                Some(spec) => spec.for_levels(j)?,
            };
            let p_label = degs
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("/");
            let p_label =
                if degs.iter().all(|&p| p == degs[0]) { degs[0].to_string() } else { p_label };
            let stack = LevelStack::from_hierarchy(&h, &degs, cfg.c_sigma, smoother)?;
            let f = assemble_rhs(&stack.finest().space, mms_forcing)?;
            for &m in &m_values {
                let (_, rep) = mg_solve(&stack, &f, cfg.tol, cfg.max_iters, m, m);
                all_converged &= rep.converged;
                csv.push_str(&format!(
                    "{},{cells},{j},{p_label},{m},{},mg,{},{:.6},{}\n",
                    table.name(),
                    smoother_name(smoother),
                    rep.iterations,
                    rep.rho,
                    rep.converged
                ));
            }
            // CG baseline once per set, on the finest system
            if j == *level_values.first().unwrap() {
                let (_, cg) = cg_solve(&stack.finest().stiffness, &f, cfg.tol, cfg.cg_max_iters);
                csv.push_str(&format!(
                    "{},{cells},1,{p_label},0,none,cg,{},{:.6},{}\n",
                    table.name(),
                    cg.iterations,
                    cg.rho,
                    cg.converged
                ));
            }
        }
    }
    Ok(RunOutcome { csv, all_converged, files: Vec::new() })
}

/// Sweep of the prolongation stability constant over p and mesh pairs, with
/// an identical-space control row and per-pair least-squares slopes.
pub fn cmd_cstab(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let p_sweep: Vec<usize> = match (&cfg.degrees, cfg.degrees_explicit) {
        (DegreeSpec::Uniform(p), true) => vec![*p],
        _ => vec![1, 2, 3, 4],
    };
    let mut csv = format!("# seed={}\n{CSTAB_HEADER}\n", cfg.seed);
    // identical-space control
    {
        let mesh = Arc::new(generate_voronoi_mesh(&cfg.domain, 64, cfg.seed, cfg.lloyd)?);
        let space = Arc::new(DgSpace::new(mesh, 1)?);
        let pair = TransferPair::build(space.clone(), space.clone())?;
        let gram = assemble_dg_norm_gram(&space, cfg.c_sigma)?;
        let est = estimate_cstab(&pair, &gram, &gram, 1e-8, 300)?;
        csv.push_str(&format!("64/64,control,1,{:.6},{}\n", est.value, est.converged));
    }
    for &fine_cells in &cfg.cells {
        let coarse_cells = (fine_cells / 4).max(1);
        let fine_mesh =
            Arc::new(generate_voronoi_mesh(&cfg.domain, fine_cells, cfg.seed, cfg.lloyd)?);
        let coarse_mesh = Arc::new(generate_voronoi_mesh(
            &cfg.domain,
            coarse_cells,
            cfg.seed.wrapping_add(1),
            cfg.lloyd,
        )?);
        let supermesh = build_supermesh(&fine_mesh, &coarse_mesh)?;
        let pair_name = format!("{fine_cells}/{coarse_cells}");
        let mut samples = Vec::new();
        for &p in &p_sweep {
            let fine = Arc::new(DgSpace::new(fine_mesh.clone(), p)?);
            let coarse = Arc::new(DgSpace::new(coarse_mesh.clone(), p)?);
            let pair = TransferPair::build_with_supermesh(fine.clone(), coarse.clone(), &supermesh)?;
            let n_fine = assemble_dg_norm_gram(&fine, cfg.c_sigma)?;
            let n_coarse = assemble_dg_norm_gram(&coarse, cfg.c_sigma)?;
            let est = estimate_cstab(&pair, &n_fine, &n_coarse, 1e-6, 300)?;
            csv.push_str(&format!(
                "{pair_name},cstab,{p},{:.6},{}\n",
                est.value, est.converged
            ));
            samples.push((p as f64, est.value));
        }
        if samples.len() >= 2 {
            let slope = least_squares_slope(&samples);
            csv.push_str(&format!("{pair_name},slope,-,{slope:.6},true\n"));
        }
    }
    Ok(csv)
}

pub fn least_squares_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let sx: f64 = samples.iter().map(|s| s.0).sum();
    let sy: f64 = samples.iter().map(|s| s.1).sum();
    let sxx: f64 = samples.iter().map(|s| s.0 * s.0).sum();
    let sxy: f64 = samples.iter().map(|s| s.0 * s.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// V-cycle contraction estimates δ_j with m = 3p² Richardson smoothing, for
/// J up to 3, plus the exact-solve control row at J = 1.
pub fn cmd_delta(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let p_sweep: Vec<usize> = match (&cfg.degrees, cfg.degrees_explicit) {
        (DegreeSpec::Uniform(p), true) => vec![*p],
        _ => vec![1, 2, 3],
    };
    let levels = cfg.levels.clamp(2, 3);
    let mut csv = format!("# seed={}\n{DELTA_HEADER}\n", cfg.seed);
    csv.push_str("1,-,0,0.000000,true\n"); // direct solve: zero error operator
    let full = hierarchy_for(cfg, cfg.cells[0], levels)?;
    for j in 2..=levels {
        let h = slice_hierarchy(&full, j);
        for &p in &p_sweep {
            let m = 3 * p * p;
            let stack =
                LevelStack::from_hierarchy(&h, &vec![p; j], cfg.c_sigma, SmootherKind::Richardson)?;
            let est = estimate_delta(&stack, j - 1, m, 1e-3, 120);
            csv.push_str(&format!("{j},{p},{m},{:.6},{}\n", est.value, est.converged));
        }
    }
    Ok(csv)
}
