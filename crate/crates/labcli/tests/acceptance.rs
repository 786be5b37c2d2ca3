//! Acceptance suite: the project's exit criteria, one test per criterion,
//! each printing a PASS line with its measurements. Tolerances account for
//! the random Voronoi meshes (seeds are fixed; reruns are deterministic).

use dgcore::basis::{eval_basis, eval_basis_values, eval_function, eval_gradient};
use dgcore::quad::{cell_quadrature, face_quadrature};
use dgcore::{
    assemble_dg_norm_gram, assemble_rhs, assemble_stiffness, error_norms, penalty_sigma, DgSpace,
};
use geomkit::{Point, Rect};
use labcli::runners::least_squares_slope;
use labcli::{cmd_table, mms_forcing, mms_gradient, mms_solution, ExperimentConfig, TableId};
use mgsolve::{
    cg_solve, estimate_cstab, estimate_delta, estimate_lambda_max, mg_solve, LevelOperators,
    LevelStack, SmootherKind,
};
use polymesh::{build_hierarchy_with_lloyd, generate_voronoi_mesh};
use sparsela::dense::generalized_eigenvalues;
use sparsela::rng::SplitMix64;
use sparsela::vecops::dot;
use sparsela::SparseCholesky;
use std::sync::Arc;
use xfer::{build_supermesh, p_coarse_projection, TransferPair};

const C_SIGMA: f64 = 10.0;

fn hierarchy(cells: usize, levels: usize, seed: u64) -> polymesh::MeshHierarchy {
    build_hierarchy_with_lloyd(&Rect::UNIT, cells, levels, seed, 20).unwrap()
}

fn stack(cells: usize, levels: usize, p: usize, seed: u64, smoother: SmootherKind) -> LevelStack {
    LevelStack::from_hierarchy(&hierarchy(cells, levels, seed), &vec![p; levels], C_SIGMA, smoother)
        .unwrap()
}

/// Criterion 1: manufactured-solution orders over three refinements,
/// measured L2 order >= p+1-0.2 and DG order >= p-0.2, for p in {1,2,3}.
#[test]
fn c01_manufactured_solution_rates() {
    let start = std::time::Instant::now();
    for p in 1..=3usize {
        let mut samples_l2 = Vec::new();
        let mut samples_dg = Vec::new();
        for (i, &cells) in [128usize, 512, 2048].iter().enumerate() {
            let levels = if cells == 128 { 2 } else { 3 };
            let st = stack(cells, levels, p, 100 + i as u64, SmootherKind::AdditiveSchwarz);
            let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
            let (u, rep) = mg_solve(&st, &f, 1e-10, 100, 8, 8);
            assert!(rep.converged, "solver failed at p={p}, cells={cells}");
            let e = error_norms(&st.finest().space, &u, mms_solution, mms_gradient, C_SIGMA)
                .unwrap();
            let h = st.finest().space.mesh.h_max();
            samples_l2.push((h.ln(), e.l2.ln()));
            samples_dg.push((h.ln(), e.dg.ln()));
        }
        let order_l2 = least_squares_slope(&samples_l2);
        let order_dg = least_squares_slope(&samples_dg);
        println!(
            "criterion 01 [p={p}]: L2 order {order_l2:.2} (need >= {:.1}), DG order {order_dg:.2} (need >= {:.1})",
            p as f64 + 0.8,
            p as f64 - 0.2
        );
        assert!(order_l2 >= p as f64 + 1.0 - 0.2, "L2 order {order_l2:.2} at p={p}");
        assert!(order_dg >= p as f64 - 0.2, "DG order {order_dg:.2} at p={p}");
    }
    let elapsed = start.elapsed();
    println!("criterion 01 PASS in {elapsed:.1?} (budget 180 s)");
    assert!(elapsed.as_secs_f64() < 180.0, "criterion 1 exceeded its runtime budget");
}

/// Criterion 2: h-independence of the Richardson V-cycle, J=2, p=1, m=5:
/// rho <= 0.85 at every size and spread <= 0.10 across sizes.
#[test]
fn c02_h_independence() {
    let start = std::time::Instant::now();
    let mut rhos = Vec::new();
    for (i, &cells) in [512usize, 1024, 2048].iter().enumerate() {
        let st = stack(cells, 2, 1, 200 + i as u64, SmootherKind::Richardson);
        let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
        let (_, rep) = mg_solve(&st, &f, 1e-8, 400, 5, 5);
        assert!(rep.converged, "not converged at {cells}");
        rhos.push(rep.rho);
    }
    let max = rhos.iter().cloned().fold(0.0f64, f64::max);
    let min = rhos.iter().cloned().fold(1.0f64, f64::min);
    println!(
        "criterion 02 PASS: rho = {:.3}/{:.3}/{:.3}, spread {:.3} (<= 0.10), max {:.3} (<= 0.85), in {:.1?}",
        rhos[0], rhos[1], rhos[2], max - min, max, start.elapsed()
    );
    assert!(max <= 0.85, "rho {max:.3} above 0.85");
    assert!(max - min <= 0.10, "rho spread {:.3} above 0.10", max - min);
    assert!(start.elapsed().as_secs_f64() < 120.0);
}

/// Criterion 3: smoothing monotonicity on one fixed 512/128 stack:
/// rho(m=3) > rho(m=5) > rho(m=8).
#[test]
fn c03_smoothing_monotonicity() {
    let st = stack(512, 2, 1, 300, SmootherKind::Richardson);
    let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
    let mut rhos = Vec::new();
    for m in [3usize, 5, 8] {
        let (_, rep) = mg_solve(&st, &f, 1e-8, 400, m, m);
        assert!(rep.converged);
        rhos.push(rep.rho);
    }
    println!(
        "criterion 03 PASS: rho(3)={:.3} > rho(5)={:.3} > rho(8)={:.3}",
        rhos[0], rhos[1], rhos[2]
    );
    assert!(rhos[0] > rhos[1] && rhos[1] > rhos[2], "rho not monotone: {rhos:?}");
}

/// Criterion 4: unpreconditioned CG iteration growth by a factor in
/// [1.2, 1.7] when cells double, while MG stays within 2 iterations.
#[test]
fn c04_cg_contrast() {
    let mut cg_iters = Vec::new();
    let mut mg_iters = Vec::new();
    for (i, &cells) in [512usize, 1024].iter().enumerate() {
        let st = stack(cells, 2, 1, 400 + i as u64, SmootherKind::Richardson);
        let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
        let (_, cg) = cg_solve(&st.finest().stiffness, &f, 1e-8, 50_000);
        assert!(cg.converged);
        cg_iters.push(cg.iterations as f64);
        let (_, mg) = mg_solve(&st, &f, 1e-8, 400, 5, 5);
        assert!(mg.converged);
        mg_iters.push(mg.iterations as isize);
    }
    let growth = cg_iters[1] / cg_iters[0];
    let mg_diff = (mg_iters[1] - mg_iters[0]).abs();
    println!(
        "criterion 04 PASS: CG {} -> {} (growth {growth:.2} in [1.2, 1.7]), MG {} -> {} (|diff| {mg_diff} <= 2)",
        cg_iters[0], cg_iters[1], mg_iters[0], mg_iters[1]
    );
    assert!((1.2..=1.7).contains(&growth), "CG growth {growth:.2}");
    assert!(mg_diff <= 2, "MG iteration drift {mg_diff}");
}

/// Criterion 5: Additive Schwarz flatness across level counts at p=1
/// (iterations <= 15, |J2-J3| <= 2 on a 1024-cell finest) and p=3, m=8
/// iterations <= 28.
#[test]
fn c05_additive_schwarz_flatness() {
    let start = std::time::Instant::now();
    let full = hierarchy(1024, 3, 500);
    let mut iters = Vec::new();
    for j in [2usize, 3] {
        let skip = full.levels.len() - j;
        let h = polymesh::MeshHierarchy {
            levels: full.levels[skip..].to_vec(),
            seeds: full.seeds[skip..].to_vec(),
            target_ratio: full.target_ratio,
        };
        let st =
            LevelStack::from_hierarchy(&h, &vec![1; j], C_SIGMA, SmootherKind::AdditiveSchwarz)
                .unwrap();
        let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
        let (_, rep) = mg_solve(&st, &f, 1e-8, 100, 5, 5);
        assert!(rep.converged);
        iters.push(rep.iterations as isize);
    }
    let st3 = stack(1024, 2, 3, 501, SmootherKind::AdditiveSchwarz);
    let f3 = assemble_rhs(&st3.finest().space, mms_forcing).unwrap();
    let (_, rep3) = mg_solve(&st3, &f3, 1e-8, 100, 8, 8);
    assert!(rep3.converged);
    println!(
        "criterion 05 PASS: p=1 m=5 iters J2={} J3={} (<= 15, |diff| <= 2); p=3 m=8 iters {} (<= 28), in {:.1?}",
        iters[0], iters[1], rep3.iterations, start.elapsed()
    );
    assert!(iters[0] <= 15 && iters[1] <= 15, "AS iterations {iters:?}");
    assert!((iters[0] - iters[1]).abs() <= 2, "AS not flat: {iters:?}");
    assert!(rep3.iterations <= 28, "p=3 iterations {}", rep3.iterations);
}

/// Criterion 6: hp V-cycle with degrees (1,2,3) coarsest→finest, AS
/// smoother, m=5 converges within 70 iterations.
#[test]
fn c06_hp_vcycle() {
    let h = hierarchy(512, 3, 600);
    let st =
        LevelStack::from_hierarchy(&h, &[1, 2, 3], C_SIGMA, SmootherKind::AdditiveSchwarz)
            .unwrap();
    let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
    let (_, rep) = mg_solve(&st, &f, 1e-8, 200, 5, 5);
    println!(
        "criterion 06 PASS: hp degrees 1/2/3, iters {} (<= 70), rho {:.3}",
        rep.iterations, rep.rho
    );
    assert!(rep.converged, "hp V-cycle did not converge");
    assert!(rep.iterations <= 70, "hp iterations {}", rep.iterations);
}

/// Criterion 7: prolongation stability constant sweep — pair-size agreement
/// within 20% at fixed p, and least-squares slope over p in [0.5, 1.5].
///
/// The slope sub-check is implemented exactly as stated. Measured behavior:
/// with the penalty weight C_σ p²/h present in BOTH norms (as the
/// identical-space control = 1 demands), the sharp constant is flat in p
/// (slope ≈ 0.02, dense-eigensolver verified), so this check fails; the
/// assert message carries the measured values.
#[test]
fn c07_cstab_linearity() {
    let mut per_pair: Vec<Vec<f64>> = Vec::new();
    let mut slopes = Vec::new();
    for (fine_cells, coarse_cells, s1, s2) in [(256usize, 64usize, 700u64, 701u64), (1024, 256, 702, 703)] {
        let fine_mesh = Arc::new(generate_voronoi_mesh(&Rect::UNIT, fine_cells, s1, 20).unwrap());
        let coarse_mesh =
            Arc::new(generate_voronoi_mesh(&Rect::UNIT, coarse_cells, s2, 20).unwrap());
        let sm = build_supermesh(&fine_mesh, &coarse_mesh).unwrap();
        let mut values = Vec::new();
        for p in 1..=4usize {
            let fine = Arc::new(DgSpace::new(fine_mesh.clone(), p).unwrap());
            let coarse = Arc::new(DgSpace::new(coarse_mesh.clone(), p).unwrap());
            let pair =
                TransferPair::build_with_supermesh(fine.clone(), coarse.clone(), &sm).unwrap();
            let nf = assemble_dg_norm_gram(&fine, C_SIGMA).unwrap();
            let nc = assemble_dg_norm_gram(&coarse, C_SIGMA).unwrap();
            let est = estimate_cstab(&pair, &nf, &nc, 1e-6, 400).unwrap();
            values.push(est.value);
        }
        let samples: Vec<(f64, f64)> =
            values.iter().enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect();
        slopes.push(least_squares_slope(&samples));
        per_pair.push(values);
    }
    for p_idx in 0..4 {
        let (a, b) = (per_pair[0][p_idx], per_pair[1][p_idx]);
        let rel = (a - b).abs() / a.max(b);
        assert!(
            rel <= 0.20,
            "pair disagreement {rel:.2} at p={} ({a:.3} vs {b:.3})",
            p_idx + 1
        );
    }
    println!(
        "criterion 07: pair agreement PASS; C_stab 256/64 = {:?}, 1024/256 = {:?}, slopes {:.3}/{:.3}",
        per_pair[0], per_pair[1], slopes[0], slopes[1]
    );
    for (i, slope) in slopes.iter().enumerate() {
        assert!(
            (0.5..=1.5).contains(slope),
            "C_stab slope {slope:.3} outside [0.5, 1.5] on pair {} — measured constants {:?} are p-independent with the symmetric-penalty norms (operator norm verified against a dense eigensolver)",
            if i == 0 { "256/64" } else { "1024/256" },
            per_pair[i]
        );
    }
    println!("criterion 07 PASS");
}

/// Criterion 8: V-cycle contraction delta < 1 for p in {1,2,3} with
/// m = 3p² on a 256/64 stack, and delta(m=8) < delta(m=3) at p=1.
#[test]
fn c08_delta_contraction() {
    let start = std::time::Instant::now();
    let h = hierarchy(256, 2, 800);
    let mut deltas = Vec::new();
    for p in 1..=3usize {
        let st = LevelStack::from_hierarchy(&h, &vec![p; 2], C_SIGMA, SmootherKind::Richardson)
            .unwrap();
        let m = 3 * p * p;
        let est = estimate_delta(&st, 1, m, 1e-3, 120);
        deltas.push(est.value);
        assert!(est.value < 1.0, "delta {} at p={p}, m={m}", est.value);
    }
    let st1 =
        LevelStack::from_hierarchy(&h, &vec![1; 2], C_SIGMA, SmootherKind::Richardson).unwrap();
    let d3 = estimate_delta(&st1, 1, 3, 1e-3, 120).value;
    let d8 = estimate_delta(&st1, 1, 8, 1e-3, 120).value;
    println!(
        "criterion 08 PASS: delta(m=3p²) = {:.3}/{:.3}/{:.3} (all < 1); p=1 delta(m=8)={d8:.3} < delta(m=3)={d3:.3}, in {:.1?}",
        deltas[0], deltas[1], deltas[2], start.elapsed()
    );
    assert!(d8 < d3, "delta(m=8) {d8:.3} !< delta(m=3) {d3:.3}");
}

/// Criterion 9: deterministic operator property suite, under 30 seconds.
#[test]
fn c09_operator_property_suite() {
    let start = std::time::Instant::now();
    let mut rng = SplitMix64::new(0xACCE_97);

    // transfer adjointness to 1e-12 and constant preservation (64/16, p=2)
    let fine_mesh = Arc::new(generate_voronoi_mesh(&Rect::UNIT, 64, 900, 10).unwrap());
    let coarse_mesh = Arc::new(generate_voronoi_mesh(&Rect::UNIT, 16, 901, 10).unwrap());
    let fine = Arc::new(DgSpace::new(fine_mesh.clone(), 2).unwrap());
    let coarse = Arc::new(DgSpace::new(coarse_mesh.clone(), 2).unwrap());
    let pair = TransferPair::build(fine.clone(), coarse.clone()).unwrap();
    let mf = dgcore::assemble_mass(&fine).unwrap();
    let mc = dgcore::assemble_mass(&coarse).unwrap();
    for _ in 0..5 {
        let w = rng.vector(fine.n_dofs());
        let v = rng.vector(coarse.n_dofs());
        let lhs = dot(&pair.restrict(&w), &mc.mul_vec(&v));
        let rhs = dot(&w, &mf.mul_vec(&pair.prolong(&v)));
        assert!(
            (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-6),
            "adjointness: {lhs} vs {rhs}"
        );
    }
    let one_f = pair.prolong(&coarse.constant_one());
    for (got, want) in one_f.iter().zip(&fine.constant_one()) {
        assert!((got - want).abs() <= 1e-10, "constant not preserved");
    }

    // supermesh conservation to 1e-10
    let sm = build_supermesh(&fine_mesh, &coarse_mesh).unwrap();
    assert!((sm.total_area() - 1.0).abs() <= 1e-10, "supermesh area {}", sm.total_area());

    // stiffness symmetry to 1e-10 relative; SPD audits of K and N
    let k = assemble_stiffness(&fine, C_SIGMA).unwrap();
    assert!(k.asymmetry() <= 1e-10 * k.max_abs(), "stiffness asymmetry");
    SparseCholesky::factor(&k).expect("K must be SPD");
    let n = assemble_dg_norm_gram(&fine, C_SIGMA).unwrap();
    SparseCholesky::factor(&n).expect("N must be SPD");

    // lifting adjoint identity to 1e-11 on a small space
    lifting_adjoint_check(&fine, &mut rng);

    // full bilinear-form oracle equivalence on a <= 32-cell mesh to 1e-10
    form_oracle_check(&mut rng);

    // B_ad^{-1} SPD audit (32-cell 2-level AS stack)
    let st = stack(32, 2, 1, 902, SmootherKind::AdditiveSchwarz);
    let prec = st.as_precs[1].as_ref().unwrap();
    let tr = st.transfer_below(1);
    for _ in 0..20 {
        let x = rng.vector(st.finest().n_dofs());
        let bx = prec.apply(tr, &x);
        assert!(dot(&bx, &x) > 0.0, "B_ad^-1 not positive");
        let y = rng.vector(st.finest().n_dofs());
        let lhs = dot(&prec.apply(tr, &x), &y);
        let rhs = dot(&x, &prec.apply(tr, &y));
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1e-9));
    }

    // P_j^{j-1} defining identity to 1e-10
    let kf = assemble_stiffness(&fine, C_SIGMA).unwrap();
    let kc = assemble_stiffness(&coarse, C_SIGMA).unwrap();
    let kc_factor = SparseCholesky::factor(&kc).unwrap();
    for _ in 0..5 {
        let w = rng.vector(fine.n_dofs());
        let v = rng.vector(coarse.n_dofs());
        let pw = p_coarse_projection(&pair, &kf, &kc_factor, &w);
        let lhs = dot(&pw, &kc.mul_vec(&v));
        let rhs = dot(&w, &kf.mul_vec(&pair.prolong(&v)));
        let scale = (dot(&w, &kf.mul_vec(&w)) * dot(&v, &kc.mul_vec(&v))).sqrt();
        assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-9), "P identity: {lhs} vs {rhs}");
    }

    // Λ against the dense eigensolver within 1% on an 8-cell system
    let s8 = Arc::new(DgSpace::new(
        Arc::new(generate_voronoi_mesh(&Rect::UNIT, 8, 903, 10).unwrap()),
        1,
    ).unwrap());
    let ops = LevelOperators::build(s8, C_SIGMA).unwrap();
    let eigs = generalized_eigenvalues(&ops.stiffness.to_dense(), &ops.mass.to_dense()).unwrap();
    let dense_top = *eigs.last().unwrap();
    let raw = ops.lambda_max / mgsolve::eig::LAMBDA_SAFETY;
    assert!((raw - dense_top).abs() <= 0.01 * dense_top, "Λ {raw} vs dense {dense_top}");
    let est = estimate_lambda_max(&ops.stiffness, &ops.mass, &ops.mass_factor, 1e-4, 500);
    assert!(est.converged);

    // rho recomputation identity, exact
    let st = stack(32, 2, 1, 904, SmootherKind::Richardson);
    let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
    let (_, rep) = mg_solve(&st, &f, 1e-8, 200, 3, 3);
    assert!(rep.converged);
    assert_eq!(rep.rho, rep.recompute_rho(), "rho identity must be exact");

    let elapsed = start.elapsed();
    println!("criterion 09 PASS: operator property suite in {elapsed:.1?} (budget 30 s)");
    assert!(elapsed.as_secs_f64() < 30.0, "property suite too slow: {elapsed:?}");
}

/// Criterion 10: the small-m, p=3 configuration terminates and its outcome
/// lands in the table CSV — convergence, the divergence guard, or the
/// recorded iteration cap; never a hang.
#[test]
fn c10_divergence_reporting() {
    let start = std::time::Instant::now();
    let st = stack(256, 2, 3, 1000, SmootherKind::Richardson);
    let f = assemble_rhs(&st.finest().space, mms_forcing).unwrap();
    let (_, rep) = mg_solve(&st, &f, 1e-8, 800, 3, 3);
    assert!(
        rep.converged || rep.diverged || rep.iterations == 800,
        "run must terminate with a recorded outcome"
    );
    // the full table runner records the same configuration
    let mut cfg = ExperimentConfig::default();
    cfg.apply("cells", "256").unwrap();
    cfg.apply("levels", "2").unwrap();
    cfg.apply("p", "3").unwrap();
    cfg.apply("seed", "1000").unwrap();
    cfg.apply("max-iters", "800").unwrap();
    let out = cmd_table(&cfg, TableId::T2).unwrap();
    let m3_row = out
        .csv
        .lines()
        .find(|l| l.starts_with("T2,256,2,3,3,"))
        .expect("T2 m=3 row missing");
    let recorded: bool = m3_row.rsplit(',').next().unwrap().parse().unwrap();
    println!(
        "criterion 10 PASS: p=3 m=3 terminated ({} iters, rho {:.3}, converged={}) and the table row records converged={recorded}, in {:.1?}",
        rep.iterations, rep.rho, rep.converged, start.elapsed()
    );
}

// --- helpers for criterion 9 -------------------------------------------

fn lifting_adjoint_check(space: &Arc<DgSpace>, rng: &mut SplitMix64) {
    let lm = dgcore::LocalMass::new(space).unwrap();
    let liftings: Vec<dgcore::FaceLifting> = (0..space.mesh.faces.len())
        .map(|fid| dgcore::assemble_lifting(space, &lm, fid).unwrap())
        .collect();
    let n_loc = space.n_loc();
    let u = rng.vector(space.n_dofs());
    let v = rng.vector(space.n_dofs());
    let mut vals = vec![0.0; n_loc];
    let mut grads = vec![Point::new(0.0, 0.0); n_loc];
    let mut lhs = 0.0;
    for c in 0..space.n_cells() {
        let q = cell_quadrature(&space.mesh, c, 2 * space.degree + 2).unwrap();
        for (pt, w) in q.points.iter().zip(&q.weights) {
            eval_basis_values(space, c, *pt, &mut vals);
            let mut r = Point::new(0.0, 0.0);
            for &fid in &space.mesh.cell_faces[c] {
                let lift = &liftings[fid];
                let s = lift.support.iter().position(|&x| x == c).unwrap();
                for (g, &gc) in lift.support.iter().enumerate() {
                    for l in 0..n_loc {
                        let cu = u[space.dof(gc, l)];
                        if cu == 0.0 {
                            continue;
                        }
                        for i in 0..n_loc {
                            r.x += cu * lift.coeff_x[s][g].get(i, l) * vals[i];
                            r.y += cu * lift.coeff_y[s][g].get(i, l) * vals[i];
                        }
                    }
                }
            }
            let gv = eval_gradient(space, &v, c, *pt);
            lhs += w * r.dot(gv);
        }
    }
    let mut rhs = 0.0;
    for (fid, face) in space.mesh.faces.iter().enumerate() {
        let fq = face_quadrature(&space.mesh, fid, 2 * space.degree + 1).unwrap();
        let (sides, w_avg): (Vec<usize>, f64) = match face.neighbor {
            Some(nbr) => (vec![face.owner, nbr], 0.5),
            None => (vec![face.owner], 1.0),
        };
        for (pt, w) in fq.points.iter().zip(&fq.weights) {
            let jump = match face.neighbor {
                Some(nbr) => {
                    eval_function(space, &u, face.owner, *pt) - eval_function(space, &u, nbr, *pt)
                }
                None => eval_function(space, &u, face.owner, *pt),
            };
            let mut avg = 0.0;
            for &cc in &sides {
                eval_basis(space, cc, *pt, &mut vals, &mut grads);
                let mut gv = Point::new(0.0, 0.0);
                for l in 0..n_loc {
                    gv = gv + grads[l].scale(v[space.dof(cc, l)]);
                }
                avg += w_avg * face.normal.dot(gv);
            }
            rhs -= w * jump * avg;
        }
    }
    let scale = lhs.abs().max(rhs.abs()).max(1e-3);
    assert!((lhs - rhs).abs() <= 1e-11 * scale, "lifting adjoint: {lhs} vs {rhs}");
}

/// Dense-solve-based direct quadrature of the full bilinear form on a
/// 32-cell mesh, compared with the assembled stiffness.
fn form_oracle_check(rng: &mut SplitMix64) {
    let mesh = Arc::new(generate_voronoi_mesh(&Rect::UNIT, 32, 905, 10).unwrap());
    let space = Arc::new(DgSpace::new(mesh, 2).unwrap());
    let k = assemble_stiffness(&space, C_SIGMA).unwrap();
    let u = rng.vector(space.n_dofs());
    let v = rng.vector(space.n_dofs());
    let direct = direct_form(&space, &u, &v);
    let assembled = dot(&u, &k.mul_vec(&v));
    let scale = (dot(&u, &k.mul_vec(&u)) * dot(&v, &k.mul_vec(&v))).sqrt().max(1e-9);
    assert!(
        (assembled - direct).abs() <= 1e-10 * scale,
        "form oracle: assembled {assembled} vs direct {direct}"
    );
}

fn direct_form(space: &Arc<DgSpace>, u: &[f64], v: &[f64]) -> f64 {
    let n_loc = space.n_loc();
    let mesh = &space.mesh;
    let ru = oracle_lifting(space, u);
    let rv = oracle_lifting(space, v);
    let mut total = 0.0;
    let mut vals = vec![0.0; n_loc];
    for c in 0..mesh.n_cells() {
        let q = cell_quadrature(mesh, c, 2 * space.degree + 2).unwrap();
        for (pt, w) in q.points.iter().zip(&q.weights) {
            eval_basis_values(space, c, *pt, &mut vals);
            let mut gu = eval_gradient(space, u, c, *pt);
            let mut gv = eval_gradient(space, v, c, *pt);
            for i in 0..n_loc {
                gu.x += ru[c].0[i] * vals[i];
                gu.y += ru[c].1[i] * vals[i];
                gv.x += rv[c].0[i] * vals[i];
                gv.y += rv[c].1[i] * vals[i];
            }
            total += w * gu.dot(gv);
        }
    }
    for (fid, face) in mesh.faces.iter().enumerate() {
        let fq = face_quadrature(mesh, fid, 2 * space.degree + 1).unwrap();
        let sigma = penalty_sigma(space, face, C_SIGMA);
        for (pt, w) in fq.points.iter().zip(&fq.weights) {
            let j = |x: &[f64]| match face.neighbor {
                Some(nbr) => {
                    eval_function(space, x, face.owner, *pt) - eval_function(space, x, nbr, *pt)
                }
                None => eval_function(space, x, face.owner, *pt),
            };
            total += w * sigma * j(u) * j(v);
        }
    }
    total
}

/// Oracle lifting via test-local Gaussian elimination on quadrature-built
/// local mass matrices.
fn oracle_lifting(space: &Arc<DgSpace>, w: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n_loc = space.n_loc();
    let mesh = &space.mesh;
    let mut vals = vec![0.0; n_loc];
    let mut mass: Vec<Vec<Vec<f64>>> = Vec::new();
    for c in 0..mesh.n_cells() {
        let q = cell_quadrature(mesh, c, 2 * space.degree).unwrap();
        let mut m = vec![vec![0.0; n_loc]; n_loc];
        for (pt, wq) in q.points.iter().zip(&q.weights) {
            eval_basis_values(space, c, *pt, &mut vals);
            for i in 0..n_loc {
                for jj in 0..n_loc {
                    m[i][jj] += wq * vals[i] * vals[jj];
                }
            }
        }
        mass.push(m);
    }
    let mut acc: Vec<(Vec<f64>, Vec<f64>)> =
        (0..mesh.n_cells()).map(|_| (vec![0.0; n_loc], vec![0.0; n_loc])).collect();
    for (fid, face) in mesh.faces.iter().enumerate() {
        let fq = face_quadrature(mesh, fid, 2 * space.degree + 1).unwrap();
        let (support, w_avg): (Vec<usize>, f64) = match face.neighbor {
            Some(nbr) => (vec![face.owner, nbr], 0.5),
            None => (vec![face.owner], 1.0),
        };
        let jumps: Vec<f64> = fq
            .points
            .iter()
            .map(|&pt| match face.neighbor {
                Some(nbr) => {
                    eval_function(space, w, face.owner, pt) - eval_function(space, w, nbr, pt)
                }
                None => eval_function(space, w, face.owner, pt),
            })
            .collect();
        for &cs in &support {
            let mut rx = vec![0.0; n_loc];
            let mut ry = vec![0.0; n_loc];
            for ((pt, wq), jmp) in fq.points.iter().zip(&fq.weights).zip(&jumps) {
                eval_basis_values(space, cs, *pt, &mut vals);
                for i in 0..n_loc {
                    let m = -w_avg * wq * jmp * vals[i];
                    rx[i] += m * face.normal.x;
                    ry[i] += m * face.normal.y;
                }
            }
            let ax = ge_solve(mass[cs].clone(), rx);
            let ay = ge_solve(mass[cs].clone(), ry);
            for i in 0..n_loc {
                acc[cs].0[i] += ax[i];
                acc[cs].1[i] += ay[i];
            }
        }
    }
    acc
}

fn ge_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for cc in col..n {
                a[r][cc] -= f * a[col][cc];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for cc in (r + 1)..n {
            s -= a[r][cc] * x[cc];
        }
        x[r] = s / a[r][r];
    }
    x
}
