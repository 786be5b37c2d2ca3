//! Assembly of the level matrices.
//!
//! The stiffness matrix realizes the lifted bilinear form exactly: the cross
//! terms between gradients and liftings are written as face consistency
//! integrals (the lifting's defining identity applied to broken gradients),
//! and the lifting product Σ_κ ∫_κ R([[u]])·R([[v]]) is expanded per cell
//! over all faces of the cell, which couples the cell's neighbors with each
//! other. Dropping those cross-face products would change the operator.

use crate::basis::{eval_basis, eval_basis_values};
use crate::quad::{cell_quadrature, face_quadrature};
use crate::space::DgSpace;
use crate::DgError;
use geomkit::Point;
use polymesh::Face;
use sparsela::dense::DenseCholesky;
use sparsela::{CsrMatrix, DenseMatrix, Triplets};

/// Per-cell dense mass blocks and their Cholesky factors.
pub struct LocalMass {
    pub dense: Vec<DenseMatrix>,
    pub chol: Vec<DenseCholesky>,
}

impl LocalMass {
    pub fn new(space: &DgSpace) -> Result<Self, DgError> {
        let n_loc = space.n_loc();
        let mut dense = Vec::with_capacity(space.n_cells());
        let mut chol = Vec::with_capacity(space.n_cells());
        let mut vals = vec![0.0; n_loc];
        for c in 0..space.n_cells() {
            let q = cell_quadrature(&space.mesh, c, 2 * space.degree)?;
            let mut m = DenseMatrix::zeros(n_loc, n_loc);
            for (pt, w) in q.points.iter().zip(&q.weights) {
                eval_basis_values(space, c, *pt, &mut vals);
                for i in 0..n_loc {
                    let wi = w * vals[i];
                    for j in 0..n_loc {
                        m.add(i, j, wi * vals[j]);
                    }
                }
            }
            chol.push(DenseCholesky::factor(&m)?);
            dense.push(m);
        }
        Ok(LocalMass { dense, chol })
    }
}

/// Block-diagonal mass matrix, exact for the polynomial basis.
pub fn assemble_mass(space: &DgSpace) -> Result<CsrMatrix, DgError> {
    let lm = LocalMass::new(space)?;
    Ok(mass_to_csr(space, &lm))
}

pub fn mass_to_csr(space: &DgSpace, lm: &LocalMass) -> CsrMatrix {
    let n_loc = space.n_loc();
    let mut t = Triplets::new(space.n_dofs(), space.n_dofs());
    for c in 0..space.n_cells() {
        for i in 0..n_loc {
            for j in 0..n_loc {
                t.push(space.dof(c, i), space.dof(c, j), lm.dense[c].get(i, j));
            }
        }
    }
    t.to_csr()
}

/// Interior-penalty stabilization value on a face:
/// C_σ max over the incident cells of p²/h_κ (boundary: the owner alone).
pub fn penalty_sigma(space: &DgSpace, face: &Face, c_sigma: f64) -> f64 {
    let p2 = (space.degree * space.degree) as f64;
    let own = p2 / space.mesh.cell_diameter[face.owner];
    let worst = match face.neighbor {
        Some(nbr) => own.max(p2 / space.mesh.cell_diameter[nbr]),
        None => own,
    };
    c_sigma * worst
}

/// Lifting of the jumps generated by one face.
///
/// `coeff_x[s][g]` (and `_y`) hold, column by column, the coefficients on
/// support cell `s` of the x/y components of R([[φ_l]]) where φ_l runs over
/// the basis of generator cell `g`. Support and generator cells coincide:
/// the owner, then the neighbor for interior faces.
pub struct FaceLifting {
    pub face: usize,
    pub support: Vec<usize>,
    pub coeff_x: Vec<Vec<DenseMatrix>>,
    pub coeff_y: Vec<Vec<DenseMatrix>>,
}

/// Solve the local vector mass systems for one face's lifting.
pub fn assemble_lifting(
    space: &DgSpace,
    local_mass: &LocalMass,
    face_id: usize,
) -> Result<FaceLifting, DgError> {
    let n_loc = space.n_loc();
    let face = &space.mesh.faces[face_id];
    let support: Vec<usize> = match face.neighbor {
        Some(nbr) => vec![face.owner, nbr],
        None => vec![face.owner],
    };
    let w_avg = if face.neighbor.is_some() { 0.5 } else { 1.0 };
    let fq = face_quadrature(&space.mesh, face_id, 2 * space.degree + 1)?;
    let nq = fq.points.len();

    // Traces of every support cell's basis at the face points.
    let mut traces: Vec<Vec<f64>> = Vec::with_capacity(support.len());
    let mut buf = vec![0.0; n_loc];
    for &c in &support {
        let mut t = vec![0.0; n_loc * nq];
        for (q, pt) in fq.points.iter().enumerate() {
            eval_basis_values(space, c, *pt, &mut buf);
            for i in 0..n_loc {
                t[i * nq + q] = buf[i];
            }
        }
        traces.push(t);
    }

    let mut coeff_x = Vec::with_capacity(support.len());
    let mut coeff_y = Vec::with_capacity(support.len());
    for (s, &cs) in support.iter().enumerate() {
        let mut row_x = Vec::with_capacity(support.len());
        let mut row_y = Vec::with_capacity(support.len());
        for (g, &cg) in support.iter().enumerate() {
            let sign = if cg == face.owner { 1.0 } else { -1.0 };
            let factor = -w_avg * sign;
            // Face mass between the traces: FM[i][l] = ∫_F φ_i^{cs} φ_l^{cg}
            let mut ax = DenseMatrix::zeros(n_loc, n_loc);
            let mut ay = DenseMatrix::zeros(n_loc, n_loc);
            let mut col = vec![0.0; n_loc];
            for l in 0..n_loc {
                for (i, ci) in col.iter_mut().enumerate() {
                    let mut s_acc = 0.0;
                    for q in 0..nq {
                        s_acc += fq.weights[q] * traces[s][i * nq + q] * traces[g][l * nq + q];
                    }
                    *ci = s_acc;
                }
                let a = local_mass.chol[cs].solve(&col);
                for i in 0..n_loc {
                    ax.set(i, l, factor * face.normal.x * a[i]);
                    ay.set(i, l, factor * face.normal.y * a[i]);
                }
            }
            row_x.push(ax);
            row_y.push(ay);
        }
        coeff_x.push(row_x);
        coeff_y.push(row_y);
    }
    Ok(FaceLifting { face: face_id, support, coeff_x, coeff_y })
}

fn face_sides(face: &Face) -> (Vec<(usize, f64)>, f64) {
    match face.neighbor {
        Some(nbr) => (vec![(face.owner, 1.0), (nbr, -1.0)], 0.5),
        None => (vec![(face.owner, 1.0)], 1.0),
    }
}

/// Volume ∇·∇ triplets shared by the stiffness and the DG-norm Gram.
fn add_volume_gradients(space: &DgSpace, t: &mut Triplets) -> Result<(), DgError> {
    let n_loc = space.n_loc();
    let mut vals = vec![0.0; n_loc];
    let mut grads = vec![Point::new(0.0, 0.0); n_loc];
    for c in 0..space.n_cells() {
        let q = cell_quadrature(&space.mesh, c, 2 * space.degree + 2)?;
        let mut block = vec![0.0; n_loc * n_loc];
        for (pt, w) in q.points.iter().zip(&q.weights) {
            eval_basis(space, c, *pt, &mut vals, &mut grads);
            for i in 0..n_loc {
                let gi = grads[i];
                for j in 0..n_loc {
                    block[i * n_loc + j] += w * gi.dot(grads[j]);
                }
            }
        }
        for i in 0..n_loc {
            for j in 0..n_loc {
                t.push(space.dof(c, i), space.dof(c, j), block[i * n_loc + j]);
            }
        }
    }
    Ok(())
}

/// Face penalty (always) and SIP consistency terms (stiffness only).
fn add_face_terms(
    space: &DgSpace,
    c_sigma: f64,
    with_consistency: bool,
    t: &mut Triplets,
) -> Result<(), DgError> {
    let n_loc = space.n_loc();
    let mut vals = vec![0.0; n_loc];
    let mut grads = vec![Point::new(0.0, 0.0); n_loc];
    for (fid, face) in space.mesh.faces.iter().enumerate() {
        let fq = face_quadrature(&space.mesh, fid, 2 * space.degree + 1)?;
        let nq = fq.points.len();
        let (sides, w_avg) = face_sides(face);
        let sigma = penalty_sigma(space, face, c_sigma);
        // traces and normal gradient traces per side
        let mut tr: Vec<Vec<f64>> = Vec::with_capacity(sides.len());
        let mut ngr: Vec<Vec<f64>> = Vec::with_capacity(sides.len());
        for &(c, _) in &sides {
            let mut tv = vec![0.0; n_loc * nq];
            let mut tg = vec![0.0; n_loc * nq];
            for (q, pt) in fq.points.iter().enumerate() {
                eval_basis(space, c, *pt, &mut vals, &mut grads);
                for i in 0..n_loc {
                    tv[i * nq + q] = vals[i];
                    tg[i * nq + q] = face.normal.dot(grads[i]);
                }
            }
            tr.push(tv);
            ngr.push(tg);
        }
        for (su_idx, &(cu, su)) in sides.iter().enumerate() {
            for (sv_idx, &(cv, sv)) in sides.iter().enumerate() {
                for i in 0..n_loc {
                    for j in 0..n_loc {
                        let mut pen = 0.0;
                        let mut uv_grad = 0.0;
                        let mut vu_grad = 0.0;
                        for q in 0..nq {
                            let w = fq.weights[q];
                            pen += w * tr[su_idx][i * nq + q] * tr[sv_idx][j * nq + q];
                            if with_consistency {
                                uv_grad += w * tr[su_idx][i * nq + q] * ngr[sv_idx][j * nq + q];
                                vu_grad += w * tr[sv_idx][j * nq + q] * ngr[su_idx][i * nq + q];
                            }
                        }
                        let mut entry = sigma * su * sv * pen;
                        if with_consistency {
                            entry += -w_avg * su * uv_grad - w_avg * sv * vu_grad;
                        }
                        t.push(space.dof(cu, i), space.dof(cv, j), entry);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Per-cell lifting products Σ_κ ∫_κ R([[u]])·R([[v]]), including the
/// cross-face terms between different faces of the same cell.
fn add_lifting_products(
    space: &DgSpace,
    local_mass: &LocalMass,
    liftings: &[FaceLifting],
    t: &mut Triplets,
) -> Result<(), DgError> {
    let n_loc = space.n_loc();
    for c in 0..space.n_cells() {
        // Generator cells seen from c: itself plus each face neighbor.
        let mut gens: Vec<usize> = vec![c];
        for &fid in &space.mesh.cell_faces[c] {
            let f = &space.mesh.faces[fid];
            let other = if f.owner == c { f.neighbor } else { Some(f.owner) };
            if let Some(o) = other {
                if !gens.contains(&o) {
                    gens.push(o);
                }
            }
        }
        let ng = gens.len();
        let cols = ng * n_loc;
        let mut ax = vec![0.0; n_loc * cols];
        let mut ay = vec![0.0; n_loc * cols];
        for &fid in &space.mesh.cell_faces[c] {
            let lift = &liftings[fid];
            let s = lift.support.iter().position(|&x| x == c).expect("cell not in face support");
            for (g, &gc) in lift.support.iter().enumerate() {
                let col0 = gens.iter().position(|&x| x == gc).unwrap() * n_loc;
                for i in 0..n_loc {
                    for l in 0..n_loc {
                        ax[i * cols + col0 + l] += lift.coeff_x[s][g].get(i, l);
                        ay[i * cols + col0 + l] += lift.coeff_y[s][g].get(i, l);
                    }
                }
            }
        }
        // B = Ax^T M Ax + Ay^T M Ay over the stacked generator columns.
        let m = &local_mass.dense[c];
        let mut tx = vec![0.0; n_loc * cols];
        let mut ty = vec![0.0; n_loc * cols];
        for i in 0..n_loc {
            for k in 0..n_loc {
                let mik = m.get(i, k);
                if mik == 0.0 {
                    continue;
                }
                for r in 0..cols {
                    tx[i * cols + r] += mik * ax[k * cols + r];
                    ty[i * cols + r] += mik * ay[k * cols + r];
                }
            }
        }
        let mut b = vec![0.0; cols * cols];
        for i in 0..n_loc {
            for r in 0..cols {
                let axi = ax[i * cols + r];
                let ayi = ay[i * cols + r];
                if axi == 0.0 && ayi == 0.0 {
                    continue;
                }
                for s in 0..cols {
                    b[r * cols + s] += axi * tx[i * cols + s] + ayi * ty[i * cols + s];
                }
            }
        }
        for (rg, &gr) in gens.iter().enumerate() {
            for lr in 0..n_loc {
                let row = space.dof(gr, lr);
                for (sg, &gs) in gens.iter().enumerate() {
                    for ls in 0..n_loc {
                        let v = b[(rg * n_loc + lr) * cols + sg * n_loc + ls];
                        if v != 0.0 {
                            t.push(row, space.dof(gs, ls), v);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// The lifted SIP stiffness matrix. SPD for any positive penalty, symmetric
/// by construction.
pub fn assemble_stiffness(space: &DgSpace, c_sigma: f64) -> Result<CsrMatrix, DgError> {
    let lm = LocalMass::new(space)?;
    assemble_stiffness_with(space, c_sigma, &lm)
}

pub fn assemble_stiffness_with(
    space: &DgSpace,
    c_sigma: f64,
    local_mass: &LocalMass,
) -> Result<CsrMatrix, DgError> {
    let liftings: Vec<FaceLifting> = (0..space.mesh.faces.len())
        .map(|fid| assemble_lifting(space, local_mass, fid))
        .collect::<Result<_, _>>()?;
    let mut t = Triplets::new(space.n_dofs(), space.n_dofs());
    add_volume_gradients(space, &mut t)?;
    add_face_terms(space, c_sigma, true, &mut t)?;
    add_lifting_products(space, local_mass, &liftings, &mut t)?;
    Ok(t.to_csr())
}

/// Gram matrix of the DG norm: broken gradients plus jump penalties, no
/// lifting terms.
pub fn assemble_dg_norm_gram(space: &DgSpace, c_sigma: f64) -> Result<CsrMatrix, DgError> {
    let mut t = Triplets::new(space.n_dofs(), space.n_dofs());
    add_volume_gradients(space, &mut t)?;
    add_face_terms(space, c_sigma, false, &mut t)?;
    Ok(t.to_csr())
}

/// Load vector (f, φ_k) per DOF.
pub fn assemble_rhs<F: Fn(Point) -> f64>(space: &DgSpace, f: F) -> Result<Vec<f64>, DgError> {
    let n_loc = space.n_loc();
    let mut b = vec![0.0; space.n_dofs()];
    let mut vals = vec![0.0; n_loc];
    for c in 0..space.n_cells() {
        let q = cell_quadrature(&space.mesh, c, 2 * space.degree + 2)?;
        for (pt, w) in q.points.iter().zip(&q.weights) {
            let fv = f(*pt);
            if fv == 0.0 {
                continue;
            }
            eval_basis_values(space, c, *pt, &mut vals);
            for l in 0..n_loc {
                b[space.dof(c, l)] += w * fv * vals[l];
            }
        }
    }
    Ok(b)
}
