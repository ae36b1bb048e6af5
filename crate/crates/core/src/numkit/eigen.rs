//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! the classical real Jacobi rotation, so the combined 2x2 unitary is
//!
//! ```text
//! U = [[ c,             s            ],
//!      [ -s e^{-i phi},  c e^{-i phi} ]]     a_pq = |a_pq| e^{i phi}
//! ```
//!
//! acting on rows/columns `p`, `q`; `A <- U^dagger A U`, `V <- V U`.

use num_complex::Complex64 as C64;

use super::CMatrix;
use crate::error::{QetError, Result};

/// Off-diagonal target, relative to `max(1, ||A||_F)`.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// V diag(lambda) V^dagger.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let d = CMatrix::diag_real(&self.eigenvalues).expect("dims already validated");
        &(v * &d) * &v.adjoint()
    }

    /// Applies `f` to the spectrum: V diag(f(lambda)) V^dagger.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let d = CMatrix::diag_real(&mapped).expect("dims already validated");
        &(v * &d) * &v.adjoint()
    }
}

fn off_diagonal_max(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max(a[(i, j)].norm());
        }
    }
    worst
}

pub fn hermitian_eig(input: &CMatrix) -> Result<EigenDecomposition> {
    if !input.is_square() {
        return Err(QetError::Contract(format!(
            "eigensolver needs a square matrix, got {}x{}",
            input.rows(),
            input.cols()
        )));
    }
    let scale = input.frobenius_norm().max(1.0);
    let defect = input.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(QetError::Contract(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }

    let n = input.rows();
    let mut a = input.clone();
    // symmetrize exactly so the rotations see a Hermitian matrix
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n)?;
    let target = JACOBI_OFFDIAG_TOL * scale;

    let mut sweeps = 0;
    while off_diagonal_max(&a) >= target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(QetError::Numerical {
                what: "Jacobi eigensolver",
                residual: off_diagonal_max(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |row, col| v[(row, order[col])])?;
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let e = phase.conj(); // e^{-i phi}

    // U entries on the (p, q) block
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = e * (-s);
    let u_qq = e * c;

    let n = a.rows();
    // A <- A U (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- U^dagger A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}
