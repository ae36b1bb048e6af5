use num_complex::Complex64 as C64;

use super::{CMatrix, MAX_DIM};
use crate::error::{QetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(QetError::Dimension(format!(
            "Kronecker product would be {rows}x{cols}"
        )));
    }
    CMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows(), j / b.cols())] * b[(i % b.rows(), j % b.cols())]
    })
}

fn require_two_qubit(rho: &CMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(QetError::Dimension(format!(
            "expected a 4x4 two-qubit operator, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Transpose on the second tensor factor: <ab|rho^TB|cd> = <ad|rho|cb>.
pub fn partial_transpose_b(rho: &CMatrix) -> Result<CMatrix> {
    require_two_qubit(rho)?;
    CMatrix::from_fn(4, 4, |i, j| {
        let (a, b) = (i / 2, i % 2);
        let (c, d) = (j / 2, j % 2);
        rho[(2 * a + d, 2 * c + b)]
    })
}

/// Reduced 2x2 state of the kept subsystem.
pub fn partial_trace(rho: &CMatrix, keep: Subsystem) -> Result<CMatrix> {
    require_two_qubit(rho)?;
    CMatrix::from_fn(2, 2, |i, j| {
        (0..2)
            .map(|k| match keep {
                Subsystem::A => rho[(2 * i + k, 2 * j + k)],
                Subsystem::B => rho[(2 * k + i, 2 * k + j)],
            })
            .sum::<C64>()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::pauli;
    use proptest::prelude::*;

    #[test]
    fn kron_identities() {
        let i4 = kron(&pauli::identity(), &pauli::identity()).unwrap();
        assert_eq!(i4, CMatrix::identity(4).unwrap());
        let xx = kron(&pauli::x(), &pauli::x()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(i, j)], C64::new(expect, 0.0));
            }
        }
        let zsum = &kron(&pauli::z(), &pauli::identity()).unwrap()
            + &kron(&pauli::identity(), &pauli::z()).unwrap();
        assert_eq!(zsum, CMatrix::diag_real(&[2.0, 0.0, 0.0, -2.0]).unwrap());
    }

    #[test]
    fn kron_dimension_limit() {
        let i4 = CMatrix::identity(4).unwrap();
        assert!(matches!(kron(&i4, &i4), Err(QetError::Dimension(_))));
        assert!(kron(&i4, &pauli::x()).is_ok());
    }

    #[test]
    fn partial_ops_reject_wrong_size() {
        let i2 = pauli::identity();
        assert!(partial_transpose_b(&i2).is_err());
        assert!(partial_trace(&i2, Subsystem::A).is_err());
    }

    #[test]
    fn maximally_mixed() {
        let m = CMatrix::identity(4).unwrap().scale_real(0.25);
        assert_eq!(partial_transpose_b(&m).unwrap(), m);
        let half = pauli::identity().scale_real(0.5);
        assert!(
            partial_trace(&m, Subsystem::A)
                .unwrap()
                .frobenius_distance(&half)
                < 1e-15
        );
    }

    #[test]
    fn product_state_marginals() {
        let ta = CMatrix::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]).unwrap();
        let tb = CMatrix::from_rows(&[
            &[C64::new(0.4, 0.0), C64::new(0.0, 0.2)],
            &[C64::new(0.0, -0.2), C64::new(0.6, 0.0)],
        ])
        .unwrap();
        let rho = kron(&ta, &tb).unwrap();
        assert!(
            partial_trace(&rho, Subsystem::A)
                .unwrap()
                .frobenius_distance(&ta)
                < 1e-15
        );
        assert!(
            partial_trace(&rho, Subsystem::B)
                .unwrap()
                .frobenius_distance(&tb)
                < 1e-15
        );
        // transposing B on a product acts only on tb
        let pt = partial_transpose_b(&rho).unwrap();
        assert!(pt.frobenius_distance(&kron(&ta, &tb.transpose()).unwrap()) < 1e-15);
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = CMatrix> {
        (1usize..=max, 1usize..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-2.0f64..2.0, 2 * r * c).prop_map(move |xs| {
                CMatrix::from_fn(r, c, |i, j| {
                    C64::new(xs[2 * (i * c + j)], xs[2 * (i * c + j) + 1])
                })
                .unwrap()
            })
        })
    }

    fn four_by_four() -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec(-2.0f64..2.0, 32).prop_map(|xs| {
            CMatrix::from_fn(4, 4, |i, j| {
                C64::new(xs[2 * (i * 4 + j)], xs[2 * (i * 4 + j) + 1])
            })
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn kron_associative(a in small_matrix(2), b in small_matrix(2), c in small_matrix(2)) {
            let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
            let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
            prop_assert!(left.frobenius_distance(&right) < 1e-13);
        }

        #[test]
        fn kron_bilinear(a in small_matrix(2), b in small_matrix(2), s in -3.0f64..3.0) {
            let a2 = a.scale_real(s);
            let lhs = kron(&(&a + &a2), &b).unwrap();
            let rhs = &kron(&a, &b).unwrap() + &kron(&a2, &b).unwrap();
            prop_assert!(lhs.frobenius_distance(&rhs) < 1e-13);
        }

        #[test]
        fn partial_transpose_involution(m in four_by_four()) {
            let h = &m + &m.adjoint();
            let pt = partial_transpose_b(&h).unwrap();
            prop_assert_eq!(partial_transpose_b(&pt).unwrap(), h.clone());
            prop_assert!((pt.trace() - h.trace()).norm() < 1e-14);
            prop_assert!(pt.is_hermitian(1e-14));
        }

        #[test]
        fn partial_trace_preserves_trace(m in four_by_four()) {
            let t = m.trace();
            prop_assert!((partial_trace(&m, Subsystem::A).unwrap().trace() - t).norm() < 1e-13);
            prop_assert!((partial_trace(&m, Subsystem::B).unwrap().trace() - t).norm() < 1e-13);
        }
    }
}
