//! Brute-force reference computations on explicit density matrices.
//!
//! Nothing here uses the closed-form coefficients: states come from a
//! numerical diagonalization of H and every quantity is a matrix product,
//! trace or spectrum.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::numkit::entropy::shannon_bits;
use crate::numkit::{
    hermitian_eig, kron, partial_trace, partial_transpose_b, pauli, refine_min_2d, Box2, CMatrix,
    RefineOptions, Subsystem,
};
use crate::qet_protocol::{run_protocol_on, ProtocolTrace};
use crate::spin_model::{gibbs_state_oracle, hamiltonian, SystemParams};

/// Thermal state from the numerical spectrum of H.
pub fn thermal_state(params: &SystemParams) -> Result<CMatrix> {
    gibbs_state_oracle(params)
}

/// `tr(H rho)`.
pub fn energy(kappa: f64, rho: &CMatrix) -> f64 {
    hamiltonian(kappa).expectation(rho)
}

/// `sum_k (I (x) K_k) rho (I (x) K_k)^dagger`.
pub fn channel_on_b(rho: &CMatrix, kraus: &[CMatrix]) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(4, 4)?;
    for k in kraus {
        let lifted = kron(&pauli::identity(), k)?;
        out = &out + &lifted.conjugate(rho);
    }
    Ok(out)
}

/// Energy removed by the channel `kraus` on B: `tr(H rho) - tr(H G(rho))`.
pub fn extracted_by_channel(kappa: f64, rho: &CMatrix, kraus: &[CMatrix]) -> Result<f64> {
    Ok(energy(kappa, rho) - energy(kappa, &channel_on_b(rho, kraus)?))
}

/// The general one-qubit unitary with angles `(u, v, w)`:
///
/// ```text
/// [[ e^{iu/2} cos(w/2), -e^{-iv/2} sin(w/2) ],
///  [ e^{iv/2} sin(w/2),  e^{-iu/2} cos(w/2) ]]
/// ```
pub fn unitary_uvw(u: f64, v: f64, w: f64) -> CMatrix {
    let (sw, cw) = (0.5 * w).sin_cos();
    let ph = |a: f64| C64::from_polar(1.0, 0.5 * a);
    CMatrix::from_rows(&[&[ph(u) * cw, -ph(-v) * sw], &[ph(v) * sw, ph(-u) * cw]])
        .expect("finite 2x2")
}

pub fn von_neumann_bits(rho: &CMatrix) -> Result<f64> {
    Ok(shannon_bits(&hermitian_eig(rho)?.eigenvalues))
}

/// `S(A) + S(B) - S(AB)`.
pub fn mutual_information(rho: &CMatrix) -> Result<f64> {
    let sa = von_neumann_bits(&partial_trace(rho, Subsystem::A)?)?;
    let sb = von_neumann_bits(&partial_trace(rho, Subsystem::B)?)?;
    Ok(sa + sb - von_neumann_bits(rho)?)
}

/// Average entropy of A after a projective measurement of B along
/// `|0'> = cos(t/2)|0> + e^{ip} sin(t/2)|1>`, `|1'>` orthogonal.
pub fn conditional_entropy_after_measuring_b(rho: &CMatrix, theta: f64, phi: f64) -> Result<f64> {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    let basis = [[C64::new(c, 0.0), e * s], [-e.conj() * s, C64::new(c, 0.0)]];
    let mut total = 0.0;
    for b in basis {
        // |1'> above is orthogonal to |0'> up to a global phase
        let proj = kron(&pauli::identity(), &CMatrix::outer(&b, &b)?)?;
        let post = proj.conjugate(rho);
        let q = post.trace().re;
        if q <= 1e-300 {
            continue;
        }
        let rho_a = partial_trace(&post, Subsystem::A)?.scale_real(1.0 / q);
        total += q * von_neumann_bits(&rho_a)?;
    }
    Ok(total)
}

/// Classical correlation by numerical minimization over measurement directions on B.
pub fn classical_correlation(rho: &CMatrix) -> Result<f64> {
    let sa = von_neumann_bits(&partial_trace(rho, Subsystem::A)?)?;
    let opts = RefineOptions {
        grid: 61,
        ..RefineOptions::default()
    };
    let res = refine_min_2d(
        |t, p| conditional_entropy_after_measuring_b(rho, t, p).unwrap_or(f64::INFINITY),
        Box2::new(
            (0.0, std::f64::consts::PI),
            (0.0, 2.0 * std::f64::consts::PI),
        ),
        opts,
    );
    Ok(sa - res.min)
}

/// Ascending spectrum of the partial transpose on B.
pub fn ppt_spectrum(rho: &CMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(&partial_transpose_b(rho)?)?.eigenvalues)
}

/// Runs the protocol on the numerically built thermal state.
pub fn protocol(params: &SystemParams, theta: f64) -> Result<ProtocolTrace> {
    run_protocol_on(&thermal_state(params)?, &hamiltonian(params.kappa()), theta)
}
