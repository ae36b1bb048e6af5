//! The two-spin model: `H = H_A (x) I + I (x) H_B + V` with
//! `H_A = H_B = I/m + sigma_z`, `V = 2k sigma_x (x) sigma_x + (2k^2/m) I`,
//! `m = sqrt(1 + k^2)`.
//!
//! Basis order is fixed to {|00>, |01>, |10>, |11>} (first factor is particle A).

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{QetError, Result};
use crate::numkit::{self, hermitian_eig, kron, pauli, CMatrix, GibbsCoefficients};

/// Supported temperature range; T = 0 and T = infinity are limits, not inputs.
pub const KT_MIN: f64 = 1e-6;
pub const KT_MAX: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    kappa: f64,
    kt: f64,
    m: f64,
}

impl SystemParams {
    pub fn new(kappa: f64, kt: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(QetError::Domain(format!(
                "coupling kappa must be finite and >= 0, got {kappa}"
            )));
        }
        if !(KT_MIN..=KT_MAX).contains(&kt) {
            return Err(QetError::Domain(format!(
                "kT must lie in [{KT_MIN:e}, {KT_MAX:e}], got {kt}"
            )));
        }
        Ok(Self {
            kappa,
            kt,
            m: kappa.hypot(1.0),
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kt(&self) -> f64 {
        self.kt
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn with_kt(&self, kt: f64) -> Result<Self> {
        Self::new(self.kappa, kt)
    }
}

pub fn hamiltonian(kappa: f64) -> CMatrix {
    let m = kappa.hypot(1.0);
    let id = pauli::identity();
    let local = &id.scale_real(1.0 / m) + &pauli::z();
    let kron_ = |a: &CMatrix, b: &CMatrix| kron(a, b).expect("4x4 fits");
    let interaction = &kron_(&pauli::x(), &pauli::x()).scale_real(2.0 * kappa)
        + &CMatrix::identity(4)
            .unwrap()
            .scale_real(2.0 * kappa * kappa / m);
    &(&kron_(&local, &id) + &kron_(&id, &local)) + &interaction
}

pub fn build_hamiltonian(params: &SystemParams) -> CMatrix {
    hamiltonian(params.kappa)
}

/// Closed-form spectrum and eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub energies: [f64; 4],
    /// Amplitudes in the {|00>, |01>, |10>, |11>} basis.
    pub states: [[C64; 4]; 4],
}

impl EigenSystem {
    pub fn projector(&self, i: usize) -> CMatrix {
        CMatrix::outer(&self.states[i], &self.states[i]).unwrap()
    }
}

pub fn eigensystem_for(kappa: f64) -> EigenSystem {
    let m = kappa.hypot(1.0);
    let re = |x: f64| C64::new(x, 0.0);
    let lo = ((m - 1.0) / (2.0 * m)).sqrt();
    let hi = ((m + 1.0) / (2.0 * m)).sqrt();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    EigenSystem {
        energies: [0.0, 2.0 * m - 2.0 * kappa, 2.0 * m + 2.0 * kappa, 4.0 * m],
        states: [
            [re(lo), re(0.0), re(0.0), re(-hi)],
            [re(0.0), re(h), re(-h), re(0.0)],
            [re(0.0), re(h), re(h), re(0.0)],
            [re(hi), re(0.0), re(0.0), re(lo)],
        ],
    }
}

pub fn eigensystem(params: &SystemParams) -> EigenSystem {
    eigensystem_for(params.kappa)
}

/// Thermal state with its closed-form coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct GibbsState {
    pub params: SystemParams,
    #[serde(rename = "Z")]
    pub z: f64,
    pub p: [f64; 4],
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub r: f64,
    #[serde(skip)]
    pub rho: CMatrix,
}

impl GibbsState {
    pub fn kappa(&self) -> f64 {
        self.params.kappa
    }

    pub fn kt(&self) -> f64 {
        self.params.kt
    }

    pub fn m(&self) -> f64 {
        self.params.m
    }

    /// Builds the state from already evaluated coefficients.
    pub fn from_coefficients(params: SystemParams, g: GibbsCoefficients) -> Self {
        Self {
            params,
            z: g.z,
            p: g.p,
            c1: g.c1,
            c2: g.c2,
            c3: g.c3,
            r: g.r,
            rho: x_state(g.c1, g.c2, g.c3, g.r),
        }
    }
}

/// The X-shaped thermal matrix in terms of (c1, c2, c3, r).
pub fn x_state(c1: f64, c2: f64, c3: f64, r: f64) -> CMatrix {
    let d = |v: f64| v / 4.0;
    CMatrix::from_real_rows(&[
        &[d(1.0 + c3 - 2.0 * r), 0.0, 0.0, d(-c1 - c2)],
        &[0.0, d(1.0 - c3), d(-c1 + c2), 0.0],
        &[0.0, d(-c1 + c2), d(1.0 - c3), 0.0],
        &[d(-c1 - c2), 0.0, 0.0, d(1.0 + c3 + 2.0 * r)],
    ])
    .expect("finite 4x4")
}

pub fn gibbs_state(params: &SystemParams) -> Result<GibbsState> {
    let g = numkit::stable_gibbs_ratios(params.kappa, params.kt)?;
    Ok(GibbsState::from_coefficients(*params, g))
}

/// Same state built from the unprotected textbook coefficient formulas.
pub fn gibbs_state_naive(params: &SystemParams) -> Result<GibbsState> {
    let g = numkit::naive_gibbs_ratios(params.kappa, params.kt)?;
    Ok(GibbsState::from_coefficients(*params, g))
}

/// Thermal state from a numerical diagonalization of H; uses no closed forms.
pub fn gibbs_state_oracle(params: &SystemParams) -> Result<CMatrix> {
    let eig = hermitian_eig(&build_hamiltonian(params))?;
    let ground = eig.eigenvalues[0];
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-(e - ground) / params.kt).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let v = &eig.eigenvectors;
    let mut rho = CMatrix::zeros(4, 4)?;
    for (k, w) in weights.iter().enumerate() {
        let col = v.column(k);
        rho = &rho + &CMatrix::outer(&col, &col)?.scale_real(w / z);
    }
    Ok(rho)
}

/// `|E0><E0|`, the T -> 0 limit.
pub fn ground_state(kappa: f64) -> CMatrix {
    eigensystem_for(kappa).projector(0)
}

/// `I/4`, the T -> infinity limit.
pub fn maximally_mixed() -> CMatrix {
    CMatrix::identity(4).unwrap().scale_real(0.25)
}

/// `<H> = 2m - 2 k c1 - 2r`.
pub fn mean_energy(state: &GibbsState) -> f64 {
    2.0 * state.m() - 2.0 * state.kappa() * state.c1 - 2.0 * state.r
}

/// `sum_i p_i E_i`; same value as [`mean_energy`] without the cancellation at low kT.
pub fn mean_energy_from_occupations(state: &GibbsState) -> f64 {
    let e = eigensystem_for(state.kappa()).energies;
    state.p.iter().zip(e).map(|(p, e)| p * e).sum()
}
