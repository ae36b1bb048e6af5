//! Mutual information, classical correlation, thermal discord and the PPT
//! entanglement test for the thermal state. All entropies are in bits.

use std::f64::consts::{FRAC_PI_2, LOG2_E, PI};

use serde::Serialize;

use crate::error::{QetError, Result};
use crate::numkit::entropy::neg_xlog2x;
use crate::numkit::gibbs_ratios::ScaledExponentials;
use crate::numkit::{bisect, refine_min_2d, scan_for_bracket, Box2, RefineOptions};
use crate::spin_model::{mean_energy_from_occupations, GibbsState, SystemParams};

/// Slack on the smallest partial-transpose eigenvalue for the separability verdict.
pub const SEPARABILITY_SLACK: f64 = 1e-12;

/// Entropy of the two-point distribution {(1+x)/2, (1-x)/2}.
pub fn binary_h(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(QetError::Domain(format!("h(x) needs |x| <= 1, got {x}")));
    }
    Ok(neg_xlog2x(0.5 * (1.0 + x)) + neg_xlog2x(0.5 * (1.0 - x)))
}

/// `h` for arguments that exceed 1 only through roundoff (e.g. sqrt(r^2 + c1^2) at T -> 0).
fn h_of(x: f64) -> f64 {
    debug_assert!(x.abs() <= 1.0 + 1e-9, "h argument {x} far outside [-1, 1]");
    binary_h(x.clamp(-1.0, 1.0)).expect("clamped")
}

/// Entropy of either marginal, `S(rho_A) = S(rho_B) = h(r)`.
pub fn marginal_entropy(state: &GibbsState) -> f64 {
    h_of(state.r)
}

/// Joint entropy `log2 Z + <H>/kT log2 e`.
pub fn joint_entropy(state: &GibbsState) -> f64 {
    state.z.log2() + mean_energy_from_occupations(state) / state.kt() * LOG2_E
}

/// `I = 2h(r) - log2 Z - (<H>/kT) log2 e`.
pub fn mutual_information(state: &GibbsState) -> f64 {
    (2.0 * h_of(state.r) - joint_entropy(state)).max(0.0)
}

/// `C = h(r) - h(sqrt(r^2 + c1^2))`.
pub fn classical_correlation(state: &GibbsState) -> f64 {
    h_of(state.r) - h_of(state.r.hypot(state.c1))
}

/// Discord as `I - C`.
pub fn discord(state: &GibbsState) -> f64 {
    mutual_information(state) - classical_correlation(state)
}

/// `h(r) + h(sqrt(r^2 + c1^2)) - log2 Z - (<H>/kT) log2 e`, the single-expression
/// form of the discord (note the minus sign in front of `log2 Z`).
pub fn discord_closed_form(state: &GibbsState) -> f64 {
    h_of(state.r) + h_of(state.r.hypot(state.c1)) - joint_entropy(state)
}

/// Projective measurement direction on B: `|0'> = cos(t/2)|0> + e^{i p} sin(t/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementAngles {
    pub theta: f64,
    pub phi: f64,
}

/// Average conditional entropy of A after measuring B along `angles`,
/// `q0 S(rho_0) + q1 S(rho_1)`, from the closed-form post-measurement spectra.
pub fn measurement_minand(state: &GibbsState, angles: MeasurementAngles) -> f64 {
    let (c1, c2, c3, r) = (state.c1, state.c2, state.c3, state.r);
    let (st, ct) = angles.theta.sin_cos();
    let (sp, cp) = angles.phi.sin_cos();
    let transverse = (c1 * c1 * cp * cp + c2 * c2 * sp * sp) * st * st;
    let q0 = 0.5 * (1.0 - r * ct);
    let q1 = 0.5 * (1.0 + r * ct);
    let branch = |q: f64, shift: f64| {
        if q <= 0.0 {
            return 0.0;
        }
        // A(theta, phi) -/+ 2 r c3 cos(theta) written as a sum of squares
        let radius = (transverse + shift * shift).sqrt();
        q * h_of(radius / (2.0 * q))
    };
    branch(q0, r - c3 * ct) + branch(q1, r + c3 * ct)
}

/// Minimum of [`measurement_minand`] over theta in [0, pi], phi in [0, pi/2].
/// The minand depends on phi only through cos^2 and sin^2, so the reduced
/// phi range covers every measurement.
pub fn minimize_measurement(state: &GibbsState) -> (f64, MeasurementAngles) {
    minimize_measurement_on(state, Box2::new((0.0, PI), (0.0, FRAC_PI_2)))
}

pub fn minimize_measurement_on(state: &GibbsState, domain: Box2) -> (f64, MeasurementAngles) {
    let res = refine_min_2d(
        |theta, phi| measurement_minand(state, MeasurementAngles { theta, phi }),
        domain,
        RefineOptions::default(),
    );
    (
        res.min,
        MeasurementAngles {
            theta: res.argmin[0],
            phi: res.argmin[1],
        },
    )
}

/// Partial-transpose eigenvalues `[l1-, l1+, l2-, l2+]`:
///
/// ```text
/// l1+- = e^{-x}/(mZ) (m cosh y +- k sinh x)
/// l2+- = e^{-x}/(mZ) (m cosh x +- sqrt(m^2 sinh^2 y + sinh^2 x))
/// ```
pub fn ppt_eigenvalues(params: &SystemParams) -> Result<[f64; 4]> {
    ppt_eigenvalues_at(params.kappa(), params.kt())
}

fn ppt_eigenvalues_at(kappa: f64, kt: f64) -> Result<[f64; 4]> {
    let e = ScaledExponentials::new(kappa, kt)?;
    let m = e.m;
    let pre = 1.0 / (2.0 * m * e.partition());
    let root = (m * e.sinh_y).hypot(e.sinh_x);
    Ok([
        pre * (m * e.cosh_y - kappa * e.sinh_x),
        pre * (m * e.cosh_y + kappa * e.sinh_x),
        pre * (m * e.cosh_x - root),
        pre * (m * e.cosh_x + root),
    ])
}

/// `2 e^{-x} (m cosh y - k sinh x)`; non-negative exactly on separable states.
pub fn separability_margin(kappa: f64, kt: f64) -> Result<f64> {
    let e = ScaledExponentials::new(kappa, kt)?;
    Ok(e.m * e.cosh_y - kappa * e.sinh_x)
}

/// PPT verdict: separable iff `m cosh(2k/kT) >= k sinh(2m/kT)`, i.e. `l1- >= 0`.
pub fn is_separable(params: &SystemParams) -> Result<bool> {
    Ok(ppt_eigenvalues(params)?[0] >= -SEPARABILITY_SLACK)
}

const THRESHOLD_SCAN: (f64, f64, f64) = (1e-4, 1e4, 1.25);
/// Relative bisection width for the temperature thresholds.
pub const THRESHOLD_TOL: f64 = 1e-14;

/// Temperature above which the state is separable. `None` when `kappa == 0`
/// (separable at every temperature).
pub fn entanglement_threshold_te(kappa: f64) -> Result<Option<f64>> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(QetError::Domain(format!(
            "coupling must be >= 0, got {kappa}"
        )));
    }
    if kappa == 0.0 {
        return Ok(None);
    }
    let f = |kt: f64| separability_margin(kappa, kt).unwrap_or(f64::NAN);
    let (lo, mut hi, ratio) = THRESHOLD_SCAN;
    let bracket = loop {
        match scan_for_bracket(f, lo, hi, ratio) {
            Ok(b) => break b,
            Err(e) if hi >= 1e8 => return Err(e),
            Err(_) => hi *= 100.0,
        }
    };
    bisect(f, bracket, THRESHOLD_TOL).map(Some)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    /// `[l1-, l1+, l2-, l2+]`
    pub ppt_eigs: [f64; 4],
    pub separable: bool,
    pub marginal_entropy: f64,
}

pub fn correlation_report(state: &GibbsState) -> Result<CorrelationReport> {
    let ppt_eigs = ppt_eigenvalues(&state.params)?;
    let mutual_info = mutual_information(state);
    let classical = classical_correlation(state);
    Ok(CorrelationReport {
        mutual_info,
        classical,
        discord: mutual_info - classical,
        ppt_eigs,
        separable: ppt_eigs[0] >= -SEPARABILITY_SLACK,
        marginal_entropy: marginal_entropy(state),
    })
}
