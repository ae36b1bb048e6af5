//! The three-step teleportation protocol: measure `sigma_x` on A, send the
//! outcome, apply `U(alpha) = I cos(theta) - i alpha sigma_y sin(theta)` on B.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{QetError, Result};
use crate::numkit::gibbs_ratios::ScaledExponentials;
use crate::numkit::{kron, pauli, CMatrix};
use crate::spin_model::{build_hamiltonian, GibbsState};

/// Outcome of the `sigma_x` measurement on A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

impl TryFrom<i32> for Outcome {
    type Error = QetError;
    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            _ => Err(QetError::Domain(format!(
                "measurement outcome must be +1 or -1, got {v}"
            ))),
        }
    }
}

impl TryFrom<f64> for Outcome {
    type Error = QetError;
    fn try_from(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Outcome::Plus)
        } else if v == -1.0 {
            Ok(Outcome::Minus)
        } else {
            Err(QetError::Domain(format!(
                "measurement outcome must be +1 or -1, got {v}"
            )))
        }
    }
}

/// `Pi(alpha) = (I + alpha sigma_x)/2`.
pub fn projector(alpha: Outcome) -> CMatrix {
    (&pauli::identity() + &pauli::x().scale_real(alpha.sign())).scale_real(0.5)
}

/// Normalized post-measurement state and outcome probability `q(alpha)`.
pub fn measure_a(state: &GibbsState, alpha: Outcome) -> Result<(CMatrix, f64)> {
    measure_a_on(&state.rho, alpha)
}

/// [`measure_a`] on an arbitrary two-qubit density matrix.
pub fn measure_a_on(rho: &CMatrix, alpha: Outcome) -> Result<(CMatrix, f64)> {
    let p = kron(&projector(alpha), &pauli::identity())?;
    let unnormalized = p.conjugate(rho);
    let q = unnormalized.trace().re;
    if !(q > 0.0) {
        return Err(QetError::Numerical {
            what: "measurement outcome probability",
            residual: q,
        });
    }
    Ok((unnormalized.scale_real(1.0 / q), q))
}

/// `E_A = <H_I> - <H> = r`.
pub fn energy_injected_ea(state: &GibbsState) -> f64 {
    state.r
}

/// `<H_I> = 2m - 2k c1 - r`.
pub fn energy_after_measurement(state: &GibbsState) -> f64 {
    2.0 * state.m() - 2.0 * state.kappa() * state.c1 - state.r
}

/// `U(alpha) = I cos(theta) - i alpha sigma_y sin(theta)`.
pub fn conditional_unitary(alpha: Outcome, theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    &pauli::identity().scale_real(c) + &pauli::y().scale(C64::new(0.0, -alpha.sign() * s))
}

#[derive(Debug, Clone)]
pub struct OutcomeBranch {
    pub alpha: Outcome,
    pub prob: f64,
    pub rho_i: CMatrix,
    pub rho_iii: CMatrix,
    pub energy_i: f64,
    pub energy_iii: f64,
}

#[derive(Debug, Clone)]
pub struct ProtocolTrace {
    pub theta: f64,
    pub branches: [OutcomeBranch; 2],
    /// Outcome-averaged `<H_I>`.
    pub energy_i: f64,
    /// Outcome-averaged `<H_III>`.
    pub energy_iii: f64,
}

impl ProtocolTrace {
    /// Energy removed at B in step III.
    pub fn extracted(&self) -> f64 {
        self.energy_i - self.energy_iii
    }
}

/// Builds the post-measurement and final states for both outcomes by explicit
/// matrix products and traces their energies.
pub fn run_protocol(state: &GibbsState, theta: f64) -> Result<ProtocolTrace> {
    run_protocol_on(&state.rho, &build_hamiltonian(&state.params), theta)
}

pub fn run_protocol_on(rho: &CMatrix, h: &CMatrix, theta: f64) -> Result<ProtocolTrace> {
    let branch = |alpha: Outcome| -> Result<OutcomeBranch> {
        let (rho_i, prob) = measure_a_on(rho, alpha)?;
        let u = kron(&pauli::identity(), &conditional_unitary(alpha, theta))?;
        let rho_iii = u.conjugate(&rho_i);
        Ok(OutcomeBranch {
            alpha,
            prob,
            energy_i: h.expectation(&rho_i),
            energy_iii: h.expectation(&rho_iii),
            rho_i,
            rho_iii,
        })
    };
    let branches = [branch(Outcome::Plus)?, branch(Outcome::Minus)?];
    let avg = |f: fn(&OutcomeBranch) -> f64| branches.iter().map(|b| b.prob * f(b)).sum();
    Ok(ProtocolTrace {
        theta,
        energy_i: avg(|b| b.energy_i),
        energy_iii: avg(|b| b.energy_iii),
        branches,
    })
}

/// `<H_III> = 2m + ((c2-c1)/2)(2k cos 2t - sin 2t) - r(k sin 2t + (m^2+k^2) cos 2t)`.
pub fn energy_after_unitary(state: &GibbsState, theta: f64) -> f64 {
    let (k, m, r) = (state.kappa(), state.m(), state.r);
    let (s2, c2t) = (2.0 * theta).sin_cos();
    let half = 0.5 * (state.c2 - state.c1);
    2.0 * m + half * (2.0 * k * c2t - s2) - r * (k * s2 + (m * m + k * k) * c2t)
}

/// Coefficients of `E_B(theta) = a sin 2t - b (1 - cos 2t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
}

/// `a = k r + (c2 - c1)/2`, `b = (k^2 + m^2) r - k (c2 - c1)`.
pub fn coefficients_c_form(state: &GibbsState) -> Coefficients {
    let (k, m, r) = (state.kappa(), state.m(), state.r);
    let d = state.c2 - state.c1;
    Coefficients {
        a: k * r + 0.5 * d,
        b: (k * k + m * m) * r - k * d,
    }
}

/// `e^{-x} (s(x) - s(y))` with `s(x) = sinh(x)/x`, `x >= y >= 0`.
fn scaled_s_difference(e: &ScaledExponentials) -> f64 {
    let (x, y) = (e.x, e.y);
    if x < 1e-2 {
        // power series sum_n (x^{2n} - y^{2n}) / (2n+1)!
        let (x2, y2) = (x * x, y * y);
        let (mut px, mut py, mut fact, mut sum) = (1.0, 1.0, 1.0, 0.0);
        for n in 1..=8 {
            px *= x2;
            py *= y2;
            fact *= (2 * n) as f64 * (2 * n + 1) as f64;
            sum += (px - py) / fact;
        }
        (-x).exp() * sum
    } else {
        e.sinh_x / (2.0 * x) - scaled_s_y(e)
    }
}

/// `e^{-x} s(y)`, which tends to `e^{-x}` as `y -> 0`.
fn scaled_s_y(e: &ScaledExponentials) -> f64 {
    if e.y == 0.0 {
        (-e.x).exp()
    } else {
        e.sinh_y / (2.0 * e.y)
    }
}

/// The same coefficients through `s(x) = sinh(x)/x`:
///
/// ```text
/// a = (4k / (Z kT)) e^{-x} (s(x) - s(y))
/// b = (4 / (Z kT)) e^{-x} (2k^2 s(y) + (k^2 + m^2) s(x))
/// ```
pub fn coefficients_s_form(state: &GibbsState) -> Result<Coefficients> {
    let e = ScaledExponentials::new(state.kappa(), state.kt())?;
    let (k, m, kt) = (state.kappa(), e.m, state.kt());
    let z = e.partition();
    let sx = e.sinh_x / (2.0 * e.x);
    let sy = scaled_s_y(&e);
    let pre = 4.0 / (z * kt);
    Ok(Coefficients {
        a: pre * k * scaled_s_difference(&e),
        b: pre * (2.0 * k * k * sy + (k * k + m * m) * sx),
    })
}

/// `E_B(theta) = a sin 2t - b (1 - cos 2t)`.
pub fn extractable_energy(state: &GibbsState, theta: f64) -> Result<f64> {
    Ok(eb_from(coefficients_s_form(state)?, theta))
}

fn eb_from(c: Coefficients, theta: f64) -> f64 {
    // 1 - cos 2t = 2 sin^2 t
    c.a * (2.0 * theta).sin() - c.b * 2.0 * theta.sin().powi(2)
}

#[derive(Debug, Clone, Serialize)]
pub struct QetResult {
    #[serde(rename = "E_A")]
    pub e_a: f64,
    pub a: f64,
    pub b: f64,
    pub theta_o: f64,
    #[serde(rename = "E_B_max")]
    pub e_b_max: f64,
    /// `[q(+1), q(-1)]`
    pub outcome_probs: [f64; 2],
}

/// Optimal angle `theta_o = atan2(a, b)/2` in `[0, pi/2)` and
/// `E_B = sqrt(a^2 + b^2) - b`, evaluated as `a^2 / (sqrt(a^2 + b^2) + b)`.
pub fn optimal_qet(state: &GibbsState) -> Result<QetResult> {
    let c = coefficients_s_form(state)?;
    let (theta_o, e_b_max) = if c.a == 0.0 && c.b == 0.0 {
        (0.0, 0.0)
    } else {
        (0.5 * c.a.atan2(c.b), c.a * c.a / (c.a.hypot(c.b) + c.b))
    };
    // q(alpha) = (1 + alpha <sigma_x (x) I>)/2 and <sigma_x (x) I> = 0 for the X state
    let q_plus = 0.5 * (1.0 + 2.0 * state.rho[(0, 2)].re + 2.0 * state.rho[(1, 3)].re);
    Ok(QetResult {
        e_a: energy_injected_ea(state),
        a: c.a,
        b: c.b,
        theta_o,
        e_b_max,
        outcome_probs: [q_plus, 1.0 - q_plus],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::golden_section_min;
    use crate::spin_model::{gibbs_state, mean_energy, SystemParams};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn state(k: f64, t: f64) -> GibbsState {
        gibbs_state(&SystemParams::new(k, t).unwrap()).unwrap()
    }

    #[test]
    fn outcome_parsing() {
        assert_eq!(Outcome::try_from(1).unwrap(), Outcome::Plus);
        assert_eq!(Outcome::try_from(-1).unwrap(), Outcome::Minus);
        assert!(Outcome::try_from(0).is_err());
        assert!(Outcome::try_from(0.5).is_err());
    }

    #[test]
    fn unitary_cases() {
        assert_eq!(conditional_unitary(Outcome::Plus, 0.0), pauli::identity());
        let u = conditional_unitary(Outcome::Plus, FRAC_PI_2);
        assert!(u.max_abs_diff(&pauli::y().scale(C64::new(0.0, -1.0))) < 1e-15);
        for t in [0.3, 1.7, -2.2] {
            for a in Outcome::BOTH {
                let u = conditional_unitary(a, t);
                assert!((&u * &u.adjoint()).max_abs_diff(&pauli::identity()) < 1e-14);
            }
        }
    }

    #[test]
    fn measurement_probabilities() {
        let s = state(1.0, 2.0);
        let (r1, q1) = measure_a(&s, Outcome::Plus).unwrap();
        let (_, q2) = measure_a(&s, Outcome::Minus).unwrap();
        assert!((q1 + q2 - 1.0).abs() < 1e-14);
        assert!((r1.trace().re - 1.0).abs() < 1e-14);
        let hot = state(1.0, 1e11);
        let (post, q) = measure_a(&hot, Outcome::Minus).unwrap();
        assert!((q - 0.5).abs() < 1e-10);
        let expect = kron(
            &projector(Outcome::Minus),
            &pauli::identity().scale_real(0.5),
        )
        .unwrap();
        assert!(post.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn protocol_energies_match_closed_forms() {
        for (k, t) in [(1.0, 2.0), (0.25, 0.1), (4.0, 7.0)] {
            let s = state(k, t);
            for theta in [0.0, 0.3, 1.1, -0.4] {
                let tr = run_protocol(&s, theta).unwrap();
                assert!((tr.energy_i - energy_after_measurement(&s)).abs() < 1e-11);
                assert!((tr.energy_iii - energy_after_unitary(&s, theta)).abs() < 1e-11);
                let eb = extractable_energy(&s, theta).unwrap();
                assert!((tr.extracted() - eb).abs() < 1e-11, "{k} {t} {theta}");
            }
            assert!(
                (energy_after_measurement(&s) - mean_energy(&s) - energy_injected_ea(&s)).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn coefficient_forms_agree() {
        for k in [0.0, 0.1, 1.0, 5.0] {
            for t in [0.01, 0.5, 3.0, 100.0] {
                let s = state(k, t);
                let c = coefficients_c_form(&s);
                let sf = coefficients_s_form(&s).unwrap();
                assert!((c.a - sf.a).abs() < 1e-12, "a {k} {t}: {} {}", c.a, sf.a);
                assert!((c.b - sf.b).abs() < 1e-12, "b {k} {t}: {} {}", c.b, sf.b);
            }
        }
    }

    #[test]
    fn ground_state_limit() {
        let q = optimal_qet(&state(1.0, 1e-6)).unwrap();
        let expect = (10f64.sqrt() - 3.0) / 2f64.sqrt();
        assert!((q.e_b_max - expect).abs() < 1e-9);
    }

    #[test]
    fn uncoupled_gives_nothing() {
        let q = optimal_qet(&state(0.0, 1.0)).unwrap();
        assert_eq!((q.a, q.e_b_max, q.theta_o), (0.0, 0.0, 0.0));
    }

    #[test]
    fn optimum_beats_grid_and_wrong_angle() {
        for (k, t) in [(1.0, 2.0), (0.25, 0.05), (4.0, 50.0)] {
            let s = state(k, t);
            let q = optimal_qet(&s).unwrap();
            assert!(q.e_b_max > 0.0 && q.theta_o >= 0.0 && q.theta_o < FRAC_PI_2);
            let (_, neg) = golden_section_min(
                |th| -extractable_energy(&s, th).unwrap(),
                0.0,
                FRAC_PI_2,
                1e-12,
            );
            assert!((-neg - q.e_b_max).abs() < 1e-9);
            for i in 0..200 {
                let th = PI * i as f64 / 200.0;
                assert!(extractable_energy(&s, th).unwrap() <= q.e_b_max + 1e-15);
            }
            assert!(extractable_energy(&s, q.theta_o + FRAC_PI_2).unwrap() < 0.0);
            assert!((q.outcome_probs[0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn positive_at_high_temperature() {
        for k in [1e-3, 0.25, 4.0] {
            let q = optimal_qet(&state(k, 1e6)).unwrap();
            assert!(q.e_b_max > 0.0, "kappa {k}: {}", q.e_b_max);
        }
    }
}
