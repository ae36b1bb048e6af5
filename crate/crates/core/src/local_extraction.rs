//! Energy extraction at B without communication: single unitaries (passive),
//! general Kraus channels on B, the closed-form optimum and the temperature
//! thresholds T1 and T2.
//!
//! A channel `G(tau) = sum_k K_k tau K_k^dagger` on B is written with
//! `K_k = [[s_k, t_k], [u_k, v_k]]`, so the stacked vectors `s, t, u, v` in
//! C^4 describe it completely.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::correlations::entanglement_threshold_te;
use crate::error::{QetError, Result};
use crate::numkit::gibbs_ratios::ScaledExponentials;
use crate::numkit::{bisect, pauli, scan_for_bracket, CMatrix};
use crate::qet_protocol::optimal_qet;
use crate::spin_model::{gibbs_state, GibbsState, SystemParams, KT_MIN};

/// Tolerance on the completeness conditions.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// `tr[H (I (x) W) rho (I (x) W)^dagger]
///  = 2m - r(1 + cos w) + k c1 cos v (1 - cos w) - k c1 cos u (1 + cos w)`.
pub fn energy_after_unitary_on_b(state: &GibbsState, u: f64, v: f64, w: f64) -> f64 {
    let kc1 = state.kappa() * state.c1;
    let cw = w.cos();
    2.0 * state.m() - state.r * (1.0 + cw) + kc1 * v.cos() * (1.0 - cw) - kc1 * u.cos() * (1.0 + cw)
}

/// Energy removed by a single unitary on B:
/// `-[r(1 - cos w) + k c1 ((1 + cos v)(1 - cos w) + (1 - cos u)(1 + cos w))]`, never positive.
pub fn extracted_by_unitary_on_b(state: &GibbsState, u: f64, v: f64, w: f64) -> f64 {
    let kc1 = state.kappa() * state.c1;
    let one_m_cw = 2.0 * (0.5 * w).sin().powi(2);
    let one_p_cw = 2.0 * (0.5 * w).cos().powi(2);
    let one_m_cu = 2.0 * (0.5 * u).sin().powi(2);
    let one_p_cv = 2.0 * (0.5 * v).cos().powi(2);
    -(state.r * one_m_cw + kc1 * (one_p_cv * one_m_cw + one_m_cu * one_p_cw))
}

type C4 = [C64; 4];

fn dot(a: &C4, b: &C4) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &C4) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Stacked Kraus elements of a channel on B with at most four operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausVectorZ {
    pub s: C4,
    pub t: C4,
    pub u: C4,
    pub v: C4,
}

/// Which completeness condition a candidate `z` violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityCondition {
    FirstColumnNorm,
    SecondColumnNorm,
    ColumnOverlap,
}

impl FeasibilityCondition {
    pub fn describe(self) -> &'static str {
        match self {
            Self::FirstColumnNorm => "|s|^2 + |u|^2 = 1",
            Self::SecondColumnNorm => "|t|^2 + |v|^2 = 1",
            Self::ColumnOverlap => "s^dagger t + u^dagger v = 0",
        }
    }
}

impl KrausVectorZ {
    pub fn identity() -> Self {
        let zero = [C64::new(0.0, 0.0); 4];
        let mut e0 = zero;
        e0[0] = C64::new(1.0, 0.0);
        Self {
            s: e0,
            t: zero,
            u: zero,
            v: e0,
        }
    }

    /// Reads up to four 2x2 Kraus operators; missing ones are zero.
    pub fn from_kraus(ops: &[CMatrix]) -> Result<Self> {
        if ops.len() > 4 {
            return Err(QetError::Dimension(format!(
                "at most 4 Kraus operators, got {}",
                ops.len()
            )));
        }
        let mut z = Self {
            s: [C64::new(0.0, 0.0); 4],
            t: [C64::new(0.0, 0.0); 4],
            u: [C64::new(0.0, 0.0); 4],
            v: [C64::new(0.0, 0.0); 4],
        };
        for (k, op) in ops.iter().enumerate() {
            if op.rows() != 2 || op.cols() != 2 {
                return Err(QetError::Dimension(format!(
                    "Kraus operator {k} is {}x{}, expected 2x2",
                    op.rows(),
                    op.cols()
                )));
            }
            z.s[k] = op[(0, 0)];
            z.t[k] = op[(0, 1)];
            z.u[k] = op[(1, 0)];
            z.v[k] = op[(1, 1)];
        }
        Ok(z)
    }

    pub fn kraus(&self) -> [CMatrix; 4] {
        std::array::from_fn(|k| {
            CMatrix::from_rows(&[&[self.s[k], self.t[k]], &[self.u[k], self.v[k]]])
                .expect("finite 2x2")
        })
    }

    /// Residuals of the three completeness conditions.
    pub fn feasibility_residuals(&self) -> [f64; 3] {
        [
            (norm_sqr(&self.s) + norm_sqr(&self.u) - 1.0).abs(),
            (norm_sqr(&self.t) + norm_sqr(&self.v) - 1.0).abs(),
            (dot(&self.s, &self.t) + dot(&self.u, &self.v)).norm(),
        ]
    }

    pub fn check_feasible(&self, tol: f64) -> Result<()> {
        let conditions = [
            FeasibilityCondition::FirstColumnNorm,
            FeasibilityCondition::SecondColumnNorm,
            FeasibilityCondition::ColumnOverlap,
        ];
        for (c, res) in conditions.iter().zip(self.feasibility_residuals()) {
            if !(res <= tol) {
                return Err(QetError::Contract(format!(
                    "infeasible channel: {} violated by {res:e}",
                    c.describe()
                )));
            }
        }
        Ok(())
    }

    /// The magnitude-only channel `z_o` with `s, v` on the first slot and
    /// `t, u` on the second; feasible whenever `z` is and `Omega(z_o) >= Omega(z)`.
    pub fn reduced(&self) -> Self {
        let zero = [C64::new(0.0, 0.0); 4];
        let at = |slot: usize, x: f64| {
            let mut a = zero;
            a[slot] = C64::new(x, 0.0);
            a
        };
        Self {
            s: at(0, norm_sqr(&self.s).sqrt()),
            t: at(1, norm_sqr(&self.t).sqrt()),
            u: at(1, norm_sqr(&self.u).sqrt()),
            v: at(0, norm_sqr(&self.v).sqrt()),
        }
    }
}

/// Random feasible channel: the two columns of a complex Gaussian 8x2 matrix
/// (the stacked Kraus operators) made orthonormal by Gram-Schmidt.
pub fn random_feasible_z<R: Rng + ?Sized>(rng: &mut R) -> KrausVectorZ {
    let mut gauss = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let mut c0: [C64; 8] = std::array::from_fn(|_| gauss());
    let mut c1: [C64; 8] = std::array::from_fn(|_| gauss());
    let norm = |c: &[C64; 8]| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let n0 = norm(&c0);
    c0.iter_mut().for_each(|z| *z /= n0);
    let overlap: C64 = c0.iter().zip(&c1).map(|(a, b)| a.conj() * b).sum();
    c1.iter_mut().zip(&c0).for_each(|(b, a)| *b -= overlap * a);
    let n1 = norm(&c1);
    c1.iter_mut().for_each(|z| *z /= n1);
    // rows 2k, 2k+1 of the stack hold K_k
    KrausVectorZ {
        s: std::array::from_fn(|k| c0[2 * k]),
        u: std::array::from_fn(|k| c0[2 * k + 1]),
        t: std::array::from_fn(|k| c1[2 * k]),
        v: std::array::from_fn(|k| c1[2 * k + 1]),
    }
}

/// `Omega(z) = (1-r)|u|^2 - (1+r)|t|^2 + k c1 (s^dag v + v^dag s + u^dag t + t^dag u - 2)`.
pub fn omega(state: &GibbsState, z: &KrausVectorZ) -> Result<f64> {
    z.check_feasible(FEASIBILITY_TOL)?;
    Ok(omega_unchecked(state, z))
}

fn omega_unchecked(state: &GibbsState, z: &KrausVectorZ) -> f64 {
    let r = state.r;
    let kc1 = state.kappa() * state.c1;
    let cross = 2.0 * dot(&z.s, &z.v).re + 2.0 * dot(&z.u, &z.t).re;
    (1.0 - r) * norm_sqr(&z.u) - (1.0 + r) * norm_sqr(&z.t) + kc1 * (cross - 2.0)
}

/// Omega restricted to `s = cos a, t = sin b, u = sin a, v = cos b` with
/// `sigma = a + b`, `delta = a - b`:
/// `sin(sigma) sin(delta) + r cos(sigma) cos(delta) + 2 k c1 cos(delta) - r - 2 k c1`.
pub fn varpi(state: &GibbsState, sigma: f64, delta: f64) -> f64 {
    let r = state.r;
    let kc1 = state.kappa() * state.c1;
    let (ss, cs) = sigma.sin_cos();
    let (sd, cd) = delta.sin_cos();
    ss * sd + r * cs * cd + 2.0 * kc1 * cd - r - 2.0 * kc1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Positive,
    Zero,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractionResult {
    pub omega_max: f64,
    pub branch: Branch,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// `K_1..K_4`.
    pub kraus: [CMatrix; 4],
}

impl ExtractionResult {
    pub fn z(&self) -> KrausVectorZ {
        KrausVectorZ::from_kraus(&self.kraus).expect("four 2x2 operators")
    }
}

/// `1 - r^2 - 2 k c1 r`; positive exactly on the positive branch.
pub fn branch_margin(state: &GibbsState) -> f64 {
    let r = state.r;
    (1.0 - r) * (1.0 + r) - 2.0 * state.kappa() * state.c1 * r
}

/// Closed-form maximum of Omega over all channels on B:
/// `sqrt((1 - r^2 + 4k^2c1^2)/(1 - r^2)) - 2k c1 - r` when `2k c1 r < 1 - r^2`, else 0.
pub fn solve_max_omega(state: &GibbsState) -> ExtractionResult {
    let zero = CMatrix::zeros(2, 2).expect("2x2");
    if branch_margin(state) <= 0.0 {
        return ExtractionResult {
            omega_max: 0.0,
            branch: Branch::Zero,
            sigma: None,
            delta: None,
            alpha: None,
            beta: None,
            kraus: [pauli::identity(), zero.clone(), zero.clone(), zero],
        };
    }
    let r = state.r;
    let kc1 = state.kappa() * state.c1;
    let one_m_r2 = (1.0 - r) * (1.0 + r);
    let g = one_m_r2 + 4.0 * kc1 * kc1;
    let omega_max = (g / one_m_r2).sqrt() - 2.0 * kc1 - r;
    let sigma = (2.0 * kc1 * r / one_m_r2).clamp(-1.0, 1.0).acos();
    let delta = (2.0 * kc1 / (one_m_r2 * g).sqrt()).clamp(-1.0, 1.0).acos();
    let alpha = 0.5 * (sigma + delta);
    let beta = 0.5 * (sigma - delta);
    let re = |x: f64| C64::new(x, 0.0);
    let k1 = CMatrix::from_rows(&[&[re(alpha.cos()), re(0.0)], &[re(0.0), re(beta.cos())]])
        .expect("2x2");
    let k2 = CMatrix::from_rows(&[&[re(0.0), re(beta.sin())], &[re(alpha.sin()), re(0.0)]])
        .expect("2x2");
    ExtractionResult {
        omega_max: omega_max.max(0.0),
        branch: Branch::Positive,
        sigma: Some(sigma),
        delta: Some(delta),
        alpha: Some(alpha),
        beta: Some(beta),
        kraus: [k1, k2, zero.clone(), zero],
    }
}

/// `sum_k K_k^dagger K_k = I` within [`FEASIBILITY_TOL`].
pub fn returned_kraus_is_feasible(result: &ExtractionResult) -> bool {
    completeness_defect(&result.kraus) <= FEASIBILITY_TOL
}

/// Largest entry of `sum_k K_k^dagger K_k - I`.
pub fn completeness_defect(kraus: &[CMatrix]) -> f64 {
    let mut acc = CMatrix::zeros(2, 2).expect("2x2");
    for k in kraus {
        acc = &acc + &(&k.adjoint() * k);
    }
    acc.max_abs_diff(&pauli::identity())
}

/// Temperatures separating the regimes at one coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSet {
    #[serde(rename = "Te")]
    pub te: Option<f64>,
    #[serde(rename = "T1")]
    pub t1: Option<f64>,
    #[serde(rename = "T2")]
    pub t2: Option<f64>,
}

const SCAN_LO: f64 = 1e-4;
const SCAN_HI: f64 = 1e4;
const T2_SCAN_HI: f64 = 1e6;
const SCAN_RATIO: f64 = 1.05;
/// Relative bisection width for T1 and T2.
pub const THRESHOLD_TOL: f64 = 1e-14;

fn state_at(kappa: f64, kt: f64) -> Result<GibbsState> {
    gibbs_state(&SystemParams::new(kappa, kt)?)
}

fn require_coupling(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(QetError::Domain(format!(
            "coupling must be finite and >= 0, got {kappa}"
        )));
    }
    Ok(())
}

/// Temperature where `1 - r^2 = 2 k c1 r`; below it no channel on B extracts
/// energy. `None` for `kappa = 0` (positive branch at every temperature).
pub fn threshold_t1(kappa: f64) -> Result<Option<f64>> {
    require_coupling(kappa)?;
    if kappa == 0.0 {
        return Ok(None);
    }
    let f = |kt: f64| {
        state_at(kappa, kt)
            .map(|s| branch_margin(&s))
            .unwrap_or(f64::NAN)
    };
    let mut lo = SCAN_LO;
    while f(lo) > 0.0 {
        if lo <= KT_MIN {
            return Err(QetError::Domain(format!(
                "no T1 above kT = {KT_MIN:e} for kappa = {kappa}"
            )));
        }
        lo = (lo * 1e-1).max(KT_MIN);
    }
    let bracket = scan_for_bracket(f, lo, SCAN_HI, SCAN_RATIO)?;
    bisect(f, bracket, THRESHOLD_TOL).map(Some)
}

/// `omega_max - E_B_max` at `(kappa, kT)`.
pub fn extraction_advantage(kappa: f64, kt: f64) -> Result<f64> {
    let s = state_at(kappa, kt)?;
    Ok(solve_max_omega(&s).omega_max - optimal_qet(&s)?.e_b_max)
}

/// Temperature above which the best local channel beats teleportation.
/// `None` when no crossing exists below kT = 1e6.
pub fn threshold_t2(kappa: f64) -> Result<Option<f64>> {
    require_coupling(kappa)?;
    let Some(t1) = threshold_t1(kappa)? else {
        return Ok(None);
    };
    let f = |kt: f64| extraction_advantage(kappa, kt).unwrap_or(f64::NAN);
    let start = t1 * (1.0 + 1e-9);
    match scan_for_bracket(f, start, T2_SCAN_HI, SCAN_RATIO) {
        Ok(b) => bisect(f, b, THRESHOLD_TOL).map(Some),
        Err(QetError::Bracket { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn thresholds(kappa: f64) -> Result<ThresholdSet> {
    Ok(ThresholdSet {
        te: entanglement_threshold_te(kappa)?,
        t1: threshold_t1(kappa)?,
        t2: threshold_t2(kappa)?,
    })
}

/// `(k sinh x + m sinh y)^2 - 2m^2 cosh y (cosh x + cosh y)` with every
/// hyperbolic scaled by `2 e^{-x}`; same sign as `2 k c1 r - (1 - r^2)`.
pub fn t1_condition_hyperbolic(kappa: f64, kt: f64) -> Result<f64> {
    let e = ScaledExponentials::new(kappa, kt)?;
    let m = e.m;
    let lhs = (kappa * e.sinh_x + m * e.sinh_y).powi(2);
    Ok(lhs - 2.0 * m * m * e.cosh_y * (e.cosh_x + e.cosh_y))
}
