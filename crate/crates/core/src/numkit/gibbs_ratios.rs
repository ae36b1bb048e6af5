//! Overflow-safe Gibbs coefficients of the spin pair.
//!
//! With `x = 2m/kT`, `y = 2k/kT` (k the coupling) the textbook expressions
//! contain `e^{-x} sinh x`, `e^{-x} cosh y`, ... which overflow term by term
//! for small kT. Every hyperbolic is multiplied by `2 e^{-x}` before it is
//! evaluated:
//!
//! ```text
//! 2 e^{-x} cosh x = 1 + e^{-2x}            2 e^{-x} sinh x = -expm1(-2x)
//! 2 e^{-x} cosh y = e^{y-x} + e^{-y-x}     2 e^{-x} sinh y = e^{y-x} (-expm1(-2y))
//! ```
//!
//! so that, since the ground energy is zero,
//!
//! ```text
//! Z  = 1 + e^{y-x} + e^{-y-x} + e^{-2x}                      (in [1, 4])
//! c1 = (m 2e^{-x}sinh y + k 2e^{-x}sinh x) / (m Z)
//! c2 = (-m 2e^{-x}sinh y + k 2e^{-x}sinh x) / (m Z)
//! c3 = 4 e^{-x} sinh((m+k)/kT) sinh((m-k)/kT) / Z = expm1(-2(m+k)/kT) expm1(-2(m-k)/kT) / Z
//! r  = 2e^{-x}sinh x / (m Z)
//! ```
//!
//! Every intermediate lies in [0, 4] for any kT > 0.

use crate::error::{QetError, Result};

/// Scaled exponentials shared by the coefficient, eigenvalue and threshold formulas.
#[derive(Debug, Clone, Copy)]
pub struct ScaledExponentials {
    pub m: f64,
    /// 2m/kT
    pub x: f64,
    /// 2 kappa / kT
    pub y: f64,
    /// e^{-2x}
    pub e_m2x: f64,
    /// e^{y-x} = e^{-E1/kT}
    pub e_ymx: f64,
    /// e^{-y-x} = e^{-E2/kT}
    pub e_mymx: f64,
    /// 2 e^{-x} sinh x
    pub sinh_x: f64,
    /// 2 e^{-x} cosh x
    pub cosh_x: f64,
    /// 2 e^{-x} sinh y
    pub sinh_y: f64,
    /// 2 e^{-x} cosh y
    pub cosh_y: f64,
}

impl ScaledExponentials {
    pub fn new(kappa: f64, kt: f64) -> Result<Self> {
        validate(kappa, kt)?;
        let m = kappa.hypot(1.0);
        let x = 2.0 * m / kt;
        let y = 2.0 * kappa / kt;
        let e_m2x = (-2.0 * x).exp();
        let e_ymx = (y - x).exp();
        let e_mymx = (-y - x).exp();
        Ok(Self {
            m,
            x,
            y,
            e_m2x,
            e_ymx,
            e_mymx,
            sinh_x: -(-2.0 * x).exp_m1(),
            cosh_x: 1.0 + e_m2x,
            sinh_y: e_ymx * -(-2.0 * y).exp_m1(),
            cosh_y: e_ymx + e_mymx,
        })
    }

    /// Partition function with E0 = 0.
    pub fn partition(&self) -> f64 {
        1.0 + self.e_ymx + self.e_mymx + self.e_m2x
    }
}

fn validate(kappa: f64, kt: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(QetError::Domain(format!(
            "coupling must be finite and >= 0, got {kappa}"
        )));
    }
    if !(kt.is_finite() && kt > 0.0) {
        return Err(QetError::Domain(format!(
            "kT must be finite and > 0, got {kt}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsCoefficients {
    pub m: f64,
    /// Partition function Z (ground energy zero, so 1 <= Z <= 4).
    pub z: f64,
    /// Occupation probabilities of |E0>..|E3>.
    pub p: [f64; 4],
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub r: f64,
}

pub fn stable_gibbs_ratios(kappa: f64, kt: f64) -> Result<GibbsCoefficients> {
    let e = ScaledExponentials::new(kappa, kt)?;
    let m = e.m;
    let z = e.partition();
    let a = (m + kappa) / kt;
    let b = (m - kappa) / kt;
    Ok(GibbsCoefficients {
        m,
        z,
        p: [1.0 / z, e.e_ymx / z, e.e_mymx / z, e.e_m2x / z],
        c1: (m * e.sinh_y + kappa * e.sinh_x) / (m * z),
        c2: (-m * e.sinh_y + kappa * e.sinh_x) / (m * z),
        c3: (-2.0 * a).exp_m1() * (-2.0 * b).exp_m1() / z,
        r: e.sinh_x / (m * z),
    })
}

/// Direct evaluation of the textbook formulas; overflows for kT below about 2m/700.
pub fn naive_gibbs_ratios(kappa: f64, kt: f64) -> Result<GibbsCoefficients> {
    validate(kappa, kt)?;
    let m = kappa.hypot(1.0);
    let x = 2.0 * m / kt;
    let y = 2.0 * kappa / kt;
    let ex = (-x).exp();
    let z = 2.0 * ex * (x.cosh() + y.cosh());
    let energies = [0.0, 2.0 * m - 2.0 * kappa, 2.0 * m + 2.0 * kappa, 4.0 * m];
    let p = energies.map(|en| (-en / kt).exp() / z);
    let c = 2.0 / (m * z) * ex;
    let out = GibbsCoefficients {
        m,
        z,
        p,
        c1: c * (m * y.sinh() + kappa * x.sinh()),
        c2: c * (-m * y.sinh() + kappa * x.sinh()),
        c3: 4.0 / z * ex * ((m + kappa) / kt).sinh() * ((m - kappa) / kt).sinh(),
        r: c * x.sinh(),
    };
    let all = [out.z, out.c1, out.c2, out.c3, out.r];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(QetError::Numerical {
            what: "naive Gibbs coefficients (overflow)",
            residual: f64::INFINITY,
        });
    }
    Ok(out)
}
