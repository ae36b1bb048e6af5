//! Self-verification suite: every closed form against its brute-force
//! oracle, plus the structural properties of the model. Each check reports a
//! residual and passes when `residual <= tolerance`; count-type checks report
//! the number of violations.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{classify_regimes, trace_constant_c_contour, GridSpec, DEFAULT_C_TARGETS};
use crate::correlations::{
    binary_h, classical_correlation, discord, entanglement_threshold_te, is_separable,
    minimize_measurement, mutual_information, ppt_eigenvalues, separability_margin,
};
use crate::error::{QetError, Result};
use crate::local_extraction::{
    branch_margin, extracted_by_unitary_on_b, omega, random_feasible_z, returned_kraus_is_feasible,
    solve_max_omega, thresholds, varpi, Branch,
};
use crate::numkit::{golden_section_min, kron, pauli, refine_min_2d, Box2, RefineOptions};
use crate::oracle;
use crate::qet_protocol::{
    energy_after_measurement, energy_after_unitary, energy_injected_ea, extractable_energy,
    optimal_qet,
};
use crate::spin_model::{
    gibbs_state, ground_state, maximally_mixed, mean_energy, GibbsState, SystemParams,
};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;
/// Random samples per tested parameter point in the Monte-Carlo checks.
pub const DEFAULT_SAMPLES: usize = 10_000;

pub const STANDARD_KAPPAS: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0];

/// 25 log-spaced temperatures on `[0.01, 100]`.
pub fn standard_kts() -> Vec<f64> {
    GridSpec::log(0.01, 100.0, 25).values()
}

/// Check names and default tolerances.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("gibbs_oracle", 1e-10),
    ("limit_ground", 1e-8),
    ("limit_hot", 1e-8),
    ("energy_mean", 1e-11),
    ("energy_measured", 1e-11),
    ("energy_injected", 1e-11),
    ("energy_injected_monotone", 0.0),
    ("protocol_final_energy", 1e-11),
    ("protocol_states_valid", 1e-12),
    ("nondemolition", 1e-14),
    ("qet_positive", 0.0),
    ("qet_grid_max", 1e-9),
    ("qet_monotone", 0.0),
    ("qet_ground_value", 1e-6),
    ("passivity_trace", 1e-11),
    ("passivity", 0.0),
    ("kraus_channel_oracle", 1e-11),
    ("kraus_optimal_channel", 1e-10),
    ("kraus_feasible", 0.0),
    ("kraus_varpi_grid", 1e-6),
    ("kraus_dominance", 1e-9),
    ("kraus_reduction", 1e-12),
    ("kraus_uncoupled", 1e-12),
    ("kraus_hot", 1e-6),
    ("threshold_t1_flip", 0.0),
    ("threshold_order", 0.0),
    ("threshold_ratio_2t2", 0.05),
    ("regime_contiguity", 0.0),
    ("discord_identity", 1e-10),
    ("mutual_info_spectral", 1e-10),
    ("measurement_min_value", 1e-8),
    ("measurement_min_argmin", 1e-4),
    ("classical_measurement_oracle", 1e-7),
    ("discord_ground", 1e-6),
    ("discord_positive_monotone", 0.0),
    ("ppt_spectrum", 1e-10),
    ("separability_verdict", 0.0),
    ("te_monotone", 0.0),
    ("contour_residual", 1e-8),
    ("contour_separable", 0.0),
    ("contour_comonotone", 0.0),
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub failed: Vec<String>,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tolerances: DEFAULT_TOLERANCES
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        }
    }
}

impl VerifyConfig {
    /// Applies `NAME=VALUE`; unknown names are rejected.
    pub fn override_tolerance(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec.split_once('=').ok_or_else(|| {
            QetError::Domain(format!("tolerance override '{spec}' is not NAME=VALUE"))
        })?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| QetError::Domain(format!("bad tolerance value in '{spec}'")))?;
        match self.tolerances.get_mut(name.trim()) {
            Some(t) => {
                *t = value;
                Ok(())
            }
            None => Err(QetError::Domain(format!("unknown check '{}'", name.trim()))),
        }
    }
}

fn state(kappa: f64, kt: f64) -> Result<GibbsState> {
    gibbs_state(&SystemParams::new(kappa, kt)?)
}

fn grid_points() -> Vec<(f64, f64)> {
    let kts = standard_kts();
    STANDARD_KAPPAS
        .iter()
        .flat_map(|&k| kts.iter().map(move |&t| (k, t)))
        .collect()
}

fn max_over<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<f64> + Sync + Send) -> Result<f64> {
    items
        .par_iter()
        .map(f)
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn count_over<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<bool> + Sync + Send) -> Result<f64> {
    let bad: Result<Vec<bool>> = items.par_iter().map(f).collect();
    Ok(bad?.into_iter().filter(|b| *b).count() as f64)
}

/// Relative slack for monotonicity checks; low-kT plateaus are flat to roundoff.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Increases along a sequence beyond [`MONOTONE_SLACK`].
fn rises(values: &[f64]) -> usize {
    values
        .windows(2)
        .filter(|w| w[1] - w[0] > MONOTONE_SLACK * w[0].abs().max(w[1].abs()))
        .count()
}

type Residuals = Vec<(&'static str, f64)>;

fn gibbs_checks() -> Result<Residuals> {
    let pts = grid_points();
    let gibbs = max_over(&pts, |&(k, t)| {
        let s = state(k, t)?;
        Ok(s.rho.frobenius_distance(&oracle::thermal_state(&s.params)?))
    })?;
    let ground = state(1.0, 1e-6)?.rho.frobenius_distance(&ground_state(1.0));
    let hot = state(1.0, 1e9)?.rho.frobenius_distance(&maximally_mixed());
    Ok(vec![
        ("gibbs_oracle", gibbs),
        ("limit_ground", ground),
        ("limit_hot", hot),
    ])
}

fn energy_checks() -> Result<Residuals> {
    let pts = grid_points();
    let per_point: Result<Vec<[f64; 5]>> = pts
        .par_iter()
        .map(|&(k, t)| {
            let s = state(k, t)?;
            let rho = oracle::thermal_state(&s.params)?;
            let e0 = oracle::energy(k, &rho);
            let tr = oracle::protocol(&s.params, 0.37)?;
            let valid = tr
                .branches
                .iter()
                .flat_map(|b| [&b.rho_i, &b.rho_iii])
                .map(|r| {
                    let eig = crate::numkit::hermitian_eig(r)?;
                    Ok((r.trace().re - 1.0).abs().max(-eig.eigenvalues[0]).max(0.0))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok([
                (mean_energy(&s) - e0).abs(),
                (energy_after_measurement(&s) - tr.energy_i).abs(),
                (energy_injected_ea(&s) - (tr.energy_i - e0)).abs(),
                (energy_after_unitary(&s, 0.37) - tr.energy_iii).abs(),
                valid,
            ])
        })
        .collect();
    let per_point = per_point?;
    let col = |i: usize| per_point.iter().map(|r| r[i]).fold(0.0, f64::max);
    let kts = standard_kts();
    let mut ea_rises = 0;
    for &k in &STANDARD_KAPPAS {
        let ea: Result<Vec<f64>> = kts
            .iter()
            .map(|&t| Ok(energy_injected_ea(&state(k, t)?)))
            .collect();
        let ea = ea?;
        ea_rises += rises(&ea) + ea.iter().filter(|e| **e <= 0.0).count();
    }
    let mut comm: f64 = 0.0;
    for &k in &STANDARD_KAPPAS {
        let m = k.hypot(1.0);
        let v = &kron(&pauli::x(), &pauli::x())?.scale_real(2.0 * k)
            + &crate::numkit::CMatrix::identity(4)?.scale_real(2.0 * k * k / m);
        let xa = kron(&pauli::x(), &pauli::identity())?;
        comm = comm.max((&(&xa * &v) - &(&v * &xa)).max_abs());
    }
    Ok(vec![
        ("energy_mean", col(0)),
        ("energy_measured", col(1)),
        ("energy_injected", col(2)),
        ("energy_injected_monotone", ea_rises as f64),
        ("protocol_final_energy", col(3)),
        ("protocol_states_valid", col(4)),
        ("nondemolition", comm),
    ])
}

fn qet_checks() -> Result<Residuals> {
    let mut pts = grid_points();
    for &k in &STANDARD_KAPPAS {
        pts.extend([(k, 1e3), (k, 1e6)]);
    }
    let nonpositive = count_over(&pts, |&(k, t)| {
        Ok(optimal_qet(&state(k, t)?)?.e_b_max <= 0.0)
    })?;
    let grid_max = max_over(&grid_points(), |&(k, t)| {
        let s = state(k, t)?;
        let q = optimal_qet(&s)?;
        let (_, neg) = golden_section_min(
            |th| -extractable_energy(&s, th).unwrap_or(f64::NAN),
            0.0,
            FRAC_PI_2,
            1e-12,
        );
        Ok((-neg - q.e_b_max).abs())
    })?;
    let kts = standard_kts();
    let mut eb_rises = 0;
    for &k in &STANDARD_KAPPAS {
        let eb: Result<Vec<f64>> = kts
            .iter()
            .map(|&t| Ok(optimal_qet(&state(k, t)?)?.e_b_max))
            .collect();
        eb_rises += rises(&eb?);
    }
    let ground = optimal_qet(&state(1.0, 1e-6)?)?.e_b_max;
    let symbolic = (10f64.sqrt() - 3.0) / 2f64.sqrt();
    Ok(vec![
        ("qet_positive", nonpositive),
        ("qet_grid_max", grid_max),
        ("qet_monotone", eb_rises as f64),
        ("qet_ground_value", (ground - symbolic).abs()),
    ])
}

const MC_POINTS: [(f64, f64); 5] = [(0.25, 0.3), (1.0, 0.5), (1.0, 2.0), (4.0, 5.0), (0.5, 20.0)];

fn passivity_checks(seed: u64, samples: usize) -> Result<Residuals> {
    let mut trace_dev: f64 = 0.0;
    let mut violations = 0usize;
    for (i, &(k, t)) in MC_POINTS.iter().enumerate() {
        let s = state(k, t)?;
        let rho = oracle::thermal_state(&s.params)?;
        let e0 = oracle::energy(k, &rho);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(100 + i as u64));
        for n in 0..samples {
            let (u, v, w) = if n % 4 == 0 {
                // include exact w = 0 rotations, which must still not extract
                (
                    rng.random_range(-TAU..TAU),
                    rng.random_range(-TAU..TAU),
                    0.0,
                )
            } else {
                (
                    rng.random_range(-TAU..TAU),
                    rng.random_range(-TAU..TAU),
                    rng.random_range(-TAU..TAU),
                )
            };
            let ex = extracted_by_unitary_on_b(&s, u, v, w);
            let wrapped = w.rem_euclid(TAU).min(TAU - w.rem_euclid(TAU));
            if ex > 0.0 || (ex == 0.0 && wrapped >= 1e-9) {
                violations += 1;
            }
            if n < 50 {
                let after = oracle::energy(
                    k,
                    &oracle::channel_on_b(&rho, &[oracle::unitary_uvw(u, v, w)])?,
                );
                trace_dev = trace_dev.max((ex - (e0 - after)).abs());
            }
        }
    }
    Ok(vec![
        ("passivity_trace", trace_dev),
        ("passivity", violations as f64),
    ])
}

fn kraus_checks(seed: u64, samples: usize) -> Result<Residuals> {
    let per_point: Result<Vec<[f64; 6]>> = MC_POINTS
        .par_iter()
        .enumerate()
        .map(|(i, &(k, t))| {
            let s = state(k, t)?;
            let rho = oracle::thermal_state(&s.params)?;
            let best = solve_max_omega(&s);
            let opt = (omega(&s, &best.z())? - best.omega_max).abs();
            let infeasible = if returned_kraus_is_feasible(&best) {
                0.0
            } else {
                1.0
            };
            let grid = refine_min_2d(
                |a, b| -varpi(&s, a, b),
                Box2::new((-PI, PI), (-PI, PI)),
                RefineOptions::default(),
            );
            let varpi_dev = (-grid.min - best.omega_max).abs();
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(200 + i as u64));
            let (mut dom, mut red, mut chan): (f64, f64, f64) =
                (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0);
            for n in 0..samples {
                let z = random_feasible_z(&mut rng);
                let o = omega(&s, &z)?;
                dom = dom.max(o - best.omega_max);
                red = red.max(o - omega(&s, &z.reduced())?);
                if n < 50 {
                    chan = chan.max((o - oracle::extracted_by_channel(k, &rho, &z.kraus())?).abs());
                }
            }
            Ok([opt, infeasible, varpi_dev, dom.max(0.0), red.max(0.0), chan])
        })
        .collect();
    let per_point = per_point?;
    let col = |i: usize| per_point.iter().map(|r| r[i]).fold(0.0, f64::max);
    let mut uncoupled: f64 = 0.0;
    for t in [0.1, 1.0, 10.0] {
        let s = state(0.0, t)?;
        uncoupled = uncoupled.max((solve_max_omega(&s).omega_max - (1.0 - s.r)).abs());
    }
    let hot = (solve_max_omega(&state(1.0, 1e9)?).omega_max - 1.0).abs();
    let zero_branch = solve_max_omega(&state(1.0, 1e-6)?);
    let feasible_zero = if returned_kraus_is_feasible(&zero_branch) {
        0.0
    } else {
        1.0
    };
    Ok(vec![
        ("kraus_channel_oracle", col(5)),
        ("kraus_optimal_channel", col(0)),
        ("kraus_feasible", col(1) + feasible_zero),
        ("kraus_varpi_grid", col(2)),
        ("kraus_dominance", col(3)),
        ("kraus_reduction", col(4)),
        ("kraus_uncoupled", uncoupled),
        ("kraus_hot", hot),
    ])
}

fn threshold_checks() -> Result<Residuals> {
    let kappas = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut flips = 0;
    let mut order = 0;
    let mut ratio: f64 = 0.0;
    for &k in &kappas {
        let th = thresholds(k)?;
        let (Some(t1), Some(t2)) = (th.t1, th.t2) else {
            order += 1;
            continue;
        };
        if solve_max_omega(&state(k, t1 - 1e-8)?).branch != Branch::Zero
            || solve_max_omega(&state(k, t1 + 1e-8)?).branch != Branch::Positive
        {
            flips += 1;
        }
        if !(t1 > 0.0 && t2 > t1) || branch_margin(&state(k, 0.5 * (t1 + t2))?) <= 0.0 {
            order += 1;
        }
        let s = state(k, 2.0 * t2)?;
        let om = solve_max_omega(&s).omega_max;
        let eb = optimal_qet(&s)?.e_b_max;
        if om <= eb {
            order += 1;
        }
        ratio = ratio.max(eb / om);
    }
    let kts = GridSpec::log(0.02, 20.0, 120).values();
    let pts = classify_regimes(&kappas, &kts)?;
    let mut broken = 0;
    for col in pts.chunks(kts.len()) {
        let labels: Option<Vec<u8>> = col.iter().map(|p| p.regime.map(|r| r as u8)).collect();
        match labels {
            Some(l) if l.windows(2).all(|w| w[0] <= w[1]) => {}
            _ => broken += 1,
        }
    }
    Ok(vec![
        ("threshold_t1_flip", flips as f64),
        ("threshold_order", order as f64),
        ("threshold_ratio_2t2", ratio),
        ("regime_contiguity", broken as f64),
    ])
}

fn discord_checks() -> Result<Residuals> {
    let pts = grid_points();
    let identity = max_over(&pts, |&(k, t)| {
        let s = state(k, t)?;
        Ok((mutual_information(&s) - classical_correlation(&s) - discord(&s)).abs())
    })?;
    let spectral = max_over(&pts, |&(k, t)| {
        let s = state(k, t)?;
        Ok((mutual_information(&s)
            - oracle::mutual_information(&oracle::thermal_state(&s.params)?)?)
        .abs())
    })?;
    let sample = [(0.25, 0.5), (1.0, 2.0), (4.0, 10.0), (0.5, 0.2), (2.0, 1.0)];
    let minima: Result<Vec<[f64; 3]>> = sample
        .par_iter()
        .map(|&(k, t)| {
            let s = state(k, t)?;
            let (min, arg) = minimize_measurement(&s);
            let c_num = binary_h(s.r)? - min;
            let c_meas = oracle::classical_correlation(&oracle::thermal_state(&s.params)?)?;
            Ok([
                (classical_correlation(&s) - c_num).abs(),
                (arg.theta - FRAC_PI_2).abs().max(arg.phi.abs()),
                (classical_correlation(&s) - c_meas).abs(),
            ])
        })
        .collect();
    let minima = minima?;
    let col = |i: usize| minima.iter().map(|r| r[i]).fold(0.0, f64::max);
    let s0 = state(1.0, 1e-6)?;
    let ground = (discord(&s0) - binary_h(1.0 / s0.m())?).abs();
    let kts = standard_kts();
    let mut bad = 0;
    for &k in &STANDARD_KAPPAS {
        let d: Result<Vec<f64>> = kts.iter().map(|&t| Ok(discord(&state(k, t)?))).collect();
        let d = d?;
        bad += rises(&d) + d.iter().filter(|x| **x <= 0.0).count();
    }
    Ok(vec![
        ("discord_identity", identity),
        ("mutual_info_spectral", spectral),
        ("measurement_min_value", col(0)),
        ("measurement_min_argmin", col(1)),
        ("classical_measurement_oracle", col(2)),
        ("discord_ground", ground),
        ("discord_positive_monotone", bad as f64),
    ])
}

fn entanglement_checks() -> Result<Residuals> {
    let pts = grid_points();
    let spectrum = max_over(&pts, |&(k, t)| {
        let p = SystemParams::new(k, t)?;
        let mut closed = ppt_eigenvalues(&p)?.to_vec();
        closed.sort_by(f64::total_cmp);
        let numeric = oracle::ppt_spectrum(&oracle::thermal_state(&p)?)?;
        Ok(closed
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    })?;
    let verdict = count_over(&pts, |&(k, t)| {
        let p = SystemParams::new(k, t)?;
        let m = p.m();
        // m cosh(2k/kT) >= k sinh(2m/kT), compared after scaling by e^{-2m/kT}
        let direct = separability_margin(k, t)? >= 0.0;
        let scaled = m * ((2.0 * k - 2.0 * m) / t).exp() * (1.0 + (-4.0 * k / t).exp())
            >= k * (1.0 - (-4.0 * m / t).exp());
        Ok(is_separable(&p)? != direct || direct != scaled)
    })?;
    let mut prev = 0.0;
    let mut te_bad = 0;
    for k in [0.5, 1.0, 2.0, 4.0] {
        let te = entanglement_threshold_te(k)?.unwrap_or(f64::NAN);
        if !(te > prev) {
            te_bad += 1;
        }
        prev = te;
    }
    Ok(vec![
        ("ppt_spectrum", spectrum),
        ("separability_verdict", verdict),
        ("te_monotone", te_bad as f64),
    ])
}

fn contour_checks() -> Result<Residuals> {
    let contours: Result<Vec<_>> = DEFAULT_C_TARGETS
        .par_iter()
        .map(|&c| trace_constant_c_contour(c, None))
        .collect();
    let (mut residual, mut entangled, mut broken): (f64, usize, usize) = (0.0, 0, 0);
    for c in contours? {
        if c.points.len() < 2 {
            broken += 1;
        }
        for p in &c.points {
            residual = residual.max((p.classical - c.c_target).abs());
            entangled += usize::from(!p.separable);
        }
        broken += c
            .points
            .windows(2)
            .filter(|w| (w[1].discord - w[0].discord) * (w[1].e_b - w[0].e_b) <= 0.0)
            .count();
    }
    Ok(vec![
        ("contour_residual", residual),
        ("contour_separable", entangled as f64),
        ("contour_comonotone", broken as f64),
    ])
}

/// Runs the suite; the summary contains no timings, so equal configurations
/// give equal summaries.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifySummary> {
    let groups: Vec<Box<dyn Fn() -> Result<Residuals> + Sync>> = vec![
        Box::new(gibbs_checks),
        Box::new(energy_checks),
        Box::new(qet_checks),
        Box::new(|| passivity_checks(cfg.seed, cfg.samples)),
        Box::new(|| kraus_checks(cfg.seed, cfg.samples)),
        Box::new(threshold_checks),
        Box::new(discord_checks),
        Box::new(entanglement_checks),
        Box::new(contour_checks),
    ];
    let results: Result<Vec<Residuals>> = groups.par_iter().map(|g| g()).collect();
    let mut checks = Vec::new();
    for (name, residual) in results?.into_iter().flatten() {
        let tolerance = *cfg
            .tolerances
            .get(name)
            .unwrap_or_else(|| panic!("check '{name}' has no default tolerance"));
        checks.push(CheckResult {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        });
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.clone())
        .collect();
    Ok(VerifySummary {
        seed: cfg.seed,
        samples: cfg.samples,
        passed: failed.is_empty(),
        failed,
        checks,
    })
}
