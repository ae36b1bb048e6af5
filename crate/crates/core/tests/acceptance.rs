//! Acceptance suite: one pass/fail line per criterion.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use qetlab::analysis::{classify_regimes, trace_constant_c_contour, GridSpec, Regime};
use qetlab::correlations::{
    binary_h, classical_correlation, discord, entanglement_threshold_te, is_separable,
    minimize_measurement, mutual_information, ppt_eigenvalues,
};
use qetlab::local_extraction::{
    extracted_by_unitary_on_b, omega, random_feasible_z, solve_max_omega, threshold_t1,
    threshold_t2, varpi, Branch,
};
use qetlab::numkit::{golden_section_min, refine_min_2d, Box2, RefineOptions};
use qetlab::oracle;
use qetlab::qet_protocol::{
    energy_after_measurement, energy_injected_ea, extractable_energy, optimal_qet,
};
use qetlab::spin_model::{
    gibbs_state, ground_state, maximally_mixed, mean_energy, GibbsState, SystemParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const KAPPAS: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0];
const SEED: u64 = 42;

fn kts() -> Vec<f64> {
    GridSpec::log(0.01, 100.0, 25).values()
}

fn state(k: f64, t: f64) -> GibbsState {
    gibbs_state(&SystemParams::new(k, t).unwrap()).unwrap()
}

fn grid() -> Vec<(f64, f64)> {
    let t = kts();
    KAPPAS
        .iter()
        .flat_map(|&k| t.iter().map(move |&x| (k, x)))
        .collect()
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2)
        .all(|w| w[1] - w[0] <= 1e-12 * w[0].abs().max(w[1].abs()))
}

fn gibbs_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, t) in grid() {
        let s = state(k, t);
        worst = worst.max(
            s.rho
                .frobenius_distance(&oracle::thermal_state(&s.params).unwrap()),
        );
    }
    ensure(worst < 1e-10, format!("max Frobenius {worst:e}"))?;
    Ok(format!("max Frobenius distance {worst:.2e} on 6x25 grid"))
}

fn limit_states() -> Outcome {
    let cold = state(1.0, 1e-6).rho.frobenius_distance(&ground_state(1.0));
    let hot = state(1.0, 1e9).rho.frobenius_distance(&maximally_mixed());
    ensure(
        cold < 1e-8 && hot < 1e-8,
        format!("cold {cold:e}, hot {hot:e}"),
    )?;
    Ok(format!("ground {cold:.1e}, I/4 {hot:.1e}"))
}

fn energy_bookkeeping() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, t) in grid() {
        let s = state(k, t);
        let rho = oracle::thermal_state(&s.params).unwrap();
        let e0 = oracle::energy(k, &rho);
        let tr = oracle::protocol(&s.params, 0.0).unwrap();
        worst = worst
            .max((mean_energy(&s) - e0).abs())
            .max((energy_after_measurement(&s) - tr.energy_i).abs())
            .max((energy_injected_ea(&s) - (tr.energy_i - e0)).abs());
    }
    ensure(worst < 1e-11, format!("max deviation {worst:e}"))?;
    for k in KAPPAS {
        let ea: Vec<f64> = kts()
            .iter()
            .map(|&t| energy_injected_ea(&state(k, t)))
            .collect();
        ensure(
            ea.iter().all(|e| *e > 0.0) && non_increasing(&ea),
            format!("E_A not positive/decreasing at kappa {k}"),
        )?;
    }
    Ok(format!(
        "max deviation {worst:.1e}; E_A positive and decreasing"
    ))
}

fn qet_positivity() -> Outcome {
    let mut pts = grid();
    for k in KAPPAS {
        pts.extend([(k, 1e3), (k, 1e5), (k, 1e6)]);
    }
    let mut min_eb = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for (k, t) in pts {
        let s = state(k, t);
        let q = optimal_qet(&s).unwrap();
        min_eb = min_eb.min(q.e_b_max);
        let (_, neg) = golden_section_min(
            |th| -extractable_energy(&s, th).unwrap(),
            0.0,
            FRAC_PI_2,
            1e-13,
        );
        worst = worst.max((-neg - q.e_b_max).abs());
    }
    ensure(min_eb > 0.0, format!("min E_B {min_eb:e}"))?;
    ensure(
        worst < 1e-9,
        format!("numeric maximization differs by {worst:e}"),
    )?;
    Ok(format!(
        "min E_B {min_eb:.2e} (kT up to 1e6); 1D max agrees to {worst:.1e}"
    ))
}

fn ground_qet_value() -> Outcome {
    // T -> 0: r -> 1/m, c1 -> k/m, c2 -> -k/m, so a -> k/m and b -> (1 + 2k^2)/m
    let (k, m) = (1.0f64, 2f64.sqrt());
    let (a, b) = (k / m, (1.0 + 2.0 * k * k) / m);
    let limit = a.hypot(b) - b;
    let symbolic = (10f64.sqrt() - 3.0) / 2f64.sqrt();
    let got = optimal_qet(&state(1.0, 1e-6)).unwrap().e_b_max;
    ensure(
        (limit - symbolic).abs() < 1e-15,
        format!("re-derived limit {limit} != {symbolic}"),
    )?;
    ensure(
        (got - symbolic).abs() < 1e-6,
        format!("E_B {got} vs {symbolic}"),
    )?;
    Ok(format!(
        "E_B = {got:.12} vs (sqrt10-3)/sqrt2 = {symbolic:.12}"
    ))
}

fn passivity() -> Outcome {
    let s = state(1.0, 0.8);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut max_nonidentity = f64::NEG_INFINITY;
    for n in 0..10_000 {
        let u = rng.random_range(-TAU..TAU);
        let v = rng.random_range(-TAU..TAU);
        let w = if n % 10 == 0 {
            0.0
        } else {
            rng.random_range(-TAU..TAU)
        };
        let ex = extracted_by_unitary_on_b(&s, u, v, w);
        ensure(ex <= 0.0, format!("unitary ({u},{v},{w}) extracted {ex:e}"))?;
        let wrapped = w.rem_euclid(TAU).min(TAU - w.rem_euclid(TAU));
        if wrapped >= 1e-9 {
            max_nonidentity = max_nonidentity.max(ex);
        }
    }
    ensure(
        max_nonidentity < 0.0,
        format!("zero extraction away from w = 0: {max_nonidentity:e}"),
    )?;
    let id = extracted_by_unitary_on_b(&s, 0.0, 1.3, 0.0);
    ensure(id == 0.0, format!("identity extracted {id:e}"))?;
    Ok(format!(
        "10^4 unitaries, max extraction away from identity {max_nonidentity:.2e}"
    ))
}

fn kraus_maximum() -> Outcome {
    let points = [(0.25, 0.6), (1.0, 2.0), (4.0, 5.0), (1.0, 20.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut varpi_dev, mut excess): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for (k, t) in points {
        let s = state(k, t);
        let best = solve_max_omega(&s);
        ensure(
            best.branch == Branch::Positive,
            format!("zero branch at ({k},{t})"),
        )?;
        let g = refine_min_2d(
            |a, b| -varpi(&s, a, b),
            Box2::new((-PI, PI), (-PI, PI)),
            RefineOptions::default(),
        );
        varpi_dev = varpi_dev.max((-g.min - best.omega_max).abs());
        for _ in 0..10_000 {
            excess = excess.max(omega(&s, &random_feasible_z(&mut rng)).unwrap() - best.omega_max);
        }
    }
    ensure(
        varpi_dev < 1e-6,
        format!("varpi grid max off by {varpi_dev:e}"),
    )?;
    ensure(
        excess <= 1e-9,
        format!("random channel exceeds maximum by {excess:e}"),
    )?;
    let s0 = state(0.0, 1.0);
    let uncoupled = (solve_max_omega(&s0).omega_max - (1.0 - s0.r)).abs();
    let hot = (solve_max_omega(&state(1.0, 1e9)).omega_max - 1.0).abs();
    ensure(
        uncoupled < 1e-12 && hot < 1e-6,
        format!("kappa=0 dev {uncoupled:e}, kT=1e9 dev {hot:e}"),
    )?;
    Ok(format!(
        "varpi grid dev {varpi_dev:.1e}; 4x10^4 random channels, max excess {excess:.2e}; kappa=0 and T=inf cases hold"
    ))
}

fn thresholds() -> Outcome {
    let mut parts = Vec::new();
    for k in [0.25, 1.0, 4.0] {
        let t1 = threshold_t1(k).unwrap().ok_or("no T1")?;
        let t2 = threshold_t2(k).unwrap().ok_or("no T2")?;
        ensure(t1 > 0.0 && t2 > t1, format!("kappa {k}: T1 {t1}, T2 {t2}"))?;
        let below = solve_max_omega(&state(k, t1 - 1e-8)).branch;
        let above = solve_max_omega(&state(k, t1 + 1e-8)).branch;
        ensure(
            below == Branch::Zero && above == Branch::Positive,
            format!("no branch flip at T1 for kappa {k}"),
        )?;
        let s = state(k, 2.0 * t2);
        let ratio = optimal_qet(&s).unwrap().e_b_max / solve_max_omega(&s).omega_max;
        ensure(
            ratio < 0.05,
            format!("E_B/omega at 2T2 = {ratio} for kappa {k}"),
        )?;
        parts.push(format!("k={k}: T1={t1:.4} T2={t2:.4} ratio={ratio:.1e}"));
    }
    let t = GridSpec::log(0.02, 20.0, 150).values();
    let pts = classify_regimes(&[0.25, 0.5, 1.0, 2.0, 4.0], &t).unwrap();
    for col in pts.chunks(t.len()) {
        let labels: Vec<Regime> = col.iter().map(|p| p.regime.unwrap()).collect();
        let rank = |r: &Regime| *r as u8;
        ensure(
            labels.windows(2).all(|w| rank(&w[0]) <= rank(&w[1])),
            format!("bands not contiguous at kappa {}", col[0].kappa),
        )?;
    }
    Ok(parts.join("; "))
}

fn discord_machinery() -> Outcome {
    let mut identity: f64 = 0.0;
    for (k, t) in grid() {
        let s = state(k, t);
        identity =
            identity.max((mutual_information(&s) - classical_correlation(&s) - discord(&s)).abs());
    }
    ensure(identity < 1e-10, format!("I - C - D = {identity:e}"))?;
    let (mut cdev, mut adev): (f64, f64) = (0.0, 0.0);
    for (k, t) in [(0.25, 0.5), (1.0, 2.0), (4.0, 10.0), (0.5, 0.1)] {
        let s = state(k, t);
        let (min, arg) = minimize_measurement(&s);
        cdev = cdev.max((classical_correlation(&s) - (binary_h(s.r).unwrap() - min)).abs());
        adev = adev.max((arg.theta - FRAC_PI_2).abs()).max(arg.phi.abs());
    }
    ensure(
        cdev < 1e-8 && adev < 1e-4,
        format!("C dev {cdev:e}, argmin dev {adev:e}"),
    )?;
    let s0 = state(1.0, 1e-6);
    let d0 = (discord(&s0) - binary_h(1.0 / s0.m()).unwrap()).abs();
    ensure(d0 < 1e-6, format!("D(T=0) off by {d0:e}"))?;
    for k in KAPPAS {
        let d: Vec<f64> = kts().iter().map(|&t| discord(&state(k, t))).collect();
        ensure(
            d.iter().all(|x| *x > 0.0) && non_increasing(&d),
            format!("D not positive/decreasing at kappa {k}"),
        )?;
    }
    Ok(format!("I=C+D to {identity:.1e}; measurement-min C dev {cdev:.1e}, argmin dev {adev:.1e}; D(0)=h(1/m) to {d0:.1e}"))
}

fn entanglement() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, t) in grid() {
        let p = SystemParams::new(k, t).unwrap();
        let mut closed = ppt_eigenvalues(&p).unwrap().to_vec();
        closed.sort_by(f64::total_cmp);
        let numeric = oracle::ppt_spectrum(&oracle::thermal_state(&p).unwrap()).unwrap();
        for (a, b) in closed.iter().zip(&numeric) {
            worst = worst.max((a - b).abs());
        }
        let m = p.m();
        let (x, y) = (2.0 * m / t, 2.0 * k / t);
        let ln_cosh_y = y + (-2.0 * y).exp().ln_1p() - 2f64.ln();
        let ln_sinh_x = x + (-(-2.0 * x).exp()).ln_1p() - 2f64.ln();
        let cond = m.ln() + ln_cosh_y >= k.ln() + ln_sinh_x;
        ensure(
            is_separable(&p).unwrap() == cond,
            format!("verdict mismatch at ({k},{t})"),
        )?;
    }
    ensure(worst < 1e-10, format!("PPT spectrum dev {worst:e}"))?;
    let te: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&k| entanglement_threshold_te(k).unwrap().unwrap())
        .collect();
    ensure(
        te.windows(2).all(|w| w[1] > w[0]),
        format!("Te not increasing: {te:?}"),
    )?;
    Ok(format!("PPT spectrum dev {worst:.1e}; Te = {te:.4?}"))
}

fn dissonance_energy() -> Outcome {
    let start = Instant::now();
    let mut sizes = Vec::new();
    for c in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let contour = trace_constant_c_contour(c, None).map_err(|e| e.to_string())?;
        ensure(
            contour.points.len() >= 2,
            format!("C={c}: contour too short"),
        )?;
        for p in &contour.points {
            ensure(
                (p.classical - c).abs() < 1e-8,
                format!("C={c}: residual {:e}", p.classical - c),
            )?;
            ensure(
                p.separable,
                format!("C={c}: entangled point at kT={}", p.kt),
            )?;
        }
        for w in contour.points.windows(2) {
            let co = (w[1].discord - w[0].discord) * (w[1].e_b - w[0].e_b) > 0.0;
            ensure(
                co,
                format!("C={c}: D and E_B not co-monotone at kT={}", w[1].kt),
            )?;
        }
        sizes.push(contour.points.len());
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(60),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "points per curve {sizes:?}; {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn verify_command() -> Outcome {
    let run = || {
        let t = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_qetlab"))
            .args(["verify", "--seed", "42"])
            .output()
            .map_err(|e| e.to_string())?;
        Ok::<_, String>((out, t.elapsed()))
    };
    let (a, ta) = run()?;
    let (b, tb) = run()?;
    ensure(
        a.status.code() == Some(0),
        format!(
            "exit {:?}: {}",
            a.status.code(),
            String::from_utf8_lossy(&a.stderr)
        ),
    )?;
    ensure(a.stdout == b.stdout, "summaries differ between runs".into())?;
    ensure(
        ta + tb < Duration::from_secs(60),
        format!("took {:?}", ta + tb),
    )?;
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    let n = doc["checks"].as_array().map_or(0, |c| c.len());
    Ok(format!(
        "{n} checks passed, identical summaries, {:.2} s per run",
        ta.as_secs_f64()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Gibbs oracle equivalence", gibbs_oracle),
        ("limit states", limit_states),
        ("energy bookkeeping", energy_bookkeeping),
        ("QET positivity", qet_positivity),
        ("ground-state QET value", ground_qet_value),
        ("passivity", passivity),
        ("Kraus maximum", kraus_maximum),
        ("thresholds", thresholds),
        ("discord machinery", discord_machinery),
        ("entanglement", entanglement),
        ("dissonance-energy relationship", dissonance_energy),
        ("verify command", verify_command),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
