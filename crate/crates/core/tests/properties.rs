use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qetlab::analysis::{classify_regimes, Regime};
use qetlab::correlations::{
    binary_h, classical_correlation, discord, is_separable, marginal_entropy, mutual_information,
    ppt_eigenvalues,
};
use qetlab::local_extraction::{
    extracted_by_unitary_on_b, omega, random_feasible_z, solve_max_omega, thresholds, Branch,
    FEASIBILITY_TOL,
};
use qetlab::numkit::hermitian_eig;
use qetlab::qet_protocol::{
    coefficients_c_form, coefficients_s_form, energy_after_unitary, energy_injected_ea,
    optimal_qet, run_protocol,
};
use qetlab::spin_model::{
    build_hamiltonian, eigensystem_for, gibbs_state, gibbs_state_naive, mean_energy,
};
use qetlab::{GibbsState, SystemParams};

fn state(k: f64, t: f64) -> GibbsState {
    gibbs_state(&SystemParams::new(k, t).unwrap()).unwrap()
}

fn kappa() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 1e-3..8.0f64]
}

fn log_kt() -> impl Strategy<Value = f64> {
    (-2.0..4.0f64).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn spectrum_ordered_and_eigen(k in kappa()) {
        let es = eigensystem_for(k);
        let m = k.hypot(1.0);
        prop_assert!(((m * m - k * k) - 1.0).abs() < 1e-12);
        prop_assert_eq!(es.energies[0], 0.0);
        prop_assert!(es.energies[0] < es.energies[1]);
        prop_assert!(es.energies[1] <= es.energies[2]);
        prop_assert!(es.energies[2] < es.energies[3]);
        let h = build_hamiltonian(&SystemParams::new(k, 1.0).unwrap());
        for i in 0..4 {
            let p = es.projector(i);
            let hp = h.checked_mul(&p).unwrap();
            prop_assert!(hp.max_abs_diff(&p.scale_real(es.energies[i])) < 1e-12);
        }
    }

    #[test]
    fn gibbs_state_is_a_density_matrix(k in kappa(), t in log_kt()) {
        let s = state(k, t);
        prop_assert!((s.rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(s.rho.hermiticity_defect() < 1e-14);
        prop_assert!(hermitian_eig(&s.rho).unwrap().eigenvalues[0] > -1e-12);
        prop_assert!((s.p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&s.r));
        prop_assert!(s.c1 >= s.c2);
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    prop_assert_eq!(s.rho[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn stable_and_naive_coefficients_agree(k in 0.0..3.0f64, t in 0.3..50.0f64) {
        let a = state(k, t);
        let b = gibbs_state_naive(&SystemParams::new(k, t).unwrap()).unwrap();
        prop_assert!(a.rho.frobenius_distance(&b.rho) < 1e-12);
    }

    #[test]
    fn correlation_identities(k in kappa(), t in log_kt()) {
        let s = state(k, t);
        let (i, c, d) = (mutual_information(&s), classical_correlation(&s), discord(&s));
        prop_assert!((i - (c + d)).abs() < 1e-10);
        prop_assert!(c <= i + 1e-12 && d <= i + 1e-12);
        prop_assert!((marginal_entropy(&s) - binary_h(s.r).unwrap()).abs() < 1e-14);
        let lam = ppt_eigenvalues(&s.params).unwrap();
        let min = lam.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(is_separable(&s.params).unwrap(), min >= -1e-12);
    }

    #[test]
    fn qet_invariants(k in kappa(), t in log_kt(), theta in -1.5..1.5f64) {
        let s = state(k, t);
        let q = optimal_qet(&s).unwrap();
        prop_assert!((q.e_a - s.r).abs() < 1e-12);
        prop_assert!((energy_injected_ea(&s) - s.r).abs() < 1e-12);
        if k > 0.0 {
            prop_assert!(q.b > 0.0);
        }
        prop_assert!(q.e_b_max >= 0.0);
        prop_assert!((q.e_b_max - (q.a.hypot(q.b) - q.b)).abs() < 1e-12 * (1.0 + q.b));
        prop_assert!((q.outcome_probs.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let tr = run_protocol(&s, theta).unwrap();
        let mut ei = 0.0;
        let mut eiii = 0.0;
        for br in &tr.branches {
            for rho in [&br.rho_i, &br.rho_iii] {
                prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
                prop_assert!(hermitian_eig(rho).unwrap().eigenvalues[0] > -1e-12);
            }
            ei += br.prob * br.energy_i;
            eiii += br.prob * br.energy_iii;
        }
        prop_assert!((ei - tr.energy_i).abs() < 1e-12);
        prop_assert!((eiii - energy_after_unitary(&s, theta)).abs() < 1e-11);
        prop_assert!((mean_energy(&s) + s.r - tr.energy_i).abs() < 1e-11);
    }

    #[test]
    fn coefficient_forms_agree(k in kappa(), t in 0.05..1e3f64) {
        let s = state(k, t);
        let c = coefficients_c_form(&s);
        let f = coefficients_s_form(&s).unwrap();
        prop_assert!((c.a - f.a).abs() < 1e-10 && (c.b - f.b).abs() < 1e-10);
    }

    #[test]
    fn unitaries_on_b_are_passive(k in kappa(), t in log_kt(), u in -7.0..7.0f64, v in -7.0..7.0f64, w in -7.0..7.0f64) {
        prop_assert!(extracted_by_unitary_on_b(&state(k, t), u, v, w) <= 0.0);
    }

    #[test]
    fn optimal_channel_dominates(k in kappa(), t in log_kt(), seed in any::<u64>()) {
        let s = state(k, t);
        let best = solve_max_omega(&s);
        prop_assert!(best.omega_max >= 0.0);
        let z = best.z();
        for r in z.feasibility_residuals() {
            prop_assert!(r < FEASIBILITY_TOL);
        }
        prop_assert!((omega(&s, &z).unwrap() - best.omega_max).abs() < 1e-12);
        let positive = s.r == 0.0 || k * s.c1 < (1.0 - s.r * s.r) / (2.0 * s.r);
        prop_assert_eq!(best.branch == Branch::Positive, positive);
        if positive {
            let closed = ((1.0 - s.r * s.r + 4.0 * k * k * s.c1 * s.c1) / (1.0 - s.r * s.r)).sqrt() - 2.0 * k * s.c1 - s.r;
            prop_assert!((best.omega_max - closed).abs() < 1e-10);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let zr = random_feasible_z(&mut rng);
            prop_assert!(omega(&s, &zr).unwrap() <= best.omega_max + 1e-9);
        }
    }

    #[test]
    fn threshold_ordering_and_regimes(k in 0.05..6.0f64) {
        let th = thresholds(k).unwrap();
        let (t1, t2) = (th.t1.unwrap(), th.t2.unwrap());
        prop_assert!(0.0 < t1 && t1 < t2);
        let kts = [t1 * 0.9, t1 * 1.001, 0.5 * (t1 + t2), t2 * 1.001, t2 * 3.0];
        let pts = classify_regimes(&[k], &kts).unwrap();
        let got: Vec<Regime> = pts.iter().map(|p| p.regime.unwrap()).collect();
        prop_assert_eq!(got, vec![
            Regime::Teleportation, Regime::Window, Regime::Window, Regime::LocalExtraction, Regime::LocalExtraction,
        ]);
    }
}
