mod common;

use proptest::prelude::*;
use qlinear::dmat::{delta_build, is_doubled, max_abs, max_diff, solve_lyapunov_hermitian, solve_sylvester, CMat};
use qlinear::feedback::{augment_controller, synth_noise_annihilation};
use qlinear::qsys::{extract_params, random_pr_system, realize, GenOptions, SystemKind};
use qlinear::xfer::{jj_unitary_check, lossless_br_check, minimal_realization};

fn kind(general: bool) -> SystemKind {
    if general {
        SystemKind::General
    } else {
        SystemKind::Annihilation
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn doubled_products_stay_doubled(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, p in 1usize..4) {
        let mut r = common::rng(seed);
        let a = delta_build(&common::gauss(&mut r, n, m), &common::gauss(&mut r, n, m)).unwrap();
        let b = delta_build(&common::gauss(&mut r, m, p), &common::gauss(&mut r, m, p)).unwrap();
        let prod = a.mul(&b).unwrap();
        prop_assert!(is_doubled(prod.as_matrix(), 1e-12).unwrap().doubled);
    }

    #[test]
    fn sylvester_residual_is_small(seed in any::<u64>(), n in 1usize..6, m in 1usize..6) {
        let a = common::random_stable(seed, n, 1, 1, false).a().clone();
        let b = common::random_stable(seed ^ 1, m, 1, 1, false).a().clone();
        let c = common::gauss(&mut common::rng(seed ^ 2), n, m);
        let x = solve_sylvester(&a, &b, &c).unwrap();
        let res = &a * &x + &x * &b + &c;
        prop_assert!(max_abs(&res) <= 1e-9 * (1.0 + max_abs(&c)) * (1.0 + max_abs(&x)));
    }

    #[test]
    fn lyapunov_solution_is_hermitian(seed in any::<u64>(), n in 1usize..6) {
        let a = common::random_stable(seed, n, 1, 1, false).a().clone();
        let g = common::gauss(&mut common::rng(seed ^ 3), n, 2);
        let x = solve_lyapunov_hermitian(&a, &(&g * g.adjoint())).unwrap();
        prop_assert!(max_diff(&x, &x.adjoint()) <= 1e-10 * (1.0 + max_abs(&x)));
    }

    #[test]
    fn realized_systems_are_realizable(seed in any::<u64>(), n in 1usize..5, m in 1usize..5, general in any::<bool>()) {
        let g = random_pr_system(n, m, seed, GenOptions::new(kind(general))).unwrap();
        let v = g.system.check_pr();
        prop_assert!(v.realizable, "{:?}", v);
        prop_assert!(v.residuals.lyapunov <= 1e-8 && v.residuals.coupling <= 1e-8);
    }

    #[test]
    fn parameters_round_trip(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, general in any::<bool>()) {
        let g = random_pr_system(n, m, seed, GenOptions::new(kind(general))).unwrap();
        let params = extract_params(&g.system).unwrap();
        let again = realize(&params).unwrap();
        let (f1, g1, h1, _) = g.system.matrices();
        let (f2, g2, h2, _) = again.matrices();
        let scale = 1.0 + max_abs(f1) + max_abs(g1);
        prop_assert!(max_diff(f1, f2) <= 1e-8 * scale);
        prop_assert!(max_diff(g1, g2) <= 1e-8 * scale);
        prop_assert!(max_diff(h1, h2) <= 1e-8 * scale);
    }

    #[test]
    fn realizable_transfer_functions_are_lossless(seed in any::<u64>(), n in 1usize..4, m in 1usize..3, general in any::<bool>()) {
        let opts = GenOptions::new(kind(general)).hurwitz(!general);
        let g = random_pr_system(n, m, seed, opts).unwrap();
        let tf = g.system.to_tf();
        if general {
            let v = jj_unitary_check(&tf, m).unwrap();
            prop_assert!(v.holds, "{:?}", v);
        } else {
            let v = lossless_br_check(&tf);
            prop_assert!(v.holds, "{:?}", v);
        }
    }

    #[test]
    fn minimal_realization_preserves_response(seed in any::<u64>(), n in 1usize..6) {
        let g = common::random_stable(seed, n, 2, 2, true);
        let r = minimal_realization(&g);
        for w in [0.0, 0.3, 1.7, -4.0] {
            let s = qlinear::Cx::new(0.0, w);
            let a = qlinear::xfer::tf_eval(&g, s).unwrap();
            let b = qlinear::xfer::tf_eval(&r, s).unwrap();
            prop_assert!(max_diff(&a, &b) <= 1e-8 * (1.0 + max_abs(&a)));
        }
    }

    #[test]
    fn synthesized_controllers_augment(seed in any::<u64>(), alpha in 0.05f64..0.95, gy in 0.0f64..0.5) {
        let mut r = common::rng(seed);
        let f = common::random_stable(seed, 2, 1, 1, false).a().clone();
        let h = common::gauss(&mut r, 1, 2);
        let tf = qlinear::xfer::StateSpaceTF::new(f.clone(), qlinear::dmat::eye(2), h.clone(), CMat::zeros(1, 2)).unwrap();
        let gamma = qlinear::xfer::hinf_norm(&tf, 1e-9).unwrap().value;
        let h = h.scale(alpha / gamma);
        let g = common::gauss(&mut r, 2, 1).scale(gy);
        if let Ok(s) = synth_noise_annihilation(&f, &g, &h) {
            prop_assert!(s.verdict.realizable);
            let aug = augment_controller(&s.controller).unwrap();
            prop_assert!(aug.verdict.realizable, "{:?}", aug.verdict);
        }
    }
}
