use fracwave::dg_solver::{
    history_sum_fft, history_sum_naive, run, BlockState, ForcingSpec, HistoryMode, InitialValue, SolverConfig, TimeGrid,
};
use fracwave::fem1d::{l2_project, FemFunction, SpaceGrid1D, SpatialFunctionSpec};
use fracwave::frac_kernel::quad::tanh_sinh;
use fracwave::frac_kernel::{conv_weights, psi_eval, rl_integral_pc_left, rl_integral_pc_right, FracOrder};
use fracwave::scalar_ode::{step_hom, ScalarProblem};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn fo(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

/// `∫_0^T g(t) c(t) dt` for slab values `c`, slab by slab.
fn pair(c: &[f64], grid: &TimeGrid, g: impl Fn(f64) -> f64) -> f64 {
    (0..grid.steps()).map(|j| c[j] * tanh_sinh(&g, grid.t(j), grid.t(j + 1), 1e-15)).sum()
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn left_and_right_integrals_are_adjoint(
        vw in (1usize..6).prop_flat_map(|n| (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
        )),
        beta in 0.1f64..=1.0,
        tf in 0.5f64..2.0,
    ) {
        let (v, w) = vw;
        let grid = TimeGrid::new(tf, v.len()).unwrap();
        let lhs = pair(&w, &grid, |t| rl_integral_pc_left(&v, &grid, beta, t.max(f64::MIN_POSITIVE)).unwrap());
        let rhs = pair(&v, &grid, |t| rl_integral_pc_right(&w, &grid, beta, t.min(tf * (1.0 - f64::EPSILON))).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn runs_are_linear(
        u in prop::collection::vec(-1.0f64..1.0, 7),
        v in prop::collection::vec(-1.0f64..1.0, 7),
        g in prop::collection::vec(-1.0f64..1.0, 7),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        alpha in 0.05f64..0.95,
    ) {
        let sgrid = SpaceGrid1D::new(8).unwrap();
        let tgrid = TimeGrid::dyadic(5).unwrap();
        let alpha = fo(alpha);
        let cfg = SolverConfig::default();
        let forcing = |c: f64| ForcingSpec::Constant {
            x: SpatialFunctionSpec::fem(&sgrid, &FemFunction { coeffs: g.iter().map(|x| c * x).collect() }),
        };
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let r_u = run(InitialValue::Discrete(FemFunction { coeffs: u.clone() }), &forcing(1.0), &sgrid, &tgrid, alpha, &cfg).unwrap();
        let r_v = run(InitialValue::Discrete(FemFunction { coeffs: v.clone() }), &ForcingSpec::Zero, &sgrid, &tgrid, alpha, &cfg).unwrap();
        let r_c = run(InitialValue::Discrete(FemFunction { coeffs: combo }), &forcing(a), &sgrid, &tgrid, alpha, &cfg).unwrap();
        let expect: Vec<f64> = r_u.slabs_flat().iter().zip(r_v.slabs_flat()).map(|(x, y)| a * x + b * y).collect();
        let scale = 1.0 + a.abs() + b.abs();
        let dev = r_c.slabs_flat().iter().zip(&expect).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        prop_assert!(dev <= 1e-12 * scale, "deviation {}", dev);
    }

    #[test]
    fn homogeneous_recurrence_scales_with_initial_value(
        alpha in 0.05f64..0.95,
        mu in 1e-3f64..1e3,
        e in -20i32..20,
        s in -10.0f64..10.0,
    ) {
        let base = step_hom(&ScalarProblem::from_mu(fo(alpha), mu, 0.01, 1.0).unwrap(), 40).unwrap();
        let pow2 = 2f64.powi(e);
        let scaled = step_hom(&ScalarProblem::from_mu(fo(alpha), mu, 0.01, pow2).unwrap(), 40).unwrap();
        for (x, y) in scaled.y.iter().zip(&base.y) {
            prop_assert_eq!(*x, pow2 * y);
        }
        let other = step_hom(&ScalarProblem::from_mu(fo(alpha), mu, 0.01, s).unwrap(), 40).unwrap();
        for (x, y) in other.y.iter().zip(&base.y) {
            prop_assert!((x - s * y).abs() <= 1e-14 * s.abs());
        }
    }

    #[test]
    fn homogeneous_recurrence_never_exceeds_initial_value(
        alpha in 0.05f64..0.95,
        mu in 1e-3f64..1e4,
        xi0 in -5.0f64..5.0,
    ) {
        let traj = step_hom(&ScalarProblem::from_mu(fo(alpha), mu, 0.01, xi0).unwrap(), 300).unwrap();
        for y in &traj.y {
            prop_assert!(y.abs() <= xi0.abs() * (1.0 + 1e-14));
        }
    }

    #[test]
    fn blocked_history_matches_direct_sum(
        alpha in 0.05f64..0.95,
        k in 1usize..300,
        seed in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let n = 3;
        let weights = conv_weights(fo(alpha), 2 * k + 2).unwrap();
        let slabs: Vec<f64> = (0..k * n).map(|i| seed[i % n] * (0.37 * i as f64).cos() + 0.1).collect();
        let mut state = BlockState::new(n, &weights);
        let mut last = Vec::new();
        for step in [k / 3, k / 2, k] {
            if step >= 1 && step >= state.pushed() {
                last = history_sum_fft(&slabs, &mut state, step).unwrap();
                let direct = history_sum_naive(&slabs, n, &weights, step).unwrap();
                prop_assert!(max_rel(&last, &direct) <= 1e-12, "k {} step {}", k, step);
            }
        }
        prop_assert_eq!(last.len(), n);
    }

    #[test]
    fn projection_is_idempotent(coeffs in prop::collection::vec(-3.0f64..3.0, 1..20)) {
        let grid = SpaceGrid1D::new(coeffs.len() + 1).unwrap();
        let v = FemFunction { coeffs };
        let p = l2_project(&SpatialFunctionSpec::fem(&grid, &v), &grid).unwrap();
        prop_assert!(max_rel(&p.coeffs, &v.coeffs) <= 1e-12);
    }

    #[test]
    fn weight_sequences_are_monotone_and_telescope(alpha in 0.01f64..0.99, k in 2usize..2000) {
        let cw = conv_weights(fo(alpha), k).unwrap();
        let (b, w) = (cw.b(), cw.w());
        prop_assert!(b.windows(2).all(|p| p[1] > p[0]));
        prop_assert!(w[1..].iter().all(|&x| x > 0.0));
        prop_assert!(w[1..].windows(2).all(|p| p[1] < p[0]));
        let sum: f64 = w[1..].iter().sum();
        let kk = w.len() - 1;
        let tele = (b[kk + 1] - b[kk]) - (b[1] - b[0]);
        // the telescoped side cancels b_{k+1} against b_k, so its error scales with b_{k+1}
        prop_assert!((sum - tele).abs() <= 1e-13 * b[kk + 1], "{} vs {}", sum, tele);
    }

    #[test]
    fn psi_commutes_with_conjugation(alpha in 0.05f64..0.95, re in -3.0f64..5.0, im in 0.01f64..6.2) {
        let z = C64::new(re, im);
        let p = psi_eval(z, fo(alpha)).unwrap();
        let q = psi_eval(z.conj(), fo(alpha)).unwrap();
        prop_assert!((p.conj() - q).norm() <= 1e-14 * p.norm().max(1.0));
    }
}

#[test]
fn naive_and_blocked_runs_agree() {
    let sgrid = SpaceGrid1D::dyadic(5).unwrap();
    let tgrid = TimeGrid::dyadic(9).unwrap();
    for &a in &[0.2, 0.5, 0.8] {
        let f = ForcingSpec::Separable { x: SpatialFunctionSpec::power(-0.3), q: -0.4 };
        let u0 = SpatialFunctionSpec::power(-0.49);
        let naive = SolverConfig { history_mode: HistoryMode::Naive, ..SolverConfig::default() };
        let x = run(u0.clone(), &f, &sgrid, &tgrid, fo(a), &naive).unwrap();
        let y = run(u0, &f, &sgrid, &tgrid, fo(a), &SolverConfig::default()).unwrap();
        assert!(max_rel(y.slabs_flat(), x.slabs_flat()) <= 1e-12);
    }
}
