use std::f64::consts::PI;
use std::fs;

use fracwave::dg_solver::{run, ForcingSpec, SolverConfig, TimeGrid};
use fracwave::fem1d::{SpaceGrid1D, SpatialFunctionSpec};
use fracwave::frac_kernel::quad::tanh_sinh;
use fracwave::frac_kernel::{contour_xi_hom, ContourSpec, FracOrder};
use fracwave::reference::{
    exact_hom_solution, fine_grid_reference, fourier_coeffs_power, restrict_trajectory, time_ratio, Cache,
    CoefficientTail, FourierData, Manifest, SpectralBasis, DEFAULT_MODES,
};
use fracwave::Error;

fn fo(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

#[test]
fn restriction_of_a_run_onto_itself_is_the_identity() {
    let sgrid = SpaceGrid1D::dyadic(4).unwrap();
    let tgrid = TimeGrid::dyadic(5).unwrap();
    let traj =
        run(SpatialFunctionSpec::power(-0.3), &ForcingSpec::Zero, &sgrid, &tgrid, fo(0.4), &SolverConfig::default())
            .unwrap();
    assert_eq!(restrict_trajectory(&traj, &sgrid, &tgrid).unwrap(), traj);
}

#[test]
fn restriction_samples_nodes_and_slab_ends() {
    let sgrid = SpaceGrid1D::dyadic(5).unwrap();
    let tgrid = TimeGrid::dyadic(6).unwrap();
    let traj =
        run(SpatialFunctionSpec::sine_mode(1), &ForcingSpec::Zero, &sgrid, &tgrid, fo(0.6), &SolverConfig::default())
            .unwrap();
    let (cs, ct) = (SpaceGrid1D::dyadic(3).unwrap(), TimeGrid::dyadic(4).unwrap());
    let coarse = restrict_trajectory(&traj, &cs, &ct).unwrap();
    assert_eq!(time_ratio(&tgrid, &ct).unwrap(), 4);
    for j in 0..=ct.steps() {
        for i in 0..cs.interior() {
            assert_eq!(coarse.slab(j)[i], traj.slab(4 * j)[4 * i + 3]);
        }
    }
}

#[test]
fn grids_must_be_nested() {
    let sgrid = SpaceGrid1D::new(12).unwrap();
    let tgrid = TimeGrid::new(1.0, 12).unwrap();
    let traj =
        run(SpatialFunctionSpec::power(0.0), &ForcingSpec::Zero, &sgrid, &tgrid, fo(0.5), &SolverConfig::default())
            .unwrap();
    let ok_t = TimeGrid::new(1.0, 4).unwrap();
    assert!(restrict_trajectory(&traj, &SpaceGrid1D::new(5).unwrap(), &ok_t).is_err());
    assert!(restrict_trajectory(&traj, &SpaceGrid1D::new(4).unwrap(), &TimeGrid::new(1.0, 5).unwrap()).is_err());
    assert!(restrict_trajectory(&traj, &SpaceGrid1D::new(4).unwrap(), &TimeGrid::new(2.0, 4).unwrap()).is_err());
    assert!(restrict_trajectory(&traj, &SpaceGrid1D::new(4).unwrap(), &ok_t).is_ok());
}

#[test]
fn cache_round_trip_and_tamper_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::Dir(dir.path().join("refs"));
    let alpha = fo(0.4);
    let cfg = SolverConfig::default();
    let fresh = fine_grid_reference(2, alpha, 4, 5, &Cache::Disabled, &cfg).unwrap();
    let first = fine_grid_reference(2, alpha, 4, 5, &cache, &cfg).unwrap();
    assert_eq!(first, fresh);

    let bin = dir.path().join("refs/exp2_alpha0.4_m4_n5.bin");
    let json = dir.path().join("refs/exp2_alpha0.4_m4_n5.json");
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!((manifest.experiment, manifest.m, manifest.n), (2, 4, 5));
    assert_eq!(manifest.sha256.len(), 64);
    assert_eq!(fine_grid_reference(2, alpha, 4, 5, &cache, &cfg).unwrap(), fresh);

    let mut bytes = fs::read(&bin).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x5a;
    fs::write(&bin, &bytes).unwrap();
    assert_eq!(fine_grid_reference(2, alpha, 4, 5, &cache, &cfg).unwrap(), fresh);
    let healed: Manifest = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(healed.sha256, manifest.sha256);
}

#[test]
fn single_mode_matches_the_contour_solution() {
    let data = FourierData { coeffs: vec![1.0], tail: CoefficientTail::None };
    let sgrid = SpaceGrid1D::dyadic(3).unwrap();
    let alpha = fo(0.4);
    let spec = ContourSpec::new(alpha, 1e-13).unwrap();
    for &t in &[0.1, 0.5, 1.0] {
        let u = exact_hom_solution(&data, alpha, t, &sgrid, 1e-12).unwrap();
        let xi = contour_xi_hom(PI * PI, alpha, t, 1.0, &spec).unwrap();
        for (i, v) in u.coeffs.iter().enumerate() {
            let want = xi * SpectralBasis::phi(1, sgrid.node(i + 1));
            assert!((v - want).abs() < 1e-10, "t {t}: {v} vs {want}");
        }
    }
}

#[test]
fn finite_expansion_at_tiny_time_is_the_data() {
    let data = FourierData { coeffs: vec![0.5, 0.0, -0.25], tail: CoefficientTail::None };
    let sgrid = SpaceGrid1D::dyadic(4).unwrap();
    let u = exact_hom_solution(&data, fo(0.7), 1e-6, &sgrid, 1e-12).unwrap();
    for (i, v) in u.coeffs.iter().enumerate() {
        let x = sgrid.node(i + 1);
        let want = 0.5 * SpectralBasis::phi(1, x) - 0.25 * SpectralBasis::phi(3, x);
        assert!((v - want).abs() < 1e-8);
    }
}

#[test]
fn short_expansions_report_truncation() {
    let data = fourier_coeffs_power(-0.49, 10).unwrap();
    let sgrid = SpaceGrid1D::dyadic(3).unwrap();
    match exact_hom_solution(&data, fo(0.5), 1e-3, &sgrid, 1e-8) {
        Err(Error::Truncation { requested, achieved }) => assert!(achieved > requested),
        other => panic!("expected a truncation error, got {other:?}"),
    }
    assert!(exact_hom_solution(&data, fo(0.5), 0.0, &sgrid, 1.0).is_err());
}

#[test]
fn sine_basis_is_orthonormal() {
    for n in 1..=6 {
        for k in 1..=6 {
            let ip = tanh_sinh(|x| SpectralBasis::phi(n, x) * SpectralBasis::phi(k, x), 0.0, 1.0, 1e-15);
            let want = if n == k { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-12, "({n}, {k}): {ip}");
        }
    }
    assert_eq!(SpectralBasis::lambda(3), 9.0 * PI * PI);
}

#[test]
fn singular_coefficients_decay_like_a_power() {
    let data = fourier_coeffs_power(-0.49, DEFAULT_MODES).unwrap();
    assert_eq!(data.tail, CoefficientTail::Power { p: -0.49 });
    // leading term √2 Γ(p+1) (nπ)^{-p-1} sin(π(p+1)/2) plus an O(1/n) remainder
    let lead =
        std::f64::consts::SQRT_2 * fracwave::frac_kernel::gamma_fn(0.51).unwrap() * PI.powf(-0.51) * (0.255 * PI).sin();
    for (i, c) in data.coeffs.iter().enumerate() {
        let n = (i + 1) as f64;
        let rest = (c - lead * n.powf(-0.51)) * n;
        assert!(rest.abs() < 1.0, "n {n}: n (c_n - lead) = {rest}");
    }
}
