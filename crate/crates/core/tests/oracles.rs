//! Values frozen from extended-precision computations; see
//! `oracles/generate.py`.

use std::f64::consts::PI;

use fracwave::dg_solver::history_sum_naive;
use fracwave::fem1d::{load_vector, SpaceGrid1D, SpatialFunctionSpec};
use fracwave::frac_kernel::{
    contour_xi_forced, contour_xi_hom, conv_weights, gamma_fn, mittag_leffler, ContourSpec, FracOrder,
};
use fracwave::reference::fourier_coeffs_power;
use fracwave::scalar_ode::{step_forced, step_hom, ScalarProblem};
use num_complex::Complex64 as C64;
use serde_json::Value;

fn oracles() -> Value {
    serde_json::from_str(include_str!("oracles/oracles.json")).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn fo(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs().max(1e-300), "{got:e} vs {want:e}");
}

#[test]
fn gamma_values() {
    for row in oracles()["gamma"].as_array().unwrap() {
        close(gamma_fn(f(&row[0])).unwrap(), f(&row[1]), 1e-14);
    }
}

#[test]
fn mittag_leffler_values() {
    for row in oracles()["mittag_leffler"].as_array().unwrap() {
        let (b, g, z, want) = (f(&row[0]), f(&row[1]), f(&row[2]), f(&row[3]));
        let got = mittag_leffler(b, g, C64::new(z, 0.0)).unwrap();
        assert!((got.re - want).abs() < 1e-12, "E_{{{b},{g}}}({z}) = {} vs {want}", got.re);
        assert!(got.im.abs() < 1e-14);
    }
}

#[test]
fn contour_solutions_match_mittag_leffler() {
    let o = oracles();
    let rows = o["mittag_leffler"].as_array().unwrap();
    // ξ(1) for λ = π², α = 0.4 is E_{1.4,1}(-π²)
    let spec = ContourSpec::new(fo(0.4), 1e-13).unwrap();
    close(contour_xi_hom(PI * PI, fo(0.4), 1.0, 1.0, &spec).unwrap(), f(&rows[2][3]), 1e-10);
    // the forced solution at t = 2^{2/3}, λ = 4, α = 0.5 is t E_{1.5,2}(-8)
    let t = 4f64.powf(1.0 / 3.0);
    let spec = ContourSpec::new(fo(0.5), 1e-13).unwrap();
    let got = contour_xi_forced(4.0, fo(0.5), t, &spec).unwrap();
    assert!((got - t * f(&rows[6][3])).abs() < 1e-11);
}

#[test]
fn first_power_load() {
    let o = &oracles()["power_load_first"];
    let grid = SpaceGrid1D::new(o["m"].as_u64().unwrap() as usize).unwrap();
    let load = load_vector(&SpatialFunctionSpec::power(f(&o["p"])), &grid).unwrap();
    close(load[0], f(&o["value"]), 1e-14);
}

#[test]
fn scalar_recurrences() {
    let o = oracles();
    let h = &o["scalar_hom"];
    let p = ScalarProblem::from_mu(fo(f(&h["alpha"])), f(&h["mu"]), 1.0, f(&h["xi0"])).unwrap();
    for (got, want) in step_hom(&p, 3).unwrap().y.iter().zip(h["y"].as_array().unwrap()) {
        assert!((got - f(want)).abs() < 1e-15);
    }
    let g = &o["scalar_forced"];
    let p = ScalarProblem::from_mu(fo(f(&g["alpha"])), f(&g["mu"]), f(&g["tau"]), 0.0).unwrap();
    for (got, want) in step_forced(&p, 4).unwrap().y.iter().zip(g["y"].as_array().unwrap()) {
        assert!((got - f(want)).abs() <= 1e-14 * f(want).abs(), "{got} vs {want}");
    }
}

#[test]
fn history_sum_value() {
    let o = &oracles()["history_sum"];
    let k = o["k"].as_u64().unwrap() as usize;
    let w = conv_weights(fo(f(&o["alpha"])), k + 2).unwrap();
    let slabs: Vec<f64> = (1..=k).map(|j| (j as f64).sin()).collect();
    let h = history_sum_naive(&slabs, 1, &w, k).unwrap();
    assert!((h[0] - f(&o["value"])).abs() < 1e-14);
}

#[test]
fn fourier_coefficients_of_singular_power() {
    let o = &oracles()["fourier_power"];
    let data = fourier_coeffs_power(f(&o["p"]), 5).unwrap();
    for (got, want) in data.coeffs.iter().zip(o["coeffs"].as_array().unwrap()) {
        assert!((got - f(want)).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn weight_values() {
    let cw = conv_weights(fo(0.5), 4).unwrap();
    let g = gamma_fn(2.5).unwrap();
    close(cw.b()[1], 0.752_252_778_063_675_2, 1e-15);
    close(cw.b()[2], 2f64.powf(1.5) / g, 1e-15);
    assert_eq!(cw.b()[0], 0.0);
}
