//! Library values against closed forms and independent quadrature oracles.

mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::erf::erf;

use common::{random_state, rng, transform};
use zak_gkp::gkp::{GKPCode, Mixture, PureState};
use zak_gkp::operators::{apply_X, apply_Z, modular_expectations};
use zak_gkp::ssd::{gauge_trace, to_ssd_mixture};
use zak_gkp::zak_core::{
    inner_product, inverse_zak_transform, stretch_rescale, zak_transform, ModularWavefunction,
    PositionStateDescriptor, TabulatedState, ZakGrid, ZakPatch,
};

fn square_grid(n: usize) -> ZakGrid {
    GKPCode::square().grid(n, n).unwrap()
}

/// `π^{-1/2} Σ_m exp(-(am)²/2)`, the vacuum Zak transform at the origin.
fn vacuum_origin_oracle(a: f64) -> f64 {
    (-50i32..=50).map(|m| (-(a * m as f64).powi(2) / 2.0).exp()).sum::<f64>() / PI.sqrt()
}

#[test]
fn vacuum_origin_matches_direct_sum() {
    let g = square_grid(256);
    let psi = transform(&PositionStateDescriptor::vacuum(), &g);
    let z = psi.evaluate_on_grid(0.0, 0.0).unwrap();
    let want = vacuum_origin_oracle(g.patch().a());
    assert!((z.re - want).abs() < 1e-14 && z.im.abs() < 1e-15, "{z} vs {want}");
    assert!((want - 0.566_296_767_035_682_4).abs() < 1e-15);
}

#[test]
fn vacuum_inverse_values() {
    let g = square_grid(256);
    let psi = transform(&PositionStateDescriptor::vacuum(), &g);
    let at0 = inverse_zak_transform(&psi, 0, 0.0).unwrap();
    let at1 = inverse_zak_transform(&psi, 1, 0.0).unwrap();
    let norm = PI.powf(-0.25);
    assert!((at0 - norm).norm() < 1e-14, "{at0}");
    // ψ_x(2√π) = π^{-1/4} e^{-2π}
    let want = norm * (-2.0 * PI).exp();
    assert!((at1 - want).norm() < 1e-15, "{at1}");
    assert!((want - 0.001_402_683_938_611_262_6).abs() < 1e-17);
}

#[test]
fn displaced_vacuum_overlaps() {
    let g = square_grid(256);
    let vac = transform(&PositionStateDescriptor::vacuum(), &g);
    for x0 in [g.patch().a(), 0.7, -1.3] {
        let shifted = transform(&PositionStateDescriptor::displaced_vacuum(x0), &g);
        let got = inner_product(&vac, &shifted).unwrap();
        let want = (-x0 * x0 / 4.0).exp();
        assert!((got - want).norm() < 1e-12, "x0 = {x0}: {got} vs {want}");
    }
}

fn tabulated_corpus(g: &ZakGrid) -> TabulatedState {
    // Nodes coincide with u_j + a n, so every sample is a comb point.
    let a = g.patch().a();
    let x0 = g.patch().u_min() - 4.0 * a;
    let values = (0..9 * g.nu())
        .map(|i| {
            let x = x0 + i as f64 * g.du();
            Complex64::from_polar((-(x - 1.0).powi(2) / 4.0).exp() * (1.0 + 0.3 * x.sin()), 0.7 * x - 0.05 * x * x)
        })
        .collect();
    TabulatedState::new(x0, g.du(), values).unwrap()
}

#[test]
fn tabulated_state_roundtrip_and_isometry() {
    let g = square_grid(256);
    let tab = tabulated_corpus(&g);
    let psi = transform(&PositionStateDescriptor::Tabulated(tab.clone()), &g);
    let nu = g.nu();
    let mut worst = 0.0f64;
    for (i, want) in tab.values().iter().enumerate() {
        let n = (i / nu) as i64 - 4;
        let got = inverse_zak_transform(&psi, n, g.u(i % nu)).unwrap();
        worst = worst.max((got - want).norm());
    }
    assert!(worst < 1e-12, "roundtrip error {worst:e}");
    let discrete: f64 = tab.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * tab.dx();
    assert!((psi.norm_sq() - discrete).abs() < 1e-12 * discrete);
}

/// `ρ̃_{ℓℓ'} = Σ_m ∫_{-α/2}^{α/2} ψ(x + αℓ + 2αm) ψ(x + αℓ' + 2αm) dx` for the
/// vacuum, from products of Gaussians.
fn vacuum_logical_oracle(alpha: f64, l: usize, lp: usize) -> f64 {
    (-30i32..=30)
        .map(|m| {
            let c1 = alpha * (l as f64 + 2.0 * m as f64);
            let c2 = alpha * (lp as f64 + 2.0 * m as f64);
            let mu = 0.5 * (c1 + c2);
            let weight = (-(c1 * c1 + c2 * c2) / 2.0 + mu * mu).exp();
            0.5 * weight * (erf(alpha / 2.0 + mu) - erf(-alpha / 2.0 + mu))
        })
        .sum()
}

fn vacuum_logical(n: usize) -> [[Complex64; 2]; 2] {
    let code = GKPCode::square();
    let psi = transform(&PositionStateDescriptor::vacuum(), &square_grid(n));
    let q = gauge_trace(&to_ssd_mixture(&code, &Mixture::pure(PureState::Grid(psi))).unwrap()).unwrap();
    q.rho.map(|row| row.map(|z| z * q.raw_trace))
}

#[test]
fn vacuum_logical_against_position_oracle() {
    let alpha = PI.sqrt();
    let (p0, p1, off) = (
        vacuum_logical_oracle(alpha, 0, 0),
        vacuum_logical_oracle(alpha, 1, 1),
        vacuum_logical_oracle(alpha, 0, 1),
    );
    assert!((p0 + p1 - 1.0).abs() < 1e-12);
    assert!((p0 - 0.790_078_546_662_153_4).abs() < 1e-10);
    assert!((off - 0.227_969_063_882_998_1).abs() < 1e-10);

    let coarse = vacuum_logical(256);
    let fine = vacuum_logical(512);
    assert!(fine[0][0].re > fine[1][1].re && fine[0][1].re > 0.0);
    assert!(fine[0][1].im.abs() < 1e-15);
    // Diagonal: second-order quadrature error. Off-diagonal: first order,
    // since the integrand is not periodic over the half patch.
    let (e_coarse, e_fine) = (coarse[0][0].re - p0, fine[0][0].re - p0);
    assert!((e_coarse / e_fine - 4.0).abs() < 0.05, "{e_coarse:e} {e_fine:e}");
    assert!(((4.0 * fine[0][0].re - coarse[0][0].re) / 3.0 - p0).abs() < 1e-9);
    let (e_coarse, e_fine) = (coarse[0][1].re - off, fine[0][1].re - off);
    assert!((e_coarse / e_fine - 2.0).abs() < 0.01, "{e_coarse:e} {e_fine:e}");
    assert!((2.0 * fine[0][1].re - coarse[0][1].re - off).abs() < 1e-8);
}

#[test]
fn vacuum_logical_golden_at_512() {
    let rho = vacuum_logical(512);
    assert!((rho[0][0].re - 0.790_074_924_350_966_3).abs() < 1e-12);
    assert!((rho[1][1].re - 0.209_925_075_649_033_7).abs() < 1e-12);
    assert!((rho[0][1].re - 0.228_782_609_902_173_1).abs() < 1e-12);
}

/// Exact `⟨û⟩` of the vacuum on `[-a/4, 3a/4)`: position mass binned by
/// the patch translates, each bin shifted back by `a m`.
fn vacuum_u_expectation(a: f64) -> f64 {
    let density_moment = |lo: f64, hi: f64| ((-lo * lo).exp() - (-hi * hi).exp()) / (2.0 * PI.sqrt());
    let mass = |lo: f64, hi: f64| 0.5 * (erf(hi) - erf(lo));
    (-20i32..=20)
        .map(|m| {
            let shift = a * m as f64;
            let (lo, hi) = (-a / 4.0 + shift, 3.0 * a / 4.0 + shift);
            density_moment(lo, hi) - shift * mass(lo, hi)
        })
        .sum()
}

#[test]
fn vacuum_modular_expectations_converge_to_oracle() {
    let a = 2.0 * PI.sqrt();
    let want_u = vacuum_u_expectation(a);
    // Wrapped tail of the vacuum pulls ⟨û⟩ away from zero on this patch.
    assert!(want_u > 0.3);
    let [(u0, _), (u1, v1), (u2, v2)] = [128, 256, 512]
        .map(|n| modular_expectations(&transform(&PositionStateDescriptor::vacuum(), &square_grid(n))).unwrap());
    assert!(((u1 - want_u) / (u2 - want_u) - 2.0).abs() < 0.01, "{u1} {u2} {want_u}");
    // Two Richardson levels remove the O(du) and O(du²) terms.
    let (r1, r2) = (2.0 * u1 - u0, 2.0 * u2 - u1);
    assert!(((4.0 * r2 - r1) / 3.0 - want_u).abs() < 1e-7, "{r1} {r2} {want_u}");
    assert!((v1 / v2 - 2.0).abs() < 1e-6 && (2.0 * v2 - v1).abs() < 1e-12);
}

#[test]
fn u_translation_shifts_expectation_of_concentrated_state() {
    let code = GKPCode::square();
    let g = square_grid(256);
    let psi = transform(&zak_gkp::gkp::approx_codeword(&code, 0, 0.1).unwrap(), &g).normalized().unwrap();
    let (u0, v0) = modular_expectations(&psi).unwrap();
    for steps in [1, 5, -3] {
        let t = steps as f64 * g.du();
        let (u1, v1) = modular_expectations(&apply_X(&psi, t).unwrap()).unwrap();
        assert!((u1 - u0 - t).abs() < 1e-6 && (v1 - v0).abs() < 1e-12);
    }
}

#[test]
fn uniform_density_has_midpoint_expectation() {
    let g = square_grid(256);
    let flat = ModularWavefunction::from_fn(g, |_, _| Complex64::new(1.0, 0.0)).normalized().unwrap();
    let (u, v) = modular_expectations(&flat).unwrap();
    // Left-Riemann nodes average to the midpoint minus half a cell.
    assert!((u - (g.patch().a() / 4.0 - g.du() / 2.0)).abs() < 1e-12);
    assert!((v + g.dv() / 2.0).abs() < 1e-12);
}

#[test]
fn stretched_squeezing_relation() {
    let g = square_grid(64);
    let a = g.patch().a();
    let mut r = rng(22);
    for b in [0.5 * a, 2.0 * a, 3.7] {
        let psi = apply_Z(&random_state(g, &mut r), 5.0 * g.dv()).unwrap();
        let stretched = stretch_rescale(&psi, b).unwrap();
        assert_eq!(*stretched.grid().patch(), ZakPatch::with_origin(a, b, -a / 4.0, -PI / b).unwrap());
        let (u0, v0) = modular_expectations(&psi).unwrap();
        let (u1, v1) = modular_expectations(&stretched).unwrap();
        assert!((u1 - u0).abs() < 1e-12);
        assert!((v1 - a / b * v0).abs() < 1e-12, "b = {b}: {v1} vs {}", a / b * v0);
    }
}

#[test]
fn truncation_bound_is_reported() {
    let g = square_grid(64);
    let z = zak_transform(&PositionStateDescriptor::vacuum(), &g, 16).unwrap();
    assert!(z.tail_bound <= 1e-12 && z.m_max == 16);
}
