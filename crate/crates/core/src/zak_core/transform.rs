use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use super::{ModularWavefunction, PositionStateDescriptor, ZakGrid, ZakPatch};
use crate::error::{Result, ZakError};

/// Default bound on the relative mass missed by the truncated comb sum.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Largest `M_max` considered by [`required_m_max`].
const M_MAX_SEARCH_LIMIT: usize = 1 << 16;

/// A sampled Zak transform together with its truncation certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakTransform {
    pub wavefunction: ModularWavefunction,
    /// Relative `|ψ_x|²` mass outside the summation window.
    pub tail_bound: f64,
    pub m_max: usize,
}

/// Relative mass of `ψ_x` outside `[u_min - a·M, u_min + a·(M+1))`, the
/// range covered by the comb sum.
fn tail_fraction(desc: &PositionStateDescriptor, patch: &ZakPatch, m_max: usize) -> f64 {
    let m = m_max as f64;
    let lo = patch.u_min() - patch.a() * m;
    let hi = patch.u_min() + patch.a() * (m + 1.0);
    desc.mass_outside(lo, hi) / desc.norm_sq()
}

/// Smallest `M_max` whose truncation tail is below `tolerance`.
pub fn required_m_max(desc: &PositionStateDescriptor, patch: &ZakPatch, tolerance: f64) -> Result<usize> {
    (0..=M_MAX_SEARCH_LIMIT)
        .find(|&m| tail_fraction(desc, patch, m) <= tolerance)
        .ok_or(ZakError::Truncation {
            tail: tail_fraction(desc, patch, M_MAX_SEARCH_LIMIT),
            tolerance,
        })
}

/// Zak transform with the default truncation tolerance.
pub fn zak_transform(desc: &PositionStateDescriptor, grid: &ZakGrid, m_max: usize) -> Result<ZakTransform> {
    zak_transform_with_tolerance(desc, grid, m_max, DEFAULT_TAIL_TOLERANCE)
}

/// Samples
///
/// ```text
/// ψ(u_j, v_k) = sqrt(b/2π) Σ_{m=-M}^{M} exp(-i b m v_k) ψ_x(u_j + a m)
/// ```
///
/// on `grid`. Errors with [`ZakError::Truncation`] when the mass of `ψ_x`
/// outside the summation window exceeds `tolerance` relative to its norm.
pub fn zak_transform_with_tolerance(
    desc: &PositionStateDescriptor,
    grid: &ZakGrid,
    m_max: usize,
    tolerance: f64,
) -> Result<ZakTransform> {
    let patch = grid.patch();
    let norm = desc.norm_sq();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(ZakError::Unnormalized { norm_sq: norm });
    }
    let tail = tail_fraction(desc, patch, m_max);
    if tail > tolerance {
        return Err(ZakError::Truncation { tail, tolerance });
    }

    let (a, b) = (patch.a(), patch.b());
    let ms: Vec<i64> = (-(m_max as i64)..=m_max as i64).collect();
    let position = Array2::from_shape_fn((grid.nu(), ms.len()), |(j, i)| {
        desc.eval(grid.u(j) + a * ms[i] as f64)
    });
    let phases = Array2::from_shape_fn((ms.len(), grid.nv()), |(i, k)| {
        Complex64::from_polar(1.0, -b * ms[i] as f64 * grid.v(k))
    });
    let prefactor = (b / (2.0 * PI)).sqrt();
    let samples = position.dot(&phases).mapv(|z| z * prefactor);

    Ok(ZakTransform {
        wavefunction: ModularWavefunction::new(*grid, samples)?,
        tail_bound: tail,
        m_max,
    })
}

/// Recovers `ψ_x(u + a n) = sqrt(b/2π) ∫ dv exp(i b n v) ψ(u, v)` by a
/// Riemann sum along the grid column at `u`, which must be a node.
pub fn inverse_zak_transform(psi: &ModularWavefunction, n: i64, u: f64) -> Result<Complex64> {
    let grid = psi.grid();
    let j = grid.u_node(u)?;
    if !(0..grid.nu() as i64).contains(&j) {
        return Err(ZakError::InvalidArgument(format!(
            "u = {u} lies outside the patch [{}, {})",
            grid.patch().u_min(),
            grid.patch().u_min() + grid.patch().a()
        )));
    }
    let b = grid.patch().b();
    let line = psi.samples().row(j as usize);
    let sum: Complex64 = line
        .iter()
        .enumerate()
        .map(|(k, z)| z * Complex64::from_polar(1.0, b * n as f64 * grid.v(k)))
        .sum();
    Ok(sum * (b / (2.0 * PI)).sqrt() * grid.dv())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_grid(nu: usize, nv: usize) -> ZakGrid {
        ZakGrid::standard(2.0 * PI.sqrt(), nu, nv).unwrap()
    }

    #[test]
    fn vacuum_at_origin() {
        let g = standard_grid(64, 64);
        let z = zak_transform(&PositionStateDescriptor::vacuum(), &g, 16).unwrap();
        let psi = z.wavefunction.evaluate_on_grid(0.0, 0.0).unwrap();
        assert!((psi.re - 0.566_296_767_035_682_4).abs() < 1e-13);
        assert!(psi.im.abs() < 1e-15);
        assert!(z.tail_bound < 1e-12);
    }

    #[test]
    fn truncation_is_reported() {
        let g = standard_grid(16, 16);
        let err = zak_transform(&PositionStateDescriptor::displaced_vacuum(30.0), &g, 2).unwrap_err();
        assert!(matches!(err, ZakError::Truncation { tail, .. } if tail > 0.1));
        let m = required_m_max(&PositionStateDescriptor::displaced_vacuum(30.0), g.patch(), 1e-12).unwrap();
        assert!(zak_transform(&PositionStateDescriptor::displaced_vacuum(30.0), &g, m).is_ok());
        assert!(zak_transform(&PositionStateDescriptor::displaced_vacuum(30.0), &g, m - 1).is_err());
    }

    #[test]
    fn inverse_recovers_vacuum() {
        let g = standard_grid(32, 64);
        let z = zak_transform(&PositionStateDescriptor::vacuum(), &g, 16).unwrap();
        let x0 = inverse_zak_transform(&z.wavefunction, 0, 0.0).unwrap();
        assert!((x0.re - PI.powf(-0.25)).abs() < 1e-13, "{x0}");
        let x1 = inverse_zak_transform(&z.wavefunction, 1, 0.0).unwrap();
        assert!((x1.re - 0.001_402_683_938_611_262_6).abs() < 1e-14);
        assert!(inverse_zak_transform(&z.wavefunction, 0, 0.01).is_err());
    }

    #[test]
    fn stretched_transform_is_isometric() {
        let a = 2.0 * PI.sqrt();
        let g = ZakGrid::new(ZakPatch::stretched(a, 1.5 * a).unwrap(), 64, 64).unwrap();
        let z = zak_transform(&PositionStateDescriptor::displaced_vacuum(0.4), &g, 16).unwrap();
        assert!((z.wavefunction.norm_sq() - 1.0).abs() < 1e-10);
        let x = inverse_zak_transform(&z.wavefunction, -1, g.u(10)).unwrap();
        let expect = PI.powf(-0.25) * (-0.5 * (g.u(10) - a - 0.4).powi(2)).exp();
        assert!((x.re - expect).abs() < 1e-12 && x.im.abs() < 1e-12);
    }
}
