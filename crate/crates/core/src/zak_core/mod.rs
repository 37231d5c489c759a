//! Zak patches, sampled modular wavefunctions and the Zak transform.
//!
//! A modular wavefunction `ψ(u, v) = ⟨u, v|ψ⟩` lives on a rectangular patch
//! with horizontal period `a` and vertical period `2π/b` (`b = a` for the
//! standard patch of area 2π). Outside the patch it is fixed by
//!
//! ```text
//! ψ(u + a, v)     = exp(i b v) ψ(u, v)
//! ψ(u, v + 2π/b)  = ψ(u, v)
//! ```
//!
//! Grids sample the patch at the left corners of half-open cells, so the
//! sample set matches the half-open patch exactly and quadrature is a left
//! Riemann sum.

mod ideal;
pub mod io;
mod position;
mod transform;

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{require_positive, Result, ZakError};
use crate::modular_arith::{canonicalize_general, CanonicalZakPoint};

pub use ideal::{ideal_state_overlap, IdealZakState, RawZakKets, ZakPoint};
pub use position::{GaussianComb, PositionStateDescriptor, TabulatedState};
pub use transform::{
    inverse_zak_transform, required_m_max, zak_transform, zak_transform_with_tolerance,
    ZakTransform, DEFAULT_TAIL_TOLERANCE,
};

/// Relative distance (in cells) within which a coordinate counts as a grid node.
const NODE_TOLERANCE: f64 = 1e-8;

/// Rectangular fundamental domain `[u_min, u_min + a) × [v_min, v_min + 2π/b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZakPatch {
    a: f64,
    b: f64,
    u_min: f64,
    v_min: f64,
}

impl ZakPatch {
    /// Standard patch `[-a/4, 3a/4) × [-π/a, π/a)`.
    pub fn standard(a: f64) -> Result<Self> {
        Self::stretched(a, a)
    }

    /// Stretched patch `[-a/4, 3a/4) × [-π/b, π/b)`.
    pub fn stretched(a: f64, b: f64) -> Result<Self> {
        require_positive("a", a)?;
        require_positive("b", b)?;
        Ok(Self {
            a,
            b,
            u_min: -a / 4.0,
            v_min: -PI / b,
        })
    }

    pub fn with_origin(a: f64, b: f64, u_min: f64, v_min: f64) -> Result<Self> {
        require_positive("a", a)?;
        require_positive("b", b)?;
        if !(u_min.is_finite() && v_min.is_finite()) {
            return Err(ZakError::InvalidArgument("patch origin must be finite".into()));
        }
        Ok(Self { a, b, u_min, v_min })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn u_min(&self) -> f64 {
        self.u_min
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    /// Vertical period `2π/b`.
    pub fn height(&self) -> f64 {
        2.0 * PI / self.b
    }

    pub fn area(&self) -> f64 {
        self.a * self.height()
    }

    pub fn is_standard(&self) -> bool {
        self.a == self.b
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u < self.u_min + self.a && v >= self.v_min && v < self.v_min + self.height()
    }

    /// Reduces the ket `|x, y⟩` into this patch, returning the ket phase.
    pub fn canonicalize(&self, x: f64, y: f64) -> CanonicalZakPoint {
        canonicalize_general(x, y, self.a, self.b, -self.u_min, -self.v_min)
            .expect("patch periods are validated on construction")
    }
}

/// Uniform sampling of a patch with `nu × nv` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZakGrid {
    patch: ZakPatch,
    nu: usize,
    nv: usize,
}

impl ZakGrid {
    /// `nu` must be divisible by 4 and `nv` even, which makes `(0, 0)` and
    /// `(a/2, 0)` nodes of a standard patch.
    pub fn new(patch: ZakPatch, nu: usize, nv: usize) -> Result<Self> {
        if nu == 0 || !nu.is_multiple_of(4) {
            return Err(ZakError::InvalidArgument(format!(
                "Nu must be a positive multiple of 4, got {nu}"
            )));
        }
        Self::with_even_counts(patch, nu, nv)
    }

    /// Grid on a half-width sub-patch, where only evenness is required.
    pub(crate) fn with_even_counts(patch: ZakPatch, nu: usize, nv: usize) -> Result<Self> {
        if nu == 0 || !nu.is_multiple_of(2) {
            return Err(ZakError::InvalidArgument(format!(
                "Nu must be a positive even number, got {nu}"
            )));
        }
        if nv == 0 || !nv.is_multiple_of(2) {
            return Err(ZakError::InvalidArgument(format!(
                "Nv must be a positive even number, got {nv}"
            )));
        }
        Ok(Self { patch, nu, nv })
    }

    pub fn standard(a: f64, nu: usize, nv: usize) -> Result<Self> {
        Self::new(ZakPatch::standard(a)?, nu, nv)
    }

    pub fn patch(&self) -> &ZakPatch {
        &self.patch
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn du(&self) -> f64 {
        self.patch.a / self.nu as f64
    }

    pub fn dv(&self) -> f64 {
        self.patch.height() / self.nv as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.du() * self.dv()
    }

    pub fn u(&self, j: usize) -> f64 {
        self.patch.u_min + j as f64 * self.du()
    }

    pub fn v(&self, k: usize) -> f64 {
        self.patch.v_min + k as f64 * self.dv()
    }

    /// Index of `u` on the (unwrapped) u lattice; errors off-node.
    pub fn u_node(&self, u: f64) -> Result<i64> {
        locate('u', u, self.patch.u_min, self.du())
    }

    /// Index of `v` on the (unwrapped) v lattice; errors off-node.
    pub fn v_node(&self, v: f64) -> Result<i64> {
        locate('v', v, self.patch.v_min, self.dv())
    }

    /// Number of u cells spanned by `t`; errors unless `t` is a multiple of `du`.
    pub fn u_steps(&self, t: f64) -> Result<i64> {
        locate('u', t, 0.0, self.du())
    }

    /// Number of v cells spanned by `t`; errors unless `t` is a multiple of `dv`.
    pub fn v_steps(&self, t: f64) -> Result<i64> {
        locate('v', t, 0.0, self.dv())
    }
}

fn locate(axis: char, value: f64, origin: f64, step: f64) -> Result<i64> {
    let idx = (value - origin) / step;
    let nearest = idx.round();
    let offset = idx - nearest;
    if !idx.is_finite() || offset.abs() > NODE_TOLERANCE * nearest.abs().max(1.0) {
        return Err(ZakError::OffGrid {
            axis,
            value,
            nearest: nearest as i64,
            offset,
        });
    }
    Ok(nearest as i64)
}

/// Samples of a modular wavefunction on a [`ZakGrid`], indexed `[j, k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularWavefunction {
    grid: ZakGrid,
    samples: Array2<Complex64>,
}

/// Result of evaluating a modular wavefunction at an arbitrary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedValue {
    pub value: Complex64,
    /// Set when the reduced point was not a node and bilinear interpolation was used.
    pub interpolated: bool,
}

impl ModularWavefunction {
    pub fn new(grid: ZakGrid, samples: Array2<Complex64>) -> Result<Self> {
        if samples.dim() != (grid.nu, grid.nv) {
            return Err(ZakError::GridMismatch(format!(
                "sample array {:?} does not match grid {}x{}",
                samples.dim(),
                grid.nu,
                grid.nv
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: ZakGrid) -> Self {
        Self {
            grid,
            samples: Array2::zeros((grid.nu, grid.nv)),
        }
    }

    /// Fills the grid from a function of the node coordinates `(u, v)`.
    pub fn from_fn(grid: ZakGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let samples = Array2::from_shape_fn((grid.nu, grid.nv), |(j, k)| f(grid.u(j), grid.v(k)));
        Self { grid, samples }
    }

    pub fn grid(&self) -> &ZakGrid {
        &self.grid
    }

    pub fn samples(&self) -> &Array2<Complex64> {
        &self.samples
    }

    pub fn into_samples(self) -> Array2<Complex64> {
        self.samples
    }

    pub fn sample(&self, j: usize, k: usize) -> Complex64 {
        self.samples[[j, k]]
    }

    /// `Σ |ψ|² du dv`.
    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.mapv(|z| z * factor),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(ZakError::Unnormalized { norm_sq: n });
        }
        Ok(self.scaled(Complex64::new(n.sqrt().recip(), 0.0)))
    }

    /// Sample at an unwrapped lattice index, continued by quasi-periodicity.
    pub fn sample_extended(&self, j: i64, k: i64) -> Complex64 {
        let (nu, nv) = (self.grid.nu as i64, self.grid.nv as i64);
        let (jj, wraps) = (j.rem_euclid(nu), j.div_euclid(nu));
        let kk = k.rem_euclid(nv) as usize;
        let s = self.samples[[jj as usize, kk]];
        if wraps == 0 {
            s
        } else {
            let v = self.grid.v(kk);
            s * Complex64::from_polar(1.0, self.grid.patch.b * wraps as f64 * v)
        }
    }

    /// `ψ(x, y)` for unrestricted `(x, y)`: the point is reduced into the
    /// patch and the stored sample is multiplied by `exp(+i b n v)`. Off-node
    /// points fall back to bilinear interpolation, which is flagged.
    pub fn evaluate_extended(&self, x: f64, y: f64) -> ExtendedValue {
        let p = self.grid.patch.canonicalize(x, y);
        let ext = p.phase.conj();
        match (self.grid.u_node(p.u), self.grid.v_node(p.v)) {
            (Ok(j), Ok(k)) => ExtendedValue {
                value: self.sample_extended(j, k) * ext,
                interpolated: false,
            },
            _ => {
                let fu = (p.u - self.grid.patch.u_min) / self.grid.du();
                let fv = (p.v - self.grid.patch.v_min) / self.grid.dv();
                let (j0, k0) = (fu.floor(), fv.floor());
                let (tu, tv) = (fu - j0, fv - k0);
                let (j0, k0) = (j0 as i64, k0 as i64);
                let value = self.sample_extended(j0, k0) * ((1.0 - tu) * (1.0 - tv))
                    + self.sample_extended(j0 + 1, k0) * (tu * (1.0 - tv))
                    + self.sample_extended(j0, k0 + 1) * ((1.0 - tu) * tv)
                    + self.sample_extended(j0 + 1, k0 + 1) * (tu * tv);
                ExtendedValue {
                    value: value * ext,
                    interpolated: true,
                }
            }
        }
    }

    /// Like [`evaluate_extended`](Self::evaluate_extended) but refuses to
    /// interpolate.
    pub fn evaluate_on_grid(&self, x: f64, y: f64) -> Result<Complex64> {
        let p = self.grid.patch.canonicalize(x, y);
        let j = self.grid.u_node(p.u)?;
        let k = self.grid.v_node(p.v)?;
        Ok(self.sample_extended(j, k) * p.phase.conj())
    }

    pub(crate) fn map_indexed(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let mut out = self.samples.clone();
        for ((j, k), z) in out.indexed_iter_mut() {
            *z = f(j, k, *z);
        }
        Self {
            grid: self.grid,
            samples: out,
        }
    }
}

/// `⟨φ|ψ⟩ ≈ Σ conj(φ) ψ du dv`.
pub fn inner_product(phi: &ModularWavefunction, psi: &ModularWavefunction) -> Result<Complex64> {
    if phi.grid != psi.grid {
        return Err(ZakError::GridMismatch(
            "inner product of wavefunctions on different grids".into(),
        ));
    }
    let sum: Complex64 = phi
        .samples
        .iter()
        .zip(psi.samples.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * phi.grid.cell_area())
}

/// Re-expresses a standard-patch wavefunction in the stretched basis with
/// vertical parameter `b`: `ψ_S(u, v) = sqrt(b/a) ψ(u, (b/a) v)`.
///
/// The stretched v nodes map one-to-one onto the original ones, so no
/// resampling is involved.
pub fn stretch_rescale(psi: &ModularWavefunction, b: f64) -> Result<ModularWavefunction> {
    require_positive("b", b)?;
    let patch = psi.grid.patch;
    if !patch.is_standard() {
        return Err(ZakError::GridMismatch(
            "stretch_rescale expects a wavefunction on a standard patch".into(),
        ));
    }
    let a = patch.a;
    let stretched = ZakPatch::with_origin(a, b, patch.u_min, patch.v_min * a / b)?;
    let grid = ZakGrid {
        patch: stretched,
        ..psi.grid
    };
    let factor = (b / a).sqrt();
    Ok(ModularWavefunction {
        grid,
        samples: psi.samples.mapv(|z| z * factor),
    })
}

/// Ordering conventions for building Zak kets from the comb state `|0,0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `X(u) Z(v) |0,0⟩`, the convention used throughout this crate.
    MomentumFirst,
    /// `Z(v) X(u) |0,0⟩`.
    Opposite,
    /// `exp(i(v q̂ - u p̂)) |0,0⟩`.
    Symmetric,
}

/// Overlap `⟨u,v|u,v⟩_conv` between the crate's Zak ket and the ket of
/// another ordering convention.
pub fn convention_phase(u: f64, v: f64, convention: Convention) -> Complex64 {
    match convention {
        Convention::MomentumFirst => Complex64::new(1.0, 0.0),
        Convention::Opposite => Complex64::from_polar(1.0, -u * v),
        Convention::Symmetric => Complex64::from_polar(1.0, -u * v / 2.0),
    }
}
