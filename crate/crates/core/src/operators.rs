//! Modular phase and translation operators and the quadrature shifts built
//! from them.
//!
//! ```text
//! P^U(t)|u,v⟩ = e^{iut}|u,v⟩        T^U(t)|u,v⟩ = |u+t, v⟩
//! P^V(t)|u,v⟩ = e^{ivt}|u,v⟩        T^V(t)|u,v⟩ = |u, v+t⟩
//! X(t) = T^U(t)                     Z(t) = P^U(t) T^V(t)
//! ```
//!
//! Products are read right to left. On grid states the translations are
//! exact cyclic index shifts; the whole-period part of a u-shift becomes the
//! phase `exp(i b q v)` evaluated in closed form, so `T^U(a) = P^V(-a)` and
//! `T^V(2π/b) = 1` hold to rounding. Translations by non-multiples of the
//! grid step are rejected unless the bilinear variants are used.
//!
//! The phase/translation pairs obey `P^U(s)T^U(t) = e^{ist}T^U(t)P^U(s)`
//! only up to the wrap factor `exp(-i s [u+t]_a)` (trivial when `s ∈ (2π/a)ℤ`)
//! and `P^V(s)T^V(t) = e^{ist}T^V(t)P^V(s)` only for `s ∈ bℤ`; the Weyl
//! relation `Z(s)X(t) = e^{ist}X(t)Z(s)` is exact.

use num_complex::Complex64;

use crate::error::{Result, ZakError};
use crate::zak_core::{IdealZakState, ModularWavefunction};

/// States on which the four modular operators act.
pub trait ModularOps: Sized {
    fn phase_u(&self, t: f64) -> Self;
    fn phase_v(&self, t: f64) -> Self;
    fn translate_u(&self, t: f64) -> Result<Self>;
    fn translate_v(&self, t: f64) -> Result<Self>;
}

impl ModularOps for ModularWavefunction {
    fn phase_u(&self, t: f64) -> Self {
        let g = *self.grid();
        self.map_indexed(|j, _, z| z * Complex64::from_polar(1.0, g.u(j) * t))
    }

    fn phase_v(&self, t: f64) -> Self {
        let g = *self.grid();
        self.map_indexed(|_, k, z| z * Complex64::from_polar(1.0, g.v(k) * t))
    }

    /// `(T^U(t)ψ)(u, v) = ψ(u - t, v)`, continued quasi-periodically.
    fn translate_u(&self, t: f64) -> Result<Self> {
        let s = self.grid().u_steps(t)?;
        Ok(self.map_indexed(|j, k, _| self.sample_extended(j as i64 - s, k as i64)))
    }

    /// `(T^V(t)ψ)(u, v) = ψ(u, v - t)`.
    fn translate_v(&self, t: f64) -> Result<Self> {
        let s = self.grid().v_steps(t)?;
        Ok(self.map_indexed(|j, k, _| self.sample_extended(j as i64, k as i64 - s)))
    }
}

impl ModularOps for IdealZakState {
    fn phase_u(&self, t: f64) -> Self {
        self.map_points(|p| (p.u, p.v, p.weight * Complex64::from_polar(1.0, p.u * t)))
    }

    fn phase_v(&self, t: f64) -> Self {
        self.map_points(|p| (p.u, p.v, p.weight * Complex64::from_polar(1.0, p.v * t)))
    }

    fn translate_u(&self, t: f64) -> Result<Self> {
        Ok(self.map_points(|p| (p.u + t, p.v, p.weight)))
    }

    fn translate_v(&self, t: f64) -> Result<Self> {
        Ok(self.map_points(|p| (p.u, p.v + t, p.weight)))
    }
}

pub fn apply_phase_u<S: ModularOps>(psi: &S, t: f64) -> S {
    psi.phase_u(t)
}

pub fn apply_phase_v<S: ModularOps>(psi: &S, t: f64) -> S {
    psi.phase_v(t)
}

pub fn apply_translate_u<S: ModularOps>(psi: &S, t: f64) -> Result<S> {
    psi.translate_u(t)
}

pub fn apply_translate_v<S: ModularOps>(psi: &S, t: f64) -> Result<S> {
    psi.translate_v(t)
}

/// `X(t) = T^U(t)`.
#[allow(non_snake_case)]
pub fn apply_X<S: ModularOps>(psi: &S, t: f64) -> Result<S> {
    psi.translate_u(t)
}

/// `Z(t) = P^U(t) T^V(t)`.
#[allow(non_snake_case)]
pub fn apply_Z<S: ModularOps>(psi: &S, t: f64) -> Result<S> {
    Ok(psi.translate_v(t)?.phase_u(t))
}

/// `(Z(t)ψ)(u, v) = e^{iut} ψ(u, v - t)` evaluated in one pass.
#[allow(non_snake_case)]
pub fn apply_Z_direct(psi: &ModularWavefunction, t: f64) -> Result<ModularWavefunction> {
    let g = *psi.grid();
    let s = g.v_steps(t)?;
    Ok(psi.map_indexed(|j, k, _| {
        Complex64::from_polar(1.0, g.u(j) * t) * psi.sample_extended(j as i64, k as i64 - s)
    }))
}

/// `T^U(t)` for arbitrary real `t` via bilinear interpolation. The flag
/// reports whether any sample needed interpolation.
pub fn translate_u_interpolated(psi: &ModularWavefunction, t: f64) -> (ModularWavefunction, bool) {
    translate_interpolated(psi, t, 0.0)
}

/// `T^V(t)` for arbitrary real `t` via bilinear interpolation.
pub fn translate_v_interpolated(psi: &ModularWavefunction, t: f64) -> (ModularWavefunction, bool) {
    translate_interpolated(psi, 0.0, t)
}

fn translate_interpolated(psi: &ModularWavefunction, tu: f64, tv: f64) -> (ModularWavefunction, bool) {
    let g = *psi.grid();
    let mut any = false;
    let mut out = ModularWavefunction::zeros(g).into_samples();
    for ((j, k), z) in out.indexed_iter_mut() {
        let e = psi.evaluate_extended(g.u(j) - tu, g.v(k) - tv);
        any |= e.interpolated;
        *z = e.value;
    }
    (ModularWavefunction::new(g, out).expect("shape matches grid"), any)
}

/// Translation in u on a stretched patch; the wrap phase is `e^{-ibv}` per period.
pub fn stretched_translate_u<S: ModularOps>(psi: &S, t: f64) -> Result<S> {
    psi.translate_u(t)
}

/// Translation in v on a stretched patch, periodic with period `2π/b`.
pub fn stretched_translate_v<S: ModularOps>(psi: &S, t: f64) -> Result<S> {
    psi.translate_v(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModularOperatorKind {
    PhaseU,
    PhaseV,
    TranslateU,
    TranslateV,
}

/// One of `P^U(t)`, `P^V(t)`, `T^U(t)`, `T^V(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularOperator {
    pub kind: ModularOperatorKind,
    pub t: f64,
}

impl ModularOperator {
    pub fn apply<S: ModularOps>(&self, psi: &S) -> Result<S> {
        match self.kind {
            ModularOperatorKind::PhaseU => Ok(psi.phase_u(self.t)),
            ModularOperatorKind::PhaseV => Ok(psi.phase_v(self.t)),
            ModularOperatorKind::TranslateU => psi.translate_u(self.t),
            ModularOperatorKind::TranslateV => psi.translate_v(self.t),
        }
    }
}

/// Applies `ops[0] ops[1] … ops[n-1]` to `psi` (rightmost first).
pub fn apply_product<S: ModularOps + Clone>(ops: &[ModularOperator], psi: &S) -> Result<S> {
    ops.iter().rev().try_fold(psi.clone(), |acc, op| op.apply(&acc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    X,
    Z,
}

/// `X(t) = e^{-i p̂ t}` or `Z(t) = e^{i q̂ t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureShift {
    pub kind: QuadratureKind,
    pub t: f64,
}

impl QuadratureShift {
    pub fn apply<S: ModularOps>(&self, psi: &S) -> Result<S> {
        match self.kind {
            QuadratureKind::X => apply_X(psi, self.t),
            QuadratureKind::Z => apply_Z(psi, self.t),
        }
    }
}

/// `(⟨û⟩, ⟨v̂⟩)` by left-Riemann quadrature over the patch. Requires
/// `|‖ψ‖² - 1| ≤ 1e-6`.
pub fn modular_expectations(psi: &ModularWavefunction) -> Result<(f64, f64)> {
    let norm = psi.norm_sq();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(ZakError::Unnormalized { norm_sq: norm });
    }
    let g = psi.grid();
    let (mut eu, mut ev) = (0.0, 0.0);
    for ((j, k), z) in psi.samples().indexed_iter() {
        let w = z.norm_sqr();
        eu += g.u(j) * w;
        ev += g.v(k) * w;
    }
    Ok((eu * g.cell_area(), ev * g.cell_area()))
}
