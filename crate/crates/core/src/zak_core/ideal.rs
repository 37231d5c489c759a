//! Finite superpositions of Zak kets, kept symbolically.

use num_complex::Complex64;

use super::{ModularWavefunction, ZakPatch};
use crate::error::{Result, ZakError};
use crate::modular_arith::frac_part;

/// Relative (to the patch size) distance below which two points coincide.
const MERGE_TOLERANCE: f64 = 1e-10;

/// One term `weight · |u, v⟩` of an ideal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZakPoint {
    pub u: f64,
    pub v: f64,
    pub weight: Complex64,
}

/// `Σ_p w_p |u_p, v_p⟩` with every `(u_p, v_p)` inside the patch and no two
/// points coinciding.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealZakState {
    patch: ZakPatch,
    points: Vec<ZakPoint>,
}

impl IdealZakState {
    pub fn empty(patch: ZakPatch) -> Self {
        Self {
            patch,
            points: Vec::new(),
        }
    }

    /// Builds a state from unrestricted kets `w |x, y⟩`, canonicalizing each.
    pub fn from_kets(patch: ZakPatch, kets: impl IntoIterator<Item = (f64, f64, Complex64)>) -> Self {
        let mut s = Self::empty(patch);
        for (x, y, w) in kets {
            s.add(x, y, w);
        }
        s
    }

    /// Single ket `|x, y⟩` with unit weight.
    pub fn point(patch: ZakPatch, x: f64, y: f64) -> Self {
        Self::from_kets(patch, [(x, y, Complex64::new(1.0, 0.0))])
    }

    pub fn patch(&self) -> &ZakPatch {
        &self.patch
    }

    pub fn points(&self) -> &[ZakPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn tolerance(&self) -> f64 {
        MERGE_TOLERANCE * self.patch.a().max(self.patch.height())
    }

    /// Adds `w |x, y⟩` after reduction into the patch.
    pub fn add(&mut self, x: f64, y: f64, w: Complex64) {
        let tol = self.tolerance();
        let c = self.patch.canonicalize(x, y);
        let (mut u, mut v, mut w) = (c.u, c.v, w * c.phase);
        // Points rounding onto the open edges are identified with the closed ones.
        if u > self.patch.u_min() + self.patch.a() - tol {
            u -= self.patch.a();
            w *= Complex64::from_polar(1.0, -self.patch.b() * v);
        }
        if v > self.patch.v_min() + self.patch.height() - tol {
            v -= self.patch.height();
        }
        match self
            .points
            .iter_mut()
            .find(|p| (p.u - u).abs() <= tol && (p.v - v).abs() <= tol)
        {
            Some(p) => p.weight += w,
            None => self.points.push(ZakPoint { u, v, weight: w }),
        }
    }

    /// Weight of the ket at `(x, y)` after canonicalization, zero if absent.
    pub fn weight_at(&self, x: f64, y: f64) -> Complex64 {
        let probe = Self::point(self.patch, x, y);
        let q = probe.points[0];
        let tol = self.tolerance();
        self.points
            .iter()
            .find(|p| (p.u - q.u).abs() <= tol && (p.v - q.v).abs() <= tol)
            .map_or(Complex64::new(0.0, 0.0), |p| p.weight * q.weight.conj())
    }

    /// `Σ |w|²`, the Dirac-comb norm proxy.
    pub fn norm_sq(&self) -> f64 {
        self.points.iter().map(|p| p.weight.norm_sqr()).sum()
    }

    /// Delta pairing `Σ conj(w_p) w'_p` over coinciding points.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.patch != other.patch {
            return Err(ZakError::GridMismatch("ideal states on different patches".into()));
        }
        Ok(self
            .points
            .iter()
            .map(|p| p.weight.conj() * other.weight_at(p.u, p.v))
            .sum())
    }

    /// Rebuilds the state from transformed points; coordinates may leave the
    /// patch and are canonicalized again.
    pub fn map_points(&self, f: impl Fn(&ZakPoint) -> (f64, f64, Complex64)) -> Self {
        Self::from_kets(self.patch, self.points.iter().map(f))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            patch: self.patch,
            points: self
                .points
                .iter()
                .map(|p| ZakPoint {
                    weight: p.weight * factor,
                    ..*p
                })
                .collect(),
        }
    }

    /// `self + other` as a superposition.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.patch != other.patch {
            return Err(ZakError::GridMismatch("ideal states on different patches".into()));
        }
        let mut s = self.clone();
        for p in &other.points {
            s.add(p.u, p.v, p.weight);
        }
        Ok(s)
    }
}

/// Zak kets `|x, y⟩` with coordinates kept as given.
#[derive(Debug, Clone, PartialEq)]
pub struct RawZakKets {
    pub patch: ZakPatch,
    pub kets: Vec<(f64, f64, Complex64)>,
}

impl RawZakKets {
    /// `P^U(t)|x, y⟩ = exp(i t {x}_a) |x, y⟩`.
    pub fn apply_phase_u_unrestricted(&self, t: f64) -> Self {
        let (a, c) = (self.patch.a(), -self.patch.u_min());
        let kets = self
            .kets
            .iter()
            .map(|&(x, y, w)| {
                let u = frac_part(x, a, c).expect("patch period is positive");
                (x, y, w * Complex64::from_polar(1.0, t * u))
            })
            .collect();
        Self {
            patch: self.patch,
            kets,
        }
    }

    pub fn canonicalize(&self) -> IdealZakState {
        IdealZakState::from_kets(self.patch, self.kets.iter().copied())
    }
}

/// `Σ_p conj(w_p) ψ(u_p, v_p)` with delta pairing (no area element).
pub fn ideal_state_overlap(s: &IdealZakState, psi: &ModularWavefunction) -> Result<Complex64> {
    if s.patch() != psi.grid().patch() {
        return Err(ZakError::GridMismatch(
            "ideal state and wavefunction live on different patches".into(),
        ));
    }
    s.points()
        .iter()
        .map(|p| Ok(p.weight.conj() * psi.evaluate_on_grid(p.u, p.v)?))
        .sum()
}
