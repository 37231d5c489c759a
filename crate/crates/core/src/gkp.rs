//! GKP codes in the Zak representation.
//!
//! A code with half-spacing `α` and logical dimension `K` lives on the
//! standard patch with `a = Kα`; its codewords are the single Zak kets
//! `|(a/K)ℓ, 0⟩` and its stabilizers are `P^V(-a)` and `P^U(2πK/a)`.
//! For the qubit code (`K = 2`) the correctable patch is
//! `P_G = [-α/2, α/2) × [-π/2α, π/2α)`, the left half of the full patch, and
//! the logical density matrix is
//!
//! ```text
//! ρ̃_{ℓℓ'} = ∫_{P_G} dũ dṽ ψ(ũ+αℓ, ṽ) conj(ψ(ũ+αℓ', ṽ))
//! ```
//!
//! with the error-corrected variant carrying the extra factor
//! `exp(-iα(ℓ-ℓ')ṽ)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_positive, Result, ZakError};
use crate::modular_arith::frac_part;
use crate::operators::ModularOps;
use crate::zak_core::{GaussianComb, IdealZakState, ModularWavefunction, PositionStateDescriptor, ZakGrid, ZakPatch};

type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Raw traces at or below this value are treated as no support on `P_G`.
const DEGENERATE_TRACE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GKPCode {
    alpha: f64,
    k: usize,
}

impl GKPCode {
    pub fn new(alpha: f64, k: usize) -> Result<Self> {
        require_positive("alpha", alpha)?;
        if k < 2 {
            return Err(ZakError::InvalidArgument(format!("logical dimension must be at least 2, got {k}")));
        }
        Ok(Self { alpha, k })
    }

    pub fn qubit(alpha: f64) -> Result<Self> {
        Self::new(alpha, 2)
    }

    /// Square qubit code, `α = √π`.
    pub fn square() -> Self {
        Self { alpha: PI.sqrt(), k: 2 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// Horizontal period `a = Kα`.
    pub fn a(&self) -> f64 {
        self.k as f64 * self.alpha
    }

    pub fn patch(&self) -> ZakPatch {
        ZakPatch::standard(self.a()).expect("code parameters are validated")
    }

    /// `P_G`, the cell of correctable shifts; also the gauge-mode patch.
    pub fn correctable_patch(&self) -> ZakPatch {
        let a = self.a();
        ZakPatch::with_origin(self.alpha, a, -self.alpha / 2.0, -PI / a).expect("code parameters are validated")
    }

    pub fn grid(&self, nu: usize, nv: usize) -> Result<ZakGrid> {
        ZakGrid::new(self.patch(), nu, nv)
    }

    pub(crate) fn require_qubit(&self) -> Result<()> {
        if self.k == 2 {
            Ok(())
        } else {
            Err(ZakError::UnsupportedDimension(self.k))
        }
    }

    fn check_index(&self, l: usize) -> Result<()> {
        if l < self.k {
            Ok(())
        } else {
            Err(ZakError::LogicalIndex {
                index: l,
                dimension: self.k,
            })
        }
    }

    pub(crate) fn check_grid(&self, grid: &ZakGrid) -> Result<()> {
        if *grid.patch() == self.patch() {
            Ok(())
        } else {
            Err(ZakError::GridMismatch(format!(
                "state patch {:?} is not the code patch {:?}",
                grid.patch(),
                self.patch()
            )))
        }
    }

    pub(crate) fn check_ideal(&self, s: &IdealZakState) -> Result<()> {
        if *s.patch() == self.patch() {
            Ok(())
        } else {
            Err(ZakError::GridMismatch("ideal state is not on the code patch".into()))
        }
    }
}

/// Homodyne outcomes `(s, t)` and their reduction `(ũ, ṽ) ∈ P_G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Syndrome {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

/// `ũ = {s}_α`, `ṽ = {t}_{2π/a}` with centered cells.
pub fn syndrome_reduce(code: &GKPCode, s: f64, t: f64) -> Syndrome {
    let a = code.a();
    let alpha = code.alpha;
    let u = frac_part(s, alpha, alpha / 2.0).expect("alpha is positive");
    let v = frac_part(t, 2.0 * PI / a, PI / a).expect("a is positive");
    Syndrome { s, t, u, v }
}

/// `|ℓ⟩ = |(a/K)ℓ, 0⟩`.
pub fn codeword(code: &GKPCode, l: usize) -> Result<IdealZakState> {
    code.check_index(l)?;
    Ok(IdealZakState::point(code.patch(), code.a() / code.k as f64 * l as f64, 0.0))
}

/// `Σ_ℓ c_ℓ |ℓ⟩`.
pub fn logical_state(code: &GKPCode, amplitudes: &[Complex64]) -> Result<IdealZakState> {
    if amplitudes.len() != code.k {
        return Err(ZakError::InvalidArgument(format!(
            "expected {} amplitudes, got {}",
            code.k,
            amplitudes.len()
        )));
    }
    let step = code.a() / code.k as f64;
    Ok(IdealZakState::from_kets(
        code.patch(),
        amplitudes.iter().enumerate().map(|(l, &c)| (step * l as f64, 0.0, c)),
    ))
}

/// Finite-energy codeword: Gaussian teeth of variance `Δ²` spaced by `a`,
/// offset `(a/K)ℓ`, under an envelope of variance `Δ⁻²`.
pub fn approx_codeword(code: &GKPCode, l: usize, delta: f64) -> Result<PositionStateDescriptor> {
    code.check_index(l)?;
    let offset = code.a() / code.k as f64 * l as f64;
    Ok(PositionStateDescriptor::GaussianComb(GaussianComb::gkp(code.a(), offset, delta)?))
}

/// A pure state in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum PureState {
    Grid(ModularWavefunction),
    Ideal(IdealZakState),
}

impl From<ModularWavefunction> for PureState {
    fn from(psi: ModularWavefunction) -> Self {
        Self::Grid(psi)
    }
}

impl From<IdealZakState> for PureState {
    fn from(s: IdealZakState) -> Self {
        Self::Ideal(s)
    }
}

/// Convex combination `Σ_n Pr_n |ψ_n⟩⟨ψ_n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture<T> {
    components: Vec<(f64, T)>,
}

pub type MixtureState = Mixture<PureState>;

impl<T> Mixture<T> {
    pub fn new(components: Vec<(f64, T)>) -> Result<Self> {
        let sum: f64 = components.iter().map(|c| c.0).sum();
        if components.is_empty() || components.iter().any(|c| c.0.is_nan() || c.0 < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(ZakError::InvalidMixture { sum });
        }
        Ok(Self { components })
    }

    pub fn pure(state: T) -> Self {
        Self {
            components: vec![(1.0, state)],
        }
    }

    pub fn components(&self) -> &[(f64, T)] {
        &self.components
    }
}

/// A 2×2 logical density matrix, trace-normalized, with the trace it had
/// before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalQubit {
    pub rho: Matrix2,
    pub raw_trace: f64,
}

impl LogicalQubit {
    pub fn from_unnormalized(m: Matrix2) -> Result<Self> {
        let raw_trace = m[0][0].re + m[1][1].re;
        if raw_trace.is_nan() || raw_trace <= DEGENERATE_TRACE {
            return Err(ZakError::DegenerateLogical { raw_trace });
        }
        let rho = m.map(|row| row.map(|z| z / raw_trace));
        Ok(Self { rho, raw_trace })
    }

    /// `(x, y, z)` with `ρ = (1 + xσ_x + yσ_y + zσ_z)/2`.
    pub fn bloch(&self) -> [f64; 3] {
        let r = &self.rho;
        [2.0 * r[0][1].re, 0.0 - 2.0 * r[0][1].im, r[0][0].re - r[1][1].re]
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨ℓ|ρ|ℓ⟩`.
    pub fn fidelity(&self, l: usize) -> f64 {
        self.rho[l][l].re
    }

    /// `⟨φ|ρ|φ⟩` for a normalized logical vector `φ`.
    pub fn fidelity_with(&self, phi: [Complex64; 2]) -> f64 {
        let mut f = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                f += phi[i].conj() * self.rho[i][j] * phi[j];
            }
        }
        f.re
    }

    /// Largest entrywise distance to another logical state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.rho
            .iter()
            .flatten()
            .zip(other.rho.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let r = &self.rho;
        let half_tr = 0.5 * (r[0][0].re + r[1][1].re);
        let half_gap = 0.5 * (r[0][0].re - r[1][1].re);
        half_tr - (half_gap * half_gap + r[0][1].norm_sqr()).sqrt()
    }

    /// Checks Hermiticity to `1e-12` and positivity to `-1e-10`.
    pub fn validate(&self) -> Result<()> {
        let r = &self.rho;
        let herm = (r[0][1] - r[1][0].conj()).norm().max(r[0][0].im.abs()).max(r[1][1].im.abs());
        if herm > 1e-12 {
            return Err(ZakError::InvalidArgument(format!("logical matrix not Hermitian ({herm:.3e})")));
        }
        let lam = self.min_eigenvalue();
        if lam < -1e-10 {
            return Err(ZakError::InvalidArgument(format!("logical matrix not positive ({lam:.3e})")));
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "rho00_re,rho00_im,rho01_re,rho01_im,rho10_re,rho10_im,rho11_re,rho11_im,bloch_x,bloch_y,bloch_z,purity,raw_trace";

    pub fn csv_row(&self) -> String {
        let mut fields: Vec<String> = Vec::with_capacity(13);
        for z in self.rho.iter().flatten() {
            fields.push(format!("{:?}", z.re));
            fields.push(format!("{:?}", z.im));
        }
        for x in self.bloch() {
            fields.push(format!("{x:?}"));
        }
        fields.push(format!("{:?}", self.purity()));
        fields.push(format!("{:?}", self.raw_trace));
        fields.join(",")
    }
}

/// `(‖P^V(-a)ψ - ψ‖, ‖P^U(2πK/a)ψ - ψ‖)`; grid states use the `du dv`
/// norm, ideal states the Dirac-comb norm.
pub fn stabilizer_residual(code: &GKPCode, psi: &PureState) -> (f64, f64) {
    let a = code.a();
    let t_v = -a;
    let t_u = 2.0 * PI * code.k as f64 / a;
    match psi {
        PureState::Grid(w) => {
            let dist = |x: &ModularWavefunction| {
                let s: f64 = x.samples().iter().zip(w.samples()).map(|(p, q)| (p - q).norm_sqr()).sum();
                (s * w.grid().cell_area()).sqrt()
            };
            (dist(&w.phase_v(t_v)), dist(&w.phase_u(t_u)))
        }
        PureState::Ideal(s) => {
            let dist = |phase: &dyn Fn(f64, f64) -> f64| {
                s.points()
                    .iter()
                    .map(|p| (p.weight * (Complex64::from_polar(1.0, phase(p.u, p.v)) - 1.0)).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            };
            (dist(&|_, v| v * t_v), dist(&|u, _| u * t_u))
        }
    }
}

/// Post-correction amplitudes `c̄_ℓ = exp(-iαℓṽ) ψ(ũ+αℓ, ṽ)`.
///
/// Grid states must have `(ũ, ṽ)` on a node.
pub fn ec_kraus_amplitudes(code: &GKPCode, psi: &PureState, syn: &Syndrome) -> Result<[Complex64; 2]> {
    code.require_qubit()?;
    let alpha = code.alpha;
    let value = |l: usize| -> Result<Complex64> {
        let x = syn.u + alpha * l as f64;
        let amp = match psi {
            PureState::Grid(w) => {
                code.check_grid(w.grid())?;
                w.evaluate_on_grid(x, syn.v)?
            }
            PureState::Ideal(s) => {
                code.check_ideal(s)?;
                s.weight_at(x, syn.v)
            }
        };
        Ok(amp * Complex64::from_polar(1.0, -alpha * l as f64 * syn.v))
    };
    Ok([value(0)?, value(1)?])
}

/// As [`ec_kraus_amplitudes`] for grid states at arbitrary syndromes, using
/// bilinear interpolation; the flag reports whether it was needed.
pub fn ec_kraus_amplitudes_interpolated(
    code: &GKPCode,
    psi: &ModularWavefunction,
    syn: &Syndrome,
) -> Result<([Complex64; 2], bool)> {
    code.require_qubit()?;
    code.check_grid(psi.grid())?;
    let alpha = code.alpha;
    let mut flagged = false;
    let mut out = [ZERO; 2];
    for (l, c) in out.iter_mut().enumerate() {
        let e = psi.evaluate_extended(syn.u + alpha * l as f64, syn.v);
        flagged |= e.interpolated;
        *c = e.value * Complex64::from_polar(1.0, -alpha * l as f64 * syn.v);
    }
    Ok((out, flagged))
}

/// Syndrome nodes of `P_G` for a grid on the code patch.
pub fn syndrome_nodes(code: &GKPCode, grid: &ZakGrid) -> Result<Vec<Syndrome>> {
    code.require_qubit()?;
    code.check_grid(grid)?;
    let mut out = Vec::with_capacity(grid.nu() / 2 * grid.nv());
    for j in 0..grid.nu() / 2 {
        for k in 0..grid.nv() {
            out.push(syndrome_reduce(code, grid.u(j), grid.v(k)));
        }
    }
    Ok(out)
}

/// `∫_{P_G} c̄ c̄† dũ dṽ` accumulated from the Kraus amplitudes at every
/// syndrome node (unnormalized).
pub fn ec_syndrome_average(code: &GKPCode, psi: &ModularWavefunction) -> Result<Matrix2> {
    let state = PureState::Grid(psi.clone());
    let mut m = [[ZERO; 2]; 2];
    for syn in syndrome_nodes(code, psi.grid())? {
        let c = ec_kraus_amplitudes(code, &state, &syn)?;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += c[i] * c[j].conj();
            }
        }
    }
    let area = psi.grid().cell_area();
    Ok(m.map(|row| row.map(|z| z * area)))
}

fn logical_matrix(code: &GKPCode, psi: &PureState, counter_rotate: bool) -> Result<Matrix2> {
    code.require_qubit()?;
    let alpha = code.alpha;
    let rotation = |l: usize, lp: usize, v: f64| {
        if counter_rotate {
            Complex64::from_polar(1.0, -alpha * (l as f64 - lp as f64) * v)
        } else {
            Complex64::new(1.0, 0.0)
        }
    };
    let mut m = [[ZERO; 2]; 2];
    match psi {
        PureState::Grid(w) => {
            let g = w.grid();
            code.check_grid(g)?;
            let half = g.nu() / 2;
            let s = w.samples();
            for (l, row) in m.iter_mut().enumerate() {
                for (lp, entry) in row.iter_mut().enumerate() {
                    let mut acc = ZERO;
                    for k in 0..g.nv() {
                        let mut line = ZERO;
                        for j in 0..half {
                            line += s[[j + l * half, k]] * s[[j + lp * half, k]].conj();
                        }
                        acc += line * rotation(l, lp, g.v(k));
                    }
                    *entry = acc * g.cell_area();
                }
            }
        }
        PureState::Ideal(s) => {
            code.check_ideal(s)?;
            for p in s.points() {
                let l = if p.u >= alpha / 2.0 { 1 } else { 0 };
                for (lp, entry) in m[l].iter_mut().enumerate() {
                    let partner = s.weight_at(p.u + alpha * (lp as f64 - l as f64), p.v);
                    *entry += p.weight * partner.conj() * rotation(l, lp, p.v);
                }
            }
        }
    }
    Ok(m)
}

fn mixture_logical(code: &GKPCode, rho: &MixtureState, counter_rotate: bool) -> Result<LogicalQubit> {
    let mut m = [[ZERO; 2]; 2];
    for (pr, psi) in rho.components() {
        let part = logical_matrix(code, psi, counter_rotate)?;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += part[i][j] * *pr;
            }
        }
    }
    LogicalQubit::from_unnormalized(m)
}

/// Logical qubit by direct overlap integration over `P_G`.
pub fn logical_from_overlap(code: &GKPCode, rho: &MixtureState) -> Result<LogicalQubit> {
    mixture_logical(code, rho, false)
}

/// Logical qubit after ideal error correction averaged over syndromes.
pub fn ec_channel_logical(code: &GKPCode, rho: &MixtureState) -> Result<LogicalQubit> {
    mixture_logical(code, rho, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{apply_X, apply_Z};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn code_geometry() {
        let code = GKPCode::square();
        assert!((code.a() - 2.0 * PI.sqrt()).abs() < 1e-15);
        let pg = code.correctable_patch();
        assert!((pg.area() - PI).abs() < 1e-14);
        assert!((pg.height() - code.patch().height()).abs() < 1e-15);
        assert!(GKPCode::new(1.0, 1).is_err());
        assert!(GKPCode::new(-1.0, 2).is_err());
    }

    #[test]
    fn codewords() {
        let code = GKPCode::square();
        let alpha = code.alpha();
        let zero = codeword(&code, 0).unwrap();
        assert_eq!(zero.points()[0].u, 0.0);
        let one = codeword(&code, 1).unwrap();
        assert!((one.points()[0].u - alpha).abs() < 1e-15);
        assert!(matches!(codeword(&code, 2), Err(ZakError::LogicalIndex { index: 2, dimension: 2 })));
        let qutrit = GKPCode::new(alpha, 3).unwrap();
        let two = codeword(&qutrit, 2).unwrap();
        assert!((two.points()[0].u - 2.0 * qutrit.a() / 3.0).abs() < 1e-14);
        assert_eq!(two.points()[0].v, 0.0);
    }

    #[test]
    fn residuals_of_ideal_states() {
        let code = GKPCode::square();
        for l in 0..2 {
            let r = stabilizer_residual(&code, &codeword(&code, l).unwrap().into());
            assert!(r.0 < 1e-14 && r.1 < 1e-14, "{r:?}");
        }
        let half = IdealZakState::point(code.patch(), code.alpha() / 2.0, 0.0);
        let r = stabilizer_residual(&code, &half.into());
        assert!((r.1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn syndrome_examples() {
        let code = GKPCode::square();
        let alpha = code.alpha();
        let s = syndrome_reduce(&code, 0.0, 0.0);
        assert_eq!((s.u, s.v), (0.0, 0.0));
        let s = syndrome_reduce(&code, alpha, 0.0);
        assert_eq!((s.u, s.v), (0.0, 0.0));
        let s = syndrome_reduce(&code, 0.6 * alpha, 0.0);
        assert!((s.u + 0.4 * alpha).abs() < 1e-15);
        let s = syndrome_reduce(&code, 5.3, -7.1);
        assert!((-alpha / 2.0..alpha / 2.0).contains(&s.u));
        assert!((-PI / (2.0 * alpha)..PI / (2.0 * alpha)).contains(&s.v));
    }

    #[test]
    fn ideal_logical_maps() {
        let code = GKPCode::square();
        let zero = codeword(&code, 0).unwrap();
        let q = logical_from_overlap(&code, &Mixture::pure(zero.clone().into())).unwrap();
        assert_eq!(q.rho, [[c(1.0, 0.0), ZERO], [ZERO, ZERO]]);
        let mix = Mixture::new(vec![(0.5, zero.into()), (0.5, codeword(&code, 1).unwrap().into())]).unwrap();
        let q = logical_from_overlap(&code, &mix).unwrap();
        assert_eq!(q.rho, [[c(0.5, 0.0), ZERO], [ZERO, c(0.5, 0.0)]]);
        assert!(Mixture::new(vec![(0.7, PureState::Ideal(codeword(&code, 0).unwrap()))]).is_err());
    }

    #[test]
    fn logical_convention_is_ket_bra() {
        let code = GKPCode::square();
        let amps = [c(0.6, 0.0), c(0.0, 0.8)];
        let s = logical_state(&code, &amps).unwrap();
        let q = logical_from_overlap(&code, &Mixture::pure(s.into())).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((q.rho[i][j] - amps[i] * amps[j].conj()).norm() < 1e-15);
            }
        }
        let [x, y, z] = q.bloch();
        assert!(x.abs() < 1e-15 && (y - 0.96).abs() < 1e-15 && (z + 0.28).abs() < 1e-15);
        assert!((q.purity() - 1.0).abs() < 1e-15);
        q.validate().unwrap();
    }

    #[test]
    fn counter_rotation_on_ideal_states() {
        let code = GKPCode::square();
        let g = code.grid(16, 8).unwrap();
        let (u0, v0) = (g.du() * 3.0, -g.dv() * 2.0);
        let amps = [c(0.6, 0.0), c(0.0, 0.8)];
        let s = logical_state(&code, &amps).unwrap();
        let shifted = apply_X(&apply_Z(&s, v0).unwrap(), u0).unwrap();
        let ec = ec_channel_logical(&code, &Mixture::pure(shifted.clone().into())).unwrap();
        let plain = logical_from_overlap(&code, &Mixture::pure(shifted.clone().into())).unwrap();
        let rot = Complex64::from_polar(1.0, code.alpha() * v0);
        for i in 0..2 {
            for j in 0..2 {
                let target = amps[i] * amps[j].conj();
                assert!((ec.rho[i][j] - target).norm() < 1e-14);
                let ri = if i == 1 { rot } else { c(1.0, 0.0) };
                let rj = if j == 1 { rot } else { c(1.0, 0.0) };
                assert!((plain.rho[i][j] - target * ri * rj.conj()).norm() < 1e-14);
            }
        }
        let syn = syndrome_reduce(&code, u0, v0);
        let k = ec_kraus_amplitudes(&code, &shifted.into(), &syn).unwrap();
        assert!((k[0] - amps[0]).norm() < 1e-14 && (k[1] - amps[1]).norm() < 1e-14);
    }

    #[test]
    fn degenerate_and_report() {
        assert!(matches!(
            LogicalQubit::from_unnormalized([[ZERO; 2]; 2]),
            Err(ZakError::DegenerateLogical { .. })
        ));
        let q = LogicalQubit::from_unnormalized([[c(2.0, 0.0), ZERO], [ZERO, ZERO]]).unwrap();
        assert_eq!(q.raw_trace, 2.0);
        assert_eq!(q.csv_row(), "1.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,1.0,1.0,2.0");
        assert_eq!(LogicalQubit::CSV_HEADER.split(',').count(), 13);
    }
}
