//! Subsystem decomposition of a mode into a logical qubit and a gauge mode.
//!
//! A full-patch Zak ket splits as
//!
//! ```text
//! |u, v⟩ = |[u]_α/α⟩_L ⊗ |{u}_α, v⟩_G
//! ```
//!
//! so a pure state becomes `Σ_ℓ |ℓ⟩_L ⊗ |γ_ℓ⟩_G` with `γ_ℓ(u, v) = ψ(u + αℓ, v)`
//! on the gauge patch `P_G = [-α/2, α/2) × [-π/2α, π/2α)`. The gauge mode is
//! a stretched Zak space with `(a, b) = (α, 2α)`: `|u+α, v⟩_G = e^{-2iαv}|u, v⟩_G`.
//!
//! The partitioned-position bridge uses the synthesis convention
//! `γ(u, v) = sqrt(α/π) Σ_m e^{+2iαmv} ψ(m, u)`, hence analysis with
//! `e^{-2iαmv}`; `m` runs over `[-Nv/2, Nv/2)`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, ZakError};
use crate::gkp::{GKPCode, LogicalQubit, Mixture, MixtureState, PureState, Syndrome};
use crate::modular_arith::{closest_int_multiple, frac_part, winding_number};
use crate::zak_core::io::{grid_to_bytes, write_atomic};
use crate::zak_core::{IdealZakState, ModularWavefunction, ZakGrid, ZakPatch};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sampled SSD state: one gauge wavefunction per logical index.
#[derive(Debug, Clone, PartialEq)]
pub struct SsdState {
    code: GKPCode,
    gamma: [ModularWavefunction; 2],
}

/// Symbolic SSD state: gauge point masses per logical index.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealSsdState {
    code: GKPCode,
    gamma: [IdealZakState; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub enum SsdPure {
    Grid(SsdState),
    Ideal(IdealSsdState),
}

pub type SsdMixture = Mixture<SsdPure>;

impl From<SsdState> for SsdPure {
    fn from(s: SsdState) -> Self {
        Self::Grid(s)
    }
}

impl From<IdealSsdState> for SsdPure {
    fn from(s: IdealSsdState) -> Self {
        Self::Ideal(s)
    }
}

pub fn gauge_patch(code: &GKPCode) -> ZakPatch {
    code.correctable_patch()
}

/// Gauge grid matching a full-patch grid: half the u nodes, same steps.
pub fn gauge_grid(code: &GKPCode, full: &ZakGrid) -> Result<ZakGrid> {
    code.require_qubit()?;
    code.check_grid(full)?;
    ZakGrid::with_even_counts(gauge_patch(code), full.nu() / 2, full.nv())
}

impl SsdState {
    pub fn new(code: GKPCode, gamma: [ModularWavefunction; 2]) -> Result<Self> {
        code.require_qubit()?;
        let patch = gauge_patch(&code);
        if gamma.iter().any(|g| *g.grid().patch() != patch) || gamma[0].grid() != gamma[1].grid() {
            return Err(ZakError::GridMismatch("gauge wavefunctions must share the gauge grid".into()));
        }
        if !gamma[0].grid().nu().is_multiple_of(2) {
            return Err(ZakError::GridMismatch("gauge grid needs an even number of u nodes".into()));
        }
        Ok(Self { code, gamma })
    }

    pub fn code(&self) -> &GKPCode {
        &self.code
    }

    pub fn gamma(&self, l: usize) -> &ModularWavefunction {
        &self.gamma[l]
    }

    pub fn grid(&self) -> &ZakGrid {
        self.gamma[0].grid()
    }

    pub fn norm_sq(&self) -> f64 {
        self.gamma[0].norm_sq() + self.gamma[1].norm_sq()
    }

    fn full_grid(&self) -> ZakGrid {
        self.code
            .grid(2 * self.grid().nu(), self.grid().nv())
            .expect("gauge grid has an even u count")
    }
}

impl IdealSsdState {
    pub fn new(code: GKPCode, gamma: [IdealZakState; 2]) -> Result<Self> {
        code.require_qubit()?;
        let patch = gauge_patch(&code);
        if gamma.iter().any(|g| *g.patch() != patch) {
            return Err(ZakError::GridMismatch("gauge states must live on the gauge patch".into()));
        }
        Ok(Self { code, gamma })
    }

    /// `Σ_ℓ c_ℓ |ℓ⟩_L ⊗ |u, v⟩_G`.
    pub fn product(code: GKPCode, amplitudes: [Complex64; 2], u: f64, v: f64) -> Result<Self> {
        let patch = gauge_patch(&code);
        let gamma = amplitudes.map(|c| IdealZakState::from_kets(patch, [(u, v, c)]));
        Self::new(code, gamma)
    }

    pub fn code(&self) -> &GKPCode {
        &self.code
    }

    pub fn gamma(&self, l: usize) -> &IdealZakState {
        &self.gamma[l]
    }
}

/// `γ_ℓ[j, k] = ψ[j + ℓ·Nu/2, k]`; no phases are involved.
pub fn to_ssd(code: &GKPCode, psi: &ModularWavefunction) -> Result<SsdState> {
    let gg = gauge_grid(code, psi.grid())?;
    let half = gg.nu();
    let gamma = [0, 1].map(|l| {
        let block = psi.samples().slice(ndarray::s![l * half..(l + 1) * half, ..]).to_owned();
        ModularWavefunction::new(gg, block).expect("block has gauge shape")
    });
    SsdState::new(*code, gamma)
}

/// Inverse of [`to_ssd`]; checks that the norm is preserved.
pub fn from_ssd(s: &SsdState) -> Result<ModularWavefunction> {
    let full = s.full_grid();
    let half = s.grid().nu();
    let mut samples = Array2::zeros((full.nu(), full.nv()));
    for l in 0..2 {
        samples
            .slice_mut(ndarray::s![l * half..(l + 1) * half, ..])
            .assign(s.gamma[l].samples());
    }
    let psi = ModularWavefunction::new(full, samples)?;
    let (n_full, n_ssd) = (psi.norm_sq(), s.norm_sq());
    if (n_full - n_ssd).abs() > 1e-12 * n_ssd.max(1.0) {
        return Err(ZakError::InvalidArgument(format!(
            "basis change changed the norm ({n_ssd} -> {n_full})"
        )));
    }
    Ok(psi)
}

/// Inverse basis change through the phased form
/// `ψ(u, v) = e^{-2iv[u]_α} γ_ℓ(u, v)`, where `γ_ℓ` is evaluated at the
/// unreduced gauge coordinate `u` via the gauge quasi-periodicity.
pub fn from_ssd_alternate(s: &SsdState) -> Result<ModularWavefunction> {
    let full = s.full_grid();
    let alpha = s.code.alpha();
    let half = s.grid().nu();
    Ok(ModularWavefunction::from_fn(full, |_, _| ZERO).map_indexed(|j, k, _| {
        let l = j / half;
        let whole = closest_int_multiple(full.u(j), alpha, alpha / 2.0).expect("alpha is positive");
        let v = full.v(k);
        s.gamma[l].sample_extended(j as i64, k as i64) * Complex64::from_polar(1.0, -2.0 * v * whole)
    }))
}

fn split_point(alpha: f64, u: f64) -> (usize, f64) {
    let l = winding_number(u, alpha, alpha / 2.0).expect("alpha is positive");
    let g = frac_part(u, alpha, alpha / 2.0).expect("alpha is positive");
    (l.rem_euclid(2) as usize, g)
}

pub fn to_ssd_ideal(code: &GKPCode, s: &IdealZakState) -> Result<IdealSsdState> {
    code.require_qubit()?;
    code.check_ideal(s)?;
    let patch = gauge_patch(code);
    let mut gamma = [IdealZakState::empty(patch), IdealZakState::empty(patch)];
    for p in s.points() {
        let (l, g) = split_point(code.alpha(), p.u);
        gamma[l].add(g, p.v, p.weight);
    }
    IdealSsdState::new(*code, gamma)
}

pub fn from_ssd_ideal(s: &IdealSsdState) -> IdealZakState {
    let alpha = s.code.alpha();
    let mut out = IdealZakState::empty(s.code.patch());
    for (l, g) in s.gamma.iter().enumerate() {
        for p in g.points() {
            out.add(p.u + alpha * l as f64, p.v, p.weight);
        }
    }
    out
}

pub fn to_ssd_pure(code: &GKPCode, psi: &PureState) -> Result<SsdPure> {
    Ok(match psi {
        PureState::Grid(w) => SsdPure::Grid(to_ssd(code, w)?),
        PureState::Ideal(s) => SsdPure::Ideal(to_ssd_ideal(code, s)?),
    })
}

pub fn to_ssd_mixture(code: &GKPCode, rho: &MixtureState) -> Result<SsdMixture> {
    let comps = rho
        .components()
        .iter()
        .map(|(p, psi)| Ok((*p, to_ssd_pure(code, psi)?)))
        .collect::<Result<Vec<_>>>()?;
    Mixture::new(comps)
}

fn pair_matrix(s: &SsdPure, counter_rotate: bool) -> [[Complex64; 2]; 2] {
    let mut m = [[ZERO; 2]; 2];
    match s {
        SsdPure::Grid(st) => {
            let alpha = st.code.alpha();
            let g = *st.grid();
            let gamma: Vec<ModularWavefunction> = (0..2)
                .map(|l| {
                    if counter_rotate {
                        st.gamma[l].map_indexed(|_, k, z| z * Complex64::from_polar(1.0, -alpha * l as f64 * g.v(k)))
                    } else {
                        st.gamma[l].clone()
                    }
                })
                .collect();
            for (l, row) in m.iter_mut().enumerate() {
                for (lp, entry) in row.iter_mut().enumerate() {
                    let sum: Complex64 = gamma[l]
                        .samples()
                        .iter()
                        .zip(gamma[lp].samples())
                        .map(|(x, y)| x * y.conj())
                        .sum();
                    *entry = sum * g.cell_area();
                }
            }
        }
        SsdPure::Ideal(st) => {
            let alpha = st.code.alpha();
            let rot = |l: usize, v: f64| {
                if counter_rotate {
                    Complex64::from_polar(1.0, -alpha * l as f64 * v)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            };
            for (l, row) in m.iter_mut().enumerate() {
                for (lp, entry) in row.iter_mut().enumerate() {
                    for p in st.gamma[l].points() {
                        let partner = st.gamma[lp].weight_at(p.u, p.v);
                        *entry += p.weight * rot(l, p.v) * (partner * rot(lp, p.v)).conj();
                    }
                }
            }
        }
    }
    m
}

fn trace_over_gauge(rho: &SsdMixture, counter_rotate: bool) -> Result<LogicalQubit> {
    let mut m = [[ZERO; 2]; 2];
    for (pr, s) in rho.components() {
        let part = pair_matrix(s, counter_rotate);
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += part[i][j] * *pr;
            }
        }
    }
    LogicalQubit::from_unnormalized(m)
}

/// `ρ̃_{ℓℓ'} = Σ_n Pr_n ∫_{P_G} γ_ℓ^{(n)} conj(γ_ℓ'^{(n)})`.
pub fn gauge_trace(rho: &SsdMixture) -> Result<LogicalQubit> {
    trace_over_gauge(rho, false)
}

/// Gauge trace after the counter-rotation `γ_ℓ ↦ e^{-iαℓv} γ_ℓ`.
pub fn ec_gauge_trace(rho: &SsdMixture) -> Result<LogicalQubit> {
    trace_over_gauge(rho, true)
}

/// `Z(t) = e^{iαl̂t} ⊗ P^U_G(t) T^V_G(t)`.
#[allow(non_snake_case)]
pub fn apply_Z_ssd(s: &SsdPure, t: f64) -> Result<SsdPure> {
    match s {
        SsdPure::Grid(st) => {
            let g = *st.grid();
            let shift = g.v_steps(t)?;
            let alpha = st.code.alpha();
            let gamma = [0usize, 1].map(|l| {
                let src = &st.gamma[l];
                src.map_indexed(|j, k, _| {
                    Complex64::from_polar(1.0, (alpha * l as f64 + g.u(j)) * t)
                        * src.sample_extended(j as i64, k as i64 - shift)
                })
            });
            Ok(SsdPure::Grid(SsdState::new(st.code, gamma)?))
        }
        SsdPure::Ideal(st) => {
            let alpha = st.code.alpha();
            let gamma = [0usize, 1].map(|l| {
                st.gamma[l].map_points(|p| {
                    let phase = Complex64::from_polar(1.0, (alpha * l as f64 + p.u) * t);
                    (p.u, p.v + t, p.weight * phase)
                })
            });
            Ok(SsdPure::Ideal(IdealSsdState::new(st.code, gamma)?))
        }
    }
}

/// Destination of a gauge point under `X(t)`.
///
/// With `f = {t}_α`, `p = [t]_α/α` and `w = [u+f]_α/α`, the point lands at
/// gauge coordinate `{u+f}_α` in sector `ℓ' = (ℓ+p+w) mod 2`; the full-mode
/// winding `q = (ℓ+p+w-ℓ')/2` contributes the phase `e^{-2iαqv}`.
struct XMove {
    l: usize,
    q: i64,
}

fn x_move(l: usize, p: i64, w: i64) -> XMove {
    let n = l as i64 + p + w;
    let lp = n.rem_euclid(2);
    XMove {
        l: lp as usize,
        q: (n - lp) / 2,
    }
}

/// `X(t)` in SSD form: logical `X^{[t]_α/α}`, gauge translation by `{t}_α`,
/// and a conditional logical flip with phase for gauge points crossing the
/// edge of `P_G`.
#[allow(non_snake_case)]
pub fn apply_X_ssd(s: &SsdPure, t: f64) -> Result<SsdPure> {
    let alpha = match s {
        SsdPure::Grid(st) => st.code.alpha(),
        SsdPure::Ideal(st) => st.code.alpha(),
    };
    let f = frac_part(t, alpha, alpha / 2.0)?;
    let p = winding_number(t, alpha, alpha / 2.0)?;
    match s {
        SsdPure::Grid(st) => {
            let g = *st.grid();
            let half = g.nu() as i64;
            let fs = g.u_steps(f)?;
            let mut out = [Array2::zeros((g.nu(), g.nv())), Array2::zeros((g.nu(), g.nv()))];
            for l in 0..2 {
                for ((j, k), z) in st.gamma[l].samples().indexed_iter() {
                    let x = j as i64 + fs;
                    let w = x.div_euclid(half);
                    let m = x_move(l, p, w);
                    let phase = Complex64::from_polar(1.0, -2.0 * alpha * m.q as f64 * g.v(k));
                    out[m.l][[(x - w * half) as usize, k]] = z * phase;
                }
            }
            let [o0, o1] = out;
            let gamma = [ModularWavefunction::new(g, o0)?, ModularWavefunction::new(g, o1)?];
            Ok(SsdPure::Grid(SsdState::new(st.code, gamma)?))
        }
        SsdPure::Ideal(st) => {
            let patch = gauge_patch(&st.code);
            let mut gamma = [IdealZakState::empty(patch), IdealZakState::empty(patch)];
            for l in 0..2 {
                for pt in st.gamma[l].points() {
                    let x = pt.u + f;
                    let w = winding_number(x, alpha, alpha / 2.0)?;
                    let g = frac_part(x, alpha, alpha / 2.0)?;
                    let m = x_move(l, p, w);
                    let phase = Complex64::from_polar(1.0, -2.0 * alpha * m.q as f64 * pt.v);
                    gamma[m.l].add(g, pt.v, pt.weight * phase);
                }
            }
            Ok(SsdPure::Ideal(IdealSsdState::new(st.code, gamma)?))
        }
    }
}

/// Kraus amplitudes read off the gauge mode: `c̄_ℓ = e^{-iαℓṽ} γ_ℓ(ũ, ṽ)`.
pub fn ec_kraus_amplitudes_ssd(s: &SsdPure, syn: &Syndrome) -> Result<[Complex64; 2]> {
    let (alpha, g0, g1) = match s {
        SsdPure::Grid(st) => (
            st.code.alpha(),
            st.gamma[0].evaluate_on_grid(syn.u, syn.v)?,
            st.gamma[1].evaluate_on_grid(syn.u, syn.v)?,
        ),
        SsdPure::Ideal(st) => (
            st.code.alpha(),
            st.gamma[0].weight_at(syn.u, syn.v),
            st.gamma[1].weight_at(syn.u, syn.v),
        ),
    };
    Ok([g0, g1 * Complex64::from_polar(1.0, -alpha * syn.v)])
}

/// `e^{iθl̂}` on an SSD state: phase `e^{iθ}` on the `ℓ = 1` sector.
pub fn logical_phase_ssd(s: &SsdState, theta: f64) -> SsdState {
    let mut out = s.clone();
    out.gamma[1] = s.gamma[1].scaled(Complex64::from_polar(1.0, theta));
    out
}

/// `e^{iθl̂}` on a full-mode state, with `l̂` the which-patch operator.
pub fn which_patch_phase(code: &GKPCode, psi: &ModularWavefunction, theta: f64) -> Result<ModularWavefunction> {
    code.require_qubit()?;
    code.check_grid(psi.grid())?;
    let alpha = code.alpha();
    let g = *psi.grid();
    Ok(psi.map_indexed(|j, _, z| {
        let l = winding_number(g.u(j), alpha, alpha / 2.0).expect("alpha is positive");
        z * Complex64::from_polar(1.0, theta * l as f64)
    }))
}

/// Partitioned-position coefficients `ψ_ℓ(m, u_j)`, stored `[j, m + Nv/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PpCoefficients {
    pub code: GKPCode,
    pub grid: ZakGrid,
    pub coeffs: [Array2<Complex64>; 2],
}

impl PpCoefficients {
    pub fn m_min(&self) -> i64 {
        -(self.grid.nv() as i64) / 2
    }

    pub fn coefficient(&self, l: usize, m: i64, j: usize) -> Complex64 {
        self.coeffs[l][[j, (m - self.m_min()) as usize]]
    }
}

/// `ψ_ℓ(m, u) = sqrt(α/π) ∫ dv e^{-2iαmv} γ_ℓ(u, v)` by FFT along each gauge column.
pub fn pp_bridge(s: &SsdState) -> PpCoefficients {
    let g = *s.grid();
    let alpha = s.code.alpha();
    let nv = g.nv();
    let m_min = -(nv as i64) / 2;
    let fft = FftPlanner::new().plan_fft_forward(nv);
    let scale = (alpha / PI).sqrt() * g.dv();
    let coeffs = [0, 1].map(|l| {
        let mut out = Array2::zeros((g.nu(), nv));
        for j in 0..g.nu() {
            let mut line: Vec<Complex64> = s.gamma[l].samples().row(j).to_vec();
            fft.process(&mut line);
            for (idx, c) in out.row_mut(j).iter_mut().enumerate() {
                let m = m_min + idx as i64;
                let phase = Complex64::from_polar(1.0, -2.0 * alpha * m as f64 * g.patch().v_min());
                *c = line[m.rem_euclid(nv as i64) as usize] * phase * scale;
            }
        }
        out
    });
    PpCoefficients { code: s.code, grid: g, coeffs }
}

/// `γ_ℓ(u, v) = sqrt(α/π) Σ_m e^{2iαmv} ψ_ℓ(m, u)`.
pub fn pp_bridge_inverse(pp: &PpCoefficients) -> Result<SsdState> {
    let g = pp.grid;
    let alpha = pp.code.alpha();
    let nv = g.nv();
    let ifft = FftPlanner::new().plan_fft_inverse(nv);
    let scale = (alpha / PI).sqrt();
    let gamma = [0, 1].map(|l| {
        let mut out = Array2::zeros((g.nu(), nv));
        for j in 0..g.nu() {
            let mut line = vec![ZERO; nv];
            for (idx, c) in pp.coeffs[l].row(j).iter().enumerate() {
                let m = pp.m_min() + idx as i64;
                let phase = Complex64::from_polar(1.0, 2.0 * alpha * m as f64 * g.patch().v_min());
                line[m.rem_euclid(nv as i64) as usize] = c * phase;
            }
            ifft.process(&mut line);
            for (dst, z) in out.row_mut(j).iter_mut().zip(line) {
                *dst = z * scale;
            }
        }
        ModularWavefunction::new(g, out).expect("shape matches gauge grid")
    });
    SsdState::new(pp.code, gamma)
}

/// Writes one binary grid per logical index and a one-line manifest
/// `alpha=…,nu=…,nv=…,l0=…,l1=…`; returns the manifest path.
pub fn export_ssd(s: &SsdState, dir: &Path, stem: &str) -> Result<PathBuf> {
    let mut names = Vec::with_capacity(2);
    for l in 0..2 {
        let name = format!("{stem}_l{l}.bin");
        write_atomic(&dir.join(&name), &grid_to_bytes(&s.gamma[l]))?;
        names.push(name);
    }
    let manifest = format!(
        "alpha={:?},nu={},nv={},l0={},l1={}\n",
        s.code.alpha(),
        s.grid().nu(),
        s.grid().nv(),
        names[0],
        names[1]
    );
    let path = dir.join(format!("{stem}.manifest"));
    write_atomic(&path, manifest.as_bytes())?;
    Ok(path)
}
