//! Position-space wavefunctions that feed the Zak transform.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::erf::erfc;

use crate::error::{require_positive, Result, ZakError};

/// Amplitude cutoff for comb teeth: teeth whose envelope factor falls below
/// `exp(-COMB_CUTOFF)` are dropped from the descriptor.
const COMB_CUTOFF: f64 = 50.0;

/// A square-integrable position wavefunction `ψ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PositionStateDescriptor {
    /// Harmonic-oscillator ground state displaced to `center`:
    /// `π^{-1/4} exp(-(x - center)²/2)`.
    Vacuum { center: f64 },
    GaussianComb(GaussianComb),
    Tabulated(TabulatedState),
}

/// Normalized comb of Gaussian teeth under a Gaussian envelope,
/// `c · exp(-x²/(2 σ_env²)) · Σ_n exp(-(x - offset - n·spacing)²/(2 σ²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComb {
    spacing: f64,
    offset: f64,
    tooth_variance: f64,
    envelope_variance: f64,
    n_lo: i64,
    n_hi: i64,
    scale: f64,
}

/// Samples of `ψ` on a uniform position grid, linearly interpolated between
/// samples and zero outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedState {
    x0: f64,
    dx: f64,
    values: Vec<Complex64>,
}

impl PositionStateDescriptor {
    pub fn vacuum() -> Self {
        Self::Vacuum { center: 0.0 }
    }

    pub fn displaced_vacuum(center: f64) -> Self {
        Self::Vacuum { center }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            Self::Vacuum { center } => {
                let d = x - center;
                Complex64::new(PI.powf(-0.25) * (-0.5 * d * d).exp(), 0.0)
            }
            Self::GaussianComb(c) => Complex64::new(c.eval(x), 0.0),
            Self::Tabulated(t) => t.eval(x),
        }
    }

    /// `∫ |ψ(x)|² dx`.
    pub fn norm_sq(&self) -> f64 {
        match self {
            Self::Vacuum { .. } => 1.0,
            Self::GaussianComb(c) => c.mass_between(f64::NEG_INFINITY, f64::INFINITY),
            Self::Tabulated(t) => t.mass_between(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `∫ |ψ(x)|² dx` over the complement of `[lo, hi)`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Self::Vacuum { center } => 0.5 * (erfc(hi - center) + erfc(center - lo)),
            Self::GaussianComb(c) => {
                c.mass_between(f64::NEG_INFINITY, lo) + c.mass_between(hi, f64::INFINITY)
            }
            Self::Tabulated(t) => {
                t.mass_between(f64::NEG_INFINITY, lo) + t.mass_between(hi, f64::INFINITY)
            }
        }
    }
}

impl GaussianComb {
    /// Builds and normalizes a comb. Variances refer to the Gaussian
    /// functions themselves (`exp(-x²/(2σ²))`), not to `|ψ|²`.
    pub fn new(
        spacing: f64,
        offset: f64,
        tooth_variance: f64,
        envelope_variance: f64,
    ) -> Result<Self> {
        require_positive("spacing", spacing)?;
        require_positive("tooth variance", tooth_variance)?;
        require_positive("envelope variance", envelope_variance)?;
        if !offset.is_finite() {
            return Err(ZakError::InvalidArgument(format!(
                "comb offset must be finite, got {offset}"
            )));
        }
        let reach = (2.0 * COMB_CUTOFF * envelope_variance).sqrt();
        let n_lo = ((-reach - offset) / spacing).floor() as i64;
        let n_hi = ((reach - offset) / spacing).ceil() as i64;
        let mut comb = Self {
            spacing,
            offset,
            tooth_variance,
            envelope_variance,
            n_lo,
            n_hi,
            scale: 1.0,
        };
        let mass = comb.mass_between(f64::NEG_INFINITY, f64::INFINITY);
        comb.scale = mass.sqrt().recip();
        Ok(comb)
    }

    /// Approximate GKP comb: teeth of variance `Δ²`, envelope of variance
    /// `Δ^{-2}`.
    pub fn gkp(spacing: f64, offset: f64, delta: f64) -> Result<Self> {
        require_positive("delta", delta)?;
        Self::new(spacing, offset, delta * delta, 1.0 / (delta * delta))
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn tooth_variance(&self) -> f64 {
        self.tooth_variance
    }

    pub fn envelope_variance(&self) -> f64 {
        self.envelope_variance
    }

    fn tooth(&self, n: i64) -> f64 {
        self.offset + n as f64 * self.spacing
    }

    pub fn eval(&self, x: f64) -> f64 {
        let reach = (2.0 * COMB_CUTOFF * self.tooth_variance).sqrt();
        let lo = (((x - reach - self.offset) / self.spacing).floor() as i64).max(self.n_lo);
        let hi = (((x + reach - self.offset) / self.spacing).ceil() as i64).min(self.n_hi);
        let mut sum = 0.0;
        for n in lo..=hi {
            let d = x - self.tooth(n);
            sum += (-d * d / (2.0 * self.tooth_variance)).exp();
        }
        self.scale * (-x * x / (2.0 * self.envelope_variance)).exp() * sum
    }

    /// Exact `∫_lo^hi |ψ|²` from the pairwise Gaussian products of teeth.
    fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        // Pair (n, n'): exp(-A x² + B x - C) with
        //   A = 1/σ_env² + 1/σ², B = (x_n + x_n')/σ², C = (x_n² + x_n'²)/(2σ²).
        let s2 = self.tooth_variance;
        let a = 1.0 / self.envelope_variance + 1.0 / s2;
        let sqrt_a = a.sqrt();
        let mut total = 0.0;
        for n in self.n_lo..=self.n_hi {
            for m in n..=self.n_hi {
                let (xn, xm) = (self.tooth(n), self.tooth(m));
                let b = (xn + xm) / s2;
                let c = (xn * xn + xm * xm) / (2.0 * s2);
                let mu = b / (2.0 * a);
                let log_pref = b * b / (4.0 * a) - c;
                if log_pref < -700.0 {
                    continue;
                }
                let window = gaussian_window(sqrt_a, mu, lo, hi);
                let term = (PI / a).sqrt() * log_pref.exp() * window;
                total += if n == m { term } else { 2.0 * term };
            }
        }
        self.scale * self.scale * total
    }
}

// ∫_lo^hi exp(-A (x-μ)²) dx / sqrt(π/A), written so semi-infinite tails keep
// full relative precision.
fn gaussian_window(sqrt_a: f64, mu: f64, lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (false, false) => 1.0,
        (false, true) => 0.5 * erfc(sqrt_a * (mu - hi)),
        (true, false) => 0.5 * erfc(sqrt_a * (lo - mu)),
        (true, true) => 0.5 * (erfc(sqrt_a * (lo - mu)) - erfc(sqrt_a * (hi - mu))),
    }
}

impl TabulatedState {
    pub fn new(x0: f64, dx: f64, values: Vec<Complex64>) -> Result<Self> {
        require_positive("dx", dx)?;
        if !x0.is_finite() {
            return Err(ZakError::InvalidArgument(format!("x0 must be finite, got {x0}")));
        }
        if values.len() < 2 {
            return Err(ZakError::InvalidArgument(
                "tabulated state needs at least two samples".into(),
            ));
        }
        Ok(Self { x0, dx, values })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn x_end(&self) -> f64 {
        self.x0 + (self.values.len() - 1) as f64 * self.dx
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let s = (x - self.x0) / self.dx;
        let last = (self.values.len() - 1) as f64;
        if !(0.0..=last).contains(&s) {
            return Complex64::new(0.0, 0.0);
        }
        let i = s.floor();
        let f = s - i;
        let i = i as usize;
        // snap onto a sample when within rounding of it
        if f < 1e-9 {
            return self.values[i];
        }
        if f > 1.0 - 1e-9 {
            return self.values[(i + 1).min(self.values.len() - 1)];
        }
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        for (i, pair) in self.values.windows(2).enumerate() {
            let xl = self.x0 + i as f64 * self.dx;
            let s0 = ((lo - xl) / self.dx).clamp(0.0, 1.0);
            let s1 = ((hi - xl) / self.dx).clamp(0.0, 1.0);
            if s1 <= s0 {
                continue;
            }
            let (p, d) = (pair[0], pair[1] - pair[0]);
            let lin = (p.conj() * d).re;
            total += self.dx
                * (p.norm_sqr() * (s1 - s0)
                    + lin * (s1 * s1 - s0 * s0)
                    + d.norm_sqr() * (s1.powi(3) - s0.powi(3)) / 3.0);
        }
        total
    }
}
