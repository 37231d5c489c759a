//! Centered modular arithmetic on the real line.
//!
//! Every real `x` splits as `x = {x}_T^μ + [x]_T^μ`, where the centered
//! fractional part `{x}_T^μ` lies in the half-open cell `[-μ, T-μ)` and
//! `[x]_T^μ` is an integer multiple of the period `T`. The split is computed
//! with floor arithmetic only, so boundary values behave deterministically:
//! the left edge `-μ` belongs to the cell, the right edge `T-μ` wraps to `-μ`.
//!
//! The same bookkeeping drives canonicalization of Zak kets `|x, y⟩` with
//! unrestricted coordinates into the fundamental patch, where the whole-period
//! part of `x` turns into the phase `exp(-i [x] {y})`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_positive, Result};

/// The split of a real number into centered fractional part and closest
/// integer multiple of a period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredDecomposition {
    pub frac: f64,
    pub whole: f64,
    /// `whole / period`, exact.
    pub winding: i64,
    pub period: f64,
    pub centering: f64,
}

impl CenteredDecomposition {
    pub fn new(x: f64, period: f64, centering: f64) -> Result<Self> {
        require_positive("period", period)?;
        let (frac, winding) = split(x, period, centering);
        Ok(Self {
            frac,
            whole: x - frac,
            winding,
            period,
            centering,
        })
    }
}

// Floor-based split with a guard that keeps the result inside [-μ, T-μ)
// when the final subtraction rounds onto the excluded edge.
fn split(x: f64, period: f64, centering: f64) -> (f64, i64) {
    let mut n = ((x + centering) / period).floor();
    let mut frac = x - period * n;
    if frac >= period - centering {
        frac -= period;
        n += 1.0;
    } else if frac < -centering {
        frac += period;
        n -= 1.0;
    }
    (frac, n as i64)
}

/// Centered fractional part `{x}_T^μ ∈ [-μ, T-μ)`.
pub fn frac_part(x: f64, period: f64, centering: f64) -> Result<f64> {
    require_positive("period", period)?;
    Ok(split(x, period, centering).0)
}

/// Centered closest integer multiple `[x]_T^μ = x - {x}_T^μ`.
pub fn closest_int_multiple(x: f64, period: f64, centering: f64) -> Result<f64> {
    require_positive("period", period)?;
    Ok(x - split(x, period, centering).0)
}

/// Number of whole periods in `x`, i.e. `[x]_T^μ / T` as an integer.
pub fn winding_number(x: f64, period: f64, centering: f64) -> Result<i64> {
    require_positive("period", period)?;
    Ok(split(x, period, centering).1)
}

/// A Zak point reduced into its fundamental patch together with the phase
/// picked up by the ket during the reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalZakPoint {
    pub u: f64,
    pub v: f64,
    pub phase: Complex64,
    /// Whole horizontal periods removed from the first coordinate.
    pub u_winding: i64,
    /// Whole vertical periods removed from the second coordinate.
    pub v_winding: i64,
}

/// Canonicalizes the ket `|x, y⟩` into the standard patch
/// `[-a/4, 3a/4) × [-π/a, π/a)`:
/// `|x, y⟩ = exp(-i [x]_a {y}_{2π/a}) |{x}_a, {y}_{2π/a}⟩`.
pub fn canonicalize_zak_point(x: f64, y: f64, a: f64) -> Result<CanonicalZakPoint> {
    require_positive("a", a)?;
    canonicalize_general(x, y, a, a, a / 4.0, PI / a)
}

/// Canonicalization for a (possibly stretched) patch with horizontal period
/// `a`, vertical period `2π/b` and explicit centerings.
///
/// The horizontal quasi-periodicity `|u + a, v⟩ = exp(-i b v)|u, v⟩` gives
/// the phase `exp(-i b n v)` for `n` removed periods; for `b = a` this is the
/// standard rule.
pub fn canonicalize_general(
    x: f64,
    y: f64,
    a: f64,
    b: f64,
    u_centering: f64,
    v_centering: f64,
) -> Result<CanonicalZakPoint> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    let (u, n) = split(x, a, u_centering);
    let (v, k) = split(y, 2.0 * PI / b, v_centering);
    let phase = Complex64::from_polar(1.0, -b * (n as f64) * v);
    Ok(CanonicalZakPoint {
        u,
        v,
        phase,
        u_winding: n,
        v_winding: k,
    })
}

/// Aharonov split of a position value, `q = u + a m`, with the modular part
/// centered in `[-a/4, 3a/4)`.
pub fn split_position(q: f64, a: f64) -> Result<(f64, i64)> {
    require_positive("a", a)?;
    Ok(split(q, a, a / 4.0))
}

/// Aharonov split of a momentum value, `p = v + (2π/a) n`, with the modular
/// part centered in `[-π/a, π/a)`.
pub fn split_momentum(p: f64, a: f64) -> Result<(f64, i64)> {
    require_positive("a", a)?;
    Ok(split(p, 2.0 * PI / a, PI / a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frac_part_examples() {
        assert_eq!(frac_part(0.3, 1.0, 0.5).unwrap(), 0.3);
        assert_eq!(frac_part(5.0, 2.0, 1.0).unwrap(), -1.0);
        let a = 2.0 * PI.sqrt();
        assert_eq!(frac_part(a, a, a / 4.0).unwrap(), 0.0);
    }

    #[test]
    fn closest_multiple_examples() {
        assert_eq!(closest_int_multiple(5.0, 2.0, 1.0).unwrap(), 6.0);
        assert_eq!(closest_int_multiple(0.0, 2.0, 1.0).unwrap(), 0.0);
        let t = 3.0;
        assert_eq!(closest_int_multiple(0.3 * t, t, t / 2.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_positive_period() {
        assert!(frac_part(1.0, 0.0, 0.0).is_err());
        assert!(frac_part(1.0, -1.0, 0.0).is_err());
        assert!(closest_int_multiple(1.0, f64::NAN, 0.0).is_err());
        assert!(canonicalize_zak_point(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn upper_boundary_wraps_to_lower() {
        assert_eq!(frac_part(1.5, 2.0, 0.5).unwrap(), -0.5);
        assert_eq!(frac_part(0.75, 1.0, 0.25).unwrap(), -0.25);
        assert_eq!(frac_part(-0.25, 1.0, 0.25).unwrap(), -0.25);
    }

    #[test]
    fn canonical_points() {
        let a = 2.0 * PI.sqrt();
        let p = canonicalize_zak_point(0.0, 0.0, a).unwrap();
        assert_eq!((p.u, p.v), (0.0, 0.0));
        assert_eq!(p.phase, Complex64::new(1.0, 0.0));

        let p = canonicalize_zak_point(a, 0.0, a).unwrap();
        assert_eq!((p.u, p.v), (0.0, 0.0));
        assert!((p.phase - 1.0).norm() < 1e-15);

        let v0 = 0.37;
        let p = canonicalize_zak_point(a, v0, a).unwrap();
        assert_eq!(p.u, 0.0);
        assert_eq!(p.v, v0);
        assert!((p.phase - Complex64::from_polar(1.0, -a * v0)).norm() < 1e-14);
    }

    #[test]
    fn aharonov_split_reconstructs() {
        let a = 2.0 * PI.sqrt();
        let (u, m) = split_position(7.3, a).unwrap();
        assert!((u + a * m as f64 - 7.3).abs() < 1e-14);
        assert!((-a / 4.0..3.0 * a / 4.0).contains(&u));
        let (v, n) = split_momentum(-4.1, a).unwrap();
        assert!((v + 2.0 * PI / a * n as f64 + 4.1).abs() < 1e-14);
        assert!((-PI / a..PI / a).contains(&v));
    }

    proptest! {
        #[test]
        fn frac_in_cell_and_consistent(x in -1e3f64..1e3, t in 0.01f64..10.0, c in 0.0f64..1.0) {
            let mu = c * t;
            let d = CenteredDecomposition::new(x, t, mu).unwrap();
            prop_assert!(d.frac >= -mu && d.frac < t - mu);
            prop_assert!((d.frac + d.whole - x).abs() <= 1e-12 * x.abs().max(1.0));
            let ratio = d.whole / t;
            prop_assert!((ratio - ratio.round()).abs() < 1e-9);
            prop_assert_eq!(ratio.round() as i64, d.winding);
        }

        #[test]
        fn frac_idempotent(x in -1e3f64..1e3, t in 0.01f64..10.0, c in 0.0f64..1.0) {
            let mu = c * t;
            let f = frac_part(x, t, mu).unwrap();
            prop_assert_eq!(frac_part(f, t, mu).unwrap(), f);
        }

        #[test]
        fn frac_scale_identity(x in -1e2f64..1e2, t in 0.1f64..10.0, c in 0.0f64..1.0, s in 0.1f64..10.0) {
            let mu = c * t;
            let lhs = s * frac_part(x, t, mu).unwrap();
            let rhs = frac_part(s * x, s * t, s * mu).unwrap();
            // Away from cell edges the two sides agree to rounding; at an edge
            // they may sit on opposite ends of the cell.
            let diff = (lhs - rhs).abs();
            prop_assert!(diff <= 1e-12 * (s * x).abs().max(s * t) || (diff - s * t).abs() <= 1e-9 * s * t);
        }

        #[test]
        fn canonicalization_composition(x in -20f64..20.0, y in -20f64..20.0) {
            let a = 2.0 * PI.sqrt();
            let p = canonicalize_zak_point(x, y, a).unwrap();
            let q = canonicalize_zak_point(x + a, y, a).unwrap();
            prop_assume!((p.u - q.u).abs() < 1e-9);
            let vf = frac_part(y, 2.0 * PI / a, PI / a).unwrap();
            let expected = p.phase * Complex64::from_polar(1.0, -a * vf);
            prop_assert!((q.v - p.v).abs() < 1e-12);
            prop_assert!((q.phase - expected).norm() < 1e-9);
            prop_assert!((p.phase.norm() - 1.0).abs() < 1e-12);
        }
    }
}
