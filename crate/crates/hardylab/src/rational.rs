//! Rational functions num/den held as ascending coefficient vectors.
//!
//! Everything downstream (column symbols, corona solutions, eigenvector
//! fields) needs three things from a rational function: point evaluation
//! away from poles, a certified power-series expansion at the origin, and
//! knowledge of where the poles sit relative to the unit circle.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hardy::{BoundarySamples, CoefSeries};
use crate::roots::poly_roots;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalFn {
    pub num: CoefSeries,
    pub den: CoefSeries,
}

impl RationalFn {
    pub fn new(num: CoefSeries, den: CoefSeries) -> Result<Self> {
        if den.norm() == 0.0 {
            return Err(Error::Degenerate("rational function with zero denominator".into()));
        }
        Ok(RationalFn { num, den })
    }

    /// Polynomial as a rational function with denominator 1.
    pub fn poly(num: CoefSeries) -> Self {
        RationalFn { num, den: CoefSeries::one() }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let d = self.den.eval_at(z);
        let n = self.num.eval_at(z);
        let scale = self.den.norm().max(1.0);
        if d.norm() < 1e-13 * scale {
            return Err(Error::Singularity(format!(
                "evaluation at {} is within {:.1e} of a pole",
                z,
                d.norm()
            )));
        }
        Ok(n / d)
    }

    /// Power-series coefficients at the origin, length `n`.
    ///
    /// Requires den(0) != 0. The usual long-division recurrence:
    /// q_k = (a_k - sum_{j=1..k} b_j q_{k-j}) / b_0.
    pub fn series_to(&self, n: usize) -> Result<CoefSeries> {
        let b0 = self.den.coeffs.first().copied().unwrap_or_default();
        if b0.norm() < 1e-14 * self.den.norm() {
            return Err(Error::Singularity("series expansion at a pole at the origin".into()));
        }
        let mut q = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = self
                .num
                .coeffs
                .get(k)
                .copied()
                .unwrap_or_default();
            for j in 1..=k.min(self.den.coeffs.len() - 1) {
                acc -= self.den.coeffs[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(CoefSeries::new(q))
    }

    /// Series expansion certified to have decayed: the trailing eighth of
    /// the coefficients must sit below `tail_tol` times the series scale.
    pub fn series_checked(&self, n: usize, tail_tol: f64) -> Result<CoefSeries> {
        let s = self.series_to(n)?;
        let scale = s.norm().max(1e-300);
        let tail_start = n - (n / 8).max(1);
        let tail = s.coeffs[tail_start..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if tail > tail_tol * scale {
            return Err(Error::Conditioning(format!(
                "series tail {:.3e} above {:.1e} at length {}; poles too close to the disk",
                tail / scale,
                tail_tol,
                n
            )));
        }
        Ok(s)
    }

    pub fn poles(&self) -> Result<Vec<C64>> {
        poly_roots(&self.den.coeffs)
    }

    /// Smallest pole modulus, or +inf for polynomial denominators of
    /// degree zero.
    pub fn min_pole_modulus(&self) -> Result<f64> {
        let p = self.poles()?;
        Ok(p.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min))
    }

    /// Values on the M-point boundary grid; errors if a pole sits on (or
    /// numerically on) the circle.
    pub fn boundary(&self, m: usize) -> Result<BoundarySamples> {
        let mut values = Vec::with_capacity(m);
        for k in 0..m {
            let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
            values.push(self.eval(z)?);
        }
        BoundarySamples::new(values)
    }

    pub fn scaled(&self, c: C64) -> Self {
        RationalFn { num: self.num.scaled(c), den: self.den.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn geometric_series_from_one_over_one_minus_half_z() {
        // 1/(1 - z/2) = sum (z/2)^k
        let r = RationalFn::new(
            CoefSeries::from_reals(&[1.0]),
            CoefSeries::from_reals(&[1.0, -0.5]),
        )
        .unwrap();
        let s = r.series_checked(64, 1e-14).unwrap();
        for (k, coef) in s.coeffs.iter().enumerate() {
            assert!((coef - c(0.5f64.powi(k as i32), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn eval_matches_series() {
        let r = RationalFn::new(
            CoefSeries::from_reals(&[2.0, -1.0, 0.5]),
            CoefSeries::from_reals(&[3.0, 0.0, 1.0]),
        )
        .unwrap();
        let z = c(0.3, -0.2);
        let direct = r.eval(z).unwrap();
        let series = r.series_to(200).unwrap().eval_at(z);
        assert!((direct - series).norm() < 1e-12);
    }

    #[test]
    fn pole_on_circle_rejected_for_boundary() {
        let r = RationalFn::new(
            CoefSeries::from_reals(&[1.0]),
            CoefSeries::from_reals(&[-1.0, 1.0]), // pole at z = 1
        )
        .unwrap();
        assert!(r.boundary(16).is_err());
    }

    #[test]
    fn slow_tail_flagged() {
        // Pole at 1.01: series converges but not to 1e-14 by length 64.
        let r = RationalFn::new(
            CoefSeries::from_reals(&[1.0]),
            CoefSeries::from_reals(&[1.0, -1.0 / 1.01]),
        )
        .unwrap();
        assert!(r.series_checked(64, 1e-14).is_err());
        assert!(r.series_checked(4096, 1e-14).is_ok());
    }

    #[test]
    fn poles_located() {
        let r = RationalFn::new(
            CoefSeries::from_reals(&[1.0]),
            CoefSeries::from_reals(&[10.0, -5.0]), // 5(2 - z)
        )
        .unwrap();
        let p = r.poles().unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((r.min_pole_modulus().unwrap() - 2.0).abs() < 1e-12);
    }
}
