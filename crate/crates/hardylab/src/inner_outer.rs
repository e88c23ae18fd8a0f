//! Inner and outer functions on the disk.
//!
//! Inner functions are held structurally: a unimodular constant, a finite
//! zero multiset (the Blaschke part, origin zeros included), and a finite
//! list of boundary atoms (the singular part). Outer functions are held as
//! coefficient series normalized to a real positive value at the origin,
//! built from boundary modulus data through the Herglotz transform.
//!
//! The gcd / divisibility lattice on structural inner functions is exact
//! up to a pairing tolerance; no root finding is involved once the
//! structure is known.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hardy::{to_coef, BoundarySamples, CoefSeries};
use crate::roots::{poly_from_roots, poly_roots};
use crate::Result;

/// Zeros closer than this pair up in gcd / divisibility computations.
pub const ZERO_PAIR_TOL: f64 = 1e-8;

/// Inner zeros must sit at least this far from the unit circle; closer
/// configurations are refused rather than silently mis-classified.
pub const CIRCLE_MARGIN: f64 = 1e-3;

mod c64_pair {
    use num_complex::Complex64 as C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &C64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

mod c64_vec {
    use num_complex::Complex64 as C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// One point mass of the singular part: a boundary point and its weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularAtom {
    #[serde(with = "c64_pair")]
    pub zeta: C64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerFunction {
    #[serde(with = "c64_pair")]
    pub constant: C64,
    #[serde(with = "c64_vec")]
    pub zeros: Vec<C64>,
    pub atoms: Vec<SingularAtom>,
}

impl InnerFunction {
    pub fn new(constant: C64, zeros: Vec<C64>, atoms: Vec<SingularAtom>) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "inner constant must be unimodular, |c| = {}",
                constant.norm()
            )));
        }
        for z in &zeros {
            if z.norm() > 1.0 - CIRCLE_MARGIN {
                return Err(Error::Domain(format!(
                    "inner zero at {} too close to the circle (margin {})",
                    z, CIRCLE_MARGIN
                )));
            }
        }
        let mut fixed_atoms = Vec::with_capacity(atoms.len());
        for a in atoms {
            if a.mass <= 0.0 {
                return Err(Error::Domain(format!("atom mass {} must be positive", a.mass)));
            }
            if (a.zeta.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!("atom at {} is off the circle", a.zeta)));
            }
            fixed_atoms.push(SingularAtom { zeta: a.zeta / a.zeta.norm(), mass: a.mass });
        }
        Ok(InnerFunction {
            constant: constant / constant.norm(),
            zeros,
            atoms: fixed_atoms,
        })
    }

    /// The constant function 1.
    pub fn one() -> Self {
        InnerFunction { constant: C64::new(1.0, 0.0), zeros: vec![], atoms: vec![] }
    }

    /// The coordinate function z.
    pub fn shift() -> Self {
        InnerFunction {
            constant: C64::new(1.0, 0.0),
            zeros: vec![C64::new(0.0, 0.0)],
            atoms: vec![],
        }
    }

    pub fn blaschke(zeros: Vec<C64>) -> Result<Self> {
        InnerFunction::new(C64::new(1.0, 0.0), zeros, vec![])
    }

    pub fn singular(atoms: Vec<SingularAtom>) -> Result<Self> {
        InnerFunction::new(C64::new(1.0, 0.0), vec![], atoms)
    }

    pub fn is_one(&self) -> bool {
        self.zeros.is_empty()
            && self.atoms.is_empty()
            && (self.constant - C64::new(1.0, 0.0)).norm() < 1e-12
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Evaluate at |z| <= 1. Boundary points are allowed except within
    /// 1e-9 of a singular atom.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("inner evaluation outside the closed disk: {}", z)));
        }
        let mut acc = self.constant;
        for r in &self.zeros {
            if r.norm() < 1e-14 {
                acc *= z;
            } else {
                let denom = C64::new(1.0, 0.0) - r.conj() * z;
                acc *= (r.norm() / r) * (r - z) / denom;
            }
        }
        for a in &self.atoms {
            let d = a.zeta - z;
            if d.norm() < 1e-9 {
                return Err(Error::Singularity(format!(
                    "evaluation at {} hits the singular atom at {}",
                    z, a.zeta
                )));
            }
            acc *= (-a.mass * (a.zeta + z) / d).exp();
        }
        Ok(acc)
    }

    /// Power-series coefficients, length n.
    ///
    /// Blaschke factors expand through the geometric series; singular
    /// factors through the series exponential of the atom kernel.
    pub fn series_to(&self, n: usize) -> Result<CoefSeries> {
        let mut acc = CoefSeries::new(vec![self.constant]);
        for r in &self.zeros {
            let factor = if r.norm() < 1e-14 {
                CoefSeries::from_reals(&[0.0, 1.0])
            } else {
                // (|r|/r)(r - z) * sum_k (conj(r) z)^k
                let phase = r.norm() / r;
                let mut c = vec![C64::new(0.0, 0.0); n];
                let mut p = C64::new(1.0, 0.0); // conj(r)^k
                for k in 0..n {
                    c[k] = phase * r * p;
                    if k > 0 {
                        c[k] -= phase * p / r.conj();
                    }
                    p *= r.conj();
                }
                CoefSeries::new(c)
            };
            acc = acc.mul(&factor).truncated(n);
        }
        if !self.atoms.is_empty() {
            // F(z) = -sum mu (zeta + z)/(zeta - z)
            //      = -sum mu (1 + 2 sum_{k>=1} (z/zeta)^k)
            let mut f = vec![C64::new(0.0, 0.0); n];
            for a in &self.atoms {
                f[0] -= C64::new(a.mass, 0.0);
                let mut p = C64::new(1.0, 0.0);
                for fk in f.iter_mut().take(n).skip(1) {
                    p /= a.zeta;
                    *fk -= 2.0 * a.mass * p;
                }
            }
            let e = exp_series(&f, n);
            acc = acc.mul(&e).truncated(n);
        }
        Ok(acc.padded(n))
    }

    /// Pointwise product, merging coincident atoms.
    pub fn mul(&self, other: &InnerFunction) -> InnerFunction {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            match atoms.iter_mut().find(|b| (b.zeta - a.zeta).norm() < ZERO_PAIR_TOL) {
                Some(b) => b.mass += a.mass,
                None => atoms.push(a.clone()),
            }
        }
        InnerFunction { constant: self.constant * other.constant, zeros, atoms }
    }
}

/// Greatest common inner divisor, normalized to constant 1.
///
/// Zeros pair within [`ZERO_PAIR_TOL`] as multisets (the paired values are
/// averaged); common atoms keep the smaller mass.
pub fn inner_gcd(a: &InnerFunction, b: &InnerFunction) -> InnerFunction {
    let mut remaining: Vec<C64> = b.zeros.clone();
    let mut zeros = Vec::new();
    for z in &a.zeros {
        if let Some(i) = remaining.iter().position(|w| (w - z).norm() < ZERO_PAIR_TOL) {
            zeros.push((z + remaining[i]) / 2.0);
            remaining.swap_remove(i);
        }
    }
    let mut atoms = Vec::new();
    for x in &a.atoms {
        if let Some(y) = b.atoms.iter().find(|y| (y.zeta - x.zeta).norm() < ZERO_PAIR_TOL) {
            atoms.push(SingularAtom { zeta: x.zeta, mass: x.mass.min(y.mass) });
        }
    }
    InnerFunction { constant: C64::new(1.0, 0.0), zeros, atoms }
}

/// Does `a` divide `b` in the inner-function lattice?
pub fn inner_divides(a: &InnerFunction, b: &InnerFunction) -> bool {
    let mut remaining: Vec<C64> = b.zeros.clone();
    for z in &a.zeros {
        match remaining.iter().position(|w| (w - z).norm() < ZERO_PAIR_TOL) {
            Some(i) => {
                remaining.swap_remove(i);
            }
            None => return false,
        }
    }
    for x in &a.atoms {
        match b.atoms.iter().find(|y| (y.zeta - x.zeta).norm() < ZERO_PAIR_TOL) {
            Some(y) if y.mass >= x.mass - 1e-12 => {}
            _ => return false,
        }
    }
    true
}

/// Exact quotient b / a when a divides b; an error otherwise.
pub fn inner_quotient(b: &InnerFunction, a: &InnerFunction) -> Result<InnerFunction> {
    if !inner_divides(a, b) {
        return Err(Error::Domain("inner quotient requested for a non-divisor".into()));
    }
    let mut zeros: Vec<C64> = b.zeros.clone();
    for z in &a.zeros {
        let i = zeros
            .iter()
            .position(|w| (w - z).norm() < ZERO_PAIR_TOL)
            .expect("divisibility was just checked");
        zeros.swap_remove(i);
    }
    let mut atoms = Vec::new();
    for y in &b.atoms {
        let used = a
            .atoms
            .iter()
            .find(|x| (x.zeta - y.zeta).norm() < ZERO_PAIR_TOL)
            .map(|x| x.mass)
            .unwrap_or(0.0);
        let mass = y.mass - used;
        if mass > 1e-12 {
            atoms.push(SingularAtom { zeta: y.zeta, mass });
        }
    }
    Ok(InnerFunction { constant: b.constant / a.constant, zeros, atoms })
}

// --- outer functions --------------------------------------------------------

/// Analytic function with no zeros in the disk, O(0) real positive,
/// recovered from its boundary modulus.
///
/// Both the truncated power series and the Herglotz exponent F with
/// O = exp(F) are kept. For a modulus with kinks the series coefficients
/// decay like 1/k^2 and no truncation matches the boundary well, while
/// the exponent reproduces the modulus at the construction grid points
/// to roundoff; boundary work should go through [`Self::boundary`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterFunction {
    pub coef: CoefSeries,
    pub exponent: CoefSeries,
}

impl OuterFunction {
    pub fn eval(&self, z: C64) -> C64 {
        self.coef.eval_at(z)
    }

    /// Boundary samples of exp(F) on an m-point grid. Exact in the grid
    /// sense whenever m is at least the exponent length.
    pub fn boundary(&self, m: usize) -> Result<BoundarySamples> {
        if m < self.exponent.len() {
            return Err(Error::InvalidGrid {
                m,
                n: self.exponent.len(),
                reason: "grid too coarse for the stored exponent".into(),
            });
        }
        let f = crate::hardy::to_boundary(&self.exponent, m)?;
        BoundarySamples::new(f.values.iter().map(|z| z.exp()).collect())
    }
}

/// Series exponential: exact coefficients of exp(f) through degree n-1,
/// by the derivative recurrence o_n = (1/n) sum_{k=1..n} k f_k o_{n-k}.
pub fn exp_series(f: &[C64], n: usize) -> CoefSeries {
    if n == 0 {
        return CoefSeries::zero(0);
    }
    let f0 = f.first().copied().unwrap_or_default();
    let mut o = vec![C64::new(0.0, 0.0); n];
    o[0] = f0.exp();
    let top = f.len().saturating_sub(1);
    for m in 1..n {
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..=m.min(top) {
            acc += (k as f64) * f[k] * o[m - k];
        }
        o[m] = acc / m as f64;
    }
    CoefSeries::new(o)
}

/// The outer function with prescribed boundary modulus.
///
/// `w` holds nonnegative modulus samples at the M-th roots of unity
/// (M a power of two). Values are floored at 1e-14 of the max before
/// taking logs. The returned series has `n_out` coefficients.
///
/// Construction: discrete Herglotz transform of log w. Let u_k be the
/// forward DFT of log w divided by M; then
///   F(z) = u_0 + 2 sum_{0<k<M/2} u_k z^k + u_{M/2} z^{M/2}
/// has Re F = log w exactly at every grid point (the Nyquist coefficient
/// enters once, not doubled, which is what makes the grid identity exact),
/// and O = exp(F) through the series exponential.
pub fn outer_from_modulus(w: &[f64], n_out: usize) -> Result<OuterFunction> {
    let m = w.len();
    if m < 4 || !m.is_power_of_two() {
        return Err(Error::InvalidGrid {
            m,
            n: n_out,
            reason: "modulus grid must be a power of two, at least 4".into(),
        });
    }
    let top = w.iter().cloned().fold(0.0f64, f64::max);
    if !top.is_finite() || top <= 0.0 {
        return Err(Error::Degenerate("modulus data has no positive finite values".into()));
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Domain("modulus samples must be finite and nonnegative".into()));
    }
    let floor = 1e-14 * top;
    let logs: Vec<C64> = w.iter().map(|&x| C64::new(x.max(floor).ln(), 0.0)).collect();
    let samples = BoundarySamples::new(logs)?;
    let u = to_coef(&samples, m / 2 + 1)?;
    let mut f = vec![C64::new(0.0, 0.0); m / 2 + 1];
    // Real input makes u_0 and the Nyquist coefficient real; drop the
    // roundoff imaginary parts so O(0) comes out exactly real positive.
    f[0] = C64::new(u.coeffs[0].re, 0.0);
    for k in 1..m / 2 {
        f[k] = 2.0 * u.coeffs[k];
    }
    f[m / 2] = C64::new(u.coeffs[m / 2].re, 0.0);
    let exponent = CoefSeries::new(f.clone());
    let o = exp_series(&f, n_out);
    Ok(OuterFunction { coef: o, exponent })
}

/// The pair (u, v) attached to f: v is outer with |v| = min(1, 1/|f|) and
/// v(0) > 0, and u = f v has |u| = min(1, |f|). Both are returned as
/// length-`n_out` series; `m` is the boundary grid used to build v.
pub fn uv_pair(f: &CoefSeries, m: usize, n_out: usize) -> Result<(CoefSeries, OuterFunction)> {
    let fb = crate::hardy::to_boundary(f, m)?;
    let w: Vec<f64> = fb.values.iter().map(|z| (1.0 / z.norm()).min(1.0)).collect();
    let v = outer_from_modulus(&w, n_out)?;
    let u = f.mul(&v.coef).truncated(n_out);
    Ok((u, v))
}

// --- polynomial factoring ----------------------------------------------------

/// Inner-outer factorization of a polynomial.
///
/// Roots strictly inside the disk move into the Blaschke part; the rest
/// stay in an outer polynomial normalized to a real positive value at 0.
/// Roots within [`CIRCLE_MARGIN`] of the circle are refused: the side
/// cannot be certified at working precision.
pub fn poly_inner_outer(p: &CoefSeries) -> Result<(InnerFunction, CoefSeries)> {
    if p.norm() == 0.0 {
        return Err(Error::Degenerate("factoring the zero polynomial".into()));
    }
    let roots = poly_roots(&p.coeffs)?;
    for r in &roots {
        if (r.norm() - 1.0).abs() < CIRCLE_MARGIN {
            return Err(Error::Conditioning(format!(
                "root at {} lies within {} of the unit circle; inner/outer side is ambiguous",
                r, CIRCLE_MARGIN
            )));
        }
    }
    let inside: Vec<C64> = roots.iter().filter(|r| r.norm() < 1.0).cloned().collect();
    let outside: Vec<C64> = roots.iter().filter(|r| r.norm() >= 1.0).cloned().collect();

    // Leading coefficient of p at its true degree.
    let deg = roots.len();
    let lead = p.coeffs[deg];

    // Each inside factor (z - r) = -(r/|r|) b_r(z) (1 - conj(r) z) for
    // r != 0, and z itself for r = 0. Collect the outer remnants.
    let mut outer = CoefSeries::new(vec![lead]);
    let mut phase = C64::new(1.0, 0.0);
    for r in &inside {
        if r.norm() < 1e-14 {
            continue; // the factor is exactly b_0(z) = z, nothing outer
        }
        phase *= -(r / r.norm());
        outer = outer.mul(&CoefSeries::new(vec![C64::new(1.0, 0.0), -r.conj()]));
    }
    outer = outer.scaled(phase);
    for r in &outside {
        outer = outer.mul(&CoefSeries::new(vec![-r, C64::new(1.0, 0.0)]));
    }

    // Rotate so outer(0) is real positive; the rotation joins the inner
    // constant.
    let o0 = outer.coeffs[0];
    if o0.norm() == 0.0 {
        return Err(Error::Degenerate("outer part vanished at the origin".into()));
    }
    let rot = o0 / o0.norm();
    let outer = outer.scaled(rot.inv());
    let inner = InnerFunction::new(rot, inside, vec![])?;

    // Reconstruction check at deterministic interior points.
    let scale = p.norm().max(1.0);
    for k in 0..24 {
        let z = C64::from_polar(0.15 + 0.03 * k as f64, 0.7 * k as f64);
        let err = (inner.eval(z)? * outer.eval_at(z) - p.eval_at(z)).norm();
        if err > 1e-8 * scale {
            return Err(Error::NumericalFailure {
                op: "poly_inner_outer",
                report: format!("reconstruction error {:.3e} at {}", err / scale, z),
            });
        }
    }
    Ok((inner, outer))
}

/// Convenience: expand a Blaschke numerator polynomial prod (z - r_j) from
/// the zero list of an inner function (constant ignored).
pub fn blaschke_numerator(inner: &InnerFunction) -> CoefSeries {
    poly_from_roots(&inner.zeros, C64::new(1.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::to_boundary;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn single_atom_value_at_origin() {
        let s = InnerFunction::singular(vec![SingularAtom { zeta: c(1.0, 0.0), mass: 1.0 }])
            .unwrap();
        let v = s.eval(c(0.0, 0.0)).unwrap();
        assert!((v - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_unimodular_on_boundary() {
        let inner = InnerFunction::new(
            c(0.6, 0.8),
            vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.0, 0.0)],
            vec![SingularAtom { zeta: c(0.0, 1.0), mass: 0.37 }],
        )
        .unwrap();
        for k in 0..64 {
            let z = C64::from_polar(1.0, 0.09 + 0.097 * k as f64);
            let v = inner.eval(z).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12, "|inner| = {} at {}", v.norm(), z);
        }
    }

    #[test]
    fn atom_evaluation_guarded() {
        let s = InnerFunction::singular(vec![SingularAtom { zeta: c(1.0, 0.0), mass: 0.5 }])
            .unwrap();
        assert!(matches!(s.eval(c(1.0, 0.0)), Err(Error::Singularity(_))));
    }

    #[test]
    fn series_matches_eval() {
        let inner = InnerFunction::new(
            c(1.0, 0.0),
            vec![c(0.4, -0.2), c(0.0, 0.0)],
            vec![SingularAtom { zeta: c(-1.0, 0.0), mass: 0.2 }],
        )
        .unwrap();
        let s = inner.series_to(256).unwrap();
        for k in 0..8 {
            let z = C64::from_polar(0.25, 0.8 * k as f64);
            let direct = inner.eval(z).unwrap();
            assert!((s.eval_at(z) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn factor_z_times_two_minus_z() {
        // p = z(2 - z) = 2z - z^2: inner part z, outer part 2 - z.
        let p = CoefSeries::from_reals(&[0.0, 2.0, -1.0]);
        let (inner, outer) = poly_inner_outer(&p).unwrap();
        assert_eq!(inner.zeros.len(), 1);
        assert!(inner.zeros[0].norm() < 1e-12);
        assert!((inner.constant - c(1.0, 0.0)).norm() < 1e-12);
        assert!((outer.coeffs[0] - c(2.0, 0.0)).norm() < 1e-10);
        assert!((outer.coeffs[1] - c(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn factor_with_interior_root() {
        // p = (1 - 2z)(z - 2) has a root at 1/2 (inner) and 2 (outer).
        let p = CoefSeries::from_reals(&[-2.0, 5.0, -2.0]);
        let (inner, outer) = poly_inner_outer(&p).unwrap();
        assert_eq!(inner.zeros.len(), 1);
        assert!((inner.zeros[0] - c(0.5, 0.0)).norm() < 1e-10);
        // outer(0) real positive
        assert!(outer.coeffs[0].im.abs() < 1e-12);
        assert!(outer.coeffs[0].re > 0.0);
        // modulus agreement on the circle
        let ob = to_boundary(&outer.padded(8), 64).unwrap();
        let pb = to_boundary(&p.padded(8), 64).unwrap();
        for (a, b) in ob.values.iter().zip(&pb.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn near_circle_root_refused() {
        let p = poly_from_roots(&[c(0.9999, 0.0)], c(1.0, 0.0));
        assert!(matches!(poly_inner_outer(&p), Err(Error::Conditioning(_))));
    }

    #[test]
    fn constant_modulus_outer() {
        let o = outer_from_modulus(&vec![2.0; 64], 32).unwrap();
        assert!((o.coef.coeffs[0] - c(2.0, 0.0)).norm() < 1e-13);
        for k in 1..32 {
            assert!(o.coef.coeffs[k].norm() < 1e-13);
        }
    }

    #[test]
    fn polynomial_modulus_recovered() {
        // w = |1 - 0.5 zeta| should give back O = 1 - 0.5 z.
        let m = 256;
        let w: Vec<f64> = (0..m)
            .map(|k| {
                let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
                (c(1.0, 0.0) - 0.5 * z).norm()
            })
            .collect();
        let o = outer_from_modulus(&w, 64).unwrap();
        assert!((o.coef.coeffs[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((o.coef.coeffs[1] - c(-0.5, 0.0)).norm() < 1e-12);
        for k in 2..64 {
            assert!(o.coef.coeffs[k].norm() < 1e-12, "coef {} = {}", k, o.coef.coeffs[k]);
        }
    }

    #[test]
    fn kinked_modulus_on_grid() {
        // w = min(1, 1/|e^zeta|) has a kink; grid modulus must still be
        // reproduced once the series is long enough.
        let m = 512;
        let w: Vec<f64> = (0..m)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                (-t.cos()).exp().min(1.0)
            })
            .collect();
        let o = outer_from_modulus(&w, 4 * m).unwrap();
        let ob = to_boundary(&o.coef, 4 * m).unwrap();
        let mut worst = 0.0f64;
        for k in 0..m {
            let v = ob.values[4 * k].norm();
            worst = worst.max((v - w[k]).abs());
        }
        assert!(worst < 1e-6, "worst grid modulus error {:.3e}", worst);
    }

    #[test]
    fn uv_pair_moduli() {
        let f = CoefSeries::from_reals(&[-1.0, 2.0]); // 2z - 1
        let (u, v) = uv_pair(&f, 256, 512).unwrap();
        let ub = to_boundary(&u.padded(1024), 1024).unwrap();
        let vb = to_boundary(&v.coef.padded(1024), 1024).unwrap();
        for k in 0..1024 {
            let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 1024.0);
            let fv = f.eval_at(z).norm();
            assert!((ub.values[k].norm() - fv.min(1.0)).abs() < 1e-6);
            assert!((vb.values[k].norm() - (1.0 / fv).min(1.0)).abs() < 1e-6);
        }
        // v(0) real positive
        assert!(v.coef.coeffs[0].im.abs() < 1e-12);
        assert!(v.coef.coeffs[0].re > 0.0);
    }

    #[test]
    fn gcd_and_divisibility() {
        let a = InnerFunction::new(
            c(1.0, 0.0),
            vec![c(0.3, 0.0), c(0.0, 0.0), c(-0.2, 0.4)],
            vec![SingularAtom { zeta: c(1.0, 0.0), mass: 0.5 }],
        )
        .unwrap();
        let b = InnerFunction::new(
            c(0.0, 1.0),
            vec![c(0.3, 0.0), c(0.5, 0.5)],
            vec![
                SingularAtom { zeta: c(1.0, 0.0), mass: 0.2 },
                SingularAtom { zeta: c(-1.0, 0.0), mass: 1.0 },
            ],
        )
        .unwrap();
        let g = inner_gcd(&a, &b);
        assert_eq!(g.zeros.len(), 1);
        assert!((g.zeros[0] - c(0.3, 0.0)).norm() < 1e-12);
        assert_eq!(g.atoms.len(), 1);
        assert!((g.atoms[0].mass - 0.2).abs() < 1e-12);
        assert!(inner_divides(&g, &a));
        assert!(inner_divides(&g, &b));
        assert!(!inner_divides(&a, &b));
        let q = inner_quotient(&a, &g).unwrap();
        assert!(inner_divides(&q, &a));
        assert_eq!(q.zeros.len(), 2);
        assert!((q.atoms[0].mass - 0.3).abs() < 1e-12);
    }

    #[test]
    fn quotient_rebuilds_product() {
        let g = InnerFunction::blaschke(vec![c(0.1, 0.2)]).unwrap();
        let q = InnerFunction::new(
            c(0.0, -1.0),
            vec![c(-0.4, 0.0)],
            vec![SingularAtom { zeta: c(0.0, 1.0), mass: 0.7 }],
        )
        .unwrap();
        let prod = g.mul(&q);
        let back = inner_quotient(&prod, &g).unwrap();
        // same value at test points
        for k in 0..6 {
            let z = C64::from_polar(0.3, 1.1 * k as f64);
            let lhs = back.eval(z).unwrap();
            let rhs = q.eval(z).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn serde_shape() {
        let inner = InnerFunction::new(
            c(1.0, 0.0),
            vec![c(0.5, 0.0)],
            vec![SingularAtom { zeta: c(1.0, 0.0), mass: 0.25 }],
        )
        .unwrap();
        let s = serde_json::to_string(&inner).unwrap();
        assert_eq!(
            s,
            r#"{"constant":[1.0,0.0],"zeros":[[0.5,0.0]],"atoms":[{"zeta":[1.0,0.0],"mass":0.25}]}"#
        );
        let back: InnerFunction = serde_json::from_str(&s).unwrap();
        assert!((back.constant - inner.constant).norm() < 1e-15);
        assert_eq!(back.zeros.len(), 1);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        assert!(InnerFunction::blaschke(vec![c(0.9995, 0.0)]).is_err());
        assert!(InnerFunction::new(c(0.5, 0.0), vec![], vec![]).is_err());
        assert!(InnerFunction::singular(vec![SingularAtom { zeta: c(1.0, 0.0), mass: -1.0 }])
            .is_err());
        assert!(InnerFunction::singular(vec![SingularAtom { zeta: c(0.5, 0.0), mass: 1.0 }])
            .is_err());
    }
}
