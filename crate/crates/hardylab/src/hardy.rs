//! Truncated Taylor series, boundary grids, and the Cauchy kernel.
//!
//! A [`CoefSeries`] holds the first N Taylor coefficients of an analytic
//! function on the unit disk; a [`BoundarySamples`] holds its values on the
//! uniform M-point grid of the unit circle, M a power of two. The two
//! representations are exchanged by FFT with no normalization surprises:
//! `to_boundary` evaluates, `to_coef` integrates and keeps frequencies
//! `0..N-1` (negative frequencies are discarded, which is the discrete
//! analytic projection).
//!
//! Kernel convention: `cauchy_kernel(a, N)` is the series of
//! `k_a(z) = 1/(1 - a z)`, so the backward shift satisfies `S* k_a = a k_a`.
//! The reproducing identity for the inner product used here
//! (`h2_inner(f, g) = sum f_k conj(g_k)`) reads
//! `h2_inner(f, cauchy_kernel(conj(lambda), N)) = eval_disk(f, lambda)`.

use num_complex::Complex64;
use serde::de::{SeqAccess, Visitor};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::Result;

pub type C64 = Complex64;

/// Taylor coefficients `c_0 .. c_{N-1}` of an analytic function on the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefSeries {
    pub coeffs: Vec<C64>,
    /// Optional human-readable tag carried through reports; not serialized.
    pub label: Option<String>,
}

/// Values on the uniform boundary grid `zeta_j = exp(2 pi i j / M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    m: usize,
    pub values: Vec<C64>,
}

/// A point of the open unit disk, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(C64);

impl DiskPoint {
    pub fn new(lambda: C64) -> Result<Self> {
        if lambda.norm() < 1.0 {
            Ok(DiskPoint(lambda))
        } else {
            Err(Error::Domain(format!(
                "disk point requires |lambda| < 1, got |{}| = {}",
                lambda,
                lambda.norm()
            )))
        }
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

pub fn is_power_of_two(m: usize) -> bool {
    m != 0 && m & (m - 1) == 0
}

impl CoefSeries {
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        CoefSeries { coeffs, label: None }
    }

    pub fn from_reals(coeffs: &[f64]) -> Self {
        CoefSeries::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero(n: usize) -> Self {
        CoefSeries::new(vec![C64::new(0.0, 0.0); n.max(1)])
    }

    pub fn one() -> Self {
        CoefSeries::new(vec![C64::new(1.0, 0.0)])
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest index with a coefficient above `tol` in absolute value, or
    /// None for a numerically zero series.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    /// Index of the first coefficient above `tol`: the order of vanishing at 0.
    pub fn vanishing_order(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm() > tol)
    }

    pub fn truncated(&self, n: usize) -> CoefSeries {
        let mut c = self.coeffs.clone();
        c.truncate(n.max(1));
        c.resize(n.max(1), C64::new(0.0, 0.0));
        CoefSeries { coeffs: c, label: self.label.clone() }
    }

    pub fn padded(&self, n: usize) -> CoefSeries {
        let mut c = self.coeffs.clone();
        if c.len() < n {
            c.resize(n, C64::new(0.0, 0.0));
        }
        CoefSeries { coeffs: c, label: self.label.clone() }
    }

    /// Multiplication by z (forward shift). Grows the series by one slot.
    pub fn shift_up(&self) -> CoefSeries {
        let mut c = Vec::with_capacity(self.len() + 1);
        c.push(C64::new(0.0, 0.0));
        c.extend_from_slice(&self.coeffs);
        CoefSeries::new(c)
    }

    /// Backward shift S*: drop c_0, shift the rest down.
    pub fn shift_down(&self) -> CoefSeries {
        if self.len() == 1 {
            return CoefSeries::zero(1);
        }
        CoefSeries::new(self.coeffs[1..].to_vec())
    }

    pub fn scaled(&self, a: C64) -> CoefSeries {
        CoefSeries::new(self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn add(&self, other: &CoefSeries) -> CoefSeries {
        let n = self.len().max(other.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[i] += v;
        }
        for (i, v) in other.coeffs.iter().enumerate() {
            c[i] += v;
        }
        CoefSeries::new(c)
    }

    pub fn sub(&self, other: &CoefSeries) -> CoefSeries {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    /// Cauchy product, exact to roundoff (full length n + m - 1).
    pub fn mul(&self, other: &CoefSeries) -> CoefSeries {
        let (n, m) = (self.len(), other.len());
        let out_len = n + m - 1;
        // FFT path for large products, exact because the grid covers the
        // full product length (no aliasing).
        if n.saturating_mul(m) > 1 << 15 {
            let big = out_len.next_power_of_two();
            let fa = to_boundary(&self.padded(big), big).expect("pow2 grid");
            let fb = to_boundary(&other.padded(big), big).expect("pow2 grid");
            let prod: Vec<C64> =
                fa.values.iter().zip(&fb.values).map(|(a, b)| a * b).collect();
            let res = to_coef(&BoundarySamples::new(prod).expect("pow2 grid"), out_len)
                .expect("order <= grid");
            return res;
        }
        let mut c = vec![C64::new(0.0, 0.0); out_len];
        for i in 0..n {
            for j in 0..m {
                c[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        CoefSeries::new(c)
    }
}

impl BoundarySamples {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        let m = values.len();
        if !is_power_of_two(m) {
            return Err(Error::InvalidGrid { m, n: 0, reason: "grid length must be a power of two" });
        }
        Ok(BoundarySamples { m, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Grid nodes zeta_j = exp(2 pi i j / M).
    pub fn grid(m: usize) -> Vec<C64> {
        (0..m)
            .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
            .collect()
    }

    /// Sample a function of the boundary point on the M-grid.
    pub fn from_fn(m: usize, f: impl Fn(C64) -> C64) -> Result<Self> {
        if !is_power_of_two(m) {
            return Err(Error::InvalidGrid { m, n: 0, reason: "grid length must be a power of two" });
        }
        Ok(BoundarySamples { m, values: Self::grid(m).into_iter().map(f).collect() })
    }

    /// Mean-square norm (1/M sum |v|^2)^(1/2); equals the coefficient norm
    /// of any series of order <= M by Parseval.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.m as f64).sqrt()
    }
}

fn fft_in_place(buf: &mut [C64], inverse: bool) {
    let mut planner = rustfft::FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

/// Evaluate a series on the M-point boundary grid. M must be a power of two
/// with M >= series length.
pub fn to_boundary(c: &CoefSeries, m: usize) -> Result<BoundarySamples> {
    let n = c.len();
    if !is_power_of_two(m) {
        return Err(Error::InvalidGrid { m, n, reason: "grid length must be a power of two" });
    }
    if m < n {
        return Err(Error::InvalidGrid { m, n, reason: "grid must be at least the series order" });
    }
    let mut buf = vec![C64::new(0.0, 0.0); m];
    buf[..n].copy_from_slice(&c.coeffs);
    // Unnormalized inverse FFT = sum_k c_k exp(+2 pi i jk / M): evaluation.
    fft_in_place(&mut buf, true);
    Ok(BoundarySamples { m, values: buf })
}

/// Recover the first `n` Taylor coefficients from boundary samples.
/// Frequencies n..M-1 (in particular all negative frequencies) are
/// discarded: this is the discrete Riesz/analytic projection.
pub fn to_coef(s: &BoundarySamples, n: usize) -> Result<CoefSeries> {
    if n == 0 || n > s.m {
        return Err(Error::InvalidOrder(format!(
            "requested order {} outside 1..={}",
            n, s.m
        )));
    }
    let mut buf = s.values.clone();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / s.m as f64;
    Ok(CoefSeries::new(buf[..n].iter().map(|c| c * scale).collect()))
}

/// H^2 inner product sum f_k conj(g_k); the shorter series is zero-padded.
pub fn h2_inner(f: &CoefSeries, g: &CoefSeries) -> C64 {
    let n = f.len().min(g.len());
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        acc += f.coeffs[k] * g.coeffs[k].conj();
    }
    acc
}

/// Series of k_a(z) = 1/(1 - a z): coefficients a^k, k < n. Requires |a| < 1.
pub fn cauchy_kernel(a: C64, n: usize) -> Result<CoefSeries> {
    if a.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "cauchy_kernel parameter must satisfy |a| < 1, got {}",
            a.norm()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidOrder("kernel order must be positive".into()));
    }
    let mut c = Vec::with_capacity(n);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..n {
        c.push(p);
        p *= a;
    }
    Ok(CoefSeries::new(c))
}

/// Horner evaluation at an interior point.
pub fn eval_disk(f: &CoefSeries, lambda: DiskPoint) -> C64 {
    let z = lambda.value();
    let mut acc = C64::new(0.0, 0.0);
    for c in f.coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Evaluate at an arbitrary complex point (used for boundary and exterior
/// values of polynomials; no domain restriction).
pub fn eval_at(f: &CoefSeries, z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for c in f.coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

impl CoefSeries {
    /// Method form of [`eval_at`].
    pub fn eval_at(&self, z: C64) -> C64 {
        eval_at(self, z)
    }
}

// --- serde: CoefSeries <-> [[re, im], ...] ---------------------------------

impl Serialize for CoefSeries {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

struct CoefVisitor;

impl<'de> Visitor<'de> for CoefVisitor {
    type Value = CoefSeries;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("an array of [re, im] pairs")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<CoefSeries, A::Error> {
        let mut coeffs = Vec::new();
        while let Some(pair) = seq.next_element::<[f64; 2]>()? {
            coeffs.push(C64::new(pair[0], pair[1]));
        }
        if coeffs.is_empty() {
            return Err(serde::de::Error::custom("series needs at least one coefficient"));
        }
        Ok(CoefSeries { coeffs, label: None })
    }
}

impl<'de> Deserialize<'de> for CoefSeries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<CoefSeries, D::Error> {
        de.deserialize_seq(CoefVisitor)
    }
}

// --- serde: BoundarySamples <-> {"M": ..., "values": [[re, im], ...]} ------

impl Serialize for BoundarySamples {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("BoundarySamples", 2)?;
        st.serialize_field("M", &self.m)?;
        let pairs: Vec<[f64; 2]> = self.values.iter().map(|c| [c.re, c.im]).collect();
        st.serialize_field("values", &pairs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for BoundarySamples {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<BoundarySamples, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(rename = "M")]
            m: usize,
            values: Vec<[f64; 2]>,
        }
        let raw = Raw::deserialize(de)?;
        if raw.values.len() != raw.m {
            return Err(serde::de::Error::custom(format!(
                "M={} disagrees with {} values",
                raw.m,
                raw.values.len()
            )));
        }
        let values: Vec<C64> = raw.values.iter().map(|p| C64::new(p[0], p[1])).collect();
        BoundarySamples::new(values).map_err(serde::de::Error::custom)
    }
}
