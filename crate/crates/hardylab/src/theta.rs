//! Vector-valued model spaces built from a column-inner pair
//! Theta = (theta_1, theta_2): the subspace of H2 x H2 orthogonal to
//! { theta_1 u (+) theta_2 u : u in H2 }, the compressed shift on it, and
//! the probes that distinguish these operators from the plain shift.
//!
//! Working representation: clear denominators. With theta_j = p_j / q
//! (q a polynomial with all zeros outside the closed disk), a polynomial
//! pair (f_1, f_2) of degree < N lies in the model space exactly when
//! T_{p_1}^* f_1 + T_{p_2}^* f_2 = 0, a finite linear condition with no
//! truncation error. The kernel of that constraint, extracted bottom-up
//! into a degree-graded orthonormal basis, gives matrices whose adjoint
//! block is the exact restriction of the true adjoint: the graded basis
//! spans an invariant subspace for it. Forward-direction columns are
//! trusted up to a guard band that accounts for how fast tails of true
//! model-space elements decay (set by the pole radius of Theta).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hardy::{to_boundary, to_coef, BoundarySamples, CoefSeries};
use crate::inner_outer::{inner_gcd, poly_inner_outer, InnerFunction};
use crate::linalg::{self, CMat, CVec};
use crate::model_ops::{
    calculus_length, functional_calculus, numeric_kernel, EigenvectorField, OperatorMatrix,
};
use crate::rational::RationalFn;
use crate::roots::poly_roots;
use crate::Result;

/// Poles of the column entries must clear the circle by this margin.
const POLE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaWire {
    theta1: RationalFn,
    theta2: RationalFn,
}

/// A column-inner pair with cleared-denominator data cached.
#[derive(Debug, Clone)]
pub struct Theta {
    pub theta1: RationalFn,
    pub theta2: RationalFn,
    /// theta_j = p_j / q with q zero-free on the closed disk.
    pub p1: CoefSeries,
    pub p2: CoefSeries,
    pub q: CoefSeries,
    /// max polynomial degree of p_1, p_2.
    pub d: usize,
    /// Smallest pole modulus (infinite for polynomial entries).
    pub pole_radius: f64,
}

impl Serialize for Theta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ThetaWire { theta1: self.theta1.clone(), theta2: self.theta2.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = ThetaWire::deserialize(d)?;
        Theta::new(w.theta1, w.theta2).map_err(serde::de::Error::custom)
    }
}

impl Theta {
    /// Validate and cache the cleared form. Poles must sit outside the
    /// closed disk and the column must be inner: |theta_1|^2 + |theta_2|^2
    /// equal to 1 on the circle.
    pub fn new(theta1: RationalFn, theta2: RationalFn) -> Result<Self> {
        let r1 = theta1.min_pole_modulus()?;
        let r2 = theta2.min_pole_modulus()?;
        let pole_radius = r1.min(r2);
        if pole_radius <= 1.0 + POLE_MARGIN {
            return Err(Error::Domain(format!(
                "column entries have a pole at modulus {:.6}, inside the working margin",
                pole_radius
            )));
        }
        // Clear denominators: q = den1 * den2, p_j = num_j * (other den).
        let q = theta1.den.mul(&theta2.den);
        let p1 = theta1.num.mul(&theta2.den);
        let p2 = theta2.num.mul(&theta1.den);
        let d = p1
            .degree(1e-12 * p1.norm().max(1.0))
            .unwrap_or(0)
            .max(p2.degree(1e-12 * p2.norm().max(1.0)).unwrap_or(0));
        let t = Theta { theta1, theta2, p1, p2, q, d, pole_radius };
        let resid = t.column_residual(512)?;
        if resid > 1e-10 {
            return Err(Error::Domain(format!(
                "column is not inner: modulus defect {:.3e} on the circle",
                resid
            )));
        }
        Ok(t)
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["paper-example", "common-factor-z"]
    }

    /// Named pairs used throughout the tests and the command line.
    ///
    /// paper-example:   theta_1 = 3z/5,    theta_2 = 4(2z-1)/(5(2-z));
    ///                  entries share no inner factor.
    /// common-factor-z: the same column multiplied by z, so both entries
    ///                  vanish at the origin.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper-example" => Theta::new(
                RationalFn::poly(CoefSeries::from_reals(&[0.0, 0.6])),
                RationalFn::new(
                    CoefSeries::from_reals(&[-4.0, 8.0]),
                    CoefSeries::from_reals(&[10.0, -5.0]),
                )?,
            ),
            "common-factor-z" => Theta::new(
                RationalFn::poly(CoefSeries::from_reals(&[0.0, 0.0, 0.6])),
                RationalFn::new(
                    CoefSeries::from_reals(&[0.0, -4.0, 8.0]),
                    CoefSeries::from_reals(&[10.0, -5.0]),
                )?,
            ),
            other => Err(Error::Config(format!(
                "unknown column preset '{}'; available: {:?}",
                other,
                Theta::preset_names()
            ))),
        }
    }

    pub fn eval(&self, z: C64) -> Result<(C64, C64)> {
        Ok((self.theta1.eval(z)?, self.theta2.eval(z)?))
    }

    /// Largest deviation of |theta_1|^2 + |theta_2|^2 from 1 on the
    /// M-point boundary grid.
    pub fn column_residual(&self, m: usize) -> Result<f64> {
        let b1 = self.theta1.boundary(m)?;
        let b2 = self.theta2.boundary(m)?;
        let mut worst = 0.0f64;
        for (a, b) in b1.values.iter().zip(&b2.values) {
            worst = worst.max((a.norm_sqr() + b.norm_sqr() - 1.0).abs());
        }
        Ok(worst)
    }
}

// --- coordinate helpers -------------------------------------------------------

/// Interleave a pair of series into degree-graded coordinates:
/// slot 2k holds (f_1)_k, slot 2k+1 holds (f_2)_k.
pub fn pair_to_vec(f1: &CoefSeries, f2: &CoefSeries, n: usize) -> CVec {
    let mut x = CVec::zeros(2 * n);
    for k in 0..n {
        if let Some(c) = f1.coeffs.get(k) {
            x[2 * k] = *c;
        }
        if let Some(c) = f2.coeffs.get(k) {
            x[2 * k + 1] = *c;
        }
    }
    x
}

pub fn vec_to_pair(x: &CVec) -> (CoefSeries, CoefSeries) {
    let n = x.len() / 2;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        a.push(x[2 * k]);
        b.push(x[2 * k + 1]);
    }
    (CoefSeries::new(a), CoefSeries::new(b))
}

// --- the graded basis ---------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ThetaBasis {
    pub theta: Theta,
    /// 2n x dim orthonormal columns in interleaved coordinates, graded:
    /// column j has its highest nonzero slot at tops[j], ascending.
    pub basis: CMat,
    pub tops: Vec<usize>,
    pub n: usize,
}

impl ThetaBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Polynomial degree of basis column j (its top coordinate slot / 2).
    pub fn degree(&self, j: usize) -> usize {
        self.tops[j] / 2
    }

    /// Guard band width: tails of true model-space elements decay like
    /// pole_radius^-k, so actions on columns of degree below n - guard
    /// are exact to machine precision.
    pub fn guard(&self) -> usize {
        let from_poles = if self.theta.pole_radius.is_finite() {
            (53.0 * std::f64::consts::LN_2 / self.theta.pole_radius.ln()).ceil() as usize
        } else {
            0
        };
        (self.theta.d + 1).max(from_poles)
    }

    /// Number of leading basis columns inside the guarded window.
    pub fn trusted(&self) -> usize {
        let cut = self.n.saturating_sub(1 + self.guard());
        self.tops.iter().take_while(|&&t| t / 2 <= cut).count()
    }

    /// Basis coordinates of a coefficient pair (orthogonal projection).
    pub fn coords(&self, f1: &CoefSeries, f2: &CoefSeries) -> CVec {
        self.basis.adjoint() * pair_to_vec(f1, f2, self.n)
    }

    /// The pair of series a coordinate vector represents.
    pub fn lift(&self, x: &CVec) -> (CoefSeries, CoefSeries) {
        vec_to_pair(&(&self.basis * x))
    }

    pub fn project_pair(&self, f1: &CoefSeries, f2: &CoefSeries) -> (CoefSeries, CoefSeries) {
        self.lift(&self.coords(f1, f2))
    }
}

/// Constraint matrix R = [T_{p1}^* T_{p2}^*] in interleaved coordinates:
/// row k reads sum_j conj(p1_j) f1_{k+j} + conj(p2_j) f2_{k+j}.
fn constraint_matrix(theta: &Theta, n: usize) -> CMat {
    let mut r = CMat::zeros(n, 2 * n);
    for k in 0..n {
        for (j, c) in theta.p1.coeffs.iter().enumerate() {
            if k + j < n {
                r[(k, 2 * (k + j))] = c.conj();
            }
        }
        for (j, c) in theta.p2.coeffs.iter().enumerate() {
            if k + j < n {
                r[(k, 2 * (k + j) + 1)] = c.conj();
            }
        }
    }
    r
}

/// Coefficients of z^d conj(p)(1/z): the conjugate-reversed polynomial.
fn reverse_conj(p: &CoefSeries, d: usize) -> CoefSeries {
    let mut out = vec![C64::new(0.0, 0.0); d + 1];
    for i in 0..=d {
        out[i] = p.coeffs.get(d - i).map(|c| c.conj()).unwrap_or_default();
    }
    CoefSeries::new(out)
}

fn poly_degree(p: &CoefSeries) -> usize {
    p.degree(1e-12 * p.norm().max(1e-300)).unwrap_or(0)
}

fn top_row_of(v: &CVec, tol: f64) -> usize {
    let scale = v.norm();
    (0..v.len()).rev().find(|&i| v[i].norm() > tol * scale).unwrap_or(0)
}

/// Degree-graded orthonormal basis of the polynomial part of the model
/// space at truncation n.
///
/// Extracting the kernel of the constraint matrix head-on is hopeless for
/// large n: truncations of true model-space elements violate only the
/// last few rows, so the constraint has a geometric ladder of singular
/// values reaching pole_radius^-n. Instead the kernel is written down.
/// With r_j = z^d conj(p_j)(1/z), a polynomial pair is a member exactly
/// when f_1 r_1 + f_2 r_2 has degree below d; the solutions with that
/// combination equal to zero are spanned by (r_2 t, -r_1 t) over
/// polynomials t (after removing any common factor of r_1, r_2), and the
/// rest live at degrees below d where the exact constraint kernel is a
/// small well-conditioned problem. Orthonormalizing these explicit
/// generators in degree order keeps every entry O(1): no ill conditioning
/// at any truncation.
pub fn theta_basis(theta: &Theta, n: usize) -> Result<ThetaBasis> {
    if n < theta.d + 4 {
        return Err(Error::InvalidOrder(format!(
            "truncation {} too small for column degree {}",
            n, theta.d
        )));
    }
    let d = theta.d;
    let mut r1 = reverse_conj(&theta.p1, d);
    let mut r2 = reverse_conj(&theta.p2, d);
    // Remove common zeros of the reversed pair (reciprocals of common
    // zeros of p_1, p_2 away from the origin).
    loop {
        let z1 = poly_roots(&r1.coeffs)?;
        let scale = r2.norm();
        let shared = z1.iter().find(|w| r2.eval_at(**w).norm() < 1e-9 * scale).copied();
        match shared {
            Some(w) => {
                r1 = deflate_root(&r1, w);
                r2 = deflate_root(&r2, w);
            }
            None => break,
        }
    }
    let dtop = poly_degree(&r1).max(poly_degree(&r2));

    // Candidate members, each tagged with its interleaved top row.
    let mut candidates: Vec<(usize, CVec)> = Vec::new();
    // Low degrees: exact kernels of the leading constraint block.
    for k in 0..d.min(n) {
        let sub = constraint_matrix(theta, k + 1);
        let ker = numeric_kernel(&sub, 1e-10)?;
        for j in 0..ker.ncols() {
            let mut v = CVec::zeros(2 * n);
            for i in 0..2 * (k + 1) {
                v[i] = ker[(i, j)];
            }
            candidates.push((top_row_of(&v, 1e-11), v));
        }
    }
    // The zero-combination family (r_2 t, -r_1 t), t = z^0 .. z^(n-1-dtop).
    for t in 0..n.saturating_sub(dtop) {
        let mut v = CVec::zeros(2 * n);
        for (i, c) in r2.coeffs.iter().enumerate() {
            if t + i < n {
                v[2 * (t + i)] = *c;
            }
        }
        for (i, c) in r1.coeffs.iter().enumerate() {
            if t + i < n {
                v[2 * (t + i) + 1] = -*c;
            }
        }
        candidates.push((top_row_of(&v, 1e-11), v));
    }
    candidates.sort_by_key(|(top, _)| *top);

    // Modified Gram-Schmidt in degree order; exact duplicates drop out.
    let mut cols: Vec<CVec> = Vec::new();
    for (_, cand) in candidates {
        let orig = cand.norm();
        let mut v = cand;
        for _ in 0..2 {
            for w in &cols {
                let c = w.dotc(&v);
                v -= w * c;
            }
        }
        if v.norm() > 1e-8 * orig {
            let nv = C64::new(1.0 / v.norm(), 0.0);
            cols.push(v * nv);
        }
    }
    let dim = cols.len();
    if dim < n || dim > n + d {
        return Err(Error::Degenerate(format!(
            "model-space staircase has dimension {} at truncation {}",
            dim, n
        )));
    }
    let mut order: Vec<usize> = (0..dim).collect();
    let tops_raw: Vec<usize> = cols.iter().map(|v| top_row_of(v, 1e-11)).collect();
    order.sort_by_key(|&j| tops_raw[j]);
    let mut basis = CMat::zeros(2 * n, dim);
    let mut tops = Vec::with_capacity(dim);
    for (slot, &j) in order.iter().enumerate() {
        for i in 0..2 * n {
            basis[(i, slot)] = cols[j][i];
        }
        tops.push(tops_raw[j]);
    }
    // Certify membership against the exact constraint.
    let viol = (constraint_matrix(theta, n) * &basis).norm();
    if viol > 1e-9 {
        return Err(Error::NumericalFailure {
            op: "theta-basis",
            report: format!("constraint violation {:.3e} on the graded basis", viol),
        });
    }
    Ok(ThetaBasis { theta: theta.clone(), basis, tops, n })
}

/// Compressed shift in the graded basis, with exact Gram entries: the
/// shifted columns are compared in coordinates extended by one degree so
/// nothing falls off the end.
pub fn s_theta(tb: &ThetaBasis) -> OperatorMatrix {
    let n2 = 2 * tb.n;
    let dim = tb.dim();
    let mut shifted = CMat::zeros(n2 + 2, dim);
    for j in 0..dim {
        for k in 0..tb.n {
            shifted[(2 * (k + 1), j)] = tb.basis[(2 * k, j)];
            shifted[(2 * (k + 1) + 1, j)] = tb.basis[(2 * k + 1, j)];
        }
    }
    let mut padded = CMat::zeros(n2 + 2, dim);
    for j in 0..dim {
        for i in 0..n2 {
            padded[(i, j)] = tb.basis[(i, j)];
        }
    }
    OperatorMatrix {
        mat: padded.adjoint() * shifted,
        basis: crate::model_ops::BasisTag::Theta,
        trust: tb.trusted(),
    }
}

/// How far the adjoint of the compression is from being the restriction
/// of the coordinatewise backward shift: the true adjoint leaves the
/// graded span invariant, so this should be at roundoff for every column.
pub fn adjoint_restriction_defect(tb: &ThetaBasis, a: &OperatorMatrix) -> f64 {
    let dim = tb.dim();
    let n = tb.n;
    let mut worst = 0.0f64;
    for j in 0..dim {
        // Backward shift of column j in interleaved coordinates.
        let mut down = CVec::zeros(2 * n);
        for k in 0..n - 1 {
            down[2 * k] = tb.basis[(2 * (k + 1), j)];
            down[2 * k + 1] = tb.basis[(2 * (k + 1) + 1, j)];
        }
        let via_matrix = &tb.basis * a.mat.adjoint().column(j).clone_owned();
        worst = worst.max((via_matrix - down).norm());
    }
    worst
}

// --- the quasiaffinity to the scalar shift -------------------------------------

/// Series coefficients of Q(f1 (+) f2) = theta_1 f_2 - theta_2 f_1,
/// length `len`. Q kills the column range, so it factors through the
/// model space; on it, Q intertwines the compressed shift with the
/// scalar shift.
pub fn q_apply(theta: &Theta, f1: &CoefSeries, f2: &CoefSeries, len: usize) -> Result<CoefSeries> {
    let num = theta.p1.mul(f2).sub(&theta.p2.mul(f1));
    RationalFn::new(num, theta.q.clone())?.series_to(len)
}

/// Matrix of Q on the graded basis: column j holds the first `len`
/// series coefficients of Q applied to basis column j.
pub fn q_matrix(tb: &ThetaBasis, len: usize) -> Result<CMat> {
    let dim = tb.dim();
    let mut out = CMat::zeros(len, dim);
    for j in 0..dim {
        let (f1, f2) = vec_to_pair(&tb.basis.column(j).clone_owned());
        let qc = q_apply(&tb.theta, &f1, &f2, len)?;
        for i in 0..len {
            out[(i, j)] = qc.coeffs[i];
        }
    }
    Ok(out)
}

/// Worst column norm of Q S(Theta) - S Q over the first `window` graded
/// basis columns, both sides held as length-`len` series.
pub fn intertwining_defect(
    tb: &ThetaBasis,
    a: &OperatorMatrix,
    qm: &CMat,
    window: usize,
) -> f64 {
    let len = qm.nrows();
    let dim = tb.dim();
    let mut worst = 0.0f64;
    for j in 0..window.min(dim) {
        // Q (S(Theta) e_j) = Q A e_j: combine Q columns by A's column j.
        let mut lhs = CVec::zeros(len);
        for i in 0..dim {
            let w = a.mat[(i, j)];
            if w.norm() > 0.0 {
                lhs += qm.column(i) * w;
            }
        }
        // S (Q e_j): shift the series up by one slot.
        let mut rhs = CVec::zeros(len);
        for i in 0..len - 1 {
            rhs[i + 1] = qm[(i, j)];
        }
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

// --- grid projection -----------------------------------------------------------

/// Orthogonal projection onto the model space, pointwise on the boundary
/// grid: P w = w - Theta P_+ (Theta* w), with P_+ the analytic half of
/// the spectrum. Exact up to the aliasing of Theta's tails, which decay
/// like pole_radius^-k.
pub fn grid_project(
    theta: &Theta,
    w1: &BoundarySamples,
    w2: &BoundarySamples,
) -> Result<(BoundarySamples, BoundarySamples)> {
    let m = w1.m();
    if w2.m() != m {
        return Err(Error::InvalidGrid { m, n: w2.m(), reason: "mismatched grids".into() });
    }
    let t1 = theta.theta1.boundary(m)?;
    let t2 = theta.theta2.boundary(m)?;
    let s: Vec<C64> = (0..m)
        .map(|k| t1.values[k].conj() * w1.values[k] + t2.values[k].conj() * w2.values[k])
        .collect();
    let s = BoundarySamples::new(s)?;
    // Analytic half: coefficients 0..m/2, the rest zeroed.
    let coefs = to_coef(&s, m / 2)?;
    let plus = to_boundary(&coefs, m)?;
    let mut o1 = Vec::with_capacity(m);
    let mut o2 = Vec::with_capacity(m);
    for k in 0..m {
        o1.push(w1.values[k] - t1.values[k] * plus.values[k]);
        o2.push(w2.values[k] - t2.values[k] * plus.values[k]);
    }
    Ok((BoundarySamples::new(o1)?, BoundarySamples::new(o2)?))
}

/// The pointwise defect projection I - Theta(zeta) Theta(zeta)* at a
/// boundary point: rank one, trace one, idempotent.
pub fn residual_projection(theta: &Theta, zeta: C64) -> Result<CMat> {
    if (zeta.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("residual projection needs |zeta| = 1, got {}", zeta)));
    }
    let (a, b) = theta.eval(zeta)?;
    let mut p = CMat::identity(2, 2);
    p[(0, 0)] -= a * a.conj();
    p[(0, 1)] -= a * b.conj();
    p[(1, 0)] -= b * a.conj();
    p[(1, 1)] -= b * b.conj();
    Ok(p)
}

// --- the adjoint eigenvector field ---------------------------------------------

/// Closed form of the analytic eigenvector field for rational columns:
/// f(lambda) = conj(theta_2(conj lambda)) (e_lambda (+) 0)
///           - conj(theta_1(conj lambda)) (0 (+) e_lambda),
/// with e_lambda the geometric series (1, lambda, lambda^2, ...). The
/// vector lies in the model space, depends analytically on lambda, and
/// satisfies (S(Theta)* - lambda) f = 0.
pub fn field_closed_form(theta: &Theta, lambda: C64, n: usize) -> Result<CVec> {
    if lambda.norm() >= 1.0 {
        return Err(Error::Domain(format!("field point {} outside the open disk", lambda)));
    }
    let a = theta.theta2.eval(lambda.conj())?.conj();
    let b = -theta.theta1.eval(lambda.conj())?.conj();
    let mut x = CVec::zeros(2 * n);
    let mut p = C64::new(1.0, 0.0);
    for k in 0..n {
        x[2 * k] = a * p;
        x[2 * k + 1] = b * p;
        p *= lambda;
    }
    Ok(x)
}

// --- confluence ------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ConfluenceOutcome {
    /// No shared inner factor: vectors can be matched through injective
    /// algebra elements. Each sampled inner function u contributes
    /// sigma_min(u(S(Theta))) on the trusted window as an injectivity
    /// certificate.
    Confluent { certificates: Vec<InjectivityCertificate> },
    /// The entries share the inner factor `gcd`, which kills a vector:
    /// `annihilation` is ||gcd(S(Theta)) h|| / ||h|| for the constructed
    /// witness h. An algebra with a non-injective member that still has
    /// vectors to match cannot be confluent.
    NotConfluent {
        gcd: InnerFunction,
        witness_norm: f64,
        annihilation: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityCertificate {
    pub label: String,
    pub sigma_min: f64,
}

fn deflate_root(p: &CoefSeries, r: C64) -> CoefSeries {
    // Synthetic division by (z - r); the remainder is discarded (the
    // caller guarantees r is a root).
    let deg = p.degree(1e-12 * p.norm().max(1e-300)).unwrap_or(0);
    let mut out = vec![C64::new(0.0, 0.0); deg.max(1)];
    let mut carry = C64::new(0.0, 0.0);
    for k in (0..=deg).rev() {
        let c = p.coeffs.get(k).copied().unwrap_or_default() + carry * r;
        if k > 0 {
            out[k - 1] = c;
            carry = c;
        }
    }
    CoefSeries::new(out)
}

/// Decide whether the column entries share an inner factor, and either
/// exhibit the annihilation witness or certify injectivity.
///
/// When gcd = m is nontrivial, Theta = m Theta' columnwise and the
/// witness h = P(theta_1' (+) theta_2') satisfies m(S(Theta)) h = 0
/// identically: m h differs from Theta * 1 by nothing at all, and the
/// column range is annihilated by the projection.
pub fn confluence_test(tb: &ThetaBasis, a: &OperatorMatrix) -> Result<ConfluenceOutcome> {
    let theta = &tb.theta;
    let (i1, _) = poly_inner_outer(&theta.p1)?;
    let (i2, _) = poly_inner_outer(&theta.p2)?;
    let g = inner_gcd(&i1, &i2);
    if g.is_one() {
        let labels: Vec<(String, InnerFunction)> = vec![
            ("z".into(), InnerFunction::shift()),
            ("b(0.5)".into(), InnerFunction::blaschke(vec![C64::new(0.5, 0.0)])?),
            (
                "z*b(0.3)".into(),
                InnerFunction::shift().mul(&InnerFunction::blaschke(vec![C64::new(0.3, 0.0)])?),
            ),
        ];
        let tau = tb.trusted().max(1);
        let mut certificates = Vec::new();
        for (label, u) in labels {
            let rho = u.zeros.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            let series = u.series_to(calculus_length(rho))?;
            let m_u = functional_calculus(&series, &a.mat)?;
            let slab = m_u.columns(0, tau).clone_owned();
            let (_, s, _) = linalg::svd(&slab);
            let sigma_min = s.last().copied().unwrap_or(0.0);
            certificates.push(InjectivityCertificate { label, sigma_min });
        }
        return Ok(ConfluenceOutcome::Confluent { certificates });
    }

    // Divide the shared Blaschke factor out of each entry.
    let mut p1 = theta.p1.clone();
    let mut p2 = theta.p2.clone();
    let mut bl_den = CoefSeries::one();
    let mut unim = C64::new(1.0, 0.0);
    for r in &g.zeros {
        p1 = deflate_root(&p1, *r);
        p2 = deflate_root(&p2, *r);
        if r.norm() > 1e-14 {
            // b_r = (|r|/r)(r - z)/(1 - conj r z): dividing by it keeps
            // the factor (1 - conj r z) and the unimodular constant.
            bl_den = bl_den.mul(&CoefSeries::new(vec![C64::new(1.0, 0.0), -r.conj()]));
            unim *= -r / r.norm();
        }
    }
    // p_j factors as p_j^deflated * unim * bl_den * gcd, so the cofactor
    // theta_j / gcd has numerator p_j^deflated * bl_den * unim.
    let t1p = RationalFn::new(p1.mul(&bl_den).scaled(unim), theta.q.clone())?;
    let t2p = RationalFn::new(p2.mul(&bl_den).scaled(unim), theta.q.clone())?;
    let f1 = t1p.series_to(tb.n)?;
    let f2 = t2p.series_to(tb.n)?;
    let h = tb.coords(&f1, &f2);
    let witness_norm = h.norm();
    if witness_norm < 1e-10 {
        return Err(Error::Degenerate("confluence witness projected to zero".into()));
    }
    let rho = g.zeros.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let series = g.series_to(calculus_length(rho))?;
    let m_a = functional_calculus(&series, &a.mat)?;
    let annihilation = (m_a * &h).norm() / witness_norm;
    Ok(ConfluenceOutcome::NotConfluent { gcd: g, witness_norm, annihilation })
}

// --- cyclicity -------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CyclicityVerdict {
    /// No zeros in the closed disk: the function is outer, hence cyclic
    /// for the shift.
    Cyclic,
    /// Zeros strictly inside the disk obstruct cyclicity.
    NotCyclic {
        #[serde(serialize_with = "ser_c64_vec")]
        inner_zeros: Vec<C64>,
    },
    /// Zeros within the margin of the circle: the side cannot be
    /// certified at working precision.
    Indeterminate {
        #[serde(serialize_with = "ser_c64_vec")]
        near_circle: Vec<C64>,
    },
}

fn ser_c64_vec<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
    pairs.serialize(s)
}

/// Is a rational function (poles outside the closed disk) cyclic for the
/// shift? Equivalent to outerness, decided by the numerator zeros.
pub fn cyclicity_test(f: &RationalFn) -> Result<CyclicityVerdict> {
    if f.min_pole_modulus()? <= 1.0 + POLE_MARGIN {
        return Err(Error::Domain("cyclicity test needs poles outside the closed disk".into()));
    }
    if f.num.norm() == 0.0 {
        return Err(Error::Degenerate("cyclicity of the zero function".into()));
    }
    let roots = poly_roots(&f.num.coeffs)?;
    let margin = crate::inner_outer::CIRCLE_MARGIN;
    let near: Vec<C64> = roots
        .iter()
        .filter(|r| (r.norm() - 1.0).abs() < margin)
        .cloned()
        .collect();
    if !near.is_empty() {
        return Ok(CyclicityVerdict::Indeterminate { near_circle: near });
    }
    let inner: Vec<C64> = roots.iter().filter(|r| r.norm() < 1.0).cloned().collect();
    if inner.is_empty() {
        Ok(CyclicityVerdict::Cyclic)
    } else {
        Ok(CyclicityVerdict::NotCyclic { inner_zeros: inner })
    }
}

// --- corona / similarity -----------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CoronaOutcome {
    /// Polynomials f_1, f_2 with theta_1 f_1 + theta_2 f_2 = 1; the
    /// boundary residual is the largest deviation from 1 on the grid.
    Solved {
        f1: CoefSeries,
        f2: CoefSeries,
        degree: usize,
        boundary_residual: f64,
        per_degree: Vec<f64>,
    },
    /// A common zero of the entries in the closed disk makes the Bezout
    /// identity unsolvable.
    Infeasible {
        #[serde(serialize_with = "ser_c64_vec")]
        common_zeros: Vec<C64>,
        per_degree: Vec<f64>,
    },
    /// No solution within the degree budget and no certificate either;
    /// reported honestly.
    Unresolved { per_degree: Vec<f64> },
}

/// Search for a polynomial Bezout pair theta_1 f_1 + theta_2 f_2 = 1 by
/// increasing degree. In cleared form the identity is
/// p_1 f_1 + p_2 f_2 = q, a finite linear system per degree.
pub fn corona_similarity(theta: &Theta, max_degree: usize, m_grid: usize) -> Result<CoronaOutcome> {
    let mut per_degree = Vec::with_capacity(max_degree + 1);
    let qnorm = theta.q.norm();
    for deg in 0..=max_degree {
        let cols = 2 * (deg + 1);
        let rows = theta.d + deg + 1;
        let rows = rows.max(theta.q.coeffs.len());
        let mut mat = CMat::zeros(rows, cols);
        for s in 0..=deg {
            for (j, c) in theta.p1.coeffs.iter().enumerate() {
                if s + j < rows {
                    mat[(s + j, s)] = *c;
                }
            }
            for (j, c) in theta.p2.coeffs.iter().enumerate() {
                if s + j < rows {
                    mat[(s + j, deg + 1 + s)] = *c;
                }
            }
        }
        let mut rhs = CVec::zeros(rows);
        for (k, c) in theta.q.coeffs.iter().enumerate() {
            if k < rows {
                rhs[k] = *c;
            }
        }
        let (x, resid) = linalg::lstsq_min_norm(&mat, &rhs, 1e-13);
        let rel = resid / qnorm;
        per_degree.push(rel);
        if rel <= 1e-12 {
            let f1 = CoefSeries::new((0..=deg).map(|k| x[k]).collect());
            let f2 = CoefSeries::new((0..=deg).map(|k| x[deg + 1 + k]).collect());
            // Certify on the boundary against the uncleared column.
            let b1 = theta.theta1.boundary(m_grid)?;
            let b2 = theta.theta2.boundary(m_grid)?;
            let mut worst = 0.0f64;
            for k in 0..m_grid {
                let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m_grid as f64);
                let v = b1.values[k] * f1.eval_at(z) + b2.values[k] * f2.eval_at(z);
                worst = worst.max((v - C64::new(1.0, 0.0)).norm());
            }
            return Ok(CoronaOutcome::Solved {
                f1,
                f2,
                degree: deg,
                boundary_residual: worst,
                per_degree,
            });
        }
    }
    // No solution in budget: look for the obstruction.
    let r1 = poly_roots(&theta.p1.coeffs)?;
    let r2 = poly_roots(&theta.p2.coeffs)?;
    let mut common = Vec::new();
    for a in &r1 {
        if a.norm() <= 1.0 + POLE_MARGIN {
            if r2.iter().any(|b| (a - b).norm() < 1e-6) {
                common.push(*a);
            }
        }
    }
    if common.is_empty() {
        Ok(CoronaOutcome::Unresolved { per_degree })
    } else {
        Ok(CoronaOutcome::Infeasible { common_zeros: common, per_degree })
    }
}

// --- ratio field probe --------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RatioSample {
    pub radius: f64,
    pub angle: f64,
    pub value: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRadiusStats {
    pub radius: f64,
    pub mean_square: f64,
    pub samples: usize,
    pub poles_flagged: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioFieldReport {
    /// Diagnostic only: values depend on the field normalization and are
    /// not certified by any acceptance bound.
    pub certifying: bool,
    pub radii: Vec<RatioRadiusStats>,
    pub samples: Vec<RatioSample>,
}

/// Sample the ratio r(lambda) = <h, f(conj lambda)> / <f0, f(conj lambda)>
/// over a few circles. The functional <., f(conj lambda)> generalizes
/// point evaluation, so r plays the role of h / h0 as a function on the
/// disk; near a zero of the denominator the sample is flagged as a pole
/// and skipped.
pub fn ratio_field_probe(
    a: &OperatorMatrix,
    h: &CVec,
    radii: &[f64],
    angles: usize,
) -> Result<RatioFieldReport> {
    let field = EigenvectorField::new(a)?;
    let f0 = field.f0().clone();
    let mut stats = Vec::new();
    let mut samples = Vec::new();
    for &r in radii {
        let mut acc = 0.0f64;
        let mut kept = 0usize;
        let mut flagged = 0usize;
        for k in 0..angles {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / angles as f64 + 0.05;
            let lam = C64::from_polar(r, ang);
            let f = field.at(lam.conj())?;
            let den = f.dotc(&f0);
            if den.norm() < 1e-12 * f.norm() * f0.norm() {
                flagged += 1;
                continue;
            }
            let num = f.dotc(h);
            let v = num / den;
            acc += v.norm_sqr();
            kept += 1;
            samples.push(RatioSample { radius: r, angle: ang, value: [v.re, v.im] });
        }
        stats.push(RatioRadiusStats {
            radius: r,
            mean_square: if kept > 0 { acc / kept as f64 } else { f64::NAN },
            samples: kept,
            poles_flagged: flagged,
        });
    }
    Ok(RatioFieldReport { certifying: false, radii: stats, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::cauchy_kernel;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn worked_column() -> Theta {
        Theta::preset("paper-example").unwrap()
    }

    #[test]
    fn presets_are_column_inner() {
        for name in Theta::preset_names() {
            let t = Theta::preset(name).unwrap();
            assert!(t.column_residual(1024).unwrap() < 1e-12, "{} failed", name);
        }
    }

    #[test]
    fn cleared_form_matches_entries() {
        let t = worked_column();
        for k in 0..12 {
            let z = C64::from_polar(0.1 + 0.06 * k as f64, 1.3 * k as f64);
            let q = t.q.eval_at(z);
            assert!((t.p1.eval_at(z) / q - t.theta1.eval(z).unwrap()).norm() < 1e-13);
            assert!((t.p2.eval_at(z) / q - t.theta2.eval(z).unwrap()).norm() < 1e-13);
        }
        assert_eq!(t.d, 2);
        assert!((t.pole_radius - 2.0).abs() < 1e-10);
    }

    #[test]
    fn staircase_dimension_and_grading() {
        let t = worked_column();
        let tb = theta_basis(&t, 24).unwrap();
        assert_eq!(tb.dim(), 24);
        // One basis vector per degree.
        let degs: Vec<usize> = (0..tb.dim()).map(|j| tb.degree(j)).collect();
        let expect: Vec<usize> = (0..24).collect();
        assert_eq!(degs, expect);
        // Orthonormal.
        let g = tb.basis.adjoint() * &tb.basis;
        assert!((g - CMat::identity(24, 24)).norm() < 1e-12);
    }

    #[test]
    fn degree_zero_vector_is_one_plus_zero() {
        let t = worked_column();
        let tb = theta_basis(&t, 16).unwrap();
        let col = tb.basis.column(0).clone_owned();
        // (1 (+) 0) normalized: only slot 0 occupied.
        assert!((col[0].norm() - 1.0).abs() < 1e-12);
        for i in 1..col.len() {
            assert!(col[i].norm() < 1e-12);
        }
    }

    #[test]
    fn common_factor_preset_has_wider_staircase() {
        let t = Theta::preset("common-factor-z").unwrap();
        let tb = theta_basis(&t, 24).unwrap();
        // Both constants are members: the shared factor z lifts the
        // constraint at degree zero.
        assert_eq!(tb.dim(), 25);
        assert_eq!(tb.degree(0), 0);
        assert_eq!(tb.degree(1), 0);
    }

    #[test]
    fn adjoint_kernel_is_the_constant_pair() {
        let t = worked_column();
        let tb = theta_basis(&t, 48).unwrap();
        let a = s_theta(&tb);
        let k = numeric_kernel(&a.mat.adjoint(), 1e-10).unwrap();
        assert_eq!(k.ncols(), 1);
        // Compare with coordinates of (1 (+) 0).
        let target = tb.coords(&CoefSeries::one(), &CoefSeries::zero(1));
        let sin = linalg::sin_angle_between(&k.column(0).clone_owned(), &target);
        assert!(sin < 1e-10, "angle {}", sin);
    }

    #[test]
    fn adjoint_eigenvector_at_one_half() {
        // ker(1/2 - S(Theta)*) is spanned by 0 (+) 1/(2 - z).
        let t = worked_column();
        let tb = theta_basis(&t, 64).unwrap();
        let a = s_theta(&tb);
        let mut shifted = a.mat.adjoint();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] -= c(0.5, 0.0);
        }
        let k = numeric_kernel(&shifted, 1e-9).unwrap();
        assert_eq!(k.ncols(), 1);
        let x = cauchy_kernel(c(0.5, 0.0), 64).unwrap().scaled(c(0.5, 0.0));
        let target = tb.coords(&CoefSeries::zero(1), &x);
        let sin = linalg::sin_angle_between(&k.column(0).clone_owned(), &target);
        assert!(sin < 1e-9, "angle {}", sin);
    }

    #[test]
    fn adjoint_restriction_is_exact() {
        let t = worked_column();
        let tb = theta_basis(&t, 32).unwrap();
        let a = s_theta(&tb);
        assert!(adjoint_restriction_defect(&tb, &a) < 1e-11);
    }

    #[test]
    fn field_closed_form_is_eigenvector_and_matches_numerics() {
        let t = worked_column();
        let n = 128;
        let tb = theta_basis(&t, n).unwrap();
        let a = s_theta(&tb);
        for &lam in &[c(0.0, 0.0), c(0.3, 0.2), c(-0.4, 0.1)] {
            let f = field_closed_form(&t, lam, n).unwrap();
            // Interleaved backward shift acts as the adjoint on pairs.
            let coords = tb.basis.adjoint() * &f;
            let back = &tb.basis * &coords;
            // Membership: f is (numerically) inside the span.
            assert!((&back - &f).norm() < 1e-10 * f.norm(), "membership at {}", lam);
            // Eigen relation through the compressed matrix.
            let lhs = a.mat.adjoint() * &coords;
            let rhs = &coords * lam;
            assert!((lhs - rhs).norm() < 1e-10 * coords.norm(), "eigen at {}", lam);
        }
        // Orthogonality of the 0- and 1/2-eigenvectors.
        let f0 = field_closed_form(&t, c(0.0, 0.0), n).unwrap();
        let fh = field_closed_form(&t, c(0.5, 0.0), n).unwrap();
        assert!(f0.dotc(&fh).norm() < 1e-12);
        // And against the resolvent-based field.
        let field = EigenvectorField::new(&a).unwrap();
        let lam = c(0.3, 0.2);
        let numeric = field.at(lam).unwrap();
        let closed = tb.basis.adjoint() * field_closed_form(&t, lam, n).unwrap();
        let sin = linalg::sin_angle_between(&numeric, &closed);
        assert!(sin < 1e-8, "field angle {}", sin);
    }

    #[test]
    fn q_kills_the_column_and_hits_minus_theta2() {
        let t = worked_column();
        // Q(theta * u) = 0 for u = 1 + z/2.
        let u = CoefSeries::from_reals(&[1.0, 0.5]);
        let th1 = RationalFn::new(t.p1.mul(&u), t.q.clone()).unwrap().series_to(64).unwrap();
        let th2 = RationalFn::new(t.p2.mul(&u), t.q.clone()).unwrap().series_to(64).unwrap();
        let qv = q_apply(&t, &th1, &th2, 48).unwrap();
        assert!(qv.norm() < 1e-12);
        // Q(1 (+) 0) = -theta_2.
        let qv = q_apply(&t, &CoefSeries::one(), &CoefSeries::zero(1), 48).unwrap();
        let mt2 = RationalFn::new(t.p2.scaled(c(-1.0, 0.0)), t.q.clone())
            .unwrap()
            .series_to(48)
            .unwrap();
        assert!(qv.sub(&mt2).norm() < 1e-13);
    }

    #[test]
    fn intertwining_defect_small_on_trusted_window() {
        let t = worked_column();
        let tb = theta_basis(&t, 96).unwrap();
        let a = s_theta(&tb);
        let qm = q_matrix(&tb, 96 + 4).unwrap();
        let window = tb.trusted();
        assert!(window >= 16, "window {}", window);
        let defect = intertwining_defect(&tb, &a, &qm, window);
        assert!(defect < 1e-8, "defect {}", defect);
    }

    #[test]
    fn grid_projection_fixes_members_and_kills_column() {
        let t = worked_column();
        let tb = theta_basis(&t, 16).unwrap();
        let m = 256;
        // A genuine member: basis column 3.
        let (f1, f2) = vec_to_pair(&tb.basis.column(3).clone_owned());
        let w1 = to_boundary(&f1.padded(m), m).unwrap();
        let w2 = to_boundary(&f2.padded(m), m).unwrap();
        let (p1, p2) = grid_project(&t, &w1, &w2).unwrap();
        let mut worst = 0.0f64;
        for k in 0..m {
            worst = worst.max((p1.values[k] - w1.values[k]).norm());
            worst = worst.max((p2.values[k] - w2.values[k]).norm());
        }
        assert!(worst < 1e-10, "member moved by {}", worst);
        // The column itself projects to zero.
        let t1 = t.theta1.boundary(m).unwrap();
        let t2 = t.theta2.boundary(m).unwrap();
        let (z1, z2) = grid_project(&t, &t1, &t2).unwrap();
        let zn: f64 = z1
            .values
            .iter()
            .chain(z2.values.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(zn < 1e-10, "column residual {}", zn);
    }

    #[test]
    fn residual_projection_at_one() {
        let t = worked_column();
        let p = residual_projection(&t, c(1.0, 0.0)).unwrap();
        assert!((p[(0, 0)] - c(16.0 / 25.0, 0.0)).norm() < 1e-12);
        assert!((p[(0, 1)] - c(-12.0 / 25.0, 0.0)).norm() < 1e-12);
        assert!((p[(1, 0)] - c(-12.0 / 25.0, 0.0)).norm() < 1e-12);
        assert!((p[(1, 1)] - c(9.0 / 25.0, 0.0)).norm() < 1e-12);
        // Idempotent with trace one.
        assert!(((&p * &p) - &p).norm() < 1e-12);
        assert!((p[(0, 0)] + p[(1, 1)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn confluence_dichotomy_on_presets() {
        let t = worked_column();
        let tb = theta_basis(&t, 96).unwrap();
        let a = s_theta(&tb);
        match confluence_test(&tb, &a).unwrap() {
            ConfluenceOutcome::Confluent { certificates } => {
                for cert in &certificates {
                    assert!(
                        cert.sigma_min > 1e-4,
                        "certificate {} = {}",
                        cert.label,
                        cert.sigma_min
                    );
                }
            }
            _ => panic!("shared-factor-free column must come out confluent"),
        }
        let t = Theta::preset("common-factor-z").unwrap();
        let tb = theta_basis(&t, 96).unwrap();
        let a = s_theta(&tb);
        match confluence_test(&tb, &a).unwrap() {
            ConfluenceOutcome::NotConfluent { gcd, annihilation, witness_norm } => {
                assert_eq!(gcd.zeros.len(), 1);
                assert!(gcd.zeros[0].norm() < 1e-10);
                assert!(witness_norm > 0.1);
                assert!(annihilation < 1e-7, "annihilation {}", annihilation);
            }
            _ => panic!("shared factor z must break confluence"),
        }
    }

    #[test]
    fn corona_solves_the_paper_pair() {
        let t = worked_column();
        match corona_similarity(&t, 8, 512).unwrap() {
            CoronaOutcome::Solved { f1, f2, degree, boundary_residual, .. } => {
                assert!(degree <= 1, "degree {}", degree);
                assert!(boundary_residual < 1e-10, "residual {}", boundary_residual);
                // The classical pair: f1 = 10/3, f2 = -(5/4)(2 - z); any
                // degree-1 solution must match it (the homogeneous part
                // has degree 2 or more).
                assert!((f1.eval_at(c(0.0, 0.0)) - c(10.0 / 3.0, 0.0)).norm() < 1e-9);
                assert!((f2.eval_at(c(0.0, 0.0)) - c(-2.5, 0.0)).norm() < 1e-9);
                assert!((f2.eval_at(c(1.0, 0.0)) - c(-1.25, 0.0)).norm() < 1e-9);
            }
            other => panic!("expected a solution, got {:?}", other),
        }
    }

    #[test]
    fn corona_detects_common_zero() {
        let t = Theta::preset("common-factor-z").unwrap();
        match corona_similarity(&t, 8, 256).unwrap() {
            CoronaOutcome::Infeasible { common_zeros, per_degree } => {
                assert!(common_zeros.iter().any(|z| z.norm() < 1e-6));
                assert!(per_degree.iter().all(|&r| r > 1e-6));
            }
            other => panic!("expected infeasible, got {:?}", other),
        }
    }

    #[test]
    fn cyclicity_verdicts() {
        let outer = RationalFn::poly(CoefSeries::from_reals(&[2.0, -1.0]));
        assert!(matches!(cyclicity_test(&outer).unwrap(), CyclicityVerdict::Cyclic));
        let inner = RationalFn::poly(CoefSeries::from_reals(&[-0.5, 1.0]));
        assert!(matches!(
            cyclicity_test(&inner).unwrap(),
            CyclicityVerdict::NotCyclic { .. }
        ));
        let near = RationalFn::poly(CoefSeries::from_reals(&[-0.9999, 1.0]));
        assert!(matches!(
            cyclicity_test(&near).unwrap(),
            CyclicityVerdict::Indeterminate { .. }
        ));
    }

    #[test]
    fn ratio_probe_sees_the_half_pole() {
        // h = the 1/2-eigenvector: its ratio field blows up near the
        // denominator zeros, and the pole flag fires close to lambda=1/2
        // when the denominator functional vanishes there.
        let t = worked_column();
        let n = 128;
        let tb = theta_basis(&t, n).unwrap();
        let a = s_theta(&tb);
        let x = cauchy_kernel(c(0.5, 0.0), n).unwrap().scaled(c(0.5, 0.0));
        let h = tb.coords(&CoefSeries::zero(1), &x);
        let rep = ratio_field_probe(&a, &h, &[0.3, 0.6], 12).unwrap();
        assert!(!rep.certifying);
        assert_eq!(rep.radii.len(), 2);
        for st in &rep.radii {
            assert!(st.samples > 0);
            assert!(st.mean_square.is_finite());
        }
    }
}
