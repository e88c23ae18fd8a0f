//! Operators on truncated coefficient space: shifts, Toeplitz actions,
//! model-space compressions, and the generic numerical probes built on
//! them (kernels, Fredholm data, quotients, left inverses, eigenvector
//! fields).
//!
//! A matrix here always comes with a `trust` count: the number of leading
//! input columns on which the finite matrix reproduces the true operator
//! exactly. Probes restrict themselves to trusted columns; the rest is
//! truncation debris and must not leak into certified numbers.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hardy::CoefSeries;
use crate::inner_outer::InnerFunction;
use crate::linalg::{self, CMat, CVec};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    /// Coefficients against 1, z, z^2, ...
    Monomial,
    /// Orthonormal basis of a finite-dimensional model space.
    Model,
    /// Graded orthonormal basis of a vector-valued model space.
    Theta,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub mat: CMat,
    pub basis: BasisTag,
    /// Leading input columns on which the action is exact.
    pub trust: usize,
}

impl OperatorMatrix {
    pub fn rows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn cols(&self) -> usize {
        self.mat.ncols()
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        &self.mat * x
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            mat: self.mat.adjoint(),
            basis: self.basis,
            trust: self.trust.min(self.mat.nrows()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorMatrixWire {
    rows: usize,
    cols: usize,
    basis: BasisTag,
    trust: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut entries = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let v = self.mat[(i, j)];
                entries.push([v.re, v.im]);
            }
        }
        OperatorMatrixWire {
            rows: self.rows(),
            cols: self.cols(),
            basis: self.basis,
            trust: self.trust,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = OperatorMatrixWire::deserialize(d)?;
        if w.entries.len() != w.rows * w.cols {
            return Err(serde::de::Error::custom(format!(
                "operator entries: expected {} values, got {}",
                w.rows * w.cols,
                w.entries.len()
            )));
        }
        let mat = CMat::from_fn(w.rows, w.cols, |i, j| {
            let [re, im] = w.entries[i * w.cols + j];
            C64::new(re, im)
        });
        Ok(OperatorMatrix { mat, basis: w.basis, trust: w.trust })
    }
}

/// Truncated unilateral shift on n coefficients. The last input column
/// would need coefficient n to land in range, so trust is n - 1.
pub fn shift_matrix(n: usize) -> OperatorMatrix {
    let mut mat = CMat::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        mat[(k + 1, k)] = C64::new(1.0, 0.0);
    }
    OperatorMatrix { mat, basis: BasisTag::Monomial, trust: n.saturating_sub(1) }
}

/// Multiplication by the polynomial u as an exact rectangular matrix
/// (n + deg u) x n; no truncation, so every column is trusted.
pub fn toeplitz_analytic(u: &CoefSeries, n: usize) -> OperatorMatrix {
    let d = u.degree(1e-300).unwrap_or(0);
    let mut mat = CMat::zeros(n + d, n);
    for j in 0..n {
        for (k, c) in u.coeffs.iter().take(d + 1).enumerate() {
            mat[(j + k, j)] = *c;
        }
    }
    OperatorMatrix { mat, basis: BasisTag::Monomial, trust: n }
}

/// The adjoint Toeplitz action (T_u^* f)_k = sum_j conj(u_j) f_{k+j} as a
/// rows x cols matrix. Rows beyond cols - deg u would need coefficients
/// past the truncation; with cols >= rows + deg u every row is exact.
pub fn toeplitz_coanalytic(u: &CoefSeries, rows: usize, cols: usize) -> OperatorMatrix {
    let d = u.degree(1e-300).unwrap_or(0);
    let mut mat = CMat::zeros(rows, cols);
    for k in 0..rows {
        for (j, c) in u.coeffs.iter().take(d + 1).enumerate() {
            if k + j < cols {
                mat[(k, k + j)] = c.conj();
            }
        }
    }
    let trust = cols;
    OperatorMatrix { mat, basis: BasisTag::Monomial, trust }
}

// --- model spaces for finite Blaschke products -------------------------------

/// Orthonormal basis of the model space attached to a finite Blaschke
/// product, held in n-truncated monomial coordinates.
#[derive(Debug, Clone)]
pub struct ModelBasis {
    /// n x d, orthonormal columns.
    pub basis: CMat,
    pub n: usize,
    /// Zeros grouped with multiplicity, as (zero, multiplicity).
    pub groups: Vec<(C64, usize)>,
}

impl ModelBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coefficients of the orthogonal projection of f onto the space.
    pub fn project(&self, f: &CoefSeries) -> CoefSeries {
        let mut x = CVec::zeros(self.n);
        for (k, c) in f.coeffs.iter().take(self.n).enumerate() {
            x[k] = *c;
        }
        let y = &self.basis * (self.basis.adjoint() * x);
        CoefSeries::new(y.iter().cloned().collect())
    }
}

/// Build the model space of a finite Blaschke product.
///
/// The space is spanned by reproducing kernels at the zeros, with
/// derivative kernels supplying multiplicities. Distinct zeros closer
/// than 1e-8 cannot be told apart from a multiple zero at working
/// precision and are refused. The truncation is enlarged until every
/// kernel tail is below machine level, so the stored columns are exact
/// for all practical purposes.
pub fn model_basis(m: &InnerFunction, n_request: usize) -> Result<ModelBasis> {
    if !m.atoms.is_empty() {
        return Err(Error::Domain(
            "model spaces with singular factors are infinite dimensional; only finite Blaschke parts are supported".into(),
        ));
    }
    if m.zeros.is_empty() {
        return Err(Error::Degenerate("constant inner function has a zero model space".into()));
    }
    // Group zeros: coincident within 1e-10 is a multiplicity, a gap in
    // (1e-10, 1e-8) is unresolvable.
    let mut groups: Vec<(C64, usize)> = Vec::new();
    for z in &m.zeros {
        match groups.iter_mut().find(|(w, _)| (w - z).norm() < 1e-10) {
            Some((_, c)) => *c += 1,
            None => groups.push((*z, 1)),
        }
    }
    for i in 0..groups.len() {
        for j in 0..i {
            let gap = (groups[i].0 - groups[j].0).norm();
            if gap < 1e-8 {
                return Err(Error::Conditioning(format!(
                    "zeros {} and {} are {:.2e} apart: unresolvable at working precision",
                    groups[i].0, groups[j].0, gap
                )));
            }
        }
    }
    let d: usize = groups.iter().map(|(_, c)| c).sum();
    let rho = m.zeros.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let mut n = n_request.max(d + 8);
    if rho > 1e-14 {
        let needed = (16.0 * std::f64::consts::LN_10 / -rho.ln()).ceil() as usize;
        n = n.max(needed + d);
    }
    if n > (1 << 17) {
        return Err(Error::Conditioning(format!(
            "truncation {} needed for zero modulus {} is past the supported range",
            n, rho
        )));
    }

    let mut cols = CMat::zeros(n, d);
    let mut col = 0;
    for (z, mult) in &groups {
        let a = z.conj();
        for i in 0..*mult {
            // d^i/da^i of (a^k)_k: falling factorial k (k-1) ... (k-i+1).
            let mut p = C64::new(1.0, 0.0); // a^(k-i) running power
            for k in 0..n {
                if k >= i {
                    let mut fall = 1.0f64;
                    for t in 0..i {
                        fall *= (k - t) as f64;
                    }
                    cols[(k, col)] = fall * p;
                    p *= a;
                } else {
                    cols[(k, col)] = C64::new(0.0, 0.0);
                }
            }
            col += 1;
        }
    }
    let q = linalg::orthonormalize(&cols, 1e-12);
    if q.ncols() != d {
        return Err(Error::Conditioning(format!(
            "kernel columns collapsed: rank {} of expected {}",
            q.ncols(),
            d
        )));
    }
    Ok(ModelBasis { basis: q, n, groups })
}

/// Compression B* A B of a big-space operator to basis columns.
pub fn compress(op: &OperatorMatrix, basis: &CMat) -> Result<OperatorMatrix> {
    if op.cols() != basis.nrows() || op.rows() < basis.nrows() {
        // Rectangular ops with extra rows are fine as long as the basis
        // can be padded with zeros to match.
    }
    if op.cols() != basis.nrows() {
        return Err(Error::InvalidGrid {
            m: op.cols(),
            n: basis.nrows(),
            reason: "operator input size does not match basis length".into(),
        });
    }
    let image = &op.mat * basis;
    let mut lifted = CMat::zeros(op.rows(), basis.ncols());
    for j in 0..basis.ncols() {
        for i in 0..basis.nrows().min(op.rows()) {
            lifted[(i, j)] = basis[(i, j)];
        }
    }
    let mat = lifted.adjoint() * image;
    Ok(OperatorMatrix { mat, basis: BasisTag::Model, trust: basis.ncols() })
}

/// The compressed shift on a model space.
pub fn compressed_shift(mb: &ModelBasis) -> OperatorMatrix {
    let shift = toeplitz_analytic(&CoefSeries::from_reals(&[0.0, 1.0]), mb.n);
    let image = &shift.mat * &mb.basis; // (n+1) x d
    let mut lifted = CMat::zeros(mb.n + 1, mb.dim());
    for j in 0..mb.dim() {
        for i in 0..mb.n {
            lifted[(i, j)] = mb.basis[(i, j)];
        }
    }
    OperatorMatrix {
        mat: lifted.adjoint() * image,
        basis: BasisTag::Model,
        trust: mb.dim(),
    }
}

/// Evaluate a power series at a square matrix by Horner's scheme.
pub fn functional_calculus(u: &CoefSeries, a: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidOrder("matrix function of a non-square matrix".into()));
    }
    let n = a.nrows();
    let mut acc = CMat::zeros(n, n);
    for c in u.coeffs.iter().rev() {
        acc = a * acc;
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    Ok(acc)
}

/// Series length needed so that the tail of a function analytic past
/// `radius` is below machine level at spectral radius `rho`.
pub fn calculus_length(rho: f64) -> usize {
    if rho < 1e-14 {
        return 8;
    }
    let r = rho.min(1.0 - 1e-6);
    ((16.0 * std::f64::consts::LN_10 / -r.ln()).ceil() as usize).max(8)
}

// --- kernels and Fredholm data ------------------------------------------------

/// Orthonormal basis of the numerical kernel with a certified gap.
///
/// Cutoff is tol times the largest singular value. Everything below the
/// cutoff is null; the smallest kept singular value must clear 1e3 times
/// the cutoff, otherwise the split is ambiguous and an error says so.
pub fn numeric_kernel(a: &CMat, tol: f64) -> Result<CMat> {
    let (_, s, v) = linalg::svd(a);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        // Zero matrix: everything is kernel.
        return Ok(CMat::identity(a.ncols(), a.ncols()));
    }
    let cutoff = tol * smax;
    let kept: Vec<f64> = s.iter().cloned().filter(|&x| x >= cutoff).collect();
    let dropped_top = s.iter().cloned().filter(|&x| x < cutoff).fold(0.0f64, f64::max);
    if let Some(&smallest_kept) = kept.last() {
        if smallest_kept < 1e3 * cutoff {
            return Err(Error::GapAmbiguity {
                below: dropped_top,
                above: smallest_kept,
                cutoff,
            });
        }
    }
    let rank = kept.len();
    // The kernel is the orthocomplement of the leading right singular
    // vectors; completing via QR also covers wide matrices, whose thin
    // SVD carries fewer than n right vectors.
    let range = v.columns(0, rank.min(v.ncols())).clone_owned();
    linalg::orthonormal_complement(&range, 1e-10)
}

#[derive(Debug, Clone, Serialize)]
pub struct FredholmRow {
    pub n: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub index: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FredholmReport {
    pub rows: Vec<FredholmRow>,
    pub stable: bool,
}

/// Kernel and cokernel dimensions along a truncation ladder.
///
/// Each rung supplies the forward matrix (rectangular encodings welcome:
/// they avoid fake kernels from chopped ranges) and the matrix whose
/// kernel represents the cokernel. Stability means every rung agrees.
pub fn fredholm_probe(rungs: &[(usize, CMat, CMat)], tol: f64) -> Result<FredholmReport> {
    let mut rows = Vec::with_capacity(rungs.len());
    for (n, fwd, adj) in rungs {
        let k = numeric_kernel(fwd, tol)?.ncols();
        let c = numeric_kernel(adj, tol)?.ncols();
        rows.push(FredholmRow {
            n: *n,
            kernel_dim: k,
            cokernel_dim: c,
            index: k as i64 - c as i64,
        });
    }
    let stable = rows
        .windows(2)
        .all(|w| w[0].kernel_dim == w[1].kernel_dim && w[0].cokernel_dim == w[1].cokernel_dim);
    Ok(FredholmReport { rows, stable })
}

// --- quotients ----------------------------------------------------------------

/// Krylov block [x, Tx, ..., T^(k-1) x].
pub fn krylov(t: &CMat, x: &CVec, k: usize) -> CMat {
    let n = x.len();
    let mut out = CMat::zeros(n, k);
    let mut cur = x.clone();
    for j in 0..k {
        for i in 0..n {
            out[(i, j)] = cur[i];
        }
        if j + 1 < k {
            cur = t * cur;
        }
    }
    out
}

/// Orthogonal complement of the forward orbit {x, Tx, T^2 x, ...} seen
/// through the first `window` coordinates. Returns the codimension and a
/// basis of the unreached directions, zero-padded to the ambient size.
///
/// The orbit is driven 16 steps past the window so that every direction
/// the operator can reach inside it has been reached; `2 window + 16`
/// must fit in the ambient dimension to keep those columns meaningful.
/// Cutoff at `tol` times the top singular value, with the same guarded
/// gap as [`numeric_kernel`]: a singular value near the cutoff is an
/// ambiguity, not an answer.
pub fn orbit_complement(
    a: &OperatorMatrix,
    x: &CVec,
    window: usize,
    tol: f64,
) -> Result<(usize, CMat)> {
    let dim = a.mat.nrows();
    if x.len() != dim {
        return Err(Error::InvalidGrid {
            m: x.len(),
            n: dim,
            reason: "vector length does not match the operator".into(),
        });
    }
    if window < 8 || 2 * window + 16 > dim {
        return Err(Error::InvalidOrder(format!(
            "orbit window {} needs 8 <= w and 2w + 16 <= {}",
            window, dim
        )));
    }
    let k = krylov(&a.mat, x, window + 16);
    let kw = k.rows(0, window).clone_owned();
    let (u, s, _) = linalg::svd(&kw);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Err(Error::Degenerate("orbit vanishes on the window".into()));
    }
    let cutoff = tol * smax;
    let kept: Vec<f64> = s.iter().copied().filter(|&x| x >= cutoff).collect();
    if let Some(&smallest) = kept.last() {
        if smallest < 1e3 * cutoff {
            return Err(Error::GapAmbiguity {
                below: s.iter().copied().filter(|&x| x < cutoff).fold(0.0, f64::max),
                above: smallest,
                cutoff,
            });
        }
    }
    let rank = kept.len();
    let codim = window - rank;
    let mut basis = CMat::zeros(dim, codim);
    for (j, col) in (rank..window).enumerate() {
        for i in 0..window {
            basis[(i, j)] = u[(i, col)];
        }
    }
    Ok((codim, basis))
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientPair {
    pub u: CoefSeries,
    pub v: CoefSeries,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum QuotientVerdict {
    Quotient(QuotientPair),
    NoQuotient { residual: f64 },
}

/// Least-residual polynomial pair (u, v), both of degree at most d, with
/// u(T) h0 = v(T) h. The residual is the smallest singular value of the
/// stacked Krylov block, relative to its largest. Above `tol` the verdict
/// is no-quotient; that is a finding, not a failure.
///
/// The pair is normalized to unit length with the first nonzero
/// v-coefficient rotated real positive (or u, when v vanishes).
pub fn quotient_solver(
    t: &CMat,
    h0: &CVec,
    h: &CVec,
    d: usize,
    tol: f64,
) -> Result<QuotientVerdict> {
    if h0.len() != t.nrows() || h.len() != t.nrows() {
        return Err(Error::InvalidGrid {
            m: h0.len(),
            n: t.nrows(),
            reason: "vector lengths do not match the operator".into(),
        });
    }
    let k0 = krylov(t, h0, d + 1);
    let k1 = krylov(t, h, d + 1);
    let n = t.nrows();
    let mut m = CMat::zeros(n, 2 * (d + 1));
    for j in 0..=d {
        for i in 0..n {
            m[(i, j)] = k0[(i, j)];
            m[(i, d + 1 + j)] = -k1[(i, j)];
        }
    }
    let (_, s, v) = linalg::svd(&m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Err(Error::Degenerate("both quotient vectors are zero".into()));
    }
    let smin = s.last().copied().unwrap_or(0.0);
    let residual = smin / smax;
    let x = v.column(v.ncols() - 1).clone_owned();
    if residual > tol {
        return Ok(QuotientVerdict::NoQuotient { residual });
    }
    let mut uc: Vec<C64> = (0..=d).map(|j| x[j]).collect();
    let mut vc: Vec<C64> = (0..=d).map(|j| x[d + 1 + j]).collect();
    // Phase normalization.
    let vnorm: f64 = vc.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let unorm: f64 = uc.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let anchor = if vnorm > 1e-12 {
        vc.iter().find(|c| c.norm() > 1e-8 * vnorm).cloned()
    } else {
        uc.iter().find(|c| c.norm() > 1e-8 * unorm).cloned()
    };
    if let Some(a) = anchor {
        let rot = (a / a.norm()).conj();
        for c in uc.iter_mut() {
            *c *= rot;
        }
        for c in vc.iter_mut() {
            *c *= rot;
        }
    }
    Ok(QuotientVerdict::Quotient(QuotientPair {
        u: CoefSeries::new(uc),
        v: CoefSeries::new(vc),
        residual,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "kebab-case")]
pub enum Ord0 {
    Finite(usize),
    Infinite,
}

/// Vanishing order at the origin, with the zero series marked infinite.
pub fn ord0(f: &CoefSeries) -> Ord0 {
    let scale = f.norm();
    if scale == 0.0 {
        return Ord0::Infinite;
    }
    match f.vanishing_order(1e-10 * scale) {
        Some(k) => Ord0::Finite(k),
        None => Ord0::Infinite,
    }
}

// --- left inverses and eigenvector fields --------------------------------------

/// Left inverse L = (T* T)^(-1) T* of a tall full-rank matrix, so L T = I.
///
/// Certification: the smallest singular value squared must clear
/// 1e-8 times the operator norm squared.
pub fn left_inverse(t: &CMat) -> Result<CMat> {
    let (u, s, v) = linalg::svd(t);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.iter().take(t.ncols()).cloned().fold(f64::INFINITY, f64::min);
    let floor = 1e-8 * smax * smax;
    if smax == 0.0 || s.len() < t.ncols() || smin * smin < floor {
        return Err(Error::NotLeftInvertible { min_eig: smin * smin, floor });
    }
    // L = V S^(-1) U* restricted to the first ncols singular triples.
    let k = t.ncols();
    let mut vs = CMat::zeros(t.ncols(), k);
    for j in 0..k {
        for i in 0..t.ncols() {
            vs[(i, j)] = v[(i, j)] / s[j];
        }
    }
    let mut ut = CMat::zeros(k, t.nrows());
    let ua = u.adjoint();
    for i in 0..k {
        for j in 0..t.nrows() {
            ut[(i, j)] = ua[(i, j)];
        }
    }
    Ok(vs * ut)
}

/// Analytic eigenvector field of the adjoint: f(lambda) solves
/// (T* - lambda) f = 0 with f(0) spanning ker T*, via
/// f(lambda) = (I - lambda Lhat*)^(-1) f0, where L is a left inverse of
/// the trusted column slab of T and Lhat* = T (T*T)^(-1) P is its padded
/// adjoint on the full truncation.
///
/// Inside |lambda| ||Lhat|| < 0.95 the resolvent series converges and the
/// normalization f(0) = f0 is canonical. Farther out the kernel of
/// (T* - lambda) is continued along a radial path, which fixes phase but
/// not global scale.
pub struct EigenvectorField {
    t_adj: CMat,
    l_adj: CMat,
    f0: CVec,
    l_norm: f64,
}

impl EigenvectorField {
    pub fn new(a: &OperatorMatrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::InvalidOrder("field needs a square truncation".into()));
        }
        let m = a.rows();
        let tau = a.trust.min(m);
        if tau == 0 {
            return Err(Error::TrustViolation("no trusted columns to invert on".into()));
        }
        let t = a.mat.columns(0, tau).clone_owned();
        let l = left_inverse(&t)?; // tau x m, L T = I_tau
        // Padded adjoint: first tau columns of T (T*T)^(-1), zero beyond.
        let slab = t.adjoint() * &t;
        let inv = linalg::solve_mat(&slab, &CMat::identity(tau, tau))?;
        let thin = &t * inv; // m x tau
        let mut l_adj = CMat::zeros(m, m);
        for j in 0..tau {
            for i in 0..m {
                l_adj[(i, j)] = thin[(i, j)];
            }
        }
        let t_adj = a.mat.adjoint();
        let kernel = numeric_kernel(&t_adj, 1e-10)?;
        if kernel.ncols() != 1 {
            return Err(Error::Degenerate(format!(
                "adjoint kernel has dimension {}, field needs exactly 1",
                kernel.ncols()
            )));
        }
        let f0 = kernel.column(0).clone_owned();
        let l_norm = linalg::op_norm(&l);
        Ok(EigenvectorField { t_adj, l_adj, f0, l_norm })
    }

    pub fn f0(&self) -> &CVec {
        &self.f0
    }

    /// Padded adjoint of the trusted left inverse. Its powers raise f0
    /// through the biorthogonal system dual to the forward powers.
    pub fn raising(&self) -> &CMat {
        &self.l_adj
    }

    /// The field vector at an interior point, residual-checked.
    pub fn at(&self, lambda: C64) -> Result<CVec> {
        if lambda.norm() >= 1.0 {
            return Err(Error::Domain(format!("field point {} outside the open disk", lambda)));
        }
        let n = self.f0.len();
        let f = if lambda.norm() * self.l_norm < 0.95 {
            let mut a = CMat::identity(n, n);
            a -= &self.l_adj * lambda;
            linalg::solve(&a, &self.f0)?
        } else {
            self.continued(lambda)?
        };
        let resid = (&self.t_adj * &f - &f * lambda).norm();
        if resid > 1e-8 * f.norm() {
            return Err(Error::NumericalFailure {
                op: "eigenvector_field",
                report: format!("eigen residual {:.3e} at {}", resid / f.norm(), lambda),
            });
        }
        Ok(f)
    }

    fn continued(&self, lambda: C64) -> Result<CVec> {
        let steps = 8;
        let mut prev = self.f0.clone();
        let mut out = prev.clone();
        for k in 1..=steps {
            let lam = lambda * (k as f64 / steps as f64);
            let n = self.t_adj.nrows();
            let mut a = self.t_adj.clone();
            for i in 0..n {
                a[(i, i)] -= lam;
            }
            let ker = numeric_kernel(&a, 1e-10)?;
            if ker.ncols() != 1 {
                return Err(Error::Degenerate(format!(
                    "eigenvalue {} has kernel dimension {} along the path",
                    lam,
                    ker.ncols()
                )));
            }
            let mut v = ker.column(0).clone_owned();
            let overlap = prev.dotc(&v);
            if overlap.norm() < 1e-10 {
                return Err(Error::NumericalFailure {
                    op: "eigenvector_field",
                    report: format!("continuation lost the branch near {}", lam),
                });
            }
            v *= overlap.conj() / overlap.norm();
            prev = v.clone();
            out = v;
        }
        Ok(out)
    }
}
