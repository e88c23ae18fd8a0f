//! Dense complex linear algebra helpers shared by the operator modules.
//!
//! SVD comes from nalgebra (sorted, descending). QR is a hand-rolled
//! complex Householder factorization because we need the *full* unitary
//! factor for orthogonal complements, which nalgebra's thin QR does not
//! expose. The graded extraction at the bottom turns an anonymous
//! orthonormal kernel basis into one ordered by top coordinate, which is
//! what makes truncation trust auditable for model bases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::Error;
use crate::Result;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

/// Singular value decomposition, descending. Returns (U, sigma, V) with
/// A = U diag(sigma) V^*.
pub fn svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    let sigma: Vec<f64> = svd.singular_values.iter().cloned().collect();
    (u, sigma, vt.adjoint())
}

/// Largest singular value (operator norm); 0 for empty matrices.
pub fn op_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let (_, sigma, _) = svd(a);
    sigma.first().cloned().unwrap_or(0.0)
}

/// Full complex Householder QR: A = Q R with Q m-by-m unitary,
/// R m-by-n upper triangular.
pub fn householder_qr(a: &CMat) -> (CMat, CMat) {
    let m = a.nrows();
    let n = a.ncols();
    let mut r = a.clone();
    let mut q = CMat::identity(m, m);
    for j in 0..n.min(m.saturating_sub(1)) {
        // Build the reflector for column j below the diagonal.
        let x_norm: f64 = (j..m).map(|i| r[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if x_norm == 0.0 {
            continue;
        }
        let x0 = r[(j, j)];
        let phase = if x0.norm() == 0.0 { cone() } else { x0 / x0.norm() };
        let alpha = -phase * x_norm;
        let mut v = vec![czero(); m - j];
        for i in j..m {
            v[i - j] = r[(i, j)];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // R <- H R on rows j..m
        for col in j..n {
            let mut dot = czero();
            for i in j..m {
                dot += v[i - j].conj() * r[(i, col)];
            }
            let s = beta * dot;
            for i in j..m {
                let d = v[i - j] * s;
                r[(i, col)] -= d;
            }
        }
        // Q <- Q H on columns j..m
        for row in 0..m {
            let mut dot = czero();
            for i in j..m {
                dot += q[(row, i)] * v[i - j];
            }
            let s = beta * dot;
            for i in j..m {
                let d = s * v[i - j].conj();
                q[(row, i)] -= d;
            }
        }
    }
    // Zero the strictly-lower part of R to kill roundoff residue.
    for j in 0..n {
        for i in (j + 1)..m {
            r[(i, j)] = czero();
        }
    }
    (q, r)
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `c` (columns must be independent; the diagonal of R is checked against
/// `rank_tol * max |R_kk|`).
pub fn orthonormal_complement(c: &CMat, rank_tol: f64) -> Result<CMat> {
    let m = c.nrows();
    let n = c.ncols();
    if n == 0 {
        return Ok(CMat::identity(m, m));
    }
    if n > m {
        return Err(Error::Degenerate(format!(
            "complement of {} columns in dimension {}",
            n, m
        )));
    }
    let (q, r) = householder_qr(c);
    let max_diag = (0..n).map(|k| r[(k, k)].norm()).fold(0.0f64, f64::max);
    for k in 0..n {
        if r[(k, k)].norm() <= rank_tol * max_diag {
            return Err(Error::Degenerate(format!(
                "column family is rank deficient: |R_{},{}| = {:.3e} vs max {:.3e}",
                k,
                k,
                r[(k, k)].norm(),
                max_diag
            )));
        }
    }
    Ok(q.columns(n, m - n).into_owned())
}

/// One graded vector: an orthonormal basis element together with the index
/// of its last numerically nonzero coordinate.
#[derive(Debug, Clone)]
pub struct GradedVector {
    pub top_row: usize,
    pub vector: CVec,
}

/// Re-organize an orthonormal column family into a graded basis: same span,
/// still orthonormal, but vector i is supported on coordinate rows
/// `0..=top_row_i` with `top_row` nondecreasing. Works by sweeping rows from
/// the bottom and peeling one direction per row where the remaining family
/// has mass above `tol`. Each vector's phase is normalized so its top
/// coordinate is real positive.
pub fn graded_from_orthonormal(v: &CMat, tol: f64) -> Vec<GradedVector> {
    let m = v.nrows();
    let mut w = v.clone();
    let mut active = v.ncols();
    let mut out: Vec<GradedVector> = Vec::with_capacity(active);
    for r in (0..m).rev() {
        if active == 0 {
            break;
        }
        let row_norm: f64 = (0..active).map(|j| w[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        if row_norm <= tol {
            continue;
        }
        // Right-multiply the active block by a Householder reflection that
        // concentrates row r into the last active column.
        let last = active - 1;
        let mut u: Vec<C64> = (0..active).map(|j| w[(r, j)].conj()).collect();
        let x_last = u[last];
        let phase = if x_last.norm() == 0.0 { cone() } else { x_last / x_last.norm() };
        let tau = -phase * row_norm;
        u[last] -= tau;
        let unorm2: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        if unorm2 > 0.0 {
            let beta = 2.0 / unorm2;
            for i in 0..m {
                let mut dot = czero();
                for j in 0..active {
                    dot += w[(i, j)] * u[j];
                }
                let s = beta * dot;
                for j in 0..active {
                    let d = s * u[j].conj();
                    w[(i, j)] -= d;
                }
            }
        }
        // Extract the concentrated column; clean the coordinates above the
        // top row that are pure roundoff.
        let mut col = CVec::from_iterator(m, (0..m).map(|i| w[(i, last)]));
        for i in (r + 1)..m {
            col[i] = czero();
        }
        let pivot = col[r];
        if pivot.norm() > 0.0 {
            let ph = (pivot / pivot.norm()).conj();
            for i in 0..m {
                col[i] *= ph;
            }
        }
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
        out.push(GradedVector { top_row: r, vector: col });
        active -= 1;
    }
    debug_assert_eq!(active, 0, "graded extraction lost directions");
    out.reverse();
    out
}

/// sin of the principal angle between a vector and the span of orthonormal
/// columns `q`: the relative distance from x to the span.
pub fn sin_angle_to_span(x: &CVec, q: &CMat) -> f64 {
    let nx = x.norm();
    if nx == 0.0 {
        return 0.0;
    }
    let coeffs = q.adjoint() * x;
    let proj = q * &coeffs;
    let resid = x - proj;
    (resid.norm() / nx).min(1.0)
}

/// sin of the angle between two single directions.
pub fn sin_angle_between(x: &CVec, y: &CVec) -> f64 {
    let (nx, ny) = (x.norm(), y.norm());
    if nx == 0.0 || ny == 0.0 {
        return 1.0;
    }
    let c = (x.dotc(y).norm() / (nx * ny)).min(1.0);
    (1.0 - c * c).sqrt()
}

/// Orthonormalize columns by modified Gram-Schmidt with one
/// re-orthogonalization pass; columns with residual norm below
/// `drop_tol * original norm` are dropped.
pub fn orthonormalize(a: &CMat, drop_tol: f64) -> CMat {
    let m = a.nrows();
    let mut cols: Vec<CVec> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        let orig = v.norm().max(1e-300);
        for _ in 0..2 {
            for q in &cols {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        if v.norm() > drop_tol * orig {
            let n = v.norm();
            cols.push(v / C64::new(n, 0.0));
        }
    }
    let mut out = CMat::zeros(m, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Minimum-norm least-squares solve via SVD with a relative cutoff.
/// Returns the solution and the residual norm ||A x - b||.
pub fn lstsq_min_norm(a: &CMat, b: &CVec, cutoff_rel: f64) -> (CVec, f64) {
    let (u, sigma, v) = svd(a);
    let smax = sigma.first().cloned().unwrap_or(0.0);
    let mut y = u.adjoint() * b;
    let k = sigma.len();
    for i in 0..k {
        if smax > 0.0 && sigma[i] > cutoff_rel * smax {
            y[i] /= C64::new(sigma[i], 0.0);
        } else {
            y[i] = czero();
        }
    }
    let x = v.columns(0, k) * y.rows(0, k);
    let resid = (a * &x - b).norm();
    (x, resid)
}

/// Hermitian positive-definite solve helper (via LU; sizes are modest).
pub fn solve(a: &CMat, b: &CVec) -> Result<CVec> {
    a.clone().lu().solve(b).ok_or_else(|| Error::NumericalFailure {
        op: "solve",
        report: "LU solve failed (singular system)".into(),
    })
}

pub fn solve_mat(a: &CMat, b: &CMat) -> Result<CMat> {
    a.clone().lu().solve(b).ok_or_else(|| Error::NumericalFailure {
        op: "solve",
        report: "LU solve failed (singular system)".into(),
    })
}
