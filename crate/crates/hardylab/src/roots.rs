//! Complex polynomial roots by the Aberth-Ehrlich simultaneous iteration.
//!
//! Coefficients are ascending (c_0 + c_1 z + ...). Exact zeros at the
//! origin are peeled off first, then the deflated polynomial is solved with
//! all roots iterated together, then each root gets a few Newton polish
//! steps against the original polynomial. Simple roots come out near
//! machine precision; clustered roots degrade as the cluster condition
//! number dictates, and callers guard that with annulus / gap verdicts.

use num_complex::Complex64 as C64;

use crate::error::Error;
use crate::hardy::CoefSeries;
use crate::Result;

/// Hard cap on the degree this iteration is certified for.
pub const DEGREE_CAP: usize = 64;

fn eval_and_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of the polynomial with ascending coefficients `coeffs`,
/// multiplicity included, in no particular order.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Err(Error::Degenerate("root-finding on the zero polynomial".into()));
    }
    // Trim numerically-zero leading (high-order) coefficients.
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    if deg > DEGREE_CAP {
        return Err(Error::NumericalFailure {
            op: "poly_roots",
            report: format!("degree {} exceeds certified cap {}", deg, DEGREE_CAP),
        });
    }
    let mut work: Vec<C64> = coeffs[..=deg].to_vec();
    // Peel exact origin zeros.
    let mut origin = 0usize;
    while work.len() > 1 && work[0].norm() <= 1e-14 * scale {
        work.remove(0);
        origin += 1;
    }
    let n = work.len() - 1;
    let mut roots = vec![C64::new(0.0, 0.0); origin];
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-work[0] / work[1]);
        return Ok(roots);
    }

    // Initial guesses on a circle sized by the geometric mean of the
    // Cauchy-type radius, angles offset to break symmetry.
    let lead = work[n].norm();
    let r0 = (work[0].norm() / lead).powf(1.0 / n as f64);
    let r = r0.clamp(0.2, 5.0);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.45))
        .collect();

    let max_iter = 400;
    let mut converged = false;
    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval_and_derivative(&work, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { C64::new(1e-3, 1e-3) };
            let mut s = C64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d.norm() > 1e-300 {
                        s += d.inv();
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * s;
            let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
            z[i] -= step;
            let rel = step.norm() / (1.0 + z[i].norm());
            max_step = max_step.max(rel);
        }
        if max_step < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        // Accept if residuals are already tiny; otherwise report.
        let worst = z
            .iter()
            .map(|&zi| eval_and_derivative(&work, zi).0.norm())
            .fold(0.0f64, f64::max);
        if worst > 1e-8 * scale {
            return Err(Error::NumericalFailure {
                op: "poly_roots",
                report: format!(
                    "Aberth iteration stalled: worst residual {:.3e} of scale {:.3e}",
                    worst, scale
                ),
            });
        }
    }
    // Newton polish against the full (origin zeros included) polynomial is
    // wrong for multiple origin roots, so polish against `work`.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_and_derivative(&work, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if step.norm() < 1e-18 * (1.0 + zi.norm()) {
                break;
            }
            *zi -= step;
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Monic-times-`leading` polynomial with the given roots, ascending coeffs.
pub fn poly_from_roots(roots: &[C64], leading: C64) -> CoefSeries {
    let mut c = vec![leading];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (i, v) in c.iter().enumerate() {
            next[i] -= v * r;
            next[i + 1] += v;
        }
        c = next;
    }
    CoefSeries::new(c)
}

/// Worst relative residual of a claimed root set.
pub fn root_residual(coeffs: &[C64], roots: &[C64]) -> f64 {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1e-300);
    roots
        .iter()
        .map(|&r| eval_and_derivative(coeffs, r).0.norm() / scale)
        .fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sort_key(z: &C64) -> (i64, i64) {
        ((z.re * 1e9) as i64, (z.im * 1e9) as i64)
    }

    #[test]
    fn quadratic_with_known_roots() {
        // (z - 1/2)(z - 2) = 1 - 2.5 z + z^2
        let coeffs = vec![c(1.0, 0.0), c(-2.5, 0.0), c(1.0, 0.0)];
        let mut r = poly_roots(&coeffs).unwrap();
        r.sort_by_key(sort_key);
        assert!((r[0] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn origin_zeros_are_peeled() {
        // z^2 (z - 2)
        let coeffs = vec![c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)];
        let mut r = poly_roots(&coeffs).unwrap();
        r.sort_by_key(sort_key);
        assert_eq!(r.len(), 3);
        assert!(r[0].norm() < 1e-14);
        assert!(r[1].norm() < 1e-14);
        assert!((r[2] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(poly_roots(&[c(3.0, 1.0)]).unwrap().is_empty());
        assert!(poly_roots(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn degree_cap_enforced() {
        let coeffs = vec![c(1.0, 0.0); DEGREE_CAP + 2];
        assert!(matches!(poly_roots(&coeffs), Err(Error::NumericalFailure { .. })));
    }

    #[test]
    fn poly_from_roots_expands() {
        let p = poly_from_roots(&[c(0.5, 0.0), c(2.0, 0.0)], c(1.0, 0.0));
        assert_eq!(p.coeffs.len(), 3);
        assert!((p.coeffs[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((p.coeffs[1] - c(-2.5, 0.0)).norm() < 1e-15);
        assert!((p.coeffs[2] - c(1.0, 0.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn prop_roots_recovered(
            seeds in proptest::collection::vec((0.05f64..0.95, 0.0f64..6.28), 1..9),
            outside in proptest::collection::vec((1.1f64..3.0, 0.0f64..6.28), 0..4),
        ) {
            let mut roots: Vec<C64> = seeds.iter().map(|&(r, t)| C64::from_polar(r, t)).collect();
            roots.extend(outside.iter().map(|&(r, t)| C64::from_polar(r, t)));
            // Keep the configuration well separated so the test stays a
            // statement about simple roots.
            let mut ok = true;
            for i in 0..roots.len() {
                for j in 0..i {
                    if (roots[i] - roots[j]).norm() < 5e-2 {
                        ok = false;
                    }
                }
            }
            prop_assume!(ok);
            let p = poly_from_roots(&roots, c(1.3, -0.4));
            let mut found = poly_roots(&p.coeffs).unwrap();
            prop_assert_eq!(found.len(), roots.len());
            let mut expect = roots.clone();
            expect.sort_by_key(sort_key);
            found.sort_by_key(sort_key);
            for (a, b) in expect.iter().zip(&found) {
                prop_assert!((a - b).norm() < 1e-7, "{} vs {}", a, b);
            }
        }
    }
}
