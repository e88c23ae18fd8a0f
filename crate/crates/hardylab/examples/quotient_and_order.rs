// Recover h/h0 as a polynomial quotient pair: u, v of bounded degree with
// u(S) h0 = v(S) h. The verdict is decided by the smallest singular value
// of a stacked Krylov block, so "no quotient" is a finding with a residual
// attached, not a failure.

use hardylab::hardy::CoefSeries;
use hardylab::linalg::CVec;
use hardylab::model_ops::{ord0, quotient_solver, shift_matrix, Ord0, QuotientVerdict};

fn embed(f: &CoefSeries, n: usize) -> CVec {
    let mut v = CVec::zeros(n);
    for (k, x) in f.coeffs.iter().enumerate() {
        v[k] = *x;
    }
    v
}

fn main() {
    let t = shift_matrix(64);
    let h0 = CoefSeries::from_reals(&[1.0, -0.5]);
    let g = CoefSeries::from_reals(&[0.0, 0.0, 2.0, 1.0]); // z^2 (2 + z)
    let h = g.mul(&h0);

    match quotient_solver(&t.mat, &embed(&h0, 64), &embed(&h, 64), 4, 1e-10).unwrap() {
        QuotientVerdict::Quotient(pair) => {
            println!("u = {:?}", pair.u.coeffs);
            println!("v = {:?}", pair.v.coeffs);
            println!("residual = {:.3e}", pair.residual);
            // orders at the origin match the factor z^2 in g
            println!("ord0(u) = {:?}   ord0(v) = {:?}", ord0(&pair.u), ord0(&pair.v));
            match (ord0(&pair.u), ord0(&pair.v)) {
                (Ord0::Finite(a), Ord0::Finite(b)) => println!("order of h/h0 at 0: {}", a as i64 - b as i64),
                _ => println!("degenerate pair"),
            }
        }
        QuotientVerdict::NoQuotient { residual } => println!("no quotient, residual {residual:.3e}"),
    }

    // unrelated vectors have no low-degree quotient
    let h_bad = CoefSeries::from_reals(&[0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    match quotient_solver(&t.mat, &embed(&h0, 64), &embed(&h_bad, 64), 4, 1e-10).unwrap() {
        QuotientVerdict::Quotient(pair) => println!("surprise quotient, residual {:.3e}", pair.residual),
        QuotientVerdict::NoQuotient { residual } => {
            println!("no degree-4 quotient for the unrelated pair, residual {residual:.3e}")
        }
    }
}
