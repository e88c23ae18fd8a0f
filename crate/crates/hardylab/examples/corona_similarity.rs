// Solve theta_1 f_1 + theta_2 f_2 = 1 over low-degree polynomials. A
// solution pins the column to an isometry up to similarity. The search
// reports per-degree residuals, so the shared-zero preset comes back
// certifiably infeasible rather than just unsolved.

use hardylab::hardy::C64;
use hardylab::theta::{corona_similarity, CoronaOutcome, Theta};

fn main() {
    let theta = Theta::preset("paper-example").unwrap();
    match corona_similarity(&theta, 4, 1024).unwrap() {
        CoronaOutcome::Solved { f1, f2, degree, boundary_residual, per_degree } => {
            println!("solved at degree {degree}, boundary residual {boundary_residual:.3e}");
            let zero = C64::new(0.0, 0.0);
            let one = C64::new(1.0, 0.0);
            println!("f1(0) = {}   f1(1) = {}", f1.eval_at(zero), f1.eval_at(one));
            println!("f2(0) = {}   f2(1) = {}", f2.eval_at(zero), f2.eval_at(one));
            println!("per-degree residuals: {per_degree:?}");
        }
        other => println!("unexpected: {other:?}"),
    }

    let shared = Theta::preset("common-factor-z").unwrap();
    match corona_similarity(&shared, 8, 1024).unwrap() {
        CoronaOutcome::Infeasible { common_zeros, per_degree } => {
            println!("common-factor-z: infeasible, shared zeros {common_zeros:?}");
            let floor = per_degree.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("residual floor across degrees up to 8: {floor:.3e}");
        }
        other => println!("unexpected: {other:?}"),
    }
}
