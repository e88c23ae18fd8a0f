// Tour of the two-component column theta = (3z/5, 4(2z-1)/(5(2-z))).
// Builds the model space basis, finds the adjoint kernel, evaluates the
// eigenvector field at 1/2, prints the boundary residual projection at 1,
// and measures how well multiplication by the cleared denominator
// intertwines the model operator with the plain shift.

use hardylab::hardy::{C64, CoefSeries};
use hardylab::linalg;
use hardylab::model_ops::numeric_kernel;
use hardylab::theta::{
    field_closed_form, intertwining_defect, q_matrix, residual_projection, s_theta, theta_basis,
    vec_to_pair, Theta,
};

fn main() {
    let theta = Theta::preset("paper-example").unwrap();
    println!(
        "column unimodularity residual on 512 points: {:.3e}",
        theta.column_residual(512).unwrap()
    );

    let n = 256;
    let tb = theta_basis(&theta, n).unwrap();
    let a = s_theta(&tb);
    println!(
        "dim = {}   trusted columns = {}   guard = {}",
        tb.dim(),
        tb.trusted(),
        tb.guard()
    );

    // ker S(Theta)* is one-dimensional, spanned by the projection of (1, 0)
    let astar = a.mat.adjoint();
    let ker = numeric_kernel(&astar, 1e-8).unwrap();
    let p10 = tb.coords(&CoefSeries::one(), &CoefSeries::zero(1));
    println!("dim ker S(Theta)* = {}", ker.ncols());
    println!(
        "angle between the kernel and P(1,0): {:.3e}",
        linalg::sin_angle_to_span(&p10, &ker)
    );

    // the eigenvector field at lambda = 1/2
    let lambda = C64::new(0.5, 0.0);
    let (f1, f2) = vec_to_pair(&field_closed_form(&theta, lambda, n).unwrap());
    let x = tb.coords(&f1, &f2);
    let resid = (&astar * &x - &x * lambda).norm() / x.norm();
    println!("(S(Theta)* - 1/2) on the field vector: {resid:.3e}");

    // boundary residual projection at zeta = 1; rank one, trace 1
    let p = residual_projection(&theta, C64::new(1.0, 0.0)).unwrap();
    println!("residual projection at 1:");
    for i in 0..2 {
        println!("   [{:+.4} {:+.4}]", p[(i, 0)].re, p[(i, 1)].re);
    }

    let qm = q_matrix(&tb, 2 * n).unwrap();
    let defect = intertwining_defect(&tb, &a, &qm, tb.trusted());
    println!("intertwining defect over the trusted window: {defect:.3e}");
}
