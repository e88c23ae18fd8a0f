// Pair the first k basis vectors against the adjoint eigenvector field at
// k sample points. After normalization the pairing matrix is the identity;
// the report keeps the worst deviation.

use hardylab::model_ops::shift_matrix;
use hardylab::probes::biorthogonality_suite;
use hardylab::theta::{s_theta, theta_basis, Theta};

fn main() {
    let shift = shift_matrix(64);
    let r = biorthogonality_suite(&shift, 8).unwrap();
    println!("shift, k = {}: max deviation {:.3e}", r.k, r.max_deviation);

    let theta = Theta::preset("paper-example").unwrap();
    let tb = theta_basis(&theta, 96).unwrap();
    let a = s_theta(&tb);
    let r = biorthogonality_suite(&a, 8).unwrap();
    println!("column, k = {}: max deviation {:.3e}", r.k, r.max_deviation);

    // corner of the pairing table, magnitudes only
    for row in r.table.iter().take(4) {
        let mags: Vec<String> = row
            .iter()
            .take(4)
            .map(|[re, im]| format!("{:.4}", (re * re + im * im).sqrt()))
            .collect();
        println!("   {}", mags.join("  "));
    }
}
