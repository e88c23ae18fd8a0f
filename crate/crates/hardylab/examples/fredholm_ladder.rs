// lambda - S(Theta) across truncation sizes: trivial kernel, cokernel of
// dimension one, index -1, and the counts must agree along the ladder
// before a point is called stable.

use hardylab::hardy::C64;
use hardylab::probes::spectral_picture_column;
use hardylab::theta::Theta;

fn main() {
    let theta = Theta::preset("paper-example").unwrap();
    let lambdas = vec![
        C64::new(0.0, 0.0),
        C64::new(0.3, 0.0),
        C64::new(0.0, 0.5),
        C64::new(-0.7, 0.0),
    ];
    let pic = spectral_picture_column(&theta, &[64, 128, 256], &lambdas, 1e-5).unwrap();
    for p in &pic.points {
        println!(
            "lambda = {:+.2}{:+.2}i   stable = {}   index = {}",
            p.lambda[0], p.lambda[1], p.stable, p.index
        );
        for r in &p.rows {
            println!("   N = {:3}   ker {}   coker {}", r.n, r.kernel_dim, r.cokernel_dim);
        }
    }
    println!("stable fraction: {}", pic.stable_fraction);
}
