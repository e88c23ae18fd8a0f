// Split a polynomial into inner and outer parts. Zeros inside the disk
// move to the Blaschke factor, everything else stays outer.

use hardylab::hardy::{to_boundary, BoundarySamples, CoefSeries};
use hardylab::inner_outer::poly_inner_outer;

fn main() {
    // p(z) = (z - 0.5)(z - 2) = 1 - 2.5 z + z^2
    let p = CoefSeries::from_reals(&[1.0, -2.5, 1.0]);
    let (inner, outer) = poly_inner_outer(&p).unwrap();

    println!("inner zeros:  {:?}", inner.zeros);
    println!("outer coeffs: {:?}", outer.coeffs);

    // recombine on the boundary and compare against p
    let m = 256;
    let pb = to_boundary(&p, m).unwrap();
    let ob = to_boundary(&outer, m).unwrap();
    let mut worst = 0.0f64;
    for (k, z) in BoundarySamples::grid(m).into_iter().enumerate() {
        let err = (inner.eval(z).unwrap() * ob.values[k] - pb.values[k]).norm();
        if err > worst {
            worst = err;
        }
    }
    println!("recombination residual on {m} boundary points: {worst:.3e}");

    // the outer part must not vanish inside the disk; sample a few radii
    for r in [0.0, 0.5, 0.9] {
        let v = outer.eval_at(hardylab::hardy::C64::new(r, 0.0));
        println!("outer({r:.1}) = {v}");
    }
}
