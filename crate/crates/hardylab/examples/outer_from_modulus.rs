// Reconstruct an outer function from its boundary modulus. The stored
// exponent reproduces the modulus exactly at grid points no matter how
// rough the modulus is; the truncated Taylor series of exp(F) converges
// slowly when the modulus has a kink, so boundary work should go through
// OuterFunction::boundary.

use hardylab::hardy::{to_boundary, BoundarySamples};
use hardylab::inner_outer::outer_from_modulus;

fn main() {
    let m = 1024;
    let grid = BoundarySamples::grid(m);
    // min(1, e^{-cos t}) has a kink where the exponent crosses zero
    let w: Vec<f64> = grid.iter().map(|z| (-z.re).exp().min(1.0)).collect();

    let dev = |vals: &BoundarySamples| {
        vals.values
            .iter()
            .zip(&w)
            .map(|(v, wi)| (v.norm() - wi).abs())
            .fold(0.0f64, f64::max)
    };

    for n in [64usize, 256, 1024] {
        let o = outer_from_modulus(&w, n).unwrap();
        let exact = o.boundary(m).unwrap();
        let series = to_boundary(&o.coef, m).unwrap();
        println!(
            "n = {n:4}   exponent grid dev {:.2e}   series dev {:.2e}",
            dev(&exact),
            dev(&series)
        );
    }

    // a smooth modulus is a different story: the series catches up fast
    let smooth: Vec<f64> = grid.iter().map(|z| (1.0 - 0.5 * z).norm()).collect();
    let o = outer_from_modulus(&smooth, 64).unwrap();
    let series = to_boundary(&o.coef, m).unwrap();
    let dev_smooth = series
        .values
        .iter()
        .zip(&smooth)
        .map(|(v, wi)| (v.norm() - wi).abs())
        .fold(0.0f64, f64::max);
    println!("smooth |1 - z/2| at n = 64: series dev {dev_smooth:.2e}");
}
