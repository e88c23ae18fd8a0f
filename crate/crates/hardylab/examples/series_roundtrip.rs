// Coefficient series to boundary samples and back, plus the reproducing
// kernel identity <f, k_a> = f(a).

use hardylab::hardy::{cauchy_kernel, h2_inner, to_boundary, to_coef, C64, CoefSeries};

fn main() {
    let f = CoefSeries::from_reals(&[1.0, -0.5, 0.25, 0.125, 2.0]);
    let grid = to_boundary(&f, 256).unwrap();
    let back = to_coef(&grid, f.len()).unwrap();
    println!("roundtrip error: {:.3e}", f.sub(&back).norm());

    let a = C64::new(0.5, 0.0);
    let k = cauchy_kernel(a, 64).unwrap();
    let pairing = h2_inner(&f, &k);
    println!("<f, k_a>  = {pairing}");
    println!("f(a)      = {}", f.eval_at(a));

    // ||k_a||^2 = 1/(1 - |a|^2), so 4/3 at a = 1/2
    let nsq = h2_inner(&k, &k).re;
    println!("||k_a||^2 = {nsq:.12} (4/3 = {:.12})", 4.0 / 3.0);
}
