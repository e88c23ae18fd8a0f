// The finite Blaschke product m annihilates its own compressed shift:
// m(S(m)) = 0 to machine accuracy. A proper inner divisor d instead gives
// a partial isometry d(S(m)) with kernel dimension deg d and surviving
// singular values exactly 1.

use hardylab::hardy::C64;
use hardylab::inner_outer::InnerFunction;
use hardylab::linalg;
use hardylab::model_ops::{calculus_length, compressed_shift, functional_calculus, model_basis};

fn main() {
    let zeros = vec![C64::new(0.5, 0.0), C64::new(-0.3, 0.2), C64::new(0.1, 0.0)];
    let m = InnerFunction::blaschke(zeros.clone()).unwrap();
    let mb = model_basis(&m, 64).unwrap();
    let a = compressed_shift(&mb);
    println!("dim H(m) = {}", a.mat.nrows());

    let len = calculus_length(0.5);
    let series = m.series_to(len).unwrap();
    let annihilated = functional_calculus(&series, &a.mat).unwrap();
    let worst = annihilated.iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("max entry of m(S(m)) = {worst:.3e}");

    for (label, kept) in [("0.5", vec![zeros[0]]), ("0.5 and -0.3+0.2i", zeros[..2].to_vec())] {
        let d = InnerFunction::blaschke(kept).unwrap();
        let ds = functional_calculus(&d.series_to(len).unwrap(), &a.mat).unwrap();
        let (_, s, _) = linalg::svd(&ds);
        let printed: Vec<String> = s.iter().map(|x| format!("{x:.6}")).collect();
        println!("divisor with zeros {{{label}}}: singular values {printed:?}");
    }
}
