// Witnesses against closability. Each certifying scenario drives a ladder
// of vectors h with both ||h|| and the image defect ||X h - g|| shrinking;
// the witness consistency is recomputed independently of the ladder, so a
// bug in the iteration cannot fake a certificate.

use hardylab::probes::{nonclosability_search, ClosabilityScenario};

fn main() {
    let outer = nonclosability_search(ClosabilityScenario::PolyVsOuter, 1e-2, 40).unwrap();
    println!(
        "poly-vs-outer: reached = {}, achieved eps = {:.3e}",
        outer.reached, outer.achieved_eps
    );
    for s in &outer.steps {
        println!("   step {:2}   ||h|| = {:.3e}   defect = {:.3e}", s.iteration, s.h_norm, s.defect);
    }
    let w = outer.witness.unwrap();
    println!("   witness consistency = {:.3e}", w.consistency);

    // kernel combinations at 1/2, 2/3, 3/4, ... shadow the constant with
    // error exactly prod |lambda_i| = 1/(P+1)
    let kernels = nonclosability_search(ClosabilityScenario::PolyVsKernels, 1e-1, 30).unwrap();
    println!(
        "poly-vs-kernels: achieved eps = {:.6} with {} steps (last should be 1/11)",
        kernels.achieved_eps,
        kernels.steps.len()
    );

    // the arc scenario is diagnostic only; it certifies nothing
    let arcs = nonclosability_search(ClosabilityScenario::BilateralArcs, 1e-3, 8).unwrap();
    println!(
        "bilateral-arcs: certifying = {}, reached = {}, achieved = {:.3e}",
        arcs.certifying, arcs.reached, arcs.achieved_eps
    );
}
