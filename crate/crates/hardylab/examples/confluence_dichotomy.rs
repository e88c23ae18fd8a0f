// Confluence is a dichotomy for these columns. Without a shared inner
// factor, any two model vectors are matched through injective operators
// from the commutant; the test returns sigma_min certificates. With a
// shared factor the whole algebra annihilates a concrete witness vector.

use hardylab::theta::{confluence_test, s_theta, theta_basis, ConfluenceOutcome, Theta};

fn main() {
    for name in ["paper-example", "common-factor-z"] {
        let theta = Theta::preset(name).unwrap();
        let tb = theta_basis(&theta, 96).unwrap();
        let a = s_theta(&tb);
        match confluence_test(&tb, &a).unwrap() {
            ConfluenceOutcome::Confluent { certificates } => {
                println!("{name}: confluent");
                for c in certificates {
                    println!("   sigma_min({}) = {:.4e}", c.label, c.sigma_min);
                }
            }
            ConfluenceOutcome::NotConfluent { gcd, witness_norm, annihilation } => {
                println!("{name}: not confluent");
                println!("   shared inner factor zeros: {:?}", gcd.zeros);
                println!("   witness norm {witness_norm:.4}, annihilation residual {annihilation:.3e}");
            }
        }
    }
}
