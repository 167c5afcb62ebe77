// Usage: cargo run --example epr_pair
//
// One four-wave-mixing pair: amplify vacuum, detect with loss, and compare
// the x-difference noise with the closed form.

use cvcomb::detection::{ideal_epr_noise, measure_witness};
use cvcomb::elements::{gain_to_squeezing, two_mode_squeezer};
use cvcomb::gaussian::{apply_symplectic, vacuum_state};
use cvcomb::{Quadrature, Witness};

fn main() {
    let diff = Witness::from_terms(2, &[(0, Quadrature::X, 1.0), (1, Quadrature::X, -1.0)]).unwrap();
    println!("{:>5} {:>5} {:>12} {:>12} {:>9}", "G", "eta", "simulated", "closed form", "dB");
    for gain in [1.0, 1.5, 2.0, 3.0] {
        let r = gain_to_squeezing(gain).unwrap();
        let pair = apply_symplectic(&vacuum_state(2).unwrap(), &two_mode_squeezer(r, 0.0).unwrap(), &[0, 1]).unwrap();
        for eta in [1.0, 0.95] {
            let sim = measure_witness(&pair, &diff, eta).unwrap();
            let cf = ideal_epr_noise(gain, eta).unwrap();
            println!("{gain:>5} {eta:>5} {:>12.6} {:>12.6} {:>9.3}", sim.variance, cf.variance, sim.db);
        }
    }
}
