// Usage: cargo run --example bloch_messiah
//
// Reduce a small network to interferometer, squeezers, interferometer.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use cvcomb::bloch_messiah::{decompose, recomposition_error};
use cvcomb::elements::{compose_network, NetworkElement};

fn main() {
    let r = 0.8;
    let network = [
        NetworkElement::TwoModeSqueezer { modes: [0, 1], r, phase: 0.0 },
        NetworkElement::TwoModeSqueezer { modes: [2, 3], r, phase: 0.0 },
        NetworkElement::PhaseShift { mode: 1, phi: -FRAC_PI_2 },
        NetworkElement::PhaseShift { mode: 3, phi: -FRAC_PI_2 },
        NetworkElement::Beamsplitter { modes: [1, 2], theta: FRAC_PI_4, phi: 0.0 },
    ];
    let s = compose_network(4, &network).unwrap();
    let d = decompose(&s).unwrap();
    println!("squeeze spectrum: {:?}", d.squeeze().as_slice());
    println!("recomposition error: {:.2e}", recomposition_error(&s, &d));
    println!(
        "passive factors orthogonal to {:.1e} and {:.1e}",
        d.passive_in().orthogonality_deviation(),
        d.passive_out().orthogonality_deviation()
    );
}
