// Usage: cargo run --example homodyne_conditioning
//
// Measuring one half of an EPR pair squeezes the other half; the
// conditional variance does not depend on the outcome.

use cvcomb::cluster::condition_on_homodyne;
use cvcomb::elements::two_mode_squeezer;
use cvcomb::gaussian::{apply_symplectic, vacuum_state};
use cvcomb::Quadrature;

fn main() {
    for r in [0.0, 0.5, 1.0, 2.0] {
        let pair = apply_symplectic(&vacuum_state(2).unwrap(), &two_mode_squeezer(r, 0.0).unwrap(), &[0, 1]).unwrap();
        let after = condition_on_homodyne(&pair, 0, Quadrature::X, 1.0).unwrap();
        println!(
            "r = {r}: partner x variance {:.6} (1/cosh 2r = {:.6}), mean {:.6}",
            after.cov()[(0, 0)],
            1.0 / (2.0 * r).cosh(),
            after.mean()[0]
        );
    }
}
