// Usage: cargo run --example misaligned_lo
//
// How much squeezing survives when part of the local oscillator lands on
// the wrong spatial modes.

use cvcomb::comb::{build_comb, overlap_spec_from_alignment, synthesize_lo};
use cvcomb::detection::{ideal_epr_noise, misaligned_noise};
use cvcomb::elements::AmplifierSpec;
use num_complex::Complex64;

fn main() {
    let gain = 2.0;
    let eta_d = 0.95;
    let comb = build_comb(8, AmplifierSpec::from_gain(gain, 0.0).unwrap(), 1).unwrap();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); comb.n_modes()];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let lo = synthesize_lo(&comb, &coeffs).unwrap();

    println!("aligned: {:.6}", ideal_epr_noise(gain, eta_d).unwrap().variance);
    for strays in [vec![0.5], vec![0.5, 0.5]] {
        println!("stray efficiencies {strays:?}");
        for k in 0..=5 {
            let mis = 0.05 * k as f64;
            let spec = overlap_spec_from_alignment(&lo, 0, mis, if mis > 0.0 { &strays } else { &[] }, eta_d).unwrap();
            let rep = misaligned_noise(&spec, gain).unwrap();
            println!("  misalignment {mis:.2}: {:.6} ({:+.3} dB)", rep.variance, rep.db);
        }
    }
}
