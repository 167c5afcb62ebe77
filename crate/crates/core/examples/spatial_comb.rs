// Usage: cargo run --example spatial_comb
//
// A 200-mode ring: every probe/conjugate pair across the ring is an
// independent EPR pair, and the amplifier's graph is bipartite.

use std::f64::consts::FRAC_PI_2;

use cvcomb::cluster::{bipartite_graph, extract_graph, rotate_modes};
use cvcomb::comb::{amplify_comb, build_comb, Band};
use cvcomb::elements::AmplifierSpec;
use cvcomb::gaussian::{vacuum_state, witness_variance};
use cvcomb::{Quadrature, Witness};

fn main() {
    let amp = AmplifierSpec::from_gain(2.0, 0.0).unwrap();
    let comb = build_comb(200, amp, 1).unwrap();
    let state = amplify_comb(&vacuum_state(comb.n_modes()).unwrap(), &comb).unwrap();

    let worst = comb
        .pairs()
        .iter()
        .map(|&(a, b)| {
            let w = Witness::from_terms(comb.n_modes(), &[(a, Quadrature::X, 1.0), (b, Quadrature::X, -1.0)]).unwrap();
            witness_variance(&state, &w).unwrap()
        })
        .fold(0.0, f64::max);
    println!("{} pairs at G = {}, r = {:.6}", comb.pairs().len(), amp.gain(), amp.r());
    println!("largest pair variance {worst:.12} (e^-2r = {:.12})", (-2.0 * amp.r()).exp());

    let small = build_comb(8, AmplifierSpec::from_squeezing(4.0, 0.0).unwrap(), 1).unwrap();
    let st = amplify_comb(&vacuum_state(8).unwrap(), &small).unwrap();
    let st = rotate_modes(&st, &small.band_modes(Band::Conjugate), -FRAC_PI_2).unwrap();
    let extracted = extract_graph(&st).unwrap();
    println!("8-mode ring, r = 4:");
    for e in extracted.edges() {
        println!("  {} - {}  weight {:.6}", e.a, e.b, e.weight);
    }
    println!(
        "max deviation from the bipartite graph: {:.2e}",
        extracted.max_weight_difference(&bipartite_graph(&small)).unwrap()
    );
}
