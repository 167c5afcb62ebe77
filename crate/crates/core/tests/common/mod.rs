#![allow(dead_code)]

use cvcomb::elements::{compose_network, NetworkElement};
use cvcomb::SymplecticTransform;
use rand::Rng;

/// Random network on `n` modes. Passive networks use only splitters and
/// phase shifts.
pub fn random_elements<R: Rng>(rng: &mut R, n: usize, len: usize, passive: bool) -> Vec<NetworkElement> {
    let mut els = Vec::with_capacity(len);
    for _ in 0..len {
        let a = rng.gen_range(0..n);
        let b = if n > 1 { (a + rng.gen_range(1..n)) % n } else { a };
        let kind = if passive { rng.gen_range(1..3) } else { rng.gen_range(0..4) };
        els.push(match kind {
            0 if n > 1 => NetworkElement::TwoModeSqueezer {
                modes: [a, b],
                r: rng.gen_range(0.0..0.8),
                phase: rng.gen_range(-3.1..3.1),
            },
            1 if n > 1 => NetworkElement::Beamsplitter {
                modes: [a, b],
                theta: rng.gen_range(-3.1..3.1),
                phi: rng.gen_range(-3.1..3.1),
            },
            3 => NetworkElement::SingleModeSqueezer {
                mode: a,
                r: rng.gen_range(-0.8..0.8),
            },
            _ => NetworkElement::PhaseShift {
                mode: a,
                phi: rng.gen_range(-3.1..3.1),
            },
        });
    }
    els
}

pub fn random_network<R: Rng>(rng: &mut R, n: usize, len: usize, passive: bool) -> SymplecticTransform {
    compose_network(n, &random_elements(rng, n, len, passive)).expect("valid elements")
}

/// Prints the criterion verdict line and fails the test when it did not pass.
pub fn report(id: &str, ok: bool, detail: &str) {
    println!("criterion {id}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}
