//! Acceptance checks. Each test prints one `criterion N: PASS|FAIL` line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

mod common;

use std::time::{Duration, Instant};

use cvcomb::bloch_messiah::{decompose, recompose, recomposition_error};
use cvcomb::cluster::{build_dual_rail, extract_graph, wire_witnesses, DualRailSpec, PhaseConvention, WitnessSigns};
use cvcomb::comb::{amplify_comb, build_comb, OverlapSpec};
use cvcomb::detection::{ideal_epr_noise, misaligned_noise, squeezing_db};
use cvcomb::elements::{gain_to_squeezing, loss_channel, squeezing_to_gain, two_mode_squeezer, AmplifierSpec};
use cvcomb::gaussian::{apply_symplectic, check_physicality, purity, vacuum_state, witness_variance};
use cvcomb::{GaussianState, Quadrature, SymplecticTransform, Witness};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAINS: [f64; 6] = [1.0, 1.2, 1.5, 2.0, 3.0, 4.0];
const ETAS: [f64; 4] = [1.0, 0.99, 0.95, 0.8];

fn closed_form(g: f64, eta: f64) -> f64 {
    1.0 + 2.0 * eta * (g - 1.0 - (g * (g - 1.0)).sqrt())
}

fn x_diff(n: usize, a: usize, b: usize) -> Witness {
    Witness::from_terms(n, &[(a, Quadrature::X, 1.0), (b, Quadrature::X, -1.0)]).unwrap()
}

/// States generated by each criterion, tagged with whether they are pure.
type Produced = Vec<(GaussianState, bool)>;

fn criterion_1() -> (bool, String, Produced, Duration) {
    let t = Instant::now();
    let mut states = Vec::new();
    let mut worst: f64 = 0.0;
    let mut spot = f64::NAN;
    for g in GAINS {
        let r = gain_to_squeezing(g).unwrap();
        let pair = apply_symplectic(&vacuum_state(2).unwrap(), &two_mode_squeezer(r, 0.0).unwrap(), &[0, 1]).unwrap();
        for eta in ETAS {
            let lossy = loss_channel(&loss_channel(&pair, 0, eta).unwrap(), 1, eta).unwrap();
            let v = witness_variance(&lossy, &x_diff(2, 0, 1)).unwrap();
            worst = worst.max((v - closed_form(g, eta)).abs());
            if g == 2.0 && eta == 1.0 {
                spot = v;
            }
            states.push((lossy, eta == 1.0));
        }
        states.push((pair, true));
    }
    let elapsed = t.elapsed();
    let ok = worst <= 1e-10 && (spot - 0.171_573).abs() <= 1e-6 && elapsed < Duration::from_secs(1);
    (ok, format!("max |sim - closed form| = {worst:e}, G=2 eta=1 -> {spot}, {elapsed:?}"), states, elapsed)
}

#[test]
fn criterion_1_closed_form_grid() {
    let (ok, detail, _, _) = criterion_1();
    common::report("1", ok, &detail);
}

#[test]
fn criterion_2_nine_db_anchor() {
    let t = Instant::now();
    let g = squeezing_to_gain(1.03624).unwrap();
    let g_round = squeezing_to_gain(gain_to_squeezing(g).unwrap()).unwrap();
    let db_round = squeezing_db(ideal_epr_noise(g_round, 1.0).unwrap().variance).unwrap();
    let db_direct = squeezing_db(ideal_epr_noise(2.51724, 1.0).unwrap().variance).unwrap();
    let elapsed = t.elapsed();
    let ok = (db_round + 9.0).abs() <= 0.01
        && (db_direct + 9.0).abs() <= 0.01
        && (g_round - g).abs() <= 1e-12
        && elapsed < Duration::from_millis(100);
    common::report(
        "2",
        ok,
        &format!("G(r=1.03624) = {g} -> {db_round} dB; G = 2.51724 -> {db_direct} dB"),
    );
}

#[test]
fn criterion_3_misaligned_lo() {
    let mut worst_a: f64 = 0.0;
    for g in GAINS {
        for eta in ETAS {
            let spec = OverlapSpec::new(1.0, 1.0, vec![], eta, vec![]).unwrap();
            let d = misaligned_noise(&spec, g).unwrap().variance - ideal_epr_noise(g, eta).unwrap().variance;
            worst_a = worst_a.max(d.abs());
        }
    }
    let one = misaligned_noise(&OverlapSpec::new(1.0, 0.9, vec![0.1], 0.95, vec![0.5]).unwrap(), 2.0)
        .unwrap()
        .variance;
    let two = misaligned_noise(
        &OverlapSpec::new(1.0, 0.9, vec![0.05, 0.05], 0.95, vec![0.5, 0.5]).unwrap(),
        2.0,
    )
    .unwrap()
    .variance;
    let ok_b = (one - 0.250_273).abs() <= 1e-6 && (two - 0.450_273).abs() <= 1e-6;

    let mut monotone = true;
    for strays in [vec![0.5], vec![0.3, 0.6], vec![0.0, 0.2, 0.9]] {
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let frac = k as f64 / 10.0;
            let share = (1.0 - frac) / strays.len() as f64;
            let spec = OverlapSpec::new(1.0, frac, vec![share; strays.len()], 0.95, strays.clone()).unwrap();
            let v = misaligned_noise(&spec, 2.0).unwrap().variance;
            monotone &= v <= last + 1e-15;
            last = v;
        }
    }
    let ok = worst_a <= 1e-14 && ok_b && monotone;
    common::report(
        "3",
        ok,
        &format!("(a) max diff {worst_a:e}; (b) {one}, {two}; (c) monotone = {monotone}"),
    );
}

/// Dense covariance of the wire from full-size matrix products.
fn wire_cov_oracle(n_pairs: usize, r: f64, conv: PhaseConvention) -> DMatrix<f64> {
    let n = 2 * n_pairs;
    let embed = |m: &[f64], modes: &[usize]| {
        let k = modes.len();
        let mut full = DMatrix::<f64>::identity(2 * n, 2 * n);
        let idx: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|&q| n + q)).collect();
        for a in 0..2 * k {
            for b in 0..2 * k {
                full[(idx[a], idx[b])] = m[a * 2 * k + b];
            }
        }
        full
    };
    let (c, s) = (r.cosh(), r.sinh());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let tms = [c, s, 0., 0., s, c, 0., 0., 0., 0., c, -s, 0., 0., -s, c];
    let bs = [h, h, 0., 0., -h, h, 0., 0., 0., 0., h, h, 0., 0., -h, h];
    let rot = [0., -1., 1., 0.];
    let mut total = DMatrix::<f64>::identity(2 * n, 2 * n);
    for k in 0..n_pairs {
        total = embed(&tms, &[2 * k, 2 * k + 1]) * total;
    }
    if conv == PhaseConvention::OddModeMinusHalfPi {
        for m in (1..n).step_by(2) {
            total = embed(&rot, &[m]) * total;
        }
    }
    for k in 0..n_pairs - 1 {
        total = embed(&bs, &[2 * k + 1, 2 * k + 2]) * total;
    }
    &total * total.transpose()
}

fn criterion_4() -> (bool, String, Produced, Duration) {
    let t = Instant::now();
    let mut states = Vec::new();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n_pairs in [2, 4, 8] {
        for step in 0..=8 {
            let r = 0.25 * step as f64;
            let expect = (-2.0 * r).exp();
            for conv in [PhaseConvention::OddModeMinusHalfPi, PhaseConvention::None] {
                let spec = DualRailSpec::new(n_pairs, r, conv).unwrap();
                let (st, _) = build_dual_rail(&spec).unwrap();
                let oracle = wire_cov_oracle(n_pairs, r, conv);
                worst = worst.max((st.cov() - &oracle).amax());
                for w in wire_witnesses(&spec, WitnessSigns::Grouped).unwrap() {
                    let c = w.witness.coeffs();
                    let v_oracle = c.dot(&(&oracle * c)) / w.witness.normalization();
                    let v_sim = witness_variance(&st, &w.witness).unwrap();
                    worst = worst.max((v_oracle - expect).abs()).max((v_sim - expect).abs());
                    count += 1;
                }
                states.push((st, true));
            }
        }
    }
    let elapsed = t.elapsed();
    let ok = worst <= 1e-9 && elapsed < Duration::from_secs(5);
    (ok, format!("{count} witnesses, max |var - e^(-2r)| = {worst:e}, {elapsed:?}"), states, elapsed)
}

#[test]
fn criterion_4_wire_witness_decay() {
    let (ok, detail, _, _) = criterion_4();
    common::report("4", ok, &detail);
}

fn criterion_5() -> (bool, String, Produced, Duration) {
    let t = Instant::now();
    let spec = DualRailSpec::new(4, 5.0, PhaseConvention::OddModeMinusHalfPi).unwrap();
    let (st, ideal) = build_dual_rail(&spec).unwrap();
    let g = extract_graph(&st).unwrap();
    let elapsed = t.elapsed();
    let mut worst: f64 = 0.0;
    let mut interior = 0;
    for e in ideal.edges().iter().filter(|e| (e.weight.abs() - 0.5).abs() < 1e-12) {
        worst = worst.max((g.weight(e.a, e.b) - e.weight).abs());
        interior += 1;
    }
    let residual = g.nullifier_residual().unwrap();
    let ok = interior == 8 && worst <= 1e-3 && residual <= 1e-8 && elapsed < Duration::from_secs(2);
    let detail = format!("{interior} interior edges, max |w - (±1/2)| = {worst:e}, residual {residual:e}, {elapsed:?}");
    (ok, detail, vec![(st, true)], elapsed)
}

#[test]
fn criterion_5_edge_weights() {
    let (ok, detail, _, _) = criterion_5();
    common::report("5", ok, &detail);
}

fn criterion_6() -> (bool, String, Produced, Duration) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut states = Vec::new();
    let (mut worst_rec, mut worst_spec, mut worst_total): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let len = rng.gen_range(0..=20);
        let s = common::random_network(&mut rng, n, len, false);
        let d = decompose(&s).unwrap();
        worst_rec = worst_rec.max(recomposition_error(&s, &d));
        let p1 = common::random_network(&mut rng, n, 12, true);
        let p2 = common::random_network(&mut rng, n, 12, true);
        let conj = p2.then(&s).unwrap().then(&p1).unwrap();
        let dc = decompose(&conj).unwrap();
        worst_spec = worst_spec.max((d.squeeze() - dc.squeeze()).amax());
        worst_total = worst_total.max((d.total_squeezing() - dc.total_squeezing()).abs());
        let redo = decompose(&recompose(&d)).unwrap();
        worst_spec = worst_spec.max((redo.squeeze() - d.squeeze()).amax());
        states.push((apply_to_vacuum(&s), true));
        states.push((apply_to_vacuum(&conj), true));
    }
    let elapsed = t.elapsed();
    let ok = worst_rec <= 1e-9 && worst_spec <= 1e-9 && worst_total <= 1e-9 && elapsed < Duration::from_secs(10);
    let detail = format!(
        "max recomposition error {worst_rec:e}, spectrum drift {worst_spec:e}, total drift {worst_total:e}, {elapsed:?}"
    );
    (ok, detail, states, elapsed)
}

fn apply_to_vacuum(s: &SymplecticTransform) -> GaussianState {
    let n = s.n_modes();
    let modes: Vec<usize> = (0..n).collect();
    apply_symplectic(&vacuum_state(n).unwrap(), s, &modes).unwrap()
}

#[test]
fn criterion_6_bloch_messiah() {
    let (ok, detail, _, _) = criterion_6();
    common::report("6", ok, &detail);
}

fn criterion_7() -> (bool, String, Produced, Duration) {
    let r = 1.0;
    let t = Instant::now();
    let comb = build_comb(200, AmplifierSpec::from_squeezing(r, 0.0).unwrap(), 1).unwrap();
    let st = amplify_comb(&vacuum_state(200).unwrap(), &comb).unwrap();
    let mut worst: f64 = 0.0;
    for &(a, b) in comb.pairs() {
        let v = witness_variance(&st, &x_diff(200, a, b)).unwrap();
        worst = worst.max((v - (-2.0 * r).exp()).abs());
    }
    let elapsed = t.elapsed();
    let ok = comb.pairs().len() == 100 && worst <= 1e-9 && elapsed < Duration::from_secs(5);
    let detail = format!("{} pairs, max |var - e^(-2r)| = {worst:e}, {elapsed:?}", comb.pairs().len());
    (ok, detail, vec![(st, true)], elapsed)
}

#[test]
fn criterion_7_two_hundred_modes() {
    let (ok, detail, _, _) = criterion_7();
    common::report("7", ok, &detail);
}

#[test]
fn criterion_8_physicality_sweep() {
    let t = Instant::now();
    let mut produced: Vec<(&str, GaussianState, bool)> = Vec::new();
    let sources: [(&str, fn() -> (bool, String, Produced, Duration)); 5] = [
        ("1", criterion_1),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
    ];
    for (id, f) in sources {
        produced.extend(f().2.into_iter().map(|(st, pure)| (id, st, pure)));
    }
    // closed-form criteria build no states; check their simulated counterparts
    let r9 = gain_to_squeezing(2.51724).unwrap();
    produced.push((
        "2",
        apply_symplectic(&vacuum_state(2).unwrap(), &two_mode_squeezer(r9, 0.0).unwrap(), &[0, 1]).unwrap(),
        true,
    ));

    let mut min_eig = f64::INFINITY;
    let mut worst_purity: f64 = 0.0;
    let mut all_physical = true;
    let mut pure = 0;
    let mut impure_sources: Vec<&str> = Vec::new();
    for (id, st, is_pure) in &produced {
        let (ok, m) = check_physicality(st);
        all_physical &= ok;
        min_eig = min_eig.min(m);
        if *is_pure {
            let dev = (purity(st).unwrap() - 1.0).abs();
            worst_purity = worst_purity.max(dev);
            if dev > 1e-8 && !impure_sources.contains(id) {
                impure_sources.push(id);
            }
            pure += 1;
        }
    }
    let ok = all_physical && worst_purity <= 1e-8;
    common::report(
        "8",
        ok,
        &format!(
            "{} states, min eig(V + iΩ) = {min_eig:e}; {pure} pure, max |purity - 1| = {worst_purity:e} \
             (above 1e-8 from criteria {:?}); {:?}",
            produced.len(),
            impure_sources,
            t.elapsed()
        ),
    );
}
