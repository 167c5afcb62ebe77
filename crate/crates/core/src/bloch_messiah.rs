//! Bloch-Messiah reduction: any symplectic transform factors as
//! `S = O₂ · D · O₁`, with `O₁`, `O₂` passive (orthogonal symplectic)
//! interferometers and `D` a bank of single-mode squeezers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{symplectic_form, SymplecticTransform, SYMPLECTIC_TOL};

/// Squeezing values below this are reported as exactly zero.
pub const SQUEEZE_CLAMP: f64 = 1e-10;
/// Tolerance on `SᵀS = I` and `SΩSᵀ = Ω` for the passive factors.
pub const PASSIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    passive_in: SymplecticTransform,
    squeeze: DVector<f64>,
    passive_out: SymplecticTransform,
}

impl Decomposition {
    /// Checks that both passives are orthogonal symplectic and that `squeeze`
    /// is non-negative and sorted descending.
    pub fn new(
        passive_in: SymplecticTransform,
        squeeze: DVector<f64>,
        passive_out: SymplecticTransform,
    ) -> Result<Self> {
        let n = squeeze.len();
        for p in [&passive_in, &passive_out] {
            if p.n_modes() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n_modes(),
                });
            }
            check_passive(p)?;
        }
        if squeeze.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(invalid("squeeze values must be finite and >= 0"));
        }
        if squeeze.as_slice().windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid("squeeze values must be sorted in descending order"));
        }
        Ok(Self {
            passive_in,
            squeeze,
            passive_out,
        })
    }

    pub fn passive_in(&self) -> &SymplecticTransform {
        &self.passive_in
    }

    pub fn passive_out(&self) -> &SymplecticTransform {
        &self.passive_out
    }

    pub fn squeeze(&self) -> &DVector<f64> {
        &self.squeeze
    }

    pub fn n_modes(&self) -> usize {
        self.squeeze.len()
    }

    /// `Σ r_k`.
    pub fn total_squeezing(&self) -> f64 {
        self.squeeze.sum()
    }

    /// The squeezer bank `diag(e^{r}, e^{−r})`.
    pub fn squeezers(&self) -> SymplecticTransform {
        squeezer_bank(&self.squeeze)
    }
}

fn check_passive(p: &SymplecticTransform) -> Result<()> {
    let symp = p.symplectic_deviation();
    if symp > PASSIVE_TOL {
        return Err(Error::NotSymplectic { deviation: symp });
    }
    let orth = p.orthogonality_deviation();
    if orth > PASSIVE_TOL {
        return Err(invalid(format!("passive factor is not orthogonal (deviation {orth:e})")));
    }
    Ok(())
}

fn squeezer_bank(r: &DVector<f64>) -> SymplecticTransform {
    let n = r.len();
    let diag = DVector::from_fn(2 * n, |i, _| if i < n { r[i].exp() } else { (-r[i - n]).exp() });
    SymplecticTransform::new_unchecked(DMatrix::from_diagonal(&diag))
}

/// Factors `s` as `passive_out · diag(e^{r}, e^{−r}) · passive_in`.
///
/// The squeeze values are half the logarithms of the eigenvalues of `S·Sᵀ`
/// above one. When values are degenerate the passive factors are fixed only
/// up to a unitary gauge; recomposition and the spectrum are unaffected.
pub fn decompose(s: &SymplecticTransform) -> Result<Decomposition> {
    let deviation = s.symplectic_deviation();
    let scale = s.matrix().norm().max(1.0);
    if !(deviation <= SYMPLECTIC_TOL * scale * scale) {
        return Err(Error::NotSymplectic { deviation });
    }
    let n = s.n_modes();
    let m = s.matrix();
    let omega = symplectic_form(n);
    let g = m * m.transpose();
    let eig = SymmetricEigen::new(g.clone());

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    // eigenvalue λ > 1 pairs with 1/λ through Ω; keep the upper half
    let threshold = (2.0 * SQUEEZE_CLAMP).exp();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut squeeze = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        let lambda = eig.eigenvalues[k];
        if lambda <= threshold {
            break;
        }
        cols.push(eig.eigenvectors.column(k).into_owned());
        squeeze.push(0.5 * lambda.ln());
    }

    // complete the unsqueezed subspace with Ω-invariant orthonormal pairs
    let mut span: Vec<DVector<f64>> = cols.iter().flat_map(|e| [e.clone(), -(&omega * e)]).collect();
    let mut candidate = 0;
    while cols.len() < n {
        if candidate >= 2 * n {
            return Err(Error::Numerical("could not complete the passive basis".into()));
        }
        let mut v = DVector::zeros(2 * n);
        v[candidate] = 1.0;
        candidate += 1;
        for _ in 0..2 {
            for b in &span {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm < 0.5 {
            continue;
        }
        v /= norm;
        span.push(v.clone());
        span.push(-(&omega * &v));
        cols.push(v);
        squeeze.push(0.0);
    }

    let squeeze = DVector::from_iterator(n, squeeze.into_iter().map(|r| if r.abs() < SQUEEZE_CLAMP { 0.0 } else { r }));

    // Q = [[X, −Y], [Y, X]] with columns e_k and −Ωe_k; re-unitarize X + iY
    let u = DMatrix::from_fn(n, n, |i, k| Complex64::new(cols[k][i], cols[k][n + i]));
    let svd = u.svd(true, true);
    let (w, vt) = (
        svd.u.ok_or_else(|| Error::Numerical("SVD failed".into()))?,
        svd.v_t.ok_or_else(|| Error::Numerical("SVD failed".into()))?,
    );
    let u = w * vt;
    let mut q = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for k in 0..n {
            let z = u[(i, k)];
            q[(i, k)] = z.re;
            q[(n + i, k)] = z.im;
            q[(i, n + k)] = -z.im;
            q[(n + i, n + k)] = z.re;
        }
    }

    let d_inv = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| {
        if i < n {
            (-squeeze[i]).exp()
        } else {
            squeeze[i - n].exp()
        }
    }));
    let passive_in = SymplecticTransform::new_unchecked(d_inv * q.transpose() * m);
    let passive_out = SymplecticTransform::new_unchecked(q);
    Decomposition::new(passive_in, squeeze, passive_out)
}

/// `passive_out · D · passive_in`.
pub fn recompose(d: &Decomposition) -> SymplecticTransform {
    d.passive_in
        .then(&d.squeezers())
        .and_then(|t| t.then(&d.passive_out))
        .expect("decomposition factors share a mode count")
}

/// Frobenius distance between `s` and the recomposed decomposition.
pub fn recomposition_error(s: &SymplecticTransform, d: &Decomposition) -> f64 {
    (s.matrix() - recompose(d).matrix()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{build_dual_rail, DualRailSpec, PhaseConvention};
    use crate::elements::{
        balanced_beamsplitter, beamsplitter, compose_network, phase_shift, single_mode_squeezer, two_mode_squeezer,
        NetworkElement,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_network(rng: &mut ChaCha8Rng, n: usize, len: usize, passive_only: bool) -> SymplecticTransform {
        let mut els = Vec::new();
        for _ in 0..len {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n.max(2))) % n;
            let kind = if passive_only { rng.gen_range(1..3) } else { rng.gen_range(0..4) };
            els.push(match (kind, n > 1) {
                (0, true) => NetworkElement::TwoModeSqueezer {
                    modes: [a, b],
                    r: rng.gen_range(0.0..1.0),
                    phase: rng.gen_range(-3.0..3.0),
                },
                (1, true) => NetworkElement::Beamsplitter {
                    modes: [a, b],
                    theta: rng.gen_range(-3.0..3.0),
                    phi: rng.gen_range(-3.0..3.0),
                },
                (3, _) => NetworkElement::SingleModeSqueezer {
                    mode: a,
                    r: rng.gen_range(-1.0..1.0),
                },
                _ => NetworkElement::PhaseShift {
                    mode: a,
                    phi: rng.gen_range(-3.0..3.0),
                },
            });
        }
        compose_network(n, &els).unwrap()
    }

    #[test]
    fn identity_has_no_squeezing() {
        let d = decompose(&SymplecticTransform::identity(3)).unwrap();
        assert_eq!(d.squeeze(), &DVector::zeros(3));
        assert!(recomposition_error(&SymplecticTransform::identity(3), &d) < 1e-14);
    }

    #[test]
    fn two_mode_squeezer_splits_into_two_squeezers() {
        let s = two_mode_squeezer(1.0, 0.0).unwrap();
        let d = decompose(&s).unwrap();
        assert!((d.squeeze() - DVector::from_vec(vec![1.0, 1.0])).norm() < 1e-12);
        assert!(recomposition_error(&s, &d) < 1e-12);
        // TMS = BS⁻¹ · (S(r) ⊗ S(−r)) · BS for the balanced splitter
        let bank = single_mode_squeezer(1.0).unwrap().embed(2, &[0]).unwrap();
        let bank = bank.then(&single_mode_squeezer(-1.0).unwrap().embed(2, &[1]).unwrap()).unwrap();
        let bs = balanced_beamsplitter();
        let oracle = bs.then(&bank).unwrap().then(&bs.inverse()).unwrap();
        assert!((oracle.matrix() - s.matrix()).norm() < 1e-12);
    }

    #[test]
    fn dual_rail_network_has_four_equal_squeezers() {
        let r = 0.8;
        let mut els = vec![
            NetworkElement::TwoModeSqueezer { modes: [0, 1], r, phase: 0.0 },
            NetworkElement::TwoModeSqueezer { modes: [2, 3], r, phase: 0.0 },
        ];
        for m in [1, 3] {
            els.push(NetworkElement::PhaseShift { mode: m, phi: -std::f64::consts::FRAC_PI_2 });
        }
        els.push(NetworkElement::Beamsplitter { modes: [1, 2], theta: std::f64::consts::FRAC_PI_4, phi: 0.0 });
        let s = compose_network(4, &els).unwrap();
        let d = decompose(&s).unwrap();
        assert!(d.squeeze().iter().all(|v| (v - r).abs() < 1e-10));
        assert!(recomposition_error(&s, &d) <= 1e-9);
        // the network reproduces the wire state
        let spec = DualRailSpec::new(2, r, PhaseConvention::OddModeMinusHalfPi).unwrap();
        let (st, _) = build_dual_rail(&spec).unwrap();
        assert!((s.matrix() * s.matrix().transpose() - st.cov()).norm() < 1e-12);
    }

    #[test]
    fn random_networks_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let len = rng.gen_range(0..=20);
            let s = random_network(&mut rng, n, len, false);
            let d = decompose(&s).unwrap();
            assert!(recomposition_error(&s, &d) <= 1e-9);
            let again = decompose(&recompose(&d)).unwrap();
            assert!((again.squeeze() - d.squeeze()).norm() <= 1e-9);
        }
    }

    #[test]
    fn passive_conjugation_keeps_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let s = random_network(&mut rng, n, 12, false);
            let p1 = random_network(&mut rng, n, 10, true);
            let p2 = random_network(&mut rng, n, 10, true);
            let conj = p2.then(&s).unwrap().then(&p1).unwrap();
            let a = decompose(&s).unwrap();
            let b = decompose(&conj).unwrap();
            assert!((a.squeeze() - b.squeeze()).norm() <= 1e-9);
            assert!((a.total_squeezing() - b.total_squeezing()).abs() <= 1e-9);
        }
    }

    #[test]
    fn passive_network_has_zero_squeezing() {
        let s = beamsplitter(0.3, 0.2).unwrap().then(&phase_shift(0.4).unwrap().embed(2, &[1]).unwrap()).unwrap();
        let d = decompose(&s).unwrap();
        assert_eq!(d.squeeze(), &DVector::zeros(2));
        assert!(d.passive_out().orthogonality_deviation() < 1e-12);
        assert!(recomposition_error(&s, &d) < 1e-12);
    }

    #[test]
    fn zero_squeeze_recomposition_is_passive() {
        let p = beamsplitter(0.3, 0.2).unwrap();
        let d = Decomposition::new(p.clone(), DVector::zeros(2), p.inverse()).unwrap();
        let s = recompose(&d);
        assert!(s.orthogonality_deviation() < 1e-12);
        assert!(s.symplectic_deviation() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 0)] = 2.0;
        assert!(decompose(&SymplecticTransform::new_unchecked(m)).is_err());
        let id = SymplecticTransform::identity(2);
        assert!(Decomposition::new(id.clone(), DVector::from_vec(vec![0.1, 0.2]), id.clone()).is_err());
        assert!(Decomposition::new(id.clone(), DVector::from_vec(vec![0.1, -0.2]), id.clone()).is_err());
        let sq = single_mode_squeezer(0.5).unwrap().embed(2, &[0]).unwrap();
        assert!(Decomposition::new(sq, DVector::zeros(2), id).is_err());
    }
}
