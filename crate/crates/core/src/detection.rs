//! Balanced homodyne noise on the EPR difference quadrature: closed forms
//! for aligned and misaligned local oscillators, and the simulated
//! measurement they must agree with.

use crate::comb::OverlapSpec;
use crate::elements::loss_channel;
use crate::error::{invalid, Result};
use crate::gaussian::{witness_variance, GaussianState, Witness};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NoiseComponent {
    pub label: String,
    pub value: f64,
}

/// Shot-noise-normalized variance with its dB value and the terms it is
/// built from. The components always sum to `variance`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NoiseReport {
    pub variance: f64,
    pub db: f64,
    pub components: Vec<NoiseComponent>,
}

impl NoiseReport {
    fn from_components(components: Vec<NoiseComponent>) -> Result<Self> {
        let variance: f64 = components.iter().map(|c| c.value).sum();
        Ok(Self {
            variance,
            db: squeezing_db(variance)?,
            components,
        })
    }

    pub fn component(&self, label: &str) -> Option<f64> {
        self.components.iter().find(|c| c.label == label).map(|c| c.value)
    }
}

fn component(label: impl Into<String>, value: f64) -> NoiseComponent {
    NoiseComponent {
        label: label.into(),
        value,
    }
}

fn check_gain(gain: f64) -> Result<()> {
    if !gain.is_finite() || gain < 1.0 {
        return Err(invalid(format!("gain must be finite and >= 1, got {gain}")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("efficiency must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

/// Correlation term `2η(G − 1 − √(G(G−1)))`, never positive.
fn correlation(gain: f64, eta: f64) -> f64 {
    2.0 * eta * (gain - 1.0 - (gain * (gain - 1.0)).sqrt())
}

fn ideal_value(gain: f64, eta: f64) -> f64 {
    1.0 + correlation(gain, eta)
}

/// Difference-quadrature noise of an EPR pair from an amplifier of gain `G`
/// detected at efficiency `η`: `1 + 2η(G − 1 − √(G(G−1)))`.
pub fn ideal_epr_noise(gain: f64, eta: f64) -> Result<NoiseReport> {
    check_gain(gain)?;
    check_eta(eta)?;
    NoiseReport::from_components(vec![component("shot_noise", 1.0), component("correlation", correlation(gain, eta))])
}

/// Noise when the LO power is split between the target vacuum mode and
/// stray modes:
///
/// `(P₀/P)·N(η_d) + Σᵢ (Pᵢ/P)·N(ηᵢ) + Σᵢ ((P − P₀ − Pᵢ)/P)·(1 + 2ηᵢ(G − 1))`
///
/// where `N(η)` is [`ideal_epr_noise`]. The last sum runs per stray mode
/// with `P − P₀ − Pᵢ` inside, so it vanishes for a single stray mode.
pub fn misaligned_noise(spec: &OverlapSpec, gain: f64) -> Result<NoiseReport> {
    check_gain(gain)?;
    let p = spec.p_tot();
    let mut parts = vec![component("aligned", spec.p0() / p * ideal_value(gain, spec.eta_d()))];
    for (i, (&pi, &eta)) in spec.p_strays().iter().zip(spec.eta_strays()).enumerate() {
        parts.push(component(format!("overlap[{i}]"), pi / p * ideal_value(gain, eta)));
    }
    for (i, (&pi, &eta)) in spec.p_strays().iter().zip(spec.eta_strays()).enumerate() {
        let weight = ((p - spec.p0() - pi) / p).max(0.0);
        parts.push(component(format!("excess[{i}]"), weight * (1.0 + 2.0 * eta * (gain - 1.0))));
    }
    NoiseReport::from_components(parts)
}

/// Applies loss `eta_d` to every mode the witness touches, then reads its
/// normalized variance.
pub fn measure_witness(state: &GaussianState, w: &Witness, eta_d: f64) -> Result<NoiseReport> {
    check_eta(eta_d)?;
    if w.n_modes() != state.n_modes() {
        return Err(crate::Error::DimensionMismatch {
            expected: state.n_modes(),
            found: w.n_modes(),
        });
    }
    let mut lossy = state.clone();
    if eta_d < 1.0 {
        for m in w.support() {
            lossy = loss_channel(&lossy, m, eta_d)?;
        }
    }
    let v = witness_variance(&lossy, w)?;
    NoiseReport::from_components(vec![component("shot_noise", 1.0), component("correlation", v - 1.0)])
}

/// `10·log10(variance)`; negative values are squeezing.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(invalid(format!("variance must be positive, got {variance}")));
    }
    Ok(10.0 * variance.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::OverlapSpec;
    use crate::elements::{gain_to_squeezing, two_mode_squeezer};
    use crate::gaussian::{apply_symplectic, vacuum_state, Quadrature};

    fn x_diff() -> Witness {
        Witness::from_terms(2, &[(0, Quadrature::X, 1.0), (1, Quadrature::X, -1.0)]).unwrap()
    }

    fn tms_pair(gain: f64) -> GaussianState {
        let r = gain_to_squeezing(gain).unwrap();
        apply_symplectic(&vacuum_state(2).unwrap(), &two_mode_squeezer(r, 0.0).unwrap(), &[0, 1]).unwrap()
    }

    #[test]
    fn ideal_noise_values() {
        for eta in [0.0, 0.5, 1.0] {
            assert_eq!(ideal_epr_noise(1.0, eta).unwrap().variance, 1.0);
        }
        let r = ideal_epr_noise(2.0, 1.0).unwrap();
        assert!((r.variance - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((r.db - (-7.655_513_706_9)).abs() < 1e-6);
        assert!((ideal_epr_noise(2.0, 0.95).unwrap().variance - 0.212_994_231_491_119_1).abs() < 1e-12);
        assert!(ideal_epr_noise(0.9, 1.0).is_err());
        assert!(ideal_epr_noise(2.0, 1.1).is_err());
    }

    #[test]
    fn simulation_matches_closed_form() {
        for g in [1.0, 1.2, 1.5, 2.0, 3.0, 4.0] {
            let st = tms_pair(g);
            for eta in [1.0, 0.99, 0.95, 0.8] {
                let sim = measure_witness(&st, &x_diff(), eta).unwrap().variance;
                let cf = ideal_epr_noise(g, eta).unwrap().variance;
                assert!((sim - cf).abs() <= 1e-10, "G={g} eta={eta}");
            }
        }
    }

    #[test]
    fn vacuum_measures_shot_noise() {
        let vac = vacuum_state(2).unwrap();
        assert!((measure_witness(&vac, &x_diff(), 0.9).unwrap().variance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn aligned_lo_reduces_to_ideal() {
        let spec = OverlapSpec::new(1.0, 1.0, vec![], 0.95, vec![]).unwrap();
        let a = misaligned_noise(&spec, 2.0).unwrap().variance;
        assert!((a - ideal_epr_noise(2.0, 0.95).unwrap().variance).abs() <= 1e-14);
    }

    #[test]
    fn worked_misalignment_examples() {
        let one = OverlapSpec::new(1.0, 0.9, vec![0.1], 0.95, vec![0.5]).unwrap();
        let r = misaligned_noise(&one, 2.0).unwrap();
        assert!((r.variance - 0.250_273).abs() < 1e-6);
        assert_eq!(r.component("excess[0]"), Some(0.0));

        let two = OverlapSpec::new(1.0, 0.9, vec![0.05, 0.05], 0.95, vec![0.5, 0.5]).unwrap();
        let r = misaligned_noise(&two, 2.0).unwrap();
        assert!((r.variance - 0.450_273).abs() < 1e-6);
        let excess = r.component("excess[0]").unwrap() + r.component("excess[1]").unwrap();
        assert!((excess - 0.2).abs() < 1e-12);
    }

    #[test]
    fn misalignment_only_hurts() {
        let ideal = ideal_epr_noise(2.0, 0.95).unwrap().variance;
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let f = k as f64 / 10.0;
            let spec = OverlapSpec::new(2.0, 2.0 * f, vec![2.0 * (1.0 - f)], 0.95, vec![0.4]).unwrap();
            let v = misaligned_noise(&spec, 2.0).unwrap().variance;
            assert!(v <= last + 1e-15);
            assert!(v >= ideal - 1e-15);
            last = v;
        }
    }

    #[test]
    fn components_sum_to_total() {
        let spec = OverlapSpec::new(3.0, 1.0, vec![0.5, 1.0, 0.5], 0.9, vec![0.1, 0.3, 0.6]).unwrap();
        let r = misaligned_noise(&spec, 3.0).unwrap();
        let sum: f64 = r.components.iter().map(|c| c.value).sum();
        assert!((sum - r.variance).abs() <= 1e-12);
        assert!((r.db - 10.0 * r.variance.log10()).abs() <= 1e-12);
    }

    #[test]
    fn decibels() {
        assert_eq!(squeezing_db(1.0).unwrap(), 0.0);
        assert!((squeezing_db(0.125_893).unwrap() + 9.0).abs() < 1e-4);
        assert!((squeezing_db(0.171_573).unwrap() + 7.656).abs() < 1e-3);
        assert!(squeezing_db(0.0).is_err());
        assert!(squeezing_db(-1.0).is_err());
    }
}
