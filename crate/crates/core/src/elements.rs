//! Elementary Gaussian operations: two-mode squeezers (the four-wave-mixing
//! amplifier), beam splitters, phase shifts, and loss.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::gaussian::{GaussianState, SymplecticTransform};

/// Default detector efficiency for off-the-shelf photodiodes.
pub const DEFAULT_DETECTOR_EFFICIENCY: f64 = 0.95;

/// Phase-insensitive amplifier parameters, with intensity gain `G = cosh²r`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AmplifierSpec {
    gain: f64,
    r: f64,
    pump_phase: f64,
}

impl AmplifierSpec {
    pub fn from_squeezing(r: f64, pump_phase: f64) -> Result<Self> {
        let gain = squeezing_to_gain(r)?;
        check_phase(pump_phase)?;
        Ok(Self { gain, r, pump_phase })
    }

    pub fn from_gain(gain: f64, pump_phase: f64) -> Result<Self> {
        let r = gain_to_squeezing(gain)?;
        check_phase(pump_phase)?;
        Ok(Self { gain, r, pump_phase })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn pump_phase(&self) -> f64 {
        self.pump_phase
    }

    /// Two identical-phase amplifiers in series: squeezing parameters add.
    pub fn cascade(&self, next: &AmplifierSpec) -> Result<AmplifierSpec> {
        if (self.pump_phase - next.pump_phase).abs() > 1e-12 {
            return Err(invalid("cascaded amplifiers must share a pump phase"));
        }
        Self::from_squeezing(self.r + next.r, self.pump_phase)
    }

    pub fn transform(&self) -> SymplecticTransform {
        // parameters were validated on construction
        two_mode_squeezer(self.r, self.pump_phase).expect("validated amplifier")
    }
}

fn check_phase(phase: f64) -> Result<()> {
    if !phase.is_finite() {
        return Err(invalid("phase must be finite"));
    }
    Ok(())
}

/// Two-mode squeezer `a → cosh r·a + e^{iφ} sinh r·b†` (and `a ↔ b`).
///
/// For `phase = 0` the x-difference and p-sum of the pair both shrink by
/// `e^{-r}`, so their variances fall as `e^{-2r}`.
pub fn two_mode_squeezer(r: f64, phase: f64) -> Result<SymplecticTransform> {
    if !r.is_finite() || r < 0.0 {
        return Err(invalid(format!("squeezing parameter must be finite and >= 0, got {r}")));
    }
    check_phase(phase)?;
    let (c, s) = (r.cosh(), r.sinh());
    let (cp, sp) = (phase.cos(), phase.sin());
    // rows/cols: x_a, x_b, p_a, p_b
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c,      s * cp, 0.0,    s * sp,
        s * cp, c,      s * sp, 0.0,
        0.0,    s * sp, c,      -s * cp,
        s * sp, 0.0,    -s * cp, c,
    ]);
    Ok(SymplecticTransform::new_unchecked(m))
}

/// Beam splitter `a → cos θ·a + e^{iφ} sin θ·b`, `b → −e^{−iφ} sin θ·a + cos θ·b`.
///
/// `theta = π/4, phi = 0` is the balanced splitter
/// `(x_a, x_b) → ((x_a + x_b)/√2, (−x_a + x_b)/√2)`, identically for p.
pub fn beamsplitter(theta: f64, phi: f64) -> Result<SymplecticTransform> {
    if !theta.is_finite() {
        return Err(invalid("beam splitter angle must be finite"));
    }
    check_phase(phi)?;
    let (c, s) = (theta.cos(), theta.sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c,       s * cp, 0.0,     -s * sp,
        -s * cp, c,      -s * sp, 0.0,
        0.0,     s * sp, c,       s * cp,
        s * sp,  0.0,    -s * cp, c,
    ]);
    Ok(SymplecticTransform::new_unchecked(m))
}

/// Balanced (50:50) beam splitter with the real convention.
pub fn balanced_beamsplitter() -> SymplecticTransform {
    beamsplitter(std::f64::consts::FRAC_PI_4, 0.0).expect("finite angle")
}

/// Single-mode rotation `x' = x cos φ + p sin φ`, `p' = −x sin φ + p cos φ`.
pub fn phase_shift(phi: f64) -> Result<SymplecticTransform> {
    check_phase(phi)?;
    let (c, s) = (phi.cos(), phi.sin());
    Ok(SymplecticTransform::new_unchecked(DMatrix::from_row_slice(
        2,
        2,
        &[c, s, -s, c],
    )))
}

/// Single-mode squeezer: x scaled by `e^{r}`, p by `e^{-r}`.
pub fn single_mode_squeezer(r: f64) -> Result<SymplecticTransform> {
    if !r.is_finite() {
        return Err(invalid("squeezing parameter must be finite"));
    }
    Ok(SymplecticTransform::new_unchecked(DMatrix::from_row_slice(
        2,
        2,
        &[r.exp(), 0.0, 0.0, (-r).exp()],
    )))
}

/// Mixes `mode` with vacuum at transmissivity `eta`.
pub fn loss_channel(state: &GaussianState, mode: usize, eta: f64) -> Result<GaussianState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("efficiency must lie in [0, 1], got {eta}")));
    }
    state.check_mode(mode)?;
    let n = state.n_modes();
    let idx = [mode, n + mode];
    let t = eta.sqrt();
    let (mut mean, mut cov) = state.clone().into_parts();
    for &i in &idx {
        mean[i] *= t;
    }
    for &i in &idx {
        for j in 0..2 * n {
            if !idx.contains(&j) {
                cov[(i, j)] *= t;
                cov[(j, i)] *= t;
            }
        }
    }
    for &i in &idx {
        for &j in &idx {
            cov[(i, j)] *= eta;
        }
        cov[(i, i)] += 1.0 - eta;
    }
    Ok(GaussianState::from_parts_unchecked(mean, cov))
}

/// One element of a linear-optical network, as read from a network file.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkElement {
    TwoModeSqueezer {
        modes: [usize; 2],
        r: f64,
        #[serde(default)]
        phase: f64,
    },
    Beamsplitter {
        modes: [usize; 2],
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
    PhaseShift {
        mode: usize,
        phi: f64,
    },
    SingleModeSqueezer {
        mode: usize,
        r: f64,
    },
}

impl NetworkElement {
    pub fn modes(&self) -> Vec<usize> {
        match self {
            NetworkElement::TwoModeSqueezer { modes, .. } | NetworkElement::Beamsplitter { modes, .. } => {
                modes.to_vec()
            }
            NetworkElement::PhaseShift { mode, .. } | NetworkElement::SingleModeSqueezer { mode, .. } => {
                vec![*mode]
            }
        }
    }

    /// The element's transform on its own modes.
    pub fn transform(&self) -> Result<SymplecticTransform> {
        match *self {
            NetworkElement::TwoModeSqueezer { r, phase, .. } => two_mode_squeezer(r, phase),
            NetworkElement::Beamsplitter { theta, phi, .. } => beamsplitter(theta, phi),
            NetworkElement::PhaseShift { phi, .. } => phase_shift(phi),
            NetworkElement::SingleModeSqueezer { r, .. } => single_mode_squeezer(r),
        }
    }
}

/// Composes `elements` (applied in order) into one `n_modes`-mode transform.
/// An empty list gives the identity.
pub fn compose_network(n_modes: usize, elements: &[NetworkElement]) -> Result<SymplecticTransform> {
    if n_modes == 0 {
        return Err(invalid("a network needs at least one mode"));
    }
    let mut total = SymplecticTransform::identity(n_modes);
    for el in elements {
        let full = el.transform()?.embed(n_modes, &el.modes())?;
        total = total.then(&full)?;
    }
    Ok(total)
}

/// Inverts `G = cosh²r`.
pub fn gain_to_squeezing(gain: f64) -> Result<f64> {
    if !gain.is_finite() || gain < 1.0 {
        return Err(invalid(format!("amplifier gain must be finite and >= 1, got {gain}")));
    }
    Ok(gain.sqrt().acosh())
}

/// `G = cosh²r`.
pub fn squeezing_to_gain(r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(invalid(format!("squeezing parameter must be finite and >= 0, got {r}")));
    }
    Ok(r.cosh().powi(2))
}
