//! The spatial mode comb: discrete transverse modes on the amplifier's
//! constant-gain circle, their probe/conjugate pairing, local-oscillator
//! synthesis, and LO overlap bookkeeping.
//!
//! Within one gain region (cell) the ring holds `M` modes. Ring positions
//! `0 .. M/2` belong to the probe band and `M/2 .. M` to the conjugate band;
//! the probe at position `m` is paired with the diametrically opposite
//! conjugate at `(m + M/2) mod M`. Mode `ring_index` of cell `c` sits at
//! state index `c·M + ring_index`.

use num_complex::Complex64;

use crate::elements::{balanced_beamsplitter, AmplifierSpec};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{apply_symplectic, GaussianState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Probe,
    Conjugate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ModeLabel {
    pub ring_index: usize,
    pub band: Band,
    pub cell_id: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialComb {
    ring_size: usize,
    cells: usize,
    modes: Vec<ModeLabel>,
    /// (probe index, conjugate index) per pair, ordered by cell then ring.
    pairs: Vec<(usize, usize)>,
    amps: Vec<AmplifierSpec>,
}

/// Builds `cells` copies of an `m`-mode constant-gain ring, every pair
/// sharing `amp`.
pub fn build_comb(m: usize, amp: AmplifierSpec, cells: usize) -> Result<SpatialComb> {
    if m < 2 || m % 2 != 0 {
        return Err(invalid(format!("ring size must be even and >= 2, got {m}")));
    }
    if cells == 0 {
        return Err(invalid("comb needs at least one cell"));
    }
    let half = m / 2;
    let mut modes = Vec::with_capacity(m * cells);
    let mut pairs = Vec::with_capacity(half * cells);
    for cell_id in 0..cells {
        for ring_index in 0..m {
            let band = if ring_index < half { Band::Probe } else { Band::Conjugate };
            modes.push(ModeLabel {
                ring_index,
                band,
                cell_id,
            });
        }
        for p in 0..half {
            pairs.push((cell_id * m + p, cell_id * m + (p + half) % m));
        }
    }
    let amps = vec![amp; pairs.len()];
    Ok(SpatialComb {
        ring_size: m,
        cells,
        modes,
        pairs,
        amps,
    })
}

impl SpatialComb {
    pub fn ring_size(&self) -> usize {
        self.ring_size
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_amplifier(&self, pair: usize) -> Option<&AmplifierSpec> {
        self.amps.get(pair)
    }

    /// Returns a copy with one pair's amplifier replaced; the constant-gain
    /// construction is the default, but unequal pumping can be modelled here.
    pub fn with_pair_amplifier(&self, pair: usize, amp: AmplifierSpec) -> Result<SpatialComb> {
        if pair >= self.pairs.len() {
            return Err(invalid(format!("pair {pair} out of range ({} pairs)", self.pairs.len())));
        }
        let mut out = self.clone();
        out.amps[pair] = amp;
        Ok(out)
    }

    pub fn mode_index(&self, label: ModeLabel) -> Option<usize> {
        if label.ring_index >= self.ring_size || label.cell_id >= self.cells {
            return None;
        }
        let i = label.cell_id * self.ring_size + label.ring_index;
        (self.modes[i] == label).then_some(i)
    }

    /// The mode paired with `mode`.
    pub fn partner(&self, mode: usize) -> Option<usize> {
        let label = self.modes.get(mode)?;
        let base = label.cell_id * self.ring_size;
        Some(base + (label.ring_index + self.ring_size / 2) % self.ring_size)
    }

    pub fn band_modes(&self, band: Band) -> Vec<usize> {
        (0..self.modes.len()).filter(|&i| self.modes[i].band == band).collect()
    }

    /// Indices of `cell`'s modes in ring order.
    pub fn cell_modes(&self, cell: usize) -> Result<Vec<usize>> {
        if cell >= self.cells {
            return Err(invalid(format!("cell {cell} out of range ({} cells)", self.cells)));
        }
        Ok((cell * self.ring_size..(cell + 1) * self.ring_size).collect())
    }
}

/// Applies each pair's two-mode squeezer. Pairs are disjoint, so the order
/// of application does not matter.
pub fn amplify_comb(state: &GaussianState, comb: &SpatialComb) -> Result<GaussianState> {
    if state.n_modes() != comb.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: comb.n_modes(),
            found: state.n_modes(),
        });
    }
    let mut out = state.clone();
    for (&(probe, conj), amp) in comb.pairs.iter().zip(&comb.amps) {
        if amp.r() == 0.0 {
            continue;
        }
        out = apply_symplectic(&out, &amp.transform(), &[probe, conj])?;
    }
    Ok(out)
}

/// Interferes like ring positions of two cells on balanced beam splitters,
/// the image-wide interference that concatenates two combs.
pub fn interfere_cells(
    state: &GaussianState,
    comb: &SpatialComb,
    cell_a: usize,
    cell_b: usize,
) -> Result<GaussianState> {
    if cell_a == cell_b {
        return Err(invalid("cannot interfere a cell with itself"));
    }
    if state.n_modes() != comb.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: comb.n_modes(),
            found: state.n_modes(),
        });
    }
    let a = comb.cell_modes(cell_a)?;
    let b = comb.cell_modes(cell_b)?;
    let bs = balanced_beamsplitter();
    let mut out = state.clone();
    for (&ma, &mb) in a.iter().zip(&b) {
        out = apply_symplectic(&out, &bs, &[ma, mb])?;
    }
    Ok(out)
}

/// A local oscillator's mode shape over the comb, `â_LO = Σ α_i â_i`, with
/// unit-normalized coefficients and separately carried power.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOscillator {
    coeffs: Vec<Complex64>,
    power: f64,
    comb_shape: (usize, usize),
}

impl LocalOscillator {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn with_power(mut self, power: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(invalid("LO power must be positive and finite"));
        }
        self.power = power;
        Ok(self)
    }

    /// Modes carrying nonzero LO amplitude.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| self.coeffs[i].norm_sqr() > 0.0).collect()
    }

    /// Fraction of the LO power in `mode`.
    pub fn mode_overlap(&self, mode: usize) -> f64 {
        self.coeffs.get(mode).map_or(0.0, |c| c.norm_sqr())
    }
}

/// Normalizes `coeffs` into an LO shape over `comb` with unit power.
pub fn synthesize_lo(comb: &SpatialComb, coeffs: &[Complex64]) -> Result<LocalOscillator> {
    if coeffs.len() != comb.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: comb.n_modes(),
            found: coeffs.len(),
        });
    }
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(invalid("LO coefficients must be finite and not all zero"));
    }
    Ok(LocalOscillator {
        coeffs: coeffs.iter().map(|c| c / norm).collect(),
        power: 1.0,
        comb_shape: (comb.ring_size, comb.cells),
    })
}

/// Equal-weight LO over every mode of `band`.
pub fn band_lo(comb: &SpatialComb, band: Band) -> Result<LocalOscillator> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); comb.n_modes()];
    for i in comb.band_modes(band) {
        coeffs[i] = Complex64::new(1.0, 0.0);
    }
    synthesize_lo(comb, &coeffs)
}

/// Hermitian inner product `Σ conj(a_i)·b_i` of two LO shapes.
pub fn lo_overlap(a: &LocalOscillator, b: &LocalOscillator) -> Result<Complex64> {
    if a.comb_shape != b.comb_shape || a.coeffs.len() != b.coeffs.len() {
        return Err(invalid("local oscillators belong to different combs"));
    }
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.conj() * y).sum())
}

/// LO power split between the target vacuum mode and partially overlapped
/// stray modes, with the efficiencies at which each is detected.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OverlapSpec {
    p_tot: f64,
    p0: f64,
    p_strays: Vec<f64>,
    eta_d: f64,
    eta_strays: Vec<f64>,
}

impl OverlapSpec {
    /// Validates the power budget `Σ P_i = P_tot − P_0` (to 1e-12 relative
    /// to `P_tot`) and the efficiency ordering `0 ≤ η_i < η_d ≤ 1`.
    pub fn new(p_tot: f64, p0: f64, p_strays: Vec<f64>, eta_d: f64, eta_strays: Vec<f64>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(p_tot > 0.0) || !p_tot.is_finite() {
            return bad(format!("total LO power must be positive, got {p_tot}"));
        }
        if !(0.0..=p_tot).contains(&p0) {
            return bad(format!("P_0 = {p0} must lie in [0, P_tot = {p_tot}]"));
        }
        if p_strays.len() != eta_strays.len() {
            return bad(format!(
                "{} stray powers but {} stray efficiencies",
                p_strays.len(),
                eta_strays.len()
            ));
        }
        if !(eta_d > 0.0 && eta_d <= 1.0) {
            return bad(format!("detector efficiency must lie in (0, 1], got {eta_d}"));
        }
        if let Some(p) = p_strays.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return bad(format!("stray power {p} must be non-negative"));
        }
        if let Some(e) = eta_strays.iter().find(|e| !(**e >= 0.0 && **e < eta_d)) {
            return bad(format!("stray efficiency {e} must lie in [0, eta_d = {eta_d})"));
        }
        let residual = p_strays.iter().sum::<f64>() - (p_tot - p0);
        if residual.abs() > 1e-12 * p_tot.max(1.0) {
            return bad(format!("stray powers miss the budget P_tot - P_0 by {residual:e}"));
        }
        Ok(Self {
            p_tot,
            p0,
            p_strays,
            eta_d,
            eta_strays,
        })
    }

    pub fn p_tot(&self) -> f64 {
        self.p_tot
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p_strays(&self) -> &[f64] {
        &self.p_strays
    }

    pub fn eta_d(&self) -> f64 {
        self.eta_d
    }

    pub fn eta_strays(&self) -> &[f64] {
        &self.eta_strays
    }

    /// `Σ P_i − (P_tot − P_0)`.
    pub fn budget_residual(&self) -> f64 {
        self.p_strays.iter().sum::<f64>() - (self.p_tot - self.p0)
    }
}

/// Splits `lo`'s power into the aligned share `(1 − misalignment)·P_tot`
/// and an equal share for each declared stray mode.
pub fn overlap_spec_from_alignment(
    lo: &LocalOscillator,
    target_mode: usize,
    misalignment: f64,
    stray_etas: &[f64],
    eta_d: f64,
) -> Result<OverlapSpec> {
    if target_mode >= lo.coeffs.len() {
        return Err(Error::ModeOutOfRange {
            mode: target_mode,
            n_modes: lo.coeffs.len(),
        });
    }
    if !(0.0..=1.0).contains(&misalignment) {
        return Err(Error::InvalidSpec(format!(
            "misalignment must lie in [0, 1], got {misalignment}"
        )));
    }
    if misalignment > 0.0 && stray_etas.is_empty() {
        return Err(Error::InvalidSpec(
            "misaligned LO power needs at least one stray mode".into(),
        ));
    }
    let p_tot = lo.power;
    let p0 = (1.0 - misalignment) * p_tot;
    let remaining = p_tot - p0;
    let n = stray_etas.len();
    let mut p_strays = vec![remaining / n.max(1) as f64; n];
    if n > 0 {
        // absorb rounding in the last share so the budget closes
        let head: f64 = p_strays[..n - 1].iter().sum();
        p_strays[n - 1] = remaining - head;
    }
    OverlapSpec::new(p_tot, p0, p_strays, eta_d, stray_etas.to_vec())
}
