//! Graph states built from the comb: the bipartite EPR graph, the dual-rail
//! wire, its entanglement witnesses, graph extraction from a covariance
//! matrix, and homodyne conditioning.
//!
//! Graphs use the complex adjacency convention `Z = U + iW`: a pure Gaussian
//! state is the graph state `Z` when every nullifier `p_j − Σ_k Z_jk x_k`
//! annihilates it. Vacuum is `Z = i·I`; an ideal cluster has `W → 0` and the
//! real part `U` carries the edge weights.
//!
//! # Wire layout
//!
//! A wire of `n` EPR sources uses `2n` modes. Source `k` squeezes modes
//! `A_k = 2k` and `B_k = 2k + 1`. With [`PhaseConvention::OddModeMinusHalfPi`]
//! every odd mode is then rotated by `−π/2`. Finally mode `2k + 1` (half of
//! source `k`) is interfered with mode `2k + 2` (half of source `k + 1`) on
//! a balanced splitter, for `k = 0 .. n − 1`. Modes `0` and `2n − 1` are the
//! wire ends.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::comb::SpatialComb;
use crate::elements::{balanced_beamsplitter, phase_shift, two_mode_squeezer};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{apply_symplectic, purity, vacuum_state, GaussianState, Quadrature, Witness};

/// Entries of `Re Z` smaller than this are not reported as edges.
pub const EDGE_TOL: f64 = 1e-9;
/// States below this purity are rejected by [`extract_graph`].
pub const GRAPH_PURITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    n_nodes: usize,
    adjacency: DMatrix<Complex64>,
    edges: Vec<Edge>,
    residual: Option<f64>,
}

/// Edge-list form of a graph, as written to report files.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GraphReport {
    pub n_nodes: usize,
    pub edges: Vec<Edge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nullifier_residual: Option<f64>,
}

impl GraphSpec {
    /// Wraps a symmetric complex adjacency matrix.
    pub fn from_adjacency(adjacency: DMatrix<Complex64>) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n || n == 0 {
            return Err(invalid("adjacency must be square and non-empty"));
        }
        let asym = (&adjacency - adjacency.transpose()).norm();
        let scale = adjacency.norm().max(1.0);
        if asym > 1e-9 * scale {
            return Err(invalid(format!("adjacency is not symmetric (deviation {asym:e})")));
        }
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                let w = adjacency[(a, b)].re;
                if w.abs() > EDGE_TOL {
                    edges.push(Edge { a, b, weight: w });
                }
            }
        }
        Ok(Self {
            n_nodes: n,
            adjacency,
            edges,
            residual: None,
        })
    }

    fn from_real(u: &DMatrix<f64>) -> Result<Self> {
        Self::from_adjacency(u.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn adjacency(&self) -> &DMatrix<Complex64> {
        &self.adjacency
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Real edge weight between two nodes.
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.adjacency[(a, b)].re
    }

    /// Frobenius norm of the nullifier residual, for extracted graphs.
    pub fn nullifier_residual(&self) -> Option<f64> {
        self.residual
    }

    /// True when every diagonal entry has a positive imaginary part, as
    /// required of the adjacency of a normalizable graph state.
    pub fn is_valid_graph_state(&self) -> bool {
        (0..self.n_nodes).all(|i| self.adjacency[(i, i)].im > 0.0)
    }

    /// Largest `|Re Z_ab − Re other_ab|`.
    pub fn max_weight_difference(&self, other: &GraphSpec) -> Result<f64> {
        if self.n_nodes != other.n_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.n_nodes,
                found: other.n_nodes,
            });
        }
        Ok(self
            .adjacency
            .iter()
            .zip(other.adjacency.iter())
            .map(|(a, b)| (a.re - b.re).abs())
            .fold(0.0, f64::max))
    }

    pub fn report(&self) -> GraphReport {
        GraphReport {
            n_nodes: self.n_nodes,
            edges: self.edges.clone(),
            nullifier_residual: self.residual,
        }
    }
}

/// The amplifier's interaction graph: one unit-weight edge per
/// probe/conjugate pair, in comb mode order.
pub fn bipartite_graph(comb: &SpatialComb) -> GraphSpec {
    let n = comb.n_modes();
    let mut u = DMatrix::zeros(n, n);
    for &(a, b) in comb.pairs() {
        u[(a, b)] = 1.0;
        u[(b, a)] = 1.0;
    }
    GraphSpec::from_real(&u).expect("symmetric by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// Rotate every odd mode by −π/2 ahead of the splitters, putting the
    /// wire in canonical graph form.
    #[default]
    OddModeMinusHalfPi,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DualRailSpec {
    pub n_pairs: usize,
    pub r: f64,
    #[serde(default)]
    pub phase_convention: PhaseConvention,
}

impl DualRailSpec {
    pub fn new(n_pairs: usize, r: f64, phase_convention: PhaseConvention) -> Result<Self> {
        let spec = Self {
            n_pairs,
            r,
            phase_convention,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs < 2 {
            return Err(invalid(format!(
                "a wire needs at least two EPR sources, got {}",
                self.n_pairs
            )));
        }
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(invalid(format!("squeezing must be finite and >= 0, got {}", self.r)));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_pairs
    }
}

/// Builds the dual-rail wire and the ideal graph it approaches as `r → ∞`
/// (interior weights ±1/2, end weights ±1/√2).
pub fn build_dual_rail(spec: &DualRailSpec) -> Result<(GaussianState, GraphSpec)> {
    spec.validate()?;
    let n = spec.n_modes();
    let mut state = vacuum_state(n)?;
    let tms = two_mode_squeezer(spec.r, 0.0)?;
    for k in 0..spec.n_pairs {
        state = apply_symplectic(&state, &tms, &[2 * k, 2 * k + 1])?;
    }
    if spec.phase_convention == PhaseConvention::OddModeMinusHalfPi {
        let rot = phase_shift(-FRAC_PI_2)?;
        for m in (1..n).step_by(2) {
            state = apply_symplectic(&state, &rot, &[m])?;
        }
    }
    let bs = balanced_beamsplitter();
    for k in 0..spec.n_pairs - 1 {
        state = apply_symplectic(&state, &bs, &[2 * k + 1, 2 * k + 2])?;
    }
    Ok((state, wire_graph(spec.n_pairs)?))
}

/// Ideal (infinitely squeezed) dual-rail wire graph on `2·n_pairs` nodes.
pub fn wire_graph(n_pairs: usize) -> Result<GraphSpec> {
    if n_pairs < 2 {
        return Err(invalid("a wire needs at least two EPR sources"));
    }
    let n = 2 * n_pairs;
    let mut u = DMatrix::zeros(n, n);
    let mut link = |a: usize, b: usize, w: f64| {
        u[(a, b)] = w;
        u[(b, a)] = w;
    };
    // left end to the first splitter's outputs
    link(0, 1, FRAC_1_SQRT_2);
    link(0, 2, -FRAC_1_SQRT_2);
    // splitter k outputs (2k+1, 2k+2) to splitter k+1 outputs
    for k in 0..n_pairs.saturating_sub(2) {
        for a in [2 * k + 1, 2 * k + 2] {
            link(a, 2 * k + 3, 0.5);
            link(a, 2 * k + 4, -0.5);
        }
    }
    // last splitter's outputs to the right end
    link(n - 3, n - 1, FRAC_1_SQRT_2);
    link(n - 2, n - 1, FRAC_1_SQRT_2);
    GraphSpec::from_real(&u)
}

/// Sign pattern of the four-mode witnesses. The X witness reads
/// `s0·X₁ + s1·X₂ + s2·X₃ + s3·X₄` over the two splitter-output pairs
/// flanking an interior source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSigns {
    /// `(X₁ + X₂) − (X₃ − X₄)`: signs `(+, +, −, +)`.
    #[default]
    Grouped,
    /// `(X₁ + X₂) − X₃ − X₄`: signs `(+, +, −, −)`.
    Distributed,
}

impl WitnessSigns {
    pub fn pattern(self) -> [f64; 4] {
        match self {
            WitnessSigns::Grouped => [1.0, 1.0, -1.0, 1.0],
            WitnessSigns::Distributed => [1.0, 1.0, -1.0, -1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    X,
    P,
}

/// A wire witness tagged with the EPR source it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct WireWitness {
    pub source: usize,
    pub kind: WitnessKind,
    pub witness: Witness,
}

impl WireWitness {
    pub fn id(&self) -> String {
        let k = match self.kind {
            WitnessKind::X => "x",
            WitnessKind::P => "p",
        };
        format!("wire/source{}/{}", self.source, k)
    }
}

/// X- and P-type four-mode witnesses for interior source `wire_position + 1`.
///
/// The first two terms sit on the outputs of the splitter to the source's
/// left, the last two on the splitter to its right. With the odd-mode
/// rotation the right-hand pair is read in the rotated quadratures, so the X
/// witness is `x, x, p, p` and the P witness `p, p, x, x`, both carrying the
/// same sign pattern. Without the rotation both are pure x (resp. p)
/// combinations and the EPR anticorrelation flips the right-hand P signs.
pub fn witness_pair(
    spec: &DualRailSpec,
    wire_position: usize,
    signs: WitnessSigns,
) -> Result<(Witness, Witness)> {
    spec.validate()?;
    let interior = spec.n_pairs.saturating_sub(2);
    if wire_position >= interior {
        return Err(invalid(format!(
            "wire position {wire_position} is not an interior link ({interior} available)"
        )));
    }
    let j = wire_position + 1;
    let n = spec.n_modes();
    let modes = [2 * j - 1, 2 * j, 2 * j + 1, 2 * j + 2];
    let s = signs.pattern();
    use Quadrature::{P, X};
    let (xq, pq, p_flip) = match spec.phase_convention {
        PhaseConvention::OddModeMinusHalfPi => ([X, X, P, P], [P, P, X, X], [1.0; 4]),
        PhaseConvention::None => ([X; 4], [P; 4], [1.0, 1.0, -1.0, -1.0]),
    };
    let x_terms: Vec<_> = (0..4).map(|i| (modes[i], xq[i], s[i])).collect();
    let p_terms: Vec<_> = (0..4).map(|i| (modes[i], pq[i], s[i] * p_flip[i])).collect();
    Ok((Witness::from_terms(n, &x_terms)?, Witness::from_terms(n, &p_terms)?))
}

/// X- and P-type witnesses for the two end sources, `(left, right)`.
/// Each is a three-term combination normalized to its vacuum variance 2.
pub fn boundary_witnesses(spec: &DualRailSpec) -> Result<[(Witness, Witness); 2]> {
    spec.validate()?;
    let n = spec.n_modes();
    let h = FRAC_1_SQRT_2;
    use Quadrature::{P, X};
    let rotated = spec.phase_convention == PhaseConvention::OddModeMinusHalfPi;
    // B halves are read as p (X witness) / x (P witness) after rotation
    let (bx, bp, bsign) = if rotated { (P, X, -1.0) } else { (X, P, 1.0) };

    // left end: A_0 = mode 0, B_0 = (m1 - m2)/√2
    let left_x = Witness::from_terms(n, &[(0, X, 1.0), (1, bx, -h), (2, bx, h)])?;
    let left_p = Witness::from_terms(n, &[(0, P, 1.0), (1, bp, bsign * h), (2, bp, -bsign * h)])?;
    // right end: A_{n-1} = (m_{2n-3} + m_{2n-2})/√2, B_{n-1} = mode 2n-1
    let (a1, a2, b) = (n - 3, n - 2, n - 1);
    let right_x = Witness::from_terms(n, &[(a1, X, h), (a2, X, h), (b, bx, -1.0)])?;
    let right_p = Witness::from_terms(n, &[(a1, P, h), (a2, P, h), (b, bp, bsign)])?;
    Ok([(left_x, left_p), (right_x, right_p)])
}

/// Every witness of the wire in source order: end sources use the
/// three-term form, interior sources the four-term form with `signs`.
pub fn wire_witnesses(spec: &DualRailSpec, signs: WitnessSigns) -> Result<Vec<WireWitness>> {
    let [left, right] = boundary_witnesses(spec)?;
    let mut out = Vec::with_capacity(2 * spec.n_pairs);
    let mut push = |source: usize, (x, p): (Witness, Witness)| {
        out.push(WireWitness { source, kind: WitnessKind::X, witness: x });
        out.push(WireWitness { source, kind: WitnessKind::P, witness: p });
    };
    push(0, left);
    for pos in 0..spec.n_pairs - 2 {
        push(pos + 1, witness_pair(spec, pos, signs)?);
    }
    push(spec.n_pairs - 1, right);
    Ok(out)
}

/// Rotates each listed mode by `phi`.
pub fn rotate_modes(state: &GaussianState, modes: &[usize], phi: f64) -> Result<GaussianState> {
    let rot = phase_shift(phi)?;
    let mut out = state.clone();
    for &m in modes {
        out = apply_symplectic(&out, &rot, &[m])?;
    }
    Ok(out)
}

/// Recovers the graph `Z = U + iW` of a pure Gaussian state.
///
/// Uses `W = V_xx⁻¹` and `U = V_xx⁻¹·V_xp`; the returned graph carries the
/// residual `‖V_pp − Re(Z·V_xx·Z†)‖_F + ‖U − Uᵀ‖_F`, which vanishes exactly
/// when the nullifiers annihilate the state.
pub fn extract_graph(state: &GaussianState) -> Result<GraphSpec> {
    let mu = purity(state)?;
    if mu < 1.0 - GRAPH_PURITY_TOL {
        return Err(Error::NotAGraphState { purity: mu });
    }
    let n = state.n_modes();
    let cov = state.cov();
    let vxx = cov.view((0, 0), (n, n)).into_owned();
    let vxp = cov.view((0, n), (n, n)).into_owned();
    let vpp = cov.view((n, n), (n, n)).into_owned();

    let w = Cholesky::new(vxx.clone())
        .ok_or(Error::SingularCovariance)?
        .inverse();
    let u_raw = &w * &vxp;
    let asym = (&u_raw - u_raw.transpose()).norm();
    let u = (&u_raw + u_raw.transpose()) * 0.5;

    // Re(Z Vxx Z†) = U Vxx U + W Vxx W
    let fitted = &u * &vxx * &u + &w * &vxx * &w;
    let residual = (&vpp - fitted).norm() + asym;

    let adjacency = DMatrix::from_fn(n, n, |i, j| Complex64::new(u[(i, j)], 0.5 * (w[(i, j)] + w[(j, i)])));
    let mut g = GraphSpec::from_adjacency(adjacency)?;
    g.residual = Some(residual);
    Ok(g)
}

/// Ideal homodyne measurement of `quadrature` on `mode` with result
/// `outcome`. The measured mode is removed; the remaining modes keep their
/// order. The conditional covariance does not depend on `outcome`.
pub fn condition_on_homodyne(
    state: &GaussianState,
    mode: usize,
    quadrature: Quadrature,
    outcome: f64,
) -> Result<GaussianState> {
    let n = state.n_modes();
    if mode >= n {
        return Err(Error::ModeOutOfRange { mode, n_modes: n });
    }
    if n == 1 {
        return Err(invalid("cannot condition a single-mode state on its only mode"));
    }
    if !outcome.is_finite() {
        return Err(invalid("homodyne outcome must be finite"));
    }
    let i = quadrature.index(mode, n);
    let keep: Vec<usize> = (0..2 * n).filter(|&k| k != mode && k != n + mode).collect();
    let cov = state.cov();
    let mean = state.mean();
    let v = cov[(i, i)];
    if !(v > 0.0) {
        return Err(Error::Numerical(format!("measured quadrature has variance {v}")));
    }
    let k = keep.len();
    let shift = (outcome - mean[i]) / v;
    let new_mean = DVector::from_fn(k, |a, _| mean[keep[a]] + cov[(keep[a], i)] * shift);
    let new_cov = DMatrix::from_fn(k, k, |a, b| {
        cov[(keep[a], keep[b])] - cov[(keep[a], i)] * cov[(i, keep[b])] / v
    });
    GaussianState::new(new_mean, new_cov)
}
