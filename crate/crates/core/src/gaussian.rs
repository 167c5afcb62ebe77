//! Gaussian states, symplectic transforms, and quadrature witnesses.
//!
//! Quadratures are ordered x-major, `(x_0 .. x_{N-1}, p_0 .. p_{N-1})`, with
//! symplectic form `Ω = [[0, I], [-I, 0]]`. Variances are in shot-noise
//! units, so the vacuum covariance is the identity and the uncertainty
//! principle reads `cov + iΩ ≥ 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Maximum asymmetry tolerated in a covariance matrix after symmetrization.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Lower bound on `min eig(cov + iΩ)` for a state to count as physical.
pub const PHYSICALITY_TOL: f64 = 1e-10;
/// Frobenius bound on `SΩSᵀ − Ω` for a matrix to count as symplectic.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    /// Row of this quadrature of `mode` in an `n_modes` phase-space vector.
    #[inline]
    pub fn index(self, mode: usize, n_modes: usize) -> usize {
        match self {
            Quadrature::X => mode,
            Quadrature::P => n_modes + mode,
        }
    }
}

/// The symplectic form `Ω` for `n` modes in x-major ordering.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega[(i, n + i)] = 1.0;
        omega[(n + i, i)] = -1.0;
    }
    omega
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// First and second moments of an `n_modes` Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state from its moments. The covariance is symmetrized; it is
    /// not checked for physicality (see [`check_physicality`]).
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if mean.is_empty() || mean.len() % 2 != 0 {
            return Err(invalid(format!(
                "mean vector length {} is not a positive even number",
                mean.len()
            )));
        }
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                found: cov.nrows().max(cov.ncols()),
            });
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("state moments must be finite"));
        }
        let mut cov = cov;
        symmetrize(&mut cov);
        Ok(Self {
            n_modes: mean.len() / 2,
            mean,
            cov,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>) {
        (self.mean, self.cov)
    }

    /// Variance of a single quadrature.
    pub fn quadrature_variance(&self, mode: usize, q: Quadrature) -> Result<f64> {
        self.check_mode(mode)?;
        let i = q.index(mode, self.n_modes);
        Ok(self.cov[(i, i)])
    }

    /// Marginal state of the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<GaussianState> {
        validate_modes(modes, self.n_modes)?;
        let idx = phase_space_indices(modes, self.n_modes);
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.cov[(idx[a], idx[b])]);
        GaussianState::new(mean, cov)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::ModeOutOfRange {
                mode,
                n_modes: self.n_modes,
            });
        }
        Ok(())
    }

    /// Internal constructor for moments produced by the crate's own updates.
    pub(crate) fn from_parts_unchecked(mean: DVector<f64>, mut cov: DMatrix<f64>) -> Self {
        symmetrize(&mut cov);
        Self {
            n_modes: mean.len() / 2,
            mean,
            cov,
        }
    }
}

/// A real symplectic matrix acting on `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    n_modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Wraps `matrix`, rejecting it unless `‖SΩSᵀ − Ω‖_F ≤ 1e-10`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 || matrix.nrows() % 2 != 0 {
            return Err(invalid(format!(
                "symplectic matrix must be square with positive even size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let t = Self {
            n_modes: matrix.nrows() / 2,
            matrix,
        };
        let deviation = t.symplectic_deviation();
        if !(deviation <= SYMPLECTIC_TOL) {
            return Err(Error::NotSymplectic { deviation });
        }
        Ok(t)
    }

    pub(crate) fn new_unchecked(matrix: DMatrix<f64>) -> Self {
        Self {
            n_modes: matrix.nrows() / 2,
            matrix,
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::new_unchecked(DMatrix::identity(2 * n_modes, 2 * n_modes))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `‖SΩSᵀ − Ω‖_F`.
    pub fn symplectic_deviation(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        (&self.matrix * &omega * self.matrix.transpose() - omega).norm()
    }

    /// `‖SᵀS − I‖_F`; zero for passive (energy-conserving) transforms.
    pub fn orthogonality_deviation(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.transpose() * &self.matrix - DMatrix::<f64>::identity(n, n)).norm()
    }

    pub fn inverse(&self) -> Self {
        // S⁻¹ = -Ω Sᵀ Ω for symplectic S
        let omega = symplectic_form(self.n_modes);
        Self::new_unchecked(-(&omega * self.matrix.transpose() * &omega))
    }

    /// The transform that applies `self` first and then `next`.
    pub fn then(&self, next: &SymplecticTransform) -> Result<Self> {
        if next.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: next.n_modes,
            });
        }
        Ok(Self::new_unchecked(&next.matrix * &self.matrix))
    }

    /// Embeds `self` into an `n_total`-mode transform acting on `modes`, with
    /// the identity on every other mode.
    pub fn embed(&self, n_total: usize, modes: &[usize]) -> Result<Self> {
        if modes.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: modes.len(),
            });
        }
        validate_modes(modes, n_total)?;
        let idx = phase_space_indices(modes, n_total);
        let mut full = DMatrix::identity(2 * n_total, 2 * n_total);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                full[(i, j)] = self.matrix[(a, b)];
            }
        }
        Ok(Self::new_unchecked(full))
    }
}

/// A linear combination of quadratures, normalized by its vacuum variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    coeffs: DVector<f64>,
    normalization: f64,
}

impl Witness {
    pub fn new(coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() % 2 != 0 {
            return Err(invalid("witness length must be a positive even number"));
        }
        let normalization = coeffs.norm_squared();
        if !(normalization > 0.0) || !normalization.is_finite() {
            return Err(invalid("witness coefficients must be finite and not all zero"));
        }
        Ok(Self {
            coeffs,
            normalization,
        })
    }

    /// Builds a witness from `(mode, quadrature, coefficient)` terms.
    /// Repeated terms accumulate.
    pub fn from_terms(n_modes: usize, terms: &[(usize, Quadrature, f64)]) -> Result<Self> {
        let mut coeffs = DVector::zeros(2 * n_modes);
        for &(mode, q, c) in terms {
            if mode >= n_modes {
                return Err(Error::ModeOutOfRange { mode, n_modes });
            }
            coeffs[q.index(mode, n_modes)] += c;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// Modes with a nonzero coefficient on either quadrature.
    pub fn support(&self) -> Vec<usize> {
        let n = self.n_modes();
        (0..n)
            .filter(|&m| self.coeffs[m] != 0.0 || self.coeffs[n + m] != 0.0)
            .collect()
    }

    /// Commutator `[w_a·q, w_b·q] = 2i · w_aᵀ Ω w_b` in shot-noise units;
    /// returns the real factor `w_aᵀ Ω w_b`.
    pub fn commutator(&self, other: &Witness) -> Result<f64> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                found: other.coeffs.len(),
            });
        }
        let omega = symplectic_form(self.n_modes());
        Ok(self.coeffs.dot(&(&omega * &other.coeffs)))
    }
}

pub(crate) fn validate_modes(modes: &[usize], n_modes: usize) -> Result<()> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange { mode: m, n_modes });
        }
        if modes[..i].contains(&m) {
            return Err(Error::RepeatedMode(m));
        }
    }
    Ok(())
}

/// x indices of `modes` followed by their p indices.
pub(crate) fn phase_space_indices(modes: &[usize], n_modes: usize) -> Vec<usize> {
    modes
        .iter()
        .copied()
        .chain(modes.iter().map(|&m| n_modes + m))
        .collect()
}

/// The vacuum on `n` modes: zero mean, identity covariance.
pub fn vacuum_state(n: usize) -> Result<GaussianState> {
    if n == 0 {
        return Err(invalid("vacuum state needs at least one mode"));
    }
    Ok(GaussianState::from_parts_unchecked(
        DVector::zeros(2 * n),
        DMatrix::identity(2 * n, 2 * n),
    ))
}

/// Applies `s` to the listed modes of `state`.
///
/// Only the rows and columns belonging to `modes` are touched, so the cost
/// is linear in the total mode count.
pub fn apply_symplectic(
    state: &GaussianState,
    s: &SymplecticTransform,
    modes: &[usize],
) -> Result<GaussianState> {
    if modes.len() != s.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: s.n_modes(),
            found: modes.len(),
        });
    }
    validate_modes(modes, state.n_modes)?;
    let idx = phase_space_indices(modes, state.n_modes);
    let k = idx.len();
    let dim = 2 * state.n_modes;
    let sm = s.matrix();

    let mut mean = state.mean.clone();
    let local = DVector::from_iterator(k, idx.iter().map(|&i| state.mean[i]));
    let local = sm * local;
    for (a, &i) in idx.iter().enumerate() {
        mean[i] = local[a];
    }

    let mut cov = state.cov.clone();
    let rows = DMatrix::from_fn(k, dim, |a, j| state.cov[(idx[a], j)]);
    let rows = sm * rows;
    for (a, &i) in idx.iter().enumerate() {
        for j in 0..dim {
            cov[(i, j)] = rows[(a, j)];
        }
    }
    let cols = DMatrix::from_fn(dim, k, |i, b| cov[(i, idx[b])]);
    let cols = cols * sm.transpose();
    for (b, &j) in idx.iter().enumerate() {
        for i in 0..dim {
            cov[(i, j)] = cols[(i, b)];
        }
    }
    Ok(GaussianState::from_parts_unchecked(mean, cov))
}

/// `wᵀ·cov·w / normalization`: the witness variance relative to shot noise.
pub fn witness_variance(state: &GaussianState, w: &Witness) -> Result<f64> {
    if w.coeffs.len() != 2 * state.n_modes {
        return Err(Error::DimensionMismatch {
            expected: 2 * state.n_modes,
            found: w.coeffs.len(),
        });
    }
    let c = &w.coeffs;
    Ok(c.dot(&(&state.cov * c)) / w.normalization)
}

/// Smallest eigenvalue of the Hermitian matrix `cov + iΩ`, and whether it
/// clears `-PHYSICALITY_TOL`.
pub fn check_physicality(state: &GaussianState) -> (bool, f64) {
    // A + iB Hermitian has the same spectrum (doubled) as [[A, -B], [B, A]].
    let d = 2 * state.n_modes;
    let omega = symplectic_form(state.n_modes);
    let mut real = DMatrix::zeros(2 * d, 2 * d);
    real.view_mut((0, 0), (d, d)).copy_from(&state.cov);
    real.view_mut((d, d), (d, d)).copy_from(&state.cov);
    real.view_mut((0, d), (d, d)).copy_from(&(-&omega));
    real.view_mut((d, 0), (d, d)).copy_from(&omega);
    let min = real
        .symmetric_eigenvalues()
        .iter().copied().fold(f64::INFINITY, f64::min);
    (min >= -PHYSICALITY_TOL, min)
}

/// `1/√det(cov)`, which is 1 for pure states in shot-noise units.
pub fn purity(state: &GaussianState) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(state.cov.clone()).ok_or(Error::SingularCovariance)?;
    let log_det: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
    if !log_det.is_finite() {
        return Err(Error::SingularCovariance);
    }
    Ok((-0.5 * log_det).exp())
}
