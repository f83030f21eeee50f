//! Entanglement measures: Schmidt spectra, entropy, pure- and mixed-state
//! concurrence, and the CKW monogamy residual.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{self, CMatrix};

/// Eigenvalues in `[-CLIP_TOL, 0)` are rounding noise and clipped to zero.
pub const CLIP_TOL: f64 = 1e-10;
/// Spectrum entries at or below this weight do not count towards the rank.
pub const RANK_TOL: f64 = 1e-12;
/// Tolerance on the normalization of pure-state amplitudes.
pub const NORM_TOL: f64 = 1e-10;

// Weights below this are dropped when factoring a density matrix for the
// Wootters construction; keeping them would turn rounding noise into
// square-root sized errors.
const WOOTTERS_RANK_TOL: f64 = 1e-14;

/// Squared Schmidt coefficients of a bipartite pure state, descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    lambdas: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Builds a spectrum from weights that must already sum to one within 1e-12.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(weights, 1e-12)
    }

    /// Builds a spectrum from eigenvalues of a unit-trace operator, clipping
    /// rounding noise and rescaling the sum to exactly one.
    pub(crate) fn with_tolerance(weights: Vec<f64>, sum_tol: f64) -> Result<Self> {
        let mut lambdas = Vec::with_capacity(weights.len());
        for w in weights {
            if !w.is_finite() {
                return Err(domain("non-finite spectrum entry"));
            }
            if w < -CLIP_TOL {
                return Err(domain(format!("negative spectrum entry {w:e}")));
            }
            lambdas.push(w.max(0.0));
        }
        let total: f64 = lambdas.iter().sum();
        if (total - 1.0).abs() > sum_tol {
            return Err(domain(format!("spectrum sums to {total}, expected 1")));
        }
        for l in &mut lambdas {
            *l /= total;
        }
        lambdas.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Number of entries above [`RANK_TOL`].
    pub fn rank(&self) -> usize {
        self.lambdas.iter().filter(|&&l| l > RANK_TOL).count()
    }

    pub fn entropy(&self) -> f64 {
        entanglement_entropy(self)
    }

    pub fn concurrence(&self) -> Result<f64> {
        concurrence_from_spectrum(self)
    }
}

/// Schmidt spectrum `1/2 ± 1/2 sqrt(1 - 4x^2)` of a two-branch state with
/// `x = |a d N1 N2|`.
pub fn two_branch_spectrum(x: f64) -> Result<SchmidtSpectrum> {
    if !(0.0..=0.5 + 1e-12).contains(&x) {
        return Err(domain(format!(
            "|a d N1 N2| = {x} outside [0, 1/2]; the state is not normalized"
        )));
    }
    let x = x.min(0.5);
    let root = (1.0 - 4.0 * x * x).max(0.0).sqrt();
    let upper = 0.5 + 0.5 * root;
    // l+ l- = x^2; dividing avoids the cancellation in 1/2 - root/2
    let lambdas = vec![upper, x * x / upper];
    Ok(SchmidtSpectrum { lambdas })
}

/// Von Neumann entropy of the spectrum in ebits (base 2).
pub fn entanglement_entropy(spectrum: &SchmidtSpectrum) -> f64 {
    spectrum
        .lambdas
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// `2 sqrt(l1 l2)` for a spectrum of rank at most two.
pub fn concurrence_from_spectrum(spectrum: &SchmidtSpectrum) -> Result<f64> {
    let rank = spectrum.rank();
    if rank > 2 {
        return Err(Error::UnsupportedMeasure(rank));
    }
    let l = &spectrum.lambdas;
    let (l1, l2) = (l.first().copied().unwrap_or(0.0), l.get(1).copied().unwrap_or(0.0));
    Ok((2.0 * (l1 * l2).sqrt()).min(1.0))
}

/// Pure-state concurrence `2|ad - bc|` of `a|00> + b|01> + c|10> + d|11>`.
pub fn concurrence_pure_two_qubit(a: C64, b: C64, c: C64, d: C64) -> Result<f64> {
    let norm = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(domain(format!("two-qubit amplitudes have norm^2 {norm}")));
    }
    Ok(2.0 * (a * d - b * c).norm())
}

/// Density operator of a kept subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity
    /// (eigenvalues >= -1e-10).
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(domain("density matrix must be square and nonempty"));
        }
        let n = entries.nrows();
        for r in 0..n {
            for c in 0..=r {
                if (entries[(r, c)] - entries[(c, r)].conj()).norm() > 1e-12 {
                    return Err(domain(format!("density matrix not Hermitian at ({r}, {c})")));
                }
            }
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(domain(format!("density matrix trace {tr}")));
        }
        let entries = linalg::hermitize(&entries);
        if let Some(&min) = linalg::hermitian_eigenvalues(&entries).last() {
            if min < -CLIP_TOL {
                return Err(domain(format!("density matrix eigenvalue {min:e}")));
            }
        }
        Ok(Self { entries })
    }

    /// Wraps a Gram-type matrix `Psi Psi^dagger`, which is positive by
    /// construction; only the trace is rescaled.
    pub(crate) fn from_positive(entries: CMatrix) -> Result<Self> {
        let tr = entries.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::NullState("reduced density matrix has zero trace".into()));
        }
        Ok(Self { entries: linalg::hermitize(&entries.unscale(tr)) })
    }

    /// The pure-state projector `|psi><psi|`.
    pub fn from_pure(amps: &[C64]) -> Result<Self> {
        let norm = linalg::norm_sqr(amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(domain(format!("pure state has norm^2 {norm}")));
        }
        let n = amps.len();
        Self::from_positive(CMatrix::from_fn(n, n, |r, c| amps[r] * amps[c].conj()))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Eigenvalue spectrum, which for a reduced state of a pure state is the
    /// Schmidt spectrum of the corresponding cut.
    pub fn spectrum(&self) -> Result<SchmidtSpectrum> {
        SchmidtSpectrum::with_tolerance(linalg::hermitian_eigenvalues(&self.entries), 1e-10)
    }
}

/// `sigma_y (x) sigma_y` with `sigma_y = i(|1><0| - |0><1|)`.
fn yy() -> CMatrix {
    let one = C64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 0)] = -one;
    m
}

/// Wootters concurrence `max(0, m1 - m2 - m3 - m4)` of a two-qubit state.
///
/// The `m_i` are the singular values of `W^dagger Y W^*` for any factor
/// `rho = W W^dagger` (`Y = sigma_y (x) sigma_y`); they coincide with the
/// square roots of the eigenvalues of `rho Y rho^* Y`. Working with the factor
/// keeps rank-deficient inputs exact instead of taking square roots of
/// eigenvalue noise.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(domain(format!("Wootters concurrence needs a 4x4 matrix, got {}", rho.dim())));
    }
    let (vals, vecs) = linalg::hermitian_eigen(&rho.entries);
    let kept: Vec<usize> = (0..4).filter(|&i| vals[i] > WOOTTERS_RANK_TOL).collect();
    let w = CMatrix::from_fn(4, kept.len(), |r, c| vecs[(r, kept[c])] * vals[kept[c]].sqrt());
    let b = w.adjoint() * yy() * w.map(|z| z.conj());
    let mut mu = linalg::singular_values(&b);
    mu.resize(4, 0.0);
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

/// Monogamy residual `|sum_k C^2(focus, k) - C^2(focus | rest)|` of an
/// N-qubit pure state (N <= 8, qubit 0 most significant).
pub fn ckw_residual(amps: &[C64], focus: usize) -> Result<f64> {
    let n = qubit_count(amps)?;
    if focus >= n {
        return Err(Error::ModeOutOfRange { index: focus, modes: n });
    }
    let norm = linalg::norm_sqr(amps);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(domain(format!("state has norm^2 {norm}")));
    }
    let dims = vec![2; n];
    let mut pairwise = 0.0;
    for k in (0..n).filter(|&k| k != focus) {
        let rho = DensityMatrix::from_positive(linalg::reduce_pure(amps, &dims, &[focus, k]))?;
        pairwise += wootters_concurrence(&rho)?.powi(2);
    }
    let single = DensityMatrix::from_positive(linalg::reduce_pure(amps, &dims, &[focus]))?;
    let cut = concurrence_from_spectrum(&single.spectrum()?)?;
    Ok((pairwise - cut * cut).abs())
}

fn qubit_count(amps: &[C64]) -> Result<usize> {
    let len = amps.len();
    if len < 4 || !len.is_power_of_two() {
        return Err(domain(format!("{len} amplitudes do not form a register of >= 2 qubits")));
    }
    let n = len.trailing_zeros() as usize;
    if n > 8 {
        return Err(Error::Capacity { what: "qubit count", requested: n, limit: 8 });
    }
    Ok(n)
}

/// `|W>_N`: uniform superposition of the single-excitation basis states.
pub fn w_state(n: usize) -> Vec<C64> {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let a = C64::new((n as f64).sqrt().recip(), 0.0);
    for k in 0..n {
        amps[1 << k] = a;
    }
    amps
}
