//! Truncated multimode Fock-space backend.
//!
//! States are dense amplitude arrays over `|n_1 ... n_M>` with `n_m <= cutoff_m`,
//! row-major with mode 0 most significant. Beam splitters are applied per
//! total-photon-number block by exponentiating the block generator, so each
//! block is exactly unitary even where the truncation cuts it short.

use num_complex::Complex64 as C64;

use crate::branch::BranchState;
use crate::error::{domain, Error, Result};
use crate::gates::{Gate, LinearOp};
use crate::linalg::{self, CMatrix};
use crate::measures::DensityMatrix;
use crate::two_branch::validate_cut;

/// Largest dense state the oracle will allocate.
pub const MAX_DIM: usize = 1 << 26;
/// Largest kept dimension for a reduced density matrix.
pub const MAX_KEPT_DIM: usize = 4096;
/// Extra levels added on top of the Poisson tail bound.
pub const CUTOFF_CUSHION: usize = 10;

/// Smallest `n` whose Poisson(`|alpha_max|^2`) tail beyond `n` is below `tol`,
/// plus [`CUTOFF_CUSHION`] levels.
pub fn choose_cutoff(alpha_max: f64, tol: f64) -> usize {
    assert!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
    let lambda = alpha_max * alpha_max;
    if lambda == 0.0 {
        return CUTOFF_CUSHION;
    }
    let top = (lambda + 20.0 * lambda.sqrt() + 60.0).ceil() as usize;
    let ln_l = lambda.ln();
    let mut log_fact = 0.0;
    let pmf: Vec<f64> = (0..=top)
        .map(|k| {
            if k > 0 {
                log_fact += (k as f64).ln();
            }
            (k as f64 * ln_l - lambda - log_fact).exp()
        })
        .collect();
    // tail[k] = P(N > k), summed from the top for accuracy
    let mut tail = vec![0.0; top + 1];
    for k in (0..top).rev() {
        tail[k] = tail[k + 1] + pmf[k + 1];
    }
    let n = (0..=top).find(|&k| tail[k] < tol).unwrap_or(top);
    n + CUTOFF_CUSHION
}

/// `e^{-|a|^2/2} a^n / sqrt(n!)` for `n = 0..=cutoff`.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(cutoff + 1);
    v.push(C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0));
    for n in 1..=cutoff {
        let prev = v[n - 1];
        v.push(prev * alpha / (n as f64).sqrt());
    }
    v
}

/// Dense state vector over a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockStateVector {
    cutoffs: Vec<usize>,
    amps: Vec<C64>,
    leakage: f64,
}

fn total_dim(cutoffs: &[usize]) -> Result<usize> {
    let mut dim: usize = 1;
    for &c in cutoffs {
        dim = dim.checked_mul(c + 1).filter(|&d| d <= MAX_DIM).ok_or(Error::Capacity {
            what: "Fock dimension",
            requested: usize::MAX,
            limit: MAX_DIM,
        })?;
    }
    Ok(dim)
}

impl FockStateVector {
    pub fn from_amplitudes(cutoffs: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(domain("a Fock state needs at least one mode"));
        }
        let dim = total_dim(&cutoffs)?;
        if amps.len() != dim {
            return Err(domain(format!("{} amplitudes for dimension {dim}", amps.len())));
        }
        Ok(Self { cutoffs, amps, leakage: 0.0 })
    }

    /// The basis state `|n_1 ... n_M>`.
    pub fn basis(cutoffs: Vec<usize>, occupation: &[usize]) -> Result<Self> {
        if occupation.len() != cutoffs.len() {
            return Err(Error::ModeMismatch(occupation.len(), cutoffs.len()));
        }
        let dim = total_dim(&cutoffs)?;
        let mut flat = 0;
        for (m, (&n, &c)) in occupation.iter().zip(&cutoffs).enumerate() {
            if n > c {
                return Err(domain(format!("occupation {n} of mode {m} exceeds cutoff {c}")));
            }
            flat = flat * (c + 1) + n;
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[flat] = C64::new(1.0, 0.0);
        Ok(Self { cutoffs, amps, leakage: 0.0 })
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cutoffs.iter().map(|c| c + 1).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amps)
    }

    /// `1 - ||v||`: weight lost to the truncation.
    pub fn norm_deficit(&self) -> f64 {
        1.0 - self.norm_sqr().sqrt()
    }

    /// Norm lost by displacements pushing weight above the cutoff.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-12 {
            return Err(Error::NullState("Fock vector has zero norm".into()));
        }
        let mut out = self.clone();
        out.amps.iter_mut().for_each(|a| *a /= n);
        Ok(out)
    }

    pub fn inner(&self, other: &FockStateVector) -> Result<C64> {
        if self.cutoffs != other.cutoffs {
            return Err(domain("inner product between different truncations"));
        }
        Ok(linalg::vdot(&self.amps, &other.amps))
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.cutoffs.len()];
        for m in (0..self.cutoffs.len().saturating_sub(1)).rev() {
            s[m] = s[m + 1] * (self.cutoffs[m + 1] + 1);
        }
        s
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i >= self.cutoffs.len() {
            return Err(Error::ModeOutOfRange { index: i, modes: self.cutoffs.len() });
        }
        Ok(())
    }

    /// Multiplies each amplitude by `f(n_i)`.
    fn diagonal1(&mut self, i: usize, f: impl Fn(usize) -> C64) {
        let stride = self.strides()[i];
        let d = self.cutoffs[i] + 1;
        let table: Vec<C64> = (0..d).map(f).collect();
        for (flat, a) in self.amps.iter_mut().enumerate() {
            *a *= table[(flat / stride) % d];
        }
    }

    /// Multiplies each amplitude by `f(n_i, n_j)`.
    fn diagonal2(&mut self, i: usize, j: usize, f: impl Fn(usize, usize) -> C64) {
        let st = self.strides();
        let (di, dj) = (self.cutoffs[i] + 1, self.cutoffs[j] + 1);
        for (flat, a) in self.amps.iter_mut().enumerate() {
            *a *= f((flat / st[i]) % di, (flat / st[j]) % dj);
        }
    }

    /// Applies a dense single-mode matrix `m` on mode `i`.
    fn apply_single(&mut self, i: usize, m: &CMatrix) {
        let st = self.strides()[i];
        let d = self.cutoffs[i] + 1;
        let mut local = vec![C64::new(0.0, 0.0); d];
        for flat in 0..self.amps.len() {
            if !(flat / st).is_multiple_of(d) {
                continue;
            }
            for (n, l) in local.iter_mut().enumerate() {
                *l = self.amps[flat + n * st];
            }
            for r in 0..d {
                let acc: C64 = local.iter().enumerate().map(|(n, l)| m[(r, n)] * l).sum();
                self.amps[flat + r * st] = acc;
            }
        }
    }

    /// Applies `exp(i (x a_i^dagger a_j + x^* a_j^dagger a_i))`, block by block
    /// in the total photon number `n_i + n_j`.
    fn apply_passive(&mut self, i: usize, j: usize, x: C64) {
        let c = self.cutoffs[i];
        let d = c + 1;
        let blocks: Vec<(usize, CMatrix)> = (0..=2 * c)
            .map(|t| {
                let lo = t.saturating_sub(c);
                let hi = t.min(c);
                let size = hi - lo + 1;
                // basis index r <-> n_i = lo + r, n_j = t - n_i
                let mut h = CMatrix::zeros(size, size);
                for r in 0..size.saturating_sub(1) {
                    let ni = lo + r;
                    let amp = ((ni + 1) as f64).sqrt() * ((t - ni) as f64).sqrt();
                    h[(r + 1, r)] = x * amp;
                    h[(r, r + 1)] = x.conj() * amp;
                }
                (lo, linalg::expi_hermitian(&h))
            })
            .collect();
        let st = self.strides();
        let (si, sj) = (st[i], st[j]);
        let mut local_in = vec![C64::new(0.0, 0.0); d * d];
        for flat in 0..self.amps.len() {
            if (flat / si) % d != 0 || (flat / sj) % d != 0 {
                continue;
            }
            for ni in 0..d {
                for nj in 0..d {
                    local_in[ni * d + nj] = self.amps[flat + ni * si + nj * sj];
                }
            }
            for (t, (lo, u)) in blocks.iter().enumerate() {
                let size = u.nrows();
                for r in 0..size {
                    let ni = lo + r;
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..size {
                        let mi = lo + k;
                        acc += u[(r, k)] * local_in[mi * d + (t - mi)];
                    }
                    self.amps[flat + ni * si + (t - ni) * sj] = acc;
                }
            }
        }
    }
}

/// Truncated matrix of `D(delta)` on levels `0..=cutoff`, built column by
/// column from `D|n+1> = (a^dagger - delta^*) D|n> / sqrt(n+1)`.
pub fn displacement_matrix(delta: C64, cutoff: usize) -> CMatrix {
    let d = cutoff + 1;
    let mut m = CMatrix::zeros(d, d);
    let col0 = coherent_amplitudes(delta, cutoff);
    for r in 0..d {
        m[(r, 0)] = col0[r];
    }
    for n in 0..cutoff {
        let norm = ((n + 1) as f64).sqrt();
        for r in 0..d {
            let raised = if r > 0 { m[(r - 1, n)] * (r as f64).sqrt() } else { C64::new(0.0, 0.0) };
            m[(r, n + 1)] = (raised - delta.conj() * m[(r, n)]) / norm;
        }
    }
    m
}

/// Dense Fock expansion of a branch state at the given per-mode cutoffs.
pub fn synthesize(s: &BranchState, cutoffs: &[usize]) -> Result<FockStateVector> {
    if cutoffs.len() != s.modes() {
        return Err(Error::ModeMismatch(cutoffs.len(), s.modes()));
    }
    let dim = total_dim(cutoffs)?;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut prod = Vec::with_capacity(dim);
    let mut next = Vec::with_capacity(dim);
    for b in s.branches() {
        prod.clear();
        prod.push(b.coeff);
        for (m, &label) in b.labels.iter().enumerate() {
            let local = coherent_amplitudes(label, cutoffs[m]);
            next.clear();
            for &p in &prod {
                next.extend(local.iter().map(|&l| p * l));
            }
            std::mem::swap(&mut prod, &mut next);
        }
        for (a, p) in amps.iter_mut().zip(&prod) {
            *a += p;
        }
    }
    FockStateVector::from_amplitudes(cutoffs.to_vec(), amps)
}

/// Synthesizes with a common cutoff chosen for the largest label.
pub fn synthesize_auto(s: &BranchState, tol: f64) -> Result<FockStateVector> {
    let alpha_max = s
        .branches()
        .iter()
        .flat_map(|b| b.labels.iter().map(|l| l.norm()))
        .fold(0.0, f64::max);
    let cutoff = choose_cutoff(alpha_max, tol);
    synthesize(s, &vec![cutoff; s.modes()])
}

/// Applies a gate; the result is a new vector.
pub fn apply_gate(v: &FockStateVector, gate: Gate) -> Result<FockStateVector> {
    let (i, j) = gate.modes();
    v.check_mode(i)?;
    if let Some(j) = j {
        v.check_mode(j)?;
        if i == j {
            return Err(domain("two-mode gate on a single mode"));
        }
    }
    let mut out = v.clone();
    let passive_pair = |out: &mut FockStateVector, j: usize| -> Result<()> {
        if out.cutoffs[i] != out.cutoffs[j] {
            return Err(Error::CutoffMismatch(out.cutoffs[i], out.cutoffs[j]));
        }
        Ok(())
    };
    match gate {
        Gate::Linear(LinearOp::Bs50(_, j)) => {
            passive_pair(&mut out, j)?;
            out.apply_passive(i, j, C64::new(std::f64::consts::FRAC_PI_4, 0.0));
        }
        Gate::Linear(LinearOp::CurlyB(_, j)) => {
            passive_pair(&mut out, j)?;
            let quarter = |n: usize| C64::from_polar(1.0, -std::f64::consts::FRAC_PI_2 * n as f64);
            out.diagonal1(j, quarter);
            out.apply_passive(i, j, C64::new(std::f64::consts::FRAC_PI_4, 0.0));
            out.diagonal1(j, quarter);
        }
        Gate::Linear(LinearOp::BsTheta(_, j, theta)) => {
            passive_pair(&mut out, j)?;
            out.apply_passive(i, j, C64::new(0.0, -theta));
        }
        Gate::Linear(LinearOp::Phase(_, theta)) => {
            out.diagonal1(i, |n| C64::from_polar(1.0, theta * n as f64));
        }
        Gate::Linear(LinearOp::Displace(_, delta)) => {
            let before = out.norm_sqr().sqrt();
            out.apply_single(i, &displacement_matrix(delta, out.cutoffs[i]));
            out.leakage += (before - out.norm_sqr().sqrt()).max(0.0);
        }
        Gate::Kerr(_) => {
            // exp(-i pi n^2 / 2) is 1 for even n and -i for odd n
            out.diagonal1(i, |n| if n % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, -1.0) });
        }
        Gate::CrossKerr(_, j) => {
            out.diagonal2(i, j, |a, b| if (a * b) % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) });
        }
    }
    Ok(out)
}

pub fn apply_gates(v: &FockStateVector, gates: &[Gate]) -> Result<FockStateVector> {
    gates.iter().try_fold(v.clone(), |acc, &g| apply_gate(&acc, g))
}

/// Reduced density matrix over `keep` (kept modes in ascending order).
pub fn reduced_density(v: &FockStateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let mask = validate_cut(keep, v.modes())?;
    let kept: Vec<usize> = (0..v.modes()).filter(|&m| mask[m]).collect();
    let dims = v.dims();
    let kept_dim: usize = kept.iter().map(|&m| dims[m]).product();
    if kept_dim > MAX_KEPT_DIM {
        return Err(Error::Capacity { what: "kept dimension", requested: kept_dim, limit: MAX_KEPT_DIM });
    }
    DensityMatrix::from_positive(linalg::reduce_pure(&v.amps, &dims, &kept))
}

/// `|<a|b>|^2 / (<a|a><b|b>)`.
pub fn fidelity(a: &FockStateVector, b: &FockStateVector) -> Result<f64> {
    let ov = a.inner(b)?;
    Ok(ov.norm_sqr() / (a.norm_sqr() * b.norm_sqr()))
}

/// Sign convention for the beam-splitter network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnConvention {
    /// Angles chosen so that `U_N sqrt(N) a_1^dagger U_N^dagger = sum_i a_i^dagger`:
    /// splitter `k` keeps amplitude `1/sqrt(N-k)` in mode `k` and passes the
    /// rest to mode `k+1` with a plus sign.
    #[default]
    SumRule,
    /// `exp(t (a_k^dagger a_{k+1} - a_{k+1}^dagger a_k))` with
    /// `t = asin(1/sqrt(N-k))`, taken verbatim. Only reproduces the sum rule up
    /// to signs and mode weights; kept for inspection.
    Literal,
}

/// The beam-splitter network `U_N` as gates in application order
/// (splitter on modes 0,1 first).
pub fn un_network(n: usize) -> Vec<Gate> {
    un_network_with(n, UnConvention::SumRule)
}

pub fn un_network_with(n: usize, convention: UnConvention) -> Vec<Gate> {
    (0..n.saturating_sub(1))
        .map(|k| {
            let theta = (1.0 / ((n - k) as f64).sqrt()).asin();
            let angle = match convention {
                UnConvention::Literal => theta,
                UnConvention::SumRule => theta - std::f64::consts::FRAC_PI_2,
            };
            Gate::Linear(LinearOp::BsTheta(k, k + 1, angle))
        })
        .collect()
}

/// `|W>_N` on qubit-truncated modes (cutoff 1).
pub fn w_state(n: usize) -> Result<FockStateVector> {
    FockStateVector::from_amplitudes(vec![1; n], crate::measures::w_state(n))
}
