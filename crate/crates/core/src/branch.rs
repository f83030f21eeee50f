//! Symbolic engine for superpositions of products of coherent states.
//!
//! A [`BranchState`] is `sum_b c_b |l_b1> (x) ... (x) |l_bM>` where every
//! `|l>` is a coherent state. Inner products are exact through
//! [`coherent_overlap`], linear optics acts on the labels, and the Kerr gate
//! doubles the branch list. Entanglement across a mode bipartition is obtained
//! by orthonormalizing each side's branch factors through their Gram matrix.

use std::cmp::Ordering;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gates::{Gate, LinearOp};
use crate::linalg::{self, CMatrix};
use crate::measures::SchmidtSpectrum;
use crate::two_branch::validate_cut;

/// Labels closer than this (per component) denote the same coherent state.
pub const LABEL_MERGE_TOL: f64 = 1e-12;
/// Coefficients below this are dropped after merging.
pub const COEFF_PRUNE_TOL: f64 = 1e-14;
/// Default limit on the number of branches.
pub const DEFAULT_BRANCH_CAP: usize = 4096;
/// Relative Gram eigenvalue threshold used when orthonormalizing branch factors.
pub const GRAM_RANK_TOL: f64 = 1e-12;
const NULL_TOL: f64 = 1e-12;

/// `<alpha|beta> = exp(-|alpha|^2/2 - |beta|^2/2 + alpha^* beta)`.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp()
}

fn product_overlap(a: &[C64], b: &[C64]) -> C64 {
    // sum the exponents so long products do not underflow term by term
    let exponent: C64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| -0.5 * x.norm_sqr() - 0.5 * y.norm_sqr() + x.conj() * y)
        .sum();
    exponent.exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub coeff: C64,
    pub labels: Vec<C64>,
}

/// Superposition of tensor products of coherent states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct BranchState {
    modes: usize,
    branches: Vec<Branch>,
}

impl BranchState {
    /// Builds a state without normalizing it.
    pub fn new(modes: usize, branches: Vec<(C64, Vec<C64>)>) -> Result<Self> {
        if modes == 0 {
            return Err(domain("a branch state needs at least one mode"));
        }
        let mut out = Vec::with_capacity(branches.len());
        for (coeff, labels) in branches {
            if labels.len() != modes {
                return Err(Error::ModeMismatch(labels.len(), modes));
            }
            if !coeff.is_finite() || labels.iter().any(|z| !z.is_finite()) {
                return Err(domain("non-finite coefficient or label"));
            }
            out.push(Branch { coeff, labels });
        }
        if !out.iter().any(|b| b.coeff.norm() > 0.0) {
            return Err(Error::NullState("no branch with a nonzero coefficient".into()));
        }
        Ok(Self { modes, branches: out })
    }

    /// The product coherent state `|l_1> (x) ... (x) |l_M>`.
    pub fn coherent(labels: Vec<C64>) -> Result<Self> {
        Self::new(labels.len(), vec![(C64::new(1.0, 0.0), labels)])
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::coherent(vec![C64::new(0.0, 0.0); modes])
    }

    /// Normalized even (`odd = false`) or odd cat state `|a> +- |-a>`.
    pub fn cat(alpha: C64, odd: bool) -> Result<Self> {
        let sign = if odd { -1.0 } else { 1.0 };
        let s = Self::new(1, vec![(C64::new(1.0, 0.0), vec![alpha]), (C64::new(sign, 0.0), vec![-alpha])])?;
        normalize(&s)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// `<self|other>` from analytic overlaps.
    pub fn inner(&self, other: &BranchState) -> Result<C64> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch(self.modes, other.modes));
        }
        let mut acc = C64::new(0.0, 0.0);
        for a in &self.branches {
            for b in &other.branches {
                acc += a.coeff.conj() * b.coeff * product_overlap(&a.labels, &b.labels);
            }
        }
        Ok(acc)
    }

    /// Gram-weighted norm squared.
    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).map(|z| z.re).unwrap_or(0.0)
    }

    /// Tensor product, `self` on the leading modes.
    pub fn tensor(&self, other: &BranchState) -> Result<BranchState> {
        let mut out = Vec::with_capacity(self.branches.len() * other.branches.len());
        for a in &self.branches {
            for b in &other.branches {
                let mut labels = a.labels.clone();
                labels.extend_from_slice(&b.labels);
                out.push((a.coeff * b.coeff, labels));
            }
        }
        BranchState::new(self.modes + other.modes, out)
    }

    /// Reorders modes: mode `k` of the result is mode `perm[k]` of `self`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<BranchState> {
        let mut seen = vec![false; self.modes];
        if perm.len() != self.modes {
            return Err(Error::ModeMismatch(perm.len(), self.modes));
        }
        for &p in perm {
            if p >= self.modes || seen[p] {
                return Err(domain("not a permutation of the modes"));
            }
            seen[p] = true;
        }
        let branches = self
            .branches
            .iter()
            .map(|b| (b.coeff, perm.iter().map(|&p| b.labels[p]).collect()))
            .collect();
        BranchState::new(self.modes, branches)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: C64) -> BranchState {
        let mut s = self.clone();
        for b in &mut s.branches {
            b.coeff *= factor;
        }
        s
    }

    /// Concatenates the branch lists of two states on the same modes.
    pub fn add(&self, other: &BranchState) -> Result<BranchState> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch(self.modes, other.modes));
        }
        let mut s = self.clone();
        s.branches.extend(other.branches.iter().cloned());
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("branch state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i >= self.modes {
            return Err(Error::ModeOutOfRange { index: i, modes: self.modes });
        }
        Ok(())
    }
}

fn cmp_labels(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn same_labels(a: &[C64], b: &[C64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x.re - y.re).abs() <= LABEL_MERGE_TOL && (x.im - y.im).abs() <= LABEL_MERGE_TOL)
}

/// Merges duplicate labels, prunes vanishing coefficients and sorts the
/// branches lexicographically by label. Does not rescale.
fn canonicalize(s: &BranchState) -> Result<BranchState> {
    let mut merged: Vec<Branch> = Vec::with_capacity(s.branches.len());
    for b in &s.branches {
        match merged.iter_mut().find(|m| same_labels(&m.labels, &b.labels)) {
            Some(m) => m.coeff += b.coeff,
            None => merged.push(b.clone()),
        }
    }
    merged.retain(|b| b.coeff.norm() >= COEFF_PRUNE_TOL);
    if merged.is_empty() {
        return Err(Error::NullState("all branches cancel".into()));
    }
    merged.sort_by(|a, b| cmp_labels(&a.labels, &b.labels));
    Ok(BranchState { modes: s.modes, branches: merged })
}

/// Canonical form with unit Gram-weighted norm.
pub fn normalize(s: &BranchState) -> Result<BranchState> {
    let c = canonicalize(s)?;
    let norm = c.norm_sqr().max(0.0).sqrt();
    if norm < NULL_TOL {
        return Err(Error::NullState(format!("norm {norm:e}")));
    }
    Ok(c.scaled(C64::new(1.0 / norm, 0.0)))
}

/// Applies a linear-optics operation by mapping the coherent labels.
pub fn apply_linear_optics(s: &BranchState, op: LinearOp) -> Result<BranchState> {
    let (i, j) = op.modes();
    s.check_mode(i)?;
    if let Some(j) = j {
        s.check_mode(j)?;
        if i == j {
            return Err(domain("two-mode operation on a single mode"));
        }
    }
    let mut out = s.clone();
    for b in &mut out.branches {
        let a = b.labels[i];
        let other = j.map(|j| b.labels[j]).unwrap_or_default();
        if let LinearOp::Displace(_, d) = op {
            // D(d)|a> = e^{(d a^* - d^* a)/2} |a + d>
            b.coeff *= ((d * a.conj() - d.conj() * a) * 0.5).exp();
        }
        let (na, nb) = op.map_labels(a, other);
        b.labels[i] = na;
        if let Some(j) = j {
            b.labels[j] = nb;
        }
    }
    canonicalize(&out)
}

/// Kerr gate `exp(-i pi n^2 / 2)` on `mode`, dropping the global phase
/// `e^{-i pi/4}`: `|a> -> (|a> + i|-a>)/sqrt2`.
pub fn apply_kerr(s: &BranchState, mode: usize) -> Result<BranchState> {
    apply_kerr_capped(s, mode, DEFAULT_BRANCH_CAP)
}

pub fn apply_kerr_capped(s: &BranchState, mode: usize, cap: usize) -> Result<BranchState> {
    s.check_mode(mode)?;
    let requested = 2 * s.branches.len();
    if requested > cap {
        return Err(Error::Capacity { what: "branch count", requested, limit: cap });
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(requested);
    for b in &s.branches {
        let mut flipped = b.labels.clone();
        flipped[mode] = -flipped[mode];
        out.push(Branch { coeff: b.coeff * h, labels: b.labels.clone() });
        out.push(Branch { coeff: b.coeff * C64::new(0.0, h), labels: flipped });
    }
    canonicalize(&BranchState { modes: s.modes, branches: out })
}

/// Applies any gate the branch engine supports (everything but cross-Kerr).
pub fn apply_gate(s: &BranchState, gate: Gate) -> Result<BranchState> {
    match gate {
        Gate::Linear(op) => apply_linear_optics(s, op),
        Gate::Kerr(mode) => apply_kerr(s, mode),
        Gate::CrossKerr(..) => Err(domain("cross-Kerr is not a branch-engine operation")),
    }
}

/// `|<s1|s2>|^2 / (<s1|s1> <s2|s2>)`.
pub fn fidelity(s1: &BranchState, s2: &BranchState) -> Result<f64> {
    let ov = s1.inner(s2)?;
    Ok(ov.norm_sqr() / (s1.norm_sqr() * s2.norm_sqr()))
}

/// Gram matrix of the side factors `prod_{m in side} <l_bm|l_b'm>`.
fn side_gram(s: &BranchState, side: &[usize]) -> CMatrix {
    let k = s.branches.len();
    let factors: Vec<Vec<C64>> = s
        .branches
        .iter()
        .map(|b| side.iter().map(|&m| b.labels[m]).collect())
        .collect();
    let mut g = CMatrix::zeros(k, k);
    for r in 0..k {
        for c in r..k {
            let v = product_overlap(&factors[r], &factors[c]);
            g[(r, c)] = v;
            g[(c, r)] = v.conj();
        }
    }
    g
}

/// Coordinates `diag(sqrt(l)) V^dagger` of the branch factors in an
/// orthonormal basis of their span.
fn orthonormal_coordinates(gram: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(gram);
    let top = vals.first().copied().unwrap_or(0.0);
    let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > GRAM_RANK_TOL * top).collect();
    let adj = vecs.adjoint();
    CMatrix::from_fn(kept.len(), gram.ncols(), |r, c| adj[(kept[r], c)] * vals[kept[r]].sqrt())
}

/// Schmidt spectrum of a normalized state across `cut` (modes on side A).
pub fn schmidt_across_cut(s: &BranchState, cut: &[usize]) -> Result<SchmidtSpectrum> {
    let norm = s.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(domain(format!("state must be normalized, norm^2 = {norm}")));
    }
    let mask = validate_cut(cut, s.modes)?;
    let side_a: Vec<usize> = (0..s.modes).filter(|&m| mask[m]).collect();
    let side_b: Vec<usize> = (0..s.modes).filter(|&m| !mask[m]).collect();
    let xa = orthonormal_coordinates(&side_gram(s, &side_a));
    let xb = orthonormal_coordinates(&side_gram(s, &side_b));
    let coeffs = CMatrix::from_fn(s.branches.len(), s.branches.len(), |r, c| {
        if r == c { s.branches[r].coeff } else { C64::new(0.0, 0.0) }
    });
    let m = xa * coeffs * xb.transpose();
    let weights: Vec<f64> = linalg::singular_values(&m).iter().map(|v| v * v).collect();
    SchmidtSpectrum::with_tolerance(weights, 1e-10)
}

#[derive(Serialize, Deserialize)]
struct BranchJson {
    coeff: [f64; 2],
    labels: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    modes: usize,
    branches: Vec<BranchJson>,
}

impl TryFrom<StateJson> for BranchState {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        let branches = j
            .branches
            .into_iter()
            .map(|b| {
                (
                    C64::new(b.coeff[0], b.coeff[1]),
                    b.labels.into_iter().map(|l| C64::new(l[0], l[1])).collect(),
                )
            })
            .collect();
        BranchState::new(j.modes, branches)
    }
}

impl From<BranchState> for StateJson {
    fn from(s: BranchState) -> Self {
        StateJson {
            modes: s.modes,
            branches: s
                .branches
                .into_iter()
                .map(|b| BranchJson {
                    coeff: [b.coeff.re, b.coeff.im],
                    labels: b.labels.into_iter().map(|l| [l.re, l.im]).collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_branch::{self, TwoBranchDescriptor};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Truncated Fock vector of a coherent state, written out directly.
    fn fock_coherent(alpha: C64, levels: usize) -> Vec<C64> {
        let mut v = vec![C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0)];
        for n in 1..levels {
            let prev = v[n - 1];
            v.push(prev * alpha / (n as f64).sqrt());
        }
        v
    }

    #[test]
    fn overlap_examples() {
        let a = C64::new(0.3, -1.2);
        assert!((coherent_overlap(a, a) - c(1.0)).norm() < 1e-15);
        assert!((coherent_overlap(c(1.0), c(-1.0)) - c(0.135_335_283_236_612_7)).norm() < 1e-15);
        let p = C64::from_polar(1.0, FRAC_PI_4);
        let got = coherent_overlap(p, p.conj());
        assert!((got - C64::new(-1.0, -1.0).exp()).norm() < 1e-15);
        // numeric inner product of truncated vectors
        let numeric = linalg::vdot(&fock_coherent(p, 60), &fock_coherent(p.conj(), 60));
        assert!((numeric - got).norm() < 1e-14);
    }

    #[test]
    fn normalize_examples() {
        let a = C64::new(0.4, 0.2);
        let s = BranchState::new(1, vec![(c(1.0), vec![a]), (c(-1.0), vec![a])]).unwrap();
        assert!(matches!(normalize(&s), Err(Error::NullState(_))));

        let s = BranchState::new(1, vec![(c(1.0), vec![c(1.0)]), (c(-1.0), vec![c(-1.0)])]).unwrap();
        let n = normalize(&s).unwrap();
        let want = 1.0 / (2.0 - 2.0 * (-2.0f64).exp()).sqrt();
        let coeffs: Vec<C64> = n.branches().iter().map(|b| b.coeff).collect();
        // sorted by label: -1 first
        assert!((coeffs[0] - c(-want)).norm() < 1e-14, "{coeffs:?} vs {want}");
        assert!((coeffs[1] - c(want)).norm() < 1e-14);
        // truncated-Fock norm of the unnormalized state
        let v: Vec<C64> = fock_coherent(c(1.0), 60)
            .iter()
            .zip(fock_coherent(c(-1.0), 60))
            .map(|(x, y)| x - y)
            .collect();
        assert!((linalg::norm_sqr(&v).sqrt() * want - 1.0).abs() < 1e-14);

        let vac = BranchState::vacuum(1).unwrap();
        assert_eq!(normalize(&vac).unwrap(), vac);
    }

    #[test]
    fn merge_keeps_small_cats_distinct() {
        let s = BranchState::cat(c(1e-5), true).unwrap();
        assert_eq!(s.branches().len(), 2);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn linear_optics_examples() {
        let (a, b) = (C64::new(0.3, 0.7), C64::new(-1.1, 0.2));
        let s = BranchState::coherent(vec![a, b]).unwrap();
        let out = apply_linear_optics(&s, LinearOp::CurlyB(0, 1)).unwrap();
        let l = &out.branches()[0].labels;
        assert!((l[0] - (a + b) * FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((l[1] - (a - b) * FRAC_1_SQRT_2).norm() < 1e-15);

        let s = BranchState::coherent(vec![a, c(0.0)]).unwrap();
        let out = apply_linear_optics(&s, LinearOp::Bs50(0, 1)).unwrap();
        let l = &out.branches()[0].labels;
        assert!((l[0] - a * FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((l[1] - C64::i() * a * FRAC_1_SQRT_2).norm() < 1e-15);

        assert!(matches!(
            apply_linear_optics(&s, LinearOp::Phase(2, 0.1)),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(apply_linear_optics(&s, LinearOp::Bs50(1, 1)).is_err());
    }

    #[test]
    fn odd_cat_through_curly_b_is_antisymmetric() {
        let (alpha, beta) = (C64::new(1.2, 0.0), C64::new(0.7, 0.0));
        let input = BranchState::cat(alpha, true).unwrap().tensor(&BranchState::coherent(vec![beta]).unwrap()).unwrap();
        let out = apply_linear_optics(&input, LinearOp::CurlyB(0, 1)).unwrap();
        let out = apply_linear_optics(&out, LinearOp::Phase(1, -PI)).unwrap();
        let (ep, em) = ((alpha + beta) * FRAC_1_SQRT_2, (alpha - beta) * FRAC_1_SQRT_2);
        let target = BranchState::new(2, vec![(c(1.0), vec![ep, -em]), (c(-1.0), vec![-em, ep])]).unwrap();
        let target = normalize(&target).unwrap();
        assert!((fidelity(&out, &target).unwrap() - 1.0).abs() < 1e-12);
        let s = schmidt_across_cut(&out, &[0]).unwrap();
        assert!((s.entropy() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn displacement_phase_convention() {
        // D(d) D(a)|0> = e^{(d a^* - d^* a)/2} D(a + d)|0>; check against the
        // overlap <a + d| D(d)|a> computed from the Fock series.
        let (a, d) = (C64::new(0.4, -0.3), C64::new(-0.2, 0.6));
        let s = BranchState::coherent(vec![a]).unwrap();
        let out = apply_linear_optics(&s, LinearOp::Displace(0, d)).unwrap();
        let b = &out.branches()[0];
        assert!((b.labels[0] - (a + d)).norm() < 1e-15);
        let phase = ((d * a.conj() - d.conj() * a) * 0.5).exp();
        assert!((b.coeff - phase).norm() < 1e-15);
        assert!((b.coeff.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kerr_examples() {
        let a = C64::new(0.8, 0.1);
        let out = apply_kerr(&BranchState::coherent(vec![a]).unwrap(), 0).unwrap();
        assert_eq!(out.branches().len(), 2);
        let plus = out.branches().iter().find(|b| (b.labels[0] - a).norm() < 1e-15).unwrap();
        let minus = out.branches().iter().find(|b| (b.labels[0] + a).norm() < 1e-15).unwrap();
        assert!((plus.coeff - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((minus.coeff - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);

        let out = apply_kerr(&BranchState::vacuum(1).unwrap(), 0).unwrap();
        assert_eq!(out.branches().len(), 1);
        assert!((out.branches()[0].coeff - C64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);

        let wide = BranchState::new(1, (0..3).map(|k| (c(1.0), vec![c(k as f64)])).collect()).unwrap();
        assert!(matches!(apply_kerr_capped(&wide, 0, 4), Err(Error::Capacity { .. })));
    }

    #[test]
    fn schmidt_examples() {
        let a = c(1.0);
        let ecs = BranchState::new(2, vec![(c(1.0), vec![a, a]), (c(-1.0), vec![-a, -a])]).unwrap();
        let s = schmidt_across_cut(&normalize(&ecs).unwrap(), &[0]).unwrap();
        assert!((s.lambdas()[0] - 0.5).abs() < 1e-12 && (s.lambdas()[1] - 0.5).abs() < 1e-12);
        assert!((s.entropy() - 1.0).abs() < 1e-12);

        let prod = BranchState::coherent(vec![C64::new(0.3, 0.1), c(-2.0)]).unwrap();
        let s = schmidt_across_cut(&prod, &[1]).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.entropy().abs() < 1e-12);

        let three = BranchState::new(3, vec![(c(1.0), vec![a, a, a]), (c(-1.0), vec![-a, -a, -a])]).unwrap();
        let s = schmidt_across_cut(&normalize(&three).unwrap(), &[0]).unwrap();
        assert!((s.concurrence().unwrap() - 0.993_095_294_281_084_8).abs() < 1e-12);

        assert!(schmidt_across_cut(&ecs, &[0]).is_err());
        assert!(schmidt_across_cut(&normalize(&ecs).unwrap(), &[0, 1]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let s = BranchState::cat(C64::new(0.5, 0.5), false).unwrap();
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-15);
        let p = BranchState::coherent(vec![c(1.0)]).unwrap();
        let m = BranchState::coherent(vec![c(-1.0)]).unwrap();
        assert!((fidelity(&p, &m).unwrap() - 0.018_315_638_888_734_18).abs() < 1e-15);
        let numeric = linalg::vdot(&fock_coherent(c(1.0), 60), &fock_coherent(c(-1.0), 60)).norm_sqr();
        assert!((fidelity(&p, &m).unwrap() - numeric).abs() < 1e-15);
        assert!(matches!(fidelity(&p, &BranchState::vacuum(2).unwrap()), Err(Error::ModeMismatch(1, 2))));
    }

    #[test]
    fn json_format_round_trip() {
        let text = r#"{"modes":2,"branches":[{"coeff":[1.0,0.0],"labels":[[1.0,0.0],[0.0,-1.0]]},{"coeff":[0.0,1.0],"labels":[[-1.0,0.0],[0.0,1.0]]}]}"#;
        let s = BranchState::from_json(text).unwrap();
        assert_eq!(s.modes(), 2);
        assert_eq!(s.branches()[1].coeff, C64::new(0.0, 1.0));
        assert_eq!(s.branches()[0].labels[1], C64::new(0.0, -1.0));
        assert_eq!(s.to_json(), text);
        assert!(BranchState::from_json(r#"{"modes":2,"branches":[{"coeff":[1.0,0.0],"labels":[[1.0,0.0]]}]}"#).is_err());
        assert!(BranchState::from_json(r#"{"modes":1,"branches":[]}"#).is_err());
    }

    fn arb_c64(r: f64) -> impl Strategy<Value = C64> {
        (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| C64::from_polar(m, t))
    }

    fn arb_state() -> impl Strategy<Value = BranchState> {
        prop::collection::vec((arb_c64(1.0), arb_c64(1.5), arb_c64(1.5), arb_c64(1.5)), 1..4).prop_filter_map(
            "normalizable",
            |v| {
                let b = v.into_iter().map(|(k, x, y, z)| (k, vec![x, y, z])).collect();
                BranchState::new(3, b).ok().and_then(|s| normalize(&s).ok())
            },
        )
    }

    fn arb_op() -> impl Strategy<Value = LinearOp> {
        prop_oneof![
            Just(LinearOp::Bs50(0, 1)),
            Just(LinearOp::CurlyB(1, 2)),
            (-3.0..3.0f64).prop_map(|t| LinearOp::BsTheta(2, 0, t)),
            (-3.0..3.0f64).prop_map(|t| LinearOp::Phase(1, t)),
            arb_c64(1.0).prop_map(|d| LinearOp::Displace(2, d)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn linear_ops_preserve_norm(s in arb_state(), op in arb_op()) {
            let out = apply_linear_optics(&s, op).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert_eq!(out.branches().len(), s.branches().len());
        }

        #[test]
        fn curly_b_is_phased_bs50(s in arb_state()) {
            let direct = apply_linear_optics(&s, LinearOp::CurlyB(0, 1)).unwrap();
            let mut piped = apply_linear_optics(&s, LinearOp::Phase(1, -FRAC_PI_2)).unwrap();
            piped = apply_linear_optics(&piped, LinearOp::Bs50(0, 1)).unwrap();
            piped = apply_linear_optics(&piped, LinearOp::Phase(1, -FRAC_PI_2)).unwrap();
            prop_assert!((fidelity(&direct, &piped).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn kerr_preserves_norm(s in arb_state()) {
            let out = apply_kerr(&s, 1).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn two_branch_schmidt_matches_closed_form(
            coeffs in (arb_c64(1.0), arb_c64(1.0)),
            a in arb_c64(1.5), b in arb_c64(1.5), g in arb_c64(1.5), d in arb_c64(1.5),
        ) {
            let (mu, nu) = coeffs;
            let raw = BranchState::new(2, vec![(mu, vec![a, b]), (nu, vec![g, d])]).unwrap();
            let desc = TwoBranchDescriptor::new(mu, nu, coherent_overlap(a, g), coherent_overlap(d, b)).unwrap();
            prop_assume!(two_branch::normalization_constant(&desc).map(|n| n > 1e-2).unwrap_or(false));
            prop_assume!((a - g).norm() > 1e-3 && (b - d).norm() > 1e-3);
            let s = normalize(&raw).unwrap();
            let spec = schmidt_across_cut(&s, &[0]).unwrap();
            let closed = two_branch::concurrence_closed_form(&desc).unwrap();
            prop_assert!((spec.concurrence().unwrap() - closed).abs() < 1e-10);
        }

        #[test]
        fn json_round_trip(s in arb_state()) {
            prop_assert_eq!(BranchState::from_json(&s.to_json()).unwrap(), s);
        }
    }
}
