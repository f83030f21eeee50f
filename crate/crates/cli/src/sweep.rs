//! Concurrence and entropy tables over a range of coherent amplitudes.

use clap::ValueEnum;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use ecsent_core::branch::{normalize, schmidt_across_cut, BranchState};
use ecsent_core::fock::{self, FockStateVector, MAX_KEPT_DIM};
use ecsent_core::measures::{two_branch_spectrum, SchmidtSpectrum};
use ecsent_core::schemes::{self, FOCK_CROSSCHECK_DIM, FOCK_TAIL_TOL};
use ecsent_core::two_branch::{self, Family, MultipartiteFamily, TwoBranchDescriptor};
use ecsent_core::{coherent_overlap, Gate, Result};

/// Largest allowed `|analytic - oracle|` before a row is flagged.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepFamily {
    /// `|a>^N - |-a>^N` on `--n` modes.
    EcsPm,
    /// `|a, a/sqrt(2n), ...> - |-a, -a/sqrt(2n), ...>` on `2n + 1` modes.
    OddScaled,
    /// `|a>|b> - |b>|a>`.
    Antisymmetric,
    /// `|a>|b> + |b>|a>`.
    Symmetric,
    /// Cross-Kerr phase applied to `|a>|b>`.
    CrossKerr,
    /// Odd cat through the beam-splitter cascade on `--n` modes.
    Cascade,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub alpha: f64,
    pub measure: &'static str,
    pub value: f64,
    pub backend: &'static str,
}

pub struct SweepSpec {
    pub family: SweepFamily,
    pub n: usize,
    /// Zero-based modes on the first side of the cut.
    pub cut: Vec<usize>,
    pub beta: Option<C64>,
}

pub struct SweepOutput {
    pub rows: Vec<Row>,
    /// Rows disagreeing with the closed form beyond [`AGREEMENT_TOL`].
    pub flagged: Vec<Row>,
}

pub fn run(spec: &SweepSpec, alphas: &[f64]) -> Result<SweepOutput> {
    let per_point: Vec<Vec<Row>> = alphas.par_iter().map(|&a| point(spec, a)).collect::<Result<_>>()?;
    let mut flagged = Vec::new();
    for rows in &per_point {
        for r in rows.iter().filter(|r| r.backend != "closed_form") {
            let reference = rows.iter().find(|c| c.backend == "closed_form" && c.measure == r.measure);
            if let Some(c) = reference {
                if (c.value - r.value).abs() > AGREEMENT_TOL || !r.value.is_finite() {
                    flagged.push(r.clone());
                }
            }
        }
    }
    Ok(SweepOutput { rows: per_point.into_iter().flatten().collect(), flagged })
}

fn push(rows: &mut Vec<Row>, alpha: f64, backend: &'static str, conc: Option<f64>, entropy: f64) {
    if let Some(c) = conc {
        rows.push(Row { alpha, measure: "concurrence", value: c, backend });
    }
    rows.push(Row { alpha, measure: "entropy", value: entropy, backend });
}

fn spectrum_measures(s: &SchmidtSpectrum) -> (Option<f64>, f64) {
    (s.concurrence().ok(), s.entropy())
}

/// Closed-form concurrence and entropy of a two-branch descriptor.
fn closed(d: &TwoBranchDescriptor) -> Result<(Option<f64>, f64)> {
    let spec = two_branch::spectrum_closed_form(d)?;
    Ok((Some(two_branch::concurrence_closed_form(d)?), spec.entropy()))
}

/// Descriptor of `|s> - |t>` across `cut` from per-mode coherent labels.
fn labels_descriptor(plus: &[C64], minus: &[C64], cut: &[usize]) -> Result<TwoBranchDescriptor> {
    let one = C64::new(1.0, 0.0);
    let (mut p1, mut p2) = (one, one);
    for (k, (s, t)) in plus.iter().zip(minus).enumerate() {
        let o = coherent_overlap(*s, *t);
        if cut.contains(&k) {
            p1 *= o;
        } else {
            p2 *= o.conj();
        }
    }
    TwoBranchDescriptor::new(one, -one, p1, p2)
}

/// Fock-backend measures of a dense vector, when the kept side is small enough.
fn fock_measures(v: &FockStateVector, cut: &[usize]) -> Result<Option<(Option<f64>, f64)>> {
    let kept: usize = cut.iter().map(|&m| v.cutoffs()[m] + 1).product();
    if kept > MAX_KEPT_DIM {
        return Ok(None);
    }
    let spec = fock::reduced_density(&v.normalized()?, cut)?.spectrum()?;
    Ok(Some(spectrum_measures(&spec)))
}

/// Synthesizes `s` for the Fock column when the dimension allows it.
fn fock_of(s: &BranchState) -> Result<Option<FockStateVector>> {
    let alpha_max = s.branches().iter().flat_map(|b| b.labels.iter().map(|l| l.norm())).fold(0.0, f64::max);
    let cutoff = fock::choose_cutoff(alpha_max, FOCK_TAIL_TOL);
    match (cutoff + 1).checked_pow(s.modes() as u32) {
        Some(dim) if dim <= FOCK_CROSSCHECK_DIM => Ok(Some(fock::synthesize(s, &vec![cutoff; s.modes()])?)),
        _ => Ok(None),
    }
}

fn two_branch_state(plus: Vec<C64>, minus: Vec<C64>, sign: f64) -> Result<BranchState> {
    let modes = plus.len();
    normalize(&BranchState::new(modes, vec![(C64::new(1.0, 0.0), plus), (C64::new(sign, 0.0), minus)])?)
}

fn point(spec: &SweepSpec, alpha: f64) -> Result<Vec<Row>> {
    let a = C64::new(alpha, 0.0);
    let cut = spec.cut.as_slice();
    let mut rows = Vec::new();
    let (state, closed_vals, fock_vec) = match spec.family {
        SweepFamily::EcsPm | SweepFamily::OddScaled => {
            let fam = match spec.family {
                SweepFamily::EcsPm => MultipartiteFamily::EcsPm { alpha: a, modes: spec.n },
                _ => MultipartiteFamily::OddScaled { alpha: a, n: spec.n },
            };
            let d = two_branch::multipartite_cut_reduce(&fam, cut)?;
            let (plus, minus) = fam.coherent_labels().expect("coherent family");
            let s = two_branch_state(plus, minus, -1.0)?;
            let f = fock_of(&s)?;
            (s, closed(&d)?, f)
        }
        SweepFamily::Antisymmetric | SweepFamily::Symmetric => {
            let b = spec.beta.unwrap_or_default();
            let p = coherent_overlap(a, b);
            let (fam, sign) = match spec.family {
                SweepFamily::Antisymmetric => (Family::Antisymmetric(p), -1.0),
                _ => (Family::Symmetric(p), 1.0),
            };
            let d = two_branch::build_family(fam)?;
            let s = two_branch_state(vec![a, b], vec![b, a], sign)?;
            let f = fock_of(&s)?;
            (s, closed(&d)?, f)
        }
        SweepFamily::CrossKerr => {
            let b = spec.beta.unwrap_or(a);
            let conc = two_branch::cross_kerr_concurrence(a, b);
            let entropy = two_branch_spectrum(conc / 2.0)?.entropy();
            let h = C64::new(0.5, 0.0);
            let s = normalize(&BranchState::new(
                2,
                vec![(h, vec![a, b]), (h, vec![a, -b]), (h, vec![-a, b]), (-h, vec![-a, -b])],
            )?)?;
            let f = match fock_of(&BranchState::coherent(vec![a, b])?)? {
                Some(v) => Some(fock::apply_gate(&v, Gate::CrossKerr(0, 1))?),
                None => None,
            };
            (s, (Some(conc), entropy), f)
        }
        SweepFamily::Cascade => {
            let report = schemes::run_cascade(a, spec.n)?;
            let out = report.output.expect("cascade has a branch output");
            let labels = schemes::cascade_labels(a, spec.n);
            let neg: Vec<C64> = labels.iter().map(|l| -l).collect();
            let d = labels_descriptor(&labels, &neg, cut)?;
            (out, closed(&d)?, report.fock_output)
        }
    };
    push(&mut rows, alpha, "closed_form", closed_vals.0, closed_vals.1);
    let (bc, be) = spectrum_measures(&schmidt_across_cut(&state, cut)?);
    push(&mut rows, alpha, "branch", bc, be);
    if let Some(v) = fock_vec {
        if let Some((fc, fe)) = fock_measures(&v, cut)? {
            push(&mut rows, alpha, "fock", fc, fe);
        }
    }
    Ok(rows)
}
