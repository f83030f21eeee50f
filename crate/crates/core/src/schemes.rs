//! State-generation circuits and their verification records.
//!
//! Every scheme runs on the branch engine; where the Fock dimension is small
//! enough the same circuit is replayed on the truncated Fock backend and the
//! two outputs are compared.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::branch::{self, normalize, schmidt_across_cut, BranchState};
use crate::error::{domain, Error, Result};
use crate::fock::{self, FockStateVector};
use crate::gates::{Gate, LinearOp};
use crate::measures;
use crate::two_branch::{build_family, concurrence_closed_form, Family};

/// Post-selection with probability below this is reported as a null state.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-14;
/// Truncation tolerance used when replaying schemes on the Fock backend.
pub const FOCK_TAIL_TOL: f64 = 1e-14;
/// Fock replays above this total dimension are skipped.
pub const FOCK_CROSSCHECK_DIM: usize = 1 << 22;

/// Verification record of one scheme run.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeReport {
    pub scheme: String,
    /// Normalized branch-engine output, when the scheme has one.
    pub output: Option<BranchState>,
    #[serde(skip)]
    pub fock_output: Option<FockStateVector>,
    pub fidelity_to_target: f64,
    pub entropy_ebits: f64,
    pub concurrence: Option<f64>,
    pub success_probability: Option<f64>,
    /// Fidelity between the branch and Fock outputs.
    pub backend_fidelity: Option<f64>,
    /// Scheme-specific figures keyed by name.
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl SchemeReport {
    fn new(scheme: &str) -> Self {
        Self {
            scheme: scheme.to_string(),
            output: None,
            fock_output: None,
            fidelity_to_target: 0.0,
            entropy_ebits: 0.0,
            concurrence: None,
            success_probability: None,
            backend_fidelity: None,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn max_label(s: &BranchState) -> f64 {
    s.branches().iter().flat_map(|b| b.labels.iter().map(|l| l.norm())).fold(0.0, f64::max)
}

/// Common cutoff for replaying `s` through a gate list, or `None` when the
/// dense vector would exceed [`FOCK_CROSSCHECK_DIM`].
fn replay_cutoff(alpha_max: f64, modes: usize) -> Option<usize> {
    let cutoff = fock::choose_cutoff(alpha_max, FOCK_TAIL_TOL);
    let dim = (cutoff + 1).checked_pow(modes as u32)?;
    (dim <= FOCK_CROSSCHECK_DIM).then_some(cutoff)
}

/// Replays `gates` on the Fock backend starting from `input` and compares
/// with the branch output; records the result on the report.
fn fock_replay(report: &mut SchemeReport, input: &BranchState, gates: &[Gate], output: &BranchState) -> Result<()> {
    let alpha_max = max_label(input).max(max_label(output));
    let Some(cutoff) = replay_cutoff(alpha_max, input.modes()) else {
        report.notes.push("Fock replay skipped: dimension above the cross-check limit".into());
        return Ok(());
    };
    let cutoffs = vec![cutoff; input.modes()];
    let replayed = fock::apply_gates(&fock::synthesize(input, &cutoffs)?, gates)?;
    let expected = fock::synthesize(output, &cutoffs)?;
    report.backend_fidelity = Some(fock::fidelity(&replayed, &expected)?);
    report.metrics.insert("fock_cutoff".into(), cutoff as f64);
    report.metrics.insert("fock_norm_deficit".into(), replayed.norm_deficit());
    report.fock_output = Some(replayed);
    Ok(())
}

fn run_branch_gates(input: &BranchState, gates: &[Gate]) -> Result<BranchState> {
    let out = gates.iter().try_fold(input.clone(), |s, &g| branch::apply_gate(&s, g))?;
    normalize(&out)
}

/// Entropy and (rank <= 2) concurrence across `cut`.
fn cut_measures(s: &BranchState, cut: &[usize]) -> Result<(f64, Option<f64>)> {
    let spec = schmidt_across_cut(s, cut)?;
    Ok((spec.entropy(), spec.concurrence().ok()))
}

/// Controlled swap of two single-mode registers driven by an ancilla in
/// `(|0> + |1>)/sqrt(2)`, followed by projecting the ancilla on `|->`.
pub fn run_cswap(alpha_state: &BranchState, beta_state: &BranchState) -> Result<SchemeReport> {
    for s in [alpha_state, beta_state] {
        if s.modes() != 1 {
            return Err(Error::ModeMismatch(s.modes(), 1));
        }
        if (s.norm_sqr() - 1.0).abs() > measures::NORM_TOL {
            return Err(domain("controlled-swap inputs must be normalized"));
        }
    }
    let registers = alpha_state.tensor(beta_state)?;
    // ancilla |0> keeps the registers, ancilla |1> swaps them
    let branch0 = registers.scaled(c(FRAC_1_SQRT_2));
    let branch1 = registers.permute_modes(&[1, 0])?.scaled(c(FRAC_1_SQRT_2));
    // <-| = (<0| - <1|)/sqrt(2)
    let projected = branch0.add(&branch1.scaled(c(-1.0)))?.scaled(c(FRAC_1_SQRT_2));
    let probability = projected.norm_sqr();
    if probability < MIN_SUCCESS_PROBABILITY {
        return Err(Error::NullState(format!("post-selection probability {probability:e}")));
    }
    let out = normalize(&projected)?;

    let p = alpha_state.inner(beta_state)?;
    let target = normalize(&registers.add(&registers.permute_modes(&[1, 0])?.scaled(c(-1.0)))?)?;
    let mut report = SchemeReport::new("cswap");
    report.fidelity_to_target = branch::fidelity(&out, &target)?;
    let (entropy, conc) = cut_measures(&out, &[0])?;
    report.entropy_ebits = entropy;
    report.concurrence = conc;
    report.success_probability = Some(probability);
    report.metrics.insert("overlap_abs".into(), p.norm());
    report.metrics.insert("family_concurrence".into(), concurrence_closed_form(&build_family(Family::Antisymmetric(p))?)?);
    report.output = Some(out);
    Ok(report)
}

/// Inputs of the beam-splitter scheme. Cats are `|a> +- |-a>`, normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamsplitterInput {
    /// Odd cat of `alpha` on mode 0, coherent `beta` on mode 1.
    OddPlusCoherent { alpha: C64, beta: C64 },
    /// Even cat of `alpha` on mode 0, coherent `beta` on mode 1.
    EvenPlusCoherent { alpha: C64, beta: C64 },
    TwoOdd(C64),
    TwoEven(C64),
    /// Odd cat on mode 0, even cat on mode 1.
    OddEven(C64),
}

impl BeamsplitterInput {
    pub fn name(&self) -> &'static str {
        match self {
            Self::OddPlusCoherent { .. } => "odd_plus_coherent",
            Self::EvenPlusCoherent { .. } => "even_plus_coherent",
            Self::TwoOdd(_) => "two_odd",
            Self::TwoEven(_) => "two_even",
            Self::OddEven(_) => "odd_even",
        }
    }

    fn alpha(&self) -> C64 {
        match *self {
            Self::OddPlusCoherent { alpha, .. } | Self::EvenPlusCoherent { alpha, .. } => alpha,
            Self::TwoOdd(a) | Self::TwoEven(a) | Self::OddEven(a) => a,
        }
    }

    fn input_state(&self) -> Result<BranchState> {
        let alpha = self.alpha();
        match *self {
            Self::OddPlusCoherent { beta, .. } => BranchState::cat(alpha, true)?.tensor(&BranchState::coherent(vec![beta])?),
            Self::EvenPlusCoherent { beta, .. } => BranchState::cat(alpha, false)?.tensor(&BranchState::coherent(vec![beta])?),
            Self::TwoOdd(a) => BranchState::cat(a, true)?.tensor(&BranchState::cat(a, true)?),
            Self::TwoEven(a) => BranchState::cat(a, false)?.tensor(&BranchState::cat(a, false)?),
            Self::OddEven(a) => BranchState::cat(a, true)?.tensor(&BranchState::cat(a, false)?),
        }
    }

    /// The output predicted by label algebra (unnormalized).
    fn target(&self) -> Result<BranchState> {
        let zero = c(0.0);
        let pair = |x: C64, y: C64, sign: f64| BranchState::new(2, vec![(c(1.0), vec![x, y]), (c(sign), vec![y, x])]);
        // cat(r)|0> + sign |0>cat(r), with the cat sign `cat`
        let cat_pair = |r: C64, cat: f64, sign: f64| {
            BranchState::new(
                2,
                vec![
                    (c(1.0), vec![r, zero]),
                    (c(cat), vec![-r, zero]),
                    (c(sign), vec![zero, r]),
                    (c(sign * cat), vec![zero, -r]),
                ],
            )
        };
        let r = self.alpha() * std::f64::consts::SQRT_2;
        match *self {
            Self::OddPlusCoherent { alpha, beta } | Self::EvenPlusCoherent { alpha, beta } => {
                let ep = (alpha + beta) * FRAC_1_SQRT_2;
                let em = (alpha - beta) * FRAC_1_SQRT_2;
                let sign = if matches!(self, Self::OddPlusCoherent { .. }) { -1.0 } else { 1.0 };
                pair(ep, -em, sign)
            }
            Self::TwoOdd(_) => cat_pair(r, 1.0, -1.0),
            Self::TwoEven(_) => cat_pair(r, 1.0, 1.0),
            Self::OddEven(_) => cat_pair(r, -1.0, -1.0),
        }
    }
}

/// The gates of the beam-splitter scheme: `P_1 B_{0,1} P_1` followed by a
/// phase shift of `-pi` on mode 1.
pub fn beamsplitter_gates() -> Vec<Gate> {
    vec![LinearOp::CurlyB(0, 1).into(), LinearOp::Phase(1, -PI).into()]
}

pub fn run_beamsplitter_scheme(input: BeamsplitterInput) -> Result<SchemeReport> {
    if input.alpha().norm() == 0.0 {
        return Err(domain("cat amplitude must be nonzero"));
    }
    let state = input.input_state()?;
    let gates = beamsplitter_gates();
    let out = run_branch_gates(&state, &gates)?;
    let mut report = SchemeReport::new(&format!("beamsplitter/{}", input.name()));
    report.fidelity_to_target = branch::fidelity(&out, &input.target()?)?;
    let (entropy, conc) = cut_measures(&out, &[0])?;
    report.entropy_ebits = entropy;
    report.concurrence = conc;
    fock_replay(&mut report, &state, &gates, &out)?;
    if let Some(f) = &report.fock_output {
        let spec = fock::reduced_density(f, &[0])?.spectrum()?;
        report.metrics.insert("fock_entropy_ebits".into(), spec.entropy());
    }
    report.output = Some(out);
    Ok(report)
}

/// Kerr on mode 0 followed by [`fock::un_network`].
pub fn kerr_un_gates(n: usize) -> Vec<Gate> {
    let mut gates = vec![Gate::Kerr(0)];
    gates.extend(fock::un_network(n));
    gates
}

/// Kerr on mode 0 of `|sqrt(N) alpha>|0...0>`, then the network `U_N`.
pub fn run_kerr_un(alpha: C64, n: usize) -> Result<SchemeReport> {
    if !(2..=6).contains(&n) {
        return Err(domain(format!("N = {n} outside 2..=6")));
    }
    let mut labels = vec![c(0.0); n];
    labels[0] = alpha * (n as f64).sqrt();
    let input = BranchState::coherent(labels)?;
    let gates = kerr_un_gates(n);
    let out = run_branch_gates(&input, &gates)?;
    let target = BranchState::new(
        n,
        vec![(c(FRAC_1_SQRT_2), vec![alpha; n]), (C64::new(0.0, FRAC_1_SQRT_2), vec![-alpha; n])],
    )?;
    let mut report = SchemeReport::new("kerr_un");
    report.fidelity_to_target = branch::fidelity(&out, &target)?;
    let (entropy, conc) = cut_measures(&out, &[0])?;
    report.entropy_ebits = entropy;
    report.concurrence = conc;
    fock_replay(&mut report, &input, &gates, &target)?;
    if let Some(f) = report.backend_fidelity {
        report.metrics.insert("fock_fidelity_to_target".into(), f);
    }
    report.output = Some(out);
    Ok(report)
}

/// `U_N |10...0>` on qubit-truncated modes.
pub fn run_w_generation(n: usize) -> Result<SchemeReport> {
    if !(2..=10).contains(&n) {
        return Err(domain(format!("N = {n} outside 2..=10")));
    }
    let mut occupation = vec![0; n];
    occupation[0] = 1;
    let input = FockStateVector::basis(vec![1; n], &occupation)?;
    let out = fock::apply_gates(&input, &fock::un_network(n))?;
    let w = fock::w_state(n)?;
    let mut report = SchemeReport::new("w");
    report.fidelity_to_target = fock::fidelity(&out, &w)?;
    let max_dev = out
        .amplitudes()
        .iter()
        .zip(w.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    report.metrics.insert("max_amplitude_deviation".into(), max_dev);

    let half: Vec<usize> = (0..n / 2).collect();
    let half_spec = fock::reduced_density(&out, &half)?.spectrum()?;
    report.entropy_ebits = half_spec.entropy();
    let first = fock::reduced_density(&out, &[0])?.spectrum()?;
    report.concurrence = first.concurrence().ok();
    if n <= 8 {
        report.metrics.insert("ckw_residual".into(), measures::ckw_residual(out.amplitudes(), 0)?);
    } else {
        report.notes.push("monogamy residual not evaluated above 8 qubits".into());
    }
    if n >= 3 {
        let pair = fock::reduced_density(&out, &[0, 1])?;
        report.metrics.insert("pair_concurrence".into(), measures::wootters_concurrence(&pair)?);
    }
    report.notes.push(format!("entropy_ebits is across the cut of the first {} modes", n / 2));
    report.fock_output = Some(out);
    Ok(report)
}

/// Chain `B_{0,1}, B_{1,2}, ..., B_{N-2,N-1}` of curly beam splitters.
pub fn cascade_gates(n: usize) -> Vec<Gate> {
    (0..n.saturating_sub(1)).map(|k| LinearOp::CurlyB(k, k + 1).into()).collect()
}

/// Labels the cascade should produce on the `+alpha` branch, mode 0 first.
pub fn cascade_labels(alpha: C64, n: usize) -> Vec<C64> {
    (1..=n).map(|i| alpha / 2f64.powf(i.min(n - 1) as f64 / 2.0)).collect()
}

/// Odd cat on mode 0 and vacuum elsewhere through the cascade.
pub fn run_cascade(alpha: C64, n: usize) -> Result<SchemeReport> {
    if !(2..=8).contains(&n) {
        return Err(domain(format!("N = {n} outside 2..=8")));
    }
    if alpha.norm() == 0.0 {
        return Err(domain("cat amplitude must be nonzero"));
    }
    let input = BranchState::cat(alpha, true)?.tensor(&BranchState::vacuum(n - 1)?)?;
    let gates = cascade_gates(n);
    let out = run_branch_gates(&input, &gates)?;
    let labels = cascade_labels(alpha, n);
    let neg: Vec<C64> = labels.iter().map(|l| -l).collect();
    let target = BranchState::new(n, vec![(c(1.0), labels.clone()), (c(-1.0), neg.clone())])?;

    let mut report = SchemeReport::new("cascade");
    report.fidelity_to_target = branch::fidelity(&out, &target)?;
    // each output branch should carry exactly one of the two label rows
    let label_dev = out
        .branches()
        .iter()
        .map(|b| {
            let dev = |want: &[C64]| b.labels.iter().zip(want).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            dev(&labels).min(dev(&neg))
        })
        .fold(0.0, f64::max);
    report.metrics.insert("max_label_deviation".into(), label_dev);
    report.metrics.insert("branch_count".into(), out.branches().len() as f64);
    let (entropy, conc) = cut_measures(&out, &[0])?;
    report.entropy_ebits = entropy;
    report.concurrence = conc;
    fock_replay(&mut report, &input, &gates, &out)?;
    report.output = Some(out);
    Ok(report)
}
