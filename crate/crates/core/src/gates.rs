//! Gate vocabulary shared by the coherent-branch engine and the Fock oracle.
//!
//! Mode indices are zero-based. Conventions, with `n_i = a_i^dagger a_i`:
//!
//! | gate | operator | action on coherent labels |
//! |------|----------|---------------------------|
//! | `Bs50(i, j)` | `exp(i pi/4 (a_i^dagger a_j + a_j^dagger a_i))` | `(a, b) -> ((a + i b)/sqrt2, (b + i a)/sqrt2)` |
//! | `CurlyB(i, j)` | `P_j Bs50(i, j) P_j`, `P_j = exp(-i pi/2 n_j)` | `(a, b) -> ((a + b)/sqrt2, (a - b)/sqrt2)` |
//! | `BsTheta(i, j, t)` | `exp(t (a_i^dagger a_j - a_j^dagger a_i))` | `(a, b) -> (a cos t + b sin t, b cos t - a sin t)` |
//! | `Phase(i, t)` | `exp(i t n_i)` | `a -> a e^{i t}` |
//! | `Displace(i, d)` | `exp(d a_i^dagger - d^* a_i)` | `a -> a + d`, times `e^{(d a^* - d^* a)/2}` |
//! | `Kerr(i)` | `exp(-i pi n_i^2 / 2)` | branches into `+-a` |
//! | `CrossKerr(i, j)` | `exp(-i pi n_i n_j)` | Fock oracle only |

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Passive linear-optics operations and displacements: these map products of
/// coherent states onto products of coherent states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinearOp {
    Bs50(usize, usize),
    CurlyB(usize, usize),
    BsTheta(usize, usize, f64),
    Phase(usize, f64),
    Displace(usize, C64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Linear(LinearOp),
    Kerr(usize),
    CrossKerr(usize, usize),
}

impl From<LinearOp> for Gate {
    fn from(op: LinearOp) -> Self {
        Gate::Linear(op)
    }
}

impl LinearOp {
    /// Modes touched by the operation.
    pub fn modes(&self) -> (usize, Option<usize>) {
        match *self {
            LinearOp::Bs50(i, j) | LinearOp::CurlyB(i, j) | LinearOp::BsTheta(i, j, _) => (i, Some(j)),
            LinearOp::Phase(i, _) | LinearOp::Displace(i, _) => (i, None),
        }
    }

    /// New labels of the touched modes. For two-mode ops the second entry is
    /// the label of mode `j`.
    pub(crate) fn map_labels(&self, a: C64, b: C64) -> (C64, C64) {
        let i = C64::i();
        match *self {
            LinearOp::Bs50(..) => ((a + i * b) * FRAC_1_SQRT_2, (b + i * a) * FRAC_1_SQRT_2),
            LinearOp::CurlyB(..) => ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2),
            LinearOp::BsTheta(_, _, t) => {
                let (s, c) = t.sin_cos();
                (a * c + b * s, b * c - a * s)
            }
            LinearOp::Phase(_, t) => (a * C64::from_polar(1.0, t), b),
            LinearOp::Displace(_, d) => (a + d, b),
        }
    }
}

impl Gate {
    pub fn modes(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Linear(op) => op.modes(),
            Gate::Kerr(i) => (i, None),
            Gate::CrossKerr(i, j) => (i, Some(j)),
        }
    }
}
