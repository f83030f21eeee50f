//! Closed forms for two-branch states `mu |A>|B> + nu |C>|D>`, four-term
//! states, and multipartite two-branch families reduced across a cut.
//!
//! A two-branch state is fully described by the amplitudes `mu`, `nu` and the
//! two overlaps `p1 = <A|C>` (system 1) and `p2 = <D|B>` (system 2). With the
//! orthonormal bases `|0> = |A>, |1> = (|C> - p1|A>)/N1` and
//! `|0> = |D>, |1> = (|B> - p2|D>)/N2` every such state becomes a two-qubit
//! state, which is where all the closed forms below come from.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::branch::coherent_overlap;
use crate::error::{domain, Error, Result};
use crate::measures::{self, SchmidtSpectrum};

/// Tolerance for the MES condition checks.
pub const CONDITION_TOL: f64 = 1e-10;
/// Overlap moduli this close to one make the qubit basis undefined.
pub const DEGENERATE_TOL: f64 = 1e-12;
const NULL_TOL: f64 = 1e-12;

fn check_overlap(name: &str, p: C64) -> Result<()> {
    if !p.norm().is_finite() || p.norm() > 1.0 + 1e-12 {
        return Err(domain(format!("overlap {name} = {p} has modulus above 1")));
    }
    Ok(())
}

/// `sqrt(1 - |p|^2)`, clamped at zero.
fn complement(p: C64) -> f64 {
    (1.0 - p.norm_sqr()).max(0.0).sqrt()
}

/// `mu |A>|B> + nu |C>|D>` reduced to `(mu, nu, p1 = <A|C>, p2 = <D|B>)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBranchDescriptor {
    mu: C64,
    nu: C64,
    p1: C64,
    p2: C64,
}

impl TwoBranchDescriptor {
    pub fn new(mu: C64, nu: C64, p1: C64, p2: C64) -> Result<Self> {
        check_overlap("p1", p1)?;
        check_overlap("p2", p2)?;
        if mu == C64::new(0.0, 0.0) && nu == C64::new(0.0, 0.0) {
            return Err(domain("mu and nu are both zero"));
        }
        Ok(Self { mu, nu, p1, p2 })
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }
    pub fn nu(&self) -> C64 {
        self.nu
    }
    pub fn p1(&self) -> C64 {
        self.p1
    }
    pub fn p2(&self) -> C64 {
        self.p2
    }
    pub fn n1(&self) -> f64 {
        complement(self.p1)
    }
    pub fn n2(&self) -> f64 {
        complement(self.p2)
    }
}

/// Amplitudes of `a00|00> + a01|01> + a10|10> + a11|11>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitAmplitudes {
    pub a00: C64,
    pub a01: C64,
    pub a10: C64,
    pub a11: C64,
}

impl TwoQubitAmplitudes {
    pub fn as_array(&self) -> [C64; 4] {
        [self.a00, self.a01, self.a10, self.a11]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.as_array().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn concurrence(&self) -> Result<f64> {
        measures::concurrence_pure_two_qubit(self.a00, self.a01, self.a10, self.a11)
    }
}

/// `N12 = sqrt(|mu|^2 + |nu|^2 + mu nu^* p1^* p2 + mu^* nu p1 p2^*)`.
pub fn normalization_constant(d: &TwoBranchDescriptor) -> Result<f64> {
    let cross = d.mu * d.nu.conj() * d.p1.conj() * d.p2;
    let sq = d.mu.norm_sqr() + d.nu.norm_sqr() + 2.0 * cross.re;
    let n12 = sq.max(0.0).sqrt();
    if n12 < NULL_TOL {
        return Err(Error::NullState("the two branches cancel".into()));
    }
    Ok(n12)
}

/// The state in the orthonormal qubit bases:
/// `(a p2 + d p1, a N2, d N1, 0)` with `a = mu/N12`, `d = nu/N12`.
pub fn qubit_embedding(d: &TwoBranchDescriptor) -> Result<TwoQubitAmplitudes> {
    for p in [d.p1, d.p2] {
        if p.norm() > 1.0 - DEGENERATE_TOL {
            return Err(Error::DegenerateBasis(p.norm()));
        }
    }
    let n12 = normalization_constant(d)?;
    let (a, dd) = (d.mu / n12, d.nu / n12);
    Ok(TwoQubitAmplitudes {
        a00: a * d.p2 + dd * d.p1,
        a01: a * d.n2(),
        a10: dd * d.n1(),
        a11: C64::new(0.0, 0.0),
    })
}

/// Concurrence in closed form:
///
/// ```text
///                 2 |mu| |nu| sqrt((1 - |p1|^2)(1 - |p2|^2))
/// C = ------------------------------------------------------------
///     |mu|^2 + |nu|^2 + mu nu^* p1^* p2 + mu^* nu p1 p2^*
/// ```
///
/// Degenerate overlaps (`|p| = 1`) give 0: the state is then a product.
pub fn concurrence_closed_form(d: &TwoBranchDescriptor) -> Result<f64> {
    let n12 = normalization_constant(d)?;
    let num = 2.0 * d.mu.norm() * d.nu.norm() * d.n1() * d.n2();
    Ok((num / (n12 * n12)).min(1.0))
}

/// Schmidt spectrum from `|a d N1 N2|`.
pub fn spectrum_closed_form(d: &TwoBranchDescriptor) -> Result<SchmidtSpectrum> {
    let n12 = normalization_constant(d)?;
    let x = d.mu.norm() * d.nu.norm() * d.n1() * d.n2() / (n12 * n12);
    measures::two_branch_spectrum(x.min(0.5))
}

/// Sufficient condition for a maximally entangled state: `mu = -nu` (up to a
/// common phase) and `p1 = p2`.
pub fn mes_condition(d: &TwoBranchDescriptor) -> bool {
    if d.mu.norm() == 0.0 {
        return false;
    }
    // rotate mu onto the positive real axis and rescale it to one
    let ratio = d.nu / d.mu;
    (ratio + 1.0).norm() < CONDITION_TOL && (d.p1 - d.p2).norm() < CONDITION_TOL
}

/// Two-branch families built from a single pair of states `|A>, |B>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `|A>|B> - |B>|A>` with `<A|B>` given.
    Antisymmetric(C64),
    /// `|A>|B> + |B>|A>` with `<A|B>` given.
    Symmetric(C64),
    /// `|a>|a^*> - |a^*>|a>` for a coherent amplitude `a`.
    ConjugatePair(C64),
}

pub fn build_family(family: Family) -> Result<TwoBranchDescriptor> {
    let one = C64::new(1.0, 0.0);
    match family {
        Family::Antisymmetric(p) => TwoBranchDescriptor::new(one, -one, p, p),
        Family::Symmetric(p) => TwoBranchDescriptor::new(one, one, p, p),
        Family::ConjugatePair(alpha) => {
            let p = coherent_overlap(alpha, alpha.conj());
            TwoBranchDescriptor::new(one, -one, p, p)
        }
    }
}

/// `a|A>|B> + b|A>|D> + c|C>|B> + d|C>|D>` with `p1 = <A|C>`, `p2 = <D|B>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourTermDescriptor {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
    p1: C64,
    p2: C64,
}

impl FourTermDescriptor {
    /// Accepts only normalized states (Gram norm within 1e-10 of one).
    pub fn new(a: C64, b: C64, c: C64, d: C64, p1: C64, p2: C64) -> Result<Self> {
        let f = Self::unchecked(a, b, c, d, p1, p2)?;
        let norm = f.gram_norm_sqr();
        if (norm - 1.0).abs() > CONDITION_TOL {
            return Err(domain(format!("four-term state has norm^2 {norm}")));
        }
        Ok(f)
    }

    /// Rescales the amplitudes to unit Gram norm.
    pub fn normalized(a: C64, b: C64, c: C64, d: C64, p1: C64, p2: C64) -> Result<Self> {
        let f = Self::unchecked(a, b, c, d, p1, p2)?;
        let norm = f.gram_norm_sqr().max(0.0).sqrt();
        if norm < NULL_TOL {
            return Err(Error::NullState("four-term state has zero norm".into()));
        }
        Ok(Self { a: a / norm, b: b / norm, c: c / norm, d: d / norm, p1, p2 })
    }

    fn unchecked(a: C64, b: C64, c: C64, d: C64, p1: C64, p2: C64) -> Result<Self> {
        check_overlap("p1", p1)?;
        check_overlap("p2", p2)?;
        Ok(Self { a, b, c, d, p1, p2 })
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }
    pub fn p1(&self) -> C64 {
        self.p1
    }
    pub fn p2(&self) -> C64 {
        self.p2
    }

    /// Squared norm from the 4x4 Gram matrix of the product branches.
    pub fn gram_norm_sqr(&self) -> f64 {
        let one = C64::new(1.0, 0.0);
        // side-1 states: A = 0, C = 1; side-2 states: B = 0, D = 1
        let g1 = [[one, self.p1], [self.p1.conj(), one]];
        let g2 = [[one, self.p2.conj()], [self.p2, one]];
        let terms = [(self.a, 0, 0), (self.b, 0, 1), (self.c, 1, 0), (self.d, 1, 1)];
        let mut total = C64::new(0.0, 0.0);
        for &(ck, sk, tk) in &terms {
            for &(cl, sl, tl) in &terms {
                total += ck.conj() * cl * g1[sk][sl] * g2[tk][tl];
            }
        }
        total.re
    }
}

/// Qubit-basis amplitudes of a four-term state and its concurrence
/// `2 N1 N2 |ad - bc|`.
pub fn four_term_analysis(f: &FourTermDescriptor) -> Result<(TwoQubitAmplitudes, f64)> {
    for p in [f.p1, f.p2] {
        if p.norm() > 1.0 - DEGENERATE_TOL {
            return Err(Error::DegenerateBasis(p.norm()));
        }
    }
    let (n1, n2) = (complement(f.p1), complement(f.p2));
    let (a, b, c, d, p1, p2) = (f.a, f.b, f.c, f.d, f.p1, f.p2);
    let amps = TwoQubitAmplitudes {
        a00: a * p2 + b + c * p1 * p2 + d * p1,
        a01: (a + c * p1) * n2,
        a10: (d + c * p2) * n1,
        a11: c * n1 * n2,
    };
    let conc = (2.0 * n1 * n2 * (a * d - b * c).norm()).min(1.0);
    Ok((amps, conc))
}

/// The four-term descriptor of `exp(-i pi n1 n2) |alpha>|beta>`:
/// `(|a,b> + |a,-b> + |-a,b> - |-a,-b>)/2`.
pub fn cross_kerr_descriptor(alpha: C64, beta: C64) -> Result<FourTermDescriptor> {
    let h = C64::new(0.5, 0.0);
    FourTermDescriptor::new(
        h,
        h,
        h,
        -h,
        coherent_overlap(alpha, -alpha),
        coherent_overlap(-beta, beta),
    )
}

/// `sqrt((1 - e^{-4|alpha|^2})(1 - e^{-4|beta|^2}))`.
pub fn cross_kerr_concurrence(alpha: C64, beta: C64) -> f64 {
    let fa = -(-4.0 * alpha.norm_sqr()).exp_m1();
    let fb = -(-4.0 * beta.norm_sqr()).exp_m1();
    (fa * fb).sqrt()
}

/// Multipartite two-branch states `|s_1 ... s_M> - |t_1 ... t_M>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultipartiteFamily {
    /// `|A..A B..B> - |B..B A..A>` on `2 * half` systems, `overlap = <A|B>`.
    EvenPair { overlap: C64, half: usize },
    /// `|alpha>^{(x)N} - |-alpha>^{(x)N}`.
    EcsPm { alpha: C64, modes: usize },
    /// `|alpha, alpha/sqrt(2n), ...> - |-alpha, -alpha/sqrt(2n), ...>` on
    /// `2n + 1` modes.
    OddScaled { alpha: C64, n: usize },
}

impl MultipartiteFamily {
    pub fn modes(&self) -> usize {
        match *self {
            MultipartiteFamily::EvenPair { half, .. } => 2 * half,
            MultipartiteFamily::EcsPm { modes, .. } => modes,
            MultipartiteFamily::OddScaled { n, .. } => 2 * n + 1,
        }
    }

    /// Per-system overlaps `<s_k|t_k>` between the two branches.
    pub fn mode_overlaps(&self) -> Vec<C64> {
        match *self {
            MultipartiteFamily::EvenPair { overlap, half } => (0..2 * half)
                .map(|k| if k < half { overlap } else { overlap.conj() })
                .collect(),
            MultipartiteFamily::EcsPm { alpha, modes } => vec![coherent_overlap(alpha, -alpha); modes],
            MultipartiteFamily::OddScaled { alpha, n } => {
                let small = alpha / ((2 * n) as f64).sqrt();
                let mut v = vec![coherent_overlap(alpha, -alpha)];
                v.extend(std::iter::repeat_n(coherent_overlap(small, -small), 2 * n));
                v
            }
        }
    }

    /// Coherent labels of both branches, when the family is made of coherent
    /// states.
    pub fn coherent_labels(&self) -> Option<(Vec<C64>, Vec<C64>)> {
        match *self {
            MultipartiteFamily::EvenPair { .. } => None,
            MultipartiteFamily::EcsPm { alpha, modes } => Some((vec![alpha; modes], vec![-alpha; modes])),
            MultipartiteFamily::OddScaled { alpha, n } => {
                let small = alpha / ((2 * n) as f64).sqrt();
                let mut plus = vec![alpha];
                plus.extend(std::iter::repeat_n(small, 2 * n));
                let minus = plus.iter().map(|z| -z).collect();
                Some((plus, minus))
            }
        }
    }
}

/// Reduces a multipartite family to a bipartite descriptor across `cut`
/// (zero-based systems on side 1; the rest form side 2).
pub fn multipartite_cut_reduce(family: &MultipartiteFamily, cut: &[usize]) -> Result<TwoBranchDescriptor> {
    let m = family.modes();
    if m < 2 {
        return Err(domain("a bipartition needs at least two systems"));
    }
    let side = validate_cut(cut, m)?;
    let overlaps = family.mode_overlaps();
    let one = C64::new(1.0, 0.0);
    let mut p1 = one;
    let mut p2 = one;
    for (k, o) in overlaps.iter().enumerate() {
        if side[k] {
            p1 *= o;
        } else {
            p2 *= o.conj();
        }
    }
    TwoBranchDescriptor::new(one, -one, p1, p2)
}

/// Checks that `cut` is a nonempty proper subset of `0..modes`; returns the
/// membership mask.
pub(crate) fn validate_cut(cut: &[usize], modes: usize) -> Result<Vec<bool>> {
    let mut side = vec![false; modes];
    for &k in cut {
        if k >= modes {
            return Err(Error::ModeOutOfRange { index: k, modes });
        }
        side[k] = true;
    }
    let count = side.iter().filter(|&&s| s).count();
    if count == 0 || count == modes {
        return Err(domain("cut must be a nonempty proper subset of the systems"));
    }
    Ok(side)
}

/// Concurrence between the first mode and the remaining `n - 1` modes of
/// `|alpha>^{(x)n} - |-alpha>^{(x)n}`:
/// `sqrt((1 - e^{-4|a|^2})(1 - e^{-4(n-1)|a|^2})) / (1 - e^{-2n|a|^2})`.
pub fn ecs_pm_first_mode_concurrence(alpha: C64, n: usize) -> f64 {
    let x = alpha.norm_sqr();
    let nf = n as f64;
    let num = (-(-4.0 * x).exp_m1()) * (-(-4.0 * (nf - 1.0) * x).exp_m1());
    num.sqrt() / (-(-2.0 * nf * x).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn desc(mu: f64, nu: f64, p1: f64, p2: f64) -> TwoBranchDescriptor {
        TwoBranchDescriptor::new(c(mu), c(nu), c(p1), c(p2)).unwrap()
    }

    /// Builds `mu A(x)B + nu C(x)D` explicitly in C^k (x) C^k and returns the
    /// concurrence `2 s1 s2` from its singular values.
    fn brute_force(mu: C64, nu: C64, a: &[C64], b: &[C64], cc: &[C64], d: &[C64]) -> f64 {
        let k = a.len();
        let m = DMatrix::from_fn(k, k, |i, j| mu * a[i] * b[j] + nu * cc[i] * d[j]);
        let norm = m.norm();
        let s = (m / C64::new(norm, 0.0)).singular_values();
        let mut s: Vec<f64> = s.iter().copied().collect();
        s.sort_by(|x, y| y.total_cmp(x));
        2.0 * s[0] * s[1]
    }

    fn random_unit(rng: &mut ChaCha8Rng, k: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..k).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect()
    }

    fn inner(a: &[C64], b: &[C64]) -> C64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn normalization_examples() {
        let h = FRAC_1_SQRT_2;
        assert!((normalization_constant(&desc(h, h, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let e2 = (-2.0f64).exp();
        let n = normalization_constant(&desc(1.0, -1.0, e2, e2)).unwrap();
        // sqrt(2 - 2 e^{-4})
        assert!((n - 1.401_202_598_564_009).abs() < 1e-13);
        assert!(matches!(normalization_constant(&desc(1.0, -1.0, 1.0, 1.0)), Err(Error::NullState(_))));
    }

    #[test]
    fn normalization_matches_explicit_vectors() {
        // one-mode coherent |1> and |-1> approximated by explicit Fock vectors
        let coh = |alpha: f64| -> Vec<C64> {
            let mut v = vec![c((-alpha * alpha / 2.0).exp())];
            for n in 1..60 {
                let prev = v[n - 1];
                v.push(prev * alpha / (n as f64).sqrt());
            }
            v
        };
        let (p, m) = (coh(1.0), coh(-1.0));
        // |1>|-1> - |-1>|1>
        let mut norm = 0.0;
        for i in 0..60 {
            for j in 0..60 {
                norm += (p[i] * m[j] - m[i] * p[j]).norm_sqr();
            }
        }
        let e2 = inner(&p, &m).re;
        let n12 = normalization_constant(&desc(1.0, -1.0, e2, e2)).unwrap();
        assert!((norm.sqrt() - n12).abs() < 1e-13);
    }

    #[test]
    fn embedding_examples() {
        let h = FRAC_1_SQRT_2;
        let q = qubit_embedding(&desc(h, h, 0.0, 0.0)).unwrap();
        assert!(q.a00.norm() < 1e-15 && (q.a01.re - h).abs() < 1e-15 && (q.a10.re - h).abs() < 1e-15);
        assert_eq!(q.a11, c(0.0));

        let e2 = (-2.0f64).exp();
        let q = qubit_embedding(&desc(1.0, -1.0, e2, e2)).unwrap();
        assert!((q.concurrence().unwrap() - 1.0).abs() < 1e-12);

        let q = qubit_embedding(&desc(1.0, 0.0, 0.5, 0.5)).unwrap();
        assert!((q.a00.re - 0.5).abs() < 1e-15);
        assert!((q.a01.re - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(q.a10, c(0.0));
        assert!(q.concurrence().unwrap().abs() < 1e-15);

        assert!(matches!(qubit_embedding(&desc(1.0, 1.0, 1.0, 0.5)), Err(Error::DegenerateBasis(_))));
    }

    #[test]
    fn closed_form_examples() {
        assert!((concurrence_closed_form(&desc(1.0, 1.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let e2 = (-2.0f64).exp();
        assert!((concurrence_closed_form(&desc(1.0, -1.0, e2, e2)).unwrap() - 1.0).abs() < 1e-14);
        let sym = concurrence_closed_form(&desc(1.0, 1.0, e2, e2)).unwrap();
        assert!((sym - 0.964_027_580_075_816_8).abs() < 1e-14);
        // orthogonal and partly orthogonal reductions
        let d = TwoBranchDescriptor::new(c(0.3), C64::new(0.2, 0.5), c(0.0), c(0.0)).unwrap();
        let want = 2.0 * 0.3 * d.nu().norm() / (0.09 + d.nu().norm_sqr());
        assert!((concurrence_closed_form(&d).unwrap() - want).abs() < 1e-14);
        let d = TwoBranchDescriptor::new(c(0.3), C64::new(0.2, 0.5), C64::new(0.4, 0.1), c(0.0)).unwrap();
        let want = want * (1.0 - d.p1().norm_sqr()).sqrt();
        assert!((concurrence_closed_form(&d).unwrap() - want).abs() < 1e-14);
        // degenerate overlap is a product state, not an error
        assert_eq!(concurrence_closed_form(&desc(1.0, 1.0, 1.0, 0.5)).unwrap(), 0.0);
    }

    #[test]
    fn mes_condition_examples() {
        let p = C64::new(0.3, 0.1);
        let d = TwoBranchDescriptor::new(c(1.0), c(-1.0), p, p).unwrap();
        assert!(mes_condition(&d));
        assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-10);
        assert!(!mes_condition(&desc(1.0, 1.0, 0.3, 0.3)));

        let d = desc(1.0, -1.0, 0.3, 0.2);
        assert!(!mes_condition(&d));
        // frozen from the independent embedding route below
        let closed = concurrence_closed_form(&d).unwrap();
        let embedded = qubit_embedding(&d).unwrap().concurrence().unwrap();
        assert!((closed - embedded).abs() < 1e-12);
        assert!((closed - 0.994_325_229_408_333_9).abs() < 1e-12);

        // phase covariance
        let ph = C64::from_polar(2.5, 1.1);
        let d = TwoBranchDescriptor::new(ph, -ph, p, p).unwrap();
        assert!(mes_condition(&d));
    }

    #[test]
    fn family_examples() {
        let d = build_family(Family::Antisymmetric(c(0.99))).unwrap();
        assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-12);
        let d = build_family(Family::Symmetric(c(0.0))).unwrap();
        assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-15);
        let d = build_family(Family::ConjugatePair(C64::from_polar(1.0, FRAC_PI_4))).unwrap();
        // e^{|a|^2 (e^{-2 i theta} - 1)} at theta = pi/4, |a| = 1
        let want = C64::new(-1.0, -1.0).exp();
        assert!((d.p1() - want).norm() < 1e-15);
        assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-12);
        assert!(build_family(Family::Symmetric(c(1.5))).is_err());
    }

    #[test]
    fn four_term_examples() {
        let h = c(FRAC_1_SQRT_2);
        let f = FourTermDescriptor::new(h, c(0.0), c(0.0), h, c(0.0), c(0.0)).unwrap();
        let (_, conc) = four_term_analysis(&f).unwrap();
        assert!((conc - 1.0).abs() < 1e-15);

        let f = cross_kerr_descriptor(c(1.0), c(1.0)).unwrap();
        let (amps, conc) = four_term_analysis(&f).unwrap();
        let want = -(-4.0f64).exp_m1();
        assert!((conc - want).abs() < 1e-14);
        assert!((amps.concurrence().unwrap() - want).abs() < 1e-14);
        assert!((conc - cross_kerr_concurrence(c(1.0), c(1.0))).abs() < 1e-15);

        let f = FourTermDescriptor::new(c(1.0), c(0.0), c(0.0), c(0.0), c(0.4), C64::new(0.1, 0.3)).unwrap();
        assert_eq!(four_term_analysis(&f).unwrap().1, 0.0);

        assert!(FourTermDescriptor::new(c(1.0), c(1.0), c(0.0), c(0.0), c(0.0), c(0.0)).is_err());
        let f = FourTermDescriptor::normalized(c(1.0), c(1.0), c(0.0), c(0.0), c(0.2), c(0.3)).unwrap();
        assert!((f.gram_norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cross_kerr_examples() {
        assert_eq!(cross_kerr_concurrence(c(0.0), c(0.0)), 0.0);
        assert!((cross_kerr_concurrence(c(1.0), c(1.0)) - 0.981_684_361_111_265_8).abs() < 1e-15);
        assert!((cross_kerr_concurrence(c(3.0), c(3.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cut_reduce_examples() {
        let fam = MultipartiteFamily::EcsPm { alpha: c(1.0), modes: 3 };
        let d = multipartite_cut_reduce(&fam, &[0]).unwrap();
        let got = concurrence_closed_form(&d).unwrap();
        assert!((got - ecs_pm_first_mode_concurrence(c(1.0), 3)).abs() < 1e-14);
        assert!((got - 0.993_095_294_281_084_8).abs() < 1e-13);

        for alpha in [0.1, 0.7, 2.0] {
            let fam = MultipartiteFamily::EcsPm { alpha: c(alpha), modes: 4 };
            let d = multipartite_cut_reduce(&fam, &[0, 1]).unwrap();
            assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-12);
        }

        let fam = MultipartiteFamily::OddScaled { alpha: c(1.0), n: 1 };
        let d = multipartite_cut_reduce(&fam, &[0]).unwrap();
        assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-12);

        let fam = MultipartiteFamily::EvenPair { overlap: C64::new(0.3, 0.4), half: 3 };
        let d = multipartite_cut_reduce(&fam, &[0, 1, 2]).unwrap();
        assert!(mes_condition(&d));

        assert!(multipartite_cut_reduce(&fam, &[]).is_err());
        assert!(multipartite_cut_reduce(&fam, &[0, 1, 2, 3, 4, 5]).is_err());
        assert!(multipartite_cut_reduce(&fam, &[9]).is_err());
    }

    #[test]
    fn ecs_pm_three_mode_limits() {
        let small = ecs_pm_first_mode_concurrence(c(1e-3), 3);
        assert!((small - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-4);
        let fam = MultipartiteFamily::EcsPm { alpha: c(1e-3), modes: 3 };
        let d = multipartite_cut_reduce(&fam, &[0]).unwrap();
        assert!((concurrence_closed_form(&d).unwrap() - 0.942_809_0).abs() < 1e-4);
        let fam = MultipartiteFamily::EcsPm { alpha: c(3.0), modes: 3 };
        let d = multipartite_cut_reduce(&fam, &[0]).unwrap();
        assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_matches_explicit_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let mu = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let nu = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (a, b, cc, d) = (
                random_unit(&mut rng, 3),
                random_unit(&mut rng, 3),
                random_unit(&mut rng, 3),
                random_unit(&mut rng, 3),
            );
            let desc = TwoBranchDescriptor::new(mu, nu, inner(&a, &cc), inner(&d, &b)).unwrap();
            let want = brute_force(mu, nu, &a, &b, &cc, &d);
            assert!((concurrence_closed_form(&desc).unwrap() - want).abs() < 1e-10);
        }
    }

    fn arb_c64(r: f64) -> impl Strategy<Value = C64> {
        (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| C64::from_polar(m, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn closed_form_equals_embedding(mu in arb_c64(1.0), nu in arb_c64(1.0), p1 in arb_c64(0.999), p2 in arb_c64(0.999)) {
            let d = TwoBranchDescriptor::new(mu, nu, p1, p2).unwrap();
            prop_assume!(normalization_constant(&d).map(|n| n > 1e-3).unwrap_or(false));
            let closed = concurrence_closed_form(&d).unwrap();
            let emb = qubit_embedding(&d).unwrap();
            prop_assert!((emb.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!((closed - emb.concurrence().unwrap()).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn antisymmetric_parameter_independent(p in arb_c64(0.999_999)) {
            let d = build_family(Family::Antisymmetric(p)).unwrap();
            prop_assert!(mes_condition(&d));
            prop_assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn symmetric_formula(p in arb_c64(1.0)) {
            let d = build_family(Family::Symmetric(p)).unwrap();
            let want = (1.0 - p.norm_sqr()) / (1.0 + p.norm_sqr());
            let got = concurrence_closed_form(&d).unwrap();
            prop_assert!((got - want).abs() < 1e-12);
            if p.norm() > 1e-6 {
                prop_assert!(got < 1.0);
            }
        }

        #[test]
        fn mes_condition_is_sufficient(scale in arb_c64(3.0), p in arb_c64(0.999)) {
            prop_assume!(scale.norm() > 1e-3);
            let d = TwoBranchDescriptor::new(scale, -scale, p, p).unwrap();
            prop_assert!(mes_condition(&d));
            prop_assert!((concurrence_closed_form(&d).unwrap() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn four_term_reduces_to_two_branch(mu in arb_c64(1.0), nu in arb_c64(1.0), p1 in arb_c64(0.99), p2 in arb_c64(0.99)) {
            let d = TwoBranchDescriptor::new(mu, nu, p1, p2).unwrap();
            prop_assume!(normalization_constant(&d).map(|n| n > 1e-3).unwrap_or(false));
            let n12 = normalization_constant(&d).unwrap();
            let zero = C64::new(0.0, 0.0);
            let f = FourTermDescriptor::new(mu / n12, zero, zero, nu / n12, p1, p2).unwrap();
            let (amps, conc) = four_term_analysis(&f).unwrap();
            prop_assert!((conc - concurrence_closed_form(&d).unwrap()).abs() < 1e-12);
            prop_assert!((amps.norm_sqr() - f.gram_norm_sqr()).abs() < 1e-12);
        }

        #[test]
        fn spectrum_matches_concurrence(mu in arb_c64(1.0), nu in arb_c64(1.0), p1 in arb_c64(0.99), p2 in arb_c64(0.99)) {
            let d = TwoBranchDescriptor::new(mu, nu, p1, p2).unwrap();
            prop_assume!(normalization_constant(&d).map(|n| n > 1e-3).unwrap_or(false));
            let s = spectrum_closed_form(&d).unwrap();
            prop_assert!((s.concurrence().unwrap() - concurrence_closed_form(&d).unwrap()).abs() < 1e-12);
        }
    }
}
