//! Small dense linear-algebra helpers shared by the engines.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;

/// Eigenvalues (descending) and matching eigenvectors (as columns) of a
/// Hermitian matrix. Only the lower triangle is trusted by the solver, so the
/// caller is expected to pass something Hermitian to rounding.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `(m + m†) / 2`, removing the anti-Hermitian rounding residue.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `exp(i·h)` for Hermitian `h`, via its eigendecomposition. The result is
/// unitary to rounding regardless of how `h` was truncated.
pub fn expi_hermitian(h: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let phases = DVector::from_iterator(vals.len(), vals.iter().map(|&v| C64::from_polar(1.0, v)));
    let scaled = CMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, c)] * phases[c]);
    scaled * vecs.adjoint()
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}


/// Reduced density operator `Tr_rest |psi><psi|` of a dense multimode pure
/// state. `dims[m]` is the local dimension of mode `m`; mode 0 is the most
/// significant index. `keep` lists the kept modes in the order they appear in
/// the output tensor basis.
pub fn reduce_pure(amps: &[C64], dims: &[usize], keep: &[usize]) -> CMatrix {
    let (kept_dim, rest_dim, split) = split_indices(dims, keep);
    let mut psi = CMatrix::zeros(kept_dim, rest_dim);
    for (flat, &a) in amps.iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let (k, r) = split(flat);
        psi[(k, r)] = a;
    }
    hermitize(&(&psi * psi.adjoint()))
}

/// Maps a flat row-major index onto (kept index, traced index).
fn split_indices<'a>(
    dims: &'a [usize],
    keep: &'a [usize],
) -> (usize, usize, impl Fn(usize) -> (usize, usize) + 'a) {
    let kept_dim: usize = keep.iter().map(|&m| dims[m]).product();
    let total: usize = dims.iter().product();
    let rest_dim = total / kept_dim.max(1);
    // strides of each mode inside the kept / rest sub-tensors
    let mut kept_stride = vec![0usize; dims.len()];
    let mut acc = 1;
    for &m in keep.iter().rev() {
        kept_stride[m] = acc;
        acc *= dims[m];
    }
    let mut rest_stride = vec![0usize; dims.len()];
    let mut acc = 1;
    for m in (0..dims.len()).rev() {
        if !keep.contains(&m) {
            rest_stride[m] = acc;
            acc *= dims[m];
        }
    }
    let kept_mask: Vec<bool> = (0..dims.len()).map(|m| keep.contains(&m)).collect();
    let split = move |mut flat: usize| {
        let (mut k, mut r) = (0, 0);
        for m in (0..dims.len()).rev() {
            let digit = flat % dims[m];
            flat /= dims[m];
            if kept_mask[m] {
                k += digit * kept_stride[m];
            } else {
                r += digit * rest_stride[m];
            }
        }
        (k, r)
    };
    (kept_dim, rest_dim, split)
}
