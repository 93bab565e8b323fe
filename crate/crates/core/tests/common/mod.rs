//! Reference implementations used by the integration tests. They work on
//! the explicit block-diagonal matrix with plain loops and nalgebra's own
//! decompositions, sharing no code with the library's algebra.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use ttsvd::Tensor3;

pub type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_tensor(n1: usize, n2: usize, n3: usize, rng: &mut ChaCha8Rng, complex: bool) -> Tensor3 {
    Tensor3::from_fn(n1, n2, n3, |_, _, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = if complex { StandardNormal.sample(rng) } else { 0.0 };
        C::new(re, im)
    })
}

pub fn uniform_tensor(n1: usize, n2: usize, n3: usize, rng: &mut ChaCha8Rng) -> Tensor3 {
    Tensor3::from_fn(n1, n2, n3, |_, _, _| C::new(rng.random_range(0.0..1.0), 0.0))
}

/// Unitary DFT matrix from its defining formula.
pub fn dft_matrix(n: usize) -> DMatrix<C> {
    DMatrix::from_fn(n, n, |r, c| {
        C::from_polar(1.0 / (n as f64).sqrt(), -2.0 * PI * (r * c) as f64 / n as f64)
    })
}

/// Orthonormal DCT-II matrix from its defining formula.
pub fn dct_matrix(n: usize) -> DMatrix<C> {
    DMatrix::from_fn(n, n, |r, c| {
        let scale = if r == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
        C::new(scale * (PI * (2 * c + 1) as f64 * r as f64 / (2 * n) as f64).cos(), 0.0)
    })
}

pub fn max_abs(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn unitarity_gap(phi: &DMatrix<C>) -> f64 {
    let n = phi.nrows();
    max_abs(&(phi.adjoint() * phi - DMatrix::identity(n, n)))
}

/// Transformed slices: `Â(i, j, l) = Σ_k Φ[l, k] A(i, j, k)`.
pub fn forward(a: &Tensor3, phi: &DMatrix<C>) -> Vec<DMatrix<C>> {
    let (n1, n2, n3) = a.dims();
    (0..n3)
        .map(|l| {
            DMatrix::from_fn(n1, n2, |i, j| (0..n3).map(|k| phi[(l, k)] * a.get(i, j, k)).sum())
        })
        .collect()
}

/// Inverse of [`forward`]: `A(i, j, k) = Σ_l conj(Φ[l, k]) Â(i, j, l)`.
pub fn backward(slices: &[DMatrix<C>], phi: &DMatrix<C>) -> Tensor3 {
    let (n1, n2) = slices[0].shape();
    let n3 = slices.len();
    Tensor3::from_fn(n1, n2, n3, |i, j, k| (0..n3).map(|l| phi[(l, k)].conj() * slices[l][(i, j)]).sum())
}

pub fn blockdiag(slices: &[DMatrix<C>]) -> DMatrix<C> {
    let (r, c) = slices[0].shape();
    let n3 = slices.len();
    let mut big = DMatrix::zeros(r * n3, c * n3);
    for (k, s) in slices.iter().enumerate() {
        big.view_mut((k * r, k * c), (r, c)).copy_from(s);
    }
    big
}

pub fn blocks(big: &DMatrix<C>, r: usize, c: usize, n3: usize) -> Vec<DMatrix<C>> {
    (0..n3).map(|k| big.view((k * r, k * c), (r, c)).clone_owned()).collect()
}

pub fn oracle_product(a: &Tensor3, b: &Tensor3, phi: &DMatrix<C>) -> Tensor3 {
    let big = blockdiag(&forward(a, phi)) * blockdiag(&forward(b, phi));
    backward(&blocks(&big, a.n1(), b.n2(), a.n3()), phi)
}

pub fn oracle_conj_transpose(a: &Tensor3, phi: &DMatrix<C>) -> Tensor3 {
    let big = blockdiag(&forward(a, phi)).adjoint();
    backward(&blocks(&big, a.n2(), a.n1(), a.n3()), phi)
}

/// All singular values of the block-diagonal matrix, descending.
pub fn oracle_singular_values(a: &Tensor3, phi: &DMatrix<C>) -> Vec<f64> {
    let big = blockdiag(&forward(a, phi));
    let mut s: Vec<f64> = big.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Slice-by-slice matrix singular value thresholding.
pub fn oracle_svt(w: &Tensor3, phi: &DMatrix<C>, tau: f64) -> Tensor3 {
    let shrunk: Vec<DMatrix<C>> = forward(w, phi)
        .into_iter()
        .map(|s| {
            let svd = s.svd(true, true);
            let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
            let d = DMatrix::from_fn(u.ncols(), vt.nrows(), |i, j| {
                if i == j { C::new((svd.singular_values[i] - tau).max(0.0), 0.0) } else { C::new(0.0, 0.0) }
            });
            u * d * vt
        })
        .collect();
    backward(&shrunk, phi)
}

/// Transformed nuclear norm through the block-diagonal matrix.
pub fn oracle_ttnn(a: &Tensor3, phi: &DMatrix<C>) -> f64 {
    oracle_singular_values(a, phi).iter().sum()
}

pub fn max_abs_diff(a: &Tensor3, b: &Tensor3) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
