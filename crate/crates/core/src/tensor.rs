//! Dense third-order tensors.
//!
//! A [`Tensor3`] stores `n1 × n2 × n3` complex entries with the row index `i`
//! fastest, then the column index `j`, then the slice index `k`. Each frontal
//! slice is therefore a contiguous column-major `n1 × n2` matrix, and the
//! whole buffer read as a column-major `(n1·n2) × n3` matrix has the mode-3
//! tubes as its rows.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DMatrixView};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex `n1 × n2 × n3` tensor. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    data: Vec<C64>,
}

fn check_dims(dims: (usize, usize, usize)) -> Result<()> {
    if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
        return Err(Error::InvalidTensor(format!(
            "all dimensions must be positive, got {}x{}x{}",
            dims.0, dims.1, dims.2
        )));
    }
    Ok(())
}

impl Tensor3 {
    /// Builds a tensor from data in layout order. Rejects empty dimensions,
    /// wrong lengths and non-finite entries.
    pub fn new(dims: (usize, usize, usize), data: Vec<C64>) -> Result<Self> {
        check_dims(dims)?;
        let expected = dims.0 * dims.1 * dims.2;
        if data.len() != expected {
            return Err(Error::InvalidTensor(format!(
                "expected {} entries, got {}",
                expected,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidTensor(format!("non-finite entry at offset {pos}")));
        }
        Ok(Self { dims, data })
    }

    /// Real data promoted to complex.
    pub fn from_real(dims: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        Self::new(dims, data.into_iter().map(|x| C64::new(x, 0.0)).collect())
    }

    /// # Panics
    ///
    /// Panics if any dimension is zero.
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        check_dims((n1, n2, n3)).expect("zero-sized tensor");
        Self { dims: (n1, n2, n3), data: vec![C64::new(0.0, 0.0); n1 * n2 * n3] }
    }

    /// # Panics
    ///
    /// Panics if any dimension is zero or `f` yields a non-finite value.
    pub fn from_fn(n1: usize, n2: usize, n3: usize, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for k in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::new((n1, n2, n3), data).expect("from_fn")
    }

    /// Unchecked constructor for results of internal arithmetic.
    pub(crate) fn from_parts(dims: (usize, usize, usize), data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dims.0 * dims.1 * dims.2);
        Self { dims, data }
    }

    /// Reassembles a tensor from its tube matrix (`(n1·n2) × n3`, column-major).
    pub(crate) fn from_tube_matrix(n1: usize, n2: usize, m: DMatrix<C64>) -> Self {
        let n3 = m.ncols();
        debug_assert_eq!(m.nrows(), n1 * n2);
        Self::from_parts((n1, n2, n3), m.data.into())
    }

    /// Stacks `n1 × n2` frontal slices.
    pub(crate) fn from_slices(n1: usize, n2: usize, slices: &[DMatrix<C64>]) -> Self {
        let mut data = Vec::with_capacity(n1 * n2 * slices.len());
        for s in slices {
            debug_assert_eq!((s.nrows(), s.ncols()), (n1, n2));
            data.extend_from_slice(s.as_slice());
        }
        Self::from_parts((n1, n2, slices.len()), data)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn n1(&self) -> usize {
        self.dims.0
    }

    pub fn n2(&self) -> usize {
        self.dims.1
    }

    pub fn n3(&self) -> usize {
        self.dims.2
    }

    /// `max(n1, n2)`.
    pub fn n_max(&self) -> usize {
        self.dims.0.max(self.dims.1)
    }

    /// `min(n1, n2)`.
    pub fn n_min(&self) -> usize {
        self.dims.0.min(self.dims.1)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims.0 * (j + self.dims.1 * k)
    }

    /// Entry `(i, j, k)`, zero-based.
    ///
    /// # Panics
    ///
    /// Panics on out-of-range indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        assert!(i < self.dims.0 && j < self.dims.1 && k < self.dims.2, "index out of range");
        self.data[self.offset(i, j, k)]
    }

    /// Frontal slice `k` as an `n1 × n2` matrix view.
    pub fn frontal_slice(&self, k: usize) -> DMatrixView<'_, C64> {
        let (n1, n2, _) = self.dims;
        DMatrixView::from_slice(&self.data[k * n1 * n2..(k + 1) * n1 * n2], n1, n2)
    }

    /// The whole buffer as a `(n1·n2) × n3` matrix; row `p` is the tube at
    /// `(p mod n1, p / n1)`.
    pub fn tube_matrix(&self) -> DMatrixView<'_, C64> {
        DMatrixView::from_slice(&self.data, self.dims.0 * self.dims.1, self.dims.2)
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Drops imaginary parts.
    pub fn to_real(&self) -> Self {
        Self::from_parts(self.dims, self.data.iter().map(|z| C64::new(z.re, 0.0)).collect())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_parts(self.dims, self.data.iter().map(|&z| f(z)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.dims, other.dims, "tensor dimensions differ");
        Self::from_parts(
            self.dims,
            self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |a - b|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        ensure_same_dims(self, other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

pub(crate) fn ensure_same_dims(a: &Tensor3, b: &Tensor3) -> Result<()> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dims, b.dims)));
    }
    Ok(())
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &Tensor3 {
    type Output = Tensor3;
    fn mul(self, rhs: f64) -> Tensor3 {
        self.scale(rhs)
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;
    fn neg(self) -> Tensor3 {
        self.map(|z| -z)
    }
}

/// Mode-3 weights `α_1..α_n3` with `Σ α_k² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub const NORMALIZATION_TOL: f64 = 1e-12;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().map(|w| w * w).sum();
        if (total - 1.0).abs() > Self::NORMALIZATION_TOL {
            return Err(Error::InvalidWeights(format!("sum of squares is {total}, expected 1")));
        }
        Ok(Self { weights })
    }

    /// `α_k = 1/√n` for every `k`.
    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / (n as f64).sqrt(); n] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Entrywise norms of a tensor.
#[derive(Clone, Debug)]
pub enum NormKind<'a> {
    Frobenius,
    /// Largest entry modulus.
    Infinity,
    /// Largest Frobenius norm over horizontal slabs `A(i,:,:)` and lateral
    /// slabs `A(:,j,:)`.
    LInf2,
    /// As [`NormKind::LInf2`] with slice `k` weighted by `α_k²`.
    LInfW(&'a WeightVector),
}

/// `Σ conj(a_ijk) · b_ijk`.
pub fn inner_product(a: &Tensor3, b: &Tensor3) -> Result<C64> {
    ensure_same_dims(a, b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

pub fn norm(a: &Tensor3, kind: NormKind<'_>) -> Result<f64> {
    match kind {
        NormKind::Frobenius => Ok(a.frobenius_norm()),
        NormKind::Infinity => Ok(a.max_abs()),
        NormKind::LInf2 => Ok(slab_norm(a, |_| 1.0)),
        NormKind::LInfW(w) => {
            if w.len() != a.n3() {
                return Err(Error::DimensionMismatch(format!(
                    "weight length {} vs n3 = {}",
                    w.len(),
                    a.n3()
                )));
            }
            let w = w.as_slice();
            Ok(slab_norm(a, |k| w[k] * w[k]))
        }
    }
}

fn slab_norm(a: &Tensor3, weight: impl Fn(usize) -> f64) -> f64 {
    let (n1, n2, n3) = a.dims;
    let mut rows = vec![0.0; n1];
    let mut cols = vec![0.0; n2];
    for k in 0..n3 {
        let wk = weight(k);
        for j in 0..n2 {
            for i in 0..n1 {
                let e = wk * a.data[a.offset(i, j, k)].norm_sqr();
                rows[i] += e;
                cols[j] += e;
            }
        }
    }
    rows.iter().chain(&cols).fold(0.0f64, |m, &x| m.max(x)).sqrt()
}

/// `n3 × (n1·n2)` matrix whose row `k` is frontal slice `k` vectorized with
/// `i` fastest.
pub fn unfold_mode3(a: &Tensor3) -> DMatrix<C64> {
    a.tube_matrix().transpose()
}

/// Inverse of [`unfold_mode3`].
pub fn fold_mode3(m: &DMatrix<C64>, n1: usize, n2: usize) -> Result<Tensor3> {
    if n1 * n2 != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "unfolding has {} columns, expected {n1}·{n2}",
            m.ncols()
        )));
    }
    check_dims((n1, n2, m.nrows()))?;
    Ok(Tensor3::from_tube_matrix(n1, n2, m.transpose()))
}
