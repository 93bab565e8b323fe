//! Dense matrix kernels shared by the transform and algebra modules.
//!
//! Matrices are `nalgebra` column-major buffers; decompositions run through
//! `faer` on zero-copy views of the same storage.

use std::sync::Once;

use faer::MatRef;
use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};
use crate::tensor::C64;

static SEQUENTIAL: Once = Once::new();

// Slice-level parallelism is handled by rayon; each decomposition runs
// single-threaded so results never depend on the thread count.
fn init() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Thin SVD `A = U·diag(s)·Vᴴ` with `s` nonincreasing.
#[derive(Clone, Debug)]
pub(crate) struct MatSvd {
    pub u: DMatrix<C64>,
    pub s: Vec<f64>,
    pub v: DMatrix<C64>,
}

fn as_faer<'a>(a: &'a DMatrixView<'_, C64>) -> MatRef<'a, C64> {
    let (rs, cs) = a.strides();
    // SAFETY: pointer, shape and strides all describe the live view `a`,
    // which outlives the returned reference.
    unsafe { MatRef::from_raw_parts(a.as_ptr(), a.nrows(), a.ncols(), rs as isize, cs as isize) }
}

fn to_nalgebra(m: MatRef<'_, C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Makes the first entry of each column of `u` with modulus above `1e-10`
/// real and positive, rotating the matching column of `v` by the same phase
/// so `u·vᴴ` is unchanged.
pub(crate) fn normalize_phases(u: &mut DMatrix<C64>, mut v: Option<&mut DMatrix<C64>>) {
    for c in 0..u.ncols() {
        let Some(pivot) = u.column(c).iter().copied().find(|z| z.norm() > 1e-10) else {
            continue;
        };
        let phase = pivot.conj() / pivot.norm();
        if phase == C64::new(1.0, 0.0) {
            continue;
        }
        u.column_mut(c).iter_mut().for_each(|z| *z *= phase);
        if let Some(v) = v.as_deref_mut() {
            v.column_mut(c).iter_mut().for_each(|z| *z *= phase);
        }
    }
}

pub(crate) fn thin_svd(a: DMatrixView<'_, C64>) -> Result<MatSvd> {
    init();
    let (m, n) = a.shape();
    let p = m.min(n);
    if p == 0 {
        return Ok(MatSvd { u: DMatrix::zeros(m, 0), s: vec![], v: DMatrix::zeros(n, 0) });
    }
    let svd = as_faer(&a)
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector().iter().map(|z| z.re).collect();
    let mut u = to_nalgebra(svd.U());
    let mut v = to_nalgebra(svd.V());
    normalize_phases(&mut u, Some(&mut v));
    Ok(MatSvd { u, s, v })
}

pub(crate) fn singular_values(a: DMatrixView<'_, C64>) -> Result<Vec<f64>> {
    init();
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(vec![]);
    }
    let mut s = as_faer(&a)
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    // faer does not document an order for the values-only path
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// `U·diag(s)·Vᴴ` for thin factors.
pub(crate) fn compose(u: &DMatrix<C64>, s: &[f64], v: &DMatrix<C64>) -> DMatrix<C64> {
    let mut us = u.clone();
    for (c, &sv) in s.iter().enumerate() {
        us.column_mut(c).iter_mut().for_each(|z| *z *= sv);
    }
    us * v.adjoint()
}

/// `max |(MᴴM − I)_ij|` and `max |(MMᴴ − I)_ij|`, whichever is larger.
pub(crate) fn unitarity_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let eye = DMatrix::<C64>::identity(n, n);
    let a = (m.adjoint() * m - &eye).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let b = (m * m.adjoint() - &eye).iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.max(b)
}
