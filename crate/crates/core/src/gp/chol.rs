//! Dense lower Cholesky factorization on a column-major buffer.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::{cholesky_in_place, cholesky_in_place_scratch, LltError};
use faer::{MatMut, Par};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NotPd {
    pub column: usize,
}

/// Factors the `n × n` column-major matrix in `a` in place. On success the
/// lower triangle holds `L` with `A = L Lᵀ`. Only the lower triangle of the
/// input is read; the strict upper triangle is unspecified afterwards.
pub(crate) fn factor(a: &mut [f64], n: usize) -> Result<(), NotPd> {
    debug_assert_eq!(a.len(), n * n);
    let mut mem = MemBuffer::new(cholesky_in_place_scratch::<f64>(n, Par::Seq, Default::default()));
    let m = MatMut::from_column_major_slice_mut(a, n, n);
    cholesky_in_place(m, Default::default(), Par::Seq, MemStack::new(&mut mem), Default::default())
        .map_err(|LltError::NonPositivePivot { index }| NotPd { column: index })?;
    // NaN pivots slip through the sign test.
    match (0..n).find(|&j| !(a[j * n + j] > 0.0 && a[j * n + j].is_finite())) {
        Some(column) => Err(NotPd { column }),
        None => Ok(()),
    }
}

/// Solves `L z = y` in place.
pub(crate) fn forward_solve(l: &[f64], n: usize, z: &mut [f64]) {
    for j in 0..n {
        let col = &l[j * n..(j + 1) * n];
        let zj = z[j] / col[j];
        z[j] = zj;
        if zj != 0.0 {
            for i in (j + 1)..n {
                z[i] -= col[i] * zj;
            }
        }
    }
}

/// `Σ ln L_ii`.
pub(crate) fn log_det_half(l: &[f64], n: usize) -> f64 {
    (0..n).map(|i| l[i * n + i].ln()).sum()
}

/// `L z`.
pub(crate) fn lower_mul(l: &[f64], n: usize, z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for j in 0..n {
        let zj = z[j];
        if zj == 0.0 {
            continue;
        }
        let col = &l[j * n..(j + 1) * n];
        for i in j..n {
            out[i] += col[i] * zj;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn spd(n: usize) -> DMatrix<f64> {
        let b = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13) % 11) as f64 / 11.0 - 0.4);
        &b * b.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn round_trip() {
        for n in [1, 2, 5, 40] {
            let a = spd(n);
            let mut buf = a.as_slice().to_vec();
            factor(&mut buf, n).unwrap();
            let l = DMatrix::from_fn(n, n, |i, j| if i >= j { buf[j * n + i] } else { 0.0 });
            let err = (&l * l.transpose() - &a).norm() / a.norm();
            assert!(err < 1e-12, "n={n}: {err}");
            let y: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let mut z = y.clone();
            forward_solve(&buf, n, &mut z);
            let back = lower_mul(&buf, n, &z);
            for (a, b) in back.iter().zip(&y) {
                assert!((a - b).abs() < 1e-10);
            }
            let ld = 2.0 * log_det_half(&buf, n);
            assert!((ld - a.determinant().ln()).abs() < 1e-9 * (1.0 + ld.abs()));
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = vec![1.0, -1.5, -1.5, 1.0];
        assert_eq!(factor(&mut a, 2), Err(NotPd { column: 1 }));
        let mut nan = vec![f64::NAN];
        assert!(factor(&mut nan, 1).is_err());
    }
}
