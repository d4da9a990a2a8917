//! Dense matrix exponential by scaling and squaring with a truncated Taylor
//! series.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Number of Taylor terms after `I`.
pub const TAYLOR_ORDER: usize = 18;
/// Scaling target: squarings continue until `‖A‖∞ / 2^k ≤ SCALE_TARGET`.
pub const SCALE_TARGET: f64 = 0.5;

/// Induced ∞-norm (max absolute row sum).
pub fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^A`. With `‖A/2^k‖ ≤ 0.5` the series tail after order 18 is below
/// `0.5^19/19! < 1e−22` relative, far under double rounding.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: a.ncols(),
        });
    }
    let norm = norm_inf(a);
    if !norm.is_finite() {
        return Err(Error::Convergence("matrix has non-finite entries".into()));
    }
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > SCALE_TARGET {
        scaled_norm /= 2.0;
        squarings += 1;
        if squarings > 1000 {
            return Err(Error::Convergence(
                "scaling did not reach the target norm".into(),
            ));
        }
    }
    let scaled = a / 2f64.powi(squarings as i32);
    let n = a.nrows();
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=TAYLOR_ORDER {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().any(|x| !x.is_finite()) {
        return Err(Error::Convergence("exponential overflowed".into()));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gives_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(expm(&z).unwrap(), DMatrix::identity(3, 3));
    }

    #[test]
    fn diagonal() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 3.5]));
        let e = expm(&d).unwrap();
        for (i, v) in [1.0f64, -2.0, 3.5].iter().enumerate() {
            assert!((e[(i, i)] - v.exp()).abs() <= 1e-13 * v.exp().max(1.0));
        }
    }

    #[test]
    fn rotation() {
        let t = 2.3f64;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((e - expected).abs().max() < 1e-13);
    }

    #[test]
    fn two_state_chain() {
        // Rate a from 0 to 1, b back; column-stochastic semigroup.
        let (a, b, t) = (3.0f64, 1.0f64, 0.7f64);
        let g = DMatrix::from_row_slice(2, 2, &[-a, b, a, -b]);
        let e = expm(&(g * t)).unwrap();
        let s = a + b;
        let p01 = a / s * (1.0 - (-s * t).exp());
        assert!((e[(1, 0)] - p01).abs() < 1e-14);
        assert!((e.column(0).sum() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nilpotent() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 5.0, 0.0, 0.0]);
        let e = expm(&a).unwrap();
        assert_eq!(e, DMatrix::from_row_slice(2, 2, &[1.0, 5.0, 0.0, 1.0]));
    }

    #[test]
    fn rejects_non_square() {
        assert!(expm(&DMatrix::<f64>::zeros(2, 3)).is_err());
    }
}
