//! Singular spectra and the prefix-sum functionals every bound is built from.
//!
//! A [`SingularSpectrum`] holds the nonincreasing singular values of one
//! matrix; [`ky_fan_sum`](SingularSpectrum::ky_fan_sum) and
//! [`tail_sum`](SingularSpectrum::tail_sum) give the sums of the k largest
//! and k smallest values. [`AbsDiffSpectrum`] holds |σ_i(A) − σ_i(B)| in both
//! original and nonincreasing order.
//!
//! Values are reported exactly as computed; nothing is clamped to zero, so
//! near-violations downstream are decided by tolerances, not by rounding
//! policy here.

use thiserror::Error;

use crate::jacobi::{self, JacobiError};
use crate::matrix::MatrixF;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("SVD did not converge for a {rows}x{cols} matrix after {sweeps} sweeps")]
    Convergence {
        rows: usize,
        cols: usize,
        sweeps: usize,
    },
    #[error("singular values overflowed the f64 range for a {rows}x{cols} matrix")]
    Overflow { rows: usize, cols: usize },
    #[error("index {k} out of range 1..={len}")]
    IndexOutOfRange { k: usize, len: usize },
    #[error("spectrum lengths differ: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("spectrum inconsistent with Frobenius norm: sum of squares {sum_sq}, norm squared {fro_sq}")]
    Inconsistent { sum_sq: f64, fro_sq: f64 },
}

/// Nonincreasing singular values of one matrix, length `min(rows, cols)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    source_shape: (usize, usize),
}

/// Compute the singular values of `m`, sorted nonincreasing.
///
/// The result is checked against the Frobenius identity
/// Σσ_i² = ‖M‖_F² (1e-10 relative) before it is returned; a failed check or
/// a non-converged kernel is reported as an error, never truncated away.
pub fn singular_values(m: &MatrixF) -> Result<SingularSpectrum, SpectrumError> {
    let values = jacobi::singular_values(m.data(), m.rows(), m.cols()).map_err(|e| match e {
        JacobiError::NoConvergence { sweeps } => SpectrumError::Convergence {
            rows: m.rows(),
            cols: m.cols(),
            sweeps,
        },
        JacobiError::Overflow => SpectrumError::Overflow {
            rows: m.rows(),
            cols: m.cols(),
        },
    })?;
    let spectrum = SingularSpectrum {
        values,
        source_shape: (m.rows(), m.cols()),
    };
    spectrum.check_frobenius(m)?;
    Ok(spectrum)
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source_shape(&self) -> (usize, usize) {
        self.source_shape
    }

    /// σ_k for 1-based k.
    pub fn value_at(&self, k: usize) -> Result<f64, SpectrumError> {
        self.check_k(k)?;
        Ok(self.values[k - 1])
    }

    /// Ky Fan k-sum: σ_1 + ... + σ_k (1-based k).
    pub fn ky_fan_sum(&self, k: usize) -> Result<f64, SpectrumError> {
        self.check_k(k)?;
        Ok(self.values[..k].iter().sum())
    }

    /// Sum of the k smallest values: σ_{n-k+1} + ... + σ_n (1-based k),
    /// added from the smallest up.
    pub fn tail_sum(&self, k: usize) -> Result<f64, SpectrumError> {
        self.check_k(k)?;
        Ok(self.values[self.values.len() - k..].iter().rev().sum())
    }

    fn check_k(&self, k: usize) -> Result<(), SpectrumError> {
        if k == 0 || k > self.values.len() {
            return Err(SpectrumError::IndexOutOfRange {
                k,
                len: self.values.len(),
            });
        }
        Ok(())
    }

    fn check_frobenius(&self, m: &MatrixF) -> Result<(), SpectrumError> {
        // Both sums are formed at a common scale so the comparison stays
        // meaningful for extreme magnitudes.
        let scale = m
            .data()
            .iter()
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            return if self.values.iter().all(|&s| s == 0.0) {
                Ok(())
            } else {
                Err(SpectrumError::Inconsistent {
                    sum_sq: self.values.iter().map(|s| s * s).sum(),
                    fro_sq: 0.0,
                })
            };
        }
        let fro_sq: f64 = m
            .data()
            .iter()
            .map(|z| {
                let re = z.re / scale;
                let im = z.im / scale;
                re * re + im * im
            })
            .sum();
        let sum_sq: f64 = self
            .values
            .iter()
            .map(|&s| {
                let x = s / scale;
                x * x
            })
            .sum();
        if (sum_sq - fro_sq).abs() <= 1e-10 * fro_sq {
            Ok(())
        } else {
            Err(SpectrumError::Inconsistent { sum_sq, fro_sq })
        }
    }
}

/// |σ_i(A) − σ_i(B)| in original index order and in nonincreasing order.
///
/// The σ_i are each nonincreasing but their differences need not be; the
/// sorted view is what the tightened prefix-sum bound consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsDiffSpectrum {
    raw: Vec<f64>,
    sorted: Vec<f64>,
}

/// Entrywise |σ_i(A) − σ_i(B)| of two equal-length spectra.
pub fn abs_diff_spectrum(
    a: &SingularSpectrum,
    b: &SingularSpectrum,
) -> Result<AbsDiffSpectrum, SpectrumError> {
    if a.len() != b.len() {
        return Err(SpectrumError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let raw: Vec<f64> = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .collect();
    Ok(AbsDiffSpectrum {
        sorted: sort_desc_stable(&raw),
        raw,
    })
}

/// Stable nonincreasing sort: equal values keep their original index order.
pub(crate) fn sort_desc_stable(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| {
        values[j]
            .partial_cmp(&values[i])
            .expect("finite values")
            .then(i.cmp(&j))
    });
    idx.into_iter().map(|i| values[i]).collect()
}

impl AbsDiffSpectrum {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// s_i in original index order.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// s_[i]: the same multiset, nonincreasing.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Σ_{i≤k} s_[i] (1-based k).
    pub fn sorted_prefix_sum(&self, k: usize) -> Result<f64, SpectrumError> {
        if k == 0 || k > self.sorted.len() {
            return Err(SpectrumError::IndexOutOfRange {
                k,
                len: self.sorted.len(),
            });
        }
        Ok(self.sorted[..k].iter().sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{Field, MatrixF};
    use num_complex::Complex64;

    fn spectrum_of(m: &MatrixF) -> Vec<f64> {
        singular_values(m).unwrap().values().to_vec()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn diag_negative_entry() {
        let m = MatrixF::diag_real(&[-1.0, 0.0]).unwrap();
        assert_eq!(spectrum_of(&m), vec![1.0, 0.0]);
    }

    #[test]
    fn identity_three() {
        let m = MatrixF::diag_real(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(spectrum_of(&m), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn ones_matrix_rank_one() {
        // A^T A = [[2,2],[2,2]] has eigenvalues 4 and 0, so σ = (2, 0).
        let m = MatrixF::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_close(&spectrum_of(&m), &[2.0, 0.0], 1e-14);
    }

    #[test]
    fn complex_three_by_three_reference_values() {
        // Reference singular values computed with an independent LAPACK
        // implementation when this fixture was created.
        let m = MatrixF::from_complex(
            3,
            3,
            vec![
                Complex64::new(1.0, 2.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, -2.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(4.0, -3.0),
                Complex64::new(0.0, 5.0),
                Complex64::new(-2.0, 1.0),
            ],
        )
        .unwrap();
        assert_close(
            &spectrum_of(&m),
            &[8.122827933221407, 3.423050806016773, 1.5173626945150387],
            1e-12,
        );
        assert!((m.frobenius_norm() - 80f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn complex_row_vector() {
        let m = MatrixF::from_complex(
            1,
            2,
            vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        assert_close(&spectrum_of(&m), &[2f64.sqrt()], 1e-15);
    }

    #[test]
    fn ky_fan_and_tail_examples() {
        let s = SingularSpectrum {
            values: vec![1.0, 0.0],
            source_shape: (2, 2),
        };
        assert_eq!(s.ky_fan_sum(1).unwrap(), 1.0);
        assert_eq!(s.tail_sum(1).unwrap(), 0.0);
        assert_eq!(s.tail_sum(2).unwrap(), 1.0);

        let s = SingularSpectrum {
            values: vec![5.0, 3.0, 2.0],
            source_shape: (3, 3),
        };
        assert_eq!(s.ky_fan_sum(2).unwrap(), 8.0);
        assert_eq!(s.tail_sum(2).unwrap(), 5.0);

        let s = SingularSpectrum {
            values: vec![1.0, 1.0, 1.0],
            source_shape: (3, 3),
        };
        assert_eq!(s.ky_fan_sum(3).unwrap(), 3.0);

        assert!(matches!(
            s.ky_fan_sum(0),
            Err(SpectrumError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            s.tail_sum(4),
            Err(SpectrumError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn abs_diff_examples() {
        let a = SingularSpectrum {
            values: vec![1.0, 0.0],
            source_shape: (2, 2),
        };
        let same = abs_diff_spectrum(&a, &a).unwrap();
        assert_eq!(same.raw(), &[0.0, 0.0]);
        assert_eq!(same.sorted(), &[0.0, 0.0]);

        let b = SingularSpectrum {
            values: vec![5.0, 0.0],
            source_shape: (2, 2),
        };
        let d = abs_diff_spectrum(&a, &b).unwrap();
        assert_eq!(d.raw(), &[4.0, 0.0]);
        assert_eq!(d.sorted(), &[4.0, 0.0]);

        let c = SingularSpectrum {
            values: vec![1.0],
            source_shape: (1, 1),
        };
        assert!(matches!(
            abs_diff_spectrum(&a, &c),
            Err(SpectrumError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn sort_is_stable_on_ties() {
        assert_eq!(sort_desc_stable(&[1.0, 3.0, 1.0, 3.0]), vec![3.0, 3.0, 1.0, 1.0]);
        assert_eq!(sort_desc_stable(&[]), Vec::<f64>::new());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
            prop::collection::vec(-10.0..10.0f64, len)
        }

        prop_compose! {
            fn arb_matrix()(rows in 1usize..6, cols in 1usize..6, complex in any::<bool>())
                          (entries in arb_entries(rows * cols * 2),
                           rows in Just(rows), cols in Just(cols), complex in Just(complex))
                          -> MatrixF {
                let field = if complex { Field::Complex } else { Field::Real };
                let data = entries
                    .chunks(2)
                    .map(|p| Complex64::new(p[0], if complex { p[1] } else { 0.0 }))
                    .collect();
                MatrixF::new(rows, cols, field, data).unwrap()
            }
        }

        proptest! {
            #[test]
            fn negation_preserves_spectrum(m in arb_matrix()) {
                let s = spectrum_of(&m);
                let sn = spectrum_of(&m.negated());
                for (x, y) in s.iter().zip(&sn) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }

            #[test]
            fn conj_transpose_preserves_spectrum(m in arb_matrix()) {
                let s = spectrum_of(&m);
                let st = spectrum_of(&m.conj_transpose());
                for (x, y) in s.iter().zip(&st) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }

            #[test]
            fn spectrum_is_sorted_and_nonnegative(m in arb_matrix()) {
                let s = spectrum_of(&m);
                for w in s.windows(2) {
                    prop_assert!(w[0] >= w[1]);
                }
                prop_assert!(s.iter().all(|&x| x >= 0.0));
            }

            #[test]
            fn ky_fan_monotone_and_tail_complement(m in arb_matrix()) {
                let s = singular_values(&m).unwrap();
                let len = s.len();
                let total = s.ky_fan_sum(len).unwrap();
                let mut prev = 0.0;
                for k in 1..=len {
                    let kf = s.ky_fan_sum(k).unwrap();
                    prop_assert!(kf >= prev - 1e-12);
                    prev = kf;
                    if k < len {
                        let split = s.tail_sum(len - k).unwrap() + s.ky_fan_sum(k).unwrap();
                        prop_assert!((split - total).abs() <= 1e-10 * (1.0 + total));
                    }
                }
            }

            #[test]
            fn frobenius_identity(m in arb_matrix()) {
                let s = singular_values(&m).unwrap();
                let sum_sq: f64 = s.values().iter().map(|x| x * x).sum();
                let fro_sq = m.frobenius_norm().powi(2);
                prop_assert!((sum_sq - fro_sq).abs() <= 1e-10 * (1.0 + fro_sq));
            }
        }
    }
}
