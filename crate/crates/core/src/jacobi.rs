//! One-sided Jacobi SVD kernel over complex scalars.
//!
//! Right-multiplies 2x2 unitary rotations until the columns of the working
//! copy are mutually orthogonal; column norms are then the singular values
//! and the accumulated rotations form the right factor. Real input stays
//! exactly real throughout (every rotation coefficient is real and imaginary
//! parts are exact zeros), so one code path serves both fields and the
//! singular values of `M` and `-M` agree bitwise.
//!
//! Accuracy is the point here, not speed: the matrices this crate meets are
//! tiny and Jacobi delivers high relative accuracy for them.

use num_complex::Complex64;

/// Relative off-diagonal threshold: columns p, q count as orthogonal once
/// |c_p^+ c_q| <= CONV_TOL * ||c_p|| * ||c_q||.
const CONV_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum JacobiError {
    /// Cyclic sweeps did not reach the orthogonality threshold.
    NoConvergence { sweeps: usize },
    /// A singular value left the f64 range after descaling.
    Overflow,
}

/// Thin SVD `A = U diag(sigma) V^+` with `r = min(m, n)`.
///
/// `u` is m x r and `v` is n x r, both row-major with orthonormal columns
/// (columns for vanished singular values are filled by a deterministic
/// orthonormal completion); `sigma` is nonincreasing.
pub(crate) struct ThinSvd {
    pub u: Vec<Complex64>,
    #[allow(dead_code)] // read by reconstruction tests
    pub sigma: Vec<f64>,
    pub v: Vec<Complex64>,
}

pub(crate) fn singular_values(
    data: &[Complex64],
    rows: usize,
    cols: usize,
) -> Result<Vec<f64>, JacobiError> {
    if rows >= cols {
        compute(data, rows, cols, false).map(|(sigma, _, _, _)| sigma)
    } else {
        let t = conj_transpose(data, rows, cols);
        compute(&t, cols, rows, false).map(|(sigma, _, _, _)| sigma)
    }
}

pub(crate) fn thin_svd(
    data: &[Complex64],
    rows: usize,
    cols: usize,
) -> Result<ThinSvd, JacobiError> {
    if rows >= cols {
        let (sigma, ucols, vcols, m) = compute(data, rows, cols, true)?;
        Ok(ThinSvd {
            u: cols_to_row_major(&ucols, m),
            sigma,
            v: cols_to_row_major(&vcols, cols),
        })
    } else {
        // A^+ = P diag(sigma) Q^+ gives A = Q diag(sigma) P^+.
        let t = conj_transpose(data, rows, cols);
        let (sigma, p, q, m) = compute(&t, cols, rows, true)?;
        debug_assert_eq!(m, cols);
        Ok(ThinSvd {
            u: cols_to_row_major(&q, rows),
            sigma,
            v: cols_to_row_major(&p, cols),
        })
    }
}

fn conj_transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c].conj();
        }
    }
    out
}

fn cols_to_row_major(columns: &[Vec<Complex64>], rows: usize) -> Vec<Complex64> {
    let n = columns.len();
    let mut out = vec![Complex64::new(0.0, 0.0); rows * n];
    for (j, col) in columns.iter().enumerate() {
        for i in 0..rows {
            out[i * n + j] = col[i];
        }
    }
    out
}

/// Core loop on a tall (m >= n) matrix given row-major. Returns
/// (sigma desc, thin U columns, V columns, m); factor vectors are empty
/// unless `factors` is set.
#[allow(clippy::type_complexity)]
fn compute(
    data: &[Complex64],
    m: usize,
    n: usize,
    factors: bool,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, usize), JacobiError> {
    debug_assert!(m >= n && data.len() == m * n);

    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| data[i * n + j]).collect())
        .collect();

    let mut vcols: Vec<Vec<Complex64>> = if factors {
        (0..n)
            .map(|j| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[j] = Complex64::new(1.0, 0.0);
                e
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut converged = n <= 1;
    if !converged {
        for _sweep in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    // Gram block of the (p, q) column pair, computed on
                    // scaled copies so squares stay in range. The rotation
                    // parameters below are scale-invariant.
                    let scale = pair_scale(&cols[p], &cols[q]);
                    if scale == 0.0 {
                        continue;
                    }
                    let mut alpha = 0.0f64;
                    let mut beta = 0.0f64;
                    let mut gamma = Complex64::new(0.0, 0.0);
                    for i in 0..m {
                        let xp = cols[p][i] / scale;
                        let xq = cols[q][i] / scale;
                        alpha += xp.norm_sqr();
                        beta += xq.norm_sqr();
                        gamma += xp.conj() * xq;
                    }
                    let abs_g = gamma.norm();
                    if abs_g <= CONV_TOL * alpha.sqrt() * beta.sqrt() {
                        continue;
                    }
                    rotated = true;

                    // Diagonalize the 2x2 Hermitian Gram block: factor out the
                    // phase of gamma, then apply the inner real rotation.
                    let phase_conj = (gamma / abs_g).conj();
                    let zeta = (beta - alpha) / (2.0 * abs_g);
                    let t = if zeta >= 0.0 {
                        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                    } else {
                        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;

                    for i in 0..m {
                        let xp = cols[p][i];
                        let w = cols[q][i] * phase_conj;
                        cols[p][i] = xp * c - w * s;
                        cols[q][i] = xp * s + w * c;
                    }
                    if factors {
                        for i in 0..n {
                            let xp = vcols[p][i];
                            let w = vcols[q][i] * phase_conj;
                            vcols[p][i] = xp * c - w * s;
                            vcols[q][i] = xp * s + w * c;
                        }
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(JacobiError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut sigma: Vec<f64> = cols.iter().map(|c| column_norm(c)).collect();
    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(JacobiError::Overflow);
    }

    // Sort nonincreasing; ties keep the lower original index first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        sigma[j]
            .partial_cmp(&sigma[i])
            .expect("singular values are finite")
            .then(i.cmp(&j))
    });
    sigma = order.iter().map(|&i| sigma[i]).collect();

    if !factors {
        return Ok((sigma, Vec::new(), Vec::new(), m));
    }

    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let zero_cut = sigma_max * 1e-250;

    let mut ucols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut valid = vec![false; n];
    for (slot, &src) in order.iter().enumerate() {
        let s = sigma[slot];
        if s > zero_cut && s > 0.0 {
            ucols.push(cols[src].iter().map(|&z| z / s).collect());
            valid[slot] = true;
        } else {
            ucols.push(vec![Complex64::new(0.0, 0.0); m]);
        }
    }
    for slot in 0..n {
        if !valid[slot] {
            let col = orthonormal_completion(&ucols, &valid, m);
            ucols[slot] = col;
            valid[slot] = true;
        }
    }

    let vcols_sorted: Vec<Vec<Complex64>> = order.iter().map(|&i| vcols[i].clone()).collect();
    Ok((sigma, ucols, vcols_sorted, m))
}

fn pair_scale(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .chain(b)
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(0.0f64, f64::max)
}

fn column_norm(col: &[Complex64]) -> f64 {
    let scale = col
        .iter()
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = col
        .iter()
        .map(|z| {
            let re = z.re / scale;
            let im = z.im / scale;
            re * re + im * im
        })
        .sum();
    scale * sum.sqrt()
}

/// First canonical basis vector with a large residual against the valid
/// columns, orthonormalized twice for accuracy. Deterministic; some candidate
/// always has residual norm >= 1/sqrt(m) while fewer than m columns are valid.
fn orthonormal_completion(
    ucols: &[Vec<Complex64>],
    valid: &[bool],
    m: usize,
) -> Vec<Complex64> {
    let threshold = 0.5 / (m as f64).sqrt();
    for cand in 0..m {
        let mut v = vec![Complex64::new(0.0, 0.0); m];
        v[cand] = Complex64::new(1.0, 0.0);
        for _pass in 0..2 {
            for (j, col) in ucols.iter().enumerate() {
                if !valid[j] {
                    continue;
                }
                let proj: Complex64 = col
                    .iter()
                    .zip(&v)
                    .map(|(&u, &x)| u.conj() * x)
                    .sum();
                for i in 0..m {
                    v[i] -= col[i] * proj;
                }
            }
        }
        let norm = column_norm(&v);
        if norm > threshold {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
    unreachable!("an orthonormal completion always exists for r < m");
}
