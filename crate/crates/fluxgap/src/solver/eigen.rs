//! Block preconditioned eigensolver for the Hermitian pencil `K x = λ M x`.
//!
//! Locally optimal block iteration: each step performs a Rayleigh-Ritz solve
//! on the subspace spanned by the current block `X`, the Jacobi-preconditioned
//! residuals `W`, and the previous search directions `P`. The preconditioner
//! is the diagonal of `K + σM` with a trace-scaled shift σ, so the solver
//! handles the positive semidefinite integer-flux case (λ₁ = 0) without
//! special treatment. Deterministic for a fixed seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::sparse::{dot, mass_solve, CsrMatrix};
use super::SolverError;

pub struct EigenSolve {
    /// Ascending Ritz values (the requested `k` of them).
    pub eigenvalues: Vec<f64>,
    /// Relative residuals in the M⁻¹ norm.
    pub residuals: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
    pub iterations: usize,
}

pub fn solve_lowest(
    k_mat: &CsrMatrix,
    m_mat: &CsrMatrix,
    k: usize,
    tol: f64,
    seed: u64,
    max_iter: usize,
) -> Result<EigenSolve, SolverError> {
    if k == 0 || tol <= 0.0 {
        return Err(SolverError::InvalidConfig("need k >= 1 and tol > 0".into()));
    }
    let n = k_mat.n;
    if k > n {
        return Err(SolverError::InvalidConfig(format!("k = {k} exceeds dof = {n}")));
    }
    if n <= 64 {
        return dense_solve(k_mat, m_mat, k);
    }

    let block_size = (k + 2).max(4).min(n / 2);
    let diag_k = k_mat.diagonal();
    let diag_m = m_mat.diagonal();
    let trace_scale: f64 =
        diag_k.iter().zip(&diag_m).map(|(a, b)| a.re / b.re.max(1e-300)).sum::<f64>() / n as f64;
    let sigma = 1e-3 * trace_scale;
    let prec: Vec<f64> = diag_k
        .iter()
        .zip(&diag_m)
        .map(|(a, b)| (a.re + sigma * b.re).max(1e-300))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_block(n, block_size, &mut rng);
    m_orthonormalize(&mut x, m_mat);

    let mut p: Vec<Vec<Complex64>> = Vec::new();
    let mut theta = vec![0.0f64; block_size];
    let mut history = Vec::new();
    let mut iterations = 0;

    for it in 0..max_iter {
        iterations = it + 1;
        // Ritz step on the current block.
        let ax = apply_block(k_mat, &x);
        let mx = apply_block(m_mat, &x);
        let t = hermitize(gram(&x, &ax));
        let (vals, y) = hermitian_eig_sorted(&t);
        let bs = x.len();
        x = lincomb(&x, &y, 0..bs);
        let ax = lincomb(&ax, &y, 0..bs);
        let mx = lincomb(&mx, &y, 0..bs);
        theta[..bs].copy_from_slice(&vals[..bs]);

        // Residuals (diagonal-mass weighted norm for the loop test).
        let mut residual_block = Vec::with_capacity(bs);
        let mut max_rel: f64 = 0.0;
        for j in 0..bs {
            let mut r = ax[j].clone();
            for i in 0..n {
                r[i] -= Complex64::new(theta[j], 0.0) * mx[j][i];
            }
            if j < k {
                let norm: f64 = r
                    .iter()
                    .zip(&diag_m)
                    .map(|(v, d)| v.norm_sqr() / d.re.max(1e-300))
                    .sum::<f64>()
                    .sqrt();
                let rel = norm / theta[j].abs().max(sigma);
                max_rel = max_rel.max(rel);
            }
            residual_block.push(r);
        }
        history.push(max_rel);
        if max_rel <= 0.5 * tol {
            // Verify with the honest M⁻¹ norm before stopping.
            let honest = honest_residuals(m_mat, &residual_block[..k], &theta[..k], sigma);
            if honest.iter().all(|&r| r <= tol) {
                return finish(x, theta, honest, iterations, k, m_mat);
            }
        }

        // Preconditioned residuals.
        let mut w: Vec<Vec<Complex64>> = residual_block
            .into_iter()
            .map(|mut r| {
                for i in 0..n {
                    r[i] /= prec[i];
                }
                r
            })
            .collect();
        m_orthonormalize(&mut w, m_mat);

        // Subspace [X, W, P] Rayleigh-Ritz.
        let mut s: Vec<Vec<Complex64>> = Vec::with_capacity(x.len() + w.len() + p.len());
        s.extend(x.iter().cloned());
        s.append(&mut w);
        s.extend(p.iter().cloned());
        m_orthonormalize(&mut s, m_mat);
        if s.len() < bs {
            // Subspace collapsed; restart the extra directions randomly.
            let mut extra = random_block(n, bs - s.len(), &mut rng);
            s.append(&mut extra);
            m_orthonormalize(&mut s, m_mat);
        }
        let as_block = apply_block(k_mat, &s);
        let t = hermitize(gram(&s, &as_block));
        let (_, z) = hermitian_eig_sorted(&t);
        let take = bs.min(s.len());
        let x_new = lincomb(&s, &z, 0..take);
        // Next search directions: the part of the new block that lives
        // outside the old X (rows bs.. of the Ritz coordinates).
        p = lincomb_rows_from(&s, &z, bs, 0..take);
        drop_tiny_columns(&mut p, m_mat);
        x = x_new;
    }

    Err(SolverError::NonConvergence { iterations, history })
}

fn finish(
    x: Vec<Vec<Complex64>>,
    theta: Vec<f64>,
    residuals: Vec<f64>,
    iterations: usize,
    k: usize,
    _m: &CsrMatrix,
) -> Result<EigenSolve, SolverError> {
    let eigenvalues: Vec<f64> = theta[..k].to_vec();
    if eigenvalues[0] < -1e-9 {
        return Err(SolverError::NotPositiveSemidefinite(eigenvalues[0]));
    }
    Ok(EigenSolve { eigenvalues, residuals, eigenvectors: x.into_iter().take(k).collect(), iterations })
}

fn honest_residuals(m_mat: &CsrMatrix, rs: &[Vec<Complex64>], theta: &[f64], sigma: f64) -> Vec<f64> {
    rs.iter()
        .zip(theta)
        .map(|(r, &th)| {
            let z = mass_solve(m_mat, r);
            let norm = dot(r, &z).re.max(0.0).sqrt();
            norm / th.abs().max(sigma)
        })
        .collect()
}

fn dense_solve(k_mat: &CsrMatrix, m_mat: &CsrMatrix, k: usize) -> Result<EigenSolve, SolverError> {
    let n = k_mat.n;
    let to_dense = |m: &CsrMatrix| {
        let mut d = DMatrix::<Complex64>::zeros(n, n);
        for r in 0..n {
            for idx in m.row_ptr[r]..m.row_ptr[r + 1] {
                d[(r, m.col_idx[idx])] = m.values[idx];
            }
        }
        d
    };
    let kd = to_dense(k_mat);
    let md = to_dense(m_mat);
    let chol = md
        .clone()
        .cholesky()
        .ok_or_else(|| SolverError::InvalidConfig("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| SolverError::InvalidConfig("mass factor is singular".into()))?;
    let mut c = &linv * &kd * linv.adjoint();
    c = (c.clone() + c.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, vecs) = hermitian_eig_sorted(&c);
    let back = linv.adjoint();
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for j in 0..k {
        let y = vecs.column(j).into_owned();
        let xv = &back * &y;
        let x: Vec<Complex64> = xv.iter().copied().collect();
        let kx = k_mat.matvec(&x);
        let mx = m_mat.matvec(&x);
        let r: Vec<Complex64> = kx
            .iter()
            .zip(&mx)
            .map(|(a, b)| a - Complex64::new(vals[j], 0.0) * b)
            .collect();
        let z = mass_solve(m_mat, &r);
        let xm = dot(&x, &mx).re.sqrt().max(1e-300);
        residuals.push(dot(&r, &z).re.max(0.0).sqrt() / (vals[j].abs().max(1.0) * xm));
        eigenvectors.push(x);
    }
    if vals[0] < -1e-9 {
        return Err(SolverError::NotPositiveSemidefinite(vals[0]));
    }
    Ok(EigenSolve { eigenvalues: vals[..k].to_vec(), residuals, eigenvectors, iterations: 1 })
}

pub fn random_block(n: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut uniform = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    (0..cols)
        .map(|_| (0..n).map(|_| Complex64::new(uniform(), uniform())).collect())
        .collect()
}

fn apply_block(mat: &CsrMatrix, block: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    block.iter().map(|col| mat.matvec(col)).collect()
}

/// Gram matrix `A^H B` of two blocks of equal length columns.
fn gram(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let mut g = DMatrix::<Complex64>::zeros(a.len(), b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            g[(i, j)] = dot(ai, bj);
        }
    }
    g
}

fn hermitize(mut t: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = t.adjoint();
    t += adj;
    t * Complex64::new(0.5, 0.0)
}

/// Columns `cols` of `S * Y`.
fn lincomb(s: &[Vec<Complex64>], y: &DMatrix<Complex64>, cols: std::ops::Range<usize>) -> Vec<Vec<Complex64>> {
    let n = s[0].len();
    cols.map(|c| {
        let mut out = vec![Complex64::ZERO; n];
        for (r, sr) in s.iter().enumerate() {
            let alpha = y[(r, c)];
            if alpha != Complex64::ZERO {
                for i in 0..n {
                    out[i] += alpha * sr[i];
                }
            }
        }
        out
    })
    .collect()
}

/// Columns `cols` of `S * Y` using only rows `from..` of `Y`.
fn lincomb_rows_from(
    s: &[Vec<Complex64>],
    y: &DMatrix<Complex64>,
    from: usize,
    cols: std::ops::Range<usize>,
) -> Vec<Vec<Complex64>> {
    let n = s[0].len();
    cols.map(|c| {
        let mut out = vec![Complex64::ZERO; n];
        for r in from..s.len() {
            let alpha = y[(r, c)];
            if alpha != Complex64::ZERO {
                for i in 0..n {
                    out[i] += alpha * s[r][i];
                }
            }
        }
        out
    })
    .collect()
}

/// M-orthonormalizes a block in place (SVQB), dropping numerically null
/// columns. Two passes keep the loss of orthogonality at machine level.
fn m_orthonormalize(block: &mut Vec<Vec<Complex64>>, m: &CsrMatrix) {
    for _ in 0..2 {
        if block.is_empty() {
            return;
        }
        let mb = apply_block(m, block);
        let g = hermitize(gram(block, &mb));
        let (vals, vecs) = hermitian_eig_sorted(&g);
        let smax = vals.last().copied().unwrap_or(0.0).max(0.0);
        if smax <= 0.0 {
            block.clear();
            return;
        }
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 1e-12 * smax).collect();
        let n = block[0].len();
        let mut out = Vec::with_capacity(keep.len());
        for &c in &keep {
            let scale = 1.0 / vals[c].sqrt();
            let mut col = vec![Complex64::ZERO; n];
            for (r, br) in block.iter().enumerate() {
                let alpha = vecs[(r, c)] * scale;
                if alpha != Complex64::ZERO {
                    for i in 0..n {
                        col[i] += alpha * br[i];
                    }
                }
            }
            out.push(col);
        }
        *block = out;
    }
}

fn drop_tiny_columns(block: &mut Vec<Vec<Complex64>>, m: &CsrMatrix) {
    block.retain(|col| {
        let mc = m.matvec(col);
        dot(col, &mc).re.sqrt() > 1e-14
    });
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
fn hermitian_eig_sorted(t: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let se = nalgebra::SymmetricEigen::new(t.clone());
    let m = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<Complex64>::zeros(m, m);
    for (new_c, &old_c) in order.iter().enumerate() {
        vecs.set_column(new_c, &se.eigenvectors.column(old_c));
    }
    (vals, vecs)
}
