use num_complex::Complex64;

/// Compressed sparse row matrix over complex entries. The mass matrix is
/// stored in the same container with purely real values.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Builds from unordered triplets. Contributions are sorted by target
    /// index before summation, so assembly order never changes the result.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        for r in 0..self.n {
            let mut acc = Complex64::ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::ZERO; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        let mut d = vec![Complex64::ZERO; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[k] == r {
                    d[r] = self.values[k];
                }
            }
        }
        d
    }

    /// Max-norm deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut map = std::collections::HashMap::with_capacity(self.nnz());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                map.insert((r, self.col_idx[k]), self.values[k]);
            }
        }
        let mut defect = 0.0f64;
        for (&(r, c), &v) in &map {
            let w = map.get(&(c, r)).copied().unwrap_or(Complex64::ZERO);
            defect = defect.max((v - w.conj()).norm());
        }
        defect
    }

    /// Coordinate-format text dump for external cross-checking.
    pub fn dump_coordinate(&self) -> String {
        let mut out = String::new();
        out.push_str("fluxgap matrix 1\n");
        out.push_str(&format!("n {} nnz {}\n", self.n, self.nnz()));
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push_str(&format!("{} {} {:e} {:e}\n", r, self.col_idx[k], self.values[k].re, self.values[k].im));
            }
        }
        out
    }
}

pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

/// Solves `M z = r` by conjugate gradients with Jacobi scaling. The mass
/// matrix is well conditioned, so a few dozen iterations reach 1e-14.
pub fn mass_solve(m: &CsrMatrix, r: &[Complex64]) -> Vec<Complex64> {
    let n = m.n;
    let diag: Vec<f64> = m.diagonal().iter().map(|d| d.re.max(1e-300)).collect();
    let mut z = vec![Complex64::ZERO; n];
    let mut res = r.to_vec();
    let mut p: Vec<Complex64> = res.iter().zip(&diag).map(|(v, d)| v / d).collect();
    let mut zr: Complex64 = dot(&res, &p);
    let rhs_norm = dot(r, r).re.sqrt().max(1e-300);
    let mut ap = vec![Complex64::ZERO; n];
    for _ in 0..200 {
        m.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        let alpha = zr / pap;
        axpy(alpha, &p, &mut z);
        axpy(-alpha, &ap, &mut res);
        if dot(&res, &res).re.sqrt() / rhs_norm < 1e-14 {
            break;
        }
        let prec: Vec<Complex64> = res.iter().zip(&diag).map(|(v, d)| v / d).collect();
        let zr_new = dot(&res, &prec);
        let beta = zr_new / zr;
        zr = zr_new;
        for i in 0..n {
            p[i] = prec[i] + beta * p[i];
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_deterministically() {
        let t = vec![
            (1, 0, Complex64::new(2.0, 0.0)),
            (0, 0, Complex64::new(1.0, 0.0)),
            (1, 0, Complex64::new(3.0, 1.0)),
            (0, 1, Complex64::new(0.0, -1.0)),
        ];
        let m = CsrMatrix::from_triplets(2, t);
        assert_eq!(m.nnz(), 3);
        let y = m.matvec(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(y[1], Complex64::new(5.0, 1.0));
    }

    #[test]
    fn mass_solve_inverts() {
        // Tridiagonal SPD test matrix.
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, Complex64::new(4.0, 0.0)));
            if i + 1 < n {
                t.push((i, i + 1, Complex64::new(1.0, 0.0)));
                t.push((i + 1, i, Complex64::new(1.0, 0.0)));
            }
        }
        let m = CsrMatrix::from_triplets(n, t);
        let r: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64).cos())).collect();
        let z = mass_solve(&m, &r);
        let mz = m.matvec(&z);
        let err: f64 = mz.iter().zip(&r).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
