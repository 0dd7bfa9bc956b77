//! Dense complex matrices and a shifted power-iteration eigensolver.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

pub const IDENTITY2: Mat2 = [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(1.0, 0.0)]];

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Domain(format!("{} entries do not form a {dim}×{dim} matrix", data.len())));
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = C64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[C64], out: &mut [C64]) {
        for (row, o) in self.data.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `Re <v|H|v>`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let mut hv = vec![ZERO; self.dim];
        self.mul_vec(v, &mut hv);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        worst
    }

    /// Largest absolute row sum; bounds the spectral radius.
    pub fn max_row_sum(&self) -> f64 {
        self.data.chunks_exact(self.dim.max(1)).map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `self += a ⊗ b`, where `self` has dimension `2 * b.dim()`.
    pub fn add_kron(&mut self, a: &Mat2, b: &ComplexMatrix) {
        let nb = b.dim;
        debug_assert_eq!(self.dim, 2 * nb);
        for (ar, a_row) in a.iter().enumerate() {
            for (ac, &a_val) in a_row.iter().enumerate() {
                if a_val == ZERO {
                    continue;
                }
                for br in 0..nb {
                    let dst = &mut self.data[(ar * nb + br) * self.dim + ac * nb..][..nb];
                    for (d, s) in dst.iter_mut().zip(&b.data[br * nb..(br + 1) * nb]) {
                        *d += a_val * s;
                    }
                }
            }
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            let dst = &mut out.data[r * n..(r + 1) * n];
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Residual tolerance relative to the shift.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-10, max_iterations: 10_000 }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub iterations: usize,
}

pub fn normalize(v: &mut [C64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

/// Result of [`refine_dominant`].
#[derive(Debug, Clone, Copy)]
pub struct Refinement {
    /// Rayleigh quotient of `sign * H` at the final vector.
    pub rayleigh: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Plain power steps before switching to repeated squaring.
const PLAIN_STEPS: usize = 256;

fn rayleigh_residual(h: &ComplexMatrix, sign: f64, v: &[C64], hv: &mut [C64]) -> (f64, f64) {
    h.mul_vec(v, hv);
    for z in hv.iter_mut() {
        *z *= sign;
    }
    let lambda: f64 = v.iter().zip(hv.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let residual = hv.iter().zip(v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt();
    (lambda, residual)
}

/// Power iteration on `M = sign * H + c I`, `c = 1 + max row sum`, starting
/// from `v` and updating it in place.
///
/// `M` is positive definite, so the Rayleigh quotient never decreases from
/// one step to the next. After [`PLAIN_STEPS`] plain steps the iteration
/// applies `M^2, M^4, M^8, …` instead, which resolves nearly degenerate top
/// eigenvalues in a few dozen steps. Iteration stops once the residual
/// `|sign*H v - λ v|` drops below `tol * c`, or after `max_iterations` steps
/// of either kind.
pub fn refine_dominant(h: &ComplexMatrix, sign: f64, v: &mut [C64], opts: EigenOptions) -> Refinement {
    let n = h.dim();
    let shift = 1.0 + h.max_row_sum();
    normalize(v);
    let mut hv = vec![ZERO; n];
    let mut power: Option<ComplexMatrix> = None;
    let mut it = 0;
    loop {
        it += 1;
        let (lambda, residual) = rayleigh_residual(h, sign, v, &mut hv);
        let converged = residual <= opts.tol * shift;
        if converged || it >= opts.max_iterations {
            return Refinement { rayleigh: lambda, residual, iterations: it, converged };
        }
        if it < PLAIN_STEPS {
            for (a, b) in v.iter_mut().zip(&hv) {
                *a = b + *a * shift;
            }
        } else {
            let m = match power.take() {
                None => {
                    let mut m = h.clone();
                    m.scale(sign);
                    for i in 0..n {
                        m.data[i * n + i] += shift;
                    }
                    m
                }
                Some(prev) => prev.matmul(&prev),
            };
            let mut m = m;
            let scale = m.max_row_sum();
            m.scale(1.0 / scale);
            let prev = v.to_vec();
            m.mul_vec(&prev, v);
            power = Some(m);
        }
        normalize(v);
    }
}

/// Largest algebraic eigenvalue of `sign * H` with its eigenvector.
///
/// On convergence some eigenvalue lies within `tol * c` of the returned value.
/// A warm start is blended with a fixed generic vector so that it cannot sit
/// exactly on a non-dominant eigenvector.
pub fn dominant_eigenpair(h: &ComplexMatrix, sign: f64, start: Option<&[C64]>, opts: EigenOptions) -> Result<EigenPair> {
    let mut v = generic_vector(h.dim());
    normalize(&mut v);
    if let Some(start) = start {
        for (a, b) in v.iter_mut().zip(start) {
            *a = b + *a * 1e-3;
        }
    }
    let r = refine_dominant(h, sign, &mut v, opts);
    if !r.converged {
        return Err(Error::NoConvergence { iterations: r.iterations, residual: r.residual });
    }
    Ok(EigenPair { value: r.rayleigh, vector: v, iterations: r.iterations })
}

/// Fixed start vector with no special alignment to any basis.
pub fn generic_vector(n: usize) -> Vec<C64> {
    (0..n).map(|i| C64::new(1.0 + 0.37 * ((i as f64) * 1.618).sin(), 0.29 * ((i as f64) * 0.731 + 0.4).cos())).collect()
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let deviation = h.hermiticity_defect();
    if deviation > 1e-12 * (1.0 + h.max_row_sum()) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Spectral radius of a Hermitian matrix.
pub fn max_abs_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    max_abs_eigenvalue_with(h, EigenOptions::default())
}

pub fn max_abs_eigenvalue_with(h: &ComplexMatrix, opts: EigenOptions) -> Result<f64> {
    check_hermitian(h)?;
    let top = dominant_eigenpair(h, 1.0, None, opts)?.value;
    let bottom = dominant_eigenpair(h, -1.0, None, opts)?.value;
    Ok(top.abs().max(bottom.abs()))
}
