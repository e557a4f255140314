//! Independent reference models.
//!
//! [`RotationModel`] is the closed-form two-dimensional picture of one search
//! step. [`dense_operator_oracle`] builds every operator as an explicit
//! matrix, with no reuse of the structured kernels; it is deliberately naive
//! and only meant for small registers.

use num_complex::Complex64;

use crate::database::FunctionTable;
use crate::error::{Error, Result};

/// Widest system (control plus target bits) the dense oracle will build.
pub const DENSE_MAX_TOTAL_BITS: u32 = 10;

/// Grover angle: `asin(sqrt(g / 2^lc))`.
pub fn beta_of(lc: u32, g: usize) -> Result<f64> {
    let domain = 1u64 << lc;
    if g == 0 || g as u64 > domain {
        return Err(Error::Domain(format!(
            "multiplicity {g} outside 1..={domain}"
        )));
    }
    Ok((g as f64 / domain as f64).sqrt().asin())
}

/// One search step restricted to the solution / non-solution plane:
/// `-[[cos 2b, sin 2b], [-sin 2b, cos 2b]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationModel {
    pub beta: f64,
    pub step_matrix: [[f64; 2]; 2],
}

impl RotationModel {
    pub fn new(beta: f64) -> Self {
        let (s, c) = (2.0 * beta).sin_cos();
        Self {
            beta,
            step_matrix: [[-c, -s], [s, -c]],
        }
    }

    /// Coordinates `(sin b, cos b)` of the prepared state.
    pub fn initial(&self) -> (f64, f64) {
        self.beta.sin_cos()
    }

    pub fn step(&self, (a1, a2): (f64, f64)) -> (f64, f64) {
        let m = &self.step_matrix;
        (m[0][0] * a1 + m[0][1] * a2, m[1][0] * a1 + m[1][1] * a2)
    }

    /// Closed form of `k` steps from the prepared state,
    /// `(-1)^k (sin((2k+1)b), cos((2k+1)b))`.
    pub fn after(&self, k: usize) -> (f64, f64) {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let (s, c) = ((2 * k + 1) as f64 * self.beta).sin_cos();
        (sign * s, sign * c)
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.step_matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

pub fn rotation_step(coords: (f64, f64), beta: f64) -> (f64, f64) {
    RotationModel::new(beta).step(coords)
}

/// Solution weight after `n` steps: `sin^2((2n+1) beta)`.
pub fn predicted_success(lc: u32, g: usize, n: usize) -> Result<f64> {
    let beta = beta_of(lc, g)?;
    Ok(((2 * n + 1) as f64 * beta).sin().powi(2))
}

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: impl IntoIterator<Item = Complex64>) -> Self {
        let entries: Vec<Complex64> = entries.into_iter().collect();
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kron(&self, other: &Self) -> Self {
        let n = self.dim * other.dim;
        let mut m = Self::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        m[(i * other.dim + k, j * other.dim + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Plain triple loop. Zero entries of `self` are skipped, which keeps
    /// products of the sparse factors cheap.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|M M^dagger - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.matmul(&self.adjoint()).max_abs_diff(&Self::identity(self.dim))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Explicit matrices for every operator of one search step.
#[derive(Debug, Clone)]
pub struct DenseOperators {
    pub hadamard_control: DenseMatrix,
    pub uf: DenseMatrix,
    pub phase_control_zero: DenseMatrix,
    pub phase_target: DenseMatrix,
    /// `U_f H S_c(0) H U_f S_t(f0)`.
    pub grover: DenseMatrix,
}

/// Builds the operator matrices for `table` and the marked value `f0`.
pub fn dense_operator_oracle(table: &FunctionTable, f0: u64) -> Result<DenseOperators> {
    let (lc, lt) = (table.control_bits(), table.target_bits());
    if lc + lt > DENSE_MAX_TOTAL_BITS {
        return Err(Error::Resource(format!(
            "dense oracle needs {} qubits, cap is {DENSE_MAX_TOTAL_BITS}",
            lc + lt
        )));
    }
    let target_dim = 1usize << lt;
    if f0 >= target_dim as u64 {
        return Err(Error::Domain(format!("target value {f0} outside 0..{target_dim}")));
    }
    let dim = 1usize << (lc + lt);
    let one = Complex64::new(1.0, 0.0);
    let sign = |neg: bool| if neg { -one } else { one };

    let h1 = {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut h = DenseMatrix::zeros(2);
        h[(0, 0)] = Complex64::new(r, 0.0);
        h[(0, 1)] = Complex64::new(r, 0.0);
        h[(1, 0)] = Complex64::new(r, 0.0);
        h[(1, 1)] = Complex64::new(-r, 0.0);
        h
    };
    let mut h_control = DenseMatrix::identity(1);
    for _ in 0..lc {
        h_control = h_control.kron(&h1);
    }
    let hadamard_control = h_control.kron(&DenseMatrix::identity(target_dim));

    let mut uf = DenseMatrix::zeros(dim);
    for i in 0..1usize << lc {
        let f = table.values()[i] as usize;
        for k in 0..target_dim {
            uf[(i * target_dim + (k ^ f), i * target_dim + k)] = one;
        }
    }

    let phase_control_zero = DenseMatrix::diagonal((0..dim).map(|j| sign(j / target_dim == 0)));
    let phase_target =
        DenseMatrix::diagonal((0..dim).map(|j| sign(j % target_dim == f0 as usize)));

    let grover = [&uf, &hadamard_control, &phase_control_zero, &hadamard_control, &uf]
        .iter()
        .rev()
        .fold(phase_target.clone(), |acc, m| m.matmul(&acc));

    Ok(DenseOperators {
        hadamard_control,
        uf,
        phase_control_zero,
        phase_target,
        grover,
    })
}
