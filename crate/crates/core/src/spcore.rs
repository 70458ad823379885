//! Dense matrices, singular spectra and Schatten quasi-norms.
//!
//! Everything here is a pure function of immutable inputs. Matrices are
//! stored densely in row-major order with complex entries; real matrices
//! are detected and routed through a real SVD.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{check_exponent, Error, Result};

/// Singular values below this fraction of the largest one are treated as
/// exact zeros when forming power sums.
pub const SPECTRUM_CLAMP: f64 = 1e-12;

/// A finite rectangular matrix with complex entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for j in 0..self.rows.min(8) {
            let row: Vec<String> = (0..self.cols.min(8))
                .map(|k| {
                    let z = self.get(j, k);
                    if z.im == 0.0 {
                        format!("{}", z.re)
                    } else {
                        format!("{z}")
                    }
                })
                .collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    /// Builds a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                got: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: i / cols,
                col: i % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for k in 0..cols {
                data.push(f(j, k));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(1.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |j, k| Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn adjoint(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for k in 0..self.cols {
            for j in 0..self.rows {
                data.push(self.get(j, k).conj());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Plain triple-loop product; meant for small test matrices.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * other.cols];
        for j in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(j, l);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let out = &mut data[j * other.cols..(j + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(&other.data[l * other.cols..(l + 1) * other.cols]) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Embeds the matrix in the top-left corner of a `rows x cols` zero matrix.
    pub fn pad_to(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows < self.rows || cols < self.cols {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: (rows, cols),
            });
        }
        Self::from_fn(rows, cols, |j, k| {
            if j < self.rows && k < self.cols {
                self.get(j, k)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            })
        }
    }
}

/// Singular values of a matrix, sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    /// Wraps precomputed singular values. Negative or non-finite values are
    /// rejected; the list is sorted.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if values.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Domain("singular values must be finite and non-negative".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    /// `(sum s_j^p)^(1/p)` with values below `SPECTRUM_CLAMP * s_max` dropped.
    pub fn quasinorm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let top = self.largest();
        if top == 0.0 {
            return Ok(0.0);
        }
        let floor = SPECTRUM_CLAMP * top;
        let sum: f64 = self
            .values
            .iter()
            .take_while(|&&s| s > floor)
            .map(|&s| (s / top).powf(p))
            .sum();
        Ok(top * sum.powf(1.0 / p))
    }
}

/// Full singular spectrum of `a`.
pub fn singular_spectrum(a: &DenseMatrix) -> Result<SingularSpectrum> {
    let values: Vec<f64> = if a.is_real() {
        let re: Vec<f64> = a.data.iter().map(|z| z.re).collect();
        DMatrix::from_row_slice(a.rows, a.cols, &re)
            .singular_values()
            .iter()
            .copied()
            .collect()
    } else {
        DMatrix::from_row_slice(a.rows, a.cols, &a.data)
            .singular_values()
            .iter()
            .copied()
            .collect()
    };
    // Round-off can leave tiny negative values on exactly singular input.
    SingularSpectrum::from_values(values.into_iter().map(|s| s.max(0.0)).collect())
}

/// Schatten `p`-quasi-norm `(sum s_j^p)^(1/p)`.
pub fn schatten_quasinorm(a: &DenseMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    singular_spectrum(a)?.quasinorm(p)
}

/// Entrywise (Schur-Hadamard) product.
pub fn schur_product(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    a.check_same_dims(b)?;
    Ok(DenseMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    })
}

/// Reverses the column order: column `k` moves to `cols - 1 - k`.
pub fn column_reverse(a: &DenseMatrix) -> DenseMatrix {
    let mut data = Vec::with_capacity(a.data.len());
    for row in a.data.chunks(a.cols) {
        data.extend(row.iter().rev());
    }
    DenseMatrix {
        rows: a.rows,
        cols: a.cols,
        data,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaskKind {
    /// Upper triangle, `j <= k`.
    Chi,
    /// Anti-triangle, `j + k < n`.
    Delta,
}

/// A 0/1 mask matrix of size `n x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskMatrix {
    kind: MaskKind,
    n: usize,
    matrix: DenseMatrix,
}

impl MaskMatrix {
    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    /// Whether entry `(j, k)` is one. Indices outside `n x n` are zero for
    /// both kinds (the infinite `Delta_n` has no support there).
    pub fn contains(&self, j: usize, k: usize) -> bool {
        mask_entry(self.kind, self.n, j, k)
    }
}

fn mask_entry(kind: MaskKind, n: usize, j: usize, k: usize) -> bool {
    match kind {
        MaskKind::Chi => j < n && k < n && j <= k,
        MaskKind::Delta => j + k < n,
    }
}

/// Builds the `n x n` mask of the given kind (0-indexed).
pub fn mask(kind: MaskKind, n: usize) -> Result<MaskMatrix> {
    if n == 0 {
        return Err(Error::Domain("mask size must be at least 1".into()));
    }
    let matrix = DenseMatrix::from_fn(n, n, |j, k| {
        Complex64::new(if mask_entry(kind, n, j, k) { 1.0 } else { 0.0 }, 0.0)
    })?;
    Ok(MaskMatrix { kind, n, matrix })
}

/// `Delta_n` restricted to a `size x size` window, for sizes larger than `n`.
pub fn delta_window(n: usize, size: usize) -> Result<DenseMatrix> {
    DenseMatrix::from_fn(size, size, |j, k| {
        Complex64::new(if j + k < n { 1.0 } else { 0.0 }, 0.0)
    })
}

/// `||M * B||_{S_p} / ||B||_{S_p}`, one ratio inside the multiplier norm's
/// supremum and hence a lower bound for `||M||_{M_p}`.
pub fn apply_multiplier_witness(m: &DenseMatrix, b: &DenseMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    m.check_same_dims(b)?;
    let denom = schatten_quasinorm(b, p)?;
    if denom == 0.0 {
        return Err(Error::DegenerateWitness);
    }
    Ok(schatten_quasinorm(&schur_product(m, b)?, p)? / denom)
}

/// Entry distributions for [`random_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    GaussianReal,
    GaussianComplex,
    Sign,
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-real" => Ok(Self::GaussianReal),
            "gaussian-complex" => Ok(Self::GaussianComplex),
            "sign" => Ok(Self::Sign),
            other => Err(Error::UnknownDistribution(other.to_string())),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GaussianReal => "gaussian-real",
            Self::GaussianComplex => "gaussian-complex",
            Self::Sign => "sign",
        })
    }
}

/// Deterministic pseudo-random matrix (ChaCha20 stream keyed by `seed`).
pub fn random_matrix(rows: usize, cols: usize, seed: u64, distribution: Distribution) -> Result<DenseMatrix> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| sample_entry(&mut rng, distribution))
}

pub(crate) fn sample_entry(rng: &mut impl Rng, distribution: Distribution) -> Complex64 {
    match distribution {
        Distribution::GaussianReal => Complex64::new(rng.sample(StandardNormal), 0.0),
        Distribution::GaussianComplex => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
        Distribution::Sign => Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
    }
}
