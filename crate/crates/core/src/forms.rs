//! Pointwise algebra of (1,1)-forms and endomorphism-valued (1,1)-forms.
//!
//! A Hermitian matrix `h` stands for the real form `√−1 Σ h_ij dt_i ∧ dt̄_j`;
//! an endomorphism-valued form stores one `r × r` matrix per index pair with
//! the same `√−1` in front. The contraction `Λ` is normalized so that
//! `Λ_g g = n`.
//!
//! The second half of the module is a finite-difference exterior calculus
//! on the underlying real coordinates `(x_1, y_1, …, x_n, y_n)`, used to
//! check closed-form expressions independently.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::manifold::Point;

pub type CMatrix = DMatrix<Complex64>;

/// Sign in front of `√−1 Σ h_ij dt_i ∧ dt̄_j`.
///
/// Forms are stored positive: `ω(v, v̄) > 0` for `v ≠ 0`. The Kähler form
/// of a potential `φ` therefore has coefficient matrix `∂_i ∂̄_j φ`, i.e.
/// `ω = +√−1 ∂∂̄φ`; the opposite global sign in front of `∂∂̄` is a
/// convention and is absorbed here.
pub const SIGN_CONVENTION: f64 = 1.0;

/// `d d^c = DDC_FACTOR · √−1 ∂∂̄` for `d^c = I ∘ d ∘ I⁻¹`.
pub const DDC_FACTOR: f64 = 2.0;

/// Relative tolerance for the Hermitian and reality constraints.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient matrix is not Hermitian (relative defect {0:e})")]
    NotHermitian(f64),
    #[error("endomorphism coefficients violate nu_ji = -nu_ij^dagger (relative defect {0:e})")]
    RealityViolated(f64),
    #[error("metric is not positive definite")]
    MetricNotPositive,
    #[error("operation needs complex dimension >= 2, got {0}")]
    DimensionTooSmall(usize),
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A real (1,1)-form at a point, as its Hermitian coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm11 {
    matrix: CMatrix,
}

impl HermitianForm11 {
    pub fn new(matrix: CMatrix) -> Result<Self, FormError> {
        if !matrix.is_square() {
            return Err(FormError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let scale = frobenius(&matrix);
        let defect = frobenius(&(&matrix - matrix.adjoint()));
        if defect > SYMMETRY_TOL * scale {
            return Err(FormError::NotHermitian(defect / scale));
        }
        Ok(Self { matrix })
    }

    /// Diagonal form `√−1 Σ d_i dt_i ∧ dt̄_i`.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self {
            matrix: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(entries[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(n, n),
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::new(s, 0.0),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant().re
    }

    /// Frobenius norm of the coefficient matrix.
    pub fn norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Pullback through the diagonal linear map `t ↦ (d_1 t_1, …, d_n t_n)`,
    /// given the form at the image point: `(D^*f)_ij = d_i f_ij d̄_j`.
    pub fn pullback_diagonal(&self, d: &[Complex64]) -> Self {
        let n = self.dim();
        assert_eq!(n, d.len());
        Self {
            matrix: CMatrix::from_fn(n, n, |i, j| d[i] * self.matrix[(i, j)] * d[j].conj()),
        }
    }

    /// The form `self ⊗ u` for an endomorphism `u`.
    pub fn tensor(&self, u: &CMatrix) -> Result<EndoForm11, FormError> {
        let n = self.dim();
        let coeffs = (0..n * n)
            .map(|k| u * self.matrix[(k / n, k % n)])
            .collect();
        EndoForm11::new(n, u.nrows(), coeffs)
    }

    /// Coefficients `W_ab = ω(∂_a, ∂_b)` of the underlying real 2-form in the
    /// real coordinates `(x_1, y_1, …)`.
    pub fn to_real_two_form(&self) -> DMatrix<f64> {
        let n = self.dim();
        let basis: Vec<TangentVector> = (0..2 * n).map(|a| real_basis_vector(n, a)).collect();
        DMatrix::from_fn(2 * n, 2 * n, |a, b| {
            real_pairing_unchecked(&self.matrix, &basis[a], &basis[b])
        })
    }
}

/// A (1,0)-vector at a point. As a real tangent vector it is
/// `Σ v_i ∂_i + v̄_i ∂̄_i`, with real components `(Re v_i, Im v_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(Vec<Complex64>);

impl TangentVector {
    pub fn new(components: Vec<Complex64>) -> Self {
        Self(components)
    }

    pub fn from_real(x: &[f64]) -> Self {
        Self(
            x.chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `∂/∂x_k` for even `a = 2k`, `∂/∂y_k` for odd `a = 2k + 1`.
fn real_basis_vector(n: usize, a: usize) -> TangentVector {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[a / 2] = if a.is_multiple_of(2) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    TangentVector(v)
}

fn hermitian_product(m: &CMatrix, v: &[Complex64], w: &[Complex64]) -> Complex64 {
    let n = v.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += m[(i, j)] * v[i] * w[j].conj();
        }
    }
    acc
}

fn real_pairing_unchecked(m: &CMatrix, x: &TangentVector, y: &TangentVector) -> f64 {
    SIGN_CONVENTION * -2.0 * hermitian_product(m, &x.0, &y.0).im
}

fn check_vector(f: &HermitianForm11, v: &TangentVector) -> Result<(), FormError> {
    if v.dim() != f.dim() {
        return Err(FormError::DimensionMismatch {
            expected: f.dim(),
            got: v.dim(),
        });
    }
    Ok(())
}

/// `Σ h_ij v_i w̄_j`, the value of the form on `(v, w̄)`.
pub fn evaluate(
    f: &HermitianForm11,
    v: &TangentVector,
    w: &TangentVector,
) -> Result<Complex64, FormError> {
    check_vector(f, v)?;
    check_vector(f, w)?;
    Ok(hermitian_product(&f.matrix, &v.0, &w.0))
}

/// The form evaluated as a real 2-form on two real tangent vectors.
pub fn real_pairing(
    f: &HermitianForm11,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64, FormError> {
    check_vector(f, x)?;
    check_vector(f, y)?;
    Ok(real_pairing_unchecked(&f.matrix, x, y))
}

/// An endomorphism-valued (1,1)-form with no reality constraint, e.g. a
/// contraction of `ν ∧ ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndoValuedForm11 {
    dim: usize,
    rank: usize,
    coeffs: Vec<CMatrix>,
}

impl EndoValuedForm11 {
    pub fn new(dim: usize, rank: usize, coeffs: Vec<CMatrix>) -> Result<Self, FormError> {
        if coeffs.len() != dim * dim {
            return Err(FormError::DimensionMismatch {
                expected: dim * dim,
                got: coeffs.len(),
            });
        }
        if let Some(bad) = coeffs
            .iter()
            .find(|m| m.nrows() != rank || m.ncols() != rank)
        {
            return Err(FormError::DimensionMismatch {
                expected: rank,
                got: bad.nrows().max(bad.ncols()),
            });
        }
        Ok(Self { dim, rank, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeff(&self, i: usize, j: usize) -> &CMatrix {
        &self.coeffs[i * self.dim + j]
    }

    /// Largest `‖ν_ji + ν_ij†‖` relative to the largest coefficient.
    pub fn reality_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                scale = scale.max(frobenius(self.coeff(i, j)));
                defect = defect.max(frobenius(&(self.coeff(j, i) + self.coeff(i, j).adjoint())));
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Coefficients in the coframe `e = Q dt`: `ν'_ab = Σ_ij Q_ai ν_ij Q̄_bj`.
    pub fn in_frame(&self, q: &CMatrix) -> Self {
        let n = self.dim;
        let coeffs = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                let mut acc = CMatrix::zeros(self.rank, self.rank);
                for i in 0..n {
                    for j in 0..n {
                        acc += self.coeff(i, j) * (q[(a, i)] * q[(b, j)].conj());
                    }
                }
                acc
            })
            .collect();
        Self {
            dim: n,
            rank: self.rank,
            coeffs,
        }
    }

    /// `Σ_ij Tr(ν_ij ν_ij†)` in the coefficients as stored.
    pub fn coefficient_norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|m| m.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }
}

/// A skew-Hermitian-valued real (1,1)-form: `ν_ji = −ν_ij†`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndoForm11(EndoValuedForm11);

impl EndoForm11 {
    pub fn new(dim: usize, rank: usize, coeffs: Vec<CMatrix>) -> Result<Self, FormError> {
        let inner = EndoValuedForm11::new(dim, rank, coeffs)?;
        let defect = inner.reality_defect();
        if defect > SYMMETRY_TOL {
            return Err(FormError::RealityViolated(defect));
        }
        Ok(Self(inner))
    }

    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self(EndoValuedForm11 {
            dim,
            rank,
            coeffs: vec![CMatrix::zeros(rank, rank); dim * dim],
        })
    }

    pub fn general(&self) -> &EndoValuedForm11 {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn coeff(&self, i: usize, j: usize) -> &CMatrix {
        self.0.coeff(i, j)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(EndoValuedForm11 {
            coeffs: self
                .0
                .coeffs
                .iter()
                .map(|m| m * Complex64::new(s, 0.0))
                .collect(),
            ..self.0.clone()
        })
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self(EndoValuedForm11 {
            coeffs: self
                .0
                .coeffs
                .iter()
                .zip(&other.0.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.0.clone()
        })
    }

    pub fn in_frame(&self, q: &CMatrix) -> Self {
        Self(self.0.in_frame(q))
    }

    /// The primitive part `ν − (Λν / n) g ⊗ id`. Requires `Λν` to be a
    /// multiple of the identity only in rank 1; in general it subtracts
    /// `g ⊗ (Λν / n)`.
    pub fn primitive_part(&self, g: &HermitianForm11) -> Result<Self, FormError> {
        let trace = self.lambda(g)?;
        let shift = g.tensor(&(trace / Complex64::new(self.dim() as f64, 0.0)))?;
        Ok(self.minus(&shift))
    }
}

/// Cholesky factor `L` with `g = L L†`; complex square roots of negative
/// pivots are rejected by requiring a real positive diagonal.
fn cholesky_factor(
    g: &HermitianForm11,
) -> Result<nalgebra::Cholesky<Complex64, nalgebra::Dyn>, FormError> {
    let chol = g
        .matrix
        .clone()
        .cholesky()
        .ok_or(FormError::MetricNotPositive)?;
    let l = chol.l_dirty();
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        if d.re.is_nan() || d.re <= 0.0 || d.im.abs() > SYMMETRY_TOL * d.re {
            return Err(FormError::MetricNotPositive);
        }
    }
    Ok(chol)
}

/// `Q` with `Q g Q† = I`; the coframe `e = Q dt` is `g`-orthonormal.
pub fn orthonormal_coframe(g: &HermitianForm11) -> Result<CMatrix, FormError> {
    cholesky_factor(g)?
        .l()
        .try_inverse()
        .ok_or(FormError::MetricNotPositive)
}

fn metric_inverse(g: &HermitianForm11) -> Result<CMatrix, FormError> {
    Ok(cholesky_factor(g)?.inverse())
}

/// The metric trace `Λ_g`, adjoint to `b ↦ g ⊗ b`.
pub trait LambdaContract {
    type Output;
    fn lambda(&self, g: &HermitianForm11) -> Result<Self::Output, FormError>;
}

impl LambdaContract for HermitianForm11 {
    type Output = f64;

    fn lambda(&self, g: &HermitianForm11) -> Result<f64, FormError> {
        if self.dim() != g.dim() {
            return Err(FormError::DimensionMismatch {
                expected: g.dim(),
                got: self.dim(),
            });
        }
        let ginv = metric_inverse(g)?;
        Ok((ginv * &self.matrix).trace().re)
    }
}

impl LambdaContract for EndoValuedForm11 {
    type Output = CMatrix;

    fn lambda(&self, g: &HermitianForm11) -> Result<CMatrix, FormError> {
        if self.dim != g.dim() {
            return Err(FormError::DimensionMismatch {
                expected: g.dim(),
                got: self.dim,
            });
        }
        let ginv = metric_inverse(g)?;
        let mut acc = CMatrix::zeros(self.rank, self.rank);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.coeff(i, j) * ginv[(j, i)];
            }
        }
        Ok(acc)
    }
}

impl LambdaContract for EndoForm11 {
    type Output = CMatrix;

    fn lambda(&self, g: &HermitianForm11) -> Result<CMatrix, FormError> {
        self.0.lambda(g)
    }
}

pub fn lambda_contract<F: LambdaContract>(
    f: &F,
    g: &HermitianForm11,
) -> Result<F::Output, FormError> {
    f.lambda(g)
}

/// `|ν|²_g`: the coefficient norm in a `g`-orthonormal coframe.
pub fn norm_sq(nu: &EndoForm11, g: &HermitianForm11) -> Result<f64, FormError> {
    if nu.dim() != g.dim() {
        return Err(FormError::DimensionMismatch {
            expected: g.dim(),
            got: nu.dim(),
        });
    }
    let q = orthonormal_coframe(g)?;
    Ok(nu.0.in_frame(&q).coefficient_norm_sq())
}

/// An endomorphism-valued (2,2)-form
/// `Σ_{a,c,b,d} W_acbd dt_a ∧ dt_c ∧ dt̄_b ∧ dt̄_d`, antisymmetric in `(a, c)`
/// and in `(b, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTwoForm {
    dim: usize,
    rank: usize,
    coeffs: Vec<CMatrix>,
}

impl TwoTwoForm {
    fn index(&self, a: usize, c: usize, b: usize, d: usize) -> usize {
        ((a * self.dim + c) * self.dim + b) * self.dim + d
    }

    pub fn coeff(&self, a: usize, c: usize, b: usize, d: usize) -> &CMatrix {
        &self.coeffs[self.index(a, c, b, d)]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `ν ∧ μ`; endomorphism coefficients compose in the order of the factors.
pub fn wedge(nu: &EndoValuedForm11, mu: &EndoValuedForm11) -> Result<TwoTwoForm, FormError> {
    if nu.dim != mu.dim || nu.rank != mu.rank {
        return Err(FormError::DimensionMismatch {
            expected: nu.dim,
            got: mu.dim,
        });
    }
    let n = nu.dim;
    // (√−1 dt_a∧dt̄_b)∧(√−1 dt_c∧dt̄_d) = dt_a∧dt_c∧dt̄_b∧dt̄_d
    let mut coeffs = Vec::with_capacity(n.pow(4));
    for a in 0..n {
        for c in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let w = nu.coeff(a, b) * mu.coeff(c, d)
                        - nu.coeff(c, b) * mu.coeff(a, d)
                        - nu.coeff(a, d) * mu.coeff(c, b)
                        + nu.coeff(c, d) * mu.coeff(a, b);
                    coeffs.push(w * Complex64::new(0.25, 0.0));
                }
            }
        }
    }
    Ok(TwoTwoForm {
        dim: n,
        rank: nu.rank,
        coeffs,
    })
}

impl LambdaContract for TwoTwoForm {
    type Output = EndoValuedForm11;

    /// `(ΛΨ)_cd = 4 Σ_{a,b} (g⁻¹)_ba W_acbd`, the contraction of one
    /// holomorphic with one antiholomorphic slot, with the same normalization
    /// as on (1,1)-forms.
    fn lambda(&self, g: &HermitianForm11) -> Result<EndoValuedForm11, FormError> {
        let n = self.dim;
        if n != g.dim() {
            return Err(FormError::DimensionMismatch {
                expected: g.dim(),
                got: n,
            });
        }
        let ginv = metric_inverse(g)?;
        let coeffs = (0..n * n)
            .map(|k| {
                let (c, d) = (k / n, k % n);
                let mut acc = CMatrix::zeros(self.rank, self.rank);
                for a in 0..n {
                    for b in 0..n {
                        acc += self.coeff(a, c, b, d) * (ginv[(b, a)] * 4.0);
                    }
                }
                acc
            })
            .collect();
        EndoValuedForm11::new(n, self.rank, coeffs)
    }
}

/// `Tr Λ²(ν ∧ μ)` as a complex number.
pub fn lambda2_wedge_trace_pair(
    nu: &EndoValuedForm11,
    mu: &EndoValuedForm11,
    g: &HermitianForm11,
) -> Result<Complex64, FormError> {
    if nu.dim < 2 {
        return Err(FormError::DimensionTooSmall(nu.dim));
    }
    let psi = wedge(nu, mu)?;
    Ok(psi.lambda(g)?.lambda(g)?.trace())
}

/// `Tr Λ²(ν ∧ ν)`.
///
/// With the coefficient convention of this module the value is real, and
/// for primitive `ν` it equals `2 |ν|²`.
pub fn lambda2_wedge_trace(nu: &EndoForm11, g: &HermitianForm11) -> Result<f64, FormError> {
    Ok(lambda2_wedge_trace_pair(&nu.0, &nu.0, g)?.re)
}

fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, f64)> {
    // Heap's algorithm; consecutive outputs differ by one transposition.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![(perm.clone(), 1.0)];
    let mut sign = 1.0;
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Coefficient of `f_1 ∧ … ∧ f_n` against `Π_i √−1 dt_i ∧ dt̄_i`:
/// `Σ_{σ,τ} sgn σ sgn τ Π_k (f_k)_{σ(k) τ(k)}` (`n!` times the mixed discriminant).
pub fn wedge_top(forms: &[&HermitianForm11]) -> Result<f64, FormError> {
    let n = forms.len();
    if let Some(bad) = forms.iter().find(|f| f.dim() != n) {
        return Err(FormError::DimensionMismatch {
            expected: n,
            got: bad.dim(),
        });
    }
    let perms = permutations_with_sign(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for (sigma, s1) in &perms {
        for (tau, s2) in &perms {
            let mut term = Complex64::new(s1 * s2, 0.0);
            for (k, f) in forms.iter().enumerate() {
                term *= f.matrix[(sigma[k], tau[k])];
            }
            acc += term;
        }
    }
    Ok(acc.re)
}

// ---------------------------------------------------------------------------
// Finite-difference exterior calculus on real coordinates.
// ---------------------------------------------------------------------------

pub const DEFAULT_FD_STEP: f64 = 1e-4;

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(a, h) in moves {
        y[a] += h;
    }
    y
}

/// Central-difference Hessian of a function of the real coordinates.
pub fn fd_real_hessian<F: Fn(&[f64]) -> f64>(field: F, x: &[f64], step: f64) -> DMatrix<f64> {
    let m = x.len();
    let f0 = field(x);
    let mut hess = DMatrix::zeros(m, m);
    for a in 0..m {
        let fp = field(&shifted(x, &[(a, step)]));
        let fm = field(&shifted(x, &[(a, -step)]));
        hess[(a, a)] = (fp - 2.0 * f0 + fm) / (step * step);
        for b in (a + 1)..m {
            let fpp = field(&shifted(x, &[(a, step), (b, step)]));
            let fpm = field(&shifted(x, &[(a, step), (b, -step)]));
            let fmp = field(&shifted(x, &[(a, -step), (b, step)]));
            let fmm = field(&shifted(x, &[(a, -step), (b, -step)]));
            let v = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    hess
}

/// Central-difference gradient (the exterior derivative of a function).
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(field: F, x: &[f64], step: f64) -> Vec<f64> {
    (0..x.len())
        .map(|a| {
            (field(&shifted(x, &[(a, step)])) - field(&shifted(x, &[(a, -step)]))) / (2.0 * step)
        })
        .collect()
}

/// Finite-difference `∂∂̄`: `(∂_i ∂̄_j f) = ¼ [f_{x_i x_j} + f_{y_i y_j} + √−1 (f_{x_i y_j} − f_{y_i x_j})]`.
pub fn fd_ddbar<F: Fn(&Point) -> f64>(field: F, p: &Point, step: f64) -> HermitianForm11 {
    let n = p.dim();
    let real_field = |x: &[f64]| {
        field(&Point::from_coords_unchecked(
            x.chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        ))
    };
    let hess = fd_real_hessian(real_field, &p.to_real(), step);
    let matrix = CMatrix::from_fn(n, n, |i, j| {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        Complex64::new(
            0.25 * (hess[(xi, xj)] + hess[(yi, yj)]),
            0.25 * (hess[(xi, yj)] - hess[(yi, xj)]),
        )
    });
    HermitianForm11::from_matrix_unchecked(matrix)
}

/// Central-difference `dα` for a real 1-form field: `(dα)_ab = ∂_a α_b − ∂_b α_a`.
pub fn fd_one_form_derivative<F: Fn(&[f64]) -> Vec<f64>>(
    field: F,
    x: &[f64],
    step: f64,
) -> DMatrix<f64> {
    let m = x.len();
    let partials: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            let fp = field(&shifted(x, &[(a, step)]));
            let fm = field(&shifted(x, &[(a, -step)]));
            fp.iter()
                .zip(&fm)
                .map(|(p, q)| (p - q) / (2.0 * step))
                .collect()
        })
        .collect();
    DMatrix::from_fn(m, m, |a, b| partials[a][b] - partials[b][a])
}

/// `α ∘ I` for a real 1-form; `I ∂_x = ∂_y`, `I ∂_y = −∂_x`.
pub fn complex_structure_pullback(alpha: &[f64]) -> Vec<f64> {
    alpha.chunks_exact(2).flat_map(|c| [c[1], -c[0]]).collect()
}

/// Central-difference `d^c α = d(α ∘ I⁻¹)`; on a (1,1)-type result the outer
/// `I` acts trivially.
pub fn fd_dc_one_form<F: Fn(&[f64]) -> Vec<f64>>(field: F, x: &[f64], step: f64) -> DMatrix<f64> {
    fd_one_form_derivative(
        |y| {
            complex_structure_pullback(&field(y))
                .into_iter()
                .map(|v| -v)
                .collect()
        },
        x,
        step,
    )
}

/// A real 3-form by its full antisymmetric coefficient array `T(∂_a, ∂_b, ∂_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm {
    dim: usize,
    coeffs: Vec<f64>,
}

impl ThreeForm {
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.coeffs[(a * self.dim + b) * self.dim + c]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|v| v * s).collect(),
        }
    }
}

/// Central-difference `dΩ` of a real 2-form field:
/// `dΩ(a, b, c) = ∂_a Ω_bc − ∂_b Ω_ac + ∂_c Ω_ab`.
pub fn fd_two_form_derivative<F: Fn(&[f64]) -> DMatrix<f64>>(
    field: F,
    x: &[f64],
    step: f64,
) -> ThreeForm {
    let m = x.len();
    let partials: Vec<DMatrix<f64>> = (0..m)
        .map(|a| {
            (field(&shifted(x, &[(a, step)])) - field(&shifted(x, &[(a, -step)]))) / (2.0 * step)
        })
        .collect();
    let mut coeffs = Vec::with_capacity(m * m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                coeffs.push(partials[a][(b, c)] - partials[b][(a, c)] + partials[c][(a, b)]);
            }
        }
    }
    ThreeForm { dim: m, coeffs }
}

/// `α ∧ Ω` for a real 1-form and 2-form.
pub fn wedge_one_two(alpha: &[f64], omega: &DMatrix<f64>) -> ThreeForm {
    let m = alpha.len();
    let mut coeffs = Vec::with_capacity(m * m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                coeffs.push(
                    alpha[a] * omega[(b, c)] - alpha[b] * omega[(a, c)] + alpha[c] * omega[(a, b)],
                );
            }
        }
    }
    ThreeForm { dim: m, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tv(v: &[f64]) -> TangentVector {
        TangentVector::new(v.iter().map(|&x| cx(x, 0.0)).collect())
    }

    #[test]
    fn evaluate_examples() {
        let id = HermitianForm11::identity(2);
        assert_eq!(
            evaluate(&id, &tv(&[1.0, 0.0]), &tv(&[1.0, 0.0])).unwrap(),
            cx(1.0, 0.0)
        );
        let d = HermitianForm11::diagonal(&[2.0, 3.0]);
        assert_eq!(
            evaluate(&d, &tv(&[1.0, 1.0]), &tv(&[1.0, 0.0])).unwrap(),
            cx(2.0, 0.0)
        );
        assert!(matches!(
            evaluate(&d, &tv(&[1.0]), &tv(&[1.0, 0.0])),
            Err(FormError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_is_real_on_diagonal_pairs() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[cx(2.0, 0.0), cx(0.5, -1.0), cx(0.5, 1.0), cx(3.0, 0.0)],
        );
        let f = HermitianForm11::new(m).unwrap();
        let v = TangentVector::new(vec![cx(0.3, -2.0), cx(1.1, 0.4)]);
        assert!(evaluate(&f, &v, &v).unwrap().im.abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)],
        );
        assert!(matches!(
            HermitianForm11::new(m),
            Err(FormError::NotHermitian(_))
        ));
    }

    #[test]
    fn reality_constraint_enforced() {
        let u = CMatrix::from_element(1, 1, cx(1.0, 0.0));
        let z = CMatrix::zeros(1, 1);
        assert!(matches!(
            EndoForm11::new(2, 1, vec![u, z.clone(), z.clone(), z]),
            Err(FormError::RealityViolated(_))
        ));
    }

    #[test]
    fn lambda_of_metric_is_dimension() {
        let g = HermitianForm11::diagonal(&[2.0, 0.5, 7.0]);
        assert!((g.lambda(&g).unwrap() - 3.0).abs() < 1e-14);
        let bad = HermitianForm11::diagonal(&[1.0, -1.0, 1.0]);
        assert!(matches!(g.lambda(&bad), Err(FormError::MetricNotPositive)));
    }

    #[test]
    fn lambda_of_off_diagonal_is_zero() {
        let u = CMatrix::from_element(1, 1, cx(0.0, 1.0));
        let z = CMatrix::zeros(1, 1);
        let nu = EndoForm11::new(2, 1, vec![z.clone(), u.clone(), u, z]).unwrap();
        let g = HermitianForm11::identity(2);
        assert!(nu.lambda(&g).unwrap()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn wedge_top_matches_determinant() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                cx(2.0, 0.0),
                cx(0.1, 0.2),
                cx(0.0, -0.3),
                cx(0.1, -0.2),
                cx(1.5, 0.0),
                cx(0.4, 0.0),
                cx(0.0, 0.3),
                cx(0.4, 0.0),
                cx(1.0, 0.0),
            ],
        );
        let g = HermitianForm11::new(m).unwrap();
        let top = wedge_top(&[&g, &g, &g]).unwrap();
        assert!((top - 6.0 * g.determinant()).abs() < 1e-12);
    }

    #[test]
    fn permutation_signs() {
        let perms = permutations_with_sign(4);
        assert_eq!(perms.len(), 24);
        for (p, s) in perms {
            let mut inversions = 0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if p[i] > p[j] {
                        inversions += 1;
                    }
                }
            }
            assert_eq!(s, if inversions % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn lambda2_of_zero_and_small_dimension() {
        let g = HermitianForm11::identity(3);
        assert_eq!(
            lambda2_wedge_trace(&EndoForm11::zeros(3, 2), &g).unwrap(),
            0.0
        );
        let g1 = HermitianForm11::identity(1);
        assert!(matches!(
            lambda2_wedge_trace(&EndoForm11::zeros(1, 1), &g1),
            Err(FormError::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn diagonal_rank_one_hand_expansion() {
        // ν = √−1 (i e¹∧ē¹ − i e²∧ē²) in an orthonormal frame, n = 2.
        // Only the two diagonal blocks survive in ν∧ν: 2 ν_11 ν_22 e¹∧e²∧ē¹∧ē²,
        // and Λ²(e¹∧e²∧ē¹∧ē²) = 2, so Tr Λ²(ν∧ν) = 4 ν_11 ν_22 = 4.
        let z = CMatrix::zeros(1, 1);
        let a1 = CMatrix::from_element(1, 1, cx(0.0, 1.0));
        let a2 = CMatrix::from_element(1, 1, cx(0.0, -1.0));
        let nu = EndoForm11::new(2, 1, vec![a1, z.clone(), z, a2]).unwrap();
        let g = HermitianForm11::identity(2);
        assert!((lambda2_wedge_trace(&nu, &g).unwrap() - 4.0).abs() < 1e-14);
        assert!((norm_sq(&nu, &g).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fd_ddbar_of_simple_fields() {
        let p = Point::new(vec![cx(0.7, -0.2), cx(0.3, 1.1)]).unwrap();
        let quad = fd_ddbar(|q| q.coords()[0].norm_sqr(), &p, DEFAULT_FD_STEP);
        let expected = HermitianForm11::diagonal(&[1.0, 0.0]);
        assert!(quad.minus(&expected).norm() < 1e-6);
        let harmonic = fd_ddbar(
            |q| q.coords()[0].re + (q.coords()[0] * q.coords()[1]).im,
            &p,
            DEFAULT_FD_STEP,
        );
        assert!(harmonic.norm() < 1e-6);
        let mixed = fd_ddbar(
            |q| (q.coords()[0] * q.coords()[1].conj()).im,
            &p,
            DEFAULT_FD_STEP,
        );
        assert!((mixed.matrix()[(0, 1)] - cx(0.0, -0.5)).norm() < 1e-6);
    }

    #[test]
    fn d_squared_vanishes() {
        let f = |x: &[f64]| (x[0] * x[1]).sin() + x[2] * x[3].powi(3) + x[1].exp();
        let x = [0.3, -0.4, 1.2, 0.5];
        let h = 1e-4;
        let ddf = fd_one_form_derivative(|y| fd_gradient(f, y, h), &x, h);
        assert!(ddf.amax() < 1e-5);
        let constant = fd_one_form_derivative(|_| vec![1.0, 2.0, -3.0, 0.5], &x, h);
        assert_eq!(constant.amax(), 0.0);
    }

    #[test]
    fn dc_of_dr2_is_twice_the_flat_form() {
        // d d^c |t|² = DDC_FACTOR · (real form of √−1 dt∧dt̄).
        let x = [0.4, -0.9];
        let h = 1e-4;
        let dc = fd_dc_one_form(|y| vec![2.0 * y[0], 2.0 * y[1]], &x, h);
        let flat = HermitianForm11::identity(1).to_real_two_form() * DDC_FACTOR;
        assert!((dc - flat).amax() < 1e-8);
    }

    #[test]
    fn real_two_form_of_flat_metric() {
        let w = HermitianForm11::identity(1).to_real_two_form();
        assert!((w[(0, 1)] - 2.0).abs() < 1e-15);
        assert!((w[(1, 0)] + 2.0).abs() < 1e-15);
    }
}
