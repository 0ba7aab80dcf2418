//! Exterior algebra over a Euclidean space in a fixed orthonormal frame.
//!
//! Conventions, fixed once:
//! * the metric is the identity in the working frame;
//! * a 2-form and a skew endomorphism are identified via `<A X, Y> = w(X, Y)`,
//!   equivalently `(X ^ Y) Z = <X,Z> Y - <Y,Z> X`;
//! * the coefficients over strictly increasing multi-indices form an
//!   orthonormal basis of each `Lambda^k`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::tol::{TOL_RANK, TOL_SKEW};

/// An n-dimensional Euclidean space with its standard orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Space {
    dim: usize,
}

impl Space {
    pub fn new(dim: usize) -> Result<Self> {
        if dim > 32 {
            return Err(CoreError::DegenerateDimension(dim));
        }
        Ok(Space { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }
}

/// Antisymmetric degree-k coefficient tensor, stored over strictly
/// increasing multi-indices (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    space: Space,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

/// Sorts a multi-index, returning the permutation sign, or `None` on a
/// repeated index.
fn sort_index(mut idx: Vec<usize>) -> Option<(Vec<usize>, f64)> {
    let mut sign = 1.0;
    // insertion sort, counting swaps
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((idx, sign))
}

impl KForm {
    pub fn zero(space: Space, degree: usize) -> Self {
        KForm {
            space,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis k-form `e_{i1} ^ ... ^ e_{ik}` for a strictly increasing index.
    pub fn basis(space: Space, indices: &[usize]) -> Result<Self> {
        let mut f = KForm::zero(space, indices.len());
        f.add_term(indices.to_vec(), 1.0)?;
        Ok(f)
    }

    pub fn one_form(space: Space, v: &DVector<f64>) -> Result<Self> {
        if v.len() != space.dim() {
            return Err(CoreError::DimensionMismatch(v.len(), space.dim()));
        }
        let mut f = KForm::zero(space, 1);
        for i in 0..space.dim() {
            if v[i] != 0.0 {
                f.coeffs.insert(vec![i], v[i]);
            }
        }
        Ok(f)
    }

    /// The volume form `e_1 ^ ... ^ e_n`.
    pub fn volume(space: Space) -> Self {
        let idx: Vec<usize> = (0..space.dim()).collect();
        let mut f = KForm::zero(space, space.dim());
        f.coeffs.insert(idx, 1.0);
        f
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<usize>, &f64)> {
        self.coeffs.iter()
    }

    /// Adds `value` times the (possibly unsorted) basis monomial `indices`.
    pub fn add_term(&mut self, indices: Vec<usize>, value: f64) -> Result<()> {
        if indices.len() != self.degree {
            return Err(CoreError::Degree(format!(
                "index length {} for degree-{} form",
                indices.len(),
                self.degree
            )));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.space.dim()) {
            return Err(CoreError::DimensionMismatch(i, self.space.dim()));
        }
        if value == 0.0 {
            return Ok(());
        }
        if let Some((sorted, sign)) = sort_index(indices) {
            let c = self.coeffs.entry(sorted).or_insert(0.0);
            *c += sign * value;
        }
        Ok(())
    }

    /// Signed coefficient at an arbitrary (possibly unsorted) multi-index.
    pub fn coeff(&self, indices: &[usize]) -> f64 {
        match sort_index(indices.to_vec()) {
            None => 0.0,
            Some((sorted, sign)) => sign * self.coeffs.get(&sorted).copied().unwrap_or(0.0),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &KForm) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(CoreError::Degree(format!(
                "cannot add degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (idx, v) in &other.coeffs {
            *out.coeffs.entry(idx.clone()).or_insert(0.0) += v;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KForm) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn inner(&self, other: &KForm) -> f64 {
        let mut s = 0.0;
        for (idx, v) in &self.coeffs {
            s += v * other.coeffs.get(idx).copied().unwrap_or(0.0);
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// Drops coefficients below `tol` in absolute value.
    pub fn prune(mut self, tol: f64) -> Self {
        self.coeffs.retain(|_, v| v.abs() > tol);
        self
    }

    fn check_same(&self, other: &KForm) -> Result<()> {
        if self.space.dim() != other.space.dim() {
            return Err(CoreError::DimensionMismatch(
                self.space.dim(),
                other.space.dim(),
            ));
        }
        Ok(())
    }

    /// Exterior product. Degrees summing above n simply give the zero form.
    pub fn wedge(&self, other: &KForm) -> Result<Self> {
        self.check_same(other)?;
        let mut out = KForm::zero(self.space, self.degree + other.degree);
        if out.degree > self.space.dim() {
            return Ok(out);
        }
        for (i1, v1) in &self.coeffs {
            for (i2, v2) in &other.coeffs {
                let mut idx = i1.clone();
                idx.extend_from_slice(i2);
                out.add_term(idx, v1 * v2)?;
            }
        }
        Ok(out)
    }

    /// Interior product `x` ⌟ `self`.
    pub fn contract(&self, x: &DVector<f64>) -> Result<Self> {
        if self.degree == 0 {
            return Err(CoreError::Degree(
                "cannot contract a 0-form".to_string(),
            ));
        }
        if x.len() != self.space.dim() {
            return Err(CoreError::DimensionMismatch(x.len(), self.space.dim()));
        }
        let mut out = KForm::zero(self.space, self.degree - 1);
        for (idx, v) in &self.coeffs {
            for (p, &ip) in idx.iter().enumerate() {
                if x[ip] != 0.0 {
                    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                    let mut rest = idx.clone();
                    rest.remove(p);
                    *out.coeffs.entry(rest).or_insert(0.0) += sign * x[ip] * v;
                }
            }
        }
        Ok(out)
    }

    /// Evaluation on a tuple of vectors (length must equal the degree).
    pub fn eval(&self, args: &[DVector<f64>]) -> Result<f64> {
        if args.len() != self.degree {
            return Err(CoreError::Degree(format!(
                "{} arguments for a degree-{} form",
                args.len(),
                self.degree
            )));
        }
        let mut f = self.clone();
        for x in args {
            f = f.contract(x)?;
        }
        Ok(f.coeffs.get(&Vec::new()).copied().unwrap_or(0.0))
    }

    /// `tau_x`: the skew endomorphism of the 2-form `x` ⌟ `self` (degree 3).
    pub fn slice(&self, x: &DVector<f64>) -> Result<SkewEndo> {
        if self.degree != 3 {
            return Err(CoreError::Degree(format!(
                "slice needs a 3-form, got degree {}",
                self.degree
            )));
        }
        self.contract(x)?.to_endo()
    }

    /// Identification of a 2-form with a skew endomorphism via
    /// `<A X, Y> = w(X, Y)`.
    pub fn to_endo(&self) -> Result<SkewEndo> {
        if self.degree != 2 {
            return Err(CoreError::Degree(format!(
                "endomorphism identification needs a 2-form, got degree {}",
                self.degree
            )));
        }
        let n = self.space.dim();
        let mut m = DMatrix::zeros(n, n);
        for (idx, v) in &self.coeffs {
            let (i, j) = (idx[0], idx[1]);
            // w(e_i, e_j) = <A e_i, e_j> = m[(j, i)]
            m[(j, i)] = *v;
            m[(i, j)] = -*v;
        }
        SkewEndo::new(self.space, m)
    }

    /// `Sum_i (e_i ⌟ tau) ^ (e_i ⌟ tau)`, the 4-form whose vanishing is one
    /// formulation of the tau-Jacobi condition.
    pub fn four_form_sum(&self) -> Result<Self> {
        if self.degree != 3 {
            return Err(CoreError::Degree(format!(
                "four_form_sum needs a 3-form, got degree {}",
                self.degree
            )));
        }
        let n = self.space.dim();
        let mut out = KForm::zero(self.space, 4);
        for i in 0..n {
            let s = self.contract(&self.space.basis_vector(i))?;
            out = out.add(&s.wedge(&s)?)?;
        }
        Ok(out)
    }

    /// Orthonormal basis of `{X : tau_X = 0}` for a 3-form.
    pub fn kernel(&self) -> Result<Vec<DVector<f64>>> {
        if self.degree != 3 {
            return Err(CoreError::Degree(format!(
                "kernel needs a 3-form, got degree {}",
                self.degree
            )));
        }
        let m = self.slice_matrix()?;
        Ok(crate::subspace::null_space(&m, TOL_RANK))
    }

    /// Matrix of the linear map `x -> x ⌟ tau`, columns indexed by the frame,
    /// rows by increasing 2-form multi-indices.
    pub fn slice_matrix(&self) -> Result<DMatrix<f64>> {
        let n = self.space.dim();
        let rows = n * (n - 1) / 2;
        let mut m = DMatrix::zeros(rows, n);
        for i in 0..n {
            let s = self.contract(&self.space.basis_vector(i))?;
            for (idx, v) in &s.coeffs {
                m[(pair_row(idx[0], idx[1], n), i)] = *v;
            }
        }
        Ok(m)
    }

    /// Coefficient vector over increasing 2-form multi-indices.
    pub fn two_form_vector(&self) -> Result<DVector<f64>> {
        if self.degree != 2 {
            return Err(CoreError::Degree("expected a 2-form".to_string()));
        }
        let n = self.space.dim();
        let mut v = DVector::zeros(n * (n - 1) / 2);
        for (idx, c) in &self.coeffs {
            v[pair_row(idx[0], idx[1], n)] = *c;
        }
        Ok(v)
    }
}

/// Row index of the pair `(i, j)`, `i < j`, in the increasing enumeration of
/// 2-form multi-indices.
pub fn pair_row(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(idx, v)| {
                let basis: Vec<String> =
                    idx.iter().map(|i| format!("e{}", i + 1)).collect();
                format!("{:+.6}*{}", v, basis.join("^"))
            })
            .collect();
        write!(f, "{}", terms.join(" "))
    }
}

/// A g-skew-symmetric endomorphism in the working frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewEndo {
    space: Space,
    matrix: DMatrix<f64>,
}

impl SkewEndo {
    pub fn new(space: Space, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(CoreError::DimensionMismatch(matrix.nrows(), space.dim()));
        }
        let defect = (&matrix + matrix.transpose()).norm();
        let scale = matrix.norm().max(1.0);
        if defect > TOL_SKEW * scale {
            return Err(CoreError::NotSkew {
                defect,
                tol: TOL_SKEW * scale,
            });
        }
        Ok(SkewEndo { space, matrix })
    }

    pub fn zero(space: Space) -> Self {
        SkewEndo {
            space,
            matrix: DMatrix::zeros(space.dim(), space.dim()),
        }
    }

    /// The wedge endomorphism `(X ^ Y) Z = <X,Z> Y - <Y,Z> X`.
    pub fn from_wedge(space: Space, x: &DVector<f64>, y: &DVector<f64>) -> Result<Self> {
        let m = y * x.transpose() - x * y.transpose();
        SkewEndo::new(space, m)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn add(&self, other: &SkewEndo) -> Result<SkewEndo> {
        if self.space.dim() != other.space.dim() {
            return Err(CoreError::DimensionMismatch(
                self.space.dim(),
                other.space.dim(),
            ));
        }
        SkewEndo::new(self.space, &self.matrix + &other.matrix)
    }

    pub fn commutator(&self, other: &SkewEndo) -> Result<SkewEndo> {
        SkewEndo::new(
            self.space,
            &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        )
    }

    /// Inverse of the 2-form identification.
    pub fn to_two_form(&self) -> Result<KForm> {
        let n = self.space.dim();
        let mut f = KForm::zero(self.space, 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.matrix[(j, i)];
                if v != 0.0 {
                    f.coeffs.insert(vec![i, j], v);
                }
            }
        }
        Ok(f)
    }

    /// Derivation action `A_* sigma = Sum_i A e_i ^ (e_i ⌟ sigma)`.
    pub fn derivation_action(&self, sigma: &KForm) -> Result<KForm> {
        if sigma.space().dim() != self.space.dim() {
            return Err(CoreError::DimensionMismatch(
                sigma.space().dim(),
                self.space.dim(),
            ));
        }
        let n = self.space.dim();
        let mut out = KForm::zero(self.space, sigma.degree());
        if sigma.degree() == 0 {
            return Ok(out);
        }
        for i in 0..n {
            let aei = KForm::one_form(self.space, &self.matrix.column(i).into_owned())?;
            let contracted = sigma.contract(&self.space.basis_vector(i))?;
            out = out.add(&aei.wedge(&contracted)?)?;
        }
        Ok(out)
    }
}
