//! O(n)-decomposition of torsion tensors `T` in `Lambda^1 (x) Lambda^2` into
//! vectorial, twistorial and totally skew components, and type classification.

use std::fmt;

use nalgebra::DVector;

use crate::error::{CoreError, Result};
use crate::exterior::{KForm, Space};
use crate::tol::TOL_TYPE;

/// Element of `Lambda^1 (x) Lambda^2`: slice `i` is the 2-form `T(e_i)`.
#[derive(Debug, Clone)]
pub struct TorsionTensor {
    space: Space,
    slices: Vec<KForm>,
}

impl TorsionTensor {
    pub fn new(space: Space, slices: Vec<KForm>) -> Result<Self> {
        if space.dim() < 2 {
            return Err(CoreError::DegenerateDimension(space.dim()));
        }
        if slices.len() != space.dim() {
            return Err(CoreError::DimensionMismatch(slices.len(), space.dim()));
        }
        for s in &slices {
            if s.degree() != 2 {
                return Err(CoreError::Degree(format!(
                    "torsion slice has degree {}",
                    s.degree()
                )));
            }
            if s.space().dim() != space.dim() {
                return Err(CoreError::DimensionMismatch(s.space().dim(), space.dim()));
            }
        }
        Ok(TorsionTensor { space, slices })
    }

    pub fn zero(space: Space) -> Self {
        let slices = (0..space.dim()).map(|_| KForm::zero(space, 2)).collect();
        TorsionTensor { space, slices }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn slices(&self) -> &[KForm] {
        &self.slices
    }

    /// The 2-form `T(x)` for an arbitrary vector `x`.
    pub fn slice_at(&self, x: &DVector<f64>) -> Result<KForm> {
        let mut out = KForm::zero(self.space, 2);
        for (i, s) in self.slices.iter().enumerate() {
            if x[i] != 0.0 {
                out = out.add(&s.scale(x[i]))?;
            }
        }
        Ok(out)
    }

    /// Fully evaluated coefficient `T(X, Y, Z) = <T_X Y, Z>`.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        self.slices[i].coeff(&[j, k])
    }

    pub fn norm(&self) -> f64 {
        self.slices.iter().map(|s| s.inner(s)).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &TorsionTensor) -> Result<TorsionTensor> {
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        TorsionTensor::new(self.space, slices)
    }

    pub fn sub(&self, other: &TorsionTensor) -> Result<TorsionTensor> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> TorsionTensor {
        TorsionTensor {
            space: self.space,
            slices: self.slices.iter().map(|f| f.scale(s)).collect(),
        }
    }

    /// `T~(X, Y) := T_X Y - T_Y X` as a vector.
    pub fn torsion_two_form(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        let tx = self.slice_at(x)?.to_endo()?;
        let ty = self.slice_at(y)?.to_endo()?;
        Ok(tx.apply(y) - ty.apply(x))
    }

    /// Inclusion of a 1-form: `xi -> Sum_i e_i (x) (e_i ^ xi)`.
    pub fn embed_vectorial(xi: &KForm) -> Result<TorsionTensor> {
        if xi.degree() != 1 {
            return Err(CoreError::Degree("vectorial embedding needs a 1-form".into()));
        }
        let space = xi.space();
        let slices = (0..space.dim())
            .map(|i| KForm::basis(space, &[i])?.wedge(xi))
            .collect::<Result<Vec<_>>>()?;
        TorsionTensor::new(space, slices)
    }

    /// Inclusion of a 3-form: `tau -> Sum_i e_i (x) (e_i ⌟ tau)`.
    pub fn embed_skew(tau: &KForm) -> Result<TorsionTensor> {
        if tau.degree() != 3 {
            return Err(CoreError::Degree("skew embedding needs a 3-form".into()));
        }
        let space = tau.space();
        let slices = (0..space.dim())
            .map(|i| tau.contract(&space.basis_vector(i)))
            .collect::<Result<Vec<_>>>()?;
        TorsionTensor::new(space, slices)
    }

    /// `Sum_i e_i ⌟ T(e_i)` as a 1-form.
    pub fn contraction(&self) -> Result<KForm> {
        let mut out = KForm::zero(self.space, 1);
        for (i, s) in self.slices.iter().enumerate() {
            out = out.add(&s.contract(&self.space.basis_vector(i))?)?;
        }
        Ok(out)
    }

    /// Full alternation `a(T)(X,Y,Z) = (T(X,Y,Z)+T(Y,Z,X)+T(Z,X,Y))/3`.
    pub fn alternation(&self) -> Result<KForm> {
        let n = self.space.dim();
        let mut out = KForm::zero(self.space, 3);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let v = (self.coeff(i, j, k) + self.coeff(j, k, i) + self.coeff(k, i, j)) / 3.0;
                    out.add_term(vec![i, j, k], v)?;
                }
            }
        }
        Ok(out)
    }

    pub fn decompose(&self) -> Result<TorsionDecomposition> {
        let n = self.space.dim();
        if n < 2 {
            return Err(CoreError::DegenerateDimension(n));
        }
        let vectorial = self.contraction()?.scale(1.0 / (n as f64 - 1.0));
        let skew = self.alternation()?;
        let t1 = TorsionTensor::embed_vectorial(&vectorial)?;
        let t3 = TorsionTensor::embed_skew(&skew)?;
        let twistorial = self.sub(&t1)?.sub(&t3)?;
        let residual_norm = self
            .sub(&t1.add(&twistorial)?.add(&t3)?)?
            .norm();
        Ok(TorsionDecomposition {
            vectorial,
            twistorial,
            skew,
            residual_norm,
        })
    }

    /// Components whose norm exceeds `tol * |T|`, plus the twistor labels.
    pub fn classify_type(&self, tol: Option<f64>) -> Result<TorsionType> {
        let tol = tol.unwrap_or(TOL_TYPE);
        let total = self.norm();
        if total == 0.0 {
            return Ok(TorsionType {
                t1: false,
                t2: false,
                t3: false,
                zero: true,
            });
        }
        let d = self.decompose()?;
        let t1 = TorsionTensor::embed_vectorial(&d.vectorial)?.norm() > tol * total;
        let t2 = d.twistorial.norm() > tol * total;
        let t3 = TorsionTensor::embed_skew(&d.skew)?.norm() > tol * total;
        Ok(TorsionType {
            t1,
            t2,
            t3,
            zero: false,
        })
    }
}

/// The three O(n)-components of a torsion tensor.
#[derive(Debug, Clone)]
pub struct TorsionDecomposition {
    /// `xi`, the `Lambda^1` component (before re-embedding).
    pub vectorial: KForm,
    /// The Cartan-summand remainder, already embedded.
    pub twistorial: TorsionTensor,
    /// `tau`, the `Lambda^3` component (before re-embedding).
    pub skew: KForm,
    /// Reconstruction defect of re-embedding and summing the components.
    pub residual_norm: f64,
}

impl TorsionDecomposition {
    /// Norms of the three re-embedded components.
    pub fn component_norms(&self) -> Result<(f64, f64, f64)> {
        Ok((
            TorsionTensor::embed_vectorial(&self.vectorial)?.norm(),
            self.twistorial.norm(),
            TorsionTensor::embed_skew(&self.skew)?.norm(),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorsionType {
    pub t1: bool,
    pub t2: bool,
    pub t3: bool,
    pub zero: bool,
}

impl TorsionType {
    pub fn twistor_free(&self) -> bool {
        !self.zero && !self.t2
    }

    pub fn twistor_like(&self) -> bool {
        self.t2 && !self.t1 && !self.t3
    }
}

impl fmt::Display for TorsionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "zero");
        }
        let mut parts = Vec::new();
        if self.t1 {
            parts.push("T1");
        }
        if self.t2 {
            parts.push("T2");
        }
        if self.t3 {
            parts.push("T3");
        }
        let label = if parts.is_empty() {
            "zero".to_string()
        } else {
            parts.join("\u{2295}")
        };
        if self.twistor_like() {
            write!(f, "{label} (twistor-like)")
        } else if self.twistor_free() {
            write!(f, "{label} (twistor-free)")
        } else {
            write!(f, "{label}")
        }
    }
}
