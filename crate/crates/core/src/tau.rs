//! The τ-Jacobi engine: decide when a 3-form turns the tangent space into a
//! compact-type Lie algebra, split off the kernel, decompose the support into
//! bricks, and run the two structural lemma checks.

use nalgebra::DVector;

use crate::error::{CoreError, Result};
use crate::exterior::{KForm, SkewEndo, Space};
use crate::lie::{LieTypeLabel, MetricLieAlgebra};
use crate::subspace;
use crate::tol::{TOL_DEFECT, TOL_RANK};

/// A 3-form τ on a Euclidean space, carrying the candidate bracket
/// `[X,Y] := τ_X Y`.
#[derive(Debug, Clone)]
pub struct TauStructure {
    space: Space,
    tau: KForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    Dim3Volume,
    SimpleAlgebra,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseTag::Dim3Volume => write!(f, "dim3-volume"),
            CaseTag::SimpleAlgebra => write!(f, "simple-algebra"),
        }
    }
}

/// One irreducible factor of the support of τ.
///
/// `scale` is the coefficient of τ restricted to the brick against the
/// lexicographically first basis monomial of the deterministic brick basis
/// (for a 3-dim brick this is the volume coefficient). It is exactly
/// equivariant under τ → λτ; only its magnitude is frame-independent.
/// `canonical_scale`, when the type label has a reference model, is the
/// frame-independent |s| with τ|_brick = s·(canonical form of the model).
#[derive(Debug, Clone)]
pub struct Brick {
    pub basis: Vec<DVector<f64>>,
    pub dim: usize,
    pub rank: usize,
    pub label: LieTypeLabel,
    pub scale: f64,
    pub canonical_scale: Option<f64>,
    pub case_tag: CaseTag,
}

#[derive(Debug, Clone, Copy)]
pub struct BrickDefects {
    pub tau_jacobi: f64,
    pub four_form: f64,
    pub cross_terms: f64,
}

#[derive(Debug, Clone)]
pub struct BrickReport {
    pub kernel_dim: usize,
    pub kernel_basis: Vec<DVector<f64>>,
    pub bricks: Vec<Brick>,
    pub defects: BrickDefects,
}

/// Outcome of a lemma check: either a verdict or a list of failed
/// preconditions (in which case no verdict is claimed).
#[derive(Debug, Clone)]
pub enum LemmaOutcome {
    Verdict { holds: bool, margin: f64 },
    Precondition(Vec<String>),
}

impl LemmaOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, LemmaOutcome::Verdict { holds: true, .. })
    }

    pub fn is_precondition_failure(&self) -> bool {
        matches!(self, LemmaOutcome::Precondition(_))
    }
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub outcome: LemmaOutcome,
    /// Set when the irreducibility proxy sees commutant dimension 2 or 4
    /// (complex/quaternionic type) instead of 1.
    pub warning: Option<String>,
}

impl TauStructure {
    pub fn new(tau: KForm) -> Result<Self> {
        if tau.degree() != 3 {
            return Err(CoreError::Degree(format!(
                "expected a 3-form, got degree {}",
                tau.degree()
            )));
        }
        Ok(TauStructure { space: tau.space(), tau })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn tau(&self) -> &KForm {
        &self.tau
    }

    pub fn kernel(&self) -> Result<Vec<DVector<f64>>> {
        self.tau.kernel()
    }

    /// Max over basis vectors X of ‖(τ_X)_* τ‖.
    pub fn tau_jacobi_defect(&self) -> Result<f64> {
        let n = self.space.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let tx = self.tau.slice(&self.space.basis_vector(i))?;
            worst = worst.max(tx.derivation_action(&self.tau)?.norm());
        }
        Ok(worst)
    }

    /// Same defect scaled by 1/‖τ‖² (defects are quadratic in τ).
    pub fn normalized_jacobi_defect(&self) -> Result<f64> {
        let n2 = self.tau.norm().powi(2);
        Ok(self.tau_jacobi_defect()? / n2.max(f64::MIN_POSITIVE))
    }

    /// Max over basis pairs of ‖[τ_X, τ_Y] − τ_{τ_X Y}‖.
    pub fn commutator_defect(&self) -> Result<f64> {
        let n = self.space.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let ti = self.tau.slice(&self.space.basis_vector(i))?;
            for j in (i + 1)..n {
                let ej = self.space.basis_vector(j);
                let tj = self.tau.slice(&ej)?;
                let lhs = ti.commutator(&tj)?;
                let rhs = self.tau.slice(&ti.apply(&ej))?;
                worst = worst.max((lhs.matrix() - rhs.matrix()).norm());
            }
        }
        Ok(worst)
    }

    /// ‖Σ_i (e_i ⌟ τ) ∧ (e_i ⌟ τ)‖.
    pub fn four_form_defect(&self) -> Result<f64> {
        Ok(self.tau.four_form_sum()?.norm())
    }

    /// The bracket `[X,Y] = τ_X Y` on an orthonormal basis of ker(τ)^⊥,
    /// together with the kernel and support bases.
    pub fn lie_from_tau(
        &self,
        tol: f64,
    ) -> Result<(MetricLieAlgebra, Vec<DVector<f64>>, Vec<DVector<f64>>)> {
        let defect = self.normalized_jacobi_defect()?;
        if defect > tol {
            return Err(CoreError::NotALieStructure(defect));
        }
        let n = self.space.dim();
        let kernel = self.kernel()?;
        let support = complement(&kernel, n);
        let m = support.len();
        let mut entries = Vec::new();
        for a in 0..m {
            for b in (a + 1)..m {
                for c in 0..m {
                    let v = self.tau.eval(&[
                        support[a].clone(),
                        support[b].clone(),
                        support[c].clone(),
                    ])?;
                    if v != 0.0 {
                        entries.push((a, b, c, v));
                    }
                }
            }
        }
        let space = Space::new(m)?;
        let alg = MetricLieAlgebra::from_entries(space, &entries)?;
        Ok((alg, kernel, support))
    }

    /// Kernel split plus simple-ideal bricks of the support algebra.
    pub fn classify_bricks(&self, seed: u64, tol: f64) -> Result<BrickReport> {
        let tau_jacobi = self.normalized_jacobi_defect()?;
        let four_form =
            self.four_form_defect()? / self.tau.norm().powi(2).max(f64::MIN_POSITIVE);
        if tau_jacobi > tol {
            return Err(CoreError::NotALieStructure(tau_jacobi));
        }
        let n = self.space.dim();
        let (alg, kernel, support) = self.lie_from_tau(tol)?;
        let mut bricks = Vec::new();
        if !support.is_empty() {
            let dec = alg.simple_ideal_decomposition(seed)?;
            if !dec.center.is_empty() {
                return Err(CoreError::Internal(
                    "support algebra of τ has a center despite trivial kernel".into(),
                ));
            }
            for ideal in &dec.ideals {
                // lift the ideal from support coordinates to the ambient space
                let lifted: Vec<DVector<f64>> = ideal
                    .iter()
                    .map(|v| {
                        support
                            .iter()
                            .enumerate()
                            .map(|(j, b)| b * v[j])
                            .fold(DVector::zeros(n), |a, b| a + b)
                    })
                    .collect();
                let basis = subspace::deterministic_basis(&lifted, n);
                bricks.push(self.build_brick(basis, seed)?);
            }
        }
        // τ must have no terms mixing distinct blocks (kernel or bricks)
        let mut blocks: Vec<&[DVector<f64>]> = vec![&kernel];
        for b in &bricks {
            blocks.push(&b.basis);
        }
        let cross_terms = self.cross_term_defect(&blocks)?
            / self.tau.norm().max(f64::MIN_POSITIVE);
        if cross_terms > tol {
            return Err(CoreError::Internal(format!(
                "τ has cross terms between blocks (relative size {cross_terms:.3e})"
            )));
        }
        Ok(BrickReport {
            kernel_dim: kernel.len(),
            kernel_basis: kernel,
            bricks,
            defects: BrickDefects {
                tau_jacobi,
                four_form,
                cross_terms,
            },
        })
    }

    fn build_brick(&self, basis: Vec<DVector<f64>>, seed: u64) -> Result<Brick> {
        let d = basis.len();
        let bspace = Space::new(d)?;
        let mut tau_b = KForm::zero(bspace, 3);
        for i in 0..d {
            for j in (i + 1)..d {
                for k in (j + 1)..d {
                    let v = self
                        .tau
                        .eval(&[basis[i].clone(), basis[j].clone(), basis[k].clone()])?;
                    tau_b.add_term(vec![i, j, k], v)?;
                }
            }
        }
        let tau_b = tau_b.prune(1e-13 * self.tau.norm().max(1.0));
        let local = TauStructure::new(tau_b.clone())?;
        let (alg, ker, _) = local.lie_from_tau(TOL_DEFECT)?;
        if !ker.is_empty() {
            return Err(CoreError::Internal(
                "brick restriction of τ has a nontrivial kernel".into(),
            ));
        }
        let label = alg.identify_type(seed);
        let rank = label.rank;
        // signed coefficient of the lexicographically first monomial
        let first_coeff = tau_b
            .coeffs()
            .map(|(_, &v)| v)
            .find(|v| v.abs() > 0.0)
            .unwrap_or(0.0);
        let canonical_scale = canonical_scale(&alg, &label);
        let (case_tag, scale) = if d == 3 {
            (CaseTag::Dim3Volume, tau_b.coeff(&[0, 1, 2]))
        } else {
            let magnitude = canonical_scale.unwrap_or_else(|| tau_b.norm());
            (CaseTag::SimpleAlgebra, first_coeff.signum() * magnitude)
        };
        Ok(Brick {
            basis,
            dim: d,
            rank,
            label,
            scale,
            canonical_scale,
            case_tag,
        })
    }

    fn cross_term_defect(&self, blocks: &[&[DVector<f64>]]) -> Result<f64> {
        let mut worst = 0.0f64;
        let flat: Vec<(usize, &DVector<f64>)> = blocks
            .iter()
            .enumerate()
            .flat_map(|(bi, bl)| bl.iter().map(move |v| (bi, v)))
            .collect();
        for a in 0..flat.len() {
            for b in (a + 1)..flat.len() {
                for c in (b + 1)..flat.len() {
                    let (ba, va) = flat[a];
                    let (bb, vb) = flat[b];
                    let (bc, vc) = flat[c];
                    if ba == bb && bb == bc {
                        continue;
                    }
                    let v = self.tau.eval(&[va.clone(), vb.clone(), vc.clone()])?;
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(worst)
    }
}

fn complement(vectors: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        let space = Space::new(n).expect("ambient dim");
        return (0..n).map(|i| space.basis_vector(i)).collect();
    }
    let mut rows = nalgebra::DMatrix::zeros(vectors.len(), n);
    for (r, v) in vectors.iter().enumerate() {
        rows.set_row(r, &v.transpose());
    }
    subspace::null_space(&rows, TOL_RANK)
}

/// Killing scalar of the reference model for a type label, in the frame
/// conventions of the builders in [`MetricLieAlgebra`]; `None` when no
/// model is wired up.
fn model_killing_scalar(label: &str) -> Option<f64> {
    match label {
        "A1" => Some(-2.0),  // su(2)
        "A2" => Some(-3.0),  // su(3)
        "A3" => Some(-8.0),  // so(6)
        "B2" => Some(-6.0),  // so(5)
        "B3" => Some(-10.0), // so(7)
        "B4" => Some(-14.0), // so(9)
        "D4" => Some(-12.0), // so(8)
        "D5" => Some(-16.0), // so(10)
        _ => None,
    }
}

/// |s| with τ|_brick = s · (canonical form of the model): if the brick
/// bracket is s·γ_m times the model bracket, its Killing scalar is s²γ_m³.
fn canonical_scale(alg: &MetricLieAlgebra, label: &LieTypeLabel) -> Option<f64> {
    if label.candidates.len() != 1 {
        return None;
    }
    let gamma_m = model_killing_scalar(&label.candidates[0])?;
    let b = alg.killing_form();
    let gamma_b = b.trace() / alg.dim() as f64;
    let ratio = gamma_b / gamma_m.powi(3);
    if ratio <= 0.0 {
        return None;
    }
    Some(ratio.sqrt())
}

/// Tests ρ(𝔥) ⊆ τ(V) = span{τ_{e_i}} by least squares, after checking the
/// lemma hypotheses (ρ-invariance of τ, trivial kernel, τ-Jacobi).
pub fn alglemma_check(rho: &[SkewEndo], s: &TauStructure, tol: f64) -> Result<LemmaReport> {
    let n = s.space().dim();
    let tau_norm = s.tau().norm().max(f64::MIN_POSITIVE);
    let mut diagnostics = Vec::new();
    for (k, a) in rho.iter().enumerate() {
        let res = a.derivation_action(s.tau())?.norm();
        if res > tol * a.norm().max(1.0) * tau_norm {
            diagnostics.push(format!(
                "invariance-failed: generator {k} moves τ (residual {res:.3e})"
            ));
        }
    }
    let kernel = s.kernel()?;
    if !kernel.is_empty() {
        diagnostics.push(format!("kernel-nontrivial: dim {}", kernel.len()));
    }
    let jd = s.normalized_jacobi_defect()?;
    if jd > tol {
        diagnostics.push(format!("jacobi-failed: normalized defect {jd:.3e}"));
    }
    if !diagnostics.is_empty() {
        return Ok(LemmaReport {
            outcome: LemmaOutcome::Precondition(diagnostics),
            warning: None,
        });
    }
    // columns of M span τ(V) inside Λ²
    let cols: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            s.tau()
                .contract(&s.space().basis_vector(i))
                .and_then(|f| f.two_form_vector())
        })
        .collect::<Result<_>>()?;
    let m = nalgebra::DMatrix::from_columns(&cols);
    let mut margin = 0.0f64;
    for a in rho {
        let nrm = a.norm();
        if nrm == 0.0 {
            continue;
        }
        let v = a.to_two_form()?.two_form_vector()?;
        margin = margin.max(subspace::containment_residual(&m, &v) / nrm);
    }
    Ok(LemmaReport {
        outcome: LemmaOutcome::Verdict {
            holds: margin <= tol,
            margin,
        },
        warning: None,
    })
}

/// For a representation acting blockwise on V₁ ⊕ V₂ (generator k acting as
/// `rho1[k]` on V₁ and `rho2[k]` on V₂) with ρ₁ irreducible, some generator
/// acting only on V₁, and τ invariant: checks τ(X₁, Y₂, Z₂) = 0.
pub fn lemmalg_check(
    rho1: &[SkewEndo],
    rho2: &[SkewEndo],
    s: &TauStructure,
    tol: f64,
) -> Result<LemmaReport> {
    if rho1.len() != rho2.len() {
        return Err(CoreError::DimensionMismatch(rho1.len(), rho2.len()));
    }
    let n1 = rho1.first().map_or(0, |a| a.space().dim());
    let n2 = rho2.first().map_or(0, |a| a.space().dim());
    let n = s.space().dim();
    if n1 + n2 != n {
        return Err(CoreError::DimensionMismatch(n1 + n2, n));
    }
    let mut diagnostics = Vec::new();
    let mut warning = None;
    // irreducibility proxy: commutant dimension of rho1
    let mats: Vec<nalgebra::DMatrix<f64>> =
        rho1.iter().map(|a| a.matrix().clone()).collect();
    match subspace::matrix_commutant(&mats, n1, TOL_RANK).len() {
        1 => {}
        d @ (2 | 4) => {
            warning = Some(format!(
                "commutant dimension {d}: complex/quaternionic type accepted"
            ));
        }
        d => diagnostics.push(format!("not-irreducible: commutant dimension {d}")),
    }
    let separating = rho1
        .iter()
        .zip(rho2)
        .any(|(a, b)| a.norm() > tol && b.norm() <= tol * a.norm());
    if !separating {
        diagnostics.push("no-separating-generator".into());
    }
    // invariance under the block-diagonal sum representation
    let tau_norm = s.tau().norm().max(f64::MIN_POSITIVE);
    for (k, (a, b)) in rho1.iter().zip(rho2).enumerate() {
        let mut block = nalgebra::DMatrix::zeros(n, n);
        block.view_mut((0, 0), (n1, n1)).copy_from(a.matrix());
        block.view_mut((n1, n1), (n2, n2)).copy_from(b.matrix());
        let sum = SkewEndo::new(s.space(), block)?;
        let res = sum.derivation_action(s.tau())?.norm();
        if res > tol * sum.norm().max(1.0) * tau_norm {
            diagnostics.push(format!(
                "invariance-failed: generator {k} moves τ (residual {res:.3e})"
            ));
        }
    }
    if !diagnostics.is_empty() {
        return Ok(LemmaReport {
            outcome: LemmaOutcome::Precondition(diagnostics),
            warning,
        });
    }
    let mut worst = 0.0f64;
    for x in 0..n1 {
        for y in 0..n2 {
            for z in (y + 1)..n2 {
                worst = worst.max(s.tau().coeff(&[x, n1 + y, n1 + z]).abs());
            }
        }
    }
    let margin = worst / tau_norm;
    Ok(LemmaReport {
        outcome: LemmaOutcome::Verdict {
            holds: margin <= tol,
            margin,
        },
        warning,
    })
}
