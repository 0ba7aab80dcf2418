//! Symmetric-pair models of type II (h ⊕ h, diagonal isotropy) and type IV
//! (the non-compact dual on h ⊕ h with the complexified bracket), the
//! invariant 3-form on 𝔪, and the reconstruction maps φ, Ψ₋, Ψ₊.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::exterior::{KForm, SkewEndo, Space};
use crate::lie::{CompactType, MetricLieAlgebra};
use crate::subspace;
use crate::tol::TOL_RANK;

/// A pair (𝔤, 𝔥 ⊕ 𝔪) with the ε-extended scalar product and the
/// normalized embedding ψ: 𝔥-model → 𝔪.
#[derive(Debug, Clone)]
pub struct SymmetricPairModel {
    pub g: MetricLieAlgebra,
    pub h: MetricLieAlgebra,
    pub h_basis: Vec<DVector<f64>>,
    pub m_basis: Vec<DVector<f64>>,
    pub epsilon: f64,
    /// ψ into the ambient space of `g`, one column per generator of `h`.
    pub psi: DMatrix<f64>,
    /// Normalization factor absorbed into ψ (1/√2 for type II, 1 for IV).
    pub psi_scale: f64,
}

/// Abstract datum (𝔥, λ, τ) extracted from a pair model: the isotropy
/// algebra in its 𝔥-basis coordinates, its representation on 𝔪, and the
/// invariant 3-form on 𝔪.
#[derive(Debug, Clone)]
pub struct SymmetricTriple {
    pub h: MetricLieAlgebra,
    pub lambda: Vec<SkewEndo>,
    pub tau: KForm,
}

#[derive(Debug, Clone, Copy)]
pub struct PairResiduals {
    pub mh_inclusions: f64,
    pub epsilon_identity: f64,
    pub killing_cross: f64,
    pub orthogonality: f64,
}

#[derive(Debug, Clone)]
pub struct PhiReport {
    /// Isometry 𝔥 → 𝔪 in the bases of the triple.
    pub phi: DMatrix<f64>,
    /// Scalar removed while normalizing φ to an isometry.
    pub scale: f64,
    pub containment_residual: f64,
    pub isometry_residual: f64,
    /// Residual of [φ(A), B] = φ([A, B]).
    pub id1_residual: f64,
    /// Residual of [φ(A), φ(B)] = −ε[A, B].
    pub ident_residual: f64,
}

fn require_compact_simple(h: &MetricLieAlgebra) -> Result<()> {
    if h.is_compact_type() != CompactType::CompactSemisimple {
        return Err(CoreError::Precondition(format!(
            "base algebra must be compact semisimple, got {}",
            h.is_compact_type()
        )));
    }
    if h.adjoint_commutant().len() != 1 {
        return Err(CoreError::Precondition(
            "base algebra must be simple".into(),
        ));
    }
    Ok(())
}

/// Compact model 𝔤 = h ⊕ h, 𝔥 the diagonal, 𝔪 the antidiagonal, ε = −1.
pub fn build_type_ii(h: &MetricLieAlgebra) -> Result<SymmetricPairModel> {
    require_compact_simple(h)?;
    let m = h.dim();
    let g = MetricLieAlgebra::direct_sum(&[h, h])?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h_basis = Vec::new();
    let mut m_basis = Vec::new();
    for i in 0..m {
        let mut hv = DVector::zeros(2 * m);
        hv[i] = s;
        hv[m + i] = s;
        h_basis.push(hv);
        let mut mv = DVector::zeros(2 * m);
        mv[i] = s;
        mv[m + i] = -s;
        m_basis.push(mv);
    }
    let psi = DMatrix::from_columns(&m_basis);
    Ok(SymmetricPairModel {
        g,
        h: h.clone(),
        h_basis,
        m_basis,
        epsilon: -1.0,
        psi,
        psi_scale: s,
    })
}

/// Non-compact dual realized on h ⊕ h with the complexified bracket
/// [(A,B),(A′,B′)] = ([A,A′] − [B,B′], [A,B′] + [B,A′]); 𝔪 = second
/// summand ("i𝔥"), ε = +1.
pub fn build_type_iv(h: &MetricLieAlgebra) -> Result<SymmetricPairModel> {
    require_compact_simple(h)?;
    let m = h.dim();
    let space = Space::new(2 * m)?;
    let mut entries = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let c = h.c(i, j, k);
                if c == 0.0 {
                    continue;
                }
                if i < j {
                    entries.push((i, j, k, c));
                    entries.push((m + i, m + j, k, -c));
                }
                entries.push((i, m + j, m + k, c));
            }
        }
    }
    let g = MetricLieAlgebra::from_entries(space, &entries)?;
    let h_basis: Vec<DVector<f64>> = (0..m).map(|i| space.basis_vector(i)).collect();
    let m_basis: Vec<DVector<f64>> = (0..m).map(|i| space.basis_vector(m + i)).collect();
    let psi = DMatrix::from_columns(&m_basis);
    Ok(SymmetricPairModel {
        g,
        h: h.clone(),
        h_basis,
        m_basis,
        epsilon: 1.0,
        psi,
        psi_scale: 1.0,
    })
}

impl SymmetricPairModel {
    fn projector_h(&self) -> DMatrix<f64> {
        subspace::projector(&self.h_basis, self.g.dim())
    }

    fn projector_m(&self) -> DMatrix<f64> {
        subspace::projector(&self.m_basis, self.g.dim())
    }

    /// Residuals of the defining invariants; all should be ≤ 1e-10 for
    /// built models.
    pub fn validate(&self) -> PairResiduals {
        let ph = self.projector_h();
        let pm = self.projector_m();
        let mut mh = 0.0f64;
        for x in &self.h_basis {
            for y in &self.h_basis {
                mh = mh.max((&pm * self.g.bracket(x, y)).norm());
            }
            for y in &self.m_basis {
                mh = mh.max((&ph * self.g.bracket(x, y)).norm());
            }
        }
        for x in &self.m_basis {
            for y in &self.m_basis {
                mh = mh.max((&pm * self.g.bracket(x, y)).norm());
            }
        }
        let mut eps = 0.0f64;
        for x in &self.m_basis {
            for y in &self.m_basis {
                for a in &self.h_basis {
                    let lhs = self.g.bracket(x, y).dot(a);
                    let rhs = self.epsilon * y.dot(&self.g.bracket(x, a));
                    eps = eps.max((lhs - rhs).abs());
                }
            }
        }
        let b = self.g.killing_form();
        let mut cross = 0.0f64;
        let mut ortho = 0.0f64;
        for x in &self.h_basis {
            for y in &self.m_basis {
                cross = cross.max((x.transpose() * &b * y)[(0, 0)].abs());
                ortho = ortho.max(x.dot(y).abs());
            }
        }
        PairResiduals {
            mh_inclusions: mh,
            epsilon_identity: eps,
            killing_cross: cross,
            orthogonality: ortho,
        }
    }

    /// Pullback of the canonical form of 𝔥 through ψ⁻¹, in 𝔪-basis
    /// coordinates.
    pub fn example_tau(&self) -> Result<KForm> {
        let m = self.h.dim();
        let omega = self.h.canonical_three_form()?;
        // ψ in m-basis coordinates
        let pm = DMatrix::from_fn(m, m, |j, i| self.m_basis[j].dot(&self.psi.column(i)));
        let inv = pm
            .clone()
            .try_inverse()
            .ok_or_else(|| CoreError::Singular("ψ is not invertible".into()))?;
        let mspace = Space::new(m)?;
        let mut tau = KForm::zero(mspace, 3);
        for i in 0..m {
            for j in (i + 1)..m {
                for k in (j + 1)..m {
                    let v = omega.eval(&[
                        inv.column(i).into_owned(),
                        inv.column(j).into_owned(),
                        inv.column(k).into_owned(),
                    ])?;
                    tau.add_term(vec![i, j, k], v)?;
                }
            }
        }
        Ok(tau.prune(1e-14 * omega.norm().max(1.0)))
    }

    /// The abstract (𝔥, λ, τ) datum in the coordinates of `h_basis` and
    /// `m_basis`.
    pub fn extract_triple(&self) -> Result<SymmetricTriple> {
        let m = self.h.dim();
        let (h_res, defect) = self.g.restricted(&self.h_basis)?;
        if defect > 1e-10 * self.g.constants_norm().max(1.0) {
            return Err(CoreError::Precondition(format!(
                "𝔥 is not closed under the bracket (defect {defect:.3e})"
            )));
        }
        let mspace = Space::new(m)?;
        let mut lambda = Vec::new();
        for a in &self.h_basis {
            let mat = DMatrix::from_fn(m, m, |j, i| {
                self.m_basis[j].dot(&self.g.bracket(a, &self.m_basis[i]))
            });
            lambda.push(SkewEndo::new(mspace, mat)?);
        }
        Ok(SymmetricTriple {
            h: h_res,
            lambda,
            tau: self.example_tau()?,
        })
    }
}

impl SymmetricTriple {
    pub fn m_dim(&self) -> usize {
        self.tau.space().dim()
    }

    /// Bracket of 𝔪 elements, landing in 𝔥-coordinates, reconstructed
    /// from λ and ε via ⟨[X,Y],A⟩ = −ε⟨Y, λ(A)X⟩.
    pub fn m_bracket(&self, x: &DVector<f64>, y: &DVector<f64>, epsilon: f64) -> DVector<f64> {
        DVector::from_fn(self.h.dim(), |k, _| {
            -epsilon * y.dot(&self.lambda[k].apply(x))
        })
    }

    /// Residual of λ being a representation of 𝔥.
    pub fn representation_defect(&self) -> Result<f64> {
        let n = self.h.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let comm = self.lambda[i].commutator(&self.lambda[j])?;
                let mut expected = DMatrix::zeros(self.m_dim(), self.m_dim());
                for k in 0..n {
                    expected += self.lambda[k].matrix() * self.h.c(i, j, k);
                }
                worst = worst.max((comm.matrix() - expected).norm());
            }
        }
        Ok(worst)
    }

    /// Residual of the invariance [λ(A), τ_X] = τ_{λ(A)X}.
    pub fn invariance_defect(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for l in &self.lambda {
            worst = worst.max(l.derivation_action(&self.tau)?.norm());
        }
        Ok(worst)
    }
}

/// Solves τ(φ(A)) = λ(A) per generator by least squares, then normalizes φ
/// to an isometry; ε is needed to reconstruct the 𝔪-bracket for the
/// Eq.-(ident) residual.
pub fn recover_phi(t: &SymmetricTriple, epsilon: f64) -> Result<PhiReport> {
    let m = t.m_dim();
    let hn = t.h.dim();
    let mspace = t.tau.space();
    let cols: Vec<DVector<f64>> = (0..m)
        .map(|i| {
            t.tau
                .contract(&mspace.basis_vector(i))
                .and_then(|f| f.two_form_vector())
        })
        .collect::<Result<_>>()?;
    let mat = DMatrix::from_columns(&cols);
    if subspace::rank(&mat, TOL_RANK) < m {
        return Err(CoreError::Precondition(
            "τ is not injective as a map 𝔪 → Λ²𝔪".into(),
        ));
    }
    let mut phi_raw = DMatrix::zeros(m, hn);
    let mut containment = 0.0f64;
    for (k, l) in t.lambda.iter().enumerate() {
        let v = l.to_two_form()?.two_form_vector()?;
        let x = subspace::least_squares(&mat, &v);
        let res = (&mat * &x - &v).norm();
        let nrm = v.norm();
        if nrm > 0.0 {
            containment = containment.max(res / nrm);
        }
        phi_raw.set_column(k, &x);
    }
    if containment > 1e-8 {
        return Err(CoreError::Precondition(format!(
            "λ(𝔥) is not contained in τ(𝔪) (residual {containment:.3e})"
        )));
    }
    let gram = phi_raw.transpose() * &phi_raw;
    let scale = (gram.trace() / hn as f64).sqrt();
    if scale <= 0.0 {
        return Err(CoreError::Singular("recovered φ vanishes".into()));
    }
    let phi = phi_raw / scale;
    let isometry_residual =
        (phi.transpose() * &phi - DMatrix::identity(hn, hn)).norm();
    // [φ(A), B] = −λ(B)φ(A) must equal φ([A, B])
    let mut id1 = 0.0f64;
    for a in 0..hn {
        for b in 0..hn {
            let lhs = -(t.lambda[b].apply(&phi.column(a).into_owned()));
            let ab = DVector::from_fn(hn, |k, _| t.h.c(a, b, k));
            let rhs = &phi * ab;
            id1 = id1.max((lhs - rhs).norm());
        }
    }
    let mut ident = 0.0f64;
    for a in 0..hn {
        for b in (a + 1)..hn {
            let lhs = t.m_bracket(
                &phi.column(a).into_owned(),
                &phi.column(b).into_owned(),
                epsilon,
            );
            let rhs = DVector::from_fn(hn, |k, _| -epsilon * t.h.c(a, b, k));
            ident = ident.max((lhs - rhs).norm());
        }
    }
    Ok(PhiReport {
        phi,
        scale,
        containment_residual: containment,
        isometry_residual,
        id1_residual: id1,
        ident_residual: ident,
    })
}

/// Builds Ψ₋ (ε = −1) or Ψ₊ (ε = +1) from a recovered φ and returns the
/// worst structure-constant mismatch ‖Ψ([u,v]) − [Ψu, Ψv]‖.
pub fn build_psi_maps(t: &SymmetricTriple, phi: &DMatrix<f64>, epsilon: f64) -> Result<f64> {
    let hn = t.h.dim();
    let m = t.m_dim();
    if phi.nrows() != m || phi.ncols() != hn {
        return Err(CoreError::DimensionMismatch(phi.nrows(), m));
    }
    // codomain 𝔥 ⊕ 𝔪 with the bracket assembled from the triple
    let cobracket = |u: &DVector<f64>, v: &DVector<f64>| -> DVector<f64> {
        let (uh, um) = (u.rows(0, hn).into_owned(), u.rows(hn, m).into_owned());
        let (vh, vm) = (v.rows(0, hn).into_owned(), v.rows(hn, m).into_owned());
        let mut rh = t.h.bracket(&uh, &vh) + t.m_bracket(&um, &vm, epsilon);
        let mut rm = DVector::zeros(m);
        for k in 0..hn {
            rm += t.lambda[k].apply(&vm) * uh[k];
            rm -= t.lambda[k].apply(&um) * vh[k];
        }
        let mut out = DVector::zeros(hn + m);
        out.rows_mut(0, hn).copy_from(&mut rh.rows_mut(0, hn));
        out.rows_mut(hn, m).copy_from(&mut rm.rows_mut(0, m));
        out
    };
    // domain h ⊕ h: componentwise for ε = −1, complexified for ε = +1
    let dombracket = |u: &DVector<f64>, v: &DVector<f64>| -> DVector<f64> {
        let (ua, ub) = (u.rows(0, hn).into_owned(), u.rows(hn, hn).into_owned());
        let (va, vb) = (v.rows(0, hn).into_owned(), v.rows(hn, hn).into_owned());
        let (ra, rb) = if epsilon < 0.0 {
            (t.h.bracket(&ua, &va), t.h.bracket(&ub, &vb))
        } else {
            (
                t.h.bracket(&ua, &va) - t.h.bracket(&ub, &vb),
                t.h.bracket(&ua, &vb) + t.h.bracket(&ub, &va),
            )
        };
        let mut out = DVector::zeros(2 * hn);
        out.rows_mut(0, hn).copy_from(&ra);
        out.rows_mut(hn, hn).copy_from(&rb);
        out
    };
    let psi = |u: &DVector<f64>| -> DVector<f64> {
        let (a, b) = (u.rows(0, hn).into_owned(), u.rows(hn, hn).into_owned());
        let mut out = DVector::zeros(hn + m);
        if epsilon < 0.0 {
            // Ψ₋(A, B) = ½(A + B + φ(A − B))
            out.rows_mut(0, hn).copy_from(&((&a + &b) * 0.5));
            out.rows_mut(hn, m).copy_from(&(phi * (&a - &b) * 0.5));
        } else {
            // Ψ₊(A + iB) = A + φ(B)
            out.rows_mut(0, hn).copy_from(&a);
            out.rows_mut(hn, m).copy_from(&(phi * b));
        }
        out
    };
    let mut defect = 0.0f64;
    let dom = 2 * hn;
    for i in 0..dom {
        for j in (i + 1)..dom {
            let mut u = DVector::zeros(dom);
            u[i] = 1.0;
            let mut v = DVector::zeros(dom);
            v[j] = 1.0;
            let lhs = psi(&dombracket(&u, &v));
            let rhs = cobracket(&psi(&u), &psi(&v));
            defect = defect.max((lhs - rhs).norm());
        }
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tau::{alglemma_check, TauStructure};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn models() -> Vec<SymmetricPairModel> {
        let su2 = MetricLieAlgebra::su2();
        let su3 = MetricLieAlgebra::su3();
        vec![
            build_type_ii(&su2).unwrap(),
            build_type_ii(&su3).unwrap(),
            build_type_iv(&su2).unwrap(),
            build_type_iv(&su3).unwrap(),
        ]
    }

    #[test]
    fn builders_pass_invariants() {
        for p in models() {
            let r = p.validate();
            assert!(r.mh_inclusions < 1e-10, "mh {:.3e}", r.mh_inclusions);
            assert!(r.epsilon_identity < 1e-10, "eps {:.3e}", r.epsilon_identity);
            assert!(r.killing_cross < 1e-9, "cross {:.3e}", r.killing_cross);
            assert!(r.orthogonality < 1e-12);
        }
    }

    #[test]
    fn epsilon_signs() {
        let su2 = MetricLieAlgebra::su2();
        assert_eq!(build_type_ii(&su2).unwrap().epsilon, -1.0);
        assert_eq!(build_type_iv(&su2).unwrap().epsilon, 1.0);
    }

    #[test]
    fn rejects_bad_bases() {
        let ab = MetricLieAlgebra::abelian(3).unwrap();
        assert!(build_type_ii(&ab).is_err());
        let so4 = MetricLieAlgebra::so(4).unwrap();
        assert!(build_type_ii(&so4).is_err(), "so(4) is not simple");
    }

    #[test]
    fn type_iv_killing_positive_on_m() {
        let p = build_type_iv(&MetricLieAlgebra::su2()).unwrap();
        let b = p.g.killing_form();
        for y in &p.m_basis {
            let v = (y.transpose() * &b * y)[(0, 0)];
            assert!(v > 0.0, "B(Y,Y) = {v}");
        }
        // ... and negative on 𝔥
        for x in &p.h_basis {
            assert!((x.transpose() * &b * x)[(0, 0)] < 0.0);
        }
    }

    #[test]
    fn example_tau_volume_and_jacobi() {
        for p in models() {
            let tau = p.example_tau().unwrap();
            let s = TauStructure::new(tau.clone()).unwrap();
            assert!(s.normalized_jacobi_defect().unwrap() < 1e-10);
            if p.h.dim() == 3 {
                // dim-3 𝔪 forces a multiple of the volume form
                assert!((tau.coeff(&[0, 1, 2]).abs() - 2.0).abs() < 1e-12);
            }
            let t = p.extract_triple().unwrap();
            assert!(t.representation_defect().unwrap() < 1e-10);
            assert!(t.invariance_defect().unwrap() < 1e-10);
        }
    }

    #[test]
    fn recover_phi_round_trip() {
        for p in models() {
            let t = p.extract_triple().unwrap();
            let rep = recover_phi(&t, p.epsilon).unwrap();
            assert!(rep.isometry_residual < 1e-9, "iso {:.3e}", rep.isometry_residual);
            assert!(rep.id1_residual < 1e-9, "id1 {:.3e}", rep.id1_residual);
            assert!(rep.ident_residual < 1e-9, "ident {:.3e}", rep.ident_residual);
            let defect = build_psi_maps(&t, &rep.phi, p.epsilon).unwrap();
            assert!(defect < 1e-9, "Ψ defect {defect:.3e} (ε = {})", p.epsilon);
        }
    }

    #[test]
    fn scaled_tau_same_phi() {
        let p = build_type_ii(&MetricLieAlgebra::su2()).unwrap();
        let mut t = p.extract_triple().unwrap();
        let r1 = recover_phi(&t, p.epsilon).unwrap();
        t.tau = t.tau.scale(5.0);
        let r2 = recover_phi(&t, p.epsilon).unwrap();
        assert!((&r1.phi - &r2.phi).norm() < 1e-10);
    }

    #[test]
    fn perturbed_phi_negative_control() {
        let p = build_type_ii(&MetricLieAlgebra::su2()).unwrap();
        let t = p.extract_triple().unwrap();
        let rep = recover_phi(&t, p.epsilon).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = DMatrix::from_fn(rep.phi.nrows(), rep.phi.ncols(), |_, _| {
            rng.gen_range(-0.01..0.01)
        });
        let perturbed = &rep.phi + noise;
        let defect = build_psi_maps(&t, &perturbed, p.epsilon).unwrap();
        assert!(defect > 1e-3, "defect {defect:.3e}");
    }

    #[test]
    fn alglemma_on_builder_instances() {
        for p in models() {
            let t = p.extract_triple().unwrap();
            let s = TauStructure::new(t.tau.clone()).unwrap();
            let rep = alglemma_check(&t.lambda, &s, 1e-8).unwrap();
            assert!(rep.outcome.holds(), "{:?}", rep.outcome);
        }
    }
}
