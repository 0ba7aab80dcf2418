//! Metric Lie algebras from structure constants in an orthonormal frame:
//! Jacobi verification, Killing form, compactness, simple-ideal splitting,
//! Cartan rank, type identification and the canonical 3-form.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::exterior::{KForm, Space};
use crate::subspace;
use crate::tol::TOL_RANK;

/// Structure constants `c_{ij}^k` with `[e_i, e_j] = Sum_k c_{ij}^k e_k`,
/// together with the identity inner product of the working frame.
#[derive(Debug, Clone)]
pub struct MetricLieAlgebra {
    space: Space,
    c: Vec<f64>,
}

/// Verdict of the compactness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactType {
    CompactSemisimple,
    CompactWithCenter,
    NonCompact,
    Invalid,
}

impl std::fmt::Display for CompactType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CompactType::CompactSemisimple => "compact-semisimple",
            CompactType::CompactWithCenter => "compact-with-center",
            CompactType::NonCompact => "non-compact",
            CompactType::Invalid => "invalid",
        };
        write!(f, "{s}")
    }
}

/// Orthogonal splitting into the center and simple ideals.
#[derive(Debug, Clone)]
pub struct IdealDecomposition {
    pub center: Vec<DVector<f64>>,
    pub ideals: Vec<Vec<DVector<f64>>>,
}

/// `(dim, rank)` lookup result for a compact simple algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieTypeLabel {
    pub dim: usize,
    pub rank: usize,
    pub candidates: Vec<String>,
}

/// Compact simple algebras through dimension 52 (up to F4).
const TYPE_TABLE: &[(usize, usize, &str)] = &[
    (3, 1, "A1"),
    (8, 2, "A2"),
    (10, 2, "B2"),
    (14, 2, "G2"),
    (15, 3, "A3"),
    (21, 3, "B3"),
    (21, 3, "C3"),
    (24, 4, "A4"),
    (28, 4, "D4"),
    (35, 5, "A5"),
    (36, 4, "B4"),
    (36, 4, "C4"),
    (45, 5, "D5"),
    (48, 6, "A6"),
    (52, 4, "F4"),
];

impl MetricLieAlgebra {
    pub fn from_constants(space: Space, c: Vec<f64>) -> Result<Self> {
        let n = space.dim();
        if c.len() != n * n * n {
            return Err(CoreError::DimensionMismatch(c.len(), n * n * n));
        }
        let alg = MetricLieAlgebra { space, c };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if (alg.c(i, j, k) + alg.c(j, i, k)).abs() > 1e-12 {
                        return Err(CoreError::Internal(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// Builds from the independent entries `(i, j, k, v)` with `i < j`,
    /// completing antisymmetry.
    pub fn from_entries(space: Space, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let n = space.dim();
        let mut c = vec![0.0; n * n * n];
        for &(i, j, k, v) in entries {
            if i >= n || j >= n || k >= n {
                return Err(CoreError::DimensionMismatch(i.max(j).max(k), n));
            }
            if i == j {
                return Err(CoreError::Internal(format!(
                    "diagonal bracket entry ({i},{j},{k})"
                )));
            }
            c[(i * n + j) * n + k] += v;
            c[(j * n + i) * n + k] -= v;
        }
        Ok(MetricLieAlgebra { space, c })
    }

    pub fn abelian(n: usize) -> Result<Self> {
        let space = Space::new(n)?;
        Ok(MetricLieAlgebra {
            space,
            c: vec![0.0; n * n * n],
        })
    }

    /// su(2) model: `c_{ij}^k` the Levi-Civita symbol.
    pub fn su2() -> Self {
        let space = Space::new(3).unwrap();
        MetricLieAlgebra::from_entries(
            space,
            &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)],
        )
        .unwrap()
    }

    /// su(3) model with the Gell-Mann `f`-constants.
    pub fn su3() -> Self {
        let space = Space::new(8).unwrap();
        let h = 0.5;
        let s = 3f64.sqrt() / 2.0;
        // totally antisymmetric generators f_{ijk}, 1-based in the literature
        let f: [(usize, usize, usize, f64); 9] = [
            (1, 2, 3, 1.0),
            (1, 4, 7, h),
            (1, 5, 6, -h),
            (2, 4, 6, h),
            (2, 5, 7, h),
            (3, 4, 5, h),
            (3, 6, 7, -h),
            (4, 5, 8, s),
            (6, 7, 8, s),
        ];
        let mut entries = Vec::new();
        for &(a, b, c, v) in &f {
            // expand the full antisymmetrization over i < j
            let perms: [(usize, usize, usize, f64); 3] = [
                (a - 1, b - 1, c - 1, v),
                (b - 1, c - 1, a - 1, v),
                (a - 1, c - 1, b - 1, -v),
            ];
            entries.extend_from_slice(&perms);
        }
        MetricLieAlgebra::from_entries(space, &entries).unwrap()
    }

    /// so(k) model on the orthonormal basis `L_ab = E_ab - E_ba`, `a < b`,
    /// ordered lexicographically.
    pub fn so(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(CoreError::DegenerateDimension(k));
        }
        let dim = k * (k - 1) / 2;
        let space = Space::new(dim)?;
        let pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|a| ((a + 1)..k).map(move |b| (a, b)))
            .collect();
        let index = |a: usize, b: usize| -> (usize, f64) {
            if a < b {
                (pairs.iter().position(|&p| p == (a, b)).unwrap(), 1.0)
            } else {
                (pairs.iter().position(|&p| p == (b, a)).unwrap(), -1.0)
            }
        };
        let mut entries = Vec::new();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for (j, &(c, d)) in pairs.iter().enumerate() {
                if i >= j {
                    continue;
                }
                // [L_ab, L_cd] = d_bc L_ad + d_ad L_bc - d_ac L_bd - d_bd L_ac
                let mut terms: Vec<(usize, usize, f64)> = Vec::new();
                if b == c && a != d {
                    terms.push((a, d, 1.0));
                }
                if a == d && b != c {
                    terms.push((b, c, 1.0));
                }
                if a == c && b != d {
                    terms.push((b, d, -1.0));
                }
                if b == d && a != c {
                    terms.push((a, c, -1.0));
                }
                for (x, y, sgn) in terms {
                    let (t, flip) = index(x, y);
                    entries.push((i, j, t, sgn * flip));
                }
            }
        }
        MetricLieAlgebra::from_entries(space, &entries)
    }

    /// Orthogonal direct sum with block-diagonal brackets.
    pub fn direct_sum(parts: &[&MetricLieAlgebra]) -> Result<Self> {
        let n: usize = parts.iter().map(|p| p.dim()).sum();
        let space = Space::new(n)?;
        let mut c = vec![0.0; n * n * n];
        let mut off = 0;
        for p in parts {
            let m = p.dim();
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        c[((off + i) * n + off + j) * n + off + k] = p.c(i, j, k);
                    }
                }
            }
            off += m;
        }
        Ok(MetricLieAlgebra { space, c })
    }

    /// Structure constants in the rotated frame `e~_i = Q e_i`.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if q.nrows() != n || q.ncols() != n {
            return Err(CoreError::DimensionMismatch(q.nrows(), n));
        }
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let v = q.transpose() * self.bracket(&q.column(i).into_owned(), &q.column(j).into_owned());
                for k in 0..n {
                    c[(i * n + j) * n + k] = v[k];
                }
            }
        }
        Ok(MetricLieAlgebra { space: self.space, c })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.c[(i * n + j) * n + k]
    }

    pub fn constants_norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `ad(e_i)` as a matrix (`[e_i, e_j]` in column `j`).
    pub fn ad(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |k, j| self.c(i, j, k))
    }

    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] != 0.0 {
                m += self.ad(i) * x[i];
            }
        }
        m
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad_of(x) * y
    }

    /// Max over basis triples of the cyclic Jacobi sum.
    pub fn jacobi_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let ei = self.space.basis_vector(i);
                    let ej = self.space.basis_vector(j);
                    let ek = self.space.basis_vector(k);
                    let s = self.bracket(&self.bracket(&ei, &ej), &ek)
                        + self.bracket(&self.bracket(&ej, &ek), &ei)
                        + self.bracket(&self.bracket(&ek, &ei), &ej);
                    worst = worst.max(s.norm());
                }
            }
        }
        worst
    }

    /// `B(X, Y) = Tr(ad X . ad Y)`.
    pub fn killing_form(&self) -> DMatrix<f64> {
        let n = self.dim();
        let ads: Vec<DMatrix<f64>> = (0..n).map(|i| self.ad(i)).collect();
        DMatrix::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace())
    }

    fn scale_tol(&self, base: f64) -> f64 {
        base * self.constants_norm().powi(2).max(1.0)
    }

    /// Max residual of `<[X,Y],Z> + <Y,[X,Z]>` over basis triples.
    pub fn metric_invariance_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.c(i, j, k) + self.c(i, k, j)).abs());
                }
            }
        }
        worst
    }

    pub fn is_compact_type(&self) -> CompactType {
        if self.jacobi_defect() > self.scale_tol(1e-10) {
            return CompactType::Invalid;
        }
        let inv_tol = 1e-10 * self.constants_norm().max(1.0);
        if self.metric_invariance_defect() > inv_tol {
            return CompactType::NonCompact;
        }
        let b = self.killing_form();
        let eig = nalgebra::SymmetricEigen::new(b);
        let smax = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
        if smax == 0.0 {
            // abelian
            return CompactType::CompactWithCenter;
        }
        let cut = 1e-9 * smax;
        let has_positive = eig.eigenvalues.iter().any(|&l| l > cut);
        if has_positive {
            return CompactType::NonCompact;
        }
        let has_kernel = eig.eigenvalues.iter().any(|&l| l.abs() <= cut);
        if !has_kernel {
            return CompactType::CompactSemisimple;
        }
        // the Killing kernel must be the center
        let kernel = subspace::null_space(&self.killing_form(), TOL_RANK);
        let central = kernel
            .iter()
            .all(|v| self.ad_of(v).norm() <= 1e-8 * self.constants_norm().max(1.0));
        if central {
            CompactType::CompactWithCenter
        } else {
            CompactType::NonCompact
        }
    }

    /// `{X : ad(X) = 0}` as a deterministic orthonormal basis.
    pub fn center(&self) -> Vec<DVector<f64>> {
        let n = self.dim();
        // stack the map x -> vec(ad x)
        let mut m = DMatrix::zeros(n * n, n);
        for i in 0..n {
            let a = self.ad(i);
            for (r, v) in a.iter().enumerate() {
                m[(r, i)] = *v;
            }
        }
        subspace::null_space(&m, TOL_RANK)
    }

    /// Structure constants restricted to an orthonormal sub-basis; also
    /// returns the worst closure defect.
    pub fn restricted(&self, basis: &[DVector<f64>]) -> Result<(MetricLieAlgebra, f64)> {
        let m = basis.len();
        let space = Space::new(m)?;
        let mut c = vec![0.0; m * m * m];
        let mut defect = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                let br = self.bracket(&basis[a], &basis[b]);
                let mut residual = br.clone();
                for (k, bk) in basis.iter().enumerate() {
                    let coeff = br.dot(bk);
                    c[(a * m + b) * m + k] = coeff;
                    residual -= bk * coeff;
                }
                defect = defect.max(residual.norm());
            }
        }
        Ok((MetricLieAlgebra { space, c }, defect))
    }

    /// Commutant `{M : M ad(X) = ad(X) M for all X}` of the adjoint
    /// representation, as a basis of matrices.
    pub fn adjoint_commutant(&self) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        let ads: Vec<DMatrix<f64>> = (0..n).map(|i| self.ad(i)).collect();
        subspace::matrix_commutant(&ads, n, TOL_RANK)
    }

    /// Orthogonal splitting into the Killing-kernel center and simple
    /// ideals, found through eigenspaces of a generic symmetric element of
    /// the adjoint commutant.
    pub fn simple_ideal_decomposition(&self, seed: u64) -> Result<IdealDecomposition> {
        match self.is_compact_type() {
            CompactType::CompactSemisimple | CompactType::CompactWithCenter => {}
            CompactType::Invalid => return Err(CoreError::InvalidAlgebra(self.jacobi_defect())),
            CompactType::NonCompact => return Err(CoreError::UnsupportedSignature),
        }
        let n = self.dim();
        let center = self.center();
        let semis = if center.is_empty() {
            (0..n).map(|i| self.space.basis_vector(i)).collect::<Vec<_>>()
        } else {
            let mut rows = DMatrix::zeros(center.len(), n);
            for (r, v) in center.iter().enumerate() {
                rows.set_row(r, &v.transpose());
            }
            subspace::null_space(&rows, TOL_RANK)
        };
        let mut ideals = Vec::new();
        if !semis.is_empty() {
            let (sub, defect) = self.restricted(&semis)?;
            if defect > 1e-9 * self.constants_norm().max(1.0) {
                return Err(CoreError::Internal(format!(
                    "semisimple part not closed under bracket (defect {defect:.3e})"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            split_ideals(&sub, &semis, &mut rng, &mut ideals, 0)?;
        }
        // sanity: cross brackets between distinct ideals vanish
        let tol = 1e-9 * self.constants_norm().max(1.0);
        for (a, ia) in ideals.iter().enumerate() {
            for ib in ideals.iter().skip(a + 1) {
                for x in ia {
                    for y in ib {
                        let nrm = self.bracket(x, y).norm();
                        if nrm > tol {
                            return Err(CoreError::Internal(format!(
                                "cross bracket between ideals has norm {nrm:.3e}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(IdealDecomposition { center, ideals })
    }

    /// Min over random elements of `dim ker(ad X)`.
    pub fn cartan_rank(&self, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..8)
            .map(|_| {
                let x = random_unit(self.dim(), &mut rng);
                subspace::null_space(&self.ad_of(&x), TOL_RANK).len()
            })
            .min()
            .unwrap()
    }

    /// Cartan subalgebra `ker(ad X)` for a generic regular element.
    pub fn cartan_subalgebra(&self, seed: u64) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<Vec<DVector<f64>>> = None;
        for _ in 0..8 {
            let x = random_unit(self.dim(), &mut rng);
            let ker = subspace::null_space(&self.ad_of(&x), TOL_RANK);
            if best.as_ref().map_or(true, |b| ker.len() < b.len()) {
                best = Some(ker);
            }
        }
        best.unwrap()
    }

    /// Root lengths with multiplicities, clustered into magnitude groups.
    /// Lengths are measured in the frame inner product; each root of the
    /// root system is counted once.
    pub fn root_length_clusters(&self, seed: u64) -> Vec<(f64, usize)> {
        let cartan = self.cartan_subalgebra(seed);
        if cartan.is_empty() {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        let h: DVector<f64> = cartan
            .iter()
            .map(|v| v * rng.gen_range(0.5..1.5))
            .fold(DVector::zeros(self.dim()), |a, b| a + b);
        let adh = self.ad_of(&h);
        let m = -(&adh * &adh);
        let eig = nalgebra::SymmetricEigen::new(m);
        let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l));
        let mut lengths = Vec::new();
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            if l > 1e-12 * lmax.max(1.0) && l > 1e-10 {
                let v = eig.eigenvectors.column(i).into_owned();
                let len2: f64 = cartan.iter().map(|hi| self.bracket(hi, &v).norm_squared()).sum();
                lengths.push(len2.sqrt());
            }
        }
        cluster(&mut lengths, 0.08)
    }

    /// `(dim, rank)` lookup with long/short-root refinement for the B/C
    /// collisions; unidentified inputs keep an empty candidate list.
    pub fn identify_type(&self, seed: u64) -> LieTypeLabel {
        let dim = self.dim();
        let rank = self.cartan_rank(seed);
        let mut candidates: Vec<String> = TYPE_TABLE
            .iter()
            .filter(|&&(d, r, _)| d == dim && r == rank)
            .map(|&(_, _, s)| s.to_string())
            .collect();
        if candidates.len() > 1 {
            // B_n vs C_n: B has more long roots than short, C the reverse
            let clusters = self.root_length_clusters(seed);
            if clusters.len() == 2 {
                let (short_count, long_count) = (clusters[0].1, clusters[1].1);
                let pick = if long_count > short_count { 'B' } else { 'C' };
                let refined: Vec<String> = candidates
                    .iter()
                    .filter(|c| c.starts_with(pick))
                    .cloned()
                    .collect();
                if refined.len() == 1 {
                    candidates = refined;
                }
            }
        }
        LieTypeLabel { dim, rank, candidates }
    }

    /// `w(X,Y,Z) = B([X,Y],Z)`.
    pub fn canonical_three_form(&self) -> Result<KForm> {
        let defect = self.jacobi_defect();
        if defect > self.scale_tol(1e-10) {
            return Err(CoreError::InvalidAlgebra(defect));
        }
        let b = self.killing_form();
        let n = self.dim();
        let mut w = KForm::zero(self.space, 3);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let v: f64 = (0..n).map(|l| self.c(i, j, l) * b[(l, k)]).sum();
                    w.add_term(vec![i, j, k], v)?;
                }
            }
        }
        Ok(w.prune(1e-14 * self.constants_norm().max(1.0)))
    }
}

fn split_ideals(
    sub: &MetricLieAlgebra,
    ambient_basis: &[DVector<f64>],
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Vec<DVector<f64>>>,
    depth: usize,
) -> Result<()> {
    if depth > 8 {
        return Err(CoreError::Internal("ideal splitting did not converge".into()));
    }
    let m = sub.dim();
    let commutant = sub.adjoint_commutant();
    if commutant.len() <= 1 {
        out.push(ambient_basis.to_vec());
        return Ok(());
    }
    let mut s = DMatrix::zeros(m, m);
    for mat in &commutant {
        let sym = (mat + mat.transpose()) * 0.5;
        s += sym * rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    }
    let eig = nalgebra::SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let spread = eig.eigenvalues.iter().fold(f64::MIN, |a, &l| a.max(l))
        - eig.eigenvalues.iter().fold(f64::MAX, |a, &l| a.min(l));
    let gap = (1e-6 * spread).max(1e-10);
    let mut groups: Vec<Vec<usize>> = vec![vec![order[0]]];
    for w in order.windows(2) {
        if (eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]]).abs() > gap {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(w[1]);
    }
    if groups.len() == 1 {
        // generic element failed to separate; retry with fresh coefficients
        return split_ideals(sub, ambient_basis, rng, out, depth + 1);
    }
    for g in groups {
        let vecs: Vec<DVector<f64>> = g
            .iter()
            .map(|&i| {
                // lift eigenvector coordinates to the ambient space
                let col = eig.eigenvectors.column(i);
                ambient_basis
                    .iter()
                    .enumerate()
                    .map(|(j, b)| b * col[j])
                    .fold(DVector::zeros(ambient_basis[0].len()), |a, b| a + b)
            })
            .collect();
        let basis = subspace::deterministic_basis(&vecs, ambient_basis[0].len());
        let (inner, _) = sub_restrict_ambient(sub, ambient_basis, &basis)?;
        split_ideals(&inner, &basis, rng, out, depth + 1)?;
    }
    Ok(())
}

/// Restriction helper: express ambient vectors in `ambient_basis` coordinates
/// and restrict `sub` to them.
fn sub_restrict_ambient(
    sub: &MetricLieAlgebra,
    ambient_basis: &[DVector<f64>],
    vectors: &[DVector<f64>],
) -> Result<(MetricLieAlgebra, f64)> {
    let coords: Vec<DVector<f64>> = vectors
        .iter()
        .map(|v| DVector::from_fn(ambient_basis.len(), |i, _| ambient_basis[i].dot(v)))
        .collect();
    sub.restricted(&coords)
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let nrm = v.norm();
        if nrm > 1e-3 {
            return v / nrm;
        }
    }
}

/// Haar-ish random rotation (QR of a Gaussian matrix, determinant +1).
pub fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    use rand_distr::StandardNormal;
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..n {
        if r[(i, i)] < 0.0 {
            let col = -q.column(i).into_owned();
            q.set_column(i, &col);
        }
    }
    if q.determinant() < 0.0 {
        let col = -q.column(0).into_owned();
        q.set_column(0, &col);
    }
    q
}

/// Sorted clustering of scalar values with relative gap `rel`.
fn cluster(values: &mut [f64], rel: f64) -> Vec<(f64, usize)> {
    if values.is_empty() {
        return Vec::new();
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let boundary = i == values.len()
            || (values[i] - values[i - 1]) > rel * values[i].max(values[i - 1]);
        if boundary {
            let slice = &values[start..i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            groups.push((mean, slice.len()));
            start = i;
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn su2_jacobi_and_killing() {
        let l = MetricLieAlgebra::su2();
        assert!(l.jacobi_defect() < 1e-14);
        let b = l.killing_form();
        assert!((b + DMatrix::identity(3, 3) * 2.0).norm() < 1e-12);
        assert_eq!(l.is_compact_type(), CompactType::CompactSemisimple);
    }

    #[test]
    fn jacobi_negative_control() {
        // [e1,e2] = e1, [e1,e3] = e2: cyclic sum at (e1,e2,e3) is e2
        let s = Space::new(3).unwrap();
        let l = MetricLieAlgebra::from_entries(s, &[(0, 1, 0, 1.0), (0, 2, 1, 1.0)]).unwrap();
        assert!(l.jacobi_defect() > 0.5);
        assert_eq!(l.is_compact_type(), CompactType::Invalid);
    }

    #[test]
    fn abelian_properties() {
        let l = MetricLieAlgebra::abelian(3).unwrap();
        assert_eq!(l.jacobi_defect(), 0.0);
        assert_eq!(l.killing_form().norm(), 0.0);
        assert_eq!(l.is_compact_type(), CompactType::CompactWithCenter);
        let d = l.simple_ideal_decomposition(42).unwrap();
        assert_eq!(d.center.len(), 3);
        assert!(d.ideals.is_empty());
    }

    #[test]
    fn non_compact_two_dim() {
        // [e1, e2] = e2: the identity product is not ad-invariant
        let s = Space::new(2).unwrap();
        let l = MetricLieAlgebra::from_entries(s, &[(0, 1, 1, 1.0)]).unwrap();
        assert!(l.jacobi_defect() < 1e-15);
        assert!((l.c(0, 1, 1) - 1.0).abs() < 1e-15);
        assert_eq!(l.is_compact_type(), CompactType::NonCompact);
    }

    #[test]
    fn direct_sum_killing_blocks() {
        let l = MetricLieAlgebra::direct_sum(&[&MetricLieAlgebra::su2(), &MetricLieAlgebra::su2()])
            .unwrap();
        let b = l.killing_form();
        assert!((b + DMatrix::identity(6, 6) * 2.0).norm() < 1e-12);
    }

    #[test]
    fn su3_is_compact_simple_rank_two() {
        let l = MetricLieAlgebra::su3();
        assert!(l.jacobi_defect() < 1e-13);
        let b = l.killing_form();
        assert!((b + DMatrix::identity(8, 8) * 3.0).norm() < 1e-12);
        assert_eq!(l.is_compact_type(), CompactType::CompactSemisimple);
        assert_eq!(l.cartan_rank(42), 2);
        assert_eq!(l.identify_type(42).candidates, vec!["A2".to_string()]);
    }

    #[test]
    fn so4_splits_into_two_ideals() {
        let l = MetricLieAlgebra::so(4).unwrap();
        assert!(l.jacobi_defect() < 1e-13);
        assert_eq!(l.is_compact_type(), CompactType::CompactSemisimple);
        let d = l.simple_ideal_decomposition(42).unwrap();
        assert!(d.center.is_empty());
        assert_eq!(d.ideals.len(), 2);
        assert_eq!(d.ideals[0].len(), 3);
        assert_eq!(d.ideals[1].len(), 3);
    }

    #[test]
    fn su2_plus_abelian_center() {
        let l = MetricLieAlgebra::direct_sum(&[
            &MetricLieAlgebra::su2(),
            &MetricLieAlgebra::abelian(2).unwrap(),
        ])
        .unwrap();
        assert_eq!(l.is_compact_type(), CompactType::CompactWithCenter);
        let d = l.simple_ideal_decomposition(42).unwrap();
        assert_eq!(d.center.len(), 2);
        assert_eq!(d.ideals.len(), 1);
        assert_eq!(d.ideals[0].len(), 3);
    }

    #[test]
    fn so5_rank_and_type() {
        let l = MetricLieAlgebra::so(5).unwrap();
        assert_eq!(l.dim(), 10);
        assert_eq!(l.is_compact_type(), CompactType::CompactSemisimple);
        assert_eq!(l.cartan_rank(42), 2);
        assert_eq!(l.identify_type(42).candidates, vec!["B2".to_string()]);
    }

    #[test]
    fn so7_refines_to_b3() {
        let l = MetricLieAlgebra::so(7).unwrap();
        assert_eq!(l.dim(), 21);
        let label = l.identify_type(42);
        assert_eq!(label.rank, 3);
        assert_eq!(label.candidates, vec!["B3".to_string()]);
    }

    #[test]
    fn cartan_rank_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let l = MetricLieAlgebra::su3();
        let q = random_rotation(8, &mut rng);
        let lr = l.conjugate(&q).unwrap();
        assert!(lr.jacobi_defect() < 1e-12);
        assert_eq!(lr.cartan_rank(42), l.cartan_rank(42));
    }

    #[test]
    fn canonical_three_form_su2() {
        let w = MetricLieAlgebra::su2().canonical_three_form().unwrap();
        assert_abs_diff_eq!(w.coeff(&[0, 1, 2]), -2.0, epsilon = 1e-14);
        let z = MetricLieAlgebra::abelian(3)
            .unwrap()
            .canonical_three_form()
            .unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn canonical_three_form_invariance() {
        for l in [MetricLieAlgebra::su2(), MetricLieAlgebra::su3()] {
            let w = l.canonical_three_form().unwrap();
            // (w_X)_* w = 0 for all basis X
            for i in 0..l.dim() {
                let wx = w.slice(&l.space().basis_vector(i)).unwrap();
                assert!(wx.derivation_action(&w).unwrap().norm() < 1e-10);
            }
            assert!(w.four_form_sum().unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn killing_ad_invariance() {
        let l = MetricLieAlgebra::su3();
        let b = l.killing_form();
        let n = l.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs: f64 = (0..n).map(|p| l.c(i, j, p) * b[(p, k)]).sum();
                    let rhs: f64 = (0..n).map(|p| l.c(i, k, p) * b[(j, p)]).sum();
                    assert!((lhs + rhs).abs() < 1e-9);
                }
            }
        }
    }
}
