//! Numerical subspace helpers: null spaces, deterministic orthonormal bases,
//! least-squares containment tests.

use nalgebra::{DMatrix, DVector};

/// Right null space of `m` via SVD; singular values below
/// `tol * sigma_max` count as zero. Vectors are returned through
/// [`deterministic_basis`], so the result depends only on the subspace.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        return (0..ncols)
            .map(|i| {
                let mut v = DVector::zeros(ncols);
                v[i] = 1.0;
                v
            })
            .collect();
    }
    // pad wide matrices with zero rows so the thin SVD carries the full
    // right singular basis
    let a = if m.nrows() < ncols {
        m.clone().insert_rows(m.nrows(), ncols - m.nrows(), 0.0)
    } else {
        m.clone()
    };
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("svd v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = tol * smax;
    let mut raw = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            raw.push(v_t.row(i).transpose());
        }
    }
    deterministic_basis(&raw, ncols)
}

/// Numerical rank with a relative singular-value cutoff.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol * smax).count()
}

/// Orthogonal projector onto the span of `vectors`.
pub fn projector(vectors: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let basis = gram_schmidt(vectors, 1e-10);
    let mut p = DMatrix::zeros(dim, dim);
    for b in &basis {
        p += b * b.transpose();
    }
    p
}

/// Orthonormal basis of a span, canonical in the sense that it depends only
/// on the subspace: the ambient frame vectors are projected onto the span and
/// orthonormalized in frame order.
pub fn deterministic_basis(vectors: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let p = projector(vectors, dim);
    let candidates: Vec<DVector<f64>> = (0..dim).map(|i| p.column(i).into_owned()).collect();
    gram_schmidt(&candidates, 1e-8)
}

/// Classical Gram-Schmidt with re-orthogonalization, dropping vectors whose
/// residual norm falls below `tol`.
pub fn gram_schmidt(vectors: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if n > tol {
            basis.push(w / n);
        }
    }
    basis
}

/// Basis of `{M : M A = A M for every A in mats}` on `R^n`.
pub fn matrix_commutant(mats: &[DMatrix<f64>], n: usize, tol: f64) -> Vec<DMatrix<f64>> {
    let mut rows = DMatrix::zeros(mats.len() * n * n, n * n);
    for (g, a) in mats.iter().enumerate() {
        // vec index (p, q) -> p * n + q; constraint (M A - A M)_{pq} = 0
        for p in 0..n {
            for q in 0..n {
                let row = g * n * n + p * n + q;
                for r in 0..n {
                    rows[(row, p * n + r)] += a[(r, q)];
                    rows[(row, r * n + q)] -= a[(p, r)];
                }
            }
        }
    }
    null_space(&rows, tol)
        .into_iter()
        .map(|v| DMatrix::from_fn(n, n, |p, q| v[p * n + q]))
        .collect()
}

/// Least-squares residual of expressing `target` in the column span of `m`,
/// i.e. `min_x |m x - target|`.
pub fn containment_residual(m: &DMatrix<f64>, target: &DVector<f64>) -> f64 {
    let svd = m.clone().svd(true, true);
    match svd.solve(target, 1e-12) {
        Ok(x) => (m * x - target).norm(),
        Err(_) => target.norm(),
    }
}

/// Least-squares solution of `m x = target`.
pub fn least_squares(m: &DMatrix<f64>, target: &DVector<f64>) -> DVector<f64> {
    let svd = m.clone().svd(true, true);
    svd.solve(target, 1e-12).expect("svd solve")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(v[0].abs() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_basis_is_scale_invariant() {
        let v1 = DVector::from_vec(vec![1.0, 2.0, 0.0, 1.0]);
        let v2 = DVector::from_vec(vec![0.0, 1.0, 1.0, -1.0]);
        let b1 = deterministic_basis(&[v1.clone(), v2.clone()], 4);
        let b2 = deterministic_basis(&[v2 * -3.0, v1 * 0.5], 4);
        assert_eq!(b1.len(), b2.len());
        for (a, b) in b1.iter().zip(&b2) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn containment() {
        let m = DMatrix::from_columns(&[
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
        ]);
        assert!(containment_residual(&m, &DVector::from_vec(vec![2.0, -1.0, 0.0])) < 1e-12);
        assert!((containment_residual(&m, &DVector::from_vec(vec![0.0, 0.0, 3.0])) - 3.0).abs() < 1e-12);
    }
}
