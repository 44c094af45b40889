//! Complex linear algebra helpers: SVD-based numerical rank, nullspace
//! extraction and condition numbers.
//!
//! Rank counts singular values above `max_dim * sigma_max * 1e-10`. All
//! matrices in this crate are tiny (at most a few dozen rows), so the
//! dense SVD is the whole story.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-10;
/// Condition numbers above this are treated as rank failures.
pub const COND_LIMIT: f64 = 1e10;

/// Singular values of `a`, descending.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let svd = a.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Numerical rank at the crate-wide relative threshold.
pub fn numerical_rank(a: &CMatrix) -> usize {
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let tol = a.nrows().max(a.ncols()) as f64 * smax * RANK_REL_TOL;
    sv.iter().filter(|&&s| s > tol).count()
}

/// `sigma_max / sigma_min` over all min(m, n) singular values.
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Unit-norm vector spanning (part of) the right nullspace of `a`,
/// together with the numerical rank of `a`.
///
/// The matrix is zero-padded to square so the SVD exposes the full right
/// singular basis; the returned vector is the direction of the smallest
/// singular value. A matrix with zero rows yields rank 0 and the first
/// canonical basis vector.
pub fn nullspace_vector(a: &CMatrix) -> (usize, CVector) {
    let n = a.ncols();
    assert!(n > 0);
    if a.nrows() == 0 {
        let mut v = CVector::zeros(n);
        v[0] = C64::new(1.0, 0.0);
        return (0, v);
    }
    let (rank, basis) = nullspace_basis(a);
    if basis.is_empty() {
        return (rank, CVector::zeros(n));
    }
    (rank, basis[basis.len() - 1].clone())
}

/// Orthonormal basis of the right nullspace of `a`, with its numerical
/// rank. Basis vectors are ordered by ascending singular value of the
/// direction they replace (arbitrary within the exact nullspace).
pub fn nullspace_basis(a: &CMatrix) -> (usize, Vec<CVector>) {
    let n = a.ncols();
    let rank = numerical_rank(a);
    let mut padded = CMatrix::zeros(a.nrows().max(n), n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let basis = (rank..n)
        .map(|i| CVector::from_iterator(n, v_t.row(i).iter().map(|c| c.conj())))
        .collect();
    (rank, basis)
}

/// Projection of `target` onto the right nullspace of `a`, normalized to
/// unit norm, together with the rank of `a`. Returns `None` for the
/// vector when the projection is negligibly small relative to `target`
/// (the target lies in the row space), or when the nullspace is trivial.
///
/// Within the nullspace, this maximizes the inner product with `target`,
/// which beamformer construction uses to keep a served receiver's
/// effective coefficient away from zero while zero-forcing everyone
/// else: an arbitrary nullspace basis vector can be structurally
/// orthogonal to the serving direction.
pub fn nullspace_project(a: &CMatrix, target: &CVector) -> (usize, Option<CVector>) {
    if a.nrows() == 0 {
        let norm = target.norm();
        if norm == 0.0 {
            return (0, None);
        }
        return (0, Some(target / C64::new(norm, 0.0)));
    }
    let (rank, basis) = nullspace_basis(a);
    let mut proj = CVector::zeros(a.ncols());
    for b in &basis {
        proj += b * b.dotc(target);
    }
    let norm = proj.norm();
    if norm < 1e-12 * target.norm().max(1e-300) {
        return (rank, None);
    }
    (rank, Some(proj / C64::new(norm, 0.0)))
}

/// Solve the square system `a x = y` via SVD (well-conditioned inputs
/// only; callers gate on the rank/condition checks first).
pub fn solve(a: &CMatrix, y: &CVector) -> Option<CVector> {
    a.clone().svd(true, true).solve(y, 0.0).ok()
}

/// Max |entry|.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        // one row, two columns: nullspace is the orthogonal direction
        let a = CMatrix::from_row_slice(1, 2, &[c(1.0, 1.0), c(2.0, -1.0)]);
        let (rank, v) = nullspace_vector(&a);
        assert_eq!(rank, 1);
        let residual = (&a * &v).norm();
        assert!(residual < 1e-12, "residual {residual}");
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nullspace_detects_rank_deficiency() {
        let row = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let mut data = Vec::new();
        data.extend_from_slice(&row);
        data.extend_from_slice(&row);
        let a = CMatrix::from_row_slice(2, 3, &data);
        let (rank, v) = nullspace_vector(&a);
        assert_eq!(rank, 1);
        assert!((&a * &v).norm() < 1e-10);
    }

    #[test]
    fn zero_row_matrix_is_unconstrained() {
        let a = CMatrix::zeros(0, 3);
        let (rank, v) = nullspace_vector(&a);
        assert_eq!(rank, 0);
        assert_eq!(v[0], c(1.0, 0.0));
    }

    #[test]
    fn rank_and_condition_of_identity() {
        let a = CMatrix::identity(4, 4);
        assert_eq!(numerical_rank(&a), 4);
        assert!((condition_number(&a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_recovers_known_vector() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, -1.0), c(0.0, 1.0), c(3.0, 0.5)]);
        let x = CVector::from_column_slice(&[c(1.0, 2.0), c(-0.5, 0.25)]);
        let y = &a * &x;
        let got = solve(&a, &y).unwrap();
        assert!((got - x).norm() < 1e-12);
    }
}
