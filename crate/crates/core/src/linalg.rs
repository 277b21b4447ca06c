//! Dense complex matrices and row-space algebra.
//!
//! Subspaces are row spaces: a basis is stored as a matrix whose rows are
//! orthonormal. Rank decisions use one relative singular-value cutoff,
//! `sigma_i > rel_eps * sigma_max * max(rows, cols)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Environment variable that overrides the default relative rank tolerance.
pub const RANK_TOL_ENV: &str = "IA_RANK_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel_eps: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64) -> Result<Self> {
        if !(rel_eps.is_finite() && rel_eps > 0.0 && rel_eps < 1.0) {
            return Err(Error::Domain(format!("rank tolerance {rel_eps} not in (0, 1)")));
        }
        Ok(Tolerance { rel_eps })
    }

    /// Default tolerance unless `IA_RANK_TOL` holds a valid value.
    pub fn from_env() -> Self {
        std::env::var(RANK_TOL_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .and_then(|v| Tolerance::new(v).ok())
            .unwrap_or_default()
    }

    /// Residual threshold used by inclusion tests on unit-norm rows.
    pub fn residual(&self) -> f64 {
        self.rel_eps.sqrt()
    }
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn ensure_finite(m: &CMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Stacks blocks vertically. `cols` fixes the width when `blocks` is empty.
pub fn vstack(cols: usize, blocks: &[&CMatrix]) -> Result<CMatrix> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        if b.ncols() != cols {
            return Err(Error::Dimension(format!("vstack: block has {} columns, expected {cols}", b.ncols())));
        }
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(*b);
        r += b.nrows();
    }
    Ok(out)
}

/// Stacks blocks horizontally. `rows` fixes the height when `blocks` is empty.
pub fn hstack(rows: usize, blocks: &[&CMatrix]) -> Result<CMatrix> {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        if b.nrows() != rows {
            return Err(Error::Dimension(format!("hstack: block has {} rows, expected {rows}", b.nrows())));
        }
        out.view_mut((0, c), (rows, b.ncols())).copy_from(*b);
        c += b.ncols();
    }
    Ok(out)
}

pub fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum RightVectors {
    None,
    Thin,
    Full,
}

/// Thin wrapper over LAPACK `zgesvd`, or `dgesvd` when every entry is real so
/// that real inputs keep real bases. Returns singular values in descending
/// order and, on request, the rows of `V^H` (`min(rows, cols)` of them for
/// `Thin`, `cols` for `Full`).
fn lapack_svd(m: &CMatrix, want: RightVectors) -> (Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let (job, vt_rows) = match want {
        RightVectors::None => (b'N', 1),
        RightVectors::Thin => (b'S', k),
        RightVectors::Full => (b'A', cols),
    };
    let (mi, ni, ldvt) = (rows as i32, cols as i32, vt_rows.max(1) as i32);
    let mut s = vec![0.0; k];
    let mut info = 0;
    let v_t = if m.iter().all(|z| z.im == 0.0) {
        let mut a: Vec<f64> = m.iter().map(|z| z.re).collect();
        let mut u = [0.0];
        let mut vt = vec![0.0; vt_rows.max(1) * cols];
        let mut query = [0.0];
        // SAFETY: buffer sizes follow the dgesvd contract for the chosen jobs
        unsafe { lapack::dgesvd(b'N', job, mi, ni, &mut a, mi, &mut s, &mut u, 1, &mut vt, ldvt, &mut query, -1, &mut info) };
        let lwork = (query[0] as usize).max(1);
        let mut work = vec![0.0; lwork];
        unsafe { lapack::dgesvd(b'N', job, mi, ni, &mut a, mi, &mut s, &mut u, 1, &mut vt, ldvt, &mut work, lwork as i32, &mut info) };
        DMatrix::from_column_slice(vt_rows.max(1), cols, &vt).map(|x| Complex64::new(x, 0.0))
    } else {
        let mut a: Vec<Complex64> = m.as_slice().to_vec();
        let mut u = [Complex64::new(0.0, 0.0)];
        let mut vt = vec![Complex64::new(0.0, 0.0); vt_rows.max(1) * cols];
        let mut rwork = vec![0.0; 5 * k.max(1)];
        let mut query = [Complex64::new(0.0, 0.0)];
        // SAFETY: buffer sizes follow the zgesvd contract for the chosen jobs
        unsafe { lapack::zgesvd(b'N', job, mi, ni, &mut a, mi, &mut s, &mut u, 1, &mut vt, ldvt, &mut query, -1, &mut rwork, &mut info) };
        let lwork = (query[0].re as usize).max(1);
        let mut work = vec![Complex64::new(0.0, 0.0); lwork];
        unsafe { lapack::zgesvd(b'N', job, mi, ni, &mut a, mi, &mut s, &mut u, 1, &mut vt, ldvt, &mut work, lwork as i32, &mut rwork, &mut info) };
        CMatrix::from_column_slice(vt_rows.max(1), cols, &vt)
    };
    assert!(info == 0, "LAPACK SVD failed to converge (info = {info})");
    match want {
        RightVectors::None => (s, zeros(0, cols)),
        _ => (s, v_t),
    }
}

/// Descending singular values of `m`.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    lapack_svd(m, RightVectors::None).0
}

fn count_above(sv: &[f64], rows: usize, cols: usize, tol: Tolerance) -> usize {
    let top = sv.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    let cutoff = tol.rel_eps * top * rows.max(cols) as f64;
    sv.iter().filter(|&&s| s > cutoff).count()
}

pub fn rank_tol(m: &CMatrix, tol: Tolerance) -> Result<usize> {
    ensure_finite(m)?;
    Ok(count_above(&singular_values(m), m.nrows(), m.ncols(), tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: identity(ambient) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Orthonormal basis, one vector per row.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Residual of `rows` after projection onto this subspace, in Frobenius norm.
    pub fn residual(&self, rows: &CMatrix) -> f64 {
        if self.dim() == 0 {
            return rows.norm();
        }
        let coeffs = rows * self.basis.adjoint();
        (rows - coeffs * &self.basis).norm()
    }

    /// True when every basis row of `inner` lies in this subspace.
    pub fn contains(&self, inner: &Subspace, tol: Tolerance) -> bool {
        inner.ambient == self.ambient && self.residual(&inner.basis) <= tol.residual() * (inner.dim().max(1) as f64).sqrt()
    }

    /// The annihilator `{x : basis * x^T = 0}`. Applying it twice returns the
    /// original subspace.
    pub fn complement(&self, tol: Tolerance) -> Result<Subspace> {
        null_space(&self.basis, tol)
    }
}

/// Row space of `m` with an orthonormal basis.
pub fn row_space(m: &CMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Subspace::zero(cols));
    }
    let (sv, v_t) = lapack_svd(m, RightVectors::Thin);
    let r = count_above(&sv, rows, cols, tol);
    Ok(Subspace { ambient: cols, basis: v_t.rows(0, r).into_owned() })
}

/// `{x : m * x^T = 0}` as a row subspace of dimension `cols - rank(m)`.
pub fn null_space(m: &CMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(Subspace::zero(0));
    }
    if rows == 0 {
        return Ok(Subspace::full(cols));
    }
    let (sv, v_t) = lapack_svd(m, RightVectors::Full);
    let r = count_above(&sv, rows, cols, tol);
    let basis = v_t.rows(r, cols - r).map(|z| z.conj());
    Ok(Subspace { ambient: cols, basis })
}

/// `{u : u * m = 0}`, the receive combiners that cancel every column of `m`.
pub fn left_null_space(m: &CMatrix, tol: Tolerance) -> Result<Subspace> {
    null_space(&m.transpose(), tol)
}

/// Sum of subspaces sharing an ambient dimension.
pub fn span_sum(parts: &[&Subspace], tol: Tolerance) -> Result<Subspace> {
    let ambient = common_ambient(parts)?;
    let bases: Vec<&CMatrix> = parts.iter().map(|s| &s.basis).collect();
    row_space(&vstack(ambient, &bases)?, tol)
}

/// Intersection computed as the complement of the sum of complements.
pub fn intersect(parts: &[&Subspace], tol: Tolerance) -> Result<Subspace> {
    let ambient = common_ambient(parts)?;
    if parts.len() == 1 {
        return Ok(parts[0].clone());
    }
    let comps = parts.iter().map(|s| s.complement(tol)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Subspace> = comps.iter().collect();
    let sum = span_sum(&refs, tol)?;
    if sum.dim() == ambient {
        return Ok(Subspace::zero(ambient));
    }
    sum.complement(tol)
}

fn common_ambient(parts: &[&Subspace]) -> Result<usize> {
    let first = parts.first().ok_or_else(|| Error::Dimension("empty subspace list".into()))?;
    if parts.iter().any(|s| s.ambient != first.ambient) {
        return Err(Error::Dimension("subspaces live in different ambient spaces".into()));
    }
    Ok(first.ambient)
}

/// Largest principal angle between two subspaces of equal dimension, in radians.
pub fn max_principal_angle(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.ambient != b.ambient || a.dim() != b.dim() {
        return Err(Error::Dimension("principal angle needs equal dimensions".into()));
    }
    if a.dim() == 0 {
        return Ok(0.0);
    }
    // sine form keeps tiny angles accurate, unlike acos of the cosines
    let residual = &b.basis - (&b.basis * a.basis.adjoint()) * &a.basis;
    let largest = singular_values(&residual).first().copied().unwrap_or(0.0);
    Ok(largest.clamp(0.0, 1.0).asin())
}
