//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::norm_sq;

pub type CMatrix = DMatrix<Complex64>;

const UNITARY_TOL: f64 = 1e-10;

pub fn is_unitary(m: &CMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let prod = m.adjoint() * m;
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            if (prod[(i, j)] - Complex64::new(target, 0.0)).norm() > UNITARY_TOL {
                return false;
            }
        }
    }
    true
}

pub fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of `diag(R)` folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A unitary `U` whose first column is `v / |v|`, completed by Gram–Schmidt
/// against the standard basis. So `U e_1 = v/|v|` and `U^H v = |v| e_1`.
pub fn unitary_with_first_column(v: &[Complex64]) -> Result<CMatrix> {
    let n = v.len();
    let len = norm_sq(v).sqrt();
    if len == 0.0 {
        return Err(Error::InvalidArgument("cannot align a zero vector".into()));
    }
    let mut columns: Vec<Vec<Complex64>> = vec![v.iter().map(|c| c / len).collect()];
    // Basis vectors ordered by how little they overlap the first column, so the
    // nearly parallel one is dropped.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()));
    for &j in &order {
        if columns.len() == n {
            break;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        for col in &columns {
            let proj: Complex64 = col.iter().zip(&e).map(|(c, x)| c.conj() * x).sum();
            for (x, c) in e.iter_mut().zip(col) {
                *x -= proj * c;
            }
        }
        let l = norm_sq(&e).sqrt();
        if l > 1e-8 {
            columns.push(e.into_iter().map(|x| x / l).collect());
        }
    }
    if columns.len() != n {
        return Err(Error::InvalidArgument("unitary completion failed".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| columns[j][i]))
}

/// Largest eigenvalue of a Hermitian matrix (upper triangle is trusted).
pub fn hermitian_max_eigenvalue(m: &CMatrix) -> Option<f64> {
    if m.nrows() == 1 {
        return Some(m[(0, 0)].re);
    }
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max.is_finite().then_some(max)
}
