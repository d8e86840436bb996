use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BallPoint, ComplexVector};
use crate::linalg::{is_unitary, mat_vec, CMatrix};

/// Holomorphic expression over the coordinates `z_1..z_n`.
///
/// Fractional powers and logarithms only ever act on the atom `1 − r z_1`
/// with `r ∈ (0, 1)`, whose real part stays positive on the ball, so the
/// principal branch is single valued there.
#[derive(Clone, Debug, PartialEq)]
pub enum HoloExpr {
    Const(Complex64),
    /// Zero-based coordinate index.
    Coord(usize),
    Sum(Vec<HoloExpr>),
    Prod(Vec<HoloExpr>),
    IPow(Box<HoloExpr>, u32),
    /// `(1 − r z_1)^exponent`
    AtomPow { r: f64, exponent: f64 },
    /// `log(1 / (1 − r z_1))`
    AtomLog { r: f64 },
    /// `(log(1 / (1 − r z_1)))^exponent`, `exponent ≥ 1`, principal branch.
    AtomLogPow { r: f64, exponent: f64 },
    /// `inner(M z)`
    Unitary { matrix: CMatrix, inner: Box<HoloExpr> },
    /// `outer(inner_1(z), …, inner_m(z))`. The inner tuple must map the ball
    /// into the ball for the outer atoms to stay branch safe.
    Compose { outer: Box<HoloExpr>, inner: Vec<HoloExpr> },
}

fn check_atom_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::symbol("atom.r", format!("r must lie in (0, 1), got {r}")));
    }
    Ok(())
}

impl HoloExpr {
    pub fn constant(c: Complex64) -> Self {
        HoloExpr::Const(c)
    }

    pub fn real(x: f64) -> Self {
        HoloExpr::Const(Complex64::new(x, 0.0))
    }

    pub fn coord(index: usize) -> Self {
        HoloExpr::Coord(index)
    }

    pub fn sum(terms: Vec<HoloExpr>) -> Self {
        HoloExpr::Sum(terms)
    }

    pub fn prod(factors: Vec<HoloExpr>) -> Self {
        HoloExpr::Prod(factors)
    }

    pub fn pow(self, exponent: u32) -> Self {
        HoloExpr::IPow(Box::new(self), exponent)
    }

    pub fn atom_pow(r: f64, exponent: f64) -> Result<Self> {
        check_atom_r(r)?;
        if !exponent.is_finite() {
            return Err(Error::symbol("atompow.exponent", "exponent must be finite"));
        }
        Ok(HoloExpr::AtomPow { r, exponent })
    }

    pub fn atom_log(r: f64) -> Result<Self> {
        check_atom_r(r)?;
        Ok(HoloExpr::AtomLog { r })
    }

    pub fn atom_log_pow(r: f64, exponent: f64) -> Result<Self> {
        check_atom_r(r)?;
        if !(exponent >= 1.0 && exponent.is_finite()) {
            return Err(Error::symbol(
                "atomlogpow.exponent",
                format!("exponent must be finite and >= 1, got {exponent}"),
            ));
        }
        Ok(HoloExpr::AtomLogPow { r, exponent })
    }

    pub fn unitary(matrix: CMatrix, inner: HoloExpr) -> Result<Self> {
        if !is_unitary(&matrix) {
            return Err(Error::symbol("unitary.matrix", "matrix is not unitary"));
        }
        Ok(HoloExpr::Unitary {
            matrix,
            inner: Box::new(inner),
        })
    }

    pub fn compose(outer: HoloExpr, inner: Vec<HoloExpr>) -> Self {
        HoloExpr::Compose {
            outer: Box::new(outer),
            inner,
        }
    }

    /// Checks that the tree can be evaluated on C^n.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        self.check_dim_at(n, "$")
    }

    fn check_dim_at(&self, n: usize, path: &str) -> Result<()> {
        match self {
            HoloExpr::Const(c) => {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::symbol(path, "non-finite constant"));
                }
                Ok(())
            }
            HoloExpr::Coord(j) => {
                if *j >= n {
                    return Err(Error::symbol(
                        path,
                        format!("coordinate z_{} used in dimension {n}", j + 1),
                    ));
                }
                Ok(())
            }
            HoloExpr::Sum(items) | HoloExpr::Prod(items) => {
                for (i, item) in items.iter().enumerate() {
                    item.check_dim_at(n, &format!("{path}[{i}]"))?;
                }
                Ok(())
            }
            HoloExpr::IPow(base, _) => base.check_dim_at(n, &format!("{path}.base")),
            HoloExpr::AtomPow { r, .. }
            | HoloExpr::AtomLog { r }
            | HoloExpr::AtomLogPow { r, .. } => {
                check_atom_r(*r).map_err(|_| Error::symbol(path, "atom r outside (0, 1)"))
            }
            HoloExpr::Unitary { matrix, inner } => {
                if matrix.nrows() != n {
                    return Err(Error::symbol(
                        path,
                        format!("unitary of size {} used in dimension {n}", matrix.nrows()),
                    ));
                }
                inner.check_dim_at(n, &format!("{path}.inner"))
            }
            HoloExpr::Compose { outer, inner } => {
                if inner.is_empty() {
                    return Err(Error::symbol(path, "compose needs at least one component"));
                }
                for (i, item) in inner.iter().enumerate() {
                    item.check_dim_at(n, &format!("{path}.inner[{i}]"))?;
                }
                outer.check_dim_at(inner.len(), &format!("{path}.outer"))
            }
        }
    }

    /// Value at `z`.
    pub fn eval(&self, z: &BallPoint) -> Complex64 {
        self.value(z)
    }

    /// Holomorphic gradient `(∂f/∂z_1, …, ∂f/∂z_n)` at `z`.
    pub fn gradient(&self, z: &BallPoint) -> ComplexVector {
        let (_, g) = self.value_grad(z);
        ComplexVector::new(g).expect("gradient of a finite tree at an interior point")
    }

    /// Radial derivative `R f(z) = Σ z_j ∂f/∂z_j`.
    pub fn radial_derivative(&self, z: &BallPoint) -> Complex64 {
        let (_, g) = self.value_grad(z);
        z.iter().zip(&g).map(|(zj, gj)| zj * gj).sum()
    }

    pub(crate) fn value(&self, z: &[Complex64]) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            HoloExpr::Const(c) => *c,
            HoloExpr::Coord(j) => z[*j],
            HoloExpr::Sum(terms) => terms.iter().map(|t| t.value(z)).sum(),
            HoloExpr::Prod(factors) => factors.iter().map(|f| f.value(z)).product(),
            HoloExpr::IPow(base, m) => base.value(z).powu(*m),
            HoloExpr::AtomPow { r, exponent } => (one - z[0] * r).powf(*exponent),
            HoloExpr::AtomLog { r } => -(one - z[0] * r).ln(),
            HoloExpr::AtomLogPow { r, exponent } => {
                let l = -(one - z[0] * r).ln();
                principal_pow(l, *exponent)
            }
            HoloExpr::Unitary { matrix, inner } => inner.value(&mat_vec(matrix, z)),
            HoloExpr::Compose { outer, inner } => {
                let w: Vec<Complex64> = inner.iter().map(|e| e.value(z)).collect();
                outer.value(&w)
            }
        }
    }

    /// Forward-mode value and gradient.
    pub(crate) fn value_grad(&self, z: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        let n = z.len();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            HoloExpr::Const(c) => (*c, vec![zero; n]),
            HoloExpr::Coord(j) => {
                let mut g = vec![zero; n];
                g[*j] = one;
                (z[*j], g)
            }
            HoloExpr::Sum(terms) => {
                let mut v = zero;
                let mut g = vec![zero; n];
                for t in terms {
                    let (tv, tg) = t.value_grad(z);
                    v += tv;
                    for (a, b) in g.iter_mut().zip(tg) {
                        *a += b;
                    }
                }
                (v, g)
            }
            HoloExpr::Prod(factors) => {
                let parts: Vec<_> = factors.iter().map(|f| f.value_grad(z)).collect();
                let m = parts.len();
                // prefix[i] = Π_{j<i} v_j, suffix[i] = Π_{j>=i} v_j
                let mut prefix = vec![one; m + 1];
                for i in 0..m {
                    prefix[i + 1] = prefix[i] * parts[i].0;
                }
                let mut suffix = vec![one; m + 1];
                for i in (0..m).rev() {
                    suffix[i] = suffix[i + 1] * parts[i].0;
                }
                let mut g = vec![zero; n];
                for (i, (_, pg)) in parts.iter().enumerate() {
                    let others = prefix[i] * suffix[i + 1];
                    for (a, b) in g.iter_mut().zip(pg) {
                        *a += others * b;
                    }
                }
                (prefix[m], g)
            }
            HoloExpr::IPow(base, m) => {
                let (bv, bg) = base.value_grad(z);
                if *m == 0 {
                    return (one, vec![zero; n]);
                }
                let lower = bv.powu(m - 1);
                let scale = lower * (*m as f64);
                (lower * bv, bg.into_iter().map(|x| x * scale).collect())
            }
            HoloExpr::AtomPow { r, exponent } => {
                let base = one - z[0] * r;
                let v = base.powf(*exponent);
                let mut g = vec![zero; n];
                g[0] = -base.powf(exponent - 1.0) * (exponent * r);
                (v, g)
            }
            HoloExpr::AtomLog { r } => {
                let base = one - z[0] * r;
                let mut g = vec![zero; n];
                g[0] = base.inv() * *r;
                (-base.ln(), g)
            }
            HoloExpr::AtomLogPow { r, exponent } => {
                let base = one - z[0] * r;
                let l = -base.ln();
                let mut g = vec![zero; n];
                g[0] = principal_pow(l, exponent - 1.0) * *exponent * base.inv() * *r;
                (principal_pow(l, *exponent), g)
            }
            HoloExpr::Unitary { matrix, inner } => {
                let (v, ig) = inner.value_grad(&mat_vec(matrix, z));
                // ∂/∂z_j f(Mz) = Σ_i (∂_i f)(Mz) M_ij
                let g = (0..n)
                    .map(|j| (0..n).map(|i| ig[i] * matrix[(i, j)]).sum())
                    .collect();
                (v, g)
            }
            HoloExpr::Compose { outer, inner } => {
                let parts: Vec<_> = inner.iter().map(|e| e.value_grad(z)).collect();
                let w: Vec<Complex64> = parts.iter().map(|p| p.0).collect();
                let (v, og) = outer.value_grad(&w);
                let mut g = vec![zero; n];
                for (k, (_, ig)) in parts.iter().enumerate() {
                    for (a, b) in g.iter_mut().zip(ig) {
                        *a += og[k] * b;
                    }
                }
                (v, g)
            }
        }
    }
}

fn principal_pow(base: Complex64, exponent: f64) -> Complex64 {
    if base.norm() == 0.0 {
        return if exponent == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    base.powf(exponent)
}

impl Add for HoloExpr {
    type Output = HoloExpr;

    fn add(self, rhs: HoloExpr) -> HoloExpr {
        match self {
            HoloExpr::Sum(mut terms) => {
                terms.push(rhs);
                HoloExpr::Sum(terms)
            }
            other => HoloExpr::Sum(vec![other, rhs]),
        }
    }
}

impl Mul for HoloExpr {
    type Output = HoloExpr;

    fn mul(self, rhs: HoloExpr) -> HoloExpr {
        match self {
            HoloExpr::Prod(mut factors) => {
                factors.push(rhs);
                HoloExpr::Prod(factors)
            }
            other => HoloExpr::Prod(vec![other, rhs]),
        }
    }
}

impl Neg for HoloExpr {
    type Output = HoloExpr;

    fn neg(self) -> HoloExpr {
        HoloExpr::real(-1.0) * self
    }
}

impl Sub for HoloExpr {
    type Output = HoloExpr;

    fn sub(self, rhs: HoloExpr) -> HoloExpr {
        self + (-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let f = HoloExpr::coord(0) * HoloExpr::coord(1);
        let z = BallPoint::from_coords(vec![c(0.3, 0.0), c(0.0, 0.5)]).unwrap();
        assert!((f.eval(&z) - c(0.0, 0.15)).norm() < 1e-15);

        let f = HoloExpr::atom_pow(0.5, -2.0).unwrap();
        assert!((f.eval(&BallPoint::origin(1).unwrap()) - c(1.0, 0.0)).norm() < 1e-15);

        let f = HoloExpr::atom_log(0.5).unwrap();
        let z = BallPoint::from_reals(&[0.5, 0.1]).unwrap();
        assert!((f.eval(&z) - c((4.0f64 / 3.0).ln(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gradient_examples() {
        let (a, b) = (c(0.2, 0.1), c(-0.3, 0.4));
        let z = BallPoint::from_coords(vec![a, b]).unwrap();
        let g = (HoloExpr::coord(0) * HoloExpr::coord(1)).gradient(&z);
        assert_eq!(g[0], b);
        assert_eq!(g[1], a);
        let g = HoloExpr::constant(c(3.0, 1.0)).gradient(&z);
        assert!(g.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn radial_derivative_examples() {
        let z = BallPoint::from_reals(&[0.4, 0.0]).unwrap();
        let f = HoloExpr::coord(0).pow(2);
        assert!((f.radial_derivative(&z) - c(0.32, 0.0)).norm() < 1e-15);
        assert_eq!(HoloExpr::real(2.0).radial_derivative(&z), c(0.0, 0.0));
    }

    #[test]
    fn euler_identity_for_homogeneous_cubic() {
        let f = HoloExpr::coord(0).pow(3) + HoloExpr::constant(c(0.0, 2.0)) * HoloExpr::coord(0) * HoloExpr::coord(1).pow(2);
        let z = BallPoint::from_coords(vec![c(0.3, -0.2), c(0.1, 0.6)]).unwrap();
        let rf = f.radial_derivative(&z);
        assert!((rf - f.eval(&z) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn atom_constraints() {
        assert!(HoloExpr::atom_pow(1.0, 2.0).is_err());
        assert!(HoloExpr::atom_log(0.0).is_err());
        assert!(HoloExpr::atom_log_pow(0.5, 0.5).is_err());
        assert!(HoloExpr::unitary(CMatrix::from_element(2, 2, c(1.0, 0.0)), HoloExpr::coord(0)).is_err());
    }

    #[test]
    fn log_pow_vanishes_at_origin_with_finite_gradient() {
        let f = HoloExpr::atom_log_pow(0.9, 1.5).unwrap();
        let z = BallPoint::origin(2).unwrap();
        assert_eq!(f.eval(&z), c(0.0, 0.0));
        assert!(f.gradient(&z).norm() == 0.0);
    }

    #[test]
    fn dimension_checks() {
        assert!(HoloExpr::coord(2).check_dim(2).is_err());
        assert!(HoloExpr::coord(1).check_dim(2).is_ok());
        let comp = HoloExpr::compose(HoloExpr::coord(1), vec![HoloExpr::coord(0)]);
        assert!(comp.check_dim(1).is_err());
    }
}
