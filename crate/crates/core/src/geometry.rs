//! Complex vectors on C^n, points of the open unit ball, Möbius automorphisms
//! and the invariant Green's function.
//!
//! Inner products conjugate the second slot: `<z, w> = Σ z_j conj(w_j)`.

use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with `|z|^2 >= 1 - BOUNDARY_GUARD` are rejected by [`BallPoint::new`].
pub const BOUNDARY_GUARD: f64 = 1e-14;

/// Below this value of `|φ_a(z)|` the Green's function is reported as infinite.
pub const GREEN_SINGULAR_CUTOFF: f64 = 1e-15;

/// A finite vector in C^n, n ≥ 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexVector(coords))
    }

    /// Builds a vector from real parts only.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    /// The unit vector `e_{index+1}`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {n}"
            )));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Result<Self> {
        Self::new(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn sub(&self, other: &ComplexVector) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.0.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl TryFrom<Vec<[f64; 2]>> for ComplexVector {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<ComplexVector> for Vec<[f64; 2]> {
    fn from(v: ComplexVector) -> Self {
        v.to_pairs()
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `init + Σ x_i y_i` in twice the working precision.
fn dot2(init: f64, terms: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (init, 0.0);
    for (x, y) in terms {
        let p = x * y;
        let e = x.mul_add(y, -p);
        let (t, q) = two_sum(s, p);
        s = t;
        c += q + e;
    }
    s + c
}

/// `1 − |z|²` without cancellation near the sphere.
pub(crate) fn defect_accurate(z: &[Complex64]) -> f64 {
    dot2(1.0, z.iter().flat_map(|x| [(-x.re, x.re), (-x.im, x.im)]))
}

/// `c − <z, w>` with the real part compensated.
fn shifted_inner(c: f64, z: &[Complex64], w: &[Complex64]) -> Complex64 {
    let re = dot2(c, z.iter().zip(w).flat_map(|(a, b)| [(-a.re, b.re), (-a.im, b.im)]));
    let im = dot2(0.0, z.iter().zip(w).flat_map(|(a, b)| [(-a.im, b.re), (a.re, b.im)]));
    Complex64::new(re, im)
}

/// `Σ z_j conj(w_j)` on raw slices of equal length.
pub(crate) fn inner(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// Hermitian inner product `<z, w> = Σ_j z_j conj(w_j)`.
pub fn hermitian_inner(z: &ComplexVector, w: &ComplexVector) -> Result<Complex64> {
    check_dims(z.dim(), w.dim())?;
    Ok(inner(z, w))
}

/// A point of the open unit ball with its squared norm cached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexVector", into = "ComplexVector")]
pub struct BallPoint {
    vector: ComplexVector,
    norm_sq: f64,
}

impl BallPoint {
    pub fn new(vector: ComplexVector) -> Result<Self> {
        let norm_sq = vector.norm_sq();
        if norm_sq >= 1.0 - BOUNDARY_GUARD {
            return Err(Error::OutsideBall { norm_sq });
        }
        Ok(BallPoint { vector, norm_sq })
    }

    /// Skips validation; `norm_sq` may be supplied from a more accurate formula
    /// than the coordinates (e.g. the Möbius kernel identity near the boundary).
    pub(crate) fn from_parts_unchecked(coords: Vec<Complex64>, norm_sq: f64) -> Self {
        BallPoint {
            vector: ComplexVector(coords),
            norm_sq,
        }
    }

    pub fn from_coords(coords: Vec<Complex64>) -> Result<Self> {
        Self::new(ComplexVector::new(coords)?)
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(ComplexVector::from_reals(values)?)
    }

    pub fn origin(n: usize) -> Result<Self> {
        Self::new(ComplexVector::zeros(n)?)
    }

    /// `radius · direction`, where `direction` need not be normalized.
    pub fn on_ray(direction: &[Complex64], radius: f64) -> Result<Self> {
        let len = norm_sq(direction).sqrt();
        if len == 0.0 {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        Self::from_coords(direction.iter().map(|c| c * (radius / len)).collect())
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    /// `1 - |z|^2`, always in `(0, 1]`.
    pub fn defect(&self) -> f64 {
        1.0 - self.norm_sq
    }
}

impl Deref for BallPoint {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.vector
    }
}

impl TryFrom<ComplexVector> for BallPoint {
    type Error = Error;

    fn try_from(v: ComplexVector) -> Result<Self> {
        BallPoint::new(v)
    }
}

impl From<BallPoint> for ComplexVector {
    fn from(p: BallPoint) -> Self {
        p.vector
    }
}

/// The involutive automorphism `φ_a` of the ball exchanging `0` and `a`:
///
/// ```text
/// φ_a(z) = (a − P_a z − s_a Q_a z) / (1 − <z, a>),   s_a = sqrt(1 − |a|^2)
/// ```
///
/// with `P_a` the orthogonal projection onto `span(a)` and `Q_a = I − P_a`.
/// For `a = 0` this is `z ↦ −z`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMap {
    a: BallPoint,
    s_a: f64,
}

impl MoebiusMap {
    pub fn new(a: BallPoint) -> Self {
        let s_a = defect_accurate(&a).sqrt();
        MoebiusMap { a, s_a }
    }

    pub fn center(&self) -> &BallPoint {
        &self.a
    }

    pub fn s_a(&self) -> f64 {
        self.s_a
    }

    pub fn apply(&self, z: &BallPoint) -> Result<BallPoint> {
        check_dims(self.a.dim(), z.dim())?;
        BallPoint::from_coords(self.apply_raw(z))
    }

    /// Applies the map to any vector with `<z, a> ≠ 1`; no ball check.
    pub(crate) fn apply_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        let a: &[Complex64] = &self.a;
        let a_sq = self.a.norm_sq();
        if a_sq == 0.0 {
            return z.iter().map(|c| -c).collect();
        }
        let za = inner(z, a);
        let denom = shifted_inner(1.0, z, a);
        // a − P_a z = a (|a|² − <z,a>) / |a|²
        let gap = shifted_inner(0.0, z, a) + dot2(0.0, a.iter().flat_map(|x| [(x.re, x.re), (x.im, x.im)]));
        let proj = za / a_sq;
        let along = gap / a_sq;
        a.iter()
            .zip(z)
            .map(|(&aj, &zj)| {
                let q = zj - proj * aj;
                (aj * along - q * self.s_a) / denom
            })
            .collect()
    }
}

/// `φ_a(z)` for the automorphism centered at `m`.
pub fn moebius_apply(m: &MoebiusMap, z: &BallPoint) -> Result<BallPoint> {
    m.apply(z)
}

/// `1 − |φ_a(z)|^2 = (1 − |a|^2)(1 − |z|^2) / |1 − <z, a>|^2`.
pub fn one_minus_phi_sq(a: &BallPoint, z: &BallPoint) -> Result<f64> {
    check_dims(a.dim(), z.dim())?;
    Ok(defect_accurate(a) * defect_accurate(z) / shifted_inner(1.0, z, a).norm_sqr())
}

pub(crate) fn one_minus_phi_sq_raw(a: &[Complex64], a_sq: f64, z: &[Complex64], z_sq: f64) -> f64 {
    let d = (Complex64::new(1.0, 0.0) - inner(z, a)).norm_sqr();
    (1.0 - a_sq) * (1.0 - z_sq) / d
}

/// Green's function `g(z, a) = log(1/|φ_a(z)|)`. Returns `f64::INFINITY` when
/// `|φ_a(z)|` falls below [`GREEN_SINGULAR_CUTOFF`].
pub fn green(z: &BallPoint, a: &BallPoint) -> Result<f64> {
    check_dims(a.dim(), z.dim())?;
    let image = MoebiusMap::new(a.clone()).apply_raw(z);
    let r = norm_sq(&image).sqrt();
    if r < GREEN_SINGULAR_CUTOFF {
        return Ok(f64::INFINITY);
    }
    Ok(-r.ln())
}
