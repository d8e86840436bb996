//! Monte Carlo integration over the unit ball with respect to normalized
//! volume `dv` (`v(B) = 1`), including Green-kernel weights `g^s(z, a)`
//! handled by the Möbius change of variables `z = φ_a(u)`:
//!
//! ```text
//! ∫_B f(z) g^s(z,a) dv(z) = ∫_B f(φ_a(u)) log^s(1/|u|) (1−|a|²)^{n+1} / |1−<u,a>|^{2n+2} dv(u)
//! ```
//!
//! Radii are sampled through the volume coordinate `t = r^{2n}`, which is
//! uniform on `[0, 1)` under `dv`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geometry::{inner, norm_sq, one_minus_phi_sq_raw, BallPoint, ComplexVector, MoebiusMap};
use crate::sampling::{max_radius, par_chunks, sphere_direction, stream, Domain};

/// Outer radius of the dedicated stratum around the origin used by the
/// pull-back strategy.
pub const INNER_STRATUM_RADIUS: f64 = 1.0 / 256.0;
/// Fraction of the budget spent in the inner stratum.
pub const INNER_STRATUM_SHARE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Plain,
    RadialStratified,
    PullbackSingular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub sample_count: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub levels: usize,
}

impl QuadratureSpec {
    pub fn new(sample_count: usize, seed: u64, strategy: Strategy, levels: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            sample_count,
            seed,
            strategy,
            levels,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 100 {
            return Err(Error::InvalidArgument(format!(
                "sample_count must be >= 100, got {}",
                self.sample_count
            )));
        }
        if self.levels < 1 {
            return Err(Error::InvalidArgument("levels must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples_used: usize,
}

impl IntegralEstimate {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.standard_error == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.standard_error / self.value.abs()
        }
    }
}

/// A radial stratum `t ∈ [t_lo, t_hi)` (volume coordinate) with its sample count.
#[derive(Clone, Copy, Debug)]
struct Stratum {
    t_lo: f64,
    t_hi: f64,
    count: usize,
}

impl Stratum {
    fn volume(&self) -> f64 {
        self.t_hi - self.t_lo
    }
}

fn equal_volume_strata(t_lo: f64, t_hi: f64, levels: usize, budget: usize) -> Vec<Stratum> {
    let base = budget / levels;
    let extra = budget % levels;
    (0..levels)
        .map(|j| {
            let a = t_lo + (t_hi - t_lo) * j as f64 / levels as f64;
            let b = t_lo + (t_hi - t_lo) * (j + 1) as f64 / levels as f64;
            Stratum {
                t_lo: a,
                t_hi: b,
                count: base + usize::from(j < extra),
            }
        })
        .filter(|s| s.count > 0)
        .collect()
}

fn strata_for(n: usize, spec: &QuadratureSpec) -> Vec<Stratum> {
    let total = spec.sample_count;
    match spec.strategy {
        Strategy::Plain => vec![Stratum {
            t_lo: 0.0,
            t_hi: 1.0,
            count: total,
        }],
        Strategy::RadialStratified => equal_volume_strata(0.0, 1.0, spec.levels, total),
        Strategy::PullbackSingular => {
            let t0 = INNER_STRATUM_RADIUS.powi(2 * n as i32);
            let inner_count = ((total as f64 * INNER_STRATUM_SHARE).round() as usize).max(1);
            let mut strata = vec![Stratum {
                t_lo: 0.0,
                t_hi: t0,
                count: inner_count,
            }];
            strata.extend(equal_volume_strata(t0, 1.0, spec.levels, total - inner_count));
            strata
        }
    }
}

/// One sampled point: coordinates and `|u|^2`.
type RawPoint = (Vec<Complex64>, f64);

fn draw(n: usize, stratum: &Stratum, seed: u64, stratum_index: usize, chunk: usize, len: usize) -> Vec<RawPoint> {
    use rand::Rng;
    let mut rng = stream(seed, Domain::Quadrature, stratum_index as u32, chunk as u32);
    let r_max = max_radius();
    (0..len)
        .map(|_| {
            let t = stratum.t_lo + rng.gen::<f64>() * stratum.volume();
            let r = t.powf(1.0 / (2 * n) as f64).min(r_max);
            let dir = sphere_direction(&mut rng, n);
            let coords: Vec<Complex64> = dir.into_iter().map(|c| c * r).collect();
            let nsq = norm_sq(&coords);
            (coords, nsq)
        })
        .collect()
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
    count: usize,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
    }

    fn merge(&mut self, other: Moments) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.count += other.count;
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Variance of the stratum mean.
    fn mean_variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let m = self.mean();
        let var = ((self.sum_sq - self.count as f64 * m * m) / (self.count - 1) as f64).max(0.0);
        var / self.count as f64
    }
}

/// Evaluates `value(u)` on the stratified sample described by `spec` and
/// combines per-stratum means weighted by stratum volume.
fn stratified_estimate<F>(n: usize, spec: &QuadratureSpec, value: F) -> Result<IntegralEstimate>
where
    F: Fn(&[Complex64], f64) -> f64 + Sync,
{
    spec.validate()?;
    let strata = strata_for(n, spec);
    let mut total = 0.0;
    let mut variance = 0.0;
    let mut used = 0;
    for (si, stratum) in strata.iter().enumerate() {
        let parts = par_chunks(stratum.count, |chunk, _start, len| {
            let mut m = Moments::default();
            for (u, u_sq) in draw(n, stratum, spec.seed, si, chunk, len) {
                let v = value(&u, u_sq);
                if !v.is_finite() {
                    return Err(Error::Quadrature(format!(
                        "non-finite integrand value {v} at {u:?}"
                    )));
                }
                m.push(v);
            }
            Ok(m)
        });
        let mut m = Moments::default();
        for part in parts {
            m.merge(part?);
        }
        let w = stratum.volume();
        total += w * m.mean();
        variance += w * w * m.mean_variance();
        used += m.count;
    }
    Ok(IntegralEstimate {
        value: total,
        standard_error: variance.sqrt(),
        samples_used: used,
    })
}

/// Points and weights whose weighted sum estimates `∫_B f dv`. Weights sum to 1.
pub fn sample_ball(n: usize, spec: &QuadratureSpec) -> Result<Vec<(BallPoint, f64)>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    let mut out = Vec::with_capacity(spec.sample_count);
    for (si, stratum) in strata_for(n, spec).iter().enumerate() {
        let weight = stratum.volume() / stratum.count as f64;
        let parts = par_chunks(stratum.count, |chunk, _start, len| {
            draw(n, stratum, spec.seed, si, chunk, len)
        });
        for (coords, nsq) in parts.into_iter().flatten() {
            out.push((BallPoint::from_parts_unchecked(coords, nsq), weight));
        }
    }
    Ok(out)
}

/// `∫_B f dv` by the sampling strategy of `spec`.
pub fn integrate<F>(n: usize, spec: &QuadratureSpec, f: F) -> Result<IntegralEstimate>
where
    F: Fn(&BallPoint) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    stratified_estimate(n, spec, |u, u_sq| {
        f(&BallPoint::from_parts_unchecked(u.to_vec(), u_sq))
    })
}

/// `∫_B |<z,w>|^{2m} (1−|w|²)^t dv(w) = n! m! Γ(t+1) / Γ(t+n+1+m) · |z|^{2m}`.
pub fn monomial_moment(n: usize, m: u32, t: f64, z: &ComplexVector) -> Result<f64> {
    if !(t > -1.0) {
        return Err(Error::InvalidArgument(format!("t must exceed -1, got {t}")));
    }
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    let log_coeff = ln_gamma(n as f64 + 1.0) + ln_gamma(m as f64 + 1.0) + ln_gamma(t + 1.0)
        - ln_gamma(t + n as f64 + 1.0 + m as f64);
    let radial = if m == 0 { 1.0 } else { z.norm_sq().powi(m as i32) };
    Ok(log_coeff.exp() * radial)
}

/// `∫_B f(z) g^s(z, a) dv(z)`.
///
/// With [`Strategy::PullbackSingular`] the integral is evaluated after the
/// substitution `z = φ_a(u)`, which moves the logarithmic singularity to the
/// origin; the other strategies weight `f` by `g^s` directly.
pub fn integrate_green_weighted<F>(
    f: F,
    a: &BallPoint,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate>
where
    F: Fn(&BallPoint) -> f64 + Sync,
{
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("s must be >= 0, got {s}")));
    }
    let n = a.dim();
    let a_sq = a.norm_sq();
    let map = MoebiusMap::new(a.clone());
    match spec.strategy {
        Strategy::PullbackSingular => stratified_estimate(n, spec, |u, u_sq| {
            let log_weight = if s == 0.0 {
                1.0
            } else {
                (-0.5 * u_sq.ln()).powf(s)
            };
            let denom = (Complex64::new(1.0, 0.0) - inner(u, a)).norm_sqr();
            let jac = ((1.0 - a_sq) / denom).powi(n as i32 + 1);
            let z = map.apply_raw(u);
            let defect = one_minus_phi_sq_raw(a, a_sq, u, u_sq);
            let zp = BallPoint::from_parts_unchecked(z, 1.0 - defect);
            f(&zp) * log_weight * jac
        }),
        Strategy::Plain | Strategy::RadialStratified => stratified_estimate(n, spec, |z, z_sq| {
            let weight = if s == 0.0 {
                1.0
            } else {
                let image = map.apply_raw(z);
                let r_sq = norm_sq(&image);
                if r_sq == 0.0 {
                    return f64::INFINITY;
                }
                (-0.5 * r_sq.ln()).powf(s)
            };
            f(&BallPoint::from_parts_unchecked(z.to_vec(), z_sq)) * weight
        }),
    }
}

/// `∫_B f dv` by deterministic-mixture importance sampling: equal shares of
/// the budget are drawn as `φ_c(U)` for each center `c` (U uniform), and each
/// sample is weighted by the mixture density `(1/K) Σ_c J_c(z)` with
/// `J_c(z) = ((1−|c|²)/|1−<z,c>|²)^{n+1}`.
pub fn integrate_mixture<F>(
    centers: &[BallPoint],
    spec: &QuadratureSpec,
    f: F,
) -> Result<IntegralEstimate>
where
    F: Fn(&BallPoint) -> f64 + Sync,
{
    spec.validate()?;
    let k = centers.len();
    if k == 0 {
        return Err(Error::InvalidArgument("mixture needs at least one center".into()));
    }
    let n = centers[0].dim();
    if let Some(bad) = centers.iter().find(|c| c.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let maps: Vec<MoebiusMap> = centers.iter().cloned().map(MoebiusMap::new).collect();
    let per = (spec.sample_count / k).max(2);
    let density = |z: &[Complex64]| -> f64 {
        centers
            .iter()
            .map(|c| {
                let d = (Complex64::new(1.0, 0.0) - inner(z, c)).norm_sqr();
                ((1.0 - c.norm_sq()) / d).powi(n as i32 + 1)
            })
            .sum::<f64>()
            / k as f64
    };
    let whole = Stratum {
        t_lo: 0.0,
        t_hi: 1.0,
        count: per,
    };
    let mut total = 0.0;
    let mut variance = 0.0;
    for (ci, (map, center)) in maps.iter().zip(centers).enumerate() {
        let parts = par_chunks(per, |chunk, _start, len| {
            let mut m = Moments::default();
            for (u, u_sq) in draw(n, &whole, spec.seed, ci, chunk, len) {
                let z = map.apply_raw(&u);
                let defect = one_minus_phi_sq_raw(center, center.norm_sq(), &u, u_sq);
                let q = density(&z);
                let v = f(&BallPoint::from_parts_unchecked(z, 1.0 - defect)) / q;
                if !v.is_finite() {
                    return Err(Error::Quadrature(format!("non-finite mixture sample {v}")));
                }
                m.push(v);
            }
            Ok(m)
        });
        let mut m = Moments::default();
        for part in parts {
            m.merge(part?);
        }
        let w = 1.0 / k as f64;
        total += w * m.mean();
        variance += w * w * m.mean_variance();
    }
    Ok(IntegralEstimate {
        value: total,
        standard_error: variance.sqrt(),
        samples_used: per * k,
    })
}
