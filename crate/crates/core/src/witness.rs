//! Explicit test-function families used in the lower-bound argument, and
//! numeric checks of their uniform norm bounds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::criterion_q_along;
use crate::error::{Error, Result};
use crate::geometry::{inner, norm_sq, BallPoint};
use crate::linalg::{mat_vec, unitary_with_first_column, CMatrix};
use crate::quadrature::{integrate_mixture, QuadratureSpec};
use crate::sampling::{sphere_direction, stream, Domain};
use crate::spaces::{bloch_norm_with_hints, fpqs_seminorm, AGrid, BoundCheck, Exponents, ShellSampler, SpaceParams};
use crate::symbols::{HoloExpr, SelfMapSymbol, SymbolPair};

/// `|φ(ω)|` must exceed this for the direction split to apply.
pub fn split_threshold() -> f64 {
    (2.0f64 / 3.0).sqrt()
}

/// Floor on the minimum of `‖W f‖ / Q_u` accepted by [`verify_lower_bound`].
/// Half the minimum observed on the identity-symbol calibration grid
/// (`calibration_grid`), rounded down.
pub const LOWER_BOUND_FLOOR: f64 = 0.3;

/// Allowed spread of a uniformly bounded sequence around its median.
pub const MEDIAN_FACTOR: f64 = 2.0;

/// Relative standard error above which a quadrature estimate is flagged.
pub const INSTABILITY_THRESHOLD: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `(z_1 − r)(1 − r²) / (1 − r z_1)^{k+1}`
    Radial,
    /// `(a_2 z_2 + … + a_n z_n)(1 − r²)^{3/2} / (1 − r z_1)^{k+1}`
    Tangential { coefficients: Vec<Complex64> },
    /// `(1 − r²) / (1 − r z_1)^k`
    Power,
    /// `L^{−1} (log 1/(1 − r z_1))²` with `L = log 1/(1 − r²)`
    LogSquare,
    /// `L^{−2/(p x)} (log 1/(1 − r z_1))^{1 + 2/(p x)}`
    LogMixed { p: f64, x: f64 },
}

/// One member of a witness family, in the frame where the peak sits at `r e_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessFamily {
    pub kind: WitnessKind,
    pub n: usize,
    pub r: f64,
    pub k: f64,
    /// Unitary `U` with `U e_1 = φ(ω)/|φ(ω)|`; the built expression is `f ∘ U^H`.
    pub rotation: Option<CMatrix>,
}

impl WitnessFamily {
    pub fn new(kind: WitnessKind, n: usize, r: f64, k: f64) -> Self {
        WitnessFamily {
            kind,
            n,
            r,
            k,
            rotation: None,
        }
    }

    pub fn with_rotation(mut self, u: CMatrix) -> Self {
        self.rotation = Some(u);
        self
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidArgument(format!("r must lie in (0, 1), got {}", self.r)));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidArgument(format!("k must be positive, got {}", self.k)));
        }
        match &self.kind {
            WitnessKind::Tangential { coefficients } => {
                if coefficients.len() + 1 != self.n {
                    return Err(Error::InvalidArgument(format!(
                        "expected {} tangential coefficients, got {}",
                        self.n - 1,
                        coefficients.len()
                    )));
                }
                if let Some(a) = coefficients
                    .iter()
                    .find(|a| a.norm() > 1e-12 && (a.norm() - 1.0).abs() > 1e-12)
                {
                    return Err(Error::InvalidArgument(format!("coefficient {a} is neither zero nor unimodular")));
                }
            }
            WitnessKind::LogMixed { p, x } => {
                if !(*p > 0.0 && *x > 0.0 && p.is_finite() && x.is_finite()) {
                    return Err(Error::InvalidArgument(format!("need p, x > 0, got p={p}, x={x}")));
                }
            }
            _ => {}
        }
        if let Some(u) = &self.rotation {
            if u.nrows() != self.n || u.ncols() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: u.nrows(),
                });
            }
        }
        Ok(())
    }
}

/// Builds the witness as an expression tree on C^n.
pub fn build_witness(family: &WitnessFamily) -> Result<HoloExpr> {
    family.check()?;
    let (r, k) = (family.r, family.k);
    let defect = 1.0 - r * r;
    let log_defect = (1.0 / defect).ln();
    let base = match &family.kind {
        WitnessKind::Radial => HoloExpr::prod(vec![
            HoloExpr::coord(0) - HoloExpr::real(r),
            HoloExpr::real(defect),
            HoloExpr::atom_pow(r, -(k + 1.0))?,
        ]),
        WitnessKind::Tangential { coefficients } => {
            let linear = HoloExpr::sum(
                coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm() > 0.0)
                    .map(|(j, a)| HoloExpr::constant(*a) * HoloExpr::coord(j + 1))
                    .collect(),
            );
            HoloExpr::prod(vec![
                linear,
                HoloExpr::real(defect.powf(1.5)),
                HoloExpr::atom_pow(r, -(k + 1.0))?,
            ])
        }
        WitnessKind::Power => HoloExpr::real(defect) * HoloExpr::atom_pow(r, -k)?,
        WitnessKind::LogSquare => HoloExpr::real(1.0 / log_defect) * HoloExpr::atom_log(r)?.pow(2),
        WitnessKind::LogMixed { p, x } => {
            let e = 2.0 / (p * x);
            HoloExpr::real(log_defect.powf(-e)) * HoloExpr::atom_log_pow(r, 1.0 + e)?
        }
    };
    match &family.rotation {
        Some(u) => HoloExpr::unitary(u.adjoint(), base),
        None => Ok(base),
    }
}

/// Exponent for the mixed logarithmic witness: the midpoint of
/// `(max{1, n/p}, n/(n−s))`, or `max{1, n/p} + 1` when `s = n`.
pub fn log_mixed_exponent(n: usize, p: f64, s: f64) -> Result<f64> {
    let nf = n as f64;
    if !(s > 0.0 && s <= nf) {
        return Err(Error::InvalidArgument(format!("need 0 < s <= n, got s={s}, n={n}")));
    }
    if !(s + p > nf) {
        return Err(Error::InvalidArgument(format!("need s + p > n, got s={s}, p={p}, n={n}")));
    }
    let lower = (nf / p).max(1.0);
    if s == nf {
        return Ok(lower + 1.0);
    }
    let upper = nf / (nf - s);
    if !(upper > lower) {
        return Err(Error::InvalidArgument(format!("empty exponent window ({lower}, {upper})")));
    }
    Ok(0.5 * (lower + upper))
}

/// Constant `C` in `|∇f(z)| ≤ C (1 − r²) / |1 − r z_1|^{k+1}` (unrotated
/// frame), for the two rational families.
pub fn gradient_bound_constant(family: &WitnessFamily) -> Option<f64> {
    let (r, k) = (family.r, family.k);
    match family.kind {
        WitnessKind::Radial => Some(1.0 + (k + 1.0) * r),
        WitnessKind::Tangential { .. } => {
            Some(((family.n - 1) as f64).sqrt() * (1.0 - r * r + r * r * (k + 1.0).powi(2)).sqrt())
        }
        _ => None,
    }
}

/// Constant `c` in `|f(z)| ≤ c (1 − r²) / (1 − |z|²)^{k+1}`.
pub fn decay_constant(family: &WitnessFamily) -> Option<f64> {
    let k = family.k;
    match family.kind {
        WitnessKind::Radial => Some(2f64.powf(k + 2.0)),
        WitnessKind::Tangential { .. } => Some(((family.n - 1) as f64).sqrt() * 2f64.powf(k + 1.0)),
        WitnessKind::Power => Some(2f64.powf(k)),
        _ => None,
    }
}

fn unrotated(family: &WitnessFamily) -> WitnessFamily {
    WitnessFamily {
        rotation: None,
        ..family.clone()
    }
}

/// Checks the gradient bound with [`gradient_bound_constant`] at each sample
/// (unrotated frame).
pub fn gradient_bound_check(family: &WitnessFamily, samples: &[BallPoint]) -> Result<BoundCheck> {
    let c = gradient_bound_constant(family)
        .ok_or_else(|| Error::InvalidArgument("no gradient bound for this family".into()))?;
    gradient_bound_check_with(family, c, samples)
}

/// Checks `|∇f(z)| ≤ c (1 − r²) / |1 − r z_1|^{k+1}` at each sample for a
/// caller-supplied `c`.
pub fn gradient_bound_check_with(family: &WitnessFamily, c: f64, samples: &[BallPoint]) -> Result<BoundCheck> {
    let f = build_witness(&unrotated(family))?;
    let mut report = BoundCheck::new();
    for z in samples {
        f.check_dim(z.dim())?;
        let (_, g) = f.value_grad(z);
        let atom = (Complex64::new(1.0, 0.0) - family.r * z[0]).norm();
        report.record(norm_sq(&g).sqrt(), c * (1.0 - family.r * family.r) / atom.powf(family.k + 1.0), z);
    }
    Ok(report)
}

/// Checks the pointwise decay bound at each sample (unrotated frame).
pub fn decay_bound_check(family: &WitnessFamily, samples: &[BallPoint]) -> Result<BoundCheck> {
    let c = decay_constant(family).ok_or_else(|| Error::InvalidArgument("no decay bound for this family".into()))?;
    let f = build_witness(&unrotated(family))?;
    let mut report = BoundCheck::new();
    for z in samples {
        f.check_dim(z.dim())?;
        let rhs = c * (1.0 - family.r * family.r) / z.defect().powf(family.k + 1.0);
        report.record(f.value(z).norm(), rhs, z);
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    Radial,
    Tangential,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSplit {
    pub split: Split,
    /// `|φ(ω)|`
    pub r: f64,
    /// `U` with `U e_1 = φ(ω)/r`
    pub rotation: CMatrix,
    /// `U^H J_φ(ω) u`
    pub rotated_image: Vec<Complex64>,
    /// Phases `a_2..a_n` of the rotated image (zero where the entry is zero).
    pub coefficients: Vec<Complex64>,
}

/// Decides which witness serves the pair `(ω, u)`: radial when
/// `sqrt(1 − |φ(ω)|²) |J u| ≤ |<φ(ω), J u>|`, tangential otherwise.
pub fn witness_direction_split(phi: &SelfMapSymbol, omega: &BallPoint, u: &[Complex64]) -> Result<DirectionSplit> {
    let n = phi.dim();
    if omega.dim() != n || u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if omega.dim() != n { omega.dim() } else { u.len() },
        });
    }
    if norm_sq(u) == 0.0 {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let (phi_w, jac) = phi.value_jacobian(omega);
    let r = norm_sq(&phi_w).sqrt();
    if !(r > split_threshold() && r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "|phi(omega)| = {r} is outside (sqrt(2/3), 1)"
        )));
    }
    let ju = mat_vec(&jac, u);
    let rotation = unitary_with_first_column(&phi_w)?;
    let rotated_image = mat_vec(&rotation.adjoint(), &ju);
    let radial = (1.0 - r * r).sqrt() * norm_sq(&ju).sqrt() <= inner(&phi_w, &ju).norm();
    let coefficients = rotated_image
        .iter()
        .skip(1)
        .map(|xi| {
            if xi.norm() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                xi.conj() / xi.norm()
            }
        })
        .collect();
    Ok(DirectionSplit {
        split: if radial { Split::Radial } else { Split::Tangential },
        r,
        rotation,
        rotated_image,
        coefficients,
    })
}

/// The witness chosen for `(ω, u)`, rotated into place.
pub fn witness_for(phi: &SelfMapSymbol, k: f64, omega: &BallPoint, u: &[Complex64]) -> Result<(WitnessFamily, DirectionSplit)> {
    let split = witness_direction_split(phi, omega, u)?;
    let kind = match split.split {
        Split::Radial => WitnessKind::Radial,
        Split::Tangential => WitnessKind::Tangential {
            coefficients: split.coefficients.clone(),
        },
    };
    let family = WitnessFamily::new(kind, phi.dim(), split.r, k).with_rotation(split.rotation.clone());
    Ok((family, split))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundSample {
    pub omega: BallPoint,
    pub u: Vec<Complex64>,
    pub split: Split,
    /// `|φ(ω)|`
    pub r: f64,
    /// Estimated `‖ψ · (f ∘ φ)‖_{β^α}`
    pub lhs: f64,
    /// `Q` at `ω` along `u`
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub status: CheckStatus,
    pub floor: f64,
    pub min_ratio: Option<f64>,
    pub skipped: usize,
    pub samples: Vec<LowerBoundSample>,
}

/// Directions tried at each `ω`: the radial direction of `ω` (or `e_1` at
/// the origin) followed by seeded random unit vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionPlan {
    pub per_point: usize,
    pub seed: u64,
}

impl DirectionPlan {
    pub fn directions(&self, index: usize, omega: &BallPoint) -> Vec<Vec<Complex64>> {
        let n = omega.dim();
        let mut out = Vec::with_capacity(self.per_point);
        if self.per_point == 0 {
            return out;
        }
        let len = omega.norm();
        out.push(if len > 0.0 {
            omega.iter().map(|c| c / len).collect()
        } else {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[0] = Complex64::new(1.0, 0.0);
            e
        });
        let mut rng = stream(self.seed, Domain::Verify, index as u32, 0);
        while out.len() < self.per_point {
            out.push(sphere_direction(&mut rng, n));
        }
        out
    }
}

/// Ratio of the operator norm of the witness image to the single-direction
/// criterion, over every `(ω, u)` with `|φ(ω)| > sqrt(2/3)`.
pub fn verify_lower_bound(
    pair: &SymbolPair,
    exps: &Exponents,
    omegas: &[BallPoint],
    plan: &DirectionPlan,
    sampler: &ShellSampler,
    floor: f64,
) -> Result<LowerBoundReport> {
    let n = pair.dim();
    let mut samples = Vec::new();
    let mut skipped = 0;
    for (index, omega) in omegas.iter().enumerate() {
        if omega.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: omega.dim(),
            });
        }
        let r = norm_sq(&pair.phi.apply_raw(omega)).sqrt();
        if !(r > split_threshold()) {
            skipped += 1;
            continue;
        }
        for u in plan.directions(index, omega) {
            let (family, split) = witness_for(&pair.phi, exps.k, omega, &u)?;
            let f = build_witness(&family)?;
            let image = HoloExpr::prod(vec![
                pair.psi.expr().clone(),
                HoloExpr::compose(f, pair.phi.components().to_vec()),
            ]);
            let lhs = bloch_norm_with_hints(&image, n, exps.alpha, sampler, std::slice::from_ref(omega))?.value;
            let rhs = criterion_q_along(pair, exps, omega, &u)?;
            let ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
            samples.push(LowerBoundSample {
                omega: omega.clone(),
                u,
                split: split.split,
                r,
                lhs,
                rhs,
                ratio,
            });
        }
    }
    let min_ratio = samples.iter().map(|s| s.ratio).reduce(f64::min);
    let status = match min_ratio {
        None => CheckStatus::NotApplicable,
        Some(m) if m > floor => CheckStatus::Pass,
        Some(_) => CheckStatus::Fail,
    };
    Ok(LowerBoundReport {
        status,
        floor,
        min_ratio,
        skipped,
        samples,
    })
}

/// The identity-symbol grid used to calibrate [`LOWER_BOUND_FLOOR`]: points
/// `t e_1` and `t (e_1 + e_2)/sqrt 2` for `t` in `{0.85, 0.9, 0.95, 0.99}`.
pub fn calibration_grid(n: usize) -> Result<Vec<BallPoint>> {
    let mut out = Vec::new();
    for t in [0.85, 0.9, 0.95, 0.99] {
        let mut e1 = vec![Complex64::new(0.0, 0.0); n];
        e1[0] = Complex64::new(t, 0.0);
        out.push(BallPoint::from_coords(e1)?);
        if n >= 2 {
            let mut d = vec![Complex64::new(0.0, 0.0); n];
            d[0] = Complex64::new(t / 2f64.sqrt(), 0.0);
            d[1] = Complex64::new(0.0, t / 2f64.sqrt());
            out.push(BallPoint::from_coords(d)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub r: f64,
    pub value: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub status: CheckStatus,
    pub entries: Vec<LadderEntry>,
    pub median: f64,
    pub max: f64,
    pub factor: f64,
    /// Some standard error exceeded [`INSTABILITY_THRESHOLD`] of its value.
    pub unstable: bool,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn ladder_report(entries: Vec<LadderEntry>) -> LadderReport {
    if entries.is_empty() {
        return LadderReport {
            status: CheckStatus::NotApplicable,
            entries,
            median: 0.0,
            max: 0.0,
            factor: MEDIAN_FACTOR,
            unstable: false,
        };
    }
    let values: Vec<f64> = entries.iter().map(|e| e.value).collect();
    let med = median(&values);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unstable = entries.iter().any(|e| !(e.relative_error <= INSTABILITY_THRESHOLD));
    let bounded = max <= MEDIAN_FACTOR * med;
    LadderReport {
        status: if bounded && !unstable { CheckStatus::Pass } else { CheckStatus::Fail },
        entries,
        median: med,
        max,
        factor: MEDIAN_FACTOR,
        unstable,
    }
}

/// Estimates the `F(p, q, s)` seminorm of `build(r)` along the ladder and
/// checks that no estimate exceeds twice the median.
pub fn uniform_witness_norm_check<B>(
    build: B,
    params: &SpaceParams,
    ladder: &[f64],
    quad: &QuadratureSpec,
    grid: &AGrid,
) -> Result<LadderReport>
where
    B: Fn(f64) -> Result<HoloExpr>,
{
    let mut entries = Vec::with_capacity(ladder.len());
    for &r in ladder {
        let f = build(r)?;
        let est = fpqs_seminorm(&f, params, quad, grid)?;
        entries.push(LadderEntry {
            r,
            value: est.value,
            relative_error: est.relative_error(),
        });
    }
    Ok(ladder_report(entries))
}

/// Builder for [`uniform_witness_norm_check`] over one unrotated family kind.
pub fn family_builder(kind: WitnessKind, n: usize, k: f64) -> impl Fn(f64) -> Result<HoloExpr> {
    move |r| build_witness(&WitnessFamily::new(kind.clone(), n, r, k))
}

/// `∫_B |log(1/(1 − <z,w>))|² (1−|w|²)^t / |1 − <z,w>|^{n+1+t} dv(w)` by
/// mixture sampling with centers on the segment from 0 to `z`.
pub fn log_kernel_integral(z: &BallPoint, t: f64, quad: &QuadratureSpec) -> Result<crate::quadrature::IntegralEstimate> {
    if !(t > -1.0) {
        return Err(Error::InvalidArgument(format!("t must exceed -1, got {t}")));
    }
    let n = z.dim();
    let len = z.norm();
    let mut centers = vec![BallPoint::origin(n)?];
    if len > 0.0 {
        let mut j = 1;
        loop {
            let radius = 1.0 - 0.5f64.powi(j);
            if radius >= len {
                break;
            }
            centers.push(BallPoint::from_coords(z.iter().map(|c| c * (radius / len)).collect())?);
            j += 1;
        }
        centers.push(z.clone());
    }
    let power = n as f64 + 1.0 + t;
    integrate_mixture(&centers, quad, |w| {
        let one_minus = Complex64::new(1.0, 0.0) - inner(z, w);
        let log = (1.0 / one_minus).ln();
        log.norm_sqr() * w.defect().powf(t) / one_minus.norm().powf(power)
    })
}

/// Ratios of [`log_kernel_integral`] to `(log 1/(1 − |z|²))²` at points
/// `ρ e_1` for `ρ` in the ladder (each at least 0.5).
pub fn log_kernel_bound_check(n: usize, t: f64, ladder: &[f64], quad: &QuadratureSpec) -> Result<LadderReport> {
    let mut entries = Vec::with_capacity(ladder.len());
    for &rho in ladder {
        if !(0.5..1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!("ladder radius {rho} outside [0.5, 1)")));
        }
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        z[0] = Complex64::new(rho, 0.0);
        let z = BallPoint::from_coords(z)?;
        let est = log_kernel_integral(&z, t, quad)?;
        let norm = (1.0 / z.defect()).ln().powi(2);
        entries.push(LadderEntry {
            r: rho,
            value: est.value / norm,
            relative_error: est.relative_error(),
        });
    }
    Ok(ladder_report(entries))
}
