//! Pointwise criterion quantities `Q(w)` and `D(w)` for `W_{ψ,φ} f = ψ·(f∘φ)`,
//! their boundary profiles, and heuristic boundedness/compactness verdicts.
//!
//! ```text
//! Q(w) = |ψ(w)| (1−|w|²)^α / (1−|φ(w)|²)^k · sup_u sqrt( N(u) / M(u) )
//! N(u) = (1−|φ(w)|²)|J u|² + |<φ(w), J u>|²,   M(u) = (1−|w|²)|u|² + |<w, u>|²
//! D(w) = G_k(φ(w)) |∇ψ(w)| (1−|w|²)^α
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{inner, norm_sq, BallPoint};
use crate::linalg::{hermitian_max_eigenvalue, CMatrix};
use crate::sampling::{par_chunks, shell_radius, sphere_direction, stream, Domain};
use crate::spaces::{growth_for, scaled, search_direction, Exponents, Regime, SpaceParams};
use crate::symbols::SymbolPair;

/// Orthogonal-projection form of `c^{-1/2}(I − P_w) + P_w`, the inverse
/// square root of `B = c I + w wᴴ` with `c = 1 − |w|²`.
fn inverse_sqrt_b(w: &[Complex64], c: f64) -> CMatrix {
    let n = w.len();
    let w_sq = norm_sq(w);
    let s = 1.0 / c.sqrt();
    let mut m = CMatrix::identity(n, n) * Complex64::new(s, 0.0);
    if w_sq > 0.0 {
        let coef = Complex64::new((1.0 - s) / w_sq, 0.0);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += coef * w[i] * w[j].conj();
            }
        }
    }
    m
}

/// `max_u N(u)/M(u)` as the largest eigenvalue of `B^{-1/2} A B^{-1/2}` with
/// `A = Jᴴ[(1−|φw|²)I + φw φwᴴ]J` and `B = (1−|w|²)I + w wᴴ`.
pub fn rayleigh_sup(w: &BallPoint, phi_w: &[Complex64], jac: &CMatrix) -> Result<f64> {
    let n = w.dim();
    if phi_w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phi_w.len(),
        });
    }
    if jac.nrows() != n || jac.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: jac.nrows(),
        });
    }
    let phi_defect = 1.0 - norm_sq(phi_w);
    if !(phi_defect > 0.0) {
        return Err(Error::OutsideBall {
            norm_sq: norm_sq(phi_w),
        });
    }
    rayleigh_sup_with(w, w.defect(), phi_w, phi_defect, jac)
}

pub(crate) fn rayleigh_sup_with(
    w: &[Complex64],
    w_defect: f64,
    phi_w: &[Complex64],
    phi_defect: f64,
    jac: &CMatrix,
) -> Result<f64> {
    let n = w.len();
    let mut middle = CMatrix::identity(n, n) * Complex64::new(phi_defect, 0.0);
    for i in 0..n {
        for j in 0..n {
            middle[(i, j)] += phi_w[i] * phi_w[j].conj();
        }
    }
    let a = jac.adjoint() * middle * jac;
    let b_half = inverse_sqrt_b(w, w_defect);
    let m = &b_half * a * &b_half;
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    match hermitian_max_eigenvalue(&m) {
        Some(v) => Ok(v.max(0.0)),
        None => Err(Error::Eigen {
            message: "largest eigenvalue is not finite".into(),
            condition: 1.0 / w_defect,
        }),
    }
}

/// `Q(w)` and `D(w)` at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionSample {
    pub w: BallPoint,
    pub phi_norm: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub shell_index: usize,
}

pub fn criterion_sample(pair: &SymbolPair, exps: &Exponents, w: &BallPoint, shell_index: usize) -> Result<CriterionSample> {
    if w.dim() != pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dim(),
            found: w.dim(),
        });
    }
    let (phi_w, jac) = pair.phi.value_jacobian(w);
    let phi_sq = norm_sq(&phi_w);
    let phi_defect = 1.0 - phi_sq;
    if !(phi_defect > 0.0) {
        return Err(Error::SelfMapRejected {
            norm: phi_sq.sqrt(),
            point: w.vector().to_pairs(),
        });
    }
    let (psi_w, psi_grad) = pair.psi.expr().value_grad(w);
    let w_defect = w.defect();
    let weight = w_defect.powf(exps.alpha);
    let ray = rayleigh_sup_with(w, w_defect, &phi_w, phi_defect, &jac)?;
    let q = psi_w.norm() * weight / phi_defect.powf(exps.k) * ray.sqrt();
    let grad = norm_sq(&psi_grad).sqrt();
    let d = if grad == 0.0 {
        0.0
    } else {
        growth_for(exps.regime, exps.k, phi_defect) * grad * weight
    };
    Ok(CriterionSample {
        w: w.clone(),
        phi_norm: phi_sq.sqrt(),
        q,
        d,
        shell_index,
    })
}

pub fn criterion_q(pair: &SymbolPair, exps: &Exponents, w: &BallPoint) -> Result<f64> {
    Ok(criterion_sample(pair, exps, w, 0)?.q)
}

pub fn criterion_d(pair: &SymbolPair, exps: &Exponents, w: &BallPoint) -> Result<f64> {
    Ok(criterion_sample(pair, exps, w, 0)?.d)
}

/// Q with the supremum over directions replaced by the single direction `u`.
pub fn criterion_q_along(pair: &SymbolPair, exps: &Exponents, w: &BallPoint, u: &[Complex64]) -> Result<f64> {
    let n = pair.dim();
    if u.len() != n || w.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    if norm_sq(u) == 0.0 {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let (phi_w, jac) = pair.phi.value_jacobian(w);
    let phi_defect = 1.0 - norm_sq(&phi_w);
    if !(phi_defect > 0.0) {
        return Err(Error::SelfMapRejected {
            norm: norm_sq(&phi_w).sqrt(),
            point: w.vector().to_pairs(),
        });
    }
    let ju: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| jac[(i, j)] * u[j]).sum()).collect();
    let num = phi_defect * norm_sq(&ju) + inner(&phi_w, &ju).norm_sqr();
    let den = w.defect() * norm_sq(u) + inner(w, u).norm_sqr();
    let psi = pair.psi.eval(w).norm();
    Ok(psi * w.defect().powf(exps.alpha) / phi_defect.powf(exps.k) * (num / den).sqrt())
}

/// Profile sampling plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub shells: usize,
    pub per_shell: usize,
    pub seed: u64,
    /// Pattern-search the best Q of each shell, started from the best of the
    /// first [`REFINE_PREFIX`] samples (so larger budgets only add points).
    pub refine: bool,
}

pub const REFINE_PREFIX: usize = 64;

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            shells: 10,
            per_shell: 256,
            seed: 0,
            refine: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellAggregate {
    pub index: usize,
    pub radius: f64,
    pub max_q: f64,
    pub max_d: f64,
    pub count: usize,
}

/// Samples with `1 − |φ(w)| ∈ (2^{−j−1}, 2^{−j}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinAggregate {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub max_q: f64,
    pub max_d: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionProfile {
    pub exponents: Exponents,
    pub samples: Vec<CriterionSample>,
    pub shells: Vec<ShellAggregate>,
    pub bins: Vec<BinAggregate>,
    pub sup_q: f64,
    pub sup_d: f64,
    pub sup_phi_norm: f64,
    pub argmax_q: BallPoint,
}

fn bin_index(phi_norm: f64, phi_defect_sq: f64) -> usize {
    // 1 − |φ| computed as (1 − |φ|²)/(1 + |φ|)
    let d = phi_defect_sq / (1.0 + phi_norm);
    if d >= 1.0 {
        0
    } else {
        (-d.log2()).floor().max(0.0) as usize
    }
}

/// `Q` and `D` on the origin and the boundary shells `1 − 2^{−j}`.
pub fn profile(pair: &SymbolPair, exps: &Exponents, config: &ProfileConfig) -> Result<CriterionProfile> {
    let n = pair.dim();
    let origin = BallPoint::origin(n)?;
    let mut samples = vec![criterion_sample(pair, exps, &origin, 0)?];
    let mut shells = Vec::with_capacity(config.shells);
    for j in 1..=config.shells {
        let radius = shell_radius(j);
        let parts = par_chunks(config.per_shell, |chunk, _start, len| {
            let mut rng = stream(config.seed, Domain::Shells, j as u32, chunk as u32);
            (0..len)
                .map(|_| criterion_sample(pair, exps, &scaled(&sphere_direction(&mut rng, n), radius), j))
                .collect::<Result<Vec<_>>>()
        });
        let mut shell_samples = Vec::with_capacity(config.per_shell + 1);
        for part in parts {
            shell_samples.extend(part?);
        }
        if config.refine && !shell_samples.is_empty() {
            let start = shell_samples
                .iter()
                .take(REFINE_PREFIX)
                .fold(None::<&CriterionSample>, |acc, s| match acc {
                    Some(b) if b.q >= s.q => Some(b),
                    _ => Some(s),
                })
                .expect("nonempty shell");
            let direction: Vec<Complex64> = start.w.iter().map(|c| c / radius).collect();
            let mut failure = None;
            let mut eval = |p: &BallPoint| match criterion_q(pair, exps, p) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            };
            let found = search_direction(radius, &direction, start.q, &mut eval);
            if let Some(e) = failure {
                return Err(e);
            }
            if let Some((_, d)) = found {
                shell_samples.push(criterion_sample(pair, exps, &scaled(&d, radius), j)?);
            }
        }
        let max_q = shell_samples.iter().map(|s| s.q).fold(0.0, f64::max);
        let max_d = shell_samples.iter().map(|s| s.d).fold(0.0, f64::max);
        shells.push(ShellAggregate {
            index: j,
            radius,
            max_q,
            max_d,
            count: shell_samples.len(),
        });
        samples.extend(shell_samples);
    }

    let mut bins: Vec<BinAggregate> = Vec::new();
    let mut sup_q = 0.0;
    let mut sup_d = 0.0;
    let mut sup_phi: f64 = 0.0;
    let mut argmax_q = origin;
    for s in &samples {
        let j = bin_index(s.phi_norm, 1.0 - s.phi_norm * s.phi_norm);
        if bins.len() <= j {
            for i in bins.len()..=j {
                bins.push(BinAggregate {
                    index: i,
                    lower: 0.5f64.powi(i as i32 + 1),
                    upper: 0.5f64.powi(i as i32),
                    max_q: 0.0,
                    max_d: 0.0,
                    count: 0,
                });
            }
        }
        let b = &mut bins[j];
        b.count += 1;
        b.max_q = b.max_q.max(s.q);
        b.max_d = b.max_d.max(s.d);
        if s.q > sup_q {
            sup_q = s.q;
            argmax_q = s.w.clone();
        }
        sup_d = f64::max(sup_d, s.d);
        sup_phi = sup_phi.max(s.phi_norm);
    }
    Ok(CriterionProfile {
        exponents: *exps,
        samples,
        shells,
        bins,
        sup_q,
        sup_d,
        sup_phi_norm: sup_phi,
        argmax_q,
    })
}

/// Thresholds of the verdict heuristics; echoed in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Policy {
    pub min_shells: usize,
    pub stabilization_window: usize,
    pub stabilization_growth: f64,
    pub stable_slope: f64,
    pub unbounded_slope: f64,
    pub min_r_squared: f64,
    pub min_bins: usize,
    pub vanishing_slope: f64,
    pub nonvanishing_slope: f64,
    pub last_bin_fraction: f64,
    pub delta0: f64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            min_shells: 3,
            stabilization_window: 3,
            stabilization_growth: 0.10,
            stable_slope: -0.02,
            unbounded_slope: -0.1,
            min_r_squared: 0.9,
            min_bins: 3,
            vanishing_slope: 0.1,
            nonvanishing_slope: 0.02,
            last_bin_fraction: 0.1,
            delta0: 0.05,
        }
    }
}

/// Least-squares slope and R² of `y` against `x`. R² is 1 for constant `y`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    if x.len() < 2 {
        return (0.0, 1.0);
    }
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 1.0);
    }
    let slope = sxy / sxx;
    if ss_tot <= 1e-28 * (1.0 + my * my) * m {
        return (slope, 1.0);
    }
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - (my + slope * (a - mx))).powi(2))
        .sum();
    (slope, (1.0 - ss_res / ss_tot).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bounded {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compact {
    Yes,
    No,
    Inconclusive,
    NotApplicable,
}

/// Trend of shell maxima against `1 − r_j²` on a log-log scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellTrend {
    pub quantity: String,
    pub maxima: Vec<f64>,
    pub slope: f64,
    pub r_squared: f64,
    /// Largest relative growth between consecutive shells in the window.
    pub window_growth: f64,
    pub stable: bool,
    pub unbounded: bool,
}

fn shell_trend(name: &str, radii: &[f64], maxima: &[f64], policy: &Policy) -> ShellTrend {
    let all_zero = maxima.iter().all(|&m| m == 0.0);
    let positive: Vec<(f64, f64)> = radii
        .iter()
        .zip(maxima)
        .filter(|(_, &m)| m > 0.0)
        .map(|(r, m)| ((1.0 - r * r).ln(), m.ln()))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
    let (slope, r_squared) = if all_zero { (0.0, 1.0) } else { fit_line(&x, &y) };
    let window = policy.stabilization_window.max(2).min(maxima.len());
    let tail = &maxima[maxima.len() - window..];
    let window_growth = tail
        .windows(2)
        .map(|w| {
            if w[1] == 0.0 {
                -1.0
            } else if w[0] == 0.0 {
                f64::INFINITY
            } else {
                w[1] / w[0] - 1.0
            }
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let stable = all_zero || (window_growth < policy.stabilization_growth && slope >= policy.stable_slope);
    let unbounded = !all_zero && slope <= policy.unbounded_slope && r_squared > policy.min_r_squared;
    ShellTrend {
        quantity: name.to_string(),
        maxima: maxima.to_vec(),
        slope,
        r_squared,
        window_growth,
        stable,
        unbounded,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessVerdict {
    pub verdict: Bounded,
    pub regime: Regime,
    pub insufficient_data: bool,
    pub q: ShellTrend,
    pub d: ShellTrend,
    pub sup_q: f64,
    pub sup_d: f64,
}

pub fn boundedness_verdict(profile: &CriterionProfile, policy: &Policy) -> BoundednessVerdict {
    let shells: Vec<&ShellAggregate> = profile.shells.iter().filter(|s| s.count > 0).collect();
    let radii: Vec<f64> = shells.iter().map(|s| s.radius).collect();
    let q: Vec<f64> = shells.iter().map(|s| s.max_q).collect();
    let d: Vec<f64> = shells.iter().map(|s| s.max_d).collect();
    let insufficient = shells.len() < policy.min_shells.max(1);
    let tq = shell_trend("Q", &radii, &q, policy);
    let td = shell_trend("D", &radii, &d, policy);
    let verdict = if insufficient {
        Bounded::Inconclusive
    } else if tq.unbounded || td.unbounded {
        Bounded::No
    } else if tq.stable && td.stable {
        Bounded::Yes
    } else {
        Bounded::Inconclusive
    };
    BoundednessVerdict {
        verdict,
        regime: profile.exponents.regime,
        insufficient_data: insufficient,
        q: tq,
        d: td,
        sup_q: profile.sup_q,
        sup_d: profile.sup_d,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decay {
    Vanishing,
    NonVanishing,
    Inconclusive,
}

/// Behavior of bin maxima as `1 − |φ(w)| → 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinTrend {
    pub quantity: String,
    pub maxima: Vec<f64>,
    pub slope: f64,
    pub r_squared: f64,
    pub last: f64,
    pub interior_median: f64,
    pub decay: Decay,
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

fn bin_trend(name: &str, bins: &[&BinAggregate], maxima: &[f64], policy: &Policy) -> BinTrend {
    let m = maxima.len();
    let (x, y): (Vec<f64>, Vec<f64>) = bins
        .iter()
        .zip(maxima)
        .filter(|(_, &v)| v > 0.0)
        .map(|(b, v)| ((b.lower * b.upper).sqrt().ln(), v.ln()))
        .unzip();
    let (slope, r_squared) = if x.len() >= 2 { fit_line(&x, &y) } else { (0.0, 0.0) };
    let last = maxima[m - 1];
    let interior_median = if m > 2 { median(&maxima[1..m - 1]) } else { median(maxima) };
    let trailing_zero = m >= 2 && maxima[m - 2..].iter().all(|&v| v == 0.0);
    let decreasing = m >= 3 && maxima[m - 3..].windows(2).all(|w| w[1] < w[0]);
    let decay = if trailing_zero
        || (slope >= policy.vanishing_slope && r_squared > policy.min_r_squared && x.len() >= 3)
        || (last < policy.last_bin_fraction * interior_median && decreasing)
    {
        Decay::Vanishing
    } else if x.len() >= 2 && slope <= policy.nonvanishing_slope {
        Decay::NonVanishing
    } else {
        Decay::Inconclusive
    };
    BinTrend {
        quantity: name.to_string(),
        maxima: maxima.to_vec(),
        slope,
        r_squared,
        last,
        interior_median,
        decay,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactnessVerdict {
    pub verdict: Compact,
    pub regime: Regime,
    pub tags: Vec<String>,
    pub sup_phi_norm: f64,
    pub nonempty_bins: usize,
    pub q: Option<BinTrend>,
    pub d: Option<BinTrend>,
}

/// Compactness verdict; never `yes` unless `bounded` is `yes`.
pub fn compactness_verdict(profile: &CriterionProfile, bounded: &BoundednessVerdict, policy: &Policy) -> CompactnessVerdict {
    let regime = profile.exponents.regime;
    let bins: Vec<&BinAggregate> = profile.bins.iter().filter(|b| b.count > 0).collect();
    let mut out = CompactnessVerdict {
        verdict: Compact::Inconclusive,
        regime,
        tags: Vec::new(),
        sup_phi_norm: profile.sup_phi_norm,
        nonempty_bins: bins.len(),
        q: None,
        d: None,
    };
    match bounded.verdict {
        Bounded::No => {
            out.verdict = Compact::NotApplicable;
            out.tags.push("unbounded".into());
            return out;
        }
        Bounded::Inconclusive => {
            out.tags.push("boundedness-inconclusive".into());
            return out;
        }
        Bounded::Yes => {}
    }
    if profile.sup_phi_norm <= 1.0 - policy.delta0 {
        out.verdict = Compact::Yes;
        out.tags.push("vacuous-boundary".into());
        return out;
    }
    if bins.len() < policy.min_bins {
        out.tags.push("insufficient-bins".into());
        return out;
    }
    let q: Vec<f64> = bins.iter().map(|b| b.max_q).collect();
    let tq = bin_trend("Q", &bins, &q, policy);
    let mut decays = vec![tq.decay];
    out.q = Some(tq);
    if regime != Regime::Below {
        let d: Vec<f64> = bins.iter().map(|b| b.max_d).collect();
        let td = bin_trend("D", &bins, &d, policy);
        decays.push(td.decay);
        out.d = Some(td);
    }
    out.verdict = if decays.iter().all(|&d| d == Decay::Vanishing) {
        Compact::Yes
    } else if decays.contains(&Decay::NonVanishing) {
        Compact::No
    } else {
        Compact::Inconclusive
    };
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub regime: Regime,
    pub bounded: BoundednessVerdict,
    pub compact: CompactnessVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub profile: CriterionProfile,
    pub verdict: Verdict,
    pub policy: Policy,
}

/// Profile plus both verdicts for given exponents.
pub fn analyze_exponents(pair: &SymbolPair, exps: &Exponents, config: &ProfileConfig, policy: &Policy) -> Result<Analysis> {
    let profile = profile(pair, exps, config)?;
    let bounded = boundedness_verdict(&profile, policy);
    let compact = compactness_verdict(&profile, &bounded, policy);
    Ok(Analysis {
        verdict: Verdict {
            regime: exps.regime,
            bounded,
            compact,
        },
        profile,
        policy: policy.clone(),
    })
}

/// `F(p, q, s) → β^α` analysis.
pub fn analyze(pair: &SymbolPair, params: &SpaceParams, config: &ProfileConfig, policy: &Policy) -> Result<Analysis> {
    if params.n != pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dim(),
            found: params.n,
        });
    }
    analyze_exponents(pair, &params.exponents(), config, policy)
}

/// `β^{p'} → β^{q'}` analysis: the same criteria with `k = p'` and `α = q'`.
pub fn bloch_to_bloch_verdict(
    pair: &SymbolPair,
    p_prime: f64,
    q_prime: f64,
    config: &ProfileConfig,
    policy: &Policy,
) -> Result<Analysis> {
    if !(q_prime > 0.0) {
        return Err(Error::InvalidParams(format!("q' must be positive, got {q_prime}")));
    }
    analyze_exponents(pair, &Exponents::new(p_prime, q_prime)?, config, policy)
}
