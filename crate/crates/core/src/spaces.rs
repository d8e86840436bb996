//! Bloch-type norms, `F(p, q, s)` seminorm estimates, the growth function
//! `G_t`, and pointwise/Lipschitz bounds for Bloch-type functions.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::decimal::{compare_to_one, Decimal};
use crate::error::{Error, Result};
use crate::geometry::{inner, norm_sq, BallPoint};
use crate::quadrature::{integrate_green_weighted, QuadratureSpec};
use crate::sampling::{max_radius, par_chunks, shell_radius, sphere_direction, stream, Domain};
use crate::symbols::HoloExpr;

/// Tolerance on `|k − 1|` selecting the logarithmic branch when no exact
/// decimals are available.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "k<1")]
    Below,
    #[serde(rename = "k=1")]
    Critical,
    #[serde(rename = "k>1")]
    Above,
}

impl Regime {
    pub fn of(k: f64) -> Regime {
        if (k - 1.0).abs() < CRITICAL_TOLERANCE {
            Regime::Critical
        } else if k < 1.0 {
            Regime::Below
        } else {
            Regime::Above
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Below => "k<1",
            Regime::Critical => "k=1",
            Regime::Above => "k>1",
        }
    }
}

/// The exponent pair driving the criteria: boundary exponent `k` (with its
/// regime) and target weight `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub k: f64,
    pub alpha: f64,
    pub regime: Regime,
}

impl Exponents {
    pub fn new(k: f64, alpha: f64) -> Result<Self> {
        Self::with_regime(k, alpha, Regime::of(k))
    }

    pub fn with_regime(k: f64, alpha: f64, regime: Regime) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParams(format!("k must be positive, got {k}")));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Exponents { k, alpha, regime })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ExactParams {
    p: Decimal,
    q: Decimal,
    s: Decimal,
    alpha: Decimal,
}

/// `(n, p, q, s, α)` with `p > 0`, `s ≥ 0`, `q > −n−1`, `q + s > −1`, `α ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub alpha: f64,
    regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactParams>,
}

impl SpaceParams {
    pub fn new(n: usize, p: f64, q: f64, s: f64, alpha: f64) -> Result<Self> {
        check_params(n, p, q, s, alpha)?;
        let k = (q + n as f64 + 1.0) / p;
        Ok(SpaceParams {
            n,
            p,
            q,
            s,
            alpha,
            regime: Regime::of(k),
            exact: None,
        })
    }

    /// Parameters given as exact decimals; the regime of `k` is decided in
    /// rational arithmetic.
    pub fn from_decimals(n: usize, p: Decimal, q: Decimal, s: Decimal, alpha: Decimal) -> Result<Self> {
        let (pf, qf, sf, af) = (p.to_f64(), q.to_f64(), s.to_f64(), alpha.to_f64());
        check_params(n, pf, qf, sf, af)?;
        if p.exact() <= &BigRational::from_integer(BigInt::from(0)) {
            return Err(Error::InvalidParams("p must be positive".into()));
        }
        let k = (q.exact() + BigRational::from_integer(BigInt::from(n as u64 + 1))) / p.exact();
        let regime = match compare_to_one(&k) {
            std::cmp::Ordering::Less => Regime::Below,
            std::cmp::Ordering::Equal => Regime::Critical,
            std::cmp::Ordering::Greater => Regime::Above,
        };
        Ok(SpaceParams {
            n,
            p: pf,
            q: qf,
            s: sf,
            alpha: af,
            regime,
            exact: Some(ExactParams { p, q, s, alpha }),
        })
    }

    pub fn k(&self) -> f64 {
        (self.q + self.n as f64 + 1.0) / self.p
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exponents(&self) -> Exponents {
        Exponents {
            k: self.k(),
            alpha: self.alpha,
            regime: self.regime,
        }
    }

    /// Decimal strings as supplied (or the shortest round-trip form of the floats).
    pub fn decimal_strings(&self) -> [String; 4] {
        match &self.exact {
            Some(e) => [
                e.p.to_string(),
                e.q.to_string(),
                e.s.to_string(),
                e.alpha.to_string(),
            ],
            None => [
                format!("{:?}", self.p),
                format!("{:?}", self.q),
                format!("{:?}", self.s),
                format!("{:?}", self.alpha),
            ],
        }
    }
}

fn check_params(n: usize, p: f64, q: f64, s: f64, alpha: f64) -> Result<()> {
    let fail = |m: String| Err(Error::InvalidParams(m));
    if n == 0 {
        return fail("n must be >= 1".into());
    }
    if !(p > 0.0 && p.is_finite()) {
        return fail(format!("p must be positive and finite, got {p}"));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return fail(format!("s must be >= 0 and finite, got {s}"));
    }
    if !(q > -(n as f64) - 1.0 && q.is_finite()) {
        return fail(format!("q must exceed -n-1 = {}, got {q}", -(n as f64) - 1.0));
    }
    if !(q + s > -1.0) {
        return fail(format!("q + s must exceed -1, got {}", q + s));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return fail(format!("alpha must be >= 0, got {alpha}"));
    }
    Ok(())
}

/// `G_t(ω)`: `1` for `t < 1`, `log(2/(1−|ω|²))` for `t = 1`,
/// `(1−|ω|²)^{1−t}` for `t > 1`.
pub fn g_growth(t: f64, omega: &BallPoint) -> f64 {
    growth_for(Regime::of(t), t, omega.defect())
}

/// `G_t` with the regime fixed by the caller and `defect = 1 − |ω|²`.
pub fn growth_for(regime: Regime, t: f64, defect: f64) -> f64 {
    match regime {
        Regime::Below => 1.0,
        Regime::Critical => (2.0 / defect).ln(),
        Regime::Above => defect.powf(1.0 - t),
    }
}

/// Sampling plan for suprema over the ball: the origin plus boundary shells
/// `r_j = 1 − 2^{−j}`, `j = 1..=shells`, with `per_shell` uniform directions
/// each, followed by local refinement around the best point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellSampler {
    pub shells: usize,
    pub per_shell: usize,
    pub seed: u64,
    pub refine: bool,
}

impl Default for ShellSampler {
    fn default() -> Self {
        ShellSampler {
            shells: 10,
            per_shell: 512,
            seed: 0,
            refine: true,
        }
    }
}

impl ShellSampler {
    pub fn new(shells: usize, per_shell: usize, seed: u64) -> Self {
        ShellSampler {
            shells,
            per_shell,
            seed,
            refine: true,
        }
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }
}

/// A sampled supremum. `value` under-approximates the true supremum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub argmax_point: BallPoint,
    /// `(shell radius, shell sup)`; the origin is recorded at radius 0.
    pub shell_profile: Vec<(f64, f64)>,
    /// Shell sups were still growing by more than 10% per shell at the end.
    pub diverging: bool,
    pub samples: usize,
}

pub(crate) struct SupResult {
    pub value: f64,
    pub argmax: BallPoint,
    pub shell_profile: Vec<(f64, f64)>,
    pub diverging: bool,
    pub samples: usize,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub(crate) fn scaled(direction: &[Complex64], radius: f64) -> BallPoint {
    let coords: Vec<Complex64> = direction.iter().map(|c| c * radius).collect();
    let nsq = norm_sq(&coords);
    BallPoint::from_parts_unchecked(coords, nsq)
}

/// Growth of more than 10% across each of the last two shell transitions.
pub(crate) fn is_diverging(shell_sups: &[f64]) -> bool {
    let m = shell_sups.len();
    m >= 3 && (m - 2..m).all(|i| shell_sups[i] > 1.1 * shell_sups[i - 1])
}

/// Sup of `objective` over the origin, the shells of `sampler`, and `hints`,
/// refined around the best point when `sampler.refine` is set.
pub(crate) fn sup_on_shells<F>(n: usize, sampler: &ShellSampler, hints: &[BallPoint], objective: F) -> SupResult
where
    F: Fn(&BallPoint) -> f64 + Sync,
{
    let origin = BallPoint::from_parts_unchecked(vec![Complex64::new(0.0, 0.0); n], 0.0);
    let mut best = (sanitize(objective(&origin)), origin);
    let mut profile = vec![(0.0, best.0)];
    let mut samples = 1;
    let mut shell_sups = Vec::with_capacity(sampler.shells);
    for j in 1..=sampler.shells {
        let radius = shell_radius(j);
        let parts = par_chunks(sampler.per_shell, |chunk, _start, len| {
            let mut rng = stream(sampler.seed, Domain::Shells, j as u32, chunk as u32);
            let mut local: Option<(f64, BallPoint)> = None;
            for _ in 0..len {
                let p = scaled(&sphere_direction(&mut rng, n), radius);
                let v = sanitize(objective(&p));
                if local.as_ref().is_none_or(|(m, _)| v > *m) {
                    local = Some((v, p));
                }
            }
            local
        });
        let mut shell_best: Option<(f64, BallPoint)> = None;
        for (v, p) in parts.into_iter().flatten() {
            if shell_best.as_ref().is_none_or(|(m, _)| v > *m) {
                shell_best = Some((v, p));
            }
        }
        samples += sampler.per_shell;
        if let (true, Some((v, p))) = (sampler.refine, shell_best.as_ref()) {
            if v.is_finite() {
                let direction: Vec<Complex64> = p.iter().map(|c| c / radius).collect();
                let mut used = 0;
                let mut eval = |q: &BallPoint| {
                    used += 1;
                    sanitize(objective(q))
                };
                if let Some((v, d)) = search_direction(radius, &direction, *v, &mut eval) {
                    shell_best = Some((v, scaled(&d, radius)));
                }
                samples += used;
            }
        }
        if let Some((v, p)) = shell_best {
            profile.push((radius, v));
            shell_sups.push(v);
            if v > best.0 {
                best = (v, p);
            }
        }
    }
    for h in hints {
        if h.dim() != n {
            continue;
        }
        let v = sanitize(objective(h));
        samples += 1;
        if v > best.0 {
            best = (v, h.clone());
        }
    }
    if sampler.refine && best.0.is_finite() {
        let (v, p, used) = refine_point(n, best.0, &best.1, &objective);
        samples += used;
        if v > best.0 {
            best = (v, p);
        }
    }
    SupResult {
        value: best.0,
        argmax: best.1,
        shell_profile: profile,
        diverging: is_diverging(&shell_sups),
        samples,
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Alternating golden-section search on the radius and coordinate pattern
/// search on the direction. Only improvements are kept.
fn refine_point<F>(n: usize, start_value: f64, start: &BallPoint, objective: &F) -> (f64, BallPoint, usize)
where
    F: Fn(&BallPoint) -> f64,
{
    let mut used = 0;
    let mut eval = |p: &BallPoint| {
        used += 1;
        sanitize(objective(p))
    };
    let mut radius = start.norm();
    let mut direction: Vec<Complex64> = if radius > 0.0 {
        start.iter().map(|c| c / radius).collect()
    } else {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[0] = Complex64::new(1.0, 0.0);
        e
    };
    let mut best_value = start_value;
    let mut best_point = start.clone();
    let r_max = max_radius();
    for _round in 0..3 {
        // radius
        let (mut lo, mut hi) = ((radius - (1.0 - radius)).max(0.0), (radius + 0.9 * (1.0 - radius)).min(r_max));
        let mut x1 = hi - GOLDEN * (hi - lo);
        let mut x2 = lo + GOLDEN * (hi - lo);
        let mut f1 = eval(&scaled(&direction, x1));
        let mut f2 = eval(&scaled(&direction, x2));
        for _ in 0..40 {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - GOLDEN * (hi - lo);
                f1 = eval(&scaled(&direction, x1));
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + GOLDEN * (hi - lo);
                f2 = eval(&scaled(&direction, x2));
            }
        }
        for (x, v) in [(x1, f1), (x2, f2), (hi, eval(&scaled(&direction, hi)))] {
            if v > best_value {
                best_value = v;
                radius = x;
                best_point = scaled(&direction, x);
            }
        }
        if let Some((v, d)) = search_direction(radius, &direction, best_value, &mut eval) {
            best_value = v;
            best_point = scaled(&d, radius);
            direction = d;
        }
    }
    (best_value, best_point, used)
}

/// Coordinate pattern search over unit directions at a fixed radius.
/// Returns the improved value and direction, if any.
pub(crate) fn search_direction<E>(radius: f64, start: &[Complex64], start_value: f64, eval: &mut E) -> Option<(f64, Vec<Complex64>)>
where
    E: FnMut(&BallPoint) -> f64,
{
    const MAX_EVALS: usize = 4000;
    let n = start.len();
    let mut direction = start.to_vec();
    let mut best_value = start_value;
    let mut improved = false;
    let mut step = 0.25;
    let floor = 1e-3 * (1.0 - radius).max(1e-9);
    let mut evals = 0;
    while step > floor && evals < MAX_EVALS {
        let mut moved = false;
        for coord in 0..2 * n {
            for sign in [1.0, -1.0] {
                let mut d = direction.clone();
                let delta = sign * step;
                if coord % 2 == 0 {
                    d[coord / 2].re += delta;
                } else {
                    d[coord / 2].im += delta;
                }
                let len = norm_sq(&d).sqrt();
                if len < 1e-12 {
                    continue;
                }
                d.iter_mut().for_each(|c| *c /= len);
                evals += 1;
                let v = eval(&scaled(&d, radius));
                if v > best_value {
                    best_value = v;
                    direction = d;
                    moved = true;
                    improved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    improved.then_some((best_value, direction))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {alpha}")));
    }
    Ok(())
}

fn norm_from_sup(f: &HoloExpr, n: usize, sup: SupResult) -> NormEstimate {
    let f0 = f.value(&vec![Complex64::new(0.0, 0.0); n]).norm();
    NormEstimate {
        value: f0 + sup.value,
        argmax_point: sup.argmax,
        shell_profile: sup.shell_profile,
        diverging: sup.diverging,
        samples: sup.samples,
    }
}

/// `|f(0)| + sup (1−|z|²)^α |∇f(z)|`, sampled.
pub fn bloch_norm(f: &HoloExpr, n: usize, alpha: f64, sampler: &ShellSampler) -> Result<NormEstimate> {
    bloch_norm_with_hints(f, n, alpha, sampler, &[])
}

/// [`bloch_norm`] with extra candidate points added to the search.
pub fn bloch_norm_with_hints(
    f: &HoloExpr,
    n: usize,
    alpha: f64,
    sampler: &ShellSampler,
    hints: &[BallPoint],
) -> Result<NormEstimate> {
    check_alpha(alpha)?;
    f.check_dim(n)?;
    let sup = sup_on_shells(n, sampler, hints, |z| {
        let (_, g) = f.value_grad(z);
        z.defect().powf(alpha) * norm_sq(&g).sqrt()
    });
    Ok(norm_from_sup(f, n, sup))
}

/// `|f(0)| + sup (1−|z|²)^α |R f(z)|`, sampled.
pub fn bloch_norm_radial(f: &HoloExpr, n: usize, alpha: f64, sampler: &ShellSampler) -> Result<NormEstimate> {
    check_alpha(alpha)?;
    f.check_dim(n)?;
    let sup = sup_on_shells(n, sampler, &[], |z| {
        let (_, g) = f.value_grad(z);
        let rf: Complex64 = z.iter().zip(&g).map(|(a, b)| a * b).sum();
        z.defect().powf(alpha) * rf.norm()
    });
    Ok(norm_from_sup(f, n, sup))
}

/// `sup_{u≠0} (1−|z|²)^p |∇f(z)·u| / sqrt((1−|z|²)|u|² + |<z,u>|²)` in closed form.
pub fn directional_seminorm_at(f: &HoloExpr, z: &BallPoint, p: f64) -> Result<f64> {
    f.check_dim(z.dim())?;
    let (_, g) = f.value_grad(z);
    let c = z.defect();
    let grad_sq = norm_sq(&g);
    let z_sq = z.norm_sq();
    // |<conj ∇f, z>|² / |z|² is the squared component of ∇f along z.
    let along_sq = if z_sq > 0.0 {
        let rf: Complex64 = z.iter().zip(&g).map(|(a, b)| a * b).sum();
        rf.norm_sqr() / z_sq
    } else {
        0.0
    };
    let quad = ((grad_sq - along_sq).max(0.0)) / c + along_sq;
    Ok(c.powf(p) * quad.sqrt())
}

/// Pointwise constant `C_p(z)` with `|f(z)| ≤ C_p(z) ‖f‖_{β^p}`.
pub fn growth_constant(p: f64, z: &BallPoint) -> f64 {
    let defect = z.defect();
    match Regime::of(p) {
        Regime::Below => 1.0 + 1.0 / (1.0 - p),
        Regime::Critical => 1.0 + 0.5 * (4.0 / defect).ln(),
        Regime::Above => 1.0 + 2f64.powf(p - 1.0) / ((p - 1.0) * defect.powf(p - 1.0)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub passed: bool,
    /// Largest observed `lhs / rhs`; at most 1 when the bound holds.
    pub max_ratio: f64,
    pub worst_point: Option<Vec<[f64; 2]>>,
    pub violations: usize,
    pub checked: usize,
}

impl BoundCheck {
    pub(crate) fn new() -> Self {
        BoundCheck {
            passed: true,
            max_ratio: 0.0,
            worst_point: None,
            violations: 0,
            checked: 0,
        }
    }

    pub(crate) fn record(&mut self, lhs: f64, rhs: f64, at: &BallPoint) {
        self.checked += 1;
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        if !(lhs <= rhs) {
            self.violations += 1;
            self.passed = false;
        }
        if ratio > self.max_ratio || ratio.is_nan() {
            self.max_ratio = ratio;
            self.worst_point = Some(at.vector().to_pairs());
        }
    }
}

/// Checks `|f(z)| ≤ C_p(z) · norm` at every sample, where `norm` is an
/// estimate of `‖f‖_{β^p}`.
pub fn growth_bound_check(f: &HoloExpr, p: f64, norm: f64, samples: &[BallPoint]) -> Result<BoundCheck> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("p must be positive, got {p}")));
    }
    let mut report = BoundCheck::new();
    for z in samples {
        f.check_dim(z.dim())?;
        report.record(f.eval(z).norm(), growth_constant(p, z) * norm, z);
    }
    Ok(report)
}

/// Checks `|f(z) − f(w)| ≤ (2 norm / (1−p)) |z−w|^{1−p}` on pairs with `z = r w`
/// for a real `r`.
pub fn lipschitz_check(f: &HoloExpr, p: f64, norm: f64, pairs: &[(BallPoint, BallPoint)]) -> Result<BoundCheck> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (0, 1), got {p}")));
    }
    let mut report = BoundCheck::new();
    for (z, w) in pairs {
        if z.dim() != w.dim() {
            return Err(Error::DimensionMismatch {
                expected: w.dim(),
                found: z.dim(),
            });
        }
        f.check_dim(z.dim())?;
        // z = r w with r real  ⇔  <z, w> real and |<z,w>| = |z||w|
        let zw = inner(z, w);
        let aligned = (zw.norm() - z.norm() * w.norm()).abs() <= 1e-12 && zw.im.abs() <= 1e-12;
        if !aligned {
            return Err(Error::InvalidArgument("pair is not on a common real line through 0".into()));
        }
        let diff: Vec<Complex64> = z.iter().zip(w.iter()).map(|(a, b)| a - b).collect();
        let dist = norm_sq(&diff).sqrt();
        let lhs = (f.eval(z) - f.eval(w)).norm();
        report.record(lhs, 2.0 * norm / (1.0 - p) * dist.powf(1.0 - p), z);
    }
    Ok(report)
}

/// Grid of centers `a` for the supremum in the `F(p, q, s)` seminorm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AGrid {
    pub shells: usize,
    /// Directions per shell; `None` means `8n`.
    pub directions: Option<usize>,
    pub seed: u64,
    pub hints: Vec<BallPoint>,
    /// Add the maximizer of `|∇f|(1−|z|²)^k` as a hint.
    pub auto_hint: bool,
    pub refine_rounds: usize,
    pub tolerance: f64,
}

impl Default for AGrid {
    fn default() -> Self {
        AGrid {
            shells: 10,
            directions: None,
            seed: 0,
            hints: Vec::new(),
            auto_hint: true,
            refine_rounds: 3,
            tolerance: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterEstimate {
    pub a: BallPoint,
    pub value: f64,
    pub standard_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpqsEstimate {
    /// `|f(0)| + (sup_a I(a))^{1/p}`
    pub value: f64,
    pub sup_integral: f64,
    pub sup_standard_error: f64,
    pub argmax_point: BallPoint,
    /// `(shell radius of a, largest integral on that shell)`
    pub shell_profile: Vec<(f64, f64)>,
    pub per_center: Vec<CenterEstimate>,
    /// Refinement was still moving the supremum by more than the tolerance.
    pub budget_exceeded: bool,
}

impl FpqsEstimate {
    pub fn relative_error(&self) -> f64 {
        if self.sup_integral > 0.0 {
            self.sup_standard_error / self.sup_integral
        } else {
            0.0
        }
    }
}

fn grid_centers(n: usize, grid: &AGrid) -> Vec<BallPoint> {
    let origin = BallPoint::from_parts_unchecked(vec![Complex64::new(0.0, 0.0); n], 0.0);
    let mut centers = vec![origin];
    let per_shell = grid.directions.unwrap_or(8 * n).max(1);
    for j in 1..=grid.shells {
        let radius = shell_radius(j);
        let mut rng = stream(grid.seed, Domain::Directions, j as u32, 0);
        for d in 0..per_shell {
            let direction = if d < 2 * n {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[d / 2] = Complex64::new(if d % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
                e
            } else {
                sphere_direction(&mut rng, n)
            };
            centers.push(scaled(&direction, radius));
        }
    }
    centers
}

/// `|f(0)| + (sup_a ∫_B |∇f|^p (1−|z|²)^q g^s(z, a) dv)^{1/p}` with the
/// supremum over the centers of `grid` (skipped for `s = 0`).
pub fn fpqs_seminorm(f: &HoloExpr, params: &SpaceParams, quad: &QuadratureSpec, grid: &AGrid) -> Result<FpqsEstimate> {
    let n = params.n;
    f.check_dim(n)?;
    let (p, q, s) = (params.p, params.q, params.s);
    let integral_at = |a: &BallPoint| -> Result<CenterEstimate> {
        let est = integrate_green_weighted(
            |z| {
                let (_, g) = f.value_grad(z);
                let grad = norm_sq(&g).sqrt();
                if grad == 0.0 {
                    0.0
                } else {
                    grad.powf(p) * z.defect().powf(q)
                }
            },
            a,
            s,
            quad,
        )?;
        Ok(CenterEstimate {
            a: a.clone(),
            value: est.value,
            standard_error: est.standard_error,
        })
    };
    let f0 = f.value(&vec![Complex64::new(0.0, 0.0); n]).norm();
    let origin = BallPoint::from_parts_unchecked(vec![Complex64::new(0.0, 0.0); n], 0.0);

    if s == 0.0 {
        let c = integral_at(&origin)?;
        return Ok(FpqsEstimate {
            value: f0 + c.value.max(0.0).powf(1.0 / p),
            sup_integral: c.value,
            sup_standard_error: c.standard_error,
            argmax_point: origin,
            shell_profile: vec![(0.0, c.value)],
            per_center: vec![c],
            budget_exceeded: false,
        });
    }

    let mut centers = grid_centers(n, grid);
    centers.extend(grid.hints.iter().filter(|h| h.dim() == n).cloned());
    if grid.auto_hint {
        let k = params.k();
        let sampler = ShellSampler::new(grid.shells.max(1), 64, grid.seed);
        let sup = sup_on_shells(n, &sampler, &[], |z| {
            let (_, g) = f.value_grad(z);
            z.defect().powf(k) * norm_sq(&g).sqrt()
        });
        if sup.value > 0.0 {
            centers.push(sup.argmax);
        }
    }
    let mut per_center = centers.iter().map(integral_at).collect::<Result<Vec<_>>>()?;

    let mut shell_profile = Vec::new();
    let radius_of = |c: &CenterEstimate| c.a.norm();
    for j in 0..=grid.shells {
        let r = if j == 0 { 0.0 } else { shell_radius(j) };
        let m = per_center
            .iter()
            .filter(|c| (radius_of(c) - r).abs() < 1e-12)
            .map(|c| c.value)
            .fold(f64::NEG_INFINITY, f64::max);
        if m.is_finite() {
            shell_profile.push((r, m));
        }
    }

    let mut best = per_center
        .iter()
        .cloned()
        .fold(None::<CenterEstimate>, |acc, c| match acc {
            Some(b) if b.value >= c.value => Some(b),
            _ => Some(c),
        })
        .expect("grid contains the origin");

    let mut budget_exceeded = false;
    let r_max_sq = max_radius().powi(2);
    let mut step = 0.5 * (1.0 - best.a.norm());
    for _round in 0..grid.refine_rounds {
        let before = best.value;
        let mut improved = None::<CenterEstimate>;
        for coord in 0..2 * n {
            for sign in [1.0, -1.0] {
                let mut a: Vec<Complex64> = best.a.to_vec();
                if coord % 2 == 0 {
                    a[coord / 2].re += sign * step;
                } else {
                    a[coord / 2].im += sign * step;
                }
                let a_sq = norm_sq(&a);
                if a_sq >= r_max_sq {
                    continue;
                }
                let c = integral_at(&BallPoint::from_parts_unchecked(a, a_sq))?;
                let better = improved.as_ref().map_or(c.value > best.value, |b| c.value > b.value);
                if better {
                    improved = Some(c.clone());
                }
                per_center.push(c);
            }
        }
        match improved {
            Some(c) => {
                best = c;
                step = step.min(0.5 * (1.0 - best.a.norm()));
            }
            None => step *= 0.5,
        }
        let change = (best.value - before) / before.abs().max(f64::MIN_POSITIVE);
        budget_exceeded = change > grid.tolerance;
        if !budget_exceeded && change == 0.0 && step < 1e-6 {
            break;
        }
    }

    Ok(FpqsEstimate {
        value: f0 + best.value.max(0.0).powf(1.0 / p),
        sup_integral: best.value,
        sup_standard_error: best.standard_error,
        argmax_point: best.a.clone(),
        shell_profile,
        per_center,
        budget_exceeded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Strategy;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z(i: usize) -> HoloExpr {
        HoloExpr::coord(i)
    }

    #[test]
    fn param_constraints() {
        assert!(SpaceParams::new(1, 2.0, 0.0, 1.0, 1.0).is_ok());
        assert!(SpaceParams::new(1, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(SpaceParams::new(1, 1.0, -2.0, 5.0, 1.0).is_err());
        assert!(SpaceParams::new(1, 1.0, -1.5, 0.4, 1.0).is_err());
        assert!(SpaceParams::new(1, 1.0, 0.0, -0.1, 1.0).is_err());
        assert!(SpaceParams::new(1, 1.0, 0.0, 0.0, -1.0).is_err());
        assert!(SpaceParams::new(0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!((SpaceParams::new(2, 2.0, 1.0, 1.0, 0.0).unwrap().k() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_regime_classification() {
        let d = |s: &str| Decimal::parse(s).unwrap();
        let params = SpaceParams::from_decimals(1, d("1.3"), d("-0.7"), d("1"), d("1")).unwrap();
        assert_eq!(params.regime(), Regime::Critical);
        let params = SpaceParams::from_decimals(1, d("1.3"), d("-0.69999999"), d("1"), d("1")).unwrap();
        assert_eq!(params.regime(), Regime::Above);
        let params = SpaceParams::from_decimals(2, d("6"), d("2.9999999999999"), d("1"), d("1")).unwrap();
        assert_eq!(params.regime(), Regime::Below);
        assert_eq!(Regime::of(1.0 + 1e-13), Regime::Critical);
    }

    #[test]
    fn growth_function_examples() {
        let w = |r2: f64| BallPoint::from_reals(&[r2.sqrt()]).unwrap();
        assert_eq!(g_growth(0.5, &w(0.3)), 1.0);
        assert!((g_growth(1.0, &w(0.5)) - 4f64.ln()).abs() < 1e-12);
        assert!((g_growth(2.0, &w(0.75)) - 4.0).abs() < 1e-12);
        for t in [0.5, 1.0, 2.5] {
            let mut prev = 0.0;
            for i in 0..200 {
                let v = g_growth(t, &BallPoint::from_reals(&[i as f64 / 200.0]).unwrap());
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    fn sampler() -> ShellSampler {
        ShellSampler::new(10, 256, 5)
    }

    #[test]
    fn bloch_norm_examples() {
        let cst = HoloExpr::constant(c(0.6, -0.8));
        assert!((bloch_norm(&cst, 2, 1.0, &sampler()).unwrap().value - 1.0).abs() < 1e-15);
        let est = bloch_norm(&z(0), 2, 1.0, &sampler()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "{}", est.value);
        // sup (1−|z|²)/|1−z| = 2, approached as z → 1
        let log = HoloExpr::atom_log(1.0 - 1e-12).unwrap();
        let est = bloch_norm(&log, 1, 1.0, &sampler()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-3, "{}", est.value);
        assert!(!est.diverging);
        assert!(est.shell_profile.iter().all(|(_, s)| *s <= est.value));
    }

    #[test]
    fn bloch_norm_flags_divergence() {
        // |∇f| ~ (1−|z|)^{-2} is not in β^1
        let f = HoloExpr::atom_pow(1.0 - 1e-12, -1.0).unwrap();
        let est = bloch_norm(&f, 1, 1.0, &sampler()).unwrap();
        assert!(est.diverging);
    }

    #[test]
    fn bloch_norm_is_monotone_in_budget_without_refinement() {
        let f = z(0) * z(1) + HoloExpr::atom_pow(0.9, -0.5).unwrap();
        let mut prev = 0.0;
        for per_shell in [16, 64, 256, 2048, 5000] {
            let est = bloch_norm(&f, 2, 1.0, &ShellSampler::new(8, per_shell, 1).without_refinement()).unwrap();
            assert!(est.value >= prev);
            prev = est.value;
        }
    }

    #[test]
    fn radial_norm_of_homogeneous_function() {
        // R(z_1 z_2) = 2 z_1 z_2; sup (1−|z|²)|z_1 z_2| = 1/4 · 1/2 at |z_1|=|z_2|=1/2
        let f = z(0) * z(1);
        let est = bloch_norm_radial(&f, 2, 1.0, &sampler()).unwrap();
        assert!((est.value - 0.25).abs() < 1e-4, "{}", est.value);
    }

    #[test]
    fn directional_seminorm_examples() {
        let f = z(0) * z(0) + z(1) * HoloExpr::real(3.0);
        let origin = BallPoint::origin(2).unwrap();
        let g = f.gradient(&origin);
        assert!((directional_seminorm_at(&f, &origin, 1.0).unwrap() - g.norm()).abs() < 1e-15);
        let one = HoloExpr::atom_pow(0.5, -2.0).unwrap();
        let w = BallPoint::from_coords(vec![c(0.3, 0.4)]).unwrap();
        let expected = w.defect().powf(0.7) * one.gradient(&w).norm();
        assert!((directional_seminorm_at(&one, &w, 0.7).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn directional_seminorm_dominates_sampled_directions() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let f = z(0).pow(3) + z(0) * z(1) * HoloExpr::constant(c(0.0, 2.0)) + HoloExpr::atom_log(0.7).unwrap();
        let w = BallPoint::from_coords(vec![c(0.5, 0.2), c(-0.3, 0.6)]).unwrap();
        let exact = directional_seminorm_at(&f, &w, 1.5).unwrap();
        let g = f.gradient(&w);
        let mut sampled: f64 = 0.0;
        for _ in 0..10_000 {
            let u = sphere_direction(&mut rng, 2);
            let num: Complex64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
            let zu = inner(&w, &u);
            let den = (w.defect() * norm_sq(&u) + zu.norm_sqr()).sqrt();
            let ratio = w.defect().powf(1.5) * num.norm() / den;
            assert!(ratio <= exact * (1.0 + 1e-12));
            sampled = sampled.max(ratio);
        }
        assert!(exact <= 1.01 * sampled);
    }

    #[test]
    fn growth_bound_examples() {
        let cst = HoloExpr::real(2.0);
        let pts: Vec<BallPoint> = (0..20).map(|i| BallPoint::from_reals(&[0.05 * i as f64, 0.0]).unwrap()).collect();
        let report = growth_bound_check(&cst, 0.5, 2.0, &pts).unwrap();
        assert!(report.passed && report.max_ratio < 1.0);
        let log = HoloExpr::atom_log(1.0 - 1e-12).unwrap();
        let norm = bloch_norm(&log, 1, 1.0, &sampler()).unwrap().value;
        let pts: Vec<BallPoint> = (1..14).map(|j| BallPoint::from_reals(&[1.0 - 0.5f64.powi(j)]).unwrap()).collect();
        let report = growth_bound_check(&log, 1.0, norm, &pts).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn lipschitz_examples() {
        let f = z(0) * HoloExpr::real(0.5) + z(1);
        let norm = bloch_norm(&f, 2, 0.5, &sampler()).unwrap().value;
        let w = BallPoint::from_coords(vec![c(0.3, 0.1), c(0.2, -0.4)]).unwrap();
        let same = lipschitz_check(&f, 0.5, norm, &[(w.clone(), w.clone())]).unwrap();
        assert_eq!(same.max_ratio, 0.0);
        let pairs: Vec<_> = (0..50)
            .map(|i| {
                let r = -1.5 + 0.06 * i as f64;
                let zc: Vec<Complex64> = w.iter().map(|x| x * r).collect();
                (BallPoint::from_coords(zc).unwrap(), w.clone())
            })
            .collect();
        let report = lipschitz_check(&f, 0.5, norm, &pairs).unwrap();
        assert!(report.passed && report.max_ratio < 1.0);
        let skew = BallPoint::from_coords(vec![c(0.1, 0.0), c(0.0, 0.1)]).unwrap();
        assert!(lipschitz_check(&f, 0.5, norm, &[(skew, w)]).is_err());
    }

    fn quad(seed: u64, count: usize) -> QuadratureSpec {
        QuadratureSpec::new(count, seed, Strategy::PullbackSingular, 8).unwrap()
    }

    #[test]
    fn fpqs_of_constant_is_its_modulus() {
        let params = SpaceParams::new(1, 2.0, 0.0, 1.0, 1.0).unwrap();
        let grid = AGrid {
            shells: 3,
            ..AGrid::default()
        };
        let est = fpqs_seminorm(&HoloExpr::constant(c(0.0, 3.0)), &params, &quad(1, 1000), &grid).unwrap();
        assert_eq!(est.value, 3.0);
    }

    #[test]
    fn fpqs_of_coordinate_is_stable_across_seeds() {
        let params = SpaceParams::new(1, 2.0, 0.0, 1.0, 1.0).unwrap();
        let run = |seed| {
            let grid = AGrid {
                shells: 6,
                seed,
                ..AGrid::default()
            };
            fpqs_seminorm(&z(0), &params, &quad(seed, 40_000), &grid).unwrap()
        };
        let (a, b) = (run(1), run(2));
        assert!(a.value.is_finite() && a.value > 0.0);
        assert!((a.value - b.value).abs() <= 0.02 * a.value, "{} {}", a.value, b.value);
    }

    #[test]
    fn fpqs_without_green_weight_matches_closed_form() {
        // ∫_B |1|² dv = 1 for f = z_1 in n = 1, p = 2, q = 0
        let params = SpaceParams::new(1, 2.0, 0.0, 0.0, 1.0).unwrap();
        let est = fpqs_seminorm(&z(0), &params, &quad(3, 10_000), &AGrid::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        // ∫_B |2z|² dv = 4 · 1/2
        let est = fpqs_seminorm(&z(0).pow(2), &params, &quad(3, 100_000), &AGrid::default()).unwrap();
        assert!((est.sup_integral - 2.0).abs() <= 3.0 * est.sup_standard_error, "{est:?}");
    }
}
