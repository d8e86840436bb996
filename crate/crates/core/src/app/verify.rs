//! Property suites run by `holoblock verify`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::criteria::{analyze_exponents, criterion_q, profile, rayleigh_sup, Bounded, Compact, Policy, ProfileConfig};
use crate::error::{Error, Result};
use crate::geometry::{inner, norm_sq, BallPoint, ComplexVector, MoebiusMap};
use crate::linalg::{random_unitary, CMatrix};
use crate::quadrature::{integrate, monomial_moment, QuadratureSpec, Strategy};
use crate::sampling::{sphere_direction, uniform_ball_point};
use crate::spaces::{bloch_norm, growth_bound_check, lipschitz_check, AGrid, Exponents, ShellSampler, SpaceParams};
use crate::symbols::{HoloExpr, SelfMapSymbol, SymbolPair, WeightSymbol};
use crate::witness::{
    build_witness, calibration_grid, decay_bound_check, family_builder, gradient_bound_check, log_kernel_bound_check,
    uniform_witness_norm_check, verify_lower_bound, CheckStatus, DirectionPlan, WitnessFamily, WitnessKind,
    LOWER_BOUND_FLOOR,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Geometry,
    Moments,
    Norms,
    Witnesses,
    Criteria,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        Some(match name {
            "geometry" => Suite::Geometry,
            "moments" => Suite::Moments,
            "norms" => Suite::Norms,
            "witnesses" => Suite::Witnesses,
            "criteria" => Suite::Criteria,
            "all" => Suite::All,
            _ => return None,
        })
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Geometry, Suite::Moments, Suite::Norms, Suite::Witnesses, Suite::Criteria],
            s => vec![s],
        }
    }

    fn label(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Moments => "moments",
            Suite::Norms => "norms",
            Suite::Witnesses => "witnesses",
            Suite::Criteria => "criteria",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Budget {
    Smoke,
    Standard,
    Deep,
}

impl Budget {
    pub fn parse(name: &str) -> Option<Budget> {
        Some(match name {
            "smoke" => Budget::Smoke,
            "standard" => Budget::Standard,
            "deep" => Budget::Deep,
            _ => return None,
        })
    }

    pub fn plan(self) -> BudgetPlan {
        match self {
            Budget::Smoke => BudgetPlan {
                geometry_pairs: 2_000,
                moment_samples: 100_000,
                norm_points: 500,
                norm_per_shell: 128,
                fpqs_samples: 8_000,
                fpqs_shells: 6,
                lower_bound_directions: 2,
                rayleigh_instances: 10,
                rayleigh_directions: 20_000,
                profile_per_shell: 64,
            },
            Budget::Standard => BudgetPlan {
                geometry_pairs: 10_000,
                moment_samples: 1_000_000,
                norm_points: 2_000,
                norm_per_shell: 512,
                fpqs_samples: 20_000,
                fpqs_shells: 10,
                lower_bound_directions: 4,
                rayleigh_instances: 50,
                rayleigh_directions: 50_000,
                profile_per_shell: 256,
            },
            Budget::Deep => BudgetPlan {
                geometry_pairs: 100_000,
                moment_samples: 4_000_000,
                norm_points: 10_000,
                norm_per_shell: 2_048,
                fpqs_samples: 80_000,
                fpqs_shells: 10,
                lower_bound_directions: 8,
                rayleigh_instances: 100,
                rayleigh_directions: 100_000,
                profile_per_shell: 1_024,
            },
        }
    }
}

/// Sample sizes behind a [`Budget`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetPlan {
    pub geometry_pairs: usize,
    pub moment_samples: usize,
    pub norm_points: usize,
    pub norm_per_shell: usize,
    pub fpqs_samples: usize,
    pub fpqs_shells: usize,
    pub lower_bound_directions: usize,
    pub rayleigh_instances: usize,
    pub rayleigh_directions: usize,
    pub profile_per_shell: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    /// The quantity compared against `threshold` (error, ratio, …).
    pub measured: f64,
    pub threshold: f64,
    /// Inputs, seed and values; always filled for failures.
    pub details: Value,
}

fn outcome(suite: Suite, name: &str, passed: bool, measured: f64, threshold: f64, details: Value) -> CheckOutcome {
    CheckOutcome {
        suite: suite.label().into(),
        name: name.into(),
        passed,
        measured,
        threshold,
        details,
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(salt);
    rng
}

/// Runs every check of `suite`.
pub fn run_suite(suite: Suite, budget: Budget, seed: u64) -> Result<Vec<CheckOutcome>> {
    let plan = budget.plan();
    let mut out = Vec::new();
    for s in suite.members() {
        match s {
            Suite::Geometry => out.extend(geometry_checks(&plan, seed)?),
            Suite::Moments => out.extend(moment_checks(&plan, seed)?),
            Suite::Norms => out.extend(norm_checks(&plan, seed)?),
            Suite::Witnesses => out.extend(witness_checks(&plan, seed)?),
            Suite::Criteria => out.extend(criteria_checks(&plan, seed)?),
            Suite::All => unreachable!("expanded by members"),
        }
    }
    Ok(out)
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

fn exact_norm_sq(z: &[Complex64]) -> BigRational {
    z.iter()
        .fold(BigRational::zero(), |acc, x| acc + exact(x.re) * exact(x.re) + exact(x.im) * exact(x.im))
}

/// `(1−|a|²)(1−|z|²)/|1−<z,a>|²` in exact arithmetic on the stored coordinates.
fn exact_kernel(a: &[Complex64], z: &[Complex64]) -> BigRational {
    let one = BigRational::one();
    let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
    for (zj, aj) in z.iter().zip(a) {
        let (zr, zi, ar, ai) = (exact(zj.re), exact(zj.im), exact(aj.re), exact(aj.im));
        re += &zr * &ar + &zi * &ai;
        im += zi * ar - zr * ai;
    }
    let den = (&one - re).pow(2) + im.pow(2);
    (&one - exact_norm_sq(a)) * (&one - exact_norm_sq(z)) / den
}

fn geometry_checks(plan: &BudgetPlan, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let mut rng = rng_for(seed, 100 + n as u64);
        let mut worst = [0.0f64; 4];
        let mut worst_case = [Value::Null, Value::Null, Value::Null, Value::Null];
        for _ in 0..plan.geometry_pairs {
            let a = BallPoint::from_coords(uniform_ball_point(&mut rng, n))?;
            let z = BallPoint::from_coords(uniform_ball_point(&mut rng, n))?;
            let map = MoebiusMap::new(a.clone());
            let image = map.apply(&z)?;
            let back = map.apply(&image)?;
            let at_zero = map.apply(&BallPoint::origin(n)?)?;
            let at_a = map.apply(&a)?;
            let dist = |u: &[Complex64], v: &[Complex64]| -> f64 {
                u.iter().zip(v).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
            };
            let kernel = exact_kernel(&a, &z);
            let direct = BigRational::one() - exact_norm_sq(&image);
            let errors = [
                dist(&back, &z),
                dist(&at_zero, &a),
                at_a.norm(),
                ((direct - &kernel) / &kernel).abs().to_f64().unwrap_or(f64::INFINITY),
            ];
            for i in 0..4 {
                if !(errors[i] <= worst[i]) {
                    worst[i] = errors[i];
                    worst_case[i] = json!({"a": a.vector().to_pairs(), "z": z.vector().to_pairs()});
                }
            }
        }
        let names = ["involution", "maps-zero-to-center", "maps-center-to-zero", "kernel-identity"];
        let tolerances = [1e-10, 1e-12, 1e-12, 1e-10];
        for i in 0..4 {
            out.push(outcome(
                Suite::Geometry,
                &format!("{}/n={n}", names[i]),
                worst[i] < tolerances[i],
                worst[i],
                tolerances[i],
                json!({"seed": seed, "pairs": plan.geometry_pairs, "worst": worst_case[i]}),
            ));
        }
    }
    Ok(out)
}

fn moment_checks(plan: &BudgetPlan, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let mut coords = vec![c(0.0, 0.0); n];
        coords[0] = c(0.6, 0.0);
        if n > 1 {
            coords[1] = c(0.0, 0.3);
        }
        let z = ComplexVector::new(coords)?;
        for m in 0..=2u32 {
            for t in [0.0, 1.0] {
                let spec = QuadratureSpec::new(plan.moment_samples, seed ^ ((n as u64) << 8 | (m as u64) << 4 | t as u64), Strategy::RadialStratified, 8)?;
                let est = integrate(n, &spec, |w| inner(w, &z).norm_sqr().powi(m as i32) * w.defect().powf(t))?;
                let exact = monomial_moment(n, m, t, &z)?;
                let err = (est.value - exact).abs();
                let rel = err / exact;
                let passed = err <= (3.0 * est.standard_error).max(1e-12 * exact) && rel <= 0.02;
                out.push(outcome(
                    Suite::Moments,
                    &format!("moment/n={n},m={m},t={t}"),
                    passed,
                    rel,
                    0.02,
                    json!({"seed": spec.seed, "estimate": est.value, "standard_error": est.standard_error, "exact": exact, "z": z.to_pairs()}),
                ));
            }
        }
    }
    Ok(out)
}

/// Twenty holomorphic test functions on C^n, each bounded with bounded
/// derivatives on the closed ball.
pub fn function_corpus(n: usize) -> Result<Vec<HoloExpr>> {
    let z1 = HoloExpr::coord(0);
    let zn = HoloExpr::coord(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let u = random_unitary(n, &mut rng);
    let half_sum = HoloExpr::real(0.5) * (z1.clone() + zn.clone());
    Ok(vec![
        HoloExpr::constant(c(2.0, 1.0)),
        z1.clone(),
        z1.clone().pow(2),
        z1.clone().pow(5),
        HoloExpr::real(0.3) * z1.clone() - HoloExpr::constant(c(0.0, 0.7)) * zn.clone() * z1.clone(),
        HoloExpr::atom_pow(0.5, -1.0)?,
        HoloExpr::atom_pow(0.9, -1.0)?,
        HoloExpr::atom_pow(0.9, 0.5)?,
        HoloExpr::atom_pow(0.99, -0.5)?,
        HoloExpr::atom_pow(0.7, 2.5)?,
        HoloExpr::atom_log(0.5)?,
        HoloExpr::atom_log(0.9)?,
        HoloExpr::atom_log(0.99)?,
        HoloExpr::atom_log_pow(0.8, 1.5)?,
        z1.clone() * HoloExpr::atom_pow(0.8, -1.0)?,
        zn.clone().pow(3) + z1.clone(),
        HoloExpr::compose(HoloExpr::atom_pow(0.9, -1.0)?, vec![half_sum]),
        HoloExpr::unitary(u, z1.clone().pow(2) + HoloExpr::atom_log(0.9)?)?,
        z1.clone() * HoloExpr::atom_log(0.95)?,
        HoloExpr::real(0.5) * (z1.pow(2) + HoloExpr::atom_pow(0.95, -0.8)?),
    ])
}

fn norm_checks(plan: &BudgetPlan, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let sampler = ShellSampler::new(10, plan.norm_per_shell, seed);

    let f = HoloExpr::coord(0).pow(2);
    let est = bloch_norm(&f, 1, 1.0, &sampler)?;
    let exact = 4.0 / (3.0 * 3f64.sqrt());
    let rel = (est.value - exact).abs() / exact;
    out.push(outcome(
        Suite::Norms,
        "bloch-norm/z^2",
        rel < 1e-6,
        rel,
        1e-6,
        json!({"seed": seed, "estimate": est.value, "exact": exact}),
    ));

    for n in [1usize, 2] {
        let corpus = function_corpus(n)?;
        let mut rng = rng_for(seed, 200 + n as u64);
        let points: Vec<BallPoint> = (0..plan.norm_points)
            .map(|_| BallPoint::from_coords(uniform_ball_point(&mut rng, n)))
            .collect::<Result<_>>()?;
        let pairs: Vec<(BallPoint, BallPoint)> = points
            .iter()
            .map(|w| {
                let t: f64 = rng.gen();
                let z = BallPoint::from_coords(w.iter().map(|x| x * t).collect())?;
                Ok((z, w.clone()))
            })
            .collect::<Result<_>>()?;
        for p in [0.5, 1.0, 2.0] {
            let (mut worst, mut failed) = (0.0f64, Vec::new());
            for (i, f) in corpus.iter().enumerate() {
                let norm = bloch_norm(f, n, p, &sampler)?.value;
                let check = growth_bound_check(f, p, norm, &points)?;
                worst = worst.max(check.max_ratio);
                if !check.passed {
                    failed.push(json!({"function": i, "norm": norm, "worst_point": check.worst_point}));
                }
            }
            out.push(outcome(
                Suite::Norms,
                &format!("growth-bound/n={n},p={p}"),
                failed.is_empty(),
                worst,
                1.0,
                json!({"seed": seed, "failures": failed}),
            ));
        }
        for p in [0.25, 0.5, 0.75] {
            let (mut worst, mut failed) = (0.0f64, Vec::new());
            for (i, f) in corpus.iter().enumerate() {
                let norm = bloch_norm(f, n, p, &sampler)?.value;
                let check = lipschitz_check(f, p, norm, &pairs)?;
                worst = worst.max(check.max_ratio);
                if !check.passed {
                    failed.push(json!({"function": i, "norm": norm, "worst_point": check.worst_point}));
                }
            }
            out.push(outcome(
                Suite::Norms,
                &format!("radial-lipschitz/n={n},p={p}"),
                failed.is_empty(),
                worst,
                1.0,
                json!({"seed": seed, "failures": failed}),
            ));
        }
    }
    Ok(out)
}

fn ladder_outcome(name: &str, report: &crate::witness::LadderReport, seed: u64) -> CheckOutcome {
    outcome(
        Suite::Witnesses,
        name,
        report.status == CheckStatus::Pass,
        if report.median > 0.0 { report.max / report.median } else { 0.0 },
        report.factor,
        json!({"seed": seed, "report": report}),
    )
}

fn witness_checks(plan: &BudgetPlan, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for n in [1usize, 2, 3] {
        let mut rng = rng_for(seed, 300 + n as u64);
        let samples: Vec<BallPoint> = (0..plan.norm_points)
            .map(|i| {
                let d = sphere_direction(&mut rng, n);
                let rad = if i % 2 == 0 {
                    1.0 - 10f64.powf(-rng.gen_range(0.0..6.0))
                } else {
                    rng.gen_range(0.0..1.0)
                };
                BallPoint::from_coords(d.iter().map(|x| x * rad).collect())
            })
            .collect::<Result<_>>()?;
        let mut kinds = vec![WitnessKind::Radial];
        if n > 1 {
            let coefficients = (0..n - 1)
                .map(|j| if j % 2 == 0 { c(0.6, -0.8) } else { c(0.0, 0.0) })
                .collect();
            kinds.push(WitnessKind::Tangential { coefficients });
        }
        let (mut grad_worst, mut decay_worst, mut failed) = (0.0f64, 0.0f64, Vec::new());
        for kind in &kinds {
            for &r in &[0.82, 0.9, 0.99, 0.999] {
                for &k in &[0.5, 1.0, 2.0] {
                    let fam = WitnessFamily::new(kind.clone(), n, r, k);
                    let g = gradient_bound_check(&fam, &samples)?;
                    let d = decay_bound_check(&fam, &samples)?;
                    grad_worst = grad_worst.max(g.max_ratio);
                    decay_worst = decay_worst.max(d.max_ratio);
                    if !(g.passed && d.passed) {
                        failed.push(json!({"kind": kind, "r": r, "k": k, "gradient": g, "decay": d}));
                    }
                }
            }
        }
        out.push(outcome(
            Suite::Witnesses,
            &format!("gradient-and-decay-bounds/n={n}"),
            failed.is_empty(),
            grad_worst.max(decay_worst),
            1.0,
            json!({"seed": seed, "failures": failed}),
        ));
    }

    let quad = QuadratureSpec::new(plan.fpqs_samples, seed, Strategy::PullbackSingular, 6)?;
    let grid = AGrid {
        shells: plan.fpqs_shells,
        seed,
        ..AGrid::default()
    };
    let ladder = [0.9, 0.99, 0.999];
    let params = SpaceParams::new(1, 2.0, 0.0, 1.5, 1.0)?;
    for (name, kind) in [("radial", WitnessKind::Radial), ("log-square", WitnessKind::LogSquare)] {
        let report = uniform_witness_norm_check(family_builder(kind, 1, params.k()), &params, &ladder, &quad, &grid)?;
        out.push(ladder_outcome(&format!("uniform-norm/{name}/n=1"), &report, seed));
    }

    let quad_kernel = QuadratureSpec::new(plan.moment_samples, seed, Strategy::Plain, 1)?;
    let report = log_kernel_bound_check(1, 0.0, &[0.5, 0.9, 0.99], &quad_kernel)?;
    out.push(ladder_outcome("log-kernel/n=1,t=0", &report, seed));

    for n in [1usize, 2] {
        let pair = SymbolPair::new(WeightSymbol::one(n)?, SelfMapSymbol::identity(n)?)?;
        let exps = Exponents::new(1.0, 1.0)?;
        let report = verify_lower_bound(
            &pair,
            &exps,
            &calibration_grid(n)?,
            &DirectionPlan {
                per_point: plan.lower_bound_directions,
                seed,
            },
            &ShellSampler::new(10, plan.norm_per_shell, seed),
            LOWER_BOUND_FLOOR,
        )?;
        let min = report.min_ratio.unwrap_or(0.0);
        out.push(outcome(
            Suite::Witnesses,
            &format!("lower-bound/identity/n={n}"),
            report.status == CheckStatus::Pass,
            min,
            LOWER_BOUND_FLOOR,
            json!({"seed": seed, "samples": report.samples.len(), "min_ratio": report.min_ratio}),
        ));
    }

    let f = build_witness(&WitnessFamily::new(WitnessKind::Power, 1, 0.9, 1.0))?;
    let v = f.eval(&BallPoint::from_reals(&[0.9])?).re;
    out.push(outcome(
        Suite::Witnesses,
        "power-witness/peak-value",
        (v - 1.0).abs() < 1e-12,
        (v - 1.0).abs(),
        1e-12,
        json!({"value": v}),
    ));
    Ok(out)
}

/// `e^{iθ}(a − z)/(1 − ā z)` on the disk.
pub fn disk_automorphism(theta: f64, a: Complex64) -> Result<HoloExpr> {
    let rot = Complex64::from_polar(1.0, theta);
    if a.norm() == 0.0 {
        return Ok(HoloExpr::constant(-rot) * HoloExpr::coord(0));
    }
    if !(a.norm() < 1.0) {
        return Err(Error::InvalidArgument(format!("|a| must be < 1, got {}", a.norm())));
    }
    let phase = Complex64::from_polar(1.0, -a.arg());
    let denominator = HoloExpr::compose(
        HoloExpr::atom_pow(a.norm(), -1.0)?,
        vec![HoloExpr::constant(phase) * HoloExpr::coord(0)],
    );
    Ok(HoloExpr::constant(rot) * (HoloExpr::constant(a) - HoloExpr::coord(0)) * denominator)
}

fn criteria_checks(plan: &BudgetPlan, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let mut rng = rng_for(seed, 400);

    let (mut above, mut reach, mut failed) = (0.0f64, f64::INFINITY, Vec::new());
    for inst in 0..plan.rayleigh_instances {
        let w = BallPoint::from_coords(uniform_ball_point(&mut rng, 2))?;
        let phi_w = uniform_ball_point(&mut rng, 2);
        let jac = CMatrix::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let lambda = rayleigh_sup(&w, &phi_w, &jac)?;
        let phi_defect = 1.0 - norm_sq(&phi_w);
        let mut best = 0.0f64;
        for _ in 0..plan.rayleigh_directions {
            let u = sphere_direction(&mut rng, 2);
            let ju: Vec<Complex64> = (0..2).map(|i| jac[(i, 0)] * u[0] + jac[(i, 1)] * u[1]).collect();
            let num = phi_defect * norm_sq(&ju) + inner(&phi_w, &ju).norm_sqr();
            let den = w.defect() + inner(&w, &u).norm_sqr();
            let ratio = num / den;
            above = above.max(ratio - lambda);
            best = best.max(ratio);
        }
        reach = reach.min(best / lambda);
        if best > lambda + 1e-12 || best < 0.99 * lambda {
            failed.push(json!({"instance": inst, "lambda": lambda, "sampled_max": best}));
        }
    }
    out.push(outcome(
        Suite::Criteria,
        "rayleigh-sup/n=2",
        failed.is_empty(),
        reach,
        0.99,
        json!({"seed": seed, "max_excess": above, "failures": failed}),
    ));

    let mut worst = 0.0f64;
    let mut worst_case = Value::Null;
    for _ in 0..plan.rayleigh_instances * 10 {
        let a = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let phi = SelfMapSymbol::new(vec![disk_automorphism(theta, a)?])?;
        let pair = SymbolPair::new(WeightSymbol::one(1)?, phi)?;
        let exps = Exponents::new(1.0, 1.0)?;
        let w = BallPoint::from_coords(uniform_ball_point(&mut rng, 1))?;
        let q = criterion_q(&pair, &exps, &w)?;
        if !((q - 1.0).abs() <= worst) {
            worst = (q - 1.0).abs();
            worst_case = json!({"a": [a.re, a.im], "theta": theta, "w": w.vector().to_pairs(), "Q": q});
        }
    }
    out.push(outcome(
        Suite::Criteria,
        "schwarz-pick/automorphisms",
        worst <= 1e-10,
        worst,
        1e-10,
        json!({"seed": seed, "worst": worst_case}),
    ));

    let policy = Policy::default();
    let config = ProfileConfig {
        shells: 10,
        per_shell: plan.profile_per_shell,
        seed,
        refine: true,
    };
    let mut sup_worst = 0.0f64;
    for _ in 0..10 {
        let c0 = Complex64::from_polar(rng.gen_range(0.0..0.3), rng.gen_range(0.0..std::f64::consts::TAU));
        let c1 = Complex64::from_polar(rng.gen_range(0.0..0.4), rng.gen_range(0.0..std::f64::consts::TAU));
        let c2 = Complex64::from_polar(rng.gen_range(0.05..0.28), rng.gen_range(0.0..std::f64::consts::TAU));
        let z = HoloExpr::coord(0);
        let phi = SelfMapSymbol::new(vec![HoloExpr::constant(c0) + HoloExpr::constant(c1) * z.clone() + HoloExpr::constant(c2) * z.pow(2)])?;
        let pair = SymbolPair::new(WeightSymbol::one(1)?, phi)?;
        let prof = profile(&pair, &Exponents::new(1.0, 1.0)?, &config)?;
        sup_worst = sup_worst.max(prof.sup_q);
    }
    out.push(outcome(
        Suite::Criteria,
        "schwarz-pick/self-maps",
        sup_worst <= 1.0 + 1e-6,
        sup_worst,
        1.0 + 1e-6,
        json!({"seed": seed}),
    ));

    let mut failed = Vec::new();
    for n in [1usize, 2] {
        let pair = SymbolPair::new(WeightSymbol::one(n)?, SelfMapSymbol::identity(n)?)?;
        for k in [0.5, 1.0, 2.0] {
            for (alpha, bounded, compact) in [
                (k, Bounded::Yes, if k < 1.0 { Some(Compact::No) } else { None }),
                (k + 0.25, Bounded::Yes, if k < 1.0 { Some(Compact::Yes) } else { None }),
                (k - 0.5, Bounded::No, None),
            ] {
                let a = analyze_exponents(&pair, &Exponents::new(k, alpha)?, &config, &policy)?;
                let ok_b = a.verdict.bounded.verdict == bounded;
                let ok_c = compact.is_none_or(|c| a.verdict.compact.verdict == c);
                if !(ok_b && ok_c) {
                    failed.push(json!({
                        "n": n, "k": k, "alpha": alpha,
                        "bounded": a.verdict.bounded.verdict, "compact": a.verdict.compact.verdict
                    }));
                }
            }
        }
    }
    out.push(outcome(
        Suite::Criteria,
        "identity-threshold",
        failed.is_empty(),
        failed.len() as f64,
        0.0,
        json!({"seed": seed, "failures": failed}),
    ));
    Ok(out)
}
