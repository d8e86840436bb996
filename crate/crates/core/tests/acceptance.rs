//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line to stdout
//! (uncaptured) and then asserts.

use std::io::Write;
use std::time::Instant;

use holoblock::app::{cmd_analyze, verify::function_corpus, RunConfig};
use holoblock::criteria::{analyze_exponents, criterion_q, profile, rayleigh_sup, Bounded, Compact, Policy, ProfileConfig};
use holoblock::linalg::CMatrix;
use holoblock::quadrature::{integrate, QuadratureSpec, Strategy};
use holoblock::spaces::{bloch_norm, growth_bound_check, lipschitz_check, AGrid, Exponents, ShellSampler, SpaceParams};
use holoblock::witness::{
    calibration_grid, family_builder, gradient_bound_check, gradient_bound_check_with, log_mixed_exponent,
    uniform_witness_norm_check, verify_lower_bound, CheckStatus, DirectionPlan, WitnessFamily, WitnessKind,
    LOWER_BOUND_FLOOR,
};
use holoblock::{BallPoint, ComplexVector, HoloExpr, MoebiusMap, SelfMapSymbol, SymbolPair, WeightSymbol};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn report(id: u32, title: &str, passed: bool, detail: String) {
    let line = format!(
        "{} criterion {id:>2} ({title}): {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    std::io::stdout().write_all(line.as_bytes()).unwrap();
    assert!(passed, "criterion {id} failed: {detail}");
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sphere<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Uniform in the ball: `|z|^{2n}` is uniform on `[0, 1)`.
fn ball<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let radius = rng.gen::<f64>().powf(0.5 / n as f64).min(1.0 - 1e-12);
    sphere(rng, n).into_iter().map(|x| x * radius).collect()
}

fn point(z: Vec<Complex64>) -> BallPoint {
    BallPoint::from_coords(z).unwrap()
}

fn dot(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn sq(z: &[Complex64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum()
}

fn dist(z: &[Complex64], w: &[Complex64]) -> f64 {
    z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

fn random_pairs(count: usize, n: usize, seed: u64) -> Vec<(BallPoint, BallPoint)> {
    let mut rng = rng(seed);
    (0..count).map(|_| (point(ball(&mut rng, n)), point(ball(&mut rng, n)))).collect()
}

#[test]
fn criterion_01_moebius_involution() {
    let started = Instant::now();
    let (mut inv, mut zero, mut center) = (0.0f64, 0.0f64, 0.0f64);
    for n in 1..=3 {
        for (a, z) in random_pairs(10_000, n, 100 + n as u64) {
            let m = MoebiusMap::new(a.clone());
            let back = m.apply(&m.apply(&z).unwrap()).unwrap();
            inv = inv.max(dist(&back, &z));
            zero = zero.max(dist(&m.apply(&BallPoint::origin(n).unwrap()).unwrap(), &a));
            center = center.max(sq(&m.apply(&a).unwrap()).sqrt());
        }
    }
    let secs = started.elapsed().as_secs_f64();
    report(
        1,
        "Moebius involution",
        inv < 1e-10 && zero < 1e-12 && center < 1e-12 && secs < 10.0,
        format!("max |f(f(z))-z| = {inv:.2e}, max |f(0)-a| = {zero:.2e}, max |f(a)| = {center:.2e}, {secs:.2}s"),
    );
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn exact_sq(z: &[Complex64]) -> BigRational {
    z.iter().fold(BigRational::zero(), |acc, x| acc + exact(x.re) * exact(x.re) + exact(x.im) * exact(x.im))
}

/// `(1−|a|²)(1−|z|²)/|1−<z,a>|²` evaluated exactly on the floating-point inputs.
fn exact_kernel(a: &[Complex64], z: &[Complex64]) -> BigRational {
    let one = BigRational::one();
    let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
    for (zj, aj) in z.iter().zip(a) {
        let (zr, zi, ar, ai) = (exact(zj.re), exact(zj.im), exact(aj.re), exact(aj.im));
        re += &zr * &ar + &zi * &ai;
        im += zi * ar - zr * ai;
    }
    let den = (&one - re).pow(2) + im.pow(2);
    (&one - exact_sq(a)) * (&one - exact_sq(z)) / den
}

#[test]
fn criterion_02_kernel_identity() {
    let (mut worst, mut worst_units, mut over, mut total) = (0.0f64, 0.0f64, 0usize, 0usize);
    for n in 1..=3 {
        for (a, z) in random_pairs(10_000, n, 100 + n as u64) {
            let image = MoebiusMap::new(a.clone()).apply(&z).unwrap();
            let direct = BigRational::one() - exact_sq(&image);
            let kernel = exact_kernel(&a, &z);
            let rel = ((direct - &kernel) / &kernel).abs().to_f64().unwrap();
            // rounding the image to f64 alone costs up to about u/(1 − |w|²)
            let floor = 0.5 * f64::EPSILON / kernel.to_f64().unwrap();
            worst = worst.max(rel);
            worst_units = worst_units.max(rel / floor.max(f64::MIN_POSITIVE));
            over += (rel >= 1e-10) as usize;
            total += 1;
        }
    }
    report(
        2,
        "kernel identity",
        worst < 1e-10,
        format!(
            "max relative error {worst:.2e}; {over}/{total} pairs at or above 1e-10; \
             max error in units of the f64 rounding floor u/(1-|w|^2) = {worst_units:.2}"
        ),
    );
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[test]
fn criterion_03_monomial_moments() {
    let started = Instant::now();
    let mut worst_rel = 0.0f64;
    let mut worst_sigma = 0.0f64;
    let mut failures = Vec::new();
    for n in 1..=3u32 {
        let mut zc = vec![c(0.0, 0.0); n as usize];
        zc[0] = c(0.5, 0.2);
        if n > 1 {
            zc[1] = c(-0.1, 0.4);
        }
        let z = ComplexVector::new(zc.clone()).unwrap();
        for m in 0..=2u32 {
            for t in 0..=1u32 {
                // n! m! t! / (t + n + m)! |z|^{2m}
                let exact = factorial(n) * factorial(m) * factorial(t) / factorial(t + n + m) * sq(&zc).powi(m as i32);
                let spec = QuadratureSpec::new(1_000_000, 31 + (n * 100 + m * 10 + t) as u64, Strategy::RadialStratified, 8).unwrap();
                let est = integrate(n as usize, &spec, |w| {
                    dot(w, z.as_slice()).norm_sqr().powi(m as i32) * (1.0 - sq(w)).powi(t as i32)
                })
                .unwrap();
                let err = (est.value - exact).abs();
                let rel = err / exact;
                let sigmas = if est.standard_error > 0.0 { err / est.standard_error } else { 0.0 };
                worst_rel = worst_rel.max(rel);
                worst_sigma = worst_sigma.max(sigmas);
                let within_sigma = err <= (3.0 * est.standard_error).max(1e-12 * exact);
                if !(within_sigma && rel <= 0.02) {
                    failures.push(format!("(n={n},m={m},t={t}): {} vs {exact}", est.value));
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    report(
        3,
        "monomial moments",
        failures.is_empty() && secs < 120.0,
        format!("max rel {worst_rel:.2e}, max {worst_sigma:.2} sigma, {secs:.1}s {failures:?}"),
    );
}

#[test]
fn criterion_04_rayleigh_sup() {
    let started = Instant::now();
    let mut rng = rng(4);
    let (mut excess, mut reach) = (f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..100 {
        let w = ball(&mut rng, 2);
        let phi_w = ball(&mut rng, 2);
        let jac = CMatrix::from_fn(2, 2, |_, _| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let lambda = rayleigh_sup(&point(w.clone()), &phi_w, &jac).unwrap();
        let (dw, dphi) = (1.0 - sq(&w), 1.0 - sq(&phi_w));
        let mut best = 0.0f64;
        for _ in 0..100_000 {
            let u = sphere(&mut rng, 2);
            let ju = [jac[(0, 0)] * u[0] + jac[(0, 1)] * u[1], jac[(1, 0)] * u[0] + jac[(1, 1)] * u[1]];
            let num = dphi * sq(&ju) + dot(&ju, &phi_w).norm_sqr();
            let den = dw * sq(&u) + dot(&u, &w).norm_sqr();
            best = best.max(num / den);
        }
        excess = excess.max(best - lambda * (1.0 + 1e-12));
        reach = reach.min(best / lambda);
    }
    let secs = started.elapsed().as_secs_f64();
    report(
        4,
        "direction supremum",
        excess <= 0.0 && reach >= 0.99 && secs < 60.0,
        format!("max sampled - eigen = {excess:.2e}, min sampled/eigen = {reach:.5}, {secs:.1}s"),
    );
}

fn random_disk_poly<R: Rng>(rng: &mut R, budget: f64) -> [Complex64; 3] {
    let weights: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let mut out = [c(0.0, 0.0); 3];
    for i in 0..3 {
        out[i] = Complex64::from_polar(budget * weights[i] / total, rng.gen_range(0.0..std::f64::consts::TAU));
    }
    out
}

fn poly_expr(a: &[Complex64; 3]) -> HoloExpr {
    let z = HoloExpr::coord(0);
    HoloExpr::constant(a[0]) + HoloExpr::constant(a[1]) * z.clone() + HoloExpr::constant(a[2]) * z.pow(2)
}

fn disk_pair(psi: HoloExpr, phi: HoloExpr) -> SymbolPair {
    SymbolPair::new(WeightSymbol::new(psi, 1).unwrap(), SelfMapSymbol::new(vec![phi]).unwrap()).unwrap()
}

#[test]
fn criterion_05_one_variable_reduction() {
    let mut rng = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let budget = rng.gen_range(0.1..0.99);
        let a = random_disk_poly(&mut rng, budget);
        let b = [c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))];
        let psi = HoloExpr::constant(b[0]) + HoloExpr::constant(b[1]) * HoloExpr::coord(0);
        let pair = disk_pair(psi, poly_expr(&a));
        let exps = Exponents::new(rng.gen_range(0.2..3.0), rng.gen_range(0.1..3.0)).unwrap();
        let w = ball(&mut rng, 1);
        let z = w[0];
        let phi = a[0] + a[1] * z + a[2] * z * z;
        let dphi = a[1] + 2.0 * a[2] * z;
        let expected = (b[0] + b[1] * z).norm() * (1.0 - z.norm_sqr()).powf(exps.alpha) * dphi.norm()
            / (1.0 - phi.norm_sqr()).powf(exps.k);
        let got = criterion_q(&pair, &exps, &point(w)).unwrap();
        if expected > 0.0 {
            worst = worst.max((got - expected).abs() / expected);
        }
    }
    report(5, "one-variable reduction", worst <= 1e-12, format!("max relative error {worst:.2e}"));
}

/// `e^{iθ}(a − z)/(1 − ā z)`.
fn automorphism(theta: f64, a: Complex64) -> HoloExpr {
    let denominator = HoloExpr::compose(
        HoloExpr::atom_pow(a.norm(), -1.0).unwrap(),
        vec![HoloExpr::constant(Complex64::from_polar(1.0, -a.arg())) * HoloExpr::coord(0)],
    );
    HoloExpr::constant(Complex64::from_polar(1.0, theta)) * (HoloExpr::constant(a) - HoloExpr::coord(0)) * denominator
}

#[test]
fn criterion_06_schwarz_pick() {
    let mut rng = rng(6);
    let exps = Exponents::new(1.0, 1.0).unwrap();
    let config = ProfileConfig { seed: 6, ..ProfileConfig::default() };
    let mut auto_worst = 0.0f64;
    let mut auto_samples = 0usize;
    for _ in 0..20 {
        let a = Complex64::from_polar(rng.gen_range(0.05..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
        let pair = disk_pair(HoloExpr::real(1.0), automorphism(rng.gen_range(0.0..std::f64::consts::TAU), a));
        let prof = profile(&pair, &exps, &config).unwrap();
        for s in &prof.samples {
            auto_worst = auto_worst.max((s.q - 1.0).abs());
        }
        auto_samples += prof.samples.len();
    }
    let mut sup_worst = 0.0f64;
    for i in 0..50 {
        let phi = if i % 2 == 0 {
            let budget = rng.gen_range(0.3..0.99);
            poly_expr(&random_disk_poly(&mut rng, budget))
        } else {
            // z times an automorphism: a degree-two Blaschke product
            let a = Complex64::from_polar(rng.gen_range(0.05..0.9), rng.gen_range(0.0..std::f64::consts::TAU));
            HoloExpr::coord(0) * automorphism(rng.gen_range(0.0..std::f64::consts::TAU), a)
        };
        let prof = profile(&disk_pair(HoloExpr::real(1.0), phi), &exps, &config).unwrap();
        sup_worst = sup_worst.max(prof.sup_q);
    }
    report(
        6,
        "Schwarz-Pick",
        auto_worst <= 1e-10 && sup_worst <= 1.0 + 1e-6,
        format!("automorphisms: max |Q-1| = {auto_worst:.2e} over {auto_samples} samples; other self-maps: max sup Q = {sup_worst:.9}"),
    );
}

#[test]
fn criterion_07_identity_threshold() {
    let started = Instant::now();
    let policy = Policy::default();
    let config = ProfileConfig { seed: 7, ..ProfileConfig::default() };
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in [1usize, 2] {
        let pair = SymbolPair::new(WeightSymbol::one(n).unwrap(), SelfMapSymbol::identity(n).unwrap()).unwrap();
        for k in [0.5, 1.0, 2.0] {
            let cases = [
                (k, Bounded::Yes, (k < 1.0).then_some(Compact::No)),
                (k + 0.25, Bounded::Yes, (k < 1.0).then_some(Compact::Yes)),
                (k - 0.5, Bounded::No, None),
            ];
            for (alpha, bounded, compact) in cases {
                let a = analyze_exponents(&pair, &Exponents::new(k, alpha).unwrap(), &config, &policy).unwrap();
                checked += 1;
                let ok = a.verdict.bounded.verdict == bounded && compact.is_none_or(|v| a.verdict.compact.verdict == v);
                if !ok {
                    failures.push(format!(
                        "n={n} k={k} alpha={alpha}: bounded={:?} compact={:?}",
                        a.verdict.bounded.verdict, a.verdict.compact.verdict
                    ));
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    report(
        7,
        "identity threshold",
        failures.is_empty() && secs < 120.0,
        format!("{checked} cases, {secs:.1}s {failures:?}"),
    );
}

/// `1 + 1/(1−p)`, `1 + ½ log(4/(1−|z|²))`, `1 + 2^{p−1}/((p−1)(1−|z|²)^{p−1})`.
fn growth_oracle(p: f64, z: &BallPoint) -> f64 {
    let d = 1.0 - sq(z);
    if p < 1.0 {
        1.0 + 1.0 / (1.0 - p)
    } else if p == 1.0 {
        1.0 + 0.5 * (4.0 / d).ln()
    } else {
        1.0 + 2f64.powf(p - 1.0) / ((p - 1.0) * d.powf(p - 1.0))
    }
}

fn corpus_points(n: usize, count: usize, seed: u64) -> Vec<BallPoint> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                point(ball(&mut rng, n))
            } else {
                let r = 1.0 - 10f64.powf(-rng.gen_range(0.0..7.0));
                point(sphere(&mut rng, n).into_iter().map(|x| x * r).collect())
            }
        })
        .collect()
}

#[test]
fn criterion_08_growth_bound() {
    let sampler = ShellSampler::new(10, 256, 8);
    let (mut worst, mut library_ok, mut checked) = (0.0f64, true, 0usize);
    for n in [1usize, 2, 3] {
        let points = corpus_points(n, 2000, 80 + n as u64);
        for f in function_corpus(n).unwrap() {
            for p in [0.5, 1.0, 2.0] {
                let norm = bloch_norm(&f, n, p, &sampler).unwrap().value;
                for z in &points {
                    worst = worst.max(f.eval(z).norm() / (growth_oracle(p, z) * norm));
                    checked += 1;
                }
                library_ok &= growth_bound_check(&f, p, norm, &points).unwrap().passed;
            }
        }
    }
    report(
        8,
        "growth bound",
        worst <= 1.0 && library_ok,
        format!("max |f(z)|/bound = {worst:.4} over {checked} evaluations (20 functions, p in {{0.5, 1, 2}}, n in {{1, 2, 3}})"),
    );
}

#[test]
fn criterion_09_radial_lipschitz() {
    let sampler = ShellSampler::new(10, 256, 9);
    let (mut worst, mut library_ok) = (0.0f64, true);
    for n in [1usize, 2] {
        let mut rng = rng(90 + n as u64);
        let pairs: Vec<(BallPoint, BallPoint)> = (0..10_000)
            .map(|_| {
                let u = sphere(&mut rng, n);
                let (r1, r2) = (rng.gen::<f64>(), 1.0 - 10f64.powf(-rng.gen_range(0.0..6.0)));
                (point(u.iter().map(|x| x * r1 * r2).collect()), point(u.iter().map(|x| x * r2).collect()))
            })
            .collect();
        for f in function_corpus(n).unwrap() {
            for p in [0.25, 0.5, 0.75] {
                let norm = bloch_norm(&f, n, p, &sampler).unwrap().value;
                for (z, w) in &pairs {
                    let bound = 2.0 * norm / (1.0 - p) * dist(z, w).powf(1.0 - p);
                    let lhs = (f.eval(z) - f.eval(w)).norm();
                    if lhs > 0.0 {
                        worst = worst.max(lhs / bound);
                    }
                }
                library_ok &= lipschitz_check(&f, p, norm, &pairs).unwrap().passed;
            }
        }
    }
    report(
        9,
        "radial Lipschitz bound",
        worst <= 1.0 && library_ok,
        format!("max |f(z)-f(w)|/bound = {worst:.4} on 10^4 radial pairs, n in {{1, 2}}"),
    );
}

#[test]
fn criterion_10_witness_suite() {
    let started = Instant::now();
    let mut lines = Vec::new();

    // Gradient bound |∇f| ≤ (1+k)(1−r²)/|1−r z_1|^{k+1} for the radial witness, as stated.
    let (mut literal, mut corrected) = (0.0f64, 0.0f64);
    for n in [1usize, 2] {
        let samples = corpus_points(n, 4000, 100 + n as u64);
        for r in [0.82, 0.9, 0.99, 0.999] {
            for k in [0.4, 1.0, 2.0] {
                let fam = WitnessFamily::new(WitnessKind::Radial, n, r, k);
                literal = literal.max(gradient_bound_check_with(&fam, 1.0 + k, &samples).unwrap().max_ratio);
                corrected = corrected.max(gradient_bound_check(&fam, &samples).unwrap().max_ratio);
            }
        }
    }
    let gradient_ok = literal <= 1.0;
    lines.push(format!("gradient bound with (1+k): max ratio {literal:.4}; with 1+(k+1)r: {corrected:.4}"));

    let quad = QuadratureSpec::new(8_000, 10, Strategy::PullbackSingular, 6).unwrap();
    let grid = AGrid { shells: 6, seed: 10, ..AGrid::default() };
    let ladder = [0.9, 0.99, 0.999];
    let mut ladders_ok = true;
    // (n, p, s for the log-square/radial rows, s for the mixed row, frozen x)
    for (n, p, s_main, s_mixed, x_frozen) in [(1usize, 2.0, 1.5, 1.0, 2.0), (2, 3.0, 2.5, 1.0, 1.5)] {
        let main = SpaceParams::new(n, p, 0.0, s_main, 1.0).unwrap();
        let mixed = SpaceParams::new(n, p, 0.0, s_mixed, 1.0).unwrap();
        let x = log_mixed_exponent(n, p, s_mixed).unwrap();
        assert!((x - x_frozen).abs() < 1e-15, "exponent window moved: {x}");
        let runs = [
            ("radial", WitnessKind::Radial, &main),
            ("log-square", WitnessKind::LogSquare, &main),
            ("log-mixed", WitnessKind::LogMixed { p, x }, &mixed),
        ];
        for (name, kind, params) in runs {
            let rep = uniform_witness_norm_check(family_builder(kind, n, params.k()), params, &ladder, &quad, &grid).unwrap();
            ladders_ok &= rep.status == CheckStatus::Pass;
            let values: Vec<String> = rep.entries.iter().map(|e| format!("{:.3}", e.value)).collect();
            lines.push(format!("{name} n={n}: [{}] {:?}", values.join(", "), rep.status));
        }
    }

    let mut min_ratio = f64::INFINITY;
    for n in [1usize, 2] {
        let pair = SymbolPair::new(WeightSymbol::one(n).unwrap(), SelfMapSymbol::identity(n).unwrap()).unwrap();
        let rep = verify_lower_bound(
            &pair,
            &Exponents::new(1.0, 1.0).unwrap(),
            &calibration_grid(n).unwrap(),
            &DirectionPlan { per_point: 2, seed: 10 },
            &ShellSampler::new(10, 128, 10),
            LOWER_BOUND_FLOOR,
        )
        .unwrap();
        min_ratio = min_ratio.min(rep.min_ratio.unwrap_or(0.0));
    }
    let lower_ok = min_ratio > LOWER_BOUND_FLOOR;
    lines.push(format!("lower bound min ratio {min_ratio:.3} vs floor {LOWER_BOUND_FLOOR}"));

    let secs = started.elapsed().as_secs_f64();
    report(
        10,
        "witness suite",
        gradient_ok && ladders_ok && lower_ok && secs < 300.0,
        format!("{}; {secs:.1}s", lines.join("; ")),
    );
}

#[test]
fn criterion_11_determinism() {
    let text = r#"{
        "version": 1, "seed": 2024,
        "symbols": {
            "psi": {"kind": "sum", "terms": [{"kind": "const", "value": [1, 0]}, {"kind": "coord", "index": 2}]},
            "phi": {"components": [
                {"kind": "prod", "factors": [{"kind": "const", "value": [0.5, 0.1]}, {"kind": "coord", "index": 1}]},
                {"kind": "prod", "factors": [{"kind": "coord", "index": 1}, {"kind": "coord", "index": 2}]}
            ]}
        },
        "params": {"n": 2, "p": "3", "q": "0", "s": "1", "alpha": "1"},
        "sampler": {"shells": 8, "per_shell": 128}
    }"#;
    let mut csvs = Vec::new();
    let mut reports = Vec::new();
    for workers in [None, Some(1), Some(4), Some(1)] {
        let mut cfg = RunConfig::parse(text).unwrap();
        cfg.workers = workers;
        let dir = tempfile::tempdir().unwrap();
        let mut rep = cmd_analyze(&cfg, dir.path()).unwrap();
        csvs.push(std::fs::read(dir.path().join("samples.csv")).unwrap());
        rep.as_object_mut().unwrap().remove("runtime");
        reports.push(rep);
    }
    let same_csv = csvs.windows(2).all(|w| w[0] == w[1]);
    let same_json = reports.windows(2).all(|w| w[0] == w[1]);
    report(
        11,
        "determinism",
        same_csv && same_json,
        format!("4 runs (default, 1, 4, 1 workers): CSV identical = {same_csv}, report identical = {same_json}, {} bytes", csvs[0].len()),
    );
}
