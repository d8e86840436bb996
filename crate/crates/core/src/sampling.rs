//! Counter-based random streams and ball/sphere samplers.
//!
//! Every random draw is made from a stream keyed by `(seed, domain, stratum,
//! chunk)`, so results do not depend on how chunks are scheduled across
//! worker threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::geometry::{norm_sq, BOUNDARY_GUARD};

/// Samples per chunk; fixed so that chunk boundaries never depend on workers.
pub const CHUNK: usize = 2048;

/// Domains separate the random streams of unrelated consumers sharing a seed.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
pub enum Domain {
    Quadrature = 1,
    Shells = 2,
    Directions = 3,
    SelfMap = 4,
    Refine = 5,
    Verify = 6,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn stream(seed: u64, domain: Domain, stratum: u32, chunk: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(domain as u64)));
    rng.set_stream(((stratum as u64) << 32) | chunk as u64);
    rng
}

/// Uniform point on the unit sphere of C^n (real dimension 2n).
pub fn sphere_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let len = norm_sq(&v).sqrt();
        if len > 1e-12 {
            return v.into_iter().map(|c| c / len).collect();
        }
    }
}

/// Uniformly distributed point of the ball (radius `U^{1/(2n)}`), capped at
/// [`max_radius`].
pub fn uniform_ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let direction = sphere_direction(rng, n);
    let u: f64 = rng.gen();
    let radius = u.powf(0.5 / n as f64).min(max_radius());
    direction.into_iter().map(|c| c * radius).collect()
}

/// Largest radius handed out by the samplers.
pub fn max_radius() -> f64 {
    (1.0 - 2.0 * BOUNDARY_GUARD).sqrt()
}

/// Radius of boundary shell `j`: `1 − 2^{−j}`.
pub fn shell_radius(j: usize) -> f64 {
    (1.0 - 0.5f64.powi(j as i32)).min(max_radius())
}

/// Runs `work(chunk_index, start, len)` over `count` items split in fixed
/// chunks, returning per-chunk results in chunk order.
pub fn par_chunks<T, F>(count: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize, usize) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            work(c, start, CHUNK.min(count - start))
        })
        .collect()
}
