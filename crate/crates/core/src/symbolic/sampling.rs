//! Fixed, seeded sample sets shared by the semantic checks.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of phase-space samples used by the zero and homogeneity tests.
pub const SAMPLE_COUNT: usize = 64;

const SAMPLE_SEED: u64 = 0x5eed_0f5a_3b1e;

/// A phase-space sample `(x, ξ)` with `ξ` on the unit sphere.
#[derive(Debug, Clone)]
pub struct Sample {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

/// The seeded sample set: `x` uniform in `[0, 2π)ⁿ`, `ξ` stratified on the
/// unit sphere.
pub fn phase_samples(n: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ n as u64);
    let dirs = stratified_directions(n, SAMPLE_COUNT, &mut rng);
    dirs.into_iter()
        .map(|xi| Sample {
            x: (0..n).map(|_| rng.gen::<f64>() * 2.0 * PI).collect(),
            xi,
        })
        .collect()
}

fn stratified_directions(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    match n {
        0 => vec![Vec::new(); count],
        1 => (0..count)
            .map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => (0..count)
            .map(|k| {
                let t = (k as f64 + rng.gen::<f64>()) * 2.0 * PI / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => (0..count)
            .map(|_| {
                loop {
                    // Box–Muller normals, normalized
                    let v: Vec<f64> = (0..n)
                        .map(|_| {
                            let u1: f64 = rng.gen::<f64>().max(1e-300);
                            let u2: f64 = rng.gen();
                            (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
                        })
                        .collect();
                    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    if norm > 1e-3 {
                        break v.into_iter().map(|a| a / norm).collect();
                    }
                }
            })
            .collect(),
    }
}

/// Deterministic grid of unit directions for ellipticity scans. In two and
/// three dimensions the grid contains the coordinate axes and the diagonals.
pub fn scan_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        0 => vec![Vec::new()],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = k as f64 * 2.0 * PI / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // latitude/longitude grid, latitudes include 0 and ±π/4
            let lat = ((count as f64).sqrt().round() as usize).max(4) & !3;
            let lon = (count / lat).max(4);
            let mut out = Vec::with_capacity(lat * lon);
            for a in 0..lat {
                let phi = -FRAC_PI_2 + a as f64 * PI / lat as f64;
                for b in 0..lon {
                    let th = b as f64 * 2.0 * PI / lon as f64;
                    out.push(vec![phi.cos() * th.cos(), phi.cos() * th.sin(), phi.sin()]);
                }
            }
            out
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
            stratified_directions(n, count, &mut rng)
        }
    }
}

/// Tensor grid of `per_axis` points per coordinate in `[0, 2π)ⁿ`.
pub fn box_grid(n: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let total = per_axis.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; n];
            for slot in p.iter_mut().rev() {
                *slot = (idx % per_axis) as f64 * 2.0 * PI / per_axis as f64;
                idx /= per_axis;
            }
            p
        })
        .collect()
}
