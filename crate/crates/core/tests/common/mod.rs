//! Generators shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use psido::quantize::{GridFunction, GridSpectrum};
use psido::syntax;
use psido::ClassicalSymbol;
use rand::Rng;

/// Trigonometric polynomial of x-band 1 with complex coefficients, as text.
pub fn random_coefficient<R: Rng>(rng: &mut R) -> String {
    let mut c = || {
        let (re, im): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        format!("({re:.6} + {im:.6}*i)")
    };
    format!(
        "{} + {}*cos(x1) + {}*sin(x2) + {}*cos(x1 - x2)",
        c(),
        c(),
        c(),
        c()
    )
}

/// Differential symbol `Σ_{|α|≤2} c_α(x) ξ^α` in two dimensions with
/// truncation deep enough that compositions keep every term.
pub fn random_differential_symbol<R: Rng>(rng: &mut R) -> ClassicalSymbol {
    let degree2 = ["xi1^2", "xi1*xi2", "xi2^2"]
        .iter()
        .map(|m| format!("({})*{m}", random_coefficient(rng)))
        .collect::<Vec<_>>()
        .join(" + ");
    let degree1 = ["xi1", "xi2"]
        .iter()
        .map(|m| format!("({})*{m}", random_coefficient(rng)))
        .collect::<Vec<_>>()
        .join(" + ");
    let degree0 = random_coefficient(rng);
    let text = format!(
        "symbol R {{ dim=2 order=2 trunc=5\n term 2: \"{degree2}\"\n term 1: \"{degree1}\"\n term 0: \"{degree0}\" }}"
    );
    syntax::parse_symbol_text(&text).expect("generated symbol parses")
}

/// Grid function whose Fourier coefficients are uniform in the unit square
/// for `max |kᵢ| ≤ band` and zero elsewhere.
pub fn random_band_limited<R: Rng>(
    n: usize,
    m: usize,
    band: i64,
    rng: &mut R,
) -> GridFunction<f64> {
    GridSpectrum::from_fn(n, m, |k| {
        if k.iter().all(|v| v.abs() <= band) {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .expect("valid grid")
    .to_grid()
}

/// `max |a − b| / max |b|`.
pub fn relative_difference(a: &GridFunction<f64>, b: &GridFunction<f64>) -> f64 {
    a.sub(b).expect("same grid").max_abs() / b.max_abs().max(f64::MIN_POSITIVE)
}
