//! Seeded random trigonometric polynomials on a periodic box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::{Extension, GridBox, GridFunction};
use crate::spectral::transform;

/// `Re sum_k c_k exp(2 pi i k.x / L)` over `|k_a| <= modes[a]`.
#[derive(Clone, Debug)]
pub struct TrigPolynomial {
    domain: GridBox,
    modes: Vec<usize>,
    // row-major over k_a in -modes[a] ..= modes[a]
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn domain(&self) -> &GridBox {
        &self.domain
    }

    /// Largest angular frequency per axis.
    pub fn band(&self) -> Vec<f64> {
        self.modes
            .iter()
            .enumerate()
            .map(|(a, &k)| 2.0 * std::f64::consts::PI * k as f64 / self.domain.length(a))
            .collect()
    }

    /// Samples with periodic extension; every mode must lie below Nyquist.
    pub fn sample(&self, resolution: &[usize]) -> Result<GridFunction> {
        if resolution.len() != self.modes.len() {
            return Err(invalid("resolution", "one entry per axis required"));
        }
        for (a, (&n, &k)) in resolution.iter().zip(&self.modes).enumerate() {
            if n <= 2 * k {
                return Err(invalid(
                    "resolution",
                    format!("axis {a}: {n} samples cannot carry mode {k}"),
                ));
            }
        }
        let total: usize = resolution.iter().product();
        let mut bins = vec![Complex64::new(0.0, 0.0); total];
        let widths: Vec<usize> = self.modes.iter().map(|&k| 2 * k + 1).collect();
        for (pos, &c) in self.coeffs.iter().enumerate() {
            let mut rem = pos;
            let mut target = 0;
            for a in (0..widths.len()).rev() {
                let j = (rem % widths[a]) as i64 - self.modes[a] as i64;
                rem /= widths[a];
                let stride: usize = resolution[a + 1..].iter().product();
                target += j.rem_euclid(resolution[a] as i64) as usize * stride;
            }
            bins[target] += c;
        }
        transform(&mut bins, resolution, true);
        GridFunction::from_values(
            self.domain.clone(),
            resolution.to_vec(),
            bins.iter().map(|c| c.re).collect(),
            Extension::Periodic,
        )
    }
}

/// Draws `count` polynomials with coefficients uniform in the unit square
/// scaled by `prod_a (1 + |k_a|)^-decay`, normalized so that the absolute
/// coefficient sum is 1 (hence sup norm at most 1).
pub fn random_trig_family(domain: &GridBox, modes: &[usize], decay: f64, seed: u64, count: usize) -> Result<Vec<TrigPolynomial>> {
    if modes.len() != domain.dim() {
        return Err(invalid("modes", "one band per axis required"));
    }
    if modes.iter().any(|&k| k == 0) {
        return Err(invalid("modes", "band must contain at least one nonzero mode"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let widths: Vec<usize> = modes.iter().map(|&k| 2 * k + 1).collect();
    let size: usize = widths.iter().product();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut coeffs = Vec::with_capacity(size);
        for pos in 0..size {
            let mut rem = pos;
            let mut weight = 1.0;
            for a in (0..widths.len()).rev() {
                let j = (rem % widths[a]) as i64 - modes[a] as i64;
                rem /= widths[a];
                weight *= (1.0 + j.unsigned_abs() as f64).powf(-decay);
            }
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            coeffs.push(Complex64::new(re, im) * weight);
        }
        let total: f64 = coeffs.iter().map(|c| c.norm()).sum();
        for c in &mut coeffs {
            *c /= total;
        }
        out.push(TrigPolynomial {
            domain: domain.clone(),
            modes: modes.to_vec(),
            coeffs,
        });
    }
    Ok(out)
}

/// Mode count at a quarter of the Nyquist index for `n` samples.
pub fn quarter_nyquist_modes(n: usize) -> usize {
    n / 8
}
