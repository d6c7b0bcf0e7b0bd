//! Discrete Fourier transforms of grid functions.
//!
//! The transform is unitary (`1/sqrt(N)` per direction). For a box of length
//! `L` sampled with `n` points, bin `j` carries the angular frequency
//! `xi = 2 pi j' / L` with `j'` the signed index in `(-n/2, n/2]`. The
//! continuous convention `(2 pi)^(-d/2) int e^{-ix.xi} f(x) dx` agrees with the
//! unitary DFT up to the constant `sqrt(cell volume * N / (2 pi)^d)`, which
//! cancels in every norm computed here.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{lane_starts, GridBox, GridFunction};

#[derive(Clone, Debug)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
    shape: Vec<usize>,
    domain: GridBox,
    /// Factor applied to the raw DFT sum.
    normalization: f64,
}

impl Spectrum {
    pub fn forward(u: &GridFunction) -> Spectrum {
        let mut coeffs: Vec<Complex64> = u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(&mut coeffs, u.shape(), false);
        let normalization = 1.0 / (u.len() as f64).sqrt();
        for c in &mut coeffs {
            *c *= normalization;
        }
        Spectrum {
            coeffs,
            shape: u.shape().to_vec(),
            domain: u.domain().clone(),
            normalization,
        }
    }

    /// Inverse transform; returns real parts and the largest imaginary residue.
    pub fn inverse_parts(&self) -> (Vec<f64>, f64) {
        let mut data = self.coeffs.clone();
        transform(&mut data, &self.shape, true);
        let scale = self.normalization;
        let mut resid: f64 = 0.0;
        let re = data
            .iter()
            .map(|c| {
                resid = resid.max((c.im * scale).abs());
                c.re * scale
            })
            .collect();
        (re, resid)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Angular frequencies of every bin along `axis`.
    pub fn frequencies(&self, axis: usize) -> Vec<f64> {
        angular_frequencies(self.shape[axis], self.domain.length(axis))
    }

    /// `|c|^2` per bin.
    pub fn power(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Multiplies bin `j` by `prod_a factors[a][j_a]`.
    pub fn apply_separable(&mut self, factors: &[Vec<Complex64>]) {
        let shape = self.shape.clone();
        for (axis, f) in factors.iter().enumerate() {
            let stride: usize = shape[axis + 1..].iter().product();
            let n = shape[axis];
            for (pos, c) in self.coeffs.iter_mut().enumerate() {
                *c *= f[(pos / stride) % n];
            }
        }
    }
}

pub fn angular_frequencies(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let signed = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            2.0 * PI * signed / length
        })
        .collect()
}

/// `|xi|` at the Nyquist bin.
pub fn nyquist(n: usize, length: f64) -> f64 {
    PI * n as f64 / length
}

pub(crate) fn transform(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    for axis in 0..shape.len() {
        let n = shape[axis];
        if n == 1 {
            continue;
        }
        let fft: Arc<dyn Fft<f64>> = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let stride: usize = shape[axis + 1..].iter().product();
        let mut lane = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for start in lane_starts(shape, axis) {
            for (k, slot) in lane.iter_mut().enumerate() {
                *slot = data[start + k * stride];
            }
            fft.process_with_scratch(&mut lane, &mut scratch);
            for (k, v) in lane.iter().enumerate() {
                data[start + k * stride] = *v;
            }
        }
    }
}

/// Separable weighted sums over a real array.
///
/// `weights[a]` is `None` to sum axis `a` out, or `Some((m, c))` with `m` an
/// `n_a x c` row-major matrix. Returns `T[c_0, .., c_{d-1}] =
/// sum_j values[j] prod_a m_a[j_a, c_a]` with summed-out axes of length 1.
pub fn contract(values: &[f64], shape: &[usize], weights: &[Option<(&[f64], usize)>]) -> (Vec<f64>, Vec<usize>) {
    let mut cur = values.to_vec();
    let mut cur_shape = shape.to_vec();
    for axis in 0..shape.len() {
        let n = cur_shape[axis];
        let outer: usize = cur_shape[..axis].iter().product();
        let inner: usize = cur_shape[axis + 1..].iter().product();
        let cols = weights[axis].map_or(1, |(_, c)| c);
        let mut next = vec![0.0; outer * cols * inner];
        for o in 0..outer {
            for j in 0..n {
                let src = &cur[(o * n + j) * inner..(o * n + j + 1) * inner];
                match weights[axis] {
                    None => {
                        let dst = &mut next[o * inner..(o + 1) * inner];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += s;
                        }
                    }
                    Some((m, _)) => {
                        for c in 0..cols {
                            let w = m[j * cols + c];
                            if w == 0.0 {
                                continue;
                            }
                            let dst = &mut next[(o * cols + c) * inner..(o * cols + c + 1) * inner];
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d += w * s;
                            }
                        }
                    }
                }
            }
        }
        cur = next;
        cur_shape[axis] = cols;
    }
    (cur, cur_shape)
}
