//! Multi-dimensional DFT helpers over row-major periodic grids.
//!
//! Mode arrays use the canonical lattice ordering: per-axis slot `j` holds
//! wavenumber index `n = j - R/2`. Kernel arrays are indexed by displacement
//! `d` with per-axis components in `0..R`.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Unnormalized transform along every axis of a row-major grid.
fn transform(data: &mut [Complex64], extent: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = 1;
    for &len in extent {
        let fft = planner.plan_fft(len, direction);
        let block = stride * len;
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, value) in line.iter().enumerate() {
                    data[base + i * stride] = *value;
                }
            }
        }
        stride = block;
    }
}

/// Re-indexes a canonical mode array so slot `m` holds mode `n ≡ m (mod R)`.
fn modes_to_fft_order(modes: &[Complex64], extent: &[usize]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); modes.len()];
    for (j, value) in modes.iter().enumerate() {
        let mut rem = j;
        let mut target = 0;
        let mut stride = 1;
        for &len in extent {
            let slot = rem % len;
            rem /= len;
            let m = (slot + len - len / 2) % len;
            target += m * stride;
            stride *= len;
        }
        out[target] = *value;
    }
    out
}

/// `c(d) = (1/N) Σ_k σ(k) e^{-i k·d}`: the displacement kernel of the
/// operator whose eigenvalue on `e^{-i k·x}` is `σ(k)`.
pub fn kernel_from_symbol(symbol: &[Complex64], extent: &[usize]) -> Vec<Complex64> {
    let mut buf = modes_to_fft_order(symbol, extent);
    transform(&mut buf, extent, FftDirection::Forward);
    let norm = 1.0 / symbol.len() as f64;
    buf.iter_mut().for_each(|c| *c *= norm);
    buf
}

/// `g(d) = (1/N) Σ_k w(k) e^{+i k·d}`.
pub fn kernel_from_weights(weights: &[f64], extent: &[usize]) -> Vec<Complex64> {
    let as_complex: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    let mut buf = modes_to_fft_order(&as_complex, extent);
    transform(&mut buf, extent, FftDirection::Inverse);
    let norm = 1.0 / weights.len() as f64;
    buf.iter_mut().for_each(|c| *c *= norm);
    buf
}

/// Displacement index of `-d` on the same grid.
pub fn negate_displacement(d: usize, extent: &[usize]) -> usize {
    let mut rem = d;
    let mut out = 0;
    let mut stride = 1;
    for &len in extent {
        let c = rem % len;
        rem /= len;
        out += ((len - c) % len) * stride;
        stride *= len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn direct_kernel(symbol: &[Complex64], r: usize) -> Vec<Complex64> {
        (0..r)
            .map(|d| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, s) in symbol.iter().enumerate() {
                    let n = j as f64 - (r / 2) as f64;
                    let k = 2.0 * PI * n / r as f64;
                    acc += s * Complex64::from_polar(1.0, -k * d as f64);
                }
                acc / r as f64
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum_odd_and_even() {
        for r in [7usize, 8] {
            let symbol: Vec<Complex64> = (0..r)
                .map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.3).cos()))
                .collect();
            let fast = kernel_from_symbol(&symbol, &[r]);
            let slow = direct_kernel(&symbol, r);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn negation_wraps_each_axis() {
        let extent = [5, 4];
        // d = (1, 2) -> (4, 2)
        assert_eq!(negate_displacement(1 + 5 * 2, &extent), 4 + 5 * 2);
        assert_eq!(negate_displacement(0, &extent), 0);
    }
}
