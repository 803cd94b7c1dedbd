//! Discrete Fourier transforms, circular correlation and the complex
//! trilinear product.
//!
//! Two transform paths exist. [`dft_naive`] is the plain `O(K²)` summation and
//! stays around as the reference for everything else. [`dft`] dispatches to an
//! iterative radix-2 FFT when `K` is a power of two and to the naive sum
//! otherwise. All transforms are indexed from 0 and use the `e^{-2iπjk/K}`
//! kernel forward, `e^{+2iπjk/K}` with `1/K` normalization inverse.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute bound on the imaginary residue of a transform result that is
/// real in exact arithmetic. Scaled up by the magnitude of the inputs.
pub const IMAG_TOLERANCE: f64 = 1e-10;

fn check_nonempty(len: usize, what: &str) -> Result<()> {
    if len == 0 {
        return Err(Error::invalid(format!("{what}: empty vector")));
    }
    Ok(())
}

fn check_same_len(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!(
            "{what}: length mismatch ({a} vs {b})"
        )));
    }
    check_nonempty(a, what)
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// `e^{sign·2iπ·jk/K}` with the exponent reduced modulo `K` first.
fn twiddle(j: usize, k: usize, len: usize, sign: f64) -> Complex64 {
    let r = ((j as u128 * k as u128) % len as u128) as f64;
    let (sin, cos) = (sign * 2.0 * PI * r / len as f64).sin_cos();
    Complex64::new(cos, sin)
}

fn naive_transform(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let len = x.len();
    (0..len)
        .map(|j| {
            x.iter()
                .enumerate()
                .map(|(k, &xk)| xk * twiddle(j, k, len, sign))
                .sum()
        })
        .collect()
}

/// Reference DFT by direct summation, `O(K²)`.
pub fn dft_naive(x: &[f64]) -> Result<Vec<Complex64>> {
    check_nonempty(x.len(), "dft")?;
    let x: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(naive_transform(&x, -1.0))
}

/// Reference inverse DFT by direct summation, `O(K²)`, with `1/K` scaling.
pub fn idft_naive(spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    check_nonempty(spectrum.len(), "idft")?;
    let scale = 1.0 / spectrum.len() as f64;
    Ok(naive_transform(spectrum, 1.0)
        .into_iter()
        .map(|v| v * scale)
        .collect())
}

/// In-place iterative radix-2 Cooley-Tukey transform. `buf.len()` must be a
/// power of two. No normalization is applied in either direction.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "radix-2 FFT needs a power-of-two length");
    if n == 1 {
        return;
    }

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    // Stage `len` uses every (n/len)-th entry of the full-length table.
    let twiddles: Vec<Complex64> = (0..n / 2).map(|m| twiddle(m, 1, n, sign)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for m in 0..half {
                let t = twiddles[m * stride] * buf[start + m + half];
                let u = buf[start + m];
                buf[start + m] = u + t;
                buf[start + m + half] = u - t;
            }
        }
        len <<= 1;
    }
}

fn transform(mut buf: Vec<Complex64>, inverse: bool) -> Vec<Complex64> {
    if buf.len().is_power_of_two() {
        fft_in_place(&mut buf, inverse);
        buf
    } else {
        naive_transform(&buf, if inverse { 1.0 } else { -1.0 })
    }
}

/// Forward DFT of a real vector.
pub fn dft(x: &[f64]) -> Result<Vec<Complex64>> {
    check_nonempty(x.len(), "dft")?;
    Ok(transform(
        x.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        false,
    ))
}

/// Forward DFT of a complex vector.
pub fn dft_complex(x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_nonempty(x.len(), "dft")?;
    Ok(transform(x.to_vec(), false))
}

/// Inverse DFT with `1/K` normalization.
pub fn idft(spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    check_nonempty(spectrum.len(), "idft")?;
    let scale = 1.0 / spectrum.len() as f64;
    Ok(transform(spectrum.to_vec(), true)
        .into_iter()
        .map(|v| v * scale)
        .collect())
}

/// Drops the imaginary part of a vector that must be real, failing if any
/// residue exceeds [`IMAG_TOLERANCE`] times `scale` (at least 1).
pub fn real_part_checked(v: &[Complex64], scale: f64) -> Result<Vec<f64>> {
    let tol = IMAG_TOLERANCE * scale.max(1.0);
    if let Some((idx, z)) = v.iter().enumerate().find(|(_, z)| z.im.abs() > tol) {
        return Err(Error::Numeric(format!(
            "imaginary residue {:e} at index {idx} exceeds {tol:e}",
            z.im
        )));
    }
    Ok(v.iter().map(|z| z.re).collect())
}

/// `(a ⋆ b)[k] = Σ_i a[i]·b[(i+k) mod K]`, by direct `O(K²)` summation.
pub fn circular_correlation_direct(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_same_len(a.len(), b.len(), "circular_correlation")?;
    let mut out = vec![0.0; a.len()];
    correlate_into(a, b, &mut out);
    Ok(out)
}

/// Unchecked direct correlation; all three slices share one length.
pub(crate) fn correlate_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    let k = a.len();
    // b2[shift..shift + K] = b[(i + shift) mod K] for i in 0..K.
    let b2: Vec<f64> = b.iter().chain(b).copied().collect();
    for (shift, slot) in out.iter_mut().enumerate() {
        *slot = dot4(a, &b2[shift..shift + k]);
    }
}

/// Dot product with four partial sums.
#[inline]
pub(crate) fn dot4(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ac, ar) = a.split_at(a.len() & !3);
    let (bc, br) = b.split_at(ac.len());
    for (x, y) in ac.chunks_exact(4).zip(bc.chunks_exact(4)) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ar.iter().zip(br) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `(a ∗ b)[k] = Σ_i a[i]·b[(k-i) mod K]`, by direct summation.
pub fn circular_convolution_direct(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_same_len(a.len(), b.len(), "circular_convolution")?;
    let mut out = vec![0.0; a.len()];
    convolve_into(a, b, &mut out);
    Ok(out)
}

pub(crate) fn convolve_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    let k = a.len();
    // rev2[K - m + i] = a[(m - i) mod K], so slot m is one contiguous dot.
    let rev2: Vec<f64> = (0..2 * k).map(|j| a[(2 * k - j) % k]).collect();
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = dot4(b, &rev2[k - m..2 * k - m]);
    }
}

/// Circular correlation through the frequency domain:
/// `F⁻¹(conj(F(a)) ⊙ F(b))`.
pub fn circular_correlation(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_same_len(a.len(), b.len(), "circular_correlation")?;
    let fa = dft(a)?;
    let fb = dft(b)?;
    let product: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    let scale = max_abs(a) * max_abs(b) * a.len() as f64;
    real_part_checked(&idft(&product)?, scale)
}

/// `⟨a, b, c⟩ = Σ_j a[j]·b[j]·c[j]`.
pub fn trilinear_product(a: &[Complex64], b: &[Complex64], c: &[Complex64]) -> Result<Complex64> {
    check_same_len(a.len(), b.len(), "trilinear_product")?;
    check_same_len(a.len(), c.len(), "trilinear_product")?;
    Ok(a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| x * y * z)
        .sum())
}

/// Real dot product evaluated in the frequency domain:
/// `(1/K)·Σ_j F(x)[j]·conj(F(y)[j])`.
pub fn parseval_dot(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x.len(), y.len(), "parseval_dot")?;
    let fx = dft(x)?;
    let fy = dft(y)?;
    let sum: Complex64 = fx.iter().zip(&fy).map(|(a, b)| a * b.conj()).sum();
    let value = sum / x.len() as f64;
    let scale = max_abs(x) * max_abs(y) * x.len() as f64;
    Ok(real_part_checked(&[value], scale)?[0])
}

/// `s(x)`: the sum of entries, which is the zero-frequency DFT slot.
pub fn spectrum_sum(x: &[f64]) -> f64 {
    x.iter().sum()
}

/// `t(x)`: the alternating sum `Σ x[2k] − x[2k+1]`, which is the DFT slot at
/// `K/2` for even `K`. Returns `None` for odd `K`.
pub fn alternating_sum(x: &[f64]) -> Option<f64> {
    if !x.len().is_multiple_of(2) {
        return None;
    }
    Some(
        x.chunks_exact(2)
            .map(|pair| pair[0] - pair[1])
            .sum(),
    )
}
