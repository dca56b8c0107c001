//! FFT helpers shared by the frequency-domain filters, the fiber model and
//! the band-limited resampler. All transforms are circular.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub fn fft(data: &mut [Complex64]) {
    if data.is_empty() {
        return;
    }
    FftPlanner::new().plan_fft_forward(data.len()).process(data);
}

/// Inverse transform including the `1/N` normalization.
pub fn ifft(data: &mut [Complex64]) {
    if data.is_empty() {
        return;
    }
    FftPlanner::new().plan_fft_inverse(data.len()).process(data);
    let scale = 1.0 / data.len() as f64;
    for x in data.iter_mut() {
        *x *= scale;
    }
}

/// Signed frequency in Hz of FFT bin `k` for an `n`-point transform.
pub fn bin_frequency(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    k * sample_rate / n as f64
}

/// Multiplies the spectrum of `data` by `response(f)`.
pub fn filter_complex<F>(data: &[Complex64], sample_rate: f64, response: F) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let n = data.len();
    let mut buf = data.to_vec();
    fft(&mut buf);
    for (k, x) in buf.iter_mut().enumerate() {
        *x *= response(bin_frequency(k, n, sample_rate));
    }
    ifft(&mut buf);
    buf
}

/// Real-signal version of [`filter_complex`]; the response must be
/// Hermitian (`H(-f) = conj H(f)`) for the result to be real.
pub fn filter_real<F>(data: &[f64], sample_rate: f64, response: F) -> Vec<f64>
where
    F: Fn(f64) -> Complex64,
{
    let buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    filter_complex(&buf, sample_rate, response).into_iter().map(|c| c.re).collect()
}

/// Band-limited resampling of a periodic sequence to `out_len` samples by
/// truncating or zero-padding its spectrum. The Nyquist bin of an even
/// length is split between the positive and negative halves so real inputs
/// stay real.
pub fn fourier_resample(data: &[Complex64], out_len: usize) -> Vec<Complex64> {
    let n = data.len();
    if n == 0 || out_len == 0 {
        return vec![Complex64::new(0.0, 0.0); out_len];
    }
    if out_len == n {
        return data.to_vec();
    }
    let mut spec = data.to_vec();
    fft(&mut spec);
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    let keep = n.min(out_len);
    // Bins strictly below the shared Nyquist frequency.
    let half = (keep - 1) / 2;
    out[0] = spec[0];
    for k in 1..=half {
        out[k] = spec[k];
        out[out_len - k] = spec[n - k];
    }
    if keep.is_multiple_of(2) {
        let k = keep / 2;
        if n > out_len {
            // Fold the two input bins at ±fs_out/2 into one real-symmetric bin.
            let v = 0.5 * (spec[k] + spec[n - k]);
            out[k] = v;
        } else {
            // Split the input Nyquist bin across ±k of the larger output.
            let v = 0.5 * spec[k];
            out[k] = v;
            out[out_len - k] += v;
        }
    }
    let mut out = {
        ifft(&mut out);
        out
    };
    let scale = out_len as f64 / n as f64;
    for x in out.iter_mut() {
        *x *= scale;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_trip() {
        let mut x: Vec<Complex64> = (0..37).map(|i| Complex64::new(i as f64, -(i as f64).sin())).collect();
        let orig = x.clone();
        fft(&mut x);
        ifft(&mut x);
        for (a, b) in x.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bins() {
        assert_eq!(bin_frequency(0, 8, 8.0), 0.0);
        assert_eq!(bin_frequency(3, 8, 8.0), 3.0);
        assert_eq!(bin_frequency(4, 8, 8.0), 4.0);
        assert_eq!(bin_frequency(5, 8, 8.0), -3.0);
    }

    #[test]
    fn upsample_tone_exact() {
        let n = 64;
        let x: Vec<Complex64> =
            (0..n).map(|i| Complex64::new((2.0 * PI * 5.0 * i as f64 / n as f64).cos(), 0.0)).collect();
        let y = fourier_resample(&x, 3 * n);
        for (i, v) in y.iter().enumerate() {
            let e = (2.0 * PI * 5.0 * i as f64 / (3 * n) as f64).cos();
            assert!((v.re - e).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
        let z = fourier_resample(&y, n);
        for (a, b) in z.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
