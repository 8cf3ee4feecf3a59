//! Radix-2 complex FFT and exact integer convolution on top of it.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use super::KronError;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

/// In-place iterative Cooley–Tukey transform. `inverse` uses conjugate
/// twiddles and divides by the length.
pub(crate) fn fft_in_place(a: &mut [Complex], inverse: bool) {
    let n = a.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            a.swap(i, j);
        }
    }
    // Twiddles are computed directly rather than by repeated multiplication
    // so that rounding error does not accumulate along a stage.
    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddles: Vec<Complex> = (0..n / 2)
        .map(|k| {
            let ang = sign * 2.0 * PI * k as f64 / n as f64;
            Complex::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = twiddles[k * step];
                let u = a[start + k];
                let v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
        len <<= 1;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for x in a.iter_mut() {
            x.re *= scale;
            x.im *= scale;
        }
    }
}

/// Largest product `N·max|u|·max|v|` for which double-precision
/// convolution is trusted to round to the exact integers.
pub const PRECISION_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

/// Residual above which a rounded output is considered unreliable.
pub const RESIDUAL_LIMIT: f64 = 0.1;

/// Exact integer convolution of two dense coefficient arrays via FFT.
///
/// Output length is `u.len() + v.len() - 1`. Fails with
/// [`KronError::PrecisionGuard`] when the magnitude bound is exceeded and
/// with [`KronError::Residual`] if some output is not close to an integer;
/// callers fall back to schoolbook multiplication in both cases.
pub fn fft_convolve(u: &[i64], v: &[i64]) -> Result<Vec<i64>, KronError> {
    if u.is_empty() || v.is_empty() {
        return Ok(Vec::new());
    }
    let out_len = u.len() + v.len() - 1;
    let n = out_len.next_power_of_two();
    let max_u = u.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64;
    let max_v = v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64;
    let bound = n as f64 * max_u * max_v;
    if bound >= PRECISION_LIMIT {
        return Err(KronError::PrecisionGuard { bound });
    }

    let mut a: Vec<Complex> = u.iter().map(|&x| Complex::new(x as f64, 0.0)).collect();
    a.resize(n, Complex::default());
    let mut b: Vec<Complex> = v.iter().map(|&x| Complex::new(x as f64, 0.0)).collect();
    b.resize(n, Complex::default());
    fft_in_place(&mut a, false);
    fft_in_place(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = *x * *y;
    }
    fft_in_place(&mut a, true);

    let mut out = Vec::with_capacity(out_len);
    for (j, x) in a.iter().take(out_len).enumerate() {
        let r = x.re.round();
        let residual = (x.re - r).abs();
        if residual >= RESIDUAL_LIMIT {
            return Err(KronError::Residual { index: j, residual });
        }
        out.push(r as i64);
    }
    Ok(out)
}

/// Schoolbook convolution, used as the fallback and as a test reference.
pub fn naive_convolve(u: &[i64], v: &[i64]) -> Vec<i64> {
    if u.is_empty() || v.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; u.len() + v.len() - 1];
    for (i, &a) in u.iter().enumerate() {
        for (j, &b) in v.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}
