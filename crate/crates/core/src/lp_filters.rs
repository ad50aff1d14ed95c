//! Littlewood–Paley projections `P_k`, `Q_k`, `Q̃_k` as Fourier multipliers
//! applied with the FFT on a padded periodic box.
//!
//! Frequencies are in cycles per unit length: `f̂(ξ) = ∫ f(x) e^{−2πixξ} dx`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::FunctionSpec;

pub const DEFAULT_SHARPNESS: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Which {
    P,
    Q,
    #[serde(rename = "Q_tilde", alias = "Qt")]
    QTilde,
}

impl std::str::FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(Which::P),
            "Q" | "q" => Ok(Which::Q),
            "Qt" | "Q_tilde" | "qt" | "q_tilde" => Ok(Which::QTilde),
            _ => Err(Error::InvalidConfig(format!("unknown projection {s}"))),
        }
    }
}

/// Multiplier family. `φ̂ = 1 − S(|ξ| − 1)` with the smooth step
/// `S(x) = e^{−a/x} / (e^{−a/x} + e^{−a/(1−x)})`, so `φ̂ ≡ 1` on `|ξ| ≤ 1` and
/// `≡ 0` on `|ξ| ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    sharpness: f64,
    /// Half-width beyond which the scale-0 kernel is below `1e-12` of its peak.
    extent: [f64; 3],
}

impl Default for FilterBank {
    fn default() -> Self {
        make_filter_bank(DEFAULT_SHARPNESS)
    }
}

fn smooth_step(x: f64, a: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let f = (-a / x).exp();
        let g = (-a / (1.0 - x)).exp();
        f / (f + g)
    }
}

pub fn make_filter_bank(transition_sharpness: f64) -> FilterBank {
    let mut bank = FilterBank {
        sharpness: transition_sharpness,
        extent: [0.0; 3],
    };
    for (i, w) in [Which::P, Which::Q, Which::QTilde].into_iter().enumerate() {
        bank.extent[i] = bank.measure_extent(w);
    }
    bank
}

fn index(w: Which) -> usize {
    match w {
        Which::P => 0,
        Which::Q => 1,
        Which::QTilde => 2,
    }
}

impl FilterBank {
    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn phi_hat(&self, xi: f64) -> f64 {
        1.0 - smooth_step(xi.abs() - 1.0, self.sharpness)
    }

    pub fn psi_hat(&self, xi: f64) -> f64 {
        self.phi_hat(xi / 2.0) - self.phi_hat(xi)
    }

    /// Equal to 1 on `1 ≤ |ξ| ≤ 4`, 0 for `|ξ| ≤ 1/2` and `|ξ| ≥ 8`.
    pub fn psi_tilde_hat(&self, xi: f64) -> f64 {
        self.phi_hat(xi / 4.0) - self.phi_hat(2.0 * xi)
    }

    /// Multiplier of the projection at scale `k`.
    pub fn multiplier(&self, which: Which, k: i32, xi: f64) -> f64 {
        let s = xi * 2f64.powi(-k);
        match which {
            Which::P => self.phi_hat(s),
            Which::Q => self.psi_hat(s),
            Which::QTilde => self.psi_tilde_hat(s),
        }
    }

    /// Distance beyond which the kernel at scale `k` is negligible.
    pub fn kernel_extent(&self, which: Which, k: i32) -> f64 {
        self.extent[index(which)] * 2f64.powi(-k)
    }

    /// Highest frequency the multiplier at scale `k` can pass.
    pub fn top_frequency(which: Which, k: i32) -> f64 {
        let top = match which {
            Which::P => 2.0,
            Which::Q => 4.0,
            Which::QTilde => 8.0,
        };
        top * 2f64.powi(k)
    }

    /// Largest admissible sampling step at scale `k`: Nyquist at least `2^{k+3}`.
    pub fn required_spacing(k: i32) -> f64 {
        2f64.powi(-(k + 4))
    }

    fn measure_extent(&self, which: Which) -> f64 {
        let n = 1usize << 16;
        let h = 1.0 / 64.0;
        let freqs = fft_frequencies(n, h);
        let mut buf: Vec<Complex64> = freqs
            .iter()
            .map(|&xi| Complex64::new(self.multiplier(which, 0, xi), 0.0))
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let peak = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut far = 0usize;
        for (i, v) in buf.iter().enumerate().take(n / 2) {
            if v.norm() >= 1e-12 * peak {
                far = far.max(i);
            }
        }
        for i in n / 2..n {
            if buf[i].norm() >= 1e-12 * peak {
                far = far.max(n - i);
            }
        }
        (far as f64 + 1.0) * h
    }
}

/// FFT bin frequencies for `n` samples at spacing `h`.
pub fn fft_frequencies(n: usize, h: f64) -> Vec<f64> {
    let l = n as f64 * h;
    (0..n)
        .map(|j| {
            if j <= n / 2 {
                j as f64 / l
            } else {
                (j as f64 - n as f64) / l
            }
        })
        .collect()
}

fn check_resolution(k: i32, h: f64) -> Result<()> {
    let required = FilterBank::required_spacing(k);
    if !(h > 0.0) || h > required * (1.0 + 1e-12) {
        return Err(Error::ResolutionTooCoarse {
            k,
            resolution: h,
            required,
        });
    }
    Ok(())
}

/// Applies `m(ξ)` to `buf` viewed as one period of a lattice function with step `h`.
pub fn apply_multiplier_periodic(buf: &mut [Complex64], h: f64, m: impl Fn(f64) -> f64) {
    let n = buf.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(buf);
    for (v, xi) in buf.iter_mut().zip(fft_frequencies(n, h)) {
        *v *= m(xi) / n as f64;
    }
    planner.plan_fft_inverse(n).process(buf);
}

/// Projection of lattice samples `values[i] = f(origin + i h)`. Returns the
/// origin and samples of the output, trimmed where it is below `1e-12` of its
/// peak.
pub fn project_samples(
    bank: &FilterBank,
    which: Which,
    k: i32,
    origin: f64,
    h: f64,
    values: &[Complex64],
) -> Result<(f64, Vec<Complex64>)> {
    check_resolution(k, h)?;
    let pad = (bank.kernel_extent(which, k) / h).ceil() as usize + 2;
    let need = values.len() + 2 * pad;
    let n = need.max(2 * values.len()).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[pad..pad + values.len()].copy_from_slice(values);
    apply_multiplier_periodic(&mut buf, h, |xi| bank.multiplier(which, k, xi));
    let peak = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok((origin, vec![Complex64::new(0.0, 0.0)]));
    }
    let keep = |v: &Complex64| v.norm() >= 1e-12 * peak;
    let first = buf.iter().position(keep).unwrap_or(0).saturating_sub(1);
    let last = (buf.iter().rposition(keep).unwrap_or(n - 1) + 1).min(n - 1);
    let out_origin = origin + (first as f64 - pad as f64) * h;
    Ok((out_origin, buf[first..=last].to_vec()))
}

/// Samples `f` on the lattice `h ℤ` over its support.
pub(crate) fn lattice_samples(f: &FunctionSpec, h: f64) -> (f64, Vec<Complex64>) {
    let (a, b) = f.support();
    let start = (a / h).floor() * h;
    let n = ((b - start) / h).ceil() as usize + 1;
    (start, f.sample(start, h, n))
}

/// `P_k f`, `Q_k f` or `Q̃_k f` as a grid with step `resolution`.
pub fn apply_projection(
    bank: &FilterBank,
    which: Which,
    k: i32,
    f: &FunctionSpec,
    resolution: f64,
) -> Result<FunctionSpec> {
    check_resolution(k, resolution)?;
    f.validate()?;
    let (start, samples) = lattice_samples(f, resolution);
    let (origin, out) = project_samples(bank, which, k, start, resolution, &samples)?;
    if f.is_real() {
        let re: Vec<f64> = out.iter().map(|v| v.re).collect();
        Ok(FunctionSpec::grid(origin, resolution, re))
    } else {
        Ok(FunctionSpec::grid_complex(origin, resolution, &out))
    }
}

/// `‖m(D) f‖₂ / ‖f‖₂` on a box padded by `pad` on each side.
pub fn multiplier_norm_ratio(
    f: &FunctionSpec,
    resolution: f64,
    pad: f64,
    m: impl Fn(f64) -> f64,
) -> f64 {
    let (_, samples) = lattice_samples(f, resolution);
    let p = (pad / resolution).ceil() as usize + 2;
    let n = (samples.len() + 2 * p).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[p..p + samples.len()].copy_from_slice(&samples);
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let freqs = fft_frequencies(n, resolution);
    let (mut num, mut den) = (0.0, 0.0);
    for (v, xi) in buf.iter().zip(freqs) {
        let e = v.norm_sqr();
        num += m(xi).powi(2) * e;
        den += e;
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// `‖f − P_k f − Σ_{n=0}^{N} Q_{k+n} f‖₂ / ‖f‖₂`, which telescopes to
/// `‖(I − P_{k+N+1}) f‖₂ / ‖f‖₂` with `Q_j = P_{j+1} − P_j`.
pub fn reconstruction_error(
    bank: &FilterBank,
    f: &FunctionSpec,
    k: i32,
    n: u32,
    resolution: f64,
) -> Result<f64> {
    check_resolution(k + n as i32 + 1, resolution)?;
    f.validate()?;
    let pad = bank.kernel_extent(Which::P, k);
    Ok(multiplier_norm_ratio(f, resolution, pad, |xi| {
        let mut r = 1.0 - bank.multiplier(Which::P, k, xi);
        for j in 0..=n as i32 {
            r -= bank.multiplier(Which::Q, k + j, xi);
        }
        r
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let b = FilterBank::default();
        assert_eq!(b.phi_hat(0.5), 1.0);
        assert_eq!(b.phi_hat(0.0), 1.0);
        assert_eq!(b.phi_hat(3.0), 0.0);
        let q = b.multiplier(Which::Q, 0, 1.5);
        assert!(q > 0.0 && q < 1.0);
        assert_eq!(b.psi_hat(0.9), 0.0);
        assert_eq!(b.psi_hat(4.1), 0.0);
    }

    #[test]
    fn tilde_reproduces_psi() {
        let b = FilterBank::default();
        for i in 0..512 {
            let xi = -10.0 + 20.0 * i as f64 / 511.0;
            assert_eq!(b.psi_tilde_hat(xi) * b.psi_hat(xi), b.psi_hat(xi));
        }
    }

    #[test]
    fn kernel_extent_is_moderate() {
        let b = FilterBank::default();
        let e = b.kernel_extent(Which::P, 0);
        assert!(e > 5.0 && e < 60.0, "{e}");
        assert!((b.kernel_extent(Which::P, 3) - e / 8.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_resolution_rejected() {
        let b = FilterBank::default();
        let f = FunctionSpec::indicator(0.0, 1.0, 1.0);
        let r = apply_projection(&b, Which::Q, 3, &f, 1.0 / 64.0);
        assert!(matches!(r, Err(Error::ResolutionTooCoarse { .. })));
        assert!(apply_projection(&b, Which::Q, 3, &f, 1.0 / 128.0).is_ok());
    }
}
