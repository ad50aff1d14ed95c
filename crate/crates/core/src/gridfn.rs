//! One-dimensional test functions, their norms and distribution functions.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of geometric levels in the weak-norm α grid.
pub const WEAK_LEVELS: usize = 64;
/// Default sampling resolution for norms.
pub const DEFAULT_RESOLUTION: f64 = 1.0 / 1024.0;
/// A Gaussian is treated as supported on `center ± GAUSS_CUT * width`.
const GAUSS_CUT: f64 = 12.0;
/// Band-limited window: Gaussian with `sigma = len / (2 * WINDOW_SIGMAS)`.
const WINDOW_SIGMAS: f64 = 7.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

/// A test function on the line.
///
/// `Bandlimited` evaluates `w(y) Σ c_k exp(2πi k ξ0 y)` on its support, where `w`
/// is a Gaussian taper centred on the support with standard deviation `len/14`,
/// cut at the support ends. Frequencies are in cycles per unit length, the same
/// convention the filters use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum FunctionSpec {
    Grid {
        origin: f64,
        spacing: f64,
        samples: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples_imag: Option<Vec<f64>>,
    },
    Indicator {
        a: f64,
        b: f64,
        height: f64,
    },
    Gaussian {
        center: f64,
        width: f64,
        height: f64,
    },
    Bandlimited {
        coeffs: Vec<Mode>,
        base_freq: f64,
        support: [f64; 2],
    },
}

impl FunctionSpec {
    pub fn indicator(a: f64, b: f64, height: f64) -> Self {
        FunctionSpec::Indicator { a, b, height }
    }

    pub fn gaussian(center: f64, width: f64, height: f64) -> Self {
        FunctionSpec::Gaussian {
            center,
            width,
            height,
        }
    }

    pub fn grid(origin: f64, spacing: f64, samples: Vec<f64>) -> Self {
        FunctionSpec::Grid {
            origin,
            spacing,
            samples,
            samples_imag: None,
        }
    }

    /// Grid from complex samples; the imaginary part is dropped when it is
    /// identically zero.
    pub fn grid_complex(origin: f64, spacing: f64, values: &[Complex64]) -> Self {
        let samples = values.iter().map(|v| v.re).collect();
        let imag: Vec<f64> = values.iter().map(|v| v.im).collect();
        let samples_imag = if imag.iter().any(|v| *v != 0.0) {
            Some(imag)
        } else {
            None
        };
        FunctionSpec::Grid {
            origin,
            spacing,
            samples,
            samples_imag,
        }
    }

    /// The zero function.
    pub fn zero() -> Self {
        FunctionSpec::grid(0.0, 1.0, vec![0.0])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidFunction(m.to_string()));
        match self {
            FunctionSpec::Grid {
                origin,
                spacing,
                samples,
                samples_imag,
            } => {
                if !(spacing.is_finite() && *spacing > 0.0) || !origin.is_finite() {
                    return bad("grid spacing must be positive and finite");
                }
                if samples.is_empty() {
                    return bad("grid needs at least one sample");
                }
                if samples.iter().any(|v| !v.is_finite()) {
                    return bad("grid samples must be finite");
                }
                if let Some(im) = samples_imag {
                    if im.len() != samples.len() || im.iter().any(|v| !v.is_finite()) {
                        return bad("imaginary samples must match the real samples");
                    }
                }
            }
            FunctionSpec::Indicator { a, b, height } => {
                if !(a < b) || !a.is_finite() || !b.is_finite() {
                    return bad("indicator needs a < b");
                }
                if !(*height > 0.0) || !height.is_finite() {
                    return bad("indicator height must be positive");
                }
            }
            FunctionSpec::Gaussian { width, center, .. } => {
                if !(*width > 0.0) || !width.is_finite() || !center.is_finite() {
                    return bad("gaussian width must be positive");
                }
            }
            FunctionSpec::Bandlimited {
                coeffs,
                base_freq,
                support,
            } => {
                if !(support[0] < support[1]) {
                    return bad("bandlimited support must be a nonempty interval");
                }
                if !base_freq.is_finite()
                    || coeffs
                        .iter()
                        .any(|m| !m.re.is_finite() || !m.im.is_finite())
                {
                    return bad("bandlimited coefficients must be finite");
                }
            }
        }
        Ok(())
    }

    /// Point evaluation; linear interpolation for grids, zero outside the support.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        match self {
            FunctionSpec::Grid {
                origin,
                spacing,
                samples,
                samples_imag,
            } => {
                let n = samples.len();
                let s = (x - origin) / spacing;
                let last = (n - 1) as f64;
                if !(s >= -1e-9 && s <= last + 1e-9) {
                    return Complex64::new(0.0, 0.0);
                }
                if n == 1 {
                    let im = samples_imag.as_ref().map_or(0.0, |v| v[0]);
                    return Complex64::new(samples[0], im);
                }
                let s = s.clamp(0.0, last);
                let i = (s.floor() as usize).min(n - 2);
                let w = s - i as f64;
                let re = samples[i] + w * (samples[i + 1] - samples[i]);
                let im = match samples_imag {
                    Some(v) => v[i] + w * (v[i + 1] - v[i]),
                    None => 0.0,
                };
                Complex64::new(re, im)
            }
            FunctionSpec::Indicator { a, b, height } => {
                if x >= *a && x <= *b {
                    Complex64::new(*height, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            FunctionSpec::Gaussian {
                center,
                width,
                height,
            } => {
                let u = (x - center) / width;
                Complex64::new(height * (-0.5 * u * u).exp(), 0.0)
            }
            FunctionSpec::Bandlimited {
                coeffs,
                base_freq,
                support,
            } => {
                if x < support[0] || x > support[1] {
                    return Complex64::new(0.0, 0.0);
                }
                let w = band_window(x, support[0], support[1]);
                let mut acc = Complex64::new(0.0, 0.0);
                for m in coeffs {
                    let phase = 2.0 * std::f64::consts::PI * (m.k as f64) * base_freq * x;
                    acc += Complex64::new(m.re, m.im) * Complex64::from_polar(1.0, phase);
                }
                acc * w
            }
        }
    }

    /// Closed interval outside which the function is zero (numerically, for
    /// Gaussians).
    pub fn support(&self) -> (f64, f64) {
        match self {
            FunctionSpec::Grid {
                origin,
                spacing,
                samples,
                ..
            } => (*origin, origin + spacing * (samples.len() - 1) as f64),
            FunctionSpec::Indicator { a, b, .. } => (*a, *b),
            FunctionSpec::Gaussian { center, width, .. } => {
                (center - GAUSS_CUT * width, center + GAUSS_CUT * width)
            }
            FunctionSpec::Bandlimited { support, .. } => (support[0], support[1]),
        }
    }

    /// Points where the function may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            FunctionSpec::Gaussian { .. } => Vec::new(),
            _ => {
                let (a, b) = self.support();
                vec![a, b]
            }
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            FunctionSpec::Grid { samples_imag, .. } => samples_imag.is_none(),
            FunctionSpec::Bandlimited { coeffs, .. } => {
                // real iff the coefficient list is conjugate symmetric
                coeffs.iter().all(|m| {
                    if m.k == 0 {
                        m.im == 0.0
                    } else {
                        coeffs
                            .iter()
                            .any(|o| o.k == -m.k && o.re == m.re && o.im == -m.im)
                    }
                })
            }
            _ => true,
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, FunctionSpec::Grid { .. })
    }

    /// Samples at `origin + i * h`, `i < n`. Grids sharing the lattice are
    /// copied without interpolation.
    pub fn sample(&self, origin: f64, h: f64, n: usize) -> Vec<Complex64> {
        if let FunctionSpec::Grid {
            origin: go,
            spacing,
            samples,
            samples_imag,
        } = self
        {
            let shift = (go - origin) / h;
            if (spacing - h).abs() <= 1e-12 * h && (shift - shift.round()).abs() < 1e-9 {
                let shift = shift.round() as i64;
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (j, s) in samples.iter().enumerate() {
                    let idx = j as i64 + shift;
                    if idx >= 0 && (idx as usize) < n {
                        let im = samples_imag.as_ref().map_or(0.0, |v| v[j]);
                        out[idx as usize] = Complex64::new(*s, im);
                    }
                }
                return out;
            }
        }
        (0..n)
            .map(|i| self.evaluate(origin + h * i as f64))
            .collect()
    }

    /// `x ↦ f(λx)` for `λ > 0`.
    pub fn dilate(&self, lambda: f64) -> FunctionSpec {
        match self.clone() {
            FunctionSpec::Grid {
                origin,
                spacing,
                samples,
                samples_imag,
            } => FunctionSpec::Grid {
                origin: origin / lambda,
                spacing: spacing / lambda,
                samples,
                samples_imag,
            },
            FunctionSpec::Indicator { a, b, height } => FunctionSpec::Indicator {
                a: a / lambda,
                b: b / lambda,
                height,
            },
            FunctionSpec::Gaussian {
                center,
                width,
                height,
            } => FunctionSpec::Gaussian {
                center: center / lambda,
                width: width / lambda,
                height,
            },
            FunctionSpec::Bandlimited {
                coeffs,
                base_freq,
                support,
            } => FunctionSpec::Bandlimited {
                coeffs,
                base_freq: base_freq * lambda,
                support: [support[0] / lambda, support[1] / lambda],
            },
        }
    }

    /// `c · f` for real `c`.
    pub fn scaled(&self, c: f64) -> FunctionSpec {
        match self.clone() {
            FunctionSpec::Grid {
                origin,
                spacing,
                samples,
                samples_imag,
            } => FunctionSpec::Grid {
                origin,
                spacing,
                samples: samples.iter().map(|v| v * c).collect(),
                samples_imag: samples_imag.map(|im| im.iter().map(|v| v * c).collect()),
            },
            FunctionSpec::Indicator { a, b, height } if c > 0.0 => FunctionSpec::Indicator {
                a,
                b,
                height: height * c,
            },
            FunctionSpec::Indicator { a, b, height } => {
                let h = (b - a) / 1024.0;
                FunctionSpec::grid(a, h, vec![height * c; 1025])
            }
            FunctionSpec::Gaussian {
                center,
                width,
                height,
            } => FunctionSpec::Gaussian {
                center,
                width,
                height: height * c,
            },
            FunctionSpec::Bandlimited {
                coeffs,
                base_freq,
                support,
            } => FunctionSpec::Bandlimited {
                coeffs: coeffs
                    .iter()
                    .map(|m| Mode {
                        k: m.k,
                        re: m.re * c,
                        im: m.im * c,
                    })
                    .collect(),
                base_freq,
                support,
            },
        }
    }
}

fn band_window(x: f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let sigma = (b - a) / (2.0 * WINDOW_SIGMAS);
    let u = (x - mid) / sigma;
    (-0.5 * u * u).exp()
}

/// Free-function form of [`FunctionSpec::evaluate`].
pub fn evaluate(f: &FunctionSpec, x: f64) -> Complex64 {
    f.evaluate(x)
}

/// Absolute values on cells of equal width covering the support, plus the
/// cell width. Grids use their own samples (one cell per sample); other
/// variants are sampled at cell midpoints with at least 64 cells.
pub(crate) fn cell_abs(f: &FunctionSpec, resolution: f64) -> (f64, Vec<f64>) {
    match f {
        FunctionSpec::Grid {
            spacing,
            samples,
            samples_imag,
            ..
        } => {
            let vals = match samples_imag {
                Some(im) => samples.iter().zip(im).map(|(r, i)| r.hypot(*i)).collect(),
                None => samples.iter().map(|v| v.abs()).collect(),
            };
            (*spacing, vals)
        }
        _ => {
            let (a, b) = f.support();
            let len = b - a;
            let n = ((len / resolution).ceil() as usize).max(64);
            let h = len / n as f64;
            let vals = (0..n)
                .map(|i| f.evaluate(a + (i as f64 + 0.5) * h).norm())
                .collect();
            (h, vals)
        }
    }
}

/// `‖f‖_p`, or the weak quasinorm when `weak` is set. `p = ∞` gives the sup.
pub fn lp_norm(f: &FunctionSpec, p: f64, weak: bool, resolution: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidExponent(p));
    }
    let (h, vals) = cell_abs(f, resolution);
    if p.is_infinite() {
        return Ok(vals.iter().cloned().fold(0.0, f64::max));
    }
    if weak {
        return Ok(weak_from_values(&vals, h, p, WEAK_LEVELS));
    }
    Ok(strong_from_values(&vals, h, p))
}

/// Weak quasinorm with a caller-chosen number of α levels.
pub fn weak_norm_levels(f: &FunctionSpec, p: f64, levels: usize, resolution: f64) -> Result<f64> {
    if !(p > 0.0) || p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let (h, vals) = cell_abs(f, resolution);
    Ok(weak_from_values(&vals, h, p, levels))
}

pub(crate) fn strong_from_values(vals: &[f64], h: f64, p: f64) -> f64 {
    let s: f64 = vals.iter().map(|v| v.powf(p)).sum::<f64>() * h;
    s.powf(1.0 / p)
}

/// `sup_α α |{|f| ≥ α}|^{1/p}` over `levels` geometric levels spanning
/// `[1e-6, 1] · max|f|`. Using `≥` lets the top level attain the sup for
/// plateau-shaped functions; the supremum over all α is the same as with `>`.
pub(crate) fn weak_from_values(vals: &[f64], h: f64, p: f64, levels: usize) -> f64 {
    let max = vals.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let mut sorted: Vec<f64> = vals.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let levels = levels.max(2);
    let mut best: f64 = 0.0;
    for j in 0..levels {
        let e = -6.0 + 6.0 * j as f64 / (levels - 1) as f64;
        let alpha = if j == levels - 1 {
            max
        } else {
            max * 10f64.powf(e)
        };
        // count of sorted values >= alpha
        let count = sorted.partition_point(|v| *v >= alpha);
        let m = count as f64 * h;
        best = best.max(alpha * m.powf(1.0 / p));
    }
    best
}

/// Measure of `{|f| > α}` by counting cells.
pub fn distribution_size(f: &FunctionSpec, alpha: f64, resolution: f64) -> f64 {
    let (h, vals) = cell_abs(f, resolution);
    vals.iter().filter(|v| **v > alpha).count() as f64 * h
}

/// Random real band-limited function with spectrum in `band` (in `|ξ|`),
/// deterministic in `seed` and rescaled to the requested L² norm.
pub fn random_band_limited(
    seed: u64,
    band: [f64; 2],
    support: [f64; 2],
    target_l2: f64,
) -> Result<FunctionSpec> {
    let [lo, hi] = band;
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidFunction(format!("bad band [{lo}, {hi}]")));
    }
    if !(support[0] < support[1]) {
        return Err(Error::InvalidFunction("empty support".into()));
    }
    let len = support[1] - support[0];
    let xi0 = (1.0 / len).min((hi - lo) / 8.0);
    let k_lo = (lo / xi0).ceil() as i64;
    let k_hi = (hi / xi0).floor() as i64;
    let mut ks: Vec<i64> = (k_lo..=k_hi).collect();
    if ks.len() > 32 {
        let step = ks.len() as f64 / 32.0;
        ks = (0..32).map(|j| ks[(j as f64 * step) as usize]).collect();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut coeffs = Vec::with_capacity(2 * ks.len());
    for k in ks {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        if k == 0 {
            coeffs.push(Mode { k, re, im: 0.0 });
        } else {
            coeffs.push(Mode { k, re, im });
            coeffs.push(Mode { k: -k, re, im: -im });
        }
    }
    let f = FunctionSpec::Bandlimited {
        coeffs,
        base_freq: xi0,
        support,
    };
    let res = (len / 8192.0).min(1.0 / (32.0 * hi));
    let norm = lp_norm(&f, 2.0, false, res)?;
    if norm == 0.0 {
        return Ok(f);
    }
    Ok(f.scaled(target_l2 / norm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(ln x, ln y)` pairs, or raw pairs for [`fit_linear`].
    pub points: Vec<(f64, f64)>,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<SlopeFit> {
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::NonPositive { x, y });
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    fit_linear(&logs)
}

/// Ordinary least-squares line `y = slope x + intercept`.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 1e-300 * n || !sxx.is_finite() {
        return Err(Error::DegenerateAbscissas);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn indicator_evaluation() {
        let f = FunctionSpec::indicator(0.0, 1.0, 1.0);
        assert_eq!(f.evaluate(0.5).re, 1.0);
        assert_eq!(f.evaluate(2.0).re, 0.0);
        let g = FunctionSpec::gaussian(0.0, 1.0, 1.0);
        assert_eq!(g.evaluate(0.0).re, 1.0);
    }

    #[test]
    fn grid_interpolation_error_is_second_order() {
        let h = 0.01;
        let g = FunctionSpec::gaussian(0.3, 0.5, 1.0);
        let samples: Vec<f64> = (0..=200)
            .map(|i| g.evaluate(-1.0 + h * i as f64).re)
            .collect();
        let grid = FunctionSpec::grid(-1.0, h, samples);
        // sup|f''| of the gaussian profile is height / width²
        let bound = h * h * (1.0 / 0.25) / 8.0;
        for j in 0..1000 {
            let x = -0.99 + 1.98 * (j as f64 + 0.37) / 1000.0;
            let err = (grid.evaluate(x).re - g.evaluate(x).re).abs();
            assert!(err <= bound * 1.01, "x={x} err={err}");
        }
        assert_eq!(grid.evaluate(1.5).re, 0.0);
    }

    #[test]
    fn indicator_norms() {
        for &len in &[0.5, 1.0, 3.0] {
            let f = FunctionSpec::indicator(0.0, len, 1.0);
            for &p in &[0.5, 1.0, 2.0] {
                let expect: f64 = len.powf(1.0 / p);
                let s = lp_norm(&f, p, false, 1e-3).unwrap();
                let w = lp_norm(&f, p, true, 1e-3).unwrap();
                assert!((s - expect).abs() <= 2e-3 * expect.max(1.0), "{s} {expect}");
                assert!((w - expect).abs() <= 2e-3 * expect.max(1.0), "{w} {expect}");
            }
            assert_eq!(lp_norm(&f, f64::INFINITY, false, 1e-3).unwrap(), 1.0);
        }
    }

    #[test]
    fn gaussian_l2_norm_matches_closed_form() {
        // ∫ exp(-x²/w²) dx = w √π
        let w = 0.7;
        let f = FunctionSpec::gaussian(0.2, w, 1.0);
        let expect = (w * std::f64::consts::PI.sqrt()).sqrt();
        let got = lp_norm(&f, 2.0, false, 1e-3).unwrap();
        assert!((got - expect).abs() < 1e-4);
    }

    #[test]
    fn nonpositive_exponent_rejected() {
        let f = FunctionSpec::indicator(0.0, 1.0, 1.0);
        assert!(matches!(
            lp_norm(&f, 0.0, false, 1e-3),
            Err(Error::InvalidExponent(_))
        ));
        assert!(matches!(
            lp_norm(&f, -1.0, true, 1e-3),
            Err(Error::InvalidExponent(_))
        ));
        assert_eq!(
            lp_norm(&FunctionSpec::zero(), 1.0, false, 1e-3).unwrap(),
            0.0
        );
    }

    #[test]
    fn distribution_examples() {
        let f = FunctionSpec::indicator(0.0, 1.0, 1.0);
        assert_relative_eq!(distribution_size(&f, 0.5, 1e-3), 1.0, epsilon = 1e-12);
        assert_eq!(distribution_size(&f, 2.0, 1e-3), 0.0);
        let g = FunctionSpec::gaussian(0.0, 1.0, 1.0);
        let m = distribution_size(&g, (-0.5f64).exp(), 1e-4);
        assert!((m - 2.0).abs() <= 2e-4, "{m}");
    }

    #[test]
    fn band_limited_is_deterministic_and_in_band() {
        let a = random_band_limited(1, [8.0, 16.0], [0.0, 2.0], 1.0).unwrap();
        let b = random_band_limited(1, [8.0, 16.0], [0.0, 2.0], 1.0).unwrap();
        assert_eq!(a, b);
        if let FunctionSpec::Bandlimited {
            coeffs, base_freq, ..
        } = &a
        {
            for m in coeffs {
                let xi = (m.k as f64 * base_freq).abs();
                assert!((8.0..=16.0).contains(&xi), "{xi}");
            }
        } else {
            panic!("expected bandlimited variant");
        }
        assert!(a.is_real());
        let n = lp_norm(&a, 2.0, false, 1e-4).unwrap();
        assert!((n - 1.0).abs() < 1e-6, "{n}");
    }

    #[test]
    fn fits() {
        let pts: Vec<(f64, f64)> = (0..8).map(|k| (2f64.powi(-k), 2f64.powi(-k))).collect();
        let fit = fit_loglog(&pts).unwrap();
        assert_relative_eq!(fit.slope, 1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        let pts: Vec<(f64, f64)> = (1..6)
            .map(|k| (10f64.powi(-k), 10f64.powf(-k as f64 / 3.0)))
            .collect();
        assert_relative_eq!(fit_loglog(&pts).unwrap().slope, 1.0 / 3.0, epsilon = 1e-12);
        assert!(matches!(
            fit_loglog(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]),
            Err(Error::DegenerateAbscissas)
        ));
        assert!(matches!(
            fit_loglog(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn dilation_of_indicator() {
        let f = FunctionSpec::indicator(0.0, 1.0, 2.0);
        let g = f.dilate(2.0);
        assert_eq!(g.evaluate(0.45).re, 2.0);
        assert_eq!(g.evaluate(0.55).re, 0.0);
    }
}
