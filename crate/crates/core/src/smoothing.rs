//! Trilinear forms, the frequency-decay experiment, windowed oscillatory
//! integrals and sublevel-set measures.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bilinear_ops::{Averager, QuadratureSpec};
use crate::curve::{Curve, Eta};
use crate::error::{Error, Result};
use crate::exec;
use crate::gridfn::{fit_linear, fit_loglog, random_band_limited, FunctionSpec, SlopeFit};
use crate::lp_filters::{apply_projection, FilterBank, Which};

/// Curve-induced datum: `φ0(x, t) = x`, `φj(x, t) = x + γj(t)`, weight
/// `η2d(x, t) = η_x(x) η(t)`.
#[derive(Clone, Debug)]
pub struct TrilinearDatum {
    pub curve: Curve,
    pub eta_x: Eta,
}

impl TrilinearDatum {
    pub fn from_curve(curve: Curve, eta_x: Eta) -> Self {
        TrilinearDatum { curve, eta_x }
    }

    #[inline]
    pub fn phi(&self, x: f64, t: f64) -> [f64; 3] {
        let (g1, g2) = self.curve.gamma(t);
        [x, x + g1, x + g2]
    }

    /// Gradients of `φ0, φ1, φ2` in `(x, t)`.
    #[inline]
    pub fn grad(&self, _x: f64, t: f64) -> [[f64; 2]; 3] {
        let (d1, d2) = self.curve.dgamma(t);
        [[1.0, 0.0], [1.0, d1], [1.0, d2]]
    }

    #[inline]
    pub fn eta2d(&self, x: f64, t: f64) -> f64 {
        self.eta_x.value(x) * self.curve.eta_value(t)
    }
}

fn trapezoid_nodes(a: f64, b: f64, step: f64) -> (Vec<f64>, f64) {
    let n = ((b - a) / step).ceil().max(2.0) as usize;
    let h = (b - a) / n as f64;
    ((0..=n).map(|i| a + h * i as f64).collect(), h)
}

/// `∫∫ f0(φ0) f1(φ1) f2(φ2) η2d` on a tensor grid of spacing `resolution`.
pub fn trilinear_form(
    d: &TrilinearDatum,
    f0: &FunctionSpec,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    resolution: f64,
) -> Complex64 {
    let (xa, xb) = d.eta_x.support();
    let (ta, tb) = d.curve.eta_support();
    let (xs, hx) = trapezoid_nodes(xa, xb, resolution);
    let (ts, ht) = trapezoid_nodes(ta, tb, resolution);
    let rows = exec::map_slice(&xs, |&x| {
        let ex = d.eta_x.value(x);
        if ex == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let v0 = f0.evaluate(x);
        let mut acc = Complex64::new(0.0, 0.0);
        for &t in &ts {
            let p = d.phi(x, t);
            acc += f1.evaluate(p[1]) * f2.evaluate(p[2]) * d.curve.eta_value(t);
        }
        v0 * acc * ex
    });
    rows.iter().sum::<Complex64>() * (hx * ht)
}

/// The same form as `∫ f0(x) B1(f1, f2)(x) η_x(x) dx`.
pub fn trilinear_form_curve(
    d: &TrilinearDatum,
    f0: &FunctionSpec,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    quad: &QuadratureSpec,
    resolution: f64,
) -> Result<Complex64> {
    let av = Averager::new(&d.curve, quad, None)?;
    let (xa, xb) = d.eta_x.support();
    let (xs, hx) = trapezoid_nodes(xa, xb, resolution);
    let vals = exec::map_slice(&xs, |&x| {
        let ex = d.eta_x.value(x);
        if ex == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        f0.evaluate(x) * av.value(f1, f2, x, 1.0) * ex
    });
    Ok(vals.iter().sum::<Complex64>() * hx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n1: u32,
    pub n2: u32,
    pub median_l1: f64,
    pub log2_median: f64,
    pub trials: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayResult {
    pub rows: Vec<DecayRow>,
    /// Fit of `log2(median)` against `max(n1, n2)`.
    pub fit: SlopeFit,
}

/// Settings of [`decay_experiment`] beyond those fixed by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySettings {
    /// Support of the first random input; the second is shifted by
    /// `γ2(t*) − γ1(t*)` at the centre `t*` of supp η so the two interact.
    pub support: [f64; 2],
    /// Stratified random abscissas for `‖B1‖₁`.
    pub x_samples: usize,
    /// Quadrature nodes per period of the fastest `t`-oscillation.
    pub nodes_per_period: f64,
}

impl Default for DecaySettings {
    fn default() -> Self {
        DecaySettings {
            support: [-1.0, 1.0],
            x_samples: 1024,
            nodes_per_period: 8.0,
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn x_window(c: &Curve, f1: &FunctionSpec, f2: &FunctionSpec) -> (f64, f64) {
    let grid = c.support_grid(1024);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (j, f) in [f1, f2].into_iter().enumerate() {
        let vals: Vec<f64> = grid
            .iter()
            .map(|&t| {
                let (a, b) = c.gamma(t);
                if j == 0 {
                    a
                } else {
                    b
                }
            })
            .collect();
        let gmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let gmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (a, b) = f.support();
        lo = lo.max(a - gmax);
        hi = hi.min(b - gmin);
    }
    (lo - 1e-3, hi + 1e-3)
}

/// One sample of `‖B1(Q_{n1} f1, Q_{n2} f2)‖₁` with `‖fj‖₂ = 1`.
#[allow(clippy::too_many_arguments)]
fn decay_trial(
    c: &Curve,
    n: (u32, u32),
    seed: u64,
    bank: &FilterBank,
    resolution: f64,
    settings: &DecaySettings,
) -> Result<f64> {
    let (g1, g2) = c.gamma(c.eta().center);
    let shift = [0.0, g2 - g1];
    let mut qf = Vec::with_capacity(2);
    for (j, nj) in [n.0, n.1].into_iter().enumerate() {
        let band = [2f64.powi(nj as i32), 2f64.powi(nj as i32 + 2)];
        let support = [
            settings.support[0] + shift[j],
            settings.support[1] + shift[j],
        ];
        let f = random_band_limited(exec::derive_seed(seed, j as u64), band, support, 1.0)?;
        // 256 samples per period of the top frequency; coarser grids leave an
        // interpolation floor that flattens the decay
        let h = FilterBank::required_spacing(nj as i32 + 6).min(resolution);
        qf.push(apply_projection(bank, Which::Q, nj as i32, &f, h)?);
    }
    let (lo, hi) = c.eta_support();
    let speed = c
        .support_grid(512)
        .iter()
        .map(|&t| {
            let (u, v) = c.dgamma(t);
            u.abs().max(v.abs())
        })
        .fold(0.0, f64::max);
    let top = FilterBank::top_frequency(Which::Q, n.0.max(n.1) as i32);
    let t_points =
        ((0.5 * settings.nodes_per_period * top * speed * (hi - lo)).ceil() as usize).max(64);
    let av = Averager::new(c, &QuadratureSpec::new(t_points), None)?;
    let (xa, xb) = x_window(c, &qf[0], &qf[1]);
    if !(xb > xa) {
        return Ok(0.0);
    }
    let m = settings.x_samples.max(1);
    let width = (xb - xa) / m as f64;
    let mut rng = ChaCha20Rng::seed_from_u64(exec::derive_seed(seed, 99));
    let xs: Vec<f64> = (0..m)
        .map(|i| xa + width * (i as f64 + rng.random::<f64>()))
        .collect();
    let vals = exec::map_slice(&xs, |&x| av.value(&qf[0], &qf[1], x, 1.0).norm());
    Ok(exec::ordered_sum(&vals) * width)
}

/// Median over trials of `‖B1(Q_{n1} f1, Q_{n2} f2)‖₁` for random
/// band-limited `fj` (spectrum in `[2^{nj}, 2^{nj+2}]`, `‖fj‖₂ = 1`), and
/// the fit of `log2(median)` against `max(n1, n2)`.
pub fn decay_experiment(
    c: &Curve,
    n_values: &[(u32, u32)],
    trials: usize,
    seed: u64,
    bank: &FilterBank,
    resolution: f64,
) -> Result<DecayResult> {
    decay_experiment_with(
        c,
        n_values,
        trials,
        seed,
        bank,
        resolution,
        &DecaySettings::default(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn decay_experiment_with(
    c: &Curve,
    n_values: &[(u32, u32)],
    trials: usize,
    seed: u64,
    bank: &FilterBank,
    resolution: f64,
    settings: &DecaySettings,
) -> Result<DecayResult> {
    let rows = decay_rows(c, n_values, trials, seed, bank, resolution, settings)?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n1.max(r.n2) as f64, r.log2_median))
        .collect();
    let fit = fit_linear(&pts)?;
    Ok(DecayResult { rows, fit })
}

/// Per-`n` medians of [`decay_experiment_with`], without the fit.
#[allow(clippy::too_many_arguments)]
pub fn decay_rows(
    c: &Curve,
    n_values: &[(u32, u32)],
    trials: usize,
    seed: u64,
    bank: &FilterBank,
    resolution: f64,
    settings: &DecaySettings,
) -> Result<Vec<DecayRow>> {
    let nmax = n_values.iter().map(|n| n.0.max(n.1)).max().unwrap_or(0) as i32;
    let required = FilterBank::required_spacing(nmax);
    if resolution > required * (1.0 + 1e-12) {
        return Err(Error::ResolutionTooCoarse {
            k: nmax,
            resolution,
            required,
        });
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for (ni, &n) in n_values.iter().enumerate() {
        let mut samples = Vec::with_capacity(trials);
        for trial in 0..trials {
            let s = exec::derive_seed(exec::derive_seed(seed, trial as u64), 1000 + ni as u64);
            samples.push(decay_trial(c, n, s, bank, resolution, settings)?);
        }
        let med = median(&samples);
        rows.push(DecayRow {
            n1: n.0,
            n2: n.1,
            median_l1: med,
            log2_median: med.log2(),
            trials: samples,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stationarity {
    Stationary,
    Nonstationary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryResult {
    pub value: Complex64,
    pub classification: Stationarity,
    /// Interacting point `(x, t)`.
    pub point: [f64; 2],
    /// `|∇ Σ kj φj|` at the interacting point.
    pub gradient: f64,
}

/// Window indices `m` with `φj(p) ∈ I_{mj}` at the point `p = (x, t)`.
pub fn windows_at(d: &TrilinearDatum, x: f64, t: f64, lambda: f64, gamma_exp: f64) -> [i64; 3] {
    let w = lambda.powf(-gamma_exp);
    let p = d.phi(x, t);
    [
        (p[0] / w).floor() as i64,
        (p[1] / w).floor() as i64,
        (p[2] / w).floor() as i64,
    ]
}

/// `I(m, k) = ∫∫ e^{iπλ^γ Σ kj φj} Π η_{mj}(φj) η2d`, with windows
/// `I_m = [m w, (m+1) w)`, `w = λ^{−γ}`, and bumps on the tripled windows.
#[allow(clippy::too_many_arguments)]
pub fn oscillatory_integral(
    d: &TrilinearDatum,
    m: [i64; 3],
    k: [i64; 3],
    lambda: f64,
    gamma_exp: f64,
    rho: f64,
    resolution: f64,
) -> Result<OscillatoryResult> {
    if !(lambda >= 1.0) || !(gamma_exp > 0.5 && gamma_exp < 1.0) || !(rho > 0.0) {
        return Err(Error::InvalidConfig(
            "need lambda >= 1, gamma in (1/2, 1), rho > 0".into(),
        ));
    }
    let w = lambda.powf(-gamma_exp);
    let window = |j: usize| (m[j] as f64 * w, (m[j] + 1) as f64 * w);
    let bump = |j: usize| Eta {
        center: (m[j] as f64 + 0.5) * w,
        halfwidth: 1.5 * w,
    };
    let (ta, tb) = d.curve.eta_support();
    let (xa, xb) = d.eta_x.support();

    // interacting point: scan t, intersect the x-constraints exactly
    let (ts, _) = trapezoid_nodes(ta, tb, w / 16.0);
    let mut best: Option<(f64, f64, f64)> = None;
    for &t in &ts {
        let (g1, g2) = d.curve.gamma(t);
        let (w0, w1, w2) = (window(0), window(1), window(2));
        let lo = w0.0.max(w1.0 - g1).max(w2.0 - g2).max(xa);
        let hi = w0.1.min(w1.1 - g1).min(w2.1 - g2).min(xb);
        if hi > lo && best.is_none_or(|b| hi - lo > b.2) {
            best = Some((0.5 * (lo + hi), t, hi - lo));
        }
    }
    let (x_m, t_m, _) = best.ok_or(Error::NonInteracting)?;

    let g = d.grad(x_m, t_m);
    let grad_at = |gg: [[f64; 2]; 3]| {
        let gx: f64 = (0..3).map(|j| k[j] as f64 * gg[j][0]).sum();
        let gt: f64 = (0..3).map(|j| k[j] as f64 * gg[j][1]).sum();
        gx.hypot(gt)
    };
    let gradient = grad_at(g);
    let classification = if gradient < lambda.powf(rho) {
        Stationarity::Stationary
    } else {
        Stationarity::Nonstationary
    };

    // integration region: x in the tripled window m0, t where φ1, φ2 can reach theirs
    let b0 = bump(0).support();
    let (x_lo, x_hi) = (b0.0.max(xa), b0.1.min(xb));
    let (b1, b2) = (bump(1).support(), bump(2).support());
    let scan = trapezoid_nodes(ta, tb, w / 64.0).0;
    let mut t_lo = f64::INFINITY;
    let mut t_hi = f64::NEG_INFINITY;
    let slack = w / 64.0;
    for &t in &scan {
        let (g1, g2) = d.curve.gamma(t);
        let ok1 = x_lo + g1 <= b1.1 + slack && x_hi + g1 >= b1.0 - slack;
        let ok2 = x_lo + g2 <= b2.1 + slack && x_hi + g2 >= b2.0 - slack;
        if ok1 && ok2 {
            t_lo = t_lo.min(t);
            t_hi = t_hi.max(t);
        }
    }
    t_lo = (t_lo - w / 32.0).max(ta);
    t_hi = (t_hi + w / 32.0).min(tb);
    if !(t_hi > t_lo) || !(x_hi > x_lo) {
        return Err(Error::NonInteracting);
    }
    // at least 16 nodes per period of the phase and 64 across a bump
    let grid = d.curve.support_grid(256);
    let gmax = grid
        .iter()
        .filter(|&&t| t >= t_lo && t <= t_hi)
        .map(|&t| grad_at(d.grad(0.0, t)))
        .fold(
            grad_at(d.grad(0.0, t_lo)).max(grad_at(d.grad(0.0, t_hi))),
            f64::max,
        );
    let freq = 0.5 * lambda.powf(gamma_exp) * gmax;
    let mut step = resolution.min(3.0 * w / 64.0);
    if freq > 0.0 {
        step = step.min(1.0 / (16.0 * freq));
    }
    let (xs, hx) = trapezoid_nodes(x_lo, x_hi, step);
    let (tn, ht) = trapezoid_nodes(t_lo, t_hi, step);
    let beta = PI * lambda.powf(gamma_exp);
    let (e0, e1, e2) = (bump(0), bump(1), bump(2));
    let rows = exec::map_slice(&xs, |&x| {
        let a0 = e0.value(x) * d.eta_x.value(x);
        if a0 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &t in &tn {
            let p = d.phi(x, t);
            let amp = e1.value(p[1]) * e2.value(p[2]) * d.curve.eta_value(t);
            if amp == 0.0 {
                continue;
            }
            let phase = beta * (k[0] as f64 * p[0] + k[1] as f64 * p[1] + k[2] as f64 * p[2]);
            acc += Complex64::from_polar(amp, phase);
        }
        acc * a0
    });
    let value = rows.iter().sum::<Complex64>() * (hx * ht);
    Ok(OscillatoryResult {
        value,
        classification,
        point: [x_m, t_m],
        gradient,
    })
}

/// Samples of a function on the unit interval or square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dim")]
pub enum SampledField {
    /// `values[i] = f(a + i h)`.
    #[serde(rename = "1")]
    OneD { a: f64, h: f64, values: Vec<f64> },
    /// `values[i * ny + j] = f(ax + i h, ay + j h)`.
    #[serde(rename = "2")]
    TwoD {
        ax: f64,
        ay: f64,
        h: f64,
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    },
}

impl SampledField {
    pub fn from_fn_1d(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let h = (b - a) / n as f64;
        SampledField::OneD {
            a,
            h,
            values: (0..=n).map(|i| f(a + h * i as f64)).collect(),
        }
    }

    pub fn from_fn_2d(a: [f64; 2], b: [f64; 2], n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let h = (b[0] - a[0]) / n as f64;
        let ny = ((b[1] - a[1]) / h).round() as usize;
        let mut values = Vec::with_capacity((n + 1) * (ny + 1));
        for i in 0..=n {
            for j in 0..=ny {
                values.push(f(a[0] + h * i as f64, a[1] + h * j as f64));
            }
        }
        SampledField::TwoD {
            ax: a[0],
            ay: a[1],
            h,
            nx: n + 1,
            ny: ny + 1,
            values,
        }
    }

    pub fn spacing(&self) -> f64 {
        match self {
            SampledField::OneD { h, .. } | SampledField::TwoD { h, .. } => *h,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelQuery {
    pub f: SampledField,
    pub epsilon: f64,
    pub derivative_order: u32,
}

/// Length of `{s ∈ [0, 1] : |v0 + s (v1 − v0)| ≤ eps}`.
fn segment_fraction(v0: f64, v1: f64, eps: f64) -> f64 {
    let d = v1 - v0;
    if d == 0.0 {
        return if v0.abs() <= eps { 1.0 } else { 0.0 };
    }
    let (mut s0, mut s1) = ((-eps - v0) / d, (eps - v0) / d);
    if s0 > s1 {
        std::mem::swap(&mut s0, &mut s1);
    }
    (s1.min(1.0) - s0.max(0.0)).max(0.0)
}

/// Area fraction of a triangle where the linear interpolant of the vertex values is `≤ c`.
fn triangle_below(mut v: [f64; 3], c: f64) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let [a, b, d] = v;
    if c <= a {
        return if c == a && a == d { 1.0 } else { 0.0 };
    }
    if c >= d {
        return 1.0;
    }
    if c <= b {
        (c - a).powi(2) / ((b - a) * (d - a))
    } else {
        1.0 - (d - c).powi(2) / ((d - a) * (d - b))
    }
}

/// Measure of `{|f| ≤ ε}` for the piecewise-linear interpolant of the samples.
pub fn sublevel_measure(q: &SublevelQuery) -> Result<f64> {
    if !(q.epsilon > 0.0) || q.derivative_order == 0 {
        return Err(Error::InvalidConfig(
            "need epsilon > 0 and derivative order >= 1".into(),
        ));
    }
    let required = q.epsilon.powf(1.0 / (q.derivative_order as f64 + 1.0)) / 8.0;
    let h = q.f.spacing();
    if h > required {
        return Err(Error::GridTooCoarse {
            spacing: h,
            required,
        });
    }
    let eps = q.epsilon;
    Ok(match &q.f {
        SampledField::OneD { values, h, .. } => {
            values
                .windows(2)
                .map(|w| segment_fraction(w[0], w[1], eps))
                .sum::<f64>()
                * h
        }
        SampledField::TwoD {
            h, nx, ny, values, ..
        } => {
            let at = |i: usize, j: usize| values[i * ny + j];
            let mut total = 0.0;
            for i in 0..nx - 1 {
                for j in 0..ny - 1 {
                    for tri in [
                        [at(i, j), at(i + 1, j), at(i + 1, j + 1)],
                        [at(i, j), at(i, j + 1), at(i + 1, j + 1)],
                    ] {
                        let neg = tri.map(|v| -v);
                        // {|f| ≤ ε} = {f ≤ ε} ∩ {−f ≤ ε}
                        let frac = triangle_below(tri, eps) + triangle_below(neg, eps) - 1.0;
                        total += frac.max(0.0) * 0.5 * h * h;
                    }
                }
            }
            total
        }
    })
}

/// `δ = min Σ_{1 ≤ i ≤ N} |f^{(i)}|` and `B = 1 + max |f^{(N+1)}|` from finite
/// differences of one-dimensional samples.
pub fn sublevel_constants(q: &SublevelQuery) -> Option<(f64, f64)> {
    let SampledField::OneD { h, values, .. } = &q.f else {
        return None;
    };
    let n = q.derivative_order as usize;
    let mut diffs: Vec<Vec<f64>> = vec![values.clone()];
    for _ in 0..=n {
        let last = diffs.last().unwrap();
        if last.len() < 2 {
            return None;
        }
        diffs.push(last.windows(2).map(|w| (w[1] - w[0]) / h).collect());
    }
    let len = diffs[n + 1].len();
    let delta = (0..len)
        .map(|i| (1..=n).map(|o| diffs[o][i].abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let b = 1.0 + diffs[n + 1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Some((delta, b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelFit {
    pub order: u32,
    /// `(ε, measured, analytic)` triples.
    pub rows: Vec<(f64, f64, f64)>,
    pub spacing: f64,
    pub fit: SlopeFit,
}

/// Monomial family `f(x) = x^N` on `[−1, 1]`, whose sublevel measure is `2 ε^{1/N}`.
pub fn sublevel_fit(order: u32, eps_grid: &[f64]) -> Result<SublevelFit> {
    let eps_min = eps_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let h_max = eps_min.powf(1.0 / (order as f64 + 1.0)) / 16.0;
    let n = ((2.0 / h_max).ceil() as usize).max(64);
    let field = SampledField::from_fn_1d(-1.0, 1.0, n, |x| x.powi(order as i32));
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let m = sublevel_measure(&SublevelQuery {
            f: field.clone(),
            epsilon: eps,
            derivative_order: order,
        })?;
        rows.push((eps, m, (2.0 * eps.powf(1.0 / order as f64)).min(2.0)));
    }
    let fit = fit_loglog(&rows.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>())?;
    Ok(SublevelFit {
        order,
        rows,
        spacing: field.spacing(),
        fit,
    })
}
