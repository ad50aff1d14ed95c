//! Experiment orchestration and report persistence.
//!
//! Every runner takes a serializable config, echoes it (with a content hash)
//! into an [`ExperimentReport`], and derives its verdict only from the
//! measurements and the thresholds stored in that config.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bilinear_ops::{mn_maximal, Averager, QuadratureSpec, ScaleRange, XGrid};
use crate::curve::{find_j_zeros, make_curve, q_exponent, Curve, CurveSpec, ZeroOrder};
use crate::error::{Error, Result};
use crate::exec;
use crate::gridfn::{
    fit_loglog, lp_norm, random_band_limited, strong_from_values, weak_from_values, FunctionSpec,
    SlopeFit, WEAK_LEVELS,
};
use crate::lp_filters::{make_filter_bank, FilterBank, DEFAULT_SHARPNESS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
}

impl Measurement {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Measurement {
            label: label.into(),
            value,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportVerdict {
    Pass,
    Fail,
}

impl ReportVerdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            ReportVerdict::Pass
        } else {
            ReportVerdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == ReportVerdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    /// Git-style blob hash (SHA-256) of the canonical config JSON.
    pub config_hash: String,
    pub measurements: Vec<Measurement>,
    pub fits: Vec<SlopeFit>,
    pub verdict: ReportVerdict,
    /// Wall-clock seconds; not part of the reproducibility contract.
    pub runtime: f64,
}

impl ExperimentReport {
    fn new<C: Serialize>(experiment: &str, config: &C) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        Ok(ExperimentReport {
            experiment: experiment.to_string(),
            config_hash: config_hash(&config),
            config,
            measurements: Vec::new(),
            fits: Vec::new(),
            verdict: ReportVerdict::Fail,
            runtime: 0.0,
        })
    }

    fn push(&mut self, label: impl Into<String>, value: f64) {
        self.measurements.push(Measurement::new(label, value));
    }

    /// First measurement with the given label.
    pub fn measurement(&self, label: &str) -> Option<f64> {
        self.measurements
            .iter()
            .find(|m| m.label == label)
            .map(|m| m.value)
    }

    /// `label,value` lines with a header.
    pub fn measurements_csv(&self) -> String {
        let mut s = String::from("label,value\n");
        for m in &self.measurements {
            let _ = writeln!(s, "{},{}", m.label, m.value);
        }
        s
    }

    /// `fit,index,x,y` lines for every fit point.
    pub fn fits_csv(&self) -> String {
        let mut s = String::from("fit,index,x,y\n");
        for (i, f) in self.fits.iter().enumerate() {
            for (j, (x, y)) in f.points.iter().enumerate() {
                let _ = writeln!(s, "{i},{j},{x},{y}");
            }
        }
        s
    }
}

/// `sha256("blob <len>\0" ++ canonical json)`, hex encoded.
pub fn config_hash(config: &serde_json::Value) -> String {
    let body = serde_json::to_string(config).unwrap_or_default();
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(body.as_bytes());
    hex::encode(h.finalize())
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::IoFailure {
        path: path.display().to_string(),
        source,
    }
}

/// Writes the report as pretty JSON and its fit points to a `.csv` sidecar.
pub fn write_report(r: &ExperimentReport, path: &Path) -> Result<()> {
    let mut json = serde_json::to_string_pretty(r)?;
    json.push('\n');
    std::fs::write(path, json).map_err(io_err(path))?;
    let side = sidecar_path(path);
    if side != path {
        std::fs::write(&side, r.fits_csv()).map_err(io_err(&side))?;
    }
    Ok(())
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

fn timed<F>(f: F) -> Result<ExperimentReport>
where
    F: FnOnce() -> Result<ExperimentReport>,
{
    let start = Instant::now();
    let mut r = f()?;
    r.runtime = start.elapsed().as_secs_f64();
    Ok(r)
}

fn norm_q(vals: &[f64], h: f64, q: f64) -> f64 {
    if q.is_infinite() {
        vals.iter().cloned().fold(0.0, f64::max)
    } else {
        strong_from_values(vals, h, q)
    }
}

fn check_geometric(grid: &[f64], min_points: usize) -> Result<()> {
    if grid.len() < min_points {
        return Err(Error::InvalidConfig(format!(
            "need at least {min_points} widths, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidConfig("widths must be positive".into()));
    }
    let ratios: Vec<f64> = grid.windows(2).map(|w| w[1] / w[0]).collect();
    let r0 = ratios[0];
    if !(r0 < 1.0) || ratios.iter().any(|r| (r / r0 - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidConfig(
            "widths must form a decreasing geometric sequence".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sharpness

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SharpnessVariant {
    #[serde(rename = "qlt1")]
    Qlt1,
    #[serde(rename = "degenerate_J")]
    DegenerateJ,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessConfig {
    pub variant: SharpnessVariant,
    pub delta_grid: Vec<f64>,
    pub p1: f64,
    pub p2: f64,
    pub curve: CurveSpec,
    pub quad: QuadratureSpec,
    /// Number of `x` cells on which the output norm is taken.
    pub x_cells: usize,
    /// Allowed distance between the fitted and the expected slope.
    pub tolerance: f64,
}

impl SharpnessConfig {
    /// Indicators of width δ at the origin, full supremum over `r ∈ [1, 5/2]`,
    /// norm over `x ∈ [5/4, 7/4]`, on a circle arc around `5π/4`.
    pub fn qlt1(p1: f64, p2: f64) -> Self {
        SharpnessConfig {
            variant: SharpnessVariant::Qlt1,
            delta_grid: geometric(1.0 / 16.0, 0.5, 5),
            p1,
            p2,
            curve: CurveSpec::builtin("circle")
                .expect("builtin")
                .with_eta(1.25 * PI, 0.6),
            quad: QuadratureSpec::new(256),
            x_cells: 64,
            tolerance: 0.1,
        }
    }

    /// Indicators of width δ at `γj(t̄)` for a higher-order zero `t̄` of `J`,
    /// single-scale average.
    pub fn degenerate(p1: f64, p2: f64) -> Self {
        SharpnessConfig {
            variant: SharpnessVariant::DegenerateJ,
            delta_grid: geometric(1.0 / 16.0, 0.25, 5),
            p1,
            p2,
            curve: CurveSpec::builtin("degenerate-cubic").expect("builtin"),
            quad: QuadratureSpec::new(256),
            x_cells: 256,
            tolerance: 0.15,
        }
    }
}

pub fn geometric(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
}

/// Expected log-log slope of the sharpness ratio in δ.
pub fn expected_sharpness_slope(variant: SharpnessVariant, p1: f64, p2: f64) -> Result<f64> {
    let q = q_exponent(p1, p2)?;
    let iq = 1.0 / q;
    Ok(match variant {
        SharpnessVariant::Qlt1 => 1.0 - iq,
        SharpnessVariant::DegenerateJ => 1.0 + iq / 3.0 - iq,
    })
}

/// Output of one sharpness width: the operator norm and the `x` samples used.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessSample {
    pub delta: f64,
    pub op_norm: f64,
    pub ratio: f64,
    pub x_grid: XGrid,
    pub values: Vec<f64>,
}

fn qlt1_sample(c: &Curve, cfg: &SharpnessConfig, delta: f64, q: f64) -> Result<SharpnessSample> {
    let av = Averager::new(c, &cfg.quad, None)?;
    let f = FunctionSpec::indicator(-0.5 * delta, 0.5 * delta, 1.0);
    let n = cfg.x_cells.max(1);
    let h = 0.5 / n as f64;
    let x_grid = XGrid::new(1.25 + 0.5 * h, h, n);
    // relative radius step δ/8 resolves the δ-thin set of productive radii
    let (r0, r1) = (1.0f64, 2.5f64);
    let steps = ((r1 / r0).ln() / (delta / 8.0)).ceil() as usize;
    let radii: Vec<f64> = (0..=steps)
        .map(|i| r0 * (r1 / r0).powf(i as f64 / steps as f64))
        .collect();
    let values = av.max_over(&f, &f, &radii, &x_grid);
    let op_norm = norm_q(&values, h, q);
    let ratio = op_norm / delta.powf(1.0 / cfg.p1 + 1.0 / cfg.p2);
    Ok(SharpnessSample {
        delta,
        op_norm,
        ratio,
        x_grid,
        values,
    })
}

/// The `x` window where `B1(f1, f2)` can be nonzero for width-δ indicators
/// centred at `γj(t̄)`.
fn degenerate_window(c: &Curve, tbar: f64, delta: f64) -> Option<(f64, f64)> {
    let (g1b, g2b) = c.gamma(tbar);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in c.support_grid(200_000) {
        let (g1, g2) = c.gamma(t);
        if ((g1 - g1b) - (g2 - g2b)).abs() <= delta {
            lo = lo.min(g2b - g2);
            hi = hi.max(g2b - g2);
        }
    }
    (hi >= lo).then_some((lo - delta, hi + delta))
}

fn degenerate_sample(
    c: &Curve,
    cfg: &SharpnessConfig,
    tbar: f64,
    delta: f64,
    q: f64,
) -> Result<SharpnessSample> {
    let quad = QuadratureSpec {
        refinement_near: vec![tbar],
        ..cfg.quad.clone()
    };
    let av = Averager::new(c, &quad, None)?;
    let (g1b, g2b) = c.gamma(tbar);
    let f1 = FunctionSpec::indicator(g1b - 0.5 * delta, g1b + 0.5 * delta, 1.0);
    let f2 = FunctionSpec::indicator(g2b - 0.5 * delta, g2b + 0.5 * delta, 1.0);
    let (a, b) = degenerate_window(c, tbar, delta).ok_or(Error::CurveNotDegenerate)?;
    let n = cfg.x_cells.max(1);
    let h = (b - a) / n as f64;
    let x_grid = XGrid::new(a + 0.5 * h, h, n);
    let values: Vec<f64> = av
        .values(&f1, &f2, 1.0, &x_grid)
        .iter()
        .map(|v| v.norm())
        .collect();
    let op_norm = norm_q(&values, h, q);
    let ratio = op_norm / delta.powf(1.0 / cfg.p1 + 1.0 / cfg.p2);
    Ok(SharpnessSample {
        delta,
        op_norm,
        ratio,
        x_grid,
        values,
    })
}

/// Higher-order zero of `J` inside supp η, if any.
pub fn degenerate_point(c: &Curve) -> Option<f64> {
    find_j_zeros(c)
        .into_iter()
        .find(|z| z.order == ZeroOrder::Higher)
        .map(|z| z.t)
}

/// Per-width samples of a sharpness battery, without fitting.
pub fn sharpness_samples(cfg: &SharpnessConfig) -> Result<Vec<SharpnessSample>> {
    let c = make_curve(&cfg.curve)?;
    let q = q_exponent(cfg.p1, cfg.p2)?;
    match cfg.variant {
        SharpnessVariant::Qlt1 => cfg
            .delta_grid
            .iter()
            .map(|&d| qlt1_sample(&c, cfg, d, q))
            .collect(),
        SharpnessVariant::DegenerateJ => {
            let tbar = degenerate_point(&c).ok_or(Error::CurveNotDegenerate)?;
            cfg.delta_grid
                .iter()
                .map(|&d| degenerate_sample(&c, cfg, tbar, d, q))
                .collect()
        }
    }
}

pub fn run_sharpness(cfg: &SharpnessConfig) -> Result<ExperimentReport> {
    timed(|| {
        check_geometric(&cfg.delta_grid, 5)?;
        let expected = expected_sharpness_slope(cfg.variant, cfg.p1, cfg.p2)?;
        let samples = sharpness_samples(cfg)?;
        let mut r = ExperimentReport::new("sharpness", cfg)?;
        for (i, s) in samples.iter().enumerate() {
            r.push(format!("delta[{i}]"), s.delta);
            r.push(format!("op_norm[{i}]"), s.op_norm);
            r.push(format!("ratio[{i}]"), s.ratio);
        }
        let fit = fit_loglog(
            &samples
                .iter()
                .map(|s| (s.delta, s.ratio))
                .collect::<Vec<_>>(),
        )?;
        r.push("expected_slope", expected);
        r.push("slope", fit.slope);
        r.push("r_squared", fit.r_squared);
        r.verdict = ReportVerdict::from_bool((fit.slope - expected).abs() <= cfg.tolerance);
        r.fits.push(fit);
        Ok(r)
    })
}

// ---------------------------------------------------------------------------
// exponent scan

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanOperator {
    Lacunary,
    Full,
    Full0,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Points `(1/p1, 1/p2)`.
    pub region_grid: Vec<[f64; 2]>,
    pub operator: ScanOperator,
    /// Band-limited noise pairs per width, on top of the indicator packet.
    pub trials: usize,
    pub seed: u64,
    /// Packet widths, each 4× smaller than the previous.
    pub widths: Vec<f64>,
    pub curve: CurveSpec,
    pub quad: QuadratureSpec,
    /// Dyadic range of the lacunary supremum.
    pub lacunary_scales: [i32; 2],
    /// Radius window of the full suprema.
    pub full_radii: [f64; 2],
    /// Output norms are taken on `[-x_extent, x_extent]`.
    pub x_extent: f64,
    /// Growth factor over one 4× shrink that raises a flag.
    pub growth_threshold: f64,
    /// Half-width of the excluded neighbourhoods of `kπ/2` for `full0`.
    pub axis_gap: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            region_grid: vec![[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]],
            operator: ScanOperator::Full0,
            trials: 1,
            seed: 1,
            widths: vec![1.0 / 8.0, 1.0 / 32.0, 1.0 / 128.0],
            curve: CurveSpec::builtin("circle")
                .expect("builtin")
                .with_eta(1.25 * PI, 0.6),
            quad: QuadratureSpec::new(256),
            lacunary_scales: [-2, 12],
            full_radii: [0.5, 4.0],
            x_extent: 2.5,
            growth_threshold: 1.25,
            axis_gap: 0.125,
        }
    }
}

/// Whether `(a, b) = (1/p1, 1/p2)` lies in the interior of the region where
/// boundedness is proved for the operator.
pub fn inside_bounded_region(op: ScanOperator, a: f64, b: f64) -> bool {
    match op {
        ScanOperator::Lacunary => a < 1.0 && b < 1.0,
        ScanOperator::Full => a < 0.5 && b < 0.5,
        ScanOperator::Full0 => a + b < 1.0,
    }
}

/// Pieces of `[lo, hi]` at distance at least `gap` from every `kπ/2`.
pub fn away_from_axes(lo: f64, hi: f64, gap: f64) -> Vec<(f64, f64)> {
    let k0 = (lo / FRAC_PI_2).floor() as i64 - 1;
    let k1 = (hi / FRAC_PI_2).ceil() as i64 + 1;
    let mut out = Vec::new();
    let mut start = lo;
    for k in k0..=k1 {
        let c = k as f64 * FRAC_PI_2;
        let (a, b) = (c - gap, c + gap);
        if b <= start || a >= hi {
            continue;
        }
        if a > start {
            out.push((start, a));
        }
        start = start.max(b);
    }
    if hi > start {
        out.push((start, hi));
    }
    out
}

struct ScanInputs {
    f1: FunctionSpec,
    f2: FunctionSpec,
    n1: f64,
    n2: f64,
}

fn scan_ratio(av: &Averager, cfg: &ScanConfig, input: &ScanInputs, delta: f64, q: f64) -> f64 {
    let (h, radii) = match cfg.operator {
        ScanOperator::Lacunary => {
            let radii = (cfg.lacunary_scales[0]..=cfg.lacunary_scales[1])
                .map(|k| 2f64.powi(-k))
                .collect::<Vec<_>>();
            (delta / 4.0, radii)
        }
        ScanOperator::Full | ScanOperator::Full0 => {
            let [r0, r1] = cfg.full_radii;
            let steps = ((r1 / r0).ln() / (delta / 8.0)).ceil() as usize;
            let radii = (0..=steps)
                .map(|i| r0 * (r1 / r0).powf(i as f64 / steps as f64))
                .collect();
            ((delta / 4.0).max(1.0 / 128.0), radii)
        }
    };
    let n = (2.0 * cfg.x_extent / h).ceil() as usize;
    let xs = XGrid::new(-cfg.x_extent + 0.5 * h, h, n);
    let vals = av.max_over(&input.f1, &input.f2, &radii, &xs);
    let denom = input.n1 * input.n2;
    if denom == 0.0 {
        return 0.0;
    }
    norm_q(&vals, h, q) / denom
}

/// Grid copy of a real closed-form function, for cheap repeated evaluation.
fn sampled(f: &FunctionSpec, h: f64) -> FunctionSpec {
    let (a, b) = f.support();
    let n = ((b - a) / h).ceil() as usize + 1;
    let vals = f.sample(a, h, n).iter().map(|v| v.re).collect();
    FunctionSpec::grid(a, h, vals)
}

fn scan_inputs(cfg: &ScanConfig, a: f64, b: f64, delta: f64, seed: u64) -> Result<Vec<ScanInputs>> {
    let pnorm = |f: &FunctionSpec, s: f64| -> Result<f64> {
        let p = if s == 0.0 { f64::INFINITY } else { 1.0 / s };
        lp_norm(f, p, false, delta / 64.0)
    };
    let packet = FunctionSpec::indicator(-0.5 * delta, 0.5 * delta, 1.0);
    let mut out = vec![ScanInputs {
        f1: packet.clone(),
        f2: packet,
        n1: delta.powf(a),
        n2: delta.powf(b),
    }];
    for t in 0..cfg.trials {
        let s = exec::derive_seed(seed, t as u64);
        let band = [0.25 / delta, 1.0 / delta];
        let f1 = sampled(
            &random_band_limited(exec::derive_seed(s, 1), band, [-0.5, 0.5], 1.0)?,
            delta / 64.0,
        );
        let f2 = sampled(
            &random_band_limited(exec::derive_seed(s, 2), band, [-0.5, 0.5], 1.0)?,
            delta / 64.0,
        );
        let (n1, n2) = (pnorm(&f1, a)?, pnorm(&f2, b)?);
        out.push(ScanInputs { f1, f2, n1, n2 });
    }
    Ok(out)
}

/// Per-point outcome of the scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub a: f64,
    pub b: f64,
    /// Worst ratio per width.
    pub ratios: Vec<f64>,
    pub flagged: bool,
    pub inside_region: bool,
}

pub fn exponent_scan_points(cfg: &ScanConfig) -> Result<Vec<ScanPoint>> {
    if cfg.widths.len() < 2 {
        return Err(Error::InvalidConfig("need at least two widths".into()));
    }
    for w in cfg.widths.windows(2) {
        if ((w[0] / w[1]) - 4.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(
                "consecutive widths must shrink by 4".into(),
            ));
        }
    }
    let c = make_curve(&cfg.curve)?;
    let restriction = match cfg.operator {
        ScanOperator::Full0 => {
            let (lo, hi) = c.eta_support();
            Some(away_from_axes(lo, hi, cfg.axis_gap))
        }
        _ => None,
    };
    let av = Averager::new(&c, &cfg.quad, restriction.as_deref())?;
    let mut out = Vec::with_capacity(cfg.region_grid.len());
    for (pi, &[a, b]) in cfg.region_grid.iter().enumerate() {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidExponent(if (0.0..=1.0).contains(&a) {
                b
            } else {
                a
            }));
        }
        let s = a + b;
        let q = if s == 0.0 { f64::INFINITY } else { 1.0 / s };
        let mut ratios = Vec::with_capacity(cfg.widths.len());
        for (wi, &delta) in cfg.widths.iter().enumerate() {
            let seed = exec::derive_seed(cfg.seed, (pi * 64 + wi) as u64);
            let inputs = scan_inputs(cfg, a, b, delta, seed)?;
            let best = inputs
                .iter()
                .map(|inp| scan_ratio(&av, cfg, inp, delta, q))
                .fold(0.0, f64::max);
            ratios.push(best);
        }
        let flagged = ratios
            .windows(2)
            .any(|w| w[1] >= cfg.growth_threshold * w[0] && w[1] > 0.0);
        out.push(ScanPoint {
            a,
            b,
            ratios,
            flagged,
            inside_region: inside_bounded_region(cfg.operator, a, b),
        });
    }
    Ok(out)
}

pub fn run_exponent_scan(cfg: &ScanConfig) -> Result<ExperimentReport> {
    timed(|| {
        let points = exponent_scan_points(cfg)?;
        let mut r = ExperimentReport::new("scan", cfg)?;
        let mut consistent = true;
        for (i, p) in points.iter().enumerate() {
            r.push(format!("point[{i}].inv_p1"), p.a);
            r.push(format!("point[{i}].inv_p2"), p.b);
            for (w, v) in p.ratios.iter().enumerate() {
                r.push(format!("point[{i}].ratio[{w}]"), *v);
            }
            r.push(format!("point[{i}].flagged"), p.flagged as u8 as f64);
            r.push(
                format!("point[{i}].inside_region"),
                p.inside_region as u8 as f64,
            );
            consistent &= !(p.flagged && p.inside_region);
        }
        r.verdict = ReportVerdict::from_bool(consistent);
        Ok(r)
    })
}

// ---------------------------------------------------------------------------
// summation lemma

/// Fixed-point scale of the exact sums: values are stored times `2^SUM_SCALE`.
const SUM_SCALE: i64 = 110;

/// `A + B√2` scaled by `2^SUM_SCALE`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QuadSurd {
    pub a: i128,
    pub b: i128,
}

impl QuadSurd {
    /// `2^{e/2}` for an integer `e`.
    fn half_power(e: i64) -> Result<Self> {
        let (whole, odd) = (e.div_euclid(2), e.rem_euclid(2) == 1);
        let shift = SUM_SCALE + whole;
        if !(0..=120).contains(&shift) {
            return Err(Error::InvalidConfig(format!(
                "exponent {e}/2 outside the exact range"
            )));
        }
        let v = 1i128 << shift;
        Ok(if odd {
            QuadSurd { a: 0, b: v }
        } else {
            QuadSurd { a: v, b: 0 }
        })
    }

    fn add(self, o: QuadSurd) -> QuadSurd {
        QuadSurd {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }

    pub fn to_f64(self) -> f64 {
        (self.a as f64 + self.b as f64 * SQRT_2) / 2f64.powi(SUM_SCALE as i32)
    }
}

/// Left side `Σ_k min_l min(2^{i_l−k}, 2^{(k+n_l−i_l)/2}, 1)`, exactly.
pub fn sum_lemma_lhs(n: (i64, i64), i: (i64, i64), k_range: (i64, i64)) -> Result<QuadSurd> {
    let mut acc = QuadSurd::default();
    for k in k_range.0..=k_range.1 {
        // exponents in half units
        let e = [(i.0, n.0), (i.1, n.1)]
            .iter()
            .map(|&(il, nl)| (2 * (il - k)).min(k + nl - il).min(0))
            .min()
            .unwrap();
        acc = acc.add(QuadSurd::half_power(e)?);
    }
    Ok(acc)
}

/// `(1+|n|) min(1, 2^{−(|i1−i2|−|n|)/d})` with `|n| = max(n1, n2)`.
pub fn sum_lemma_rhs(n: (i64, i64), i: (i64, i64), denominator: f64) -> f64 {
    let nn = n.0.max(n.1) as f64;
    let d = (i.0 - i.1).abs() as f64;
    (1.0 + nn) * 2f64.powf(-(d - nn) / denominator).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumLemmaOutcome {
    /// Smallest `C` with `LHS ≤ C (1+|n|) min(1, 2^{−(|i1−i2|−|n|)/2})`.
    pub constant: f64,
    pub argmax: (i64, i64),
    /// Same with the decay exponent `1/3`.
    pub constant_third: f64,
    pub argmax_third: (i64, i64),
    pub k_range: (i64, i64),
}

fn default_k_range(n: (i64, i64), i_range: (i64, i64)) -> (i64, i64) {
    (i_range.0 - 40, i_range.1 + n.0.max(n.1) + 40)
}

/// Exhaustive check over all `(i1, i2) ∈ i_range²` for one `n`.
pub fn verify_sum_lemma(
    n: (i64, i64),
    i_range: (i64, i64),
    k_range: Option<(i64, i64)>,
) -> Result<SumLemmaOutcome> {
    if i_range.0 > i_range.1 || n.0 < 0 || n.1 < 0 {
        return Err(Error::InvalidConfig(
            "empty index range or negative n".into(),
        ));
    }
    let need = default_k_range(n, i_range);
    let k_range = k_range.unwrap_or(need);
    if k_range.0 > need.0 || k_range.1 < need.1 {
        return Err(Error::InvalidConfig(format!(
            "k range {k_range:?} must cover {need:?}"
        )));
    }
    let pairs: Vec<(i64, i64)> = (i_range.0..=i_range.1)
        .flat_map(|a| (i_range.0..=i_range.1).map(move |b| (a, b)))
        .collect();
    let lhs = exec::map_slice(&pairs, |&i| {
        sum_lemma_lhs(n, i, k_range).map(QuadSurd::to_f64)
    });
    let mut out = SumLemmaOutcome {
        constant: 0.0,
        argmax: pairs[0],
        constant_third: 0.0,
        argmax_third: pairs[0],
        k_range,
    };
    for (&i, l) in pairs.iter().zip(lhs) {
        let l = l?;
        let c2 = l / sum_lemma_rhs(n, i, 2.0);
        let c3 = l / sum_lemma_rhs(n, i, 3.0);
        if c2 > out.constant {
            out.constant = c2;
            out.argmax = i;
        }
        if c3 > out.constant_third {
            out.constant_third = c3;
            out.argmax_third = i;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumLemmaConfig {
    /// Every `n ∈ {0..=n_max}²` is checked.
    pub n_max: i64,
    pub i_range: [i64; 2],
    /// Defaults to `[min i − 40, max i + max n + 40]` per `n`.
    pub k_range: Option<[i64; 2]>,
    pub threshold: f64,
}

impl Default for SumLemmaConfig {
    fn default() -> Self {
        SumLemmaConfig {
            n_max: 12,
            i_range: [-10, 10],
            k_range: None,
            threshold: 8.0,
        }
    }
}

pub fn run_sum_lemma(cfg: &SumLemmaConfig) -> Result<ExperimentReport> {
    timed(|| {
        let mut r = ExperimentReport::new("sumlemma", cfg)?;
        let ir = (cfg.i_range[0], cfg.i_range[1]);
        let mut worst = (0.0f64, (0, 0), (0, 0));
        let mut worst3 = (0.0f64, (0, 0), (0, 0));
        for n1 in 0..=cfg.n_max {
            for n2 in 0..=cfg.n_max {
                let kr = cfg.k_range.map(|k| (k[0], k[1]));
                let o = verify_sum_lemma((n1, n2), ir, kr)?;
                if o.constant > worst.0 {
                    worst = (o.constant, (n1, n2), o.argmax);
                }
                if o.constant_third > worst3.0 {
                    worst3 = (o.constant_third, (n1, n2), o.argmax_third);
                }
            }
        }
        r.push("constant", worst.0);
        r.push("argmax.n1", worst.1 .0 as f64);
        r.push("argmax.n2", worst.1 .1 as f64);
        r.push("argmax.i1", worst.2 .0 as f64);
        r.push("argmax.i2", worst.2 .1 as f64);
        r.push("constant_third", worst3.0);
        r.push("argmax_third.n1", worst3.1 .0 as f64);
        r.push("argmax_third.n2", worst3.1 .1 as f64);
        r.push("argmax_third.i1", worst3.2 .0 as f64);
        r.push("argmax_third.i2", worst3.2 .1 as f64);
        r.verdict = ReportVerdict::from_bool(worst.0 <= cfg.threshold);
        Ok(r)
    })
}

// ---------------------------------------------------------------------------
// weak L^{1/2}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakHalfConfig {
    pub curve: CurveSpec,
    /// Diagonal indices `m`, giving `n = (m, m)`.
    pub n_list: Vec<u32>,
    /// Number of α levels of the weak quasinorm.
    pub alpha_levels: usize,
    pub trials: usize,
    pub seed: u64,
    pub scales: ScaleRange,
    pub quad: QuadratureSpec,
    pub x_extent: f64,
    pub x_step: f64,
    pub sharpness: f64,
    /// Largest accepted growth exponent in `1 + |n|`.
    pub threshold: f64,
}

impl Default for WeakHalfConfig {
    fn default() -> Self {
        WeakHalfConfig {
            curve: CurveSpec::builtin("circle").expect("builtin"),
            n_list: vec![0, 2, 4, 6],
            alpha_levels: WEAK_LEVELS,
            trials: 4,
            seed: 5,
            scales: ScaleRange::new(-1, 2, 8),
            quad: QuadratureSpec::new(256),
            x_extent: 3.0,
            x_step: 1.0 / 128.0,
            sharpness: DEFAULT_SHARPNESS,
            threshold: 2.5,
        }
    }
}

/// Unit-mass spike or mean-zero two-step atom of width `w` at `c`.
pub fn weak_half_input(c: f64, w: f64, atom: bool) -> FunctionSpec {
    if atom {
        // ±height halves on a 64-cell grid; the zero ramps are compensated
        let m = 64;
        let h = w / m as f64;
        let height = 1.0 / (w * (1.0 - 2.0 / m as f64));
        let samples = (0..=m)
            .map(|i| match i {
                0 | 64 | 32 => 0.0,
                i if i < m / 2 => height,
                _ => -height,
            })
            .collect();
        FunctionSpec::grid(c - 0.5 * w, h, samples)
    } else {
        FunctionSpec::indicator(c - 0.5 * w, c + 0.5 * w, 1.0 / w)
    }
}

/// A pair of unit-mass inputs placed so that some `(x, r, t)` with `r` in the
/// scale range and `t` in the middle of supp η hits both.
pub fn weak_half_pair(
    c: &Curve,
    scales: &ScaleRange,
    seed: u64,
    atoms: (bool, bool),
) -> (FunctionSpec, FunctionSpec) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (lo, hi) = c.eta_support();
    let mid = 0.5 * (lo + hi);
    let t0 = mid + 0.5 * (hi - lo) * rng.random_range(-0.5..0.5);
    let k0 = rng.random_range(scales.k_min..=scales.k_max);
    let r0 = 2f64.powi(-k0);
    let (g1, g2) = c.gamma(t0);
    let c1: f64 = rng.random_range(-0.25..0.25);
    let c2 = c1 + r0 * (g2 - g1);
    let w1 = 2f64.powf(rng.random_range(-6.0..-3.0));
    let w2 = 2f64.powf(rng.random_range(-6.0..-3.0));
    (
        weak_half_input(c1, w1, atoms.0),
        weak_half_input(c2, w2, atoms.1),
    )
}

/// Worst weak-`L^{1/2}` quasinorm of `M_n` over the trial inputs, per `n`.
pub fn weak_half_values(cfg: &WeakHalfConfig, levels: usize) -> Result<Vec<f64>> {
    let c = make_curve(&cfg.curve)?;
    let bank = make_filter_bank(cfg.sharpness);
    let nmax = cfg.n_list.iter().cloned().max().unwrap_or(0) as i32;
    let resolution = FilterBank::required_spacing(cfg.scales.k_max + nmax + 2);
    let n = (2.0 * cfg.x_extent / cfg.x_step).ceil() as usize;
    let xs = XGrid::new(-cfg.x_extent + 0.5 * cfg.x_step, cfg.x_step, n);
    let mut out = Vec::with_capacity(cfg.n_list.len());
    for &m in &cfg.n_list {
        let mut best: f64 = 0.0;
        for t in 0..cfg.trials {
            let s = exec::derive_seed(cfg.seed, t as u64);
            let (f1, f2) = weak_half_pair(&c, &cfg.scales, s, (t % 2 == 1, t % 4 >= 2));
            let g = mn_maximal(
                &c,
                &f1,
                &f2,
                (m, m),
                &cfg.scales,
                &bank,
                &cfg.quad,
                &xs,
                resolution,
            )?;
            let FunctionSpec::Grid { samples, .. } = &g else {
                unreachable!("maximal output is a grid")
            };
            let vals: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
            best = best.max(weak_from_values(&vals, cfg.x_step, 0.5, levels));
        }
        out.push(best);
    }
    Ok(out)
}

pub fn run_weak_half_experiment(cfg: &WeakHalfConfig) -> Result<ExperimentReport> {
    timed(|| {
        let mut r = ExperimentReport::new("weakhalf", cfg)?;
        let vals = weak_half_values(cfg, cfg.alpha_levels)?;
        for (&m, v) in cfg.n_list.iter().zip(&vals) {
            r.push(format!("quasinorm[n={m}]"), *v);
        }
        let pts: Vec<(f64, f64)> = cfg
            .n_list
            .iter()
            .zip(&vals)
            .map(|(&m, &v)| (1.0 + m as f64, v))
            .collect();
        let fit = fit_loglog(&pts)?;
        r.push("growth_exponent", fit.slope);
        r.verdict = ReportVerdict::from_bool(fit.slope <= cfg.threshold);
        r.fits.push(fit);
        Ok(r)
    })
}

/// Every experiment's default config, keyed by the CLI name.
pub fn default_configs() -> serde_json::Value {
    serde_json::json!({
        "sharpness": SharpnessConfig::qlt1(1.0, 1.0),
        "sharpness_degenerate": SharpnessConfig::degenerate(1.0, 1.0),
        "scan": ScanConfig::default(),
        "sumlemma": SumLemmaConfig::default(),
        "weakhalf": WeakHalfConfig::default(),
    })
}
