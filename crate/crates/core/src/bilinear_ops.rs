//! Bilinear averages `B_r` along a curve and the maximal operators built on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::exec;
use crate::gridfn::FunctionSpec;
use crate::lp_filters::{apply_projection, FilterBank, Which};

fn default_depth() -> u32 {
    20
}

/// Panels over supp η, optionally refined dyadically toward given points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub t_points: usize,
    #[serde(default)]
    pub refinement_near: Vec<f64>,
    #[serde(default = "default_depth")]
    pub depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::new(256)
    }
}

impl QuadratureSpec {
    pub fn new(t_points: usize) -> Self {
        QuadratureSpec {
            t_points,
            refinement_near: Vec::new(),
            depth: default_depth(),
        }
    }

    /// Refines toward the zeros of `J` of the curve.
    pub fn for_curve(c: &Curve, t_points: usize) -> Self {
        QuadratureSpec {
            t_points,
            refinement_near: crate::curve::find_j_zeros(c).iter().map(|z| z.t).collect(),
            depth: default_depth(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_points < 64 {
            return Err(Error::InvalidQuadrature(format!(
                "t_points = {} < 64",
                self.t_points
            )));
        }
        if self.depth > 40 {
            return Err(Error::InvalidQuadrature(format!(
                "depth = {} > 40",
                self.depth
            )));
        }
        Ok(())
    }
}

/// Uniform evaluation grid `start + i * step`, `i < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl XGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Self {
        XGrid { start, step, count }
    }

    /// Grid with spacing `step` covering `[a, b]`.
    pub fn covering(a: f64, b: f64, step: f64) -> Self {
        let count = ((b - a) / step).ceil() as usize + 1;
        XGrid {
            start: a,
            step,
            count,
        }
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.x(i)).collect()
    }

    pub fn to_function(&self, values: Vec<f64>) -> FunctionSpec {
        FunctionSpec::grid(self.start, self.step, values)
    }
}

/// Dyadic scales `r = 2^{-k}`, `k_min ≤ k ≤ k_max`; the geometric radius grid
/// for full suprema spans `[2^{-k_max}, 2^{-k_min}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub k_min: i32,
    pub k_max: i32,
    pub r_grid_per_octave: u32,
}

impl ScaleRange {
    pub fn new(k_min: i32, k_max: i32, r_grid_per_octave: u32) -> Self {
        ScaleRange {
            k_min,
            k_max,
            r_grid_per_octave,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_min > self.k_max {
            return Err(Error::InvalidScales(format!(
                "k_min = {} > k_max = {}",
                self.k_min, self.k_max
            )));
        }
        if self.r_grid_per_octave == 0 {
            return Err(Error::InvalidScales(
                "r_grid_per_octave must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn lacunary_radii(&self) -> Vec<f64> {
        (self.k_min..=self.k_max).map(|k| 2f64.powi(-k)).collect()
    }

    pub fn geometric_radii(&self) -> Vec<f64> {
        let m = self.r_grid_per_octave as i64;
        let steps = (self.k_max - self.k_min) as i64 * m;
        (0..=steps)
            .map(|i| 2f64.powf(-(self.k_max as f64) + i as f64 / m as f64))
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    g1: [f64; 3],
    g2: [f64; 3],
    /// Simpson weights times η.
    ws: [f64; 3],
    /// Two-interval trapezoid weights times η.
    wt: [f64; 3],
}

/// Monotone piece of a component: `[t0, t1]` with values `v0`, `v1`.
#[derive(Clone, Copy, Debug)]
struct Piece {
    t0: f64,
    t1: f64,
    v0: f64,
    v1: f64,
}

const GAUSS4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Precomputed quadrature for `t ↦ f1(x + rγ1(t)) f2(x + rγ2(t)) η(t)`.
///
/// Panels carry Simpson weights for closed-form inputs and trapezoid weights
/// for grid inputs. For closed-form inputs, panels containing a preimage of an
/// input discontinuity are split there and each piece uses 4-point Gauss
/// nodes, so no node sits on a jump.
pub struct Averager<'a> {
    curve: &'a Curve,
    panels: Vec<Panel>,
    pieces: [Vec<Piece>; 2],
    range: [(f64, f64); 2],
    total_weight: f64,
}

fn refine(a: f64, b: f64, target: f64, depth: u32, out: &mut Vec<(f64, f64)>) {
    if depth == 0 {
        out.push((a, b));
        return;
    }
    let m = 0.5 * (a + b);
    if target < m {
        refine(a, m, target, depth - 1, out);
        out.push((m, b));
    } else {
        out.push((a, m));
        refine(m, b, target, depth - 1, out);
    }
}

impl<'a> Averager<'a> {
    /// `restriction`, if given, is a list of `t`-intervals intersected with supp η.
    pub fn new(
        curve: &'a Curve,
        quad: &QuadratureSpec,
        restriction: Option<&[(f64, f64)]>,
    ) -> Result<Self> {
        quad.validate()?;
        let (lo, hi) = curve.eta_support();
        let mut cuts = vec![lo, hi];
        if let Some(rs) = restriction {
            for &(u, v) in rs {
                for c in [u, v] {
                    if c > lo && c < hi {
                        cuts.push(c);
                    }
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let inside = |t: f64| match restriction {
            None => true,
            Some(rs) => rs.iter().any(|&(u, v)| t > u.min(v) && t < u.max(v)),
        };
        let mut spans: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a || !inside(0.5 * (a + b)) {
                continue;
            }
            let m = ((quad.t_points as f64 * (b - a) / (hi - lo)).ceil() as usize).max(2);
            for i in 0..m {
                spans.push((
                    a + (b - a) * i as f64 / m as f64,
                    a + (b - a) * (i + 1) as f64 / m as f64,
                ));
            }
        }
        for &target in &quad.refinement_near {
            if !(target >= lo && target <= hi) {
                continue;
            }
            let mut next = Vec::with_capacity(spans.len() + 2 * quad.depth as usize);
            for &(a, b) in &spans {
                if target >= a && target <= b {
                    refine(a, b, target, quad.depth, &mut next);
                } else {
                    next.push((a, b));
                }
            }
            spans = next;
        }
        let panels: Vec<Panel> = spans
            .iter()
            .map(|&(a, b)| {
                let ts = [a, 0.5 * (a + b), b];
                let mut g1 = [0.0; 3];
                let mut g2 = [0.0; 3];
                let mut ws = [0.0; 3];
                let mut wt = [0.0; 3];
                let l = b - a;
                for i in 0..3 {
                    let (u, v) = curve.gamma(ts[i]);
                    g1[i] = u;
                    g2[i] = v;
                    let e = curve.eta_value(ts[i]);
                    ws[i] = e * l * [1.0, 4.0, 1.0][i] / 6.0;
                    wt[i] = e * l * [1.0, 2.0, 1.0][i] / 4.0;
                }
                Panel {
                    a,
                    b,
                    g1,
                    g2,
                    ws,
                    wt,
                }
            })
            .collect();
        let pieces = [monotone_pieces(curve, 0), monotone_pieces(curve, 1)];
        let mut range = [(f64::INFINITY, f64::NEG_INFINITY); 2];
        for j in 0..2 {
            for p in &pieces[j] {
                range[j].0 = range[j].0.min(p.v0.min(p.v1));
                range[j].1 = range[j].1.max(p.v0.max(p.v1));
            }
        }
        let total_weight = panels.iter().map(|p| p.ws.iter().sum::<f64>()).sum();
        Ok(Averager {
            curve,
            panels,
            pieces,
            range,
            total_weight,
        })
    }

    /// `∫ η` over the retained panels.
    pub fn weight(&self) -> f64 {
        self.total_weight
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// True when `x + r·γ_j(supp η)` meets supp `f_j` for both `j`.
    fn may_overlap(&self, f1: &FunctionSpec, f2: &FunctionSpec, x: f64, r: f64) -> bool {
        for (j, f) in [f1, f2].into_iter().enumerate() {
            let (a, b) = f.support();
            let (m, mm) = self.range[j];
            if x + r * mm < a || x + r * m > b {
                return false;
            }
        }
        true
    }

    fn preimages(&self, j: usize, y: f64, out: &mut Vec<f64>) {
        for p in &self.pieces[j] {
            let (lo, hi) = if p.v0 <= p.v1 {
                (p.v0, p.v1)
            } else {
                (p.v1, p.v0)
            };
            if y < lo || y > hi {
                continue;
            }
            let comp = self.curve.component(j);
            let increasing = p.v1 >= p.v0;
            let (mut a, mut b) = (p.t0, p.t1);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let below = comp.value(m) < y;
                if below == increasing {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
    }

    fn gauss_piece(
        &self,
        f1: &FunctionSpec,
        f2: &FunctionSpec,
        x: f64,
        r: f64,
        a: f64,
        b: f64,
    ) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let t = mid + half * GAUSS4_X[i];
            let (g1, g2) = self.curve.gamma(t);
            let v = f1.evaluate(x + r * g1) * f2.evaluate(x + r * g2);
            acc += v * (GAUSS4_W[i] * half * self.curve.eta_value(t));
        }
        acc
    }

    /// `B_r(f1, f2)(x)`.
    pub fn value(&self, f1: &FunctionSpec, f2: &FunctionSpec, x: f64, r: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if !self.may_overlap(f1, f2, x, r) {
            return zero;
        }
        let grid_mode = f1.is_grid() || f2.is_grid();
        let mut cuts: Vec<f64> = Vec::new();
        if !grid_mode {
            for (j, f) in [f1, f2].into_iter().enumerate() {
                for bp in f.breakpoints() {
                    self.preimages(j, (bp - x) / r, &mut cuts);
                }
            }
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let mut acc = zero;
        let mut ci = 0;
        for p in &self.panels {
            while ci < cuts.len() && cuts[ci] <= p.a {
                ci += 1;
            }
            let mut end = ci;
            while end < cuts.len() && cuts[end] < p.b {
                end += 1;
            }
            if ci == end {
                let w = if grid_mode { &p.wt } else { &p.ws };
                for i in 0..3 {
                    if w[i] == 0.0 {
                        continue;
                    }
                    let v1 = f1.evaluate(x + r * p.g1[i]);
                    if v1.re == 0.0 && v1.im == 0.0 {
                        continue;
                    }
                    acc += v1 * f2.evaluate(x + r * p.g2[i]) * w[i];
                }
            } else {
                let mut lo = p.a;
                for &c in cuts[ci..end].iter().chain(std::iter::once(&p.b)) {
                    if c > lo {
                        acc += self.gauss_piece(f1, f2, x, r, lo, c);
                        lo = c;
                    }
                }
            }
        }
        acc
    }

    /// Values on a grid, in parallel over `x`.
    pub fn values(
        &self,
        f1: &FunctionSpec,
        f2: &FunctionSpec,
        r: f64,
        xs: &XGrid,
    ) -> Vec<Complex64> {
        exec::map_range(xs.count, |i| self.value(f1, f2, xs.x(i), r))
    }

    /// `max_r |B_r(x)|` over the given radii.
    pub fn max_over(
        &self,
        f1: &FunctionSpec,
        f2: &FunctionSpec,
        radii: &[f64],
        xs: &XGrid,
    ) -> Vec<f64> {
        exec::map_range(xs.count, |i| {
            let x = xs.x(i);
            radii
                .iter()
                .map(|&r| self.value(f1, f2, x, r).norm())
                .fold(0.0, f64::max)
        })
    }
}

fn monotone_pieces(curve: &Curve, j: usize) -> Vec<Piece> {
    let (lo, hi) = curve.eta_support();
    let comp = curve.component(j);
    let d = curve.component_derivative(j);
    let n = 2048;
    let grid: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let dv: Vec<f64> = grid.iter().map(|&t| d.value(t)).collect();
    let mut breaks = vec![lo];
    for i in 0..n {
        if dv[i] == 0.0 && i > 0 {
            breaks.push(grid[i]);
        } else if dv[i] != 0.0 && dv[i + 1] != 0.0 && (dv[i] < 0.0) != (dv[i + 1] < 0.0) {
            let (mut a, mut b) = (grid[i], grid[i + 1]);
            let neg_a = dv[i] < 0.0;
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if (d.value(m) < 0.0) == neg_a {
                    a = m;
                } else {
                    b = m;
                }
            }
            breaks.push(0.5 * (a + b));
        }
    }
    breaks.push(hi);
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Piece {
            t0: w[0],
            t1: w[1],
            v0: comp.value(w[0]),
            v1: comp.value(w[1]),
        })
        .collect()
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    Ok(())
}

/// `B_r(f1, f2)` on `x_grid`.
pub fn eval_br(
    c: &Curve,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    r: f64,
    x_grid: &XGrid,
    quad: &QuadratureSpec,
) -> Result<FunctionSpec> {
    check_radius(r)?;
    f1.validate()?;
    f2.validate()?;
    let av = Averager::new(c, quad, None)?;
    let vals = av.values(f1, f2, r, x_grid);
    Ok(FunctionSpec::grid_complex(x_grid.start, x_grid.step, &vals))
}

/// `max_{k_min ≤ k ≤ k_max} |B_{2^{-k}}(f1, f2)|`, a lower bound for the
/// lacunary maximal function.
pub fn lacunary_maximal(
    c: &Curve,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    scales: &ScaleRange,
    x_grid: &XGrid,
    quad: &QuadratureSpec,
) -> Result<FunctionSpec> {
    scales.validate()?;
    let av = Averager::new(c, quad, None)?;
    Ok(x_grid.to_function(av.max_over(f1, f2, &scales.lacunary_radii(), x_grid)))
}

/// Maximum of `|B_r|` over the geometric radius grid; with an angular
/// restriction, supp η is intersected with the given `t`-intervals.
pub fn full_maximal(
    c: &Curve,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    scales: &ScaleRange,
    x_grid: &XGrid,
    quad: &QuadratureSpec,
    angular_restriction: Option<&[(f64, f64)]>,
) -> Result<FunctionSpec> {
    scales.validate()?;
    let av = Averager::new(c, quad, angular_restriction)?;
    Ok(x_grid.to_function(av.max_over(f1, f2, &scales.geometric_radii(), x_grid)))
}

/// The angular interval `{θ : |θ − kπ/2| ∈ [2^{−n}, 2^{−n+1}]}` as two pieces.
pub fn angular_interval(n: u32, k: i32) -> Vec<(f64, f64)> {
    let c = k as f64 * std::f64::consts::FRAC_PI_2;
    let (s, l) = (2f64.powi(-(n as i32)), 2f64.powi(1 - n as i32));
    vec![(c - l, c - s), (c + s, c + l)]
}

fn frequency_pieces(
    c: &Curve,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    n: (u32, u32),
    scales: &ScaleRange,
    bank: &FilterBank,
    quad: &QuadratureSpec,
    x_grid: &XGrid,
    resolution: f64,
) -> Result<Vec<Vec<f64>>> {
    scales.validate()?;
    let nmax = n.0.max(n.1) as i32;
    let finest = FilterBank::required_spacing(scales.k_max + nmax + 2);
    if resolution > finest * (1.0 + 1e-12) {
        return Err(Error::ResolutionTooCoarse {
            k: scales.k_max + nmax + 2,
            resolution,
            required: finest,
        });
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
    let mut out = Vec::new();
    for k in scales.k_min..=scales.k_max {
        // 64 samples per period of the top frequency keeps the linear
        // interpolation error well below the decay being measured
        let h = FilterBank::required_spacing(k + nmax + 4);
        let g1 = apply_projection(bank, Which::Q, k + n.0 as i32, f1, h)?;
        let g2 = apply_projection(bank, Which::Q, k + n.1 as i32, f2, h)?;
        // 16 nodes per period of the fastest oscillation in t
        let top = FilterBank::top_frequency(Which::Q, nmax);
        let need = (8.0 * top * speed * (hi - lo)).ceil() as usize;
        let q = QuadratureSpec {
            t_points: quad.t_points.max(need),
            ..quad.clone()
        };
        let av = Averager::new(c, &q, None)?;
        let r = 2f64.powi(-k);
        out.push(exec::map_range(x_grid.count, |i| {
            av.value(&g1, &g2, x_grid.x(i), r).norm()
        }));
    }
    Ok(out)
}

/// `M_n = max_k |A_k(Q_{k+n1} f1, Q_{k+n2} f2)|` over the scale range.
#[allow(clippy::too_many_arguments)]
pub fn mn_maximal(
    c: &Curve,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    n: (u32, u32),
    scales: &ScaleRange,
    bank: &FilterBank,
    quad: &QuadratureSpec,
    x_grid: &XGrid,
    resolution: f64,
) -> Result<FunctionSpec> {
    let pieces = frequency_pieces(c, f1, f2, n, scales, bank, quad, x_grid, resolution)?;
    let vals = (0..x_grid.count)
        .map(|i| pieces.iter().map(|p| p[i]).fold(0.0, f64::max))
        .collect();
    Ok(x_grid.to_function(vals))
}

/// `S_n = Σ_k |A_k(Q_{k+n1} f1, Q_{k+n2} f2)|`, summed in ascending `k`.
#[allow(clippy::too_many_arguments)]
pub fn sn_sum(
    c: &Curve,
    f1: &FunctionSpec,
    f2: &FunctionSpec,
    n: (u32, u32),
    scales: &ScaleRange,
    bank: &FilterBank,
    quad: &QuadratureSpec,
    x_grid: &XGrid,
    resolution: f64,
) -> Result<FunctionSpec> {
    let pieces = frequency_pieces(c, f1, f2, n, scales, bank, quad, x_grid, resolution)?;
    let vals = (0..x_grid.count)
        .map(|i| pieces.iter().fold(0.0, |acc, p| acc + p[i]))
        .collect();
    Ok(x_grid.to_function(vals))
}

/// Primitive `F(u) = ∫_{-∞}^{u} |f|^τ`, exact for indicators and sampled
/// with the trapezoid rule otherwise.
pub(crate) enum PowerPrimitive {
    Step {
        a: f64,
        b: f64,
        level: f64,
    },
    Sampled {
        origin: f64,
        h: f64,
        cumulative: Vec<f64>,
    },
}

impl PowerPrimitive {
    pub(crate) fn new(f: &FunctionSpec, tau: f64, resolution: f64) -> Self {
        match f {
            FunctionSpec::Indicator { a, b, height } => PowerPrimitive::Step {
                a: *a,
                b: *b,
                level: height.abs().powf(tau),
            },
            _ => {
                let (a, b) = f.support();
                let h = match f {
                    FunctionSpec::Grid { spacing, .. } => spacing.min(resolution),
                    _ => resolution,
                };
                let n = ((b - a) / h).ceil().max(1.0) as usize + 1;
                let vals: Vec<f64> = (0..n)
                    .map(|i| f.evaluate(a + h * i as f64).norm().powf(tau))
                    .collect();
                let mut cumulative = vec![0.0; n];
                for i in 1..n {
                    cumulative[i] = cumulative[i - 1] + 0.5 * h * (vals[i - 1] + vals[i]);
                }
                PowerPrimitive::Sampled {
                    origin: a,
                    h,
                    cumulative,
                }
            }
        }
    }

    pub(crate) fn at(&self, u: f64) -> f64 {
        match self {
            PowerPrimitive::Step { a, b, level } => level * (u.clamp(*a, *b) - a),
            PowerPrimitive::Sampled {
                origin,
                h,
                cumulative,
            } => {
                let n = cumulative.len();
                let s = (u - origin) / h;
                if s <= 0.0 {
                    0.0
                } else if s >= (n - 1) as f64 {
                    cumulative[n - 1]
                } else {
                    let i = s.floor() as usize;
                    let w = s - i as f64;
                    cumulative[i] + w * (cumulative[i + 1] - cumulative[i])
                }
            }
        }
    }
}

/// `sup_k |I|⁻¹ ∫_I |f(x − 2^{-k} y)| dy` over the scale range.
pub fn ni_maximal(
    f: &FunctionSpec,
    interval: (f64, f64),
    scales: &ScaleRange,
    x_grid: &XGrid,
    resolution: f64,
) -> Result<FunctionSpec> {
    scales.validate()?;
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Err(Error::InvalidConfig(format!("empty interval [{lo}, {hi}]")));
    }
    let prim = PowerPrimitive::new(f, 1.0, resolution);
    let radii = scales.lacunary_radii();
    let len = hi - lo;
    let vals = exec::map_range(x_grid.count, |i| {
        let x = x_grid.x(i);
        radii
            .iter()
            .map(|&r| (prim.at(x - r * lo) - prim.at(x - r * hi)) / (r * len))
            .fold(0.0, f64::max)
    });
    Ok(x_grid.to_function(vals))
}

/// `𝕄_τ f = (𝕄 |f|^τ)^{1/τ}` with the centred maximal average over the
/// geometric radius grid.
pub fn hl_maximal(
    f: &FunctionSpec,
    tau: f64,
    scales: &ScaleRange,
    x_grid: &XGrid,
    resolution: f64,
) -> Result<FunctionSpec> {
    scales.validate()?;
    if !(tau >= 1.0) {
        return Err(Error::InvalidExponent(tau));
    }
    let prim = PowerPrimitive::new(f, tau, resolution);
    let radii = scales.geometric_radii();
    let vals = exec::map_range(x_grid.count, |i| {
        let x = x_grid.x(i);
        let m = radii
            .iter()
            .map(|&r| (prim.at(x + r) - prim.at(x - r)) / (2.0 * r))
            .fold(0.0, f64::max);
        m.max(0.0).powf(1.0 / tau)
    });
    Ok(x_grid.to_function(vals))
}
