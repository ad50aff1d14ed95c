//! Analytic curves `γ = (γ1, γ2)`, the function `J = γ1' − γ2'`, and numeric
//! checkers for the three structural hypotheses.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed-form scalar component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Component {
    /// `Σ coeffs[i] t^i`.
    Poly { coeffs: Vec<f64> },
    /// `c0 + cos·cos(ωt) + sin·sin(ωt)`.
    Trig {
        c0: f64,
        cos: f64,
        sin: f64,
        freq: f64,
    },
}

impl Component {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Component::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Component::Trig { c0, cos, sin, freq } => {
                let (s, c) = (freq * t).sin_cos();
                c0 + cos * c + sin * s
            }
        }
    }

    pub fn derivative(&self) -> Component {
        match self {
            Component::Poly { coeffs } => {
                let d: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| c * i as f64)
                    .collect();
                Component::Poly {
                    coeffs: if d.is_empty() { vec![0.0] } else { d },
                }
            }
            Component::Trig { cos, sin, freq, .. } => Component::Trig {
                c0: 0.0,
                cos: sin * freq,
                sin: -cos * freq,
                freq: *freq,
            },
        }
    }
}

/// Smooth bump `e · exp(−1/(1−s²))`, `s = (t − center)/halfwidth`; its maximum is 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eta {
    pub center: f64,
    pub halfwidth: f64,
}

impl Eta {
    pub fn value(&self, t: f64) -> f64 {
        let s = (t - self.center) / self.halfwidth;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.halfwidth, self.center + self.halfwidth)
    }

    /// `∫ η`, by the trapezoid rule (spectrally accurate for this bump).
    pub fn mass(&self) -> f64 {
        let n = 4096;
        let (a, b) = self.support();
        let h = (b - a) / n as f64;
        (1..n).map(|i| self.value(a + h * i as f64)).sum::<f64>() * h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Circle,
    DegenerateCubic,
    Poly,
    /// `coeffsj = [c0, cos, sin, freq]`.
    Trig,
}

/// JSON description of a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub kind: CurveKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeffs1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeffs2: Vec<f64>,
    /// Optional explicit derivative coefficients, checked against finite differences.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dcoeffs1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dcoeffs2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Eta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}

impl CurveSpec {
    pub fn builtin(name: &str) -> Option<CurveSpec> {
        let kind = match name {
            "circle" => CurveKind::Circle,
            "degenerate-cubic" => CurveKind::DegenerateCubic,
            _ => return None,
        };
        Some(CurveSpec {
            kind,
            coeffs1: Vec::new(),
            coeffs2: Vec::new(),
            dcoeffs1: None,
            dcoeffs2: None,
            eta: None,
            domain: None,
        })
    }

    pub fn poly(coeffs1: Vec<f64>, coeffs2: Vec<f64>, eta: Eta) -> CurveSpec {
        CurveSpec {
            kind: CurveKind::Poly,
            coeffs1,
            coeffs2,
            dcoeffs1: None,
            dcoeffs2: None,
            eta: Some(eta),
            domain: None,
        }
    }

    pub fn with_eta(mut self, center: f64, halfwidth: f64) -> CurveSpec {
        self.eta = Some(Eta { center, halfwidth });
        self
    }
}

/// Pointwise data returned by [`eval_curve`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub g1: f64,
    pub g2: f64,
    pub dg1: f64,
    pub dg2: f64,
    pub j: f64,
    pub dj: f64,
}

#[derive(Clone, Debug)]
pub struct Curve {
    spec: CurveSpec,
    gamma: [Component; 2],
    dgamma: [Component; 2],
    d2gamma: [Component; 2],
    domain: (f64, f64),
    eta: Eta,
    eta_mass: f64,
}

fn trig_from(c: &[f64]) -> Result<Component> {
    if c.len() != 4 {
        return Err(Error::InvalidCurve(
            "trig components need [c0, cos, sin, freq]".into(),
        ));
    }
    Ok(Component::Trig {
        c0: c[0],
        cos: c[1],
        sin: c[2],
        freq: c[3],
    })
}

/// Validates a spec and builds the curve.
pub fn make_curve(spec: &CurveSpec) -> Result<Curve> {
    let (gamma, default_eta, default_domain) = match spec.kind {
        CurveKind::Circle => (
            [
                Component::Trig {
                    c0: 0.0,
                    cos: 1.0,
                    sin: 0.0,
                    freq: 1.0,
                },
                Component::Trig {
                    c0: 0.0,
                    cos: 0.0,
                    sin: 1.0,
                    freq: 1.0,
                },
            ],
            Some(Eta {
                center: PI,
                halfwidth: 0.5,
            }),
            (-4.0 * PI, 4.0 * PI),
        ),
        CurveKind::DegenerateCubic => (
            [
                Component::Poly {
                    coeffs: vec![0.0, 1.0, 0.0, 1.0],
                },
                Component::Poly {
                    coeffs: vec![0.0, 1.0],
                },
            ],
            Some(Eta {
                center: 0.0,
                halfwidth: 1.0,
            }),
            (-2.0, 2.0),
        ),
        CurveKind::Poly => {
            if spec.coeffs1.is_empty() || spec.coeffs2.is_empty() {
                return Err(Error::InvalidCurve(
                    "poly curves need coeffs1 and coeffs2".into(),
                ));
            }
            (
                [
                    Component::Poly {
                        coeffs: spec.coeffs1.clone(),
                    },
                    Component::Poly {
                        coeffs: spec.coeffs2.clone(),
                    },
                ],
                None,
                (-10.0, 10.0),
            )
        }
        CurveKind::Trig => (
            [trig_from(&spec.coeffs1)?, trig_from(&spec.coeffs2)?],
            None,
            (-4.0 * PI, 4.0 * PI),
        ),
    };
    if gamma.iter().any(|c| match c {
        Component::Poly { coeffs } => coeffs.iter().any(|v| !v.is_finite()),
        Component::Trig { c0, cos, sin, freq } => {
            ![c0, cos, sin, freq].iter().all(|v| v.is_finite())
        }
    }) {
        return Err(Error::InvalidCurve("coefficients must be finite".into()));
    }
    let eta = spec
        .eta
        .or(default_eta)
        .ok_or_else(|| Error::InvalidCurve("eta parameters are required".into()))?;
    if !(eta.halfwidth > 0.0) || !eta.center.is_finite() {
        return Err(Error::InvalidCurve("eta halfwidth must be positive".into()));
    }
    let domain = spec.domain.map(|d| (d[0], d[1])).unwrap_or(default_domain);
    let (lo, hi) = eta.support();
    if !(lo > domain.0 && hi < domain.1) {
        return Err(Error::EtaOutsideDomain {
            lo,
            hi,
            a: domain.0,
            b: domain.1,
        });
    }
    let dgamma = [
        match &spec.dcoeffs1 {
            Some(c) => Component::Poly { coeffs: c.clone() },
            None => gamma[0].derivative(),
        },
        match &spec.dcoeffs2 {
            Some(c) => Component::Poly { coeffs: c.clone() },
            None => gamma[1].derivative(),
        },
    ];
    let d2gamma = [dgamma[0].derivative(), dgamma[1].derivative()];
    let curve = Curve {
        spec: spec.clone(),
        gamma,
        dgamma,
        d2gamma,
        domain,
        eta,
        eta_mass: eta.mass(),
    };
    curve.check_derivatives(10, 0x5eed, 1e-6)?;
    curve.check_velocity()?;
    Ok(curve)
}

/// Richardson-extrapolated central difference.
fn richardson(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    let h = 1e-3 * (1.0 + t.abs());
    let d = |h: f64| (f(t + h) - f(t - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

impl Curve {
    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn name(&self) -> String {
        match self.spec.kind {
            CurveKind::Circle => "circle".into(),
            CurveKind::DegenerateCubic => "degenerate-cubic".into(),
            CurveKind::Poly => "poly".into(),
            CurveKind::Trig => "trig".into(),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn eta(&self) -> Eta {
        self.eta
    }

    pub fn eta_value(&self, t: f64) -> f64 {
        self.eta.value(t)
    }

    pub fn eta_support(&self) -> (f64, f64) {
        self.eta.support()
    }

    pub fn eta_mass(&self) -> f64 {
        self.eta_mass
    }

    pub fn component(&self, j: usize) -> &Component {
        &self.gamma[j]
    }

    pub fn component_derivative(&self, j: usize) -> &Component {
        &self.dgamma[j]
    }

    #[inline]
    pub fn gamma(&self, t: f64) -> (f64, f64) {
        (self.gamma[0].value(t), self.gamma[1].value(t))
    }

    #[inline]
    pub fn dgamma(&self, t: f64) -> (f64, f64) {
        (self.dgamma[0].value(t), self.dgamma[1].value(t))
    }

    #[inline]
    pub fn j(&self, t: f64) -> f64 {
        self.dgamma[0].value(t) - self.dgamma[1].value(t)
    }

    #[inline]
    pub fn dj(&self, t: f64) -> f64 {
        self.d2gamma[0].value(t) - self.d2gamma[1].value(t)
    }

    /// Copy of this curve with a different cutoff.
    pub fn with_eta(&self, center: f64, halfwidth: f64) -> Result<Curve> {
        make_curve(&self.spec.clone().with_eta(center, halfwidth))
    }

    /// Uniform grid of `n + 1` points over supp η.
    pub fn support_grid(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.eta.support();
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    /// Checks `dγ_j` against finite differences at `count` random points of supp η.
    pub fn check_derivatives(&self, count: usize, seed: u64, tol: f64) -> Result<()> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (a, b) = self.eta.support();
        for _ in 0..count {
            let t = rng.random_range(a..b);
            for j in 0..2 {
                let exact = self.dgamma[j].value(t);
                let numeric = richardson(|s| self.gamma[j].value(s), t);
                if (exact - numeric).abs() > tol * exact.abs().max(1.0) {
                    return Err(Error::DerivativeMismatch {
                        component: j + 1,
                        t,
                        exact,
                        numeric,
                    });
                }
            }
        }
        Ok(())
    }

    fn check_velocity(&self) -> Result<()> {
        let grid = self.support_grid(2048);
        let speeds: Vec<f64> = grid
            .iter()
            .map(|&t| {
                let (u, v) = self.dgamma(t);
                u.hypot(v)
            })
            .collect();
        let max = speeds.iter().cloned().fold(0.0, f64::max);
        for (t, s) in grid.iter().zip(&speeds) {
            if *s <= 1e-12 * max.max(1.0) {
                return Err(Error::VanishingVelocity { t: *t });
            }
        }
        Ok(())
    }
}

/// `(γ1, γ2, γ1', γ2', J, J')` at `t ∈ I₀`.
pub fn eval_curve(c: &Curve, t: f64) -> Result<CurvePoint> {
    let (a, b) = c.domain;
    if !(t > a && t < b) {
        return Err(Error::OutOfDomain { t, a, b });
    }
    let (g1, g2) = c.gamma(t);
    let (dg1, dg2) = c.dgamma(t);
    Ok(CurvePoint {
        g1,
        g2,
        dg1,
        dg2,
        j: dg1 - dg2,
        dj: c.dj(t),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroOrder {
    #[serde(rename = "1")]
    First,
    #[serde(rename = ">=2")]
    Higher,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JZero {
    pub t: f64,
    pub order: ZeroOrder,
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Zeros of `J` on supp η with their order.
///
/// Sign changes of `J` are bisected; sign changes of `J'` locate even-order
/// touching zeros, accepted when `|J|` is below `1e-9 (1 + max|J|)`.
pub fn find_j_zeros(c: &Curve) -> Vec<JZero> {
    let (a, b) = c.eta.support();
    let n = (((b - a) * 1000.0).ceil() as usize).max(4096);
    let grid = c.support_grid(n);
    let jv: Vec<f64> = grid.iter().map(|&t| c.j(t)).collect();
    let djv: Vec<f64> = grid.iter().map(|&t| c.dj(t)).collect();
    let max_j = jv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * (1.0 + max_j);
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..grid.len() {
        if jv[i] == 0.0 {
            roots.push(grid[i]);
        }
        if i + 1 < grid.len() {
            if jv[i] != 0.0 && jv[i + 1] != 0.0 && (jv[i] < 0.0) != (jv[i + 1] < 0.0) {
                roots.push(bisect(|t| c.j(t), grid[i], grid[i + 1]));
            }
            let (d0, d1) = (djv[i], djv[i + 1]);
            let crit = if d0 == 0.0 {
                Some(grid[i])
            } else if d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0) {
                Some(bisect(|t| c.dj(t), grid[i], grid[i + 1]))
            } else {
                None
            };
            if let Some(t) = crit {
                if c.j(t).abs() <= tol {
                    roots.push(t);
                }
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut merged: Vec<f64> = Vec::new();
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r - *last).abs() < 1e-8 => {
                // keep whichever has the smaller |J|
                if c.j(r).abs() < c.j(*last).abs() {
                    *last = r;
                }
            }
            _ => merged.push(r),
        }
    }
    merged
        .into_iter()
        .filter(|t| *t >= a && *t <= b)
        .map(|t| JZero {
            t,
            order: if c.dj(t).abs() > 1e-8 {
                ZeroOrder::First
            } else {
                ZeroOrder::Higher
            },
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H1,
    H2,
    H3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A parameter value `t`.
    Point { t: f64 },
    /// `c1 γ1' + c2 γ2' ≈ 0` on supp η.
    Dependence { c1: f64, c2: f64 },
    /// `b1 e^{aγ1} + b2 e^{aγ2}` nearly constant; complex numbers as `[re, im]`.
    Combination {
        a: [f64; 2],
        b1: [f64; 2],
        b2: [f64; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdict {
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub margin: f64,
}

/// Numeric checks of the three hypotheses. `grid_density` is in points per
/// unit length of supp η (at least 100 is used), `search_budget` is the total
/// number of objective evaluations for the H2 search.
pub fn check_hypotheses(
    c: &Curve,
    grid_density: f64,
    search_budget: usize,
    seed: u64,
) -> Vec<HypothesisVerdict> {
    let (a, b) = c.eta.support();
    let n = (((b - a) * grid_density.max(100.0)).ceil() as usize).max(100);
    let grid = c.support_grid(n);
    vec![
        check_h1(c, &grid),
        check_h2(c, search_budget, seed),
        check_h3(c, &grid),
    ]
}

fn check_h1(c: &Curve, grid: &[f64]) -> HypothesisVerdict {
    let (mut uu, mut vv, mut uv) = (0.0, 0.0, 0.0);
    for &t in grid {
        let (u, v) = c.dgamma(t);
        uu += u * u;
        vv += v * v;
        uv += u * v;
    }
    let det = if uu == 0.0 || vv == 0.0 {
        0.0
    } else {
        1.0 - (uv * uv) / (uu * vv)
    };
    let det = det.max(0.0);
    let (verdict, witness) = if det < 1e-10 {
        let norm = uv.hypot(uu).max(f64::MIN_POSITIVE);
        (
            Verdict::Fail,
            Some(Witness::Dependence {
                c1: uv / norm,
                c2: -uu / norm,
            }),
        )
    } else if det < 1e-8 {
        (Verdict::Inconclusive, None)
    } else {
        (Verdict::Pass, None)
    };
    HypothesisVerdict {
        hypothesis: Hypothesis::H1,
        verdict,
        witness,
        margin: det,
    }
}

fn check_h3(c: &Curve, grid: &[f64]) -> HypothesisVerdict {
    let mut margin = f64::INFINITY;
    let mut arg = grid[0];
    for &t in grid {
        let m = c.j(t).abs() + c.dj(t).abs();
        if m < margin {
            margin = m;
            arg = t;
        }
    }
    // one refinement pass around the grid minimiser
    let h = grid[1] - grid[0];
    for i in 0..=64 {
        let t = arg - h + 2.0 * h * i as f64 / 64.0;
        if t >= grid[0] && t <= grid[grid.len() - 1] {
            margin = margin.min(c.j(t).abs() + c.dj(t).abs());
        }
    }
    let degenerate = find_j_zeros(c)
        .into_iter()
        .find(|z| z.order == ZeroOrder::Higher);
    let (verdict, witness) = match degenerate {
        Some(z) => (Verdict::Fail, Some(Witness::Point { t: z.t })),
        None if margin < 1e-8 => (Verdict::Inconclusive, Some(Witness::Point { t: arg })),
        None => (Verdict::Pass, None),
    };
    HypothesisVerdict {
        hypothesis: Hypothesis::H3,
        verdict,
        witness,
        margin,
    }
}

/// Smallest |a| searched for H2; as `a → 0` every pair is nearly dependent.
pub const H2_A_FLOOR: f64 = 0.05;
/// Search box for `Re a`, `Im a`.
pub const H2_BOX: f64 = 10.0;

struct H2Objective {
    g1: Vec<f64>,
    g2: Vec<f64>,
    shift: f64,
}

impl H2Objective {
    fn new(c: &Curve) -> Self {
        let grid = c.support_grid(256);
        let g1: Vec<f64> = grid.iter().map(|&t| c.gamma[0].value(t)).collect();
        let g2: Vec<f64> = grid.iter().map(|&t| c.gamma[1].value(t)).collect();
        let shift = (g1.iter().sum::<f64>() + g2.iter().sum::<f64>()) / (2 * g1.len()) as f64;
        H2Objective { g1, g2, shift }
    }

    /// Smallest eigenvalue of the covariance of `(e^{aγ1}, e^{aγ2})` after
    /// scaling each coordinate to unit second moment, with the matching
    /// combination `(b1, b2)`, `|b| = 1`.
    fn eval(&self, ar: f64, ai: f64) -> (f64, [Complex64; 2]) {
        let a = Complex64::new(ar, ai);
        let n = self.g1.len() as f64;
        let u: Vec<Complex64> = self
            .g1
            .iter()
            .map(|g| (a * (g - self.shift)).exp())
            .collect();
        let v: Vec<Complex64> = self
            .g2
            .iter()
            .map(|g| (a * (g - self.shift)).exp())
            .collect();
        let su = (u.iter().map(|z| z.norm_sqr()).sum::<f64>() / n).sqrt();
        let sv = (v.iter().map(|z| z.norm_sqr()).sum::<f64>() / n).sqrt();
        let fallback = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        if !(su.is_finite() && sv.is_finite()) || su == 0.0 || sv == 0.0 {
            return (f64::INFINITY, fallback);
        }
        let mu = u.iter().sum::<Complex64>() / (n * su);
        let mv = v.iter().sum::<Complex64>() / (n * sv);
        let (mut c11, mut c22) = (0.0, 0.0);
        let mut c12 = Complex64::new(0.0, 0.0);
        for (x, y) in u.iter().zip(&v) {
            let (du, dv) = (x / su - mu, y / sv - mv);
            c11 += du.norm_sqr();
            c22 += dv.norm_sqr();
            c12 += du.conj() * dv;
        }
        let (c11, c22, c12) = (c11 / n, c22 / n, c12 / n);
        let half_tr = 0.5 * (c11 + c22);
        let disc = (0.25 * (c11 - c22).powi(2) + c12.norm_sqr()).sqrt();
        let lmax = half_tr + disc;
        let det = c11 * c22 - c12.norm_sqr();
        let lmin = if lmax > 0.0 {
            (det / lmax).max(0.0)
        } else {
            0.0
        };
        let e1 = [c12, Complex64::new(lmin - c11, 0.0)];
        let e2 = [Complex64::new(lmin - c22, 0.0), c12.conj()];
        let n1 = e1[0].norm_sqr() + e1[1].norm_sqr();
        let n2 = e2[0].norm_sqr() + e2[1].norm_sqr();
        let e = if n1 >= n2 { e1 } else { e2 };
        // back to the unscaled coordinates
        let b = [e[0] / su, e[1] / sv];
        let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
        if nb == 0.0 || !nb.is_finite() {
            return (lmin, fallback);
        }
        (lmin, [b[0] / nb, b[1] / nb])
    }
}

fn project_a(p: [f64; 2]) -> [f64; 2] {
    let mut q = [p[0].clamp(-H2_BOX, H2_BOX), p[1].clamp(-H2_BOX, H2_BOX)];
    let r = q[0].hypot(q[1]);
    if r < H2_A_FLOOR {
        if r == 0.0 {
            q = [H2_A_FLOOR, 0.0];
        } else {
            q = [q[0] * H2_A_FLOOR / r, q[1] * H2_A_FLOOR / r];
        }
    }
    q
}

/// Nelder–Mead in two variables with projection onto the feasible set.
fn nelder_mead(
    f: &dyn Fn([f64; 2]) -> f64,
    x0: [f64; 2],
    step: f64,
    max_evals: usize,
) -> ([f64; 2], f64, usize) {
    let mut pts = [
        project_a(x0),
        project_a([x0[0] + step, x0[1]]),
        project_a([x0[0], x0[1] + step]),
    ];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];
    let mut evals = 3;
    while evals < max_evals {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| {
            vals[i]
                .partial_cmp(&vals[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];
        let spread = (pts[2][0] - pts[0][0]).abs() + (pts[2][1] - pts[0][1]).abs();
        if spread < 1e-10 {
            break;
        }
        let cen = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let along = |s: f64| {
            project_a([
                cen[0] + s * (pts[2][0] - cen[0]),
                cen[1] + s * (pts[2][1] - cen[1]),
            ])
        };
        let xr = along(-1.0);
        let fr = f(xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            evals += 1;
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let xc = along(if fr < vals[2] { -0.5 } else { 0.5 });
            let fc = f(xc);
            evals += 1;
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    pts[i] = project_a([
                        pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                        pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
                    ]);
                    vals[i] = f(pts[i]);
                    evals += 1;
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&i, &j| {
            vals[i]
                .partial_cmp(&vals[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    (pts[best], vals[best], evals)
}

fn check_h2(c: &Curve, budget: usize, seed: u64) -> HypothesisVerdict {
    let obj = H2Objective::new(c);
    let f = |p: [f64; 2]| obj.eval(p[0], p[1]).0;
    let budget = budget.max(200);
    let starts = (budget / 100).clamp(4, 64);
    let per = budget / starts;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, [H2_A_FLOOR, 0.0]);
    for _ in 0..starts {
        let x0 = [
            rng.random_range(-H2_BOX..H2_BOX),
            rng.random_range(-H2_BOX..H2_BOX),
        ];
        let step = rng.random_range(0.1..2.0);
        let (x, fx, _) = nelder_mead(&f, x0, step, per);
        if fx < best.0 {
            best = (fx, x);
        }
    }
    let (margin, a) = best;
    let (_, b) = obj.eval(a[0], a[1]);
    let witness = Some(Witness::Combination {
        a,
        b1: [b[0].re, b[0].im],
        b2: [b[1].re, b[1].im],
    });
    let (verdict, witness) = if margin < 1e-12 {
        (Verdict::Fail, witness)
    } else if margin < 1e-8 {
        (Verdict::Inconclusive, witness)
    } else {
        (Verdict::Pass, None)
    };
    HypothesisVerdict {
        hypothesis: Hypothesis::H2,
        verdict,
        witness,
        margin,
    }
}

/// `q` with `1/q = 1/p1 + 1/p2`; infinite exponents contribute 0.
pub fn q_exponent(p1: f64, p2: f64) -> Result<f64> {
    for p in [p1, p2] {
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(p));
        }
    }
    let s = 1.0 / p1 + 1.0 / p2;
    Ok(if s == 0.0 { f64::INFINITY } else { 1.0 / s })
}
