//! Calderón–Zygmund decomposition on a dyadic grid anchored at 0.
//!
//! Functions are represented by their values on cells `[j h, (j+1) h)` with
//! `h` a power of two; grids returned here place sample `j` at the cell
//! centre.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::FunctionSpec;
use crate::lp_filters::{project_samples, FilterBank, Which};

/// `[index · 2^{-scale}, (index + 1) · 2^{-scale})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub scale: i32,
    pub index: i64,
}

impl DyadicInterval {
    pub fn len(&self) -> f64 {
        2f64.powi(-self.scale)
    }

    pub fn start(&self) -> f64 {
        self.index as f64 * self.len()
    }

    pub fn end(&self) -> f64 {
        (self.index + 1) as f64 * self.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub interval: DyadicInterval,
    /// Cell-centred samples of `h_β`, supported on the interval.
    pub h: FunctionSpec,
}

impl Atom {
    fn values(&self) -> Vec<Complex64> {
        match &self.h {
            FunctionSpec::Grid {
                samples,
                samples_imag,
                ..
            } => samples
                .iter()
                .enumerate()
                .map(|(i, re)| Complex64::new(*re, samples_imag.as_ref().map_or(0.0, |v| v[i])))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn cell(&self) -> f64 {
        match &self.h {
            FunctionSpec::Grid { spacing, .. } => *spacing,
            _ => self.interval.len(),
        }
    }

    pub fn l1(&self) -> f64 {
        self.values().iter().map(|v| v.norm()).sum::<f64>() * self.cell()
    }

    pub fn integral(&self) -> Complex64 {
        self.values().iter().sum::<Complex64>() * self.cell()
    }
}

/// Measured invariants of a decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CzAudit {
    /// `max |f − g − Σ h_β| / max |f|` over cells.
    pub reassembly_error: f64,
    /// `‖g‖_∞ / level`, at most 2.
    pub good_sup_over_level: f64,
    /// `max_β |∫ h_β| / ‖h_β‖₁`.
    pub max_atom_mean: f64,
    /// `max_β ‖h_β‖₁ / (level |I_β|)`, at most 4.
    pub max_atom_l1_ratio: f64,
    pub total_atom_length: f64,
    /// `‖f‖₁ / level`, an upper bound for `total_atom_length`.
    pub l1_over_level: f64,
}

impl CzAudit {
    pub fn holds(&self) -> bool {
        self.reassembly_error <= 1e-10
            && self.good_sup_over_level <= 2.0 * (1.0 + 1e-12)
            && self.max_atom_mean <= 1e-8
            && self.max_atom_l1_ratio <= 4.0 * (1.0 + 1e-12)
            && self.total_atom_length <= self.l1_over_level * (1.0 + 1e-12)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CZOutput {
    pub good: FunctionSpec,
    pub atoms: Vec<Atom>,
    pub level: f64,
    /// Width of the finest dyadic cells.
    pub cell: f64,
    pub audit: CzAudit,
}

fn cell_values(f: &FunctionSpec, h: f64) -> (i64, Vec<Complex64>) {
    let (a, b) = f.support();
    let j0 = (a / h).floor() as i64;
    let j1 = ((b / h).ceil() as i64).max(j0 + 1);
    let vals = (j0..j1).map(|j| f.evaluate((j as f64 + 0.5) * h)).collect();
    (j0, vals)
}

/// Selects maximal dyadic intervals on which the average of `|f|` exceeds `level`.
pub fn cz_decompose(f: &FunctionSpec, level: f64, resolution: f64) -> Result<CZOutput> {
    if !(level > 0.0) || !level.is_finite() {
        return Err(Error::LevelNonpositive(level));
    }
    f.validate()?;
    let fine = resolution.log2().floor() as i32;
    let h = 2f64.powi(fine);
    let (j0, vals) = cell_values(f, h);
    let n = vals.len() as i64;
    let mut prefix = vec![0.0; vals.len() + 1];
    for (i, v) in vals.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v.norm();
    }
    let l1 = prefix[vals.len()] * h;
    // mean of |f| over global cells [s, s + len)
    let avg = |s: i64, len: i64| {
        let lo = (s - j0).clamp(0, n) as usize;
        let hi = (s + len - j0).clamp(0, n) as usize;
        (prefix[hi] - prefix[lo]) / len as f64
    };
    let mut top = fine;
    while 2f64.powi(top) < l1 / level {
        top += 1;
    }
    let cells_per_top = 1i64 << (top - fine);
    let t0 = j0.div_euclid(cells_per_top);
    let t1 = (j0 + n - 1).div_euclid(cells_per_top);
    let mut selected: Vec<(i64, i64)> = Vec::new();
    let mut stack: Vec<(i64, i64)> = (t0..=t1)
        .rev()
        .map(|t| (t * cells_per_top, cells_per_top))
        .collect();
    while let Some((s, len)) = stack.pop() {
        if len < 2 {
            continue;
        }
        let half = len / 2;
        for child in [(s + half, half), (s, half)] {
            if avg(child.0, child.1) > level {
                selected.push(child);
            } else if avg(child.0, child.1) > 0.0 {
                stack.push(child);
            }
        }
    }
    selected.sort();
    let lo = selected.first().map_or(j0, |a| a.0.min(j0));
    let hi = selected.last().map_or(j0 + n, |a| (a.0 + a.1).max(j0 + n));
    let value = |j: i64| {
        if j >= j0 && j < j0 + n {
            vals[(j - j0) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let mut good: Vec<Complex64> = (lo..hi).map(value).collect();
    let mut atoms = Vec::with_capacity(selected.len());
    for &(s, len) in &selected {
        let cells: Vec<Complex64> = (s..s + len).map(value).collect();
        // constant cells give an exactly zero atom, not roundoff noise
        let flat = cells.iter().all(|v| *v == cells[0]);
        let mean = if flat {
            cells[0]
        } else {
            cells.iter().sum::<Complex64>() / len as f64
        };
        let hv: Vec<Complex64> = cells.iter().map(|v| v - mean).collect();
        for j in s..s + len {
            good[(j - lo) as usize] = mean;
        }
        let scale = -(fine + (len as f64).log2().round() as i32);
        let width = 2f64.powi(-scale);
        let index = (s as f64 * h / width).round() as i64;
        atoms.push(Atom {
            interval: DyadicInterval { scale, index },
            h: FunctionSpec::grid_complex((s as f64 + 0.5) * h, h, &hv),
        });
    }
    let good_spec = FunctionSpec::grid_complex((lo as f64 + 0.5) * h, h, &good);

    // audit
    let mut recon = good.clone();
    for (atom, &(s, _)) in atoms.iter().zip(&selected) {
        for (i, v) in atom.values().iter().enumerate() {
            recon[(s - lo) as usize + i] += v;
        }
    }
    let fmax = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut err: f64 = 0.0;
    for j in lo..hi {
        err = err.max((recon[(j - lo) as usize] - value(j)).norm());
    }
    let audit = CzAudit {
        reassembly_error: if fmax > 0.0 { err / fmax } else { err },
        good_sup_over_level: good.iter().map(|v| v.norm()).fold(0.0, f64::max) / level,
        max_atom_mean: atoms
            .iter()
            .map(|a| {
                let l = a.l1();
                if l > 0.0 {
                    a.integral().norm() / l
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max),
        max_atom_l1_ratio: atoms
            .iter()
            .map(|a| a.l1() / (level * a.interval.len()))
            .fold(0.0, f64::max),
        total_atom_length: atoms.iter().map(|a| a.interval.len()).sum(),
        l1_over_level: l1 / level,
    };
    Ok(CZOutput {
        good: good_spec,
        atoms,
        level,
        cell: h,
        audit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrouping {
    /// `i ↦ h^i = Σ_{|I_β| = 2^{-i}} h_β` as a cell-centred grid.
    pub by_scale: BTreeMap<i32, FunctionSpec>,
}

pub fn group_by_scale(cz: &CZOutput) -> ScaleGrouping {
    let mut groups: BTreeMap<i32, Vec<&Atom>> = BTreeMap::new();
    for a in &cz.atoms {
        groups.entry(a.interval.scale).or_default().push(a);
    }
    let h = cz.cell;
    let by_scale = groups
        .into_iter()
        .map(|(i, atoms)| {
            let lo = atoms
                .iter()
                .map(|a| (a.interval.start() / h).round() as i64)
                .min()
                .unwrap();
            let hi = atoms
                .iter()
                .map(|a| (a.interval.end() / h).round() as i64)
                .max()
                .unwrap();
            let mut vals = vec![Complex64::new(0.0, 0.0); (hi - lo) as usize];
            for a in atoms {
                let s = (a.interval.start() / h).round() as i64 - lo;
                for (k, v) in a.values().into_iter().enumerate() {
                    vals[s as usize + k] += v;
                }
            }
            (
                i,
                FunctionSpec::grid_complex((lo as f64 + 0.5) * h, h, &vals),
            )
        })
        .collect();
    ScaleGrouping { by_scale }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub intervals: Vec<(f64, f64)>,
    pub measure: f64,
}

/// Union of the concentric `dilation`-fold dilates of all atom intervals.
pub fn exceptional_set(czs: &[CZOutput], dilation: f64) -> ExceptionalSet {
    let mut ivs: Vec<(f64, f64)> = czs
        .iter()
        .flat_map(|cz| cz.atoms.iter())
        .map(|a| {
            let c = 0.5 * (a.interval.start() + a.interval.end());
            let r = 0.5 * dilation * a.interval.len();
            (c - r, c + r)
        })
        .collect();
    ivs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in ivs {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let measure = merged.iter().map(|(a, b)| b - a).sum();
    ExceptionalSet {
        intervals: merged,
        measure,
    }
}

/// Remaps cell data (`values[i]` on `[c0 + i w, c0 + (i+1) w)`) onto the lattice
/// `origin + j step`. Coarsening uses linear (cloud-in-cell) deposition, which
/// keeps the zeroth and first moments; refining averages over overlaps, which
/// keeps the zeroth moment.
fn remap(c0: f64, w: f64, values: &[Complex64], origin: f64, step: f64, out: &mut [Complex64]) {
    if step >= w {
        for (i, v) in values.iter().enumerate() {
            let s = (c0 + (i as f64 + 0.5) * w - origin) / step;
            let j = s.floor() as usize;
            let frac = s - j as f64;
            let m = v * (w / step);
            out[j] += m * (1.0 - frac);
            out[j + 1] += m * frac;
        }
    } else {
        for (i, v) in values.iter().enumerate() {
            let (a, b) = (c0 + i as f64 * w, c0 + (i + 1) as f64 * w);
            let ja = ((a - origin) / step + 0.5).floor() as usize;
            let jb = ((b - origin) / step + 0.5).ceil() as usize;
            for (j, slot) in out.iter_mut().enumerate().take(jb + 1).skip(ja) {
                let (u, v2) = (
                    origin + (j as f64 - 0.5) * step,
                    origin + (j as f64 + 0.5) * step,
                );
                let overlap = (b.min(v2) - a.max(u)).max(0.0);
                if overlap > 0.0 {
                    *slot += v * (overlap / step);
                }
            }
        }
    }
}

/// `‖Q_l Σ atoms‖₁` (or `P_l`, `Q̃_l`), computed cluster by cluster.
pub fn projected_l1(bank: &FilterBank, which: Which, l: i32, atoms: &[&Atom]) -> Result<f64> {
    if atoms.is_empty() {
        return Ok(0.0);
    }
    let step = FilterBank::required_spacing(l) / 4.0;
    let reach = 2.0 * bank.kernel_extent(which, l);
    let mut sorted: Vec<&Atom> = atoms.to_vec();
    sorted.sort_by(|a, b| a.interval.start().partial_cmp(&b.interval.start()).unwrap());
    let mut clusters: Vec<Vec<&Atom>> = Vec::new();
    let mut right = f64::NEG_INFINITY;
    for a in sorted {
        if a.interval.start() - right > reach || clusters.is_empty() {
            clusters.push(Vec::new());
        }
        right = right.max(a.interval.end());
        clusters.last_mut().unwrap().push(a);
    }
    let mut total = 0.0;
    for cl in clusters {
        let a = cl
            .iter()
            .map(|x| x.interval.start())
            .fold(f64::INFINITY, f64::min);
        let b = cl
            .iter()
            .map(|x| x.interval.end())
            .fold(f64::NEG_INFINITY, f64::max);
        let origin = (a / step).floor() * step - step;
        let n = ((b - origin) / step).ceil() as usize + 3;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for atom in &cl {
            remap(
                atom.interval.start(),
                atom.cell(),
                &atom.values(),
                origin,
                step,
                &mut buf,
            );
        }
        let (_, out) = project_samples(bank, which, l, origin, step, &buf)?;
        total += out.iter().map(|v| v.norm()).sum::<f64>() * step;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_input_has_no_atoms() {
        let f = FunctionSpec::indicator(0.0, 1.0, 0.5);
        let cz = cz_decompose(&f, 1.0, 1.0 / 256.0).unwrap();
        assert!(cz.atoms.is_empty());
        for x in [0.1, 0.5, 0.9] {
            assert_eq!(cz.good.evaluate(x).re, 0.5);
        }
    }

    #[test]
    fn single_block() {
        let f = FunctionSpec::indicator(0.0, 0.25, 4.0);
        let cz = cz_decompose(&f, 1.0, 1.0 / 1024.0).unwrap();
        assert_eq!(cz.atoms.len(), 1);
        let a = &cz.atoms[0];
        assert_eq!(a.interval, DyadicInterval { scale: 1, index: 0 });
        assert!((cz.good.evaluate(0.3).re - 2.0).abs() < 1e-12);
        assert!(a.integral().norm() < 1e-12);
        assert!((a.l1() - 1.0).abs() < 1e-12);
        assert!(cz.audit.holds(), "{:?}", cz.audit);
    }

    #[test]
    fn nonpositive_level() {
        let f = FunctionSpec::indicator(0.0, 1.0, 1.0);
        assert!(matches!(
            cz_decompose(&f, 0.0, 1e-3),
            Err(Error::LevelNonpositive(_))
        ));
    }

    #[test]
    fn exceptional_examples() {
        assert_eq!(exceptional_set(&[], 4.0).measure, 0.0);
        let f = FunctionSpec::indicator(0.0, 0.25, 4.0);
        let cz = cz_decompose(&f, 1.0, 1.0 / 1024.0).unwrap();
        let e = exceptional_set(&[cz], 4.0);
        assert_eq!(e.intervals, vec![(-0.75, 1.25)]);
        assert_eq!(e.measure, 2.0);
    }

    #[test]
    fn grouping_single_atom() {
        let f = FunctionSpec::indicator(0.0, 1.0 / 16.0, 4.0);
        let cz = cz_decompose(&f, 1.0, 1.0 / 1024.0).unwrap();
        let g = group_by_scale(&cz);
        assert_eq!(
            g.by_scale.keys().cloned().collect::<Vec<_>>(),
            vec![cz.atoms[0].interval.scale]
        );
    }

    #[test]
    fn remap_preserves_moments() {
        let vals: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64 - 7.5).sin(), 0.0))
            .collect();
        let w = 1.0 / 64.0;
        for step in [1.0 / 8.0, 1.0 / 256.0] {
            let mut out = vec![Complex64::new(0.0, 0.0); 1200];
            remap(0.0, w, &vals, -step, step, &mut out);
            let m0: f64 = vals.iter().map(|v| v.re).sum::<f64>() * w;
            let r0: f64 = out.iter().map(|v| v.re).sum::<f64>() * step;
            assert!((m0 - r0).abs() < 1e-14);
            if step > w {
                let m1: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.re * (i as f64 + 0.5) * w)
                    .sum::<f64>()
                    * w;
                let r1: f64 = out
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v.re * (-step + j as f64 * step))
                    .sum::<f64>()
                    * step;
                assert!((m1 - r1).abs() < 1e-14);
            }
        }
    }
}
