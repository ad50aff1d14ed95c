use bimax_core::czd::{cz_decompose, exceptional_set, group_by_scale, CZOutput};
use bimax_core::gridfn::FunctionSpec;
use bimax_core::Error;
use proptest::prelude::*;

const RES: f64 = 1.0 / 256.0;

fn grid_l1(f: &FunctionSpec) -> f64 {
    let FunctionSpec::Grid {
        spacing,
        samples,
        samples_imag,
        ..
    } = f
    else {
        panic!("grid expected");
    };
    samples
        .iter()
        .enumerate()
        .map(|(i, re)| re.hypot(samples_imag.as_ref().map_or(0.0, |v| v[i])))
        .sum::<f64>()
        * spacing
}

/// L¹ of `f` from its values at the centres of cells of width `h`.
fn cell_l1(f: &FunctionSpec, h: f64) -> f64 {
    let (a, b) = f.support();
    let (j0, j1) = ((a / h).floor() as i64, (b / h).ceil() as i64);
    (j0..j1)
        .map(|j| f.evaluate((j as f64 + 0.5) * h).norm())
        .sum::<f64>()
        * h
}

#[test]
fn concentrated_indicator_gives_one_atom() {
    let f = FunctionSpec::indicator(0.0, 0.25, 4.0);
    let cz = cz_decompose(&f, 1.0, RES).unwrap();
    assert_eq!(cz.atoms.len(), 1);
    let atom = &cz.atoms[0];
    assert_eq!((atom.interval.start(), atom.interval.end()), (0.0, 0.5));
    for x in [0.01, 0.2, 0.3, 0.49] {
        assert_eq!(cz.good.evaluate(x).re, 2.0, "g({x})");
    }
    assert!(atom.integral().norm() < 1e-15);
    // |4 − 2| on [0, 1/4) and |0 − 2| on [1/4, 1/2)
    assert!((atom.l1() - 1.0).abs() < 1e-12, "{}", atom.l1());
    assert!(cz.audit.holds());
}

#[test]
fn below_the_level_nothing_is_selected() {
    let f = FunctionSpec::gaussian(0.3, 0.5, 0.8);
    let cz = cz_decompose(&f, 1.0, RES).unwrap();
    assert!(cz.atoms.is_empty());
    let (a, b) = f.support();
    let mut x = a + RES / 2.0;
    while x < b {
        let cell = (x / RES).floor() * RES + RES / 2.0;
        assert_eq!(cz.good.evaluate(cell), f.evaluate(cell));
        x += 0.1;
    }
    assert!(group_by_scale(&cz).by_scale.is_empty());
    let e = exceptional_set(&[cz], 4.0);
    assert!(e.intervals.is_empty() && e.measure == 0.0);
}

#[test]
fn nonpositive_level_is_rejected() {
    let f = FunctionSpec::indicator(0.0, 1.0, 1.0);
    assert!(matches!(
        cz_decompose(&f, 0.0, RES),
        Err(Error::LevelNonpositive(_))
    ));
    assert!(matches!(
        cz_decompose(&f, -1.0, RES),
        Err(Error::LevelNonpositive(_))
    ));
}

#[test]
fn single_atom_scale_key() {
    // average 4 on [0, 1/8), 2 on [0, 1/4): stops at length 2^{-3}
    let f = FunctionSpec::indicator(0.0, 1.0 / 16.0, 8.0);
    let cz = cz_decompose(&f, 3.0, RES).unwrap();
    let g = group_by_scale(&cz);
    assert_eq!(g.by_scale.keys().copied().collect::<Vec<_>>(), vec![3]);
}

#[test]
fn dilated_single_atom() {
    let f = FunctionSpec::indicator(0.0, 0.25, 4.0);
    let cz = cz_decompose(&f, 1.0, RES).unwrap();
    let e = exceptional_set(&[cz], 4.0);
    assert_eq!(e.intervals, vec![(-0.75, 1.25)]);
    assert_eq!(e.measure, 2.0);
}

fn arb_grid() -> impl Strategy<Value = FunctionSpec> {
    (
        proptest::collection::vec(-1.0f64..1.0, 64..400),
        proptest::collection::vec((0usize..400, 1.0f64..60.0), 0..6),
        -3.0f64..3.0,
    )
        .prop_map(|(mut v, spikes, origin)| {
            let n = v.len();
            for (i, h) in spikes {
                v[i % n] += h;
            }
            FunctionSpec::grid(origin, 1.0 / 64.0, v)
        })
}

fn atom_measure(cz: &CZOutput) -> f64 {
    cz.atoms.iter().map(|a| a.interval.len()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_hold(f in arb_grid(), level in 0.05f64..4.0) {
        let cz = cz_decompose(&f, level, RES).unwrap();
        prop_assert!(cz.audit.holds(), "{:?}", cz.audit);
        let l1 = cell_l1(&f, cz.cell);
        prop_assert!(atom_measure(&cz) <= l1 / level * (1.0 + 1e-12));
        for w in cz.atoms.windows(2) {
            prop_assert!(w[0].interval.end() <= w[1].interval.start());
        }
    }

    #[test]
    fn grouping_keeps_the_total_mass(f in arb_grid(), level in 0.05f64..2.0) {
        let cz = cz_decompose(&f, level, RES).unwrap();
        let by_atom: f64 = cz.atoms.iter().map(|a| a.l1()).sum();
        let g = group_by_scale(&cz);
        let by_scale: f64 = g.by_scale.values().map(grid_l1).sum();
        prop_assert!((by_atom - by_scale).abs() <= 1e-12 * (1.0 + by_atom));
        for (i, h) in &g.by_scale {
            let count = cz.atoms.iter().filter(|a| a.interval.scale == *i).count();
            prop_assert!(count > 0);
            prop_assert!(grid_l1(h) <= by_atom * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn good_part_carries_no_further_mass(f in arb_grid(), level in 0.05f64..2.0) {
        let cz = cz_decompose(&f, level, RES).unwrap();
        let again = cz_decompose(&cz.good, level, RES).unwrap();
        // atoms may be re-selected where g is constant, but they vanish
        prop_assert!(again.atoms.iter().all(|a| a.l1() == 0.0));
    }

    #[test]
    fn higher_level_never_adds_measure(f in arb_grid(), a in 0.05f64..4.0, b in 0.05f64..4.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let m_lo = atom_measure(&cz_decompose(&f, lo, RES).unwrap());
        let m_hi = atom_measure(&cz_decompose(&f, hi, RES).unwrap());
        prop_assert!(m_hi <= m_lo, "{} at {} vs {} at {}", m_hi, hi, m_lo, lo);
    }

    #[test]
    fn exceptional_measure_is_controlled(f1 in arb_grid(), f2 in arb_grid(), level in 0.05f64..4.0) {
        let a = cz_decompose(&f1, level, RES).unwrap();
        let b = cz_decompose(&f2, level, RES).unwrap();
        let bound = 4.0 * (cell_l1(&f1, a.cell) + cell_l1(&f2, b.cell)) / level;
        let e = exceptional_set(&[a, b], 4.0);
        prop_assert!(e.measure <= bound * (1.0 + 1e-12));
        for w in e.intervals.windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
    }
}
