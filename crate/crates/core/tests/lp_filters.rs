use bimax_core::gridfn::{random_band_limited, FunctionSpec};
use bimax_core::lp_filters::{
    apply_projection, make_filter_bank, reconstruction_error, FilterBank, Which,
};
use bimax_core::Error;
use proptest::prelude::*;

/// `(∫|f|²)^{1/2}` from the lattice samples of a grid output.
fn l2_on_lattice(f: &FunctionSpec, h: f64) -> f64 {
    let (a, b) = f.support();
    let n = ((b - a) / h).round() as usize;
    (0..=n)
        .map(|i| f.evaluate(a + h * i as f64).norm_sqr())
        .sum::<f64>()
        .sqrt()
        * h.sqrt()
}

#[test]
fn low_pass_keeps_constants_in_the_interior() {
    let bank = FilterBank::default();
    let k = 2;
    let h = FilterBank::required_spacing(k);
    let margin = bank.kernel_extent(Which::P, k);
    let len = 2.0 * margin + 2.0;
    let f = FunctionSpec::indicator(0.0, len, 3.0);
    let p = apply_projection(&bank, Which::P, k, &f, h).unwrap();
    let mut x = margin;
    while x <= len - margin {
        assert!(
            (p.evaluate(x).re - 3.0).abs() <= 3e-8,
            "{x}: {}",
            p.evaluate(x).re
        );
        x += 0.125;
    }
}

#[test]
fn band_below_the_annulus_is_removed() {
    let bank = FilterBank::default();
    let k = 4;
    let h = FilterBank::required_spacing(k);
    let f = random_band_limited(3, [2f64.powi(k - 4), 2f64.powi(k - 3)], [-2.0, 2.0], 1.0).unwrap();
    let q = apply_projection(&bank, Which::Q, k, &f, h).unwrap();
    assert!(l2_on_lattice(&q, h) <= 1e-8);
}

#[test]
fn dilation_shifts_the_scale_by_one() {
    // Q_k [f(2·)] = (Q_{k−1} f)(2·)
    let bank = FilterBank::default();
    let k = 3;
    let h = FilterBank::required_spacing(k - 1);
    let f = random_band_limited(8, [2.0, 24.0], [0.0, 2.0], 1.0).unwrap();
    let lhs = apply_projection(&bank, Which::Q, k, &f.dilate(2.0), h / 2.0).unwrap();
    let rhs = apply_projection(&bank, Which::Q, k - 1, &f, h).unwrap();
    let (a, b) = lhs.support();
    let (mut num, mut den) = (0.0, 0.0);
    let n = ((b - a) / (h / 2.0)).round() as usize;
    for i in 0..=n {
        let x = a + i as f64 * h / 2.0;
        let (u, v) = (lhs.evaluate(x), rhs.evaluate(2.0 * x));
        num += (u - v).norm_sqr();
        den += v.norm_sqr();
    }
    assert!((num / den).sqrt() <= 1e-8, "{}", (num / den).sqrt());
}

#[test]
fn reconstruction_error_examples() {
    let bank = FilterBank::default();
    let k = 3;
    let f = random_band_limited(4, [1.0, 2f64.powi(k)], [-1.0, 1.0], 1.0).unwrap();
    let big: u32 = 10;
    let e = reconstruction_error(
        &bank,
        &f,
        k,
        big,
        FilterBank::required_spacing(k + big as i32 + 1),
    )
    .unwrap();
    assert!(e <= 1e-8, "{e}");

    // N = 0 leaves exactly (I − P_{k+1}) f
    let k = 0;
    let g = FunctionSpec::indicator(0.0, 1.0, 1.0);
    let h = FilterBank::required_spacing(k + 1);
    let e0 = reconstruction_error(&bank, &g, k, 0, h).unwrap();
    let p = apply_projection(&bank, Which::P, k + 1, &g, h).unwrap();
    let (a, b) = p.support();
    let n = ((b - a) / h).round() as usize;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=n {
        let x = a + h * i as f64;
        num += (g.evaluate(x) - p.evaluate(x)).norm_sqr();
        den += g.evaluate(x).norm_sqr();
    }
    let oracle = (num / den).sqrt();
    assert!((e0 - oracle).abs() <= 0.02 * oracle, "{e0} vs {oracle}");
}

#[test]
fn reconstruction_error_is_nonincreasing() {
    let bank = FilterBank::default();
    for seed in 0..10 {
        let f = random_band_limited(seed, [0.5, 256.0], [0.0, 1.0], 1.0).unwrap();
        let h = FilterBank::required_spacing(10);
        let mut prev = f64::INFINITY;
        for n in 0..=8 {
            let e = reconstruction_error(&bank, &f, 0, n, h).unwrap();
            assert!(
                e <= prev * (1.0 + 1e-12) + 1e-15,
                "seed {seed} N {n}: {e} > {prev}"
            );
            prev = e;
        }
    }
}

#[test]
fn coarse_resolution_is_an_error() {
    let bank = FilterBank::default();
    let f = FunctionSpec::gaussian(0.0, 1.0, 1.0);
    assert!(matches!(
        apply_projection(&bank, Which::Q, 5, &f, 0.1),
        Err(Error::ResolutionTooCoarse { k: 5, .. })
    ));
    assert!(matches!(
        reconstruction_error(&bank, &f, 0, 6, FilterBank::required_spacing(6)),
        Err(Error::ResolutionTooCoarse { .. })
    ));
}

#[test]
fn sharper_transition_still_satisfies_the_identity() {
    let bank = make_filter_bank(0.5);
    for k in -3..=3 {
        for j in 0..200 {
            let xi = 2f64.powi(k) * (j as f64 / 20.0);
            let q = bank.multiplier(Which::Q, k, xi);
            let d = bank.multiplier(Which::P, k + 1, xi) - bank.multiplier(Which::P, k, xi);
            assert!((q - d).abs() < 1e-15);
            assert!(bank.multiplier(Which::QTilde, k, xi) >= q - 1e-15 || q == 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn low_pass_is_a_contraction(seed in any::<u64>(), k in -1i32..4, hi in 1.0f64..40.0) {
        let bank = FilterBank::default();
        let f = random_band_limited(seed, [0.0, hi], [-1.0, 1.0], 1.0).unwrap();
        let h = FilterBank::required_spacing(k).min(1.0 / (8.0 * hi));
        let p = apply_projection(&bank, Which::P, k, &f, h).unwrap();
        let (a, b) = f.support();
        let lo = (a / h).floor() as i64;
        let hi_i = (b / h).ceil() as i64;
        let in_norm = ((lo..=hi_i).map(|j| f.evaluate(j as f64 * h).norm_sqr()).sum::<f64>() * h).sqrt();
        prop_assert!(l2_on_lattice(&p, h) <= in_norm * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn band_pass_output_has_zero_mean(seed in any::<u64>(), k in -2i32..4) {
        let bank = FilterBank::default();
        let f = random_band_limited(seed, [0.0, 16.0], [0.0, 2.0], 1.0).unwrap();
        let h = FilterBank::required_spacing(k.max(5));
        let q = apply_projection(&bank, Which::Q, k, &f, h).unwrap();
        let FunctionSpec::Grid { samples, spacing, .. } = &q else { panic!("grid expected") };
        let integral: f64 = samples.iter().sum::<f64>() * spacing;
        let l1: f64 = {
            let (a, b) = f.support();
            let n = ((b - a) / h).round() as usize;
            (0..=n).map(|i| f.evaluate(a + h * i as f64).norm()).sum::<f64>() * h
        };
        prop_assert!(integral.abs() <= 1e-9 * l1, "{} vs {}", integral, l1);
    }
}
