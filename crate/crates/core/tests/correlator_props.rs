mod common;

use proptest::prelude::*;
use triphoton::correlators::*;
use triphoton::spectra::{FilterSpec, PhaseMatchConfig, TransverseWindow};

use common::{fwhm_oracle, gauss, phi_oracle, simpson, Setup};

fn fig1() -> (PhaseMatchConfig, FilterSpec) {
    (
        PhaseMatchConfig::new(-20.0, -20.0).unwrap(),
        FilterSpec::gaussian(0.4).unwrap(),
    )
}

fn max_rel_diff(a: &CorrelationSurface, b: &CorrelationSurface) -> f64 {
    let scale = a.max().max(b.max());
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max)
}

fn curve(grid: Grid1D, values: Vec<f64>) -> CorrelationSurface {
    normalize_to_peak(
        &CorrelationSurface::new(
            vec![grid],
            values,
            CorrelationKind::G3Temporal,
            StateKind::W111,
        )
        .unwrap(),
    )
    .unwrap()
}

#[test]
fn g2_matches_independent_oracle_and_peaks_inside_support() {
    let (cfg, f) = fig1();
    let quad = QuadratureSpec::new(256, 3.2).unwrap();
    let grid = Grid1D::new(-10.0, 1.25, 49).unwrap();
    let lib = g2_w_temporal(&cfg, &f, &f, &quad, &grid, Engine::Fft).unwrap();
    let setup = Setup {
        t12: -20.0,
        t32: -20.0,
        sigma: 0.4,
        panels: 256,
        span: 3.2,
    };
    let oracle = curve(grid, grid.points().iter().map(|&t| setup.g2_w(t)).collect());
    assert!(max_rel_diff(&lib, &oracle) < 1e-6);
    assert_eq!(lib.peak_location(), vec![10.0]);
}

#[test]
fn conditional_slice_matches_independent_oracle() {
    let (cfg, f) = fig1();
    let quad = QuadratureSpec::new(256, 3.2).unwrap();
    let grid = Grid1D::new(0.0, 0.5, 41).unwrap();
    let lib = g3_w_conditional(&cfg, [&f, &f, &f], &quad, &grid, Engine::Fft).unwrap();
    let setup = Setup {
        t12: -20.0,
        t32: -20.0,
        sigma: 0.4,
        panels: 256,
        span: 3.2,
    };
    let oracle = curve(
        grid,
        grid.points()
            .iter()
            .map(|&t| setup.g3_w(t, 20.0 - t))
            .collect(),
    );
    assert!(max_rel_diff(&lib, &oracle) < 1e-6);
}

/// The width ratio of the conditional slice to the second-order curve,
/// from the Simpson oracle at two filter widths, against the library.
#[test]
fn width_ratio_agrees_with_oracle_and_narrows_with_bandwidth() {
    let cfg = PhaseMatchConfig::new(-20.0, -20.0).unwrap();
    let grid = Grid1D::new(0.0, 0.25, 161).unwrap();
    let mut widths = Vec::new();
    for (sigma, span) in [(0.4, 3.2), (0.8, 4.8)] {
        let f = FilterSpec::gaussian(sigma).unwrap();
        let quad = QuadratureSpec::new(512, span).unwrap();
        let b = g3_w_conditional(&cfg, [&f, &f, &f], &quad, &grid, Engine::Fft).unwrap();
        let c = g2_w_temporal(&cfg, &f, &f, &quad, &grid, Engine::Fft).unwrap();
        let (wb, wc) = (fwhm(&b).unwrap(), fwhm(&c).unwrap());

        let setup = Setup {
            t12: -20.0,
            t32: -20.0,
            sigma,
            panels: 192,
            span,
        };
        let x = grid.points();
        let ob: Vec<f64> = x.iter().map(|&t| setup.g3_w(t, 20.0 - t)).collect();
        let oc: Vec<f64> = x.iter().map(|&t| setup.g2_w(t)).collect();
        let ratio_oracle = fwhm_oracle(&x, &ob) / fwhm_oracle(&x, &oc);
        assert!(
            ((wb / wc) / ratio_oracle - 1.0).abs() < 1e-3,
            "sigma {sigma}"
        );
        assert!(wb < wc);
        widths.push(wb);
    }
    assert!(widths[1] < widths[0]);
}

/// With flat filters the third-order surface is confined to the diagonal
/// `tau12 = tau32`, where its length is the phase-matching delay.
#[test]
fn flat_filter_support_along_diagonal_is_the_delay() {
    let cfg = PhaseMatchConfig::new(-20.0, -20.0).unwrap();
    let flat = FilterSpec::rectangular(3.2).unwrap();
    let quad = QuadratureSpec::new(1024, 3.2).unwrap();
    let grid = Grid1D::new(-10.0, 0.25, 161).unwrap();
    let surface = g3_w_temporal(
        &cfg,
        [&flat, &flat, &flat],
        &quad,
        &grid,
        &grid,
        Engine::Fft,
    )
    .unwrap();
    let diag: Vec<f64> = (0..grid.count()).map(|i| surface.at(i, i)).collect();
    let width = fwhm(&curve(grid, diag)).unwrap();
    assert!((width / 20.0 - 1.0).abs() < 0.05, "diagonal FWHM {width}");
}

#[test]
fn ghz_second_order_is_flat_on_any_grid() {
    let (cfg, f) = fig1();
    let quad = QuadratureSpec::new(1024, 3.2).unwrap();
    for grid in [
        Grid1D::new(0.0, 0.25, 161).unwrap(),
        Grid1D::new(-500.0, 7.3, 300).unwrap(),
    ] {
        let c = g2_ghz_temporal_curve(&cfg, &f, &f, &quad, &grid).unwrap();
        assert!(c.max() - c.min() < 1e-12 * c.max());
    }
}

/// The GHZ third-order amplitude is a trigonometric polynomial in `2 tau`
/// with period `pi / h`; a rectangle rule over one period integrates
/// `|sum a_k e^{2 i nu_k tau}|^2` exactly to `pi / h * sum |a_k|^2`.
#[test]
fn ghz_third_order_parseval() {
    let (cfg, f) = fig1();
    let quad = QuadratureSpec::new(1024, 3.2).unwrap();
    let h = quad.step();
    let period = std::f64::consts::PI / h;
    let m = 4096;
    let grid = Grid1D::new(0.0, period / m as f64, m).unwrap();
    let g = g3_ghz_temporal_unnormalized(&cfg, &f, &f, &quad, &grid, Engine::Fft).unwrap();
    let integral: f64 = g.values().iter().sum::<f64>() * grid.step();

    let (nu, _) = simpson(1024, 3.2);
    let mut sum_sq = 0.0;
    for (k, &x) in nu.iter().enumerate() {
        let w = if k == 0 || k == 1024 { 0.5 * h } else { h };
        let a = phi_oracle(-2.0 * x * -20.0) * (w * gauss(x, 0.4).powi(3));
        sum_sq += a.norm_sqr();
    }
    let expected = std::f64::consts::PI / h * sum_sq;
    assert!(
        (integral / expected - 1.0).abs() < 1e-6,
        "{integral} vs {expected}"
    );

    // Continuum form: pi * int |f1^2 f2 Phi|^2 dnu.
    let (nodes, weights) = simpson(4096, 3.2);
    let continuum: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * (phi_oracle(40.0 * x) * gauss(x, 0.4).powi(3)).norm_sqr())
        .sum::<f64>()
        * std::f64::consts::PI;
    assert!(
        (integral / continuum - 1.0).abs() < 1e-6,
        "{integral} vs {continuum}"
    );
}

#[test]
fn doubling_quadrature_changes_nothing_visible() {
    let (cfg, f) = fig1();
    let grid = Grid1D::new(0.0, 0.5, 81).unwrap();
    let coarse = QuadratureSpec::new(512, 3.2).unwrap();
    let fine = coarse.with_n_points(1024).unwrap();
    let pairs = [
        (
            g2_w_temporal(&cfg, &f, &f, &coarse, &grid, Engine::Fft).unwrap(),
            g2_w_temporal(&cfg, &f, &f, &fine, &grid, Engine::Fft).unwrap(),
        ),
        (
            g3_w_conditional(&cfg, [&f, &f, &f], &coarse, &grid, Engine::Fft).unwrap(),
            g3_w_conditional(&cfg, [&f, &f, &f], &fine, &grid, Engine::Fft).unwrap(),
        ),
        (
            g3_ghz_temporal(&cfg, &f, &f, &coarse, &grid, Engine::Fft).unwrap(),
            g3_ghz_temporal(&cfg, &f, &f, &fine, &grid, Engine::Fft).unwrap(),
        ),
    ];
    for (a, b) in &pairs {
        assert!(max_rel_diff(a, b) < 1e-4);
        let (wa, wb) = (fwhm(a).unwrap(), fwhm(b).unwrap());
        assert!((wa / wb - 1.0).abs() < 1e-4);
    }
}

#[test]
fn spatial_widths_follow_window() {
    let grid = Grid1D::new(-10.0, 0.05, 401).unwrap();
    let reference = 2.0 * (2.0 * 2f64.ln()).sqrt();
    let mut last = f64::INFINITY;
    for alpha_max in [0.5, 1.0, 2.0] {
        let window = TransverseWindow::new(alpha_max, 1).unwrap();
        let single = fwhm(&single_window_reference(&window, &grid, Engine::Fft).unwrap()).unwrap();
        assert!(
            (single * alpha_max / reference - 1.0).abs() < 1e-3,
            "{single}"
        );
        let g2 = fwhm(&g2_w_spatial(&window, &grid, Engine::Fft).unwrap()).unwrap();
        assert!((g2 / single - 1.0).abs() < 1e-9);
        let ghz = fwhm(&g3_ghz_spatial(&window, &grid, Engine::Fft).unwrap()).unwrap();
        assert!((ghz / single - 0.5).abs() < 0.005, "{}", ghz / single);
        assert!(ghz < last);
        last = ghz;
        let flat = g2_ghz_spatial(&window, &grid).unwrap();
        assert_eq!(flat.max(), flat.min());
    }
}

#[test]
fn two_dimensional_window_matches_one_dimensional_shape() {
    let grid = Grid1D::new(-6.0, 0.1, 121).unwrap();
    let one = TransverseWindow::new(1.0, 1).unwrap();
    let two = TransverseWindow::new(1.0, 2).unwrap();
    let a = g3_ghz_spatial(&one, &grid, Engine::Fft).unwrap();
    let b = g3_ghz_spatial(&two, &grid, Engine::Fft).unwrap();
    assert!(max_rel_diff(&a, &b) < 1e-12);
    let a = g3_w_spatial(&one, &grid, &grid, Engine::Fft).unwrap();
    let b = g3_w_spatial(&two, &grid, &grid, Engine::Fft).unwrap();
    assert!(max_rel_diff(&a, &b) < 1e-12);
}

fn delay() -> impl Strategy<Value = f64> {
    prop_oneof![-40.0..-12.0f64, 12.0..40.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Random 64-point grids that cover the support `[0, max |t|]`, where
    /// the surfaces carry their weight; outside it both engines only see
    /// round-off.
    #[test]
    fn fft_and_direct_agree_on_random_grids(
        t12 in -40.0..-12.0f64,
        t32 in -40.0..-12.0f64,
        sigma in 0.2..0.5f64,
        start in -3.0..0.0f64,
        stretch in 1.0..1.3f64,
    ) {
        let cfg = PhaseMatchConfig::new(t12, t32).unwrap();
        let f = FilterSpec::gaussian(sigma).unwrap();
        let quad = QuadratureSpec::new(128, 3.2).unwrap().fitted(&cfg, &[f]).unwrap();
        let step = stretch * (t12.abs().max(t32.abs()) - start) / 63.0;
        let grid = Grid1D::new(start, step, 64).unwrap();
        let run = |e| {
            vec![
                g2_w_temporal(&cfg, &f, &f, &quad, &grid, e).unwrap(),
                g3_w_conditional(&cfg, [&f, &f, &f], &quad, &grid, e).unwrap(),
                g3_ghz_temporal(&cfg, &f, &f, &quad, &grid, e).unwrap(),
            ]
        };
        for (a, b) in run(Engine::Fft).iter().zip(&run(Engine::Direct)) {
            prop_assert!(max_rel_diff(a, b) < 1e-6);
        }
    }

    #[test]
    fn third_order_surface_is_symmetric_for_matched_arms(
        t in delay(),
        s13 in 0.2..0.5f64,
        s2 in 0.2..0.6f64,
    ) {
        let cfg = PhaseMatchConfig::new(t, t).unwrap();
        let f13 = FilterSpec::gaussian(s13).unwrap();
        let f2 = FilterSpec::gaussian(s2).unwrap();
        let quad = QuadratureSpec::new(256, 3.2).unwrap().fitted(&cfg, &[f13, f2]).unwrap();
        let grid = Grid1D::new(-2.0 * t.abs(), t.abs() / 8.0, 33).unwrap();
        let s = g3_w_temporal(&cfg, [&f13, &f2, &f13], &quad, &grid, &grid, Engine::Fft).unwrap();
        for i in 0..grid.count() {
            for j in 0..grid.count() {
                prop_assert!((s.at(i, j) - s.at(j, i)).abs() < 1e-10);
            }
        }
        prop_assert!(s.min() >= 0.0);
    }

    #[test]
    fn normalization_is_idempotent(values in proptest::collection::vec(0.0..1e3f64, 2..50)) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let grid = Grid1D::new(0.0, 1.0, values.len()).unwrap();
        let s = CorrelationSurface::new(vec![grid], values, CorrelationKind::G2Temporal, StateKind::W111).unwrap();
        let once = normalize_to_peak(&s).unwrap();
        let twice = normalize_to_peak(&once).unwrap();
        prop_assert_eq!(once.values(), twice.values());
        prop_assert_eq!(once.max(), 1.0);
    }
}
