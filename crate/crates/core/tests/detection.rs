use crosscov::detection::{detect_outliers, noise_band, planted_rank_one_spectrum, DEFAULT_MARGIN};
use crosscov::edges::{EdgeMode, Regime};
use crosscov::ensemble::nonzero_singular_values;
use crosscov::spectral::ProblemShape;

fn shape(t: usize, nx: usize, ny: usize) -> ProblemShape {
    ProblemShape::standard(t, nx, ny).unwrap()
}

#[test]
fn noise_only_runs_rarely_flag() {
    let s = shape(400, 800, 800);
    let clean = (0..100u64)
        .filter(|&seed| {
            let values = nonzero_singular_values(&s, seed, 0, 256).unwrap().values;
            let report = detect_outliers(&values, &s, DEFAULT_MARGIN, EdgeMode::Numeric, false).unwrap();
            report.outliers_above.is_empty()
        })
        .count();
    assert!(clean >= 95, "only {clean} of 100 noise runs were clean");
}

#[test]
fn planted_signal_is_flagged() {
    let s = shape(400, 800, 800);
    let sample = planted_rank_one_spectrum(&s, 5.0, 11).unwrap();
    let report = detect_outliers(&sample.values, &s, DEFAULT_MARGIN, EdgeMode::Numeric, false).unwrap();
    let top = sample.values.len() - 1;
    assert_eq!(report.outliers_above.len(), 1, "{:?}", report.outliers_above);
    assert_eq!(report.outliers_above[0].index, top);
    assert!(report.outliers_above[0].ratio > 1.0 + DEFAULT_MARGIN);
}

#[test]
fn constructed_values() {
    let s = shape(1000, 2000, 2000);
    let band = noise_band(&s, EdgeMode::Numeric).unwrap().band;
    let report = detect_outliers(&[5.0], &s, DEFAULT_MARGIN, EdgeMode::Numeric, false).unwrap();
    assert_eq!(report.outliers_above.len(), 1);
    let values = [1.2 * band.upper, 0.5 * band.upper, 0.9 * band.lower];
    let report = detect_outliers(&values, &s, DEFAULT_MARGIN, EdgeMode::Numeric, false).unwrap();
    assert_eq!(report.outliers_above.len(), 1);
    assert_eq!(report.values_below_band, 1);
    let report = detect_outliers(&[], &s, DEFAULT_MARGIN, EdgeMode::Numeric, false).unwrap();
    assert!(report.outliers_above.is_empty());
    assert_eq!(report.values_below_band, 0);
}

#[test]
fn outliers_are_ranked() {
    let s = shape(1000, 2000, 2000);
    let report = detect_outliers(&[4.5, 9.0, 1.0, 6.0], &s, 0.0, EdgeMode::Numeric, false).unwrap();
    let order: Vec<usize> = report.outliers_above.iter().map(|o| o.index).collect();
    assert_eq!(order, vec![1, 3, 0]);
}

#[test]
fn auto_limit_uses_closed_forms_where_advised() {
    let nb = noise_band(&shape(200, 20_000, 20_000), EdgeMode::AutoLimit).unwrap();
    assert_eq!(nb.regime, Regime::TinyEqual);
    let nb = noise_band(&shape(200, 20_000, 20_000), EdgeMode::Numeric).unwrap();
    assert_eq!(nb.regime, Regime::Numeric);
    let nb = noise_band(&shape(1000, 1100, 1500), EdgeMode::AutoLimit).unwrap();
    assert_eq!(nb.regime, Regime::Numeric);
}

#[test]
fn bad_inputs() {
    let s = shape(100, 100, 100);
    assert!(detect_outliers(&[f64::NAN], &s, 0.0, EdgeMode::Numeric, false).is_err());
    assert!(detect_outliers(&[1.0], &s, -0.1, EdgeMode::Numeric, false).is_err());
}
