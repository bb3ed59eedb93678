//! From a box-count plot to a D2 estimate.
//!
//! Both axes use base-2 logarithms, so `x = log2 r_j = -j` is integral. The
//! slope of `log2 S` against `log2 r` over the chosen levels is D2.

use std::fmt;
use std::str::FromStr;

use crate::boxcount::{Algorithm, BoxCountPlot};
use crate::dataset::NormalizedDataset;
use crate::error::{Error, Result};
use crate::grid::RadiusSchedule;

/// Smallest window the automatic range selection will consider.
pub const DEFAULT_MIN_WINDOW: u32 = 4;

/// Two windows whose r² differ by less than this are treated as tied.
pub const R_SQUARED_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogPoint {
    pub level: u32,
    /// `log2 r_j = -j`
    pub x: f64,
    /// `log2 S_j`
    pub y: f64,
}

/// The `(log2 r, log2 S)` points, one per level, ascending in `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogPlot {
    points: Vec<LogLogPoint>,
}

impl LogLogPlot {
    /// Builds a plot from `S_j` values for `j = 1, 2, ...`.
    ///
    /// Panics on `S_j = 0`, which no non-empty dataset produces.
    pub fn from_sums(sums: &[u64]) -> Self {
        let points = sums
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                assert!(s >= 1, "sum of squares must be positive");
                let level = i as u32 + 1;
                LogLogPoint {
                    level,
                    x: -(level as f64),
                    y: (s as f64).log2(),
                }
            })
            .collect();
        Self { points }
    }

    pub fn from_points(points: Vec<LogLogPoint>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[LogLogPoint] {
        &self.points
    }

    pub fn levels(&self) -> u32 {
        self.points.len() as u32
    }

    pub fn xy(&self, range: FitRange) -> Vec<(f64, f64)> {
        self.points[range.j_min as usize - 1..range.j_max as usize]
            .iter()
            .map(|p| (p.x, p.y))
            .collect()
    }

    pub fn fit(&self, range: FitRange) -> Result<LineFit> {
        range.check(self.levels())?;
        ols_slope(&self.xy(range))
    }
}

pub fn loglog(plot: &BoxCountPlot) -> LogLogPlot {
    LogLogPlot::from_sums(&plot.sums())
}

/// Inclusive level bounds of a regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FitRange {
    pub j_min: u32,
    pub j_max: u32,
}

impl FitRange {
    pub fn new(j_min: u32, j_max: u32, levels: u32) -> Result<Self> {
        let range = Self { j_min, j_max };
        range.check(levels)?;
        Ok(range)
    }

    pub fn full(levels: u32) -> Self {
        Self {
            j_min: 1,
            j_max: levels,
        }
    }

    pub fn len(&self) -> u32 {
        self.j_max + 1 - self.j_min
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, levels: u32) -> Result<()> {
        if self.j_min < 1 || self.j_min >= self.j_max || self.j_max > levels {
            return Err(Error::InvalidFitRange {
                j_min: self.j_min,
                j_max: self.j_max,
                levels,
            });
        }
        Ok(())
    }
}

impl fmt::Display for FitRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.j_min, self.j_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub r_squared: f64,
}

/// Ordinary least squares slope of `y` on `x`, with its r².
///
/// Constant `y` gives slope 0 and r² = 1.
pub fn ols_slope(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::TooFewPoints(1));
    }
    let slope = sxy / sxx;
    if syy == 0.0 {
        return Ok(LineFit {
            slope,
            r_squared: 1.0,
        });
    }
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(LineFit {
        slope,
        r_squared: (1.0 - sse / syy).clamp(0.0, 1.0),
    })
}

/// The contiguous window of at least `min_window` levels with the highest r².
///
/// Windows within [`R_SQUARED_TIE`] of the best are tied; ties go to the
/// longer window, then to the smaller `j_min`.
pub fn select_linear_range(plot: &LogLogPlot, min_window: u32) -> FitRange {
    let levels = plot.levels();
    assert!(
        min_window >= 2 && min_window <= levels,
        "min_window must lie in 2..={levels}"
    );
    let mut scored = Vec::new();
    for j_min in 1..=levels + 1 - min_window {
        for j_max in j_min + min_window - 1..=levels {
            let range = FitRange { j_min, j_max };
            let fit = ols_slope(&plot.xy(range)).expect("window has distinct x values");
            scored.push((range, fit.r_squared));
        }
    }
    let best = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    scored
        .into_iter()
        .filter(|&(_, r2)| best - r2 <= R_SQUARED_TIE)
        .map(|(range, _)| range)
        .min_by_key(|r| (std::cmp::Reverse(r.len()), r.j_min))
        .expect("at least one window")
}

/// How the regression range is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMode {
    /// All levels.
    #[default]
    Full,
    /// Highest-r² window of at least `min_window` levels. The window is
    /// capped at the number of levels.
    Auto { min_window: u32 },
    /// Fixed inclusive level bounds.
    Levels { j_min: u32, j_max: u32 },
}

impl FitMode {
    pub fn auto() -> Self {
        FitMode::Auto {
            min_window: DEFAULT_MIN_WINDOW,
        }
    }

    pub fn resolve(&self, plot: &LogLogPlot) -> Result<FitRange> {
        let levels = plot.levels();
        match *self {
            FitMode::Full => FitRange::new(1, levels, levels),
            FitMode::Auto { min_window } => {
                if levels < 2 {
                    return Err(Error::TooFewPoints(levels as usize));
                }
                Ok(select_linear_range(plot, min_window.clamp(2, levels)))
            }
            FitMode::Levels { j_min, j_max } => FitRange::new(j_min, j_max, levels),
        }
    }
}

impl FromStr for FitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(FitMode::auto()),
            "full" => Ok(FitMode::Full),
            _ => {
                let (lo, hi) = s
                    .split_once("..")
                    .ok_or_else(|| format!("expected auto, full or J_MIN..J_MAX, got {s:?}"))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("invalid level {v:?} in fit range"))
                };
                let (j_min, j_max) = (parse(lo)?, parse(hi)?);
                if j_min < 1 || j_min >= j_max {
                    return Err(format!("fit range {s} must satisfy 1 <= J_MIN < J_MAX"));
                }
                Ok(FitMode::Levels { j_min, j_max })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct D2Estimate {
    pub d2: f64,
    pub r_squared: f64,
    pub range: FitRange,
    pub algorithm: Algorithm,
    pub plot: LogLogPlot,
}

pub fn estimate_from_plot(plot: &BoxCountPlot, mode: FitMode) -> Result<D2Estimate> {
    let loglog = loglog(plot);
    let range = mode.resolve(&loglog)?;
    let fit = loglog.fit(range)?;
    Ok(D2Estimate {
        d2: fit.slope,
        r_squared: fit.r_squared,
        range,
        algorithm: plot.algorithm,
        plot: loglog,
    })
}

/// Runs the chosen kernel and fits the resulting plot.
pub fn estimate_d2(
    data: &NormalizedDataset,
    schedule: &RadiusSchedule,
    algorithm: Algorithm,
    mode: FitMode,
) -> Result<D2Estimate> {
    estimate_from_plot(&algorithm.run(data, schedule)?, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plot_from_y(ys: &[f64]) -> LogLogPlot {
        LogLogPlot::from_points(
            ys.iter()
                .enumerate()
                .map(|(i, &y)| LogLogPoint {
                    level: i as u32 + 1,
                    x: -(i as f64 + 1.0),
                    y,
                })
                .collect(),
        )
    }

    /// Exhaustive window search written independently of `select_linear_range`:
    /// collect every window with its r², keep the maximal ones, sort.
    fn exhaustive_best_window(plot: &LogLogPlot, min_window: u32) -> FitRange {
        let n = plot.levels();
        let mut all = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                if b - a + 1 < min_window {
                    continue;
                }
                let pts: Vec<(f64, f64)> = plot.points()[(a - 1) as usize..b as usize]
                    .iter()
                    .map(|p| (p.x, p.y))
                    .collect();
                all.push((a, b, r_squared_textbook(&pts)));
            }
        }
        let best = all.iter().map(|w| w.2).fold(f64::MIN, f64::max);
        let mut tied: Vec<_> = all
            .into_iter()
            .filter(|w| w.2 >= best - R_SQUARED_TIE)
            .collect();
        tied.sort_by(|p, q| (q.1 - q.0).cmp(&(p.1 - p.0)).then(p.0.cmp(&q.0)));
        FitRange {
            j_min: tied[0].0,
            j_max: tied[0].1,
        }
    }

    /// r² as the squared Pearson correlation; 1 for constant y.
    fn r_squared_textbook(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / n, sy / n);
        let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let vx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let vy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
        if vy == 0.0 {
            1.0
        } else {
            (cov * cov / (vx * vy)).min(1.0)
        }
    }

    #[test]
    fn loglog_examples() {
        let plot = LogLogPlot::from_sums(&[16, 4, 1]);
        let xy: Vec<_> = plot.points().iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(xy, vec![(-1.0, 4.0), (-2.0, 2.0), (-3.0, 0.0)]);
        assert!(LogLogPlot::from_sums(&[1; 5])
            .points()
            .iter()
            .all(|p| p.y == 0.0));
        let ys: Vec<_> = LogLogPlot::from_sums(&[4, 4, 4])
            .points()
            .iter()
            .map(|p| p.y)
            .collect();
        assert_eq!(ys, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn loglog_rejects_zero_sum() {
        LogLogPlot::from_sums(&[4, 0]);
    }

    #[test]
    fn ols_examples() {
        let fit = ols_slope(&[(-3.0, -6.0), (-2.0, -4.0), (-1.0, -2.0)]).unwrap();
        assert_eq!((fit.slope, fit.r_squared), (2.0, 1.0));
        let fit = ols_slope(&[(-3.0, 5.0), (-2.0, 5.0), (-1.0, 5.0)]).unwrap();
        assert_eq!((fit.slope, fit.r_squared), (0.0, 1.0));
        let fit = ols_slope(&[(0.0, 0.0), (1.0, 3.0)]).unwrap();
        assert_eq!((fit.slope, fit.r_squared), (3.0, 1.0));
        assert!(matches!(
            ols_slope(&[(0.0, 1.0)]),
            Err(Error::TooFewPoints(1))
        ));
        assert!(ols_slope(&[]).is_err());
    }

    #[test]
    fn ols_r_squared_for_noisy_points() {
        // y = x + e with residuals (+1, -2, +1) around the fitted line
        let fit = ols_slope(&[(0.0, 1.0), (1.0, -1.0), (2.0, 3.0)]).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-15);
        // SST = 8, SSE = 6 (residuals 1, -2, 1)
        assert!((fit.r_squared - 0.25).abs() < 1e-15);
    }

    #[test]
    fn perfectly_linear_plot_selects_full_range() {
        let plot = plot_from_y(
            &(1..=10)
                .map(|j| 20.0 - 1.585 * j as f64)
                .collect::<Vec<_>>(),
        );
        assert_eq!(select_linear_range(&plot, 2), FitRange::full(10));
        assert_eq!(select_linear_range(&plot, 4), FitRange::full(10));
    }

    #[test]
    fn constant_plot_selects_full_range() {
        let plot = plot_from_y(&[7.0; 10]);
        assert_eq!(select_linear_range(&plot, 2), FitRange::full(10));
    }

    #[test]
    fn kinked_plot_selects_linear_part() {
        // j = 1 off the line, j = 2..7 on y = 1.5 x + 16, saturated at j >= 7
        let mut ys = vec![13.0];
        ys.extend((2..=7).map(|j| 16.0 - 1.5 * j as f64));
        ys.extend([5.5, 5.5, 5.5]);
        let plot = plot_from_y(&ys);
        let expected = exhaustive_best_window(&plot, 3);
        assert_eq!(expected, FitRange { j_min: 2, j_max: 7 });
        assert_eq!(select_linear_range(&plot, 3), expected);
    }

    #[test]
    fn fit_range_validation_and_parsing() {
        assert!(FitRange::new(1, 1, 5).is_err());
        assert!(FitRange::new(0, 3, 5).is_err());
        assert!(FitRange::new(2, 6, 5).is_err());
        assert_eq!(FitRange::new(2, 5, 5).unwrap().to_string(), "2..5");
        assert_eq!("auto".parse::<FitMode>().unwrap(), FitMode::auto());
        assert_eq!("full".parse::<FitMode>().unwrap(), FitMode::Full);
        assert_eq!(
            "2..9".parse::<FitMode>().unwrap(),
            FitMode::Levels { j_min: 2, j_max: 9 }
        );
        assert!("9..2".parse::<FitMode>().is_err());
        assert!("x..2".parse::<FitMode>().is_err());
        assert!("best".parse::<FitMode>().is_err());
    }

    #[test]
    fn auto_window_is_capped_by_levels() {
        let plot = plot_from_y(&[3.0, 1.0, 0.0]);
        assert_eq!(FitMode::auto().resolve(&plot).unwrap(), FitRange::full(3));
        let plot = plot_from_y(&[3.0, 1.0]);
        assert_eq!(FitMode::auto().resolve(&plot).unwrap(), FitRange::full(2));
    }

    proptest! {
        #[test]
        fn ols_recovers_exact_lines(
            m in -10.0f64..10.0,
            b in -50.0f64..50.0,
            n in 2usize..30,
        ) {
            prop_assume!(m.abs() > 1e-3);
            let pts: Vec<(f64, f64)> = (1..=n).map(|j| {
                let x = -(j as f64);
                (x, m * x + b)
            }).collect();
            let fit = ols_slope(&pts).unwrap();
            prop_assert!(((fit.slope - m) / m).abs() <= 1e-12, "slope {} vs {}", fit.slope, m);
        }

        #[test]
        fn selection_matches_exhaustive_enumeration(
            ys in proptest::collection::vec(0.0f64..40.0, 2..=12),
            min_window in 2u32..=12,
        ) {
            let plot = plot_from_y(&ys);
            let min_window = min_window.min(plot.levels());
            prop_assert_eq!(select_linear_range(&plot, min_window), exhaustive_best_window(&plot, min_window));
        }
    }
}
