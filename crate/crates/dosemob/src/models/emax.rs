//! Emax model fitting by profiled nonlinear least squares.
//!
//! The model is `y = beta0 + theta1 * d / (theta2 + d) + eps`. For a fixed
//! `theta2` the remaining parameters enter linearly, so the fit profiles them
//! out: the one-dimensional profile RSS over `theta2` is minimized by a
//! log-spaced grid scan followed by golden-section refinement inside the
//! bracketing grid cells. This is derivative-free and fully deterministic;
//! identical inputs produce bit-identical parameter estimates.

use crate::error::{Error, Result};
use crate::models::levelstats::LevelStats;
use crate::models::{DoseResponseSpec, Family, FittedDoseModel};
use nalgebra::DMatrix;

/// Lower bound for theta2 as a fraction of the maximum design dose.
pub const THETA2_LOWER_FRAC: f64 = 1e-3;
/// Upper bound for theta2 as a multiple of the maximum design dose.
pub const THETA2_UPPER_FRAC: f64 = 1.5;

const PROFILE_GRID_POINTS: usize = 50;
const GOLDEN_REL_WIDTH: f64 = 1e-8;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Profile solution at a fixed `theta2` from per-dose-level statistics:
/// `(rss, beta0, theta1)`. `None` when the profiled linear system is
/// rank deficient (fewer than two distinct doses).
pub(crate) fn profile_at(stats: &LevelStats, theta2: f64) -> Option<(f64, f64, f64)> {
    let n = stats.n() as f64;
    let mut s_g = 0.0;
    let mut s_gg = 0.0;
    let mut s_gy = 0.0;
    for level in 0..stats.n_levels() {
        let c = stats.count(level) as f64;
        if c == 0.0 {
            continue;
        }
        let d = stats.dose(level);
        let g = d / (theta2 + d);
        s_g += c * g;
        s_gg += c * g * g;
        s_gy += g * stats.sum_y(level);
    }
    let s_y = stats.total_sum_y();
    let s_yy = stats.total_sum_y2();
    let var_g = s_gg - s_g * s_g / n;
    if !(var_g > 1e-12 * s_gg.max(f64::MIN_POSITIVE)) {
        return None;
    }
    let cov_gy = s_gy - s_g * s_y / n;
    let theta1 = cov_gy / var_g;
    let beta0 = (s_y - theta1 * s_g) / n;
    let rss = (s_yy - s_y * s_y / n - theta1 * cov_gy).max(0.0);
    Some((rss, beta0, theta1))
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > GOLDEN_REL_WIDTH * b {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Minimizes the profile RSS over theta2 in `[1e-3, 1.5] * d_max`.
pub(crate) fn profile_theta2(stats: &LevelStats, d_max: f64) -> Result<f64> {
    if stats.distinct_doses() < 2 {
        return Err(Error::Fit(format!(
            "Emax fit needs at least 2 distinct dose levels, found {}",
            stats.distinct_doses()
        )));
    }
    let lo = THETA2_LOWER_FRAC * d_max;
    let hi = THETA2_UPPER_FRAC * d_max;
    let ratio = hi / lo;
    let grid: Vec<f64> = (0..PROFILE_GRID_POINTS)
        .map(|i| lo * ratio.powf(i as f64 / (PROFILE_GRID_POINTS - 1) as f64))
        .collect();
    let objective = |t2: f64| match profile_at(stats, t2) {
        Some((rss, _, _)) => rss,
        None => f64::INFINITY,
    };
    let mut best = 0;
    let mut best_rss = f64::INFINITY;
    for (i, &t2) in grid.iter().enumerate() {
        let rss = objective(t2);
        if rss < best_rss {
            best_rss = rss;
            best = i;
        }
    }
    if !best_rss.is_finite() {
        return Err(Error::Fit(
            "profiled linear system is rank deficient on this subset".into(),
        ));
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(PROFILE_GRID_POINTS - 1)];
    Ok(golden_section_min(objective, a, b))
}

/// Score rows `residual * (1, d/(theta2+d), -theta1*d/(theta2+d)^2) / sigma^2`
/// at arbitrary parameter values. Exposed so gradients can be checked against
/// finite differences of the per-observation Gaussian objective.
pub fn emax_score_rows(
    y: &[f64],
    doses: &[f64],
    beta0: f64,
    theta1: f64,
    theta2: f64,
    sigma: f64,
) -> DMatrix<f64> {
    let n = y.len();
    let mut scores = DMatrix::zeros(n, 3);
    if sigma == 0.0 {
        return scores;
    }
    let inv_var = 1.0 / (sigma * sigma);
    for i in 0..n {
        let d = doses[i];
        let g = d / (theta2 + d);
        let res = y[i] - beta0 - theta1 * g;
        scores[(i, 0)] = res * inv_var;
        scores[(i, 1)] = res * g * inv_var;
        scores[(i, 2)] = -res * theta1 * d / ((theta2 + d) * (theta2 + d)) * inv_var;
    }
    scores
}

pub(crate) fn fit_emax(y: &[f64], doses: &[f64], spec: &DoseResponseSpec) -> Result<FittedDoseModel> {
    debug_assert_eq!(spec.family(), Family::Emax);
    let n = y.len();
    let p = spec.n_params();
    if n < p + 1 {
        return Err(Error::Fit(format!(
            "Emax fit needs at least {} observations, got {n}",
            p + 1
        )));
    }
    let stats = LevelStats::from_observations(spec.dose_levels(), doses, y)?;
    let theta2 = profile_theta2(&stats, spec.max_dose())?;

    // Closed-form linear solve for (beta0, theta1) at the profiled theta2,
    // on the raw observations.
    let nf = n as f64;
    let g: Vec<f64> = doses.iter().map(|&d| d / (theta2 + d)).collect();
    let s_g: f64 = g.iter().sum();
    let s_y: f64 = y.iter().sum();
    let mut var_g = 0.0;
    let mut cov_gy = 0.0;
    let g_bar = s_g / nf;
    let y_bar = s_y / nf;
    for i in 0..n {
        var_g += (g[i] - g_bar) * (g[i] - g_bar);
        cov_gy += (g[i] - g_bar) * (y[i] - y_bar);
    }
    if !(var_g > 0.0) {
        return Err(Error::Fit(
            "profiled linear system is rank deficient on this subset".into(),
        ));
    }
    let theta1 = cov_gy / var_g;
    let beta0 = y_bar - theta1 * g_bar;

    let mut rss = 0.0;
    for i in 0..n {
        let res = y[i] - beta0 - theta1 * g[i];
        rss += res * res;
    }
    let sigma = (rss / (n - p) as f64).sqrt();
    let scores = emax_score_rows(y, doses, beta0, theta1, theta2, sigma);
    FittedDoseModel::from_fit(spec.clone(), beta0, vec![theta1, theta2], sigma, rss, n, scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn emax_data(beta0: f64, theta1: f64, theta2: f64, per_level: usize) -> (Vec<f64>, Vec<f64>) {
        let levels = [0.0, 12.5, 25.0, 50.0, 100.0];
        let mut y = Vec::new();
        let mut d = Vec::new();
        for &lvl in &levels {
            for _ in 0..per_level {
                d.push(lvl);
                y.push(beta0 + theta1 * lvl / (theta2 + lvl));
            }
        }
        (y, d)
    }

    fn spec() -> DoseResponseSpec {
        DoseResponseSpec::emax(vec![0.0, 12.5, 25.0, 50.0, 100.0]).unwrap()
    }

    #[test]
    fn recovers_noiseless_parameters() {
        let (y, d) = emax_data(1.2, 0.17, 18.0, 10);
        let fit = fit_emax(&y, &d, &spec()).unwrap();
        assert_relative_eq!(fit.beta0(), 1.2, max_relative = 1e-4);
        assert_relative_eq!(fit.theta()[0], 0.17, max_relative = 1e-4);
        assert_relative_eq!(fit.theta()[1], 18.0, max_relative = 1e-4);
        let sum_y2: f64 = y.iter().map(|v| v * v).sum();
        assert!(fit.rss() < 1e-12 * sum_y2);
    }

    #[test]
    fn fit_is_deterministic() {
        let (mut y, d) = emax_data(1.2, 0.17, 18.0, 10);
        // Perturb deterministically so the profile optimum is not on a knot.
        for (i, v) in y.iter_mut().enumerate() {
            *v += 0.05 * ((i as f64 * 12.9898).sin());
        }
        let a = fit_emax(&y, &d, &spec()).unwrap();
        let b = fit_emax(&y, &d, &spec()).unwrap();
        assert_eq!(a.beta0().to_bits(), b.beta0().to_bits());
        assert_eq!(a.theta()[0].to_bits(), b.theta()[0].to_bits());
        assert_eq!(a.theta()[1].to_bits(), b.theta()[1].to_bits());
        assert_eq!(a.rss().to_bits(), b.rss().to_bits());
    }

    #[test]
    fn profile_property_holds_at_optimum() {
        let (mut y, d) = emax_data(1.2, 0.17, 18.0, 10);
        for (i, v) in y.iter_mut().enumerate() {
            *v += 0.05 * ((i as f64 * 78.233).cos());
        }
        let fit = fit_emax(&y, &d, &spec()).unwrap();
        let theta2 = fit.theta()[1];
        // Independent closed-form solve at the returned theta2.
        let n = y.len() as f64;
        let g: Vec<f64> = d.iter().map(|&v| v / (theta2 + v)).collect();
        let g_bar = g.iter().sum::<f64>() / n;
        let y_bar = y.iter().sum::<f64>() / n;
        let var_g: f64 = g.iter().map(|v| (v - g_bar) * (v - g_bar)).sum();
        let cov: f64 = g
            .iter()
            .zip(&y)
            .map(|(gv, yv)| (gv - g_bar) * (yv - y_bar))
            .sum();
        let theta1 = cov / var_g;
        let beta0 = y_bar - theta1 * g_bar;
        assert_abs_diff_eq!(fit.theta()[0], theta1, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.beta0(), beta0, epsilon = 1e-10);
    }

    #[test]
    fn score_columns_sum_to_zero_at_optimum() {
        let (mut y, d) = emax_data(1.2, 0.17, 18.0, 10);
        for (i, v) in y.iter_mut().enumerate() {
            *v += 0.1 * ((i as f64 * 0.731).sin());
        }
        let fit = fit_emax(&y, &d, &spec()).unwrap();
        let scores = fit.score_matrix().unwrap();
        let n = y.len();
        for j in 0..3 {
            let col = scores.column(j);
            let mean = col.sum() / n as f64;
            let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
            assert!(
                (col.sum() / sd).abs() < 1e-6 * n as f64,
                "column {j} sum {} too large",
                col.sum()
            );
        }
    }

    #[test]
    fn scores_match_finite_differences_of_gaussian_objective() {
        let (mut y, d) = emax_data(1.2, 0.17, 18.0, 8);
        for (i, v) in y.iter_mut().enumerate() {
            *v += 0.1 * ((i as f64 * 2.19).sin());
        }
        let fit = fit_emax(&y, &d, &spec()).unwrap();
        let sigma = fit.sigma();

        // Per-observation Gaussian negative log-likelihood at fixed sigma.
        let nll = |i: usize, b0: f64, t1: f64, t2: f64| -> f64 {
            let mu = b0 + t1 * d[i] / (t2 + d[i]);
            let res = y[i] - mu;
            0.5 * (2.0 * std::f64::consts::PI * sigma * sigma).ln()
                + res * res / (2.0 * sigma * sigma)
        };

        // Check at the optimum and at 10 perturbed parameter points.
        let mut points = vec![(fit.beta0(), fit.theta()[0], fit.theta()[1])];
        for k in 1..=10 {
            let f = k as f64;
            points.push((
                fit.beta0() + 0.03 * (f * 0.7).sin(),
                fit.theta()[0] + 0.02 * (f * 1.3).cos(),
                fit.theta()[1] * (1.0 + 0.05 * (f * 0.41).sin()),
            ));
        }
        for (b0, t1, t2) in points {
            let scores = emax_score_rows(&y, &d, b0, t1, t2, sigma);
            let h = [1e-6, 1e-6, 1e-5 * t2.abs().max(1.0)];
            for i in (0..y.len()).step_by(7) {
                for p in 0..3 {
                    let mut lo = [b0, t1, t2];
                    let mut hi = [b0, t1, t2];
                    lo[p] -= h[p];
                    hi[p] += h[p];
                    let fd = (nll(i, hi[0], hi[1], hi[2]) - nll(i, lo[0], lo[1], lo[2]))
                        / (2.0 * h[p]);
                    // Scores use the opposite sign of the objective gradient.
                    assert_relative_eq!(scores[(i, p)], -fd, max_relative = 1e-5, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn fewer_than_two_distinct_doses_is_an_error() {
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let d = vec![50.0; 5];
        assert!(matches!(fit_emax(&y, &d, &spec()), Err(Error::Fit(_))));
    }
}
