//! Quadratic B-spline basis on the dose range.
//!
//! The basis is clamped on the boundary knots {0, d_max} with a single
//! interior knot. Of the four degree-2 basis functions this produces, the
//! first is the only one that is nonzero at dose 0; it is dropped so that the
//! spline treatment effect is exactly 0 under placebo for any coefficients.

use crate::error::{Error, Result};
use crate::models::DoseResponseSpec;

/// All B-spline basis functions of the given degree on `knots` at `x`.
///
/// Standard Cox-de Boor recursion over the padded knot vector; the rightmost
/// nonempty interval is treated as closed so the basis is defined at the
/// upper boundary.
pub(crate) fn cox_de_boor_all(knots: &[f64], degree: usize, x: f64) -> Vec<f64> {
    let n_basis = knots.len() - degree - 1;
    let t_max = knots[knots.len() - 1 - degree];

    // Degree-0 seed: indicator of the interval containing x.
    let mut span = (0..knots.len() - 1).find(|&i| knots[i] <= x && x < knots[i + 1]);
    if span.is_none() && x == t_max {
        span = (0..knots.len() - 1).rev().find(|&i| knots[i] < knots[i + 1]);
    }
    let Some(span) = span else {
        return vec![0.0; n_basis];
    };
    let mut b = vec![0.0; knots.len() - 1];
    b[span] = 1.0;

    for k in 1..=degree {
        let mut next = vec![0.0; knots.len() - 1 - k];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut v = 0.0;
            let d1 = knots[i + k] - knots[i];
            if d1 > 0.0 {
                v += (x - knots[i]) / d1 * b[i];
            }
            let d2 = knots[i + k + 1] - knots[i + 1];
            if d2 > 0.0 {
                v += (knots[i + k + 1] - x) / d2 * b[i + 1];
            }
            *slot = v;
        }
        b = next;
    }
    b
}

/// Padded knot vector for the dose-range spline: boundary knots repeated
/// degree+1 times around the single interior knot.
pub(crate) fn padded_knots(interior: f64, d_max: f64, degree: usize) -> Vec<f64> {
    let mut knots = vec![0.0; degree + 1];
    knots.push(interior);
    knots.extend(std::iter::repeat(d_max).take(degree + 1));
    knots
}

/// The three retained basis values `(b1(d), b2(d), b3(d))` at dose `d`.
///
/// The dropped fourth function is the one supported at dose 0, which
/// guarantees `b1(0) = b2(0) = b3(0) = 0`.
pub fn bspline_basis(d: f64, spec: &DoseResponseSpec) -> Result<[f64; 3]> {
    let cfg = spec.spline_config().ok_or_else(|| {
        Error::Domain("bspline_basis requires a B-spline model specification".into())
    })?;
    let d_max = spec.max_dose();
    if !(0.0..=d_max).contains(&d) {
        return Err(Error::Domain(format!(
            "dose {d} outside the supported range [0, {d_max}]"
        )));
    }
    let knots = padded_knots(cfg.interior_knots[0], d_max, cfg.degree);
    let all = cox_de_boor_all(&knots, cfg.degree, d);
    debug_assert_eq!(all.len(), 4);
    Ok([all[1], all[2], all[3]])
}
