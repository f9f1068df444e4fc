//! Natural cubic spline interpolation through a small set of knots.
//!
//! Used to evaluate the cell-means model between observed dose levels: the
//! interpolant passes through (0, 0) and every fitted per-dose effect.

/// Interpolating natural cubic spline (second derivative zero at both ends).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalCubicSpline {
    /// `xs` strictly increasing, at least two knots.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert_eq!(xs.len(), ys.len());
        assert!(xs.len() >= 2);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the tridiagonal system for interior knots.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i - 1] = (h0 + h1) / 3.0;
                upper[i - 1] = h1 / 6.0;
                rhs[i - 1] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
            }
            // Lower diagonal equals the previous row's upper diagonal.
            for i in 1..k {
                let lower = (xs[i + 1] - xs[i]) / 6.0;
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        NaturalCubicSpline { xs, ys, m }
    }

    /// Evaluates inside the knot range; a knot hit returns the knot value
    /// exactly.
    pub fn eval(&self, x: f64) -> f64 {
        if let Some(k) = self.xs.iter().position(|&v| v == x) {
            return self.ys[k];
        }
        let n = self.xs.len();
        // Segment index: largest j with xs[j] < x (clamped to valid segments).
        let j = match self.xs.partition_point(|&v| v < x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[j + 1] - self.xs[j];
        let a = (self.xs[j + 1] - x) / h;
        let b = (x - self.xs[j]) / h;
        a * self.ys[j]
            + b * self.ys[j + 1]
            + ((a * a * a - a) * self.m[j] + (b * b * b - b) * self.m[j + 1]) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn passes_through_knots_exactly() {
        let s = NaturalCubicSpline::new(
            vec![0.0, 12.5, 25.0, 50.0, 100.0],
            vec![0.0, 0.07, 0.10, 0.125, 0.144],
        );
        for (&x, &y) in [0.0, 12.5, 25.0, 50.0, 100.0]
            .iter()
            .zip([0.0, 0.07, 0.10, 0.125, 0.144].iter())
        {
            assert_eq!(s.eval(x), y);
        }
    }

    #[test]
    fn interpolates_a_line_exactly() {
        // A linear function has zero second derivative everywhere, so the
        // natural spline reproduces it.
        let xs = vec![0.0, 10.0, 30.0, 60.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 + 0.2 * x).collect();
        let s = NaturalCubicSpline::new(xs, ys);
        for i in 0..=60 {
            let x = i as f64;
            assert_abs_diff_eq!(s.eval(x), 0.5 + 0.2 * x, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_knots_degenerate_to_linear() {
        let s = NaturalCubicSpline::new(vec![0.0, 100.0], vec![0.0, 1.0]);
        assert_abs_diff_eq!(s.eval(25.0), 0.25, epsilon = 1e-12);
    }
}
