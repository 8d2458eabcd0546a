use num_complex::Complex64;

use crate::error::{Error, Result};

/// Natural cubic spline through complex samples; zero outside the sample span.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<Complex64>,
    m: Vec<Complex64>,
}

impl CubicSpline {
    pub fn new(samples: &[(f64, Complex64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::arg("a tabulated profile needs at least two samples"));
        }
        let x: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let y: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::arg("tabulated samples must be finite"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("tabulated abscissae must be strictly increasing"));
        }
        let n = x.len();
        let mut m = vec![Complex64::new(0.0, 0.0); n];
        if n >= 3 {
            // Thomas algorithm on the interior second derivatives.
            let inner = n - 2;
            let mut diag = vec![0.0; inner];
            let mut upper = vec![0.0; inner];
            let mut rhs = vec![Complex64::new(0.0, 0.0); inner];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) * 6.0;
            }
            for i in 1..inner {
                let lower = x[i + 1] - x[i];
                let f = lower / diag[i - 1];
                diag[i] -= f * upper[i - 1];
                let prev = rhs[i - 1];
                rhs[i] -= prev * f;
            }
            let mut sol = vec![Complex64::new(0.0, 0.0); inner];
            for i in (0..inner).rev() {
                let next = if i + 1 < inner { sol[i + 1] * upper[i] } else { Complex64::new(0.0, 0.0) };
                sol[i] = (rhs[i] - next) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        Ok(Self { x, y, m })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    fn locate(&self, t: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let i = self.x.partition_point(|&v| v <= t);
        Some(i.clamp(1, self.x.len() - 1) - 1)
    }

    pub fn value(&self, t: f64) -> Complex64 {
        let Some(i) = self.locate(t) else {
            return Complex64::new(0.0, 0.0);
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        self.y[i] * a
            + self.y[i + 1] * b
            + (self.m[i] * (a * a * a - a) + self.m[i + 1] * (b * b * b - b)) * (h * h / 6.0)
    }

    /// Exact integral of the spline over its span.
    pub fn integral(&self) -> Complex64 {
        (0..self.x.len() - 1)
            .map(|i| {
                let h = self.x[i + 1] - self.x[i];
                (self.y[i] + self.y[i + 1]) * (0.5 * h) - (self.m[i] + self.m[i + 1]) * (h * h * h / 24.0)
            })
            .sum()
    }

    /// Piecewise-linear second derivative; needs at least four samples.
    pub fn second_derivative(&self, t: f64) -> Result<Complex64> {
        if self.x.len() < 4 {
            return Err(Error::Capability(format!(
                "second derivative needs at least 4 tabulated samples, have {}",
                self.x.len()
            )));
        }
        let Some(i) = self.locate(t) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        Ok(self.m[i] * a + self.m[i + 1] * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn interpolates_knots_and_linear_data() {
        let s = CubicSpline::new(&[(0.0, c(1.0)), (1.0, c(3.0)), (2.0, c(5.0)), (4.0, c(9.0))]).unwrap();
        assert!((s.value(0.5) - c(2.0)).norm() < 1e-14);
        assert!((s.value(3.0) - c(7.0)).norm() < 1e-14);
        assert!((s.value(4.0) - c(9.0)).norm() < 1e-14);
        assert_eq!(s.value(4.5), c(0.0));
        assert!(s.second_derivative(1.5).unwrap().norm() < 1e-14);
        assert!((s.integral() - c(20.0)).norm() < 1e-13);
    }

    #[test]
    fn integral_of_smooth_data_converges() {
        let samples: Vec<_> = (0..=200)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / 200.0;
                (t, c(t.sin()))
            })
            .collect();
        let s = CubicSpline::new(&samples).unwrap();
        assert!((s.integral() - c(2.0)).norm() < 1e-8);
    }

    #[test]
    fn smooth_function_converges() {
        let samples: Vec<_> = (0..=200)
            .map(|i| {
                let x = i as f64 * 0.01;
                (x, Complex64::new(x.sin(), x.cos()))
            })
            .collect();
        let s = CubicSpline::new(&samples).unwrap();
        let t = 0.777;
        assert!((s.value(t) - Complex64::new(t.sin(), t.cos())).norm() < 1e-8);
        assert!((s.second_derivative(t).unwrap() + Complex64::new(t.sin(), t.cos())).norm() < 1e-3);
    }

    #[test]
    fn short_tables_lack_curvature() {
        let s = CubicSpline::new(&[(0.0, c(0.0)), (1.0, c(1.0)), (2.0, c(0.0))]).unwrap();
        assert!(matches!(s.second_derivative(0.5), Err(Error::Capability(_))));
        assert!(CubicSpline::new(&[(0.0, c(0.0))]).is_err());
        assert!(CubicSpline::new(&[(1.0, c(0.0)), (0.0, c(0.0))]).is_err());
    }
}
