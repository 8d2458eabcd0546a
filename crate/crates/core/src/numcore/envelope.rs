use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use super::quad::{adaptive_with_breaks, AdaptiveOptions, GaussRule};
use super::spline::CubicSpline;
use crate::error::{Error, Result};

/// Gaussian envelopes are treated as vanishing beyond this many widths
/// wherever a finite support is needed (sampling, numerical transforms).
pub const GAUSSIAN_TRUNCATION: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeKind {
    Gaussian,
    Quartic,
    Tabulated,
}

/// Transverse profile `g(y)`.
///
/// * gaussian: `g₀ exp(-y²/2b²)`
/// * quartic: `g₀ b⁻⁴ y²(y-b)²` on `[0, b]`, zero elsewhere
/// * tabulated: `g₀` times a natural cubic spline through the samples
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    kind: EnvelopeKind,
    g0: Complex64,
    b: f64,
    table: Option<Arc<CubicSpline>>,
}

impl Envelope {
    pub fn gaussian(g0: Complex64, b: f64) -> Result<Self> {
        Self::checked(EnvelopeKind::Gaussian, g0, b, None)
    }

    pub fn quartic(g0: Complex64, b: f64) -> Result<Self> {
        Self::checked(EnvelopeKind::Quartic, g0, b, None)
    }

    /// Tabulated profile through `(y, g)` samples, scaled by `g0`.
    /// `b` is the width of the sampled span.
    pub fn tabulated(g0: Complex64, samples: &[(f64, Complex64)]) -> Result<Self> {
        let spline = CubicSpline::new(samples)?;
        let (lo, hi) = spline.support();
        Self::checked(EnvelopeKind::Tabulated, g0, hi - lo, Some(Arc::new(spline)))
    }

    fn checked(kind: EnvelopeKind, g0: Complex64, b: f64, table: Option<Arc<CubicSpline>>) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::arg(format!("envelope width must be positive, got {b}")));
        }
        if !(g0.re.is_finite() && g0.im.is_finite()) {
            return Err(Error::arg("envelope amplitude must be finite"));
        }
        Ok(Self { kind, g0, b, table })
    }

    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }

    pub fn g0(&self) -> Complex64 {
        self.g0
    }

    pub fn width(&self) -> f64 {
        self.b
    }

    pub fn table(&self) -> Option<&CubicSpline> {
        self.table.as_deref()
    }

    /// Same profile with amplitude `g0` replaced.
    pub fn with_g0(&self, g0: Complex64) -> Self {
        Self { g0, ..self.clone() }
    }

    /// Interval outside which `g` vanishes; Gaussians are truncated at
    /// `±8b`.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            EnvelopeKind::Gaussian => (-GAUSSIAN_TRUNCATION * self.b, GAUSSIAN_TRUNCATION * self.b),
            EnvelopeKind::Quartic => (0.0, self.b),
            EnvelopeKind::Tabulated => self.table.as_ref().expect("tabulated envelope has a table").support(),
        }
    }

    /// True if the support is exact rather than a truncation.
    pub fn has_compact_support(&self) -> bool {
        self.kind != EnvelopeKind::Gaussian
    }

    pub fn value(&self, y: f64) -> Complex64 {
        match self.kind {
            EnvelopeKind::Gaussian => self.g0 * (-0.5 * (y / self.b).powi(2)).exp(),
            EnvelopeKind::Quartic => {
                if (0.0..=self.b).contains(&y) {
                    let t = y * (y - self.b) / (self.b * self.b);
                    self.g0 * (t * t)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            EnvelopeKind::Tabulated => self.g0 * self.spline().value(y),
        }
    }

    pub fn second_derivative(&self, y: f64) -> Result<Complex64> {
        Ok(match self.kind {
            EnvelopeKind::Gaussian => {
                let b2 = self.b * self.b;
                self.g0 * ((-0.5 * y * y / b2).exp() * (y * y / b2 - 1.0) / b2)
            }
            EnvelopeKind::Quartic => {
                if (0.0..=self.b).contains(&y) {
                    let b = self.b;
                    self.g0 * ((12.0 * y * y - 12.0 * b * y + 2.0 * b * b) / b.powi(4))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            EnvelopeKind::Tabulated => self.g0 * self.spline().second_derivative(y)?,
        })
    }

    /// Fails with a capability error when `g''` is unavailable.
    pub fn require_second_derivative(&self) -> Result<()> {
        match &self.table {
            Some(t) if t.len() < 4 => Err(Error::Capability(format!(
                "tabulated envelope with {} samples has no usable second derivative",
                t.len()
            ))),
            _ => Ok(()),
        }
    }

    fn spline(&self) -> &CubicSpline {
        self.table.as_ref().expect("tabulated envelope has a table")
    }

    /// `g~(q) = ∫ dy e^{-iqy} g(y)`.
    pub fn ft(&self, q: f64) -> Complex64 {
        match self.kind {
            EnvelopeKind::Gaussian => {
                let b = self.b;
                self.g0 * (b * (2.0 * PI).sqrt() * (-0.5 * b * b * q * q).exp())
            }
            EnvelopeKind::Quartic => self.g0 * (self.b * quartic_unit_ft(q * self.b)),
            EnvelopeKind::Tabulated => {
                let spline = self.spline();
                let f = |y: f64| spline.value(y) * Complex64::new(0.0, -q * y).exp();
                let opts = AdaptiveOptions {
                    abs_tol: 1e-15 * self.b,
                    rel_tol: 1e-13,
                    max_intervals: 50_000,
                };
                // A cubic times an exponential: converges quickly on each knot span.
                let r = adaptive_with_breaks(f, spline.knots(), opts)
                    .map(|r| r.value)
                    .unwrap_or_else(|_| GaussRule::new(32).composite(f, spline.support().0, spline.support().1, 4 * spline.len()));
                self.g0 * r
            }
        }
    }

    /// `∫ dy e^{-iqy} g(y)` by composite Gauss–Legendre over the support.
    pub fn ft_numeric(&self, q: f64) -> Complex64 {
        self.numeric_transform(q, |y| self.value(y))
    }

    /// `∫ dy e^{-iqy} g''(y)` by composite Gauss–Legendre over the support.
    pub fn second_derivative_ft_numeric(&self, q: f64) -> Result<Complex64> {
        self.require_second_derivative()?;
        Ok(self.numeric_transform(q, |y| self.second_derivative(y).unwrap_or_default()))
    }

    fn numeric_transform<F: Fn(f64) -> Complex64>(&self, q: f64, f: F) -> Complex64 {
        let (lo, hi) = self.support();
        let rule = GaussRule::new(32);
        let integrand = |y: f64| f(y) * Complex64::new(0.0, -q * y).exp();
        match &self.table {
            Some(t) => t
                .knots()
                .windows(2)
                .map(|w| rule.composite(integrand, w[0], w[1], 1 + (q.abs() * (w[1] - w[0]) / PI) as usize))
                .sum(),
            None => {
                // Resolve both the profile (width b) and the phase.
                let panels = 8 + ((hi - lo) / self.b) as usize + (q.abs() * (hi - lo) / PI) as usize;
                rule.composite(integrand, lo, hi, panels)
            }
        }
    }
}

/// `∫₀¹ t²(1-t)² e^{-iQt} dt`.
fn quartic_unit_ft(big_q: f64) -> Complex64 {
    if big_q.abs() < 4.0 {
        // Σ 2(-iQ)ⁿ / (n! (n+3)(n+4)(n+5))
        let z = Complex64::new(0.0, -big_q);
        let mut term = Complex64::new(1.0, 0.0); // (-iQ)^n / n!
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..80 {
            let nf = n as f64;
            let c = 2.0 / ((nf + 3.0) * (nf + 4.0) * (nf + 5.0));
            let add = term * c;
            sum += add;
            if add.norm() < 1e-18 * sum.norm().max(1e-300) && n > 4 {
                break;
            }
            term = term * z / (nf + 1.0);
        }
        sum
    } else {
        // Antiderivative of P(t) e^{ct} is e^{ct} Σ_j (-1)^j P^(j)(t) / c^{j+1}.
        let c = Complex64::new(0.0, -big_q);
        let c3 = c * c * c;
        let c4 = c3 * c;
        let c5 = c4 * c;
        let upper = c.exp() * (2.0 / c3 - 12.0 / c4 + 24.0 / c5);
        let lower = 2.0 / c3 + 12.0 / c4 + 24.0 / c5;
        upper - lower
    }
}

/// Fourier transform of an envelope; see [`Envelope::ft`].
pub fn envelope_ft(env: &Envelope, q: f64) -> Complex64 {
    env.ft(q)
}
