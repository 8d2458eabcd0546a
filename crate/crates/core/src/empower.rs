//! Electromagnetic power observables of left/right incident TE waves.
//!
//! Powers are reported in units of `P₀ = |E₀|²/(2μ₀ c k)`. The screen
//! quantity `ΔP̂` is per unit length along the wire axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::born::{closed_form_f_left, AmplitudeTable, Side};
use crate::error::{Error, Result};
use crate::invispot::ConstructionParams;
use crate::io::CsvTable;
use crate::numcore::quad::{adaptive_with_breaks, AdaptiveOptions, GaussRule};
use crate::numcore::spline::CubicSpline;
use crate::numcore::{Envelope, WaveContext};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSummary {
    pub dp_minus_left: f64,
    pub dp_plus_left: f64,
    pub dp_minus_right: f64,
    pub dp_plus_right: f64,
    /// Estimated angular quadrature error (largest over the four entries).
    pub quadrature_error: f64,
}

impl PowerSummary {
    pub fn entries(&self) -> [f64; 4] {
        [self.dp_minus_left, self.dp_plus_left, self.dp_minus_right, self.dp_plus_right]
    }
}

/// Gauss–Legendre angles on each half, ascending on `(-π/2, 3π/2)`.
/// `n` is rounded up to odd so that `0` and `π` are sampled exactly.
pub fn power_angles(n: usize) -> Vec<f64> {
    let rule = GaussRule::new(n.max(3) | 1);
    let front: Vec<f64> = rule.mapped(-PI / 2.0, PI / 2.0).map(|(t, _)| t).collect();
    let back = front.iter().map(|t| PI + t).collect::<Vec<_>>();
    [front, back].concat()
}

/// Spline of one half of a table, clamped to the half's end points.
fn half_spline<F: Fn(Complex64) -> Complex64>(table: &AmplitudeTable, lo: f64, hi: f64, stride: usize, map: F) -> Result<Option<CubicSpline>> {
    let pts: Vec<(f64, Complex64)> = table
        .thetas
        .iter()
        .zip(&table.values)
        .filter(|(t, _)| **t > lo && **t < hi)
        .step_by(stride)
        .map(|(t, f)| (*t, map(*f)))
        .collect();
    if pts.len() < 2 {
        return Ok(None);
    }
    let mut padded = Vec::with_capacity(pts.len() + 2);
    padded.push((lo, pts[0].1));
    padded.extend_from_slice(&pts);
    padded.push((hi, pts[pts.len() - 1].1));
    padded.dedup_by(|a, b| a.0 == b.0);
    Ok(Some(CubicSpline::new(&padded)?))
}

/// `∫ |f|² dθ` over `(lo, hi)` with an error estimate from halving the
/// sample density.
fn half_cross_section(table: &AmplitudeTable, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let sq = |f: Complex64| Complex64::new(f.norm_sqr(), 0.0);
    let Some(full) = half_spline(table, lo, hi, 1, sq)? else {
        let any = table.thetas.iter().any(|t| *t > lo && *t < hi);
        return if any {
            Err(Error::arg("need at least two samples per angular half"))
        } else {
            Ok((0.0, 0.0))
        };
    };
    let value = full.integral().re;
    let coarse = half_spline(table, lo, hi, 2, sq)?.map_or(value, |s| s.integral().re);
    Ok((value, (value - coarse).abs()))
}

/// Complex amplitude interpolated at `theta` from the half containing it.
pub fn interpolate_amplitude(table: &AmplitudeTable, theta: f64) -> Result<Complex64> {
    if let Some(i) = table.thetas.iter().position(|t| (t - theta).abs() <= 1e-14) {
        return Ok(table.values[i]);
    }
    let (lo, hi) = if theta.cos() >= 0.0 { (-PI / 2.0, PI / 2.0) } else { (PI / 2.0, 1.5 * PI) };
    half_spline(table, lo, hi, 1, |f| f)?
        .map(|s| s.value(theta))
        .ok_or_else(|| Error::arg("too few samples to interpolate the amplitude"))
}

/// Reflected/transmitted power changes for both incidence sides.
///
/// The forward direction of `ψ^r` is `θ = π`, so `ΔP₋^r` subtracts
/// `√(8π) Im f^r(π)`.
pub fn total_power_changes(f_left: &AmplitudeTable, f_right: &AmplitudeTable) -> Result<PowerSummary> {
    if f_left.side != Side::Left || f_right.side != Side::Right {
        return Err(Error::arg("expected a left table and a right table"));
    }
    let back = (PI / 2.0, 1.5 * PI);
    let front = (-PI / 2.0, PI / 2.0);
    let (l_back, e1) = half_cross_section(f_left, back.0, back.1)?;
    let (l_front, e2) = half_cross_section(f_left, front.0, front.1)?;
    let (r_back, e3) = half_cross_section(f_right, back.0, back.1)?;
    let (r_front, e4) = half_cross_section(f_right, front.0, front.1)?;
    let optical = (8.0 * PI).sqrt();
    let fl0 = interpolate_amplitude(f_left, 0.0)?;
    let frpi = interpolate_amplitude(f_right, PI)?;
    Ok(PowerSummary {
        dp_minus_left: l_back,
        dp_plus_left: l_front - optical * fl0.im,
        dp_minus_right: r_back - optical * frpi.im,
        dp_plus_right: r_front,
        quadrature_error: [e1, e2, e3, e4].into_iter().fold(0.0, f64::max),
    })
}

/// `ξ(r, θ) = Re[√(i/(kr)) e^{ikr(1-cos θ)} f^l(θ)]`.
pub fn xi(f: Complex64, k: f64, r: f64, theta: f64) -> f64 {
    let one_minus_cos = 2.0 * (0.5 * theta).sin().powi(2);
    let phase = Complex64::new(0.0, PI / 4.0 + k * r * one_minus_cos).exp();
    (phase * f / (k * r).sqrt()).re
}

/// `ξ` from a sampled forward-half amplitude table.
pub fn xi_from_table(table: &AmplitudeTable, r: f64, theta: f64) -> Result<f64> {
    Ok(xi(interpolate_amplitude(table, theta)?, table.k, r, theta))
}

/// `(Δû, ΔŜ)` with `Δû = (1 + cos θ) ξ` and `ΔŜ = ξ (e_x + r̂)`.
pub fn delta_u_s(xi: f64, theta: f64) -> (f64, [f64; 2]) {
    let (s, c) = theta.sin_cos();
    ((1.0 + c) * xi, [xi * (1.0 + c), xi * s])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenSpec {
    pub d: f64,
    pub s: f64,
}

impl ScreenSpec {
    pub fn new(d: f64, s: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0 && s.is_finite() && s > 0.0) {
            return Err(Error::arg(format!("screen needs d > 0 and s > 0, got d={d}, s={s}")));
        }
        Ok(Self { d, s })
    }

    /// False when the screen is closer than ten times the wire size.
    pub fn is_far(&self, extent: f64) -> bool {
        self.d >= 10.0 * extent
    }
}

/// `y ≥ 0` where the phase `k(r - d)` crosses multiples of `π/4`, up to `y_max`.
fn phase_breaks(k: f64, d: f64, y_max: f64) -> Vec<f64> {
    let step = PI / 4.0 / k;
    let mut ys = vec![0.0];
    let mut j = 1.0;
    loop {
        let r = d + j * step;
        let y = (r * r - d * d).sqrt();
        if y >= y_max {
            break;
        }
        ys.push(y);
        j += 1.0;
    }
    ys.push(y_max);
    ys
}

fn screen_point(params: &ConstructionParams, d: f64, y: f64) -> (f64, f64) {
    let r = d.hypot(y);
    let theta = y.atan2(d);
    let k = params.ctx().k();
    let x = xi(closed_form_f_left(params, theta), k, r, theta);
    (theta, x)
}

/// `ΔP̂ = (1/s) ∫_{-s/2}^{s/2} Δû(d, y) dy` by adaptive Gauss–Kronrod on
/// panels split at phase steps of `π/4`.
pub fn screen_power(params: &ConstructionParams, screen: &ScreenSpec) -> Result<f64> {
    let half = 0.5 * screen.s;
    let pos = phase_breaks(params.ctx().k(), screen.d, half);
    let mut breaks: Vec<f64> = pos.iter().rev().map(|y| -y).collect();
    breaks.extend_from_slice(&pos[1..]);
    let amp = params.envelope().g0().norm().max(f64::MIN_POSITIVE);
    let opts = AdaptiveOptions {
        abs_tol: 1e-14 * amp * screen.s,
        rel_tol: 1e-11,
        max_intervals: 200_000,
    };
    let integrand = |y: f64| {
        let (theta, x) = screen_point(params, screen.d, y);
        Complex64::new(delta_u_s(x, theta).0, 0.0)
    };
    let r = adaptive_with_breaks(integrand, &breaks, opts)?;
    Ok(r.value.re / screen.s)
}

/// Fixed-order oracle for [`screen_power`]: 16-point Gauss–Legendre on
/// uniform panels no wider than `π/16` of phase, integrating `ΔŜ·e_x`.
pub fn screen_power_dense(params: &ConstructionParams, screen: &ScreenSpec) -> f64 {
    let k = params.ctx().k();
    let half = 0.5 * screen.s;
    let slope = k * half / screen.d.hypot(half);
    let panels = ((screen.s * slope / (PI / 16.0)).ceil() as usize).max(8);
    let rule = GaussRule::new(16);
    let total = rule.composite(
        |y| {
            let (theta, x) = screen_point(params, screen.d, y);
            Complex64::new(delta_u_s(x, theta).1[0], 0.0)
        },
        -half,
        half,
        panels,
    );
    total.re / screen.s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Config {
    /// Wavenumbers in units of `π/a`.
    pub k_over_pi: Vec<f64>,
    pub ell: i32,
    pub m: i32,
    pub g0: Complex64,
    pub b: f64,
    pub d: f64,
    pub s_max: f64,
    pub samples: usize,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            k_over_pi: vec![2.0, 4.0, 8.0, 12.0],
            ell: -1,
            m: 1,
            g0: Complex64::new(1e-2, 0.0),
            b: 1.0,
            d: 100.0,
            s_max: 100.0,
            samples: 400,
        }
    }
}

impl Fig2Config {
    /// `s_i = s_max · i / samples`, `i = 1..=samples`.
    pub fn s_values(&self) -> Vec<f64> {
        (1..=self.samples).map(|i| self.s_max * i as f64 / self.samples as f64).collect()
    }

    pub fn params(&self, k_over_pi: f64) -> Result<ConstructionParams> {
        let env = Envelope::quartic(self.g0, self.b)?;
        ConstructionParams::new(self.ell, self.m, 1.0, env, WaveContext::from_pi_multiple(k_over_pi)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub k: f64,
    pub k_over_pi: f64,
    pub s_values: Vec<f64>,
    pub dp_hat: Vec<f64>,
    pub config: Fig2Config,
}

impl PowerCurve {
    /// Columns `s_over_a,dP_hat`.
    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["s_over_a", "dP_hat"]);
        for (s, p) in self.s_values.iter().zip(&self.dp_hat) {
            t.push(vec![*s, *p]);
        }
        t
    }
}

pub fn power_curve(cfg: &Fig2Config, k_over_pi: f64, s_values: &[f64]) -> Result<PowerCurve> {
    let params = cfg.params(k_over_pi)?;
    let dp_hat = s_values
        .iter()
        .map(|&s| screen_power(&params, &ScreenSpec::new(cfg.d, s)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerCurve {
        k: params.ctx().k(),
        k_over_pi,
        s_values: s_values.to_vec(),
        dp_hat,
        config: cfg.clone(),
    })
}

/// One `ΔP̂(s)` curve per configured wavenumber.
pub fn fig2_curves(cfg: &Fig2Config) -> Result<Vec<PowerCurve>> {
    let s = cfg.s_values();
    cfg.k_over_pi.iter().map(|&kp| power_curve(cfg, kp, &s)).collect()
}
