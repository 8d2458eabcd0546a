//! First-Born transfer functions and scattering amplitudes.
//!
//! In 2D, `T^l_±(p) = (-i/2ω) v~~(-p∓, p)` and `T^r_±(p) = (-i/2ω) v~~(p±, p)`;
//! the amplitude is `f(θ) = -(2π)^{-1/2} i k|cos θ| T_±(k sin θ)` with
//! `± = sgn(cos θ)`. Since `k|cos θ| = ω(k sin θ)`, the amplitude is
//! evaluated as `-v~~/(2√(2π))` with the `ω` factor cancelled.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::invispot::{self, ConstructionParams, ConstructionParams3d};
use crate::io::CsvTable;
use crate::numcore::{omega, p_plus_minus, potential_ft, MomentumGrid, PotentialSpec, WaveContext};

/// Amplitudes are not reported where `|cos θ|` is below this.
pub const GRAZING_MARGIN: f64 = 1e-3;

/// Distance (in units of `K`) below which `(1 - e^{iau})/(u + nK)` is
/// evaluated by its series.
const POLE_WINDOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `sgn(cos θ)`, `Plus` on the forward half for left incidence.
    pub fn of_cos(theta: f64) -> Self {
        if theta.cos() >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Born,
    ClosedForm,
    Xfermat,
}

/// `T^{side}_{sign}(p_j)` on a momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferTable {
    pub side: Side,
    pub sign: Sign,
    pub grid: MomentumGrid,
    pub values: Vec<Complex64>,
}

impl TransferTable {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `T` at the center node `p = 0`.
    pub fn at_center(&self) -> Complex64 {
        self.values[self.grid.center_index()]
    }

    pub fn max_abs_diff(&self, other: &TransferTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Sampled `f(θ)` for one incidence side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTable {
    pub side: Side,
    pub method: Method,
    pub k: f64,
    pub grazing_margin: f64,
    pub thetas: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl AmplitudeTable {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * alpha).collect(),
            ..self.clone()
        }
    }

    /// Columns `theta,re_f,im_f,abs_f`.
    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["theta", "re_f", "im_f", "abs_f"]);
        for (th, f) in self.thetas.iter().zip(&self.values) {
            t.push(vec![*th, f.re, f.im, f.norm()]);
        }
        t
    }

    /// Reads `theta,re_f,im_f[,abs_f]`; `abs_f` is ignored.
    pub fn from_table(table: &CsvTable, side: Side, method: Method, k: f64) -> Result<Self> {
        let cols = table.require(&["theta", "re_f", "im_f"])?;
        let mut thetas = Vec::with_capacity(table.rows.len());
        let mut values = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            let th = row[cols[0]];
            if !(-PI / 2.0..=1.5 * PI).contains(&th) {
                return Err(Error::arg(format!("angle {th} outside [-π/2, 3π/2]")));
            }
            thetas.push(th);
            values.push(Complex64::new(row[cols[1]], row[cols[2]]));
        }
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("angles must be strictly increasing"));
        }
        let margin = thetas.iter().map(|t| t.cos().abs()).fold(f64::INFINITY, f64::min);
        Ok(Self {
            side,
            method,
            k,
            grazing_margin: margin.min(1.0),
            thetas,
            values,
        })
    }
}

/// `count` equally spaced angles on `(-π/2, 3π/2)` (cell midpoints), with
/// those inside the grazing margin dropped.
pub fn theta_samples(count: usize, margin: f64) -> Vec<f64> {
    (0..count)
        .map(|i| -PI / 2.0 + 2.0 * PI * (i as f64 + 0.5) / count as f64)
        .filter(|t| t.cos().abs() >= margin)
        .collect()
}

fn check_theta(theta: f64, margin: f64) -> Result<()> {
    if !(theta > -PI / 2.0 && theta < 1.5 * PI) {
        return Err(Error::arg(format!("angle {theta} outside (-π/2, 3π/2)")));
    }
    if theta.cos().abs() < margin {
        return Err(Error::Grazing { theta, margin });
    }
    Ok(())
}

/// Argument of `v~~` along the scattering axis for `T^{side}_{sign}(p)`.
fn axial_argument(side: Side, sign: Sign, p: f64, ctx: &WaveContext) -> Result<f64> {
    let (pp, pm) = p_plus_minus(p, ctx)?;
    Ok(match (side, sign) {
        (Side::Left, Sign::Plus) => -pm,
        (Side::Left, Sign::Minus) => -pp,
        (Side::Right, Sign::Plus) => pp,
        (Side::Right, Sign::Minus) => pm,
    })
}

fn nonzero_omega(p: f64, ctx: &WaveContext) -> Result<f64> {
    let w = omega(p, ctx)?;
    if w == 0.0 {
        return Err(Error::Domain { p, k: ctx.k() });
    }
    Ok(w)
}

/// Born `T^{side}_{sign}(p)` of a 2D potential.
pub fn born_t_2d_at(v: &PotentialSpec, side: Side, sign: Sign, p: f64, ctx: &WaveContext) -> Result<Complex64> {
    let w = nonzero_omega(p, ctx)?;
    let kx = axial_argument(side, sign, p, ctx)?;
    Ok(potential_ft(v, kx, p)? * Complex64::new(0.0, -0.5 / w))
}

pub fn born_t_2d(v: &PotentialSpec, side: Side, sign: Sign, grid: &MomentumGrid) -> Result<TransferTable> {
    let values = grid
        .nodes()
        .iter()
        .map(|&p| born_t_2d_at(v, side, sign, p, grid.ctx()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransferTable {
        side,
        sign,
        grid: grid.clone(),
        values,
    })
}

/// `(1 - e^{iau}) / (u + nK)`, continuous where `u + nK → 0`.
fn phase_over_pole(slab: f64, grating: f64, n: i32, u: f64) -> (Complex64, bool) {
    let d = u + n as f64 * grating;
    if d.abs() < POLE_WINDOW * grating {
        // e^{iau} = e^{iad} since aK = 2π.
        let iad = Complex64::new(0.0, slab * d);
        let ratio = Complex64::new(0.0, -slab) * (Complex64::new(1.0, 0.0) + iad / 2.0 + iad * iad / 6.0);
        return (ratio, true);
    }
    let z = slab * u;
    // 1 - e^{iz} = 2 sin²(z/2) - i sin z
    let num = Complex64::new(2.0 * (0.5 * z).sin().powi(2), -z.sin());
    (num / d, false)
}

/// `2ℓmK²k (1 - e^{iau}) / ((u + ℓK)(u + mK))` with `u = p∓`.
fn closed_form_factor(params: &ConstructionParams, u: f64) -> Complex64 {
    let kk = params.grating();
    let (ell, m) = (params.ell(), params.m());
    let (ratio_l, singular_l) = phase_over_pole(params.slab(), kk, ell, u);
    let scale = 2.0 * (ell * m) as f64 * kk * kk * params.ctx().k();
    if singular_l {
        ratio_l * scale / (u + m as f64 * kk)
    } else {
        let (ratio_m, _) = phase_over_pole(params.slab(), kk, m, u);
        ratio_m * scale / (u + ell as f64 * kk)
    }
}

/// Closed form of the left-incidence Born `T^l_±(p)` for the constructed
/// family, evaluated at the construction's own wavenumber.
pub fn closed_form_t_left(params: &ConstructionParams, sign: Sign, p: f64) -> Result<Complex64> {
    let ctx = params.ctx();
    let w = nonzero_omega(p, ctx)?;
    let (pp, pm) = p_plus_minus(p, ctx)?;
    let u = match sign {
        Sign::Plus => pm,
        Sign::Minus => pp,
    };
    Ok(closed_form_factor(params, u) * params.envelope().ft(p) / w)
}

/// Closed form of the left-incidence Born amplitude `f^l(θ)`.
pub fn closed_form_f_left(params: &ConstructionParams, theta: f64) -> Complex64 {
    let k = params.ctx().k();
    let u = k * (1.0 - theta.cos());
    let ghat = params.envelope().ft(k * theta.sin());
    // -√2 i / √π · [ℓmK²k(1 - e^{iau}) / ((u + ℓK)(u + mK))] g~
    closed_form_factor(params, u) * ghat * Complex64::new(0.0, -1.0 / (2.0 * PI).sqrt())
}

/// Born `f^{side}(θ)` of a 2D potential at the potential's wavenumber
/// `ctx`.
pub fn born_f_2d(v: &PotentialSpec, side: Side, theta: f64, ctx: &WaveContext) -> Result<Complex64> {
    born_f_2d_with_margin(v, side, theta, ctx, GRAZING_MARGIN)
}

pub fn born_f_2d_with_margin(
    v: &PotentialSpec,
    side: Side,
    theta: f64,
    ctx: &WaveContext,
    margin: f64,
) -> Result<Complex64> {
    check_theta(theta, margin)?;
    let k = ctx.k();
    let (c, s) = (theta.cos(), theta.sin());
    let kx = match side {
        Side::Left => -k * (1.0 - c),
        Side::Right => k * (1.0 + c),
    };
    Ok(potential_ft(v, kx, k * s)? * (-1.0 / (2.0 * (2.0 * PI).sqrt())))
}

/// Amplitude table by direct Born evaluation or, for the constructed
/// family, by the closed form (the right side of that family vanishes
/// identically).
pub fn amplitude_table(
    v: &PotentialSpec,
    side: Side,
    method: Method,
    thetas: &[f64],
    ctx: &WaveContext,
    margin: f64,
) -> Result<AmplitudeTable> {
    let values = match method {
        Method::Born => thetas
            .iter()
            .map(|&t| born_f_2d_with_margin(v, side, t, ctx, margin))
            .collect::<Result<Vec<_>>>()?,
        Method::ClosedForm => {
            let PotentialSpec::Constructed2d(params) = v else {
                return Err(Error::Capability("closed form exists only for the constructed 2D family".into()));
            };
            thetas
                .iter()
                .map(|&t| {
                    check_theta(t, margin)?;
                    Ok(match side {
                        Side::Left => closed_form_f_left(params, t),
                        Side::Right => Complex64::new(0.0, 0.0),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        Method::Xfermat => {
            return Err(Error::arg("transfer-matrix amplitudes are built from extracted T tables"));
        }
    };
    Ok(AmplitudeTable {
        side,
        method,
        k: ctx.k(),
        grazing_margin: margin,
        thetas: thetas.to_vec(),
        values,
    })
}

/// Amplitudes at the angles of the grid nodes: `T_+` gives the forward
/// half `θ = asin(p/k)`, `T_-` the backward half `θ = π - asin(p/k)`.
pub fn amplitude_from_transfer(plus: &TransferTable, minus: &TransferTable) -> Result<AmplitudeTable> {
    if plus.side != minus.side || plus.sign != Sign::Plus || minus.sign != Sign::Minus {
        return Err(Error::arg("need T_+ and T_- tables of the same side"));
    }
    let grid = &plus.grid;
    let k = grid.k();
    let pref = Complex64::new(0.0, -1.0 / (2.0 * PI).sqrt());
    let mut rows: Vec<(f64, Complex64)> = Vec::with_capacity(2 * grid.len());
    for (j, &p) in grid.nodes().iter().enumerate() {
        let w = omega(p, grid.ctx())?;
        let fwd = (p / k).asin();
        rows.push((fwd, pref * w * plus.values[j]));
        rows.push((PI - fwd, pref * w * minus.values[j]));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let margin = rows.iter().map(|r| r.0.cos().abs()).fold(f64::INFINITY, f64::min);
    Ok(AmplitudeTable {
        side: plus.side,
        method: Method::Xfermat,
        k,
        grazing_margin: margin,
        thetas: rows.iter().map(|r| r.0).collect(),
        values: rows.iter().map(|r| r.1).collect(),
    })
}

/// Born `T^{side}_{sign}(p⃗)` of a constructed 3D potential.
pub fn born_t_3d(params: &ConstructionParams3d, side: Side, sign: Sign, px: f64, py: f64) -> Result<Complex64> {
    let ctx = params.ctx();
    let p = px.hypot(py);
    let w = nonzero_omega(p, ctx)?;
    let kz = axial_argument(side, sign, p, ctx)?;
    Ok(invispot::potential_ft_3d(params, px, py, kz) * Complex64::new(0.0, -0.5 / w))
}

/// As [`born_t_3d`], with the transform computed by separable quadrature.
pub fn born_t_3d_quadrature(
    params: &ConstructionParams3d,
    side: Side,
    sign: Sign,
    px: f64,
    py: f64,
) -> Result<Complex64> {
    let ctx = params.ctx();
    let p = px.hypot(py);
    let w = nonzero_omega(p, ctx)?;
    let kz = axial_argument(side, sign, p, ctx)?;
    Ok(invispot::potential_ft_3d_separable(params, px, py, kz)? * Complex64::new(0.0, -0.5 / w))
}

/// Born `f^{side}(ϑ, φ) = -(ik|cos ϑ|/2π) T_±(k sin ϑ cos φ, k sin ϑ sin φ)`,
/// evaluated as `-v~~/(4π)`.
pub fn born_f_3d(params: &ConstructionParams3d, side: Side, theta: f64, phi: f64) -> Result<Complex64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::arg(format!("polar angle {theta} outside [0, π]")));
    }
    if theta.cos().abs() < GRAZING_MARGIN {
        return Err(Error::Grazing {
            theta,
            margin: GRAZING_MARGIN,
        });
    }
    let k = params.ctx().k();
    let (c, s) = (theta.cos(), theta.sin());
    let kz = match side {
        Side::Left => -k * (1.0 - c),
        Side::Right => k * (1.0 + c),
    };
    let v = invispot::potential_ft_3d(params, k * s * phi.cos(), k * s * phi.sin(), kz);
    Ok(v * (-1.0 / (4.0 * PI)))
}
