//! Right-invisible potentials built from three active grating modes.
//!
//! Along the scattering axis the slab `[0, a]` carries the modes
//! `n ∈ {0, ℓ, m}` of the grating wavenumber `K = 2π/a`. Each mode's
//! transverse coefficient is `c_n = -γ_n ∇²g + β_n g`, i.e.
//! `c~_n(p) = (γ_n p² + β_n) g~(p)`, with the weights chosen so that
//! `v~~(p±, p) = 0` for every propagating `p`. That zero makes the
//! first-order transfer functions for right incidence vanish.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numcore::{Envelope, WaveContext};

/// Distance (in units of `K`) below which a removable singularity of the
/// slab transform is evaluated by its series.
const SINGULAR_WINDOW: f64 = 1e-6;

/// One active grating mode: `c~_n(p) = (curvature · p² + flat) g~(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingMode {
    pub n: i32,
    pub curvature: f64,
    pub flat: f64,
}

fn grating_modes(ell: i32, m: i32, grating: f64, k: f64) -> [GratingMode; 3] {
    let (l, mf) = (ell as f64, m as f64);
    [
        GratingMode {
            n: 0,
            curvature: 1.0,
            flat: 0.0,
        },
        GratingMode {
            n: ell,
            curvature: mf / (l - mf),
            flat: mf * l * grating * (l * grating - 2.0 * k) / (l - mf),
        },
        GratingMode {
            n: m,
            curvature: l / (mf - l),
            flat: l * mf * grating * (mf * grating - 2.0 * k) / (mf - l),
        },
    ]
}

fn validate_orders(ell: i32, m: i32, slab: f64) -> Result<()> {
    if ell == 0 || m == 0 {
        return Err(Error::arg(format!("grating orders must be nonzero (l={ell}, m={m})")));
    }
    if ell == m {
        return Err(Error::arg(format!("grating orders must differ (l=m={ell})")));
    }
    if !(slab.is_finite() && slab > 0.0) {
        return Err(Error::arg(format!("slab length must be positive, got {slab}")));
    }
    Ok(())
}

/// `∫₀ᵃ e^{i(nK - X)x} dx`, continuous through `X = nK`.
pub fn slab_phase_kernel(slab: f64, grating: f64, n: i32, kx: f64) -> Complex64 {
    let delta = n as f64 * grating - kx;
    let z = slab * delta;
    if delta.abs() < SINGULAR_WINDOW * grating {
        // a (1 + z/2·i + (iz)²/6)
        let iz = Complex64::new(0.0, z);
        return (Complex64::new(1.0, 0.0) + iz / 2.0 + iz * iz / 6.0) * slab;
    }
    // e^{iz} - 1 = -2 sin²(z/2) + i sin z
    let num = Complex64::new(-2.0 * (0.5 * z).sin().powi(2), z.sin());
    num / Complex64::new(0.0, delta)
}

/// Closed-form transform of a three-mode slab:
/// `ℓmK²(1 - e^{-iaX})[p² + (X - 2k)X] g~ / (iX(X - ℓK)(X - mK))`,
/// with `X` along the grating and `p²` the squared transverse momentum.
#[allow(clippy::too_many_arguments)]
fn closed_form_slab_ft(ell: i32, m: i32, slab: f64, grating: f64, k: f64, kx: f64, p2: f64, ghat: Complex64) -> Complex64 {
    let poles = [0.0, ell as f64 * grating, m as f64 * grating];
    let bracket = p2 + (kx - 2.0 * k) * kx;
    // e^{-iaX} = e^{-iaδ} with δ = X - round(X/K)K since aK = 2π.
    let nearest = (kx / grating).round();
    let delta = kx - nearest * grating;
    let z = slab * delta;

    let singular = poles
        .iter()
        .position(|&pole| (kx - pole).abs() < SINGULAR_WINDOW * grating);
    let (ratio, rest) = match singular {
        Some(i) => {
            let d = kx - poles[i];
            let iz = Complex64::new(0.0, slab * d);
            // (1 - e^{-iad})/d = ia(1 - iad/2 + (iad)²/6)
            let ratio = Complex64::new(0.0, slab) * (Complex64::new(1.0, 0.0) - iz / 2.0 + iz * iz / 6.0);
            let rest: f64 = poles
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &p)| kx - p)
                .product();
            (ratio, rest)
        }
        None => {
            // 1 - e^{-iz} = 2 sin²(z/2) + i sin z
            let one_minus = Complex64::new(2.0 * (0.5 * z).sin().powi(2), z.sin());
            let rest: f64 = poles.iter().skip(1).map(|&p| kx - p).product();
            (one_minus / kx, rest)
        }
    };
    let lmk2 = (ell * m) as f64 * grating * grating;
    ratio * ghat * (lmk2 * bracket) / Complex64::new(0.0, rest)
}

/// Parameters of the 2D right-invisible family: grating orders `ℓ ≠ m`
/// (both nonzero), slab length `a`, transverse envelope `g(y)` and the
/// design wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionParams {
    ell: i32,
    m: i32,
    slab: f64,
    envelope: Envelope,
    ctx: WaveContext,
}

impl ConstructionParams {
    pub fn new(ell: i32, m: i32, slab: f64, envelope: Envelope, ctx: WaveContext) -> Result<Self> {
        validate_orders(ell, m, slab)?;
        Ok(Self {
            ell,
            m,
            slab,
            envelope,
            ctx,
        })
    }

    pub fn ell(&self) -> i32 {
        self.ell
    }
    pub fn m(&self) -> i32 {
        self.m
    }
    pub fn slab(&self) -> f64 {
        self.slab
    }
    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }
    pub fn ctx(&self) -> &WaveContext {
        &self.ctx
    }

    /// `K = 2π / a`.
    pub fn grating(&self) -> f64 {
        2.0 * PI / self.slab
    }

    pub fn modes(&self) -> [GratingMode; 3] {
        grating_modes(self.ell, self.m, self.grating(), self.ctx.k())
    }

    /// Same construction with `g₀ → α g₀` (so `v → α v`).
    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            envelope: self.envelope.with_g0(self.envelope.g0() * alpha),
            ..self.clone()
        }
    }

    pub fn with_envelope(&self, envelope: Envelope) -> Self {
        Self {
            envelope,
            ..self.clone()
        }
    }
}

/// Transverse Fourier coefficient `c~_n(p)`; zero for inactive modes.
pub fn fourier_coeff_ft(params: &ConstructionParams, n: i32, p: f64) -> Complex64 {
    params
        .modes()
        .iter()
        .find(|mode| mode.n == n)
        .map(|mode| params.envelope.ft(p) * (mode.curvature * p * p + mode.flat))
        .unwrap_or_default()
}

/// `v(x, y)` of the constructed potential; zero for `x ∉ [0, a]`.
pub fn potential_value_2d(params: &ConstructionParams, x: f64, y: f64) -> Result<Complex64> {
    params.envelope.require_second_derivative()?;
    if !(0.0..=params.slab).contains(&x) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = params.envelope.value(y);
    let g2 = params.envelope.second_derivative(y)?;
    let kk = params.grating();
    Ok(params
        .modes()
        .iter()
        .map(|mode| {
            let c = g * mode.flat - g2 * mode.curvature;
            c * Complex64::new(0.0, mode.n as f64 * kk * x).exp()
        })
        .sum())
}

/// Closed-form `v~~(Kx, Ky)` of the 2D construction.
pub fn potential_ft_2d(params: &ConstructionParams, kx: f64, ky: f64) -> Complex64 {
    closed_form_slab_ft(
        params.ell,
        params.m,
        params.slab,
        params.grating(),
        params.ctx.k(),
        kx,
        ky * ky,
        params.envelope.ft(ky),
    )
}

/// `v~~(Kx, Ky)` summed mode by mode from the Fourier-series coefficients.
pub fn potential_ft_2d_series(params: &ConstructionParams, kx: f64, ky: f64) -> Complex64 {
    let kk = params.grating();
    params
        .modes()
        .iter()
        .map(|mode| slab_phase_kernel(params.slab, kk, mode.n, kx) * fourier_coeff_ft(params, mode.n, ky))
        .sum()
}

/// `v~(x, q)`, the transform along the transverse axis at fixed `x`.
pub fn transverse_ft_2d(params: &ConstructionParams, x: f64, q: f64) -> Complex64 {
    if !(0.0..=params.slab).contains(&x) {
        return Complex64::new(0.0, 0.0);
    }
    let kk = params.grating();
    params
        .modes()
        .iter()
        .map(|mode| fourier_coeff_ft(params, mode.n, q) * Complex64::new(0.0, mode.n as f64 * kk * x).exp())
        .sum()
}

/// Parameters of the 3D right-invisible family.
///
/// The grating and the slab support `[0, c]` lie along the scattering axis
/// `z`; the transverse envelope is the separable product
/// `g(x, y) = g_x(x) g_y(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionParams3d {
    ell: i32,
    m: i32,
    slab: f64,
    envelope_x: Envelope,
    envelope_y: Envelope,
    ctx: WaveContext,
}

impl ConstructionParams3d {
    pub fn new(
        ell: i32,
        m: i32,
        slab: f64,
        envelope_x: Envelope,
        envelope_y: Envelope,
        ctx: WaveContext,
    ) -> Result<Self> {
        validate_orders(ell, m, slab)?;
        Ok(Self {
            ell,
            m,
            slab,
            envelope_x,
            envelope_y,
            ctx,
        })
    }

    pub fn ell(&self) -> i32 {
        self.ell
    }
    pub fn m(&self) -> i32 {
        self.m
    }
    pub fn slab(&self) -> f64 {
        self.slab
    }
    pub fn envelopes(&self) -> (&Envelope, &Envelope) {
        (&self.envelope_x, &self.envelope_y)
    }
    pub fn ctx(&self) -> &WaveContext {
        &self.ctx
    }
    pub fn grating(&self) -> f64 {
        2.0 * PI / self.slab
    }
    pub fn modes(&self) -> [GratingMode; 3] {
        grating_modes(self.ell, self.m, self.grating(), self.ctx.k())
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            envelope_x: self.envelope_x.with_g0(self.envelope_x.g0() * alpha),
            ..self.clone()
        }
    }

    /// `g~(Kx, Ky) = g~_x(Kx) g~_y(Ky)`.
    pub fn envelope_ft(&self, kx: f64, ky: f64) -> Complex64 {
        self.envelope_x.ft(kx) * self.envelope_y.ft(ky)
    }
}

/// `c~_n(p⃗)` for the 3D construction.
pub fn fourier_coeff_ft_3d(params: &ConstructionParams3d, n: i32, px: f64, py: f64) -> Complex64 {
    params
        .modes()
        .iter()
        .find(|mode| mode.n == n)
        .map(|mode| params.envelope_ft(px, py) * (mode.curvature * (px * px + py * py) + mode.flat))
        .unwrap_or_default()
}

/// `v(x, y, z)`; zero outside `supp g_x × supp g_y × [0, c]`.
pub fn potential_value_3d(params: &ConstructionParams3d, x: f64, y: f64, z: f64) -> Result<Complex64> {
    params.envelope_x.require_second_derivative()?;
    params.envelope_y.require_second_derivative()?;
    if !(0.0..=params.slab).contains(&z) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (gx, gy) = (params.envelope_x.value(x), params.envelope_y.value(y));
    let g = gx * gy;
    let lap = params.envelope_x.second_derivative(x)? * gy + gx * params.envelope_y.second_derivative(y)?;
    let kk = params.grating();
    Ok(params
        .modes()
        .iter()
        .map(|mode| (g * mode.flat - lap * mode.curvature) * Complex64::new(0.0, mode.n as f64 * kk * z).exp())
        .sum())
}

/// Closed-form `v~~(Kx, Ky, Kz)` of the 3D construction.
pub fn potential_ft_3d(params: &ConstructionParams3d, kx: f64, ky: f64, kz: f64) -> Complex64 {
    closed_form_slab_ft(
        params.ell,
        params.m,
        params.slab,
        params.grating(),
        params.ctx.k(),
        kz,
        kx * kx + ky * ky,
        params.envelope_ft(kx, ky),
    )
}

/// `v~~(Kx, Ky, Kz)` by tensorized Gauss quadrature, using separability:
/// each factor (`g_x`, `g_x''`, `g_y`, `g_y''`, and the slab phase along
/// `z`) is a one-dimensional numerical transform.
pub fn potential_ft_3d_separable(params: &ConstructionParams3d, kx: f64, ky: f64, kz: f64) -> Result<Complex64> {
    let (ex, ey) = params.envelopes();
    let gx = ex.ft_numeric(kx);
    let gy = ey.ft_numeric(ky);
    let gxx = ex.second_derivative_ft_numeric(kx)?;
    let gyy = ey.second_derivative_ft_numeric(ky)?;
    let g = gx * gy;
    let lap = gxx * gy + gx * gyy;
    let kk = params.grating();
    let rule = crate::numcore::quad::GaussRule::new(32);
    Ok(params
        .modes()
        .iter()
        .map(|mode| {
            let freq = mode.n as f64 * kk - kz;
            let panels = 2 + (freq.abs() * params.slab / PI) as usize;
            let zpart = rule.composite(|z| Complex64::new(0.0, freq * z).exp(), 0.0, params.slab, panels);
            zpart * (g * mode.flat - lap * mode.curvature)
        })
        .sum())
}
