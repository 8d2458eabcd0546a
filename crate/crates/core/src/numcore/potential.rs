use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::quad::GaussRule;
use crate::error::{Error, Result};
use crate::invispot::{self, ConstructionParams, ConstructionParams3d};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite() && x1 > x0 && y1 > y0) {
            return Err(Error::arg(format!("degenerate support [{x0}, {x1}] x [{y0}, {y1}]")));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Complex field sampled on a uniform rectangular grid, interpolated with
/// tensor Catmull–Rom cubics. Zero outside the sampled rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    rect: Rect,
    nx: usize,
    ny: usize,
    values: Vec<Complex64>,
}

impl SampledField {
    /// `values[ix * ny + iy]` is the sample at `(x0 + ix·dx, y0 + iy·dy)`.
    pub fn new(rect: Rect, nx: usize, ny: usize, values: Vec<Complex64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::arg("sampled field needs at least 2 samples per axis"));
        }
        if values.len() != nx * ny {
            return Err(Error::arg(format!("expected {} samples, got {}", nx * ny, values.len())));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::arg("sampled field values must be finite"));
        }
        Ok(Self { rect, nx, ny, values })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn at(&self, ix: isize, iy: isize) -> Complex64 {
        let ix = ix.clamp(0, self.nx as isize - 1) as usize;
        let iy = iy.clamp(0, self.ny as isize - 1) as usize;
        self.values[ix * self.ny + iy]
    }

    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        if !self.rect.contains(x, y) {
            return Complex64::new(0.0, 0.0);
        }
        let dx = (self.rect.x1 - self.rect.x0) / (self.nx - 1) as f64;
        let dy = (self.rect.y1 - self.rect.y0) / (self.ny - 1) as f64;
        let fx = ((x - self.rect.x0) / dx).min((self.nx - 1) as f64);
        let fy = ((y - self.rect.y0) / dy).min((self.ny - 1) as f64);
        let ix = (fx.floor() as isize).min(self.nx as isize - 2);
        let iy = (fy.floor() as isize).min(self.ny as isize - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let mut rows = [Complex64::new(0.0, 0.0); 4];
        for (r, row) in rows.iter_mut().enumerate() {
            let xi = ix - 1 + r as isize;
            *row = catmull_rom(
                [self.at(xi, iy - 1), self.at(xi, iy), self.at(xi, iy + 1), self.at(xi, iy + 2)],
                ty,
            );
        }
        catmull_rom(rows, tx)
    }

    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.rect.x1 - self.rect.x0) / (self.nx - 1) as f64,
            (self.rect.y1 - self.rect.y0) / (self.ny - 1) as f64,
        )
    }
}

fn catmull_rom(p: [Complex64; 4], t: f64) -> Complex64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (p[1] * 2.0
        + (p[2] - p[0]) * t
        + (p[0] * 2.0 - p[1] * 5.0 + p[2] * 4.0 - p[3]) * t2
        + (p[1] * 3.0 - p[0] - p[2] * 3.0 + p[3]) * t3)
        * 0.5
}

pub type FieldFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum Field {
    Zero,
    Closure(FieldFn),
    Sampled(SampledField),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Zero => write!(f, "Zero"),
            Field::Closure(_) => write!(f, "Closure(..)"),
            Field::Sampled(s) => write!(f, "Sampled({}x{})", s.nx, s.ny),
        }
    }
}

/// A user-supplied 2D potential with rectangular support.
#[derive(Debug, Clone)]
pub struct Custom2d {
    rect: Rect,
    field: Field,
    scale: Complex64,
    /// Minimum quadrature panels per axis for closure fields.
    resolution: (usize, usize),
    label: String,
}

impl Custom2d {
    /// `v ≡ 0`, on a nominal unit support.
    pub fn zero() -> Self {
        Self {
            rect: Rect::new(0.0, 1.0, -0.5, 0.5).expect("unit rectangle"),
            field: Field::Zero,
            scale: Complex64::new(1.0, 0.0),
            resolution: (1, 1),
            label: "zero".into(),
        }
    }

    /// Closure potential; `f` is only sampled inside `rect`.
    pub fn from_fn<F>(rect: Rect, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            rect,
            field: Field::Closure(Arc::new(f)),
            scale: Complex64::new(1.0, 0.0),
            resolution: (8, 8),
            label: label.into(),
        }
    }

    pub fn from_samples(field: SampledField, label: impl Into<String>) -> Self {
        Self {
            rect: field.rect,
            field: Field::Sampled(field),
            scale: Complex64::new(1.0, 0.0),
            resolution: (1, 1),
            label: label.into(),
        }
    }

    /// Smooth random complex potential on `[0,1] × [-1/2, 1/2]`:
    /// `A sin²(πx) cos²(πy) Σ_t c_t exp(i(α_t x + β_t y))` with three
    /// random modes. Deterministic in `seed`.
    pub fn random_smooth(seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(Complex64, f64, f64)> = (0..3)
            .map(|_| {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (c, rng.gen_range(-3.0 * PI..3.0 * PI), rng.gen_range(-3.0 * PI..3.0 * PI))
            })
            .collect();
        let rect = Rect::new(0.0, 1.0, -0.5, 0.5).expect("unit rectangle");
        Self::from_fn(rect, format!("random_smooth(seed={seed}, amplitude={amplitude})"), move |x, y| {
            let window = (PI * x).sin().powi(2) * (PI * y).cos().powi(2);
            let sum: Complex64 = modes
                .iter()
                .map(|(c, a, b)| c * Complex64::new(0.0, a * x + b * y).exp())
                .sum();
            sum * (amplitude * window)
        })
    }

    pub fn with_resolution(mut self, panels_x: usize, panels_y: usize) -> Self {
        self.resolution = (panels_x.max(1), panels_y.max(1));
        self
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            scale: self.scale * alpha,
            ..self.clone()
        }
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.field, Field::Zero) || self.scale == Complex64::new(0.0, 0.0)
    }

    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        if !self.rect.contains(x, y) {
            return Complex64::new(0.0, 0.0);
        }
        let raw = match &self.field {
            Field::Zero => return Complex64::new(0.0, 0.0),
            Field::Closure(f) => f(x, y),
            Field::Sampled(s) => s.value(x, y),
        };
        raw * self.scale
    }

    /// Gauss nodes and weights along one axis, resolving features of the
    /// field and a phase `e^{-iqs}` with `|q| ≤ q_max`.
    pub(crate) fn axis_nodes(&self, along_x: bool, q_max: f64) -> (Vec<f64>, Vec<f64>) {
        let (lo, hi) = if along_x {
            (self.rect.x0, self.rect.x1)
        } else {
            (self.rect.y0, self.rect.y1)
        };
        let osc = (q_max.abs() * (hi - lo) / PI).ceil() as usize;
        match &self.field {
            Field::Sampled(s) => {
                // One panel per cell keeps each panel polynomial.
                let cells = if along_x { s.nx - 1 } else { s.ny - 1 };
                let order = 4 + (2 * osc).div_ceil(cells).min(28);
                GaussRule::new(order).composite_nodes(lo, hi, cells)
            }
            _ => {
                let base = if along_x { self.resolution.0 } else { self.resolution.1 };
                GaussRule::new(24).composite_nodes(lo, hi, base + osc)
            }
        }
    }

    /// `∫∫ dx dy e^{-i(Kx x + Ky y)} v(x, y)` by tensor Gauss quadrature.
    pub fn ft(&self, kx: f64, ky: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let (xs, wx) = self.axis_nodes(true, kx);
        let (ys, wy) = self.axis_nodes(false, ky);
        let ey: Vec<Complex64> = ys
            .iter()
            .zip(&wy)
            .map(|(&y, &w)| Complex64::new(0.0, -ky * y).exp() * w)
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (&x, &w) in xs.iter().zip(&wx) {
            let row: Complex64 = ys.iter().zip(&ey).map(|(&y, e)| self.value(x, y) * e).sum();
            total += row * Complex64::new(0.0, -kx * x).exp() * w;
        }
        total
    }
}

/// A 2D or 3D scattering potential with bounded support.
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    Constructed2d(ConstructionParams),
    Constructed3d(ConstructionParams3d),
    Custom2d(Custom2d),
}

impl PotentialSpec {
    pub fn zero() -> Self {
        PotentialSpec::Custom2d(Custom2d::zero())
    }

    pub fn dimension(&self) -> usize {
        match self {
            PotentialSpec::Constructed3d(_) => 3,
            _ => 2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            PotentialSpec::Constructed2d(p) => format!(
                "constructed2d(l={}, m={}, slab={}, k={}, envelope={:?})",
                p.ell(),
                p.m(),
                p.slab(),
                p.ctx().k(),
                p.envelope().kind()
            ),
            PotentialSpec::Constructed3d(p) => {
                format!("constructed3d(l={}, m={}, slab={}, k={})", p.ell(), p.m(), p.slab(), p.ctx().k())
            }
            PotentialSpec::Custom2d(c) => format!("custom2d({})", c.label()),
        }
    }

    /// Interval along the scattering axis outside which `v` vanishes (2D).
    pub fn scattering_support(&self) -> Result<(f64, f64)> {
        match self {
            PotentialSpec::Constructed2d(p) => Ok((0.0, p.slab())),
            PotentialSpec::Custom2d(c) => Ok((c.rect().x0, c.rect().x1)),
            PotentialSpec::Constructed3d(_) => Err(Error::arg("3D potentials have no 2D scattering support")),
        }
    }

    /// `v → αv`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        match self {
            PotentialSpec::Constructed2d(p) => PotentialSpec::Constructed2d(p.scaled(alpha)),
            PotentialSpec::Constructed3d(p) => PotentialSpec::Constructed3d(p.scaled(alpha)),
            PotentialSpec::Custom2d(c) => PotentialSpec::Custom2d(c.scaled(alpha)),
        }
    }

    pub fn value_2d(&self, x: f64, y: f64) -> Result<Complex64> {
        match self {
            PotentialSpec::Constructed2d(p) => invispot::potential_value_2d(p, x, y),
            PotentialSpec::Custom2d(c) => Ok(c.value(x, y)),
            PotentialSpec::Constructed3d(_) => Err(Error::arg("value_2d called on a 3D potential")),
        }
    }
}

/// Two-dimensional Fourier transform `v~~(Kx, Ky)`.
///
/// Constructed potentials use their closed form (removable singularities
/// evaluated by limit); custom potentials use tensor Gauss quadrature.
pub fn potential_ft(v: &PotentialSpec, kx: f64, ky: f64) -> Result<Complex64> {
    match v {
        PotentialSpec::Constructed2d(p) => Ok(invispot::potential_ft_2d(p, kx, ky)),
        PotentialSpec::Custom2d(c) => Ok(c.ft(kx, ky)),
        PotentialSpec::Constructed3d(_) => Err(Error::arg("use potential_ft_3d for 3D potentials")),
    }
}
