//! Non-perturbative 2D transfer matrix on a momentum grid.
//!
//! The coefficient vectors `(A, B)` live on the grid nodes, so operators
//! are `2N × 2N` complex matrices. The incident delta `2πδ(p)` is the
//! vector with `2π/w_{j0}` at the center node.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::born::{Side, Sign, TransferTable};
use crate::error::{Error, Result};
use crate::invispot;
use crate::numcore::{MomentumGrid, PotentialSpec};

type CMat = DMatrix<Complex64>;

/// `M22` condition numbers above this flag a spectral singularity.
pub const SINGULARITY_THRESHOLD: f64 = 1e12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Slices used when none are given: 200 per `2π/k` of slab length.
pub fn default_slices(v: &PotentialSpec, grid: &MomentumGrid) -> Result<usize> {
    let (x0, x1) = v.scattering_support()?;
    Ok(((200.0 * (x1 - x0) * grid.k() / (2.0 * PI)).ceil() as usize).max(1))
}

/// Precomputed pieces of the convolution kernel
/// `V_{jl}(x) = (1/2π) v~(x, p_j - p_l) w_l`.
#[allow(clippy::large_enum_variant)]
enum KernelPlan {
    Zero,
    /// `V(x) = Σ_n e^{inKx} C_n` on the slab.
    Modes {
        slab: f64,
        grating: f64,
        terms: Vec<(i32, CMat)>,
    },
    /// `V(x) = E diag(u(x, y_i) w_i) E^H diag(w) / 2π`, `E_{ji} = e^{-ip_j y_i}`.
    Transverse {
        spec: PotentialSpec,
        ys: Vec<f64>,
        wy: Vec<f64>,
        phases: CMat,
        weights: Vec<f64>,
    },
}

impl KernelPlan {
    fn new(v: &PotentialSpec, grid: &MomentumGrid) -> Result<Self> {
        let n = grid.len();
        let nodes = grid.nodes();
        let weights = grid.weights();
        match v {
            PotentialSpec::Constructed2d(params) => {
                let terms = params
                    .modes()
                    .iter()
                    .map(|mode| {
                        let c = CMat::from_fn(n, n, |j, l| {
                            invispot::fourier_coeff_ft(params, mode.n, nodes[j] - nodes[l]) * (weights[l] / (2.0 * PI))
                        });
                        (mode.n, c)
                    })
                    .collect();
                Ok(KernelPlan::Modes {
                    slab: params.slab(),
                    grating: params.grating(),
                    terms,
                })
            }
            PotentialSpec::Custom2d(c) if c.is_zero() => Ok(KernelPlan::Zero),
            PotentialSpec::Custom2d(c) => {
                let (ys, wy) = c.axis_nodes(false, 2.0 * grid.k());
                let phases = CMat::from_fn(n, ys.len(), |j, i| Complex64::new(0.0, -nodes[j] * ys[i]).exp());
                Ok(KernelPlan::Transverse {
                    spec: v.clone(),
                    ys,
                    wy,
                    phases,
                    weights: weights.to_vec(),
                })
            }
            PotentialSpec::Constructed3d(_) => Err(Error::Capability(
                "transfer-matrix evolution is implemented for 2D potentials only".into(),
            )),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, KernelPlan::Zero)
    }

    fn kernel(&self, x: f64, n: usize) -> Result<CMat> {
        match self {
            KernelPlan::Zero => Ok(CMat::zeros(n, n)),
            KernelPlan::Modes { slab, grating, terms } => {
                if !(0.0..=*slab).contains(&x) {
                    return Ok(CMat::zeros(n, n));
                }
                let mut out = CMat::zeros(n, n);
                for (m, c) in terms {
                    out += c * Complex64::new(0.0, *m as f64 * grating * x).exp();
                }
                Ok(out)
            }
            KernelPlan::Transverse {
                spec,
                ys,
                wy,
                phases,
                weights,
            } => {
                let mut scaled = phases.clone();
                for (i, (&y, &w)) in ys.iter().zip(wy).enumerate() {
                    let u = spec.value_2d(x, y)? * w;
                    for j in 0..n {
                        scaled[(j, i)] *= u;
                    }
                }
                let mut out = &scaled * phases.adjoint();
                for (l, &w) in weights.iter().enumerate() {
                    out.column_mut(l).scale_mut(w / (2.0 * PI));
                }
                Ok(out)
            }
        }
    }
}

/// Row factors `α_j = e^{-iω_j x}/(2ω_j)` and column phases `β_l = e^{iω_l x}`.
fn phases(omegas: &[f64], x: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let alpha = omegas
        .iter()
        .map(|&w| Complex64::new(0.0, -w * x).exp() / (2.0 * w))
        .collect();
    let beta = omegas.iter().map(|&w| Complex64::new(0.0, w * x).exp()).collect();
    (alpha, beta)
}

/// The `2N × 2N` matrix of `H(x)` on the grid.
///
/// With `𝒦 = [[1, 1], [-1, -1]]` the blocks are
/// `H11 = αVβ`, `H12 = αVβ̄`, `H21 = -ᾱVβ`, `H22 = -ᾱVβ̄`.
pub fn effective_hamiltonian(v: &PotentialSpec, x: f64, grid: &MomentumGrid) -> Result<CMat> {
    let n = grid.len();
    let plan = KernelPlan::new(v, grid)?;
    let kernel = plan.kernel(x, n)?;
    let (alpha, beta) = phases(&grid.omegas(), x);
    Ok(CMat::from_fn(2 * n, 2 * n, |r, c| {
        let (j, l) = (r % n, c % n);
        let row = if r < n { alpha[j] } else { -alpha[j].conj() };
        let col = if c < n { beta[l] } else { beta[l].conj() };
        row * kernel[(j, l)] * col
    }))
}

/// `-i H(x) U` without forming `H`: `H U = [α; -ᾱ] V (β U_A + β̄ U_B)`.
fn rhs(kernel: &CMat, alpha: &[Complex64], beta: &[Complex64], u: &CMat) -> CMat {
    let n = alpha.len();
    let cols = u.ncols();
    let mut w = CMat::zeros(n, cols);
    for c in 0..cols {
        for j in 0..n {
            w[(j, c)] = beta[j] * u[(j, c)] + beta[j].conj() * u[(j + n, c)];
        }
    }
    let y = kernel * w;
    let mut out = CMat::zeros(2 * n, cols);
    let minus_i = Complex64::new(0.0, -1.0);
    for c in 0..cols {
        for j in 0..n {
            let yj = y[(j, c)];
            out[(j, c)] = minus_i * alpha[j] * yj;
            out[(j + n, c)] = -minus_i * alpha[j].conj() * yj;
        }
    }
    out
}

/// The transfer matrix `M` over a momentum grid, as a dense `2N × 2N`
/// matrix with blocks `[[M11, M12], [M21, M22]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperator {
    grid: MomentumGrid,
    matrix: CMat,
    slices: usize,
    potential_id: String,
}

/// Integrates `U' = -iH(x)U`, `U(x0) = I` across the support with fixed-step
/// classical RK4.
pub fn evolve_transfer(v: &PotentialSpec, grid: &MomentumGrid, slices: usize) -> Result<TransferOperator> {
    if slices == 0 {
        return Err(Error::arg("slices must be at least 1"));
    }
    let n = grid.len();
    let plan = KernelPlan::new(v, grid)?;
    let mut u = CMat::identity(2 * n, 2 * n);
    if !plan.is_zero() {
        let (x0, x1) = v.scattering_support()?;
        let h = (x1 - x0) / slices as f64;
        let omegas = grid.omegas();
        let stage = |x: f64| -> Result<(CMat, Vec<Complex64>, Vec<Complex64>)> {
            let (a, b) = phases(&omegas, x);
            Ok((plan.kernel(x, n)?, a, b))
        };
        let mut left = stage(x0)?;
        for step in 0..slices {
            let x = x0 + h * step as f64;
            let xe = if step + 1 == slices { x1 } else { x + h };
            let mid = stage(x + 0.5 * h)?;
            let right = stage(xe)?;
            let k1 = rhs(&left.0, &left.1, &left.2, &u);
            let k2 = rhs(&mid.0, &mid.1, &mid.2, &(&u + &k1 * Complex64::new(0.5 * h, 0.0)));
            let k3 = rhs(&mid.0, &mid.1, &mid.2, &(&u + &k2 * Complex64::new(0.5 * h, 0.0)));
            let k4 = rhs(&right.0, &right.1, &right.2, &(&u + &k3 * Complex64::new(h, 0.0)));
            u += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0);
            if u.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Integration {
                    step: step + 1,
                    slices,
                });
            }
            left = right;
        }
    }
    Ok(TransferOperator {
        grid: grid.clone(),
        matrix: u,
        slices,
        potential_id: v.label(),
    })
}

/// `M ≈ I - i∫H dx` (first Born order), integrated with composite
/// Gauss–Legendre over the support.
pub fn born_transfer(v: &PotentialSpec, grid: &MomentumGrid, panels: usize) -> Result<TransferOperator> {
    let n = grid.len();
    let mut m = CMat::identity(2 * n, 2 * n);
    let plan = KernelPlan::new(v, grid)?;
    if !plan.is_zero() {
        let (x0, x1) = v.scattering_support()?;
        let rule = crate::numcore::quad::GaussRule::new(16);
        let (xs, ws) = rule.composite_nodes(x0, x1, panels.max(1));
        for (&x, &w) in xs.iter().zip(&ws) {
            let h = effective_hamiltonian(v, x, grid)?;
            m -= h * Complex64::new(0.0, w);
        }
    }
    Ok(TransferOperator {
        grid: grid.clone(),
        matrix: m,
        slices: panels,
        potential_id: format!("born({})", v.label()),
    })
}

/// All four transfer tables plus conditioning diagnostics of `M22`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub left_minus: TransferTable,
    pub left_plus: TransferTable,
    pub right_minus: TransferTable,
    pub right_plus: TransferTable,
    pub m22_condition: f64,
    pub spectral_singularity: bool,
}

impl Extraction {
    pub fn table(&self, side: Side, sign: Sign) -> &TransferTable {
        match (side, sign) {
            (Side::Left, Sign::Minus) => &self.left_minus,
            (Side::Left, Sign::Plus) => &self.left_plus,
            (Side::Right, Sign::Minus) => &self.right_minus,
            (Side::Right, Sign::Plus) => &self.right_plus,
        }
    }

    /// `(M11 - M22⁻¹ - M12 M22⁻¹ M21) d = T^l_+ - T^r_-`.
    pub fn reciprocity_vector(&self) -> Vec<Complex64> {
        self.left_plus
            .values
            .iter()
            .zip(&self.right_minus.values)
            .map(|(a, b)| a - b)
            .collect()
    }
}

impl TransferOperator {
    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn potential_id(&self) -> &str {
        &self.potential_id
    }

    /// Block `(i, j)` with `i, j ∈ {1, 2}`.
    pub fn block(&self, i: usize, j: usize) -> CMat {
        let n = self.grid.len();
        self.matrix.view(((i - 1) * n, (j - 1) * n), (n, n)).into_owned()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == CMat::identity(self.matrix.nrows(), self.matrix.ncols())
    }

    fn delta(&self) -> DVector<Complex64> {
        DVector::from_iterator(
            self.grid.len(),
            self.grid.delta_vector().into_iter().map(|d| Complex64::new(d, 0.0)),
        )
    }

    /// Solves for the four transfer tables with one factorization of `M22`.
    pub fn extract_all(&self) -> Result<Extraction> {
        let n = self.grid.len();
        let (m11, m12, m21, m22) = (self.block(1, 1), self.block(1, 2), self.block(2, 1), self.block(2, 2));
        let d = self.delta();

        let sv = m22.clone().singular_values();
        let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let lu = m22.clone().lu();
        let solve = |b: &DVector<Complex64>| -> DVector<Complex64> {
            lu.solve(b)
                .filter(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
                .unwrap_or_else(|| {
                    m22.clone()
                        .svd(true, true)
                        .solve(b, smax * 1e-15)
                        .unwrap_or_else(|_| DVector::from_element(n, Complex64::new(f64::NAN, f64::NAN)))
                })
        };

        let m21d = &m21 * &d;
        let x_l = solve(&m21d);
        let left_minus = -&x_l;
        let left_plus = &m11 * &d - &d - &m12 * &x_l;
        let x_r = solve(&d);
        let right_minus = &x_r - &d;
        let right_plus = &m12 * &x_r;

        let table = |side, sign, v: DVector<Complex64>| TransferTable {
            side,
            sign,
            grid: self.grid.clone(),
            values: v.iter().copied().collect(),
        };
        Ok(Extraction {
            left_minus: table(Side::Left, Sign::Minus, left_minus),
            left_plus: table(Side::Left, Sign::Plus, left_plus),
            right_minus: table(Side::Right, Sign::Minus, right_minus),
            right_plus: table(Side::Right, Sign::Plus, right_plus),
            m22_condition: condition,
            spectral_singularity: condition.is_nan() || condition > SINGULARITY_THRESHOLD,
        })
    }

    /// The discrete symplectic form: `B(C1, C2) = Σ_j w_j ω_j C1(-p_j)ᵀ Ω C2(p_j)`,
    /// i.e. `Q = [[0, PG], [-PG, 0]]` with parity `P` and `G = diag(w ω)`.
    pub fn symplectic_form(grid: &MomentumGrid) -> Result<CMat> {
        if !grid.is_symmetric(1e-14) {
            return Err(Error::arg("symplectic check needs a grid symmetric under p -> -p"));
        }
        let n = grid.len();
        let omegas = grid.omegas();
        let mut q = CMat::zeros(2 * n, 2 * n);
        for j in 0..n {
            let g = Complex64::new(grid.weights()[j] * omegas[j], 0.0);
            let mj = grid.mirror(j);
            q[(mj, n + j)] = g;
            q[(n + mj, j)] = -g;
        }
        Ok(q)
    }
}

pub fn extract_t(m: &TransferOperator, side: Side, sign: Sign) -> Result<TransferTable> {
    Ok(m.extract_all()?.table(side, sign).clone())
}

/// `‖Mᵀ Q M - Q‖_F / ‖Q‖_F`, the discrete form of `M(-p)ᵀ Ω M(p) = Ω`.
pub fn check_symplectic(m: &TransferOperator) -> Result<f64> {
    let q = TransferOperator::symplectic_form(&m.grid)?;
    let r = m.matrix.transpose() * &q * &m.matrix - &q;
    Ok(r.norm() / q.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    MinusInf,
    PlusInf,
}

/// Coefficient vectors `A(p_j)`, `B(p_j)` of an asymptotic solution.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCoeffs {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub limit: Limit,
}

/// A scattering solution through its coefficients at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub minus: AsymptoticCoeffs,
    pub plus: AsymptoticCoeffs,
}

impl Solution {
    /// Propagates `(A_-, B_-)` through `M`.
    pub fn from_incoming(m: &TransferOperator, a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        let n = m.grid.len();
        if a.len() != n || b.len() != n {
            return Err(Error::arg("coefficient vectors must match the grid"));
        }
        let c = DVector::from_iterator(2 * n, a.iter().chain(&b).copied());
        let out = &m.matrix * c;
        Ok(Self {
            minus: AsymptoticCoeffs {
                a,
                b,
                limit: Limit::MinusInf,
            },
            plus: AsymptoticCoeffs {
                a: out.rows(0, n).iter().copied().collect(),
                b: out.rows(n, n).iter().copied().collect(),
                limit: Limit::PlusInf,
            },
        })
    }

    /// `ψ^l`: `A_- = 2πδ`, `B_- = T^l_-`.
    pub fn left_incident(m: &TransferOperator, ex: &Extraction) -> Result<Self> {
        let d: Vec<Complex64> = m.grid.delta_vector().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        Self::from_incoming(m, d, ex.left_minus.values.clone())
    }

    /// `ψ^r`: `A_- = 0`, `B_- = T^r_- + 2πδ`.
    pub fn right_incident(m: &TransferOperator, ex: &Extraction) -> Result<Self> {
        let n = m.grid.len();
        let d = m.grid.delta_vector();
        let b = ex.right_minus.values.iter().zip(&d).map(|(t, dd)| t + dd).collect();
        Self::from_incoming(m, vec![ZERO; n], b)
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        let s = |c: &AsymptoticCoeffs| AsymptoticCoeffs {
            a: c.a.iter().map(|z| z * lambda).collect(),
            b: c.b.iter().map(|z| z * lambda).collect(),
            limit: c.limit,
        };
        Self {
            minus: s(&self.minus),
            plus: s(&self.plus),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSample {
    pub limit: Limit,
    pub value: Complex64,
}

/// `j(±∞) = (-i/π) Σ_j w_j ω_j Δ±(p_j)` with
/// `Δ = A1(-p) B2(p) - B1(-p) A2(p)`.
pub fn conserved_current(s1: &Solution, s2: &Solution, grid: &MomentumGrid) -> Result<(CurrentSample, CurrentSample)> {
    if !grid.is_symmetric(1e-14) {
        return Err(Error::arg("conserved current needs a symmetric grid"));
    }
    let omegas = grid.omegas();
    let j = |c1: &AsymptoticCoeffs, c2: &AsymptoticCoeffs| -> Complex64 {
        let sum: Complex64 = (0..grid.len())
            .map(|i| {
                let m = grid.mirror(i);
                (c1.a[m] * c2.b[i] - c1.b[m] * c2.a[i]) * (grid.weights()[i] * omegas[i])
            })
            .sum();
        sum * Complex64::new(0.0, -1.0 / PI)
    };
    Ok((
        CurrentSample {
            limit: Limit::MinusInf,
            value: j(&s1.minus, &s2.minus),
        },
        CurrentSample {
            limit: Limit::PlusInf,
            value: j(&s1.plus, &s2.plus),
        },
    ))
}

/// Invisibility flags, each decided on the
/// sup-norm of a transfer table relative to `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predicates {
    pub left_reflectionless: bool,
    pub right_reflectionless: bool,
    pub left_transparent: bool,
    pub right_transparent: bool,
    pub left_invisible: bool,
    pub right_invisible: bool,
    pub reciprocal_transmission: bool,
    pub scale: f64,
    pub tol: f64,
}

/// Flags from the four tables; `scale` is the largest of their sup-norms.
pub fn predicates_from_tables(ex: &Extraction, tol: f64) -> Predicates {
    let norms = [
        ex.left_minus.sup_norm(),
        ex.left_plus.sup_norm(),
        ex.right_minus.sup_norm(),
        ex.right_plus.sup_norm(),
    ];
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let small = |x: f64| x <= tol * scale;
    let recip = ex.reciprocity_vector().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (lr, lt, rt, rr) = (small(norms[0]), small(norms[1]), small(norms[2]), small(norms[3]));
    Predicates {
        left_reflectionless: lr,
        right_reflectionless: rr,
        left_transparent: lt,
        right_transparent: rt,
        left_invisible: lr && lt,
        right_invisible: rr && rt,
        reciprocal_transmission: small(recip),
        scale,
        tol,
    }
}

pub fn predicates(m: &TransferOperator, tol: f64) -> Result<Predicates> {
    Ok(predicates_from_tables(&m.extract_all()?, tol))
}

#[derive(Serialize, Deserialize)]
struct OperatorDump {
    potential_id: String,
    slices: usize,
    grid: MomentumGrid,
    /// `M11, M12, M21, M22`, each row-major `[re, im]` pairs.
    blocks: [Vec<[f64; 2]>; 4],
}

impl TransferOperator {
    pub fn to_json(&self) -> String {
        let blocks = [(1, 1), (1, 2), (2, 1), (2, 2)].map(|(i, j)| {
            let b = self.block(i, j);
            let n = b.nrows();
            (0..n * n).map(|r| {
                let z = b[(r / n, r % n)];
                [z.re, z.im]
            }).collect()
        });
        let dump = OperatorDump {
            potential_id: self.potential_id.clone(),
            slices: self.slices,
            grid: self.grid.clone(),
            blocks,
        };
        serde_json::to_string_pretty(&dump).expect("operator dump serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: OperatorDump = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let grid = MomentumGrid::from_parts(dump.grid.nodes().to_vec(), dump.grid.weights().to_vec(), *dump.grid.ctx())?;
        let n = grid.len();
        if dump.blocks.iter().any(|b| b.len() != n * n) {
            return Err(Error::parse(0, format!("each block needs {} entries", n * n)));
        }
        if dump.blocks.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::parse(0, "non-finite matrix entry"));
        }
        let mut matrix = CMat::zeros(2 * n, 2 * n);
        for (bi, block) in dump.blocks.iter().enumerate() {
            let (r0, c0) = ((bi / 2) * n, (bi % 2) * n);
            for (idx, z) in block.iter().enumerate() {
                matrix[(r0 + idx / n, c0 + idx % n)] = Complex64::new(z[0], z[1]);
            }
        }
        Ok(Self {
            grid,
            matrix,
            slices: dump.slices,
            potential_id: dump.potential_id,
        })
    }
}
