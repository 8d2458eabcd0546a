use serde::{Deserialize, Serialize};

use super::quad::gauss_legendre;
use super::wave::{omega, WaveContext};
use crate::error::{Error, Result};

/// Transverse momentum nodes and quadrature weights on `(-k, k)`.
///
/// Gauss–Legendre nodes never touch `±k`, so `ω(p_j) > 0` on every node,
/// and the odd node count puts a node at exactly `p = 0` where the
/// incident delta is represented.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    center: usize,
    ctx: WaveContext,
}

/// Gauss–Legendre momentum grid with `n` nodes (odd, at least 3).
pub fn gauss_grid(n: usize, ctx: &WaveContext) -> Result<MomentumGrid> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::arg(format!("grid size must be odd and >= 3, got {n}")));
    }
    let k = ctx.k();
    let (x, w) = gauss_legendre(n);
    Ok(MomentumGrid {
        nodes: x.iter().map(|x| k * x).collect(),
        weights: w.iter().map(|w| k * w).collect(),
        center: n / 2,
        ctx: *ctx,
    })
}

impl MomentumGrid {
    /// Builds a grid from explicit data, checking the invariants.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, ctx: WaveContext) -> Result<Self> {
        let n = nodes.len();
        if n != weights.len() || n < 3 || n.is_multiple_of(2) {
            return Err(Error::arg("grid needs an odd number (>= 3) of nodes with matching weights"));
        }
        let k = ctx.k();
        if nodes.iter().any(|p| !p.is_finite() || p.abs() >= k) {
            return Err(Error::arg("grid nodes must lie strictly inside (-k, k)"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("grid nodes must be strictly increasing"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::arg("grid weights must be positive"));
        }
        let center = n / 2;
        if nodes[center] != 0.0 {
            return Err(Error::arg("grid must have its middle node at p = 0"));
        }
        Ok(Self {
            nodes,
            weights,
            center,
            ctx,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn center_index(&self) -> usize {
        self.center
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ctx(&self) -> &WaveContext {
        &self.ctx
    }

    pub fn k(&self) -> f64 {
        self.ctx.k()
    }

    /// Index of the node at `-p_j`.
    #[inline]
    pub fn mirror(&self, j: usize) -> usize {
        self.nodes.len() - 1 - j
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&p| omega(p, &self.ctx).expect("grid nodes are inside (-k, k)"))
            .collect()
    }

    /// True when nodes reverse onto their negatives and weights are
    /// mirror-equal, both within `tol · k`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let k = self.k();
        (0..self.len()).all(|j| {
            let jm = self.mirror(j);
            (self.nodes[j] + self.nodes[jm]).abs() <= tol * k
                && (self.weights[j] - self.weights[jm]).abs() <= tol * k
        })
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    /// `2π δ(p)` on the grid: `2π / w_{j0}` at the center node.
    pub fn delta_vector(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.len()];
        d[self.center] = 2.0 * std::f64::consts::PI / self.weights[self.center];
        d
    }
}
