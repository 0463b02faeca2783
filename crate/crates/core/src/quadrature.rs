//! Gauss-Legendre rules and the tensor quadrature grid on the plate.

use std::f64::consts::PI;

use crate::config::PlateConfig;

/// Gauss-Legendre rule on `[-1, 1]` with ascending nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Newton iteration on `P_n` from the Tricomi initial guess. Nodes are
/// computed for one half and mirrored, so the rule is exactly symmetric.
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_and_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        let hi = n - 1 - i;
        if hi == i {
            nodes[i] = 0.0;
            weights[i] = w;
        } else {
            nodes[hi] = x;
            nodes[i] = -x;
            weights[hi] = w;
            weights[i] = w;
        }
    }
    GaussRule { nodes, weights }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Running Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    values.into_iter().for_each(|v| acc.add(v));
    acc.value()
}

/// Tensor Gauss grid on `(0, pi) x (-ell, ell)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes_x: Vec<f64>,
    weights_x: Vec<f64>,
    nodes_y: Vec<f64>,
    weights_y: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(cfg: &PlateConfig) -> Self {
        Self::with_sizes(cfg.ell(), cfg.n_quad_x(), cfg.n_quad_y())
    }

    pub fn with_sizes(ell: f64, n_x: usize, n_y: usize) -> Self {
        let gx = gauss_legendre(n_x);
        let gy = gauss_legendre(n_y);
        let half = PI / 2.0;
        Self {
            nodes_x: gx.nodes.iter().map(|&t| half + half * t).collect(),
            weights_x: gx.weights.iter().map(|&w| half * w).collect(),
            nodes_y: gy.nodes.iter().map(|&t| ell * t).collect(),
            weights_y: gy.weights.iter().map(|&w| ell * w).collect(),
        }
    }

    pub fn nx(&self) -> usize {
        self.nodes_x.len()
    }
    pub fn ny(&self) -> usize {
        self.nodes_y.len()
    }
    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn nodes_x(&self) -> &[f64] {
        &self.nodes_x
    }
    pub fn nodes_y(&self) -> &[f64] {
        &self.nodes_y
    }
    pub fn weights_x(&self) -> &[f64] {
        &self.weights_x
    }
    pub fn weights_y(&self) -> &[f64] {
        &self.weights_y
    }

    pub fn node(&self, i: usize, k: usize) -> (f64, f64) {
        (self.nodes_x[i], self.nodes_y[k])
    }

    pub fn weight(&self, i: usize, k: usize) -> f64 {
        self.weights_x[i] * self.weights_y[k]
    }

    /// Index of the node at `pi - x_i`.
    pub fn mirror_x(&self, i: usize) -> usize {
        self.nx() - 1 - i
    }

    /// Index of the node at `-y_k`.
    pub fn mirror_y(&self, k: usize) -> usize {
        self.ny() - 1 - k
    }

    /// Nodes with `x < pi/2` (the left half plane).
    pub fn left_half(&self) -> std::ops::Range<usize> {
        0..self.nx() / 2
    }

    pub fn total_area(&self) -> f64 {
        compensated_sum(
            (0..self.nx()).flat_map(|i| (0..self.ny()).map(move |k| (i, k))).map(|(i, k)| self.weight(i, k)),
        )
    }

    pub fn min_node_weight(&self) -> f64 {
        let wx = self.weights_x.iter().cloned().fold(f64::INFINITY, f64::min);
        let wy = self.weights_y.iter().cloned().fold(f64::INFINITY, f64::min);
        wx * wy
    }

    pub fn max_node_weight(&self) -> f64 {
        let wx = self.weights_x.iter().cloned().fold(0.0, f64::max);
        let wy = self.weights_y.iter().cloned().fold(0.0, f64::max);
        wx * wy
    }

    /// Largest gap between consecutive x nodes, boundaries included.
    pub fn max_spacing_x(&self) -> f64 {
        let mut gap = self.nodes_x[0].max(PI - self.nodes_x[self.nx() - 1]);
        for w in self.nodes_x.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap
    }

    /// Iterates `(i, k)` in row-major order (x index outer).
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nx()).flat_map(move |i| (0..self.ny()).map(move |k| (i, k)))
    }
}
