//! The float objective `max_i (w_1 ∗ … ∗ w_k)_i` and its Jacobian.

use serde::{Deserialize, Serialize};

/// Whether the `k` factors are free or constrained to coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMode {
    General,
    Diagonal,
}

impl FactorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorMode::General => "general",
            FactorMode::Diagonal => "diagonal",
        }
    }
}

pub fn conv(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn conv_power(w: &[f64], k: usize) -> Vec<f64> {
    let mut acc = vec![1.0];
    for _ in 0..k {
        acc = conv(&acc, w);
    }
    acc
}

pub fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Shape of one minimax instance. Variables are stored factor by factor,
/// `m + 1` weights each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub k: usize,
    pub m: usize,
    pub mode: FactorMode,
}

impl Shape {
    pub fn width(&self) -> usize {
        self.m + 1
    }

    pub fn factors(&self) -> usize {
        match self.mode {
            FactorMode::General => self.k,
            FactorMode::Diagonal => 1,
        }
    }

    pub fn nvars(&self) -> usize {
        self.factors() * self.width()
    }

    pub fn outputs(&self) -> usize {
        self.k * self.m + 1
    }

    pub fn factor<'a>(&self, x: &'a [f64], j: usize) -> &'a [f64] {
        &x[j * self.width()..(j + 1) * self.width()]
    }

    /// The convolution `w_1 ∗ … ∗ w_k` (or `w^{∗k}`).
    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        match self.mode {
            FactorMode::Diagonal => conv_power(x, self.k),
            FactorMode::General => {
                let mut acc = vec![1.0];
                for j in 0..self.k {
                    acc = conv(&acc, self.factor(x, j));
                }
                acc
            }
        }
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        max_of(&self.values(x))
    }

    /// Values and the dense Jacobian `J[i][v] = ∂c_i/∂x_v`.
    pub fn jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.outputs();
        let w = self.width();
        let mut jac = vec![vec![0.0; self.nvars()]; n];
        match self.mode {
            FactorMode::Diagonal => {
                let rest = conv_power(x, self.k - 1);
                let values = conv(&rest, x);
                let kf = self.k as f64;
                for (i, row) in jac.iter_mut().enumerate() {
                    for t in 0..w.min(i + 1) {
                        if let Some(r) = rest.get(i - t) {
                            row[t] = kf * r;
                        }
                    }
                }
                (values, jac)
            }
            FactorMode::General => {
                let mut prefix = vec![vec![1.0]];
                for j in 0..self.k {
                    let next = conv(&prefix[j], self.factor(x, j));
                    prefix.push(next);
                }
                let mut suffix = vec![vec![1.0]; self.k + 1];
                for j in (0..self.k).rev() {
                    suffix[j] = conv(&suffix[j + 1], self.factor(x, j));
                }
                for j in 0..self.k {
                    let rest = conv(&prefix[j], &suffix[j + 1]);
                    for (i, row) in jac.iter_mut().enumerate() {
                        for t in 0..w.min(i + 1) {
                            if let Some(r) = rest.get(i - t) {
                                row[j * w + t] = *r;
                            }
                        }
                    }
                }
                (prefix.pop().unwrap_or_default(), jac)
            }
        }
    }

    /// Clips negatives and rescales each factor to sum to one.
    pub fn normalize(&self, x: &mut [f64]) {
        let w = self.width();
        for chunk in x.chunks_mut(w) {
            for v in chunk.iter_mut() {
                if *v < 0.0 || !v.is_finite() {
                    *v = 0.0;
                }
            }
            let s: f64 = chunk.iter().sum();
            if s > 0.0 {
                chunk.iter_mut().for_each(|v| *v /= s);
            } else {
                chunk.iter_mut().for_each(|v| *v = 1.0 / w as f64);
            }
        }
    }

    pub fn split(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.chunks(self.width()).map(|c| c.to_vec()).collect()
    }
}
