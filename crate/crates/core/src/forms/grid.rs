use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A periodic, uniformly spaced grid on the flat torus `T^n` (`n` in 1..=3)
/// with a constant diagonal metric.
///
/// Nodes are stored row-major: axis 0 varies slowest. Every axis wraps
/// around, so the grid models a closed manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    sizes: Vec<usize>,
    spacings: Vec<f64>,
    metric: Vec<f64>,
}

impl Grid {
    pub fn new(sizes: Vec<usize>, spacings: Vec<f64>, metric: Vec<f64>) -> Result<Self> {
        let n = sizes.len();
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension must be 1, 2 or 3, got {n}")));
        }
        if spacings.len() != n || metric.len() != n {
            return Err(Error::InvalidGrid(format!(
                "expected {n} spacings and metric coefficients, got {} and {}",
                spacings.len(),
                metric.len()
            )));
        }
        for &s in &sizes {
            if s < 4 || s % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis sizes must be even and at least 4, got {s}"
                )));
            }
        }
        if spacings.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid("spacings must be positive".into()));
        }
        if metric.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidGrid("metric coefficients must be positive".into()));
        }
        Ok(Self { sizes, spacings, metric })
    }

    /// Grid covering `[0, 2π)^n` with a Euclidean metric.
    pub fn periodic(sizes: &[usize]) -> Result<Self> {
        let spacings = sizes.iter().map(|&s| 2.0 * PI / s as f64).collect();
        Self::new(sizes.to_vec(), spacings, vec![1.0; sizes.len()])
    }

    /// Same nodes and spacings, different metric.
    pub fn with_metric(&self, metric: Vec<f64>) -> Result<Self> {
        Self::new(self.sizes.clone(), self.spacings.clone(), metric)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    /// `sqrt(det g)`, the single component of the volume form `dV`.
    pub fn volume_scale(&self) -> f64 {
        self.metric.iter().product::<f64>().sqrt()
    }

    /// Product of the spacings: the coordinate measure of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacings.iter().product()
    }

    /// Period of each axis, `N_i h_i`.
    pub fn lengths(&self) -> Vec<f64> {
        self.sizes
            .iter()
            .zip(&self.spacings)
            .map(|(&n, &h)| n as f64 * h)
            .collect()
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn stride(&self, axis: usize) -> usize {
        self.sizes[axis + 1..].iter().product()
    }

    /// Integer coordinates of a flat node index.
    pub fn node(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            out[axis] = idx % self.sizes[axis];
            idx /= self.sizes[axis];
        }
        out
    }

    /// Physical coordinates `x_i = j_i h_i` of a flat node index.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.node(idx)
            .into_iter()
            .zip(&self.spacings)
            .map(|(j, &h)| j as f64 * h)
            .collect()
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.coords(i))).collect()
    }

    /// Centered difference `(f_{j+1} - f_{j-1}) / 2h` along `axis`, with
    /// periodic wraparound.
    pub fn centered_difference(&self, f: &[f64], axis: usize) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.len());
        let stride = self.stride(axis);
        let size = self.sizes[axis];
        let wrap = stride * size;
        let inv = 1.0 / (2.0 * self.spacings[axis]);
        let mut out = vec![0.0; f.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let c = (idx / stride) % size;
            let fwd = if c + 1 == size { idx + stride - wrap } else { idx + stride };
            let bwd = if c == 0 { idx + wrap - stride } else { idx - stride };
            *o = (f[fwd] - f[bwd]) * inv;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(vec![3], vec![1.0], vec![1.0]).is_err());
        assert!(Grid::new(vec![5], vec![1.0], vec![1.0]).is_err());
        assert!(Grid::new(vec![4], vec![0.0], vec![1.0]).is_err());
        assert!(Grid::new(vec![4], vec![1.0], vec![-1.0]).is_err());
        assert!(Grid::new(vec![4, 4, 4, 4], vec![1.0; 4], vec![1.0; 4]).is_err());
        assert!(Grid::new(vec![4, 4], vec![1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn node_roundtrip_is_row_major() {
        let g = Grid::periodic(&[4, 6, 8]).unwrap();
        assert_eq!(g.node(1), vec![0, 0, 1]);
        assert_eq!(g.node(8), vec![0, 1, 0]);
        assert_eq!(g.node(48), vec![1, 0, 0]);
        assert_eq!(g.stride(0), 48);
    }

    #[test]
    fn centered_difference_wraps() {
        let g = Grid::new(vec![4], vec![PI / 2.0], vec![1.0]).unwrap();
        let d = g.centered_difference(&[0.0, 1.0, 0.0, -1.0], 0);
        let e = [2.0 / PI, 0.0, -2.0 / PI, 0.0];
        for (a, b) in d.iter().zip(e) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn volume_scale_uses_sqrt_det() {
        let g = Grid::new(vec![4, 4], vec![1.0, 1.0], vec![4.0, 9.0]).unwrap();
        assert_eq!(g.volume_scale(), 6.0);
    }
}
