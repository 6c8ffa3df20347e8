//! Seeded, band-limited random fields.
//!
//! Every field is a short sum of plane waves whose integer wavenumbers lie in
//! the lowest third of each axis' resolvable band (`|m| <= max(1, N/6)`), so
//! the checkerboard null mode of centered differences never appears.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::{binomial, Form, Grid, VectorField};

pub struct FieldSampler {
    rng: ChaCha8Rng,
    terms: usize,
    max_mode: Option<i64>,
}

impl FieldSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            terms: 4,
            max_mode: None,
        }
    }

    /// Caps the wavenumbers on every axis, e.g. to keep fields smooth for
    /// convergence studies.
    pub fn with_max_mode(mut self, m: i64) -> Self {
        self.max_mode = Some(m);
        self
    }

    pub fn with_terms(mut self, terms: usize) -> Self {
        self.terms = terms;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Sum of random plane waves with amplitudes in `[-1, 1]`.
    pub fn scalar(&mut self, grid: &Grid) -> Vec<f64> {
        let n = grid.dim();
        let lengths = grid.lengths();
        let waves: Vec<(Vec<f64>, f64, f64)> = (0..self.terms)
            .map(|_| {
                let k = (0..n)
                    .map(|a| {
                        let cap = self
                            .max_mode
                            .unwrap_or_else(|| (grid.sizes()[a] as i64 / 6).max(1));
                        let m = self.rng.gen_range(-cap..=cap);
                        2.0 * PI * m as f64 / lengths[a]
                    })
                    .collect();
                let amp = self.rng.gen_range(-1.0..1.0);
                let phase = self.rng.gen_range(0.0..2.0 * PI);
                (k, amp, phase)
            })
            .collect();
        grid.sample(|x| {
            waves
                .iter()
                .map(|(k, amp, phase)| {
                    let arg: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum();
                    amp * (arg + phase).cos()
                })
                .sum()
        })
    }

    /// `base + amplitude * s(x) / max|s|`, strictly positive when
    /// `amplitude < base`.
    pub fn positive_scalar(&mut self, grid: &Grid, base: f64, amplitude: f64) -> Vec<f64> {
        let s = self.scalar(grid);
        let peak = s.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        s.into_iter().map(|v| base + amplitude * v / peak).collect()
    }

    pub fn form(&mut self, grid: &Arc<Grid>, degree: usize) -> Form {
        let comps = (0..binomial(grid.dim(), degree))
            .map(|_| self.scalar(grid))
            .collect();
        Form::new(grid.clone(), degree, comps).expect("sampled shape")
    }

    pub fn vector_field(&mut self, grid: &Arc<Grid>) -> VectorField {
        let comps = (0..grid.dim()).map(|_| self.scalar(grid)).collect();
        VectorField::new(grid.clone(), comps).expect("sampled shape")
    }

    /// Positive density as a top-degree form, `ρ = ρ̃ dV`.
    pub fn density(&mut self, grid: &Arc<Grid>, base: f64, amplitude: f64) -> Form {
        let rho_tilde = self.positive_scalar(grid, base, amplitude);
        let scale = grid.volume_scale();
        Form::top(grid, rho_tilde.into_iter().map(|v| v * scale).collect()).expect("top form")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field() {
        let g = Arc::new(Grid::periodic(&[8, 8]).unwrap());
        let a = FieldSampler::new(3).form(&g, 1);
        let b = FieldSampler::new(3).form(&g, 1);
        assert_eq!(a, b);
        let c = FieldSampler::new(4).form(&g, 1);
        assert_ne!(a, c);
    }

    #[test]
    fn density_is_positive() {
        let g = Arc::new(Grid::periodic(&[8, 8, 8]).unwrap());
        let rho = FieldSampler::new(1).density(&g, 2.0, 0.5);
        assert!(rho.values().iter().all(|&v| v >= 1.5 - 1e-12));
    }

    #[test]
    fn sampled_fields_have_no_checkerboard_content() {
        let g = Arc::new(Grid::periodic(&[16]).unwrap());
        let f = FieldSampler::new(9).scalar(&g);
        let alt: f64 = f.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -*v }).sum();
        assert!(alt.abs() < 1e-12);
    }
}
