use std::sync::Arc;

use crate::error::Result;
use crate::fluid::{density_function, velocity_sharp, FluidCotangent, FluidState, FluidTangent};
use crate::forms::{Form, Grid};
use crate::sampling::FieldSampler;

use super::{positive, require_dim, HamiltonianSystem, InitialCondition};

/// Compressible isentropic fluid with internal energy
/// `U(ρ̃) = K_g ρ̃^{γ-1} / (γ - 1)`, state `(θ, ρ)`.
#[derive(Clone, Debug)]
pub struct CompressibleFluid {
    grid: Arc<Grid>,
    gas_constant: f64,
    gamma: f64,
}

impl CompressibleFluid {
    pub fn new(grid: Arc<Grid>, gas_constant: f64, gamma: f64) -> Result<Self> {
        require_dim(&grid, 3, "fluid")?;
        positive("gamma - 1", gamma - 1.0)?;
        Ok(Self {
            grid,
            gas_constant: positive("K_g", gas_constant)?,
            gamma,
        })
    }

    pub fn gas_constant(&self) -> f64 {
        self.gas_constant
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn as_state(&self, state: &[Form]) -> Result<FluidState> {
        self.check_state(state)?;
        FluidState::new(state[0].clone(), state[1].clone())
    }

    /// `∫ (½ ρ̃ |θ|² + ρ̃ U(ρ̃)) dV`.
    pub fn energy(&self, s: &FluidState) -> Result<f64> {
        let rt = density_function(&s.rho)?;
        let kinetic = s.theta.wedge(&s.theta.hodge())?.mul_pointwise(&rt).scale(0.5);
        let (k, g) = (self.gas_constant, self.gamma);
        let internal = Form::volume(&self.grid).mul_pointwise(&rt.iter().map(|r| k * r.powf(g) / (g - 1.0)).collect::<Vec<_>>());
        (&kinetic + &internal).integrate()
    }

    /// Flux two-form `e_θ = ρ̃ ⋆θ` and Bernoulli function
    /// `e_ρ = ½ |θ|² + K_g γ ρ̃^{γ-1} / (γ - 1)`.
    pub fn efforts(&self, s: &FluidState) -> Result<FluidCotangent> {
        let rt = density_function(&s.rho)?;
        let (k, g) = (self.gas_constant, self.gamma);
        let speed2 = s.theta.wedge(&s.theta.hodge())?.hodge();
        let enthalpy: Vec<f64> = rt.iter().map(|r| k * g * r.powf(g - 1.0) / (g - 1.0)).collect();
        let bernoulli = speed2.values().iter().zip(&enthalpy).map(|(v2, h)| 0.5 * v2 + h).collect();
        let bernoulli = Form::scalar(&self.grid, bernoulli)?;
        FluidCotangent::new(s.theta.hodge().mul_pointwise(&rt), bernoulli)
    }

    /// `(θ̇, ρ̇) = -[♯](δH)`.
    pub fn rates(&self, s: &FluidState) -> Result<FluidTangent> {
        let v = velocity_sharp(&self.efforts(s)?, s)?;
        Ok(FluidTangent {
            theta_dot: -&v.theta_dot,
            rho_dot: -&v.rho_dot,
        })
    }
}

impl HamiltonianSystem for CompressibleFluid {
    fn name(&self) -> &'static str {
        "fluid"
    }

    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn fields(&self) -> Vec<(&'static str, usize)> {
        vec![("theta", 1), ("rho", 3)]
    }

    fn hamiltonian(&self, state: &[Form]) -> Result<f64> {
        self.energy(&self.as_state(state)?)
    }

    fn gradient(&self, state: &[Form]) -> Result<Vec<Form>> {
        let e = self.efforts(&self.as_state(state)?)?;
        Ok(vec![e.e_theta, e.e_rho])
    }

    fn evolution(&self, state: &[Form]) -> Result<Vec<Form>> {
        let v = self.rates(&self.as_state(state)?)?;
        Ok(vec![v.theta_dot, v.rho_dot])
    }

    /// Total mass `∫ ρ`.
    fn conserved(&self, state: &[Form]) -> Result<f64> {
        self.check_state(state)?;
        state[1].integrate()
    }

    fn initial_state(&self, init: &InitialCondition) -> Result<Vec<Form>> {
        let mut s = FieldSampler::new(init.seed);
        let theta = s.form(&self.grid, 1).scale(0.2 * init.amplitude);
        let rho = s.density(&self.grid, 1.0, 0.2);
        Ok(vec![theta, rho])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn fluid(metric: Vec<f64>) -> CompressibleFluid {
        let g = Grid::periodic(&[8, 8, 8]).unwrap().with_metric(metric).unwrap();
        CompressibleFluid::new(Arc::new(g), 1.0, 1.4).unwrap()
    }

    #[test]
    fn parameters_validated() {
        let g = Arc::new(Grid::periodic(&[8, 8, 8]).unwrap());
        assert!(CompressibleFluid::new(g.clone(), 1.0, 1.0).is_err());
        assert!(CompressibleFluid::new(g, 0.0, 1.4).is_err());
    }

    #[test]
    fn nonpositive_density_rejected() {
        let f = fluid(vec![1.0; 3]);
        let state = vec![Form::zeros(&f.grid, 1), Form::zeros(&f.grid, 3)];
        assert!(matches!(f.evolution(&state), Err(Error::NonPositiveDensity { .. })));
    }

    #[test]
    fn rest_state_is_stationary() {
        let f = fluid(vec![1.0; 3]);
        let state = vec![Form::zeros(&f.grid, 1), Form::volume(&f.grid).scale(1.3)];
        let v = f.evolution(&state).unwrap();
        assert!(v[0].max_abs() < 1e-15 && v[1].max_abs() < 1e-15);
    }

    #[test]
    fn continuity_matches_divergence_form() {
        for metric in [vec![1.0; 3], vec![4.0, 1.0, 2.0]] {
            let f = fluid(metric.clone());
            let g = f.grid.clone();
            let state = f.initial_state(&InitialCondition { seed: 3, amplitude: 2.0 }).unwrap();
            let rho_dot = &f.evolution(&state).unwrap()[1];
            let sqrtg = g.volume_scale();
            let rt: Vec<f64> = state[1].values().iter().map(|v| v / sqrtg).collect();
            let mut oracle = vec![0.0; g.len()];
            for axis in 0..3 {
                let flux: Vec<f64> = rt.iter().zip(&state[0].components()[axis]).map(|(r, t)| r * t / metric[axis]).collect();
                for (o, d) in oracle.iter_mut().zip(g.centered_difference(&flux, axis)) {
                    *o -= d * sqrtg;
                }
            }
            let err = rho_dot.values().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-10, "{err}");
        }
    }

    #[test]
    fn mass_rate_is_zero() {
        let f = fluid(vec![1.0; 3]);
        let state = f.initial_state(&InitialCondition::default()).unwrap();
        let rho_dot = &f.evolution(&state).unwrap()[1];
        assert!(rho_dot.integrate().unwrap().abs() <= 1e-12);
    }

    #[test]
    fn energy_rate_is_round_off() {
        let f = fluid(vec![1.0; 3]);
        let state = f.initial_state(&InitialCondition { seed: 11, amplitude: 3.0 }).unwrap();
        let h = f.hamiltonian(&state).unwrap();
        assert!(f.energy_rate(&state).unwrap().abs() <= 1e-12 * h);
    }
}
