use std::sync::Arc;

use crate::error::Result;
use crate::forms::{Form, Grid};
use crate::reduction::{reduced_sharp_composed, ReducedCotangent};
use crate::sampling::FieldSampler;

use super::{positive, require_dim, HamiltonianSystem, InitialCondition};

/// Closed string under tension with displacement `u`, reduced state
/// `(ε̄, π̄) = (du, μ_s u_t dx)`.
#[derive(Clone, Debug)]
pub struct VibratingString {
    grid: Arc<Grid>,
    tension: f64,
    mass_density: f64,
}

impl VibratingString {
    pub fn new(grid: Arc<Grid>, tension: f64, mass_density: f64) -> Result<Self> {
        require_dim(&grid, 1, "string")?;
        Ok(Self {
            grid,
            tension: positive("T_s", tension)?,
            mass_density: positive("mu_s", mass_density)?,
        })
    }

    pub fn tension(&self) -> f64 {
        self.tension
    }

    pub fn mass_density(&self) -> f64 {
        self.mass_density
    }

    /// `(du, μ_s ⋆u_t)` from displacement and velocity.
    pub fn state_from_displacement(&self, u: &Form, velocity: &Form) -> Result<Vec<Form>> {
        u.expect_degree(0, "displacement")?;
        velocity.expect_degree(0, "velocity")?;
        Ok(vec![u.d()?, velocity.hodge().scale(self.mass_density)])
    }

    /// `(T_s ⋆ε̄, ⋆π̄ / μ_s)`.
    pub fn efforts(&self, strain: &Form, momentum: &Form) -> Result<ReducedCotangent> {
        ReducedCotangent::new(
            strain.hodge().scale(self.tension),
            momentum.hodge().scale(1.0 / self.mass_density),
        )
    }
}

impl HamiltonianSystem for VibratingString {
    fn name(&self) -> &'static str {
        "string"
    }

    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn fields(&self) -> Vec<(&'static str, usize)> {
        vec![("strain", 1), ("pi", 1)]
    }

    /// `½ ∫ (T_s ε̄ ∧ ⋆ε̄ + π̄ ∧ ⋆π̄ / μ_s)`.
    fn hamiltonian(&self, state: &[Form]) -> Result<f64> {
        self.check_state(state)?;
        let (e, p) = (&state[0], &state[1]);
        Ok(0.5 * (self.tension * e.inner(e)? + p.inner(p)? / self.mass_density))
    }

    fn gradient(&self, state: &[Form]) -> Result<Vec<Form>> {
        self.check_state(state)?;
        let e = self.efforts(&state[0], &state[1])?;
        Ok(vec![e.e_rho_bar, e.e_pi_bar])
    }

    fn evolution(&self, state: &[Form]) -> Result<Vec<Form>> {
        self.check_state(state)?;
        let flow = reduced_sharp_composed(&self.efforts(&state[0], &state[1])?)?;
        Ok(vec![flow.rho_bar_dot, flow.pi_bar_dot])
    }

    /// Total momentum `∫ π̄`.
    fn conserved(&self, state: &[Form]) -> Result<f64> {
        self.check_state(state)?;
        state[1].integrate()
    }

    fn initial_state(&self, init: &InitialCondition) -> Result<Vec<Form>> {
        let mut s = FieldSampler::new(init.seed);
        let u = s.form(&self.grid, 0).scale(init.amplitude);
        let v = s.form(&self.grid, 0).scale(init.amplitude);
        self.state_from_displacement(&u, &v)
    }
}
