use std::sync::Arc;

use crate::error::Result;
use crate::forms::{Form, Grid};
use crate::reduction::{reduced_sharp_composed, ReducedCotangent};
use crate::sampling::FieldSampler;

use super::{positive, require_dim, HamiltonianSystem, InitialCondition};

/// Lossless transmission line on `S^1`, state `(q̄, π̄)` of one-forms.
///
/// Voltage and current are read off as `V = ⋆q̄ / C` and `I = -⋆π̄ / L`,
/// which turns the reduced flow into `L I_t + V_x = 0`, `C V_t + I_x = 0`.
#[derive(Clone, Debug)]
pub struct Telegrapher {
    grid: Arc<Grid>,
    inductance: f64,
    capacitance: f64,
}

impl Telegrapher {
    pub fn new(grid: Arc<Grid>, inductance: f64, capacitance: f64) -> Result<Self> {
        require_dim(&grid, 1, "telegrapher")?;
        Ok(Self {
            grid,
            inductance: positive("L", inductance)?,
            capacitance: positive("C", capacitance)?,
        })
    }

    pub fn inductance(&self) -> f64 {
        self.inductance
    }

    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }

    pub fn voltage(&self, q: &Form) -> Form {
        q.hodge().scale(1.0 / self.capacitance)
    }

    pub fn current(&self, p: &Form) -> Form {
        p.hodge().scale(-1.0 / self.inductance)
    }

    /// Inverse of [`voltage`](Self::voltage) and [`current`](Self::current).
    pub fn state_from_line(&self, voltage: &Form, current: &Form) -> Result<Vec<Form>> {
        voltage.expect_degree(0, "voltage")?;
        current.expect_degree(0, "current")?;
        Ok(vec![
            voltage.hodge().scale(self.capacitance),
            current.hodge().scale(-self.inductance),
        ])
    }

    /// `(⋆q̄ / C, ⋆π̄ / L)`.
    pub fn efforts(&self, q: &Form, p: &Form) -> Result<ReducedCotangent> {
        ReducedCotangent::new(
            q.hodge().scale(1.0 / self.capacitance),
            p.hodge().scale(1.0 / self.inductance),
        )
    }
}

impl HamiltonianSystem for Telegrapher {
    fn name(&self) -> &'static str {
        "telegrapher"
    }

    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn fields(&self) -> Vec<(&'static str, usize)> {
        vec![("q", 1), ("pi", 1)]
    }

    /// `∫ (q̄ ∧ ⋆q̄ / 2C + π̄ ∧ ⋆π̄ / 2L)`.
    fn hamiltonian(&self, state: &[Form]) -> Result<f64> {
        self.check_state(state)?;
        let (q, p) = (&state[0], &state[1]);
        Ok(q.inner(q)? / (2.0 * self.capacitance) + p.inner(p)? / (2.0 * self.inductance))
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

    /// Total charge `∫ q̄`.
    fn conserved(&self, state: &[Form]) -> Result<f64> {
        self.check_state(state)?;
        state[0].integrate()
    }

    fn initial_state(&self, init: &InitialCondition) -> Result<Vec<Form>> {
        let mut s = FieldSampler::new(init.seed);
        Ok(vec![
            s.form(&self.grid, 1).scale(init.amplitude),
            s.form(&self.grid, 1).scale(init.amplitude),
        ])
    }
}
