//! Physical systems wired to their structure maps.
//!
//! Every system stores its state as a list of forms on one grid. The gauge
//! reduced systems (telegrapher, string, Maxwell) evolve by `ẋ = +[♯](δH)`;
//! the fluid evolves by `ẋ = -[♯](δH)` in the velocity representation.
//! [`HamiltonianSystem::gradient`] returns the variational derivative with
//! respect to the stored variables, paired with a perturbation `h` as
//! `∫ g ∧ h`.

mod fluid;
mod maxwell;
mod spec;
mod telegrapher;
mod vibrating_string;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{Form, Grid};

pub use fluid::CompressibleFluid;
pub use maxwell::Maxwell;
pub use spec::{GridSpec, InitialCondition, SystemKind, SystemSpec};
pub use telegrapher::Telegrapher;
pub use vibrating_string::VibratingString;

/// A Hamiltonian field theory with state `x = (x_0, x_1, ...)`.
pub trait HamiltonianSystem {
    fn name(&self) -> &'static str;

    fn grid(&self) -> &Arc<Grid>;

    /// Field names and degrees, in storage order.
    fn fields(&self) -> Vec<(&'static str, usize)>;

    fn hamiltonian(&self, state: &[Form]) -> Result<f64>;

    /// `δH/δx_i`, with `dH[h] = Σ ∫ g_i ∧ h_i`.
    fn gradient(&self, state: &[Form]) -> Result<Vec<Form>>;

    fn evolution(&self, state: &[Form]) -> Result<Vec<Form>>;

    /// The quantity reported in the `conserved` trace column.
    fn conserved(&self, state: &[Form]) -> Result<f64>;

    fn initial_state(&self, init: &InitialCondition) -> Result<Vec<Form>>;

    /// Checks field count, degrees and grid.
    fn check_state(&self, state: &[Form]) -> Result<()> {
        let fields = self.fields();
        if state.len() != fields.len() {
            return Err(Error::InvalidComponents(format!(
                "{} expects {} fields, got {}",
                self.name(),
                fields.len(),
                state.len()
            )));
        }
        for (form, (_, degree)) in state.iter().zip(&fields) {
            if form.grid() != self.grid() {
                return Err(Error::GridMismatch);
            }
            form.expect_degree(*degree, "system state field")?;
        }
        Ok(())
    }

    /// `dH/dt = Σ ∫ g_i ∧ ẋ_i` along the semi-discrete flow.
    fn energy_rate(&self, state: &[Form]) -> Result<f64> {
        let g = self.gradient(state)?;
        let v = self.evolution(state)?;
        g.iter().zip(&v).map(|(a, b)| a.pair(b)).sum()
    }

    fn pack(&self, state: &[Form]) -> Vec<f64> {
        state.iter().flat_map(|f| f.to_flat()).collect()
    }

    fn unpack(&self, data: &[f64]) -> Result<Vec<Form>> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (_, degree) in self.fields() {
            let len = crate::forms::binomial(self.grid().dim(), degree) * self.grid().len();
            let chunk = data.get(offset..offset + len).ok_or_else(|| {
                Error::InvalidComponents(format!("flat state too short: {} values", data.len()))
            })?;
            out.push(Form::from_flat(self.grid(), degree, chunk)?);
            offset += len;
        }
        if offset != data.len() {
            return Err(Error::InvalidComponents(format!(
                "flat state has {} values, expected {offset}",
                data.len()
            )));
        }
        Ok(out)
    }
}

/// Any of the supported systems, built from a [`SystemSpec`].
#[derive(Clone, Debug)]
pub enum System {
    Telegrapher(Telegrapher),
    String(VibratingString),
    Maxwell(Maxwell),
    Fluid(CompressibleFluid),
}

impl System {
    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        spec.validate()?;
        let grid = Arc::new(spec.grid.build()?);
        let p = |name: &str, default: f64| spec.params.get(name).copied().unwrap_or(default);
        Ok(match spec.system {
            SystemKind::Telegrapher => System::Telegrapher(Telegrapher::new(grid, p("L", 1.0), p("C", 1.0))?),
            SystemKind::String => System::String(VibratingString::new(grid, p("T_s", 1.0), p("mu_s", 1.0))?),
            SystemKind::Maxwell => System::Maxwell(Maxwell::new(grid)?),
            SystemKind::Fluid => System::Fluid(CompressibleFluid::new(grid, p("K_g", 1.0), p("gamma", 1.4))?),
        })
    }

    fn inner(&self) -> &dyn HamiltonianSystem {
        match self {
            System::Telegrapher(s) => s,
            System::String(s) => s,
            System::Maxwell(s) => s,
            System::Fluid(s) => s,
        }
    }
}

impl HamiltonianSystem for System {
    fn name(&self) -> &'static str {
        self.inner().name()
    }
    fn grid(&self) -> &Arc<Grid> {
        self.inner().grid()
    }
    fn fields(&self) -> Vec<(&'static str, usize)> {
        self.inner().fields()
    }
    fn hamiltonian(&self, state: &[Form]) -> Result<f64> {
        self.inner().hamiltonian(state)
    }
    fn gradient(&self, state: &[Form]) -> Result<Vec<Form>> {
        self.inner().gradient(state)
    }
    fn evolution(&self, state: &[Form]) -> Result<Vec<Form>> {
        self.inner().evolution(state)
    }
    fn conserved(&self, state: &[Form]) -> Result<f64> {
        self.inner().conserved(state)
    }
    fn initial_state(&self, init: &InitialCondition) -> Result<Vec<Form>> {
        self.inner().initial_state(init)
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {value}"),
        })
    }
}

pub(crate) fn require_dim(grid: &Grid, dim: usize, system: &str) -> Result<()> {
    if grid.dim() != dim {
        return Err(Error::InvalidGrid(format!(
            "{system} needs a {dim}-dimensional grid, got dimension {}",
            grid.dim()
        )));
    }
    Ok(())
}

/// Central difference `(H(x + εh) - H(x - εh)) / 2ε`.
pub fn directional_derivative_fd(
    system: &dyn HamiltonianSystem,
    state: &[Form],
    direction: &[Form],
    eps: f64,
) -> Result<f64> {
    let shift = |s: f64| -> Vec<Form> { state.iter().zip(direction).map(|(x, h)| x.axpy(s * eps, h)).collect() };
    Ok((system.hamiltonian(&shift(1.0))? - system.hamiltonian(&shift(-1.0))?) / (2.0 * eps))
}

/// `Σ ∫ δH/δx_i ∧ h_i`.
pub fn directional_derivative(system: &dyn HamiltonianSystem, state: &[Form], direction: &[Form]) -> Result<f64> {
    let g = system.gradient(state)?;
    g.iter().zip(direction).map(|(a, b)| a.pair(b)).sum()
}
