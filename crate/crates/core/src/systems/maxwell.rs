use std::sync::Arc;

use crate::error::Result;
use crate::forms::{Form, Grid};
use crate::reduction::{reduced_sharp, ReducedCotangent, SignSignature};
use crate::sampling::FieldSampler;

use super::{require_dim, HamiltonianSystem, InitialCondition};

/// Vacuum electromagnetism on `T^3` with unit constants, state `(B, D)`.
///
/// `B = dA` is the reduced configuration and `Π = -D` the conjugate
/// momentum, so the reduced efforts are `(⋆B, -⋆D)`.
#[derive(Clone, Debug)]
pub struct Maxwell {
    grid: Arc<Grid>,
    signature: SignSignature,
}

impl Maxwell {
    pub fn new(grid: Arc<Grid>) -> Result<Self> {
        require_dim(&grid, 3, "maxwell")?;
        Ok(Self {
            grid,
            signature: SignSignature::new(3, 1)?,
        })
    }

    fn check(&self, b: &Form, d: &Form) -> Result<()> {
        self.check_state(&[b.clone(), d.clone()])
    }

    /// `½ ∫ (D ∧ ⋆D + B ∧ ⋆B)`.
    pub fn energy(&self, b: &Form, d: &Form) -> Result<f64> {
        self.check(b, d)?;
        Ok(0.5 * (d.inner(d)? + b.inner(b)?))
    }

    /// Energy as a function of the potential, `H(dA, D)`.
    pub fn energy_of_potential(&self, a: &Form, d: &Form) -> Result<f64> {
        self.energy(&a.d()?, d)
    }

    /// `(ē_ρ, ē_π) = (⋆B, -⋆D)`.
    pub fn efforts(&self, b: &Form, d: &Form) -> Result<ReducedCotangent> {
        self.check(b, d)?;
        ReducedCotangent::new(b.hodge(), -&d.hodge())
    }

    /// `(Ḃ, Ḋ)` from the reduced structure; `Ḋ = -Π̇`.
    pub fn rates(&self, b: &Form, d: &Form) -> Result<(Form, Form)> {
        let flow = reduced_sharp(&self.efforts(b, d)?, &self.signature)?;
        Ok((flow.rho_bar_dot, -&flow.pi_bar_dot))
    }
}

impl HamiltonianSystem for Maxwell {
    fn name(&self) -> &'static str {
        "maxwell"
    }

    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn fields(&self) -> Vec<(&'static str, usize)> {
        vec![("B", 2), ("D", 2)]
    }

    fn hamiltonian(&self, state: &[Form]) -> Result<f64> {
        self.check_state(state)?;
        self.energy(&state[0], &state[1])
    }

    fn gradient(&self, state: &[Form]) -> Result<Vec<Form>> {
        self.check_state(state)?;
        Ok(vec![state[0].hodge(), state[1].hodge()])
    }

    fn evolution(&self, state: &[Form]) -> Result<Vec<Form>> {
        self.check_state(state)?;
        let (b_dot, d_dot) = self.rates(&state[0], &state[1])?;
        Ok(vec![b_dot, d_dot])
    }

    /// `‖dD‖`, preserved because `Ḋ` is exact.
    fn conserved(&self, state: &[Form]) -> Result<f64> {
        self.check_state(state)?;
        let div = state[1].d()?;
        Ok(div.inner(&div)?.sqrt())
    }

    fn initial_state(&self, init: &InitialCondition) -> Result<Vec<Form>> {
        let mut s = FieldSampler::new(init.seed);
        let a = s.form(&self.grid, 1).scale(init.amplitude);
        let c = s.form(&self.grid, 1).scale(init.amplitude);
        Ok(vec![a.d()?, c.d()?])
    }
}
