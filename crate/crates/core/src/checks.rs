//! Property suites behind `sdlab check`.
//!
//! Each property yields one [`CheckOutcome`]: a residual compared against a
//! bound. Exactness properties pass when the residual is at most the
//! tolerance; convergence properties report an observed order and pass when
//! it is at least the threshold. Fields come from a seeded
//! [`FieldSampler`], so reports are reproducible.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::dirac::{canonical_sharp, isotropy_residual, phase_duality, CotangentAtPhase};
use crate::error::{Error, Result};
use crate::fluid::{
    algebra_bracket, coadjoint_star, convective_term, cotangent_phi, phi_inverse, s_duality, s_duality_tangent,
    tangent_phi, velocity_duality, velocity_sharp, AlgebraElement, FluidCotangent, FluidState, MomentumState,
    MomentumTangent,
};
use crate::forms::{parity_sign, Form, Grid};
use crate::reduction::{
    cotangent_quotient, reduced_duality, reduced_sharp, reduced_sharp_composed, sign_table, tangent_quotient,
    ReducedCotangent, SignSignature,
};
use crate::dirac::TangentAtPhase;
use crate::sampling::FieldSampler;
use crate::systems::{
    directional_derivative, directional_derivative_fd, CompressibleFluid, HamiltonianSystem, InitialCondition, Maxwell,
    Telegrapher, VibratingString,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Dec,
    Dirac,
    Reduction,
    Fluid,
    Systems,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Dec, Suite::Dirac, Suite::Reduction, Suite::Fluid, Suite::Systems];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dec => "dec",
            Suite::Dirac => "dirac",
            Suite::Reduction => "reduction",
            Suite::Fluid => "fluid",
            Suite::Systems => "systems",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `all` or a single suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteFilter {
    All,
    Only(Suite),
}

impl SuiteFilter {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            SuiteFilter::All => Suite::ALL.to_vec(),
            SuiteFilter::Only(s) => vec![s],
        }
    }
}

impl FromStr for SuiteFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(SuiteFilter::All);
        }
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .map(SuiteFilter::Only)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`; expected all, dec, dirac, reduction, fluid or systems")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub name: String,
    pub residual: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn at_most(suite: Suite, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            residual,
            bound: Bound::AtMost,
            tolerance,
            passed: residual <= tolerance,
        }
    }

    fn at_least(suite: Suite, name: impl Into<String>, order: f64, threshold: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            residual: order,
            bound: Bound::AtLeast,
            tolerance: threshold,
            passed: order >= threshold,
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (status, op) = match (self.passed, self.bound) {
            (true, Bound::AtMost) => ("PASS", "<="),
            (false, Bound::AtMost) => ("FAIL", "<="),
            (true, Bound::AtLeast) => ("PASS", ">="),
            (false, Bound::AtLeast) => ("FAIL", ">="),
        };
        write!(
            f,
            "[{status}] {:<9} {:<44} {:>12.3e} {op} {:.1e}",
            self.suite.name(),
            self.name,
            self.residual,
            self.tolerance
        )
    }
}

/// Options shared by every suite.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub seed: u64,
    /// Multiplies every exactness tolerance; convergence thresholds are fixed.
    pub tol_scale: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { seed: 42, tol_scale: 1.0 }
    }
}

/// Runs the selected suites; results are sorted by suite, then name.
pub fn run_checks(filter: SuiteFilter, opts: CheckOptions) -> Result<Vec<CheckOutcome>> {
    if !(opts.tol_scale > 0.0 && opts.tol_scale.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol-scale",
            reason: format!("must be positive, got {}", opts.tol_scale),
        });
    }
    let mut out = Vec::new();
    for suite in filter.suites() {
        let mut results = match suite {
            Suite::Dec => dec_suite(opts)?,
            Suite::Dirac => dirac_suite(opts)?,
            Suite::Reduction => reduction_suite(opts)?,
            Suite::Fluid => fluid_suite(opts)?,
            Suite::Systems => systems_suite(opts)?,
        };
        out.append(&mut results);
    }
    out.sort_by(|a, b| a.suite.cmp(&b.suite).then_with(|| a.name.cmp(&b.name)));
    Ok(out)
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

/// `∫ |a ∧ b|`, the scale of a pairing free of cancellation.
fn abs_pair(a: &Form, b: &Form) -> Result<f64> {
    a.wedge(b)?.map(f64::abs).integrate()
}

/// Grids used for exactness checks in each dimension.
pub fn standard_grid(n: usize) -> Result<Arc<Grid>> {
    let sizes = match n {
        1 => vec![64],
        2 => vec![32, 32],
        _ => vec![16, 16, 16],
    };
    Ok(Arc::new(Grid::periodic(&sizes)?))
}

fn dec_suite(opts: CheckOptions) -> Result<Vec<CheckOutcome>> {
    let tol = |t: f64| t * opts.tol_scale;
    let mut out = Vec::new();
    for n in 1..=3 {
        let g = standard_grid(n)?;
        let h_min = g.spacings().iter().cloned().fold(f64::INFINITY, f64::min);
        let mut s = FieldSampler::new(opts.seed + n as u64);
        let (mut dd, mut stokes, mut adj, mut hodge) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for k in 0..=n {
            let a = s.form(&g, k);
            if k + 2 <= n {
                dd = dd.max(relative(a.d()?.d()?.max_abs(), a.max_abs() / (h_min * h_min)));
            }
            if k + 1 == n {
                let da = a.d()?;
                let scale = g.cell_volume() * da.values().iter().map(|v| v.abs()).sum::<f64>();
                stokes = stokes.max(relative(da.integrate()?.abs(), scale));
            }
            if k < n {
                let b = s.form(&g, n - k - 1);
                let lhs = a.d()?.pair(&b)?;
                let rhs = parity_sign(k) * a.pair(&b.d()?)?;
                let scale = abs_pair(&a.d()?, &b)? + abs_pair(&a, &b.d()?)?;
                adj = adj.max(relative((lhs + rhs).abs(), scale));
            }
            let twice = a.hodge().hodge();
            hodge = hodge.max(relative(twice.max_diff(&a.scale(parity_sign(k * (n - k)))), a.max_abs()));
        }
        out.push(CheckOutcome::at_most(Suite::Dec, format!("adjointness/{n}d"), adj, tol(1e-12)));
        out.push(CheckOutcome::at_most(Suite::Dec, format!("hodge_involution/{n}d"), hodge, tol(1e-14)));
        out.push(CheckOutcome::at_most(Suite::Dec, format!("stokes/{n}d"), stokes, tol(1e-13)));
        if n >= 2 {
            out.push(CheckOutcome::at_most(Suite::Dec, format!("d_squared/{n}d"), dd, tol(1e-13)));
        }
    }
    Ok(out)
}

/// `(n, k)` pairs with `k(n - k)` even, where the printed pairing order makes
/// `♯` skew.
pub fn skew_cases() -> Vec<(usize, usize)> {
    (1..=3usize)
        .flat_map(|n| (0..=n).map(move |k| (n, k)))
        .filter(|&(n, k)| (k * (n - k)) % 2 == 0)
        .collect()
}

fn dirac_suite(opts: CheckOptions) -> Result<Vec<CheckOutcome>> {
    let tol = |t: f64| t * opts.tol_scale;
    let mut out = Vec::new();
    let circle = Arc::new(Grid::periodic(&[32])?);
    out.push(CheckOutcome::at_most(
        Suite::Dirac,
        "isotropy/n1_k0",
        isotropy_residual(&circle, 0, 100, opts.seed)?,
        tol(1e-12),
    ));
    for (n, k) in skew_cases() {
        let g = Arc::new(Grid::periodic(&vec![8; n])?);
        let mut s = FieldSampler::new(opts.seed ^ (n * 10 + k) as u64);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let e1 = CotangentAtPhase::random(&mut s, &g, k);
            let e2 = CotangentAtPhase::random(&mut s, &g, k);
            let a = phase_duality(&e1, &canonical_sharp(&e2))?;
            let b = phase_duality(&e2, &canonical_sharp(&e1))?;
            let scale = abs_pair(&e1.e_rho, &e2.e_pi)? + abs_pair(&e1.e_pi, &e2.e_rho)?;
            worst = worst.max(relative((a + b).abs(), scale));
        }
        out.push(CheckOutcome::at_most(Suite::Dirac, format!("skew_symmetry/n{n}_k{k}"), worst, tol(1e-12)));
    }
    Ok(out)
}

fn reduction_suite(opts: CheckOptions) -> Result<Vec<CheckOutcome>> {
    let tol = |t: f64| t * opts.tol_scale;
    let mut out = Vec::new();
    for n in 1..=3usize {
        let g = Arc::new(Grid::periodic(&vec![8; n])?);
        for k in 0..n {
            let sig = SignSignature::new(n, k)?;
            let mut s = FieldSampler::new(opts.seed.wrapping_mul(31) + (n * 10 + k) as u64);
            let (mut adj, mut comm, mut skew) = (0.0f64, 0.0f64, 0.0f64);
            for _ in 0..10 {
                let e = ReducedCotangent::random(&mut s, &g, k);
                let v = TangentAtPhase::new(s.form(&g, k), s.form(&g, n - k))?;
                let lhs = phase_duality(&cotangent_quotient(&e)?, &v)?;
                let rhs = reduced_duality(&e, &tangent_quotient(&v)?)?;
                let scale = abs_pair(&e.e_rho_bar.d()?, &v.rho_dot)? + abs_pair(&e.e_pi_bar, &v.pi_dot)?;
                adj = adj.max(relative((lhs - rhs).abs(), scale));

                let closed = reduced_sharp(&e, &sig)?;
                let composed = reduced_sharp_composed(&e)?;
                comm = comm.max(relative(closed.max_diff(&composed), composed.max_abs()));

                let e2 = ReducedCotangent::random(&mut s, &g, k);
                let a = reduced_duality(&e, &reduced_sharp(&e2, &sig)?)?;
                let b = reduced_duality(&e2, &reduced_sharp(&e, &sig)?)?;
                let scale = abs_pair(&e.e_rho_bar, &e2.e_pi_bar.d()?)? + abs_pair(&e.e_pi_bar, &e2.e_rho_bar.d()?)?;
                skew = skew.max(relative((a + b).abs(), scale));
            }
            out.push(CheckOutcome::at_most(Suite::Reduction, format!("cotangent_adjointness/n{n}_k{k}"), adj, tol(1e-12)));
            out.push(CheckOutcome::at_most(Suite::Reduction, format!("diagram_commutes/n{n}_k{k}"), comm, tol(1e-12)));
            if (k * (n - k)) % 2 == 0 {
                out.push(CheckOutcome::at_most(Suite::Reduction, format!("skew_symmetry/n{n}_k{k}"), skew, tol(1e-12)));
            }
        }
    }
    let disagreements = sign_table(3)?.iter().filter(|r| !r.redpoisson_agrees).count();
    out.push(CheckOutcome::at_most(Suite::Reduction, "sign_table_closed_form", disagreements as f64, 0.0));
    Ok(out)
}

/// Smooth lowest-mode fields for convergence studies.
fn smooth_sampler(seed: u64) -> FieldSampler {
    FieldSampler::new(seed).with_max_mode(1).with_terms(4)
}

/// `|⟨ad*_a μ, b⟩ - ⟨μ, [a, b]⟩|` on an `n³` grid for seeded smooth fields.
pub fn coadjoint_duality_defect(n: usize, seed: u64) -> Result<f64> {
    let g = Arc::new(Grid::periodic(&[n, n, n])?);
    let mut s = smooth_sampler(seed);
    let a = AlgebraElement::new(s.vector_field(&g), s.form(&g, 0))?;
    let b = AlgebraElement::new(s.vector_field(&g), s.form(&g, 0))?;
    let mu = MomentumState::new(s.form(&g, 1), s.density(&g, 2.0, 0.5))?;
    let lhs = s_duality_tangent(&b, &coadjoint_star(&a, &mu)?)?;
    let rhs = s_duality(&algebra_bracket(&a, &b)?, &mu)?;
    Ok((lhs - rhs).abs())
}

/// `|⟨e, [♯]e'⟩ + ⟨e', [♯]e⟩|` and `|⟨δH, ẋ⟩|` for the fluid on an `n³`
/// grid, each relative to the size of its terms.
pub fn fluid_skew_defects(n: usize, seed: u64) -> Result<(f64, f64)> {
    let g = Arc::new(Grid::periodic(&[n, n, n])?);
    let mut s = smooth_sampler(seed);
    let state = FluidState::new(s.form(&g, 1), s.density(&g, 2.0, 0.5))?;
    let e1 = FluidCotangent::new(s.form(&g, 2), s.form(&g, 0))?;
    let e2 = FluidCotangent::new(s.form(&g, 2), s.form(&g, 0))?;
    let a = velocity_duality(&e1, &velocity_sharp(&e2, &state)?)?;
    let b = velocity_duality(&e2, &velocity_sharp(&e1, &state)?)?;
    let antisym = relative((a + b).abs(), a.abs().max(b.abs()));

    let fluid = CompressibleFluid::new(g, 1.0, 1.4)?;
    let x = vec![state.theta.clone(), state.rho.clone()];
    let grad = fluid.gradient(&x)?;
    let rates = fluid.evolution(&x)?;
    let terms: Vec<f64> = grad.iter().zip(&rates).map(|(p, q)| p.pair(q)).collect::<Result<_>>()?;
    let scale: f64 = grad
        .iter()
        .zip(&rates)
        .map(|(p, q)| p.wedge(q)?.map(f64::abs).integrate())
        .sum::<Result<f64>>()?;
    let energy = relative(terms.iter().sum::<f64>().abs(), scale);
    Ok((antisym, energy))
}

/// Observed order `log₂(e_coarse / e_fine)`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

fn fluid_suite(opts: CheckOptions) -> Result<Vec<CheckOutcome>> {
    let tol = |t: f64| t * opts.tol_scale;
    let mut out = Vec::new();
    let g = Arc::new(Grid::periodic(&[8, 8, 8])?);
    let mut s = FieldSampler::new(opts.seed);
    let (mut adjoint, mut composition, mut convective, mut mass) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let state = FluidState::new(s.form(&g, 1), s.density(&g, 2.0, 0.5))?;
        let mu = phi_inverse(&state)?;
        let e = FluidCotangent::new(s.form(&g, 2), s.form(&g, 0))?;
        let v = MomentumTangent {
            m_cov_dot: s.form(&g, 1),
            rho_dot: s.density(&g, 0.0, 1.0),
        };
        let lhs = s_duality_tangent(&cotangent_phi(&e, &mu)?, &v)?;
        let rhs = velocity_duality(&e, &tangent_phi(&v, &mu)?)?;
        adjoint = adjoint.max(relative((lhs - rhs).abs(), lhs.abs().max(rhs.abs())));

        let direct = velocity_sharp(&e, &state)?;
        let composed = tangent_phi(&coadjoint_star(&cotangent_phi(&e, &mu)?, &mu)?, &mu)?;
        composition = composition.max(relative(direct.max_diff(&composed), direct.max_abs()));

        let c = convective_term(&e.e_theta, &state.theta, &state.rho)?;
        convective = convective.max(relative(c.hodge.max_diff(&c.interior), c.interior.max_abs()));

        mass = mass.max(relative(direct.rho_dot.integrate()?.abs(), state.rho.integrate()?.abs()));
    }
    out.push(CheckOutcome::at_most(Suite::Fluid, "cotangent_phi_adjointness", adjoint, tol(1e-10)));
    out.push(CheckOutcome::at_most(Suite::Fluid, "velocity_sharp_composition", composition, tol(1e-10)));
    out.push(CheckOutcome::at_most(Suite::Fluid, "convective_paths_agree", convective, tol(1e-12)));
    out.push(CheckOutcome::at_most(Suite::Fluid, "mass_rate_zero", mass, tol(1e-12)));

    let (coarse, fine) = (coadjoint_duality_defect(16, opts.seed)?, coadjoint_duality_defect(32, opts.seed)?);
    out.push(CheckOutcome::at_least(Suite::Fluid, "coadjoint_duality_order_16_32", observed_order(coarse, fine), 1.9));
    let (antisym, energy) = fluid_skew_defects(16, opts.seed)?;
    out.push(CheckOutcome::at_most(Suite::Fluid, "velocity_sharp_antisymmetry", antisym, tol(1e-12)));
    out.push(CheckOutcome::at_most(Suite::Fluid, "energy_rate_zero", energy, tol(1e-12)));
    Ok(out)
}

fn effort_residual(system: &dyn HamiltonianSystem, state: &[Form], s: &mut FieldSampler) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let dir: Vec<Form> = system
            .fields()
            .iter()
            .map(|&(_, degree)| s.form(system.grid(), degree).scale(0.1))
            .collect();
        let exact = directional_derivative(system, state, &dir)?;
        let fd = directional_derivative_fd(system, state, &dir, 1e-5)?;
        worst = worst.max((exact - fd).abs());
    }
    Ok(worst)
}

fn energy_rate_relative(system: &dyn HamiltonianSystem, state: &[Form]) -> Result<f64> {
    Ok(relative(system.energy_rate(state)?.abs(), system.hamiltonian(state)?.abs()))
}

fn systems_suite(opts: CheckOptions) -> Result<Vec<CheckOutcome>> {
    let tol = |t: f64| t * opts.tol_scale;
    let mut out = Vec::new();
    let init = InitialCondition { seed: opts.seed, amplitude: 1.0 };
    let mut s = FieldSampler::new(opts.seed.wrapping_add(7));

    let line = Arc::new(Grid::periodic(&[64])?);
    let space = Arc::new(Grid::periodic(&[8, 8, 8])?);
    let telegrapher = Telegrapher::new(line.clone(), 1.0, 4.0)?;
    let string = VibratingString::new(line.clone(), 2.0, 0.5)?;
    let maxwell = Maxwell::new(space.clone())?;
    let fluid = CompressibleFluid::new(space.clone(), 1.0, 1.4)?;
    let systems: [&dyn HamiltonianSystem; 4] = [&telegrapher, &string, &maxwell, &fluid];

    for system in systems {
        let state = system.initial_state(&init)?;
        out.push(CheckOutcome::at_most(
            Suite::Systems,
            format!("efforts_match_fd/{}", system.name()),
            effort_residual(system, &state, &mut s)?,
            tol(1e-6),
        ));
        out.push(CheckOutcome::at_most(
            Suite::Systems,
            format!("energy_rate_zero/{}", system.name()),
            energy_rate_relative(system, &state)?,
            tol(1e-12),
        ));
    }

    let a = s.form(&space, 1);
    let d = s.form(&space, 2);
    let f = s.form(&space, 0);
    let h0 = maxwell.energy_of_potential(&a, &d)?;
    let h1 = maxwell.energy_of_potential(&(&a + &f.d()?), &d)?;
    out.push(CheckOutcome::at_most(Suite::Systems, "gauge_invariance/maxwell", relative((h0 - h1).abs(), h0), tol(1e-14)));

    let state = fluid.initial_state(&init)?;
    let rates = fluid.evolution(&state)?;
    out.push(CheckOutcome::at_most(
        Suite::Systems,
        "mass_rate_zero/fluid",
        relative(rates[1].integrate()?.abs(), state[1].integrate()?),
        tol(1e-12),
    ));
    Ok(out)
}
