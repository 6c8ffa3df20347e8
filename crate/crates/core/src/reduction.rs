//! Poisson reduction of `T*Ω^k` by the gauge action `ρ ↦ ρ + dα`.
//!
//! The quotient is `dΩ^k × Ω^{n-k}` with projection `(ρ, π) ↦ (dρ, π)`. Its
//! tangent map is `(ρ̇, π̇) ↦ (dρ̇, π̇)` and the dual map sends a reduced
//! covector `(ē_ρ, ē_π)` to `((-1)^{n-k} dē_ρ, ē_π)`. The reduced Poisson map
//! is the composition `Tπ_G ∘ ♯ ∘ T*π_G`, which [`reduced_sharp_composed`]
//! evaluates literally and [`reduced_sharp`] evaluates in closed form as
//! `(dē_π, (-1)^{n-k-1} dē_ρ)`.
//!
//! The composition is the ground truth. The matrix form with lower-left entry
//! `(-1)^{n-k} d` disagrees with it by a sign for every `(n, k)`; see
//! [`sign_table`].

use std::sync::Arc;

use serde::Serialize;

use crate::dirac::{canonical_sharp, CotangentAtPhase, PhasePoint, TangentAtPhase};
use crate::error::{Error, Result};
use crate::forms::{parity_sign, Form, Grid};
use crate::sampling::FieldSampler;

const CLOSED_TOL: f64 = 1e-12;

fn closedness_residual(form: &Form) -> Result<f64> {
    if form.degree() == form.dim() {
        return Ok(0.0);
    }
    let h_min = form.grid().spacings().iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = form.max_abs() / h_min;
    let r = form.d()?.max_abs();
    Ok(if scale > 0.0 { r / scale } else { r })
}

/// `(ρ̄, π̄) ∈ dΩ^k × Ω^{n-k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    pub k: usize,
    pub rho_bar: Form,
    pub pi_bar: Form,
}

impl ReducedState {
    /// Validates degrees and checks the necessary exactness condition
    /// `dρ̄ = 0`.
    pub fn new(k: usize, rho_bar: Form, pi_bar: Form) -> Result<Self> {
        if rho_bar.grid() != pi_bar.grid() {
            return Err(Error::GridMismatch);
        }
        let n = rho_bar.dim();
        if k >= n {
            return Err(Error::DegreeMismatch {
                context: "reduced state needs k < n",
                expected: n.saturating_sub(1),
                found: k,
            });
        }
        rho_bar.expect_degree(k + 1, "reduced state ρ̄")?;
        pi_bar.expect_degree(n - k, "reduced state π̄")?;
        let r = closedness_residual(&rho_bar)?;
        if r > CLOSED_TOL {
            return Err(Error::InvalidComponents(format!(
                "ρ̄ is not closed (relative |dρ̄| = {r:e})"
            )));
        }
        Ok(Self { k, rho_bar, pi_bar })
    }
}

/// `(ē_ρ, ē_π)`, degrees `(n-k-1, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedCotangent {
    pub e_rho_bar: Form,
    pub e_pi_bar: Form,
}

impl ReducedCotangent {
    pub fn new(e_rho_bar: Form, e_pi_bar: Form) -> Result<Self> {
        if e_rho_bar.grid() != e_pi_bar.grid() {
            return Err(Error::GridMismatch);
        }
        let n = e_rho_bar.dim();
        if e_rho_bar.degree() + e_pi_bar.degree() + 1 != n {
            return Err(Error::DegreeMismatch {
                context: "reduced covector degrees must sum to n - 1",
                expected: n - 1 - e_pi_bar.degree().min(n - 1),
                found: e_rho_bar.degree(),
            });
        }
        Ok(Self { e_rho_bar, e_pi_bar })
    }

    pub fn zeros(grid: &Arc<Grid>, k: usize) -> Self {
        Self {
            e_rho_bar: Form::zeros(grid, grid.dim() - k - 1),
            e_pi_bar: Form::zeros(grid, k),
        }
    }

    pub fn random(sampler: &mut FieldSampler, grid: &Arc<Grid>, k: usize) -> Self {
        Self {
            e_rho_bar: sampler.form(grid, grid.dim() - k - 1),
            e_pi_bar: sampler.form(grid, k),
        }
    }

    pub fn k(&self) -> usize {
        self.e_pi_bar.degree()
    }
}

/// `(ρ̄̇, π̄̇)`, degrees `(k+1, n-k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedTangent {
    pub rho_bar_dot: Form,
    pub pi_bar_dot: Form,
}

impl ReducedTangent {
    pub fn max_abs(&self) -> f64 {
        self.rho_bar_dot.max_abs().max(self.pi_bar_dot.max_abs())
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.rho_bar_dot
            .max_diff(&other.rho_bar_dot)
            .max(self.pi_bar_dot.max_diff(&other.pi_bar_dot))
    }

    pub fn to_flat(&self) -> Vec<f64> {
        [self.rho_bar_dot.to_flat(), self.pi_bar_dot.to_flat()].concat()
    }
}

/// Degrees and signs of the flow/effort form of the reduced structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignSignature {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// `(-1)^{n-k-1}`, lower-left entry of the closed-form reduced map.
    pub sign_redpoisson: i8,
    /// `(-1)^{n-k}`, sign in the dual of the tangent quotient.
    pub sign_cotangent: i8,
    /// `(-1)^r`, relating `e_q` to `ē_π`.
    pub sign_flow_effort: i8,
    /// `(-1)^{n-p}`, relating `f_q` to `π̄̇`.
    pub sign_fq: i8,
}

fn sign_i8(p: usize) -> i8 {
    if p % 2 == 0 {
        1
    } else {
        -1
    }
}

impl SignSignature {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if !(1..=3).contains(&n) || k >= n {
            return Err(Error::InvalidParameter {
                name: "(n, k)",
                reason: format!("need 1 <= n <= 3 and k < n, got ({n}, {k})"),
            });
        }
        let p = n - k;
        let q = k + 1;
        let r = p * q + 1;
        Ok(Self {
            n,
            k,
            p,
            q,
            r,
            sign_redpoisson: sign_i8(n - k - 1),
            sign_cotangent: sign_i8(n - k),
            sign_flow_effort: sign_i8(r),
            sign_fq: sign_i8(n - p),
        })
    }

    pub fn for_grid(grid: &Grid, k: usize) -> Result<Self> {
        Self::new(grid.dim(), k)
    }
}

/// `ρ · α = ρ + dα`.
pub fn gauge_act(rho: &Form, alpha: &Form) -> Result<Form> {
    if rho.degree() == 0 {
        return Err(Error::DegreeMismatch {
            context: "gauge action needs k >= 1",
            expected: 1,
            found: 0,
        });
    }
    alpha.expect_degree(rho.degree() - 1, "gauge parameter")?;
    Ok(rho + &alpha.d()?)
}

/// `π_G(ρ, π) = (dρ, π)`.
pub fn quotient_project(s: &PhasePoint) -> Result<ReducedState> {
    Ok(ReducedState {
        k: s.k(),
        rho_bar: s.rho.d()?,
        pi_bar: s.pi.clone(),
    })
}

/// `Tπ_G(ρ̇, π̇) = (dρ̇, π̇)`.
pub fn tangent_quotient(v: &TangentAtPhase) -> Result<ReducedTangent> {
    Ok(ReducedTangent {
        rho_bar_dot: v.rho_dot.d()?,
        pi_bar_dot: v.pi_dot.clone(),
    })
}

/// `T*π_G(ē_ρ, ē_π) = ((-1)^{n-k} dē_ρ, ē_π)`.
pub fn cotangent_quotient(e: &ReducedCotangent) -> Result<CotangentAtPhase> {
    let n = e.e_rho_bar.dim();
    let k = e.k();
    Ok(CotangentAtPhase {
        e_rho: e.e_rho_bar.d()?.scale(parity_sign(n - k)),
        e_pi: e.e_pi_bar.clone(),
    })
}

/// Reduced duality `∫ (ē_ρ ∧ ρ̄̇ + ē_π ∧ π̄̇)`.
pub fn reduced_duality(e: &ReducedCotangent, v: &ReducedTangent) -> Result<f64> {
    Ok(e.e_rho_bar.pair(&v.rho_bar_dot)? + e.e_pi_bar.pair(&v.pi_bar_dot)?)
}

/// Closed form `[♯](ē_ρ, ē_π) = (dē_π, (-1)^{n-k-1} dē_ρ)`.
pub fn reduced_sharp(e: &ReducedCotangent, sig: &SignSignature) -> Result<ReducedTangent> {
    if sig.n != e.e_rho_bar.dim() || sig.k != e.k() {
        return Err(Error::InvalidParameter {
            name: "signature",
            reason: format!(
                "signature is for (n, k) = ({}, {}), covector is ({}, {})",
                sig.n,
                sig.k,
                e.e_rho_bar.dim(),
                e.k()
            ),
        });
    }
    Ok(ReducedTangent {
        rho_bar_dot: e.e_pi_bar.d()?,
        pi_bar_dot: e.e_rho_bar.d()?.scale(f64::from(sig.sign_redpoisson)),
    })
}

/// `[♯] = Tπ_G ∘ ♯ ∘ T*π_G`, evaluated map by map.
pub fn reduced_sharp_composed(e: &ReducedCotangent) -> Result<ReducedTangent> {
    tangent_quotient(&canonical_sharp(&cotangent_quotient(e)?))
}

/// Applies the reduced structure in flow/effort variables:
/// `ē_ρ = e_p`, `ē_π = (-1)^r e_q`, then `f_p = ρ̄̇`, `f_q = (-1)^{n-p} π̄̇`.
///
/// For odd `n` the result is `f_p = (-1)^r de_q`, `f_q = de_p`; for even `n`
/// the second row picks up an extra `-1`.
pub fn stokes_dirac_apply(e_p: &Form, e_q: &Form, sig: &SignSignature) -> Result<(Form, Form)> {
    let e = ReducedCotangent::new(e_p.clone(), e_q.scale(f64::from(sig.sign_flow_effort)))?;
    if e.k() != sig.k {
        return Err(Error::DegreeMismatch {
            context: "effort e_q degree",
            expected: sig.k,
            found: e.k(),
        });
    }
    let flow = reduced_sharp_composed(&e)?;
    Ok((flow.rho_bar_dot, flow.pi_bar_dot.scale(f64::from(sig.sign_fq))))
}

/// One line of the sign diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct SignRow {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// Lower-left sign of the composed reduced map, measured numerically.
    pub composed_sign: i8,
    /// `(-1)^{n-k-1}` from the closed form.
    pub redpoisson_sign: i8,
    /// `(-1)^{n-k}` from the matrix form.
    pub matform_sign: i8,
    pub redpoisson_agrees: bool,
    pub matform_agrees: bool,
    /// Measured signs of `f_p / de_q` and `f_q / de_p`.
    pub fp_sign: i8,
    pub fq_sign: i8,
    /// Whether the composition reproduces `[[0, (-1)^r d], [d, 0]]`.
    pub flow_matrix_reproduced: bool,
    /// Same question if the matrix-form sign were used instead.
    pub flow_matrix_with_matform: bool,
}

fn measured_sign(out: &Form, reference: &Form) -> Result<i8> {
    let num: f64 = out
        .components()
        .iter()
        .flatten()
        .zip(reference.components().iter().flatten())
        .map(|(a, b)| a * b)
        .sum();
    let den: f64 = reference.components().iter().flatten().map(|b| b * b).sum();
    let ratio = num / den;
    if (ratio.abs() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidComponents(format!(
            "composed output is not ±d(effort): ratio {ratio}"
        )));
    }
    Ok(if ratio > 0.0 { 1 } else { -1 })
}

/// Signs of the reduced structure for every `(n, k)` with `k < n <= n_max`,
/// each measured from the composition on a random band-limited covector.
pub fn sign_table(n_max: usize) -> Result<Vec<SignRow>> {
    if !(1..=3).contains(&n_max) {
        return Err(Error::InvalidParameter {
            name: "nmax",
            reason: format!("must be between 1 and 3, got {n_max}"),
        });
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let grid = Arc::new(Grid::periodic(&vec![8; n])?);
        for k in 0..n {
            let sig = SignSignature::new(n, k)?;
            let mut sampler = FieldSampler::new((10 * n + k) as u64);
            let e = ReducedCotangent::random(&mut sampler, &grid, k);
            let composed = reduced_sharp_composed(&e)?;
            let composed_sign = measured_sign(&composed.pi_bar_dot, &e.e_rho_bar.d()?)?;

            let (f_p, f_q) = stokes_dirac_apply(&e.e_rho_bar, &e.e_pi_bar, &sig)?;
            let fp_sign = measured_sign(&f_p, &e.e_pi_bar.d()?)?;
            let fq_sign = measured_sign(&f_q, &e.e_rho_bar.d()?)?;

            let matform_sign = sig.sign_cotangent;
            rows.push(SignRow {
                n,
                k,
                p: sig.p,
                q: sig.q,
                r: sig.r,
                composed_sign,
                redpoisson_sign: sig.sign_redpoisson,
                matform_sign,
                redpoisson_agrees: composed_sign == sig.sign_redpoisson,
                matform_agrees: composed_sign == matform_sign,
                fp_sign,
                fq_sign,
                flow_matrix_reproduced: fp_sign == sig.sign_flow_effort && fq_sign == 1,
                flow_matrix_with_matform: sig.sign_fq * matform_sign == 1,
            });
        }
    }
    Ok(rows)
}
