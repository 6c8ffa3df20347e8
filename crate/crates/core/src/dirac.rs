//! The canonical Dirac structure on `T*Q` for `Q = Ω^k`.
//!
//! A phase point is `(ρ, π) ∈ Ω^k × Ω^{n-k}`. Tangent vectors `(ρ̇, π̇)` have
//! the same degrees; covectors `(e_ρ, e_π)` have the swapped degrees
//! `(n-k, k)` and pair with tangents through `∫ (e_ρ ∧ ρ̇ + e_π ∧ π̇)`, with the
//! operands in exactly that order.
//!
//! The Dirac structure is the graph `{(♯e, e)}` of the symplectic map
//! `♯(e_ρ, e_π) = (e_π, -e_ρ)`. On a grid the maximal-isotropy condition
//! `D = D^⊥` is certified as isotropy of the graph plus a dimension count.
//!
//! Isotropy needs `⟨a, b⟩ = ⟨b, a⟩` between `Ω^k` and `Ω^{n-k}`, i.e. an even
//! `k(n-k)`. Among `n <= 3` only `(n, k) = (2, 1)` fails; there the printed
//! operand order makes `♯` symmetric rather than skew.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{binomial, Form, Grid};
use crate::sampling::FieldSampler;

fn check_split(a: &Form, b: &Form, context: &'static str) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let n = a.dim();
    if a.degree() + b.degree() != n {
        return Err(Error::DegreeMismatch {
            context,
            expected: n - a.degree(),
            found: b.degree(),
        });
    }
    Ok(())
}

/// `(ρ, π) ∈ T*Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub rho: Form,
    pub pi: Form,
}

impl PhasePoint {
    pub fn new(rho: Form, pi: Form) -> Result<Self> {
        check_split(&rho, &pi, "phase point (ρ, π)")?;
        Ok(Self { rho, pi })
    }

    /// Configuration degree.
    pub fn k(&self) -> usize {
        self.rho.degree()
    }
}

/// `(ρ̇, π̇) ∈ T_{(ρ,π)} T*Q`, degrees `(k, n-k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentAtPhase {
    pub rho_dot: Form,
    pub pi_dot: Form,
}

impl TangentAtPhase {
    pub fn new(rho_dot: Form, pi_dot: Form) -> Result<Self> {
        check_split(&rho_dot, &pi_dot, "tangent (ρ̇, π̇)")?;
        Ok(Self { rho_dot, pi_dot })
    }

    pub fn zeros(grid: &Arc<Grid>, k: usize) -> Self {
        Self {
            rho_dot: Form::zeros(grid, k),
            pi_dot: Form::zeros(grid, grid.dim() - k),
        }
    }

    pub fn k(&self) -> usize {
        self.rho_dot.degree()
    }

    pub fn max_abs(&self) -> f64 {
        self.rho_dot.max_abs().max(self.pi_dot.max_abs())
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.rho_dot
            .max_diff(&other.rho_dot)
            .max(self.pi_dot.max_diff(&other.pi_dot))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rho_dot: self.rho_dot.scale(s),
            pi_dot: self.pi_dot.scale(s),
        }
    }

    /// Reads the tangent as a covector with the same slot order. Only
    /// meaningful when both slots have the same degree (`n = 2k`).
    pub fn as_cotangent(&self) -> Result<CotangentAtPhase> {
        CotangentAtPhase::new(self.rho_dot.clone(), self.pi_dot.clone())
    }
}

/// `(e_ρ, e_π) ∈ T*_{(ρ,π)} T*Q`, degrees `(n-k, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentAtPhase {
    pub e_rho: Form,
    pub e_pi: Form,
}

impl CotangentAtPhase {
    pub fn new(e_rho: Form, e_pi: Form) -> Result<Self> {
        check_split(&e_rho, &e_pi, "covector (e_ρ, e_π)")?;
        Ok(Self { e_rho, e_pi })
    }

    pub fn zeros(grid: &Arc<Grid>, k: usize) -> Self {
        Self {
            e_rho: Form::zeros(grid, grid.dim() - k),
            e_pi: Form::zeros(grid, k),
        }
    }

    pub fn random(sampler: &mut FieldSampler, grid: &Arc<Grid>, k: usize) -> Self {
        Self {
            e_rho: sampler.form(grid, grid.dim() - k),
            e_pi: sampler.form(grid, k),
        }
    }

    pub fn k(&self) -> usize {
        self.e_pi.degree()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            e_rho: self.e_rho.scale(s),
            e_pi: self.e_pi.scale(s),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            e_rho: self.e_rho.scale(a).axpy(b, &other.e_rho),
            e_pi: self.e_pi.scale(a).axpy(b, &other.e_pi),
        }
    }
}

/// `⟨(e_ρ, e_π), (ρ̇, π̇)⟩ = ∫ (e_ρ ∧ ρ̇ + e_π ∧ π̇)`.
pub fn phase_duality(e: &CotangentAtPhase, v: &TangentAtPhase) -> Result<f64> {
    if e.k() != v.k() {
        return Err(Error::DegreeMismatch {
            context: "phase duality configuration degree",
            expected: v.k(),
            found: e.k(),
        });
    }
    Ok(e.e_rho.pair(&v.rho_dot)? + e.e_pi.pair(&v.pi_dot)?)
}

/// `♯(e_ρ, e_π) = (e_π, -e_ρ)`.
pub fn canonical_sharp(e: &CotangentAtPhase) -> TangentAtPhase {
    TangentAtPhase {
        rho_dot: e.e_pi.clone(),
        pi_dot: -&e.e_rho,
    }
}

/// An element `(v, α)` of `TQ ⊕ T*Q`.
#[derive(Clone, Debug)]
pub struct DiracPair {
    pub v: TangentAtPhase,
    pub alpha: CotangentAtPhase,
}

impl DiracPair {
    /// `(♯e, e)`, an element of the canonical Dirac structure.
    pub fn graph(e: &CotangentAtPhase) -> Self {
        Self {
            v: canonical_sharp(e),
            alpha: e.clone(),
        }
    }
}

/// `⟨⟨(v, α), (w, β)⟩⟩ = ½ (α(w) + β(v))`.
pub fn dirac_pairing(p1: &DiracPair, p2: &DiracPair) -> Result<f64> {
    Ok(0.5 * (phase_duality(&p1.alpha, &p2.v)? + phase_duality(&p2.alpha, &p1.v)?))
}

/// Largest `|⟨⟨u_i, u_j⟩⟩|` over graph elements `u_i = (♯e_i, e_i)` built
/// from `samples` random band-limited covectors.
pub fn isotropy_residual(grid: &Arc<Grid>, k: usize, samples: usize, seed: u64) -> Result<f64> {
    let mut sampler = FieldSampler::new(seed);
    let covectors: Vec<_> = (0..samples)
        .map(|_| CotangentAtPhase::random(&mut sampler, grid, k))
        .collect();
    isotropy_residual_of(&covectors)
}

/// Same as [`isotropy_residual`] for caller-provided covectors.
pub fn isotropy_residual_of(covectors: &[CotangentAtPhase]) -> Result<f64> {
    let pairs: Vec<_> = covectors.iter().map(DiracPair::graph).collect();
    let mut worst = 0.0f64;
    for (i, a) in pairs.iter().enumerate() {
        for b in &pairs[i..] {
            worst = worst.max(dirac_pairing(a, b)?.abs());
        }
    }
    Ok(worst)
}

/// `(dim graph, dim (TQ ⊕ T*Q))` at one phase point. A graph of a linear
/// isomorphism always has half the ambient dimension, which together with
/// isotropy makes it maximally isotropic.
pub fn dimension_count(grid: &Grid, k: usize) -> (usize, usize) {
    let n = grid.dim();
    let fiber = (binomial(n, k) + binomial(n, n - k)) * grid.len();
    (fiber, 2 * fiber)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle4() -> Arc<Grid> {
        Arc::new(Grid::new(vec![4], vec![PI / 2.0], vec![1.0]).unwrap())
    }

    #[test]
    fn zero_covector_pairs_to_zero() {
        let g = Arc::new(Grid::periodic(&[8]).unwrap());
        let mut s = FieldSampler::new(1);
        let v = TangentAtPhase::new(s.form(&g, 0), s.form(&g, 1)).unwrap();
        assert_eq!(phase_duality(&CotangentAtPhase::zeros(&g, 0), &v).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_duality_on_circle() {
        let g = circle4();
        let e = CotangentAtPhase::new(Form::constant(&g, 1, &[1.0]).unwrap(), Form::zeros(&g, 0)).unwrap();
        let v = TangentAtPhase::new(Form::constant(&g, 0, &[1.0]).unwrap(), Form::zeros(&g, 1)).unwrap();
        assert!((phase_duality(&e, &v).unwrap() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn duality_rejects_mismatched_degrees() {
        let g = Arc::new(Grid::periodic(&[4, 4, 4]).unwrap());
        let e = CotangentAtPhase::zeros(&g, 1);
        let v = TangentAtPhase::zeros(&g, 2);
        assert!(phase_duality(&e, &v).is_err());
        assert!(TangentAtPhase::new(Form::zeros(&g, 1), Form::zeros(&g, 1)).is_err());
    }

    #[test]
    fn sharp_of_maxwell_covector() {
        let g = Arc::new(Grid::periodic(&[4, 4, 4]).unwrap());
        let mut s = FieldSampler::new(5);
        let e_rho = s.form(&g, 2);
        let e_pi = Form::basis_element(&g, &[0]).unwrap();
        let v = canonical_sharp(&CotangentAtPhase::new(e_rho.clone(), e_pi.clone()).unwrap());
        assert_eq!(v.rho_dot, e_pi);
        assert_eq!(v.pi_dot, -e_rho);
    }

    #[test]
    fn sharp_twice_negates_when_slots_share_degree() {
        let g = Arc::new(Grid::periodic(&[8, 8]).unwrap());
        let e = CotangentAtPhase::random(&mut FieldSampler::new(2), &g, 1);
        let twice = canonical_sharp(&canonical_sharp(&e).as_cotangent().unwrap());
        assert_eq!(twice.rho_dot, -&e.e_rho);
        assert_eq!(twice.pi_dot, -&e.e_pi);
    }

    #[test]
    fn sharp_is_linear() {
        let g = Arc::new(Grid::periodic(&[8, 8, 8]).unwrap());
        let mut s = FieldSampler::new(3);
        let e1 = CotangentAtPhase::random(&mut s, &g, 1);
        let e2 = CotangentAtPhase::random(&mut s, &g, 1);
        let lhs = canonical_sharp(&e1.combine(2.0, &e2, -3.0));
        let r1 = canonical_sharp(&e1);
        let r2 = canonical_sharp(&e2);
        let rhs = TangentAtPhase {
            rho_dot: r1.rho_dot.scale(2.0).axpy(-3.0, &r2.rho_dot),
            pi_dot: r1.pi_dot.scale(2.0).axpy(-3.0, &r2.pi_dot),
        };
        assert_eq!(lhs.max_diff(&rhs), 0.0);
    }

    #[test]
    fn diagonal_dirac_pairing_is_duality() {
        let g = Arc::new(Grid::periodic(&[8]).unwrap());
        let mut s = FieldSampler::new(4);
        let p = DiracPair {
            v: TangentAtPhase::new(s.form(&g, 0), s.form(&g, 1)).unwrap(),
            alpha: CotangentAtPhase::random(&mut s, &g, 0),
        };
        let lhs = dirac_pairing(&p, &p).unwrap();
        let rhs = phase_duality(&p.alpha, &p.v).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn isotropy_on_circle() {
        let g = Arc::new(Grid::periodic(&[8]).unwrap());
        for k in 0..=1 {
            assert!(isotropy_residual(&g, k, 100, 42).unwrap() <= 1e-12);
        }
        let zero = [CotangentAtPhase::zeros(&g, 0)];
        assert_eq!(isotropy_residual_of(&zero).unwrap(), 0.0);
    }

    #[test]
    fn isotropy_scales_quadratically() {
        let g = Arc::new(Grid::periodic(&[4, 4]).unwrap());
        let mut s = FieldSampler::new(8);
        let es: Vec<_> = (0..5).map(|_| CotangentAtPhase::random(&mut s, &g, 1)).collect();
        let doubled: Vec<_> = es.iter().map(|e| e.scale(2.0)).collect();
        let r1 = isotropy_residual_of(&es).unwrap();
        let r2 = isotropy_residual_of(&doubled).unwrap();
        // (2,1) is the one non-isotropic case, which keeps r1 away from zero
        assert!(r1 > 1e-3);
        assert!((r2 - 4.0 * r1).abs() <= 1e-12 * r2);
    }

    #[test]
    fn graph_has_half_dimension() {
        let g = Grid::periodic(&[8, 8, 8]).unwrap();
        let (graph, ambient) = dimension_count(&g, 1);
        assert_eq!(2 * graph, ambient);
        assert_eq!(graph, 6 * 512);
    }
}
