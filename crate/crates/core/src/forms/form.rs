use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::basis::{self, Mask};
use super::grid::Grid;
use crate::error::{Error, Result};

/// A differential k-form on a periodic grid, sampled at the nodes.
///
/// Components are indexed by strictly increasing multi-indices in
/// lexicographic order, one node array per multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    degree: usize,
    grid: Arc<Grid>,
    components: Vec<Vec<f64>>,
}

/// A vector field given by its contravariant components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Arc<Grid>,
    components: Vec<Vec<f64>>,
}

fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn check_shape(grid: &Grid, expected: usize, components: &[Vec<f64>]) -> Result<()> {
    if components.len() != expected {
        return Err(Error::InvalidComponents(format!(
            "expected {expected} component arrays, got {}",
            components.len()
        )));
    }
    if let Some(c) = components.iter().find(|c| c.len() != grid.len()) {
        return Err(Error::InvalidComponents(format!(
            "component has {} samples, grid has {} nodes",
            c.len(),
            grid.len()
        )));
    }
    Ok(())
}

impl Form {
    pub fn new(grid: Arc<Grid>, degree: usize, components: Vec<Vec<f64>>) -> Result<Self> {
        if degree > grid.dim() {
            return Err(Error::DegreeOverflow {
                left: degree,
                right: 0,
                dim: grid.dim(),
            });
        }
        check_shape(&grid, basis::binomial(grid.dim(), degree), &components)?;
        Ok(Self { degree, grid, components })
    }

    pub fn zeros(grid: &Arc<Grid>, degree: usize) -> Self {
        assert!(degree <= grid.dim(), "degree {degree} exceeds dimension");
        let count = basis::binomial(grid.dim(), degree);
        Self {
            degree,
            grid: grid.clone(),
            components: vec![vec![0.0; grid.len()]; count],
        }
    }

    /// 0-form with the given node values.
    pub fn scalar(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid.clone(), 0, vec![values])
    }

    /// Top-degree form `values · dx^1 ∧ … ∧ dx^n`.
    pub fn top(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid.clone(), grid.dim(), vec![values])
    }

    /// Form with spatially constant components.
    pub fn constant(grid: &Arc<Grid>, degree: usize, values: &[f64]) -> Result<Self> {
        let comps = values.iter().map(|&v| vec![v; grid.len()]).collect();
        Self::new(grid.clone(), degree, comps)
    }

    /// `dx^{i_1} ∧ … ∧ dx^{i_k}` for strictly increasing 0-based axes.
    pub fn basis_element(grid: &Arc<Grid>, axes: &[usize]) -> Result<Self> {
        if axes.windows(2).any(|w| w[0] >= w[1]) || axes.iter().any(|&a| a >= grid.dim()) {
            return Err(Error::InvalidComponents(format!(
                "{axes:?} is not an increasing multi-index in dimension {}",
                grid.dim()
            )));
        }
        let mask = axes.iter().fold(0 as Mask, |m, &a| m | (1 << a));
        let mut f = Self::zeros(grid, axes.len());
        let s = basis::slot(grid.dim(), mask);
        f.components[s].iter_mut().for_each(|v| *v = 1.0);
        Ok(f)
    }

    /// Riemannian volume form `dV = sqrt(det g) dx^1 ∧ … ∧ dx^n`.
    pub fn volume(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, grid.dim(), &[grid.volume_scale()]).expect("top degree")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.components
    }

    /// Component along `dx^{axes}` (0-based, strictly increasing).
    pub fn component(&self, axes: &[usize]) -> &[f64] {
        let mask = axes.iter().fold(0 as Mask, |m, &a| m | (1 << a));
        assert_eq!(mask.count_ones() as usize, self.degree);
        &self.components[basis::slot(self.dim(), mask)]
    }

    /// Single node array of a 0-form or top-degree form.
    pub fn values(&self) -> &[f64] {
        assert_eq!(self.components.len(), 1, "values() needs a 0-form or top form");
        &self.components[0]
    }

    pub(crate) fn masks(&self) -> Vec<Mask> {
        basis::basis(self.dim(), self.degree)
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|v| v.is_finite())
    }

    /// Largest pointwise difference between two forms of the same type.
    pub fn max_diff(&self, other: &Form) -> f64 {
        assert_eq!(self.degree, other.degree);
        self.components
            .iter()
            .flatten()
            .zip(other.components.iter().flatten())
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    }

    pub(crate) fn check_compatible(&self, other: &Form, context: &'static str) -> Result<()> {
        same_grid(&self.grid, &other.grid)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                context,
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub(crate) fn expect_degree(&self, degree: usize, context: &'static str) -> Result<()> {
        if self.degree != degree {
            return Err(Error::DegreeMismatch {
                context,
                expected: degree,
                found: self.degree,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Form, f: impl Fn(f64, f64) -> f64) -> Form {
        assert!(
            self.degree == other.degree && (Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid),
            "forms must share degree and grid"
        );
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Form {
            degree: self.degree,
            grid: self.grid.clone(),
            components,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Form {
        Form {
            degree: self.degree,
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Form {
        self.map(|v| v * s)
    }

    /// Pointwise product with a node function.
    pub fn mul_pointwise(&self, f: &[f64]) -> Form {
        assert_eq!(f.len(), self.grid.len());
        Form {
            degree: self.degree,
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().zip(f).map(|(a, b)| a * b).collect())
                .collect(),
        }
    }

    /// Pointwise quotient by a node function.
    pub fn div_pointwise(&self, f: &[f64]) -> Form {
        assert_eq!(f.len(), self.grid.len());
        Form {
            degree: self.degree,
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().zip(f).map(|(a, b)| a / b).collect())
                .collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Form) -> Form {
        self.zip_with(other, |a, b| a + s * b)
    }

    /// Number of scalars needed to store the form.
    pub fn flat_len(&self) -> usize {
        self.components.len() * self.grid.len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.components.concat()
    }

    pub fn from_flat(grid: &Arc<Grid>, degree: usize, data: &[f64]) -> Result<Self> {
        let count = basis::binomial(grid.dim(), degree);
        if data.len() != count * grid.len() {
            return Err(Error::InvalidComponents(format!(
                "flat buffer of length {} cannot hold {count} components of {} nodes",
                data.len(),
                grid.len()
            )));
        }
        let components = data.chunks(grid.len()).map(|c| c.to_vec()).collect();
        Self::new(grid.clone(), degree, components)
    }

    /// Exterior derivative built from centered differences.
    ///
    /// `(da)_K = Σ_p (-1)^p D_{k_p} a_{K \ k_p}`. Centered differences along
    /// different axes commute, so `d(da) = 0` up to rounding.
    pub fn d(&self) -> Result<Form> {
        let n = self.dim();
        if self.degree >= n {
            return Err(Error::TopFormDerivative {
                degree: self.degree,
                dim: n,
            });
        }
        let src = self.masks();
        // D_i a_I for every (axis, source component) pair that is needed
        let mut out = Form::zeros(&self.grid, self.degree + 1);
        for (slot, &target) in basis::basis(n, self.degree + 1).iter().enumerate() {
            for (p, axis) in basis::axes(target).enumerate() {
                let rest = target & !(1 << axis);
                let s = src.iter().position(|&m| m == rest).expect("face in basis");
                let diff = self.grid.centered_difference(&self.components[s], axis);
                let sign = basis::parity_sign(p);
                for (o, v) in out.components[slot].iter_mut().zip(diff) {
                    *o += sign * v;
                }
            }
        }
        Ok(out)
    }

    /// Pointwise wedge product.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        same_grid(&self.grid, &other.grid)?;
        let n = self.dim();
        let (k, l) = (self.degree, other.degree);
        if k + l > n {
            return Err(Error::DegreeOverflow { left: k, right: l, dim: n });
        }
        let left = self.masks();
        let right = other.masks();
        let mut out = Form::zeros(&self.grid, k + l);
        for (slot, &target) in basis::basis(n, k + l).iter().enumerate() {
            for (ia, &a) in left.iter().enumerate() {
                if a & target != a {
                    continue;
                }
                let b = target & !a;
                let ib = right.iter().position(|&m| m == b).expect("complement in basis");
                let sign = basis::concat_sign(a, b);
                let dst = &mut out.components[slot];
                for ((o, x), y) in dst.iter_mut().zip(&self.components[ia]).zip(&other.components[ib]) {
                    *o += sign * x * y;
                }
            }
        }
        Ok(out)
    }

    /// Hodge star for the diagonal metric:
    /// `⋆dx^I = sign(I, I^c) sqrt(det g) Π_{i∈I} g^{ii} dx^{I^c}`.
    pub fn hodge(&self) -> Form {
        let n = self.dim();
        let metric = self.grid.metric();
        let full = basis::full(n);
        let mut out = Form::zeros(&self.grid, n - self.degree);
        for (s, &mask) in self.masks().iter().enumerate() {
            let comp = full & !mask;
            let inv: f64 = basis::axes(mask).map(|a| metric[a]).product();
            let factor = basis::concat_sign(mask, comp) * self.grid.volume_scale() / inv;
            let dst = basis::slot(n, comp);
            out.components[dst] = self.components[s].iter().map(|v| factor * v).collect();
        }
        out
    }

    /// Raises the index of a 1-form with the inverse metric.
    pub fn sharp(&self) -> Result<VectorField> {
        self.expect_degree(1, "sharp")?;
        let metric = self.grid.metric();
        let components = self
            .components
            .iter()
            .zip(metric)
            .map(|(c, &g)| c.iter().map(|v| v / g).collect())
            .collect();
        Ok(VectorField {
            grid: self.grid.clone(),
            components,
        })
    }

    /// Interior product `i_X a`, contracting the first slot.
    pub fn interior(&self, x: &VectorField) -> Result<Form> {
        same_grid(&self.grid, &x.grid)?;
        if self.degree == 0 {
            return Err(Error::DegreeMismatch {
                context: "interior product needs degree >= 1",
                expected: 1,
                found: 0,
            });
        }
        let n = self.dim();
        let src = self.masks();
        let mut out = Form::zeros(&self.grid, self.degree - 1);
        for (slot, &target) in basis::basis(n, self.degree - 1).iter().enumerate() {
            for axis in (0..n).filter(|a| target & (1 << a) == 0) {
                let full = target | (1 << axis);
                let pos = basis::axes(target).filter(|&b| b < axis).count();
                let s = src.iter().position(|&m| m == full).expect("coface in basis");
                let sign = basis::parity_sign(pos);
                let dst = &mut out.components[slot];
                for ((o, a), xi) in dst.iter_mut().zip(&self.components[s]).zip(&x.components[axis]) {
                    *o += sign * xi * a;
                }
            }
        }
        Ok(out)
    }

    /// Lie derivative by Cartan's formula `ℒ_X a = i_X da + d i_X a`.
    ///
    /// For top-degree forms `da` is taken as zero, for 0-forms `i_X a` is.
    pub fn lie(&self, x: &VectorField) -> Result<Form> {
        let n = self.dim();
        match self.degree {
            0 => self.d()?.interior(x),
            k if k == n => self.interior(x)?.d(),
            _ => Ok(&self.d()?.interior(x)? + &self.interior(x)?.d()?),
        }
    }

    /// `∫_M a` for a top-degree form: cell volume times the node sum,
    /// accumulated in storage order.
    pub fn integrate(&self) -> Result<f64> {
        self.expect_degree(self.dim(), "integrate")?;
        let sum: f64 = self.components[0].iter().sum();
        Ok(self.grid.cell_volume() * sum)
    }

    /// Duality pairing `⟨a, b⟩ = ∫ a ∧ b` between complementary degrees.
    pub fn pair(&self, other: &Form) -> Result<f64> {
        same_grid(&self.grid, &other.grid)?;
        let n = self.dim();
        if self.degree + other.degree != n {
            return Err(Error::DegreeMismatch {
                context: "pairing needs complementary degrees",
                expected: n - self.degree.min(n),
                found: other.degree,
            });
        }
        self.wedge(other)?.integrate()
    }

    /// Discrete L² inner product `∫ a ∧ ⋆b`.
    pub fn inner(&self, other: &Form) -> Result<f64> {
        self.check_compatible(other, "inner product")?;
        self.wedge(&other.hodge())?.integrate()
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.map(|v| -v)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

impl Mul<&Form> for f64 {
    type Output = Form;
    fn mul(self, rhs: &Form) -> Form {
        rhs.scale(self)
    }
}

impl VectorField {
    pub fn new(grid: Arc<Grid>, components: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(&grid, grid.dim(), &components)?;
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            components: vec![vec![0.0; grid.len()]; grid.dim()],
        }
    }

    /// Spatially constant field.
    pub fn constant(grid: &Arc<Grid>, values: &[f64]) -> Result<Self> {
        Self::new(grid.clone(), values.iter().map(|&v| vec![v; grid.len()]).collect())
    }

    /// The coordinate field `∂_axis`.
    pub fn coordinate(grid: &Arc<Grid>, axis: usize) -> Self {
        let mut x = Self::zeros(grid);
        x.components[axis].iter_mut().for_each(|v| *v = 1.0);
        x
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn max_diff(&self, other: &VectorField) -> f64 {
        self.components
            .iter()
            .flatten()
            .zip(other.components.iter().flatten())
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    }

    pub fn scale(&self, s: f64) -> VectorField {
        self.mul_pointwise(&vec![s; self.grid.len()])
    }

    pub fn mul_pointwise(&self, f: &[f64]) -> VectorField {
        VectorField {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().zip(f).map(|(a, b)| a * b).collect())
                .collect(),
        }
    }

    pub fn div_pointwise(&self, f: &[f64]) -> VectorField {
        VectorField {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().zip(f).map(|(a, b)| a / b).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        same_grid(&self.grid, &other.grid)?;
        Ok(VectorField {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        })
    }

    /// Lowers the index with the metric.
    pub fn flat(&self) -> Form {
        let components = self
            .components
            .iter()
            .zip(self.grid.metric())
            .map(|(c, &g)| c.iter().map(|v| v * g).collect())
            .collect();
        Form {
            degree: 1,
            grid: self.grid.clone(),
            components,
        }
    }

    /// Jacobi-Lie bracket `[X, Y]^i = X^j ∂_j Y^i - Y^j ∂_j X^i`, with
    /// centered differences.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        same_grid(&self.grid, &other.grid)?;
        let n = self.grid.dim();
        let len = self.grid.len();
        let mut components = vec![vec![0.0; len]; n];
        for (i, out) in components.iter_mut().enumerate() {
            for j in 0..n {
                let dy = self.grid.centered_difference(&other.components[i], j);
                let dx = self.grid.centered_difference(&self.components[i], j);
                for p in 0..len {
                    out[p] += self.components[j][p] * dy[p] - other.components[j][p] * dx[p];
                }
            }
        }
        Ok(VectorField {
            grid: self.grid.clone(),
            components,
        })
    }

    /// Pointwise `g(X, Y)`.
    pub fn metric_dot(&self, other: &VectorField) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for ((a, b), &g) in self.components.iter().zip(&other.components).zip(self.grid.metric()) {
            for (o, (x, y)) in out.iter_mut().zip(a.iter().zip(b)) {
                *o += g * x * y;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle4() -> Arc<Grid> {
        Arc::new(Grid::new(vec![4], vec![PI / 2.0], vec![1.0]).unwrap())
    }

    #[test]
    fn derivative_of_sampled_sine_on_four_nodes() {
        let g = circle4();
        let a = Form::scalar(&g, vec![0.0, 1.0, 0.0, -1.0]).unwrap();
        let da = a.d().unwrap();
        assert_eq!(da.degree(), 1);
        let expected = [2.0 / PI, 0.0, -2.0 / PI, 0.0];
        for (v, e) in da.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = Arc::new(Grid::periodic(&[6, 4]).unwrap());
        let c = Form::constant(&g, 1, &[3.0, -2.0]).unwrap();
        assert_eq!(c.d().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn top_form_derivative_is_an_error() {
        let g = circle4();
        let top = Form::top(&g, vec![1.0; 4]).unwrap();
        let err = top.d().unwrap_err();
        assert!(err.to_string().contains("derivative of top form undefined"));
    }

    #[test]
    fn wedge_basis_and_overflow() {
        let g = Arc::new(Grid::periodic(&[4, 4]).unwrap());
        let dx = Form::basis_element(&g, &[0]).unwrap();
        let dy = Form::basis_element(&g, &[1]).unwrap();
        let w = dx.wedge(&dy).unwrap();
        assert_eq!(w.degree(), 2);
        assert!(w.values().iter().all(|&v| v == 1.0));
        assert_eq!(dy.wedge(&dx).unwrap().values()[0], -1.0);
        assert!(matches!(w.wedge(&dx), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn wedge_rejects_foreign_grid() {
        let a = Form::zeros(&Arc::new(Grid::periodic(&[4]).unwrap()), 0);
        let b = Form::zeros(&Arc::new(Grid::periodic(&[6]).unwrap()), 0);
        assert!(matches!(a.wedge(&b), Err(Error::GridMismatch)));
    }

    #[test]
    fn scalar_wedge_is_pointwise_product() {
        let g = Arc::new(Grid::periodic(&[4, 4]).unwrap());
        let f = Form::scalar(&g, (0..16).map(|i| i as f64).collect()).unwrap();
        let a = Form::constant(&g, 1, &[2.0, -1.0]).unwrap();
        let w = f.wedge(&a).unwrap();
        assert_eq!(w, a.mul_pointwise(f.values()));
    }

    #[test]
    fn hodge_basis_cases() {
        let g = Arc::new(Grid::periodic(&[4, 4, 4]).unwrap());
        let dx1 = Form::basis_element(&g, &[0]).unwrap();
        let dx23 = Form::basis_element(&g, &[1, 2]).unwrap();
        assert_eq!(dx1.hodge(), dx23);

        let s = Arc::new(Grid::new(vec![4], vec![1.0], vec![4.0]).unwrap());
        let one = Form::constant(&s, 0, &[1.0]).unwrap();
        assert_eq!(one.hodge().values()[0], 2.0);
    }

    #[test]
    fn sharp_and_flat_with_metric() {
        let s = Arc::new(Grid::new(vec![4], vec![1.0], vec![4.0]).unwrap());
        let dx = Form::basis_element(&s, &[0]).unwrap();
        let v = dx.sharp().unwrap();
        assert_eq!(v.components()[0][0], 0.25);
        assert_eq!(v.flat(), dx);
        let zero = Form::zeros(&s, 0);
        assert!(zero.sharp().is_err());
    }

    #[test]
    fn interior_product_basis_signs() {
        let g = Arc::new(Grid::periodic(&[4, 4]).unwrap());
        let w = Form::basis_element(&g, &[0, 1]).unwrap();
        let e1 = VectorField::coordinate(&g, 0);
        let e2 = VectorField::coordinate(&g, 1);
        assert_eq!(w.interior(&e1).unwrap(), Form::basis_element(&g, &[1]).unwrap());
        assert_eq!(w.interior(&e2).unwrap(), -Form::basis_element(&g, &[0]).unwrap());
        assert!(Form::zeros(&g, 0).interior(&e1).is_err());
    }

    #[test]
    fn integrate_constant_on_circle() {
        let g = circle4();
        let one = Form::top(&g, vec![1.0; 4]).unwrap();
        assert!((one.integrate().unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!(Form::zeros(&Arc::new(Grid::periodic(&[4, 4]).unwrap()), 1)
            .integrate()
            .is_err());
    }

    #[test]
    fn integrate_sine_samples() {
        let g = Arc::new(Grid::periodic(&[16]).unwrap());
        let s = Form::top(&g, g.sample(|x| x[0].sin())).unwrap();
        assert!(s.integrate().unwrap().abs() < 1e-14);
    }

    #[test]
    fn pairing_constant_and_errors() {
        let g = circle4();
        let one = Form::constant(&g, 0, &[1.0]).unwrap();
        let dx = Form::basis_element(&g, &[0]).unwrap();
        assert!((one.pair(&dx).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert_eq!(one.pair(&Form::zeros(&g, 1)).unwrap(), 0.0);
        assert!(one.pair(&one).is_err());
    }

    #[test]
    fn lie_derivative_of_sine_is_cosine() {
        let g = Arc::new(Grid::periodic(&[64]).unwrap());
        let a = Form::scalar(&g, g.sample(|x| x[0].sin())).unwrap();
        let la = a.lie(&VectorField::coordinate(&g, 0)).unwrap();
        let h = g.spacings()[0];
        // centered differences scale the derivative by sin(h)/h
        let factor = h.sin() / h;
        for (i, v) in la.values().iter().enumerate() {
            let x = g.coords(i)[0];
            assert!((v - factor * x.cos()).abs() < 1e-13);
            assert!((v - x.cos()).abs() < 2e-3);
        }
    }

    #[test]
    fn lie_derivative_of_top_form_is_d_of_contraction() {
        let g = Arc::new(Grid::periodic(&[8, 8]).unwrap());
        let rho = Form::top(&g, g.sample(|x| 2.0 + x[0].sin() * x[1].cos())).unwrap();
        let x = VectorField::new(
            g.clone(),
            vec![g.sample(|x| x[1].cos()), g.sample(|x| x[0].sin())],
        )
        .unwrap();
        assert_eq!(rho.lie(&x).unwrap(), rho.interior(&x).unwrap().d().unwrap());
    }

    #[test]
    fn flat_roundtrip_from_form() {
        let g = Arc::new(Grid::new(vec![4, 4], vec![0.5, 0.25], vec![3.0, 0.7]).unwrap());
        let a = Form::new(
            g.clone(),
            1,
            vec![g.sample(|x| x[0] - x[1]), g.sample(|x| (3.0 * x[1]).cos())],
        )
        .unwrap();
        assert!(a.sharp().unwrap().flat().max_diff(&a) < 1e-15);
    }
}
