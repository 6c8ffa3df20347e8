//! JSON snapshots of forms.
//!
//! ```json
//! { "degree": 1, "sizes": [8, 8], "spacings": [0.78, 0.78], "metric": [1.0, 1.0],
//!   "components": { "1": [...], "2": [...] } }
//! ```
//!
//! Component keys are 1-based, comma separated multi-indices; a 0-form uses
//! the empty key `""`. Arrays are flattened row-major (axis 1 slowest).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::basis;
use super::form::Form;
use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormSnapshot {
    pub degree: usize,
    pub sizes: Vec<usize>,
    pub spacings: Vec<f64>,
    pub metric: Vec<f64>,
    pub components: BTreeMap<String, Vec<f64>>,
}

impl From<&Form> for FormSnapshot {
    fn from(form: &Form) -> Self {
        let grid = form.grid();
        let components = form
            .masks()
            .into_iter()
            .zip(form.components())
            .map(|(m, c)| (basis::label(m), c.clone()))
            .collect();
        FormSnapshot {
            degree: form.degree(),
            sizes: grid.sizes().to_vec(),
            spacings: grid.spacings().to_vec(),
            metric: grid.metric().to_vec(),
            components,
        }
    }
}

impl FormSnapshot {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.sizes.clone(), self.spacings.clone(), self.metric.clone())
    }

    /// Rebuilds the form on `grid`, which must match the snapshot's grid.
    pub fn to_form_on(&self, grid: &Arc<Grid>) -> Result<Form> {
        if **grid != self.grid()? {
            return Err(Error::GridMismatch);
        }
        let masks = basis::basis(grid.dim(), self.degree.min(grid.dim()));
        if self.components.len() != masks.len() {
            return Err(Error::InvalidComponents(format!(
                "degree {} needs {} components, snapshot has {}",
                self.degree,
                masks.len(),
                self.components.len()
            )));
        }
        let comps = masks
            .iter()
            .map(|&m| {
                let key = basis::label(m);
                self.components
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| Error::InvalidComponents(format!("missing component \"{key}\"")))
            })
            .collect::<Result<Vec<_>>>()?;
        Form::new(grid.clone(), self.degree, comps)
    }

    pub fn to_form(&self) -> Result<Form> {
        self.to_form_on(&Arc::new(self.grid()?))
    }
}

impl Form {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&FormSnapshot::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Form> {
        serde_json::from_str::<FormSnapshot>(s)?.to_form()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_one_based() {
        let g = Arc::new(Grid::periodic(&[4, 4, 4]).unwrap());
        let f = Form::basis_element(&g, &[0, 2]).unwrap();
        let snap = FormSnapshot::from(&f);
        assert_eq!(
            snap.components.keys().cloned().collect::<Vec<_>>(),
            vec!["1,2", "1,3", "2,3"]
        );
        assert!(snap.components["1,3"].iter().all(|&v| v == 1.0));
        let scalar = FormSnapshot::from(&Form::zeros(&g, 0));
        assert!(scalar.components.contains_key(""));
    }

    #[test]
    fn missing_component_is_reported() {
        let json = r#"{"degree":1,"sizes":[4],"spacings":[1.0],"metric":[1.0],"components":{"2":[0,0,0,0]}}"#;
        let err = Form::from_json(json).unwrap_err();
        assert!(err.to_string().contains("missing component"));
    }
}
