//! File formats shared by the library and the command-line driver.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::doktorov::DuschinskyData;
use crate::error::{Result, VibError};
use crate::forcefield::ForceField;

/// Hartree to wavenumbers.
pub const HARTREE_TO_CM1: f64 = 219474.6313632;

/// Reads a force-field JSON file (1-based indices, atomic units).
pub fn parse_force_field(path: impl AsRef<Path>) -> Result<ForceField> {
    ForceField::from_path(path)
}

/// `{"U": [[..], ..], "d": [..]}`, rows of `U` as nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuschinskyFile {
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    pub d: Vec<f64>,
}

impl DuschinskyFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        let m = self.u.len();
        if let Some(row) = self.u.iter().find(|r| r.len() != m) {
            return Err(VibError::Parse(format!(
                "U must be square; found a row of length {} in a {m}-row matrix",
                row.len()
            )));
        }
        Ok(DMatrix::from_fn(m, m, |i, j| self.u[i][j]))
    }

    /// Combines the transform with the two surfaces' frequencies.
    pub fn into_data(&self, initial: &ForceField, final_: &ForceField) -> Result<DuschinskyData> {
        DuschinskyData::new(
            self.matrix()?,
            DVector::from_vec(self.d.clone()),
            initial.frequencies(),
            final_.frequencies(),
        )
    }
}
