//! JSON input files.
//!
//! | File | Shape |
//! |------|-------|
//! | space (matrix) | `{"dist": [[..]], "mu": [..], "x0": k}`, `x0` optional |
//! | space (grid) | `{"grid": {"lo": .., "hi": .., "n": .., "V": [..]}}` |
//! | density | `{"h": [..]}` |
//! | potential | `{"V": [..]}` |
//! | function | `{"g": [..]}`, one value per point (or per pair, row-major) |
//!
//! Unknown fields are rejected. All numbers are read as `f64`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tcost_core::{build_grid_space, validate_density, Density, MetricMeasureSpace};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    #[serde(rename = "V")]
    pub potential: Vec<f64>,
}

/// Either description of a space. Exactly one of `dist` and `grid` must be
/// present; `mu` goes with `dist`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridFile>,
}

impl SpaceFile {
    pub fn build(&self, origin: &Path) -> CliResult<MetricMeasureSpace> {
        let shape_error = |message: &str| CliError::Parse {
            path: origin.to_path_buf(),
            message: message.into(),
        };
        match (&self.dist, &self.mu, &self.grid) {
            (Some(dist), Some(mu), None) => Ok(MetricMeasureSpace::from_matrix(dist.clone(), mu.clone(), self.x0)?),
            (None, None, Some(g)) => {
                let space = build_grid_space(g.lo, g.hi, g.n, &g.potential)?;
                match self.x0 {
                    Some(k) => Ok(space.with_base_point(k)?),
                    None => Ok(space),
                }
            }
            (Some(_), None, None) => Err(shape_error("`dist` needs `mu`")),
            (None, Some(_), None) => Err(shape_error("`mu` needs `dist`")),
            (None, None, None) => Err(shape_error("need either `dist` + `mu` or `grid`")),
            _ => Err(shape_error("`grid` cannot be combined with `dist`/`mu`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFile {
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    #[serde(rename = "V")]
    pub potential: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub g: Vec<f64>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text, path)
}

pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &Path) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_space(path: &Path) -> CliResult<MetricMeasureSpace> {
    read_json::<SpaceFile>(path)?.build(path)
}

pub fn load_density(space: &MetricMeasureSpace, path: &Path) -> CliResult<Density> {
    let file: DensityFile = read_json(path)?;
    Ok(validate_density(space, file.h)?)
}

pub fn load_potential(path: &Path) -> CliResult<Vec<f64>> {
    Ok(read_json::<PotentialFile>(path)?.potential)
}

/// Resolves `path` against the directory of the file that mentions it.
pub fn relative_to(base: Option<&Path>, path: &str) -> PathBuf {
    let p = Path::new(path);
    match base.and_then(Path::parent) {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}
