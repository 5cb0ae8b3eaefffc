use std::path::Path;

use crate::bioheat::SimulationConfig;
use crate::error::{Error, Result};

/// Parses a JSON configuration. Missing fields take the default values;
/// unknown fields are rejected. Errors name the line, column and field.
pub fn parse_config(text: &str, path: &Path) -> Result<SimulationConfig> {
    let cfg: SimulationConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate().map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, path)
}
