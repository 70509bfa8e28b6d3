//! Template files: one JSON object per enrolled subject.

use std::path::Path;

use lipdyn_core::verifier::Template;

use crate::error::{CliError, Result};

pub fn save_template(path: &Path, template: &Template) -> Result<()> {
    let mut text = serde_json::to_string_pretty(template).expect("templates serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn load_template(path: &Path) -> Result<Template> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let t: Template = serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))?;
    Template::new(t.subject, t.gallery, t.tau, t.model_version, t.created).map_err(|e| CliError::from(e).at(path))
}
