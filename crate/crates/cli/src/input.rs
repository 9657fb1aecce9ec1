//! Input resolution: catalog ids and divisor JSON files.

use fdk_core::catalog::{catalog_entry, CatalogEntry, DivisorFile};
use fdk_core::parse::parse_rational;
use fdk_core::polyring::Rat;
use fdk_core::{Error, Result};

pub struct ResolvedInput {
    pub description: serde_json::Value,
    pub file: DivisorFile,
    pub catalog: Option<CatalogEntry>,
}

pub fn resolve(input: &str) -> Result<ResolvedInput> {
    if let Some(id) = input.strip_prefix("catalog:") {
        let entry = catalog_entry(id)?;
        return Ok(ResolvedInput {
            description: serde_json::json!({"kind": "catalog", "id": entry.id}),
            file: entry.file.clone(),
            catalog: Some(entry),
        });
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::BadInput(format!("cannot read `{input}`: {e}")))?;
    let file: DivisorFile = serde_json::from_str(&text)
        .map_err(|e| Error::BadInput(format!("invalid divisor file `{input}`: {e}")))?;
    Ok(ResolvedInput {
        description: serde_json::json!({"kind": "file", "path": input}),
        file,
        catalog: None,
    })
}

impl ResolvedInput {
    /// h(p) from the flag, else the file, else 1.
    pub fn hp(&self, flag: &Option<String>) -> Result<Rat> {
        match flag {
            Some(text) => parse_rational(text),
            None => self.file.hp_value(),
        }
    }
}
