//! Divisor input files and the built-in catalog: normal crossing divisors
//! nc:1 .. nc:6, the star3 quiver discriminant, and the one-dimensional
//! point divisor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logfields::{compute_log_algebra, saito_criterion, DivisorAnalysis, LinearField};
use crate::parse::{parse_polynomial, parse_rational};
use crate::polyring::{Polynomial, Rat, VarContext};

/// A divisor description as read from a JSON input file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorFile {
    pub n: usize,
    pub variables: Vec<String>,
    /// Defining equation in the polynomial text grammar.
    pub h: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
    #[serde(default)]
    pub reductive_declared: bool,
    /// Value h(p) at the chosen base point, as rational text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hp: Option<String>,
    /// Optional declared log-field matrices (n x n, rational text entries,
    /// primal convention). When absent the fields are computed from h.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<Vec<Vec<String>>>>,
}

impl DivisorFile {
    pub fn context(&self) -> std::sync::Arc<VarContext> {
        match &self.weights {
            Some(w) => VarContext::with_weights(self.variables.clone(), w.clone()),
            None => VarContext::new(self.variables.clone()),
        }
    }

    pub fn parse_h(&self) -> Result<Polynomial> {
        let ctx = self.context();
        let h = parse_polynomial(&self.h, &ctx)?;
        if self.variables.len() != self.n {
            return Err(Error::BadInput(format!(
                "expected {} variables, file lists {}",
                self.n,
                self.variables.len()
            )));
        }
        match h.weighted_degree() {
            Some(d) if d == self.degree_target() => Ok(h),
            other => Err(Error::BadInput(format!(
                "h must be weighted-homogeneous of degree {} (got {:?})",
                self.degree_target(),
                other
            ))),
        }
    }

    fn degree_target(&self) -> i64 {
        self.n as i64
    }

    pub fn hp_value(&self) -> Result<Rat> {
        match &self.hp {
            Some(text) => parse_rational(text),
            None => Ok(Rat::from_integer(1.into())),
        }
    }

    /// Full divisor analysis: declared fields when present, otherwise log
    /// fields from the kernel computation, then Saito's criterion.
    pub fn analysis(&self) -> Result<DivisorAnalysis> {
        let h = self.parse_h()?;
        let fields: Vec<LinearField> = match &self.fields {
            Some(matrices) => matrices
                .iter()
                .map(|m| {
                    let rows: Vec<Vec<crate::polyring::Rat>> = m
                        .iter()
                        .map(|row| row.iter().map(|e| parse_rational(e)).collect())
                        .collect::<Result<_>>()?;
                    Ok(LinearField::new(rows, crate::logfields::FieldConvention::Primal))
                })
                .collect::<Result<_>>()?,
            None => {
                let (gd, _ad) = compute_log_algebra(&h)?;
                gd.into_iter().map(|(f, _)| f).collect()
            }
        };
        saito_criterion(&h, &fields)
    }
}

/// A catalog constant that is stored from the literature, not reproduced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoredConstant {
    pub name: String,
    pub value: String,
    pub provenance: String,
}

/// Known values for a catalog entry. Reproducible constants are re-derived
/// by the pipelines under `--verify`; stored-only values are tagged.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct CatalogConstants {
    /// Classical-normalization b-function roots as (root, multiplicity).
    pub classical_roots: Vec<(String, usize)>,
    pub resonance_c: Option<i64>,
    pub largest_admissible_beta0: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stored_literature: Vec<StoredConstant>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub file: DivisorFile,
    pub constants: CatalogConstants,
}

pub fn catalog_ids() -> Vec<String> {
    let mut ids: Vec<String> = (1..=6).map(|n| format!("nc:{n}")).collect();
    ids.push("star3".into());
    ids.push("point".into());
    ids
}

fn nc_entry(n: usize) -> CatalogEntry {
    let variables: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
    let h = variables.join("*");
    CatalogEntry {
        id: format!("nc:{n}"),
        file: DivisorFile {
            n,
            variables,
            h,
            weights: None,
            reductive_declared: true,
            hp: Some("1".into()),
            fields: None,
        },
        constants: CatalogConstants {
            classical_roots: vec![("-1".into(), n)],
            resonance_c: Some(-(n as i64)),
            largest_admissible_beta0: Some(-(n as i64) - 1),
            stored_literature: vec![],
        },
    }
}

fn star3_entry() -> CatalogEntry {
    CatalogEntry {
        id: "star3".into(),
        file: DivisorFile {
            n: 6,
            variables: vec![
                "a1".into(),
                "a2".into(),
                "b1".into(),
                "b2".into(),
                "c1".into(),
                "c2".into(),
            ],
            h: "(a1*b2 - a2*b1)*(b1*c2 - b2*c1)*(c1*a2 - c2*a1)".into(),
            weights: None,
            reductive_declared: true,
            hp: Some("1".into()),
            fields: None,
        },
        constants: CatalogConstants {
            classical_roots: vec![
                ("-4/3".into(), 1),
                ("-1".into(), 4),
                ("-2/3".into(), 1),
            ],
            resonance_c: Some(-8),
            largest_admissible_beta0: Some(-9),
            stored_literature: vec![StoredConstant {
                name: "v_filtration_roots_along_w0".into(),
                value: "-1, -3, -3, -3, -3, -5".into(),
                provenance: "stored: not reproduced by this tool".into(),
            }],
        },
    }
}

fn point_entry() -> CatalogEntry {
    CatalogEntry {
        id: "point".into(),
        file: DivisorFile {
            n: 1,
            variables: vec!["w".into()],
            h: "w".into(),
            weights: None,
            reductive_declared: true,
            hp: Some("1".into()),
            fields: None,
        },
        constants: CatalogConstants {
            classical_roots: vec![("-1".into(), 1)],
            resonance_c: Some(-1),
            largest_admissible_beta0: Some(-2),
            stored_literature: vec![],
        },
    }
}

/// Looks up a catalog entry by id (`nc:<n>` with 1 <= n <= 6, `star3`,
/// `point`).
pub fn catalog_entry(id: &str) -> Result<CatalogEntry> {
    if let Some(rest) = id.strip_prefix("nc:") {
        let n: usize = rest
            .parse()
            .map_err(|_| Error::UnknownCatalogId(id.into()))?;
        if (1..=6).contains(&n) {
            return Ok(nc_entry(n));
        }
        return Err(Error::UnknownCatalogId(id.into()));
    }
    match id {
        "star3" => Ok(star3_entry()),
        "point" => Ok(point_entry()),
        _ => Err(Error::UnknownCatalogId(id.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_entries_parse_and_analyze() {
        for id in catalog_ids() {
            let entry = catalog_entry(&id).unwrap();
            let h = entry.file.parse_h().unwrap();
            assert!(!h.is_zero(), "{id}");
            if entry.id != "star3" {
                // star3's analysis is exercised by the heavier suites.
                let analysis = entry.file.analysis().unwrap();
                assert_eq!(analysis.ad_basis.len(), entry.file.n - 1, "{id}");
            }
        }
    }

    #[test]
    fn star3_equation_has_six_terms() {
        let entry = catalog_entry("star3").unwrap();
        let h = entry.file.parse_h().unwrap();
        assert_eq!(h.weighted_degree(), Some(6));
        assert_eq!(h.num_terms(), 6);
        assert!(h.is_squarefree().unwrap());
    }

    #[test]
    fn unknown_ids_are_rejected() {
        assert!(catalog_entry("nc:7").is_err());
        assert!(catalog_entry("nope").is_err());
    }
}
