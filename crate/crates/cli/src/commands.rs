//! Command pipelines: each delegates to the core modules and assembles a
//! JSON report.

use std::path::Path;
use std::time::Duration;

use serde_json::json;

use fdk_core::bernstein::{
    bernstein_selfdual, check_symmetry, convert_normalization, resonance_constant,
    BernsteinPolynomial, ResonanceData,
};
use fdk_core::catalog::{catalog_entry, catalog_ids};
use fdk_core::groebner::{
    homogenized_symbol_check, sk_check, Arithmetic, Budget, SequenceCheckMode,
};
use fdk_core::logfields::{bracket_in_basis, dualize, DivisorAnalysis};
use fdk_core::parse::parse_rational;
use fdk_core::polyring::{rat_to_string, Rat};
use fdk_core::reduction::{
    gauge_normalize, localized_fl_presentation, quantum_de_specialize, reduced_presentation,
    transpose_identity_check,
};
use fdk_core::spencer::{
    build_spencer, check_d_squared, graded_koszul_matrix, homogenized_presentation,
    validate_presentation,
};
use fdk_core::tautsys::{fl_presentation, hat_presentation, homogenized_ideal_is};
use fdk_core::weyl::FiltrationKind;
use fdk_core::{Error, Result};

use crate::input::{resolve, ResolvedInput};
use crate::report::ReportBuilder;
use crate::Common;

const GROEBNER_BUDGET: Duration = Duration::from_secs(600);

pub fn run(
    name: &str,
    common: &Common,
    f: fn(&Common, &ResolvedInput, &mut ReportBuilder) -> Result<()>,
) -> Result<bool> {
    let resolved = resolve(&common.input)?;
    let mut rb = ReportBuilder::new(name);
    rb.input = resolved.description.clone();
    if let Some(p) = common.modular {
        rb.arithmetic = format!("modular {p}");
    }
    f(common, &resolved, &mut rb)?;
    rb.finish(common.out.as_deref())
}

fn arithmetic_of(common: &Common) -> Arithmetic {
    match common.modular {
        Some(p) => Arithmetic::Modular(p),
        None => Arithmetic::Exact,
    }
}

fn classical_b(analysis: &DivisorAnalysis) -> Result<(BernsteinPolynomial, BernsteinPolynomial)> {
    let b = bernstein_selfdual(&analysis.h)?;
    let classical = convert_normalization(&b)?;
    Ok((b, classical))
}

fn resonance_of(analysis: &DivisorAnalysis) -> Result<ResonanceData> {
    let (_, classical) = classical_b(analysis)?;
    let n = analysis.h.weighted_degree().ok_or(Error::Inhomogeneous)?;
    resonance_constant(&classical, n)
}

/// beta0 from the flag when present, else the largest admissible integer.
fn beta0_of(common: &Common, analysis: &DivisorAnalysis) -> Result<Rat> {
    if let Some(text) = &common.beta0 {
        return parse_rational(text);
    }
    let res = resonance_of(analysis)?;
    match res.largest_admissible_integer() {
        Some(v) => Ok(Rat::from_integer(v)),
        None => Err(Error::BadInput(
            "no integer resonance: pass --beta0 explicitly".into(),
        )),
    }
}

fn matrix_json(field: &fdk_core::logfields::LinearField) -> serde_json::Value {
    json!(field
        .matrix()
        .iter()
        .map(|row| row.iter().map(rat_to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn roots_json(b: &BernsteinPolynomial) -> serde_json::Value {
    json!(b
        .rational_roots
        .iter()
        .map(|(r, m)| json!({"root": rat_to_string(r), "multiplicity": m}))
        .collect::<Vec<_>>())
}

pub fn check_free(common: &Common, input: &ResolvedInput, rb: &mut ReportBuilder) -> Result<()> {
    let analysis = input.file.analysis()?;
    let brackets = bracket_in_basis(&analysis)?;
    let dual = if analysis.special {
        Some(dualize(&analysis)?)
    } else {
        None
    };
    rb.outputs = json!({
        "n": analysis.n,
        "h": analysis.h.to_string(),
        "saito_constant": rat_to_string(&analysis.saito_constant),
        "dim_gd": analysis.gd_basis.len(),
        "dim_ad": analysis.ad_basis.len(),
        "special": analysis.special,
        "gd_basis": analysis.gd_basis.iter().map(|(f, c)| json!({
            "matrix": matrix_json(f),
            "scalar": rat_to_string(c),
        })).collect::<Vec<_>>(),
        "bracket_closure": true,
        "bracket_dim": brackets.dim,
        "dual_fields_annihilate": dual.as_ref().map(|d| d.dual_fields.len()),
    });
    let _ = common;
    Ok(())
}

pub fn sk(common: &Common, input: &ResolvedInput, rb: &mut ReportBuilder) -> Result<()> {
    let analysis = input.file.analysis()?;
    let arithmetic = arithmetic_of(common);
    let budget = Budget::with_deadline(GROEBNER_BUDGET);
    let mode = common.mode.as_deref().unwrap_or("both");
    let mut certs = Vec::new();
    let mut verdicts = Vec::new();
    if mode == "order" || mode == "both" {
        let c = sk_check(&analysis, SequenceCheckMode::SkOrder, arithmetic, &budget)?;
        verdicts.push(c.verdict);
        certs.push(serde_json::to_value(&c).expect("serializable"));
    }
    if mode == "total" || mode == "both" {
        let c = sk_check(&analysis, SequenceCheckMode::SkTotal, arithmetic, &budget)?;
        verdicts.push(c.verdict);
        certs.push(serde_json::to_value(&c).expect("serializable"));
    }
    if certs.is_empty() {
        return Err(Error::BadInput(format!("unknown sk mode `{mode}`")));
    }
    let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
    rb.ok = verdicts.iter().all(|v| *v) && agree;
    rb.outputs = json!({
        "certificates": certs,
        "modes_agree": agree,
    });
    Ok(())
}

pub fn bfunction(common: &Common, input: &ResolvedInput, rb: &mut ReportBuilder) -> Result<()> {
    let analysis = input.file.analysis()?;
    let (reduction, classical) = classical_b(&analysis)?;
    let sym_red = check_symmetry(&reduction);
    let sym_cl = check_symmetry(&classical);
    rb.ok = sym_red && sym_cl;
    let mut catalog_check = serde_json::Value::Null;
    if common.verify {
        if let Some(entry) = &input.catalog {
            let derived: Vec<(String, usize)> = classical
                .rational_roots
                .iter()
                .map(|(r, m)| (rat_to_string(r), *m))
                .collect();
            let matches = derived == entry.constants.classical_roots;
            rb.ok = rb.ok && matches;
            catalog_check = json!({
                "classical_roots_match": matches,
                "stored": entry.constants.classical_roots,
            });
        }
    }
    rb.outputs = json!({
        "reduction": {
            "polynomial": reduction.poly.render("s"),
            "factored": reduction.factored_form(),
            "rational_roots": roots_json(&reduction),
            "symmetry": sym_red,
        },
        "classical": {
            "polynomial": classical.poly.render("s"),
            "factored": classical.factored_form(),
            "rational_roots": roots_json(&classical),
            "symmetry": sym_cl,
        },
        "functional_equation_leading_coefficient":
            rat_to_string(reduction.poly.leading().unwrap_or(&Rat::from_integer(1.into()))),
        "catalog_check": catalog_check,
    });
    Ok(())
}

pub fn resonance(common: &Common, input: &ResolvedInput, rb: &mut ReportBuilder) -> Result<()> {
    let analysis = input.file.analysis()?;
    let res = resonance_of(&analysis)?;
    let c_str = res.c.as_ref().map(|c| c.to_string());
    let largest = res.largest_admissible_integer();

    let mut table = Vec::new();
    if let Some(c) = &res.c {
        let c_i = i64::try_from(c.clone()).unwrap_or(0);
        for beta in (c_i - 4)..=(c_i + 2) {
            let b = Rat::from_integer(beta.into());
            table.push(json!({
                "beta0": beta.to_string(),
                "admissible": res.is_admissible(&b),
            }));
        }
    }
    if let Some(text) = &common.beta0 {
        let b = parse_rational(text)?;
        table.push(json!({
            "beta0": rat_to_string(&b),
            "admissible": res.is_admissible(&b),
        }));
    }
    let mut catalog_check = serde_json::Value::Null;
    if common.verify {
        if let Some(entry) = &input.catalog {
            let c_match = res
                .c
                .as_ref()
                .and_then(|c| i64::try_from(c.clone()).ok())
                == entry.constants.resonance_c;
            let l_match = largest
                .as_ref()
                .and_then(|c| i64::try_from(c.clone()).ok())
                == entry.constants.largest_admissible_beta0;
            rb.ok = rb.ok && c_match && l_match;
            catalog_check = json!({
                "c_matches": c_match,
                "largest_admissible_matches": l_match,
            });
        }
    }
    rb.outputs = json!({
        "n": res.n,
        "c": c_str,
        "largest_admissible_integer": largest.map(|v| v.to_string()),
        "shifted_root_sets": res.entries,
        "nonrational_degree": res.nonrational_degree,
        "admissibility": table,
        "catalog_check": catalog_check,
    });
    Ok(())
}

pub fn taut(common: &Common, input: &ResolvedInput, rb: &mut ReportBuilder) -> Result<()> {
    let analysis = input.file.analysis()?;
    let hp = input.hp(&common.hp)?;
    let beta0 = beta0_of(common, &analysis)?;
    let c = match &common.c {
        Some(text) => parse_rational(text)?,
        None => hp.clone(),
    };
    let n_deg = analysis.h.weighted_degree().ok_or(Error::Inhomogeneous)?;
    let d = common.d.unwrap_or(n_deg);

    let is_pres = homogenized_ideal_is(&analysis, &c, d)?;
    let hat = hat_presentation(&analysis, &hp, &beta0)?;
    let taut_pres = fl_presentation(&analysis, &hat)?;

    let arithmetic = arithmetic_of(common);
    let budget = Budget::with_deadline(GROEBNER_BUDGET);
    let sk_cert = sk_check(&analysis, SequenceCheckMode::SkOrder, arithmetic, &budget)?;
    let is_cert = homogenized_symbol_check(
        &analysis,
        &c,
        d,
        SequenceCheckMode::IsSymbols,
        arithmetic,
        &budget,
    )?;
    let res = resonance_of(&analysis)?;
    let admissible = res.is_admissible(&beta0);

    rb.ok = sk_cert.verdict && is_cert.verdict;
    rb.parameters = json!({
        "hp": rat_to_string(&hp),
        "beta0": rat_to_string(&beta0),
        "c": rat_to_string(&c),
        "d": d,
    });
    rb.outputs = json!({
        "homogenized_ideal_Is": is_pres.report(),
        "hat": hat.report(),
        "taut": taut_pres.report(),
        "certificates": {
            "sk_order": sk_cert,
            "Is_symbols": is_cert,
            "beta0_admissible": admissible,
        },
    });
    Ok(())
}

pub fn spencer(common: &Common, input: &ResolvedInput, rb: &mut ReportBuilder) -> Result<()> {
    let analysis = input.file.analysis()?;
    let hp = input.hp(&common.hp)?;
    let c = match &common.c {
        Some(text) => parse_rational(text)?,
        None => hp,
    };
    let n_deg = analysis.h.weighted_degree().ok_or(Error::Inhomogeneous)?;
    let d = common.d.unwrap_or(n_deg);

    let presentation = homogenized_presentation(&analysis, &c, d)?;
    let validation = validate_presentation(&presentation)?;
    let complex = build_spencer(&presentation)?;
    let d_squared = check_d_squared(&complex)?;
    let koszul_total = graded_koszul_matrix(&complex, FiltrationKind::TotalOrder, true)?;
    let koszul_order = graded_koszul_matrix(&complex, FiltrationKind::Order, true)?;
    rb.ok = d_squared && koszul_total.equal && koszul_order.equal;
    rb.parameters = json!({"c": rat_to_string(&c), "d": d});
    rb.outputs = json!({
        "m": complex.m,
        "term_ranks": complex.subsets.iter().map(|s| s.len()).collect::<Vec<_>>(),
        "validation": validation,
        "d_squared_zero": d_squared,
        "graded_koszul": [koszul_total, koszul_order],
    });
    Ok(())
}

pub fn reduce(common: &Common, input: &ResolvedInput, rb: &mut ReportBuilder) -> Result<()> {
    let analysis = input.file.analysis()?;
    let hp = input.hp(&common.hp)?;
    let beta0 = beta0_of(common, &analysis)?;

    let lambda_side = reduced_presentation(&analysis, &hp, &beta0)?;
    let z_side = localized_fl_presentation(&lambda_side)?;
    let gauged = gauge_normalize(&z_side)?;
    let qde = quantum_de_specialize(&gauged)?;

    let (b_red, b_cl) = classical_b(&analysis)?;
    let transpose = transpose_identity_check(&b_red)?;
    rb.ok = transpose.holds;
    rb.parameters = json!({
        "hp": rat_to_string(&hp),
        "beta0": rat_to_string(&beta0),
    });
    rb.outputs = json!({
        "lambda_side": lambda_side.report(),
        "z_side": z_side.report(),
        "gauge_normalized": gauged.report(),
        "quantum_de": qde.to_string(),
        "transpose_identity": transpose,
        "bfunction": {
            "reduction_factored": b_red.factored_form(),
            "classical_factored": b_cl.factored_form(),
        },
    });
    Ok(())
}

pub fn catalog(id: Option<&str>, out: Option<&Path>) -> Result<bool> {
    let value = match id {
        None | Some("list") => json!({
            "schema_version": crate::report::SCHEMA_VERSION,
            "catalog": catalog_ids(),
        }),
        Some(raw) => {
            let id = raw.strip_prefix("catalog:").unwrap_or(raw);
            let entry = catalog_entry(id)?;
            serde_json::to_value(&entry).expect("serializable")
        }
    };
    crate::report::emit(&value, out)?;
    Ok(true)
}
