//! Curve parameter files and the built-in curve registry.
//!
//! A curve file is a small TOML document:
//!
//! ```toml
//! label = "toy-w28"
//! form = "short_weierstrass"   # or "twisted_edwards"
//! prime = "268435459"          # decimal or 0x-prefixed hex
//! a = "19"
//! b = "3"                      # twisted Edwards uses `d` instead
//! generator_x = "1"
//! generator_y = "93078984"
//! order = "268421059"          # prime order of the generator subgroup
//! cofactor = 1
//! attackable = true            # eligible for the discrete-log oracle
//! ```
//!
//! The toy curves were produced by the `curve-search` tool in this crate;
//! rerunning it reproduces these exact parameters.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Num;
use once_cell::sync::Lazy;
use serde::Deserialize;

use super::curve::{CurveEquation, CurveGroup};
use super::field::FieldElement;
use super::EcError;

pub const TOY_WEIERSTRASS_LABEL: &str = "toy-w28";
pub const TOY_EDWARDS_LABEL: &str = "toy-ed30";
pub const SECP256K1_LABEL: &str = "secp256k1";
pub const ED25519_LABEL: &str = "ed25519";

static BUILTIN_SOURCES: &[(&str, &str)] = &[
    (
        TOY_WEIERSTRASS_LABEL,
        include_str!("../../presets/curves/toy-w28.toml"),
    ),
    (
        TOY_EDWARDS_LABEL,
        include_str!("../../presets/curves/toy-ed30.toml"),
    ),
    (
        SECP256K1_LABEL,
        include_str!("../../presets/curves/secp256k1.toml"),
    ),
    (
        ED25519_LABEL,
        include_str!("../../presets/curves/ed25519.toml"),
    ),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    label: String,
    form: String,
    prime: String,
    #[serde(default)]
    a: Option<String>,
    #[serde(default)]
    b: Option<String>,
    #[serde(default)]
    d: Option<String>,
    generator_x: String,
    generator_y: String,
    order: String,
    cofactor: u64,
    attackable: bool,
    #[serde(default)]
    #[allow(dead_code)]
    notes: Option<String>,
}

fn parse_biguint(s: &str, field: &str, source: &str) -> Result<BigUint, EcError> {
    let s = s.trim();
    let res = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        BigUint::from_str_radix(hex, 16)
    } else {
        BigUint::from_str_radix(s, 10)
    };
    res.map_err(|_| EcError::ParamFile {
        path: source.to_string(),
        reason: format!("field {field}: {s:?} is not a valid integer"),
    })
}

fn build_curve(text: &str, source: &str) -> Result<CurveGroup, EcError> {
    let file: CurveFile = toml::from_str(text).map_err(|e| EcError::ParamFile {
        path: source.to_string(),
        reason: e.to_string(),
    })?;
    let prime = Arc::new(parse_biguint(&file.prime, "prime", source)?);
    let need = |opt: &Option<String>, name: &str| -> Result<BigUint, EcError> {
        match opt {
            Some(v) => parse_biguint(v, name, source),
            None => Err(EcError::ParamFile {
                path: source.to_string(),
                reason: format!("missing coefficient {name} for form {}", file.form),
            }),
        }
    };
    let equation = match file.form.as_str() {
        "short_weierstrass" => CurveEquation::ShortWeierstrass {
            a: FieldElement::new(need(&file.a, "a")?, prime.clone()),
            b: FieldElement::new(need(&file.b, "b")?, prime.clone()),
        },
        "twisted_edwards" => CurveEquation::TwistedEdwards {
            a: FieldElement::new(need(&file.a, "a")?, prime.clone()),
            d: FieldElement::new(need(&file.d, "d")?, prime.clone()),
        },
        other => {
            return Err(EcError::ParamFile {
                path: source.to_string(),
                reason: format!("unknown curve form {other:?}"),
            })
        }
    };
    CurveGroup::new(
        file.label,
        equation,
        prime,
        parse_biguint(&file.generator_x, "generator_x", source)?,
        parse_biguint(&file.generator_y, "generator_y", source)?,
        parse_biguint(&file.order, "order", source)?,
        file.cofactor,
        file.attackable,
    )
}

static BUILTIN: Lazy<HashMap<&'static str, CurveGroup>> = Lazy::new(|| {
    BUILTIN_SOURCES
        .iter()
        .map(|(label, text)| {
            let group = build_curve(text, &format!("builtin:{label}"))
                .unwrap_or_else(|e| panic!("builtin curve {label} failed validation: {e}"));
            assert_eq!(group.label(), *label, "builtin curve label mismatch");
            (*label, group)
        })
        .collect()
});

/// Look up a built-in curve by label.
pub fn curve_by_label(label: &str) -> Result<CurveGroup, EcError> {
    BUILTIN
        .get(label)
        .cloned()
        .ok_or_else(|| EcError::UnknownCurve {
            label: label.to_string(),
        })
}

pub fn builtin_curve_labels() -> Vec<&'static str> {
    let mut labels: Vec<&'static str> = BUILTIN_SOURCES.iter().map(|(l, _)| *l).collect();
    labels.sort_unstable();
    labels
}

/// Load and validate a curve parameter file from disk.
pub fn load_curve_file(path: &std::path::Path) -> Result<CurveGroup, EcError> {
    let text = std::fs::read_to_string(path).map_err(|e| EcError::ParamFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    build_curve(&text, &path.display().to_string())
}

/// Resolve a curve reference: a built-in label, or a path to a curve file.
pub fn resolve_curve(reference: &str) -> Result<CurveGroup, EcError> {
    if let Ok(g) = curve_by_label(reference) {
        return Ok(g);
    }
    let path = std::path::Path::new(reference);
    if path.exists() {
        return load_curve_file(path);
    }
    Err(EcError::UnknownCurve {
        label: reference.to_string(),
    })
}
