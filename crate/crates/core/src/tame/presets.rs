//! Shipped TAME presets on `disc(−r, r)`.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::methods::{load_method, method_from_json, AwMethod, MethodMetadata};

/// Environment variable that overrides the preset directory.
pub const PRESET_DIR_ENV: &str = "AW_PRESET_DIR";

/// Reference quality figures of one preset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetRow {
    pub n_reduced: usize,
    pub radius: f64,
    pub epsilon: f64,
    pub max_abs_weight: f64,
    pub eta: f64,
}

const ROWS: [PresetRow; 8] = [
    PresetRow { n_reduced: 3, radius: 0.6, epsilon: 1.637909e-14, max_abs_weight: 5.462668e2, eta: 1.376747e-13 },
    PresetRow { n_reduced: 4, radius: 1.8, epsilon: 8.229408e-14, max_abs_weight: 3.402665e3, eta: 8.378375e-13 },
    PresetRow { n_reduced: 5, radius: 4.0, epsilon: 3.973128e-13, max_abs_weight: 7.669538e3, eta: 2.100292e-12 },
    PresetRow { n_reduced: 6, radius: 7.0, epsilon: 1.420889e-12, max_abs_weight: 1.684302e4, eta: 5.160790e-12 },
    PresetRow { n_reduced: 7, radius: 11.2, epsilon: 1.983229e-12, max_abs_weight: 3.981692e4, eta: 1.082436e-11 },
    PresetRow { n_reduced: 8, radius: 16.8, epsilon: 1.140301e-11, max_abs_weight: 5.302010e4, eta: 2.317583e-11 },
    PresetRow { n_reduced: 9, radius: 22.7, epsilon: 6.075754e-12, max_abs_weight: 1.296546e5, eta: 3.486487e-11 },
    PresetRow { n_reduced: 10, radius: 31.6, epsilon: 3.192135e-11, max_abs_weight: 1.495150e5, eta: 6.512034e-11 },
];

/// Reference rows, ordered by radius.
pub fn preset_rows() -> &'static [PresetRow] {
    &ROWS
}

/// File name of the preset with `n_reduced` terms.
pub fn preset_file_name(n_reduced: usize) -> String {
    format!("tame_n{n_reduced:02}.json")
}

fn preset_dir() -> PathBuf {
    match std::env::var_os(PRESET_DIR_ENV) {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/presets")),
    }
}

fn row_for(r_needed: f64) -> Result<&'static PresetRow> {
    if !(r_needed > 0.0) || !r_needed.is_finite() {
        return Err(Error::InvalidArgument(format!("required radius must be positive, got {r_needed}")));
    }
    ROWS.iter().find(|row| row.radius >= r_needed).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "no preset covers radius {r_needed}; the largest is {}; build one with build_tame",
            ROWS[ROWS.len() - 1].radius
        ))
    })
}

/// The preset with the smallest radius `≥ r_needed`, with its metadata.
pub fn preset_tame_with_metadata(r_needed: f64) -> Result<(AwMethod, MethodMetadata)> {
    let row = row_for(r_needed)?;
    let (m, meta) = if std::env::var_os(PRESET_DIR_ENV).is_some() {
        load_method(preset_dir().join(preset_file_name(row.n_reduced)))?
    } else {
        let text = embedded(row.n_reduced);
        let v = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        method_from_json(&v)?
    };
    Ok((m, meta))
}

/// The preset with the smallest radius `≥ r_needed`.
pub fn preset_tame(r_needed: f64) -> Result<AwMethod> {
    preset_tame_with_metadata(r_needed).map(|(m, _)| m)
}

fn embedded(n_reduced: usize) -> &'static str {
    match n_reduced {
        3 => include_str!("../../presets/tame_n03.json"),
        4 => include_str!("../../presets/tame_n04.json"),
        5 => include_str!("../../presets/tame_n05.json"),
        6 => include_str!("../../presets/tame_n06.json"),
        7 => include_str!("../../presets/tame_n07.json"),
        8 => include_str!("../../presets/tame_n08.json"),
        9 => include_str!("../../presets/tame_n09.json"),
        _ => include_str!("../../presets/tame_n10.json"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_rule() {
        assert_eq!(row_for(1.0).unwrap().n_reduced, 4);
        assert_eq!(row_for(4.0).unwrap().n_reduced, 5);
        assert_eq!(row_for(0.01).unwrap().n_reduced, 3);
        assert_eq!(row_for(31.6).unwrap().n_reduced, 10);
        assert!(row_for(31.7).is_err());
        assert!(row_for(0.0).is_err());
    }

    #[test]
    fn shipped_presets_match_reference_rows() {
        for row in preset_rows() {
            let (m, meta) = preset_tame_with_metadata(row.radius).unwrap();
            assert_eq!(m.full_len(), 2 * row.n_reduced);
            let eta = meta.eta.unwrap();
            assert!(eta <= 10.0 * row.eta && eta >= row.eta / 10.0, "N' = {}: eta {eta}", row.n_reduced);
        }
    }
}
