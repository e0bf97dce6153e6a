//! Browser bindings for a few lattice operations. Each export takes and
//! returns JSON text; errors come back as a message string.

use fqm_core::exact::rational::parse_rational;
use fqm_core::fqm::{gauss_sum, is_anisotropic, milgram_signature};
use fqm_core::json::CycloJson;
use fqm_core::lattice::{lattice_profile, DiscriminantForm, LatticeJson};
use fqm_core::theta::theta_coefficients;
use fqm_core::weil::{build_weil_matrices, verify_relations};
use fqm_core::{Error, GramMatrix};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest `|A|` for which the demo builds Weil matrices.
pub const MAX_WEIL_ORDER: u64 = 200;

fn lattice(text: &str) -> Result<GramMatrix, Error> {
    let raw: LatticeJson = serde_json::from_str(text)?;
    GramMatrix::new(raw.gram)
}

fn render(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).unwrap_or_default()
}

/// Signature, level, discriminant form and Gauss sum of `{"gram": ...}`.
#[wasm_bindgen]
pub fn analyze(lattice_json: &str) -> Result<String, String> {
    let run = || -> Result<String, Error> {
        let g = lattice(lattice_json)?;
        let profile = lattice_profile(&g)?;
        let a = DiscriminantForm::new(&g)?.fqm;
        Ok(render(json!({
            "profile": profile,
            "divisors": a.divisors(),
            "anisotropic": is_anisotropic(&a)?,
            "milgram_signature": milgram_signature(&a)?,
            "gauss_sum": CycloJson::from(&gauss_sum(&a, 1)),
        })))
    };
    run().map_err(|e| e.to_string())
}

/// Exact check of the Weil representation relations.
#[wasm_bindgen]
pub fn weil_relations(lattice_json: &str) -> Result<String, String> {
    let run = || -> Result<String, Error> {
        let g = lattice(lattice_json)?;
        let profile = lattice_profile(&g)?;
        let a = DiscriminantForm::new(&g)?.fqm;
        if a.order() > MAX_WEIL_ORDER {
            return Err(Error::SizeLimit { order: a.order(), bound: MAX_WEIL_ORDER });
        }
        let w = build_weil_matrices(&a, profile.sig)?;
        Ok(render(json!({ "level": w.level, "dim": w.basis.len(), "relations": verify_relations(&w) })))
    };
    run().map_err(|e| e.to_string())
}

/// Coset theta coefficients up to `n_max` as CSV, positive definite only.
#[wasm_bindgen]
pub fn theta_csv(lattice_json: &str, n_max: &str) -> Result<String, String> {
    let run = || -> Result<String, Error> {
        let g = lattice(lattice_json)?;
        Ok(theta_coefficients(&g, &parse_rational(n_max)?)?.to_csv())
    };
    run().map_err(|e| e.to_string())
}
