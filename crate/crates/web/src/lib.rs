//! Browser bindings: maxima bounds with their oracle, Archimedean tail
//! constants, and copula samples with tail-dependence coefficients.
//!
//! Every export returns a JSON string, `{"ok": ...}` or `{"error": "..."}`,
//! so the same functions run natively in tests.

use poisson_extremes::archimedean_tail::{exact_family_bound, tail_constants, total_bound, ArchimedeanFamily};
use poisson_extremes::copulas::{parse_family, sample_copula, tail_dependence};
use poisson_extremes::distributions::MarginalLaw;
use poisson_extremes::maxima_evt::{kolmogorov_oracle, max_bound, MaxScenario, Stage};
use poisson_extremes::Result;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn wrap(r: Result<Value>) -> String {
    match r {
        Ok(v) => json!({ "ok": v }).to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn law(name: &str, param: f64) -> Result<MarginalLaw> {
    match name {
        "exponential" => MarginalLaw::exponential(param),
        "pareto" => MarginalLaw::pareto(param, 1.0),
        "uniform" => MarginalLaw::uniform(0.0, 1.0),
        "normal" => Ok(MarginalLaw::StdNormal),
        "cauchy" => Ok(MarginalLaw::StdCauchy),
        "geometric" => MarginalLaw::geometric(param),
        other => Err(poisson_extremes::Error::InvalidParameter(format!("unknown law '{other}'"))),
    }
}

/// Kolmogorov bound for the maximum of `n` draws and the grid-sup oracle.
/// `param` is the rate, Pareto shape or geometric `q`; `stage` may be empty.
#[wasm_bindgen]
pub fn maxima_bound(name: &str, param: f64, n: u32, stage: &str) -> String {
    wrap((|| {
        let law = law(name, param)?;
        let stage = if stage.is_empty() { Stage::default_for(&law) } else { Stage::parse(&law, stage)? };
        let sc = MaxScenario::new(law, u64::from(n), stage)?;
        let report = max_bound(&sc)?;
        let oracle = kolmogorov_oracle(&sc)?;
        Ok(json!({ "report": report, "oracle": oracle }))
    })())
}

/// Tail constants and the bound at `s = t = sqrt(log n)/2`.
#[wasm_bindgen]
pub fn archimedean_bound(family: u8, theta: f64, n: f64) -> String {
    wrap((|| {
        let fam = ArchimedeanFamily::new(family, theta)?;
        let s = n.ln().sqrt() / 2.0;
        if family == 2 {
            return Ok(json!({ "report": exact_family_bound(&fam, n, s, s)? }));
        }
        let consts = tail_constants(&fam, None)?;
        let report = total_bound(&fam, &consts, n, s, s);
        Ok(match report {
            Ok(r) => json!({ "constants": consts, "report": r }),
            Err(e) => json!({ "constants": consts, "gate": e.to_string() }),
        })
    })())
}

/// `count` seeded pairs flattened as `[u0, v0, u1, v1, ...]` plus the
/// closed-form tail-dependence coefficients.
#[wasm_bindgen]
pub fn copula_scatter(name: &str, theta: f64, alpha: f64, beta: f64, count: u32, seed: u32) -> String {
    wrap((|| {
        let fam = parse_family(name, Some(theta), Some(alpha), Some(beta))?;
        let pairs = sample_copula(&fam, u64::from(seed), count as usize)?;
        let flat: Vec<f64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        let (lower, upper) = tail_dependence(&fam);
        Ok(json!({ "points": flat, "lower": lower, "upper": upper }))
    })())
}
