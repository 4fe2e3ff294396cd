use clap::{ArgGroup, Args};
use poisson_extremes::archimedean_tail::{exact_family_bound, tail_constants, total_bound, ArchimedeanFamily};
use poisson_extremes::maxima_evt::{exceedance_bound, max_bound, MaxScenario, Stage};
use poisson_extremes::mo_geometric::{bound_ledger, lemma_cond_check, MOGeoScenario};
use poisson_extremes::BoundReport;

use crate::common::{coordinate, level, parse_number, whole, LawArgs, Outcome};
use crate::output::{num, Emit, Table};

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("model").required(true).args(["law", "arch", "mogeo"])))]
pub struct BoundArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Maxima stage: a, b, c or a stage name
    #[arg(long)]
    pub stage: Option<String>,
    /// Archimedean family number
    #[arg(long)]
    pub arch: Option<u8>,
    /// Marshall-Olkin geometric exceedances
    #[arg(long)]
    pub mogeo: bool,
    #[arg(long, default_value_t = 100.0)]
    pub n: f64,
    /// Threshold: number or `loglog`; with --law switches to the exceedance bound
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    #[arg(long, default_value_t = 1.5)]
    pub theta: f64,
    /// Number or `sqrtlog`
    #[arg(long)]
    pub s: Option<String>,
    /// Number or `sqrtlog`; defaults to s
    #[arg(long)]
    pub t: Option<String>,
    /// Override the tabulated radius r0
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Number or `1/n`
    #[arg(long)]
    pub p11: Option<String>,
}

pub fn run(a: &BoundArgs) -> Outcome<Emit> {
    if let Some(id) = a.arch {
        return archimedean(a, id);
    }
    if a.mogeo {
        return mogeo(a);
    }
    let law = a.law.law_or("exponential")?;
    let n = whole(a.n)?;
    let report = match &a.u {
        Some(u) => exceedance_bound(&law, n, level(Some(u), a.n, None)?)?,
        None => {
            let stage = match &a.stage {
                Some(s) => Stage::parse(&law, s)?,
                None => Stage::default_for(&law),
            };
            max_bound(&MaxScenario::new(law, n, stage)?)?
        }
    };
    Ok(emit(report).with("law", law))
}

fn archimedean(a: &BoundArgs, id: u8) -> Outcome<Emit> {
    let fam = ArchimedeanFamily::new(id, a.theta)?;
    let s = coordinate(a.s.as_deref(), a.n, "--s")?;
    let t = match &a.t {
        Some(t) => coordinate(Some(t), a.n, "--t")?,
        None => s,
    };
    if id == 2 {
        return Ok(emit(exact_family_bound(&fam, a.n, s, t)?));
    }
    let consts = tail_constants(&fam, a.r0)?;
    let report = total_bound(&fam, &consts, a.n, s, t)?;
    Ok(emit(report).with("constants", consts))
}

fn mogeo(a: &BoundArgs) -> Outcome<Emit> {
    let p11 = match a.p11.as_deref() {
        None | Some("1/n") => 1.0 / a.n,
        Some(p) => parse_number(p, "--p11")?,
    };
    let u = level(a.u.as_deref(), a.n, None)?;
    let sc = MOGeoScenario::new(a.gamma, a.delta, p11, a.n, u)?;
    let conditions = lemma_cond_check(a.gamma, a.delta, p11)?;
    let mut e = emit(bound_ledger(&sc)?).with("scenario", sc).with("conditions", conditions);
    if !conditions.all_hold() {
        e.body.insert("warning".into(), "spread conditions fail for these parameters".into());
        eprintln!("warning: spread conditions fail for gamma={}, delta={}, p11={p11}", a.gamma, a.delta);
    }
    Ok(e)
}

fn emit(report: BoundReport) -> Emit {
    let mut table = Table::new(&["kind", "stage", "label", "value", "anchor"]);
    for term in &report.terms {
        table.push(vec!["term".into(), term.stage.clone(), term.label.clone(), num(term.value), term.anchor.clone()]);
    }
    table.push(vec!["total".into(), String::new(), String::new(), num(report.total), report.name.clone()]);
    for (k, v) in &report.meta {
        table.push(vec!["meta".into(), String::new(), k.clone(), num(*v), String::new()]);
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Emit::new("bound", table).with("report", report)
}
