use clap::{Args, ValueEnum};
use poisson_extremes::archimedean_tail::constant_table;
use poisson_extremes::copulas::{tail_dependence, tail_dependence_numeric, CopulaFamily};
use serde_json::json;

use crate::common::Outcome;
use crate::output::{num, opt, Emit, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Archimedean,
    TailDependence,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    pub kind: Kind,
    /// Archimedean: 1.5 or 3 have published rows; tail dependence: Gumbel and Clayton parameter
    #[arg(long)]
    pub theta: Option<f64>,
    /// Marshall-Olkin parameters for the tail-dependence table
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.6)]
    pub beta: f64,
}

pub fn run(a: &TableArgs) -> Outcome<Emit> {
    match a.kind {
        Kind::Archimedean => archimedean(a.theta.unwrap_or(1.5)),
        Kind::TailDependence => tails(a),
    }
}

fn archimedean(theta: f64) -> Outcome<Emit> {
    let rows = constant_table(theta)?;
    let mut table = Table::new(&["family", "theta", "h0", "r0", "H", "W", "K"]);
    let mut json_rows = Vec::new();
    for row in &rows {
        let c = &row.computed;
        table.push(vec![c.family.to_string(), num(c.theta), num(c.h0), num(c.r0), num(c.h_max), num(c.w2_max), num(c.k)]);
        match row.reference {
            Some(r) => eprintln!(
                "family ({}): r0 {:.3} vs {:.3}, H {:.3} vs {:.3}, W {:.3} vs {:.3}, K {:.2} vs {:.1} ({:+.2}%)",
                c.family,
                c.r0,
                r.r0,
                c.h_max,
                r.h_max,
                c.w2_max,
                r.w2_max,
                c.k,
                r.k,
                100.0 * (c.k / r.k - 1.0)
            ),
            None => eprintln!("family ({}): no published row at theta = {theta}", c.family),
        }
        json_rows.push(json!({ "computed": c, "reference": row.reference, "k_ratio": row.k_ratio() }));
    }
    Ok(Emit::new("table", table).with("kind", "archimedean").with("theta", theta).with("rows", json_rows))
}

fn tails(a: &TableArgs) -> Outcome<Emit> {
    let theta = a.theta.unwrap_or(2.0);
    let fams = [
        ("independence", CopulaFamily::Independence),
        ("comonotonic", CopulaFamily::Comonotonic),
        ("countermonotonic", CopulaFamily::Countermonotonic),
        ("gumbel", CopulaFamily::gumbel(theta)?),
        ("clayton", CopulaFamily::clayton(theta)?),
        ("marshall-olkin", CopulaFamily::marshall_olkin(a.alpha, a.beta)?),
    ];
    let mut table = Table::new(&["family", "lower", "upper", "lower_numeric", "upper_numeric"]);
    let mut json_rows = Vec::new();
    for (name, fam) in fams {
        let (lo, up) = tail_dependence(&fam);
        let (nlo, nup) = tail_dependence_numeric(&fam)?;
        table.push(vec![name.into(), opt(lo), opt(up), num(nlo), num(nup)]);
        json_rows.push(json!({ "family": fam, "lower": lo, "upper": up, "lower_numeric": nlo, "upper_numeric": nup }));
    }
    Ok(Emit::new("table", table).with("kind", "tail-dependence").with("rows", json_rows))
}
