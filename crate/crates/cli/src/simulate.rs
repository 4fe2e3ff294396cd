use clap::{Args, ValueEnum};
use poisson_extremes::copulas::{parse_family, sample_copula};
use poisson_extremes::maxima_evt::{MaxScenario, Stage};
use poisson_extremes::point_process::{immigration_death_simulate, simulate_mppe, EventKind, ExceedanceRegion, MarkLaw, MppeSpec, PointConfiguration};
use poisson_extremes::stein_bounds::IntensitySpec;

use crate::common::{config, level, require_seed, whole, LawArgs, Outcome};
use crate::output::{num, Emit, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Mppe,
    Copula,
    ImmigrationDeath,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub kind: Kind,
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long, default_value_t = 1000.0)]
    pub n: f64,
    /// Threshold: number or `loglog`; defaults to the level with limit mass log n
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Copula family: independence, comonotonic, countermonotonic, gumbel, clayton, mo
    #[arg(long, default_value = "mo")]
    pub family: String,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.6)]
    pub beta: f64,
    /// Number of copula pairs
    #[arg(long, default_value_t = 3000)]
    pub count: usize,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, env = "EXTREMES_SEED")]
    pub seed: Option<u64>,
}

pub fn run(a: &SimulateArgs) -> Outcome<Emit> {
    let seed = require_seed(a.seed)?;
    let e = match a.kind {
        Kind::Mppe => mppe(a, seed)?,
        Kind::Copula => copula(a, seed)?,
        Kind::ImmigrationDeath => immigration(a, seed)?,
    };
    Ok(e.with("seed", seed))
}

fn mppe(a: &SimulateArgs, seed: u64) -> Outcome<Emit> {
    let law = a.law.law_or("exponential")?;
    let n = whole(a.n)?;
    let Some(norming) = MaxScenario::new(law, n, Stage::Limit).ok().and_then(|sc| sc.norming()) else {
        return config("law has no continuous normalization; pick exponential, pareto, uniform, normal or cauchy");
    };
    let u = level(a.u.as_deref(), a.n, Some(&law))?;
    let spec = MppeSpec::new(MarkLaw::Marginal(law), ExceedanceRegion::Ray { u }, n as usize, [norming, (1.0, 0.0)])?;
    let pts = simulate_mppe(&spec, seed);
    let mut table = Table::new(&["x"]);
    for p in &pts.points {
        table.push(vec![num(p[0])]);
    }
    eprintln!("{} exceedances of u* = {u} among n = {n}", pts.len());
    let xs: Vec<f64> = pts.points.iter().map(|p| p[0]).collect();
    Ok(Emit::new("simulate", table)
        .with("kind", "mppe")
        .with("spec", spec)
        .with("count", pts.len())
        .with("points", xs))
}

fn copula(a: &SimulateArgs, seed: u64) -> Outcome<Emit> {
    let fam = parse_family(&a.family, a.theta, Some(a.alpha), Some(a.beta))?;
    let pairs = sample_copula(&fam, seed, a.count)?;
    let mut table = Table::new(&["u", "v"]);
    for (u, v) in &pairs {
        table.push(vec![num(*u), num(*v)]);
    }
    Ok(Emit::new("simulate", table).with("kind", "copula").with("family", fam).with("points", pairs))
}

fn immigration(a: &SimulateArgs, seed: u64) -> Outcome<Emit> {
    if !(a.lambda >= 0.0 && a.horizon > 0.0) {
        return config("need lambda >= 0 and horizon > 0");
    }
    let lambda = a.lambda;
    let intensity = IntensitySpec::line(0.0, 1.0, move |_| lambda);
    let tr = immigration_death_simulate(&intensity, &PointConfiguration::empty(1), a.horizon, seed)?;
    let mut table = Table::new(&["time", "kind", "x", "size"]);
    let mut size = 0i64;
    for ev in &tr.events {
        let kind = match ev.kind {
            EventKind::Immigration => {
                size += 1;
                "immigration"
            }
            EventKind::Death => {
                size -= 1;
                "death"
            }
        };
        table.push(vec![num(ev.time), kind.into(), num(ev.point[0]), size.to_string()]);
    }
    Ok(Emit::new("simulate", table).with("kind", "immigration-death").with("lambda", lambda).with("trajectory", tr))
}
