use clap::{Args, ValueEnum};
use poisson_extremes::maxima_evt::{exceedance_bound, kolmogorov_oracle, max_bound, MaxScenario, Stage};
use poisson_extremes::point_process::{empirical_law, immigration_death, replicate, PointConfiguration, PrmSampler};
use poisson_extremes::stein_bounds::{barbour_hall_bound, dtv_binomial_poisson, lecam_bound, poisson_pmf, IntensitySpec};
use serde::Serialize;

use crate::common::{config, level, require_seed, LawArgs, Outcome};
use crate::output::{num, Emit, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    BinomialPoisson,
    Maxima,
    Exceedances,
    ImmigrationDeath,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub target: Target,
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub stage: Option<String>,
    /// Sample sizes, comma separated
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Success probabilities for the binomial grid, comma separated
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Threshold: number or `loglog`; defaults to the level with limit mass log n
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Immigration rate
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 12.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 20_000)]
    pub reps: usize,
    /// Largest empirical distance accepted by the Monte Carlo check
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, env = "EXTREMES_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Check {
    case: String,
    oracle: f64,
    bound: f64,
    margin: f64,
    pass: bool,
}

impl Check {
    fn new(case: String, oracle: f64, bound: f64) -> Self {
        Check { case, oracle, bound, margin: bound - oracle, pass: oracle <= bound }
    }
}

pub fn run(a: &VerifyArgs) -> Outcome<Emit> {
    let checks = match a.target {
        Target::BinomialPoisson => binomial_poisson(a)?,
        Target::Maxima => maxima(a)?,
        Target::Exceedances => exceedances(a)?,
        Target::ImmigrationDeath => immigration(a)?,
    };
    let mut table = Table::new(&["case", "oracle", "bound", "margin", "pass"]);
    for c in &checks {
        table.push(vec![c.case.clone(), num(c.oracle), num(c.bound), num(c.margin), c.pass.to_string()]);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.case.as_str()).collect();
    let all = failed.is_empty();
    for c in &checks {
        eprintln!("{} {}: oracle {:.6e} bound {:.6e} margin {:.3e}", if c.pass { "pass" } else { "FAIL" }, c.case, c.oracle, c.bound, c.margin);
    }
    let mut e = Emit::new("verify", table)
        .with("target", format!("{:?}", a.target).to_lowercase())
        .with("checks", &checks)
        .with("pass", all);
    if !all {
        e.violation = Some(format!("bound violated for {}", failed.join(", ")));
    }
    Ok(e)
}

fn or_default<T: Clone>(given: &[T], fallback: &[T]) -> Vec<T> {
    if given.is_empty() { fallback.to_vec() } else { given.to_vec() }
}

fn binomial_poisson(a: &VerifyArgs) -> Outcome<Vec<Check>> {
    let mut out = Vec::new();
    for n in or_default(&a.n, &[5, 10, 50, 200]) {
        for p in or_default(&a.p, &[0.01, 0.05, 0.1, 0.3]) {
            let probs = vec![p; n as usize];
            let exact = dtv_binomial_poisson(n, p, 1e-15)?;
            let bh = barbour_hall_bound(&probs)?.bound;
            let lc = lecam_bound(&probs)?;
            out.push(Check::new(format!("n={n} p={p} barbour-hall"), exact, bh));
            out.push(Check::new(format!("n={n} p={p} le-cam"), bh, lc));
        }
    }
    Ok(out)
}

fn maxima(a: &VerifyArgs) -> Outcome<Vec<Check>> {
    let law = a.law.law_or("exponential")?;
    let mut out = Vec::new();
    for n in or_default(&a.n, &[25, 100, 1000]) {
        let stage = match &a.stage {
            Some(s) => Stage::parse(&law, s)?,
            None => Stage::default_for(&law),
        };
        let sc = MaxScenario::new(law, n, stage)?;
        let bound = max_bound(&sc)?.total;
        let oracle = kolmogorov_oracle(&sc)?;
        if oracle.stability > 1e-6 {
            return config(format!("oracle grid did not stabilize at n={n} (change {:.2e})", oracle.stability));
        }
        out.push(Check::new(format!("n={n} stage={stage:?}").to_lowercase(), oracle.sup, bound));
    }
    Ok(out)
}

fn exceedances(a: &VerifyArgs) -> Outcome<Vec<Check>> {
    let law = a.law.law_or("exponential")?;
    let mut out = Vec::new();
    for n in or_default(&a.n, &[25, 100, 1000]) {
        let u = level(a.u.as_deref(), n as f64, Some(&law))?;
        let r = exceedance_bound(&law, n, u)?;
        let Some(oracle) = r.oracle else {
            return config("no exact oracle for this law");
        };
        out.push(Check::new(format!("n={n} u*={u}"), oracle, r.total));
    }
    Ok(out)
}

/// Empirical law of the population size at the horizon, started empty,
/// against `Poisson(lambda (1 - e^-t))`.
fn immigration(a: &VerifyArgs) -> Outcome<Vec<Check>> {
    let seed = require_seed(a.seed)?;
    if !(a.lambda > 0.0 && a.horizon > 0.0 && a.reps > 0) {
        return config("need lambda > 0, horizon > 0 and reps > 0");
    }
    let lambda = a.lambda;
    let sampler = PrmSampler::new(&IntensitySpec::line(0.0, 1.0, move |_| lambda))?;
    let empty = PointConfiguration::empty(1);
    let horizon = a.horizon;
    let sizes = replicate(seed, a.reps, |r| immigration_death(&sampler, &empty, horizon, r).size_at(horizon));
    let law = empirical_law(&sizes);
    let mean = lambda * -(-horizon).exp_m1();
    let mut inside = 0.0;
    let mut covered = 0.0;
    for (k, &e) in law.iter().enumerate() {
        let p = poisson_pmf(mean, k as u64);
        inside += (e - p).abs();
        covered += p;
    }
    let dtv = 0.5 * (inside + (1.0 - covered).max(0.0));
    Ok(vec![Check::new(format!("lambda={lambda} t={horizon} reps={}", a.reps), dtv, a.tol)])
}
