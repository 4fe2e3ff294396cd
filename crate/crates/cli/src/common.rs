//! Arguments shared between subcommands and the error-to-exit-code mapping.

use std::fmt;

use clap::Args;
use poisson_extremes::distributions::MarginalLaw;
use poisson_extremes::Error;

pub enum Failure {
    Config(String),
    Gate(String),
    Io(std::io::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 3,
            Failure::Gate(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Gate(m) => write!(f, "validity gate: {m}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Gate(m) => Failure::Gate(m),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

pub type Outcome<T> = Result<T, Failure>;

pub fn config<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Config(msg.into()))
}

/// Marginal law and its parameters.
#[derive(Debug, Clone, Args)]
pub struct LawArgs {
    /// exponential, pareto, uniform, normal, cauchy or geometric
    #[arg(long)]
    pub law: Option<String>,
    /// Exponential rate
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Pareto shape
    #[arg(long, default_value_t = 1.0)]
    pub shape: f64,
    /// Pareto scale
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Uniform lower end
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lo: f64,
    /// Uniform upper end
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    /// Geometric failure probability
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
}

impl LawArgs {
    pub fn law_or(&self, fallback: &str) -> Outcome<MarginalLaw> {
        let name = self.law.as_deref().unwrap_or(fallback);
        let law = match name {
            "exponential" | "exp" => MarginalLaw::exponential(self.rate)?,
            "pareto" => MarginalLaw::pareto(self.shape, self.scale)?,
            "uniform" => MarginalLaw::uniform(self.lo, self.hi)?,
            "normal" => MarginalLaw::StdNormal,
            "cauchy" => MarginalLaw::StdCauchy,
            "geometric" => MarginalLaw::geometric(self.q)?,
            other => return config(format!("unknown law '{other}'")),
        };
        Ok(law)
    }
}

pub fn parse_number(text: &str, what: &str) -> Outcome<f64> {
    text.trim().parse::<f64>().map_err(|_| Failure::Config(format!("{what}: cannot parse '{text}'")))
}

/// Threshold: a number or `loglog` for `-log log n`. Without one, the level
/// at which the limit intensity has mass `log n` (mass 1 for the normal law).
pub fn level(text: Option<&str>, n: f64, law: Option<&MarginalLaw>) -> Outcome<f64> {
    let ln = n.ln();
    match (text, law) {
        (Some("loglog"), _) | (None, None) => Ok(-ln.ln()),
        (Some(t), _) => parse_number(t, "--u"),
        (None, Some(law)) => Ok(match *law {
            MarginalLaw::Pareto { shape, .. } => ln.powf(-1.0 / shape),
            MarginalLaw::StdCauchy => 1.0 / ln,
            MarginalLaw::Uniform { .. } => -ln,
            MarginalLaw::StdNormal => 0.0,
            _ => -ln.ln(),
        }),
    }
}

/// Tail coordinate: a number or `sqrtlog` for `sqrt(log n)/2`.
pub fn coordinate(text: Option<&str>, n: f64, what: &str) -> Outcome<f64> {
    match text {
        None | Some("sqrtlog") => Ok(n.ln().sqrt() / 2.0),
        Some(t) => parse_number(t, what),
    }
}

pub fn whole(n: f64) -> Outcome<u64> {
    if n >= 1.0 && n.fract() == 0.0 && n < 9.0e15 {
        Ok(n as u64)
    } else {
        config(format!("--n must be a positive integer here, got {n}"))
    }
}

pub fn require_seed(seed: Option<u64>) -> Outcome<u64> {
    seed.ok_or_else(|| Failure::Config("stochastic command needs --seed (or EXTREMES_SEED)".into()))
}
