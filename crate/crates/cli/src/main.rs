mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use commands::{Failure, Outcome};
use config::{validate, Command, ConfigError, DistArg, Format, GridSpec, OutputSpec, RunConfig, Spacing, WeightArg};
use report::{Report, Status, SCHEMA};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(name = "wmit", version, about = "Weighted mean inactivity time measures, orders and checks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Compute one named quantity.
    Measure {
        #[arg(long = "dist", required = true)]
        dists: Vec<String>,
        #[arg(long)]
        quantity: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check a stochastic order between X and Y.
    OrderCheck {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Also run the implication suite.
        #[arg(long)]
        implications: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Classify whether the WMIT curve is increasing.
    Iwmit {
        #[arg(long)]
        dist: String,
        #[command(flatten)]
        common: Common,
    },
    /// Rebuild the CDF from the WMIT curve.
    Reconstruct {
        #[arg(long)]
        dist: String,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo checks for the records, shock and renewal models.
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        dist: String,
        /// Shock count law: geometric:q=.., point:m=.. or pmf:p0,p1,...
        #[arg(long)]
        counts: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance criteria.
    Acceptance {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run from a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    /// Time point; repeat for several.
    #[arg(long = "t", allow_negative_numbers = true)]
    t: Vec<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, requires_all = ["grid_hi", "grid_points"])]
    grid_lo: Option<f64>,
    #[arg(long, requires = "grid_lo")]
    grid_hi: Option<f64>,
    #[arg(long, requires = "grid_lo")]
    grid_points: Option<usize>,
    #[arg(long, requires = "grid_lo", value_parser = ["log", "linear"])]
    grid_spacing: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

impl OutputArgs {
    fn apply(self, c: &mut RunConfig) {
        if let Some(p) = self.output {
            c.output.path = Some(p);
        }
        if let Some(f) = self.format {
            c.output.format = f;
        }
    }
}

impl Common {
    fn apply(self, c: &mut RunConfig) {
        c.weight = self.weight.map(WeightArg::Short);
        c.n = self.n;
        c.t = self.t;
        c.p = self.p;
        if let Some(tol) = self.tol {
            c.tol = tol;
        }
        c.seed = self.seed;
        if let (Some(lo), Some(hi), Some(points)) = (self.grid_lo, self.grid_hi, self.grid_points) {
            let spacing = match self.grid_spacing.as_deref() {
                Some("linear") => Spacing::Linear,
                _ => Spacing::Log,
            };
            c.grid = Some(GridSpec { lo, hi, points, spacing });
        }
        self.out.apply(c);
    }
}

fn build_config(sub: Sub) -> Result<RunConfig, ConfigError> {
    let short = |v: Vec<String>| v.into_iter().map(DistArg::Short).collect::<Vec<_>>();
    let config = match sub {
        Sub::Measure { dists, quantity, common } => {
            let mut c = RunConfig::new(Command::Measure);
            c.dists = short(dists);
            c.quantity = Some(quantity);
            common.apply(&mut c);
            c
        }
        Sub::OrderCheck { kind, x, y, implications, common } => {
            let mut c = RunConfig::new(Command::OrderCheck);
            c.dists = short(vec![x, y]);
            c.order = Some(kind);
            c.implications = implications;
            common.apply(&mut c);
            c
        }
        Sub::Iwmit { dist, common } => single(Command::Iwmit, dist, common),
        Sub::Reconstruct { dist, common } => single(Command::Reconstruct, dist, common),
        Sub::Simulate { model, dist, counts, samples, common } => {
            let mut c = RunConfig::new(Command::Simulate);
            c.dists = short(vec![dist]);
            c.model = Some(model);
            c.counts = counts;
            if let Some(s) = samples {
                c.samples = s;
            }
            common.apply(&mut c);
            c
        }
        Sub::Acceptance { out } => {
            let mut c = RunConfig::new(Command::Acceptance);
            out.apply(&mut c);
            c
        }
        Sub::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", config.display())))?;
            let mut c: RunConfig = serde_json::from_str(&text).map_err(|e| ConfigError::new(&json_field(&e), e.to_string()))?;
            out.apply(&mut c);
            c
        }
    };
    Ok(config)
}

fn single(command: Command, dist: String, common: Common) -> RunConfig {
    let mut c = RunConfig::new(command);
    c.dists = vec![DistArg::Short(dist)];
    common.apply(&mut c);
    c
}

/// Best guess at the offending key of a serde error.
fn json_field(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(rest) = msg.split(marker).nth(1) {
            if let Some(name) = rest.split('`').next() {
                return name.to_string();
            }
        }
    }
    "config".into()
}

fn report_for(config: &RunConfig, seed: u64, inputs: Vec<String>, weight: Option<String>, out: Outcome, error: Option<String>) -> Report {
    let mut details = out.details;
    if !out.checks.is_empty() {
        let checks = Value::Array(out.checks);
        details = match details {
            Value::Null => json!({ "route_checks": checks }),
            Value::Object(mut m) => {
                m.insert("route_checks".into(), checks);
                Value::Object(m)
            }
            other => json!({ "result": other, "route_checks": checks }),
        };
    }
    let mut public = config.clone();
    public.output = OutputSpec {
        path: None,
        format: config.output.format,
    };
    Report {
        schema: SCHEMA,
        command: config.command.to_string(),
        status: if error.is_some() { Status::NumericalFailure } else { out.status },
        seed,
        tolerance: config.tol,
        grid: out.grid,
        inputs,
        weight,
        config: public,
        results: out.results,
        details,
        error,
    }
}

fn execute(config: RunConfig) -> ExitCode {
    let v = match validate(config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("wmit: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let mut out = commands::new_outcome(&v);
    let result = commands::run(&v, &mut out);
    let weight = v.weight.as_ref().map(|w| w.label());
    let (report, code) = match result {
        Ok(()) => {
            let code = if out.status == Status::Violation { EXIT_VIOLATION } else { 0 };
            (report_for(&v.config, v.seed, v.dist_labels.clone(), weight, out, None), code)
        }
        Err(Failure::Config(e)) => {
            eprintln!("wmit: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("wmit: numerical failure: {e}");
            let r = report_for(&v.config, v.seed, v.dist_labels.clone(), weight, out, Some(e.to_string()));
            (r, EXIT_NUMERICAL)
        }
    };
    let text = match report.render(v.config.output.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("wmit: cannot render report: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    if let Err(e) = report::emit(&text, v.config.output.path.as_deref()) {
        eprintln!("wmit: invalid field 'output': {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build_config(cli.command) {
        Ok(c) => execute(c),
        Err(e) => {
            eprintln!("wmit: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
