mod output;
mod parse;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use koblab::bergman::{
    berezin_transform, default_centers, kobayashi_ball_volume, theta_carleson_test,
};
use koblab::dynamics::{herve_classify, iterate, split_bidisk, wolff_point};
use koblab::geometry::kobayashi_distance;
use koblab::horospheres::invariance_check;
use koblab::lempert::{estimate_lempert_with, LempertOptions};
use koblab::maps::SelfMap;
use koblab::quadrature::QuadratureSpec;
use koblab::angles::limit_invariants;
use koblab::{CVec, DomainSpec};
use serde_json::{json, Value};

use output::{CliError, Report};

#[derive(Parser)]
#[command(name = "koblab", version, about = "Kobayashi-distance numerics on model domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Kobayashi distance; convex domains get Lempert bounds.
    Dist(PairArgs),
    /// Lempert-function bounds on a convex domain.
    Lempert(PairArgs),
    /// Orbit of a point under a self-map.
    Iterate {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        from: String,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Wolff point of a fixed-point-free self-map.
    Wolff {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        map: String,
    },
    /// Hervé classification of a self-map of the bidisk.
    Herve {
        #[arg(long)]
        map: String,
    },
    /// Horosphere membership, and invariance under a map when given.
    Horosphere {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        horosphere: String,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        map: Option<String>,
        /// Override the horosphere radius.
        #[arg(long = "R")]
        big_r: Option<String>,
        /// Samples for the invariance check.
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },
    /// theta-Carleson test along radial centers.
    Carleson {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        theta: String,
        #[arg(long, default_value = "0.5")]
        r: String,
    },
    /// Berezin transform of a measure at a point.
    Berezin {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        from: String,
        /// Quadrature nodes (tensor scheme); the domain default otherwise.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Lebesgue volume of a Kobayashi ball.
    Volume {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        r: String,
    },
    /// Limit-set invariants (m, q, r) of a linear map with eigenvalue angles.
    Limits {
        /// Angle tuple: JSON, or rationals such as `1/2,1/3`.
        #[arg(long)]
        theta: String,
        /// Eigenvalue moduli, comma separated; all 1 by default.
        #[arg(long)]
        moduli: Option<String>,
        #[arg(long, default_value_t = 1)]
        period: u64,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Optimizer iterations per stage.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Bisection tolerance on the disc parameter.
    #[arg(long)]
    tol: Option<String>,
}

fn self_map(spec: &str, d: &DomainSpec) -> Result<SelfMap, CliError> {
    Ok(SelfMap::new(parse::map(spec)?, d.clone())?)
}

fn lempert_report(a: &PairArgs, d: &DomainSpec, z: &CVec, w: &CVec) -> Result<Value, CliError> {
    let DomainSpec::Convex(c) = d else {
        return Err(CliError::parse("lempert needs a convex domain given by constraints"));
    };
    let mut opts = LempertOptions::new(a.degree, a.steps);
    opts.seed = 0;
    if let Some(t) = &a.tol {
        opts.tolerance = parse::number(t)?;
    }
    let e = estimate_lempert_with(c, z, w, opts)?;
    Ok(json!({
        "lower": e.lower.value(),
        "upper": e.upper.value(),
        "gap": e.gap(),
        "ladder": e.ladder,
        "fallback": e.fallback,
        "iterations": e.iterations,
        "witness": e.witness,
    }))
}

fn pair(a: &PairArgs) -> Result<(DomainSpec, CVec, CVec), CliError> {
    let d = parse::domain(&a.domain)?;
    let z = parse::point(&a.from, d.dim())?;
    let w = parse::point(&a.to, d.dim())?;
    Ok((d, z, w))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let seed = cli.output.seed;
    match &cli.command {
        Command::Dist(a) => {
            let (d, z, w) = pair(a)?;
            let body = match d {
                DomainSpec::Convex(_) => lempert_report(a, &d, &z, &w)?,
                _ => json!({ "k": kobayashi_distance(&d, &z, &w)?.value() }),
            };
            Ok(Report::new("dist", body).with("domain", &d).with("from", &z).with("to", &w))
        }
        Command::Lempert(a) => {
            let (d, z, w) = pair(a)?;
            let body = lempert_report(a, &d, &z, &w)?;
            Ok(Report::new("lempert", body).with("from", &z).with("to", &w))
        }
        Command::Iterate {
            domain,
            map,
            from,
            steps,
        } => {
            let d = parse::domain(domain)?;
            let m = self_map(map, &d)?;
            let z0 = parse::point(from, d.dim())?;
            let orbit = iterate(&m, &z0, *steps)?;
            let rows = orbit
                .points
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let mut row = serde_json::Map::new();
                    row.insert("k".into(), json!(k));
                    for (j, c) in p.iter().enumerate() {
                        row.insert(format!("z{}_re", j + 1), json!(c.re));
                        row.insert(format!("z{}_im", j + 1), json!(c.im));
                    }
                    let step = orbit.kob_steps.as_ref().and_then(|s| s.get(k).copied());
                    let from_start = orbit.kob_from_start.as_ref().map(|s| s[k]);
                    row.insert("kob_step".into(), json!(step));
                    row.insert("kob_from_start".into(), json!(from_start));
                    row.insert("boundary_gap".into(), json!(orbit.boundary_gaps[k]));
                    Value::Object(row)
                })
                .collect();
            Ok(Report::new("iterate", serde_json::to_value(&orbit)?).with_table(rows))
        }
        Command::Wolff { domain, map } => {
            let d = parse::domain(domain)?;
            let m = self_map(map, &d)?;
            let w = wolff_point(&m)?;
            let point = if w.point.dim() == 1 {
                json!([w.point[0].re, w.point[0].im])
            } else {
                serde_json::to_value(&w.point)?
            };
            Ok(Report::new(
                "wolff",
                json!({ "wolff": point, "residual": w.residual, "path_len": w.path.len() }),
            ))
        }
        Command::Herve { map } => {
            let f = parse::map(map)?;
            let (fa, ga) = split_bidisk(&f)?;
            let r = herve_classify(&fa, &ga)?;
            Ok(Report::new("herve", serde_json::to_value(&r)?))
        }
        Command::Horosphere {
            domain,
            horosphere,
            from,
            map,
            big_r,
            steps,
        } => {
            let d = parse::domain(domain)?;
            let mut h = parse::horosphere(horosphere)?;
            if let Some(r) = big_r {
                h.radius = parse::number(r)?;
            }
            let mut body = json!({ "horosphere": h });
            if let Some(z) = from {
                let z = parse::point(z, d.dim())?;
                body["membership"] = serde_json::to_value(h.test(&d, &z)?)?;
            }
            if let Some(m) = map {
                let m = self_map(m, &d)?;
                body["invariance"] = serde_json::to_value(invariance_check(&m, &h, *steps, seed)?)?;
            }
            Ok(Report::new("horosphere", body))
        }
        Command::Carleson {
            domain,
            measure,
            theta,
            r,
        } => {
            let d = parse::domain(domain)?;
            let mu = parse::measure(measure, &d)?;
            let centers = default_centers(&d)?;
            let q = QuadratureSpec::default_for(&d);
            let rep = theta_carleson_test(
                &d,
                &mu,
                parse::number(theta)?,
                parse::number(r)?,
                &centers,
                &q,
            )?;
            let rows = rep
                .csv_rows()
                .iter()
                .map(serde_json::to_value)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Report::new("carleson", serde_json::to_value(&rep)?).with_table(rows))
        }
        Command::Berezin {
            domain,
            measure,
            from,
            nodes,
        } => {
            let d = parse::domain(domain)?;
            let mu = parse::measure(measure, &d)?;
            let z = parse::point(from, d.dim())?;
            let q = match nodes {
                Some(n) => QuadratureSpec::tensor(*n),
                None => QuadratureSpec::default_for(&d),
            };
            let b = berezin_transform(&d, &mu, &z, &q)?;
            Ok(Report::new("berezin", serde_json::to_value(b)?).with("z", &z))
        }
        Command::Volume { domain, from, r } => {
            let d = parse::domain(domain)?;
            let z0 = parse::point(from, d.dim())?;
            let q = QuadratureSpec::default_for(&d);
            let v = kobayashi_ball_volume(&d, &z0, parse::number(r)?, &q)?;
            Ok(Report::new("volume", serde_json::to_value(&v)?).with("z0", &z0))
        }
        Command::Limits {
            theta,
            moduli,
            period,
        } => {
            let t = parse::angles(theta)?;
            let moduli = match moduli {
                Some(m) => parse::reals(m)?,
                None => vec![1.0; t.angles().len()],
            };
            let inv = limit_invariants(&moduli, &t, *period)?;
            Ok(Report::new("limits", serde_json::to_value(inv)?).with("theta", &t))
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("KOBLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::parse(format!("KOBLAB_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::parse(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(&cli));
    output::emit(&cli.command_name(), result, cli.output.format, cli.output.out.as_deref())
}

impl Cli {
    fn command_name(&self) -> String {
        match &self.command {
            Command::Dist(_) => "dist",
            Command::Lempert(_) => "lempert",
            Command::Iterate { .. } => "iterate",
            Command::Wolff { .. } => "wolff",
            Command::Herve { .. } => "herve",
            Command::Horosphere { .. } => "horosphere",
            Command::Carleson { .. } => "carleson",
            Command::Berezin { .. } => "berezin",
            Command::Volume { .. } => "volume",
            Command::Limits { .. } => "limits",
        }
        .to_string()
    }
}
