use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use clarkflow::clark::{clark_measure, cowen_pommerenke, nevanlinna_atoms, ClarkMeasure};
use clarkflow::config::{OutputFormat, RunConfig};
use clarkflow::derivative::{derivative_convergence, sigma_t};
use clarkflow::disc::{Atom, CirclePoint, SignedBoundaryMeasure};
use clarkflow::maps::{contact_points, HoloMap};
use clarkflow::semigroup::{berkson_porta_check, decompose, flow, semigroup_law_check, Generator, SampleGrid};
use clarkflow::verify::{self, seeded_probes, Suite};
use clarkflow::Error;

#[derive(Parser)]
#[command(name = "clarkflow", version, about = "Clark measures and semigroups of self-maps of the unit disc")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// RunConfig as JSON
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Clark measure of a map at τ
    Measure {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau: f64,
    },
    /// Atoms of the Clark measure at the contact points
    Atoms {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau: f64,
    },
    /// Flow a point along a generator
    Flow {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
        z: Complex64,
    },
    /// Deviation from the semigroup law on seeded probes
    SemigroupCheck {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        t: f64,
        /// Second time; defaults to t
        #[arg(long)]
        s: Option<f64>,
    },
    /// σ_t at one time, or the convergence report along the configured schedule
    DerivativeMeasure {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Recover λ, β and p from a generator or a flow map
    Decompose {
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        generator: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
        /// Defaults to the generator's own τ
        #[arg(long, allow_negative_numbers = true)]
        tau: Option<f64>,
    },
    /// Nonnegative combination of generators sharing τ
    ComposeGenerator {
        #[arg(long, required = true)]
        generator: Vec<PathBuf>,
        /// Comma-separated weights, one per generator; default all 1
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
    },
    /// Cowen–Pommerenke inequality over boundary points
    CowenPommerenke {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau: f64,
        /// Comma-separated angles; defaults to all contact points
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        points: Vec<f64>,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

enum Output {
    Json(Value),
    Csv { header: Vec<&'static str>, rows: Vec<Vec<String>> },
}

struct Outcome {
    output: Output,
    code: u8,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Self { output, code: 0 }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::IntegratorEscape { .. } => 3,
        Error::NotBrfp(_) => 4,
        _ => 1,
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> clarkflow::Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn config(common: &Common) -> clarkflow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = common.grid {
        cfg.grid_size = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(f) = &common.format {
        cfg.format = f.parse()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn measure_rows(measure: &SignedBoundaryMeasure) -> Vec<Vec<String>> {
    let atoms = measure
        .atoms()
        .iter()
        .map(|a| vec!["atom".into(), String::new(), a.location.angle().to_string(), a.mass.to_string()]);
    let density =
        measure.density().iter().enumerate().map(|(k, d)| {
            vec!["density".into(), k.to_string(), measure.grid_point(k).angle().to_string(), d.to_string()]
        });
    atoms.chain(density).collect()
}

fn measure_csv(measure: &SignedBoundaryMeasure) -> Output {
    Output::Csv { header: vec!["kind", "index", "angle", "value"], rows: measure_rows(measure) }
}

fn atom_csv(atoms: &[Atom]) -> Output {
    Output::Csv {
        header: vec!["angle", "mass"],
        rows: atoms.iter().map(|a| vec![a.location.angle().to_string(), a.mass.to_string()]).collect(),
    }
}

fn clark_output(m: &ClarkMeasure, cfg: &RunConfig) -> Outcome {
    let output = match cfg.format {
        OutputFormat::Json => Output::Json(to_json(m)),
        OutputFormat::Csv => measure_csv(m.measure.as_signed()),
    };
    Outcome { output, code: if m.is_incomplete() { 2 } else { 0 } }
}

fn generator_of(map: HoloMap) -> clarkflow::Result<Generator> {
    match map {
        HoloMap::Flow(f) => Ok(f.generator().clone()),
        _ => Err(Error::Unsupported("decompose needs a generator or a flow map".into())),
    }
}

fn run(cli: Cli) -> clarkflow::Result<Outcome> {
    let cfg = config(&cli.common)?;
    let (n, radial) = (cfg.grid_size, cfg.radial());
    let json = cfg.format == OutputFormat::Json;
    match cli.command {
        Command::Measure { map, tau } => {
            let f: HoloMap = load_json(&map)?;
            let m = clark_measure(&f, CirclePoint::new(tau)?, n, &radial)?;
            Ok(clark_output(&m, &cfg))
        }
        Command::Atoms { map, tau } => {
            let f: HoloMap = load_json(&map)?;
            let atoms = nevanlinna_atoms(&f, CirclePoint::new(tau)?, &radial)?;
            Ok(Outcome::ok(if json { Output::Json(json!({ "atoms": atoms })) } else { atom_csv(&atoms) }))
        }
        Command::Flow { generator, t, z } => {
            let g: Generator = load_json(&generator)?;
            let r = flow(&g, t, z, &cfg.flow_options())?;
            Ok(Outcome::ok(if json {
                Output::Json(to_json(&r))
            } else {
                Output::Csv {
                    header: vec!["re", "im", "steps", "max_modulus_seen"],
                    rows: vec![vec![
                        r.value.re.to_string(),
                        r.value.im.to_string(),
                        r.steps.to_string(),
                        r.max_modulus_seen.to_string(),
                    ]],
                }
            }))
        }
        Command::SemigroupCheck { generator, t, s } => {
            let g: Generator = load_json(&generator)?;
            let s = s.unwrap_or(t);
            let probes = seeded_probes(cfg.seed, 16, 0.9);
            let dev = semigroup_law_check(&g, s, t, &probes, &cfg.flow_options())?;
            Ok(Outcome::ok(if json {
                Output::Json(json!({ "s": s, "t": t, "probes": probes, "max_deviation": dev }))
            } else {
                Output::Csv {
                    header: vec!["s", "t", "max_deviation"],
                    rows: vec![vec![s.to_string(), t.to_string(), dev.to_string()]],
                }
            }))
        }
        Command::DerivativeMeasure { generator, t } => {
            let g: Generator = load_json(&generator)?;
            if let Some(t) = t {
                let s = sigma_t(&g, t, n, &radial)?;
                return Ok(Outcome::ok(if json {
                    Output::Json(json!({
                        "t": s.t,
                        "atom": s.atom,
                        "reestimated_atom": s.reestimated_atom,
                        "sigma": s.sigma,
                    }))
                } else {
                    measure_csv(&s.sigma)
                }));
            }
            let rep = derivative_convergence(&g, &cfg.schedule(), &cfg.family()?, n, &radial)?;
            Ok(Outcome::ok(if json {
                Output::Json(to_json(&rep))
            } else {
                Output::Csv {
                    header: vec!["t", "weakstar_error", "atom", "ac_mass"],
                    rows: (0..rep.t_values.len())
                        .map(|i| {
                            vec![
                                rep.t_values[i].to_string(),
                                rep.weakstar_errors[i].to_string(),
                                rep.singular_atom_values[i].to_string(),
                                rep.ac_masses[i].to_string(),
                            ]
                        })
                        .collect(),
                }
            }))
        }
        Command::Decompose { generator, map, tau } => {
            let g = match (generator, map) {
                (Some(p), _) => load_json::<Generator>(&p)?,
                (None, Some(p)) => generator_of(load_json(&p)?)?,
                (None, None) => unreachable!("clap requires one of --generator, --map"),
            };
            let tau = tau.map(CirclePoint::new).transpose()?.unwrap_or(g.tau());
            let d = decompose(&g, tau, &SampleGrid::default(), &radial)?;
            Ok(Outcome::ok(if json {
                Output::Json(json!({
                    "lambda": d.lambda,
                    "beta": d.beta_estimate,
                    "min_re_p": d.min_re_p,
                    "samples": d.samples.iter().map(|(z, p)| json!({ "z": z, "p": p })).collect::<Vec<_>>(),
                }))
            } else {
                Output::Csv {
                    header: vec!["z_re", "z_im", "p_re", "p_im"],
                    rows: d
                        .samples
                        .iter()
                        .map(|(z, p)| vec![z.re.to_string(), z.im.to_string(), p.re.to_string(), p.im.to_string()])
                        .collect(),
                }
            }))
        }
        Command::ComposeGenerator { generator, weights } => {
            if !weights.is_empty() && weights.len() != generator.len() {
                return Err(Error::Parameter(format!("{} weights for {} generators", weights.len(), generator.len())));
            }
            let mut acc: Option<Generator> = None;
            for (i, path) in generator.iter().enumerate() {
                let g: Generator = load_json(path)?;
                let w = weights.get(i).copied().unwrap_or(1.0);
                acc = Some(match acc {
                    None => Generator::cone_combination(w, &g, 0.0, &g)?,
                    Some(a) => Generator::cone_combination(1.0, &a, w, &g)?,
                });
            }
            let g = acc.expect("clap requires at least one generator");
            let bp = berkson_porta_check(&g, g.tau(), &SampleGrid::dense());
            Ok(Outcome::ok(if json {
                Output::Json(json!({ "generator": g, "berkson_porta_min": bp }))
            } else {
                measure_csv(g.nu().as_signed())
            }))
        }
        Command::CowenPommerenke { map, tau, points } => {
            let f: HoloMap = load_json(&map)?;
            let tau = CirclePoint::new(tau)?;
            let points: Vec<CirclePoint> = if points.is_empty() {
                contact_points(&f, tau, &radial)?.into_iter().map(|r| r.point).collect()
            } else {
                points.into_iter().map(CirclePoint::new).collect::<clarkflow::Result<_>>()?
            };
            let rep = cowen_pommerenke(&f, tau, &points, &radial)?;
            Ok(Outcome::ok(if json {
                Output::Json(to_json(&rep))
            } else {
                Output::Csv {
                    header: vec!["angle", "mass", "lhs", "rhs", "equality"],
                    rows: rep
                        .accepted
                        .iter()
                        .map(|a| {
                            vec![
                                a.location.angle().to_string(),
                                a.mass.to_string(),
                                rep.lhs.to_string(),
                                rep.rhs.to_string(),
                                rep.equality.to_string(),
                            ]
                        })
                        .collect(),
                }
            }))
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let rep = verify::run(suite, &cfg)?;
            let code = if rep.pass { 0 } else { 1 };
            let output = if json {
                Output::Json(to_json(&rep))
            } else {
                Output::Csv {
                    header: vec!["check", "computed", "expected", "tolerance", "relation", "pass"],
                    rows: rep
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.check.clone(),
                                r.computed.to_string(),
                                r.expected.to_string(),
                                r.tolerance.to_string(),
                                to_json(&r.relation).as_str().unwrap_or_default().to_string(),
                                r.pass.to_string(),
                            ]
                        })
                        .collect(),
                }
            };
            Ok(Outcome { output, code })
        }
    }
}

fn emit(output: Output) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match output {
        Output::Json(v) => {
            serde_json::to_writer_pretty(&mut out, &v)?;
            writeln!(out)?;
        }
        Output::Csv { header, rows } => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            if let Err(e) = emit(outcome.output).or_else(|e| match e.kind() {
                io::ErrorKind::BrokenPipe => Ok(()),
                _ => Err(e),
            }) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::IntegratorEscape { t: 1.0, modulus: 1.1 }), 3);
        assert_eq!(exit_code(&Error::NotBrfp("x".into())), 4);
        assert_eq!(exit_code(&Error::Schema("x".into())), 1);
    }

    #[test]
    fn complex_flag() {
        assert_eq!(parse_complex("0.5,-0.25").unwrap(), Complex64::new(0.5, -0.25));
        assert!(parse_complex("0.5").is_err());
        assert!(parse_complex("a,b").is_err());
    }
}
