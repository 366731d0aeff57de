use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conelab::cone_geometry::make_grid;
use conelab::harness::{self, parse_ladder, CheckRecord, DiffTolerance, SuiteConfig, SuiteReport, SCHEMA_VERSION};
use conelab::numerics::minkowski::FourVector;
use conelab::profiles::{profile_from_current, GaussianCurrent, RadialProfile};
use conelab::radial_gauge::{gauge_profile, SmearingRho};
use conelab::Error;

#[derive(Parser)]
#[command(name = "conelab", version, about = "Check suites for infrared-extended free fields on the light cone")]
struct Cli {
    /// TOML run configuration; defaults apply when absent
    #[arg(long, global = true, env = "CONELAB_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run acceptance suites and write a JSON report
    Run {
        /// "all" or a comma list of suite names
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// write per-check wall-clock seconds to this JSON file
        #[arg(long)]
        timings: Option<PathBuf>,
        /// list suite names and exit
        #[arg(long)]
        list: bool,
    },
    /// Operations on reports
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
    /// CSV dump of V̇̃(ω, l) for a built-in profile
    DumpProfile {
        #[arg(long, value_enum, default_value = "gaussian")]
        profile_family: Family,
        /// comma list of ω values
        #[arg(long, default_value = "-2,-1,-0.5,0.5,1,2", allow_hyphen_values = true)]
        omega: String,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// also dump V̇̃(0, l) on the grid as θ, φ_az, weight, components
        #[arg(long)]
        grid_out: Option<PathBuf>,
    },
    /// Commutator of two almost-radial-gauge profiles against its double integral
    GaugeCheck {
        /// "ref0".."ref2" or "t,x,y,z:sigma:d0,d1,d2,d3"
        #[arg(long, default_value = "ref0", allow_hyphen_values = true)]
        k1: String,
        #[arg(long, default_value = "ref1", allow_hyphen_values = true)]
        k2: String,
        /// refinement levels
        #[arg(long, default_value = "0,1,2")]
        refine: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated Fock space checks
    Fock {
        #[arg(long, value_enum)]
        check: FockCheck,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Asymptotic ladders
    Asym {
        #[arg(long, value_enum)]
        suite: AsymSuite,
        /// ladder as a comma list or start*factor^count
        #[arg(long)]
        ladder: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Λ ladder of the Dirac smearing kernels
    DiracKernel {
        /// configuration index or "all"
        #[arg(long, default_value = "all")]
        chi: String,
        #[arg(long, default_value = "5,10,20,40")]
        lambda_ladder: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Fields that moved between two reports; exit 1 if any
    Diff {
        baseline: PathBuf,
        current: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        rel: f64,
        #[arg(long, default_value_t = 1e-12)]
        abs: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gaussian,
    Curl,
    Gauge,
}

#[derive(Clone, Copy, ValueEnum)]
enum FockCheck {
    Commutator,
    Vacuum,
    Energy,
}

#[derive(Clone, Copy, ValueEnum)]
enum AsymSuite {
    Kg,
    Phi,
    Coulomb,
    Scaled,
    Null,
}

enum Failure {
    Checks,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<SuiteConfig, Failure> {
    match path {
        Some(p) => Ok(SuiteConfig::load(p)?),
        None => Ok(SuiteConfig::default()),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn single(cfg: &SuiteConfig, suite: &str, record: CheckRecord) -> SuiteReport {
    let record = record.finish(&cfg.tolerances);
    SuiteReport { schema_version: SCHEMA_VERSION, seed: cfg.seed, suites: vec![suite.into()], passed: record.passed, checks: vec![record] }
}

/// Numerical errors become a failed record; usage and config errors stay errors.
fn settle(name: &str, tag: &str, r: conelab::Result<CheckRecord>) -> Result<CheckRecord, Failure> {
    match r {
        Ok(r) => Ok(r),
        Err(e @ (Error::Usage(_) | Error::Config(_))) => Err(e.into()),
        Err(e) => Ok(CheckRecord::failed(name, tag, &e)),
    }
}

fn emit(report: &SuiteReport, out: Option<&Path>) -> Result<(), Failure> {
    write_out(out, &report.to_json())?;
    if report.passed {
        Ok(())
    } else {
        for c in report.checks.iter().filter(|c| !c.passed) {
            let why = c.diagnostic.clone().unwrap_or_else(|| {
                let mut bad: Vec<String> = c.limits.iter().filter(|l| !l.passed).map(|l| format!("{}={:e}", l.key, l.value)).collect();
                bad.extend(c.flags.iter().filter(|(_, f)| !**f).map(|(k, _)| k.clone()));
                bad.join(", ")
            });
            eprintln!("FAIL {}: {why}", c.name);
        }
        Err(Failure::Checks)
    }
}

fn parse_floats(spec: &str) -> Result<Vec<f64>, Failure> {
    spec.split(',')
        .map(|s| match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Failure::Usage(format!("not a finite number: '{}'", s.trim()))),
        })
        .collect()
}

fn parse_current(spec: &str) -> Result<GaussianCurrent, Failure> {
    let refs = harness::reference_currents();
    if let Some(i) = spec.strip_prefix("ref") {
        let i: usize = i.parse().map_err(|_| Failure::Usage(format!("bad reference current '{spec}'")))?;
        return refs.get(i).cloned().ok_or_else(|| Failure::Usage(format!("reference currents are ref0..ref{}", refs.len() - 1)));
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::Usage(format!("current must be 't,x,y,z:sigma:d0,d1,d2,d3', got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let c = parse_floats(parts[0])?;
    let s = parse_floats(parts[1])?;
    let d = parse_floats(parts[2])?;
    if c.len() != 4 || s.len() != 1 || d.len() != 4 || s[0] <= 0.0 {
        return Err(bad());
    }
    Ok(GaussianCurrent::new(FourVector::new(c[0], c[1], c[2], c[3]), s[0], [d[0], d[1], d[2], d[3]]))
}

fn profile(family: Family) -> RadialProfile {
    let [k, _, _] = harness::reference_currents();
    match family {
        Family::Gaussian => profile_from_current(k, "gaussian"),
        Family::Curl => profile_from_current(harness::wide_curl_pair().0, "curl"),
        Family::Gauge => gauge_profile(k, SmearingRho::default(), "gauge"),
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Run { suite, seed, out, timings, list } => {
            if list {
                for (s, c) in harness::SUITES {
                    println!("{s}\t{c}");
                }
                return Ok(());
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out = out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
            let (report, times) = harness::run_suite(&cfg, &suite)?;
            if let Some(t) = timings {
                let text = serde_json::to_string_pretty(&times).expect("timings serialize");
                write_out(Some(&t), &(text + "\n"))?;
            }
            emit(&report, out.as_deref())
        }
        Command::Report { command: ReportCommand::Diff { baseline, current, rel, abs } } => {
            let read = |p: &Path| -> Result<SuiteReport, Failure> {
                let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                Ok(SuiteReport::from_json(&text)?)
            };
            let tol = DiffTolerance { rel, abs, ..DiffTolerance::default() };
            let diffs = harness::diff_reports(&read(&baseline)?, &read(&current)?, &tol);
            println!("{}", serde_json::to_string_pretty(&diffs).expect("diff serializes"));
            if diffs.is_empty() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::DumpProfile { profile_family, omega, grid, out, grid_out } => {
            let omegas = parse_floats(&omega)?;
            let grid = make_grid(grid)?;
            let v = profile(profile_family);
            if let Some(p) = grid_out {
                let rows: Vec<_> = grid.nodes().iter().map(|n| v.zero_mode(n.n_hat())).collect();
                let values: Vec<Vec<f64>> = (0..8)
                    .map(|k| rows.iter().map(|x| if k % 2 == 0 { x.0[k / 2].re } else { x.0[k / 2].im }).collect())
                    .collect();
                let headers = ["v0_re", "v0_im", "v1_re", "v1_im", "v2_re", "v2_im", "v3_re", "v3_im"];
                write_out(Some(&p), &grid.to_csv(&headers, &values))?;
            }
            write_out(out.as_deref(), &v.to_csv(&omegas, &grid))
        }
        Command::GaugeCheck { k1, k2, refine, out } => {
            let levels = parse_ladder(&refine)?;
            if levels.iter().any(|x| x.fract() != 0.0 || *x > 3.0) {
                return Err(Failure::Usage("refinement levels must be integers ≤ 3".into()));
            }
            let levels: Vec<u32> = levels.iter().map(|x| *x as u32).collect();
            let (k1, k2) = (parse_current(&k1)?, parse_current(&k2)?);
            let mut r = CheckRecord::new("gauge_commutator", "result");
            let r = settle("gauge_commutator", "result", harness::commutator_values(&k1, &k2, cfg.grid.order, &levels, &mut r).map(|_| r))?;
            emit(&single(&cfg, "gauge", r), out.as_deref())
        }
        Command::Fock { check, seed, samples, out } => {
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = samples {
                cfg.mc.samples = n;
            }
            cfg.validate()?;
            let record = match check {
                FockCheck::Energy => settle("c05_energy_moments", "oracle", harness::energy(&cfg))?,
                FockCheck::Commutator | FockCheck::Vacuum => {
                    let prefix = if matches!(check, FockCheck::Commutator) { "commutator" } else { "vacuum" };
                    let mut r = settle("c04_fock_representation", "result", harness::fock(&cfg))?;
                    r.limits.retain(|l| l.key.starts_with(prefix));
                    r.name = format!("fock_{prefix}");
                    r
                }
            };
            emit(&single(&cfg, "fock", record), out.as_deref())
        }
        Command::Asym { suite, ladder, out } => {
            let rungs = ladder.as_deref().map(parse_ladder).transpose()?;
            let record = match suite {
                AsymSuite::Kg => {
                    if let Some(l) = &ladder {
                        cfg.ladders.kg = l.clone();
                    }
                    cfg.validate()?;
                    let mut r = settle("asym_kg", "result", harness::stationary_phase(&cfg))?;
                    r.name = "asym_kg".into();
                    r
                }
                AsymSuite::Phi | AsymSuite::Coulomb if rungs.is_some() => {
                    return Err(Failure::Usage("--ladder applies to kg, scaled and null only".into()));
                }
                AsymSuite::Phi => {
                    let mut r = CheckRecord::new("asym_phi", "oracle");
                    settle("asym_phi", "oracle", harness::phi_values(&mut r).map(|_| r))?
                }
                AsymSuite::Coulomb => settle("asym_coulomb", "oracle", harness::coulomb(&cfg))?,
                AsymSuite::Scaled => {
                    let rungs = rungs.unwrap_or_else(|| cfg.ladder(&cfg.ladders.scaled));
                    let mut r = CheckRecord::new("asym_scaled", "result");
                    settle("asym_scaled", "result", harness::scaled_values(&rungs, &mut r).map(|_| r))?
                }
                AsymSuite::Null => {
                    if let Some(l) = &ladder {
                        cfg.ladders.null = l.clone();
                    }
                    cfg.validate()?;
                    let mut r = settle("asym_null", "result", harness::null(&cfg))?;
                    r.name = "asym_null".into();
                    r
                }
            };
            emit(&single(&cfg, "asym", record), out.as_deref())
        }
        Command::DiracKernel { chi, lambda_ladder, out } => {
            let lambdas = parse_ladder(&lambda_ladder)?;
            if lambdas.len() < 2 || lambdas[0] <= 0.0 {
                return Err(Failure::Usage("Λ ladder needs at least two positive rungs".into()));
            }
            let configs: Vec<usize> = if chi == "all" {
                (0..harness::DIRAC_CONFIGS).collect()
            } else {
                let i: usize = chi.parse().map_err(|_| Failure::Usage(format!("--chi must be 'all' or an index, got '{chi}'")))?;
                if i >= harness::DIRAC_CONFIGS {
                    return Err(Failure::Usage(format!("--chi must be below {}", harness::DIRAC_CONFIGS)));
                }
                vec![i]
            };
            let mut r = CheckRecord::new("dirac_lambda_ladder", "result");
            let r = settle("dirac_lambda_ladder", "result", harness::dirac_ladder_values(&lambdas, &configs, &mut r).map(|_| r))?;
            emit(&single(&cfg, "dirac", r), out.as_deref())
        }
    }
}
