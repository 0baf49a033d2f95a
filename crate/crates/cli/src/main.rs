//! `drum`: exact revealed-preference tests for dynamic random utility.
//!
//! Exit status: 0 consistent or passing, 1 inconsistent or failing, 2 input
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use drum_core::axioms::{
    check_intensity_monotonicity, check_monotonicity, check_sarpd, check_sarpd_all,
    check_stability, slice, test_rum_static,
};
use drum_core::io::{self, Dataset};
use drum_core::pooling::{build_pooled_patches, pool, test_rum_pooled, Weighting};
use drum_core::rational;
use drum_core::simulation::{random_simplex_weights, simulate_mixture, simulate_panel};
use drum_core::{
    test_drum, AxiomReport, BudgetPath, ChoiceDomain, DrumError, ProfileMatrix, ProfileSpace,
    DEFAULT_MAX_ENTRIES,
};

/// Stdout writes that end quietly when the reader goes away.
macro_rules! say_raw {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let mut out = std::io::stdout().lock();
        if let Err(e) = write!(out, $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

macro_rules! say {
    ($($arg:tt)*) => {{
        say_raw!($($arg)*);
        say_raw!("\n");
    }};
}

#[derive(Parser)]
#[command(
    name = "drum",
    version,
    about = "Exact revealed-preference tests for dynamic random utility"
)]
struct Cli {
    /// Exclude intersection patches from choice supports.
    #[arg(long, global = true, env = "DRUM_CONTINUOUS_DEMAND")]
    continuous_demand: bool,
    /// Seed for commands that draw random instances.
    #[arg(long, global = true, env = "DRUM_SEED", default_value_t = 0)]
    seed: u64,
    /// Refuse profile matrices with more columns than this.
    #[arg(long, global = true, env = "DRUM_MAX_COLUMNS")]
    max_columns: Option<u128>,
    /// Directory for JSON reports.
    #[arg(long, global = true, env = "DRUM_REPORT_DIR")]
    report_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Patch partition of every period.
    Patches { dataset: PathBuf },
    /// Rational demand types of every period.
    Types { dataset: PathBuf },
    /// Profile matrix as dense 0/1 rows; the sparse form goes to matrix.json.
    Matrix { dataset: PathBuf },
    /// Decide dynamic rationalizability; writes verdict.json and, when
    /// inconsistent, certificate.json.
    Test { dataset: PathBuf },
    /// Stability, monotonicity and intensity monotonicity.
    Axioms { dataset: PathBuf },
    /// Per-period marginals and their static random-utility test.
    Slice {
        dataset: PathBuf,
        /// Period to slice (1-based); all periods when absent.
        #[arg(long)]
        period: Option<usize>,
    },
    /// Path-dominance axiom for constant preferences.
    Sarpd {
        dataset: PathBuf,
        /// Budget path such as `1,2` (1-based); all observed paths when absent.
        #[arg(long, value_delimiter = ',')]
        path: Option<Vec<usize>>,
    },
    /// Pool a panel across periods and test the cross-section.
    Pool {
        /// Dataset giving the budgets.
        dataset: PathBuf,
        /// CSV panel: agent,period,budget[,weight],y1..yK.
        panel: PathBuf,
        #[arg(long, value_enum, default_value_t = PoolWeighting::Observation)]
        weighting: PoolWeighting,
    },
    /// Simulate a demand from a utility specification, or with
    /// `--random-mixture` from seeded random weights over the profiles of a
    /// dataset's budgets.
    Simulate {
        input: PathBuf,
        #[arg(long)]
        random_mixture: bool,
        /// Dataset output; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Panel CSV output (specification input only).
        #[arg(long)]
        panel: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolWeighting {
    Observation,
    Agent,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Pass,
    Fail,
}

impl Cli {
    fn load(&self, path: &Path) -> Result<Dataset> {
        let dataset = io::load_dataset(path)?;
        if self.continuous_demand {
            return Ok(dataset.with_continuous_demand(true)?);
        }
        Ok(dataset)
    }

    fn load_with_demand(&self, path: &Path) -> Result<Dataset> {
        let dataset = self.load(path)?;
        if !dataset.has_demand() {
            bail!("{}: the dataset lists no demand", path.display());
        }
        Ok(dataset)
    }

    fn matrix(&self, domain: &ChoiceDomain) -> Result<ProfileMatrix> {
        let space = ProfileSpace::of(domain)?;
        if let Some(cap) = self.max_columns {
            if space.column_count() > cap {
                bail!(
                    "profile matrix would have {} columns, above --max-columns {cap}",
                    space.column_count()
                );
            }
        }
        Ok(ProfileMatrix::from_space(space, DEFAULT_MAX_ENTRIES)?)
    }

    fn report(&self, name: &str, value: &serde_json::Value) -> Result<()> {
        let Some(dir) = &self.report_dir else {
            return Ok(());
        };
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        io::write_json(&dir.join(name), value)?;
        Ok(())
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn print_reports(reports: &[AxiomReport]) -> Outcome {
    for r in reports {
        say!(
            "{}: {} ({} instances checked)",
            r.axiom,
            r.status,
            r.checked
        );
        for v in r.violations.iter().take(10) {
            say!("  {v}");
        }
        if r.violations.len() > 10 {
            say!("  ... {} more", r.violations.len() - 10);
        }
    }
    if reports.iter().all(AxiomReport::passed) {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Patches { dataset } => {
            let d = cli.load(dataset)?;
            let value = io::patches_json(&d.domain.periods);
            say!("{}", pretty(&value));
            cli.report("patches.json", &value)?;
            Ok(Outcome::Pass)
        }
        Command::Types { dataset } => {
            let d = cli.load(dataset)?;
            let types = d.domain.rational_types();
            let periods: Vec<_> = types
                .iter()
                .enumerate()
                .map(|(t, ts)| {
                    let set = &d.domain.periods[t];
                    let list: Vec<_> = ts
                        .iter()
                        .map(|ty| {
                            let choices: Vec<String> = ty
                                .choice
                                .iter()
                                .enumerate()
                                .map(|(j, &i)| set.label(drum_core::PatchId { owner: j, patch: i }))
                                .collect();
                            json!({ "type": ty.to_string(), "choices": choices })
                        })
                        .collect();
                    json!({ "period": t + 1, "types": list })
                })
                .collect();
            let value = json!({ "periods": periods });
            say!("{}", pretty(&value));
            cli.report("types.json", &value)?;
            Ok(Outcome::Pass)
        }
        Command::Matrix { dataset } => {
            let d = cli.load(dataset)?;
            let matrix = cli.matrix(&d.domain)?;
            say_raw!("{}", io::matrix_text(&matrix));
            cli.report("matrix.json", &io::matrix_json(&matrix))?;
            Ok(Outcome::Pass)
        }
        Command::Test { dataset } => {
            let d = cli.load_with_demand(dataset)?;
            let matrix = cli.matrix(&d.domain)?;
            let verdict = test_drum(&matrix, &d.rho)?;
            let value = io::verdict_json(&matrix, &verdict);
            if verdict.is_feasible() {
                say!(
                    "consistent: {} x {} matrix, witness verified: {}",
                    matrix.row_count(),
                    matrix.column_count(),
                    verdict.witness_verified
                );
            } else {
                say!(
                    "inconsistent: {} x {} matrix, certificate verified: {}",
                    matrix.row_count(),
                    matrix.column_count(),
                    verdict.certificate_verified
                );
                if let Some(seq) = verdict.violating_sequence(&matrix) {
                    for (cp, m) in seq {
                        say!("  {m} x {cp}");
                    }
                }
                let dir = cli
                    .report_dir
                    .clone()
                    .unwrap_or_else(|| PathBuf::from("drum-report"));
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                let certificate = json!({
                    "certificate": value["certificate"],
                    "violating_sequence": value["violating_sequence"],
                });
                let path = dir.join("certificate.json");
                io::write_json(&path, &certificate)?;
                say!("certificate written to {}", path.display());
            }
            cli.report("verdict.json", &value)?;
            Ok(if verdict.is_feasible() {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Axioms { dataset } => {
            let d = cli.load_with_demand(dataset)?;
            let reports = [
                check_stability(&d.rho, &d.domain),
                check_monotonicity(&d.rho, &d.domain),
                check_intensity_monotonicity(&d.rho, &d.domain),
            ];
            let value = json!(reports
                .iter()
                .map(io::axiom_report_json)
                .collect::<Vec<_>>());
            cli.report("axioms.json", &value)?;
            Ok(print_reports(&reports))
        }
        Command::Slice { dataset, period } => {
            let d = cli.load_with_demand(dataset)?;
            let horizon = d.domain.horizon();
            let periods = match period {
                Some(t) if (1..=horizon).contains(t) => vec![t - 1],
                Some(t) => bail!("period {t} does not exist; the dataset has {horizon} periods"),
                None => (0..horizon).collect(),
            };
            let mut ok = true;
            let mut values = Vec::new();
            for tau in periods {
                let m = slice(&d.rho, &d.domain, tau);
                let set = &d.domain.periods[tau];
                let verdicts = m
                    .families
                    .iter()
                    .map(|f| {
                        test_rum_static(
                            &f.marginal,
                            set,
                            d.domain.continuous_demand,
                            DEFAULT_MAX_ENTRIES,
                        )
                        .map(|v| Some(v.is_feasible()))
                    })
                    .collect::<Result<Vec<_>, DrumError>>()?;
                say!(
                    "period {}: {}",
                    tau + 1,
                    if m.well_defined {
                        "well defined"
                    } else {
                        "not well defined"
                    }
                );
                for (f, v) in m.families.iter().zip(&verdicts) {
                    let feasible = v.unwrap_or(false);
                    say!(
                        "  given {}: {} [{}]",
                        f.label(&d.domain),
                        f.marginal,
                        if feasible {
                            "RUM-consistent"
                        } else {
                            "not RUM-consistent"
                        }
                    );
                    ok &= feasible;
                }
                ok &= m.well_defined;
                values.push(io::slice_json(&d.domain, &m, &verdicts));
            }
            cli.report("slices.json", &json!(values))?;
            Ok(if ok { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Sarpd { dataset, path } => {
            let d = cli.load_with_demand(dataset)?;
            let report = match path {
                Some(p) => {
                    let bp = BudgetPath(
                        p.iter()
                            .map(|&j| {
                                j.checked_sub(1)
                                    .ok_or_else(|| anyhow!("budget indices are 1-based"))
                            })
                            .collect::<Result<_>>()?,
                    );
                    check_sarpd(&d.rho, &d.domain, &bp)?
                }
                None => check_sarpd_all(&d.rho, &d.domain),
            };
            cli.report("sarpd.json", &io::axiom_report_json(&report))?;
            Ok(print_reports(std::slice::from_ref(&report)))
        }
        Command::Pool {
            dataset,
            panel,
            weighting,
        } => {
            let d = cli.load(dataset)?;
            let panel = io::load_panel(panel, d.domain.periods[0].goods())?;
            let pooled = build_pooled_patches(&d.domain.periods)?;
            let weighting = match weighting {
                PoolWeighting::Observation => Weighting::Observation,
                PoolWeighting::Agent => Weighting::Agent,
            };
            let demand = pool(&panel, &pooled, weighting)?;
            let verdict = test_rum_pooled(
                &demand,
                &pooled,
                d.domain.continuous_demand,
                DEFAULT_MAX_ENTRIES,
            )?;
            let values: serde_json::Map<String, serde_json::Value> = demand
                .values
                .iter()
                .map(|(id, v)| (pooled.label(*id), json!(rational::format(v))))
                .collect();
            for (label, v) in &values {
                say!("{label} {}", v.as_str().unwrap_or_default());
            }
            let consistent = verdict.is_feasible();
            say!(
                "pooled cross-section {}",
                if consistent {
                    "RUM-consistent"
                } else {
                    "not RUM-consistent"
                }
            );
            cli.report(
                "pool.json",
                &json!({ "pooled_demand": values, "rum_consistent": consistent }),
            )?;
            Ok(if consistent {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Simulate {
            input,
            random_mixture,
            output,
            panel,
        } => {
            let (dataset, sim_panel) = if *random_mixture {
                let d = cli.load(input)?;
                let matrix = cli.matrix(&d.domain)?;
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                let nu = random_simplex_weights(&mut rng, matrix.column_count());
                let rho = simulate_mixture(&matrix, &nu)?;
                (
                    Dataset {
                        domain: d.domain,
                        rho,
                    },
                    None,
                )
            } else {
                let (mut domain, process) = io::load_simulation_spec(input)?;
                domain.continuous_demand |= cli.continuous_demand;
                let sim = simulate_panel(&process, &domain)?;
                for n in &sim.notes {
                    eprintln!("note: {n}");
                }
                (
                    Dataset {
                        domain,
                        rho: sim.rho,
                    },
                    Some(sim.panel),
                )
            };
            match output {
                Some(path) => io::save_dataset(path, &dataset)?,
                None => say_raw!("{}", io::dataset_to_json(&dataset)),
            }
            match (panel, sim_panel) {
                (Some(path), Some(p)) => io::save_panel(path, &p)?,
                (Some(_), None) => bail!("--panel needs a utility specification input"),
                _ => {}
            }
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
