use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use scpkit::harness::{
    run_experiment, simulate_scp, ExperimentConfig, ExperimentKind, FamilyChoice, Setup, SYMMETRIC_TIME_FACTOR,
};
use scpkit::hydro::{parabolic_solve, riemann_solve, FluxTable, SimilarityProfile, PARABOLIC_FACTOR};
use scpkit::measures::{bar_nu, hat_nu, MarginalFamily, PairMarginal, Pmf};
use scpkit::model::{
    check_attractiveness, check_gradient, check_misanthrope, ModelDocument, ModelSpec, ModelName,
};

#[derive(Parser)]
#[command(name = "scpkit", version, about = "Second class particles in attractive particle systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model definitions.
    #[command(subcommand)]
    Model(ModelCommand),
    /// One-site marginals and coupling tables.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Monte Carlo runs.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Hydrodynamic limit profiles.
    Hydro(HydroArgs),
    /// Runs a configured experiment and writes report.csv and report.json.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Builds a model document and prints the structural verdicts.
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum MeasureCommand {
    /// Writes marginal, hat and bar weight tables.
    Table(TableArgs),
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Histogram of the second class particle position.
    Scp(ScpArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Model name or path to a model JSON document.
    #[arg(long)]
    model: String,
    /// Model parameter as `key=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Marginal family JSON (`{"kind": ...}`); defaults to the stationary family.
    #[arg(long)]
    family: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Also writes the family definition as JSON.
    #[arg(long)]
    save_family: Option<PathBuf>,
}

#[derive(Args)]
struct ScpArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    /// Half width of the simulation window; derived from the rates when absent.
    #[arg(long)]
    window: Option<i32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum HydroKind {
    Riemann,
    Parabolic,
}

#[derive(Args)]
struct HydroArgs {
    kind: HydroKind,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Number of sample points of the similarity variable.
    #[arg(long, default_value_t = 401)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    name: ExperimentKind,
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.csv and report.json unless the config names the files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl ModelArgs {
    fn document(&self) -> Result<ModelDocument> {
        let path = Path::new(&self.model);
        let mut doc = if path.is_file() {
            ModelDocument::from_path(path).with_context(|| format!("reading {}", path.display()))?
        } else {
            let name: ModelName = self.model.parse()?;
            ModelDocument {
                name: name.to_string(),
                parameters: BTreeMap::new(),
                truncation: None,
            }
        };
        doc.parameters.extend(self.params.iter().cloned());
        Ok(doc)
    }

    fn build(&self) -> Result<(ModelSpec, MarginalFamily, FamilyChoice)> {
        let model = self.document()?.build()?;
        let choice = match &self.family {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)
                .with_context(|| format!("parsing family {}", p.display()))?,
            None => FamilyChoice::Stationary,
        };
        let family = choice.build(&model)?;
        Ok((model, family, choice))
    }
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn model_check(file: &Path) -> Result<bool> {
    let doc = ModelDocument::from_path(file)?;
    let model = doc.build()?;
    let r = model.range();
    println!("model: {}", model.name);
    println!("parameters: {:?}", model.parameters);
    println!(
        "occupancy: [{}, {}], simulated on [{}, {}]",
        r.omin.map_or("-inf".into(), |v| v.to_string()),
        r.omax.map_or("+inf".into(), |v| v.to_string()),
        r.sim_floor,
        r.sim_cap
    );
    let degenerate = model.kernel.check_non_degeneracy();
    println!(
        "non-degeneracy: {}",
        degenerate.as_ref().map_or_else(|e| format!("FAIL ({e})"), |_| "pass".into())
    );
    let attractive = check_attractiveness(&model.kernel);
    println!(
        "attractiveness: {}",
        if attractive.passed() { "pass".into() } else { format!("FAIL {attractive:?}") }
    );
    match &model.misanthrope {
        Some(triple) => {
            let v = check_misanthrope(&model.kernel, triple);
            println!("misanthrope: {}", if v.passed() { "pass".into() } else { format!("FAIL {v:?}") });
        }
        None => println!("misanthrope: not applicable"),
    }
    if model.kernel.is_symmetric() {
        match check_gradient(&model) {
            Ok(v) => println!("gradient: {}", if v.passed() { "pass".into() } else { format!("FAIL {v:?}") }),
            Err(e) => println!("gradient: not applicable ({e})"),
        }
    } else {
        println!("gradient: not applicable (asymmetric)");
    }
    match MarginalFamily::from_model(&model) {
        Ok(f) => println!("stationary family: {}", f.label()),
        Err(e) => println!("stationary family: none ({e})"),
    }
    Ok(degenerate.is_ok() && attractive.passed())
}

fn write_pmf(w: &mut csv::Writer<std::fs::File>, table: &str, pmf: &Pmf) -> Result<()> {
    for (x, p) in pmf.iter() {
        w.write_record([table, &x.to_string(), &x.to_string(), &p.to_string()])?;
    }
    Ok(())
}

fn write_pair(w: &mut csv::Writer<std::fs::File>, table: &str, pair: &PairMarginal) -> Result<()> {
    for e in pair.entries() {
        w.write_record([table, &e.x.to_string(), &e.y.to_string(), &e.weight.to_string()])?;
    }
    Ok(())
}

fn measure_table(args: &TableArgs) -> Result<()> {
    let (_, family, choice) = args.model.build()?;
    let mut w = csv::Writer::from_path(&args.out)?;
    w.write_record(["table", "x", "y", "weight"])?;
    write_pmf(&mut w, "marginal_rho", &family.pmf(args.rho)?)?;
    if let Some(lambda) = args.lambda {
        write_pmf(&mut w, "marginal_lambda", &family.pmf(lambda)?)?;
        if args.rho > lambda {
            write_pair(&mut w, "hat", &hat_nu(&family, args.rho, lambda)?)?;
            write_pair(&mut w, "bar", &bar_nu(&family, args.rho, lambda)?)?;
        }
    }
    w.flush()?;
    if let Some(path) = &args.save_family {
        let saved = match (&choice, family.explicit_table()) {
            (FamilyChoice::Explicit { .. }, Some(t)) => FamilyChoice::Explicit { table: t.clone() },
            _ => choice.clone(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&saved)?)?;
    }
    Ok(())
}

fn simulate(args: &ScpArgs) -> Result<()> {
    let (model, family, _) = args.model.build()?;
    let setup = Setup::new(model, family, args.rho, args.lambda)?;
    let hist = simulate_scp(&setup, args.t, args.replicas, args.window, args.seed)?;
    hist.write_csv(&args.out)?;
    hist.write_json(sidecar(&args.out))?;
    println!(
        "{} replicas, {} truncation aborts, half width {}, tail bound {:.3e}",
        hist.replicas, hist.truncation_aborts, hist.window.half_width, hist.window.tail_bound
    );
    Ok(())
}

fn write_profile(path: &Path, profile: &SimilarityProfile, lo: f64, hi: f64, points: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["xi", "u", "atom"])?;
    for (xi, u, atom) in profile.sample(lo, hi, points) {
        w.write_record([xi.to_string(), u.to_string(), u8::from(atom).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn hydro(args: &HydroArgs) -> Result<()> {
    let (model, _, _) = args.model.build()?;
    let stationary = MarginalFamily::from_model(&model)?;
    let (rho, lambda) = (args.rho, args.lambda);
    if !(rho > lambda) {
        bail!("need rho > lambda");
    }
    let meta = match args.kind {
        HydroKind::Riemann => {
            let flux = FluxTable::flux(&model, &stationary, lambda, rho)?;
            let profile = riemann_solve(&flux, rho, lambda)?;
            let (a, b) = profile.support();
            let pad = 0.1 * (b - a).max(1.0);
            write_profile(&args.out, &profile, a - pad, b + pad, args.points)?;
            serde_json::json!({
                "kind": "riemann", "t": args.t, "similarity": "x / t",
                "profile": profile, "atoms": profile.atoms(), "flux_provenance": flux.provenance(),
            })
        }
        HydroKind::Parabolic => {
            let d = FluxTable::diffusivity(&model, &stationary, lambda, rho)?;
            let solution = parabolic_solve(&d, rho, lambda, args.t)?;
            write_profile(&args.out, &solution.profile, -6.0, 6.0, args.points)?;
            serde_json::json!({
                "kind": "parabolic", "t": args.t, "similarity": "x / sqrt(t)",
                "parabolic_factor": PARABOLIC_FACTOR, "simulation_time_factor": SYMMETRIC_TIME_FACTOR,
                "dx": solution.dx, "dt": solution.dt, "steps": solution.steps, "richardson": solution.richardson,
            })
        }
    };
    std::fs::write(sidecar(&args.out), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

fn experiment(args: &ExperimentArgs) -> Result<bool> {
    let cfg = ExperimentConfig::from_path(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    if cfg.experiment != args.name {
        bail!("config describes `{}`, not `{}`", cfg.experiment, args.name);
    }
    let report = run_experiment(&cfg)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let csv_path = cfg.output.csv.clone().unwrap_or_else(|| args.out_dir.join("report.csv"));
    let json_path = cfg.output.json.clone().unwrap_or_else(|| args.out_dir.join("report.json"));
    report.write_csv(&csv_path)?;
    report.write_json(&json_path)?;
    for c in &report.checks {
        println!(
            "{:<4} {}{} = {:.6e} (threshold {:.6e})",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            if c.required { "" } else { " [info]" },
            c.value,
            c.threshold
        );
    }
    println!("{}: {}", report.experiment, if report.pass { "PASS" } else { "FAIL" });
    Ok(report.pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Model(ModelCommand::Check { file }) => model_check(&file),
        Command::Measure(MeasureCommand::Table(a)) => measure_table(&a).map(|_| true),
        Command::Simulate(SimulateCommand::Scp(a)) => simulate(&a).map(|_| true),
        Command::Hydro(a) => hydro(&a).map(|_| true),
        Command::Experiment(a) => experiment(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
