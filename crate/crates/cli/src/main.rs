use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use platonicon::calibrate::calibrate;
use platonicon::config::Configuration;
use platonicon::mesh::{build_mesh, export_mesh, metrics, metrics_csv, ExportFormat, MetricsReport};
use platonicon::roll::{develop_footprint, list_modes, simulate_roll, BranchPolicy, RollGeometry, RollOptions};
use platonicon::seam::RuleSet;
use platonicon::search::{class_table, default_budget, enumerate_classes, summary_table, ClassReport};
use platonicon::verify::{run_suite, Suite};
use platonicon::{build_solid, tolerance, PlatonicSolid, SolidName};

const EXIT_ASSERTION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "platonicon",
    version,
    about = "Build, enumerate, roll and mesh Platonic-solid developable rollers"
)]
struct Cli {
    /// Worker threads for enumeration and meshing (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for reports, meshes and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Dump the canonical solid tables.
    Solids(SolidArgs),
    /// Count configuration classes up to symmetry.
    Enumerate(EnumerateArgs),
    /// Tessellate a configuration and export it.
    Mesh(MeshArgs),
    /// Simulate rolling and list the branch modes.
    Roll(RollArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
    /// Area and volume reports.
    Metrics(MetricsArgs),
}

#[derive(Args, Debug, Serialize)]
struct SolidArgs {
    /// tetrahedron, cube, octahedron, dodecahedron, icosahedron or all.
    #[arg(long, default_value = "all")]
    solid: String,
}

#[derive(Args, Debug, Serialize)]
struct SearchArgs {
    /// Seam pairing rule set.
    #[arg(long = "rule-set", default_value = "tangent-alternation")]
    rule_set: String,
    /// Search node budget; 0 means unbounded. Defaults depend on the solid.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct EnumerateArgs {
    #[command(flatten)]
    solid: SolidArgs,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug, Serialize)]
struct ConfigArgs {
    #[arg(long, default_value = "cube")]
    solid: String,
    /// Descriptor path, `class:<n>`, an inline list such as `0,2,1,1`, or `all`.
    #[arg(long, default_value = "class:0")]
    config: String,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug, Serialize)]
struct MeshArgs {
    #[command(flatten)]
    target: ConfigArgs,
    /// Segments per solid edge.
    #[arg(long, default_value_t = 32)]
    resolution: usize,
    /// Millimetres per circumradius unit in the exported file.
    #[arg(long = "scale-mm")]
    scale_mm: Option<f64>,
    /// stl-binary, stl-ascii or obj.
    #[arg(long, default_value = "stl-binary")]
    format: String,
}

#[derive(Args, Debug, Serialize)]
struct RollArgs {
    #[command(flatten)]
    target: ConfigArgs,
    /// Branch mode to trace in detail.
    #[arg(long, default_value_t = 0)]
    mode: usize,
    /// Full cycles to roll.
    #[arg(long, default_value_t = 3)]
    cycles: usize,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    solid: SolidArgs,
    /// geometry, combinatorics, oracle, calibration or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long = "rule-set", default_value = "tangent-alternation")]
    rule_set: String,
}

#[derive(Args, Debug, Serialize)]
struct MetricsArgs {
    #[command(flatten)]
    target: ConfigArgs,
    #[arg(long, default_value_t = 32)]
    resolution: usize,
}

/// Failure kinds mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<platonicon::Error> for Failure {
    fn from(e: platonicon::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Ok,
    AssertionFailed,
    Incomplete,
}

impl Outcome {
    fn merge(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::AssertionFailed, _) | (_, Outcome::AssertionFailed) => Outcome::AssertionFailed,
            (Outcome::Incomplete, _) | (_, Outcome::Incomplete) => Outcome::Incomplete,
            _ => Outcome::Ok,
        }
    }
}

#[derive(Serialize)]
struct OutputRecord {
    path: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    request: &'a Cli,
    rule_set: Option<&'a str>,
    tolerances: tolerance::ToleranceTable,
    status: &'static str,
    outputs: Vec<OutputRecord>,
}

/// Collects artifacts so the manifest can list them with their hashes.
struct Outputs {
    dir: PathBuf,
    written: BTreeMap<String, OutputRecord>,
}

impl Outputs {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.insert(
            name.to_string(),
            OutputRecord {
                path: name.to_string(),
                bytes: bytes.len(),
                sha256: hex(&Sha256::digest(bytes)),
            },
        );
        Ok(())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_solids(s: &str) -> Result<Vec<SolidName>, Failure> {
    if s == "all" {
        Ok(SolidName::ALL.to_vec())
    } else {
        Ok(vec![s.parse::<SolidName>().map_err(usage)?])
    }
}

fn parse_solid(s: &str) -> Result<SolidName, Failure> {
    s.parse::<SolidName>().map_err(usage)
}

fn parse_rules(s: &str) -> Result<RuleSet, Failure> {
    s.parse::<RuleSet>().map_err(usage)
}

fn budget_for(name: SolidName, args: &SearchArgs) -> Option<u64> {
    match args.budget {
        Some(0) => None,
        Some(b) => Some(b),
        None => default_budget(name),
    }
}

/// Configurations named by `--config`, with a file stem for each.
fn resolve_configs(
    solid: &PlatonicSolid,
    target: &ConfigArgs,
) -> Result<(Vec<(String, Configuration)>, Outcome), Failure> {
    let spec = target.config.as_str();
    let rules = parse_rules(&target.search.rule_set)?;
    let by_class = |filter: Option<usize>| -> Result<(Vec<(String, Configuration)>, Outcome), Failure> {
        let report = enumerate_classes(solid, rules, budget_for(solid.name, &target.search));
        let outcome = if report.complete {
            Outcome::Ok
        } else {
            Outcome::Incomplete
        };
        let picked: Vec<_> = report
            .classes
            .iter()
            .filter(|c| filter.is_none_or(|i| c.index == i))
            .map(|c| (format!("{}-class{}", solid.name, c.index), c.configuration.clone()))
            .collect();
        if let Some(i) = filter {
            if picked.is_empty() {
                return Err(usage(anyhow!(
                    "class {i} does not exist: {} has {} classes under {}",
                    solid.name,
                    report.class_count,
                    rules
                )));
            }
        }
        Ok((picked, outcome))
    };
    if spec == "all" {
        return by_class(None);
    }
    if let Some(n) = spec.strip_prefix("class:") {
        let i: usize = n.parse().map_err(|_| usage(anyhow!("bad class index `{n}`")))?;
        return by_class(Some(i));
    }
    let config = if spec.chars().all(|c| c.is_ascii_digit() || c == ',') {
        let digits: Vec<u8> = spec
            .split(',')
            .map(|d| d.parse::<u8>())
            .collect::<Result<_, _>>()
            .map_err(|_| usage(anyhow!("bad inline configuration `{spec}`")))?;
        Configuration::new(solid, digits).map_err(usage)?
    } else {
        let text = std::fs::read_to_string(spec)
            .with_context(|| format!("reading configuration {spec}"))
            .map_err(usage)?;
        let c = Configuration::from_descriptor(&text).map_err(usage)?;
        if c.solid != solid.name {
            return Err(usage(anyhow!("{spec} describes a {}, not a {}", c.solid, solid.name)));
        }
        Configuration::new(solid, c.orientations).map_err(usage)?
    };
    let digits: String = config.orientations.iter().map(|d| char::from(b'0' + d)).collect();
    Ok((vec![(format!("{}-o{digits}", solid.name), config)], Outcome::Ok))
}

fn cmd_solids(args: &SolidArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let mut docs = Vec::new();
    println!(
        "{:<13} {:>3} {:>3} {:>3} {:>12} {:>14} {:>14}",
        "solid", "V", "E", "F", "dihedral", "dual dihedral", "cone half"
    );
    for name in parse_solids(&args.solid)? {
        let s = build_solid(name);
        println!(
            "{:<13} {:>3} {:>3} {:>3} {:>11.6}° {:>13.6}° {:>13.6}°",
            name.as_str(),
            s.vertices.len(),
            s.edges.len(),
            s.n_faces(),
            s.dihedral.to_degrees(),
            s.dual_dihedral.to_degrees(),
            (s.dual_dihedral / 2.0).to_degrees()
        );
        docs.push(serde_json::from_str::<serde_json::Value>(&s.to_json()?).context("solid table")?);
    }
    let mut text = serde_json::to_string_pretty(&docs).context("solid tables")?;
    text.push('\n');
    out.write("solids.json", text.as_bytes())?;
    Ok(Outcome::Ok)
}

fn cmd_enumerate(args: &EnumerateArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let rules = parse_rules(&args.search.rule_set)?;
    let mut reports: Vec<ClassReport> = Vec::new();
    for name in parse_solids(&args.solid.solid)? {
        let solid = build_solid(name);
        let r = enumerate_classes(&solid, rules, budget_for(name, &args.search));
        println!("{}", class_table(&r));
        out.write(&format!("classes-{name}.json"), r.to_json().as_bytes())?;
        for c in &r.classes {
            out.write(
                &format!("configs/{name}-class{}.json", c.index),
                c.configuration.to_descriptor().as_bytes(),
            )?;
        }
        reports.push(r);
    }
    let table = summary_table(&reports);
    print!("{table}");
    out.write("classes-summary.txt", table.as_bytes())?;
    if reports.iter().any(|r| !r.complete) {
        eprintln!("search budget exhausted; partial results written");
        return Ok(Outcome::Incomplete);
    }
    Ok(Outcome::Ok)
}

fn cmd_mesh(args: &MeshArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let format: ExportFormat = args.format.parse().map_err(usage)?;
    if let Some(s) = args.scale_mm {
        if !(s.is_finite() && s > 0.0) {
            return Err(usage(anyhow!("--scale-mm must be positive")));
        }
    }
    let solid = build_solid(parse_solid(&args.target.solid)?);
    let (configs, mut outcome) = resolve_configs(&solid, &args.target)?;
    for (stem, config) in configs {
        let mesh = build_mesh(&solid, &config, args.resolution).map_err(|e| match e {
            platonicon::Error::ResolutionTooLow(_) => usage(e),
            e => e.into(),
        })?;
        let report = metrics(&mesh, &solid)?;
        let exported = match args.scale_mm {
            Some(s) => mesh.scaled(s),
            None => mesh,
        };
        let bytes = export_mesh(&exported, format);
        out.write(&format!("{stem}.{}", format.extension()), &bytes)?;
        out.write(&format!("{stem}-metrics.json"), report.to_json().as_bytes())?;
        println!(
            "{stem}: {} vertices, {} triangles, volume {:.6}, area {:.6}",
            report.vertices, report.triangles, report.volume, report.surface_area
        );
        if !report.volume_ordering_holds {
            eprintln!("{stem}: volume ordering solid < body < circumsphere fails");
            outcome = outcome.merge(Outcome::AssertionFailed);
        }
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct RollReport {
    configuration: String,
    modes: Vec<platonicon::roll::ModeSummary>,
    trace: platonicon::roll::RollTrace,
}

fn cmd_roll(args: &RollArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let solid = build_solid(parse_solid(&args.target.solid)?);
    let (configs, mut outcome) = resolve_configs(&solid, &args.target)?;
    for (stem, config) in configs {
        let geo = RollGeometry::new(&solid, &config)?;
        let modes = list_modes(&geo)?;
        let mode = modes.get(args.mode).ok_or_else(|| {
            usage(anyhow!(
                "mode {} does not exist; {stem} has {} modes",
                args.mode,
                modes.len()
            ))
        })?;
        println!("{stem}: {} modes", modes.len());
        println!(
            "{:>4} {:>6} {:>8} {:>5} {:>9} {:>12} {:>12}",
            "mode", "cycle", "coverage", "full", "injective", "footprint", "patch area"
        );
        for m in &modes {
            println!(
                "{:>4} {:>6} {:>8.3} {:>5} {:>9} {:>12.6} {:>12.6}",
                m.index,
                m.cycle.len(),
                m.coverage,
                m.full,
                m.injective,
                m.footprint_area,
                m.visited_patch_area
            );
        }
        let opts = RollOptions {
            cycles: args.cycles,
            ..RollOptions::default()
        };
        let policy = BranchPolicy::Script(mode.script.iter().copied().collect());
        let trace = simulate_roll(&geo, &policy, &opts)?;
        println!(
            "mode {}: {} events, {} cycles, height {:.9} (deviation {:.2e}), closure {:?}",
            args.mode,
            trace.events.len(),
            trace.cycles_completed,
            trace.expected_height,
            trace.max_height_deviation,
            trace.closure_error
        );
        if trace.max_height_deviation > tolerance::HEIGHT || trace.min_clearance < -tolerance::SUPPORT {
            outcome = outcome.merge(Outcome::AssertionFailed);
        }
        if trace.closed {
            let fp = develop_footprint(&trace)?;
            out.write(
                &format!("{stem}-mode{}-footprint.svg", args.mode),
                fp.to_svg().as_bytes(),
            )?;
        }
        let report = RollReport {
            configuration: config.label(),
            modes,
            trace,
        };
        let mut text = serde_json::to_string_pretty(&report).context("roll report")?;
        text.push('\n');
        out.write(&format!("{stem}-roll.json"), text.as_bytes())?;
    }
    Ok(outcome)
}

fn cmd_verify(args: &VerifyArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let rules = parse_rules(&args.rule_set)?;
    let solids = parse_solids(&args.solid.solid)?;
    let (suites, calibration) = match args.suite.as_str() {
        "all" => (Suite::ALL.to_vec(), true),
        "calibration" => (Vec::new(), true),
        s => (vec![s.parse::<Suite>().map_err(usage)?], false),
    };
    let mut outcome = Outcome::Ok;
    for suite in suites {
        let report = run_suite(suite, &solids, rules)?;
        println!("suite {}", suite.as_str());
        print!("{}", report.to_table());
        let mut text = serde_json::to_string_pretty(&report).context("suite report")?;
        text.push('\n');
        out.write(&format!("verify-{}.json", suite.as_str()), text.as_bytes())?;
        if !report.ok() {
            outcome = outcome.merge(Outcome::AssertionFailed);
        }
        if !report.incomplete.is_empty() {
            outcome = outcome.merge(Outcome::Incomplete);
        }
    }
    if calibration {
        let report = calibrate(&RuleSet::ALL)?;
        let md = report.to_markdown();
        print!("{md}");
        out.write("calibration.json", report.to_json().as_bytes())?;
        out.write("calibration.md", md.as_bytes())?;
        // the default rule set must at least agree with the rolling oracle
        let default = report.rule_sets.iter().find(|r| r.rule_set == RuleSet::default());
        if !default.is_some_and(|r| r.passes_oracle) {
            outcome = outcome.merge(Outcome::AssertionFailed);
        }
    }
    Ok(outcome)
}

fn cmd_metrics(args: &MetricsArgs, out: &mut Outputs) -> Result<Outcome, Failure> {
    let names = parse_solids(&args.target.solid)?;
    let mut reports: Vec<MetricsReport> = Vec::new();
    let mut outcome = Outcome::Ok;
    for name in names {
        let solid = build_solid(name);
        let (configs, o) = resolve_configs(&solid, &args.target)?;
        outcome = outcome.merge(o);
        for (stem, config) in configs {
            let mesh = build_mesh(&solid, &config, args.resolution).map_err(|e| match e {
                platonicon::Error::ResolutionTooLow(_) => usage(e),
                e => e.into(),
            })?;
            let mut r = metrics(&mesh, &solid)?;
            r.class_index = stem.rsplit_once("-class").and_then(|(_, i)| i.parse().ok());
            if !r.volume_ordering_holds {
                outcome = outcome.merge(Outcome::AssertionFailed);
            }
            println!(
                "{stem}: area {:.6} volume {:.6} (solid {:.6}, sphere {:.6}) ratio to solid {:.4}",
                r.surface_area, r.volume, r.solid_volume, r.circumsphere_volume, r.volume_to_solid
            );
            reports.push(r);
        }
    }
    let mut text = serde_json::to_string_pretty(&reports).context("metrics")?;
    text.push('\n');
    out.write("metrics.json", text.as_bytes())?;
    out.write("metrics.csv", metrics_csv(&reports).as_bytes())?;
    Ok(outcome)
}

fn rule_set_of(cli: &Cli) -> Option<&str> {
    match &cli.command {
        Command::Solids(_) => None,
        Command::Enumerate(a) => Some(&a.search.rule_set),
        Command::Mesh(a) => Some(&a.target.search.rule_set),
        Command::Roll(a) => Some(&a.target.search.rule_set),
        Command::Verify(a) => Some(&a.rule_set),
        Command::Metrics(a) => Some(&a.target.search.rule_set),
    }
}

fn command_name(cli: &Cli) -> &'static str {
    match cli.command {
        Command::Solids(_) => "solids",
        Command::Enumerate(_) => "enumerate",
        Command::Mesh(_) => "mesh",
        Command::Roll(_) => "roll",
        Command::Verify(_) => "verify",
        Command::Metrics(_) => "metrics",
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(usage(anyhow!("--workers must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("worker pool")?;
    }
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let mut out = Outputs {
        dir: cli.out.clone(),
        written: BTreeMap::new(),
    };
    let outcome = match &cli.command {
        Command::Solids(a) => cmd_solids(a, &mut out),
        Command::Enumerate(a) => cmd_enumerate(a, &mut out),
        Command::Mesh(a) => cmd_mesh(a, &mut out),
        Command::Roll(a) => cmd_roll(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Metrics(a) => cmd_metrics(a, &mut out),
    }?;
    write_manifest(cli, &cli.out, out, outcome)?;
    Ok(outcome)
}

fn write_manifest(cli: &Cli, dir: &Path, out: Outputs, outcome: Outcome) -> Result<(), Failure> {
    let manifest = Manifest {
        tool: "platonicon",
        version: env!("CARGO_PKG_VERSION"),
        request: cli,
        rule_set: rule_set_of(cli),
        tolerances: tolerance::table(),
        status: match outcome {
            Outcome::Ok => "ok",
            Outcome::AssertionFailed => "assertion-failed",
            Outcome::Incomplete => "incomplete",
        },
        outputs: out.written.into_values().collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).context("manifest")?;
    text.push('\n');
    let path = dir.join(format!("manifest-{}.json", command_name(cli)));
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AssertionFailed) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(EXIT_ASSERTION)
        }
        Ok(Outcome::Incomplete) => ExitCode::from(EXIT_BUDGET),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            eprintln!("run `platonicon --help` for usage");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
