//! Command dispatch for the `spreadhom` binary.
//!
//! Verbs: `spreads`, `hom`, `approx`, `radapp`, `resolve`, `gldim`, `kan-check`,
//! `stabilize`, `verify`. Posets come from inline grid specs (`--grid 4x2`) or JSON
//! files (`--poset FILE`); representations from JSON files. Output is deterministic
//! for a fixed argv and seed; wall-clock timings only appear in machine-readable
//! JSON written via `--json` (and on stdout only with `--timings`).
//!
//! Exit codes: 0 success, 1 mathematical-assertion failure in `verify`/`kan-check`,
//! 2 input error.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use spreadhom::approx::{
    is_approximation, minimal_approximation, minimal_radical_approximation,
    radapp_domain_closed_form, spread_gldim, SpreadFamily,
};
use spreadhom::rep::kernel_of;
use spreadhom::io::{
    parse_grid_spec, parse_spread_spec, ApproximationReport, InclusionJson, PosetSpec,
    RepresentationJson, ResolutionReport, SpreadJson,
};
use spreadhom::kan::AlignedGridInclusion;
use spreadhom::poset::{build_grid, Dir, GridPoset, Poset, Spread};
use spreadhom::rep::{hom_basis, iso_check, seeded_random_reps, Representation, Rep, DEFAULT_ISO_CAP};
use spreadhom::stab::stabilization_table;
use spreadhom::verify::{run_suite, seeded_inclusions, suite_names, SuiteOptions};
use spreadhom::FieldSpec;

#[derive(Parser)]
#[command(
    name = "spreadhom",
    about = "Exact spread-relative homological algebra for finite poset representations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PosetArgs {
    /// Inline grid spec such as 4x2 or 4x2x3.
    #[arg(long, value_name = "KxM")]
    grid: Option<String>,
    /// Poset JSON file ({"type":"grid",...} or {"type":"explicit",...}).
    #[arg(long, value_name = "FILE")]
    poset: Option<PathBuf>,
}

impl PosetArgs {
    fn build(&self) -> Result<(Arc<Poset>, Option<GridPoset>)> {
        match (&self.grid, &self.poset) {
            (Some(spec), None) => {
                let factors = parse_grid_spec(spec)?;
                let grid = build_grid(&factors)?;
                Ok((Arc::new(grid.poset().clone()), Some(grid)))
            }
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let spec: PosetSpec = serde_json::from_str(&text)?;
                Ok(spec.build()?)
            }
            _ => bail!("exactly one of --grid and --poset is required"),
        }
    }
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Prime field modulus.
    #[arg(long, default_value_t = 2)]
    field: u64,
    /// Worker threads for per-k computations.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Seed for all sampled inputs.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write a machine-readable JSON report here.
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Wall-clock budget in seconds for long computations.
    #[arg(long, value_name = "SECS", default_value_t = 1800)]
    time_budget: u64,
    /// Include wall-clock timings in the stdout report.
    #[arg(long, default_value_t = false)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the spreads of a poset.
    Spreads {
        #[command(flatten)]
        poset: PosetArgs,
        /// Print only the count.
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dimension and basis of Hom between two spread representations or two
    /// representation files.
    Hom {
        #[command(flatten)]
        poset: PosetArgs,
        /// Source spread spec (up-<el>, down-<el>, or indices like 0,1,3).
        #[arg(long, value_name = "SPREAD")]
        from: Option<String>,
        /// Target spread spec.
        #[arg(long, value_name = "SPREAD")]
        to: Option<String>,
        /// Source representation JSON file (overrides --from/--to).
        #[arg(long, value_name = "FILE")]
        rep: Option<PathBuf>,
        /// Target representation JSON file.
        #[arg(long, value_name = "FILE")]
        rep2: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Minimal spread-approximation of a representation.
    Approx {
        /// Representation JSON file.
        #[arg(long, value_name = "FILE")]
        rep: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Minimal spread-radical approximation of a spread representation.
    Radapp {
        #[command(flatten)]
        poset: PosetArgs,
        /// Target spread spec (up-<el>, down-<el>, or indices like 0,1,3).
        #[arg(long, value_name = "SPREAD")]
        spread: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Minimal spread-resolution of a representation.
    Resolve {
        /// Representation JSON file.
        #[arg(long, value_name = "FILE")]
        rep: PathBuf,
        /// Bail out after this many steps (default 2|P|).
        #[arg(long)]
        max_depth: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Spread-global dimension of a poset.
    Gldim {
        #[command(flatten)]
        poset: PosetArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the Kan-extension formulas along an aligned grid inclusion.
    KanCheck {
        /// Source grid spec like 3x2.
        #[arg(long, value_name = "KxM")]
        from: String,
        /// Target grid spec like 5x2.
        #[arg(long, value_name = "KxM")]
        to: String,
        /// Inclusion JSON file ({"factors":[[0,2,4],[0,1]]}); seeded random ones
        /// when omitted.
        #[arg(long, value_name = "FILE")]
        inclusion: Option<PathBuf>,
        /// Random modules to test the unit and transport on.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate gldim([k] x [m]) over a range of k.
    Stabilize {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        kmin: usize,
        /// The default attempts the full stabilized range for m = 2.
        #[arg(long, default_value_t = 9)]
        kmax: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a named verification suite.
    Verify {
        /// Suite name; see `verify list`.
        suite: String,
        #[command(flatten)]
        poset: PosetArgs,
        /// Comma-separated prime moduli, e.g. 2,3.
        #[arg(long, value_name = "P,P")]
        fields: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        /// Source grid for transport suites.
        #[arg(long, value_name = "KxM")]
        from: Option<String>,
        /// Target grid for transport suites.
        #[arg(long, value_name = "KxM")]
        to: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        kmin: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Runs the CLI on the given argv (excluding or including the program name; clap
/// expects it included). Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path too; those are not errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn field_of(common: &CommonArgs) -> Result<FieldSpec> {
    Ok(FieldSpec::new(common.field)?)
}

fn write_json<V: serde::Serialize>(common: &CommonArgs, value: &V) -> Result<()> {
    if let Some(path) = &common.json {
        let text = serde_json::to_string_pretty(value)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn load_rep(path: &PathBuf) -> Result<(Rep, Option<GridPoset>, PosetSpec)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: RepresentationJson = serde_json::from_str(&text)?;
    let (_, grid) = json.poset.build()?;
    let rep = json.build()?;
    Ok((rep, grid, json.poset.clone()))
}

fn render_spread(s: &Spread, grid: Option<&GridPoset>) -> String {
    match grid {
        Some(g) => {
            let coords: Vec<String> = s
                .members()
                .iter()
                .map(|i| {
                    let c: Vec<String> = g.coords(i).iter().map(usize::to_string).collect();
                    format!("({})", c.join(","))
                })
                .collect();
            coords.join(" ")
        }
        None => format!("{:?}", s.members().indices()),
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Spreads { poset, count, common } => {
            let (p, grid) = poset.build()?;
            let spreads = p.enumerate_spreads();
            if count {
                println!("{}", spreads.len());
            } else {
                for s in &spreads {
                    println!(
                        "min={:?} cover={:?} members: {}",
                        s.mins().indices(),
                        s.covers().indices(),
                        render_spread(s, grid.as_ref())
                    );
                }
                println!("{} spreads", spreads.len());
            }
            let json: Vec<SpreadJson> =
                spreads.iter().map(|s| SpreadJson::from_spread(s, grid.as_ref())).collect();
            write_json(&common, &json)?;
            Ok(0)
        }
        Command::Hom { poset, from, to, rep, rep2, common } => {
            let field = field_of(&common)?;
            let (m, n) = match (&rep, &rep2) {
                (Some(a), Some(b)) => {
                    let (m, _, _) = load_rep(a)?;
                    let (n, _, _) = load_rep(b)?;
                    (m, n)
                }
                (None, None) => {
                    let (p, _) = poset.build()?;
                    let from = from.ok_or_else(|| anyhow!("--from is required"))?;
                    let to = to.ok_or_else(|| anyhow!("--to is required"))?;
                    let s = parse_spread_spec(&p, &from)?;
                    let t = parse_spread_spec(&p, &to)?;
                    (
                        Representation::spread_rep(p.clone(), field, &s),
                        Representation::spread_rep(p, field, &t),
                    )
                }
                _ => bail!("use either --rep with --rep2, or --from with --to"),
            };
            let basis = hom_basis(&m, &n);
            println!("dim Hom = {}", basis.len());
            for (i, f) in basis.iter().enumerate() {
                let comps: Vec<String> = (0..m.poset().len())
                    .filter(|&p| !f.component(p).is_zero())
                    .map(|p| format!("{}:{:?}", p, f.component(p)))
                    .collect();
                println!("basis {}: {}", i, comps.join(" "));
            }
            write_json(&common, &basis.len())?;
            Ok(0)
        }
        Command::Approx { rep, common } => {
            let (m, grid, _) = load_rep(&rep)?;
            let family = SpreadFamily::all_spreads(m.poset().clone(), m.field());
            let approx = minimal_approximation(&family, &m);
            let report = ApproximationReport::from_approximation(&approx, grid.as_ref());
            for (s, mult) in report.summands.iter().zip(&report.multiplicities) {
                println!("x{mult} spread min={:?} cover={:?}", s.min.indices(), s.cover.indices());
            }
            println!(
                "domain total dim {} -> target total dim {}",
                approx.domain().total_dim(),
                m.total_dim()
            );
            write_json(&common, &report)?;
            Ok(0)
        }
        Command::Radapp { poset, spread, common } => {
            let field = field_of(&common)?;
            let (p, grid) = poset.build()?;
            let target = parse_spread_spec(&p, &spread)?;
            let family = SpreadFamily::all_spreads(p.clone(), field);
            let idx = family
                .index_of(target.members())
                .ok_or_else(|| anyhow!("spread not found in family"))?;
            let rho = minimal_radical_approximation(&family, idx);
            let closed = radapp_domain_closed_form(&p, &target);
            println!("target: {}", render_spread(&target, grid.as_ref()));
            for s in rho.summands() {
                println!("summand: {}", render_spread(s, grid.as_ref()));
            }
            let generic = rho.summand_multiset();
            let closed_set: std::collections::BTreeMap<u64, usize> =
                closed.iter().map(|t| (t.members().0, 1)).collect();
            println!(
                "closed form {} the generic computation",
                if generic == closed_set { "matches" } else { "DISAGREES WITH" }
            );
            let report = ApproximationReport::from_approximation(&rho, grid.as_ref());
            write_json(&common, &report)?;
            Ok(if generic == closed_set { 0 } else { 1 })
        }
        Command::Resolve { rep, max_depth, common } => {
            let (m, grid, _) = load_rep(&rep)?;
            let family = SpreadFamily::all_spreads(m.poset().clone(), m.field());
            // Step the resolution by hand so each stage gets a wall-clock reading.
            let bound = max_depth.unwrap_or(2 * family.poset().len());
            let mut steps: Vec<(spreadhom::approx::Approximation, Vec<usize>, f64)> = Vec::new();
            if !m.is_zero() {
                let mut current = m.clone();
                loop {
                    let t0 = std::time::Instant::now();
                    let approx = minimal_approximation(&family, &current);
                    let (kernel, _) = kernel_of(approx.morphism());
                    let secs = t0.elapsed().as_secs_f64();
                    let done = kernel.is_zero();
                    steps.push((approx, kernel.dims().to_vec(), secs));
                    if done {
                        break;
                    }
                    if steps.len() > bound {
                        bail!("resolution did not terminate within bound {bound}; this signals a bug");
                    }
                    current = kernel;
                }
            }
            let pdim = if steps.is_empty() { None } else { Some(steps.len() - 1) };
            for (i, (approx, kernel_dims, _)) in steps.iter().enumerate() {
                let summands: Vec<String> = approx
                    .summands()
                    .iter()
                    .map(|s| render_spread(s, grid.as_ref()))
                    .collect();
                println!("C_{i}: {}", summands.join(" | "));
                println!("  kernel dims {kernel_dims:?}");
            }
            match pdim {
                Some(len) => println!("pdim = {len}"),
                None => println!("pdim = (zero module)"),
            }
            let report = ResolutionReport {
                steps: steps
                    .iter()
                    .map(|(approx, kernel_dims, secs)| spreadhom::io::ResolutionStepReport {
                        approximation: ApproximationReport::from_approximation(
                            approx,
                            grid.as_ref(),
                        ),
                        kernel_dims: kernel_dims.clone(),
                        seconds: Some(*secs),
                    })
                    .collect(),
                pdim,
            };
            write_json(&common, &report)?;
            Ok(0)
        }
        Command::Gldim { poset, common } => {
            let field = field_of(&common)?;
            let (p, _) = poset.build()?;
            let family = SpreadFamily::all_spreads(p, field);
            let g = spread_gldim(&family)?;
            println!("{g}");
            write_json(&common, &g)?;
            Ok(0)
        }
        Command::KanCheck { from, to, inclusion, trials, common } => {
            let field = field_of(&common)?;
            let from_grid = build_grid(&parse_grid_spec(&from)?)?;
            let to_grid = build_grid(&parse_grid_spec(&to)?)?;
            let inclusions: Vec<AlignedGridInclusion> = match inclusion {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let json: InclusionJson = serde_json::from_str(&text)?;
                    vec![json.build(&to_grid)?]
                }
                None => seeded_inclusions(common.seed, 3, &from_grid, &to_grid),
            };
            let failures = kan_check(&inclusions, field, trials, common.seed)?;
            if failures.is_empty() {
                println!(
                    "kan-check: pass ({} inclusions, {} trials, seed {})",
                    inclusions.len(),
                    trials,
                    common.seed
                );
                Ok(0)
            } else {
                for f in &failures {
                    println!("FAIL {f}");
                }
                Ok(1)
            }
        }
        Command::Stabilize { m, kmin, kmax, common } => {
            let field = field_of(&common)?;
            let report = stabilization_table(
                m,
                kmin,
                kmax,
                field,
                Duration::from_secs(common.time_budget),
                common.threads,
            )?;
            if common.timings {
                print!("{}", report.render());
            } else {
                let mut scrubbed = report.clone();
                for row in &mut scrubbed.rows {
                    row.seconds = 0.0;
                }
                print!("{}", scrubbed.render());
            }
            write_json(&common, &report)?;
            Ok(0)
        }
        Command::Verify { suite, poset, fields, trials, from, to, m, kmin, kmax, common } => {
            if suite == "list" {
                for name in suite_names() {
                    println!("{name}");
                }
                return Ok(0);
            }
            let mut opts = SuiteOptions {
                seed: common.seed,
                threads: common.threads,
                time_budget_secs: common.time_budget,
                ..SuiteOptions::default()
            };
            if let Ok((_, Some(g))) = poset.build() {
                opts.grid = Some(g.factors().to_vec());
            }
            if let Some(f) = fields {
                opts.fields = f
                    .split(',')
                    .map(|p| p.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| anyhow!("bad --fields list '{f}'"))?;
            } else {
                opts.fields = vec![common.field];
            }
            if let Some(t) = trials {
                opts.trials = t;
            }
            if let Some(f) = from {
                opts.from = Some(parse_grid_spec(&f)?);
            }
            if let Some(t) = to {
                opts.to = Some(parse_grid_spec(&t)?);
            }
            if let Some(m) = m {
                opts.m = m;
            }
            if let Some(k) = kmin {
                opts.kmin = k;
            }
            if let Some(k) = kmax {
                opts.kmax = k;
            }
            let report = run_suite(&suite, &opts).map_err(|e| anyhow!(e))?;
            print!("{}", report.render(common.timings));
            write_json(&common, &report.failures)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn kan_check(
    inclusions: &[AlignedGridInclusion],
    field: FieldSpec,
    trials: usize,
    seed: u64,
) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    for (idx, inclusion) in inclusions.iter().enumerate() {
        let q = inclusion.source_poset().clone();
        let p = inclusion.target_poset().clone();
        // Stretch formula on every source spread.
        for s in q.enumerate_spreads() {
            let rep = Representation::spread_rep(q.clone(), field, &s);
            let lan = inclusion.lan(&rep)?;
            let members = p
                .closure(inclusion.map_subset(s.mins()), Dir::Up)
                .minus(p.closure(inclusion.map_subset(s.covers()), Dir::Up));
            let expected = Representation::indicator(p.clone(), field, members)?;
            if !iso_check(&lan, &expected, DEFAULT_ISO_CAP)? {
                failures.push(format!("inclusion {idx}: stretch formula at {:?}", s.members()));
            }
        }
        // Unit isomorphism and approximation transport on random modules.
        let small = SpreadFamily::all_spreads(q.clone(), field);
        let big = SpreadFamily::all_spreads(p.clone(), field);
        for (t, m) in seeded_random_reps(&q, field, seed.wrapping_add(idx as u64), trials, 3, 2)
            .iter()
            .enumerate()
        {
            let lan_m = inclusion.lan(m)?;
            let back = inclusion.restrict_rep(&lan_m)?;
            if !iso_check(m, &back, 12)? {
                failures.push(format!("inclusion {idx}: unit not iso (trial {t})"));
            }
            let approx = minimal_approximation(&small, m);
            let lan_f = inclusion.lan_morphism(approx.morphism())?;
            if !is_approximation(&big, &lan_f) {
                failures.push(format!("inclusion {idx}: lan approximation (trial {t})"));
            }
        }
    }
    Ok(failures)
}
