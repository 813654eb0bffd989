//! `phasegeo` command-line interface.

mod presets;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use phasegeo::analysis::{self, CoareaParams, CylinderGeometry};
use phasegeo::config::{parse_seed, RunConfig};
use phasegeo::eikonal::fast_march;
use phasegeo::io::{self, RunManifest, WriteStatus};
use phasegeo::mesh::extract_isosurface;
use phasegeo::solver::{self, Geodesic, Geometry, ProblemConfig, Timings};
use phasegeo::Error;

#[derive(Parser)]
#[command(name = "phasegeo", version, about = "Phase-field Steiner and Plateau solvers")]
struct Cli {
    /// Log progress (repeat for debug output).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the alternating solver on a config file.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compute the geodesics of a config once, for the seed phase field.
    Geodesic {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print statistics of a PFLD field.
    Inspect {
        field: PathBuf,
        /// Also report the measure of this level set.
        #[arg(long)]
        level: Option<f64>,
    },
    /// Coarea level scan and cylinder separation check of a PFLD field.
    Analyze(AnalyzeArgs),
    /// Built-in reproduction setups.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names with a short description.
    List,
    /// Run a preset.
    Run {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print a preset as a config file.
    Export { name: String },
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Output directory (default `out/<name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid points per axis; eps-derived parameters follow unless set explicitly.
    #[arg(long)]
    n: Option<usize>,
    /// Interface width.
    #[arg(long)]
    eps: Option<f64>,
    /// Run exactly this many iterations (disables the convergence stop).
    #[arg(long)]
    iters: Option<usize>,
    /// Initial phase field: zeros, ones, profile:<file.pfld> or objects:<ids>.
    #[arg(long)]
    seed_u: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    field: PathBuf,
    /// Config whose first curve defines the cylinder.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for coarea.csv (default: next to the field).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Half height of the inner cylinder.
    #[arg(long, default_value_t = 0.15)]
    half_height: f64,
    /// Dilation of the outer cylinder.
    #[arg(long, default_value_t = 1.3)]
    dilation: f64,
    /// Lower end of the level scan (default 2 c_eps).
    #[arg(long)]
    s_eps: Option<f64>,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_config_error() { 2 } else { 3 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { config, run } => {
            let cfg = RunConfig::read(&config).map_err(Failure::from)?;
            solve(cfg, &run)
        }
        Command::Geodesic { config, run } => {
            let cfg = RunConfig::read(&config).map_err(Failure::from)?;
            geodesic(cfg, &run)
        }
        Command::Inspect { field, level } => inspect(&field, level),
        Command::Analyze(args) => analyze(&args),
        Command::Preset { action } => match action {
            PresetAction::List => {
                for p in presets::PRESETS {
                    println!("{:<20} {}", p.name, p.summary);
                    println!("{:<20} expected: {}", "", p.expected);
                }
                Ok(())
            }
            PresetAction::Run { name, run } => solve(preset(&name)?.config(), &run),
            PresetAction::Export { name } => {
                print!("{}", preset(&name)?.config().to_text());
                Ok(())
            }
        },
    }
}

fn preset(name: &str) -> Result<&'static presets::Preset, Failure> {
    presets::find(name).ok_or_else(|| {
        let near = presets::suggestions(name);
        let hint = if near.is_empty() {
            "see `phasegeo preset list`".to_string()
        } else {
            format!("did you mean {}?", near.join(", "))
        };
        config_failure(format!("unknown preset `{name}`; {hint}"))
    })
}

fn apply_overrides(mut cfg: RunConfig, run: &RunArgs) -> Result<RunConfig, Failure> {
    if let Some(n) = run.n {
        cfg.n = n;
    }
    if let Some(eps) = run.eps {
        cfg.params.eps = Some(eps);
    }
    if let Some(iters) = run.iters {
        cfg.max_iters = iters;
        cfg.convergence_window = 0;
    }
    if let Some(seed) = &run.seed_u {
        cfg.seed_u = Some(parse_seed(seed, None).map_err(config_failure)?);
    }
    Ok(cfg)
}

fn out_dir(run: &RunArgs, cfg: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = run.out.clone().unwrap_or_else(|| Path::new("out").join(&cfg.name));
    fs::create_dir_all(&dir).map_err(|e| Failure {
        code: 3,
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    Ok(dir)
}

fn solve(cfg: RunConfig, run: &RunArgs) -> Result<(), Failure> {
    let cfg = apply_overrides(cfg, run)?;
    let problem = cfg.build()?;
    let dir = out_dir(run, &cfg)?;
    let mut manifest = RunManifest::new(cfg.to_text());
    let start = Instant::now();
    let every = problem.snapshot_every;
    let mut snapshots = Vec::new();
    let state = solver::solve_with(&problem, |info| {
        if every > 0 && (info.iteration + 1) % every == 0 {
            let path = dir.join(format!("u_{:06}.pfld", info.iteration + 1));
            io::write_field(&path, info.u)?;
            snapshots.push(path);
        }
        if info.recomputed {
            log::info!("iter {} {}", info.iteration, info.report);
        }
        Ok(())
    })?;
    for s in snapshots {
        manifest.add(s);
    }

    let energy = dir.join("energy.csv");
    io::write_energy_csv(&energy, &state.history)?;
    manifest.add(&energy);
    let field = dir.join("u_final.pfld");
    io::write_field(&field, &state.u)?;
    manifest.add(&field);
    write_geodesics(&dir, &state.geodesics, &mut manifest)?;

    let level = problem.params.level;
    let mesh = if state.u.min() < level && level < state.u.max() {
        extract_isosurface(&state.u, level)?
    } else {
        Default::default()
    };
    let obj = dir.join("surface.obj");
    if io::write_obj(&obj, &mesh)? == WriteStatus::Empty {
        eprintln!("warning: level {level} is not crossed; surface.obj is empty");
    }
    manifest.add(&obj);

    let last = state.last_energy().copied().unwrap_or_default();
    let mut summary = format!(
        "iterations = {}\nconverged = {}\nfinal_energy = {}\nmesh_measure = {}\ncomponents = {}\nclamp_events = {}\n",
        state.history.len(),
        state.converged,
        last.total,
        mesh.measure(),
        mesh.components().len(),
        state.clamp_events.len()
    );
    if problem.dim == 3 {
        let rims = solver::spanning_rims(&problem, &state.geodesics);
        summary.push_str(&format!("spanning_area = {}\n", mesh.spanning_area(&rims)));
    } else {
        let length = solver::network_length(&solver::paths(&state), 2.0 / problem.n as f64, 0.25 / problem.n as f64);
        summary.push_str(&format!("network_length = {length}\n"));
    }
    let summary_path = dir.join("summary.txt");
    fs::write(&summary_path, &summary).map_err(Error::from)?;
    manifest.add(&summary_path);
    print!("{summary}");

    record_timings(&mut manifest, &state.timings, start);
    manifest.write(&dir.join("manifest.txt"))?;
    Ok(())
}

fn record_timings(manifest: &mut RunManifest, t: &Timings, start: Instant) {
    manifest.phases.push(("fmm".into(), t.fmm));
    manifest.phases.push(("step".into(), t.step));
    manifest.phases.push(("rasterize".into(), t.rasterize));
    manifest.phases.push(("total".into(), start.elapsed()));
}

fn write_geodesics(dir: &Path, geodesics: &[Geodesic], manifest: &mut RunManifest) -> Result<(), Failure> {
    for (k, g) in geodesics.iter().enumerate() {
        let path = match g {
            Geodesic::Path(p) => {
                let path = dir.join(format!("geodesic_{k}.csv"));
                io::write_points_csv(&path, &p.points)?;
                path
            }
            Geodesic::Sweep(s) => {
                let path = dir.join(format!("sweep_{k}.obj"));
                io::write_sweep_obj(&path, s)?;
                path
            }
        };
        manifest.add(path);
    }
    Ok(())
}

fn geodesic(cfg: RunConfig, run: &RunArgs) -> Result<(), Failure> {
    let cfg = apply_overrides(cfg, run)?;
    let problem: ProblemConfig = cfg.build()?;
    let dir = out_dir(run, &cfg)?;
    let start = Instant::now();
    let mut manifest = RunManifest::new(cfg.to_text());
    let u = solver::seed_field(&problem)?;
    let mut timings = Timings::default();
    let geodesics = solver::compute_geodesics(&problem, &u, &mut timings)?;
    write_geodesics(&dir, &geodesics, &mut manifest)?;
    if let Some(pair) = problem.pairs.first() {
        let target = problem.object(pair.to).expect("validated");
        let metric = solver::geodesic_metric(&u, &problem.params, problem.model)?;
        let d = fast_march(&metric, &target.source_set())?;
        let path = dir.join("distance.pfld");
        io::write_field(&path, &d.to_field())?;
        manifest.add(path);
    }
    for (k, g) in geodesics.iter().enumerate() {
        let kind = if matches!(g, Geodesic::Path(_)) { "length" } else { "area" };
        println!("geodesic {k}: {kind} = {}", g.size());
    }
    record_timings(&mut manifest, &timings, start);
    manifest.write(&dir.join("manifest.txt"))?;
    Ok(())
}

fn inspect(path: &Path, level: Option<f64>) -> Result<(), Failure> {
    let f = io::read_field(path)?;
    let spec = f.spec();
    println!("dim = {}\nn = {}\nh = {}", spec.dim(), spec.n(), spec.h());
    println!("min = {}\nmax = {}", f.min(), f.max());
    println!("integral = {}", f.integral());
    if let Some(level) = level {
        let mesh = extract_isosurface(&f, level)?;
        println!("level = {level}\nmeasure = {}\ncomponents = {}", mesh.measure(), mesh.components().len());
    }
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let u = io::read_field(&args.field)?;
    let problem = RunConfig::read(&args.config)?.build()?;
    if u.spec() != problem.spec()? {
        return Err(config_failure(format!(
            "field grid {} does not match the config grid {}",
            u.spec(),
            problem.spec()?
        )));
    }
    let curve = problem
        .objects
        .iter()
        .find_map(|o| match &o.geometry {
            Geometry::Curve(c) => Some(c.clone()),
            Geometry::Point(_) => None,
        })
        .ok_or_else(|| config_failure("analyze needs a config with a boundary curve"))?;
    let pts = curve.samples();
    let m = pts.len() as f64;
    let center = [0, 1, 2].map(|a| pts.iter().map(|p| p[a]).sum::<f64>() / m);
    let radius = pts
        .iter()
        .map(|p| ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt())
        .sum::<f64>()
        / m;
    let graph = pts.iter().map(|p| p[2] - center[2]).collect();
    let geometry = CylinderGeometry::new(center, radius, args.half_height, args.dilation, graph)?;

    let params = &problem.params;
    let mut coarea = CoareaParams::new(params.eps, params.lambda);
    if let Some(s) = args.s_eps {
        coarea.s_eps = s;
    }
    let g = analysis::coarea_g(&u, problem.model);
    let scan = analysis::coarea_scan(&g, &coarea)?;
    let dir = match &args.out {
        Some(d) => d.clone(),
        None => args.field.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    fs::create_dir_all(&dir).map_err(Error::from)?;
    let rows: Vec<Vec<f64>> = scan.table.iter().map(|(t, p)| vec![*t, *p]).collect();
    io::write_table_csv(&dir.join("coarea.csv"), "t,perimeter", &rows)?;

    let spec = u.spec();
    let obstacle = analysis::mask_union(&analysis::sublevel_mask(&g, scan.t_eps), &geometry.sigma_mask(spec))?;
    let sep = analysis::separation_check(&geometry, &obstacle, spec)?;
    println!("s_eps = {}\nt_eps = {}", coarea.s_eps, scan.t_eps);
    println!("coarea_integral = {}\nmean_perimeter = {}", scan.integral(), scan.average());
    println!("separated = {}\ncomponents = {}\nstatus = {:?}", sep.separated, sep.components, sep.status);
    Ok(())
}
