//! Thin command-line front end over the distlab library.
//!
//! Exit codes: 0 success, 1 verdict failure, 2 usage/config error,
//! 3 resource cap exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use distlab::energy::{self, EnumLimits};
use distlab::geom::{delta_net, IfsSystem, Point, PointCloud};
use distlab::incidence::{self, IncidenceBound, PairTubeBox, RasterMode};
use distlab::measure::{
    box_dimension, frostman_exponent, l2_dimension, occupancy_series, DiscreteMeasure,
};
use distlab::recipes::{self, ExperimentConfig};
use distlab::rng::component_seed;

#[derive(Parser)]
#[command(name = "distlab", version, about = "Distance-set and tube-incidence experiments")]
struct Cli {
    /// Base seed for all randomized computations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for reports and tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Validate inputs and exit without computing.
    #[arg(long, global = true, default_value_t = false)]
    dry_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point cloud and write it as CSV.
    Generate(GenerateArgs),
    /// Dimension diagnostics of a cloud: box dimension, Frostman exponent
    /// and optionally the L2 dimension.
    Dimension(DimensionArgs),
    /// Tabulate gamma and the configuration dimension bound over an s-grid.
    Bounds(BoundsArgs),
    /// Group-energy report for a cloud: energy, comparison sum and chain
    /// ratio.
    Energy(EnergyArgs),
    /// Tube-incidence profiles for a named arrangement.
    Incidence(IncidenceArgs),
    /// Run a recipe from a flat key = value config file.
    Run { config: PathBuf },
    /// List registered recipes.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum CloudKind {
    /// Middle-thirds set on the line.
    Cantor3,
    /// Four-corner set in the unit square.
    Corner4,
    /// Uniform grid on the unit square.
    Grid,
    /// Equally spaced points on a circle.
    Circle,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    set: CloudKind,
    /// Generator depth (cantor3/corner4) or side/point count (grid/circle).
    #[arg(long, default_value_t = 4)]
    depth: u32,
    /// Output CSV path (defaults to <out>/cloud.csv).
    #[arg(long)]
    cloud_out: Option<PathBuf>,
}

#[derive(Args)]
struct DimensionArgs {
    /// Input cloud CSV.
    #[arg(long)]
    cloud: PathBuf,
    /// Number of dyadic scales probed.
    #[arg(long, default_value_t = 6)]
    levels: u32,
    /// Also estimate the L2 dimension by Monte Carlo.
    #[arg(long, default_value_t = false)]
    l2: bool,
    #[arg(long, default_value_t = 50_000)]
    samples: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 0.1)]
    s_min: f64,
    #[arg(long, default_value_t = 2.0)]
    s_max: f64,
    #[arg(long, default_value_t = 0.1)]
    s_step: f64,
}

#[derive(Args)]
struct EnergyArgs {
    /// Input cloud CSV.
    #[arg(long)]
    cloud: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 32)]
    g_samples: u64,
    /// Tuple samples used when enumeration exceeds the cap.
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArrangementKind {
    Bush3d,
    Bush2d,
    Random3d,
    Pairs,
}

#[derive(Args)]
struct IncidenceArgs {
    #[arg(long, value_enum)]
    config: ArrangementKind,
    #[arg(long, default_value_t = 0.0078125)]
    delta: f64,
    /// Tube count for random3d (bushes derive theirs from the separation).
    #[arg(long, default_value_t = 1024)]
    l: usize,
    /// Rasterization cell size (defaults to delta / 2).
    #[arg(long)]
    cell: Option<f64>,
    /// Radius inflation for union/intersection quantities.
    #[arg(long, default_value_t = 3.0)]
    inflate: f64,
    /// Bound to compare the profile against.
    #[arg(long, default_value = "weak")]
    bound: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = pool.install(|| dispatch(&cli));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> distlab::Result<ExitCode> {
    match &cli.command {
        Command::Generate(args) => generate(cli, args),
        Command::Dimension(args) => dimension(cli, args),
        Command::Bounds(args) => bounds(cli, args),
        Command::Energy(args) => energy_cmd(cli, args),
        Command::Incidence(args) => incidence_cmd(cli, args),
        Command::Run { config } => run_recipe(cli, config),
        Command::List => {
            for (name, description, required, claim) in recipes::list_recipes() {
                let req = if required.is_empty() {
                    String::from("-")
                } else {
                    required.join(",")
                };
                println!("{name}\t{description}\trequired: {req}\tclaim: {claim}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn build_cloud(kind: CloudKind, depth: u32) -> distlab::Result<PointCloud> {
    match kind {
        CloudKind::Cantor3 => IfsSystem::cantor_middle_thirds().generate(depth),
        CloudKind::Corner4 => IfsSystem::four_corner().generate(depth),
        CloudKind::Grid => {
            let side = depth.max(2) as usize;
            let mut pts = Vec::with_capacity(side * side);
            for i in 0..side {
                for j in 0..side {
                    pts.push(Point::new(&[
                        i as f64 / side as f64,
                        j as f64 / side as f64,
                    ])?);
                }
            }
            PointCloud::new(2, pts)
        }
        CloudKind::Circle => {
            let n = depth.max(3) as usize;
            let pts = (0..n)
                .map(|i| {
                    let t = i as f64 / n as f64 * std::f64::consts::TAU;
                    Point::new(&[0.5 * t.cos(), 0.5 * t.sin()])
                })
                .collect::<distlab::Result<Vec<_>>>()?;
            PointCloud::new(2, pts)
        }
    }
}

fn generate(cli: &Cli, args: &GenerateArgs) -> distlab::Result<ExitCode> {
    if cli.dry_run {
        return Ok(ExitCode::SUCCESS);
    }
    let cloud = build_cloud(args.set, args.depth)?;
    let path = args
        .cloud_out
        .clone()
        .unwrap_or_else(|| cli.out.join("cloud.csv"));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, cloud.to_csv())?;
    println!("wrote {} points to {}", cloud.len(), path.display());
    Ok(ExitCode::SUCCESS)
}

fn dimension(cli: &Cli, args: &DimensionArgs) -> distlab::Result<ExitCode> {
    let cloud = PointCloud::from_csv(&std::fs::read_to_string(&args.cloud)?)?;
    if cli.dry_run {
        return Ok(ExitCode::SUCCESS);
    }
    let scales: Vec<f64> = (1..=args.levels as i32).map(|j| 2f64.powi(-j)).collect();
    let series = occupancy_series(&cloud, &scales)?;
    let boxd = box_dimension(&series)?;
    std::fs::create_dir_all(&cli.out)?;
    std::fs::write(cli.out.join("occupancy.csv"), series.to_csv())?;
    println!("box_dimension = {boxd}");
    let m = DiscreteMeasure::uniform(cloud)?;
    let radii: Vec<f64> = (1..=args.levels as i32).map(|j| 2f64.powi(-j)).collect();
    let frost = frostman_exponent(&m, &radii)?;
    println!("frostman_exponent = {frost}");
    if args.l2 {
        let l2 = l2_dimension(&m, &[4.0, 8.0, 16.0], args.samples, cli.seed)?;
        println!("l2_dimension = {l2}");
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds(cli: &Cli, args: &BoundsArgs) -> distlab::Result<ExitCode> {
    if cli.dry_run {
        distlab::bounds::gamma_s(args.n, (args.s_min).min(args.n as f64).max(1e-9))?;
        return Ok(ExitCode::SUCCESS);
    }
    print!("n,k,s,gamma,bound,lebesgue_positive\n");
    let mut s = args.s_min;
    while s <= args.s_max.min(args.n as f64) + 1e-12 {
        let sc = s.min(args.n as f64);
        let g = distlab::bounds::gamma_s(args.n, sc)?;
        let rep = distlab::bounds::config_dim_bound(args.n, args.k, sc)?;
        println!("{},{},{sc},{g},{},{}", args.n, args.k, rep.value, rep.lebesgue_positive);
        s += args.s_step;
    }
    Ok(ExitCode::SUCCESS)
}

fn energy_cmd(cli: &Cli, args: &EnergyArgs) -> distlab::Result<ExitCode> {
    let cloud = PointCloud::from_csv(&std::fs::read_to_string(&args.cloud)?)?;
    if cli.dry_run {
        return Ok(ExitCode::SUCCESS);
    }
    let m = DiscreteMeasure::uniform(cloud)?;
    let limits = EnumLimits {
        cap: energy::DEFAULT_TUPLE_CAP,
        samples: Some(args.samples),
        seed: component_seed(cli.seed, "energy-tuples"),
    };
    let mut rng = distlab::rng::stream(component_seed(cli.seed, "energy-g"), 0);
    let g = distlab::geom::RigidMotion::haar_orthogonal(m.dim(), &mut rng);
    let e = energy::group_energy(&m, &g, args.k, args.delta, &limits)?;
    let rhs = energy::energy_rhs(&m, &g, args.k, args.delta)?;
    let chain = energy::chain_ratio(&m, args.k, args.delta, args.g_samples, cli.seed, &limits)?;
    let report = energy::EnergyReport {
        energy: e.value,
        rhs,
        lemma52_holds: e.value <= rhs + 1e-12,
        chain_ratio: chain,
    };
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::create_dir_all(&cli.out)?;
    std::fs::write(cli.out.join("energy.json"), &json)?;
    println!("{json}");
    if report.lemma52_holds {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn incidence_cmd(cli: &Cli, args: &IncidenceArgs) -> distlab::Result<ExitCode> {
    let bound = IncidenceBound::parse(&args.bound)?;
    if cli.dry_run {
        return Ok(ExitCode::SUCCESS);
    }
    let cell = args.cell.unwrap_or(args.delta / 2.0);
    let fam = match args.config {
        ArrangementKind::Bush3d => incidence::bush_3d(args.delta, 10.0)?,
        ArrangementKind::Bush2d => incidence::bush_2d(args.delta, 10.0)?,
        ArrangementKind::Random3d => {
            incidence::random_family_3d(args.delta, args.l, component_seed(cli.seed, "random3d"))?
        }
        ArrangementKind::Pairs => {
            let arc = |cx: f64, cy: f64, r: f64, phase: f64| -> distlab::Result<PointCloud> {
                let pts = (0..400)
                    .map(|i| {
                        let t = phase + i as f64 / 400.0 * std::f64::consts::PI;
                        Point::new(&[cx + r * t.cos(), cy + r * t.sin()])
                    })
                    .collect::<distlab::Result<Vec<_>>>()?;
                PointCloud::new(2, pts)
            };
            let f1 = delta_net(&arc(0.0, 0.0, 0.2, 0.0)?, args.delta)?;
            let f2 = delta_net(&arc(0.9, 0.04, 0.16, 0.35)?, args.delta)?;
            incidence::build_pair_tubes(&f1, &f2, args.delta, PairTubeBox::default())?
        }
    };
    let mut rs = vec![];
    let mut r = 1u64;
    while r <= fam.len() as u64 * 2 {
        rs.push(r);
        r *= 2;
    }
    let profile = incidence::rich_profile(&fam, cell, &rs, RasterMode::Dense)?;
    let csv = profile.to_csv_with_bound(|r| {
        incidence::bound_value(bound, args.delta, fam.len(), r)
    });
    let fitted = incidence::fit_richness_exponent(&profile).unwrap_or(f64::NAN);
    let max_ratio = incidence::verify_bound(&profile, bound).unwrap_or(f64::NAN);
    let union = incidence::union_volume(&fam, cell, args.inflate, RasterMode::Dense)?;
    let summary = serde_json::json!({
        "L": fam.len(),
        "delta": args.delta,
        "fitted_exponent": fitted,
        "max_ratio": max_ratio,
        "union_volume_inflated": union,
    });
    std::fs::create_dir_all(&cli.out)?;
    std::fs::write(cli.out.join("incidence_profile.csv"), &csv)?;
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(cli.out.join("incidence_summary.json"), &json)?;
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

fn run_recipe(cli: &Cli, config_path: &PathBuf) -> distlab::Result<ExitCode> {
    let mut config = ExperimentConfig::from_file(config_path, &cli.out)?;
    if cli.seed != 0 {
        config.seed = cli.seed;
    }
    if cli.dry_run {
        recipes::validate(&config)?;
        println!("config ok: recipe {}", config.recipe);
        return Ok(ExitCode::SUCCESS);
    }
    let report = recipes::run(&config)?;
    for v in &report.verdicts {
        println!(
            "[{}] {} = {} ({})",
            if v.pass { "pass" } else { "FAIL" },
            v.name,
            v.value,
            v.tolerance
        );
    }
    println!(
        "report: {} ({} tables, {:.2}s)",
        config.out_dir.join("report.json").display(),
        report.tables.len(),
        report.elapsed_seconds
    );
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
