use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

use crackgen_core::embed::{embed_crack, GrayStats};
use crackgen_core::graph_paths::boundary_cycle_with_paths;
use crackgen_core::ip_solver::BinaryProgram;
use crackgen_core::mesh;
use crackgen_core::minsurf::{min_weight_surface_with, msp_as_ip};
use crackgen_core::pipeline::{
    export_figure_assets, figure_grid_configs, run_pipeline, write_outputs, Background,
    FailureKind, PipelineConfig, PipelineError,
};
use crackgen_core::raster::RasterError;
use crackgen_core::voronoi::{assign_weights, build_bounded_voronoi_with, extract_complex, VoronoiOptions};
use crackgen_core::{BinaryVolume, GrayVolume};

#[derive(Parser)]
#[command(name = "crackgen", version, about = "Minimum-weight Voronoi surfaces and synthetic crack volumes")]
struct Cli {
    /// Worker threads (0 = all cores). Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Pipeline config (JSON), or a provenance record from an earlier run.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Overrides the generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the dilation probability.
    #[arg(long)]
    dilation_p: Option<f64>,
    /// Overrides the median radius (0 disables).
    #[arg(long)]
    median_radius: Option<usize>,
    /// Overrides the embedding Gaussian sigma.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the generator pattern.
    Sample(Common),
    /// Build the bounded diagram and its cell complex.
    Voronoi(Common),
    /// Compute the boundary cycle.
    Cycle(Common),
    /// Solve for the minimum-weight surface.
    Minsurf {
        #[command(flatten)]
        common: Common,
        /// Also write the 0/1 program in LP format.
        #[arg(long)]
        lp: bool,
    },
    /// Geometry plus voxel stages up to the ground truth.
    Raster {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        keep_intermediates: bool,
    },
    /// Embed an existing ground truth volume into the configured background.
    Embed {
        #[command(flatten)]
        common: Common,
        /// Stem of the binary ground truth (`<stem>.raw` + `<stem>.json`).
        #[arg(long)]
        gt: PathBuf,
    },
    /// Run every stage.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        keep_intermediates: bool,
        /// Run N times with seeds seed, seed+1, … into out/run_XXX.
        #[arg(long, default_value_t = 1)]
        repeat: u64,
    },
    /// Write OBJ meshes of the diagram, cycle and surface(s).
    Export {
        #[command(flatten)]
        common: Common,
        /// Export the twelve-model comparison grid instead of the configured model.
        #[arg(long)]
        grid: bool,
    },
}

struct CliError {
    code: u8,
    msg: String,
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let code = match e.kind() {
            FailureKind::Config => 2,
            FailureKind::Infeasible => 3,
            FailureKind::Io => 4,
            FailureKind::Internal => 1,
        };
        CliError { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: 4, msg: e.to_string() }
    }
}

impl From<RasterError> for CliError {
    fn from(e: RasterError) -> Self {
        PipelineError::from(e).into()
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { code: 1, msg: e.to_string() }
    }
}

type CliResult = Result<(), CliError>;

fn load(c: &Common) -> Result<PipelineConfig, CliError> {
    let mut cfg = PipelineConfig::from_file(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(p) = c.dilation_p {
        cfg.dilation.p = p;
    }
    if let Some(r) = c.median_radius {
        cfg.median_radius = r;
    }
    if let Some(s) = c.sigma {
        match cfg.embedding.as_mut() {
            Some(e) => e.sigma = s,
            None => return Err(CliError { code: 2, msg: "--sigma given but the config has no embedding".into() }),
        }
    }
    cfg.validate()?;
    fs::create_dir_all(&c.out)?;
    Ok(cfg)
}

fn write(dir: &Path, name: &str, body: impl AsRef<[u8]>) -> CliResult {
    let p = dir.join(name);
    fs::write(&p, body)?;
    info!("wrote {}", p.display());
    Ok(())
}

fn complex_of(cfg: &PipelineConfig) -> Result<crackgen_core::CellComplex, CliError> {
    let pattern = cfg.pattern()?;
    let opts = VoronoiOptions { eps_rel: cfg.eps_rel };
    let cells = build_bounded_voronoi_with(&pattern, &cfg.cuboid, &opts).map_err(PipelineError::from)?;
    let k = extract_complex(&cells, opts.eps(&cfg.cuboid)).map_err(PipelineError::from)?;
    Ok(assign_weights(k, cfg.weights.arc, cfg.weights.facet).map_err(PipelineError::from)?)
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Command::Sample(c) => {
            let cfg = load(&c)?;
            let p = cfg.pattern()?;
            let mut csv = Vec::new();
            p.write_csv(&mut csv)?;
            write(&c.out, "points.csv", csv)?;
            write(&c.out, "points.json", serde_json::to_string_pretty(&p.sidecar())? + "\n")?;
            println!("{} points", p.len());
        }
        Command::Voronoi(c) => {
            let cfg = load(&c)?;
            let k = complex_of(&cfg)?;
            write(&c.out, "complex.txt", k.to_text())?;
            write(&c.out, "wireframe.obj", mesh::wireframe_obj(&k))?;
            write(&c.out, "facets.obj", mesh::complex_facets_obj(&k))?;
            println!(
                "V={} E={} F={} C={} euler={}",
                k.vertices.len(),
                k.arcs.len(),
                k.facets.len(),
                k.cells.len(),
                k.euler_characteristic()
            );
        }
        Command::Cycle(c) => {
            let cfg = load(&c)?;
            let k = complex_of(&cfg)?;
            let (h, paths) = boundary_cycle_with_paths(&k, &cfg.cuboid, cfg.cycle_heights).map_err(PipelineError::from)?;
            write(&c.out, "cycle.json", serde_json::to_string_pretty(&h)? + "\n")?;
            write(&c.out, "cycle.obj", mesh::cycle_obj(&k, &h))?;
            let legs: Vec<f64> = paths.iter().map(|p| p.weight).collect();
            println!("cycle: {} arcs, weight {}, legs {:?}", h.len(), h.weight(&k), legs);
        }
        Command::Minsurf { common: c, lp } => {
            let cfg = load(&c)?;
            let k = complex_of(&cfg)?;
            let h = crackgen_core::boundary_cycle(&k, &cfg.cuboid, cfg.cycle_heights).map_err(PipelineError::from)?;
            if lp {
                let prog: BinaryProgram =
                    msp_as_ip(&k, &h).map_err(|source| PipelineError::Surface { which: "main", source })?;
                write(&c.out, "surface.lp", prog.to_lp_string())?;
            }
            let (s, st) = min_weight_surface_with(&k, &h, &cfg.solver)
                .map_err(|source| PipelineError::Surface { which: "main", source })?;
            write(&c.out, "surface.obj", mesh::surface_obj(&k, &s))?;
            let rec = json!({"objective": s.weight, "facets": s.facets, "solver": st});
            write(&c.out, "surface.json", serde_json::to_string_pretty(&rec)? + "\n")?;
            println!("surface: {} facets, objective {}, {} nodes", s.facets.len(), s.weight, st.node_count);
        }
        Command::Raster { common: c, keep_intermediates } => {
            let mut cfg = load(&c)?;
            cfg.embedding = None;
            if !cfg.rasterize {
                return Err(CliError { code: 2, msg: "config has rasterize = false".into() });
            }
            let out = run_pipeline(&cfg)?;
            write_outputs(&out, &c.out, keep_intermediates)?;
            let gt = out.raster.gt.as_ref().expect("rasterized");
            println!("gt {:?}: {} foreground voxels", gt.dims(), gt.foreground());
        }
        Command::Embed { common: c, gt } => {
            let cfg = load(&c)?;
            let Some(e) = cfg.embedding.clone() else {
                return Err(CliError { code: 2, msg: "config has no embedding section".into() });
            };
            let (gt, _) = BinaryVolume::read_files(&gt)?;
            let (patch, air) = match &e.background {
                Background::Synthetic { mean, noise } => {
                    let patch = crackgen_core::embed::synthetic_background(gt.dims(), *mean, *noise, e.seed)
                        .map_err(PipelineError::from)?;
                    let a = e.air.expect("validated");
                    (patch, GrayStats::manual(a.mean, a.std))
                }
                Background::Patch { stem, pore_threshold } => {
                    let (patch, _) = GrayVolume::read_files(stem)?;
                    let air = match (e.air, pore_threshold) {
                        (Some(a), _) => GrayStats::manual(a.mean, a.std),
                        (None, Some(t)) => crackgen_core::embed::estimate_pore_stats(
                            &patch,
                            &crackgen_core::embed::threshold_mask(&patch, *t),
                        )
                        .map_err(PipelineError::from)?,
                        (None, None) => unreachable!("validated"),
                    };
                    (patch, air)
                }
            };
            let img = embed_crack(&patch, &gt, &air, e.sigma, e.seed).map_err(PipelineError::from)?;
            img.write_files(&c.out.join("image"), 1.0, Some(json!({"seed": e.seed, "air": air})))?;
            println!("embedded {} crack voxels (air mean {}, std {})", gt.foreground(), air.mean, air.std);
        }
        Command::Pipeline { common: c, keep_intermediates, repeat } => {
            let cfg = load(&c)?;
            for i in 0..repeat.max(1) {
                let mut run_cfg = cfg.clone();
                run_cfg.seed = cfg.seed.wrapping_add(i);
                let dir = if repeat > 1 { c.out.join(format!("run_{i:03}")) } else { c.out.clone() };
                let out = run_pipeline(&run_cfg)?;
                write_outputs(&out, &dir, keep_intermediates)?;
                println!(
                    "{}: objective {}, {} facets{}",
                    dir.display(),
                    out.geometry.surface.weight,
                    out.geometry.surface.facets.len(),
                    out.raster.gt.as_ref().map(|g| format!(", {} crack voxels", g.foreground())).unwrap_or_default()
                );
            }
        }
        Command::Export { common: c, grid } => {
            let cfg = load(&c)?;
            if grid {
                for (name, gcfg) in figure_grid_configs(cfg.seed) {
                    let (g, _) = export_figure_assets(&gcfg, &c.out.join(&name))?;
                    println!("{name}: {} facets, objective {}", g.surface.facets.len(), g.surface.weight);
                }
            } else {
                let (g, files) = export_figure_assets(&cfg, &c.out)?;
                println!("{} files, surface {} facets", files.len(), g.surface.facets.len());
                if g.branch.is_some() {
                    println!("shared facets: {:?}", g.shared_facets());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crackgen_core::ip_solver::SolverError;
    use crackgen_core::minsurf::SurfaceError;

    #[test]
    fn failure_classes_map_to_exit_codes() {
        let limit = PipelineError::Surface { which: "main", source: SurfaceError::Solver(SolverError::NodeLimit(5)) };
        assert_eq!(CliError::from(limit).code, 3);
        assert_eq!(CliError::from(PipelineError::Surface { which: "branch", source: SurfaceError::Infeasible }).code, 3);
        assert_eq!(CliError::from(PipelineError::Config("x".into())).code, 2);
        assert_eq!(CliError::from(std::io::Error::other("x")).code, 4);
    }
}
