//! Config-driven end-to-end driver and figure/mesh exporters.
//!
//! Stage order: sample → voronoi → complex → weights → cycle → minsurf →
//! rasterize → dilate → microstructure → branch union → median → embed.
//! At raster time one world unit is one voxel, so the cuboid extents double
//! as voxel counts.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use glam::DVec3;
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::embed::{embed_crack, estimate_pore_stats, synthetic_background, threshold_mask, EmbedError, GrayStats};
use crate::geometry::Cuboid;
use crate::graph_paths::{boundary_cycle, Cycle, PathError};
use crate::ip_solver::{SolveOptions, SolverError};
use crate::mesh;
use crate::minsurf::{min_weight_surface_with, Surface, SurfaceError, SurfaceStats};
use crate::point_process::{PointModel, PointPattern, SampleError};
use crate::raster::{
    adaptive_dilate, apply_microstructure_in, median_filter_binary, rasterize_labels, rasterize_surface, surface_pairs,
    union_branching, BinaryVolume, DilationSpec, GrayVolume, LabelVolume, RasterError,
};
use crate::voronoi::{
    assign_weights, build_bounded_voronoi_with, extract_complex, ArcWeight, CellComplex, FacetWeight, VoronoiCell,
    VoronoiError, VoronoiOptions,
};

pub const MIN_RASTER_DIM: usize = 8;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("sample: {0}")]
    Sample(#[from] SampleError),
    #[error("voronoi: {0}")]
    Voronoi(#[from] VoronoiError),
    #[error("cycle: {0}")]
    Cycle(#[from] PathError),
    #[error("minsurf ({which}): {source}")]
    Surface {
        which: &'static str,
        #[source]
        source: SurfaceError,
    },
    #[error("raster: {0}")]
    Raster(#[from] RasterError),
    #[error("embed: {0}")]
    Embed(#[from] EmbedError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse failure classes, one per CLI exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    Config,
    Infeasible,
    Io,
    Internal,
}

impl PipelineError {
    pub fn kind(&self) -> FailureKind {
        match self {
            PipelineError::Config(_) | PipelineError::Json(_) => FailureKind::Config,
            PipelineError::Sample(SampleError::InvalidParameter(_) | SampleError::Parse { .. } | SampleError::Json(_)) => {
                FailureKind::Config
            }
            PipelineError::Sample(SampleError::NonConvergence { .. }) => FailureKind::Infeasible,
            PipelineError::Sample(SampleError::Io(_)) | PipelineError::Io(_) => FailureKind::Io,
            PipelineError::Surface { source, .. } => match source {
                SurfaceError::InvalidCycle(_) => FailureKind::Internal,
                SurfaceError::Infeasible | SurfaceError::Solver(SolverError::Infeasible | SolverError::NodeLimit(_)) => {
                    FailureKind::Infeasible
                }
                SurfaceError::Solver(_) => FailureKind::Internal,
            },
            PipelineError::Cycle(PathError::MissingEdgeVertex(_) | PathError::DegenerateCycle(_)) => FailureKind::Infeasible,
            PipelineError::Voronoi(VoronoiError::EmptyPattern | VoronoiError::DegenerateInput(..) | VoronoiError::OutsideCuboid(_)) => {
                FailureKind::Config
            }
            PipelineError::Raster(RasterError::Io(_)) => FailureKind::Io,
            PipelineError::Raster(RasterError::InvalidParameter(_) | RasterError::DimensionMismatch(..) | RasterError::Format(_)) => {
                FailureKind::Config
            }
            PipelineError::Embed(EmbedError::InvalidParameter(_) | EmbedError::DimensionMismatch(..)) => FailureKind::Config,
            PipelineError::Embed(EmbedError::InsufficientSamples(_)) => FailureKind::Config,
            _ => FailureKind::Internal,
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, PipelineError> {
    Err(PipelineError::Config(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub arc: ArcWeight,
    pub facet: FacetWeight,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { arc: ArcWeight::Unit, facet: FacetWeight::Unit }
    }
}

/// Second cycle whose surface is OR-ed into the first one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchConfig {
    pub cycle_heights: [f64; 4],
    /// Whether the branch raster goes through adaptive dilation as well.
    #[serde(default)]
    pub dilate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicrostructureConfig {
    /// Intensity of the fine diagram, in the same units as the generator intensity.
    pub fine_lambda: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterOrder {
    /// Median after the branch union.
    #[default]
    MedianLast,
    /// Median on the main crack before the branch is added.
    MedianBeforeUnion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Background {
    /// Flat grayvalue plus white noise.
    Synthetic { mean: f64, noise: f64 },
    /// A stored gray volume (`<stem>.raw` + `<stem>.json`) whose dims match the raster.
    Patch { stem: PathBuf, pore_threshold: Option<u16> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AirStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub background: Background,
    /// Crack grayvalue distribution; estimated from pores when absent.
    #[serde(default)]
    pub air: Option<AirStats>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub seed: u64,
}

fn default_sigma() -> f64 {
    0.7
}

fn default_heights() -> [f64; 4] {
    [0.5; 4]
}

fn default_true() -> bool {
    true
}

fn default_median() -> usize {
    1
}

fn default_eps_rel() -> f64 {
    VoronoiOptions::default().eps_rel
}

fn default_dilation() -> DilationSpec {
    DilationSpec { p: 0.0, seed: 0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub cuboid: Cuboid,
    pub process: PointModel,
    pub seed: u64,
    /// Generator coordinates for the `explicit` model.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<[f64; 3]>,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default = "default_heights")]
    pub cycle_heights: [f64; 4],
    #[serde(default)]
    pub branch: Option<BranchConfig>,
    /// Geometry-only runs skip every voxel stage.
    #[serde(default = "default_true")]
    pub rasterize: bool,
    #[serde(default = "default_dilation")]
    pub dilation: DilationSpec,
    #[serde(default)]
    pub microstructure: Option<MicrostructureConfig>,
    /// 0 disables the median filter.
    #[serde(default = "default_median")]
    pub median_radius: usize,
    #[serde(default)]
    pub filter_order: FilterOrder,
    #[serde(default)]
    pub embedding: Option<EmbeddingConfig>,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
    #[serde(default)]
    pub solver: SolveOptions,
}

impl PipelineConfig {
    /// Minimal config: Poisson generators, unit weights, mid-height cycle, no voxel stages.
    pub fn geometry_only(cuboid: Cuboid, process: PointModel, seed: u64) -> Self {
        PipelineConfig {
            cuboid,
            process,
            seed,
            generators: Vec::new(),
            weights: Weights::default(),
            cycle_heights: default_heights(),
            branch: None,
            rasterize: false,
            dilation: default_dilation(),
            microstructure: None,
            median_radius: default_median(),
            filter_order: FilterOrder::default(),
            embedding: None,
            eps_rel: default_eps_rel(),
            solver: SolveOptions::default(),
        }
    }

    /// Parses a config, or the `config` member of a provenance record.
    pub fn from_json_str(text: &str) -> Result<Self, PipelineError> {
        let v: Value = serde_json::from_str(text)?;
        let v = match v.get("config") {
            Some(inner) if v.get("crackgen_version").is_some() => inner.clone(),
            _ => v,
        };
        let cfg: PipelineConfig = serde_json::from_value(v)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &FsPath) -> Result<Self, PipelineError> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Voxel counts per axis (cuboid extents rounded).
    pub fn dims(&self) -> [usize; 3] {
        let c = &self.cuboid;
        [c.d1.round() as usize, c.d2.round() as usize, c.d3.round() as usize]
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let c = &self.cuboid;
        if Cuboid::new(c.d1, c.d2, c.d3).is_none() {
            return config_err(format!("cuboid extents must be positive and finite, got {c:?}"));
        }
        let heights = std::iter::once(&self.cycle_heights).chain(self.branch.as_ref().map(|b| &b.cycle_heights));
        for h in heights {
            if h.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return config_err(format!("cycle heights {h:?} must lie in [0, 1]"));
            }
        }
        match self.process {
            PointModel::Explicit if self.generators.is_empty() => return config_err("explicit model needs `generators`"),
            PointModel::Explicit => {}
            _ if !self.generators.is_empty() => return config_err("`generators` is only valid with the explicit model"),
            _ => {}
        }
        if !(self.eps_rel > 0.0 && self.eps_rel < 1e-3) {
            return config_err(format!("eps_rel = {} out of range", self.eps_rel));
        }
        if self.solver.max_nodes == 0 {
            return config_err("solver.max_nodes must be positive");
        }
        if !self.rasterize {
            return Ok(());
        }
        for (axis, (v, d)) in [c.d1, c.d2, c.d3].into_iter().zip(self.dims()).enumerate() {
            if (v - d as f64).abs() > 1e-9 {
                return config_err(format!("cuboid extent {v} on axis {axis} is not a whole number of voxels"));
            }
            if d < MIN_RASTER_DIM {
                return config_err(format!("raster needs at least {MIN_RASTER_DIM} voxels per axis, axis {axis} has {d}"));
            }
        }
        self.dilation.validate()?;
        if let Some(m) = &self.microstructure {
            if !(m.fine_lambda > 0.0 && m.fine_lambda.is_finite()) {
                return config_err(format!("microstructure.fine_lambda = {} must be positive", m.fine_lambda));
            }
        }
        if let Some(e) = &self.embedding {
            if !(e.sigma >= 0.0 && e.sigma.is_finite()) {
                return config_err(format!("embedding.sigma = {} must be non-negative", e.sigma));
            }
            if let Some(a) = e.air {
                if !(a.std >= 0.0 && a.mean.is_finite()) {
                    return config_err(format!("embedding.air {a:?} invalid"));
                }
            }
            match &e.background {
                Background::Synthetic { noise, .. } if !(*noise >= 0.0) => {
                    return config_err("synthetic background noise must be non-negative")
                }
                Background::Synthetic { .. } if e.air.is_none() => {
                    return config_err("a synthetic background needs explicit `air` stats")
                }
                Background::Patch { pore_threshold: None, .. } if e.air.is_none() => {
                    return config_err("a patch background needs `pore_threshold` or explicit `air` stats")
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn pattern(&self) -> Result<PointPattern, PipelineError> {
        Ok(match self.process {
            PointModel::Explicit => {
                let pts = self.generators.iter().map(|&p| DVec3::from_array(p)).collect();
                PointPattern { points: pts, cuboid: self.cuboid, model: PointModel::Explicit, seed: self.seed }
            }
            ref m => m.sample(&self.cuboid, self.seed)?,
        })
    }
}

/// Everything up to the minimum-weight surface(s).
#[derive(Clone, Debug)]
pub struct GeometryOutput {
    pub pattern: PointPattern,
    pub cells: Vec<VoronoiCell>,
    pub complex: CellComplex,
    pub cycle: Cycle,
    pub surface: Surface,
    pub stats: SurfaceStats,
    pub branch: Option<(Cycle, Surface, SurfaceStats)>,
}

impl GeometryOutput {
    /// Facet ids present in both the main and the branch surface.
    pub fn shared_facets(&self) -> Vec<usize> {
        let Some((_, b, _)) = &self.branch else { return Vec::new() };
        let main: BTreeSet<usize> = self.surface.facets.iter().map(|&(f, _)| f).collect();
        let other: BTreeSet<usize> = b.facets.iter().map(|&(f, _)| f).collect();
        main.intersection(&other).copied().collect()
    }
}

/// Voxel results. Intermediates are kept in stage order.
#[derive(Clone, Debug, Default)]
pub struct RasterOutput {
    pub labels: Option<LabelVolume>,
    pub gt: Option<BinaryVolume>,
    pub image: Option<GrayVolume>,
    pub air: Option<GrayStats>,
    pub intermediates: Vec<(String, BinaryVolume)>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub config: PipelineConfig,
    pub geometry: GeometryOutput,
    pub raster: RasterOutput,
    pub provenance: Value,
}

pub fn run_geometry(cfg: &PipelineConfig) -> Result<GeometryOutput, PipelineError> {
    cfg.validate()?;
    let q = cfg.cuboid;
    let pattern = cfg.pattern()?;
    info!("sampled {} generators", pattern.len());
    let vopts = VoronoiOptions { eps_rel: cfg.eps_rel };
    let cells = build_bounded_voronoi_with(&pattern, &q, &vopts)?;
    let complex = extract_complex(&cells, vopts.eps(&q))?;
    let complex = assign_weights(complex, cfg.weights.arc, cfg.weights.facet)?;
    info!(
        "complex: {} vertices, {} arcs, {} facets, {} cells",
        complex.vertices.len(),
        complex.arcs.len(),
        complex.facets.len(),
        complex.cells.len()
    );
    let cycle = boundary_cycle(&complex, &q, cfg.cycle_heights)?;
    let (surface, stats) =
        min_weight_surface_with(&complex, &cycle, &cfg.solver).map_err(|source| PipelineError::Surface { which: "main", source })?;
    info!("surface: {} facets, weight {}", surface.facets.len(), surface.weight);
    let branch = match &cfg.branch {
        None => None,
        Some(b) => {
            let h = boundary_cycle(&complex, &q, b.cycle_heights)?;
            let (s, st) =
                min_weight_surface_with(&complex, &h, &cfg.solver).map_err(|source| PipelineError::Surface { which: "branch", source })?;
            Some((h, s, st))
        }
    };
    Ok(GeometryOutput { pattern, cells, complex, cycle, surface, stats, branch })
}

/// Rasterizes the surface(s) and applies dilation, microstructure, union, median and embedding.
pub fn run_raster(cfg: &PipelineConfig, g: &GeometryOutput) -> Result<RasterOutput, PipelineError> {
    let mut out = RasterOutput::default();
    if !cfg.rasterize {
        return Ok(out);
    }
    let dims = cfg.dims();
    let q = cfg.cuboid;
    let labels = rasterize_labels(&g.cells, &q, dims);
    let raw = rasterize_surface(&labels, &surface_pairs(&g.complex, &g.surface));
    let shaped = shape(cfg, &q, raw, "main", true, &mut out.intermediates)?;
    let mut j = shaped;
    if let Some((_, bs, _)) = &g.branch {
        let braw = rasterize_surface(&labels, &surface_pairs(&g.complex, bs));
        let dilate = cfg.branch.as_ref().is_some_and(|b| b.dilate);
        let bj = shape(cfg, &q, braw, "branch", dilate, &mut out.intermediates)?;
        if cfg.filter_order == FilterOrder::MedianBeforeUnion {
            j = median(cfg, j, "main", &mut out.intermediates)?;
        }
        j = union_branching(&j, &bj)?;
        out.intermediates.push(("union".into(), j.clone()));
        if cfg.filter_order == FilterOrder::MedianLast {
            j = median(cfg, j, "union", &mut out.intermediates)?;
        }
    } else {
        j = median(cfg, j, "main", &mut out.intermediates)?;
    }
    if let Some(e) = &cfg.embedding {
        let (patch, air) = background(e, dims)?;
        out.image = Some(embed_crack(&patch, &j, &air, e.sigma, e.seed)?);
        out.air = Some(air);
    }
    out.labels = Some(labels);
    out.gt = Some(j);
    Ok(out)
}

fn shape(
    cfg: &PipelineConfig,
    q: &Cuboid,
    raw: BinaryVolume,
    tag: &str,
    dilate: bool,
    keep: &mut Vec<(String, BinaryVolume)>,
) -> Result<BinaryVolume, PipelineError> {
    keep.push((format!("{tag}_raster"), raw.clone()));
    let mut j = raw;
    if dilate && cfg.dilation.p > 0.0 {
        j = adaptive_dilate(&j, &cfg.dilation)?;
        keep.push((format!("{tag}_dilated"), j.clone()));
    }
    if let Some(m) = &cfg.microstructure {
        j = apply_microstructure_in(&j, q, m.fine_lambda, m.seed)?;
        keep.push((format!("{tag}_micro"), j.clone()));
    }
    Ok(j)
}

fn median(cfg: &PipelineConfig, j: BinaryVolume, tag: &str, keep: &mut Vec<(String, BinaryVolume)>) -> Result<BinaryVolume, PipelineError> {
    if cfg.median_radius == 0 {
        return Ok(j);
    }
    let m = median_filter_binary(&j, cfg.median_radius)?;
    keep.push((format!("{tag}_median"), m.clone()));
    Ok(m)
}

fn background(e: &EmbeddingConfig, dims: [usize; 3]) -> Result<(GrayVolume, GrayStats), PipelineError> {
    let manual = e.air.map(|a| GrayStats::manual(a.mean, a.std));
    match &e.background {
        Background::Synthetic { mean, noise } => {
            let patch = synthetic_background(dims, *mean, *noise, e.seed)?;
            Ok((patch, manual.expect("validated")))
        }
        Background::Patch { stem, pore_threshold } => {
            let (patch, _) = GrayVolume::read_files(stem)?;
            if patch.dims() != dims {
                return Err(RasterError::DimensionMismatch(patch.dims(), dims).into());
            }
            let air = match (manual, pore_threshold) {
                (Some(a), _) => a,
                (None, Some(t)) => estimate_pore_stats(&patch, &threshold_mask(&patch, *t))?,
                (None, None) => unreachable!("validated"),
            };
            Ok((patch, air))
        }
    }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    let geometry = run_geometry(cfg)?;
    let raster = run_raster(cfg, &geometry)?;
    let provenance = provenance(cfg, &geometry, &raster);
    Ok(PipelineOutput { config: cfg.clone(), geometry, raster, provenance })
}

fn surface_record(h: &Cycle, s: &Surface, st: &SurfaceStats) -> Value {
    json!({
        "cycle_vertices": h.vertices,
        "cycle_arcs": h.len(),
        "objective": s.weight,
        "facets": s.facets.len(),
        "solver": st,
    })
}

/// Seeds, parameters, objective values and solver statistics. Contains no timings,
/// so identical configs give identical records.
pub fn provenance(cfg: &PipelineConfig, g: &GeometryOutput, r: &RasterOutput) -> Value {
    let k = &g.complex;
    let mut v = json!({
        "crackgen_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "generators": g.pattern.len(),
        "complex": {
            "vertices": k.vertices.len(),
            "arcs": k.arcs.len(),
            "facets": k.facets.len(),
            "cells": k.cells.len(),
            "euler_characteristic": k.euler_characteristic(),
        },
        "surface": surface_record(&g.cycle, &g.surface, &g.stats),
    });
    if let Some((h, s, st)) = &g.branch {
        v["branch"] = surface_record(h, s, st);
        v["shared_facets"] = json!(g.shared_facets());
    }
    if let Some(gt) = &r.gt {
        let stages: Vec<Value> = r.intermediates.iter().map(|(n, vol)| json!({"stage": n, "foreground": vol.foreground()})).collect();
        v["raster"] = json!({
            "dims": gt.dims(),
            "foreground": gt.foreground(),
            "stages": stages,
        });
    }
    if let Some(a) = &r.air {
        v["air"] = json!(a);
    }
    v
}

/// Writes the artifacts of a run into `dir`.
pub fn write_outputs(out: &PipelineOutput, dir: &FsPath, keep_intermediates: bool) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir)?;
    let g = &out.geometry;
    let k = &g.complex;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> Result<(), PipelineError> {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    put("surface.obj", &mesh::surface_obj(k, &g.surface))?;
    put("cycle.obj", &mesh::cycle_obj(k, &g.cycle))?;
    put("cycle.json", &(serde_json::to_string_pretty(&g.cycle)? + "\n"))?;
    if let Some((h, s, _)) = &g.branch {
        put("branch_surface.obj", &mesh::surface_obj(k, s))?;
        put("branch_cycle.obj", &mesh::cycle_obj(k, h))?;
    }
    if keep_intermediates {
        let mut csv = Vec::new();
        g.pattern.write_csv(&mut csv)?;
        put("points.csv", std::str::from_utf8(&csv).expect("ascii"))?;
        put("points.json", &(serde_json::to_string_pretty(&g.pattern.sidecar())? + "\n"))?;
        put("complex.txt", &k.to_text())?;
        put("wireframe.obj", &mesh::wireframe_obj(k))?;
    }
    put("provenance.json", &(serde_json::to_string_pretty(&out.provenance)? + "\n"))?;
    let prov = Some(json!({"seed": out.config.seed}));
    let mut vol = |stem: &str, f: &dyn Fn(&FsPath) -> Result<(), RasterError>| -> Result<(), PipelineError> {
        let p = dir.join(stem);
        f(&p)?;
        written.push(p.with_extension("raw"));
        written.push(p.with_extension("json"));
        Ok(())
    };
    let r = &out.raster;
    if let Some(gt) = &r.gt {
        vol("gt", &|p| gt.write_files(p, 1.0, prov.clone()))?;
    }
    if let Some(img) = &r.image {
        vol("image", &|p| img.write_files(p, 1.0, prov.clone()))?;
    }
    if keep_intermediates {
        if let Some(l) = &r.labels {
            vol("labels", &|p| l.write_files(p, 1.0, prov.clone()))?;
        }
        for (name, v) in &r.intermediates {
            vol(name, &|p| v.write_files(p, 1.0, prov.clone()))?;
        }
    }
    Ok(written)
}

/// OBJ meshes per stage: diagram wireframe, complex facets, cycle polyline and surface(s).
pub fn export_figure_assets(cfg: &PipelineConfig, dir: &FsPath) -> Result<(GeometryOutput, Vec<PathBuf>), PipelineError> {
    let mut geo_cfg = cfg.clone();
    geo_cfg.rasterize = false;
    let g = run_geometry(&geo_cfg)?;
    fs::create_dir_all(dir)?;
    let k = &g.complex;
    let mut files = vec![
        ("wireframe.obj", mesh::wireframe_obj(k)),
        ("facets.obj", mesh::complex_facets_obj(k)),
        ("cycle.obj", mesh::cycle_obj(k, &g.cycle)),
        ("surface.obj", mesh::surface_obj(k, &g.surface)),
    ];
    if let Some((h, s, _)) = &g.branch {
        files.push(("branch_cycle.obj", mesh::cycle_obj(k, h)));
        files.push(("branch_surface.obj", mesh::surface_obj(k, s)));
        files.push(("shared_facets.json", serde_json::to_string(&g.shared_facets())? + "\n"));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
    }
    Ok((g, written))
}

/// The twelve generator models of the point-process comparison grid (unit cube,
/// length/area weights), in row-major order: Poisson, Matérn, hardcore per row.
pub fn figure_grid_configs(seed: u64) -> Vec<(String, PipelineConfig)> {
    let rows = [(50.0, 2.0, 50.0), (100.0, 5.0, 100.0), (1000.0, 20.0, 50.0), (5000.0, 50.0, 100.0)];
    let mut out = Vec::new();
    for (lambda, parent, mu) in rows {
        let models = [
            (format!("poisson_{lambda}"), PointModel::Poisson { lambda }),
            (
                format!("matern_{parent}_{mu}"),
                PointModel::MaternCluster { lambda_parent: parent, mu_daughter: mu, radius: 0.1 },
            ),
            (format!("hardcore_{lambda}"), PointModel::Hardcore { lambda, volume_fraction: 0.6 }),
        ];
        for (name, m) in models {
            let mut c = PipelineConfig::geometry_only(Cuboid::unit(), m, seed);
            c.weights = Weights { arc: ArcWeight::Length, facet: FacetWeight::Area };
            out.push((name, c));
        }
    }
    out
}
