//! Shared fixtures for the criterion benchmarks.

use crackgen_core::graph_paths::boundary_cycle;
use crackgen_core::minsurf::min_weight_surface;
use crackgen_core::pipeline::{run_geometry, GeometryOutput, PipelineConfig};
use crackgen_core::point_process::sample_poisson;
use crackgen_core::raster::{rasterize_labels, rasterize_surface, surface_pairs};
use crackgen_core::voronoi::{assign_weights, build_bounded_voronoi, extract_complex, ArcWeight, FacetWeight};
use crackgen_core::{BinaryVolume, CellComplex, Cuboid, Cycle, LabelVolume, PointModel, PointPattern, Surface, VoronoiCell};

pub fn poisson(lambda: f64, seed: u64) -> PointPattern {
    sample_poisson(lambda, &Cuboid::unit(), seed).expect("valid intensity")
}

pub fn cells(lambda: f64, seed: u64) -> Vec<VoronoiCell> {
    build_bounded_voronoi(&poisson(lambda, seed), &Cuboid::unit()).expect("distinct generators")
}

pub fn complex(lambda: f64, seed: u64) -> CellComplex {
    let q = Cuboid::unit();
    let k = extract_complex(&cells(lambda, seed), 1e-9 * q.diameter()).expect("consistent cells");
    assign_weights(k, ArcWeight::Unit, FacetWeight::Unit).expect("positive weights")
}

pub fn cycle(k: &CellComplex) -> Cycle {
    boundary_cycle(k, &Cuboid::unit(), [0.5; 4]).expect("boundary cycle")
}

pub fn surface(k: &CellComplex) -> Surface {
    min_weight_surface(k, &cycle(k)).expect("surface")
}

/// Geometry of a Poisson diagram in an `n`³ voxel cuboid with about `cells` generators.
pub fn voxel_geometry(n: usize, cells: f64, seed: u64) -> (PipelineConfig, GeometryOutput) {
    let d = n as f64;
    let q = Cuboid::new(d, d, d).expect("positive extent");
    let mut cfg = PipelineConfig::geometry_only(q, PointModel::Poisson { lambda: cells / q.volume() }, seed);
    cfg.rasterize = true;
    let g = run_geometry(&cfg).expect("geometry");
    (cfg, g)
}

pub fn labels(cfg: &PipelineConfig, g: &GeometryOutput) -> LabelVolume {
    rasterize_labels(&g.cells, &cfg.cuboid, cfg.dims())
}

pub fn crack(cfg: &PipelineConfig, g: &GeometryOutput) -> BinaryVolume {
    rasterize_surface(&labels(cfg, g), &surface_pairs(&g.complex, &g.surface))
}
