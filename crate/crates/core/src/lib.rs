//! Minimum-weight surfaces in bounded 3D Voronoi diagrams and their
//! discretization into semi-synthetic crack volumes.
//!
//! The crate is organized stage by stage:
//!
//! * [`point_process`]: generator patterns (Poisson, Matérn cluster, force-biased hardcore).
//! * [`voronoi`]: bounded Voronoi cells, the cellular complex and its weights.
//! * [`graph_paths`]: shortest paths on the arc graph and the boundary cycle.
//! * [`ip_solver`]: exact 0/1 programs `min cᵀx, Mx = q` by branch and bound.
//! * [`minsurf`]: the arc-facet incidence system and minimum-weight surfaces.
//! * [`raster`]: voxel volumes, surface rasterization and crack shaping.
//! * [`embed`]: grayvalue embedding of a binary ground truth.
//! * [`pipeline`]: the config-driven end-to-end driver.


pub mod embed;
pub mod geometry;
pub mod graph_paths;
pub mod ip_solver;
pub mod mesh;
pub mod minsurf;
pub mod pipeline;
pub mod point_process;
pub mod raster;
pub mod rng;
pub mod voronoi;

pub use geometry::Cuboid;
pub use embed::{embed_crack, estimate_pore_stats, EmbedError, GrayStats};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, PipelineOutput};
pub use point_process::{PointModel, PointPattern, SampleError};
pub use raster::{BinaryVolume, GrayVolume, LabelVolume, Volume};
pub use voronoi::{build_bounded_voronoi, extract_complex, CellComplex, VoronoiCell, VoronoiError};

pub use glam::DVec3;
pub use graph_paths::{boundary_cycle, dijkstra, spp_as_ip, Cycle, Path, PathError};
pub use ip_solver::{solve_binary, solve_lp, BinaryProgram, IpSolution, IpStatus, SolveOptions, SolverError};
pub use minsurf::{min_weight_surface, msp_as_ip, surface_boundary, Surface, SurfaceError};
