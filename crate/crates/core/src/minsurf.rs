//! Minimum-weight surfaces bounded by a cycle.
//!
//! Each facet enters the program twice, once per orientation, with its
//! weight as cost. The row of arc `a` reads `Σ_f D[a,f]·y_f = q_a`, where
//! `D[a,f]` is the coherence of `a` in the oriented facet and `q_a` is the
//! coherence of `a` in the cycle. Positive weights make picking both
//! orientations of a facet suboptimal, so no pairing constraint is needed.

use std::collections::BTreeMap;

use log::{debug, warn};
use thiserror::Error;

use crate::graph_paths::Cycle;
use crate::ip_solver::{solve_binary, BinaryProgram, IpStatus, SolveOptions, SolverError};
use crate::voronoi::CellComplex;

#[derive(Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("no facet set is bounded by the cycle")]
    Infeasible,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Facets of a surface with their chosen orientation (`+1` = stored orientation).
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    pub facets: Vec<(usize, i8)>,
    pub weight: f64,
}

/// Diagnostics of one minimum-weight surface solve.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SurfaceStats {
    pub n_vars: usize,
    pub n_rows: usize,
    pub node_count: usize,
    pub lp_iterations: u64,
    pub root_bound: f64,
    pub components: usize,
}

/// Variable of facet `f` in orientation `sign`.
pub fn facet_var(f: usize, sign: i8) -> usize {
    2 * f + usize::from(sign < 0)
}

pub fn check_cycle(k: &CellComplex, h: &Cycle) -> Result<(), SurfaceError> {
    if h.arcs.iter().any(|&(a, _)| a >= k.arcs.len()) || h.vertices.iter().any(|&v| v >= k.vertices.len()) {
        return Err(SurfaceError::InvalidCycle("refers to missing arcs or vertices".into()));
    }
    h.check_simple().map_err(|e| SurfaceError::InvalidCycle(e.to_string()))?;
    if !h.is_consistent_with(k) {
        return Err(SurfaceError::InvalidCycle("not closed: arcs do not join consecutive vertices".into()));
    }
    Ok(())
}

/// Builds `min Σ w(f) y_f  s.t.  D y = q,  y ∈ {0,1}` with one row per arc.
pub fn msp_as_ip(k: &CellComplex, h: &Cycle) -> Result<BinaryProgram, SurfaceError> {
    check_cycle(k, h)?;
    let mut rows: Vec<Vec<(usize, i8)>> = vec![Vec::new(); k.arcs.len()];
    let mut prog = BinaryProgram::new();
    for (f, facet) in k.facets.iter().enumerate() {
        let plus = prog.add_var(facet.weight, format!("y{f}p"));
        let minus = prog.add_var(facet.weight, format!("y{f}m"));
        debug_assert_eq!((plus, minus), (facet_var(f, 1), facet_var(f, -1)));
        for &(a, c) in &facet.arcs {
            rows[a].push((plus, c));
            rows[a].push((minus, -c));
        }
    }
    let mut q = vec![0i32; k.arcs.len()];
    for &(a, s) in &h.arcs {
        q[a] = s as i32;
    }
    for (row, b) in rows.into_iter().zip(q) {
        prog.add_row(row, b);
    }
    Ok(prog)
}

pub fn min_weight_surface(k: &CellComplex, h: &Cycle) -> Result<Surface, SurfaceError> {
    min_weight_surface_with(k, h, &SolveOptions::default()).map(|(s, _)| s)
}

pub fn min_weight_surface_with(k: &CellComplex, h: &Cycle, opts: &SolveOptions) -> Result<(Surface, SurfaceStats), SurfaceError> {
    let prog = msp_as_ip(k, h)?;
    let sol = solve_binary(&prog, opts)?;
    if sol.status == IpStatus::Infeasible {
        return Err(SurfaceError::Infeasible);
    }
    let mut facets = Vec::new();
    for f in 0..k.facets.len() {
        let (p, m) = (sol.assignment[facet_var(f, 1)], sol.assignment[facet_var(f, -1)]);
        assert!(!(p && m), "facet {f} selected in both orientations");
        if p {
            facets.push((f, 1));
        } else if m {
            facets.push((f, -1));
        }
    }
    let surface = Surface { facets, weight: sol.objective };
    debug_assert_eq!(surface_boundary(k, &surface), h.chain());
    let comps = components(k, &surface);
    if comps.len() > 1 {
        warn!("minimum-weight surface has {} connected components", comps.len());
    }
    debug!("surface: {} facets, weight {}, {} B&B nodes", surface.facets.len(), surface.weight, sol.node_count);
    let stats = SurfaceStats {
        n_vars: prog.n_vars(),
        n_rows: prog.n_rows(),
        node_count: sol.node_count,
        lp_iterations: sol.lp_iterations,
        root_bound: sol.root_bound,
        components: comps.len(),
    };
    Ok((surface, stats))
}

/// `D·y` in integers: arcs with nonzero net coefficient, ascending by arc id.
pub fn surface_boundary(k: &CellComplex, s: &Surface) -> Vec<(usize, i32)> {
    let mut net: BTreeMap<usize, i32> = BTreeMap::new();
    for &(f, sign) in &s.facets {
        for &(a, c) in &k.facets[f].arcs {
            *net.entry(a).or_default() += (sign * c) as i32;
        }
    }
    net.into_iter().filter(|&(_, v)| v != 0).collect()
}

/// Connected components of the facet-adjacency graph (facets sharing an arc).
pub fn components(k: &CellComplex, s: &Surface) -> Vec<Vec<usize>> {
    let n = s.facets.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut first_by_arc: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &(f, _)) in s.facets.iter().enumerate() {
        for &(a, _) in &k.facets[f].arcs {
            if let Some(&j) = first_by_arc.get(&a) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            } else {
                first_by_arc.insert(a, i);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(s.facets[i].0);
    }
    groups.into_values().collect()
}
