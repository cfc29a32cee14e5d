use std::cmp::Ordering;
use std::collections::BinaryHeap;

use microlp::Variable;

use super::lp::{extract, map_error, solve_raw};
use super::{BinaryProgram, SolverError};

/// Feasibility / integrality tolerance on LP values.
const INT_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub max_nodes: usize,
    /// Nodes whose bound is within this of the incumbent are pruned.
    pub abs_gap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_nodes: 100_000, abs_gap: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum IpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IpSolution {
    pub assignment: Vec<bool>,
    pub objective: f64,
    pub status: IpStatus,
    pub node_count: usize,
    pub lp_iterations: u64,
    /// Objective of the root relaxation (a lower bound on `objective`).
    pub root_bound: f64,
}

impl IpSolution {
    fn infeasible(n: usize, nodes: usize, iters: u64, root_bound: f64) -> Self {
        IpSolution {
            assignment: vec![false; n],
            objective: f64::INFINITY,
            status: IpStatus::Infeasible,
            node_count: nodes,
            lp_iterations: iters,
            root_bound,
        }
    }
}

struct Node {
    bound: f64,
    seq: u64,
    sol: microlp::Solution,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl Ord for Node {
    // Min-heap on (bound, seq).
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Most fractional variable, ties to the lowest index.
fn branching_var(values: &[f64]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, &v) in values.iter().enumerate() {
        let frac = (v - v.round()).abs();
        if frac > INT_TOL {
            let dist = (v - 0.5).abs();
            if best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, i));
            }
        }
    }
    best.map(|(_, i)| i)
}

/// Best-first branch and bound over LP relaxations.
pub fn solve_binary(prog: &BinaryProgram, opts: &SolveOptions) -> Result<IpSolution, SolverError> {
    prog.validate()?;
    let n = prog.n_vars();
    if n == 0 {
        return Ok(if prog.rhs().iter().all(|&b| b == 0) {
            IpSolution { assignment: vec![], objective: 0.0, status: IpStatus::Optimal, node_count: 1, lp_iterations: 0, root_bound: 0.0 }
        } else {
            IpSolution::infeasible(0, 1, 0, f64::INFINITY)
        });
    }
    let (root, vars) = match solve_raw(prog) {
        Ok(r) => r,
        Err(SolverError::Infeasible) => return Ok(IpSolution::infeasible(n, 1, 0, f64::INFINITY)),
        Err(e) => return Err(e),
    };
    let root_bound = root.objective();
    let mut lp_iterations = root.stats().lp_iterations;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node { bound: root_bound, seq, sol: root });
    let mut incumbent: Option<(Vec<bool>, f64)> = None;
    let mut nodes = 0usize;

    while let Some(node) = heap.pop() {
        if let Some((_, best)) = &incumbent {
            if node.bound >= best - opts.abs_gap {
                break;
            }
        }
        nodes += 1;
        if nodes > opts.max_nodes {
            return Err(SolverError::NodeLimit(opts.max_nodes));
        }
        let lp = extract(&node.sol, &vars);
        debug_assert!(lp.objective >= root_bound - 1e-9 * root_bound.abs().max(1.0));
        match branching_var(&lp.values) {
            None => {
                let x: Vec<bool> = lp.values.iter().map(|&v| v > 0.5).collect();
                if !prog.is_feasible(&x) {
                    return Err(SolverError::Numerical("rounded LP vertex violates Mx = q".into()));
                }
                let obj = prog.objective(&x);
                if incumbent.as_ref().is_none_or(|(_, best)| obj < *best) {
                    incumbent = Some((x, obj));
                }
            }
            Some(j) => {
                let var: Variable = vars[j];
                for (val, sol) in [(0.0, node.sol.clone()), (1.0, node.sol)] {
                    match sol.fix_var(var, val) {
                        Ok(outcome) => {
                            let child = outcome
                                .into_solution()
                                .map_err(|_| SolverError::Numerical("LP solve interrupted".into()))?;
                            lp_iterations += child.stats().lp_iterations;
                            seq += 1;
                            heap.push(Node { bound: child.objective(), seq, sol: child });
                        }
                        Err(microlp::Error::Infeasible) => {}
                        Err(e) => return Err(map_error(e)),
                    }
                }
            }
        }
    }

    Ok(match incumbent {
        Some((assignment, objective)) => {
            debug_assert!(root_bound <= objective + 1e-9 * objective.abs().max(1.0));
            IpSolution { assignment, objective, status: IpStatus::Optimal, node_count: nodes, lp_iterations, root_bound }
        }
        None => IpSolution::infeasible(n, nodes, lp_iterations, root_bound),
    })
}
