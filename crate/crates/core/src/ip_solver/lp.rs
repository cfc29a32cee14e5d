use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};

use super::{BinaryProgram, SolverError};

/// Basic optimal solution of the box-bounded relaxation `0 <= x <= 1`, `Mx = q`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: u64,
}

pub(crate) fn build(prog: &BinaryProgram) -> (Problem, Vec<Variable>) {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = prog.costs().iter().map(|&c| p.add_var(c, (0.0, 1.0))).collect();
    for (row, &b) in prog.rows().iter().zip(prog.rhs()) {
        let mut e = LinearExpr::empty();
        for &(v, c) in row {
            e.add(vars[v], c as f64);
        }
        p.add_constraint(e, ComparisonOp::Eq, b as f64);
    }
    (p, vars)
}

pub(crate) fn map_error(e: microlp::Error) -> SolverError {
    match e {
        microlp::Error::Infeasible => SolverError::Infeasible,
        other => SolverError::Numerical(other.to_string()),
    }
}

pub(crate) fn has_empty_infeasible_row(prog: &BinaryProgram) -> bool {
    prog.rows().iter().zip(prog.rhs()).any(|(r, &b)| r.is_empty() && b != 0)
}

pub(crate) fn extract(sol: &microlp::Solution, vars: &[Variable]) -> LpSolution {
    LpSolution {
        values: vars.iter().map(|&v| sol.var_value_raw(v)).collect(),
        objective: sol.objective(),
        iterations: sol.stats().lp_iterations,
    }
}

pub(crate) fn solve_raw(prog: &BinaryProgram) -> Result<(microlp::Solution, Vec<Variable>), SolverError> {
    prog.validate()?;
    if has_empty_infeasible_row(prog) {
        return Err(SolverError::Infeasible);
    }
    let (p, vars) = build(prog);
    let outcome = p.solve().map_err(map_error)?;
    let sol = outcome.into_solution().map_err(|_| SolverError::Numerical("LP solve interrupted".into()))?;
    Ok((sol, vars))
}

pub fn solve_lp(prog: &BinaryProgram) -> Result<LpSolution, SolverError> {
    if prog.n_vars() == 0 {
        prog.validate()?;
        return if prog.rhs().iter().all(|&b| b == 0) {
            Ok(LpSolution { values: vec![], objective: 0.0, iterations: 0 })
        } else {
            Err(SolverError::Infeasible)
        };
    }
    let (sol, vars) = solve_raw(prog)?;
    Ok(extract(&sol, &vars))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_forced_variable() {
        let mut p = BinaryProgram::new();
        let x = p.add_var(5.0, "x");
        p.add_row(vec![(x, 1)], 1);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.values, vec![1.0]);
        assert_eq!(s.objective, 5.0);
    }

    #[test]
    fn conflicting_rows_are_infeasible() {
        // x1 - x2 = 1 and x2 = 1 would need x1 = 2.
        let mut p = BinaryProgram::new();
        let x1 = p.add_var(1.0, "x1");
        let x2 = p.add_var(1.0, "x2");
        p.add_row(vec![(x1, 1), (x2, -1)], 1);
        p.add_row(vec![(x2, 1)], 1);
        assert_eq!(solve_lp(&p), Err(SolverError::Infeasible));
    }

    #[test]
    fn unconstrained_goes_to_zero() {
        let mut p = BinaryProgram::new();
        p.add_var(1.0, "a");
        p.add_var(2.0, "b");
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.objective, 0.0);
        assert!(s.values.iter().all(|&v| v == 0.0));
    }
}
