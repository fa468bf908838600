//! C ABI around the Clarabel conic solver, restricted to what the LMI layer
//! needs: free scalars x, one linear objective, and PSD-triangle cone rows
//! A x + s = b, s in PSD cones.
//!
//! Row convention (scaled svec): each cone of side d contributes d*(d+1)/2
//! rows ordered by the upper triangle, column-major ((0,0),(0,1),(1,1),...),
//! with off-diagonal entries multiplied by sqrt(2).

use clarabel::algebra::CscMatrix;
use clarabel::solver::*;
use std::slice;

/// Status codes mirrored on the C++ side.
const STATUS_SOLVED: i32 = 0;
const STATUS_PRIMAL_INFEASIBLE: i32 = 1;
const STATUS_DUAL_INFEASIBLE: i32 = 2;
const STATUS_ALMOST_SOLVED: i32 = 3;
const STATUS_ALMOST_PRIMAL_INFEASIBLE: i32 = 4;
const STATUS_ALMOST_DUAL_INFEASIBLE: i32 = 5;
const STATUS_MAX_ITERATIONS: i32 = 6;
const STATUS_MAX_TIME: i32 = 7;
const STATUS_NUMERICAL_ERROR: i32 = 8;
const STATUS_INSUFFICIENT_PROGRESS: i32 = 9;
const STATUS_OTHER: i32 = 10;
const STATUS_BAD_INPUT: i32 = -1;

/// Solves  min q'x  s.t.  A x + s = b,  s in product of PSD-triangle cones.
///
/// `a_*` describe A in compressed sparse column form (n_rows x n_vars).
/// `x_out` must hold n_vars doubles. Returns a status code.
#[no_mangle]
pub unsafe extern "C" fn netsyn_clarabel_solve(
    n_vars: usize,
    objective: *const f64,
    n_rows: usize,
    a_colptr: *const usize,
    a_rowval: *const usize,
    a_nzval: *const f64,
    b: *const f64,
    n_cones: usize,
    cone_dims: *const usize,
    tol: f64,
    max_iter: u32,
    verbose: bool,
    x_out: *mut f64,
    obj_out: *mut f64,
    iters_out: *mut u32,
) -> i32 {
    if n_vars == 0 || a_colptr.is_null() || b.is_null() || x_out.is_null() {
        return STATUS_BAD_INPUT;
    }
    let colptr = slice::from_raw_parts(a_colptr, n_vars + 1).to_vec();
    let nnz = colptr[n_vars];
    let rowval = slice::from_raw_parts(a_rowval, nnz).to_vec();
    let nzval = slice::from_raw_parts(a_nzval, nnz).to_vec();
    let b = slice::from_raw_parts(b, n_rows).to_vec();
    let dims = slice::from_raw_parts(cone_dims, n_cones);

    let expected: usize = dims.iter().map(|d| d * (d + 1) / 2).sum();
    if expected != n_rows {
        return STATUS_BAD_INPUT;
    }

    let q = if objective.is_null() {
        vec![0.0; n_vars]
    } else {
        slice::from_raw_parts(objective, n_vars).to_vec()
    };

    let a = CscMatrix::new(n_rows, n_vars, colptr, rowval, nzval);
    let p = CscMatrix::zeros((n_vars, n_vars));
    let cones: Vec<SupportedConeT<f64>> = dims
        .iter()
        .map(|&d| PSDTriangleConeT(d))
        .collect();

    let settings = match DefaultSettingsBuilder::default()
        .verbose(verbose)
        .max_iter(max_iter)
        .tol_gap_abs(tol)
        .tol_gap_rel(tol)
        .tol_feas(tol)
        .build()
    {
        Ok(s) => s,
        Err(_) => return STATUS_BAD_INPUT,
    };

    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings);
    solver.solve();

    let sol = &solver.solution;
    let x = slice::from_raw_parts_mut(x_out, n_vars);
    x.copy_from_slice(&sol.x);
    if !obj_out.is_null() {
        *obj_out = sol.obj_val;
    }
    if !iters_out.is_null() {
        *iters_out = sol.iterations;
    }

    match sol.status {
        SolverStatus::Solved => STATUS_SOLVED,
        SolverStatus::PrimalInfeasible => STATUS_PRIMAL_INFEASIBLE,
        SolverStatus::DualInfeasible => STATUS_DUAL_INFEASIBLE,
        SolverStatus::AlmostSolved => STATUS_ALMOST_SOLVED,
        SolverStatus::AlmostPrimalInfeasible => STATUS_ALMOST_PRIMAL_INFEASIBLE,
        SolverStatus::AlmostDualInfeasible => STATUS_ALMOST_DUAL_INFEASIBLE,
        SolverStatus::MaxIterations => STATUS_MAX_ITERATIONS,
        SolverStatus::MaxTime => STATUS_MAX_TIME,
        SolverStatus::NumericalError => STATUS_NUMERICAL_ERROR,
        SolverStatus::InsufficientProgress => STATUS_INSUFFICIENT_PROGRESS,
        _ => STATUS_OTHER,
    }
}
