//! Command-line MILP solver wrapper around HiGHS.
//!
//! ```text
//! trstl-solve <model.lp> <solution.out> [--time-limit S] [--mip-gap G]
//! ```
//!
//! Reads the model file (LP or MPS, decided by extension), runs HiGHS
//! single-threaded with exact gap targets, and writes a plain solution file:
//!
//! ```text
//! status optimal|feasible|infeasible|unbounded|timeout|error
//! objective <value>|none
//! <name> <value>
//! ...
//! ```
//!
//! A `timeout` status still carries the incumbent when one was found.

use highs_sys::*;
use std::ffi::{c_char, c_void, CStr, CString};
use std::fmt::Write as _;
use std::process::ExitCode;

struct Args {
    model: String,
    solution: String,
    time_limit: Option<f64>,
    mip_gap: f64,
}

fn parse_args() -> Result<Args, String> {
    let mut positional = Vec::new();
    let mut time_limit = None;
    let mut mip_gap = 0.0;
    let mut it = std::env::args().skip(1);
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--time-limit" => {
                let v: f64 = it
                    .next()
                    .ok_or("--time-limit needs a value")?
                    .parse()
                    .map_err(|_| "bad --time-limit value")?;
                if v.is_finite() && v > 0.0 && v < 1e8 {
                    time_limit = Some(v);
                }
            }
            "--mip-gap" => {
                mip_gap = it
                    .next()
                    .ok_or("--mip-gap needs a value")?
                    .parse()
                    .map_err(|_| "bad --mip-gap value")?;
            }
            "--help" | "-h" => {
                return Err("usage: trstl-solve <model.lp> <solution.out> [--time-limit S] [--mip-gap G]".into());
            }
            other => positional.push(other.to_string()),
        }
    }
    if positional.len() != 2 {
        return Err("expected exactly two positional arguments: <model> <solution>".into());
    }
    Ok(Args {
        model: positional.remove(0),
        solution: positional.remove(0),
        time_limit,
        mip_gap,
    })
}

struct Solver {
    h: *mut c_void,
}

impl Solver {
    fn new() -> Self {
        Solver { h: unsafe { Highs_create() } }
    }

    fn set_bool(&self, key: &str, value: bool) {
        let key = CString::new(key).unwrap();
        unsafe {
            Highs_setBoolOptionValue(self.h, key.as_ptr(), if value { 1 } else { 0 });
        }
    }

    fn set_int(&self, key: &str, value: HighsInt) {
        let key = CString::new(key).unwrap();
        unsafe {
            Highs_setIntOptionValue(self.h, key.as_ptr(), value);
        }
    }

    fn set_double(&self, key: &str, value: f64) {
        let key = CString::new(key).unwrap();
        unsafe {
            Highs_setDoubleOptionValue(self.h, key.as_ptr(), value);
        }
    }

    fn read_model(&self, path: &str) -> Result<(), String> {
        let path = CString::new(path).map_err(|_| "bad model path")?;
        let status = unsafe { Highs_readModel(self.h, path.as_ptr()) };
        if status == kHighsStatusError {
            Err("HiGHS could not read the model file".into())
        } else {
            Ok(())
        }
    }

    fn run(&self) -> HighsInt {
        unsafe {
            Highs_run(self.h);
            Highs_getModelStatus(self.h)
        }
    }

    fn has_primal_solution(&self) -> bool {
        let key = CString::new("primal_solution_status").unwrap();
        let mut status: HighsInt = 0;
        unsafe {
            Highs_getIntInfoValue(self.h, key.as_ptr(), &mut status);
        }
        status == kHighsSolutionStatusFeasible
    }

    fn objective(&self) -> f64 {
        unsafe { Highs_getObjectiveValue(self.h) }
    }

    fn columns(&self) -> Vec<(String, f64)> {
        unsafe {
            let n = Highs_getNumCol(self.h);
            let mut values = vec![0f64; n as usize];
            if n > 0 {
                Highs_getSolution(
                    self.h,
                    values.as_mut_ptr(),
                    std::ptr::null_mut(),
                    std::ptr::null_mut(),
                    std::ptr::null_mut(),
                );
            }
            (0..n)
                .map(|i| {
                    let mut buf = vec![0 as c_char; 1024];
                    let name = if Highs_getColName(self.h, i, buf.as_mut_ptr()) == kHighsStatusOk {
                        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
                    } else {
                        format!("col{i}")
                    };
                    (name, values[i as usize])
                })
                .collect()
        }
    }
}

impl Drop for Solver {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.h) }
    }
}

fn solve(args: &Args) -> Result<String, String> {
    let solver = Solver::new();
    solver.set_bool("output_flag", false);
    solver.set_int("threads", 1);
    solver.set_int("random_seed", 0);
    solver.set_double("mip_rel_gap", args.mip_gap);
    solver.set_double("mip_abs_gap", args.mip_gap);
    solver.set_double("mip_feasibility_tolerance", 1e-7);
    solver.set_double("primal_feasibility_tolerance", 1e-8);
    if let Some(t) = args.time_limit {
        solver.set_double("time_limit", t);
    }
    solver.read_model(&args.model)?;
    let model_status = solver.run();
    let has_solution = solver.has_primal_solution();
    let status = if model_status == kHighsModelStatusOptimal
        || model_status == kHighsModelStatusModelEmpty
    {
        "optimal"
    } else if model_status == kHighsModelStatusInfeasible {
        "infeasible"
    } else if model_status == kHighsModelStatusUnbounded
        || model_status == kHighsModelStatusUnboundedOrInfeasible
    {
        "unbounded"
    } else if model_status == kHighsModelStatusTimeLimit
        || model_status == kHighsModelStatusIterationLimit
    {
        "timeout"
    } else if has_solution {
        "feasible"
    } else {
        "error"
    };
    let mut out = String::new();
    let _ = writeln!(out, "status {status}");
    if has_solution {
        let _ = writeln!(out, "objective {}", solver.objective());
        for (name, value) in solver.columns() {
            let _ = writeln!(out, "{name} {value}");
        }
    } else {
        let _ = writeln!(out, "objective none");
    }
    Ok(out)
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match solve(&args) {
        Ok(report) => {
            if let Err(e) = std::fs::write(&args.solution, report) {
                eprintln!("cannot write solution file: {e}");
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("{msg}");
            let _ = std::fs::write(&args.solution, "status error\nobjective none\n");
            ExitCode::from(1)
        }
    }
}
