//! Exact self-checks on the finite analogs and the built-in involutions.

use imcmc::catalog::{finite_cases, involution_cases, mutant_case, reductions, Expect, FiniteCase};
use imcmc::diagnostics::{check_detailed_balance, check_stationary};
use imcmc::verify::verify_involution;
use serde::Serialize;

use crate::CliError;

pub const STATIONARITY_TOL: f64 = 1e-12;
pub const BALANCE_TOL: f64 = 1e-12;
/// Smallest balance violation that counts as genuinely irreversible.
pub const IRREVERSIBLE_MIN: f64 = 1e-6;
pub const REDUCTION_TOL: f64 = 1e-12;
pub const DISPLACEMENT_TOL: f64 = 1e-10;
pub const LOGDET_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Involutions,
    Stationarity,
    Balance,
    Reductions,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    /// `<= x` or `> x`.
    pub criterion: String,
    pub pass: bool,
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = if self.pass { "ok  " } else { "FAIL" };
        write!(f, "{mark} {:<13} {:<40} {:.3e} (want {})", self.suite, self.name, self.value, self.criterion)
    }
}

fn at_most(suite: &'static str, name: impl Into<String>, value: f64, tol: f64) -> CheckLine {
    CheckLine { suite, name: name.into(), value, criterion: format!("<= {tol:e}"), pass: value <= tol }
}

fn cases(mutant: bool) -> Result<Vec<FiniteCase>, CliError> {
    let rt = |e: imcmc::Error| CliError::Runtime(e.to_string());
    let mut v = finite_cases().map_err(rt)?;
    if mutant {
        v.push(mutant_case().map_err(rt)?);
    }
    Ok(v)
}

pub fn run_suite(suite: Suite, mutant: bool, seed: u64) -> Result<Vec<CheckLine>, CliError> {
    let rt = |e: imcmc::Error| CliError::Runtime(e.to_string());
    let mut out = Vec::new();
    if matches!(suite, Suite::Involutions | Suite::All) {
        for c in involution_cases(seed).map_err(rt)? {
            let r = verify_involution(c.map.as_ref(), &c.points, DISPLACEMENT_TOL).map_err(rt)?;
            out.push(at_most("involution", format!("{} (f∘f)", c.name), r.max_displacement, DISPLACEMENT_TOL));
            out.push(at_most("involution", format!("{} (logdet)", c.name), r.max_logdet_asymmetry, LOGDET_TOL));
        }
    }
    if matches!(suite, Suite::Stationarity | Suite::All) {
        for c in cases(mutant)? {
            let t = c.matrix().map_err(rt)?;
            let s = check_stationary(&t, &c.weights, STATIONARITY_TOL);
            out.push(at_most("stationarity", c.name, s.value, STATIONARITY_TOL));
        }
    }
    if matches!(suite, Suite::Balance | Suite::All) {
        for c in cases(mutant)? {
            let t = c.matrix().map_err(rt)?;
            let b = check_detailed_balance(&t, &c.weights, BALANCE_TOL);
            out.push(match c.expect {
                Expect::Reversible => at_most("balance", c.name, b.value, BALANCE_TOL),
                Expect::Irreversible => CheckLine {
                    suite: "balance",
                    name: c.name.to_string(),
                    value: b.value,
                    criterion: format!("> {IRREVERSIBLE_MIN:e}"),
                    pass: b.value > IRREVERSIBLE_MIN,
                },
            });
        }
    }
    if matches!(suite, Suite::Reductions | Suite::All) {
        for r in reductions().map_err(rt)? {
            out.push(at_most("reduction", r.name, r.left.max_abs_diff(&r.right), REDUCTION_TOL));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_pass_and_mutant_fails() {
        assert!(run_suite(Suite::All, false, 7).unwrap().iter().all(|l| l.pass));
        let with = run_suite(Suite::Stationarity, true, 7).unwrap();
        assert_eq!(with.iter().filter(|l| !l.pass).count(), 1);
    }
}
