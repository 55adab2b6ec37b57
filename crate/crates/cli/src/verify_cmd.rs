use std::collections::BTreeMap;
use std::fmt::Write as _;

use fraclie_core::catalog::invariance_surface_residual;
use fraclie_core::selftest::{ISC_TOL, LEMMA2_TOL, SEQUENTIAL_TOL};
use fraclie_core::solutions::{Lemma2Solution, SolutionFamily};
use fraclie_core::verify::{
    curve_window, default_grid, linspace, residual_system, sequential_residual, EquationResidual, EvalPath, GridSpec,
    PathChoice, ResidualReport, EXACT_TOL, QUADRATURE_TOL,
};
use fraclie_core::Error;
use serde::Serialize;

use crate::args::{Format, PathArg, VerifyArgs};
use crate::family::{build, Built};
use crate::{emit, CliError, Ctx, SCHEMA};

const DEFAULT_N: usize = 6;
const DEFAULT_T: (f64, f64) = (0.5, 2.0);

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub tolerance: f64,
    pub max: f64,
    pub report: ResidualReport,
}

impl Check {
    fn new(name: impl Into<String>, tolerance: f64, report: ResidualReport) -> Self {
        let max = report.max();
        Check { name: name.into(), passed: report.passes(tolerance), tolerance, max, report }
    }
}

#[derive(Serialize)]
pub struct Note {
    pub kind: &'static str,
    pub text: String,
}

#[derive(Serialize)]
pub struct VerifyOutput {
    pub schema: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub family: String,
    pub alpha: String,
    pub params: BTreeMap<String, String>,
    pub domain: Option<String>,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<Note>,
}

fn grid_for(args: &VerifyArgs, family: &SolutionFamily, window: Option<(f64, f64)>) -> Result<GridSpec, Error> {
    let (x0, x1) = match (args.x0, args.x1, window) {
        (Some(a), Some(b), _) => (a, b),
        (None, None, Some(w)) => w,
        (None, None, None) => {
            let xs = default_grid(family, None)?.xs();
            (xs[0], xs[xs.len() - 1])
        }
        _ => return Err(Error::InvalidInput("--x0 and --x1 go together".into())),
    };
    let grid = GridSpec::new(
        x0,
        x1,
        args.nx.unwrap_or(DEFAULT_N),
        args.t0.unwrap_or(DEFAULT_T.0),
        args.t1.unwrap_or(DEFAULT_T.1),
        args.nt.unwrap_or(DEFAULT_N),
    )?;
    if let Some((x, t)) = grid.points().into_iter().find(|&(x, t)| !family.contains(x, t)) {
        return Err(Error::Domain(format!("grid point x = {x}, t = {t} is outside {}", family.domain_text)));
    }
    Ok(grid)
}

fn family_checks(args: &VerifyArgs, family: &SolutionFamily, grid: &GridSpec) -> Result<Vec<Check>, Error> {
    let path = match args.path {
        PathArg::Auto => PathChoice::Auto,
        PathArg::Exact => PathChoice::Exact,
        PathArg::Quadrature => PathChoice::Quadrature,
    };
    let pde = residual_system(family, grid, path)?;
    let tol = if pde.path == EvalPath::ExactMonomial { EXACT_TOL } else { QUADRATURE_TOL };
    let mut checks = vec![Check::new("pde-residual", tol, pde)];
    for (label, field) in family.generator_fields()? {
        let r = invariance_surface_residual(&field, family, family.alpha.value(), grid)?;
        checks.push(Check::new(format!("invariance-surface {label}"), ISC_TOL, r));
    }
    if family.u.is_monomial() {
        checks.push(Check::new("sequential-equation", SEQUENTIAL_TOL, sequential_residual(family, grid)?));
    }
    Ok(checks)
}

fn lemma2_check(s: &Lemma2Solution) -> Result<Check, Error> {
    let zs = linspace(0.5, 3.0, 11);
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for &z in &zs {
        let [a, b] = s.residual(z)?;
        r1.push(a);
        r2.push(b);
    }
    let params = [
        ("m", s.m.clone()),
        ("alpha", s.alpha.clone()),
        ("lambda1", format!("{}", s.lambda1)),
        ("lambda2", format!("{}", s.lambda2)),
        ("c1", format!("{:e}", s.c1)),
        ("c2", format!("{:e}", s.c2)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let report = ResidualReport {
        kind: "reduced-ode".into(),
        equations: vec![
            EquationResidual::from_values("D^α φ - a1 ψ - a2 z ψ'", &r1),
            EquationResidual::from_values("D^α ψ - φ^(2m)(b1 φ + b2 z φ')", &r2),
        ],
        path: EvalPath::ExactMonomial,
        grid: None,
        params,
    };
    Ok(Check::new("reduced-residual", LEMMA2_TOL, report))
}

pub fn verify(args: &VerifyArgs, ctx: &Ctx) -> Result<bool, CliError> {
    let built = build(&args.family)?;
    let (checks, family_id, params, domain, notes) = match &built {
        Built::Lemma2(s) => (vec![lemma2_check(s)?], "lemma2".to_string(), BTreeMap::new(), None, Vec::new()),
        Built::Explicit(f) | Built::Implicit(_, f) => {
            let window = match &built {
                Built::Implicit(curve, _) => Some(curve_window(curve)),
                _ => None,
            };
            let grid = grid_for(args, f, window)?;
            (family_checks(args, f, &grid)?, f.id.clone(), f.params.clone(), Some(f.domain_text.clone()), f.notes.clone())
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    let out = VerifyOutput {
        schema: SCHEMA,
        command: "verify",
        seed: ctx.seed,
        family: family_id,
        alpha: args.family.alpha.to_string(),
        params,
        domain,
        passed,
        checks,
        notes: notes.into_iter().map(|text| Note { kind: "NOTE", text }).collect(),
    };
    match ctx.format(Format::Json) {
        Format::Text => emit(ctx, &render(&out))?,
        _ => emit(ctx, &serde_json::to_string_pretty(&out)?)?,
    }
    Ok(passed)
}

fn render(out: &VerifyOutput) -> String {
    let mut s = format!("family {} at α = {}\n", out.family, out.alpha);
    for c in &out.checks {
        let _ = writeln!(
            s,
            "{} {}: max {:.3e} (tol {:e}, {:?})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max,
            c.tolerance,
            c.report.path
        );
    }
    for n in &out.notes {
        let _ = writeln!(s, "{}: {}", n.kind, n.text);
    }
    s
}
