use std::fmt::Write as _;

use fraclie_core::catalog::{
    catalog_case, check_equivalence, claims_for, compare_adjoint, compare_commutator, degeneracy, table_algebra,
    tables_for, CatalogCase, ParamRange, ClassificationCase, EquivalenceCheck, TableMismatch,
};
use fraclie_core::special::int;
use fraclie_core::{AlphaParameter, Error};
use num_traits::Zero;
use serde::Serialize;

use crate::args::{CaseArgs, Format};
use crate::{emit, CliError, Ctx, SCHEMA};

/// Alphas used when `tables` runs without `--alpha`.
const SAMPLE_ALPHAS: [(i64, i64); 4] = [(1, 3), (2, 7), (3, 4), (1, 5)];

fn resolve_case(args: &CaseArgs, alpha: &AlphaParameter) -> Result<ClassificationCase, Error> {
    let k = args.k.clone().unwrap_or_else(|| int(1));
    match args.case.as_str() {
        "1" => Ok(ClassificationCase::generic()),
        "2.1" => {
            let m = args.m.clone().ok_or_else(|| Error::InvalidInput("--m is required for case 2.1".into()))?;
            if degeneracy(&m, alpha.value()).is_zero() {
                return Err(Error::DegenerateDenominator);
            }
            ClassificationCase::power_law(k, m, alpha)
        }
        "2.2" => {
            let case = ClassificationCase::degenerate(k, alpha)?;
            if let (Some(m), Some(expected)) = (&args.m, case.m()) {
                if m != expected {
                    return Err(Error::InvalidCase(format!("case 2.2 at α = {alpha} fixes m = {expected}, got {m}")));
                }
            }
            Ok(case)
        }
        other => Err(Error::InvalidInput(format!("unknown case {other:?}; expected 1, 2.1 or 2.2"))),
    }
}

#[derive(Serialize)]
struct TablesOutput<'a> {
    schema: &'a str,
    command: &'a str,
    seed: u64,
    passed: bool,
    alphas: Vec<String>,
    mismatches: Vec<TableMismatch>,
    catalog: CatalogCase,
}

fn render_grid(out: &mut String, title: &str, names: &[String], rows: &[Vec<String>]) {
    let _ = writeln!(out, "{title}");
    let width = rows.iter().flatten().chain(names).map(|s| s.chars().count()).max().unwrap_or(1).max(3);
    let pad = |s: &str| format!("{s}{}", " ".repeat(width - s.chars().count()));
    let _ = writeln!(out, "  {} | {}", pad(""), names.iter().map(|n| pad(n)).collect::<Vec<_>>().join(" | "));
    for (name, row) in names.iter().zip(rows) {
        let _ = writeln!(out, "  {} | {}", pad(name), row.iter().map(|c| pad(c)).collect::<Vec<_>>().join(" | "));
    }
}

pub fn tables(args: &CaseArgs, ctx: &Ctx) -> Result<bool, CliError> {
    let alphas: Vec<AlphaParameter> = match &args.alpha {
        Some(a) => vec![a.clone()],
        None => SAMPLE_ALPHAS.iter().map(|&(n, d)| AlphaParameter::from_ratio(n, d)).collect::<Result<_, _>>()?,
    };
    let mut mismatches = Vec::new();
    let mut checked = Vec::new();
    let mut shown = None;
    for a in &alphas {
        let case = match resolve_case(args, a) {
            Ok(c) => c,
            // a sampled alpha can hit the degenerate value of m; an explicit one is an error
            Err(Error::DegenerateDenominator) if args.alpha.is_none() => continue,
            Err(e) => return Err(e.into()),
        };
        let alg = table_algebra(&case, a)?;
        let (comm, adj) = tables_for(&case);
        mismatches.extend(compare_commutator(comm, &alg));
        if let Some(adj) = adj {
            mismatches.extend(compare_adjoint(adj, &alg));
        }
        if shown.is_none() {
            shown = Some(catalog_case(&case, a)?);
        }
        checked.push(a.to_string());
    }
    let catalog = shown.ok_or_else(|| CliError::Input("no admissible alpha for this case".into()))?;
    let passed = mismatches.is_empty();
    let text = || {
        let mut s = format!("{} at α = {}\n", catalog.description, catalog.alpha);
        for (name, field) in &catalog.generators {
            let _ = writeln!(s, "  {name} = {field}");
        }
        render_grid(&mut s, "Commutator table [row, column]:", &catalog.basis, &catalog.commutator);
        if let Some(adj) = &catalog.adjoint {
            render_grid(&mut s, "Adjoint table Ad(exp(ε·row)) column:", &catalog.basis, adj);
        }
        for m in &mismatches {
            let _ = writeln!(s, "MISMATCH table {} [{}, {}]: expected {}, computed {}", m.table, m.row, m.col, m.expected, m.computed);
        }
        let verdict = if passed { "match" } else { "DO NOT match" };
        let _ = writeln!(s, "tables {verdict} the expected entries for α ∈ {{{}}}", checked.join(", "));
        s
    };
    match ctx.format(Format::Text) {
        Format::Json => emit(
            ctx,
            &serde_json::to_string_pretty(&TablesOutput {
                schema: SCHEMA,
                command: "tables",
                seed: ctx.seed,
                passed,
                alphas: checked.clone(),
                mismatches: mismatches.clone(),
                catalog: catalog.clone(),
            })?,
        )?,
        _ => emit(ctx, &text())?,
    }
    Ok(passed)
}

#[derive(Serialize)]
struct OptimalOutput<'a> {
    schema: &'a str,
    command: &'a str,
    seed: u64,
    passed: bool,
    catalog: CatalogCase,
    equivalences: Vec<EquivalenceCheck>,
}

fn range_text(r: &ParamRange) -> String {
    match r {
        ParamRange::Values(v) => format!("∈ {{{}}}", v.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")),
        ParamRange::Real => "∈ ℝ".into(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.6}"))
}

pub fn optimal(args: &CaseArgs, ctx: &Ctx) -> Result<bool, CliError> {
    let alpha = args.alpha.clone().ok_or_else(|| CliError::Input("--alpha is required for optimal".into()))?;
    let case = resolve_case(args, &alpha)?;
    let catalog = catalog_case(&case, &alpha)?;
    let checks: Vec<EquivalenceCheck> =
        claims_for(&case, &alpha)?.iter().map(check_equivalence).collect::<Result<_, _>>()?;
    let passed = checks.iter().all(|c| c.passed);
    if ctx.format(Format::Text) == Format::Json {
        let out = OptimalOutput { schema: SCHEMA, command: "optimal", seed: ctx.seed, passed, catalog, equivalences: checks };
        emit(ctx, &serde_json::to_string_pretty(&out)?)?;
        return Ok(passed);
    }
    let mut s = format!("Optimal system, {} at α = {}\n", catalog.description, catalog.alpha);
    for el in &catalog.optimal_system {
        let _ = write!(s, "  {}: {}", el.id, el.x_basis);
        if let Some(y) = &el.y_basis {
            let _ = write!(s, "  ~  {y}");
        }
        let ranges: Vec<String> = el.params.iter().map(|p| format!("{} {}", p.name, range_text(&p.range))).collect();
        if !ranges.is_empty() {
            let _ = write!(s, "  [{}]", ranges.join(", "));
        }
        s.push('\n');
    }
    if !checks.is_empty() {
        s.push_str("Equivalences:\n");
    }
    for c in &checks {
        let _ = writeln!(
            s,
            "  {} {}: ε = {}, scale = {}, b = {}, mismatch = {}{}",
            if c.passed { "PASS" } else { "FAIL" },
            c.label,
            opt(c.epsilon),
            opt(c.scale),
            opt(c.free_value),
            c.reapplied_mismatch.map_or("-".into(), |x| format!("{x:.1e}")),
            if c.passed { String::new() } else { format!(" ({})", c.detail) }
        );
    }
    emit(ctx, &s)?;
    Ok(passed)
}
