//! The acceptance matrix, runnable from the library and the CLI.

use num_rational::BigRational;
use serde::Serialize;
use std::time::Instant;

use crate::catalog::{
    case21_claims, case22_claims, check_equivalence, coincidence_checks, compare_adjoint, compare_commutator,
    default_case22_a, table_algebra, tables_for, ClassificationCase,
};
use crate::error::{Error, Result};
use crate::catalog::invariance_surface_residual;
use crate::solutions::{family_19, family_5_1, lemma2_solve, power_rule_factor, Coupling};
use crate::special::{gamma, int, rat, to_f64};
use crate::symbolic::AlphaParameter;
use crate::verify::{
    convergence_study, cross_check_deviation, implicit_cross_checks, linspace, reference_cases, residual_system,
    rl_derivative_numeric, sequential_residual, QuadratureSpec, CROSS_CHECK_TOL, EXACT_TOL, QUADRATURE_TOL,
};

pub const POWER_RULE_REL_TOL: f64 = 1e-6;
pub const KERNEL_ABS_TOL: f64 = 1e-8;
pub const LEMMA2_TOL: f64 = 1e-10;
pub const ISC_TOL: f64 = 1e-8;
pub const SEQUENTIAL_TOL: f64 = 1e-8;
pub const STEPPER_MIN_REDUCTION: f64 = 1.5;
pub const STEPPER_FINEST_REL: f64 = 1e-2;
pub const STEPPER_LADDER: [usize; 4] = [25, 50, 100, 200];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub name: String,
    pub passed: bool,
    /// Worst measured quantity, where one exists.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
    pub seconds: f64,
    /// Extra runs outside the numbered criteria.
    pub supplementary: bool,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

struct Outcome {
    passed: bool,
    measured: Option<f64>,
    tolerance: Option<f64>,
    detail: String,
}

impl Outcome {
    fn bound(measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Outcome { passed: measured <= tolerance, measured: Some(measured), tolerance: Some(tolerance), detail: detail.into() }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub name: &'static str,
    pub supplementary: bool,
    run: fn() -> Result<Outcome>,
}

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        self.id == filter || self.name.contains(filter)
    }

    pub fn run(&self) -> CriterionResult {
        let start = Instant::now();
        let out = (self.run)().unwrap_or_else(|e| Outcome {
            passed: false,
            measured: None,
            tolerance: None,
            detail: format!("error: {e}"),
        });
        CriterionResult {
            id: self.id.to_string(),
            name: self.name.to_string(),
            passed: out.passed,
            measured: out.measured,
            tolerance: out.tolerance,
            detail: out.detail,
            seconds: start.elapsed().as_secs_f64(),
            supplementary: self.supplementary,
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: "1", name: "tables", supplementary: false, run: tables },
        Criterion { id: "2", name: "power-rule", supplementary: false, run: power_rule },
        Criterion { id: "3", name: "residuals", supplementary: false, run: residuals },
        Criterion { id: "4", name: "lemma2", supplementary: false, run: lemma2 },
        Criterion { id: "5", name: "invariance", supplementary: false, run: invariance },
        Criterion { id: "6", name: "equivalences", supplementary: false, run: equivalences },
        Criterion { id: "7", name: "sequential", supplementary: false, run: sequential },
        Criterion { id: "8", name: "coincidence", supplementary: false, run: coincidence },
        Criterion { id: "9", name: "time-stepper", supplementary: false, run: stepper_stated },
        Criterion { id: "9s", name: "time-stepper-alpha-1/3", supplementary: true, run: stepper_supplementary },
        Criterion { id: "10", name: "discrepancy-note", supplementary: false, run: discrepancy },
    ]
}

/// Runs every criterion matching `filter` (id or name substring).
pub fn run_selftest(filter: Option<&str>) -> Vec<CriterionResult> {
    criteria().iter().filter(|c| filter.is_none_or(|f| c.matches(f))).map(Criterion::run).collect()
}

fn alpha(n: i64, d: i64) -> AlphaParameter {
    AlphaParameter::from_ratio(n, d).expect("valid alpha")
}

fn tables() -> Result<Outcome> {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut cases = vec![(ClassificationCase::generic(), alpha(1, 2)), (ClassificationCase::generic(), alpha(2, 7))];
    for (a, m) in [(alpha(1, 3), int(2)), (alpha(2, 7), rat(1, 2)), (alpha(1, 2), int(-3)), (alpha(3, 4), rat(5, 3))] {
        cases.push((ClassificationCase::power_law(int(1), m, &a)?, a));
    }
    for a in [alpha(1, 3), alpha(1, 4), alpha(3, 5)] {
        cases.push((ClassificationCase::degenerate(rat(3, 2), &a)?, a));
    }
    for (case, a) in &cases {
        let alg = table_algebra(case, a)?;
        let (comm, adj) = tables_for(case);
        bad.extend(compare_commutator(comm, &alg));
        checked += 1;
        if let Some(adj) = adj {
            bad.extend(compare_adjoint(adj, &alg));
            checked += 1;
        }
    }
    Ok(Outcome {
        passed: bad.is_empty(),
        measured: Some(bad.len() as f64),
        tolerance: Some(0.0),
        detail: if bad.is_empty() {
            format!("{checked} table reproductions over {} parameter sets, exact", cases.len())
        } else {
            format!("{} mismatched entries, first in Table {}", bad.len(), bad[0].table)
        },
    })
}

fn power_rule() -> Result<Outcome> {
    let alphas = [alpha(1, 4), alpha(1, 3), alpha(1, 2), alpha(2, 3), alpha(3, 4)];
    let ps = [rat(-1, 2), rat(-1, 4), int(0), rat(1, 3), rat(1, 2), int(1), rat(3, 2), int(2), rat(5, 2), int(3)];
    let ts = [0.5, 1.0, 2.0];
    let (mut cases, mut kernel_cases) = (0usize, 0usize);
    let (mut worst_rel, mut worst_abs) = (0.0f64, 0.0f64);
    for a in &alphas {
        let af = a.as_f64();
        let kernel = a.value() - int(1);
        for p in ps.iter().chain(std::iter::once(&kernel)) {
            let pf = to_f64(p);
            let factor = power_rule_factor(p, a)?;
            let spec = QuadratureSpec::with_hint(pf)?;
            for &t in &ts {
                let f = |s: f64| Ok(s.powf(pf));
                let num = rl_derivative_numeric(&f, af, t, &spec)?;
                let exact = factor * t.powf(pf - af);
                if factor == 0.0 {
                    worst_abs = worst_abs.max(num.abs());
                    kernel_cases += 1;
                } else {
                    worst_rel = worst_rel.max((num - exact).abs() / exact.abs());
                }
                cases += 1;
            }
        }
    }
    let passed = worst_rel <= POWER_RULE_REL_TOL && worst_abs <= KERNEL_ABS_TOL && cases >= 60 && kernel_cases > 0;
    Ok(Outcome {
        passed,
        measured: Some(worst_rel),
        tolerance: Some(POWER_RULE_REL_TOL),
        detail: format!(
            "{cases} cases: max relative {worst_rel:.2e} (tol {POWER_RULE_REL_TOL:e}), {kernel_cases} kernel cases max |value| {worst_abs:.2e} (tol {KERNEL_ABS_TOL:e})"
        ),
    })
}

fn residuals() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut passed = true;
    let mut worst_ratio = 0.0f64;
    for c in reference_cases()? {
        if c.family.id.starts_with("flip") {
            continue;
        }
        let r = residual_system(&c.family, &c.grid, c.path)?;
        let ok = r.max() <= c.tolerance;
        passed &= ok;
        worst_ratio = worst_ratio.max(r.max() / c.tolerance);
        lines.push(format!("{} {:.1e}", c.family.id, r.max()));
    }
    for (curve, other) in implicit_cross_checks()? {
        let d = cross_check_deviation(&curve, &other)?;
        passed &= d <= CROSS_CHECK_TOL;
        worst_ratio = worst_ratio.max(d / CROSS_CHECK_TOL);
        lines.push(format!("20~{} {:.1e}", other.id, d));
    }
    Ok(Outcome {
        passed,
        measured: Some(worst_ratio),
        tolerance: Some(1.0),
        detail: format!("exact ≤ {EXACT_TOL:e}, quadrature ≤ {QUADRATURE_TOL:e}, cross-check ≤ {CROSS_CHECK_TOL:e}: {}", lines.join(", ")),
    })
}

fn lemma2() -> Result<Outcome> {
    let tuples: Vec<(BigRational, AlphaParameter, [BigRational; 4])> = vec![
        (int(3), alpha(1, 3), [int(2), int(-1), int(1), int(1)]),
        (int(2), alpha(1, 3), [int(3), int(-1), int(1), int(0)]),
        (rat(-1, 3), alpha(2, 5), [int(1), int(1), int(-2), int(1)]),
        (rat(1, 2), alpha(1, 5), [rat(3, 2), int(-5), rat(1, 2), int(5)]),
        (int(2), alpha(1, 2), [int(-1), int(0), int(1), int(0)]),
        (int(-2), alpha(1, 4), [int(1), int(2), int(1), int(-1)]),
        (int(1), alpha(1, 4), [int(2), int(-1), int(1), int(1)]),
    ];
    let (mut solved, mut worst) = (0, 0.0f64);
    let mut exponents_ok = true;
    for (m, a, [a1, a2, b1, b2]) in &tuples {
        let s = match lemma2_solve(m, a, a1, a2, b1, b2) {
            Ok(s) => s,
            Err(Error::NonrealRoot(_)) => continue,
            Err(e) => return Err(e),
        };
        exponents_ok &= s.lambda1.constant == int(0)
            && s.lambda1.alpha_coeff == -(int(1) / m)
            && s.lambda2.constant == int(0)
            && s.lambda2.alpha_coeff == -((m + int(1)) / m);
        for z in [0.3, 1.0, 2.7, 5.0] {
            let [r1, r2] = s.residual(z)?;
            worst = worst.max(r1.abs()).max(r2.abs());
        }
        solved += 1;
    }
    Ok(Outcome {
        passed: solved >= 5 && worst <= LEMMA2_TOL && exponents_ok,
        measured: Some(worst),
        tolerance: Some(LEMMA2_TOL),
        detail: format!("{solved} tuples solved, max residual {worst:.2e}, exponents exact: {exponents_ok}"),
    })
}

fn invariance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    let mut families = 0;
    for c in reference_cases()? {
        for (label, field) in c.family.generator_fields()? {
            let r = invariance_surface_residual(&field, &c.family, c.family.alpha.value(), &c.grid)?;
            worst = worst.max(r.max());
            lines.push(format!("{} vs {label} {:.1e}", c.family.id, r.max()));
        }
        families += 1;
    }
    for (curve, _) in implicit_cross_checks()? {
        let fam = curve.to_family()?;
        let (lo, hi) = crate::verify::curve_window(&curve);
        let grid = crate::verify::default_grid(&fam, Some((lo, hi)))?;
        for (label, field) in fam.generator_fields()? {
            let r = invariance_surface_residual(&field, &fam, fam.alpha.value(), &grid)?;
            worst = worst.max(r.max());
            lines.push(format!("20(m={}) vs {label} {:.1e}", curve.m, r.max()));
        }
        families += 1;
    }
    let mut out = Outcome::bound(worst, ISC_TOL, "");
    out.detail = format!("{families} families, max {worst:.2e} (tol {ISC_TOL:e}): {}", lines.join(", "));
    Ok(out)
}

fn equivalences() -> Result<Outcome> {
    let mut claims = Vec::new();
    for (a, m) in [(alpha(1, 3), int(2)), (alpha(1, 2), int(3)), (alpha(2, 5), rat(-1, 2))] {
        claims.extend(case21_claims(&a, &int(1), &m)?);
    }
    for a in [alpha(1, 3), alpha(3, 5)] {
        claims.extend(case22_claims(&a, &int(1), &default_case22_a())?);
    }
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for c in &claims {
        let r = check_equivalence(c)?;
        worst = worst.max(r.reapplied_mismatch.unwrap_or(f64::INFINITY));
        if !r.passed {
            failed.push(format!("{} ({})", r.label, r.detail));
        }
    }
    Ok(Outcome {
        passed: failed.is_empty(),
        measured: Some(worst),
        tolerance: Some(crate::catalog::EQUIVALENCE_TOL),
        detail: if failed.is_empty() {
            format!("{} claims, max re-applied mismatch {worst:.2e}", claims.len())
        } else {
            format!("failed: {}", failed.join("; "))
        },
    })
}

fn sequential() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut ids = Vec::new();
    for c in reference_cases()? {
        if !c.family.u.is_monomial() {
            continue;
        }
        let r = sequential_residual(&c.family, &c.grid)?;
        worst = worst.max(r.max());
        ids.push(c.family.id.clone());
    }
    let mut out = Outcome::bound(worst, SEQUENTIAL_TOL, "");
    out.detail = format!("{} families ({}), max {worst:.2e} (tol {SEQUENTIAL_TOL:e})", ids.len(), ids.join(", "));
    Ok(out)
}

fn coincidence() -> Result<Outcome> {
    let checks = coincidence_checks(&alpha(1, 3), &int(1), 10)?;
    let worst = checks.iter().fold(0.0f64, |m, c| m.max(c.max_deviation));
    let mut out = Outcome::bound(worst, crate::catalog::COINCIDENCE_TOL, "");
    out.passed &= checks.iter().all(|c| c.passed);
    out.detail = format!("α = 1/3, m = 1, 10×10 grid: {} checks, max deviation {worst:.2e}", checks.len());
    Ok(out)
}

fn stepper(a: AlphaParameter) -> Result<Outcome> {
    let f = family_19(&int(2), &int(1), &a)?;
    let xs = linspace(1.0, 2.0, 41);
    let s = convergence_study(&f, 1.0, 1.5, &STEPPER_LADDER, &xs)?;
    let red = s.min_reduction().unwrap_or(0.0);
    let finest = s.finest().map(|r| r.relative_error).unwrap_or(f64::INFINITY);
    let order = s.order.unwrap_or(f64::NAN);
    let af = a.as_f64();
    let passed = red >= STEPPER_MIN_REDUCTION && finest <= STEPPER_FINEST_REL && (af..=2.0).contains(&order);
    Ok(Outcome {
        passed,
        measured: Some(finest),
        tolerance: Some(STEPPER_FINEST_REL),
        detail: format!(
            "α = {a}, steps {:?}: min reduction {red:.3} (need ≥ {STEPPER_MIN_REDUCTION}), finest relative error {finest:.2e} (tol {STEPPER_FINEST_REL:e}), order {order:.3}",
            STEPPER_LADDER
        ),
    })
}

fn stepper_stated() -> Result<Outcome> {
    stepper(alpha(1, 2))
}

fn stepper_supplementary() -> Result<Outcome> {
    stepper(alpha(1, 3))
}

fn discrepancy() -> Result<Outcome> {
    let a = alpha(1, 2);
    let f = family_5_1(&int(1), &int(0), &int(0), &a, Coupling::power_law(int(1), int(1)))?;
    let computed = gamma(0.5) / gamma(1.0);
    let alternative = 1.0 / gamma(0.5);
    let has = |v: f64| f.notes.iter().any(|n| n.contains(&format!("{v:.12}")));
    let passed = f.notes.len() >= 2 && has(computed) && has(alternative);
    Ok(Outcome {
        passed,
        measured: None,
        tolerance: None,
        detail: format!("α = 1/2: aΓ(α)/Γ(2α) = {computed:.12}, a/Γ(α) = {alternative:.12}, note present: {passed}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_by_id_or_name() {
        let all = criteria();
        assert_eq!(all.iter().filter(|c| c.matches("tables")).count(), 1);
        assert_eq!(all.iter().filter(|c| c.matches("time-stepper")).count(), 2);
        assert_eq!(all.iter().filter(|c| c.matches("9s")).count(), 1);
    }

    #[test]
    fn stated_stepper_parameters_have_no_real_solution() {
        let r = run_selftest(Some("9"));
        assert_eq!(r.len(), 1);
        assert!(!r[0].passed && r[0].detail.contains("non-real"), "{}", r[0].detail);
    }

    #[test]
    fn quick_criteria_pass() {
        for r in run_selftest(Some("tables")).into_iter().chain(run_selftest(Some("lemma2"))) {
            assert!(r.passed, "{}", r.line());
        }
    }
}
