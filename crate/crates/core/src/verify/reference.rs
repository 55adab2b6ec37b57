use crate::error::{Error, Result};
use crate::solutions::{
    family_19, family_20_implicit, family_21, family_22, family_5_1, family_5_4, family_5_5, sign_flip, Coupling,
    ImplicitCurve, SolutionFamily,
};
use crate::special::{gamma, int, rat};
use crate::symbolic::AlphaParameter;

use super::report::GridSpec;
use super::residual::PathChoice;

/// Residual tolerance when every fractional derivative is exact.
pub const EXACT_TOL: f64 = 1e-8;
/// Residual tolerance when a fractional derivative goes through quadrature.
pub const QUADRATURE_TOL: f64 = 1e-5;
/// Agreement required between the implicit curve and its explicit limits.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

const NT: usize = 6;
const NX: usize = 6;
const T_RANGE: (f64, f64) = (0.5, 2.0);

/// A family with the grid and evaluation path it is checked on.
#[derive(Clone, Debug)]
pub struct ReferenceCase {
    pub family: SolutionFamily,
    pub grid: GridSpec,
    pub path: PathChoice,
    pub tolerance: f64,
}

impl ReferenceCase {
    fn new(family: SolutionFamily, x: Option<(f64, f64)>) -> Result<Self> {
        let grid = default_grid(&family, x)?;
        let (path, tolerance) =
            if family.is_monomial() { (PathChoice::Exact, EXACT_TOL) } else { (PathChoice::Quadrature, QUADRATURE_TOL) };
        Ok(ReferenceCase { family, grid, path, tolerance })
    }
}

fn param(f: &SolutionFamily, name: &str) -> Result<f64> {
    match f.params.get(name) {
        Some(s) => Ok(crate::special::to_f64(&crate::special::parse_rational(s)?)),
        None => Ok(0.0),
    }
}

/// A grid inside the family's domain: `t ∈ [0.5, 2]` and an x-interval
/// chosen per family, or `x` when given.
pub fn default_grid(family: &SolutionFamily, x: Option<(f64, f64)>) -> Result<GridSpec> {
    let id = family.id.trim_start_matches("flip(").trim_end_matches(')');
    let (x0, x1) = match x {
        Some(r) => r,
        None => match id {
            "19" => (0.5, 2.0),
            "21" => {
                let c2 = param(family, "c2")?;
                (c2 + 0.5, c2 + 2.0)
            }
            "22" => {
                let c2 = param(family, "c2")?;
                (c2 - 1.0, c2 + 1.0)
            }
            "5.5" => {
                // W = c1 + s·x; keep W between c1/4 and c1 (or its mirror)
                let (a, c1, k) = (param(family, "a")?, param(family, "c1")?, param(family, "k")?);
                let al = family.alpha_f64();
                let s = -a * gamma(al + 1.0) / (k * k * (1.0 - 2.0 * al));
                if c1 > 0.0 {
                    let far = -0.75 * c1 / s;
                    (far.min(0.0), far.max(0.0))
                } else {
                    let near = -c1 / s;
                    let far = (0.25 - c1) / s;
                    let lo = near.min(far);
                    let hi = near.max(far);
                    (lo + 0.25 * (hi - lo), hi)
                }
            }
            _ => (-1.0, 1.0),
        },
    };
    let grid = GridSpec::new(x0, x1, NX, T_RANGE.0, T_RANGE.1, NT)?;
    if let Some((x, t)) = grid.points().into_iter().find(|&(x, t)| !family.contains(x, t)) {
        return Err(Error::Domain(format!(
            "default grid leaves the domain of family {} at x = {x}, t = {t} ({})",
            family.id, family.domain_text
        )));
    }
    Ok(grid)
}

fn alpha(n: i64, d: i64) -> AlphaParameter {
    AlphaParameter::from_ratio(n, d).expect("valid alpha")
}

/// Inner 80% of an implicit curve's x-range.
pub fn curve_window(curve: &ImplicitCurve) -> (f64, f64) {
    let (lo, hi) = curve.x_range();
    (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))
}

/// The explicit families with the parameters they are checked at.
pub fn reference_cases() -> Result<Vec<ReferenceCase>> {
    let a13 = alpha(1, 3);
    let sqrt_coupling = Coupling::power_law(int(1), int(1));
    let f19 = family_19(&int(2), &int(1), &a13)?;
    let f19_sqrt = family_19(&rat(1, 2), &int(1), &alpha(1, 5))?;
    let families = vec![
        family_5_1(&int(1), &int(1), &int(1), &alpha(1, 2), sqrt_coupling.clone())?,
        family_5_1(&int(-1), &int(2), &int(0), &a13, sqrt_coupling.clone())?,
        family_5_1(&int(0), &int(2), &int(1), &a13, sqrt_coupling)?,
        f19,
        family_21(&int(2), &int(1), &a13, &rat(1, 2))?,
        family_21(&rat(1, 2), &int(1), &alpha(1, 5), &rat(1, 2))?,
        family_22(&int(1), &a13, &int(1), &int(0))?,
        family_22(&int(2), &alpha(1, 2), &int(3), &rat(1, 4))?,
        family_5_4(&int(1), &int(1), &int(2), &int(1), &a13)?,
        family_5_4(&int(-2), &int(-1), &rat(1, 2), &int(1), &alpha(1, 4))?,
        family_5_5(&int(1), &int(2), &int(0), &int(1), &a13)?,
        family_5_5(&int(-1), &int(1), &int(1), &int(1), &alpha(1, 4))?,
        sign_flip(&f19_sqrt)?,
    ];
    families.into_iter().map(|f| ReferenceCase::new(f, None)).collect()
}

/// Implicit curves for the cross-checks, paired with the explicit family
/// they must reproduce.
pub fn implicit_cross_checks() -> Result<Vec<(ImplicitCurve, SolutionFamily)>> {
    let a13 = alpha(1, 3);
    Ok(vec![
        (
            family_20_implicit(&int(2), &int(1), &a13, 0.0, 0.5, 0.0, (0.05, 2.0), 200)?,
            family_21(&int(2), &int(1), &a13, &rat(1, 2))?,
        ),
        (
            family_20_implicit(&rat(-1, 2), &int(1), &a13, 1.0, 0.0, 0.0, (-2.0, 2.0), 200)?,
            family_22(&int(1), &a13, &int(1), &int(0))?,
        ),
        (
            family_20_implicit(&rat(-1, 2), &int(1), &alpha(1, 2), 1.0, 0.0, 0.0, (-3.0, 3.0), 200)?,
            family_22(&int(1), &alpha(1, 2), &int(1), &int(0))?,
        ),
    ])
}

/// Max relative deviation between the curve's solution and `other` on a
/// grid over the curve window.
pub fn cross_check_deviation(curve: &ImplicitCurve, other: &SolutionFamily) -> Result<f64> {
    let fam = curve.to_family()?;
    let (lo, hi) = curve_window(curve);
    let grid = GridSpec::new(lo, hi, 11, T_RANGE.0, T_RANGE.1, 4)?;
    let mut dev = 0.0f64;
    for (x, t) in grid.points() {
        let (u1, v1) = fam.evaluate(x, t)?;
        let (u2, v2) = other.evaluate(x, t)?;
        dev = dev.max((u1 - u2).abs() / u2.abs().max(1.0)).max((v1 - v2).abs() / v2.abs().max(1.0));
    }
    Ok(dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_lie_in_domains() {
        let cases = reference_cases().unwrap();
        assert_eq!(cases.len(), 13);
        for c in &cases {
            for (x, t) in c.grid.points() {
                assert!(c.family.contains(x, t), "{} at ({x}, {t})", c.family.id);
            }
        }
        assert!(cases.iter().any(|c| c.path == PathChoice::Quadrature));
    }

    #[test]
    fn grid_override_checked() {
        let f = family_19(&int(2), &int(1), &alpha(1, 3)).unwrap();
        assert!(matches!(default_grid(&f, Some((-1.0, 1.0))), Err(Error::Domain(_))));
    }

    #[test]
    fn cross_checks_agree() {
        for (curve, other) in implicit_cross_checks().unwrap() {
            let d = cross_check_deviation(&curve, &other).unwrap();
            assert!(d < CROSS_CHECK_TOL, "{}: {d}", other.id);
        }
    }
}
