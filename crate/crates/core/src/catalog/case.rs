use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::lie::{direct_sum_check, structure_constants, LieAlgebra, VectorField};
use crate::special::{int, to_f64};
use crate::symbolic::{AlphaParameter, ExponentExpr, MonomialSum, Poly, ScalarExpr, Var};

/// Power-law subcase, split on the sign of `2mα + α - m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subcase {
    Regular,
    Degenerate,
}

/// Group classification of the system by its coupling `b(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassificationCase {
    /// Arbitrary `b(u)`: three symmetries.
    Generic,
    /// `b(u) = k u^m`: four symmetries.
    PowerLaw { k: BigRational, m: BigRational, subcase: Subcase },
}

/// `2mα + α - m` at an exact alpha.
pub fn degeneracy(m: &BigRational, alpha: &BigRational) -> BigRational {
    int(2) * m * alpha + alpha - m
}

impl ClassificationCase {
    pub fn generic() -> Self {
        ClassificationCase::Generic
    }

    /// Power-law case; the subcase is read off from `alpha`.
    pub fn power_law(k: BigRational, m: BigRational, alpha: &AlphaParameter) -> Result<Self> {
        if k.is_zero() || m.is_zero() {
            return Err(Error::InvalidCase("b(u) = k u^m requires k, m ≠ 0".into()));
        }
        let subcase =
            if degeneracy(&m, alpha.value()).is_zero() { Subcase::Degenerate } else { Subcase::Regular };
        Ok(ClassificationCase::PowerLaw { k, m, subcase })
    }

    /// The degenerate case `m = α/(1 - 2α)`.
    pub fn degenerate(k: BigRational, alpha: &AlphaParameter) -> Result<Self> {
        let a = alpha.value();
        let two_a = int(2) * a;
        if two_a.is_one() {
            return Err(Error::InvalidCase("m = α/(1-2α) requires α ≠ 1/2".into()));
        }
        let m = a / (BigRational::one() - two_a);
        ClassificationCase::power_law(k, m, alpha)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClassificationCase::Generic => "1",
            ClassificationCase::PowerLaw { subcase: Subcase::Regular, .. } => "2.1",
            ClassificationCase::PowerLaw { subcase: Subcase::Degenerate, .. } => "2.2",
        }
    }

    pub fn k(&self) -> Option<&BigRational> {
        match self {
            ClassificationCase::PowerLaw { k, .. } => Some(k),
            _ => None,
        }
    }

    pub fn m(&self) -> Option<&BigRational> {
        match self {
            ClassificationCase::PowerLaw { m, .. } => Some(m),
            _ => None,
        }
    }

    pub fn m_f64(&self) -> Option<f64> {
        self.m().map(to_f64)
    }

    pub fn k_f64(&self) -> Option<f64> {
        self.k().map(to_f64)
    }

    /// Re-derive the subcase at `alpha` and reject inconsistent use.
    pub fn check_alpha(&self, alpha: &AlphaParameter) -> Result<()> {
        alpha.require_unit_interval()?;
        if let ClassificationCase::PowerLaw { m, subcase, .. } = self {
            let deg = degeneracy(m, alpha.value()).is_zero();
            if deg != (*subcase == Subcase::Degenerate) {
                return Err(Error::InvalidCase(format!("subcase of m = {m} does not match α = {alpha}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ClassificationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassificationCase::Generic => write!(f, "Case 1 (generic b(u))"),
            ClassificationCase::PowerLaw { k, m, .. } => {
                write!(f, "Case {} (b(u) = {k}·u^{m})", self.label())
            }
        }
    }
}

/// Named generators of the symmetry algebra of one case.
#[derive(Clone, Debug)]
pub struct SymmetryRecord {
    pub case: ClassificationCase,
    pub alpha: AlphaParameter,
    pub generators: Vec<(String, VectorField)>,
}

impl SymmetryRecord {
    pub fn field(&self, i: usize) -> &VectorField {
        &self.generators[i].1
    }

    pub fn algebra(&self) -> Result<LieAlgebra> {
        structure_constants(self.generators.clone())
    }
}

fn alpha_inv() -> ScalarExpr {
    ScalarExpr::alpha().inv().expect("alpha is not the zero expression")
}

/// `m` as a rational function of alpha: a constant in the regular case,
/// `α/(1 - 2α)` in the degenerate case.
pub fn m_expr(case: &ClassificationCase) -> Option<ScalarExpr> {
    match case {
        ClassificationCase::Generic => None,
        ClassificationCase::PowerLaw { m, subcase: Subcase::Regular, .. } => Some(ScalarExpr::constant(m.clone())),
        ClassificationCase::PowerLaw { subcase: Subcase::Degenerate, .. } => {
            let den = ScalarExpr::poly(Poly::linear(int(1), int(-2)));
            Some(&ScalarExpr::alpha() / &den)
        }
    }
}

/// `2mα + α - m` with alpha symbolic and the given rational m.
pub fn degeneracy_expr(m: &BigRational) -> ScalarExpr {
    ScalarExpr::poly(Poly::linear(-m.clone(), int(2) * m + int(1)))
}

/// X1 = ∂x, X2 = t^{α-1}∂v, X3 = x∂x + (t/α)∂t, and for power-law
/// couplings X4 = x∂x + (u/m)∂u + ((1+m)/m) v∂v.
pub fn generators(case: &ClassificationCase, alpha: &AlphaParameter) -> Result<SymmetryRecord> {
    case.check_alpha(alpha)?;
    let x1 = VectorField { xi: MonomialSum::one(), ..Default::default() };
    let x2 = VectorField { phi: MonomialSum::power(Var::T, ExponentExpr::alpha_plus(-1)), ..Default::default() };
    let x3 = VectorField {
        xi: MonomialSum::var(Var::X),
        tau: MonomialSum::var(Var::T).scale(&alpha_inv()),
        ..Default::default()
    };
    let mut generators = vec![("X1".to_string(), x1), ("X2".to_string(), x2), ("X3".to_string(), x3)];
    if let Some(m) = m_expr(case) {
        let inv_m = m.inv()?;
        let x4 = VectorField {
            xi: MonomialSum::var(Var::X),
            mu: MonomialSum::var(Var::U).scale(&inv_m),
            phi: MonomialSum::var(Var::V).scale(&(&(&ScalarExpr::one() + &m) * &inv_m)),
            ..Default::default()
        };
        generators.push(("X4".to_string(), x4));
    }
    Ok(SymmetryRecord { case: case.clone(), alpha: alpha.clone(), generators })
}

/// Coordinates of the Y-basis over the X-basis, rows Y1..Y4.
pub fn y_in_x(record: &SymmetryRecord, subcase: Subcase) -> Result<Vec<Vec<ScalarExpr>>> {
    let ClassificationCase::PowerLaw { m, subcase: actual, .. } = &record.case else {
        return Err(Error::InvalidCase("the Y-basis exists only for power-law couplings".into()));
    };
    match (subcase, actual) {
        (Subcase::Regular, Subcase::Degenerate) => return Err(Error::DegenerateDenominator),
        (Subcase::Degenerate, Subcase::Regular) => {
            return Err(Error::InvalidCase(format!(
                "m = {m} is not α/(1-2α) at α = {}",
                record.alpha
            )))
        }
        _ => {}
    }
    let z = ScalarExpr::zero;
    let one = ScalarExpr::one;
    let neg = || ScalarExpr::int(-1);
    Ok(match subcase {
        Subcase::Regular => {
            let d = degeneracy_expr(m);
            let mm = ScalarExpr::constant(m.clone());
            let a = ScalarExpr::alpha();
            let y1_3 = -&(&(&(&mm + &one()) * &a) / &d);
            let y1_4 = -&(&(&mm * &(&a - &one())) / &d);
            let y3 = &(&mm * &a) / &d;
            vec![
                vec![z(), z(), y1_3, y1_4],
                vec![neg(), z(), z(), z()],
                vec![z(), z(), y3.clone(), -&y3],
                vec![z(), neg(), z(), z()],
            ]
        }
        Subcase::Degenerate => vec![
            vec![one(), z(), z(), z()],
            vec![z(), one(), z(), z()],
            vec![z(), z(), z(), one()],
            vec![z(), z(), neg(), one()],
        ],
    })
}

/// Algebra in the Y-basis chosen for the subcase.
pub fn basis_change(subcase: Subcase, record: &SymmetryRecord) -> Result<LieAlgebra> {
    let rows = y_in_x(record, subcase)?;
    let fields: Vec<(String, VectorField)> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let terms: Vec<_> = row.iter().cloned().zip(record.generators.iter().map(|g| &g.1)).collect();
            (format!("Y{}", i + 1), VectorField::linear_combination(&terms))
        })
        .collect();
    let alg = structure_constants(fields)?;
    let (l, r): (&[usize], &[usize]) = match subcase {
        Subcase::Regular => (&[0, 1], &[2, 3]),
        Subcase::Degenerate => (&[0, 1, 2], &[3]),
    };
    debug_assert!(direct_sum_check(&alg, l, r));
    Ok(alg)
}

/// Member of the kernel of D^α: `t^{α-j}` for `j = 1..n`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelMember {
    pub exponent: ExponentExpr,
    #[serde(skip)]
    pub function: MonomialSum,
    /// False when the exponent is `≤ -1`, where the derivative is undefined.
    pub in_domain: bool,
}

pub fn kernel_solutions(alpha: &AlphaParameter, n: i64) -> Result<Vec<KernelMember>> {
    if n < 1 || alpha.ceil() != n {
        return Err(Error::InvalidInput(format!("n = {n} does not satisfy n-1 < α < n for α = {alpha}")));
    }
    Ok((1..=n)
        .map(|j| {
            let exponent = ExponentExpr::alpha_plus(-j);
            KernelMember {
                in_domain: exponent.exceeds_minus_one(alpha.value()),
                function: MonomialSum::power(Var::T, exponent.clone()),
                exponent,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::rat;
    use crate::symbolic::rl_derivative_t;

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    #[test]
    fn generator_examples() {
        let g = generators(&ClassificationCase::generic(), &alpha(1, 3)).unwrap();
        assert_eq!(g.generators.len(), 3);
        assert_eq!(g.field(2).tau.evaluate(&rat(1, 3), [0.0, 1.5, 0.0, 0.0]).unwrap(), 4.5);
        let c = ClassificationCase::power_law(int(1), rat(1, 2), &alpha(1, 3)).unwrap();
        let g = generators(&c, &alpha(1, 3)).unwrap();
        assert_eq!(g.generators.len(), 4);
        assert_eq!(g.field(3).mu, MonomialSum::var(Var::U).scale(&ScalarExpr::int(2)));
        assert_eq!(g.field(3).phi, MonomialSum::var(Var::V).scale(&ScalarExpr::int(3)));
        assert!(matches!(
            ClassificationCase::power_law(int(1), int(0), &alpha(1, 3)),
            Err(Error::InvalidCase(_))
        ));
    }

    #[test]
    fn subcase_detection() {
        let c = ClassificationCase::power_law(int(1), int(1), &alpha(1, 3)).unwrap();
        assert_eq!(c.label(), "2.2");
        let r = generators(&c, &alpha(1, 3)).unwrap();
        assert!(matches!(basis_change(Subcase::Regular, &r), Err(Error::DegenerateDenominator)));
        assert!(basis_change(Subcase::Degenerate, &r).is_ok());
        assert!(ClassificationCase::degenerate(int(1), &alpha(1, 2)).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_solutions(&alpha(1, 2), 1).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].exponent.eval(&rat(1, 2)), rat(-1, 2));
        let k = kernel_solutions(&alpha(3, 2), 2).unwrap();
        let ex: Vec<_> = k.iter().map(|m| m.exponent.eval(&rat(3, 2))).collect();
        assert_eq!(ex, vec![rat(1, 2), rat(-1, 2)]);
        for m in &k {
            assert!(m.in_domain);
            assert!(rl_derivative_t(&m.function, &alpha(3, 2)).unwrap().is_zero());
        }
        assert!(kernel_solutions(&alpha(3, 2), 1).is_err());
    }
}
