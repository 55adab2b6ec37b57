use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

use super::case::{degeneracy_expr, ClassificationCase, Subcase};
use crate::error::{Error, Result};
use crate::lie::AlgebraElement;
use crate::special::int;
use crate::symbolic::{AlphaParameter, ScalarExpr};

/// Allowed values of an element parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum ParamRange {
    /// One of the listed integers.
    Values(Vec<i64>),
    /// Any rational number.
    Real,
}

impl ParamRange {
    pub fn contains(&self, v: &BigRational) -> bool {
        match self {
            ParamRange::Values(vals) => vals.iter().any(|&k| *v == int(k)),
            ParamRange::Real => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub range: ParamRange,
}

pub type ParamValues = BTreeMap<String, BigRational>;

/// Element coordinates affine in its parameters: `base + Σ p · direction_p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamLinear {
    pub base: AlgebraElement,
    pub directions: Vec<(String, AlgebraElement)>,
}

impl ParamLinear {
    fn fixed(base: AlgebraElement) -> Self {
        ParamLinear { base, directions: Vec::new() }
    }

    fn with(base: AlgebraElement, dirs: &[(&str, AlgebraElement)]) -> Self {
        ParamLinear { base, directions: dirs.iter().map(|(n, e)| (n.to_string(), e.clone())).collect() }
    }

    pub fn instantiate(&self, params: &ParamValues) -> Result<AlgebraElement> {
        let mut out = self.base.clone();
        for (name, dir) in &self.directions {
            let v = params
                .get(name)
                .ok_or_else(|| Error::InvalidInput(format!("missing parameter {name}")))?;
            out = out.add(&dir.scale(&ScalarExpr::constant(v.clone())));
        }
        Ok(out)
    }
}

/// One member of an optimal system of one-dimensional subalgebras.
#[derive(Clone, Debug, Serialize)]
pub struct OptimalSystemElement {
    pub id: String,
    pub case: String,
    pub index: usize,
    /// Coordinates over X1..Xn.
    pub x_coords: ParamLinear,
    /// Coordinates over Y1..Y4 (power-law cases only).
    pub y_coords: Option<ParamLinear>,
    pub params: Vec<ParamSpec>,
}

impl OptimalSystemElement {
    pub fn check_params(&self, params: &ParamValues) -> Result<()> {
        for spec in &self.params {
            let v = params
                .get(spec.name)
                .ok_or_else(|| Error::InvalidInput(format!("{} requires parameter {}", self.id, spec.name)))?;
            if !spec.range.contains(v) {
                return Err(Error::InvalidInput(format!(
                    "{}: parameter {} = {v} outside {:?}",
                    self.id, spec.name, spec.range
                )));
            }
        }
        Ok(())
    }

    pub fn x_element(&self, params: &ParamValues) -> Result<AlgebraElement> {
        self.check_params(params)?;
        self.x_coords.instantiate(params)
    }

    pub fn y_element(&self, params: &ParamValues) -> Result<Option<AlgebraElement>> {
        self.check_params(params)?;
        self.y_coords.as_ref().map(|c| c.instantiate(params)).transpose()
    }

    /// A representative admissible parameter assignment.
    pub fn sample_params(&self) -> ParamValues {
        self.params
            .iter()
            .map(|p| {
                let v = match &p.range {
                    ParamRange::Values(vals) => int(*vals.iter().find(|&&k| k != 0).unwrap_or(&vals[0])),
                    ParamRange::Real => BigRational::new(3.into(), 2.into()),
                };
                (p.name.to_string(), v)
            })
            .collect()
    }
}

fn el(c: Vec<ScalarExpr>) -> AlgebraElement {
    AlgebraElement::new(c)
}

fn ints(c: &[i64]) -> AlgebraElement {
    AlgebraElement::from_ints(c)
}

fn sign() -> ParamRange {
    ParamRange::Values(vec![1, -1])
}

fn trio() -> ParamRange {
    ParamRange::Values(vec![0, 1, -1])
}

fn element(
    case: &str,
    index: usize,
    x: ParamLinear,
    y: Option<ParamLinear>,
    params: Vec<ParamSpec>,
) -> OptimalSystemElement {
    OptimalSystemElement { id: format!("Case{case}-U{index}"), case: case.to_string(), index, x_coords: x, y_coords: y, params }
}

/// The optimal system for the case, with parameter ranges as listed for
/// each element.
pub fn optimal_system(case: &ClassificationCase, alpha: &AlphaParameter) -> Result<Vec<OptimalSystemElement>> {
    case.check_alpha(alpha)?;
    let z = ScalarExpr::zero;
    Ok(match case {
        ClassificationCase::Generic => vec![
            element(
                "1",
                1,
                ParamLinear::with(ints(&[1, 0, 0]), &[("a", ints(&[0, 1, 0]))]),
                None,
                vec![ParamSpec { name: "a", range: trio() }],
            ),
            element("1", 2, ParamLinear::fixed(ints(&[0, 0, 1])), None, vec![]),
            element("1", 3, ParamLinear::fixed(ints(&[0, 1, 0])), None, vec![]),
        ],
        ClassificationCase::PowerLaw { m, subcase: Subcase::Regular, .. } => {
            let d = degeneracy_expr(m);
            let mm = ScalarExpr::constant(m.clone());
            let a = ScalarExpr::alpha();
            let one = ScalarExpr::one();
            let ma = &mm * &a;
            let d_over_ma = &d / &ma;
            let y4_coef = &(&one - &a) / &a;
            vec![
                element(
                    "2.1",
                    1,
                    ParamLinear::with(ints(&[-1, 0, 0, 0]), &[("a", ints(&[0, -1, 0, 0]))]),
                    Some(ParamLinear::with(ints(&[0, 1, 0, 0]), &[("a", ints(&[0, 0, 0, 1]))])),
                    vec![ParamSpec { name: "a", range: trio() }],
                ),
                element(
                    "2.1",
                    2,
                    ParamLinear::with(ints(&[-1, 0, 0, 0]), &[("a", ints(&[0, 0, 1, -1]))]),
                    Some(ParamLinear::with(ints(&[0, 1, 0, 0]), &[("a", el(vec![z(), z(), d_over_ma.clone(), z()]))])),
                    vec![ParamSpec { name: "a", range: sign() }],
                ),
                element(
                    "2.1",
                    3,
                    ParamLinear::with(
                        el(vec![z(), z(), -&(&(&mm + &one) * &a), -&(&mm * &(&a - &one))]),
                        &[("a", ints(&[0, -1, 0, 0]))],
                    ),
                    Some(ParamLinear::with(el(vec![d.clone(), z(), z(), z()]), &[("a", ints(&[0, 0, 0, 1]))])),
                    vec![ParamSpec { name: "a", range: sign() }],
                ),
                element(
                    "2.1",
                    4,
                    ParamLinear::with(ints(&[0, 0, -1, 0]), &[("a", ints(&[0, 0, 1, -1]))]),
                    Some(ParamLinear::with(
                        el(vec![one.clone(), z(), y4_coef, z()]),
                        &[("a", el(vec![z(), z(), d_over_ma.clone(), z()]))],
                    )),
                    vec![ParamSpec { name: "a", range: ParamRange::Real }],
                ),
                element(
                    "2.1",
                    5,
                    ParamLinear::fixed(ints(&[0, 0, 1, -1])),
                    Some(ParamLinear::fixed(el(vec![z(), z(), d_over_ma, z()]))),
                    vec![],
                ),
                element(
                    "2.1",
                    6,
                    ParamLinear::fixed(ints(&[0, -1, 0, 0])),
                    Some(ParamLinear::fixed(ints(&[0, 0, 0, 1]))),
                    vec![],
                ),
            ]
        }
        ClassificationCase::PowerLaw { subcase: Subcase::Degenerate, .. } => vec![
            element(
                "2.2",
                1,
                ParamLinear::with(ints(&[1, 0, 0, 0]), &[("a", ints(&[0, 1, 0, 0]))]),
                Some(ParamLinear::with(ints(&[1, 0, 0, 0]), &[("a", ints(&[0, 1, 0, 0]))])),
                vec![ParamSpec { name: "a", range: trio() }],
            ),
            element(
                "2.2",
                2,
                ParamLinear::with(ints(&[1, 0, 0, 0]), &[("a1", ints(&[0, 1, 0, 0])), ("a2", ints(&[0, 0, -1, 1]))]),
                Some(ParamLinear::with(
                    ints(&[1, 0, 0, 0]),
                    &[("a1", ints(&[0, 1, 0, 0])), ("a2", ints(&[0, 0, 0, 1]))],
                )),
                vec![ParamSpec { name: "a1", range: ParamRange::Real }, ParamSpec { name: "a2", range: sign() }],
            ),
            element(
                "2.2",
                3,
                ParamLinear::with(ints(&[0, 0, 1, 0]), &[("a", ints(&[0, 0, -1, 1]))]),
                Some(ParamLinear::with(ints(&[0, 0, 1, -1]), &[("a", ints(&[0, 0, 0, 1]))])),
                vec![ParamSpec { name: "a", range: ParamRange::Real }],
            ),
            element(
                "2.2",
                4,
                ParamLinear::with(ints(&[0, 0, -1, 1]), &[("a", ints(&[0, 1, 0, 0]))]),
                Some(ParamLinear::with(ints(&[0, 0, 0, 1]), &[("a", ints(&[0, 1, 0, 0]))])),
                vec![ParamSpec { name: "a", range: trio() }],
            ),
            element(
                "2.2",
                5,
                ParamLinear::fixed(ints(&[0, 1, 0, 0])),
                Some(ParamLinear::fixed(ints(&[0, 1, 0, 0]))),
                vec![],
            ),
        ],
    })
}

/// Look up an element by its 1-based index.
pub fn optimal_element(
    case: &ClassificationCase,
    alpha: &AlphaParameter,
    index: usize,
) -> Result<OptimalSystemElement> {
    optimal_system(case, alpha)?
        .into_iter()
        .find(|e| e.index == index)
        .ok_or_else(|| Error::InvalidInput(format!("Case {} has no element U{index}", case.label())))
}

pub fn params(pairs: &[(&str, BigRational)]) -> ParamValues {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

pub fn param_f64(p: &ParamValues, name: &str) -> f64 {
    p.get(name).map(crate::special::to_f64).unwrap_or(0.0)
}

pub fn param_or_zero(p: &ParamValues, name: &str) -> BigRational {
    p.get(name).cloned().unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::case::{basis_change, generators, y_in_x};
    use crate::lie::decompose;
    use crate::special::rat;

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    #[test]
    fn list_sizes_and_named_members() {
        let a = alpha(1, 3);
        assert_eq!(optimal_system(&ClassificationCase::generic(), &a).unwrap().len(), 3);
        let c21 = ClassificationCase::power_law(int(1), int(2), &a).unwrap();
        let l = optimal_system(&c21, &a).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(l[4].x_element(&ParamValues::new()).unwrap(), ints(&[0, 0, 1, -1]));
        let c22 = ClassificationCase::degenerate(int(1), &a).unwrap();
        let l = optimal_system(&c22, &a).unwrap();
        assert_eq!(l.len(), 5);
        let u4 = l[3].x_element(&params(&[("a", int(1))])).unwrap();
        assert_eq!(u4, ints(&[0, 1, -1, 1]));
        assert!(l[3].x_element(&params(&[("a", int(2))])).is_err());
    }

    /// The X- and Y-coordinates of each element describe the same field.
    #[test]
    fn x_and_y_coordinates_agree() {
        let a = alpha(1, 3);
        for case in [
            ClassificationCase::power_law(int(1), int(2), &a).unwrap(),
            ClassificationCase::power_law(rat(3, 1), rat(-1, 3), &a).unwrap(),
            ClassificationCase::degenerate(int(1), &a).unwrap(),
        ] {
            let rec = generators(&case, &a).unwrap();
            let sub = if case.label() == "2.1" { Subcase::Regular } else { Subcase::Degenerate };
            let ya = basis_change(sub, &rec).unwrap();
            let xa = rec.algebra().unwrap();
            assert_eq!(y_in_x(&rec, sub).unwrap().len(), 4);
            for e in optimal_system(&case, &a).unwrap() {
                for p in [e.sample_params(), e.sample_params().into_iter().map(|(k, _)| (k, rat(-2, 7))).collect()] {
                    if e.check_params(&p).is_err() {
                        continue;
                    }
                    let xf = xa.realize(&e.x_element(&p).unwrap());
                    let yc = e.y_element(&p).unwrap().unwrap();
                    assert_eq!(decompose(&xf, &ya).unwrap(), yc, "{}", e.id);
                }
            }
        }
    }
}
