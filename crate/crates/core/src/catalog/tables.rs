use num_rational::BigRational;
use serde::Serialize;

use super::case::{basis_change, generators, ClassificationCase, Subcase};
use super::optimal::optimal_system;
use super::reduction::{similarity_reduction, ReductionOutcome};
use crate::error::Result;
use crate::lie::{adjoint_form, AdjointForm, AlgebraElement, LieAlgebra};
use crate::symbolic::{AlphaParameter, ScalarExpr};

/// Which reference table an algebra is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableId {
    Commutator1,
    Commutator3,
    Commutator7,
    Adjoint4,
    Adjoint8,
}

impl TableId {
    pub fn number(self) -> u32 {
        match self {
            TableId::Commutator1 => 1,
            TableId::Commutator3 => 3,
            TableId::Commutator7 => 7,
            TableId::Adjoint4 => 4,
            TableId::Adjoint8 => 8,
        }
    }
}

fn one_minus_alpha_over_alpha() -> ScalarExpr {
    &(&ScalarExpr::one() - &ScalarExpr::alpha()) / &ScalarExpr::alpha()
}

fn basis(i: usize, n: usize) -> AlgebraElement {
    AlgebraElement::basis(i, n)
}

/// Expected `[B_i, B_j]` for the listed nonzero upper-triangle entries,
/// completed by antisymmetry.
fn commutator_from(n: usize, entries: &[(usize, usize, AlgebraElement)]) -> Vec<Vec<AlgebraElement>> {
    let mut t = vec![vec![AlgebraElement::zero(n); n]; n];
    for (i, j, e) in entries {
        t[*i][*j] = e.clone();
        t[*j][*i] = e.scale(&ScalarExpr::int(-1));
    }
    t
}

/// The reference commutator tables, entry `[i][j] = [B_i, B_j]`.
pub fn expected_commutator(id: TableId) -> Vec<Vec<AlgebraElement>> {
    let c = one_minus_alpha_over_alpha();
    match id {
        TableId::Commutator1 => commutator_from(3, &[(0, 2, basis(0, 3)), (1, 2, basis(1, 3).scale(&c))]),
        TableId::Commutator3 => commutator_from(4, &[(0, 1, basis(1, 4)), (2, 3, basis(3, 4))]),
        TableId::Commutator7 => commutator_from(4, &[(0, 2, basis(0, 4)), (1, 2, basis(1, 4).scale(&c))]),
        _ => panic!("{id:?} is not a commutator table"),
    }
}

/// The reference adjoint tables, entry `[i][j] = Ad(e^{εY_i}) Y_j`.
///
/// The Case 2.1 entry `Ad(e^{εY1})Y2` is the scalar multiple `e^{-ε} Y2`.
pub fn expected_adjoint(id: TableId) -> Vec<Vec<AdjointForm>> {
    let n = 4;
    let fixed = |j: usize| AdjointForm::Polynomial(vec![basis(j, n)]);
    let mut t: Vec<Vec<AdjointForm>> = (0..n).map(|_| (0..n).map(fixed).collect()).collect();
    match id {
        TableId::Adjoint4 => {
            t[0][1] = AdjointForm::Exponential { rate: ScalarExpr::int(-1), element: basis(1, n) };
            t[1][0] = AdjointForm::Polynomial(vec![basis(0, n), basis(1, n)]);
            t[2][3] = AdjointForm::Exponential { rate: ScalarExpr::int(-1), element: basis(3, n) };
            t[3][2] = AdjointForm::Polynomial(vec![basis(2, n), basis(3, n)]);
        }
        TableId::Adjoint8 => {
            let c = one_minus_alpha_over_alpha();
            t[0][2] = AdjointForm::Polynomial(vec![basis(2, n), basis(0, n).scale(&ScalarExpr::int(-1))]);
            t[1][2] = AdjointForm::Polynomial(vec![basis(2, n), basis(1, n).scale(&-&c)]);
            t[2][0] = AdjointForm::Exponential { rate: ScalarExpr::one(), element: basis(0, n) };
            t[2][1] = AdjointForm::Exponential { rate: c, element: basis(1, n) };
        }
        _ => panic!("{id:?} is not an adjoint table"),
    }
    t
}

/// One disagreement between a computed and a reference entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableMismatch {
    pub table: u32,
    pub row: String,
    pub col: String,
    pub expected: String,
    pub computed: String,
}

pub fn compare_commutator(id: TableId, algebra: &LieAlgebra) -> Vec<TableMismatch> {
    let expected = expected_commutator(id);
    let mut out = Vec::new();
    for i in 0..algebra.dim() {
        for j in 0..algebra.dim() {
            let got = algebra.bracket_basis(i, j);
            if got != expected[i][j] {
                out.push(TableMismatch {
                    table: id.number(),
                    row: algebra.names()[i].clone(),
                    col: algebra.names()[j].clone(),
                    expected: algebra.render(&expected[i][j]),
                    computed: algebra.render(&got),
                });
            }
        }
    }
    out
}

pub fn compute_adjoint_table(algebra: &LieAlgebra) -> Vec<Vec<AdjointForm>> {
    let n = algebra.dim();
    (0..n)
        .map(|i| (0..n).map(|j| adjoint_form(&basis(i, n), &basis(j, n), algebra)).collect())
        .collect()
}

pub fn compare_adjoint(id: TableId, algebra: &LieAlgebra) -> Vec<TableMismatch> {
    let expected = expected_adjoint(id);
    let got = compute_adjoint_table(algebra);
    let mut out = Vec::new();
    for i in 0..algebra.dim() {
        for j in 0..algebra.dim() {
            if got[i][j] != expected[i][j] {
                out.push(TableMismatch {
                    table: id.number(),
                    row: algebra.names()[i].clone(),
                    col: algebra.names()[j].clone(),
                    expected: expected[i][j].render(algebra),
                    computed: got[i][j].render(algebra),
                });
            }
        }
    }
    out
}

/// The algebra whose tables are listed for a case: the X-basis for the
/// generic case, the Y-basis otherwise.
pub fn table_algebra(case: &ClassificationCase, alpha: &AlphaParameter) -> Result<LieAlgebra> {
    let rec = generators(case, alpha)?;
    match case {
        ClassificationCase::Generic => rec.algebra(),
        ClassificationCase::PowerLaw { subcase, .. } => basis_change(*subcase, &rec),
    }
}

pub fn tables_for(case: &ClassificationCase) -> (TableId, Option<TableId>) {
    match case {
        ClassificationCase::Generic => (TableId::Commutator1, None),
        ClassificationCase::PowerLaw { subcase: Subcase::Regular, .. } => (TableId::Commutator3, Some(TableId::Adjoint4)),
        ClassificationCase::PowerLaw { subcase: Subcase::Degenerate, .. } => {
            (TableId::Commutator7, Some(TableId::Adjoint8))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogElement {
    pub id: String,
    pub x_basis: String,
    pub y_basis: Option<String>,
    pub params: Vec<super::optimal::ParamSpec>,
    pub z: Option<String>,
    pub u: Option<String>,
    pub v: Option<String>,
    pub reduced: Option<[String; 2]>,
    pub validity: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogCase {
    pub case: String,
    pub description: String,
    pub alpha: String,
    pub m: Option<String>,
    pub k: Option<String>,
    pub generators: Vec<(String, String)>,
    pub basis: Vec<String>,
    pub commutator: Vec<Vec<String>>,
    pub adjoint: Option<Vec<Vec<String>>>,
    pub optimal_system: Vec<CatalogElement>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogDocument {
    pub schema: &'static str,
    pub cases: Vec<CatalogCase>,
}

fn param_text(spec: &super::optimal::ParamLinear, names: &[String]) -> String {
    let mut s = spec.base.render(names);
    for (p, dir) in &spec.directions {
        s.push_str(&format!(" + {p}·({})", dir.render(names)));
    }
    s.replace("0 + ", "")
}

/// Serializable description of one case at a fixed alpha.
pub fn catalog_case(case: &ClassificationCase, alpha: &AlphaParameter) -> Result<CatalogCase> {
    let rec = generators(case, alpha)?;
    let alg = table_algebra(case, alpha)?;
    let x_names: Vec<String> = rec.generators.iter().map(|g| g.0.clone()).collect();
    let y_names: Vec<String> = alg.names().to_vec();
    let n = alg.dim();
    let commutator = (0..n).map(|i| (0..n).map(|j| alg.render(&alg.bracket_basis(i, j))).collect()).collect();
    let adjoint = match case {
        ClassificationCase::Generic => None,
        _ => Some(
            compute_adjoint_table(&alg).iter().map(|row| row.iter().map(|f| f.render(&alg)).collect()).collect(),
        ),
    };
    let mut elements = Vec::new();
    for el in optimal_system(case, alpha)? {
        let sample = el.sample_params();
        let red = match similarity_reduction(case, alpha, &el, &sample) {
            Ok(ReductionOutcome::Reduction(r)) => Some(*r),
            _ => None,
        };
        elements.push(CatalogElement {
            id: el.id.clone(),
            x_basis: param_text(&el.x_coords, &x_names),
            y_basis: el.y_coords.as_ref().map(|c| param_text(c, &y_names)),
            params: el.params.clone(),
            z: red.as_ref().map(|r| r.z_text.clone()),
            u: red.as_ref().map(|r| r.u_text.clone()),
            v: red.as_ref().map(|r| r.v_text.clone()),
            reduced: red.as_ref().map(|r| r.reduced_text.clone()),
            validity: red.as_ref().map(|r| r.validity.clone()),
        });
    }
    let fmt_r = |r: Option<&BigRational>| r.map(|v| v.to_string());
    Ok(CatalogCase {
        case: case.label().to_string(),
        description: case.to_string(),
        alpha: alpha.to_string(),
        m: fmt_r(case.m()),
        k: fmt_r(case.k()),
        generators: rec.generators.iter().map(|(n, f)| (n.clone(), f.to_string())).collect(),
        basis: y_names,
        commutator,
        adjoint,
        optimal_system: elements,
    })
}

pub fn catalog_document(cases: &[(ClassificationCase, AlphaParameter)]) -> Result<CatalogDocument> {
    Ok(CatalogDocument {
        schema: "fraclie-catalog/1",
        cases: cases.iter().map(|(c, a)| catalog_case(c, a)).collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::case::degeneracy;
    use crate::special::{int, rat};

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    #[test]
    fn table1_reproduced() {
        let alg = table_algebra(&ClassificationCase::generic(), &alpha(1, 2)).unwrap();
        assert!(compare_commutator(TableId::Commutator1, &alg).is_empty());
    }

    #[test]
    fn tables_3_and_4_for_several_m() {
        for m in [int(2), rat(-1, 3), rat(1, 2), int(-3), rat(5, 7)] {
            let a = alpha(2, 7);
            assert!(!num_traits::Zero::is_zero(&degeneracy(&m, a.value())));
            let case = ClassificationCase::power_law(int(1), m.clone(), &a).unwrap();
            let alg = table_algebra(&case, &a).unwrap();
            assert!(compare_commutator(TableId::Commutator3, &alg).is_empty(), "m = {m}");
            assert!(compare_adjoint(TableId::Adjoint4, &alg).is_empty(), "m = {m}");
        }
    }

    #[test]
    fn tables_7_and_8() {
        for a in [alpha(1, 3), alpha(1, 4), alpha(3, 4)] {
            let case = ClassificationCase::degenerate(rat(3, 2), &a).unwrap();
            let alg = table_algebra(&case, &a).unwrap();
            assert!(compare_commutator(TableId::Commutator7, &alg).is_empty());
            assert!(compare_adjoint(TableId::Adjoint8, &alg).is_empty());
        }
    }

    #[test]
    fn mismatch_is_reported() {
        // the case 2.2 algebra does not match the case 2.1 commutator table
        let a = alpha(1, 3);
        let alg = table_algebra(&ClassificationCase::degenerate(int(1), &a).unwrap(), &a).unwrap();
        assert!(!compare_commutator(TableId::Commutator3, &alg).is_empty());
    }

    #[test]
    fn document_serializes() {
        let a = alpha(1, 3);
        let doc = catalog_document(&[
            (ClassificationCase::generic(), a.clone()),
            (ClassificationCase::power_law(int(1), int(2), &a).unwrap(), a.clone()),
            (ClassificationCase::degenerate(int(1), &a).unwrap(), a),
        ])
        .unwrap();
        let s = serde_json::to_string(&doc).unwrap();
        assert!(s.contains("fraclie-catalog/1"));
        assert_eq!(doc.cases[1].optimal_system.len(), 6);
        assert_eq!(doc.cases[1].optimal_system[4].x_basis, "X3 - X4");
    }
}
