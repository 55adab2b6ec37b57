use num_rational::BigRational;
use serde::Serialize;
use std::fmt;

use super::field::{bracket, VectorField};
use crate::error::{Error, Result};
use crate::symbolic::{Exponents, ScalarExpr};

/// Coordinates of an element over the basis of some LieAlgebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    pub coords: Vec<ScalarExpr>,
}

impl AlgebraElement {
    pub fn new(coords: Vec<ScalarExpr>) -> Self {
        AlgebraElement { coords }
    }

    pub fn zero(dim: usize) -> Self {
        AlgebraElement { coords: vec![ScalarExpr::zero(); dim] }
    }

    /// The i-th basis vector.
    pub fn basis(i: usize, dim: usize) -> Self {
        let mut e = AlgebraElement::zero(dim);
        e.coords[i] = ScalarExpr::one();
        e
    }

    pub fn from_ints(c: &[i64]) -> Self {
        AlgebraElement { coords: c.iter().map(|&k| ScalarExpr::int(k)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &ScalarExpr) -> AlgebraElement {
        AlgebraElement { coords: self.coords.iter().map(|a| a * c).collect() }
    }

    pub fn eval(&self, alpha: &BigRational) -> Result<Vec<f64>> {
        self.coords.iter().map(|c| c.eval_f64(alpha)).collect()
    }

    /// Human-readable combination using the given basis names.
    pub fn render(&self, names: &[String]) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (c, n) in self.coords.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let term = if c.is_one() {
                n.clone()
            } else if s == "-1" {
                format!("-{n}")
            } else if s.contains(' ') {
                format!("({s})·{n}")
            } else {
                format!("{s}·{n}")
            };
            parts.push(term);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

/// Finite-dimensional Lie algebra of vector fields with exact structure
/// constants `[B_i, B_j] = Σ_k c[i][j][k] B_k`.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    names: Vec<String>,
    fields: Vec<VectorField>,
    constants: Vec<Vec<Vec<ScalarExpr>>>,
}

impl LieAlgebra {
    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &ScalarExpr {
        &self.constants[i][j][k]
    }

    /// `[B_i, B_j]` as an element.
    pub fn bracket_basis(&self, i: usize, j: usize) -> AlgebraElement {
        AlgebraElement::new(self.constants[i][j].clone())
    }

    pub fn bracket(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let n = self.dim();
        let mut out = AlgebraElement::zero(n);
        for i in 0..n {
            if a.coords[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b.coords[j].is_zero() {
                    continue;
                }
                let ab = &a.coords[i] * &b.coords[j];
                for k in 0..n {
                    if !self.constants[i][j][k].is_zero() {
                        out.coords[k] = &out.coords[k] + &(&ab * &self.constants[i][j][k]);
                    }
                }
            }
        }
        out
    }

    /// The vector field represented by an element.
    pub fn realize(&self, e: &AlgebraElement) -> VectorField {
        let terms: Vec<_> = e.coords.iter().cloned().zip(self.fields.iter()).collect();
        VectorField::linear_combination(&terms)
    }

    pub fn render(&self, e: &AlgebraElement) -> String {
        e.render(&self.names)
    }

    /// Numeric structure constants at a fixed alpha.
    pub fn constants_f64(&self, alpha: &BigRational) -> Result<Vec<Vec<Vec<f64>>>> {
        self.constants
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(|c| c.eval_f64(alpha)).collect()).collect())
            .collect()
    }
}

type Key = (usize, Exponents);

fn coefficient_rows(fields: &[&VectorField]) -> Vec<Key> {
    let mut keys: Vec<Key> = Vec::new();
    for f in fields {
        for (w, comp) in f.components().into_iter().enumerate() {
            for (e, _) in comp.terms() {
                let k = (w, e.clone());
                if !keys.contains(&k) {
                    keys.push(k);
                }
            }
        }
    }
    keys
}

/// Solve `A x = b` over rational functions of alpha by Gaussian elimination.
/// Returns None when inconsistent; panics-free on rank deficiency by
/// leaving free unknowns at zero.
fn solve_linear(mut a: Vec<Vec<ScalarExpr>>, mut b: Vec<ScalarExpr>, n: usize) -> Option<Vec<ScalarExpr>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][col].inv().expect("nonzero pivot");
        for c in col..n {
            a[r][c] = &a[r][c] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for c in col..n {
                    let d = &f * &a[r][c];
                    a[i][c] = &a[i][c] - &d;
                }
                let d = &f * &b[r];
                b[i] = &b[i] - &d;
            }
        }
        pivots.push((r, col));
        r += 1;
        if r == rows {
            break;
        }
    }
    if b.iter().skip(r).any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![ScalarExpr::zero(); n];
    for (row, col) in pivots {
        x[col] = b[row].clone();
    }
    Some(x)
}

/// Exact coordinates of `z` over the given fields, matched on monomial
/// support.
pub fn decompose_over(z: &VectorField, fields: &[VectorField]) -> Result<AlgebraElement> {
    let n = fields.len();
    let mut all: Vec<&VectorField> = fields.iter().collect();
    all.push(z);
    let keys = coefficient_rows(&all);
    let mut a = Vec::with_capacity(keys.len());
    let mut b = Vec::with_capacity(keys.len());
    for (w, e) in &keys {
        a.push(fields.iter().map(|f| f.components()[*w].coefficient(e)).collect());
        b.push(z.components()[*w].coefficient(e));
    }
    let x = solve_linear(a, b, n).ok_or_else(|| Error::NotInSpan(z.to_string()))?;
    Ok(AlgebraElement::new(x))
}

pub fn decompose(z: &VectorField, algebra: &LieAlgebra) -> Result<AlgebraElement> {
    decompose_over(z, &algebra.fields)
}

/// Build the algebra spanned by the named fields, checking closure,
/// antisymmetry and the Jacobi identity exactly.
pub fn structure_constants(basis: Vec<(String, VectorField)>) -> Result<LieAlgebra> {
    let (names, fields): (Vec<String>, Vec<VectorField>) = basis.into_iter().unzip();
    let n = fields.len();
    // independence: each basis field must decompose uniquely onto itself
    for (i, f) in fields.iter().enumerate() {
        let c = decompose_over(f, &fields)?;
        if c != AlgebraElement::basis(i, n) {
            return Err(Error::InvalidInput(format!("basis field {} is linearly dependent", names[i])));
        }
    }
    let mut constants = vec![vec![vec![ScalarExpr::zero(); n]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let z = bracket(&fields[i], &fields[j]);
            let c = decompose_over(&z, &fields)
                .map_err(|_| Error::NotClosed(names[i].clone(), names[j].clone()))?;
            for k in 0..n {
                constants[j][i][k] = -&c.coords[k];
                constants[i][j][k] = c.coords[k].clone();
            }
        }
    }
    let alg = LieAlgebra { names, fields, constants };
    check_antisymmetry(&alg)?;
    check_jacobi(&alg)?;
    Ok(alg)
}

fn check_antisymmetry(alg: &LieAlgebra) -> Result<()> {
    let n = alg.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !(&alg.constants[i][j][k] + &alg.constants[j][i][k]).is_zero() {
                    return Err(Error::InvalidInput("structure constants are not antisymmetric".into()));
                }
            }
        }
    }
    Ok(())
}

fn check_jacobi(alg: &LieAlgebra) -> Result<()> {
    let n = alg.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (ei, ej, ek) = (
                    AlgebraElement::basis(i, n),
                    AlgebraElement::basis(j, n),
                    AlgebraElement::basis(k, n),
                );
                let s = alg
                    .bracket(&ei, &alg.bracket(&ej, &ek))
                    .add(&alg.bracket(&ej, &alg.bracket(&ek, &ei)))
                    .add(&alg.bracket(&ek, &alg.bracket(&ei, &ej)));
                if !s.is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "Jacobi identity fails for ({}, {}, {})",
                        alg.names[i], alg.names[j], alg.names[k]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Matrix of `ad_Y` with `M · coords(Z) = coords([Y, Z])`; `M[k][j]`.
pub fn ad_matrix(y: &AlgebraElement, algebra: &LieAlgebra) -> Vec<Vec<ScalarExpr>> {
    let n = algebra.dim();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let mut s = ScalarExpr::zero();
                    for i in 0..n {
                        if !y.coords[i].is_zero() {
                            s = &s + &(&y.coords[i] * algebra.constant(i, j, k));
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// True iff both index sets span subalgebras and every cross bracket
/// vanishes.
pub fn direct_sum_check(algebra: &LieAlgebra, left: &[usize], right: &[usize]) -> bool {
    let n = algebra.dim();
    let mut seen = vec![false; n];
    for &i in left.iter().chain(right) {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return false;
    }
    for &i in left {
        for &j in right {
            if algebra.constants[i][j].iter().any(|c| !c.is_zero()) {
                return false;
            }
        }
    }
    let closed = |part: &[usize]| {
        part.iter().all(|&i| {
            part.iter().all(|&j| (0..n).all(|k| part.contains(&k) || algebra.constants[i][j][k].is_zero()))
        })
    };
    closed(left) && closed(right)
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        let cells: Vec<Vec<String>> = (0..n)
            .map(|i| (0..n).map(|j| self.render(&self.bracket_basis(i, j))).collect())
            .collect();
        let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1).max(6);
        write!(f, "{:<6}", "[·,·]")?;
        for name in &self.names {
            write!(f, " | {:<width$}", name)?;
        }
        writeln!(f)?;
        for (i, row) in cells.iter().enumerate() {
            write!(f, "{:<6}", self.names[i])?;
            for c in row {
                write!(f, " | {:<width$}", c)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{ExponentExpr, MonomialSum, Var};

    fn d(var: Var, coef: MonomialSum) -> VectorField {
        let mut f = VectorField::zero();
        match var {
            Var::X => f.xi = coef,
            Var::T => f.tau = coef,
            Var::U => f.mu = coef,
            Var::V => f.phi = coef,
        }
        f
    }

    fn case1() -> LieAlgebra {
        let inv_a = ScalarExpr::alpha().inv().unwrap();
        let x1 = d(Var::X, MonomialSum::one());
        let x2 = d(Var::V, MonomialSum::power(Var::T, ExponentExpr::alpha_plus(-1)));
        let x3 = d(Var::X, MonomialSum::var(Var::X)).add(&d(Var::T, MonomialSum::var(Var::T).scale(&inv_a)));
        structure_constants(vec![("X1".into(), x1), ("X2".into(), x2), ("X3".into(), x3)]).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let alg = case1();
        let dx = d(Var::X, MonomialSum::one());
        assert_eq!(decompose(&dx, &alg).unwrap(), AlgebraElement::from_ints(&[1, 0, 0]));
        let b = bracket(&alg.fields()[1], &alg.fields()[2]);
        let c = &(&ScalarExpr::one() - &ScalarExpr::alpha()) / &ScalarExpr::alpha();
        assert_eq!(
            decompose(&b, &alg).unwrap(),
            AlgebraElement::new(vec![ScalarExpr::zero(), c, ScalarExpr::zero()])
        );
        let xdu = d(Var::U, MonomialSum::var(Var::X));
        assert!(matches!(decompose(&xdu, &alg), Err(Error::NotInSpan(_))));
    }

    #[test]
    fn not_closed_detected() {
        let a = d(Var::X, MonomialSum::one());
        let b = d(Var::V, MonomialSum::var(Var::X));
        let r = structure_constants(vec![("A".into(), a), ("B".into(), b)]);
        assert!(matches!(r, Err(Error::NotClosed(_, _))));
    }

    #[test]
    fn ad_matrix_matches_bracket() {
        let alg = case1();
        let y = AlgebraElement::from_ints(&[2, -1, 3]);
        let z = AlgebraElement::from_ints(&[1, 4, -2]);
        let m = ad_matrix(&y, &alg);
        let mz: Vec<ScalarExpr> = m
            .iter()
            .map(|row| row.iter().zip(&z.coords).fold(ScalarExpr::zero(), |s, (a, b)| &s + &(a * b)))
            .collect();
        assert_eq!(AlgebraElement::new(mz), alg.bracket(&y, &z));
        assert!(ad_matrix(&AlgebraElement::zero(3), &alg).iter().flatten().all(|c| c.is_zero()));
    }

    #[test]
    fn case1_is_not_a_direct_sum_of_x1() {
        assert!(!direct_sum_check(&case1(), &[0], &[1, 2]));
    }

    #[test]
    fn render_element() {
        let names: Vec<String> = vec!["Y1".into(), "Y2".into()];
        let e = AlgebraElement::from_ints(&[1, -1]);
        assert_eq!(e.render(&names), "Y1 - Y2");
    }
}
