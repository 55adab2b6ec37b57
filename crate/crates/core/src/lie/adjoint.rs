use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use serde::Serialize;

use super::algebra::{ad_matrix, AlgebraElement, LieAlgebra};
use crate::error::Result;
use crate::symbolic::ScalarExpr;

/// Closed form of `ε ↦ Ad(e^{εY}) Z = exp(-ε ad_Y) Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdjointForm {
    /// `Σ_n terms[n] ε^n` (ad_Y nilpotent on Z).
    Polynomial(Vec<AlgebraElement>),
    /// `e^{rate·ε} · element` (Z an eigenvector of ad_Y).
    Exponential { rate: ScalarExpr, element: AlgebraElement },
    /// No closed form detected; evaluated numerically.
    Series { y: AlgebraElement, z: AlgebraElement },
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Detect the closed form of the adjoint orbit of `z` under `y`.
pub fn adjoint_form(y: &AlgebraElement, z: &AlgebraElement, algebra: &LieAlgebra) -> AdjointForm {
    let w1 = algebra.bracket(y, z);
    if w1.is_zero() {
        return AdjointForm::Polynomial(vec![z.clone()]);
    }
    if let Some(i) = z.coords.iter().position(|c| !c.is_zero()) {
        let lambda = &w1.coords[i] / &z.coords[i];
        if z.scale(&lambda) == w1 {
            return AdjointForm::Exponential { rate: -lambda, element: z.clone() };
        }
    }
    let mut terms = vec![z.clone()];
    let mut w = w1;
    for n in 1..=algebra.dim() {
        if w.is_zero() {
            return AdjointForm::Polynomial(terms);
        }
        let c = ScalarExpr::constant(BigRational::new(
            (if n % 2 == 0 { 1 } else { -1 }).into(),
            factorial(n).into(),
        ));
        terms.push(w.scale(&c));
        w = algebra.bracket(y, &w);
    }
    if w.is_zero() {
        return AdjointForm::Polynomial(terms);
    }
    AdjointForm::Series { y: y.clone(), z: z.clone() }
}

fn ad_matrix_f64(y: &AlgebraElement, algebra: &LieAlgebra, alpha: &BigRational) -> Result<DMatrix<f64>> {
    let m = ad_matrix(y, algebra);
    let n = algebra.dim();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[i][j].eval_f64(alpha)?;
        }
    }
    Ok(out)
}

fn series_eval(y: &AlgebraElement, z: &AlgebraElement, eps: f64, algebra: &LieAlgebra, alpha: &BigRational) -> Result<Vec<f64>> {
    let m = ad_matrix_f64(y, algebra, alpha)?;
    let zv = DVector::from_vec(z.eval(alpha)?);
    Ok(((m * (-eps)).exp() * zv).iter().copied().collect())
}

impl AdjointForm {
    pub fn evaluate(&self, eps: f64, algebra: &LieAlgebra, alpha: &BigRational) -> Result<Vec<f64>> {
        match self {
            AdjointForm::Polynomial(terms) => {
                let mut out = vec![0.0; algebra.dim()];
                let mut p = 1.0;
                for t in terms {
                    for (o, c) in out.iter_mut().zip(t.eval(alpha)?) {
                        *o += p * c;
                    }
                    p *= eps;
                }
                Ok(out)
            }
            AdjointForm::Exponential { rate, element } => {
                let f = (rate.eval_f64(alpha)? * eps).exp();
                Ok(element.eval(alpha)?.into_iter().map(|c| f * c).collect())
            }
            AdjointForm::Series { y, z } => series_eval(y, z, eps, algebra, alpha),
        }
    }

    /// Exact image for a rational ε, available for polynomial forms.
    pub fn evaluate_exact(&self, eps: &BigRational) -> Option<AlgebraElement> {
        let AdjointForm::Polynomial(terms) = self else { return None };
        let mut out = AlgebraElement::zero(terms[0].dim());
        let mut p = ScalarExpr::one();
        let e = ScalarExpr::constant(eps.clone());
        for t in terms {
            out = out.add(&t.scale(&p));
            p = &p * &e;
        }
        Some(out)
    }

    pub fn render(&self, algebra: &LieAlgebra) -> String {
        match self {
            AdjointForm::Polynomial(terms) => {
                let mut parts = Vec::new();
                for (n, t) in terms.iter().enumerate() {
                    if t.is_zero() {
                        continue;
                    }
                    let body = algebra.render(t);
                    parts.push(match n {
                        0 => body,
                        1 => format!("ε·({body})"),
                        _ => format!("ε^{n}·({body})"),
                    });
                }
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            }
            AdjointForm::Exponential { rate, element } => {
                let r = rate.to_string();
                let exp = if rate.is_one() {
                    "ε".to_string()
                } else if r == "-1" {
                    "-ε".to_string()
                } else {
                    format!("({r})·ε")
                };
                format!("e^{{{exp}}}·({})", algebra.render(element))
            }
            AdjointForm::Series { y, z } => {
                format!("exp(-ε·ad[{}])({})", algebra.render(y), algebra.render(z))
            }
        }
    }
}

/// Numeric `Ad(e^{εY}) Z` at a fixed alpha.
pub fn adjoint_action(
    y: &AlgebraElement,
    z: &AlgebraElement,
    eps: f64,
    algebra: &LieAlgebra,
    alpha: &BigRational,
) -> Result<Vec<f64>> {
    adjoint_form(y, z, algebra).evaluate(eps, algebra, alpha)
}

/// Target coordinate in an equivalence query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetCoord {
    Fixed(f64),
    /// Determined by the solve (e.g. the `b` in `Y1 + Y2 + b Y4`).
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equivalence {
    pub epsilon: f64,
    /// Nonzero factor with `Ad(e^{ε·conjugator}) source = scale · target`.
    pub scale: f64,
    /// Values found for the free target coordinates, by index.
    pub free_values: Vec<(usize, f64)>,
    /// Max deviation over the fixed target coordinates.
    pub mismatch: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum EquivalenceOutcome {
    Found(Equivalence),
    NoSolution(String),
}

const EQ_TOL: f64 = 1e-10;

/// Find ε with `Ad(e^{ε·conjugator}) source = s · target` for some real
/// `s ≠ 0`, where free target coordinates absorb whatever remains.
pub fn equivalence_solve(
    source: &AlgebraElement,
    target: &[TargetCoord],
    conjugator: &AlgebraElement,
    algebra: &LieAlgebra,
    alpha: &BigRational,
) -> Result<EquivalenceOutcome> {
    let n = algebra.dim();
    let m = ad_matrix_f64(conjugator, algebra, alpha)?;
    let s = DVector::from_vec(source.eval(alpha)?);
    let image = |eps: f64| -> Vec<f64> { ((&m * (-eps)).exp() * &s).iter().copied().collect() };
    let fixed: Vec<(usize, f64)> = target
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t {
            TargetCoord::Fixed(v) => Some((i, *v)),
            TargetCoord::Free => None,
        })
        .collect();
    let Some(&(j0, t0)) = fixed.iter().find(|(_, v)| *v != 0.0) else {
        return Ok(EquivalenceOutcome::NoSolution("target has no fixed nonzero coordinate".into()));
    };
    let constraints: Vec<(usize, f64)> = fixed.iter().copied().filter(|(j, _)| *j != j0).collect();
    let check = |eps: f64| -> Option<Equivalence> {
        let w = image(eps);
        let scale = w[j0] / t0;
        let norm = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !scale.is_finite() || scale.abs() <= EQ_TOL * norm.max(1.0) {
            return None;
        }
        let mismatch = constraints.iter().fold(0.0f64, |acc, (j, t)| acc.max((w[*j] / scale - t).abs()));
        if mismatch > EQ_TOL {
            return None;
        }
        let free_values = (0..n)
            .filter(|i| target[*i] == TargetCoord::Free)
            .map(|i| (i, w[i] / scale))
            .collect();
        Some(Equivalence { epsilon: eps, scale, free_values, mismatch })
    };
    if let Some(e) = check(0.0) {
        return Ok(EquivalenceOutcome::Found(e));
    }
    let off_diagonal = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j);
    let diagonal = off_diagonal.clone().all(|(i, j)| m[(i, j)] == 0.0);
    let candidates = if diagonal {
        diagonal_candidates(&m, &s, j0, t0, &constraints)
    } else {
        root_candidates(&image, j0, t0, &constraints)
    };
    for eps in candidates {
        if let Some(e) = check(eps) {
            return Ok(EquivalenceOutcome::Found(e));
        }
    }
    Ok(EquivalenceOutcome::NoSolution(format!(
        "no ε maps {} onto the requested form",
        algebra.render(source)
    )))
}

/// Closed-form ε when the conjugator acts diagonally: each constraint reads
/// `s_j T0 e^{-ε λ_j} = s_j0 T_j e^{-ε λ_j0}`.
fn diagonal_candidates(m: &DMatrix<f64>, s: &DVector<f64>, j0: usize, t0: f64, constraints: &[(usize, f64)]) -> Vec<f64> {
    let mut out = Vec::new();
    for &(j, tj) in constraints {
        let lhs = s[j] * t0;
        let rhs = s[j0] * tj;
        let dl = m[(j, j)] - m[(j0, j0)];
        if lhs == 0.0 || rhs == 0.0 || dl == 0.0 {
            continue;
        }
        let r = rhs / lhs;
        if r > 0.0 {
            out.push(-r.ln() / dl);
        }
    }
    out
}

/// Sign-change scan plus bisection on the first constraint.
fn root_candidates(image: &dyn Fn(f64) -> Vec<f64>, j0: usize, t0: f64, constraints: &[(usize, f64)]) -> Vec<f64> {
    let mut out = Vec::new();
    for &(j, tj) in constraints {
        let g = |eps: f64| {
            let w = image(eps);
            w[j] * t0 - w[j0] * tj
        };
        let (lo, hi, steps) = (-40.0, 40.0, 1600);
        let h = (hi - lo) / steps as f64;
        let mut a = lo;
        let mut ga = g(a);
        for k in 1..=steps {
            let b = lo + k as f64 * h;
            let gb = g(b);
            if ga == 0.0 {
                out.push(a);
            } else if ga.signum() != gb.signum() {
                let (mut x0, mut x1, mut g0) = (a, b, ga);
                for _ in 0..200 {
                    let mid = 0.5 * (x0 + x1);
                    let gm = g(mid);
                    if gm == 0.0 || (x1 - x0) < 1e-15 * (1.0 + mid.abs()) {
                        x0 = mid;
                        x1 = mid;
                        break;
                    }
                    if gm.signum() == g0.signum() {
                        x0 = mid;
                        g0 = gm;
                    } else {
                        x1 = mid;
                    }
                }
                out.push(0.5 * (x0 + x1));
            }
            a = b;
            ga = gb;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{structure_constants, VectorField};
    use crate::special::rat;
    use crate::symbolic::{MonomialSum, Var};

    /// Two-dimensional non-abelian algebra [A, B] = B realised by
    /// A = -x∂x, B = ∂x.
    fn aff() -> LieAlgebra {
        let a = VectorField { xi: MonomialSum::var(Var::X).scale(&ScalarExpr::int(-1)), ..Default::default() };
        let b = VectorField { xi: MonomialSum::one(), ..Default::default() };
        structure_constants(vec![("A".into(), a), ("B".into(), b)]).unwrap()
    }

    #[test]
    fn forms_detected() {
        let alg = aff();
        let (a, b) = (AlgebraElement::basis(0, 2), AlgebraElement::basis(1, 2));
        assert_eq!(
            adjoint_form(&a, &b, &alg),
            AdjointForm::Exponential { rate: ScalarExpr::int(-1), element: b.clone() }
        );
        assert_eq!(
            adjoint_form(&b, &a, &alg),
            AdjointForm::Polynomial(vec![a.clone(), b.clone()])
        );
        assert_eq!(adjoint_form(&a, &a, &alg), AdjointForm::Polynomial(vec![a.clone()]));
    }

    #[test]
    fn series_matches_closed_form_numerically() {
        let alg = aff();
        let y = AlgebraElement::from_ints(&[1, 1]);
        let z = AlgebraElement::from_ints(&[2, -3]);
        let closed = adjoint_form(&y, &z, &alg).evaluate(0.7, &alg, &rat(1, 2)).unwrap();
        let series = series_eval(&y, &z, 0.7, &alg, &rat(1, 2)).unwrap();
        for (c, s) in closed.iter().zip(&series) {
            assert!((c - s).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_equivalence_is_zero() {
        let alg = aff();
        let z = AlgebraElement::from_ints(&[1, 2]);
        let t = [TargetCoord::Fixed(1.0), TargetCoord::Fixed(2.0)];
        let out = equivalence_solve(&z, &t, &AlgebraElement::basis(0, 2), &alg, &rat(1, 2)).unwrap();
        match out {
            EquivalenceOutcome::Found(e) => assert_eq!(e.epsilon, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_diagonal_conjugator_uses_root_finding() {
        // Ad(e^{εB}) A = A + εB; map A + 3B onto A - B
        let alg = aff();
        let src = AlgebraElement::from_ints(&[1, 3]);
        let t = [TargetCoord::Fixed(1.0), TargetCoord::Fixed(-1.0)];
        let out = equivalence_solve(&src, &t, &AlgebraElement::basis(1, 2), &alg, &rat(1, 2)).unwrap();
        match out {
            EquivalenceOutcome::Found(e) => assert!((e.epsilon + 4.0).abs() < 1e-10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn impossible_target() {
        // A-coordinate is invariant, so B alone can never reach A
        let alg = aff();
        let src = AlgebraElement::from_ints(&[0, 1]);
        let t = [TargetCoord::Fixed(1.0), TargetCoord::Fixed(0.0)];
        let out = equivalence_solve(&src, &t, &AlgebraElement::basis(0, 2), &alg, &rat(1, 2)).unwrap();
        assert!(matches!(out, EquivalenceOutcome::NoSolution(_)));
    }
}
