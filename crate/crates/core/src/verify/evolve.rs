use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::{gauss_jacobi, GaussRule};
use super::report::PairEvaluator;
use super::rl_numeric::SingularRule;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::solutions::{power_rule_factor, Component, SolutionFamily};
use crate::special::{gamma, to_f64};

/// Blow-up threshold relative to the initial sup norm.
pub const INSTABILITY_FACTOR: f64 = 1e6;
const MEMORY_NODES: usize = 24;
const FLAT_TOL: f64 = 1e-12;

/// Discrete `(u, v)` on an x-grid at each time level.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl Trajectory {
    /// `(t, x, u, v)` rows, time-major.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.ts.iter().enumerate().flat_map(move |(n, &t)| {
            self.xs.iter().enumerate().map(move |(i, &x)| (t, x, self.u[n][i], self.v[n][i]))
        })
    }

    /// Whether every time level is constant in x up to rounding.
    pub fn x_independent(&self) -> bool {
        self.u.iter().chain(&self.v).all(|row| flat(row))
    }
}

fn flat(row: &[f64]) -> bool {
    let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &w| (a.min(w), b.max(w)));
    hi - lo <= FLAT_TOL * hi.abs().max(lo.abs()).max(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveReport {
    pub family: String,
    pub alpha: String,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub dt: f64,
    pub nx: usize,
    /// Max abs error against the family at `t1`.
    pub max_error: f64,
    /// `max_error` over the sup norm of the family at `t1`.
    pub relative_error: f64,
    pub initial_x_independent: bool,
    pub x_independent: bool,
}

/// Per-node fractional-derivative oracle for one component.
enum Exact {
    Power(Vec<f64>),
    Numeric(SingularRule),
}

impl Exact {
    fn new(c: &Component, family: &SolutionFamily) -> Result<Self> {
        if c.is_monomial() {
            Ok(Exact::Power(c.terms.iter().map(|t| power_rule_factor(&t.exponent, &family.alpha)).collect::<Result<_>>()?))
        } else {
            Ok(Exact::Numeric(SingularRule::new(family.alpha_f64(), c.hint, 24)?))
        }
    }

    fn eval(&self, c: &Component, alpha: f64, x: f64, t: f64) -> Result<f64> {
        match self {
            Exact::Power(f) => Ok(c
                .terms
                .iter()
                .zip(f)
                .filter(|(_, f)| **f != 0.0)
                .map(|(term, f)| f * (term.coeff)(Jet::constant(x)).v * t.powf(to_f64(&term.exponent) - alpha))
                .sum()),
            Exact::Numeric(rule) => rule.rl_derivative(&|s| Ok(c.eval(Jet::constant(x), Jet::constant(s)).v), t),
        }
    }
}

/// The part of `D^α w(t)` not represented by the discrete history on
/// `(t0, t]`: `D^α w(t) - Γ(1-α)^{-1} ∫_{t0}^t w'(s)(t-s)^{-α} ds`.
fn warm_memory(c: &Component, exact: &Exact, rule: &GaussRule, alpha: f64, x: f64, t0: f64, t: f64) -> Result<f64> {
    let d = exact.eval(c, alpha, x, t)?;
    let half = 0.5 * (t - t0);
    let xj = Jet::constant(x);
    let integral: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&y, &w)| w * c.eval(xj, Jet::variable(t0 + half * (1.0 + y))).d1)
        .sum();
    Ok(d - half.powf(1.0 - alpha) * integral / gamma(1.0 - alpha))
}

/// Fourth-order central first-derivative weights at offsets -2..=2.
const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];

/// Advance the family's data from `t0` to `t1` in `steps` uniform steps.
///
/// L1 product integration in time with the memory on `(0, t0]` taken from
/// the closed form, fourth-order central differences in x, and the coupling
/// coefficient `b²(u)` lagged one step. The two outer layers at each end
/// are advanced by the same recurrence with x-derivatives from the family
/// and act as Dirichlet data for the interior.
pub fn evolve(family: &SolutionFamily, t0: f64, t1: f64, steps: usize, xs: &[f64]) -> Result<(Trajectory, EvolveReport)> {
    if !(t0 > 0.0 && t1 > t0) {
        return Err(Error::InvalidInput(format!("need 0 < t0 < t1, got t0 = {t0}, t1 = {t1}")));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be positive".into()));
    }
    let nx = xs.len();
    if nx < 5 {
        return Err(Error::InvalidInput("x-grid needs at least 5 nodes".into()));
    }
    let h = (xs[nx - 1] - xs[0]) / (nx - 1) as f64;
    if !(h > 0.0) || xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidInput("x-grid must be uniform and increasing".into()));
    }
    let alpha = family.alpha_f64();
    let dt = (t1 - t0) / steps as f64;
    let ts: Vec<f64> = (0..=steps).map(|n| if n == steps { t1 } else { t0 + n as f64 * dt }).collect();
    for &t in [t0, t1].iter() {
        for &x in xs {
            family.evaluate(x, t)?;
        }
    }
    let exact_at = |t: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let pairs: Vec<(f64, f64)> = xs.par_iter().map(|&x| family.evaluate(x, t)).collect::<Result<_>>()?;
        Ok(pairs.into_iter().unzip())
    };

    let (u0, v0) = exact_at(t0)?;
    let norm0 = u0.iter().chain(&v0).fold(0.0f64, |a, w| a.max(w.abs())).max(f64::MIN_POSITIVE);
    let mut traj = Trajectory { xs: xs.to_vec(), ts: ts.clone(), u: vec![u0], v: vec![v0] };

    let eu = Exact::new(&family.u, family)?;
    let ev = Exact::new(&family.v, family)?;
    let jacobi = gauss_jacobi(MEMORY_NODES, -alpha, 0.0)?;
    let c0 = dt.powf(-alpha) / gamma(2.0 - alpha);
    let b: Vec<f64> = (0..=steps).map(|j| ((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha)).collect();
    let interior: Vec<usize> = (2..nx - 2).collect();
    let mi = interior.len();

    for n in 1..=steps {
        let t = ts[n];
        let memory: Vec<(f64, f64)> = (0..nx)
            .into_par_iter()
            .map(|i| -> Result<(f64, f64)> {
                Ok((
                    warm_memory(&family.u, &eu, &jacobi, alpha, xs[i], t0, t)?,
                    warm_memory(&family.v, &ev, &jacobi, alpha, xs[i], t0, t)?,
                ))
            })
            .collect::<Result<_>>()?;
        let history = |w: &[Vec<f64>], i: usize| -> f64 { (1..n).map(|k| b[n - k] * (w[k][i] - w[k - 1][i])).sum() };
        let prev_u = &traj.u[n - 1];
        let prev_v = &traj.v[n - 1];
        let beta: Vec<f64> = (0..nx).map(|i| family.coupling.b_squared(Jet::constant(prev_u[i])).v).collect();

        // boundary layers follow the same recurrence with exact x-fluxes
        let mut un = prev_u.clone();
        let mut vn = prev_v.clone();
        for i in [0, 1, nx - 2, nx - 1] {
            let j = family.jets(xs[i], t)?;
            un[i] = prev_u[i] - history(&traj.u, i) + (j.vx.d1 - memory[i].0) / c0;
            vn[i] = prev_v[i] - history(&traj.v, i) + (beta[i] * j.ux.d1 - memory[i].1) / c0;
        }

        let mut a = DMatrix::<f64>::zeros(2 * mi, 2 * mi);
        let mut rhs = DVector::<f64>::zeros(2 * mi);
        for (r, &i) in interior.iter().enumerate() {
            a[(r, r)] = c0;
            a[(mi + r, mi + r)] = c0;
            rhs[r] = c0 * prev_u[i] - c0 * history(&traj.u, i) - memory[i].0;
            rhs[mi + r] = c0 * prev_v[i] - c0 * history(&traj.v, i) - memory[i].1;
            for (o, w) in D1.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let j = i + o - 2;
                let coef = w / h;
                if (2..nx - 2).contains(&j) {
                    a[(r, mi + j - 2)] -= coef;
                    a[(mi + r, j - 2)] -= beta[i] * coef;
                } else {
                    rhs[r] += coef * vn[j];
                    rhs[mi + r] += beta[i] * coef * un[j];
                }
            }
        }
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Instability(format!("singular step matrix at t = {t}")))?;
        for (r, &i) in interior.iter().enumerate() {
            un[i] = sol[r];
            vn[i] = sol[mi + r];
        }
        let norm = un.iter().chain(&vn).fold(0.0f64, |m, w| if w.is_finite() { m.max(w.abs()) } else { f64::INFINITY });
        if norm > INSTABILITY_FACTOR * norm0 {
            return Err(Error::Instability(format!("sup norm {norm:.3e} at t = {t} exceeds {INSTABILITY_FACTOR:e} x initial {norm0:.3e}")));
        }
        traj.u.push(un);
        traj.v.push(vn);
    }

    let (ue, ve) = exact_at(t1)?;
    let last = traj.u.len() - 1;
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..nx {
        err = err.max((traj.u[last][i] - ue[i]).abs()).max((traj.v[last][i] - ve[i]).abs());
        scale = scale.max(ue[i].abs()).max(ve[i].abs());
    }
    let report = EvolveReport {
        family: family.id.clone(),
        alpha: family.alpha.to_string(),
        t0,
        t1,
        steps,
        dt,
        nx,
        max_error: err,
        relative_error: if scale > 0.0 { err / scale } else { err },
        initial_x_independent: flat(&traj.u[0]) && flat(&traj.v[0]),
        x_independent: traj.x_independent(),
    };
    Ok((traj, report))
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn convergence_order(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::InvalidInput("need at least two (h, error) pairs".into()));
    }
    if pairs.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return Err(Error::InvalidInput("step sizes and errors must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("step sizes must differ".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, Serialize)]
pub struct Rung {
    pub steps: usize,
    pub dt: f64,
    pub max_error: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceStudy {
    pub family: String,
    pub alpha: String,
    pub rungs: Vec<Rung>,
    /// Error ratio between consecutive rungs.
    pub reductions: Vec<f64>,
    /// `None` with fewer than two rungs or when some rung is exact.
    pub order: Option<f64>,
}

impl ConvergenceStudy {
    pub fn min_reduction(&self) -> Option<f64> {
        self.reductions.iter().copied().reduce(f64::min)
    }

    pub fn finest(&self) -> Option<&Rung> {
        self.rungs.last()
    }
}

/// Runs `evolve` over a ladder of step counts.
pub fn convergence_study(family: &SolutionFamily, t0: f64, t1: f64, ladder: &[usize], xs: &[f64]) -> Result<ConvergenceStudy> {
    let mut rungs = Vec::with_capacity(ladder.len());
    for &steps in ladder {
        let (_, r) = evolve(family, t0, t1, steps, xs)?;
        rungs.push(Rung { steps, dt: r.dt, max_error: r.max_error, relative_error: r.relative_error });
    }
    // a rung that reproduces the solution exactly leaves nothing to fit
    if rungs.iter().any(|r| r.max_error == 0.0) {
        return Ok(ConvergenceStudy { family: family.id.clone(), alpha: family.alpha.to_string(), rungs, reductions: Vec::new(), order: None });
    }
    let reductions = rungs.windows(2).map(|w| w[0].max_error / w[1].max_error).collect();
    let order = if rungs.len() >= 2 {
        Some(convergence_order(&rungs.iter().map(|r| (r.dt, r.max_error)).collect::<Vec<_>>())?)
    } else {
        None
    };
    Ok(ConvergenceStudy { family: family.id.clone(), alpha: family.alpha.to_string(), rungs, reductions, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::{family_19, family_21, family_5_1, Coupling};
    use crate::special::{int, rat};
    use crate::symbolic::AlphaParameter;
    use crate::verify::linspace;

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    #[test]
    fn order_examples() {
        assert!((convergence_order(&[(0.1, 1e-2), (0.05, 2.5e-3)]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(convergence_order(&[(0.1, 1e-3), (0.05, 1e-3)]).unwrap(), 0.0);
        assert!((convergence_order(&[(0.1, 1e-3), (0.05, 5e-4)]).unwrap() - 1.0).abs() < 1e-12);
        assert!(convergence_order(&[(0.1, 1e-3)]).is_err());
        assert!(convergence_order(&[(0.1, 0.0), (0.05, 1e-3)]).is_err());
    }

    #[test]
    fn warm_memory_of_constant_in_time_history() {
        // w = t^{α-1} is annihilated, so D^α w = 0 and the memory is minus
        // the history integral
        let a = alpha(1, 3);
        let f = family_5_1(&int(0), &int(1), &int(0), &a, Coupling::power_law(int(1), int(1))).unwrap();
        let ex = Exact::new(&f.u, &f).unwrap();
        let rule = gauss_jacobi(MEMORY_NODES, -1.0 / 3.0, 0.0).unwrap();
        let (t0, t) = (1.0f64, 1.5f64);
        let m = warm_memory(&f.u, &ex, &rule, 1.0 / 3.0, 0.0, t0, t).unwrap();
        // r = (t-s)^{2/3} removes the kernel singularity
        let dw = |s: f64| (-2.0 / 3.0) * s.powf(-5.0 / 3.0);
        let i = crate::verify::integrate_adaptive(&|r: f64| dw(t - r.powf(1.5)) * 1.5, 0.0, (t - t0).powf(2.0 / 3.0), 1e-14, 30).unwrap();
        let want = -i / gamma(2.0 / 3.0);
        assert!((m - want).abs() < 1e-10, "{m} vs {want}");
    }

    #[test]
    fn kernel_stays_flat() {
        let a = alpha(1, 2);
        let f = family_5_1(&int(0), &int(2), &int(1), &a, Coupling::power_law(int(1), int(1))).unwrap();
        let xs = linspace(-1.0, 1.0, 21);
        let (traj, r) = evolve(&f, 1.0, 1.5, 20, &xs).unwrap();
        assert!(r.initial_x_independent && r.x_independent);
        assert_eq!(traj.ts.len(), 21);
        assert_eq!(traj.rows().count(), 21 * 21);
        assert!(r.relative_error < 1e-3, "{}", r.relative_error);
    }

    #[test]
    fn zero_solution_has_no_order() {
        let f = family_5_1(&int(0), &int(0), &int(0), &alpha(1, 2), Coupling::power_law(int(1), int(1))).unwrap();
        let s = convergence_study(&f, 1.0, 1.5, &[2, 4], &linspace(-1.0, 1.0, 9)).unwrap();
        assert_eq!(s.rungs.len(), 2);
        assert!(s.order.is_none() && s.reductions.is_empty());
    }

    #[test]
    fn converges_on_power_family() {
        let f = family_19(&int(2), &int(1), &alpha(1, 3)).unwrap();
        let xs = linspace(1.0, 2.0, 21);
        let s = convergence_study(&f, 1.0, 1.5, &[10, 20, 40], &xs).unwrap();
        assert!(s.min_reduction().unwrap() >= 1.5, "{:?}", s);
        assert!(s.finest().unwrap().relative_error <= 1e-2);
        let p = s.order.unwrap();
        assert!((1.0 / 3.0..=2.0).contains(&p), "{p}");
    }

    #[test]
    fn translation_commutes() {
        let a = alpha(1, 3);
        let f = family_19(&int(2), &int(1), &a).unwrap();
        let g = family_21(&int(2), &int(1), &a, &rat(1, 2)).unwrap();
        let xs = linspace(1.0, 2.0, 11);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
        let (tf, _) = evolve(&f, 1.0, 1.2, 8, &xs).unwrap();
        let (tg, _) = evolve(&g, 1.0, 1.2, 8, &shifted).unwrap();
        for (rf, rg) in tf.u.iter().zip(&tg.u) {
            for (p, q) in rf.iter().zip(rg) {
                assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0), "{p} vs {q}");
            }
        }
    }

    #[test]
    fn bad_inputs() {
        let f = family_19(&int(2), &int(1), &alpha(1, 3)).unwrap();
        let xs = linspace(1.0, 2.0, 11);
        assert!(matches!(evolve(&f, 0.0, 1.0, 4, &xs), Err(Error::InvalidInput(_))));
        assert!(matches!(evolve(&f, 1.0, 2.0, 0, &xs), Err(Error::InvalidInput(_))));
        assert!(matches!(evolve(&f, 1.0, 2.0, 4, &xs[..3]), Err(Error::InvalidInput(_))));
        let neg = linspace(-2.0, -1.0, 11);
        assert!(matches!(evolve(&f, 1.0, 2.0, 4, &neg), Err(Error::Domain(_))));
    }
}
