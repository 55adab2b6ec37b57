use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Tensor grid over `[x0, x1] × [t0, t1]` with `t0 > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(x0: f64, x1: f64, nx: usize, t0: f64, t1: f64, nt: usize) -> Result<Self> {
        if !(t0 > 0.0) {
            return Err(Error::InvalidInput(format!("grid requires t0 > 0, got {t0}")));
        }
        if nx < 2 || nt < 2 {
            return Err(Error::InvalidInput("grid requires at least 2 points per axis".into()));
        }
        if !(x1 > x0 && t1 > t0) || ![x0, x1, t0, t1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("grid ranges must be finite and increasing".into()));
        }
        Ok(GridSpec { x0, x1, nx, t0, t1, nt })
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x0, self.x1, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t0, self.t1, self.nt)
    }

    /// All nodes, t-major.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = self.xs();
        self.ts().into_iter().flat_map(|t| xs.iter().map(move |&x| (x, t))).collect()
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

/// How the derivatives entering a residual were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPath {
    ExactMonomial,
    Quadrature,
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationResidual {
    pub equation: String,
    pub max: f64,
    pub rms: f64,
}

impl EquationResidual {
    /// Summarise pointwise residuals; the sum runs in input order so the
    /// result does not depend on thread scheduling.
    pub fn from_values(equation: &str, values: &[f64]) -> Self {
        let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let rms = if values.is_empty() {
            0.0
        } else {
            (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
        };
        EquationResidual { equation: equation.to_string(), max, rms: rms.min(max) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub kind: String,
    pub equations: Vec<EquationResidual>,
    pub path: EvalPath,
    pub grid: Option<GridSpec>,
    pub params: BTreeMap<String, String>,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.equations.iter().fold(0.0f64, |a, e| a.max(e.max))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Values and first/second derivatives of a solution pair at one point.
#[derive(Clone, Copy, Debug, Default)]
pub struct PairJets {
    /// `u` along x at fixed t.
    pub ux: Jet,
    pub vx: Jet,
    /// `u` along t at fixed x.
    pub ut: Jet,
    pub vt: Jet,
}

/// A pair `(u(x,t), v(x,t))` that can report local derivatives.
pub trait PairEvaluator: Sync {
    fn jets(&self, x: f64, t: f64) -> Result<PairJets>;

    /// Whether `jets` is exact (true) or finite-difference based.
    fn analytic(&self) -> bool {
        true
    }
}

/// Adapter for a plain `(x, t) -> (u, v)` function; derivatives by central
/// differences with one Richardson step.
pub struct FnPair<F>(pub F);

fn richardson(f: &dyn Fn(f64) -> Result<f64>, s: f64) -> Result<Jet> {
    let h = 1e-3 * s.abs().max(1e-2);
    let f0 = f(s)?;
    let d = |h: f64| -> Result<(f64, f64)> {
        let (fp, fm) = (f(s + h)?, f(s - h)?);
        Ok(((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)))
    };
    let (d1h, d2h) = d(h)?;
    let (d1q, d2q) = d(h / 2.0)?;
    Ok(Jet::new(f0, (4.0 * d1q - d1h) / 3.0, (4.0 * d2q - d2h) / 3.0))
}

impl<F> PairEvaluator for FnPair<F>
where
    F: Fn(f64, f64) -> Result<(f64, f64)> + Sync,
{
    fn jets(&self, x: f64, t: f64) -> Result<PairJets> {
        let f = &self.0;
        Ok(PairJets {
            ux: richardson(&|s| f(s, t).map(|p| p.0), x)?,
            vx: richardson(&|s| f(s, t).map(|p| p.1), x)?,
            ut: richardson(&|s| f(x, s).map(|p| p.0), t)?,
            vt: richardson(&|s| f(x, s).map(|p| p.1), t)?,
        })
    }

    fn analytic(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 5, 0.0, 1.0, 5).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1, 0.5, 1.0, 5).is_err());
        let g = GridSpec::new(0.0, 1.0, 3, 0.5, 1.0, 2).unwrap();
        assert_eq!(g.points().len(), 6);
        assert_eq!(g.xs(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn summary_invariant() {
        let r = EquationResidual::from_values("e", &[3.0, -4.0, 0.0]);
        assert_eq!(r.max, 4.0);
        assert!(r.rms <= r.max && r.rms >= 0.0);
    }

    #[test]
    fn finite_difference_pair() {
        let p = FnPair(|x: f64, t: f64| Ok((x * x * t, (x + t).sin())));
        let j = p.jets(0.7, 1.2).unwrap();
        assert!((j.ux.d1 - 2.0 * 0.7 * 1.2).abs() < 1e-9);
        assert!((j.ux.d2 - 2.0 * 1.2).abs() < 1e-6);
        assert!((j.vt.d1 - 1.9f64.cos()).abs() < 1e-9);
    }
}
