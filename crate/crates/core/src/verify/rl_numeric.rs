use serde::Serialize;

use super::quadrature::{gauss_jacobi, gauss_legendre};
use crate::error::{Error, Result};
use crate::special::gamma;

/// Node count, behaviour `s^hint` of the integrand at 0, and the accepted
/// disagreement between two refinements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub hint: f64,
    pub tol: f64,
}

impl QuadratureSpec {
    pub fn new(nodes: usize, hint: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("quadrature tolerance must be positive, got {tol}")));
        }
        if !(hint > -1.0) {
            return Err(Error::InvalidInput(format!("singularity hint must exceed -1, got {hint}")));
        }
        if nodes < 4 {
            return Err(Error::InvalidInput("at least 4 nodes per panel are required".into()));
        }
        Ok(QuadratureSpec { nodes, hint, tol })
    }

    pub fn with_hint(hint: f64) -> Result<Self> {
        Self::new(16, hint, 1e-7)
    }
}

/// Composite rule for `∫_0^1 g(σ) (1-σ)^{-α} dσ` when `g ~ σ^p` at 0.
///
/// A Gauss–Jacobi panel carrying `σ^p` sits at the origin, geometrically
/// graded Legendre panels cover `[σ_1, 1/2]`, and a Gauss–Jacobi panel
/// carrying `(1-σ)^{-α}` covers `[1/2, 1]`.
#[derive(Clone, Debug)]
pub struct SingularRule {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const GRADING: f64 = 0.2;

impl SingularRule {
    pub fn new(alpha: f64, hint: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(hint > -1.0) {
            return Err(Error::InvalidInput(format!("singularity hint must exceed -1, got {hint}")));
        }
        // first panel small enough that its σ^{p+1} mass is below 1e-16
        let levels = ((16.0 * std::f64::consts::LN_10) / ((hint + 1.0) * (1.0 / GRADING).ln())).ceil() as i32;
        let levels = levels.clamp(3, 400);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();

        let kernel = |s: f64| (1.0 - s).powf(-alpha);
        let s1 = 0.5 * GRADING.powi(levels);
        let origin = gauss_jacobi(n, 0.0, hint)?;
        for (&x, &w) in origin.nodes.iter().zip(&origin.weights) {
            let s = 0.5 * s1 * (1.0 + x);
            nodes.push(s);
            weights.push(w * 0.5 * s1 * (1.0 + x).powf(-hint) * kernel(s));
        }
        let gl = gauss_legendre(n)?;
        for j in (0..levels).rev() {
            let (a, b) = (0.5 * GRADING.powi(j + 1), 0.5 * GRADING.powi(j));
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                let s = c + h * x;
                nodes.push(s);
                weights.push(w * h * kernel(s));
            }
        }
        let end = gauss_jacobi(n, -alpha, 0.0)?;
        for (&x, &w) in end.nodes.iter().zip(&end.weights) {
            nodes.push(0.75 + 0.25 * x);
            weights.push(w * 0.25f64.powf(1.0 - alpha));
        }
        Ok(SingularRule { alpha, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, g: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (&s, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(s)?;
        }
        Ok(acc)
    }

    /// The fractional integral `I^{1-α} f(t)`.
    pub fn fractional_integral(&self, f: &dyn Fn(f64) -> Result<f64>, t: f64) -> Result<f64> {
        let a = self.alpha;
        Ok(t.powf(1.0 - a) / gamma(1.0 - a) * self.integrate(&|s| f(t * s))?)
    }

    /// `D^α f(t) = d/dt I^{1-α} f(t)` by central differences with step
    /// `1e-4·t` and one Richardson step.
    pub fn rl_derivative(&self, f: &dyn Fn(f64) -> Result<f64>, t: f64) -> Result<f64> {
        let h = 1e-4 * t;
        let diff = |h: f64| -> Result<f64> {
            Ok((self.fractional_integral(f, t + h)? - self.fractional_integral(f, t - h)?) / (2.0 * h))
        };
        let coarse = diff(h)?;
        let fine = diff(0.5 * h)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }
}

/// Numerical Riemann–Liouville derivative of order `α ∈ (0, 1)` at `t > 0`.
///
/// Two rules with `nodes` and `nodes + nodes/2` points per panel are
/// compared; a disagreement above `spec.tol` (relative to `max(1, |D^α f|)`)
/// is reported as `QuadratureFailure`.
pub fn rl_derivative_numeric(f: &dyn Fn(f64) -> Result<f64>, alpha: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("fractional derivative needs t > 0, got {t}")));
    }
    let coarse = SingularRule::new(alpha, spec.hint, spec.nodes)?.rl_derivative(f, t)?;
    let fine = SingularRule::new(alpha, spec.hint, spec.nodes + spec.nodes / 2)?.rl_derivative(f, t)?;
    if !fine.is_finite() || (fine - coarse).abs() > spec.tol * fine.abs().max(1.0) {
        return Err(Error::QuadratureFailure(format!(
            "refinements disagree at t = {t}: {coarse} vs {fine}"
        )));
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(p: f64) -> impl Fn(f64) -> Result<f64> {
        move |s: f64| Ok(s.powf(p))
    }

    #[test]
    fn kernel_member_is_annihilated() {
        let spec = QuadratureSpec::with_hint(-0.5).unwrap();
        let d = rl_derivative_numeric(&power(-0.5), 0.5, 1.0, &spec).unwrap();
        assert!(d.abs() < 1e-8, "{d}");
    }

    #[test]
    fn linear_function() {
        let spec = QuadratureSpec::with_hint(1.0).unwrap();
        let d = rl_derivative_numeric(&power(1.0), 0.5, 1.0, &spec).unwrap();
        assert!((d - 1.0 / gamma(1.5)).abs() < 1e-9, "{d}");
        assert!((d - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-9);
    }

    #[test]
    fn constant_function() {
        let spec = QuadratureSpec::with_hint(0.0).unwrap();
        let d = rl_derivative_numeric(&|_| Ok(1.0), 1.0 / 3.0, 8.0, &spec).unwrap();
        assert!((d - 0.369244).abs() < 1e-6, "{d}");
    }

    #[test]
    fn logarithmic_singularity() {
        // D^α [t^{α-1} ln t] = Γ(α) t^{-1}
        let a = 1.0 / 3.0;
        let spec = QuadratureSpec::with_hint(a - 1.0).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let d = rl_derivative_numeric(&|s: f64| Ok(s.powf(a - 1.0) * s.ln()), a, t, &spec).unwrap();
            assert!((d - gamma(a) / t).abs() < 1e-7, "t = {t}: {d}");
        }
    }

    #[test]
    fn bad_spec_rejected() {
        assert!(QuadratureSpec::new(16, -1.0, 1e-6).is_err());
        assert!(QuadratureSpec::new(16, 0.0, 0.0).is_err());
        assert!(rl_derivative_numeric(&|_| Ok(1.0), 0.5, 0.0, &QuadratureSpec::with_hint(0.0).unwrap()).is_err());
    }
}
