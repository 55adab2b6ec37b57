use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::family::{Component, Coupling, GeneratorRef, SolutionFamily, TimeTerm};
use crate::catalog::{params, u5_hypothesis};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::special::{gamma_rational, int, real_pow, to_f64};
use crate::symbolic::AlphaParameter;
use crate::verify::{integrate_adaptive, linspace};

const QUAD_TOL: f64 = 1e-13;
const QUAD_DEPTH: u32 = 120;

/// Solution of `ψ' = G1 φ`, `k² φ^{2m} φ' = G2 ψ` given implicitly by
/// `x = c2 + Kx ∫_{ψ0}^{ψ} (θ² + c1)^{-1/(2m+2)} dθ`,
/// `φ = (R (ψ² + c1))^{1/(2m+2)}`, tabulated on a ψ range.
#[derive(Clone, Debug)]
pub struct ImplicitCurve {
    pub m: BigRational,
    pub k: BigRational,
    pub alpha: AlphaParameter,
    pub c1: f64,
    pub c2: f64,
    pub psi0: f64,
    pub kx: f64,
    /// `R^{1/(2m+2)}`.
    pub phi_scale: f64,
    pub g1: f64,
    pub g2: f64,
    exponent: f64,
    /// `(ψ_i, x_i)`, strictly monotone in both coordinates.
    pub samples: Vec<(f64, f64)>,
}

pub fn family_20_implicit(
    m: &BigRational,
    k: &BigRational,
    alpha: &AlphaParameter,
    c1: f64,
    c2: f64,
    psi0: f64,
    psi_range: (f64, f64),
    n_samples: usize,
) -> Result<ImplicitCurve> {
    alpha.require_unit_interval()?;
    let al = alpha.value();
    let one = BigRational::one();
    if !u5_hypothesis(m, al) {
        return Err(Error::HypothesisViolated(format!("m < 0 or m > α/(1-α) (m = {m}, α = {al})")));
    }
    if *m == -&one {
        return Err(Error::SingularParameter("m = -1".into()));
    }
    if !(psi_range.1 > psi_range.0) || n_samples < 2 {
        return Err(Error::InvalidInput("ψ range must be increasing with at least 2 samples".into()));
    }
    let l1 = -(al / m);
    let l2 = -((m + &one) * al / m);
    let l3 = &l2 - al;
    let ga = gamma_rational(&(&one + &l1))?;
    let gb = gamma_rational(&(&one + &l2))?;
    let gc = gamma_rational(&(&one + &l3))?;
    let (g1, g2) = (ga / gb, gb / gc);
    let (mf, kf) = (to_f64(m), to_f64(k));
    let root = &one / (int(2) * m + int(2));
    let kx = real_pow(kf * kf / ((mf + 1.0) * g2 * g1.powf(2.0 * mf + 1.0)), &root)?;
    let phi_scale = real_pow((mf + 1.0) * g2 / (g1 * kf * kf), &root)?;
    let mut curve = ImplicitCurve {
        m: m.clone(),
        k: k.clone(),
        alpha: alpha.clone(),
        c1,
        c2,
        psi0,
        kx,
        phi_scale,
        g1,
        g2,
        exponent: to_f64(&root),
        samples: Vec::new(),
    };
    let psis = linspace(psi_range.0, psi_range.1, n_samples);
    let mut x = curve.x_of(psis[0])?;
    let mut samples = vec![(psis[0], x)];
    for w in psis.windows(2) {
        x += curve.kx * curve.integral(w[0], w[1])?;
        samples.push((w[1], x));
    }
    let increasing = samples[1].1 > samples[0].1;
    if !samples.windows(2).all(|w| if increasing { w[1].1 > w[0].1 } else { w[1].1 < w[0].1 }) {
        return Err(Error::NonMonotone);
    }
    curve.samples = samples;
    Ok(curve)
}

impl ImplicitCurve {
    fn integrand(&self, theta: f64) -> f64 {
        let base = theta * theta + self.c1;
        if base > 0.0 {
            base.powf(-self.exponent)
        } else {
            f64::NAN
        }
    }

    fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if self.c1 < 0.0 {
            let r = (-self.c1).sqrt();
            if a.min(b) < r && a.max(b) > -r {
                return Err(Error::NonMonotone);
            }
        }
        let f = |s: f64| self.integrand(s);
        // a vanishing base at an interior point is split off as an endpoint
        if self.c1 == 0.0 && a < 0.0 && b > 0.0 {
            return Ok(integrate_adaptive(&f, a, 0.0, QUAD_TOL, QUAD_DEPTH)?
                + integrate_adaptive(&f, 0.0, b, QUAD_TOL, QUAD_DEPTH)?);
        }
        integrate_adaptive(&f, a, b, QUAD_TOL, QUAD_DEPTH)
    }

    /// `x(ψ)` by direct quadrature from `ψ0`.
    pub fn x_of(&self, psi: f64) -> Result<f64> {
        Ok(self.c2 + self.kx * self.integral(self.psi0, psi)?)
    }

    pub fn phi_of_psi(&self, psi: Jet) -> Jet {
        (psi * psi + self.c1).powf(self.exponent).scale(self.phi_scale)
    }

    /// `dψ/dx` at `ψ`.
    fn slope(&self, psi: f64) -> f64 {
        1.0 / (self.kx * self.integrand(psi))
    }

    pub fn x_range(&self) -> (f64, f64) {
        let (a, b) = (self.samples[0].1, self.samples[self.samples.len() - 1].1);
        (a.min(b), a.max(b))
    }

    /// `ψ(x)`: Hermite interpolation in the table, polished by Newton steps
    /// on the exact integral within the bracketing interval.
    pub fn psi_of(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!("x = {x} outside the tabulated range [{lo}, {hi}]")));
        }
        let increasing = self.samples[1].1 > self.samples[0].1;
        let idx = self.samples.partition_point(|s| if increasing { s.1 <= x } else { s.1 >= x });
        let i = idx.clamp(1, self.samples.len() - 1) - 1;
        let ((p0, x0), (p1, x1)) = (self.samples[i], self.samples[i + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let (d0, d1) = (self.slope(p0) * h, self.slope(p1) * h);
        let (h00, h10, h01, h11) =
            (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s, -2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
        let mut psi = h00 * p0 + h10 * d0 + h01 * p1 + h11 * d1;
        let (mut a, mut b) = (p0.min(p1), p0.max(p1));
        if !(psi > a && psi < b) {
            psi = 0.5 * (a + b);
        }
        for _ in 0..60 {
            let g = x0 + self.kx * self.integral(p0, psi)? - x;
            if g.abs() <= 1e-14 * x.abs().max(1.0) {
                break;
            }
            // keep the root bracketed; x is monotone in ψ
            if (g > 0.0) == (self.kx > 0.0) {
                b = psi;
            } else {
                a = psi;
            }
            let step = psi - g * self.slope(psi);
            psi = if step.is_finite() && step > a && step < b { step } else { 0.5 * (a + b) };
            if b - a < 1e-15 * psi.abs().max(1.0) {
                break;
            }
        }
        Ok(psi)
    }

    /// `ψ(x)` as a jet: derivatives follow from `dψ/dx = 1/(Kx (ψ²+c1)^{-1/(2m+2)})`.
    pub fn psi_jet(&self, x: Jet) -> Jet {
        let psi = match self.psi_of(x.v) {
            Ok(p) => p,
            Err(_) => return Jet::constant(f64::NAN),
        };
        let e = self.exponent;
        let base = psi * psi + self.c1;
        let d1 = base.powf(e) / self.kx;
        let d2 = e * base.powf(e - 1.0) * 2.0 * psi / self.kx * d1;
        x.chain(psi, d1, d2)
    }

    /// `u = t^{-α/m} φ(x)`, `v = t^{-(m+1)α/m} ψ(x)` on the tabulated range.
    pub fn to_family(&self) -> Result<SolutionFamily> {
        let al = self.alpha.value();
        let one = BigRational::one();
        let case = Coupling::power_law(self.k.clone(), self.m.clone()).case(&self.alpha)?;
        let me = Arc::new(self.clone());
        let (cu, cv) = (me.clone(), me.clone());
        let (lo, hi) = self.x_range();
        let mut echo = BTreeMap::new();
        echo.insert("m".to_string(), self.m.to_string());
        echo.insert("k".to_string(), self.k.to_string());
        echo.insert("c1".to_string(), self.c1.to_string());
        echo.insert("c2".to_string(), self.c2.to_string());
        echo.insert("psi0".to_string(), self.psi0.to_string());
        Ok(SolutionFamily {
            id: "20".into(),
            alpha: self.alpha.clone(),
            params: echo,
            coupling: Coupling::power_law(self.k.clone(), self.m.clone()),
            u: Component::monomial(vec![TimeTerm::new(-(al / &self.m), move |x| cu.phi_of_psi(cu.psi_jet(x)))]),
            v: Component::monomial(vec![TimeTerm::new(-((&self.m + &one) * al / &self.m), move |x| cv.psi_jet(x))]),
            domain: Arc::new(move |x, _| x >= lo && x <= hi),
            domain_text: format!("{lo} ≤ x ≤ {hi}"),
            notes: vec![format!("Kx = {:.12}, R^(1/(2m+2)) = {:.12}", self.kx, self.phi_scale)],
            generators: vec![GeneratorRef::new(case, 5, params(&[]))],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::explicit::{family_21, family_22};
    use crate::special::rat;

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    #[test]
    fn agrees_with_power_solution_at_c1_zero() {
        let a = alpha(1, 3);
        let curve = family_20_implicit(&int(2), &int(1), &a, 0.0, 0.5, 0.0, (0.05, 2.0), 200).unwrap();
        let f21 = family_21(&int(2), &int(1), &a, &rat(1, 2)).unwrap();
        let (lo, hi) = curve.x_range();
        for i in 0..=10 {
            let x = lo + (hi - lo) * i as f64 / 10.0;
            let psi = curve.psi_of(x).unwrap();
            let phi = curve.phi_of_psi(Jet::constant(psi)).v;
            let (u, v) = f21.evaluate(x, 1.0).unwrap();
            assert!((psi - v).abs() < 1e-6 * v.abs().max(1.0), "x = {x}: {psi} vs {v}");
            assert!((phi - u).abs() < 1e-6 * u.abs().max(1.0), "x = {x}: {phi} vs {u}");
        }
    }

    #[test]
    fn agrees_with_tangent_solution() {
        let a = alpha(1, 2);
        let curve = family_20_implicit(&rat(-1, 2), &int(1), &a, 1.0, 0.0, 0.0, (-3.0, 3.0), 200).unwrap();
        let f22 = family_22(&int(1), &a, &int(1), &int(0)).unwrap();
        for x in [-1.5, -0.4, 0.0, 0.3, 1.1, 2.0] {
            let psi = curve.psi_of(x).unwrap();
            let (u, v) = f22.evaluate(x, 1.0).unwrap();
            assert!((psi - v).abs() < 1e-6 * v.abs().max(1.0), "x = {x}: {psi} vs {v}");
            assert!((curve.phi_of_psi(Jet::constant(psi)).v - u).abs() < 1e-6 * u.max(1.0));
        }
    }

    #[test]
    fn empty_integral_gives_c2() {
        let curve = family_20_implicit(&int(2), &int(1), &alpha(1, 3), 1.0, 0.7, 0.3, (0.0, 1.0), 5).unwrap();
        assert_eq!(curve.x_of(0.3).unwrap(), 0.7);
    }

    #[test]
    fn rejects_nonreal_and_bad_ranges() {
        // negative radicand in Kx for m = 2, α = 1/2
        assert!(matches!(
            family_20_implicit(&int(2), &int(1), &alpha(1, 2), 0.0, 0.0, 0.0, (0.1, 1.0), 10),
            Err(Error::NonrealRoot(_))
        ));
        // θ² + c1 < 0 inside the range
        assert!(matches!(
            family_20_implicit(&int(2), &int(1), &alpha(1, 3), -1.0, 0.0, 2.0, (-0.5, 0.5), 10),
            Err(Error::NonMonotone)
        ));
        assert!(family_20_implicit(&int(2), &int(1), &alpha(1, 3), 1.0, 0.0, 0.0, (1.0, 0.0), 10).is_err());
    }
}
