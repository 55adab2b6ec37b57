use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::special::gamma;

/// Nodes and weights of an n-point rule on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Jacobi rule for the weight `(1-x)^a (1+x)^b`, computed from the
/// three-term recurrence by the Golub–Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<GaussRule> {
    if n == 0 || !(a > -1.0 && b > -1.0) {
        return Err(Error::InvalidInput(format!("Gauss–Jacobi needs n ≥ 1 and a, b > -1 (n = {n}, a = {a}, b = {b})")));
    }
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        jac[(i, i)] = if i == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
        };
        if i + 1 < n {
            let k = k + 1.0;
            let beta = if i == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * k * (k + a) * (k + b) * (k + ab)
                    / ((2.0 * k + ab).powi(2) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0))
            };
            let off = beta.sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(GaussRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let s = f(c - dx) + f(c + dx);
        k += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Panels are bisected until each meets its share of `tol`; a panel that is
/// still unresolved at `max_depth` yields `QuadratureFailure`.
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate_adaptive(f, b, a, tol, max_depth).map(|v| -v);
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32, est: (f64, f64)) -> Result<f64> {
        let (val, err) = est;
        if !val.is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= tol || (b - a) <= 1e-15 * b.abs().max(1.0) {
            return Ok(val);
        }
        if depth == 0 {
            return Err(Error::QuadratureFailure(format!("tolerance not met on [{a}, {b}] (error estimate {err:e})")));
        }
        let c = 0.5 * (a + b);
        let left = gk15(f, a, c);
        let right = gk15(f, c, b);
        Ok(rec(f, a, c, 0.5 * tol, depth - 1, left)? + rec(f, c, b, 0.5 * tol, depth - 1, right)?)
    }
    rec(f, a, b, tol, max_depth, gk15(f, a, b))
}
