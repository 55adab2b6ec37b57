use fraclie_core::solutions::{
    family_19, family_20_implicit, family_21, family_22, family_5_1, family_5_4, family_5_5, lemma2_solve, Coupling,
    ImplicitCurve, Lemma2Solution, SolutionFamily,
};
use fraclie_core::special::{int, rat, to_f64};
use fraclie_core::Error;
use num_rational::BigRational;

use crate::args::FamilyArgs;

const CURVE_SAMPLES: usize = 200;

pub enum Built {
    Explicit(SolutionFamily),
    Implicit(ImplicitCurve, SolutionFamily),
    Lemma2(Lemma2Solution),
}

fn need<'a>(v: &'a Option<BigRational>, flag: &str, id: &str) -> Result<&'a BigRational, Error> {
    v.as_ref().ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for family {id}")))
}

fn or(v: &Option<BigRational>, default: i64) -> BigRational {
    v.clone().unwrap_or_else(|| int(default))
}

/// Builds the family named by `--family`. Omitted `k` defaults to 1 and
/// omitted integration constants to 0 (1 for the `c1 > 0` of family 22).
pub fn build(a: &FamilyArgs) -> Result<Built, Error> {
    let id = a.family.as_str();
    let al = &a.alpha;
    let k = or(&a.k, 1);
    Ok(match id {
        "5.1" => {
            let coupling = Coupling::power_law(k, or(&a.m, 1));
            Built::Explicit(family_5_1(need(&a.a, "a", id)?, &or(&a.c1, 0), &or(&a.c2, 0), al, coupling)?)
        }
        "19" => Built::Explicit(family_19(need(&a.m, "m", id)?, &k, al)?),
        "21" => Built::Explicit(family_21(need(&a.m, "m", id)?, &k, al, &or(&a.c2, 0))?),
        "22" => Built::Explicit(family_22(&k, al, &or(&a.c1, 1), &or(&a.c2, 0))?),
        "5.4" => Built::Explicit(family_5_4(need(&a.a1, "a1", id)?, need(&a.a2, "a2", id)?, need(&a.c, "c", id)?, &k, al)?),
        "5.5" => Built::Explicit(family_5_5(need(&a.a, "a", id)?, &or(&a.c1, 1), &or(&a.c2, 0), &k, al)?),
        "20" => {
            let lo = a.psi_min.clone().unwrap_or_else(|| rat(1, 20));
            let hi = a.psi_max.clone().unwrap_or_else(|| int(2));
            let curve = family_20_implicit(
                need(&a.m, "m", id)?,
                &k,
                al,
                to_f64(&or(&a.c1, 0)),
                to_f64(&or(&a.c2, 0)),
                to_f64(&or(&a.psi0, 0)),
                (to_f64(&lo), to_f64(&hi)),
                CURVE_SAMPLES,
            )?;
            let fam = curve.to_family()?;
            Built::Implicit(curve, fam)
        }
        "lemma2" => Built::Lemma2(lemma2_solve(
            need(&a.m, "m", id)?,
            al,
            need(&a.a1, "a1", id)?,
            need(&a.a2, "a2", id)?,
            need(&a.b1, "b1", id)?,
            need(&a.b2, "b2", id)?,
        )?),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown family {other:?}; expected one of 5.1, 19, 20, 21, 22, 5.4, 5.5, lemma2"
            )))
        }
    })
}
