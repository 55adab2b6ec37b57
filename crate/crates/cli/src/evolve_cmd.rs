use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;

use fraclie_core::verify::{convergence_study, default_grid, evolve, linspace, ConvergenceStudy, EvolveReport, Trajectory};
use fraclie_core::Error;
use serde::Serialize;

use crate::args::{EvolveArgs, Format};
use crate::family::{build, Built};
use crate::{emit, CliError, Ctx, SCHEMA};

#[derive(Serialize)]
struct EvolveOutput {
    schema: &'static str,
    command: &'static str,
    seed: u64,
    family: String,
    alpha: String,
    params: BTreeMap<String, String>,
    passed: bool,
    run: EvolveReport,
    /// Ladder `steps/4, steps/2, steps`; absent when it has fewer than two rungs.
    convergence: Option<ConvergenceStudy>,
}

/// Distinct rungs `steps/4, steps/2, steps`, dropping those below one step.
pub fn ladder(steps: usize) -> Vec<usize> {
    let mut l: Vec<usize> = [steps / 4, steps / 2, steps].into_iter().filter(|&n| n >= 1).collect();
    l.dedup();
    l
}

pub fn write_csv<W: Write>(w: W, traj: &Trajectory) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "x", "u", "v"])?;
    for (t, x, u, v) in traj.rows() {
        out.serialize((t, x, u, v))?;
    }
    out.flush()?;
    Ok(())
}

pub fn evolve_cmd(args: &EvolveArgs, ctx: &Ctx) -> Result<bool, CliError> {
    let family = match build(&args.family)? {
        Built::Explicit(f) | Built::Implicit(_, f) => f,
        Built::Lemma2(_) => return Err(Error::InvalidInput("lemma2 is a reduced ODE solution; evolve needs a PDE family".into()).into()),
    };
    let (x0, x1) = match (args.x0, args.x1) {
        (Some(a), Some(b)) => (a, b),
        (None, None) => {
            let xs = default_grid(&family, None)?.xs();
            (xs[0], xs[xs.len() - 1])
        }
        _ => return Err(CliError::Input("--x0 and --x1 go together".into())),
    };
    let xs = linspace(x0, x1, args.nx);
    let (traj, run) = evolve(&family, args.t0, args.t1, args.steps, &xs)?;
    let rungs = ladder(args.steps);
    let convergence = if rungs.len() >= 2 { Some(convergence_study(&family, args.t0, args.t1, &rungs, &xs)?) } else { None };
    let out = EvolveOutput {
        schema: SCHEMA,
        command: "evolve",
        seed: ctx.seed,
        family: family.id.clone(),
        alpha: family.alpha.to_string(),
        params: family.params.clone(),
        passed: true,
        run,
        convergence,
    };
    let summary = serde_json::to_string_pretty(&out)?;
    if ctx.format(Format::Json) == Format::Csv {
        match &ctx.output {
            Some(p) => write_csv(File::create(p)?, &traj)?,
            None => write_csv(std::io::stdout().lock(), &traj)?,
        }
        match &args.summary {
            Some(p) => std::fs::write(p, summary + "\n")?,
            None => eprintln!("{summary}"),
        }
    } else {
        if let Some(p) = &args.csv {
            write_csv(File::create(p)?, &traj)?;
        }
        emit(ctx, &summary)?;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_rungs() {
        assert_eq!(ladder(1), vec![1]);
        assert_eq!(ladder(2), vec![1, 2]);
        assert_eq!(ladder(200), vec![50, 100, 200]);
    }
}
