//! `--config FILE` support: `key = value` lines become `--key=value` flags
//! unless the flag was given on the command line.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;

use clap::CommandFactory;

use crate::args::Cli;
use crate::CliError;

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {}: expected key=value, got {line:?}", n + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Flags accepted by the subcommand named in `args`, plus the global ones.
fn accepted_flags(args: &[String]) -> HashSet<String> {
    let cmd = Cli::command();
    let mut names: HashSet<String> =
        cmd.get_arguments().filter_map(|a| a.get_long()).map(str::to_string).collect();
    if let Some(sub) = args.iter().skip(1).find_map(|a| cmd.find_subcommand(a)) {
        names.extend(sub.get_arguments().filter_map(|a| a.get_long()).map(str::to_string));
    }
    names
}

pub fn expand(args: Vec<OsString>) -> Result<Vec<String>, CliError> {
    let mut args: Vec<String> = args
        .into_iter()
        .map(|a| a.into_string().map_err(|a| CliError::Input(format!("argument is not UTF-8: {a:?}"))))
        .collect::<Result<_, _>>()?;
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Input(format!("cannot read config {path}: {e}")))?;
    let accepted = accepted_flags(&args);
    let given: HashSet<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (key, value) in parse_pairs(&text)? {
        if key == "config" {
            return Err(CliError::Input("config files cannot include other config files".into()));
        }
        if !given.contains(&key) && accepted.contains(&key) {
            args.push(format!("--{key}={value}"));
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_skip_comments_and_normalise_keys() {
        let p = parse_pairs("# run\nalpha = 1/3\n\n--psi_min=0\n").unwrap();
        assert_eq!(p, vec![("alpha".into(), "1/3".into()), ("psi-min".into(), "0".into())]);
        assert!(parse_pairs("alpha").is_err());
    }

    #[test]
    fn command_line_wins_and_foreign_keys_are_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "alpha=1/3\nm=2\nfilter=tables\nsteps=5\n").unwrap();
        let args: Vec<OsString> = ["fraclie", "verify", "--family", "19", "--m", "3", "--config"]
            .iter()
            .map(OsString::from)
            .chain([path.clone().into_os_string()])
            .collect();
        let out = expand(args).unwrap();
        assert!(out.contains(&"--alpha=1/3".to_string()));
        assert!(!out.iter().any(|a| a.starts_with("--m=")));
        assert!(!out.iter().any(|a| a.starts_with("--filter") || a.starts_with("--steps")));
    }
}
