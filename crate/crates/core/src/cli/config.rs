//! `key = value` config files merged into the argument list.
//!
//! Keys are long option names (`_` and `-` are interchangeable). A key fills
//! its option only when the command line does not set it. Boolean flags take
//! `true` or `false`.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, Command};

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
    Io(String),
}

fn parse_lines(path: &Path, text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Usage(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                i + 1
            )));
        };
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Value of `--config` in `argv`, if any.
fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn given_on_command_line(argv: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let with_eq = format!("--{long}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_eq)
    })
}

/// Returns `argv` extended with options from the `--config` file, if one is given.
pub fn merge(cmd: &Command, argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let entries = parse_lines(path, &text)?;

    let sub = argv
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a.to_string_lossy().as_ref()));
    let known = |key: &str| {
        cmd.get_arguments()
            .chain(sub.into_iter().flat_map(|s| s.get_arguments()))
            .find(|a| a.get_long() == Some(key))
    };

    let mut out = argv.clone();
    for (key, value) in entries {
        if key == "config" {
            return Err(ConfigError::Usage(
                "config files cannot include other config files".into(),
            ));
        }
        let Some(arg) = known(&key) else {
            let scope = sub.map_or("the command".to_string(), |s| format!("`{}`", s.get_name()));
            return Err(ConfigError::Usage(format!(
                "{}: unknown key `{key}` for {scope}",
                path.display()
            )));
        };
        if given_on_command_line(&argv, &key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => out.push(format!("--{key}").into()),
                "false" => {}
                _ => {
                    return Err(ConfigError::Usage(format!(
                        "{}: `{key}` takes true or false, got `{value}`",
                        path.display()
                    )))
                }
            },
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::args::Cli;
    use clap::CommandFactory;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn fills_missing_options_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        std::fs::write(&p, "# comment\nattack_edges = 10\nbenign = 7\nseed = 9\n").unwrap();
        let argv = args(&["t", "--config", p.to_str().unwrap(), "generate", "--benign", "3"]);
        let merged = merge(&Cli::command(), argv).unwrap();
        let tail: Vec<String> = merged[6..].iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(tail, ["--attack-edges", "10", "--seed", "9"]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        std::fs::write(&p, "engine = lbp\n").unwrap();
        let argv = args(&["t", "--config", p.to_str().unwrap(), "generate"]);
        assert!(matches!(merge(&Cli::command(), argv), Err(ConfigError::Usage(_))));
        std::fs::write(&p, "engine lbp\n").unwrap();
        let argv = args(&["t", "--config", p.to_str().unwrap(), "propagate"]);
        assert!(matches!(merge(&Cli::command(), argv), Err(ConfigError::Usage(_))));
    }

    #[test]
    fn boolean_keys() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        std::fs::write(&p, "pin_seeds = true\ndegree_normalize = false\n").unwrap();
        let argv = args(&["t", "propagate", "--config", p.to_str().unwrap()]);
        let merged = merge(&Cli::command(), argv).unwrap();
        assert_eq!(merged.last().unwrap(), "--pin-seeds");
        std::fs::write(&p, "pin_seeds = yes\n").unwrap();
        let argv = args(&["t", "propagate", "--config", p.to_str().unwrap()]);
        assert!(merge(&Cli::command(), argv).is_err());
    }
}
