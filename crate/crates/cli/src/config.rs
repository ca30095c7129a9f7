//! Flat `key=value` configuration files. Keys mirror long flag names; values
//! from the file are placed before the command-line flags so the latter win.

use std::ffi::OsString;

use crate::error::CliError;

pub fn parse_config(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut args = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", k + 1)))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", k + 1)));
        }
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

/// Pulls `--config FILE` out of `argv` and splices the file's flags in right
/// after the subcommand name.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(path.to_string_lossy(), e))?;
    let injected = parse_config(&text)?;
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|k| k + 2)
        .ok_or_else(|| CliError::Usage("missing subcommand".into()))?;
    let tail = rest.split_off(at);
    rest.extend(injected);
    rest.extend(tail);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_flags() {
        let a = parse_config("# c\nreps = 10\n--seed=3\nstandardize=true\ndump=false\n").unwrap();
        let s: Vec<_> = a.iter().map(|x| x.to_string_lossy().into_owned()).collect();
        assert_eq!(s, vec!["--reps", "10", "--seed", "3", "--standardize"]);
        assert!(parse_config("novalue\n").is_err());
    }
}
