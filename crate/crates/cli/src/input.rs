//! Node lists from the command line or a file.
//!
//! Tokens are decimals separated by whitespace; `v^m` stands for `m` copies
//! of `v`. In files, `#` starts a comment that runs to the end of the line.

use std::fs;
use std::path::Path;

use expdd::NodeMultiset;

use crate::args::NodeArgs;
use crate::error::CliError;

pub fn parse_token(token: &str) -> Result<(f64, usize), CliError> {
    let token = token.trim();
    let (value, mult) = match token.split_once('^') {
        Some((v, m)) => {
            let m: usize = m
                .parse()
                .map_err(|_| CliError::usage(format!("bad multiplicity in node `{token}`")))?;
            (v, m)
        }
        None => (token, 1),
    };
    let x: f64 = value.parse().map_err(|_| CliError::usage(format!("cannot parse node `{token}`")))?;
    if !x.is_finite() {
        return Err(CliError::usage(format!("node `{token}` is not finite")));
    }
    if mult == 0 {
        return Err(CliError::usage(format!("node `{token}` has multiplicity 0")));
    }
    Ok((x, mult))
}

/// Nodes in the order given, with `v^m` expanded.
pub fn parse_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for tok in tokens {
        let (x, m) = parse_token(tok.as_ref())?;
        out.extend(std::iter::repeat_n(x, m));
    }
    Ok(out)
}

pub fn parse_text(text: &str) -> Result<Vec<f64>, CliError> {
    let tokens: Vec<&str> = text
        .lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .collect();
    parse_tokens(&tokens)
}

pub fn read_file(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_text(&text)
}

/// Collects nodes from the positional tokens followed by the file, if any.
pub fn collect(args: &NodeArgs) -> Result<NodeMultiset, CliError> {
    let mut flat = parse_tokens(&args.nodes)?;
    if let Some(path) = &args.file {
        flat.extend(read_file(path)?);
    }
    if flat.is_empty() {
        return Err(CliError::usage("no nodes given"));
    }
    Ok(NodeMultiset::from_flat(&flat)?)
}
