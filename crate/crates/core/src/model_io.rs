//! Plain-text ensemble files.
//!
//! ```text
//! file  := line*
//! line  := '#' comment | alpha ' ' tree
//! tree  := 'leaf:+1' | 'leaf:-1' | k ' ' tau ' ' p ' ' tree ' ' tree
//! ```
//!
//! `k` is the 1-based feature, `p` is `+1` or `-1`, and the two subtrees are
//! the `+1` side then the `-1` side (pre-order). Numbers use the shortest
//! representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::assessor::Stump;
use crate::boosting::Ensemble;
use crate::error::{Error, Result};
use crate::tree::TreeNode;

pub fn write_ensemble(e: &Ensemble) -> String {
    let mut out = String::new();
    out.push_str("# apboost ensemble v1\n");
    for (alpha, tree) in &e.rounds {
        let _ = write!(out, "{alpha}");
        write_tree(tree, &mut out);
        out.push('\n');
    }
    out
}

fn write_tree(t: &TreeNode, out: &mut String) {
    match t {
        TreeNode::Leaf { label } => {
            out.push_str(if *label > 0 { " leaf:+1" } else { " leaf:-1" });
        }
        TreeNode::Split { stump, left, right } => {
            let p = if stump.polarity > 0 { "+1" } else { "-1" };
            let _ = write!(out, " {} {} {}", stump.feature + 1, stump.threshold, p);
            write_tree(left, out);
            write_tree(right, out);
        }
    }
}

pub fn parse_ensemble(text: &str) -> Result<Ensemble> {
    let mut e = Ensemble::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let alpha_tok = tokens.next().expect("non-empty line has a token");
        let alpha: f64 = alpha_tok
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad alpha '{alpha_tok}'")))?;
        if !alpha.is_finite() {
            return Err(Error::parse(lineno, "alpha must be finite"));
        }
        let tree = read_tree(&mut tokens, lineno, 0)?;
        if let Some(extra) = tokens.next() {
            return Err(Error::parse(lineno, format!("trailing token '{extra}'")));
        }
        e.push(alpha, tree)?;
    }
    Ok(e)
}

const MAX_DEPTH: usize = 64;

fn read_tree<'t>(
    tokens: &mut impl Iterator<Item = &'t str>,
    lineno: usize,
    depth: usize,
) -> Result<TreeNode> {
    if depth > MAX_DEPTH {
        return Err(Error::parse(lineno, "tree nested too deeply"));
    }
    let tok = tokens
        .next()
        .ok_or_else(|| Error::parse(lineno, "truncated tree"))?;
    match tok {
        "leaf:+1" | "leaf:1" => return Ok(TreeNode::Leaf { label: 1 }),
        "leaf:-1" => return Ok(TreeNode::Leaf { label: -1 }),
        _ => {}
    }
    let k: usize = tok
        .parse()
        .map_err(|_| Error::parse(lineno, format!("expected feature or leaf, got '{tok}'")))?;
    if k == 0 {
        return Err(Error::parse(lineno, "feature indices are 1-based"));
    }
    let tau_tok = tokens
        .next()
        .ok_or_else(|| Error::parse(lineno, "truncated tree"))?;
    let tau: f64 = tau_tok
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad threshold '{tau_tok}'")))?;
    if tau.is_nan() {
        return Err(Error::parse(lineno, "threshold is NaN"));
    }
    let polarity = match tokens.next() {
        Some("+1") | Some("1") => 1,
        Some("-1") => -1,
        Some(other) => return Err(Error::parse(lineno, format!("bad polarity '{other}'"))),
        None => return Err(Error::parse(lineno, "truncated tree")),
    };
    let left = read_tree(tokens, lineno, depth + 1)?;
    let right = read_tree(tokens, lineno, depth + 1)?;
    Ok(TreeNode::Split {
        stump: Stump::new(polarity, k - 1, tau),
        left: Box::new(left),
        right: Box::new(right),
    })
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::arg(format!("'{}' is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn save_ensemble(e: &Ensemble, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), write_ensemble(e).as_bytes())
}

pub fn load_ensemble(path: impl AsRef<Path>) -> Result<Ensemble> {
    parse_ensemble(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Ensemble {
        let tree = TreeNode::Split {
            stump: Stump::new(-1, 2, 0.1 + 0.2),
            left: Box::new(TreeNode::Leaf { label: 1 }),
            right: Box::new(TreeNode::Split {
                stump: Stump::new(1, 0, -1e-300),
                left: Box::new(TreeNode::Leaf { label: -1 }),
                right: Box::new(TreeNode::Leaf { label: 1 }),
            }),
        };
        Ensemble {
            rounds: vec![
                (0.5 * 7f64.ln(), tree),
                (0.25, TreeNode::Leaf { label: -1 }),
            ],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let e = sample();
        let text = write_ensemble(&e);
        assert_eq!(parse_ensemble(&text).unwrap(), e);
        assert!(text.contains(" 3 0.30000000000000004 -1 leaf:+1 1 "));
    }

    #[test]
    fn malformed_lines_report_position() {
        for (text, line) in [
            ("0.5 1 0.5 +1 leaf:+1", 1),
            ("# c\n0.5 leaf:+1\n0.5 0 1 +1 leaf:+1 leaf:-1", 3),
            ("x leaf:+1", 1),
            ("0.5 leaf:+1 leaf:-1", 1),
            ("0.5 2 1 +2 leaf:+1 leaf:-1", 1),
            ("inf leaf:+1", 1),
        ] {
            match parse_ensemble(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
