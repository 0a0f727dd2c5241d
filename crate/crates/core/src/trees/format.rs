//! Line-oriented merge tree files.
//!
//! ```text
//! MT 4
//! 0 0 -1
//! 1 3 0
//! 2 10 1
//! 3 6 1
//! ```
//!
//! The header gives the node count; each following line is `<id> <value> <parent>`
//! with `-1` marking the root. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::tree::{MergeTree, NodeId};
use crate::error::{Error, Result};

pub fn parse_mt(text: &str, path: &Path) -> Result<MergeTree> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing 'MT <nodeCount>' header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("MT") {
        return Err(Error::parse(path, hline, format!("expected 'MT <nodeCount>', found '{header}'")));
    }
    let count: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(path, hline, "header needs a non-negative node count"))?;
    if parts.next().is_some() {
        return Err(Error::parse(path, hline, "trailing tokens after node count"));
    }

    let mut records = Vec::with_capacity(count);
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, lineno, "expected '<id> <value> <parent>'"));
        }
        let id: NodeId = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad node id '{}'", fields[0])))?;
        let value: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad scalar value '{}'", fields[1])))?;
        let parent: i64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad parent id '{}'", fields[2])))?;
        let parent = match parent {
            -1 => None,
            p if p >= 0 => Some(p as NodeId),
            _ => return Err(Error::parse(path, lineno, "parent must be a node id or -1")),
        };
        records.push((id, value, parent));
    }
    if records.len() != count {
        return Err(Error::parse(
            path,
            hline,
            format!("header announces {count} nodes, found {}", records.len()),
        ));
    }
    MergeTree::from_records(&records)
}

pub fn read_mt(path: &Path) -> Result<MergeTree> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mt(&text, path)
}

pub fn format_mt(tree: &MergeTree) -> String {
    let mut out = format!("MT {}\n", tree.len());
    for v in 0..tree.len() {
        let parent = tree.parent(v).map_or(-1, |p| p as i64);
        writeln!(out, "{} {} {}", v, tree.value(v), parent).unwrap();
    }
    out
}

pub fn write_mt(tree: &MergeTree, path: &Path) -> Result<()> {
    std::fs::write(path, format_mt(tree)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::fixtures;

    #[test]
    fn round_trip() {
        let t = fixtures::with_short_branch();
        let back = parse_mt(&format_mt(&t), Path::new("x.mt")).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn accepts_any_line_order() {
        let text = "MT 4\n2 10 1\n0 0 -1\n# comment\n3 6 1\n1 3 0\n";
        assert_eq!(parse_mt(text, Path::new("a.mt")).unwrap(), fixtures::triangle_a());
    }

    #[test]
    fn malformed_header_names_line() {
        let err = parse_mt("\nTREE 4\n", Path::new("bad.mt")).unwrap_err();
        assert_eq!(err.to_string(), "bad.mt:2: expected 'MT <nodeCount>', found 'TREE 4'");
    }

    #[test]
    fn rejects_invalid_merge_tree() {
        let err = parse_mt("MT 3\n0 0 -1\n1 5 0\n2 3 1\n", Path::new("x.mt")).unwrap_err();
        assert!(matches!(err, Error::InvalidTree(_)), "{err}");
    }

    #[test]
    fn count_mismatch() {
        let err = parse_mt("MT 3\n0 0 -1\n1 5 0\n", Path::new("x.mt")).unwrap_err();
        assert!(err.to_string().contains("announces 3"));
    }
}
