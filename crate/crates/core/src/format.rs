//! Plain-text family format.
//!
//! ```text
//! n=4
//! {}
//! 1
//! 2,3
//! ```
//!
//! The first non-comment line is `n=<int>`. Every other line is one subset,
//! either as comma-separated 1-based elements (braces optional, `{}` for the
//! empty set) or as a `0x`-prefixed hex mask. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::family::{check_ground, SetFamily, SubsetMask};

pub fn parse_family(text: &str) -> Result<SetFamily> {
    let mut n: Option<usize> = None;
    let mut masks = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: line_no, msg };
        let Some(n) = n else {
            let value = line
                .strip_prefix("n=")
                .ok_or_else(|| bad(format!("expected `n=<int>`, found `{line}`")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad ground size `{value}`")))?;
            check_ground(value).map_err(|e| bad(e.to_string()))?;
            n = Some(value);
            continue;
        };
        let mask = parse_subset(line, n).map_err(bad)?;
        masks.push(mask);
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing `n=<int>` header".into(),
    })?;
    Ok(SetFamily::from_masks(n, masks))
}

fn parse_subset(line: &str, n: usize) -> std::result::Result<SubsetMask, String> {
    if let Some(hex) = line.strip_prefix("0x") {
        let bits = u32::from_str_radix(hex, 16).map_err(|_| format!("bad hex mask `{line}`"))?;
        let mask = SubsetMask(bits);
        if !mask.fits(n) {
            return Err(format!("mask {line} has bits outside [1,{n}]"));
        }
        return Ok(mask);
    }
    let inner = line.trim_start_matches('{').trim_end_matches('}').trim();
    if inner.is_empty() {
        return Ok(SubsetMask::EMPTY);
    }
    let mut elements = Vec::new();
    for tok in inner.split(',') {
        let tok = tok.trim();
        let x: usize = tok.parse().map_err(|_| format!("bad element `{tok}`"))?;
        elements.push(x);
    }
    SubsetMask::from_elements(n, elements).map_err(|e| e.to_string())
}

/// Canonical element form: members ordered by size, then lexicographically.
pub fn write_elements(family: &SetFamily) -> String {
    let mut members: Vec<(usize, Vec<usize>)> = family
        .members()
        .map(|m| (m.len(), m.elements().collect()))
        .collect();
    members.sort();
    let mut out = format!("n={}\n", family.n());
    for (_, elements) in members {
        if elements.is_empty() {
            out.push_str("{}\n");
        } else {
            let parts: Vec<String> = elements.iter().map(|x| x.to_string()).collect();
            out.push_str(&parts.join(","));
            out.push('\n');
        }
    }
    out
}

/// Canonical hex form: one lowercase mask per line in increasing order.
pub fn write_hex(family: &SetFamily) -> String {
    let mut out = format!("n={}\n", family.n());
    for m in family.members() {
        let _ = writeln!(out, "0x{:x}", m.0);
    }
    out
}
