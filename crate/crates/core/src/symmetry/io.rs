//! Text exchange format for constraint symmetries.
//!
//! One generator per line in disjoint cycle notation over constraint labels,
//! e.g. `(P1 P2)(P3 P4)`. A row-interchangeable matrix is written as
//! `rows{ (a1 b1)(a2 b2)(a3 b3) }`, one parenthesized group per row. Blank
//! lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::formula::Spec;

use super::{ConstraintPerm, RowMatrix, SymGroup, SymmetryError};

pub fn write_symmetries(group: &SymGroup, spec: &Spec) -> String {
    let mut out = String::new();
    let group_text = |items: &[usize]| -> String {
        items
            .iter()
            .map(|&c| spec.label(c))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for g in &group.generators {
        for cyc in g.cycles() {
            let _ = write!(out, "({})", group_text(&cyc));
        }
        out.push('\n');
    }
    for m in &group.matrices {
        out.push_str("rows{ ");
        for row in m.rows() {
            let _ = write!(out, "({})", group_text(row));
        }
        out.push_str(" }\n");
    }
    out
}

fn parse_groups(
    text: &str,
    line: usize,
    labels: &HashMap<String, usize>,
) -> Result<Vec<Vec<usize>>, SymmetryError> {
    let syntax = |msg: &str| SymmetryError::Syntax {
        line,
        msg: msg.to_string(),
    };
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| syntax("expected `(`"))?;
        let end = body.find(')').ok_or_else(|| syntax("unclosed `(`"))?;
        let mut items = Vec::new();
        for name in body[..end].split_whitespace() {
            let id = labels
                .get(name)
                .copied()
                .ok_or_else(|| SymmetryError::UnknownLabel {
                    line,
                    label: name.to_string(),
                })?;
            items.push(id);
        }
        out.push(items);
        rest = body[end + 1..].trim_start();
    }
    Ok(out)
}

pub fn parse_symmetries(text: &str, spec: &Spec) -> Result<SymGroup, SymmetryError> {
    let labels = spec.label_index();
    let n = spec.len();
    let mut group = SymGroup::identity(n);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if let Some(body) = s.strip_prefix("rows{") {
            let body = body.strip_suffix('}').ok_or(SymmetryError::Syntax {
                line,
                msg: "expected `}` at end of line".into(),
            })?;
            let rows = parse_groups(body, line, &labels)?;
            let m = RowMatrix::new(rows).map_err(|e| SymmetryError::Syntax {
                line,
                msg: e.to_string(),
            })?;
            group.matrices.push(m);
        } else {
            let cycles: Vec<Vec<usize>> = parse_groups(s, line, &labels)?
                .into_iter()
                .filter(|c| !c.is_empty())
                .collect();
            let g = ConstraintPerm::from_cycles(n, &cycles).map_err(|e| SymmetryError::Syntax {
                line,
                msg: e.to_string(),
            })?;
            if !g.is_identity() {
                group.generators.push(g);
            }
        }
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen_php;

    #[test]
    fn round_trip() {
        let spec = gen_php(4, 2).unwrap().spec;
        let text = "# pigeons\n(P1 P2)(P3 P4)\n\nrows{ (P1)(P2)(P3)(P4) }\nrows{ (H1)(H2) }\n";
        let g = parse_symmetries(text, &spec).unwrap();
        assert_eq!(g.generators.len(), 1);
        assert_eq!(g.generators[0].cycles(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(g.matrices.len(), 2);
        let written = write_symmetries(&g, &spec);
        assert_eq!(
            written,
            "(P1 P2)(P3 P4)\nrows{ (P1)(P2)(P3)(P4) }\nrows{ (H1)(H2) }\n"
        );
        assert_eq!(parse_symmetries(&written, &spec).unwrap(), g);
    }

    #[test]
    fn errors() {
        let spec = gen_php(4, 2).unwrap().spec;
        assert!(matches!(
            parse_symmetries("(P1 Q9)", &spec),
            Err(SymmetryError::UnknownLabel { line: 1, .. })
        ));
        assert!(matches!(
            parse_symmetries("\n(P1 P2", &spec),
            Err(SymmetryError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_symmetries("(P1 P2)(P2 P3)", &spec),
            Err(SymmetryError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_symmetries("rows{ (P1 P2)(P3) }", &spec),
            Err(SymmetryError::Syntax { line: 1, .. })
        ));
    }
}
