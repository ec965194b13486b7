//! Text and Graphviz renderings of reduction witnesses.
//!
//! The text form prints the simple types on one line and draws each
//! contraction as an under-bracket; residue positions get a vertical
//! stroke running below every bracket.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::reduction::{ReductionWitness, WitnessError};
use crate::types::CompoundType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFormat {
    Text,
    Dot,
}

impl FromStr for DiagramFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(DiagramFormat::Text),
            "dot" => Ok(DiagramFormat::Dot),
            other => Err(format!("unknown diagram format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("witness does not fit the input: {0}")]
    Mismatch(#[from] WitnessError),
    #[error("word spans cover {covered} types but the input has {len}")]
    WordSpans { covered: usize, len: usize },
}

/// Renders `w` over the bare type string `input`.
pub fn render_diagram(
    input: &CompoundType,
    w: &ReductionWitness,
    format: DiagramFormat,
) -> Result<String, DiagramError> {
    let labels: Vec<String> = input.iter().map(ToString::to_string).collect();
    let groups: Vec<Group> = (0..labels.len())
        .map(|i| Group {
            word: None,
            types: i..i + 1,
        })
        .collect();
    render(&labels, &groups, w, format)
}

/// Renders `w` with each word printed above the types it contributed.
pub fn render_sentence_diagram(
    words: &[(&str, &CompoundType)],
    w: &ReductionWitness,
    format: DiagramFormat,
) -> Result<String, DiagramError> {
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for (word, ty) in words {
        let start = labels.len();
        labels.extend(ty.iter().map(ToString::to_string));
        groups.push(Group {
            word: Some(word.to_string()),
            types: start..labels.len(),
        });
    }
    render(&labels, &groups, w, format)
}

struct Group {
    word: Option<String>,
    types: std::ops::Range<usize>,
}

fn render(
    labels: &[String],
    groups: &[Group],
    w: &ReductionWitness,
    format: DiagramFormat,
) -> Result<String, DiagramError> {
    let covered = groups.iter().map(|g| g.types.len()).sum::<usize>();
    if covered != labels.len() {
        return Err(DiagramError::WordSpans {
            covered,
            len: labels.len(),
        });
    }
    w.validate(labels.len())?;
    Ok(match format {
        DiagramFormat::Text => render_text(labels, groups, w),
        DiagramFormat::Dot => render_dot(labels, groups, w),
    })
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

fn render_text(labels: &[String], groups: &[Group], w: &ReductionWitness) -> String {
    if labels.is_empty() {
        return String::new();
    }
    let with_words = groups.iter().any(|g| g.word.is_some());
    let inner_gap = if with_words { 1 } else { 2 };

    let mut column = vec![0usize; labels.len()];
    let mut word_line = String::new();
    let mut type_line = String::new();
    let mut cursor = 0;
    for group in groups {
        let start = cursor;
        let mut x = start;
        for i in group.types.clone() {
            column[i] = x;
            x += char_len(&labels[i]) + inner_gap;
        }
        let types_width = x.saturating_sub(inner_gap).saturating_sub(start);
        let word_width = group.word.as_deref().map_or(0, char_len);
        pad_to(&mut word_line, start);
        if let Some(word) = &group.word {
            word_line.push_str(word);
        }
        for i in group.types.clone() {
            pad_to(&mut type_line, column[i]);
            type_line.push_str(&labels[i]);
        }
        cursor = start + types_width.max(word_width) + 2;
    }
    let width = char_len(&type_line).max(char_len(&word_line));

    // bracket height: one more than the tallest bracket nested inside
    let links = w.links();
    let mut height = vec![0usize; links.len()];
    let mut order: Vec<usize> = (0..links.len()).collect();
    order.sort_by_key(|&k| links[k].right - links[k].left);
    for &k in &order {
        let outer = links[k];
        height[k] = 1 + order
            .iter()
            .filter(|&&m| links[m].left > outer.left && links[m].right < outer.right)
            .map(|&m| height[m])
            .max()
            .unwrap_or(0);
    }
    let tallest = height.iter().copied().max().unwrap_or(0);
    let rows = tallest + usize::from(!w.residue().is_empty());

    let mut grid = vec![vec![' '; width]; rows];
    for (k, link) in links.iter().enumerate() {
        let (a, b) = (column[link.left], column[link.right]);
        for row in grid.iter_mut().take(height[k]) {
            row[a] = '|';
            row[b] = '|';
        }
        for cell in &mut grid[height[k] - 1][a + 1..b] {
            *cell = '_';
        }
    }
    for &r in w.residue() {
        for row in grid.iter_mut() {
            row[column[r]] = '|';
        }
    }

    let mut out = String::new();
    if with_words {
        out.push_str(word_line.trim_end());
        out.push('\n');
    }
    out.push_str(type_line.trim_end());
    out.push('\n');
    for row in grid {
        let line: String = row.into_iter().collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn pad_to(line: &mut String, col: usize) {
    let len = char_len(line);
    if len < col {
        line.extend(std::iter::repeat_n(' ', col - len));
    }
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render_dot(labels: &[String], groups: &[Group], w: &ReductionWitness) -> String {
    let mut out = String::from("graph reduction {\n  node [shape=plaintext];\n");
    let residue: std::collections::BTreeSet<usize> = w.residue().iter().copied().collect();
    for (g, group) in groups.iter().enumerate() {
        let indent = if group.word.is_some() { "    " } else { "  " };
        if let Some(word) = &group.word {
            let _ = writeln!(out, "  subgraph cluster_w{g} {{\n    label=\"{}\";", escape(word));
        }
        for i in group.types.clone() {
            let shape = if residue.contains(&i) { ", shape=box" } else { "" };
            let _ = writeln!(out, "{indent}t{i} [label=\"{}\"{shape}];", escape(&labels[i]));
        }
        if group.word.is_some() {
            out.push_str("  }\n");
        }
    }
    for link in w.links() {
        let _ = writeln!(out, "  t{} -- t{};", link.left, link.right);
    }
    out.push_str("}\n");
    out
}
