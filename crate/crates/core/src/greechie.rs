//! Greechie diagrams in the compact textual notation.
//!
//! A diagram is written as comma-separated blocks of single-character atom
//! labels, terminated by a period, e.g. `123,345,567.`. Labels come from a
//! fixed 61-character alphabet (`1`-`9`, `A`-`Z`, `a`-`z`). Atoms are
//! numbered in order of first appearance.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Label alphabet, in canonical order.
pub const LABELS: &str = "123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

/// Maximum number of atoms a diagram can carry (one per label).
pub const MAX_ATOMS: usize = 61;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("unknown label character {ch:?} at position {pos}")]
    UnknownLabelCharacter { ch: char, pos: usize },
    #[error("atom {atom} appears twice in block {block}")]
    DuplicateAtomInBlock { block: usize, atom: char },
    #[error("blocks {first} and {second} share two atoms ({}, {})", atoms.0, atoms.1)]
    BlocksShareTwoAtoms {
        first: usize,
        second: usize,
        atoms: (char, char),
    },
    #[error("block {block} has fewer than two atoms")]
    BlockTooSmall { block: usize },
    #[error("missing '.' terminator")]
    MissingTerminator,
    #[error("too many atoms ({0}); at most {MAX_ATOMS} labels are available")]
    TooManyAtoms(usize),
    #[error("atom {0} does not occur in any block")]
    UnusedAtom(usize),
    #[error("atom index {atom} out of range in block {block}")]
    AtomOutOfRange { block: usize, atom: usize },
}

/// Atoms and blocks of a finite test lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GreechieDiagram {
    labels: Vec<char>,
    blocks: Vec<Vec<usize>>,
}

impl GreechieDiagram {
    /// Builds a diagram from blocks over atoms `0..num_atoms`, assigning
    /// labels from the canonical alphabet in atom order.
    pub fn from_blocks(num_atoms: usize, blocks: Vec<Vec<usize>>) -> Result<Self, DiagramError> {
        if num_atoms > MAX_ATOMS {
            return Err(DiagramError::TooManyAtoms(num_atoms));
        }
        let labels: Vec<char> = LABELS.chars().take(num_atoms).collect();
        for (bi, block) in blocks.iter().enumerate() {
            if let Some(&atom) = block.iter().find(|&&a| a >= num_atoms) {
                return Err(DiagramError::AtomOutOfRange { block: bi, atom });
            }
        }
        let diagram = GreechieDiagram { labels, blocks };
        diagram.validate()?;
        Ok(diagram)
    }

    fn validate(&self) -> Result<(), DiagramError> {
        let n = self.labels.len();
        let mut used = vec![false; n];
        let mut masks: Vec<Vec<bool>> = Vec::with_capacity(self.blocks.len());
        for (bi, block) in self.blocks.iter().enumerate() {
            if block.len() < 2 {
                return Err(DiagramError::BlockTooSmall { block: bi });
            }
            let mut mask = vec![false; n];
            for &a in block {
                if mask[a] {
                    return Err(DiagramError::DuplicateAtomInBlock {
                        block: bi,
                        atom: self.labels[a],
                    });
                }
                mask[a] = true;
                used[a] = true;
            }
            for (bj, other) in masks.iter().enumerate() {
                let shared: Vec<usize> = block.iter().copied().filter(|&a| other[a]).collect();
                if shared.len() >= 2 {
                    return Err(DiagramError::BlocksShareTwoAtoms {
                        first: bj,
                        second: bi,
                        atoms: (self.labels[shared[0]], self.labels[shared[1]]),
                    });
                }
            }
            masks.push(mask);
        }
        if let Some(a) = used.iter().position(|&u| !u) {
            return Err(DiagramError::UnusedAtom(a));
        }
        Ok(())
    }

    pub fn num_atoms(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, index: usize) -> &[usize] {
        &self.blocks[index]
    }

    pub fn label(&self, atom: usize) -> char {
        self.labels[atom]
    }

    pub fn labels(&self) -> &[char] {
        &self.labels
    }

    pub fn atom_by_label(&self, label: char) -> Option<usize> {
        self.labels.iter().position(|&c| c == label)
    }

    /// Indices of the blocks containing `atom`, in diagram order.
    pub fn blocks_containing(&self, atom: usize) -> impl Iterator<Item = usize> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.contains(&atom))
            .map(|(i, _)| i)
    }

    /// Canonical textual notation, e.g. `123,345.`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.extend(block.iter().map(|&a| self.labels[a]));
        }
        out.push('.');
        out
    }
}

impl fmt::Display for GreechieDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for GreechieDiagram {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_diagram(s)
    }
}

fn is_label(c: char) -> bool {
    c.is_ascii_alphanumeric() && c != '0'
}

/// Parses one diagram. Whitespace between tokens is ignored and anything
/// after the terminating `.` is treated as a comment.
pub fn parse_diagram(text: &str) -> Result<GreechieDiagram, DiagramError> {
    let mut labels: Vec<char> = Vec::new();
    let mut index: HashMap<char, usize> = HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut terminated = false;

    for (pos, ch) in text.chars().enumerate() {
        match ch {
            c if c.is_whitespace() => {}
            ',' => blocks.push(std::mem::take(&mut current)),
            '.' => {
                blocks.push(std::mem::take(&mut current));
                terminated = true;
                break;
            }
            c if is_label(c) => {
                let next = labels.len();
                let atom = *index.entry(c).or_insert_with(|| {
                    labels.push(c);
                    next
                });
                current.push(atom);
            }
            c => return Err(DiagramError::UnknownLabelCharacter { ch: c, pos }),
        }
    }
    if !terminated {
        return Err(DiagramError::MissingTerminator);
    }
    if labels.len() > MAX_ATOMS {
        return Err(DiagramError::TooManyAtoms(labels.len()));
    }
    let diagram = GreechieDiagram { labels, blocks };
    diagram.validate()?;
    Ok(diagram)
}

/// One non-blank line of a multi-diagram file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramLine {
    /// 1-based line number.
    pub line: usize,
    pub result: Result<GreechieDiagram, DiagramError>,
}

/// Parses newline-delimited diagrams, skipping blank lines and lines
/// starting with `#`.
pub fn parse_lines(text: &str) -> Vec<DiagramLine> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| DiagramLine {
            line: i + 1,
            result: parse_diagram(l),
        })
        .collect()
}
