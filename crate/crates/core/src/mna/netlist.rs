//! Minimal line-oriented netlist: `R p q value`, `C p q value`, `I p q value`.
//!
//! Node `0` is ground; node `k >= 1` becomes row `k-1` after ground elimination.
//! The element letter may be followed by a designator (`R12 1 2 1e3`). Lines
//! starting with `*` or `#` are comments.

use super::stamp::{SourceWaveform, StampMatrix, Terminal, TridiagonalOde};
use super::MnaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Resistor,
    Capacitor,
    CurrentSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub p: usize,
    pub q: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Netlist {
    pub elements: Vec<Element>,
}

fn terminal(node: usize) -> Terminal {
    node.checked_sub(1)
}

impl Netlist {
    pub fn parse(text: &str) -> Result<Self, MnaError> {
        let mut elements = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('*') || line.starts_with('#') {
                continue;
            }
            let err = |message: String| MnaError::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", fields.len())));
            }
            let kind = match fields[0].chars().next().map(|c| c.to_ascii_uppercase()) {
                Some('R') => ElementKind::Resistor,
                Some('C') => ElementKind::Capacitor,
                Some('I') => ElementKind::CurrentSource,
                _ => return Err(err(format!("unknown element `{}`", fields[0]))),
            };
            let node = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(format!("bad node `{s}`")))
            };
            let p = node(fields[1])?;
            let q = node(fields[2])?;
            let value: f64 = fields[3]
                .parse()
                .map_err(|_| err(format!("bad value `{}`", fields[3])))?;
            elements.push(Element { kind, p, q, value });
        }
        Ok(Self { elements })
    }

    /// Number of non-ground nodes referenced.
    pub fn node_count(&self) -> usize {
        self.elements
            .iter()
            .map(|e| e.p.max(e.q))
            .max()
            .unwrap_or(0)
    }

    pub fn to_stamps(&self) -> Result<StampMatrix, MnaError> {
        let mut sm = StampMatrix::new(self.node_count());
        for e in &self.elements {
            let (p, q) = (terminal(e.p), terminal(e.q));
            match e.kind {
                ElementKind::Resistor => sm.stamp_resistor(e.value, p, q)?,
                ElementKind::Capacitor => sm.stamp_capacitor(e.value, p, q)?,
                ElementKind::CurrentSource => {
                    sm.stamp_current_source(SourceWaveform::constant(e.value), p, q)?
                }
            }
        }
        Ok(sm)
    }

    pub fn assemble(&self) -> Result<TridiagonalOde, MnaError> {
        self.to_stamps()?.assemble()
    }
}
