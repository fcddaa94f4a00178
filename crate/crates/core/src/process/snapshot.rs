use std::fmt::Write as _;

use super::config::Configuration;
use crate::graph::{Graph, RowLayout};

/// Site codes of a configuration: 0 white, 1 red, 2 blue by predation,
/// 3 blue by conversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub codes: Vec<u8>,
    pub rows: Option<RowLayout>,
}

pub fn snapshot(g: &Graph, c: &Configuration) -> Snapshot {
    let codes: Vec<u8> = c.states().iter().map(|s| s.code()).collect();
    // a pendant vertex breaks the row layout
    let rows = g.rows().filter(|r| r.width * r.height == codes.len());
    Snapshot { codes, rows }
}

impl Snapshot {
    /// Row-major grid for lattices, otherwise `vertex,code` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.rows {
            Some(rows) => {
                for r in 0..rows.height {
                    let line: Vec<String> = self.codes[rows.row(r)].iter().map(u8::to_string).collect();
                    let _ = writeln!(out, "{}", line.join(","));
                }
            }
            None => {
                for (v, code) in self.codes.iter().enumerate() {
                    let _ = writeln!(out, "{v},{code}");
                }
            }
        }
        out
    }

    /// Cyclically shifts a lattice snapshot so vertex 0 lands in the middle,
    /// which suits root-started runs on a torus.
    pub fn centered(&self) -> Snapshot {
        let Some(rows) = self.rows else {
            return self.clone();
        };
        let (w, h) = (rows.width, rows.height);
        let mut codes = vec![0; self.codes.len()];
        for r in 0..h {
            for c in 0..w {
                codes[((r + h / 2) % h) * w + (c + w / 2) % w] = self.codes[r * w + c];
            }
        }
        Snapshot { codes, rows: self.rows }
    }

    pub fn count(&self, code: u8) -> usize {
        self.codes.iter().filter(|&&c| c == code).count()
    }
}
