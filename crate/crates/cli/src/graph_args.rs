use std::path::PathBuf;

use clap::{Args, ValueEnum};
use chasesim_core::graph::{
    build_complete, build_path, build_regular_tree, build_star, build_torus, Graph, RootDegree,
};
use chasesim_core::{Error, Geometry};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Path on --n vertices rooted at an end.
    Path,
    /// Star with --n leaves rooted at the centre.
    Star,
    /// Complete graph on --n vertices.
    Complete,
    /// Regular tree with --offspring children per vertex and --depth levels.
    Tree,
    /// --n x --n lattice with --geometry.
    Torus,
    /// Read the graph from --file.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootDegreeArg {
    /// Root has --offspring children like every other internal vertex.
    Rooted,
    /// Root has one extra child so every internal vertex has equal degree.
    Regular,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Graph family.
    #[arg(long = "graph", visible_alias = "family", value_enum)]
    pub family: Option<FamilyArg>,
    /// Size: vertices (path, complete), leaves (star) or side length (torus).
    #[arg(long)]
    pub n: Option<usize>,
    /// Children per internal tree vertex.
    #[arg(long, default_value_t = 2)]
    pub offspring: usize,
    /// Tree depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Degree convention at the tree root.
    #[arg(long, value_enum, default_value_t = RootDegreeArg::Rooted)]
    pub root_degree: RootDegreeArg,
    /// Lattice geometry: cylinder (open top and bottom) or torus.
    #[arg(long, default_value_t = Geometry::Cylinder)]
    pub geometry: Geometry,
    /// Graph file in the text graph format (with --graph file).
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

impl GraphArgs {
    /// Builds the graph, using `default` when --graph is absent.
    pub fn build(&self, default: FamilyArg) -> Result<(Graph, String), CliError> {
        let family = self.family.unwrap_or(default);
        let need_n = || {
            self.n
                .ok_or_else(|| CliError::Usage(format!("--n is required for --graph {}", family_name(family))))
        };
        let built = match family {
            FamilyArg::Path => build_path(need_n()?).map(|g| (g, format!("path({})", self.n.unwrap()))),
            FamilyArg::Star => build_star(need_n()?).map(|g| (g, format!("star({})", self.n.unwrap()))),
            FamilyArg::Complete => {
                build_complete(need_n()?).map(|g| (g, format!("complete({})", self.n.unwrap())))
            }
            FamilyArg::Torus => {
                build_torus(need_n()?, self.geometry).map(|g| (g, format!("{}({})", self.geometry, self.n.unwrap())))
            }
            FamilyArg::Tree => {
                let depth = self
                    .depth
                    .ok_or_else(|| CliError::Usage("--depth is required for --graph tree".into()))?;
                let root = match self.root_degree {
                    RootDegreeArg::Rooted => RootDegree::Rooted,
                    RootDegreeArg::Regular => RootDegree::Regular,
                };
                build_regular_tree(self.offspring, depth, root)
                    .map(|g| (g, format!("tree({},{})", self.offspring, depth)))
            }
            FamilyArg::File => {
                let path = self
                    .file
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("--file is required for --graph file".into()))?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("--file {}: {e}", path.display())))?;
                let g = Graph::parse(&text).map_err(|e| {
                    let at = match e {
                        Error::SelfLoop(u) => edge_line(&text, u, u, 1),
                        Error::DuplicateEdge(u, v) => edge_line(&text, u, v, 2),
                        _ => None,
                    };
                    let at = at.map_or_else(String::new, |l| format!("line {l}: "));
                    CliError::Input(format!("--file {}: {at}{e}", path.display()))
                })?;
                return Ok((g, path.display().to_string()));
            }
        };
        built.map_err(|e| CliError::Input(format!("--graph {}: {e}", family_name(family))))
    }
}

fn family_name(f: FamilyArg) -> String {
    f.to_possible_value().map_or_else(String::new, |v| v.get_name().to_owned())
}

/// Line number of the `occurrence`-th edge line joining `u` and `v`.
fn edge_line(text: &str, u: usize, v: usize, occurrence: usize) -> Option<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let ids: Vec<Option<usize>> = l.split_whitespace().map(|f| f.parse().ok()).collect();
            matches!(ids[..], [Some(a), Some(b)] if (a, b) == (u, v) || (a, b) == (v, u))
        })
        .nth(occurrence - 1)
        .map(|(i, _)| i + 1)
}
