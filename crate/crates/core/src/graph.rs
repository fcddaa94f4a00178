//! Graph families and the plain-text graph format.
//!
//! Graphs are immutable, simple and undirected. Vertex ids are dense
//! `0..n` and the root is always vertex 0. Adjacency is stored in
//! compressed-row form so that every directed edge `u -> v` has a stable
//! integer id, which the event engine uses to index its pair sets.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count any builder will produce.
pub const DEFAULT_SIZE_CAP: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Path,
    Tree,
    Star,
    Complete,
    Torus,
    Custom,
}

/// Wrapping of a square lattice.
///
/// `Cylinder` wraps horizontally only, so the first and last rows are open
/// ends; `Torus` also wraps vertically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    #[default]
    Cylinder,
    Torus,
}

impl FromStr for Geometry {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cylinder" => Ok(Geometry::Cylinder),
            "torus" => Ok(Geometry::Torus),
            other => Err(format!("unknown geometry '{other}' (expected cylinder or torus)")),
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Geometry::Cylinder => "cylinder",
            Geometry::Torus => "torus",
        })
    }
}

/// Row-major layout of a lattice: vertex `(r, c)` has id `r * width + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowLayout {
    pub width: usize,
    pub height: usize,
    pub geometry: Geometry,
}

impl RowLayout {
    pub fn row(&self, r: usize) -> std::ops::Range<usize> {
        r * self.width..(r + 1) * self.width
    }
}

/// Whether the root of a truncated regular tree has `offspring` children
/// (a rooted offspring tree) or `offspring + 1` (every internal vertex of a
/// `(offspring + 1)`-regular tree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootDegree {
    Rooted,
    Regular,
}

/// Initial configuration of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitSpec {
    /// Root red, everything else white.
    #[default]
    StandardRoot,
    /// Row 0 blue, row 1 red, the rest white. Needs a row layout.
    Band,
    /// Standard root plus one extra blue vertex hanging off the root.
    ClassicalWithBlueNeighbor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    reverse: Vec<usize>,
    family: Family,
    rows: Option<RowLayout>,
    boundary: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an undirected edge list, relabelling `root` to 0.
    pub fn from_edges(n: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroVertices);
        }
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, n });
        }
        let relabel = |v: usize| {
            if v == root {
                0
            } else if v == 0 {
                root
            } else {
                v
            }
        };
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let (a, b) = (relabel(u), relabel(v));
            adj[a].push(b);
            adj[b].push(a);
        }
        Self::from_adjacency(adj)
    }

    /// Builds a graph rooted at 0 from per-vertex neighbour lists, checking
    /// symmetry and simplicity.
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = adj.len();
        if n == 0 {
            return Err(Error::ZeroVertices);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0] == w[1] {
                    let (a, b) = (u.min(w[0]), u.max(w[0]));
                    return Err(Error::DuplicateEdge(a, b));
                }
            }
            if let Some(&v) = list.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if list.binary_search(&u).is_ok() {
                return Err(Error::SelfLoop(u));
            }
        }
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                if adj[v].binary_search(&u).is_err() {
                    return Err(Error::AsymmetricEdge(u, v));
                }
            }
        }
        Ok(Self::from_sorted_adjacency(adj, Family::Custom))
    }

    fn from_sorted_adjacency(adj: Vec<Vec<usize>>, family: Family) -> Self {
        let n = adj.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for list in &adj {
            offsets.push(offsets.last().unwrap() + list.len());
        }
        let targets: Vec<usize> = adj.into_iter().flatten().collect();
        let mut reverse = vec![0; targets.len()];
        for u in 0..n {
            for e in offsets[u]..offsets[u + 1] {
                let v = targets[e];
                let slot = targets[offsets[v]..offsets[v + 1]]
                    .binary_search(&u)
                    .expect("adjacency is symmetric");
                reverse[e] = offsets[v] + slot;
            }
        }
        Graph {
            offsets,
            targets,
            reverse,
            family,
            rows: None,
            boundary: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rows(&self) -> Option<RowLayout> {
        self.rows
    }

    /// Canonical truncation boundary (leaves of a depth-truncated tree).
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Number of directed edges, `2 * edge_count()`.
    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// Directed edge ids leaving `v`; arc `e` points at [`Graph::head`]`(e)`.
    pub fn arcs(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn head(&self, arc: usize) -> usize {
        self.targets[arc]
    }

    /// Id of the arc pointing the other way.
    pub fn reverse_arc(&self, arc: usize) -> usize {
        self.reverse[arc]
    }

    /// Tail vertex of an arc, by binary search over the row offsets.
    pub fn tail(&self, arc: usize) -> usize {
        self.offsets.partition_point(|&o| o <= arc) - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Connected with exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        if self.edge_count() + 1 != self.n() {
            return false;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n()
    }

    /// Re-checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        for u in 0..n {
            let list = self.neighbors(u);
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
                }
            }
            for e in self.arcs(u) {
                let v = self.head(e);
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if v == u {
                    return Err(Error::SelfLoop(u));
                }
                let r = self.reverse_arc(e);
                if self.head(r) != u || self.reverse_arc(r) != e {
                    return Err(Error::AsymmetricEdge(u, v));
                }
            }
        }
        if let Some(rows) = self.rows {
            if rows.width * rows.height != n {
                return Err(Error::BadInputs("row layout does not cover the vertex set".into()));
            }
        }
        if let Some(&v) = self.boundary.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        Ok(())
    }

    /// Copy of this graph with one extra vertex (id `n`) attached to the root.
    pub fn with_pendant(&self) -> Graph {
        let n = self.n();
        let mut adj: Vec<Vec<usize>> = (0..n).map(|v| self.neighbors(v).to_vec()).collect();
        adj[0].push(n);
        adj.push(vec![0]);
        let mut g = Self::from_sorted_adjacency(adj, Family::Custom);
        g.boundary = self.boundary.clone();
        g
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n={} root=0\n", self.n());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the line-oriented format: a header `n=<int> root=<int>`
    /// followed by one `u v` edge per line. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header 'n=<int> root=<int>'".into(),
        })?;
        let (n, root) = parse_header(header).map_err(|message| Error::Parse { line: hline, message })?;
        let mut edges = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (line, l) in lines {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let [a, b] = fields[..] else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 'u v', found '{l}'"),
                });
            };
            let parse_id = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    message: format!("bad vertex id '{s}'"),
                })
            };
            let (u, v) = (parse_id(a)?, parse_id(b)?);
            if u >= n || v >= n {
                return Err(Error::Parse {
                    line,
                    message: format!("vertex {} out of range for n={n}", u.max(v)),
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
            }
            edges.push((u, v));
        }
        Graph::from_edges(n, root, &edges)
    }
}

fn parse_header(header: &str) -> std::result::Result<(usize, usize), String> {
    let mut n = None;
    let mut root = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| format!("malformed header field '{field}'"))?;
        let value: usize = value
            .parse()
            .map_err(|_| format!("header field '{key}' is not a nonnegative integer"))?;
        match key {
            "n" => n = Some(value),
            "root" => root = Some(value),
            _ => return Err(format!("unknown header field '{key}'")),
        }
    }
    match (n, root) {
        (Some(0), _) => Err("n must be at least 1".into()),
        (Some(n), Some(r)) if r < n => Ok((n, r)),
        (Some(n), Some(r)) => Err(format!("root {r} out of range for n={n}")),
        _ => Err("header must be 'n=<int> root=<int>'".into()),
    }
}

/// Path `0 - 1 - ... - (n-1)` rooted at 0.
pub fn build_path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::ZeroVertices);
    }
    check_cap(n, DEFAULT_SIZE_CAP)?;
    let adj = (0..n)
        .map(|v| {
            let mut l = Vec::with_capacity(2);
            if v > 0 {
                l.push(v - 1);
            }
            if v + 1 < n {
                l.push(v + 1);
            }
            l
        })
        .collect();
    Ok(Graph::from_sorted_adjacency(adj, Family::Path))
}

/// Star with root 0 and leaves `1..=leaves`.
pub fn build_star(leaves: usize) -> Result<Graph> {
    check_cap(leaves + 1, DEFAULT_SIZE_CAP)?;
    let mut adj = vec![(1..=leaves).collect::<Vec<_>>()];
    adj.extend((0..leaves).map(|_| vec![0]));
    Ok(Graph::from_sorted_adjacency(adj, Family::Star))
}

/// Complete graph `K_n` rooted at 0.
pub fn build_complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::ZeroVertices);
    }
    check_cap(n.saturating_mul(n), DEFAULT_SIZE_CAP)?;
    let adj = (0..n)
        .map(|u| (0..n).filter(|&v| v != u).collect())
        .collect();
    Ok(Graph::from_sorted_adjacency(adj, Family::Complete))
}

/// Depth-truncated tree in breadth-first order. Every non-root internal
/// vertex has `offspring` children; the root has `offspring` or
/// `offspring + 1` depending on `root`. Vertices at depth `depth` form the
/// canonical boundary (empty when `depth == 0`).
pub fn build_regular_tree(offspring: usize, depth: usize, root: RootDegree) -> Result<Graph> {
    build_regular_tree_capped(offspring, depth, root, DEFAULT_SIZE_CAP)
}

pub fn build_regular_tree_capped(
    offspring: usize,
    depth: usize,
    root: RootDegree,
    cap: usize,
) -> Result<Graph> {
    if offspring == 0 {
        return Err(Error::BadInputs("offspring must be at least 1".into()));
    }
    let root_children = match root {
        RootDegree::Rooted => offspring,
        RootDegree::Regular => offspring + 1,
    };
    // level sizes: 1, r, r*k, r*k^2, ...
    let mut total: usize = 1;
    let mut level = 1usize;
    for d in 0..depth {
        let factor = if d == 0 { root_children } else { offspring };
        level = level
            .checked_mul(factor)
            .ok_or(Error::SizeCapExceeded { requested: usize::MAX, cap })?;
        total = total
            .checked_add(level)
            .ok_or(Error::SizeCapExceeded { requested: usize::MAX, cap })?;
    }
    check_cap(total, cap)?;

    let mut adj: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![0usize];
    for d in 0..depth {
        let k = if d == 0 { root_children } else { offspring };
        let mut next = Vec::with_capacity(frontier.len() * k);
        for &p in &frontier {
            for _ in 0..k {
                let c = adj.len();
                adj.push(vec![p]);
                adj[p].push(c);
                next.push(c);
            }
        }
        frontier = next;
    }
    let mut g = Graph::from_sorted_adjacency(adj, Family::Tree);
    if depth > 0 {
        g.boundary = frontier;
    }
    Ok(g)
}

/// `side x side` square lattice, wrapped horizontally, and vertically too in
/// [`Geometry::Torus`] mode. Row `r` holds ids `r*side .. (r+1)*side`.
pub fn build_torus(side: usize, geometry: Geometry) -> Result<Graph> {
    if side < 3 {
        return Err(Error::TooSmall(side));
    }
    let n = side.checked_mul(side).ok_or(Error::SizeCapExceeded {
        requested: usize::MAX,
        cap: DEFAULT_SIZE_CAP,
    })?;
    check_cap(n, DEFAULT_SIZE_CAP)?;
    let id = |r: usize, c: usize| r * side + c;
    let mut adj = Vec::with_capacity(n);
    for r in 0..side {
        for c in 0..side {
            let mut l = Vec::with_capacity(4);
            l.push(id(r, (c + 1) % side));
            l.push(id(r, (c + side - 1) % side));
            match geometry {
                Geometry::Torus => {
                    l.push(id((r + 1) % side, c));
                    l.push(id((r + side - 1) % side, c));
                }
                Geometry::Cylinder => {
                    if r + 1 < side {
                        l.push(id(r + 1, c));
                    }
                    if r > 0 {
                        l.push(id(r - 1, c));
                    }
                }
            }
            l.sort_unstable();
            adj.push(l);
        }
    }
    let mut g = Graph::from_sorted_adjacency(adj, Family::Torus);
    g.rows = Some(RowLayout {
        width: side,
        height: side,
        geometry,
    });
    Ok(g)
}

fn check_cap(requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(Error::SizeCapExceeded { requested, cap })
    } else {
        Ok(())
    }
}

#[cfg(test)]
impl Graph {
    fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_shapes() {
        let g = build_path(1).unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));
        let g = build_path(2).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let g = build_path(5).unwrap();
        assert_eq!((g.edge_count(), g.max_degree()), (4, 2));
        assert_eq!(build_path(0), Err(Error::ZeroVertices));
    }

    #[test]
    fn star_shapes() {
        let g = build_star(0).unwrap();
        assert_eq!((g.n(), g.degree(0)), (1, 0));
        let g = build_star(3).unwrap();
        assert_eq!((g.n(), g.edge_count()), (4, 3));
        assert_eq!(build_star(20).unwrap().degree(0), 20);
    }

    #[test]
    fn complete_shapes() {
        assert_eq!(build_complete(1).unwrap().edge_count(), 0);
        assert_eq!(build_complete(5).unwrap().edge_count(), 10);
        assert_eq!(build_complete(16).unwrap().edge_count(), 120);
    }

    #[test]
    fn regular_tree_sizes() {
        let g = build_regular_tree(2, 0, RootDegree::Rooted).unwrap();
        assert_eq!(g.n(), 1);
        assert!(g.boundary().is_empty());
        let g = build_regular_tree(2, 3, RootDegree::Rooted).unwrap();
        assert_eq!(g.n(), 15);
        assert_eq!(g.boundary().len(), 8);
        assert!(g.boundary().iter().all(|&v| g.degree(v) == 1));
        let g = build_regular_tree(2, 2, RootDegree::Regular).unwrap();
        assert_eq!(g.n(), 10);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.max_degree(), 3);
        assert!(g.is_tree());
        assert!(matches!(
            build_regular_tree_capped(2, 10, RootDegree::Rooted, 100),
            Err(Error::SizeCapExceeded { requested: 2047, cap: 100 })
        ));
    }

    #[test]
    fn torus_shapes() {
        let g = build_torus(4, Geometry::Torus).unwrap();
        assert_eq!(g.edge_count(), 32);
        assert!((0..16).all(|v| g.degree(v) == 4));
        let g = build_torus(4, Geometry::Cylinder).unwrap();
        assert_eq!(g.edge_count(), 28);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(5), 4);
        assert_eq!(g.degree(15), 3);
        assert_eq!(build_torus(3, Geometry::Torus).unwrap().n(), 9);
        assert_eq!(build_torus(2, Geometry::Torus), Err(Error::TooSmall(2)));
        let rows = g.rows().unwrap();
        assert_eq!(rows.row(1), 4..8);
    }

    #[test]
    fn parse_small_graphs() {
        let g = Graph::parse("n=2 root=0\n0 1").unwrap();
        assert_eq!(g, build_complete(2).unwrap().with_family(Family::Custom));
        let g = Graph::parse("n=1 root=0").unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));
        match Graph::parse("nodes 3") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("expected parse error at line 1, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_name_the_problem() {
        assert_eq!(Graph::parse("n=3 root=0\n1 1"), Err(Error::SelfLoop(1)));
        assert_eq!(
            Graph::parse("n=3 root=0\n0 1\n1 0"),
            Err(Error::DuplicateEdge(0, 1))
        );
        match Graph::parse("n=3 root=0\n0 1\n1 x") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match Graph::parse("# comment\n\nn=3 root=0\n0 7") {
            Err(Error::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn adjacency_checks() {
        assert_eq!(
            Graph::from_adjacency(vec![vec![1], vec![]]),
            Err(Error::AsymmetricEdge(0, 1))
        );
        assert_eq!(
            Graph::from_adjacency(vec![vec![1, 1], vec![0, 0]]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(Graph::from_adjacency(vec![vec![0]]), Err(Error::SelfLoop(0)));
    }

    #[test]
    fn root_is_relabelled_to_zero() {
        let g = Graph::parse("n=3 root=2\n0 1\n1 2").unwrap();
        // old 2 <-> old 0: path 2-1-0 becomes 0-1-2
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.to_text(), "n=3 root=0\n0 1\n1 2\n");
    }

    #[test]
    fn arcs_and_reverse_arcs() {
        let g = build_torus(5, Geometry::Torus).unwrap();
        for u in 0..g.n() {
            for e in g.arcs(u) {
                assert_eq!(g.tail(e), u);
                let r = g.reverse_arc(e);
                assert_eq!(g.head(r), u);
                assert_eq!(g.tail(r), g.head(e));
            }
        }
    }

    #[test]
    fn pendant_vertex_hangs_off_root() {
        let g = build_star(3).unwrap().with_pendant();
        assert_eq!(g.n(), 5);
        assert_eq!(g.neighbors(4), &[0]);
        assert_eq!(g.degree(0), 4);
    }

    #[test]
    fn degree_formulas_exhaustive() {
        for n in 1..=50 {
            let p = build_path(n).unwrap();
            for v in 1..n.saturating_sub(1) {
                assert_eq!(p.degree(v), 2);
            }
            let s = build_star(n).unwrap();
            assert_eq!(s.degree(0), n);
            let k = build_complete(n).unwrap();
            assert!((0..n).all(|v| k.degree(v) == n - 1));
            if n >= 3 {
                let t = build_torus(n, Geometry::Torus).unwrap();
                assert!((0..t.n()).all(|v| t.degree(v) == 4));
            }
        }
    }

    fn any_builder() -> impl Strategy<Value = Graph> {
        prop_oneof![
            (1usize..60).prop_map(|n| build_path(n).unwrap()),
            (0usize..60).prop_map(|n| build_star(n).unwrap()),
            (1usize..25).prop_map(|n| build_complete(n).unwrap()),
            (1usize..4, 0usize..5, any::<bool>()).prop_map(|(k, d, reg)| {
                let root = if reg { RootDegree::Regular } else { RootDegree::Rooted };
                build_regular_tree(k, d, root).unwrap()
            }),
            (3usize..12, any::<bool>()).prop_map(|(l, wrap)| {
                let geom = if wrap { Geometry::Torus } else { Geometry::Cylinder };
                build_torus(l, geom).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn builders_produce_valid_graphs(g in any_builder()) {
            prop_assert!(g.validate().is_ok());
            prop_assert!(g.root() < g.n());
        }

        #[test]
        fn text_round_trip_is_canonical(g in any_builder()) {
            let text = g.to_text();
            let back = Graph::parse(&text).unwrap();
            prop_assert_eq!(back.to_text(), text);
            prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        }
    }
}
