//! Labeled bicolored graphs and the admissible family behind the kernel's
//! graph representation.
//!
//! Vertices come in two colors: white vertices stand for pinned particle
//! positions, black vertices for integration variables.  Edges are unordered
//! pairs carrying Mayer factors; white-white pairs never carry an edge in the
//! admissible family because their interaction sits in a Boltzmann prefactor
//! instead.
//!
//! The family `D(m; n)` returned by [`enumerate_d`] consists of the graphs
//! that survive the cancellation in the kernel recurrence.  Membership is
//! decided by [`is_member_d`]:
//!
//! * no white-white edges,
//! * every black vertex has degree at least two,
//! * every component containing a black vertex also contains a white one,
//! * removing any single vertex leaves no component made of black vertices
//!   only.
//!
//! Equivalently (checked by a property test): attach to each component a
//! ghost root adjacent to exactly that component's white vertices; the
//! component is admissible iff the augmented graph is 2-connected, with the
//! two-vertex graph counted as 2-connected.  In particular an isolated white
//! vertex is admissible and an isolated black vertex is not.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::{Error, Result};

/// Default ceiling on total vertex count for enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 9;

/// A colored, labeled vertex.  White labels and black labels are independent
/// zero-based namespaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    White(u8),
    Black(u8),
}

impl Vertex {
    pub fn is_white(self) -> bool {
        matches!(self, Vertex::White(_))
    }

    pub fn is_black(self) -> bool {
        matches!(self, Vertex::Black(_))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::White(i) => write!(f, "x{}", i + 1),
            Vertex::Black(j) => write!(f, "y{}", j + 1),
        }
    }
}

/// An undirected edge between two distinct vertices, stored in canonical
/// (sorted) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Vertex, Vertex);

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidParameter(format!("self-loop at {a}")));
        }
        Ok(if a < b { Edge(a, b) } else { Edge(b, a) })
    }

    pub fn ends(self) -> (Vertex, Vertex) {
        (self.0, self.1)
    }

    pub fn is_white_white(self) -> bool {
        self.0.is_white() && self.1.is_white()
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// Which vertex pairs may carry an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRule {
    /// Any pair of distinct vertices.
    Unconstrained,
    /// All pairs except white-white.
    NoWhiteWhite,
}

/// A graph on `num_white` white and `num_black` black labeled vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    num_white: u8,
    num_black: u8,
    edges: Vec<Edge>,
}

impl LabeledGraph {
    pub fn new(num_white: u8, num_black: u8, mut edges: Vec<Edge>) -> Result<Self> {
        for e in &edges {
            for v in [e.0, e.1] {
                let ok = match v {
                    Vertex::White(i) => i < num_white,
                    Vertex::Black(j) => j < num_black,
                };
                if !ok {
                    return Err(Error::InvalidParameter(format!(
                        "edge endpoint {v} outside ({num_white}, {num_black}) vertex set"
                    )));
                }
            }
        }
        edges.sort();
        edges.dedup();
        Ok(Self {
            num_white,
            num_black,
            edges,
        })
    }

    pub fn num_white(&self) -> u8 {
        self.num_white
    }

    pub fn num_black(&self) -> u8 {
        self.num_black
    }

    pub fn num_vertices(&self) -> usize {
        self.num_white as usize + self.num_black as usize
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertex as a dense index: whites first, then blacks.
    fn index_of(&self, v: Vertex) -> usize {
        match v {
            Vertex::White(i) => i as usize,
            Vertex::Black(j) => self.num_white as usize + j as usize,
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for e in &self.edges {
            let a = self.index_of(e.0);
            let b = self.index_of(e.1);
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges
            .iter()
            .filter(|e| e.0 == v || e.1 == v)
            .count()
    }

    /// Connected components as vertex index sets.
    fn components(&self) -> Vec<Vec<usize>> {
        components_of(&self.adjacency(), &vec![true; self.num_vertices()])
    }

    /// Longest shortest path, in edges, between vertices of a common
    /// component.  Zero for edgeless graphs.
    pub fn edge_diameter(&self) -> usize {
        let adj = self.adjacency();
        let n = self.num_vertices();
        let mut best = 0;
        for start in 0..n {
            let mut dist = vec![usize::MAX; n];
            dist[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        best = best.max(dist[v]);
                        queue.push_back(v);
                    }
                }
            }
        }
        best
    }

    /// Edge endpoints as display labels, for serialization.
    pub fn edge_labels(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|e| (e.0.to_string(), e.1.to_string()))
            .collect()
    }
}

impl fmt::Display for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}w {}b:", self.num_white, self.num_black)?;
        for e in &self.edges {
            write!(f, " {e}")?;
        }
        write!(f, "]")
    }
}

/// An enumerated set of graphs on a fixed vertex palette.
#[derive(Debug, Clone)]
pub struct GraphFamily {
    pub num_white: u8,
    pub num_black: u8,
    pub members: Vec<LabeledGraph>,
}

impl GraphFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn components_of(adj: &[Vec<usize>], alive: &[bool]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if !alive[start] || seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &v in &adj[u] {
                if alive[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Standard 2-connectivity: connected and free of articulation vertices.
/// Graphs on one or two vertices count as 2-connected when connected; the
/// empty graph counts as 2-connected.
pub fn is_biconnected(g: &LabeledGraph) -> bool {
    let n = g.num_vertices();
    if n <= 1 {
        return true;
    }
    let adj = g.adjacency();
    if n == 2 {
        return !adj[0].is_empty();
    }

    // Iterative lowpoint DFS from vertex 0; articulation and connectivity in
    // one pass.
    let mut disc = vec![0usize; n];
    let mut low = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut timer = 1usize;
    let mut root_children = 0usize;
    // Stack entries: (vertex, parent, next neighbor index).
    let mut stack = vec![(0usize, usize::MAX, 0usize)];
    visited[0] = true;
    disc[0] = timer;
    low[0] = timer;
    while let Some(&(u, parent, ni)) = stack.last() {
        if ni < adj[u].len() {
            stack.last_mut().unwrap().2 += 1;
            let v = adj[u][ni];
            if !visited[v] {
                timer += 1;
                visited[v] = true;
                disc[v] = timer;
                low[v] = timer;
                if u == 0 {
                    root_children += 1;
                }
                stack.push((v, u, 0));
            } else if v != parent {
                low[u] = low[u].min(disc[v]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[u]);
                if p != 0 && low[u] >= disc[p] {
                    return false;
                }
            }
        }
    }
    if root_children > 1 {
        return false;
    }
    visited.iter().all(|&v| v)
}

/// Membership in the admissible family `D`.  See the module docs for the four
/// conditions and the ghost-root reformulation.
pub fn is_member_d(g: &LabeledGraph) -> bool {
    if g.edges.iter().any(|e| e.is_white_white()) {
        return false;
    }
    for j in 0..g.num_black {
        if g.degree(Vertex::Black(j)) < 2 {
            return false;
        }
    }
    let nw = g.num_white as usize;
    let n = g.num_vertices();
    let adj = g.adjacency();
    let black_only = |comp: &[usize]| comp.iter().all(|&v| v >= nw);
    for comp in components_of(&adj, &vec![true; n]) {
        if comp.iter().any(|&v| v >= nw) && black_only(&comp) {
            return false;
        }
    }
    for removed in 0..n {
        let mut alive = vec![true; n];
        alive[removed] = false;
        for comp in components_of(&adj, &alive) {
            if comp.iter().any(|&v| v >= nw) && black_only(&comp) {
                return false;
            }
        }
    }
    true
}

/// Ghost-root reformulation of [`is_member_d`], used as an independent check:
/// every component, augmented by a root adjacent to the component's white
/// vertices, must be 2-connected.  White-white edges still disqualify.
pub fn is_member_d_via_ghost_root(g: &LabeledGraph) -> bool {
    if g.edges.iter().any(|e| e.is_white_white()) {
        return false;
    }
    let nw = g.num_white as usize;
    for comp in g.components() {
        // Rebuild the component with a fresh white root labeled last.
        let mut local = std::collections::HashMap::new();
        let mut whites = 0u8;
        let mut blacks = 0u8;
        for &v in &comp {
            if v < nw {
                local.insert(v, Vertex::White(whites));
                whites += 1;
            } else {
                local.insert(v, Vertex::Black(blacks));
                blacks += 1;
            }
        }
        let root = Vertex::White(whites);
        let mut edges = Vec::new();
        for e in &g.edges {
            let a = g.index_of(e.0);
            let b = g.index_of(e.1);
            if let (Some(&la), Some(&lb)) = (local.get(&a), local.get(&b)) {
                edges.push(Edge::new(la, lb).unwrap());
            }
        }
        for i in 0..whites {
            edges.push(Edge::new(Vertex::White(i), root).unwrap());
        }
        let augmented = LabeledGraph::new(whites + 1, blacks, edges).unwrap();
        if !is_biconnected(&augmented) {
            return false;
        }
    }
    true
}

fn allowed_pairs(num_white: u8, num_black: u8, rule: EdgeRule) -> Vec<Edge> {
    let mut all = Vec::new();
    for i in 0..num_white {
        all.push(Vertex::White(i));
    }
    for j in 0..num_black {
        all.push(Vertex::Black(j));
    }
    let mut pairs = Vec::new();
    for a in 0..all.len() {
        for b in (a + 1)..all.len() {
            let e = Edge::new(all[a], all[b]).unwrap();
            if rule == EdgeRule::NoWhiteWhite && e.is_white_white() {
                continue;
            }
            pairs.push(e);
        }
    }
    pairs
}

fn check_cap(num_white: u8, num_black: u8, cap: usize) -> Result<()> {
    let total = num_white as usize + num_black as usize;
    if total > cap {
        return Err(Error::CapExceeded {
            what: "vertices",
            requested: total,
            cap,
        });
    }
    Ok(())
}

/// Number of graphs [`enumerate_graphs`] would produce, without enumerating.
pub fn count_graphs(num_white: u8, num_black: u8, rule: EdgeRule) -> BigUint {
    let pairs = allowed_pairs(num_white, num_black, rule).len();
    BigUint::one() << pairs
}

/// Calls `visit` once per graph on the palette, in a fixed deterministic
/// order (edge subsets by ascending bit mask over the sorted pair list).
pub fn for_each_graph(
    num_white: u8,
    num_black: u8,
    rule: EdgeRule,
    cap: usize,
    mut visit: impl FnMut(&LabeledGraph),
) -> Result<()> {
    check_cap(num_white, num_black, cap)?;
    let pairs = allowed_pairs(num_white, num_black, rule);
    assert!(pairs.len() < 64);
    for mask in 0u64..(1u64 << pairs.len()) {
        let edges: Vec<Edge> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, e)| *e)
            .collect();
        let g = LabeledGraph {
            num_white,
            num_black,
            edges,
        };
        visit(&g);
    }
    Ok(())
}

/// All graphs on the palette under `rule`, with the default vertex cap.
pub fn enumerate_graphs(num_white: u8, num_black: u8, rule: EdgeRule) -> Result<GraphFamily> {
    enumerate_graphs_with_cap(num_white, num_black, rule, DEFAULT_VERTEX_CAP)
}

pub fn enumerate_graphs_with_cap(
    num_white: u8,
    num_black: u8,
    rule: EdgeRule,
    cap: usize,
) -> Result<GraphFamily> {
    let mut members = Vec::new();
    for_each_graph(num_white, num_black, rule, cap, |g| members.push(g.clone()))?;
    Ok(GraphFamily {
        num_white,
        num_black,
        members,
    })
}

/// The admissible family `D(m; n)` with the default vertex cap.
pub fn enumerate_d(num_white: u8, num_black: u8) -> Result<GraphFamily> {
    enumerate_d_with_cap(num_white, num_black, DEFAULT_VERTEX_CAP)
}

pub fn enumerate_d_with_cap(num_white: u8, num_black: u8, cap: usize) -> Result<GraphFamily> {
    let mut members = Vec::new();
    for_each_graph(num_white, num_black, EdgeRule::NoWhiteWhite, cap, |g| {
        if is_member_d(g) {
            members.push(g.clone());
        }
    })?;
    Ok(GraphFamily {
        num_white,
        num_black,
        members,
    })
}
