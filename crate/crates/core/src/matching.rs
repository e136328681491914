//! Graphs, matchings and exact / approximate matching oracles.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::stream::{net_edges, StreamUpdate};

/// A simple undirected graph with adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edges: BTreeSet<(u32, u32)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n], edges: BTreeSet::new() }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// The net graph of a stream: pairs with nonzero net multiplicity.
    pub fn from_updates<'a>(n: usize, updates: impl IntoIterator<Item = &'a StreamUpdate>) -> Self {
        Graph::from_edges(n, net_edges(updates).into_keys())
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        assert!(u != v && (u as usize) < self.n && (v as usize) < self.n);
        let e = (u.min(v), u.max(v));
        if self.edges.insert(e) {
            self.adj[u as usize].push(v);
            self.adj[v as usize].push(u);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    /// Subgraph induced by the vertices where `keep` is true (same vertex ids).
    pub fn induced(&self, keep: &[bool]) -> Graph {
        Graph::from_edges(self.n, self.edges().filter(|&(u, v)| keep[u as usize] && keep[v as usize]))
    }
}

/// A set of vertex-disjoint edges, each stored as (min, max).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<(u32, u32)>,
}

impl Matching {
    /// Accepts `edges` if they are vertex-disjoint, otherwise returns a repeated vertex.
    pub fn from_edges(edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, u32> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if !seen.insert(w) {
                    return Err(w);
                }
            }
            out.push((u.min(v), u.max(v)));
        }
        Ok(Matching { edges: out })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.edges.iter().flat_map(|&(u, v)| [u, v])
    }
}

/// Outcome of [`validate_matching`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub repeated_vertex: Option<u32>,
    pub missing_edges: Vec<(u32, u32)>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.repeated_vertex.is_none() && self.missing_edges.is_empty()
    }
}

/// Checks vertex-disjointness and that every edge exists in `g`.
pub fn validate_matching(edges: &[(u32, u32)], g: &Graph) -> Verdict {
    let mut seen = BTreeSet::new();
    let mut repeated_vertex = None;
    let mut missing_edges = Vec::new();
    for &(u, v) in edges {
        for w in [u, v] {
            if !seen.insert(w) && repeated_vertex.is_none() {
                repeated_vertex = Some(w);
            }
        }
        let in_range = (u as usize) < g.vertex_count() && (v as usize) < g.vertex_count();
        if u == v || !in_range || !g.has_edge(u, v) {
            missing_edges.push((u.min(v), u.max(v)));
        }
    }
    Verdict { repeated_vertex, missing_edges }
}

/// Greedy maximal matching in edge order.
pub fn greedy_matching(g: &Graph) -> Matching {
    let mut used = vec![false; g.vertex_count()];
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        if !used[u as usize] && !used[v as usize] {
            used[u as usize] = true;
            used[v as usize] = true;
            edges.push((u, v));
        }
    }
    Matching { edges }
}

/// Maximum matching size by dynamic programming over vertex subsets (n ≤ 24).
pub fn max_matching_dp(g: &Graph) -> usize {
    let n = g.vertex_count();
    assert!(n <= 24, "bitmask DP is limited to 24 vertices");
    let mut nbr = vec![0u32; n];
    for (u, v) in g.edges() {
        nbr[u as usize] |= 1 << v;
        nbr[v as usize] |= 1 << u;
    }
    let mut best = vec![0u8; 1 << n];
    for mask in 1usize..(1 << n) {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << v);
        let mut b = best[rest];
        let mut cand = nbr[v] as usize & rest;
        while cand != 0 {
            let u = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            b = b.max(1 + best[rest & !(1 << u)]);
        }
        best[mask] = b;
    }
    best[(1 << n) - 1] as usize
}

/// Exact maximum matching by augmenting paths with blossom contraction.
pub fn max_matching(g: &Graph) -> Matching {
    Blossom::new(g).run()
}

struct Blossom<'a> {
    g: &'a Graph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

const NONE: usize = usize::MAX;

impl<'a> Blossom<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.vertex_count();
        Blossom {
            g,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn run(mut self) -> Matching {
        for (u, v) in greedy_matching(self.g).edges {
            self.mate[u as usize] = v as usize;
            self.mate[v as usize] = u as usize;
        }
        for root in 0..self.g.vertex_count() {
            if self.mate[root] == NONE && !self.g.neighbors(root as u32).is_empty() {
                if let Some(end) = self.find_path(root) {
                    self.augment(end);
                }
            }
        }
        let edges = (0..self.mate.len())
            .filter(|&v| self.mate[v] != NONE && v < self.mate[v])
            .map(|v| (v as u32, self.mate[v] as u32))
            .collect();
        Matching { edges }
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.g.neighbors(v as u32).len() {
                let to = self.g.neighbors(v as u32)[idx] as usize;
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        None
    }
}

/// Ground truth for the maximum matching size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchingBound {
    Exact { size: usize },
    /// Greedy maximal matching certifies lo ≤ μ ≤ 2·lo.
    Bracket { lo: usize, hi: usize },
}

impl MatchingBound {
    /// The largest value μ might take.
    pub fn upper(&self) -> usize {
        match *self {
            MatchingBound::Exact { size } => size,
            MatchingBound::Bracket { hi, .. } => hi,
        }
    }
}

/// Exact μ up to 4096 vertices (DP up to 24), greedy bracket beyond.
pub fn matching_oracle(g: &Graph) -> MatchingBound {
    let n = g.vertex_count();
    if n <= 24 {
        MatchingBound::Exact { size: max_matching_dp(g) }
    } else if n <= 4096 {
        MatchingBound::Exact { size: max_matching(g).len() }
    } else {
        let lo = greedy_matching(g).len();
        MatchingBound::Bracket { lo, hi: 2 * lo }
    }
}
