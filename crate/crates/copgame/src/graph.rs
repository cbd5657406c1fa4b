//! Immutable undirected simple graphs, the path metric, and basic set machinery.
//!
//! Graphs are stored as per-vertex strictly sorted neighbor lists; annotations
//! are string-keyed vertex sets or vertex→integer maps so constructions can tag
//! corners, levels, shadows, coordinates, and interiors without new types.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Distance value for disconnected pairs.
pub const UNREACHABLE: u16 = u16::MAX;

/// A named vertex tag: either a set of vertices or a per-vertex integer map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotation {
    Set(Vec<Vertex>),
    Map(BTreeMap<Vertex, i64>),
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Vertex>>,
    annotations: BTreeMap<String, Annotation>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate and reversed pairs are
    /// deduplicated; loops and out-of-range endpoints are rejected.
    pub fn build(vertex_count: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph> {
        if vertex_count == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("loop edge at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge ({u},{v}) has endpoint outside 0..{vertex_count}"
                )));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            n: vertex_count,
            adj,
            annotations: BTreeMap::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as (u, v) pairs with u < v, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn annotations(&self) -> &BTreeMap<String, Annotation> {
        &self.annotations
    }

    pub fn annotation(&self, name: &str) -> Option<&Annotation> {
        self.annotations.get(name)
    }

    pub fn set_annotation(&mut self, name: &str, ann: Annotation) {
        if let Annotation::Set(ids) = &ann {
            debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        }
        self.annotations.insert(name.to_string(), ann);
    }

    pub fn annotation_set(&self, name: &str) -> Option<VertexSet> {
        match self.annotations.get(name) {
            Some(Annotation::Set(ids)) => {
                let mut s = VertexSet::new(self.n);
                for &v in ids {
                    s.insert(v);
                }
                Some(s)
            }
            _ => None,
        }
    }

    pub fn annotation_map(&self, name: &str) -> Option<&BTreeMap<Vertex, i64>> {
        match self.annotations.get(name) {
            Some(Annotation::Map(m)) => Some(m),
            _ => None,
        }
    }

    /// BFS all-pairs distances.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.n;
        let mut table = vec![UNREACHABLE; n * n];
        let mut queue = Vec::with_capacity(n);
        for src in 0..n {
            let row = &mut table[src * n..(src + 1) * n];
            row[src] = 0;
            queue.clear();
            queue.push(src);
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                let du = row[u];
                for &w in &self.adj[u] {
                    if row[w] == UNREACHABLE {
                        row[w] = du + 1;
                        queue.push(w);
                    }
                }
            }
        }
        DistanceMatrix { n, table }
    }

    /// Ball and sphere of radius `r` around `v`.
    pub fn ball_and_sphere(
        &self,
        dm: &DistanceMatrix,
        v: Vertex,
        r: u16,
    ) -> (VertexSet, VertexSet) {
        let mut ball = VertexSet::new(self.n);
        let mut sphere = VertexSet::new(self.n);
        for u in 0..self.n {
            let d = dm.dist(v, u);
            if d <= r && d != UNREACHABLE {
                ball.insert(u);
                if d == r {
                    sphere.insert(u);
                }
            }
        }
        (ball, sphere)
    }

    /// Induced subgraph on the complement of `k`. Returns the subgraph and the
    /// stable id remapping `new id -> old id` (ascending in old ids).
    pub fn remove_vertices(&self, k: &VertexSet) -> Result<(Graph, Vec<Vertex>)> {
        let keep: Vec<Vertex> = (0..self.n).filter(|&v| !k.contains(v)).collect();
        if keep.is_empty() {
            return Err(Error::invalid("removing all vertices leaves an empty graph"));
        }
        let mut old_to_new = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old] = new;
        }
        let mut edges = Vec::new();
        for &u in &keep {
            for &v in &self.adj[u] {
                if u < v && !k.contains(v) {
                    edges.push((old_to_new[u], old_to_new[v]));
                }
            }
        }
        let g = Graph::build(keep.len(), &edges)?;
        Ok((g, keep))
    }

    /// Connected components as vertex sets, ordered by smallest contained id.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = VertexSet::new(self.n);
            let mut queue = vec![start];
            seen[start] = true;
            comp.insert(start);
            while let Some(u) = queue.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.insert(w);
                        queue.push(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Edges with exactly one endpoint in `k`, in lexicographic (u, v) order
    /// with the `k`-side endpoint first.
    pub fn boundary_edges(&self, k: &VertexSet) -> Result<Vec<(Vertex, Vertex)>> {
        let size = k.len();
        if size == 0 || size == self.n {
            return Err(Error::invalid(
                "boundary requires a non-empty proper subset of the vertices",
            ));
        }
        let mut out = Vec::new();
        for u in k.iter() {
            for &v in &self.adj[u] {
                if !k.contains(v) {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// A shortest path from `u` to `v`. Deterministic tie-break: at each step
    /// take the smallest-id neighbor that strictly decreases distance to `v`.
    pub fn geodesic(&self, dm: &DistanceMatrix, u: Vertex, v: Vertex) -> Result<Vec<Vertex>> {
        if dm.dist(u, v) == UNREACHABLE {
            return Err(Error::NoPath(u, v));
        }
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            let d = dm.dist(cur, v);
            let next = self.adj[cur]
                .iter()
                .copied()
                .find(|&w| dm.dist(w, v) + 1 == d)
                .expect("distance matrix consistent with adjacency");
            path.push(next);
            cur = next;
        }
        Ok(path)
    }

    /// Eccentricity-minimizing vertex, smallest id on ties.
    pub fn center(&self, dm: &DistanceMatrix) -> Vertex {
        let mut best = 0;
        let mut best_ecc = u32::MAX;
        for v in 0..self.n {
            let ecc = (0..self.n)
                .map(|u| dm.dist(v, u) as u32)
                .max()
                .unwrap_or(0);
            if ecc < best_ecc {
                best_ecc = ecc;
                best = v;
            }
        }
        best
    }

    /// Largest finite pairwise distance.
    pub fn diameter(&self, dm: &DistanceMatrix) -> u16 {
        let mut d = 0;
        for u in 0..self.n {
            for v in 0..self.n {
                let x = dm.dist(u, v);
                if x != UNREACHABLE && x > d {
                    d = x;
                }
            }
        }
        d
    }
}

#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    table: Vec<u16>,
}

impl DistanceMatrix {
    pub fn dist(&self, u: Vertex, v: Vertex) -> u16 {
        self.table[u * self.n + v]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Fixed-capacity bitset over vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    capacity: usize,
    words: Vec<u64>,
    count: usize,
}

impl VertexSet {
    pub fn new(capacity: usize) -> VertexSet {
        VertexSet {
            capacity,
            words: vec![0; capacity.div_ceil(64)],
            count: 0,
        }
    }

    pub fn from_iter(capacity: usize, iter: impl IntoIterator<Item = Vertex>) -> VertexSet {
        let mut s = VertexSet::new(capacity);
        for v in iter {
            s.insert(v);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        assert!(v < self.capacity, "vertex {v} out of range {}", self.capacity);
        let (w, b) = (v / 64, v % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        if fresh {
            self.words[w] |= 1 << b;
            self.count += 1;
        }
        fresh
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        let (w, b) = (v / 64, v % 64);
        let present = self.words[w] & (1 << b) != 0;
        if present {
            self.words[w] &= !(1 << b);
            self.count -= 1;
        }
        present
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.capacity && self.words[v / 64] & (1 << (v % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }
}
