//! Graph constructions: products, wedge sums, bridge extensions, subdivided
//! prisms, Rips graphs, and finite patch generators for infinite families.
//!
//! Patch generators tag an "interior" vertex set: a vertex is interior when
//! every vertex of its closed neighborhood has its full infinite-graph degree,
//! so radius-1 structure around interior vertices is free of boundary
//! artifacts.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Annotation, Graph, Vertex};

// ---------------------------------------------------------------------------
// Products and wedge sums
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    Cartesian,
    Strong,
    Lexicographic,
    Rooted,
}

impl std::str::FromStr for ProductKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartesian" => Ok(ProductKind::Cartesian),
            "strong" => Ok(ProductKind::Strong),
            "lexicographic" => Ok(ProductKind::Lexicographic),
            "rooted" => Ok(ProductKind::Rooted),
            _ => Err(Error::invalid(format!("unknown product kind {s:?}"))),
        }
    }
}

/// Inclusion/projection vertex maps accompanying a product.
pub struct ProductMaps {
    /// f: vertex of the first factor → product vertex (u, v₀/root).
    pub inclusion: Vec<Vertex>,
    /// g: product vertex → vertex of the first factor.
    pub projection: Vec<Vertex>,
}

/// Graph product of `a` and `b`. Vertex (u, v) has id `u·|V(b)| + v`.
/// For the rooted product, (u, root) plays the role of the base vertex u and
/// only root-level vertices are joined across copies.
pub fn product(
    a: &Graph,
    b: &Graph,
    kind: ProductKind,
    root: Option<Vertex>,
) -> Result<(Graph, ProductMaps)> {
    let (na, nb) = (a.vertex_count(), b.vertex_count());
    let base = match (kind, root) {
        (ProductKind::Rooted, None) => {
            return Err(Error::invalid("rooted product requires a root vertex"))
        }
        (_, Some(r)) if r >= nb => {
            return Err(Error::invalid(format!("root {r} outside second factor")))
        }
        (_, Some(r)) => r,
        (_, None) => 0,
    };
    let id = |u: Vertex, v: Vertex| u * nb + v;
    let mut edges = Vec::new();
    for u in 0..na {
        for v in 0..nb {
            // Edges within a copy of b (all kinds except pure rooted share it).
            for &v2 in b.neighbors(v) {
                if v < v2 {
                    edges.push((id(u, v), id(u, v2)));
                }
            }
        }
    }
    for u in 0..na {
        for &u2 in a.neighbors(u) {
            if u >= u2 {
                continue;
            }
            match kind {
                ProductKind::Cartesian => {
                    for v in 0..nb {
                        edges.push((id(u, v), id(u2, v)));
                    }
                }
                ProductKind::Strong => {
                    for v in 0..nb {
                        edges.push((id(u, v), id(u2, v)));
                        for &v2 in b.neighbors(v) {
                            edges.push((id(u, v), id(u2, v2)));
                        }
                    }
                }
                ProductKind::Lexicographic => {
                    for v in 0..nb {
                        for v2 in 0..nb {
                            edges.push((id(u, v), id(u2, v2)));
                        }
                    }
                }
                ProductKind::Rooted => {
                    edges.push((id(u, base), id(u2, base)));
                }
            }
        }
    }
    let g = Graph::build(na * nb, &edges)?;
    let maps = ProductMaps {
        inclusion: (0..na).map(|u| id(u, base)).collect(),
        projection: (0..na * nb).map(|p| p / nb).collect(),
    };
    Ok((g, maps))
}

/// One-point union of `a` and `b`, identifying `u` with `v`. Vertices of `a`
/// keep their ids; vertices of `b` follow (with `v` removed).
pub fn wedge_sum(a: &Graph, u: Vertex, b: &Graph, v: Vertex) -> Result<Graph> {
    if u >= a.vertex_count() || v >= b.vertex_count() {
        return Err(Error::invalid("wedge point outside its graph"));
    }
    let na = a.vertex_count();
    let remap = |w: Vertex| -> Vertex {
        if w == v {
            u
        } else if w < v {
            na + w
        } else {
            na + w - 1
        }
    };
    let mut edges = a.edges();
    for (x, y) in b.edges() {
        edges.push((remap(x), remap(y)));
    }
    Graph::build(na + b.vertex_count() - 1, &edges)
}

// ---------------------------------------------------------------------------
// Bridge extension Θₙ(Γ)
// ---------------------------------------------------------------------------

/// Annotations for the n-copy bridge extension of a base graph around u₀.
#[derive(Debug, Clone)]
pub struct ThetaExtensionAnnotations {
    /// Copy embeddings η₁..ηₙ: `copies[k][x]` is the image of base vertex x.
    pub copies: Vec<Vec<Vertex>>,
    /// Full vertex path of the bridge between ηᵢ(x) and ηⱼ(x), keyed (i, j, x)
    /// with i < j, endpoints included.
    pub bridge_index: BTreeMap<(usize, usize, Vertex), Vec<Vertex>>,
    /// Base-graph vertex under every extension vertex.
    pub shadow: Vec<Vertex>,
    /// The base vertex the bridges are measured from.
    pub center: Vertex,
}

/// n disjoint copies of `base` joined, for every base vertex x and copy pair
/// i<j, by a path of dist(u₀,x)+1 edges between ηᵢ(x) and ηⱼ(x). Copy vertices
/// come first (copy-major), bridge interiors after, ordered (i, j, x, pos).
pub fn theta_extension(
    base: &Graph,
    u0: Vertex,
    n: usize,
) -> Result<(Graph, ThetaExtensionAnnotations)> {
    if n < 2 {
        return Err(Error::invalid("bridge extension needs n ≥ 2 copies"));
    }
    if u0 >= base.vertex_count() {
        return Err(Error::invalid(format!("center vertex {u0} outside base")));
    }
    if !base.is_connected() {
        return Err(Error::invalid("bridge extension requires a connected base"));
    }
    let nv = base.vertex_count();
    let dm = base.distance_matrix();
    let eta = |k: usize, x: Vertex| k * nv + x;

    let mut edges = Vec::new();
    for k in 0..n {
        for (x, y) in base.edges() {
            edges.push((eta(k, x), eta(k, y)));
        }
    }
    let mut shadow: Vec<Vertex> = (0..n * nv).map(|p| p % nv).collect();
    let mut bridge_index = BTreeMap::new();
    let mut next = n * nv;
    for i in 0..n {
        for j in i + 1..n {
            for x in 0..nv {
                let l = dm.dist(u0, x) as usize;
                let mut path = vec![eta(i, x)];
                for _ in 0..l {
                    path.push(next);
                    shadow.push(x);
                    next += 1;
                }
                path.push(eta(j, x));
                for w in path.windows(2) {
                    edges.push((w[0], w[1]));
                }
                bridge_index.insert((i, j, x), path);
            }
        }
    }

    let mut g = Graph::build(next, &edges)?;
    let copies: Vec<Vec<Vertex>> = (0..n).map(|k| (0..nv).map(|x| eta(k, x)).collect()).collect();

    let mut copy_map = BTreeMap::new();
    for (k, copy) in copies.iter().enumerate() {
        for &v in copy {
            copy_map.insert(v, k as i64);
        }
    }
    g.set_annotation("copy", Annotation::Map(copy_map));
    g.set_annotation(
        "shadow",
        Annotation::Map(shadow.iter().enumerate().map(|(v, &x)| (v, x as i64)).collect()),
    );
    g.set_annotation("bridge", Annotation::Set((n * nv..next).collect()));
    g.set_annotation(
        "center",
        Annotation::Set((0..n).map(|k| eta(k, u0)).collect()),
    );

    let ann = ThetaExtensionAnnotations {
        copies,
        bridge_index,
        shadow,
        center: u0,
    };
    Ok((g, ann))
}

// ---------------------------------------------------------------------------
// Subdivided prism θₙ,ₘ
// ---------------------------------------------------------------------------

/// Annotations for the subdivided prism over Kₙ□K₂.
#[derive(Debug, Clone)]
pub struct ThetaNMAnnotations {
    pub n: usize,
    pub m: usize,
    /// `corner(copy, level)` for level ∈ {1, 2}: id `2·copy + level − 1`.
    pub corners: Vec<Vertex>,
    /// Full vertex path of the bridge between corners (c1, level) and
    /// (c2, level), keyed (level, c1, c2) with c1 < c2.
    pub bridges: BTreeMap<(u8, usize, usize), Vec<Vertex>>,
}

impl ThetaNMAnnotations {
    pub fn corner(&self, copy: usize, level: u8) -> Vertex {
        self.corners[2 * copy + level as usize - 1]
    }
}

/// Kₙ□K₂ with every level-1 clique edge subdivided into m edges and every
/// level-2 clique edge into m+1; the n "sibling" K₂ edges stay single edges.
/// Corners take ids 0..2n ordered (copy, level); bridge interiors follow,
/// ordered (level, pair, position).
pub fn theta_nm(n: usize, m: usize) -> Result<(Graph, ThetaNMAnnotations)> {
    if n < 1 || m < 1 {
        return Err(Error::invalid("subdivided prism needs n ≥ 1 and m ≥ 1"));
    }
    let corner = |c: usize, level: u8| 2 * c + level as usize - 1;
    let mut edges: Vec<(Vertex, Vertex)> = (0..n).map(|c| (corner(c, 1), corner(c, 2))).collect();
    let mut bridges = BTreeMap::new();
    let mut next = 2 * n;
    for level in [1u8, 2u8] {
        let edge_count = m + (level - 1) as usize;
        for c1 in 0..n {
            for c2 in c1 + 1..n {
                let mut path = vec![corner(c1, level)];
                for _ in 0..edge_count - 1 {
                    path.push(next);
                    next += 1;
                }
                path.push(corner(c2, level));
                for w in path.windows(2) {
                    edges.push((w[0], w[1]));
                }
                bridges.insert((level, c1, c2), path);
            }
        }
    }
    let mut g = Graph::build(next, &edges)?;
    g.set_annotation("corners", Annotation::Set((0..2 * n).collect()));
    g.set_annotation(
        "copy",
        Annotation::Map((0..2 * n).map(|v| (v, (v / 2) as i64)).collect()),
    );
    g.set_annotation(
        "level",
        Annotation::Map((0..2 * n).map(|v| (v, (v % 2 + 1) as i64)).collect()),
    );
    let ann = ThetaNMAnnotations {
        n,
        m,
        corners: (0..2 * n).collect(),
        bridges,
    };
    Ok((g, ann))
}

// ---------------------------------------------------------------------------
// Rips graph
// ---------------------------------------------------------------------------

/// One vertex per subgraph; edge iff the minimum pairwise distance between the
/// two vertex sets lies in (0, L].
pub fn rips_graph(
    g: &Graph,
    subgraphs: &[crate::graph::VertexSet],
    l: u16,
) -> Result<Graph> {
    if subgraphs.is_empty() {
        return Err(Error::invalid("Rips graph needs at least one subgraph"));
    }
    let mut seen = crate::graph::VertexSet::new(g.vertex_count());
    for s in subgraphs {
        if s.is_empty() {
            return Err(Error::invalid("Rips subgraphs must be non-empty"));
        }
        for v in s.iter() {
            if !seen.insert(v) {
                return Err(Error::invalid(format!(
                    "Rips subgraphs overlap at vertex {v}"
                )));
            }
        }
    }
    let dm = g.distance_matrix();
    let mut edges = Vec::new();
    for i in 0..subgraphs.len() {
        for j in i + 1..subgraphs.len() {
            let mut min = crate::graph::UNREACHABLE;
            for u in subgraphs[i].iter() {
                for v in subgraphs[j].iter() {
                    min = min.min(dm.dist(u, v));
                }
            }
            if min > 0 && min <= l {
                edges.push((i, j));
            }
        }
    }
    Graph::build(subgraphs.len(), &edges)
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

pub fn path_graph(k: usize) -> Result<Graph> {
    if k < 1 {
        return Err(Error::invalid("path needs k ≥ 1"));
    }
    let edges: Vec<_> = (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    Graph::build(k, &edges)
}

pub fn cycle_graph(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(Error::invalid("cycle needs k ≥ 3"));
    }
    let mut edges: Vec<_> = (0..k - 1).map(|i| (i, i + 1)).collect();
    edges.push((k - 1, 0));
    Graph::build(k, &edges)
}

pub fn complete_graph(k: usize) -> Result<Graph> {
    if k < 1 {
        return Err(Error::invalid("complete graph needs k ≥ 1"));
    }
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.push((u, v));
        }
    }
    Graph::build(k, &edges)
}

/// Tags the interior: vertices whose closed neighborhood all have the expected
/// infinite-graph degree.
fn tag_interior(g: &mut Graph, expected_degree: impl Fn(Vertex) -> usize) {
    let full: Vec<bool> = (0..g.vertex_count())
        .map(|v| g.degree(v) == expected_degree(v))
        .collect();
    let interior: Vec<Vertex> = (0..g.vertex_count())
        .filter(|&v| full[v] && g.neighbors(v).iter().all(|&w| full[w]))
        .collect();
    g.set_annotation("interior", Annotation::Set(interior));
}

/// Ball of radius `depth` in the infinite d-regular tree, rooted at vertex 0,
/// vertices in breadth-first order.
pub fn regular_tree(d: usize, depth: usize) -> Result<Graph> {
    if d < 2 {
        return Err(Error::invalid("regular tree needs degree d ≥ 2"));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next = 1;
    for level in 0..depth {
        let mut fresh = Vec::new();
        for &v in &frontier {
            let children = if level == 0 { d } else { d - 1 };
            for _ in 0..children {
                edges.push((v, next));
                fresh.push(next);
                next += 1;
            }
        }
        frontier = fresh;
    }
    let mut g = Graph::build(next, &edges)?;
    tag_interior(&mut g, |_| d);
    Ok(g)
}

/// w×h patch of the square grid; vertex (x, y) has id y·w + x. Annotated with
/// "x"/"y" coordinate maps and the boundary-free "interior".
pub fn grid_patch(w: usize, h: usize) -> Result<Graph> {
    if w < 1 || h < 1 {
        return Err(Error::invalid("grid needs positive dimensions"));
    }
    let id = |x: usize, y: usize| y * w + x;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < h {
                edges.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    let mut g = Graph::build(w * h, &edges)?;
    g.set_annotation(
        "x",
        Annotation::Map((0..w * h).map(|v| (v, (v % w) as i64)).collect()),
    );
    g.set_annotation(
        "y",
        Annotation::Map((0..w * h).map(|v| (v, (v / w) as i64)).collect()),
    );
    tag_interior(&mut g, |_| 4);
    Ok(g)
}

/// w×h grid with wraparound in both directions (exact, no boundary).
pub fn torus_grid(w: usize, h: usize) -> Result<Graph> {
    if w < 3 || h < 3 {
        return Err(Error::invalid("torus grid needs w, h ≥ 3"));
    }
    let id = |x: usize, y: usize| y * w + x;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            edges.push((id(x, y), id((x + 1) % w, y)));
            edges.push((id(x, y), id(x, (y + 1) % h)));
        }
    }
    let mut g = Graph::build(w * h, &edges)?;
    g.set_annotation(
        "x",
        Annotation::Map((0..w * h).map(|v| (v, (v % w) as i64)).collect()),
    );
    g.set_annotation(
        "y",
        Annotation::Map((0..w * h).map(|v| (v, (v / w) as i64)).collect()),
    );
    g.set_annotation("interior", Annotation::Set((0..w * h).collect()));
    Ok(g)
}

/// Finite window of the Farey graph: reduced fractions p/q with q ≤ maxd in
/// [0, 1], plus 1/0, ordered by value (1/0 last); edge iff |ps − rq| = 1.
/// Annotated with "num"/"den" maps. No interior tag: every Farey vertex has
/// infinite degree, so no finite window realizes a full neighborhood.
pub fn farey_ball(maxd: u64) -> Result<Graph> {
    if maxd < 1 {
        return Err(Error::invalid("Farey ball needs max denominator ≥ 1"));
    }
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut fracs: Vec<(u64, u64)> = Vec::new();
    for q in 1..=maxd {
        for p in 0..=q {
            if gcd(p, q) == 1 {
                fracs.push((p, q));
            }
        }
    }
    fracs.sort_by(|a, b| (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128)));
    fracs.push((1, 0));
    let mut edges = Vec::new();
    for i in 0..fracs.len() {
        for j in i + 1..fracs.len() {
            let (p, q) = fracs[i];
            let (r, s) = fracs[j];
            let det = (p as i128 * s as i128) - (r as i128 * q as i128);
            if det.abs() == 1 {
                edges.push((i, j));
            }
        }
    }
    let mut g = Graph::build(fracs.len(), &edges)?;
    g.set_annotation(
        "num",
        Annotation::Map(fracs.iter().enumerate().map(|(v, f)| (v, f.0 as i64)).collect()),
    );
    g.set_annotation(
        "den",
        Annotation::Map(fracs.iter().enumerate().map(|(v, f)| (v, f.1 as i64)).collect()),
    );
    Ok(g)
}

/// Finite patch of the two-branch ladder: center u, rays u–a₁–…–a_depth and
/// u–b₁–…–b_depth, and for each k a connecting path from aₖ to bₖ of length
/// 2k. Maximum degree 3.
pub fn gamma2_patch(depth: usize) -> Result<Graph> {
    if depth < 1 {
        return Err(Error::invalid("patch needs depth ≥ 1"));
    }
    let a = |k: usize| k; // a_k, 1-based
    let b = |k: usize| depth + k;
    let mut edges = vec![(0, a(1)), (0, b(1))];
    for k in 1..depth {
        edges.push((a(k), a(k + 1)));
        edges.push((b(k), b(k + 1)));
    }
    let mut next = 2 * depth + 1;
    let mut expected = vec![2usize]; // u has degree 2 in the infinite graph
    expected.extend(std::iter::repeat(3).take(2 * depth));
    for k in 1..=depth {
        // Path of length 2k: 2k−1 interior vertices between a_k and b_k.
        let mut prev = a(k);
        for _ in 0..2 * k - 1 {
            edges.push((prev, next));
            expected.push(2);
            prev = next;
            next += 1;
        }
        edges.push((prev, b(k)));
    }
    let mut g = Graph::build(next, &edges)?;
    tag_interior(&mut g, |v| expected[v]);
    Ok(g)
}

// ---------------------------------------------------------------------------
// Hyperbolic tiling patch
// ---------------------------------------------------------------------------

struct TilingBuilder {
    degree: usize,
    face_size: usize,
    edges: Vec<(Vertex, Vertex)>,
    face_count: Vec<usize>,
    layer_of: Vec<usize>,
}

impl TilingBuilder {
    fn fresh(&mut self, layer: usize) -> Vertex {
        self.face_count.push(0);
        self.layer_of.push(layer);
        self.face_count.len() - 1
    }

    fn add_face(&mut self, cycle: &[Vertex]) {
        debug_assert_eq!(cycle.len(), self.face_size);
        for i in 0..cycle.len() {
            self.edges.push((cycle[i], cycle[(i + 1) % cycle.len()]));
            self.face_count[cycle[i]] += 1;
        }
    }

    fn needed(&self, v: Vertex) -> usize {
        self.degree - self.face_count[v]
    }

    /// Adds one annulus of faces around the current boundary cycle and
    /// returns the new boundary. Every face is attached either along a run of
    /// boundary edges (passing through vertices that need exactly one more
    /// face) or at a single boundary vertex; neighboring faces share a spoke
    /// vertex.
    fn add_layer(&mut self, boundary: &[Vertex], layer: usize) -> Result<Vec<Vertex>> {
        let b = boundary.len();
        let internal = |msg: &str| {
            Error::invalid(format!(
                "tiling parameters produce a degenerate layer ({msg})"
            ))
        };
        let start = boundary
            .iter()
            .position(|&v| self.needed(v) >= 2)
            .ok_or_else(|| internal("no anchor vertex"))?;

        // Face specs: the consecutive old vertices each face is attached to
        // (a single vertex for a corner face), using pre-layer face counts.
        let mut specs: Vec<Vec<Vertex>> = Vec::new();
        let mut idx = start;
        loop {
            let v = boundary[idx];
            let k = self.needed(v);
            if k < 2 {
                return Err(internal("anchor vertex already saturated"));
            }
            for _ in 0..k - 2 {
                specs.push(vec![v]);
            }
            let mut old = vec![v];
            let mut j = (idx + 1) % b;
            while self.needed(boundary[j]) == 1 {
                old.push(boundary[j]);
                j = (j + 1) % b;
            }
            old.push(boundary[j]);
            specs.push(old);
            idx = j;
            if idx == start {
                break;
            }
        }

        let fresh_per = |spec: &Vec<Vertex>| self.face_size.checked_sub(spec.len());
        for spec in &specs {
            match fresh_per(spec) {
                Some(c) if c >= 1 => {}
                _ => return Err(internal("face with no new vertices")),
            }
        }
        // Rotate so the first face is non-thin; a thin face (one new vertex)
        // shares that vertex with both neighbors.
        let rot = specs
            .iter()
            .position(|s| self.face_size - s.len() >= 2)
            .ok_or_else(|| internal("all faces thin"))?;
        specs.rotate_left(rot);

        let m = specs.len();
        let mut spokes = vec![usize::MAX; m];
        for j in 0..m {
            spokes[j] = if self.face_size - specs[j].len() == 1 {
                spokes[j - 1]
            } else {
                self.fresh(layer)
            };
        }
        let mut new_boundary: Vec<Vertex> = Vec::new();
        for j in 0..m {
            let c = self.face_size - specs[j].len();
            let s_prev = spokes[(j + m - 1) % m];
            let s_next = spokes[j];
            // New-vertex path from the last old vertex back to the first.
            let mut path = vec![s_next];
            for _ in 0..c.saturating_sub(2) {
                path.push(self.fresh(layer));
            }
            if c >= 2 {
                path.push(s_prev);
            }
            let mut cycle = specs[j].clone();
            cycle.extend(&path);
            self.add_face(&cycle);
            for &v in path.iter().rev() {
                if new_boundary.last() != Some(&v) {
                    new_boundary.push(v);
                }
            }
        }
        if new_boundary.len() > 1 && new_boundary.first() == new_boundary.last() {
            new_boundary.pop();
        }
        // Every old boundary vertex must now be saturated.
        for &v in boundary {
            if self.face_count[v] != self.degree {
                return Err(internal("unsaturated boundary vertex"));
            }
        }
        Ok(new_boundary)
    }
}

/// Patch of the regular tiling with vertex degree `p` and face size `q`,
/// grown as `layers` face annuli around a central face. Requires the
/// hyperbolic condition (p−2)(q−2) > 4. Annotated with a per-vertex "layer"
/// map and the boundary-free "interior" set.
pub fn hyperbolic_tiling_patch(p: usize, q: usize, layers: usize) -> Result<Graph> {
    if p < 3 || q < 3 {
        return Err(Error::invalid("tiling needs p, q ≥ 3"));
    }
    if (p - 2) * (q - 2) <= 4 {
        return Err(Error::invalid(format!(
            "({p},{q}) is not hyperbolic: need (p−2)(q−2) > 4"
        )));
    }
    if layers < 1 {
        return Err(Error::invalid("tiling needs layers ≥ 1"));
    }
    let mut tb = TilingBuilder {
        degree: p,
        face_size: q,
        edges: Vec::new(),
        face_count: Vec::new(),
        layer_of: Vec::new(),
    };
    let central: Vec<Vertex> = (0..q).map(|_| tb.fresh(0)).collect();
    tb.add_face(&central);
    let mut boundary = central;
    for layer in 1..=layers {
        boundary = tb.add_layer(&boundary, layer)?;
    }
    let mut g = Graph::build(tb.face_count.len(), &tb.edges)?;
    g.set_annotation(
        "layer",
        Annotation::Map(
            tb.layer_of
                .iter()
                .enumerate()
                .map(|(v, &l)| (v, l as i64))
                .collect(),
        ),
    );
    // A vertex has its full infinite-tiling degree exactly when all p faces
    // around it were generated.
    let full: Vec<bool> = tb.face_count.iter().map(|&f| f == p).collect();
    let interior: Vec<Vertex> = (0..g.vertex_count())
        .filter(|&v| full[v] && g.neighbors(v).iter().all(|&w| full[w]))
        .collect();
    g.set_annotation("interior", Annotation::Set(interior));
    Ok(g)
}

// ---------------------------------------------------------------------------
// Family descriptor grammar
// ---------------------------------------------------------------------------

fn parse_kv(args: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in args.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value, got {part:?}")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn get_num(kv: &BTreeMap<String, String>, key: &str) -> Result<usize> {
    kv.get(key)
        .ok_or_else(|| Error::invalid(format!("missing parameter {key}")))?
        .parse()
        .map_err(|_| Error::invalid(format!("parameter {key} must be a number")))
}

fn parse_dims(args: &str) -> Result<(usize, usize)> {
    let (w, h) = args
        .split_once('x')
        .ok_or_else(|| Error::invalid(format!("expected WxH, got {args:?}")))?;
    Ok((
        w.parse()
            .map_err(|_| Error::invalid(format!("bad width {w:?}")))?,
        h.parse()
            .map_err(|_| Error::invalid(format!("bad height {h:?}")))?,
    ))
}

/// Builds a graph from a compact family descriptor, e.g. "grid:80x80",
/// "theta_nm:n=3,m=5", "tiling:p=3,q=7,layers=2", "path:9", "farey:5".
pub fn generate(descriptor: &str) -> Result<Graph> {
    let (name, args) = descriptor
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("descriptor {descriptor:?} needs family:args")))?;
    let single = || -> Result<usize> {
        args.parse()
            .map_err(|_| Error::invalid(format!("family {name} expects a single number")))
    };
    match name {
        "path" => path_graph(single()?),
        "cycle" => cycle_graph(single()?),
        "complete" => complete_graph(single()?),
        "tree" => {
            let kv = parse_kv(args)?;
            regular_tree(get_num(&kv, "d")?, get_num(&kv, "depth")?)
        }
        "grid" => {
            let (w, h) = parse_dims(args)?;
            grid_patch(w, h)
        }
        "torus" => {
            let (w, h) = parse_dims(args)?;
            torus_grid(w, h)
        }
        "tiling" => {
            let kv = parse_kv(args)?;
            hyperbolic_tiling_patch(
                get_num(&kv, "p")?,
                get_num(&kv, "q")?,
                get_num(&kv, "layers")?,
            )
        }
        "farey" => farey_ball(single()? as u64),
        "gamma2" => {
            let kv = parse_kv(args)?;
            gamma2_patch(get_num(&kv, "depth")?)
        }
        "theta_nm" => {
            let kv = parse_kv(args)?;
            Ok(theta_nm(get_num(&kv, "n")?, get_num(&kv, "m")?)?.0)
        }
        // Bridge extension of a comma-free base descriptor, e.g.
        // "theta_ext:base=path:5,u0=2,n=2".
        "theta_ext" => {
            let kv = parse_kv(args)?;
            let base_desc = kv
                .get("base")
                .ok_or_else(|| Error::invalid("theta_ext needs base=<descriptor>"))?;
            let base = generate(base_desc)?;
            Ok(theta_extension(&base, get_num(&kv, "u0")?, get_num(&kv, "n")?)?.0)
        }
        _ => Err(Error::invalid(format!("unknown family {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexSet;

    #[test]
    fn product_small_identities() {
        let k2 = complete_graph(2).unwrap();
        let (c4, _) = product(&k2, &k2, ProductKind::Cartesian, None).unwrap();
        assert_eq!((c4.vertex_count(), c4.edge_count()), (4, 4));
        assert!((0..4).all(|v| c4.degree(v) == 2));
        assert!(c4.is_connected());

        let (k4, _) = product(&k2, &k2, ProductKind::Strong, None).unwrap();
        assert_eq!((k4.vertex_count(), k4.edge_count()), (4, 6));

        let (k4l, _) = product(&k2, &k2, ProductKind::Lexicographic, None).unwrap();
        assert_eq!(k4l.edge_count(), 6);
    }

    #[test]
    fn rooted_product_pendants() {
        let p3 = path_graph(3).unwrap();
        let p2 = path_graph(2).unwrap();
        let (g, maps) = product(&p3, &p2, ProductKind::Rooted, Some(1)).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 5); // P3 spine + 3 pendants
        for u in 0..3 {
            let image = maps.inclusion[u];
            assert_eq!(maps.projection[image], u);
            // Each spine vertex has exactly one pendant neighbor of degree 1.
            let pendants = g
                .neighbors(image)
                .iter()
                .filter(|&&w| g.degree(w) == 1)
                .count();
            assert_eq!(pendants, 1);
        }
        assert!(product(&p3, &p2, ProductKind::Rooted, None).is_err());
    }

    #[test]
    fn cartesian_distance_is_sum() {
        let a = path_graph(4).unwrap();
        let b = cycle_graph(5).unwrap();
        let (g, _) = product(&a, &b, ProductKind::Cartesian, None).unwrap();
        let (da, db, dg) = (a.distance_matrix(), b.distance_matrix(), g.distance_matrix());
        let nb = b.vertex_count();
        for u in 0..a.vertex_count() {
            for v in 0..nb {
                for u2 in 0..a.vertex_count() {
                    for v2 in 0..nb {
                        assert_eq!(
                            dg.dist(u * nb + v, u2 * nb + v2),
                            da.dist(u, u2) + db.dist(v, v2)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn product_maps_distance_behavior() {
        let a = path_graph(3).unwrap();
        let b = path_graph(3).unwrap();
        for kind in [
            ProductKind::Cartesian,
            ProductKind::Strong,
            ProductKind::Lexicographic,
            ProductKind::Rooted,
        ] {
            let (g, maps) = product(&a, &b, kind, Some(0)).unwrap();
            let (da, dg) = (a.distance_matrix(), g.distance_matrix());
            for u in 0..a.vertex_count() {
                for u2 in 0..a.vertex_count() {
                    // Inclusion preserves distance exactly.
                    assert_eq!(
                        dg.dist(maps.inclusion[u], maps.inclusion[u2]),
                        da.dist(u, u2),
                        "{kind:?}"
                    );
                }
            }
            for x in 0..g.vertex_count() {
                for y in 0..g.vertex_count() {
                    // Projection never increases distance.
                    assert!(da.dist(maps.projection[x], maps.projection[y]) <= dg.dist(x, y));
                }
            }
        }
    }

    #[test]
    fn wedge_cases() {
        let p2 = path_graph(2).unwrap();
        let p3 = wedge_sum(&p2, 1, &p2, 0).unwrap();
        assert_eq!((p3.vertex_count(), p3.edge_count()), (3, 2));
        let dm = p3.distance_matrix();
        assert_eq!(p3.diameter(&dm), 2);

        let c3 = cycle_graph(3).unwrap();
        let bowtie = wedge_sum(&c3, 0, &c3, 0).unwrap();
        assert_eq!((bowtie.vertex_count(), bowtie.edge_count()), (5, 6));
        assert_eq!(bowtie.degree(0), 4); // cut vertex

        let p1 = path_graph(1).unwrap();
        let same = wedge_sum(&p1, 0, &c3, 1).unwrap();
        assert_eq!((same.vertex_count(), same.edge_count()), (3, 3));
    }

    #[test]
    fn theta_extension_p3() {
        let p3 = path_graph(3).unwrap();
        let (g, ann) = theta_extension(&p3, 1, 2).unwrap();
        assert_eq!(g.vertex_count(), 8);
        // Direct edge between the copy images of the center.
        assert!(g.has_edge(ann.copies[0][1], ann.copies[1][1]));
        assert_eq!(ann.bridge_index[&(0, 1, 1)].len(), 2);
        assert_eq!(ann.bridge_index[&(0, 1, 0)].len(), 3);
        // Bridge (i,j,x) has dist(u0,x)+1 edges.
        let dm = p3.distance_matrix();
        for ((_, _, x), path) in &ann.bridge_index {
            assert_eq!(path.len(), dm.dist(1, *x) as usize + 2);
        }
        assert_eq!(ann.shadow.len(), 8);
    }

    #[test]
    fn theta_extension_degenerate_and_errors() {
        let p1 = path_graph(1).unwrap();
        let (g, _) = theta_extension(&p1, 0, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));

        let disconnected = Graph::build(3, &[(0, 1)]).unwrap();
        assert!(theta_extension(&disconnected, 0, 2).is_err());
        assert!(theta_extension(&p1, 0, 1).is_err());
    }

    #[test]
    fn theta_extension_copies_preserve_distance_and_shadow_is_lipschitz() {
        let c5 = cycle_graph(5).unwrap();
        let dm_base = c5.distance_matrix();
        let (g, ann) = theta_extension(&c5, 0, 3).unwrap();
        let dm = g.distance_matrix();
        for copy in &ann.copies {
            for x in 0..5 {
                for y in 0..5 {
                    assert_eq!(dm.dist(copy[x], copy[y]), dm_base.dist(x, y));
                }
            }
        }
        // The shadow map sends edges to edges or equal vertices.
        for (u, v) in g.edges() {
            let (su, sv) = (ann.shadow[u], ann.shadow[v]);
            assert!(su == sv || c5.has_edge(su, sv) || dm_base.dist(su, sv) <= 1);
        }
    }

    #[test]
    fn theta_nm_counts_and_corner_distances() {
        let (g, _) = theta_nm(4, 2).unwrap();
        assert_eq!(g.vertex_count(), 26);

        let (g, ann) = theta_nm(2, 1).unwrap();
        assert_eq!(ann.bridges[&(1, 0, 1)].len(), 2); // 1 edge
        assert_eq!(ann.bridges[&(2, 0, 1)].len(), 3); // 2 edges
        assert!(g.has_edge(ann.corner(0, 1), ann.corner(0, 2))); // siblings

        for n in 1..=4 {
            for m in 1..=6 {
                let (g, ann) = theta_nm(n, m).unwrap();
                let dm = g.distance_matrix();
                for level in [1u8, 2u8] {
                    for c1 in 0..n {
                        for c2 in c1 + 1..n {
                            assert!(
                                dm.dist(ann.corner(c1, level), ann.corner(c2, level))
                                    >= m as u16,
                                "n={n} m={m} level={level}"
                            );
                        }
                    }
                }
                // Exactly n−1 bridges start at each corner within its level.
                for level in [1u8, 2u8] {
                    for c in 0..n {
                        let count = ann
                            .bridges
                            .keys()
                            .filter(|&&(l, a, b)| l == level && (a == c || b == c))
                            .count();
                        assert_eq!(count, n - 1);
                    }
                }
            }
        }
    }

    #[test]
    fn rips_threshold() {
        let p7 = path_graph(7).unwrap();
        let a = VertexSet::from_iter(7, [0]);
        let b = VertexSet::from_iter(7, [3]);
        let c = VertexSet::from_iter(7, [4]);
        let r = rips_graph(&p7, &[a.clone(), b.clone()], 2).unwrap();
        assert_eq!(r.edge_count(), 0);
        let r = rips_graph(&p7, &[a.clone(), b.clone()], 3).unwrap();
        assert_eq!(r.edge_count(), 1);
        let r = rips_graph(&p7, &[b.clone(), c.clone()], 1).unwrap();
        assert_eq!(r.edge_count(), 1); // adjacent but disjoint
        assert!(rips_graph(&p7, &[a, b.clone(), b], 1).is_err());
    }

    #[test]
    fn grid_and_torus() {
        let g = grid_patch(3, 3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));
        assert!(g.annotation_set("interior").unwrap().is_empty());

        let g = grid_patch(5, 5).unwrap();
        assert_eq!(g.annotation_set("interior").unwrap().to_vec(), vec![12]);

        let t = torus_grid(4, 4).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (16, 32));
        assert!((0..16).all(|v| t.degree(v) == 4));
        let dm = t.distance_matrix();
        assert_eq!(t.diameter(&dm), 4);
        assert!(torus_grid(2, 5).is_err());
    }

    #[test]
    fn trees_and_gamma2() {
        let t = regular_tree(3, 3).unwrap();
        assert_eq!(t.vertex_count(), 1 + 3 + 6 + 12);
        // Interior = root and its children (depth ≤ 1).
        assert_eq!(t.annotation_set("interior").unwrap().to_vec(), vec![0, 1, 2, 3]);

        let g = gamma2_patch(3).unwrap();
        // u + 3+3 branch vertices + (1+3+5) connector interiors.
        assert_eq!(g.vertex_count(), 16);
        assert!((0..16).all(|v| g.degree(v) <= 3));
        assert!(g.is_connected());
        let interior = g.annotation_set("interior").unwrap();
        assert!(interior.contains(0));
        assert!(!interior.contains(3)); // a_depth truncated
    }

    #[test]
    fn farey_window() {
        let g = farey_ball(2).unwrap();
        // 0/1, 1/2, 1/1, 1/0.
        assert_eq!(g.vertex_count(), 4);
        let num = g.annotation_map("num").unwrap();
        let den = g.annotation_map("den").unwrap();
        let find = |p: i64, q: i64| {
            (0..4)
                .find(|v| num[v] == p && den[v] == q)
                .expect("fraction present")
        };
        let (zero, one, inf) = (find(0, 1), find(1, 1), find(1, 0));
        assert!(g.has_edge(zero, one));
        assert!(g.has_edge(zero, inf));
        assert!(g.has_edge(one, inf));
        let half = find(1, 2);
        assert!(g.has_edge(zero, half) && g.has_edge(one, half));
        assert!(!g.has_edge(half, inf));
    }

    #[test]
    fn tiling_degrees_and_interior() {
        let g = hyperbolic_tiling_patch(7, 3, 2).unwrap();
        assert!((0..g.vertex_count()).all(|v| g.degree(v) <= 7));
        let interior = g.annotation_set("interior").unwrap();
        for v in interior.iter() {
            assert_eq!(g.degree(v), 7);
        }
        // Layer-3 patch has the central triangle interior.
        let g = hyperbolic_tiling_patch(7, 3, 3).unwrap();
        let interior = g.annotation_set("interior").unwrap();
        assert!(interior.contains(0) && interior.contains(1) && interior.contains(2));

        // Heptagonal tiling with degree 3: girth 7, so no 3- or 4-cycles.
        let g = hyperbolic_tiling_patch(3, 7, 2).unwrap();
        assert!((0..g.vertex_count()).all(|v| g.degree(v) <= 3));
        let dm = g.distance_matrix();
        for (u, v) in g.edges() {
            // No second u–v path of length ≤ 3 anywhere: check common
            // neighborhoods directly.
            let common = g
                .neighbors(u)
                .iter()
                .filter(|&&w| g.has_edge(w, v))
                .count();
            assert_eq!(common, 0, "triangle at ({u},{v})");
        }
        for u in 0..g.vertex_count() {
            for v in u + 1..g.vertex_count() {
                if dm.dist(u, v) == 2 {
                    let common = g
                        .neighbors(u)
                        .iter()
                        .filter(|&&w| g.has_edge(w, v))
                        .count();
                    assert_eq!(common, 1, "4-cycle through ({u},{v})");
                }
            }
        }
    }

    #[test]
    fn tiling_layer_sizes_grow() {
        for (p, q) in [(7, 3), (3, 7), (4, 5), (5, 4), (5, 5)] {
            let small = hyperbolic_tiling_patch(p, q, 1).unwrap();
            let big = hyperbolic_tiling_patch(p, q, 3).unwrap();
            assert!(big.vertex_count() > small.vertex_count(), "({p},{q})");
            assert!(big.is_connected());
            assert!((0..big.vertex_count()).all(|v| big.degree(v) <= p));
        }
        assert!(hyperbolic_tiling_patch(4, 4, 2).is_err()); // Euclidean
        assert!(hyperbolic_tiling_patch(6, 3, 2).is_err()); // Euclidean
        assert!(hyperbolic_tiling_patch(3, 7, 0).is_err());
    }

    #[test]
    fn descriptor_grammar() {
        assert_eq!(generate("path:5").unwrap().vertex_count(), 5);
        assert_eq!(generate("cycle:6").unwrap().edge_count(), 6);
        assert_eq!(generate("grid:3x3").unwrap().vertex_count(), 9);
        assert_eq!(generate("torus:4x4").unwrap().vertex_count(), 16);
        assert_eq!(generate("theta_nm:n=4,m=2").unwrap().vertex_count(), 26);
        assert_eq!(generate("farey:2").unwrap().vertex_count(), 4);
        assert!(generate("tiling:p=3,q=7,layers=1").is_ok());
        assert!(generate("tree:d=3,depth=2").is_ok());
        assert!(generate("gamma2:depth=2").is_ok());
        assert!(generate("nonsense:1").is_err());
        assert!(generate("grid:axb").is_err());
        assert!(generate("path").is_err());
    }
}
