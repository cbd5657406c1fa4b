//! Metric invariants: slim-triangle constants, expansion profiles, growth
//! functions, safe-distance thresholds, and deletion distortion.
//!
//! All ratios are exact integer pairs; nothing here uses floating point.

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph, Vertex, VertexSet, UNREACHABLE};

/// Default cap on geodesic combinations examined per vertex triple.
pub const DEFAULT_GEODESIC_BUDGET: u64 = 10_000;
/// Largest subset size the expansion brute force accepts.
pub const MAX_EXPANSION_CAP: usize = 12;
/// Hard bounds for the deletion-constant brute force.
pub const MAX_UNDISTORTION_M: usize = 5;
pub const MAX_UNDISTORTION_N: usize = 3;

/// Exact non-negative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den > 0, "ratio denominator must be positive");
        let g = gcd(num.max(1), den);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ---------------------------------------------------------------------------
// Slim triangles
// ---------------------------------------------------------------------------

/// A geodesic triangle attaining the slim constant: corner vertices (a, b, c)
/// and geodesic sides [a–b, a–c, b–c].
#[derive(Debug, Clone)]
pub struct TriangleWitness {
    pub corners: (Vertex, Vertex, Vertex),
    pub sides: [Vec<Vertex>; 3],
}

#[derive(Debug, Clone)]
pub struct HyperbolicityReport {
    pub delta: u16,
    pub witness: Option<TriangleWitness>,
}

fn geodesic_count(g: &Graph, dm: &DistanceMatrix, u: Vertex, v: Vertex) -> u64 {
    // Count shortest paths by dynamic programming over distance layers.
    let n = g.vertex_count();
    let mut order: Vec<Vertex> = (0..n).filter(|&w| dm.dist(u, w) != UNREACHABLE).collect();
    order.sort_by_key(|&w| dm.dist(u, w));
    let mut cnt = vec![0u64; n];
    cnt[u] = 1;
    for &w in &order {
        if w == u {
            continue;
        }
        let dw = dm.dist(u, w);
        let mut total = 0u64;
        for &x in g.neighbors(w) {
            if dm.dist(u, x) + 1 == dw {
                total = total.saturating_add(cnt[x]);
            }
        }
        cnt[w] = total;
    }
    cnt[v]
}

fn enumerate_geodesics(g: &Graph, dm: &DistanceMatrix, u: Vertex, v: Vertex) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut stack = vec![u];
    fn rec(
        g: &Graph,
        dm: &DistanceMatrix,
        v: Vertex,
        stack: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let cur = *stack.last().unwrap();
        if cur == v {
            out.push(stack.clone());
            return;
        }
        let d = dm.dist(cur, v);
        for &w in g.neighbors(cur) {
            if dm.dist(w, v) + 1 == d {
                stack.push(w);
                rec(g, dm, v, stack, out);
                stack.pop();
            }
        }
    }
    rec(g, dm, v, &mut stack, &mut out);
    out
}

fn dist_to_path(dm: &DistanceMatrix, w: Vertex, path: &[Vertex]) -> u16 {
    path.iter().map(|&x| dm.dist(w, x)).min().unwrap()
}

/// Minimal δ such that every geodesic triangle is δ-slim: each side lies in
/// the δ-neighborhood of the union of the other two sides, for every choice
/// of geodesic sides. Triples whose geodesic-combination count exceeds the
/// budget abort with a resource-limit error carrying the lower bound found.
pub fn slim_triangle_constant(
    g: &Graph,
    dm: &DistanceMatrix,
    per_triple_budget: u64,
) -> Result<HyperbolicityReport> {
    if !g.is_connected() {
        return Err(Error::invalid("slim constant requires a connected graph"));
    }
    let n = g.vertex_count();
    let mut delta: u16 = 0;
    let mut witness: Option<TriangleWitness> = None;

    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let combos = geodesic_count(g, dm, x, y)
                    .saturating_mul(geodesic_count(g, dm, x, z))
                    .saturating_mul(geodesic_count(g, dm, y, z));
                if combos > per_triple_budget {
                    return Err(Error::limit(format!(
                        "geodesic budget exceeded at triple ({x},{y},{z}): \
                         {combos} combinations > {per_triple_budget}; \
                         partial lower bound delta >= {delta}"
                    )));
                }
                // Examine each side in turn; the other two sides are chosen
                // adversarially and independently, so the worst distance from
                // a side vertex w is min(max over side-2 choices, max over
                // side-3 choices).
                for (a, b, c) in [(y, z, x), (x, z, y), (x, y, z)] {
                    let g2 = enumerate_geodesics(g, dm, a, c);
                    let g3 = enumerate_geodesics(g, dm, b, c);
                    let dab = dm.dist(a, b);
                    for w in 0..n {
                        if dm.dist(a, w) + dm.dist(w, b) != dab {
                            continue;
                        }
                        let m2 = g2.iter().map(|p| dist_to_path(dm, w, p)).max().unwrap();
                        let m3 = g3.iter().map(|p| dist_to_path(dm, w, p)).max().unwrap();
                        let val = m2.min(m3);
                        if val > delta {
                            delta = val;
                            // Reconstruct a side through w and the two
                            // adversarial sides attaining the bound.
                            let mut side1 = g.geodesic(dm, a, w)?;
                            side1.extend(g.geodesic(dm, w, b)?.into_iter().skip(1));
                            let side2 = g2
                                .iter()
                                .max_by_key(|p| dist_to_path(dm, w, p))
                                .unwrap()
                                .clone();
                            let side3 = g3
                                .iter()
                                .max_by_key(|p| dist_to_path(dm, w, p))
                                .unwrap()
                                .clone();
                            witness = Some(TriangleWitness {
                                corners: (a, b, c),
                                sides: [side1, side2, side3],
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(HyperbolicityReport { delta, witness })
}

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ExpansionReport {
    pub min_ratio: Ratio,
    pub witness_set: VertexSet,
    pub size_cap: usize,
}

/// Exact minimum of |∂K|/|K| over non-empty K with |K| ≤ size_cap. Only
/// connected K are enumerated: a disconnected set's ratio is a mediant of its
/// components' ratios, so it never beats the best component.
pub fn expansion_profile(g: &Graph, size_cap: usize) -> Result<ExpansionReport> {
    if size_cap < 1 {
        return Err(Error::invalid("expansion cap must be ≥ 1"));
    }
    if size_cap > MAX_EXPANSION_CAP {
        return Err(Error::limit(format!(
            "expansion cap {size_cap} exceeds brute-force bound {MAX_EXPANSION_CAP}"
        )));
    }
    let n = g.vertex_count();
    let mut best: Option<(Ratio, Vec<Vertex>)> = None;

    // Enumerate each connected set exactly once: grow from its minimum vertex
    // s, extending only with vertices > s and banning tried extensions on the
    // way back up.
    fn extend(
        g: &Graph,
        s: Vertex,
        k: &mut Vec<Vertex>,
        in_k: &mut VertexSet,
        banned: &mut VertexSet,
        cap: usize,
        best: &mut Option<(Ratio, Vec<Vertex>)>,
    ) {
        let boundary: usize = k
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&w| !in_k.contains(w)).count())
            .sum();
        let ratio = Ratio::new(boundary as u64, k.len() as u64);
        if best.as_ref().map_or(true, |(b, _)| ratio < *b) {
            *best = Some((ratio, k.clone()));
        }
        if k.len() == cap {
            return;
        }
        let mut cands: Vec<Vertex> = Vec::new();
        for &v in k.iter() {
            for &w in g.neighbors(v) {
                if w > s && !in_k.contains(w) && !banned.contains(w) && !cands.contains(&w) {
                    cands.push(w);
                }
            }
        }
        cands.sort_unstable();
        for &c in &cands {
            in_k.insert(c);
            k.push(c);
            extend(g, s, k, in_k, banned, cap, best);
            k.pop();
            in_k.remove(c);
            banned.insert(c);
        }
        for &c in &cands {
            banned.remove(c);
        }
    }

    for s in 0..n {
        let mut k = vec![s];
        let mut in_k = VertexSet::from_iter(n, [s]);
        let mut banned = VertexSet::new(n);
        extend(g, s, &mut k, &mut in_k, &mut banned, size_cap, &mut best);
    }
    let (min_ratio, set) = best.expect("at least one singleton set");
    Ok(ExpansionReport {
        min_ratio,
        witness_set: VertexSet::from_iter(n, set),
        size_cap,
    })
}

// ---------------------------------------------------------------------------
// Growth and safe distance
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GrowthProfile {
    /// Sphere sizes α(0..=r_max).
    pub alpha: Vec<u64>,
    /// Ball sizes β(0..=r_max).
    pub beta: Vec<u64>,
    /// Largest radius unaffected by the patch boundary.
    pub valid_radius: u16,
}

/// Sphere/ball growth around an interior vertex. valid_radius is one less
/// than the distance from v to the nearest non-interior vertex (or the
/// eccentricity of v when the whole graph is interior).
pub fn growth_profile(
    g: &Graph,
    dm: &DistanceMatrix,
    v: Vertex,
    r_max: u16,
    interior: &VertexSet,
) -> Result<GrowthProfile> {
    if !interior.contains(v) {
        return Err(Error::invalid(format!(
            "growth center {v} is not an interior vertex"
        )));
    }
    let n = g.vertex_count();
    let mut alpha = vec![0u64; r_max as usize + 1];
    for u in 0..n {
        let d = dm.dist(v, u);
        if d != UNREACHABLE && d <= r_max {
            alpha[d as usize] += 1;
        }
    }
    let mut beta = Vec::with_capacity(alpha.len());
    let mut acc = 0u64;
    for &a in &alpha {
        acc += a;
        beta.push(acc);
    }
    let boundary_dist = (0..n)
        .filter(|&u| !interior.contains(u))
        .map(|u| dm.dist(v, u))
        .min();
    let valid_radius = match boundary_dist {
        Some(d) if d != UNREACHABLE => d.saturating_sub(1),
        _ => (0..n)
            .map(|u| dm.dist(v, u))
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0),
    };
    Ok(GrowthProfile {
        alpha,
        beta,
        valid_radius,
    })
}

/// Least N with β(N) > (1/h)·α(ρ)·d·n, using only radii the patch certifies.
pub fn safe_distance_lambda(
    growth: &GrowthProfile,
    h_lower_bound: Ratio,
    d: usize,
    rho: u16,
    n: usize,
) -> Result<u16> {
    if h_lower_bound.num == 0 {
        return Err(Error::invalid("expansion lower bound must be positive"));
    }
    if rho > growth.valid_radius || (rho as usize) >= growth.alpha.len() {
        return Err(Error::InsufficientPatch(format!(
            "reach {rho} exceeds certified growth radius {}",
            growth.valid_radius
        )));
    }
    // β(N) > α(ρ)·d·n/h  ⟺  β(N)·h_num > α(ρ)·d·n·h_den.
    let threshold =
        growth.alpha[rho as usize] as u128 * d as u128 * n as u128 * h_lower_bound.den as u128;
    let limit = (growth.valid_radius as usize).min(growth.beta.len() - 1);
    for big_n in 0..=limit {
        if growth.beta[big_n] as u128 * h_lower_bound.num as u128 > threshold {
            return Ok(big_n as u16);
        }
    }
    Err(Error::InsufficientPatch(format!(
        "growth profile exhausted at radius {limit} before β exceeded the threshold"
    )))
}

// ---------------------------------------------------------------------------
// Distortion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DistortionReport {
    pub max_ratio: Ratio,
    pub witness: Option<(Vertex, Vertex)>,
    /// Connected pieces of the deleted set.
    pub components: usize,
}

/// Exact maximum over vertex pairs outside Δ of dist_{Γ−Δ}(a,b)/dist_Γ(a,b).
pub fn distortion(g: &Graph, delta_set: &VertexSet) -> Result<DistortionReport> {
    let dm = g.distance_matrix();
    let (complement, old_ids) = if delta_set.is_empty() {
        (g.clone(), (0..g.vertex_count()).collect::<Vec<_>>())
    } else {
        g.remove_vertices(delta_set)?
    };
    if !complement.is_connected() {
        return Err(Error::invalid(
            "deleting the set disconnects the graph; distortion is undefined",
        ));
    }
    let dm_c = complement.distance_matrix();
    let mut max_ratio = Ratio::new(1, 1);
    let mut witness = None;
    for i in 0..complement.vertex_count() {
        for j in i + 1..complement.vertex_count() {
            let r = Ratio::new(dm_c.dist(i, j) as u64, dm.dist(old_ids[i], old_ids[j]) as u64);
            if r > max_ratio {
                max_ratio = r;
                witness = Some((old_ids[i], old_ids[j]));
            }
        }
    }
    let components = if delta_set.is_empty() {
        0
    } else {
        let keep: VertexSet = {
            let mut s = VertexSet::new(g.vertex_count());
            for v in 0..g.vertex_count() {
                if !delta_set.contains(v) {
                    s.insert(v);
                }
            }
            s
        };
        let (induced, _) = g.remove_vertices(&keep)?;
        induced.connected_components().len()
    };
    Ok(DistortionReport {
        max_ratio,
        witness,
        components,
    })
}

/// Components of `set` in the subgraph of g induced on `set`.
fn subset_components(g: &Graph, set: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut seen = VertexSet::new(g.vertex_count());
    let in_set = VertexSet::from_iter(g.vertex_count(), set.iter().copied());
    let mut comps = Vec::new();
    for &s in set {
        if seen.contains(s) {
            continue;
        }
        let mut comp = vec![s];
        seen.insert(s);
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for &w in g.neighbors(u) {
                if in_set.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    comp.push(w);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Deletion constants L(m, k), k = 0..=n: L(m,0) = 0, and L(m,k) is the
/// largest complement distance between two vertices adjacent to a deleted set
/// Δ with ≤ m vertices in exactly k connected pieces whose piece graph at
/// threshold L(m,k−1) is connected and whose complement stays connected;
/// each L(m,k) also dominates L(m,k−1).
pub fn undistortion_constant_bruteforce(g: &Graph, m: usize, n: usize) -> Result<u16> {
    if m > MAX_UNDISTORTION_M || n > MAX_UNDISTORTION_N {
        return Err(Error::limit(format!(
            "deletion-constant bounds exceeded: m ≤ {MAX_UNDISTORTION_M}, n ≤ {MAX_UNDISTORTION_N}"
        )));
    }
    if m == 0 || n == 0 {
        return Ok(0);
    }
    let nv = g.vertex_count();
    let mut subsets_estimate: u128 = 0;
    let mut binom: u128 = 1;
    for i in 1..=m.min(nv) {
        binom = binom * (nv - i + 1) as u128 / i as u128;
        subsets_estimate += binom;
    }
    if subsets_estimate > 2_000_000 {
        return Err(Error::limit(format!(
            "deletion-constant search space too large ({subsets_estimate} subsets)"
        )));
    }
    let dm = g.distance_matrix();

    // Collect, per candidate Δ: piece count, pairwise piece distances, and
    // the largest complement distance between Δ-adjacent vertices.
    struct Candidate {
        pieces: usize,
        piece_dist: Vec<Vec<u16>>,
        value: u16,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut subset: Vec<Vertex> = Vec::new();
    fn visit_subsets(
        nv: usize,
        m: usize,
        start: usize,
        subset: &mut Vec<Vertex>,
        f: &mut impl FnMut(&[Vertex]),
    ) {
        for v in start..nv {
            subset.push(v);
            f(subset);
            if subset.len() < m {
                visit_subsets(nv, m, v + 1, subset, f);
            }
            subset.pop();
        }
    }
    let mut eval = |set: &[Vertex]| {
        let pieces = subset_components(g, set);
        if pieces.len() > n {
            return;
        }
        let delta = VertexSet::from_iter(nv, set.iter().copied());
        if set.len() == nv {
            return;
        }
        let (complement, old_ids) = g.remove_vertices(&delta).expect("proper subset");
        if !complement.is_connected() {
            return;
        }
        let mut new_of = vec![usize::MAX; nv];
        for (new, &old) in old_ids.iter().enumerate() {
            new_of[old] = new;
        }
        let dm_c = complement.distance_matrix();
        // Vertices adjacent to Δ, in the complement.
        let adjacent: Vec<usize> = old_ids
            .iter()
            .enumerate()
            .filter(|(_, &old)| g.neighbors(old).iter().any(|&w| delta.contains(w)))
            .map(|(new, _)| new)
            .collect();
        let mut value = 0u16;
        for (i, &a) in adjacent.iter().enumerate() {
            for &b in &adjacent[i + 1..] {
                value = value.max(dm_c.dist(a, b));
            }
        }
        let dm = &dm;
        let piece_dist: Vec<Vec<u16>> = pieces
            .iter()
            .map(|p| {
                pieces
                    .iter()
                    .map(|q| {
                        p.iter()
                            .flat_map(|&u| q.iter().map(move |&v| dm.dist(u, v)))
                            .min()
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        candidates.push(Candidate {
            pieces: pieces.len(),
            piece_dist,
            value,
        });
    };
    visit_subsets(nv, m, 0, &mut subset, &mut eval);

    let mut l_prev: u16 = 0; // L(m,0)
    for k in 1..=n {
        let mut l_k = l_prev;
        for cand in &candidates {
            if cand.pieces != k {
                continue;
            }
            // The piece graph with edges at distance (0, L(m,k−1)] must be
            // connected (trivially true for one piece).
            if k > 1 && !pieces_connected(&cand.piece_dist, l_prev) {
                continue;
            }
            l_k = l_k.max(cand.value);
        }
        l_prev = l_k;
    }
    Ok(l_prev)
}

fn pieces_connected(dist: &[Vec<u16>], l: u16) -> bool {
    let k = dist.len();
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for j in 0..k {
            if !seen[j] && dist[i][j] > 0 && dist[i][j] <= l {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == k
}
