//! Exact adjudication on finite graphs via an explicit two-player arena.
//!
//! The cops' goal "capture, or ∃N such that dist(v, r_k) > R for all k ≥ N"
//! is the complement of "the robber avoids capture and re-enters B_R(v)
//! infinitely often". On a finite arena the robber's objective is therefore a
//! Büchi condition: avoid the capture sink and visit, infinitely often, the
//! cops-to-move nodes whose robber stands inside the ball. This reformulation
//! is the load-bearing modeling decision of the whole solver.
//!
//! Winning regions come from the classical recurrence: repeatedly compute the
//! robber's attractor to the surviving target nodes; everything outside it is
//! cop-winning (the robber can never reach the ball again), so its cop
//! attractor is removed and the target shrinks. Both positional strategies
//! fall out of the attractor computations.

use std::collections::BTreeMap;

use crate::engine::GameParams;
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph, Vertex};

/// Default ceiling on |V|^(n+1) game positions.
pub const DEFAULT_STATE_BUDGET: u64 = 5_000_000;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    Cops,
    Robber,
    Sink,
}

/// Explicit game arena. Non-sink node ids: cops-to-move (t, r) is t·V + r;
/// robber-to-move (t, r) is T·V + t·V + r, where t indexes the cop tuple and
/// r is the robber vertex. The capture sink is the last id.
pub struct Arena {
    pub vcount: usize,
    pub params: GameParams,
    /// Cop position tuples; index = tuple id. For the full arena this is all
    /// ordered tuples in mixed-radix order; under the symmetric reduction,
    /// all non-decreasing tuples.
    pub tuples: Vec<Vec<Vertex>>,
    tuple_index: Option<BTreeMap<Vec<Vertex>, usize>>,
    /// CSR successor lists over all node ids.
    succ_off: Vec<u32>,
    succ: Vec<u32>,
    /// Cops-to-move nodes with the robber inside B_R(v).
    pub target: Vec<bool>,
}

impl Arena {
    pub fn node_count(&self) -> usize {
        2 * self.tuples.len() * self.vcount + 1
    }

    pub fn sink(&self) -> usize {
        2 * self.tuples.len() * self.vcount
    }

    pub fn owner(&self, node: usize) -> Owner {
        let half = self.tuples.len() * self.vcount;
        if node < half {
            Owner::Cops
        } else if node < 2 * half {
            Owner::Robber
        } else {
            Owner::Sink
        }
    }

    pub fn successors(&self, node: usize) -> &[u32] {
        &self.succ[self.succ_off[node] as usize..self.succ_off[node + 1] as usize]
    }

    fn tuple_id(&self, cops: &[Vertex]) -> Option<usize> {
        match &self.tuple_index {
            Some(map) => {
                let mut key = cops.to_vec();
                key.sort_unstable();
                map.get(&key).copied()
            }
            None => {
                let mut t = 0usize;
                for &c in cops {
                    t = t * self.vcount + c;
                }
                Some(t)
            }
        }
    }

    pub fn cop_node(&self, cops: &[Vertex], robber: Vertex) -> Option<usize> {
        Some(self.tuple_id(cops)? * self.vcount + robber)
    }

    pub fn robber_node(&self, cops: &[Vertex], robber: Vertex) -> Option<usize> {
        Some(self.tuples.len() * self.vcount + self.tuple_id(cops)? * self.vcount + robber)
    }

    /// (cop positions, robber vertex) of a non-sink node.
    pub fn decode(&self, node: usize) -> (&[Vertex], Vertex) {
        let half = self.tuples.len() * self.vcount;
        let local = node % half;
        (&self.tuples[local / self.vcount], local % self.vcount)
    }
}

/// Builds the arena for `params` on `g`. Edge relation matches the
/// game-engine move operations exactly: cops-to-move nodes branch over joint
/// σ-moves (capturing moves go to the sink), robber-to-move nodes branch over
/// ψ-reachable safe vertices.
pub fn build_arena(g: &Graph, dm: &DistanceMatrix, params: &GameParams) -> Result<Arena> {
    build_arena_with(g, dm, params, DEFAULT_STATE_BUDGET, false)
}

pub fn build_arena_with(
    g: &Graph,
    dm: &DistanceMatrix,
    params: &GameParams,
    state_budget: u64,
    symmetric: bool,
) -> Result<Arena> {
    params.validate(g)?;
    let v = g.vertex_count();
    let mut states: u128 = 1;
    for _ in 0..=params.n {
        states = states.saturating_mul(v as u128);
    }
    if states > state_budget as u128 {
        return Err(Error::limit(format!(
            "arena would need {states} positions, budget is {state_budget}"
        )));
    }

    // Cop tuples.
    let (tuples, tuple_index) = if symmetric {
        let mut tuples: Vec<Vec<Vertex>> = Vec::new();
        let mut cur = vec![0usize; params.n];
        loop {
            tuples.push(cur.clone());
            let mut pos = params.n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                if cur[pos] + 1 < v {
                    cur[pos] += 1;
                    for p in pos + 1..params.n {
                        cur[p] = cur[pos];
                    }
                    break;
                }
                if pos == 0 {
                    cur.clear();
                }
            }
            if cur.is_empty() {
                break;
            }
        }
        let index: BTreeMap<Vec<Vertex>, usize> = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        (tuples, Some(index))
    } else {
        let count = v.pow(params.n as u32);
        let mut tuples = Vec::with_capacity(count);
        for mut t in 0..count {
            let mut tup = vec![0usize; params.n];
            for i in (0..params.n).rev() {
                tup[i] = t % v;
                t /= v;
            }
            tuples.push(tup);
        }
        (tuples, None)
    };

    let big_t = tuples.len();
    let half = big_t * v;
    let sink = 2 * half;
    // σ-balls per vertex, ascending ids.
    let balls: Vec<Vec<Vertex>> = (0..v)
        .map(|c| (0..v).filter(|&u| dm.dist(c, u) <= params.sigma).collect())
        .collect();

    let lookup_tuple = |positions: &[Vertex]| -> usize {
        match &tuple_index {
            Some(map) => {
                let mut key = positions.to_vec();
                key.sort_unstable();
                map[&key]
            }
            None => {
                let mut t = 0usize;
                for &c in positions {
                    t = t * v + c;
                }
                t
            }
        }
    };

    let mut succ_off: Vec<u32> = Vec::with_capacity(sink + 2);
    let mut succ: Vec<u32> = Vec::new();
    succ_off.push(0);
    // Cops-to-move nodes.
    let mut joint = vec![0usize; params.n];
    for t in 0..big_t {
        let cops = &tuples[t];
        for r in 0..v {
            // Enumerate joint moves in mixed-radix order over the balls.
            joint.iter_mut().for_each(|j| *j = 0);
            let mut sink_added = false;
            loop {
                let captures = (0..params.n)
                    .any(|i| dm.dist(balls[cops[i]][joint[i]], r) <= params.rho);
                if captures {
                    if !sink_added {
                        succ.push(sink as u32);
                        sink_added = true;
                    }
                } else {
                    let moved: Vec<Vertex> =
                        (0..params.n).map(|i| balls[cops[i]][joint[i]]).collect();
                    succ.push((half + lookup_tuple(&moved) * v + r) as u32);
                }
                let mut pos = params.n;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    joint[pos] += 1;
                    if joint[pos] < balls[cops[pos]].len() {
                        break;
                    }
                    joint[pos] = 0;
                    if pos == 0 {
                        joint.clear();
                    }
                }
                if joint.is_empty() {
                    joint = vec![0usize; params.n];
                    break;
                }
            }
            succ_off.push(succ.len() as u32);
        }
    }
    // Robber-to-move nodes.
    for t in 0..big_t {
        let cops = &tuples[t];
        for r in 0..v {
            if crate::engine::capture_check(dm, cops, r, params.rho) {
                // Unreachable in honest play; the robber is already caught.
                succ.push(sink as u32);
            } else {
                let reach =
                    crate::engine::robber_moves(g, dm, cops, r, params.rho, params.psi);
                for r2 in reach.iter() {
                    succ.push((t * v + r2) as u32);
                }
            }
            succ_off.push(succ.len() as u32);
        }
    }
    succ_off.push(succ.len() as u32); // sink: no successors

    let mut target = vec![false; sink + 1];
    for t in 0..big_t {
        for r in 0..v {
            if dm.dist(params.v, r) <= params.big_r {
                target[t * v + r] = true;
            }
        }
    }

    Ok(Arena {
        vcount: v,
        params: *params,
        tuples,
        tuple_index,
        succ_off,
        succ,
        target,
    })
}

/// Winning regions and positional strategies.
pub struct SolverResult {
    /// Per node: true iff the cops win from it (sink included).
    pub cop_region: Vec<bool>,
    /// Chosen successor for cops-to-move nodes inside the cop region.
    pub cop_move: Vec<u32>,
    /// Chosen successor for robber-to-move nodes inside the robber region.
    pub robber_move: Vec<u32>,
}

impl SolverResult {
    pub fn robber_region(&self, node: usize) -> bool {
        !self.cop_region[node]
    }
}

struct Preds {
    off: Vec<u32>,
    list: Vec<u32>,
}

fn build_preds(arena: &Arena) -> Preds {
    let n = arena.node_count();
    let mut deg = vec![0u32; n];
    for u in 0..n {
        for &w in arena.successors(u) {
            deg[w as usize] += 1;
        }
    }
    let mut off = vec![0u32; n + 1];
    for i in 0..n {
        off[i + 1] = off[i] + deg[i];
    }
    let mut fill = off.clone();
    let mut list = vec![0u32; off[n] as usize];
    for u in 0..n {
        for &w in arena.successors(u) {
            list[fill[w as usize] as usize] = u as u32;
            fill[w as usize] += 1;
        }
    }
    Preds { off, list }
}

impl Preds {
    fn of(&self, node: usize) -> &[u32] {
        &self.list[self.off[node] as usize..self.off[node + 1] as usize]
    }
}

/// Attractor for `player` to `seeds`. Nodes with `blocked` set never join.
/// Newly attracted player-owned nodes record the successor that pulled them
/// in (FIFO processing keeps ranks monotone, so recorded edges decrease the
/// distance-to-seed rank). Counters start at full out-degree, so successors
/// outside the subgame count as permanent escapes.
fn attractor(
    arena: &Arena,
    preds: &Preds,
    player: Owner,
    seeds: &[usize],
    blocked: &[bool],
    strategy: &mut [u32],
) -> Vec<bool> {
    let n = arena.node_count();
    let mut attr = vec![false; n];
    let mut counter: Vec<u32> = (0..n)
        .map(|u| arena.succ_off[u + 1] - arena.succ_off[u])
        .collect();
    let mut queue: Vec<usize> = Vec::new();
    for &s in seeds {
        if !attr[s] {
            attr[s] = true;
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &p in preds.of(u) {
            let p = p as usize;
            if attr[p] || blocked[p] {
                continue;
            }
            if arena.owner(p) == player {
                attr[p] = true;
                if strategy[p] == NONE {
                    strategy[p] = u as u32;
                }
                queue.push(p);
            } else {
                counter[p] -= 1;
                if counter[p] == 0 {
                    attr[p] = true;
                    queue.push(p);
                }
            }
        }
    }
    attr
}

/// Solves the arena exactly: the robber wins a play iff the sink never occurs
/// and target nodes occur infinitely often.
pub fn solve_buchi(arena: &Arena) -> SolverResult {
    let n = arena.node_count();
    let preds = build_preds(arena);
    let sink = arena.sink();
    let mut cop_assigned = vec![false; n];
    cop_assigned[sink] = true;
    let mut cop_move = vec![NONE; n];
    let mut robber_move = vec![NONE; n];

    loop {
        // Robber attractor to the surviving targets, within the live nodes.
        let seeds: Vec<usize> = (0..n)
            .filter(|&u| arena.target[u] && !cop_assigned[u])
            .collect();
        let mut r_strat = vec![NONE; n];
        let attr_r = attractor(arena, &preds, Owner::Robber, &seeds, &cop_assigned, &mut r_strat);
        let z: Vec<usize> = (0..n)
            .filter(|&u| u != sink && !cop_assigned[u] && !attr_r[u])
            .collect();
        if z.is_empty() {
            // Everything still alive is robber-winning; keep the final
            // attractor edges and give target nodes a stay-alive move.
            for u in 0..n {
                if cop_assigned[u] || arena.owner(u) != Owner::Robber {
                    continue;
                }
                robber_move[u] = if arena.target[u] {
                    NONE
                } else {
                    r_strat[u]
                };
                if robber_move[u] == NONE {
                    robber_move[u] = arena
                        .successors(u)
                        .iter()
                        .copied()
                        .find(|&w| !cop_assigned[w as usize])
                        .unwrap_or(NONE);
                }
            }
            break;
        }
        // Cop attractor to the dead zone (plus everything already won).
        let mut seeds_c: Vec<usize> = (0..n).filter(|&u| cop_assigned[u]).collect();
        seeds_c.extend(z.iter().copied());
        seeds_c.sort_unstable();
        let attr_c = attractor(arena, &preds, Owner::Cops, &seeds_c, &vec![false; n], &mut cop_move);
        for u in 0..n {
            if attr_c[u] {
                cop_assigned[u] = true;
            }
        }
        // Cops inside the dead zone hold position: capture if available,
        // else the smallest successor that stays cop-winning.
        for &u in &z {
            if arena.owner(u) == Owner::Cops && cop_move[u] == NONE {
                let succs = arena.successors(u);
                cop_move[u] = succs
                    .iter()
                    .copied()
                    .find(|&w| w as usize == sink)
                    .or_else(|| succs.iter().copied().find(|&w| cop_assigned[w as usize]))
                    .unwrap_or(NONE);
            }
        }
    }

    SolverResult {
        cop_region: cop_assigned,
        cop_move,
        robber_move,
    }
}

pub struct CopwinOutcome {
    pub copwin: bool,
    /// A cop placement that wins against every robber reply, when one exists.
    pub witness: Option<Vec<Vertex>>,
    pub arena: Arena,
    pub solution: SolverResult,
}

/// Decides CopWin(n, σ, ρ, ψ, v, R): some initial cop placement puts every
/// robber reply inside the cop region.
pub fn decide_copwin(g: &Graph, dm: &DistanceMatrix, params: &GameParams) -> Result<CopwinOutcome> {
    decide_copwin_with(g, dm, params, DEFAULT_STATE_BUDGET, false)
}

pub fn decide_copwin_with(
    g: &Graph,
    dm: &DistanceMatrix,
    params: &GameParams,
    state_budget: u64,
    symmetric: bool,
) -> Result<CopwinOutcome> {
    let arena = build_arena_with(g, dm, params, state_budget, symmetric)?;
    let solution = solve_buchi(&arena);
    let v = arena.vcount;
    let mut witness = None;
    for (t, tuple) in arena.tuples.iter().enumerate() {
        if (0..v).all(|r| solution.cop_region[t * v + r]) {
            witness = Some(tuple.clone());
            break;
        }
    }
    Ok(CopwinOutcome {
        copwin: witness.is_some(),
        witness,
        arena,
        solution,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeRow {
    pub sigma: u16,
    pub rho: u16,
    /// Minimal n ≤ n_max winning for every (ψ, R) in the grids, if any.
    pub minimal_n: Option<usize>,
}

/// Grid-relative evidence only: for each (σ, ρ), the minimal cop count that
/// wins for all (ψ, R) in the given grids. Not a weak/strong cop number.
#[allow(clippy::too_many_arguments)]
pub fn cop_number_probe(
    g: &Graph,
    dm: &DistanceMatrix,
    sigma_grid: &[u16],
    rho_grid: &[u16],
    psi_grid: &[u16],
    r_grid: &[u16],
    v: Vertex,
    n_max: usize,
) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::new();
    for &sigma in sigma_grid {
        for &rho in rho_grid {
            let mut minimal_n = None;
            'search: for n in 1..=n_max {
                for &psi in psi_grid {
                    for &big_r in r_grid {
                        let params = GameParams {
                            n,
                            sigma,
                            rho,
                            psi,
                            v,
                            big_r,
                        };
                        if !decide_copwin(g, dm, &params)?.copwin {
                            continue 'search;
                        }
                    }
                }
                minimal_n = Some(n);
                break;
            }
            rows.push(ProbeRow {
                sigma,
                rho,
                minimal_n,
            });
        }
    }
    Ok(rows)
}
