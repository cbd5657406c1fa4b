//! Exact game rules: n cops with speed σ and reach ρ against a robber with
//! speed ψ, contesting the ball of radius R around a center vertex v.
//!
//! Cops place first; the robber places knowing their positions. Each stage the
//! cops move (each at most σ), capture is checked against the robber's
//! pre-move position, then the robber moves along a path of length ≤ ψ whose
//! every vertex stays at distance > ρ from every post-move cop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph, Vertex, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameParams {
    pub n: usize,
    pub sigma: u16,
    pub rho: u16,
    pub psi: u16,
    pub v: Vertex,
    pub big_r: u16,
}

impl GameParams {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("need at least one cop"));
        }
        if self.sigma < 1 {
            return Err(Error::invalid("cop speed σ must be ≥ 1"));
        }
        if self.psi < 1 {
            return Err(Error::invalid("robber speed ψ must be ≥ 1"));
        }
        if self.big_r < 1 {
            return Err(Error::invalid("protection radius R must be ≥ 1"));
        }
        if self.v >= g.vertex_count() {
            return Err(Error::invalid(format!(
                "center vertex {} outside the graph",
                self.v
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    CopPlacement,
    RobberPlacement,
    CopTurn,
    RobberTurn,
    Captured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Cops,
    Robber,
}

/// Snapshot after a move; `phase` names who moves next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub cops: Vec<Vertex>,
    pub robber: Option<Vertex>,
    pub phase: Phase,
    pub stage: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Capture fired during this stage.
    Captured { stage: usize },
    /// The robber stayed outside B_R(v) from stage N through the horizon.
    ExpelledHorizon { first_outside: usize },
    /// The robber reached the horizon; counts stage ends inside B_R(v).
    SurvivedHorizon { ball_visits: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub params: GameParams,
    pub states: Vec<GameState>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Cops(Vec<Vertex>),
    Robber(Vertex),
}

/// Immutable match context shared with strategies.
pub struct MatchCtx<'a> {
    pub graph: &'a Graph,
    pub dm: &'a DistanceMatrix,
    pub params: &'a GameParams,
}

/// A player. `place` is called once for the initial position; `act` every
/// turn thereafter. `history` holds all states so far, current last; the
/// engine re-validates every emitted action.
pub trait Strategy {
    fn side(&self) -> Side;
    fn place(&mut self, ctx: &MatchCtx, history: &[GameState]) -> Result<Action>;
    fn act(&mut self, ctx: &MatchCtx, history: &[GameState]) -> Result<Action>;
}

/// All joint cop moves: the Cartesian product of the closed σ-balls around
/// the current cop positions, in mixed-radix order over ascending vertex ids.
pub fn cop_joint_moves(
    g: &Graph,
    dm: &DistanceMatrix,
    cops: &[Vertex],
    sigma: u16,
) -> Vec<Vec<Vertex>> {
    let balls: Vec<Vec<Vertex>> = cops
        .iter()
        .map(|&c| {
            (0..g.vertex_count())
                .filter(|&u| dm.dist(c, u) <= sigma)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; cops.len()];
    loop {
        out.push(idx.iter().zip(&balls).map(|(&i, ball)| ball[i]).collect());
        let mut pos = cops.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < balls[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// True iff some cop is within ρ of the robber's pre-move position.
pub fn capture_check(dm: &DistanceMatrix, cops: &[Vertex], robber_prev: Vertex, rho: u16) -> bool {
    cops.iter().any(|&c| dm.dist(c, robber_prev) <= rho)
}

/// Vertices the robber can move to: BFS of depth ψ from its position inside
/// the subgraph induced on vertices at distance > ρ from every cop. The
/// robber's own vertex is always included (it must itself be safe).
pub fn robber_moves(
    g: &Graph,
    dm: &DistanceMatrix,
    cops: &[Vertex],
    robber: Vertex,
    rho: u16,
    psi: u16,
) -> VertexSet {
    debug_assert!(!capture_check(dm, cops, robber, rho));
    let n = g.vertex_count();
    let safe = |u: Vertex| cops.iter().all(|&c| dm.dist(c, u) > rho);
    let mut reach = VertexSet::new(n);
    reach.insert(robber);
    let mut frontier = vec![robber];
    for _ in 0..psi {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if !reach.contains(w) && safe(w) {
                    reach.insert(w);
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    reach
}

fn fault(side: Side, stage: usize, reason: impl Into<String>) -> Error {
    Error::StrategyFault {
        side: match side {
            Side::Cops => "cops",
            Side::Robber => "robber",
        },
        stage,
        reason: reason.into(),
    }
}

/// Runs a match for `horizon` stages and adjudicates the finite-horizon
/// verdict. The ω-condition "eventually always outside B_R(v)" is
/// approximated by a trailing-window check; exact adjudication lives in the
/// solver.
pub fn play_match(
    g: &Graph,
    dm: &DistanceMatrix,
    params: &GameParams,
    cop_strategy: &mut dyn Strategy,
    robber_strategy: &mut dyn Strategy,
    horizon: usize,
) -> Result<Trace> {
    params.validate(g)?;
    if horizon < 1 {
        return Err(Error::invalid("horizon must be ≥ 1"));
    }
    if cop_strategy.side() != Side::Cops || robber_strategy.side() != Side::Robber {
        return Err(Error::invalid("strategy sides do not match their roles"));
    }
    let ctx = MatchCtx {
        graph: g,
        dm,
        params,
    };
    let mut states = vec![GameState {
        cops: Vec::new(),
        robber: None,
        phase: Phase::CopPlacement,
        stage: 0,
    }];

    // Placement: cops first, robber with full knowledge.
    let cops = match cop_strategy.place(&ctx, &states)? {
        Action::Cops(c) => c,
        Action::Robber(_) => return Err(fault(Side::Cops, 0, "emitted a robber action")),
    };
    validate_cop_positions(g, params, &cops, None, dm).map_err(|e| fault(Side::Cops, 0, e))?;
    states.push(GameState {
        cops: cops.clone(),
        robber: None,
        phase: Phase::RobberPlacement,
        stage: 0,
    });
    let robber = match robber_strategy.place(&ctx, &states)? {
        Action::Robber(r) => r,
        Action::Cops(_) => return Err(fault(Side::Robber, 0, "emitted a cops action")),
    };
    if robber >= g.vertex_count() {
        return Err(fault(Side::Robber, 0, format!("vertex {robber} out of range")));
    }
    states.push(GameState {
        cops: cops.clone(),
        robber: Some(robber),
        phase: Phase::CopTurn,
        stage: 0,
    });

    let mut cur_cops = cops;
    let mut cur_robber = robber;
    let mut verdict = None;
    for stage in 1..=horizon {
        let moved = match cop_strategy.act(&ctx, &states)? {
            Action::Cops(c) => c,
            Action::Robber(_) => return Err(fault(Side::Cops, stage, "emitted a robber action")),
        };
        validate_cop_positions(g, params, &moved, Some(&cur_cops), dm)
            .map_err(|e| fault(Side::Cops, stage, e))?;
        cur_cops = moved;
        if capture_check(dm, &cur_cops, cur_robber, params.rho) {
            states.push(GameState {
                cops: cur_cops.clone(),
                robber: Some(cur_robber),
                phase: Phase::Captured,
                stage,
            });
            verdict = Some(Verdict::Captured { stage });
            break;
        }
        states.push(GameState {
            cops: cur_cops.clone(),
            robber: Some(cur_robber),
            phase: Phase::RobberTurn,
            stage,
        });

        let target = match robber_strategy.act(&ctx, &states)? {
            Action::Robber(r) => r,
            Action::Cops(_) => return Err(fault(Side::Robber, stage, "emitted a cops action")),
        };
        let legal = robber_moves(g, dm, &cur_cops, cur_robber, params.rho, params.psi);
        if !legal.contains(target) {
            return Err(fault(
                Side::Robber,
                stage,
                format!("vertex {target} unreachable within ψ through safe vertices"),
            ));
        }
        cur_robber = target;
        states.push(GameState {
            cops: cur_cops.clone(),
            robber: Some(cur_robber),
            phase: Phase::CopTurn,
            stage,
        });
    }

    let verdict = verdict.unwrap_or_else(|| {
        // Robber positions at stage ends: stage 0 = placement.
        let ends: Vec<(usize, Vertex)> = states
            .iter()
            .filter(|s| s.phase == Phase::CopTurn)
            .map(|s| (s.stage, s.robber.expect("robber placed")))
            .collect();
        let outside = |r: Vertex| dm.dist(params.v, r) > params.big_r;
        let mut first_outside = None;
        for &(stage, r) in ends.iter().rev() {
            if outside(r) {
                first_outside = Some(stage);
            } else {
                break;
            }
        }
        match first_outside {
            Some(n) => Verdict::ExpelledHorizon { first_outside: n },
            None => Verdict::SurvivedHorizon {
                ball_visits: ends.iter().filter(|&&(_, r)| !outside(r)).count(),
            },
        }
    });

    Ok(Trace {
        params: *params,
        states,
        verdict,
    })
}

fn validate_cop_positions(
    g: &Graph,
    params: &GameParams,
    cops: &[Vertex],
    previous: Option<&[Vertex]>,
    dm: &DistanceMatrix,
) -> std::result::Result<(), String> {
    if cops.len() != params.n {
        return Err(format!("expected {} cops, got {}", params.n, cops.len()));
    }
    for &c in cops {
        if c >= g.vertex_count() {
            return Err(format!("cop vertex {c} out of range"));
        }
    }
    if let Some(prev) = previous {
        for (i, (&old, &new)) in prev.iter().zip(cops).enumerate() {
            if dm.dist(old, new) > params.sigma {
                return Err(format!(
                    "cop {i} moved {} > σ={} (from {old} to {new})",
                    dm.dist(old, new),
                    params.sigma
                ));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Replay and serialization
// ---------------------------------------------------------------------------

/// Replays the recorded moves of a trace through the engine, reproducing the
/// verdict (or failing if the trace was tampered with).
pub fn replay(g: &Graph, dm: &DistanceMatrix, trace: &Trace) -> Result<Trace> {
    let cop_moves: Vec<Vec<Vertex>> = trace
        .states
        .iter()
        .filter(|s| {
            matches!(
                s.phase,
                Phase::RobberPlacement | Phase::RobberTurn | Phase::Captured
            )
        })
        .map(|s| s.cops.clone())
        .collect();
    let robber_moves: Vec<Vertex> = trace
        .states
        .iter()
        .filter(|s| s.phase == Phase::CopTurn)
        .map(|s| s.robber.expect("robber placed"))
        .collect();
    let horizon = trace
        .states
        .iter()
        .map(|s| s.stage)
        .max()
        .unwrap_or(1)
        .max(1);
    let mut cops = Scripted {
        side: Side::Cops,
        cop_moves,
        robber_moves: Vec::new(),
        at: 0,
    };
    let mut robber = Scripted {
        side: Side::Robber,
        cop_moves: Vec::new(),
        robber_moves,
        at: 0,
    };
    play_match(g, dm, &trace.params, &mut cops, &mut robber, horizon)
}

struct Scripted {
    side: Side,
    cop_moves: Vec<Vec<Vertex>>,
    robber_moves: Vec<Vertex>,
    at: usize,
}

impl Scripted {
    fn next(&mut self) -> Result<Action> {
        let action = match self.side {
            Side::Cops => Action::Cops(
                self.cop_moves
                    .get(self.at)
                    .ok_or_else(|| Error::invalid("trace exhausted (cops)"))?
                    .clone(),
            ),
            Side::Robber => Action::Robber(
                *self
                    .robber_moves
                    .get(self.at)
                    .ok_or_else(|| Error::invalid("trace exhausted (robber)"))?,
            ),
        };
        self.at += 1;
        Ok(action)
    }
}

impl Strategy for Scripted {
    fn side(&self) -> Side {
        self.side
    }
    fn place(&mut self, _: &MatchCtx, _: &[GameState]) -> Result<Action> {
        self.next()
    }
    fn act(&mut self, _: &MatchCtx, _: &[GameState]) -> Result<Action> {
        self.next()
    }
}

impl Trace {
    /// One JSON object per line: params header, each state, verdict footer.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        out.push_str(
            &serde_json::to_string(&serde_json::json!({ "params": self.params })).unwrap(),
        );
        out.push('\n');
        for s in &self.states {
            out.push_str(&serde_json::to_string(s).unwrap());
            out.push('\n');
        }
        out.push_str(
            &serde_json::to_string(&serde_json::json!({ "verdict": self.verdict })).unwrap(),
        );
        out.push('\n');
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trace> {
        let bad = |msg: String| Error::invalid(format!("trace parse error: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: serde_json::Value = serde_json::from_str(
            lines.next().ok_or_else(|| bad("empty trace".into()))?,
        )
        .map_err(|e| bad(e.to_string()))?;
        let params: GameParams =
            serde_json::from_value(header.get("params").cloned().ok_or_else(|| {
                bad("missing params header".into())
            })?)
            .map_err(|e| bad(e.to_string()))?;
        let mut states = Vec::new();
        let mut verdict = None;
        for line in lines {
            let value: serde_json::Value =
                serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            if let Some(v) = value.get("verdict") {
                verdict =
                    Some(serde_json::from_value(v.clone()).map_err(|e| bad(e.to_string()))?);
            } else {
                states.push(serde_json::from_value(value).map_err(|e| bad(e.to_string()))?);
            }
        }
        Ok(Trace {
            params,
            states,
            verdict: verdict.ok_or_else(|| bad("missing verdict footer".into()))?,
        })
    }
}
