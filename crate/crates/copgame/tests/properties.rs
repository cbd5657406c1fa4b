//! Randomized property tests for the engine, solver, and strategy layers.

use proptest::prelude::*;

use copgame::engine::{
    capture_check, play_match, robber_moves, GameParams, Phase, Side,
};
use copgame::graph::Graph;
use copgame::solver::decide_copwin;
use copgame::strategies::{
    verify_quasi_retraction, GreedyPursuitCops, RandomStrategy, Stationary,
};

/// A connected graph on 2..=max_n vertices: a random tree plus extra edges.
fn arb_connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v));
        }
        for u in 0..n {
            for w in u + 1..n {
                if rng.gen_bool(0.15) {
                    edges.push((u, w));
                }
            }
        }
        Graph::build(n, &edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Geodesics are shortest paths made of edges.
    #[test]
    fn geodesics_are_shortest_edge_paths(g in arb_connected_graph(12), pick in any::<(u8, u8)>()) {
        let n = g.vertex_count();
        let (u, v) = (pick.0 as usize % n, pick.1 as usize % n);
        let dm = g.distance_matrix();
        let path = g.geodesic(&dm, u, v).unwrap();
        prop_assert_eq!(path.len(), dm.dist(u, v) as usize + 1);
        prop_assert_eq!(*path.first().unwrap(), u);
        prop_assert_eq!(*path.last().unwrap(), v);
        for w in path.windows(2) {
            prop_assert!(g.has_edge(w[0], w[1]));
        }
    }

    /// Every vertex offered to the robber is reachable within ψ and safe.
    #[test]
    fn robber_moves_are_safe_and_within_speed(
        g in arb_connected_graph(10),
        raw in any::<(u8, u8, u8, u8)>(),
    ) {
        let n = g.vertex_count();
        let dm = g.distance_matrix();
        let cop = raw.0 as usize % n;
        let rho = (raw.1 % 2) as u16;
        let psi = (1 + raw.2 % 3) as u16;
        let robber = match (0..n).find(|&r| dm.dist(cop, r) > rho) {
            Some(r) => r,
            None => return Ok(()), // cop dominates the whole graph
        };
        let moves = robber_moves(&g, &dm, &[cop], robber, rho, psi);
        prop_assert!(moves.contains(robber));
        for m in moves.iter() {
            prop_assert!(dm.dist(cop, m) > rho, "offered vertex within reach");
            prop_assert!(dm.dist(robber, m) <= psi, "offered vertex too far");
        }
        let _ = raw.3;
    }

    /// Matches between baseline strategies always produce traces that replay
    /// cleanly, and identical seeds give identical traces.
    #[test]
    fn traces_replay_and_are_deterministic(
        g in arb_connected_graph(8),
        raw in any::<(u8, u64)>(),
    ) {
        let dm = g.distance_matrix();
        let params = GameParams {
            n: 1 + (raw.0 as usize) % 2,
            sigma: 1,
            rho: 0,
            psi: 1,
            v: 0,
            big_r: g.diameter(&dm),
        };
        let run = || {
            let mut cops = GreedyPursuitCops;
            let mut robber = RandomStrategy::new(Side::Robber, raw.1);
            play_match(&g, &dm, &params, &mut cops, &mut robber, 20).unwrap()
        };
        let t1 = run();
        let t2 = run();
        prop_assert_eq!(t1.to_jsonl(), t2.to_jsonl());
        let replayed = copgame::engine::replay(&g, &dm, &t1).unwrap();
        prop_assert_eq!(replayed.verdict, t1.verdict);
    }

    /// Capture states recorded by the engine actually satisfy the capture
    /// predicate against the robber's pre-move position.
    #[test]
    fn captured_states_satisfy_capture_predicate(
        g in arb_connected_graph(8),
        seed in any::<u64>(),
    ) {
        let dm = g.distance_matrix();
        let params = GameParams {
            n: 2,
            sigma: 1,
            rho: 0,
            psi: 1,
            v: 0,
            big_r: g.diameter(&dm),
        };
        let mut cops = GreedyPursuitCops;
        let mut robber = RandomStrategy::new(Side::Robber, seed);
        let trace = play_match(&g, &dm, &params, &mut cops, &mut robber, 30).unwrap();
        let mut prev_robber = None;
        for st in &trace.states {
            if st.phase == Phase::Captured {
                let r = prev_robber.expect("capture after at least one robber state");
                prop_assert!(capture_check(&dm, &st.cops, r, params.rho));
            }
            if st.robber.is_some() {
                prev_robber = st.robber;
            }
        }
    }

    /// Identity maps are always a (1,0) quasi-retraction.
    #[test]
    fn identity_is_a_one_zero_quasi_retraction(g in arb_connected_graph(10)) {
        let id: Vec<usize> = (0..g.vertex_count()).collect();
        let qr = verify_quasi_retraction(&g, &g, &id, &id).unwrap();
        prop_assert_eq!((qr.c, qr.d), (1, 0));
    }

    /// Shifting the protected vertex from v to u while growing the horizon
    /// radius by dist(u, v) can only help the cops.
    #[test]
    fn protected_vertex_shift_lemma(
        g in arb_connected_graph(7),
        raw in any::<(u8, u8, u8)>(),
    ) {
        let nv = g.vertex_count();
        let dm = g.distance_matrix();
        let (u, v) = (raw.0 as usize % nv, raw.1 as usize % nv);
        let big_r = (1 + raw.2 % 3) as u16;
        let shift = dm.dist(u, v);
        let at_v = GameParams { n: 1, sigma: 1, rho: 0, psi: 1, v, big_r: big_r + shift };
        let at_u = GameParams { n: 1, sigma: 1, rho: 0, psi: 1, v: u, big_r };
        let win_v = decide_copwin(&g, &dm, &at_v).unwrap().copwin;
        let win_u = decide_copwin(&g, &dm, &at_u).unwrap().copwin;
        prop_assert!(!win_v || win_u, "cop win at v with R+dist must imply cop win at u with R");
    }

    /// The stationary robber is never illegally placed: its placement is at
    /// maximal distance from the cops, hence outside reach whenever possible.
    #[test]
    fn stationary_robber_places_outside_reach(
        g in arb_connected_graph(9),
        raw in any::<u8>(),
    ) {
        let dm = g.distance_matrix();
        let params = GameParams {
            n: 1 + (raw as usize) % 2,
            sigma: 1,
            rho: 0,
            psi: 1,
            v: 0,
            big_r: g.diameter(&dm),
        };
        let mut cops = Stationary::new(Side::Cops);
        let mut robber = Stationary::new(Side::Robber);
        // Either a legal match plays out, or placement was impossible
        // because the cops dominate every vertex (reach 0 at v only).
        let result = play_match(&g, &dm, &params, &mut cops, &mut robber, 5);
        prop_assert!(result.is_ok() || g.vertex_count() == 1);
    }
}
