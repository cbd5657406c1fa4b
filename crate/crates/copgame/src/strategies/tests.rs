use super::*;
use crate::constructions::{self, path_graph, ProductKind};
use crate::engine::{play_match, Verdict};

fn params(n: usize, sigma: u16, rho: u16, psi: u16, v: Vertex, big_r: u16) -> GameParams {
    GameParams {
        n,
        sigma,
        rho,
        psi,
        v,
        big_r,
    }
}

/// Triangle (a, x₀, y₀) attached to b, with two rails of length `rail` off
/// x₀ and y₀. Returns (graph, a, b, f: {a,b}→Γ, g: Γ→{a,b}).
fn rail_triangle(rail: usize) -> (Graph, Vec<Vertex>, Vec<Vertex>) {
    // ids: b = 0, a = 1, x₀ = 2, y₀ = 3, rails after.
    let mut edges = vec![(0, 1), (1, 2), (1, 3), (2, 3)];
    let mut next = 4;
    for start in [2usize, 3] {
        let mut prev = start;
        for _ in 0..rail {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    let g = Graph::build(next, &edges).unwrap();
    // Δ is the edge a–b with a = 0, b = 1 there; f(a) = 1, f(b) = 0.
    let f = vec![1, 0];
    let mut gm = vec![1; next]; // everything collapses to b (Δ vertex 1)…
    gm[1] = 0; // …except g(a) = a (Δ vertex 0)
    let g_map = gm;
    (g, f, g_map)
}

#[test]
fn qr_identity_is_one_zero() {
    let g = path_graph(6).unwrap();
    let id: Vec<Vertex> = (0..6).collect();
    let qr = verify_quasi_retraction(&g, &g, &id, &id).unwrap();
    assert_eq!((qr.c, qr.d), (1, 0));
}

#[test]
fn qr_rail_triangle_is_one_zero() {
    let (gamma, f, g_map) = rail_triangle(4);
    let delta = path_graph(2).unwrap(); // a = 0 – b = 1
    let qr = verify_quasi_retraction(&gamma, &delta, &f, &g_map).unwrap();
    assert_eq!((qr.c, qr.d), (1, 0));
}

#[test]
fn qr_product_inclusion_projection_is_one_zero() {
    let a = path_graph(4).unwrap();
    let b = constructions::cycle_graph(3).unwrap();
    for kind in [ProductKind::Cartesian, ProductKind::Strong] {
        let (prod, maps) = constructions::product(&a, &b, kind, Some(0)).unwrap();
        let qr = verify_quasi_retraction(&prod, &a, &maps.inclusion, &maps.projection).unwrap();
        assert_eq!((qr.c, qr.d), (1, 0), "{kind:?}");
    }
}

#[test]
fn qr_copy_embedding_and_shadow_is_one_zero() {
    let base = path_graph(5).unwrap();
    let (theta, ann) = theta_extension(&base, 2, 2).unwrap();
    for k in 0..2 {
        let qr = verify_quasi_retraction(&theta, &base, &ann.copies[k], &ann.shadow).unwrap();
        assert_eq!((qr.c, qr.d), (1, 0), "copy {k}");
    }
}

#[test]
fn qr_rejects_bad_maps() {
    let g = path_graph(3).unwrap();
    assert!(matches!(
        verify_quasi_retraction(&g, &g, &[0, 1], &[0, 1, 2]),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn shadow_of_any_vertex_is_a_base_vertex_on_its_bridge() {
    let base = path_graph(5).unwrap();
    let (_, ann) = theta_extension(&base, 0, 3).unwrap();
    for (&(_, _, x), path) in &ann.bridge_index {
        for &p in path {
            assert_eq!(ann.shadow[p], x);
        }
    }
}

#[test]
fn greedy_captures_stationary_robber_on_a_path() {
    let g = path_graph(9).unwrap();
    let dm = g.distance_matrix();
    let p = params(1, 1, 0, 1, 4, 8);
    let mut cops = GreedyPursuitCops;
    let mut robber = Stationary::new(Side::Robber);
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 50).unwrap();
    assert!(matches!(trace.verdict, Verdict::Captured { .. }));
}

#[test]
fn optimal_cop_beats_optimal_robber_on_copwin_instance() {
    // Two cops on C₆ classically win.
    let g = constructions::cycle_graph(6).unwrap();
    let dm = g.distance_matrix();
    let p = params(2, 1, 0, 1, 0, 3);
    let mut cops = OptimalStrategy::new(Side::Cops, &g, &dm, &p).unwrap();
    let mut robber = OptimalStrategy::new(Side::Robber, &g, &dm, &p).unwrap();
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 100).unwrap();
    assert!(matches!(trace.verdict, Verdict::Captured { .. }), "{:?}", trace.verdict);
}

#[test]
fn optimal_robber_survives_robberwin_instance() {
    // One cop on C₆ classically loses.
    let g = constructions::cycle_graph(6).unwrap();
    let dm = g.distance_matrix();
    let p = params(1, 1, 0, 1, 0, 3);
    let mut cops = OptimalStrategy::new(Side::Cops, &g, &dm, &p).unwrap();
    let mut robber = OptimalStrategy::new(Side::Robber, &g, &dm, &p).unwrap();
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 100).unwrap();
    assert!(matches!(trace.verdict, Verdict::SurvivedHorizon { ball_visits } if ball_visits > 0));
}

#[test]
fn slim_chase_reach_matches_expected_values() {
    assert_eq!(slim_chase_reach(0, 1), 2); // trees, classical speed
    assert_eq!(slim_chase_reach(1, 4), 8); // δ = 1, ψ = 4 → 1·2 + 1 + 4 + 1
}

#[test]
fn hyperbolic_cop_wins_on_a_path_with_invariants() {
    // P₁₅ is 0-slim; σ = 1, ρ = slim_chase_reach(0, ψ).
    let g = path_graph(15).unwrap();
    let dm = g.distance_matrix();
    let psi = 1;
    let p = params(1, 1, slim_chase_reach(0, psi), psi, 7, 14);
    let mut cop = hyperbolic_cop_strategy(0);
    let mut robber = OptimalStrategy::new(Side::Robber, &g, &dm, &p).unwrap();
    let trace = play_match(&g, &dm, &p, &mut cop, &mut robber, 200).unwrap();
    assert!(matches!(
        trace.verdict,
        Verdict::Captured { .. } | Verdict::ExpelledHorizon { .. }
    ));
    // Per-stage invariants: the cop stays on a geodesic from v to the
    // robber's previous position and its distance from v strictly grows.
    let mut last_d = None;
    let mut prev_robber = None;
    for st in &trace.states {
        if st.phase == Phase::RobberTurn || st.phase == Phase::Captured {
            let c = st.cops[0];
            let d = dm.dist(p.v, c);
            if let Some(r) = prev_robber {
                assert_eq!(
                    dm.dist(p.v, c) + dm.dist(c, r),
                    dm.dist(p.v, r),
                    "cop off the geodesic"
                );
            }
            if let Some(prev) = last_d {
                assert!(d > prev, "distance from v did not strictly increase");
            }
            last_d = Some(d);
        }
        if st.phase == Phase::CopTurn {
            prev_robber = st.robber;
        }
    }
}

#[test]
fn grid_robber_stays_put_against_distant_stationary_cop() {
    let (g, p) = grid_fixture();
    let dm = g.distance_matrix();
    let mut robber = grid_robber_strategy(&g, &p).unwrap();
    let mut cops = Stationary::new(Side::Cops);
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 40).unwrap();
    assert!(matches!(trace.verdict, Verdict::SurvivedHorizon { .. }));
    // With the lone cop parked on its square's boundary column, the robber
    // may relocate once, then never moves again.
    let ends: Vec<Vertex> = trace
        .states
        .iter()
        .filter(|s| s.phase == Phase::CopTurn)
        .map(|s| s.robber.unwrap())
        .collect();
    assert!(ends.windows(2).filter(|w| w[0] != w[1]).count() <= 1);
}

fn grid_fixture() -> (Graph, GameParams) {
    // n = 1, σ = 1, ρ = 1 → s = 4; rectangle 24 × 8 around v.
    let g = constructions::grid_patch(30, 12).unwrap();
    let v = 6 * 30 + 15; // (15, 6)
    (g, params(1, 1, 1, 64, v, 32))
}

#[test]
fn grid_robber_survives_greedy_cop() {
    let (g, p) = grid_fixture();
    let dm = g.distance_matrix();
    let mut robber = grid_robber_strategy(&g, &p).unwrap();
    let mut cops = GreedyPursuitCops;
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 100).unwrap();
    assert!(
        matches!(trace.verdict, Verdict::SurvivedHorizon { .. }),
        "{:?}",
        trace.verdict
    );
}

#[test]
fn grid_robber_rejects_small_speed() {
    let g = constructions::grid_patch(30, 12).unwrap();
    let p = params(1, 1, 1, 8, 6 * 30 + 15, 32);
    assert!(matches!(grid_robber_strategy(&g, &p), Err(Error::InvalidInput(_))));
}

#[test]
fn grid_robber_rejects_small_patch() {
    let g = constructions::grid_patch(10, 10).unwrap();
    let p = params(1, 1, 1, 64, 55, 32);
    assert!(matches!(
        grid_robber_strategy(&g, &p),
        Err(Error::InsufficientPatch(_))
    ));
}

#[test]
fn theta_robber_preconditions() {
    let (_, ann) = theta_nm(2, 5).unwrap();
    // ψ = 8 > σ + 2, m = 5 > 2(σ+ρ) = 4, 2ρ = 2 < 5 − 2·1·⌈7/8⌉ = 3.
    assert!(theta_robber_strategy(&ann, &params(1, 1, 1, 8, 0, 5)).is_ok());
    // ψ = 4 fails the escape-count inequality: 5 − 2·⌈7/4⌉ = 1 ≤ 2 = 2ρ.
    let err = theta_robber_strategy(&ann, &params(1, 1, 1, 4, 0, 5))
        .map(|_| ())
        .unwrap_err();
    assert!(err.to_string().contains("ρ < m/2"), "{err}");
    // Too many cops for the bridge count.
    assert!(theta_robber_strategy(&ann, &params(2, 1, 1, 8, 0, 5)).is_err());
}

#[test]
fn theta_robber_survives_greedy_cop() {
    let (g, ann) = theta_nm(2, 5).unwrap();
    let dm = g.distance_matrix();
    let p = params(1, 1, 1, 8, 0, g.diameter(&dm));
    let mut robber = theta_robber_strategy(&ann, &p).unwrap();
    let mut cops = GreedyPursuitCops;
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 200).unwrap();
    assert!(
        matches!(trace.verdict, Verdict::SurvivedHorizon { .. }),
        "{:?}",
        trace.verdict
    );
}

#[test]
fn safe_point_robber_survives_greedy_cop_on_grid() {
    let g = constructions::grid_patch(15, 15).unwrap();
    let dm = g.distance_matrix();
    let p = params(1, 1, 0, 20, 7 * 15 + 7, 14);
    let mut robber = safe_point_robber_strategy(&g, &dm, &p, 2, 2).unwrap();
    let mut cops = GreedyPursuitCops;
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 100).unwrap();
    assert!(
        matches!(trace.verdict, Verdict::SurvivedHorizon { .. }),
        "{:?}",
        trace.verdict
    );
}

#[test]
fn safe_point_construction_needs_enough_room() {
    let g = constructions::grid_patch(6, 6).unwrap();
    let dm = g.distance_matrix();
    let p = params(2, 1, 0, 20, 14, 5);
    assert!(matches!(
        safe_point_robber_strategy(&g, &dm, &p, 5, 3),
        Err(Error::InsufficientPatch(_))
    ));
    assert!(matches!(
        safe_point_robber_strategy(&g, &dm, &p, 1, 2),
        Err(Error::InvalidInput(_)) // count < n + 1
    ));
}

#[test]
fn transfer_parameter_inversion() {
    // C = 1, D = 0: σ_Δ = σ, ρ_Δ = ρ + 2.
    let qr = QuasiRetraction {
        f: vec![0, 1],
        g: vec![0, 1],
        c: 1,
        d: 0,
    };
    let gp = transfer_gamma_params(&qr, &params(1, 1, 3, 4, 0, 5)).unwrap();
    assert_eq!((gp.sigma, gp.rho, gp.psi, gp.big_r), (1, 1, 4, 5));
    // C = 2, D = 1: σ = 1, ρ = 1 ⇒ σ_Δ = 3, ρ_Δ = 2 + 4 + 2 + 2 + 2 = 12.
    let qr2 = QuasiRetraction {
        f: vec![0, 1],
        g: vec![0, 1],
        c: 2,
        d: 1,
    };
    let gp2 = transfer_gamma_params(&qr2, &params(1, 3, 12, 6, 0, 5)).unwrap();
    assert_eq!((gp2.sigma, gp2.rho, gp2.psi, gp2.big_r), (1, 1, 18, 11));
    // Non-integral inversion is refused.
    assert!(transfer_gamma_params(&qr2, &params(1, 4, 12, 6, 0, 5)).is_err());
    assert!(transfer_gamma_params(&qr2, &params(1, 3, 13, 6, 0, 5)).is_err());
}

#[test]
fn transfer_cop_wins_on_rail_triangle_quotient() {
    // One cop wins on Γ (rail triangle, greedy suffices against a robber
    // capped by reach); transfer its play to Δ = K₂ via the (1,0) retraction.
    let (gamma, f, g_map) = rail_triangle(4);
    let delta = path_graph(2).unwrap();
    let dm = delta.distance_matrix();
    let qr = verify_quasi_retraction(&gamma, &delta, &f, &g_map).unwrap();
    let p_delta = params(1, 1, 3, 1, 0, 1); // ρ_Δ = Cρ + C² + CD + 2D + C = ρ + 2
    let inner: Box<dyn Strategy> = Box::new(GreedyPursuitCops);
    let mut cop = transfer_cop_strategy(qr, gamma, inner, &p_delta).unwrap();
    let mut robber = Stationary::new(Side::Robber);
    let trace = play_match(&delta, &dm, &p_delta, &mut cop, &mut robber, 20).unwrap();
    assert!(matches!(trace.verdict, Verdict::Captured { .. }));
}

#[test]
fn lifted_cops_capture_on_bridge_extension() {
    // Greedy single cop wins on P₃ with reach 1; its lift with 2 cops wins
    // on Θ₂(P₃) with the same parameters.
    let base = path_graph(3).unwrap();
    let (theta, ann) = theta_extension(&base, 1, 2).unwrap();
    let dm = theta.distance_matrix();
    let p = params(2, 1, 1, 2, ann.copies[0][1], 6);
    let inner: Box<dyn Strategy> = Box::new(GreedyPursuitCops);
    let mut cops = lift_cop_strategy_theta(base, ann, 2, inner, &p).unwrap();
    let mut robber = RandomStrategy::new(Side::Robber, 7);
    let trace = play_match(&theta, &dm, &p, &mut cops, &mut robber, 200).unwrap();
    assert!(
        matches!(trace.verdict, Verdict::Captured { .. }),
        "{:?}",
        trace.verdict
    );
}

#[test]
fn recovery_roundtrips_generated_graphs() {
    let (g, ann) = theta_nm(3, 5).unwrap();
    let rec = recover_theta_nm(&g).unwrap();
    assert_eq!((rec.n, rec.m), (ann.n, ann.m));
    assert_eq!(rec.bridges, ann.bridges);

    let base = path_graph(4).unwrap();
    let (theta, ann2) = theta_extension(&base, 0, 3).unwrap();
    let (base2, rec2, copies) = recover_theta_extension(&theta).unwrap();
    assert_eq!(copies, 3);
    assert_eq!(base2.edges(), base.edges());
    assert_eq!(rec2.bridge_index, ann2.bridge_index);
}

#[test]
fn parse_strategy_accepts_grammar() {
    let g = path_graph(5).unwrap();
    let dm = g.distance_matrix();
    let p = params(1, 1, 0, 1, 2, 4);
    for spec in ["greedy", "random", "stationary", "optimal", "optimal:from=solver"] {
        assert!(parse_strategy(spec, Side::Cops, &g, &dm, &p, 1).is_ok(), "{spec}");
    }
    assert!(parse_strategy("hyperbolic:delta=1", Side::Cops, &g, &dm, &p, 1).is_ok());
    assert!(parse_strategy("random", Side::Robber, &g, &dm, &p, 1).is_ok());
    // Side mismatches and unknown names are refused.
    assert!(parse_strategy("greedy", Side::Robber, &g, &dm, &p, 1).is_err());
    assert!(parse_strategy("grid_robber", Side::Cops, &g, &dm, &p, 1).is_err());
    assert!(parse_strategy("nonsense", Side::Cops, &g, &dm, &p, 1).is_err());
    assert!(parse_strategy("hyperbolic:delta=x", Side::Cops, &g, &dm, &p, 1).is_err());
}

#[test]
fn parse_strategy_theta_robber_from_annotations() {
    let (g, _) = theta_nm(2, 5).unwrap();
    let dm = g.distance_matrix();
    let p = params(1, 1, 1, 8, 0, g.diameter(&dm));
    assert!(parse_strategy("theta_robber", Side::Robber, &g, &dm, &p, 1).is_ok());
    // A plain path has no prism annotations.
    let path = path_graph(5).unwrap();
    let pdm = path.distance_matrix();
    assert!(parse_strategy("theta_robber", Side::Robber, &path, &pdm, &p, 1).is_err());
}

#[test]
fn parse_strategy_transfer_from_file() {
    let (gamma, f, g_map) = rail_triangle(3);
    let delta = path_graph(2).unwrap();
    let dm = delta.distance_matrix();
    let file = serde_json::json!({
        "gamma": serde_json::from_str::<serde_json::Value>(&crate::io::graph_to_json(&gamma)).unwrap(),
        "f": f,
        "g": g_map,
        "C": 1,
        "D": 0,
    });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qr.json");
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let spec = format!("transfer:qr={},inner=greedy", path.display());
    let p = params(1, 1, 3, 1, 0, 1);
    let mut cop = parse_strategy(&spec, Side::Cops, &delta, &dm, &p, 1).unwrap();
    let mut robber = Stationary::new(Side::Robber);
    let trace = play_match(&delta, &dm, &p, cop.as_mut(), &mut robber, 20).unwrap();
    assert!(matches!(trace.verdict, Verdict::Captured { .. }));
}

#[test]
fn parse_strategy_lift_from_annotations() {
    let base = path_graph(3).unwrap();
    let (theta, ann) = theta_extension(&base, 1, 2).unwrap();
    let dm = theta.distance_matrix();
    let p = params(2, 1, 1, 2, ann.copies[0][1], 6);
    let mut cops =
        parse_strategy("lift_theta:n=2,inner=greedy", Side::Cops, &theta, &dm, &p, 1).unwrap();
    let mut robber = RandomStrategy::new(Side::Robber, 3);
    let trace = play_match(&theta, &dm, &p, cops.as_mut(), &mut robber, 200).unwrap();
    assert!(matches!(trace.verdict, Verdict::Captured { .. }));
    // Wrong copy count is refused.
    assert!(parse_strategy("lift_theta:n=3,inner=greedy", Side::Cops, &theta, &dm, &p, 1).is_err());
}

fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5)); // outer 5-cycle
        edges.push((i, i + 5)); // spokes
        edges.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
    }
    Graph::build(10, &edges).unwrap()
}

#[test]
fn solver_extracted_strategies_replay_cleanly() {
    // The extracted positional strategies must always emit engine-legal
    // moves; replay the full trace through the validator.
    let g = petersen();
    let dm = g.distance_matrix();
    let p = params(3, 1, 0, 1, 0, g.diameter(&dm));
    let mut cops = OptimalStrategy::new(Side::Cops, &g, &dm, &p).unwrap();
    let mut robber = OptimalStrategy::new(Side::Robber, &g, &dm, &p).unwrap();
    let trace = play_match(&g, &dm, &p, &mut cops, &mut robber, 60).unwrap();
    assert!(matches!(trace.verdict, Verdict::Captured { .. }));
    crate::engine::replay(&g, &dm, &trace).unwrap();
}
