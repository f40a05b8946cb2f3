//! Property and oracle suites: each test checks the implementation against
//! an independently coded reference (BFS distances, exhaustive path
//! enumeration, exhaustive covers) on randomized instances.

mod common;

use std::collections::BTreeSet;
use std::collections::VecDeque;

use proptest::prelude::*;
use rand::Rng as _;

use common::{random_dag_mdp, random_digraph, random_set_cover, random_tree_mdp, rng, tree_path};
use optionplan::combinatorial::k_center::{asym_k_center, brute_force_k_center, KCenterInstance};
use optionplan::combinatorial::{
    betweenness_centrality, brute_force_set_cover, greedy_set_cover,
};
use optionplan::discovery::{
    a_mimo, a_momi, betweenness_options, optimal_momi, transition_digraph, DEFAULT_BUDGET,
};
use optionplan::distance::distance_matrix;
use optionplan::mdp::domains::{builtin, grid_domain};
use optionplan::mdp::grid::{build_grid_mdp, GridSpec};
use optionplan::mdp::normalize_multi_goal;
use optionplan::planner::{
    measure_l, point_option_model, solve_optimal, PointOption,
};

/// Independent BFS over the floor cells of a grid spec.
fn grid_bfs(spec: &GridSpec) -> Vec<Vec<Option<usize>>> {
    let mut dist = vec![vec![None; spec.width]; spec.height];
    dist[spec.goal.0][spec.goal.1] = Some(0);
    let mut queue = VecDeque::from([spec.goal]);
    while let Some((r, c)) = queue.pop_front() {
        let d = dist[r][c].unwrap();
        let push = |nr: usize, nc: usize, dist: &mut Vec<Vec<Option<usize>>>,
                        queue: &mut VecDeque<(usize, usize)>| {
            if !spec.walls.contains(&(nr, nc)) && dist[nr][nc].is_none() {
                dist[nr][nc] = Some(d + 1);
                queue.push_back((nr, nc));
            }
        };
        if r > 0 {
            push(r - 1, c, &mut dist, &mut queue);
        }
        if r + 1 < spec.height {
            push(r + 1, c, &mut dist, &mut queue);
        }
        if c > 0 {
            push(r, c - 1, &mut dist, &mut queue);
        }
        if c + 1 < spec.width {
            push(r, c + 1, &mut dist, &mut queue);
        }
    }
    dist
}

#[test]
fn open_grid_longest_path_is_sixteen() {
    let spec = GridSpec::open(9, 9);
    let bfs = grid_bfs(&spec);
    let longest = bfs
        .iter()
        .flatten()
        .filter_map(|d| *d)
        .max()
        .unwrap();
    assert_eq!(longest, 16);
    let (mdp, _) = build_grid_mdp(&spec).unwrap();
    assert_eq!(mdp.n_states(), 81);
    assert_eq!(measure_l(&mdp, &[], 1e-6).unwrap(), 16);
}

#[test]
fn grid_values_decrease_with_goal_distance() {
    let dom = builtin("grid9", None).unwrap();
    let spec = GridSpec::open(9, 9);
    let bfs = grid_bfs(&spec);
    let layout = dom.layout.as_ref().unwrap();
    let vstar = solve_optimal(&dom.mdp, 0.0).unwrap();
    for s in 0..dom.mdp.n_states() {
        if s == dom.mdp.goal() {
            continue;
        }
        let (r, c) = layout.cell_of_state[s];
        let d = bfs[r][c].unwrap();
        let expected = dom.mdp.gamma().powi(d as i32 - 1);
        assert!(
            (vstar.values[s] - expected).abs() < 1e-12,
            "V*({s}) = {} but BFS distance {d}",
            vstar.values[s]
        );
    }
}

#[test]
fn goal_only_grid_l_is_one_for_any_epsilon() {
    let (mdp, _) = build_grid_mdp(&GridSpec::open(1, 1)).unwrap();
    for eps in [0.0, 1e-9, 1e-6, 1e-2] {
        assert_eq!(measure_l(&mdp, &[], eps).unwrap(), 1);
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn tree_distance_matrix_matches_hop_oracle() {
    let mut r = rng(0x5eed_0001);
    for _ in 0..40 {
        let mdp = random_tree_mdp(&mut r, 10);
        let dm = distance_matrix(&mdp, 0.0).unwrap();
        let n = mdp.n_states();
        let no_opt: Vec<usize> = (0..n)
            .map(|s| if s == mdp.goal() { 1 } else { tree_path(&mdp, s).len() })
            .collect();
        for s in 0..n {
            let path = tree_path(&mdp, s);
            for t in 0..n {
                let hops = if s == t {
                    Some(0)
                } else {
                    path.iter().position(|&x| x == t).map(|i| i + 1)
                };
                let expected = match hops {
                    Some(h) => h.min(no_opt[s] - 1),
                    None => no_opt[s] - 1,
                };
                assert_eq!(
                    dm.d[s][t], expected,
                    "d({s}, {t}) mismatch on tree MDP with {n} states"
                );
            }
        }
        assert_eq!(dm.no_option, no_opt);
    }
}

#[test]
fn deterministic_distance_satisfies_triangle_inequality() {
    let mut r = rng(0x5eed_0002);
    for _ in 0..30 {
        let mdp = random_dag_mdp(&mut r, 9);
        let dm = distance_matrix(&mdp, 0.0).unwrap();
        let n = mdp.n_states();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    assert!(
                        dm.d[a][c] <= dm.d[a][b] + dm.d[b][c],
                        "triangle violated: d({a},{c}) > d({a},{b}) + d({b},{c})"
                    );
                }
            }
        }
    }
}

#[test]
fn adding_options_never_slows_convergence() {
    let mut r = rng(0x5eed_0003);
    for _ in 0..60 {
        let mdp = random_dag_mdp(&mut r, 10);
        let vstar = solve_optimal(&mdp, 0.0).unwrap();
        let candidates: Vec<usize> = (0..mdp.n_states() - 1).collect();
        let mut options: Vec<PointOption> = Vec::new();
        let mut last = measure_l(&mdp, &options, 0.0).unwrap();
        for &init in candidates.iter().take(4) {
            options.push(point_option_model(&mdp, &vstar, init, mdp.goal()).unwrap());
            let l = measure_l(&mdp, &options, 0.0).unwrap();
            assert!(l <= last, "L grew from {last} to {l} after adding an option");
            last = l;
        }
    }
}

#[test]
fn option_free_l_equals_longest_optimal_path_on_trees() {
    let mut r = rng(0x5eed_0004);
    for _ in 0..40 {
        let mdp = random_tree_mdp(&mut r, 12);
        let longest = (0..mdp.n_states() - 1)
            .map(|s| tree_path(&mdp, s).len())
            .max()
            .unwrap();
        assert_eq!(measure_l(&mdp, &[], 0.0).unwrap(), longest);
    }
}

#[test]
fn normalize_single_absorbing_goal_keeps_l() {
    for name in ["fig3", "fig6", "grid9"] {
        let dom = builtin(name, None).unwrap();
        let l0 = measure_l(&dom.mdp, &[], 1e-6).unwrap();
        let norm = normalize_multi_goal(&dom.mdp, &[dom.mdp.goal()]).unwrap();
        assert!(norm.validate().ok);
        let l1 = measure_l(&norm, &[], 1e-6).unwrap();
        assert_eq!(l0, l1, "normalizing {name} changed L");
    }
}

#[test]
fn normalize_two_goal_grid() {
    let dom = builtin("grid9", None).unwrap();
    // Treat an arbitrary second state as a goal as well.
    let goals = [dom.mdp.goal(), 17];
    let norm = normalize_multi_goal(&dom.mdp, &goals).unwrap();
    assert_eq!(norm.n_states(), dom.mdp.n_states() + 1);
    assert!(norm.validate().ok);
}

#[test]
fn greedy_cover_within_harmonic_factor_of_optimum() {
    let mut r = rng(0x5eed_0005);
    for _ in 0..50 {
        let inst = random_set_cover(&mut r, 8, 6);
        let greedy = greedy_set_cover(&inst).unwrap();
        let optimal = brute_force_set_cover(&inst).unwrap();
        let mut covered = BTreeSet::new();
        for &i in &greedy {
            covered.extend(inst.subsets[i].iter().copied());
        }
        assert!(inst.universe.is_subset(&covered), "greedy result must cover");
        assert!(optimal.len() <= greedy.len());
        let delta = inst.subsets.iter().map(|x| x.len()).max().unwrap_or(1);
        let harmonic: f64 = (1..=delta.max(1)).map(|i| 1.0 / i as f64).sum();
        assert!(
            greedy.len() as f64 <= harmonic * optimal.len() as f64 + 1e-9,
            "greedy {} vs optimal {} exceeds H({delta})",
            greedy.len(),
            optimal.len()
        );
    }
}

/// Exhaustive enumeration of shortest paths, counting pass-throughs.
#[allow(clippy::needless_range_loop)] // BFS tables indexed by source
fn brute_betweenness(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    // BFS distances from every source.
    let mut dist = vec![vec![usize::MAX; n]; n];
    for s in 0..n {
        dist[s][s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[s][v] == usize::MAX {
                    dist[s][v] = dist[s][u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut centrality = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] == usize::MAX {
                continue;
            }
            // Enumerate all shortest s -> t paths explicitly.
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for &v in &adj[last] {
                    if dist[s][v] == path.len() && dist[v][t] != usize::MAX
                        && path.len() + dist[v][t] == dist[s][t]
                    {
                        let mut ext = path.clone();
                        ext.push(v);
                        stack.push(ext);
                    }
                }
            }
            let total = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    centrality[v] += 1.0 / total;
                }
            }
        }
    }
    centrality
}

#[test]
fn betweenness_matches_path_enumeration_on_small_digraphs() {
    let mut r = rng(0x5eed_0006);
    for _ in 0..30 {
        let adj = random_digraph(&mut r, 8);
        let fast = betweenness_centrality(&adj);
        let slow = brute_betweenness(&adj);
        for (i, (a, b)) in fast.iter().zip(&slow).enumerate() {
            assert!(
                (a - b).abs() < 1e-9,
                "betweenness mismatch at node {i}: {a} vs {b} (graph {adj:?})"
            );
        }
    }
}

#[test]
fn four_room_top_betweenness_states_sit_by_doorways() {
    let dom = builtin("fourroom", None).unwrap();
    let layout = dom.layout.as_ref().unwrap();
    let scores = betweenness_centrality(&transition_digraph(&dom.mdp));
    let mut ranked: Vec<usize> = (0..dom.mdp.n_states())
        .filter(|&s| s != dom.mdp.goal())
        .collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let doorways = [(2usize, 5usize), (8, 5), (5, 1), (4, 8)];
    for &s in ranked.iter().take(4) {
        let (r, c) = layout.cell_of_state[s];
        let near = doorways
            .iter()
            .any(|&(dr, dc)| r.abs_diff(dr) + c.abs_diff(dc) <= 1);
        assert!(near, "high-betweenness state at ({r}, {c}) is not near a doorway");
    }
    let set = betweenness_options(&dom.mdp, 1e-6, 4).unwrap();
    assert_eq!(set.options.len(), 4);
}

#[test]
fn a_momi_sizes_shrink_and_meet_optimum_on_loose_bounds() {
    let dom = builtin("fourroom", None).unwrap();
    let l0 = measure_l(&dom.mdp, &[], 1e-6).unwrap();
    let mut prev = usize::MAX;
    for ell in 2..=l0 {
        let set = a_momi(&dom.mdp, 1e-6, ell).unwrap();
        assert!(set.measured_l <= ell);
        assert!(set.options.len() <= prev, "|O| grew at ell = {ell}");
        prev = set.options.len();
        if set.options.len() <= 2 {
            let opt = optimal_momi(&dom.mdp, 1e-6, ell, 10_000_000).unwrap();
            assert!(opt.options.len() <= set.options.len());
        }
    }
}

#[test]
fn distance_formula_matches_measured_iterations_on_deterministic_grids() {
    // On deterministic MDPs the iteration count with goal options from a
    // center set C is exactly max_s min(no_option(s), 1 + min_c d(s, c)).
    let mut r = rng(0x5eed_000a);
    let dom = builtin("fourroom", None).unwrap();
    let dm = distance_matrix(&dom.mdp, 1e-6).unwrap();
    let vstar = solve_optimal(&dom.mdp, 1e-12).unwrap();
    let non_goal: Vec<usize> = (0..dom.mdp.n_states())
        .filter(|&s| s != dom.mdp.goal())
        .collect();
    for _ in 0..20 {
        let size = r.gen_range(1..=5);
        let mut centers: Vec<usize> = (0..size)
            .map(|_| non_goal[r.gen_range(0..non_goal.len())])
            .collect();
        centers.sort_unstable();
        centers.dedup();
        let formula = non_goal
            .iter()
            .map(|&s| {
                let pulled = centers.iter().map(|&c| dm.d[s][c] + 1).min().unwrap();
                dm.no_option[s].min(pulled)
            })
            .max()
            .unwrap()
            .max(1);
        let options: Vec<PointOption> = centers
            .iter()
            .map(|&c| point_option_model(&dom.mdp, &vstar, c, dom.mdp.goal()).unwrap())
            .collect();
        let measured = measure_l(&dom.mdp, &options, 1e-6).unwrap();
        assert_eq!(formula, measured, "centers {centers:?}");
    }
}

#[test]
fn expand_budget_fallback_still_fills_the_option_set() {
    // On the funnel the k-center phase settles for two centers, so k = 4
    // leaves two slots for Expand to fill (subset size 2).
    let dom = builtin("fig3", None).unwrap();
    let dm = distance_matrix(&dom.mdp, 0.0).unwrap();
    let points: Vec<usize> = (0..6).collect();
    let dist: Vec<Vec<usize>> = points
        .iter()
        .map(|&s| points.iter().map(|&t| dm.d[s][t]).collect())
        .collect();
    let inst = KCenterInstance::new(points, dist, 4).unwrap();
    let (centers, _) = asym_k_center(&inst).unwrap();
    assert!(centers.len() < 4, "test needs the Expand phase to run");

    let normal = a_mimo(&dom.mdp, 0.0, 4, 1_000_000).unwrap();
    assert_eq!(normal.options.len(), 4);
    assert!(!normal.expand_fallback);
    let squeezed = a_mimo(&dom.mdp, 0.0, 4, 1).unwrap();
    assert_eq!(squeezed.options.len(), 4);
    assert!(squeezed.expand_fallback, "a unit budget must force the fallback");
    assert!(squeezed.measured_l <= measure_l(&dom.mdp, &[], 0.0).unwrap());
    assert!(normal.measured_l <= squeezed.measured_l);
}

#[test]
fn four_room_eigenoption_subgoals_avoid_doorways() {
    let dom = builtin("fourroom", None).unwrap();
    let set = optionplan::discovery::eigenoptions(&dom.mdp, 1e-6, 4).unwrap();
    assert!(!set.options.is_empty());
    assert!(set.options.iter().all(|o| o.term == dom.mdp.goal()));
    // Low-order Laplacian extrema sit deep inside rooms, away from the
    // connecting doorways.
    let layout = dom.layout.as_ref().unwrap();
    let doorways = [(2usize, 5usize), (8, 5), (5, 1), (4, 8)];
    for &s in &set.initiation_states() {
        let (r, c) = layout.cell_of_state[s];
        for &(dr, dc) in &doorways {
            assert!(
                r.abs_diff(dr) + c.abs_diff(dc) > 1,
                "subgoal ({r}, {c}) sits on a doorway"
            );
        }
    }
}

#[test]
fn option_models_discount_at_most_gamma() {
    let mut r = rng(0x5eed_0009);
    for _ in 0..30 {
        let mdp = random_dag_mdp(&mut r, 10);
        let vstar = solve_optimal(&mdp, 0.0).unwrap();
        for init in 0..mdp.n_states() - 1 {
            let o = point_option_model(&mdp, &vstar, init, mdp.goal()).unwrap();
            assert!(o.term_discount > 0.0);
            assert!(o.term_discount <= mdp.gamma() + 1e-15);
        }
    }
}

#[test]
fn a_mimo_with_every_state_covered_converges_in_one_sweep() {
    let dom = builtin("fig3", None).unwrap();
    let n = dom.mdp.n_states();
    let set = a_mimo(&dom.mdp, 0.0, n - 1, DEFAULT_BUDGET).unwrap();
    assert_eq!(set.options.len(), n - 1);
    assert_eq!(set.predicted_radius, Some(0));
    assert_eq!(set.measured_l, 1);
}

#[test]
fn k_center_radius_never_beats_the_exact_optimum() {
    let mut r = rng(0x5eed_0007);
    for _ in 0..25 {
        let mdp = random_tree_mdp(&mut r, 9);
        let dm = distance_matrix(&mdp, 0.0).unwrap();
        let points: Vec<usize> = (0..mdp.n_states() - 1).collect();
        let dist: Vec<Vec<usize>> = points
            .iter()
            .map(|&s| points.iter().map(|&t| dm.d[s][t]).collect())
            .collect();
        for k in 1..=3.min(points.len()) {
            let inst = KCenterInstance::new(points.clone(), dist.clone(), k).unwrap();
            let (centers, radius) = asym_k_center(&inst).unwrap();
            assert!(centers.len() <= k);
            let (_, exact) = brute_force_k_center(&inst, DEFAULT_BUDGET).unwrap();
            assert!(radius >= exact);
        }
    }
}

#[test]
fn reduction_mdp_oi_threshold_matches_cover_optimum() {
    let mut r = rng(0x5eed_0008);
    for _ in 0..10 {
        let inst = random_set_cover(&mut r, 8, 4);
        let (mdp, _) = optionplan::mdp::reduction::from_set_cover(&inst).unwrap();
        let cover = brute_force_set_cover(&inst).unwrap();
        let oi = optimal_momi(&mdp, 1e-6, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(oi.options.len(), cover.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_slip_free_grids_are_deterministic_and_valid(
        width in 2usize..7,
        height in 2usize..7,
        wall_bits in 0u64..1024,
    ) {
        let mut spec = GridSpec::open(width, height);
        for (i, cell) in (0..width * height).enumerate() {
            if wall_bits & (1 << (i % 60)) != 0 {
                spec.walls.insert((cell / width, cell % width));
            }
        }
        spec.walls.remove(&spec.goal);
        match build_grid_mdp(&spec) {
            Ok((mdp, _)) => {
                prop_assert!(mdp.is_deterministic());
                prop_assert!(mdp.validate().ok);
            }
            Err(optionplan::Error::DisconnectedCell { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }

    #[test]
    fn mdp_json_round_trip(width in 2usize..6, height in 2usize..6, slip in 0usize..3) {
        let mut spec = GridSpec::open(width, height);
        spec.slip_probability = slip as f64 * 0.15;
        let dom = grid_domain("grid", spec, Some(0.9)).unwrap();
        let text = optionplan::mdp::json::to_json(&dom.mdp);
        let back = optionplan::mdp::json::from_json(&text).unwrap();
        prop_assert_eq!(back, dom.mdp);
    }
}
