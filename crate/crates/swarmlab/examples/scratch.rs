// Development scratch runs; not part of the deliverable.

use std::f64::consts::PI;

use swarmlab::geometry::Vec2;
use swarmlab::kernels::{Bias, QuantizationGrid};
use swarmlab::presets::{bridged_cliques_12, complete_graph};
use swarmlab::sim::{
    run, Controller, GuardConfig, InitialStates, PositionBox, RobotState, Scenario, SweepSetup,
};
use swarmlab::graph::SwarmParams;

fn polygon_scenario(headings: &[f64], controller: Controller, bias: Bias) -> Scenario {
    let r = 1.3;
    let positions = [
        Vec2 { x: r, y: 0.0 },
        Vec2 { x: 0.0, y: r },
        Vec2 { x: -r, y: 0.0 },
        Vec2 { x: 0.0, y: -r },
    ];
    Scenario {
        params: SwarmParams {
            n: 4,
            comm_range: 2.0,
            sense_range: 2.0,
            boundary_range: 2.0,
            speed: 0.8,
            sweep_speed: 0.0,
            period: 1.0,
            spacing: 1.0,
            steps_per_rev: 20,
        },
        controller,
        initial: InitialStates::Explicit {
            robots: positions
                .iter()
                .zip(headings)
                .enumerate()
                .map(|(id, (&position, &heading))| RobotState { id, position, heading })
                .collect(),
        },
        max_steps: 1000,
        consensus_tol: 1e-4,
        seed: 1,
        fixed_adjacency: None,
        sweep: None,
        bias,
        guard: GuardConfig::default(),
        record_weights: false,
        stop_at_consensus: true,
    }
}

fn search_plain_cycles() {
    let grid = QuantizationGrid::new(20).unwrap();
    let mut found = 0;
    'outer: for a in 0..20i64 {
        for b in 0..20i64 {
            for c in 0..20i64 {
                for d in 0..20i64 {
                    let headings =
                        [grid.value(a), grid.value(b), grid.value(c), grid.value(d)];
                    let mut scenario =
                        polygon_scenario(&headings, Controller::QuantizedPlain, Bias::Floor);
                    scenario.max_steps = 200;
                    let trace = run(&scenario).unwrap();
                    if trace.cycle_detected {
                        println!(
                            "cycle: [{a},{b},{c},{d}] consensus={:?} steps={}",
                            trace.consensus_step,
                            trace.steps.len()
                        );
                        found += 1;
                        if found >= 25 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    println!("total printed {found}");
}

fn biased_seeds(bias: Bias) {
    let mut failures = 0;
    for seed in 0..100u64 {
        let mut scenario = polygon_scenario(&[0.0; 4], Controller::QuantizedBiased, bias);
        scenario.initial = InitialStates::Random {
            position_box: PositionBox { min: [-1.3, -1.3], max: [1.3, 1.3] },
        };
        scenario.seed = seed;
        let trace = run(&scenario).unwrap();
        // Criterion: common grid heading within 1000 steps.
        if trace.consensus_step.is_none() {
            failures += 1;
            if failures < 5 {
                println!("  seed {seed}: no consensus, cycle={}", trace.cycle_detected);
            }
        }
    }
    println!("bias {bias:?}: {failures} failures / 100");
}

fn biased_seeds_on_polygon(bias: Bias) {
    // Positions fixed on the polygon, headings random on the grid.
    let grid = QuantizationGrid::new(20).unwrap();
    let mut failures = 0;
    for seed in 0..100u64 {
        let mut rng = swarmlab::rng::SimRng::new(seed);
        let headings: Vec<f64> =
            (0..4).map(|_| grid.value(rng.index(20) as i64)).collect();
        let mut scenario = polygon_scenario(&headings, Controller::QuantizedBiased, bias);
        scenario.seed = seed;
        let trace = run(&scenario).unwrap();
        if trace.consensus_step.is_none() {
            failures += 1;
            if failures <= 5 {
                println!(
                    "  seed {seed}: headings {:?} no consensus, cycle={}",
                    headings, trace.cycle_detected
                );
            }
        }
    }
    println!("polygon bias {bias:?}: {failures} failures / 100");
}

fn example2_comparison() {
    let base = Scenario {
        params: SwarmParams {
            n: 12,
            comm_range: 1.4,
            sense_range: 2.0,
            boundary_range: 2.0,
            speed: 0.002,
            sweep_speed: 0.0,
            period: 0.5,
            spacing: 1.0,
            steps_per_rev: 20,
        },
        controller: Controller::Simple,
        initial: InitialStates::Random {
            position_box: PositionBox { min: [0.0, 0.0], max: [4.0, 4.0] },
        },
        max_steps: 10_000,
        consensus_tol: 1e-4,
        seed: 0,
        fixed_adjacency: Some(bridged_cliques_12()),
        sweep: None,
        bias: Bias::Nearest,
        guard: GuardConfig::default(),
        record_weights: false,
        stop_at_consensus: true,
    };
    let mut wins = 0;
    let mut ratios = Vec::new();
    for seed in 0..100u64 {
        let mut s = base.clone();
        s.seed = seed;
        let simple = run(&s).unwrap().consensus_step.unwrap();
        s.controller = Controller::SimilarityWeighted;
        let weighted = run(&s).unwrap().consensus_step.unwrap();
        if weighted < simple {
            wins += 1;
        }
        ratios.push(simple as f64 / weighted as f64);
        if seed < 5 {
            println!("  seed {seed}: simple={simple} weighted={weighted}");
        }
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!(
        "example2: weighted faster in {wins}/100, median ratio {:.2}",
        ratios[50]
    );

    // K12 (fixed complete graph).
    let mut wins = 0;
    let mut max_simple = 0;
    let mut max_weighted = 0;
    for seed in 0..100u64 {
        let mut s = base.clone();
        s.fixed_adjacency = Some(complete_graph(12));
        s.seed = seed;
        let simple = run(&s).unwrap().consensus_step.unwrap();
        s.controller = Controller::SimilarityWeighted;
        let weighted = run(&s).unwrap().consensus_step.unwrap();
        if weighted <= simple {
            wins += 1;
        }
        max_simple = max_simple.max(simple);
        max_weighted = max_weighted.max(weighted);
    }
    println!("example3 K12: weighted<=simple in {wins}/100, max simple={max_simple} max weighted={max_weighted}");
}

fn criterion5_family() {
    use swarmlab::analysis::{analyze, slem};
    use swarmlab::graph::{is_connected, AdjacencyMatrix};
    use swarmlab::kernels::{
        apply_aperiodicity_guard, similarity_weight_matrix, WeightMatrix,
    };
    use swarmlab::rng::SimRng;

    let mut rng = SimRng::new(2024);
    let mut disagreements = 0;
    let mut verdict_true = 0;
    let mut worst_margin = f64::INFINITY;
    for case in 0..100 {
        let n = 2 + (case % 11);
        // Random connected graph: spanning tree plus extra edges; every
        // tenth case is an even ring (periodic candidate).
        let adj = if case % 10 == 9 {
            swarmlab::presets::ring_graph(if n % 2 == 0 { n } else { n + 1 })
        } else {
            let mut a = AdjacencyMatrix::empty(n);
            for v in 1..n {
                let u = (rng.unit() * v as f64) as usize;
                a.set_edge(u, v);
            }
            let p = rng.range(0.2, 0.7);
            for i in 0..n {
                for j in 0..i {
                    if rng.unit() < p {
                        a.set_edge(i, j);
                    }
                }
            }
            a
        };
        assert!(is_connected(&adj));
        let n = adj.n();
        let w = match case % 3 {
            0 => {
                let rows: Vec<Vec<f64>> = (0..n)
                    .map(|i| {
                        let nbrs = adj.neighbours(i);
                        let wv = 1.0 / (1 + nbrs.len()) as f64;
                        let mut row = vec![0.0; n];
                        row[i] = wv;
                        for &j in &nbrs {
                            row[j] = wv;
                        }
                        row
                    })
                    .collect();
                WeightMatrix::from_rows(&rows).unwrap()
            }
            1 => similarity_weight_matrix(&adj).unwrap(),
            _ => apply_aperiodicity_guard(&similarity_weight_matrix(&adj).unwrap(), 0.01),
        };
        let report = match analyze(&w, 1e-9) {
            Ok(r) => r,
            Err(e) => { println!("case {case}: n={n} analyze error: {e} rows={:?}", w.rows()); continue; }
        };
        // Fixed-graph linear simulation.
        let mut x: Vec<f64> = (0..n).map(|_| rng.range(0.0, PI)).collect();
        let mut consensus = false;
        for _ in 0..10_000 {
            let spread = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - x.iter().cloned().fold(f64::INFINITY, f64::min);
            if spread < 1e-4 {
                consensus = true;
                break;
            }
            x = w.apply(&x);
        }
        if report.consensus_verdict {
            verdict_true += 1;
            worst_margin = worst_margin.min(1.0 - report.slem);
        }
        if consensus != report.consensus_verdict {
            disagreements += 1;
            println!(
                "  case {case}: n={n} slem={} verdict={} sim={}",
                report.slem, report.consensus_verdict, consensus
            );
        }
        let _ = slem(&w.rows());
    }
    println!(
        "criterion5: {disagreements} disagreements, {verdict_true} verdicts true, worst slem margin {worst_margin:.3e}"
    );
}

fn sweep_convergence() {
    use swarmlab::sweep::{
        assignment_distances, emergent_targets, BoundarySegment, Side,
    };

    let scenario = Scenario {
        params: SwarmParams {
            n: 6,
            comm_range: 2.0,
            sense_range: 2.0,
            boundary_range: 2.0,
            speed: 1.0,
            sweep_speed: 0.05,
            period: 1.0,
            spacing: 1.5,
            steps_per_rev: 20,
        },
        controller: Controller::SweepWeighted,
        initial: InitialStates::Random {
            position_box: PositionBox { min: [0.5, 0.0], max: [4.0, 3.0] },
        },
        max_steps: 3000,
        consensus_tol: 1e-4,
        seed: 11,
        fixed_adjacency: None,
        sweep: Some(SweepSetup {
            boundary: vec![BoundarySegment::new(0.0, 0.0).unwrap()],
            c0: 0.0,
            side: Side::B1,
        }),
        bias: Bias::Nearest,
        guard: GuardConfig::default(),
        record_weights: false,
        stop_at_consensus: true,
    };
    for controller in [Controller::SweepWeighted, Controller::SweepEqual] {
        let mut s = scenario.clone();
        s.controller = controller;
        let trace = run(&s).unwrap();
        let boundary = BoundarySegment::new(0.0, 0.0).unwrap();
        let phi_b = boundary.sweep_direction();
        let final_states = trace.final_states();
        let positions: Vec<Vec2> = final_states.iter().map(|r| r.position).collect();
        let heading_err = final_states
            .iter()
            .map(|r| (r.heading - phi_b).abs())
            .fold(0.0, f64::max);
        let targets = emergent_targets(&positions, &boundary, 1.5, Side::B1).unwrap();
        let dists = assignment_distances(&positions, &targets.points);
        let max_dist = dists.iter().cloned().fold(0.0, f64::max);
        let mut xs: Vec<f64> = positions.iter().map(|p| p.x).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let spacings: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        println!(
            "{:?}: steps={} consensus={:?} heading_err={heading_err:.2e} max_target_dist={max_dist:.2e} spacings={spacings:.3?} warnings={}",
            controller,
            trace.steps.len(),
            trace.consensus_step,
            trace.warnings.len()
        );
    }
}


fn wide_cycle_search() {
    let grid = QuantizationGrid::new(20).unwrap();
    for r in [0.9f64, 1.05, 1.2, 1.3, 1.35, 1.41, 1.45, 1.55, 1.7, 2.0] {
        for t in [1.0f64, 0.5, 0.25, 0.125] {
            let mut found = 0usize;
            let mut example = None;
            'states: for a in 0..20i64 {
                for b in 0..20i64 {
                    for c in 0..20i64 {
                        for d in 0..20i64 {
                            // inline sim: 4 robots, square radius r, plain rule
                            let mut pos = [
                                (r, 0.0),
                                (0.0, r),
                                (-r, 0.0),
                                (0.0, -r),
                            ];
                            let mut k = [a, b, c, d];
                            let mut seen = std::collections::HashMap::new();
                            let mut prev: Option<[i64; 4]> = None;
                            let mut cycled = false;
                            for _step in 0..600 {
                                // consensus?
                                if k.iter().all(|&x| x == k[0]) {
                                    break;
                                }
                                let changed = prev.map_or(false, |p| p != k);
                                if changed && seen.contains_key(&k) {
                                    cycled = true;
                                    break;
                                }
                                seen.insert(k, ());
                                prev = Some(k);
                                // adjacency + update
                                let mut nk = [0i64; 4];
                                for i in 0..4 {
                                    let mut sum = k[i];
                                    let mut cnt = 1i64;
                                    for j in 0..4 {
                                        if i != j {
                                            let dx: f64 = pos[i].0 - pos[j].0;
                                            let dy: f64 = pos[i].1 - pos[j].1;
                                            if (dx * dx + dy * dy).sqrt() <= 2.0 {
                                                sum += k[j];
                                                cnt += 1;
                                            }
                                        }
                                    }
                                    nk[i] = sum.div_euclid(cnt).rem_euclid(20);
                                }
                                for i in 0..4 {
                                    let ang = grid.value(nk[i]);
                                    pos[i].0 += t * 0.8 * ang.cos();
                                    pos[i].1 += t * 0.8 * ang.sin();
                                }
                                k = nk;
                            }
                            if cycled {
                                found += 1;
                                if example.is_none() {
                                    example = Some([a, b, c, d]);
                                }
                                if found > 200 {
                                    break 'states;
                                }
                            }
                        }
                    }
                }
            }
            if found > 0 {
                println!("r={r} T={t}: {found} cycling vectors, example {:?}", example);
            }
        }
    }
    println!("wide search done");
}


fn pipeline_cycle_check() {
    let grid = QuantizationGrid::new(20).unwrap();
    for t in [0.05f64, 0.1, 0.25, 1.0] {
        let headings = [grid.value(0), grid.value(1), grid.value(11), grid.value(10)];
        let mut scenario = polygon_scenario(&headings, Controller::QuantizedPlain, Bias::Floor);
        scenario.params.period = t;
        scenario.max_steps = 1000;
        let trace = run(&scenario).unwrap();
        println!(
            "T={t}: cycle={} consensus={:?} steps={}",
            trace.cycle_detected,
            trace.consensus_step,
            trace.steps.len()
        );
    }
}

fn biased_periods() {
    let grid = QuantizationGrid::new(20).unwrap();
    for t in [0.05f64, 0.1, 0.25, 0.5, 1.0] {
        for bias in [Bias::Nearest, Bias::Floor, Bias::Ceil] {
            let mut failures = 0;
            for seed in 0..100u64 {
                let mut rng = swarmlab::rng::SimRng::new(seed);
                let headings: Vec<f64> =
                    (0..4).map(|_| grid.value(rng.index(20) as i64)).collect();
                let mut scenario =
                    polygon_scenario(&headings, Controller::QuantizedBiased, bias);
                scenario.params.period = t;
                scenario.seed = seed;
                let trace = run(&scenario).unwrap();
                if trace.consensus_step.is_none() {
                    failures += 1;
                }
            }
            println!("T={t} bias={bias:?}: {failures} failures / 100");
        }
    }
}


fn debug_biased_failure() {
    let grid = QuantizationGrid::new(20).unwrap();
    let mut shown = 0;
    for seed in 0..40u64 {
        let mut rng = swarmlab::rng::SimRng::new(seed);
        let headings: Vec<f64> = (0..4).map(|_| grid.value(rng.index(20) as i64)).collect();
        let mut scenario = polygon_scenario(&headings, Controller::QuantizedBiased, Bias::Floor);
        scenario.params.period = 0.05;
        scenario.seed = seed;
        let trace = run(&scenario).unwrap();
        if trace.consensus_step.is_none() && shown < 4 {
            shown += 1;
            let ks: Vec<i64> = headings.iter().map(|&h| grid.index_of(h).unwrap()).collect();
            println!("seed {seed}: initial grid {ks:?} cycle={}", trace.cycle_detected);
            for probe in [0usize, 1, 2, 3, 5, 10, 50, 200, 999] {
                if probe < trace.steps.len() {
                    let snap = &trace.steps[probe];
                    let kk: Vec<i64> = snap.iter().map(|r| grid.index_of(r.heading).unwrap()).collect();
                    let pp: Vec<(f64,f64)> = snap.iter().map(|r| (r.position.x, r.position.y)).collect();
                    // pairwise adjacency at this step
                    let mut edges = 0;
                    for i in 0..4 { for j in 0..i {
                        let dx = pp[i].0-pp[j].0; let dy = pp[i].1-pp[j].1;
                        if (dx*dx+dy*dy).sqrt() <= 2.0 { edges += 1; }
                    }}
                    println!("  step {probe}: k={kk:?} edges={edges}");
                }
            }
        }
    }
}


fn biased_radii() {
    let grid = QuantizationGrid::new(20).unwrap();
    for (r, label) in [(0.3f64, "K4"), (0.7, "K4"), (1.0, "K4(tie)"), (1.3, "ring")] {
        for bias in [Bias::Nearest, Bias::Floor, Bias::Ceil] {
            for half in [false, true] {
                let mut failures = 0;
                for seed in 0..100u64 {
                    let mut rng = swarmlab::rng::SimRng::new(seed);
                    let lim = if half { 10 } else { 20 };
                    let headings: Vec<f64> =
                        (0..4).map(|_| grid.value(rng.index(lim) as i64)).collect();
                    let mut scenario =
                        polygon_scenario(&headings, Controller::QuantizedBiased, bias);
                    scenario.params.period = 0.05;
                    // shrink polygon
                    if let InitialStates::Explicit { robots } = &mut scenario.initial {
                        for (i, robot) in robots.iter_mut().enumerate() {
                            let base = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][i];
                            robot.position = Vec2 { x: base.0 * r, y: base.1 * r };
                        }
                    }
                    scenario.seed = seed;
                    let trace = run(&scenario).unwrap();
                    if trace.consensus_step.is_none() {
                        failures += 1;
                    }
                }
                println!("r={r} ({label}) bias={bias:?} half={half}: {failures} failures / 100");
            }
        }
    }
}


fn schur_repro() {
    use nalgebra::DMatrix;
    use swarmlab::graph::AdjacencyMatrix;
    use swarmlab::kernels::similarity_weight_matrix;
    use swarmlab::rng::SimRng;
    // Reproduce case 1 of the criterion-5 family.
    let mut rng = SimRng::new(2024);
    for case in 0..2 {
        let n = 2 + (case % 11);
        let mut a = AdjacencyMatrix::empty(n);
        for v in 1..n {
            let u = (rng.unit() * v as f64) as usize;
            a.set_edge(u, v);
        }
        let p = rng.range(0.2, 0.7);
        for i in 0..n {
            for j in 0..i {
                if rng.unit() < p {
                    a.set_edge(i, j);
                }
            }
        }
        if case != 1 { let _ = similarity_weight_matrix(&a); continue; }
        println!("adj rows: {:?}", a.rows_u8());
        let w = similarity_weight_matrix(&a).unwrap();
        println!("weight rows: {:?}", w.rows());
        let m = DMatrix::from_fn(n, n, |i, j| w.get(i, j));
        for (eps, iters) in [(1e-12, 10_000usize), (1e-10, 10_000), (1e-9, 10_000), (f64::EPSILON, 0)] {
            let s = nalgebra::linalg::Schur::try_new(m.clone(), eps, iters);
            match s {
                Some(s) => {
                    let ev = s.complex_eigenvalues();
                    println!("eps={eps:.0e} iters={iters}: eigenvalues {:?}", ev.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>());
                }
                None => println!("eps={eps:.0e} iters={iters}: FAILED"),
            }
        }
    }
}


fn schur_repro2() {
    use nalgebra::DMatrix;
    let rows = [[0.0f64, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]];
    let m = DMatrix::from_fn(3, 3, |i, j| rows[i][j]);
    for (eps, iters) in [(1e-12, 10_000usize), (1e-9, 10_000), (1e-7, 10_000), (f64::EPSILON, 0), (1e-12, 0)] {
        let s = nalgebra::linalg::Schur::try_new(m.clone(), eps, iters);
        match s {
            Some(s) => {
                let ev = s.complex_eigenvalues();
                println!("eps={eps:.0e} iters={iters}: {:?}", ev.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>());
            }
            None => println!("eps={eps:.0e} iters={iters}: FAILED"),
        }
    }
    // path equal-weight comparison case from unit test works, check larger periodic
    let rows = [[0.0f64, 1.0], [1.0, 0.0]];
    let m = DMatrix::from_fn(2, 2, |i, j| rows[i][j]);
    let s = nalgebra::linalg::Schur::try_new(m.clone(), 1e-12, 10_000);
    println!("perm2: {:?}", s.map(|s| s.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect::<Vec<_>>()));
}


fn kink_turning() {
    use swarmlab::sweep::{BoundarySegment, Side};
    // Converged barrier on segment 1 (x=0), sweeping up; kink to a tilted
    // segment 2 at y = 6.
    let gamma2 = 0.35f64;
    let kink_y = 6.0f64;
    let c2 = kink_y * gamma2.sin();
    let d = 1.5;
    let phi_b1 = std::f64::consts::FRAC_PI_2;
    let mut max_turn = std::collections::BTreeMap::new();
    for controller in [Controller::SweepWeighted, Controller::SweepEqual] {
        let scenario = Scenario {
            params: SwarmParams {
                n: 6,
                comm_range: 2.0,
                sense_range: 2.0,
                boundary_range: 2.0,
                speed: 1.0,
                sweep_speed: 0.05,
                period: 1.0,
                spacing: d,
                steps_per_rev: 20,
            },
            controller,
            initial: InitialStates::Explicit {
                robots: (0..6)
                    .map(|id| RobotState {
                        id,
                        position: Vec2 { x: d * (id + 1) as f64, y: 0.0 },
                        heading: phi_b1,
                    })
                    .collect(),
            },
            max_steps: 400,
            consensus_tol: 1e-9,
            seed: 0,
            fixed_adjacency: None,
            sweep: Some(SweepSetup {
                boundary: vec![
                    BoundarySegment::new(0.0, 0.0).unwrap(),
                    BoundarySegment::new(gamma2, c2).unwrap(),
                ],
                c0: 0.0,
                side: Side::B1,
            }),
            bias: Bias::Nearest,
            guard: GuardConfig::default(),
            record_weights: false,
            stop_at_consensus: false,
        };
        let trace = run(&scenario).unwrap();
        let mut worst = 0.0f64;
        let mut worst_step = 0;
        for (k, pair) in trace.steps.windows(2).enumerate() {
            for (a, b) in pair[0].iter().zip(pair[1].iter()) {
                let turn = swarmlab::sweep::circular_difference(b.heading, a.heading);
                if turn > worst {
                    worst = turn;
                    worst_step = k;
                }
            }
        }
        let final_h: Vec<f64> = trace.final_headings();
        println!(
            "{controller:?}: max_turn={worst:.4} at step {worst_step}, final headings {:?}",
            final_h.iter().map(|h| (h * 100.0).round() / 100.0).collect::<Vec<_>>()
        );
        max_turn.insert(format!("{controller:?}"), worst);
    }
    println!("ordering weighted<=equal: {}", max_turn["SweepWeighted"] <= max_turn["SweepEqual"]);
}


fn kink_scan() {
    use swarmlab::sweep::{circular_difference, BoundarySegment, Side};
    for gamma2 in [-0.6f64, -0.7, -0.75, -0.8, -0.85, -0.9, -0.95, -1.0] {
        let kink_y = 6.0f64;
        let c2 = kink_y * gamma2.sin();
        let d = 1.0;
        let phi_b1 = std::f64::consts::FRAC_PI_2;
        let mut turns = Vec::new();
        for controller in [Controller::SweepWeighted, Controller::SweepEqual] {
            let scenario = Scenario {
                params: SwarmParams {
                    n: 6,
                    comm_range: 2.0,
                    sense_range: 2.0,
                    boundary_range: 2.0,
                    speed: 1.0,
                    sweep_speed: 0.05,
                    period: 1.0,
                    spacing: d,
                    steps_per_rev: 20,
                },
                controller,
                initial: InitialStates::Explicit {
                    robots: (0..6)
                        .map(|id| RobotState {
                            id,
                            position: Vec2 { x: d * (id + 1) as f64, y: 0.0 },
                            heading: phi_b1,
                        })
                        .collect(),
                },
                max_steps: 900,
                consensus_tol: 1e-9,
                seed: 0,
                fixed_adjacency: None,
                sweep: Some(SweepSetup {
                    boundary: vec![
                        BoundarySegment::new(0.0, 0.0).unwrap(),
                        BoundarySegment::new(gamma2, c2).unwrap(),
                    ],
                    c0: 0.0,
                    side: Side::B1,
                }),
                bias: Bias::Nearest,
                guard: GuardConfig::default(),
                record_weights: false,
                stop_at_consensus: false,
            };
            let trace = run(&scenario).unwrap();
            let mut worst = 0.0f64;
            for pair in trace.steps.windows(2) {
                for (a, b) in pair[0].iter().zip(pair[1].iter()) {
                    worst = worst.max(circular_difference(b.heading, a.heading));
                }
            }
            let spread = {
                let hs = trace.final_headings();
                hs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - hs.iter().cloned().fold(f64::INFINITY, f64::min)
            };
            turns.push((worst, spread));
        }
        println!(
            "gamma2={gamma2}: weighted turn {:.3} (spread {:.1e}) equal turn {:.3} (spread {:.1e}) ordering={}",
            turns[0].0, turns[0].1, turns[1].0, turns[1].1, turns[0].0 <= turns[1].0
        );
    }
}


fn kink_debug() {
    use swarmlab::sweep::{circular_difference, BoundarySegment, Side};
    let gamma2 = 0.3f64;
    let kink_y = 6.0f64;
    let c2 = kink_y * gamma2.sin();
    let d = 1.5;
    let phi_b1 = std::f64::consts::FRAC_PI_2;
    let scenario = Scenario {
        params: SwarmParams {
            n: 6, comm_range: 2.0, sense_range: 2.0, boundary_range: 2.0,
            speed: 1.0, sweep_speed: 0.05, period: 1.0, spacing: d, steps_per_rev: 20,
        },
        controller: Controller::SweepWeighted,
        initial: InitialStates::Explicit {
            robots: (0..6).map(|id| RobotState {
                id, position: Vec2 { x: d * (id + 1) as f64, y: 0.0 }, heading: phi_b1,
            }).collect(),
        },
        max_steps: 500,
        consensus_tol: 1e-9,
        seed: 0,
        fixed_adjacency: None,
        sweep: Some(SweepSetup {
            boundary: vec![
                BoundarySegment::new(0.0, 0.0).unwrap(),
                BoundarySegment::new(gamma2, c2).unwrap(),
            ],
            c0: 0.0, side: Side::B1,
        }),
        bias: Bias::Nearest,
        guard: GuardConfig::default(),
        record_weights: false,
        stop_at_consensus: false,
    };
    let trace = run(&scenario).unwrap();
    let mut worst = (0.0f64, 0usize, 0usize);
    for (k, pair) in trace.steps.windows(2).enumerate() {
        for (idx, (a, b)) in pair[0].iter().zip(pair[1].iter()).enumerate() {
            let t = circular_difference(b.heading, a.heading);
            if t > worst.0 { worst = (t, k, idx); }
        }
    }
    println!("worst turn {:.3} at step {} robot {}", worst.0, worst.1, worst.2);
    for step in worst.1.saturating_sub(4)..(worst.1 + 4).min(trace.steps.len()) {
        let snap = &trace.steps[step];
        let hs: Vec<f64> = snap.iter().map(|r| (r.heading * 1000.0).round() / 1000.0).collect();
        let ps: Vec<(f64, f64)> = snap
            .iter()
            .map(|r| ((r.position.x * 100.0).round() / 100.0, (r.position.y * 100.0).round() / 100.0))
            .collect();
        println!("step {step}: headings {hs:?}");
        println!("          pos {ps:?}");
    }
    println!("warnings: {:?}", trace.warnings.iter().take(10).collect::<Vec<_>>());
}


fn kink_debug2() {
    use swarmlab::sweep::{BoundarySegment, BoundaryChain, Side};
    let gamma2 = 0.32f64;
    let kink_y = 6.0f64;
    let c2 = kink_y * gamma2.sin();
    let d = 1.0;
    let phi_b1 = std::f64::consts::FRAC_PI_2;
    let scenario = Scenario {
        params: SwarmParams {
            n: 6, comm_range: 2.0, sense_range: 2.0, boundary_range: 2.0,
            speed: 1.0, sweep_speed: 0.05, period: 1.0, spacing: d, steps_per_rev: 20,
        },
        controller: Controller::SweepEqual,
        initial: InitialStates::Explicit {
            robots: (0..6).map(|id| RobotState {
                id, position: Vec2 { x: d * (id + 1) as f64, y: 0.0 }, heading: phi_b1,
            }).collect(),
        },
        max_steps: 900,
        consensus_tol: 1e-9,
        seed: 0,
        fixed_adjacency: None,
        sweep: Some(SweepSetup {
            boundary: vec![
                BoundarySegment::new(0.0, 0.0).unwrap(),
                BoundarySegment::new(gamma2, c2).unwrap(),
            ],
            c0: 0.0, side: Side::B1,
        }),
        bias: Bias::Nearest,
        guard: GuardConfig::default(),
        record_weights: false,
        stop_at_consensus: false,
    };
    let trace = run(&scenario).unwrap();
    let segs = vec![
        BoundarySegment::new(0.0, 0.0).unwrap(),
        BoundarySegment::new(gamma2, c2).unwrap(),
    ];
    let chain = BoundaryChain::new(&segs).unwrap();
    for step in [0usize, 60, 110, 120, 130, 140, 160, 200, 400, 800] {
        if step >= trace.steps.len() { continue; }
        let r0 = &trace.steps[step][0];
        let det = chain.detect(r0.position, 2.0);
        println!(
            "step {step}: robot0 pos ({:.2},{:.2}) heading {:.4} det={:?}",
            r0.position.x, r0.position.y, r0.heading,
            det.map(|(s, _, dist)| (s.gamma, (dist * 100.0).round() / 100.0))
        );
    }
    println!("total steps {}", trace.steps.len());
}


fn sweep_seeds() {
    use swarmlab::sweep::{assignment_distances, emergent_targets, BoundarySegment, Side};
    for controller in [Controller::SweepWeighted, Controller::SweepEqual] {
        let mut fails = Vec::new();
        for seed in 0..12u64 {
            let scenario = Scenario {
                params: SwarmParams {
                    n: 6, comm_range: 2.0, sense_range: 2.0, boundary_range: 2.0,
                    speed: 1.0, sweep_speed: 0.05, period: 1.0, spacing: 1.5, steps_per_rev: 20,
                },
                controller,
                initial: InitialStates::Random {
                    position_box: PositionBox { min: [0.5, 0.0], max: [4.0, 3.0] },
                },
                max_steps: 6000,
                consensus_tol: 1e-6,
                seed,
                fixed_adjacency: None,
                sweep: Some(SweepSetup {
                    boundary: vec![BoundarySegment::new(0.0, 0.0).unwrap()],
                    c0: 0.0,
                    side: Side::B1,
                }),
                bias: Bias::Nearest,
                guard: GuardConfig::default(),
                record_weights: false,
                stop_at_consensus: true,
            };
            let trace = run(&scenario).unwrap();
            let boundary = BoundarySegment::new(0.0, 0.0).unwrap();
            let phi_b = boundary.sweep_direction();
            let fs = trace.final_states();
            let positions: Vec<Vec2> = fs.iter().map(|r| r.position).collect();
            let h_err = fs.iter().map(|r| (r.heading - phi_b).abs()).fold(0.0, f64::max);
            let targets = emergent_targets(&positions, &boundary, 1.5, Side::B1).unwrap();
            let dists = assignment_distances(&positions, &targets.points);
            let max_d = dists.iter().cloned().fold(0.0, f64::max);
            let mut xs: Vec<f64> = positions.iter().map(|p| p.x).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let worst_gap = xs.windows(2).map(|w| (w[1] - w[0] - 1.5).abs()).fold(0.0, f64::max);
            let ok = trace.consensus_step.is_some() && h_err < 1e-3 && max_d < 1e-2 && worst_gap < 1e-2;
            if !ok {
                fails.push((seed, trace.consensus_step, h_err, max_d, worst_gap));
            }
        }
        println!("{controller:?}: {} fails of 12: {fails:?}", fails.len());
    }
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_default();
    match mode.as_str() {
        "cycles" => search_plain_cycles(),
        "biased" => {
            for bias in [Bias::Nearest, Bias::Floor, Bias::Ceil] {
                biased_seeds(bias);
                biased_seeds_on_polygon(bias);
            }
        }
        "ex2" => example2_comparison(),
        "c5" => criterion5_family(),
        "sweep" => sweep_convergence(),
        "wide" => wide_cycle_search(),
        "pipeline" => pipeline_cycle_check(),
        "biasedp" => biased_periods(),
        "debugb" => debug_biased_failure(),
        "radii" => biased_radii(),
        "schur" => schur_repro(),
        "schur2" => schur_repro2(),
        "kink" => kink_turning(),
        "kinkscan" => kink_scan(),
        "kinkdebug" => kink_debug(),
        "kinkdebug2" => kink_debug2(),
        "sweepseeds" => sweep_seeds(),
        other => eprintln!("unknown mode {other:?}"),
    }
}
