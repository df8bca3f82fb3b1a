use sbgd_core::communication::evaluate;
use sbgd_core::diagnostics::{
    first_increase, minimizer_values, range_bound_violation, summability_partial_sums,
};
use sbgd_core::objective::{paper_objective, quadratic_objective, rastrigin_objective};
use sbgd_core::{
    grid_oracle, init_swarm, run_baseline, run_basic, run_observed, run_tolerance, step,
    AcceptedStep, Agent, BoxDomain, InitScheme, Objective, SbgdParams, Swarm, Termination, Variant,
};

/// Reference backtracking written straight from the acceptance rule, used to
/// hand-trace single steps.
fn reference_step(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    x: f64,
    lambda_eff: f64,
    gamma: f64,
    l: f64,
) -> f64 {
    let g = df(x);
    let mut h = 2.0 / l * (1.0 - lambda_eff);
    while f(x - h * g) > f(x) - lambda_eff * h * g * g {
        h *= gamma;
    }
    x - h * g
}

fn quad_params(agents: usize) -> SbgdParams {
    SbgdParams {
        agents,
        lipschitz: 2.0,
        lipschitz_exact: true,
        ..SbgdParams::default()
    }
}

#[test]
fn equidistant_init_on_paper_domain() {
    let f = paper_objective();
    let params = SbgdParams {
        agents: 10,
        init: InitScheme::Equidistant,
        ..SbgdParams::default()
    };
    let s = init_swarm(&params, &f).unwrap();
    let xs: Vec<f64> = s.agents.iter().map(|a| a.position[0]).collect();
    assert_eq!(xs[0], -3.0);
    assert_eq!(xs[9], 3.0);
    for w in xs.windows(2) {
        assert!((w[1] - w[0] - 2.0 / 3.0).abs() < 1e-14);
    }
    assert!((s.total_mass() - 1.0).abs() < 1e-15);
}

#[test]
fn left_cluster_occupies_leftmost_tenth() {
    let f = paper_objective();
    let params = SbgdParams {
        agents: 20,
        init: InitScheme::LeftCluster,
        ..SbgdParams::default()
    };
    let s = init_swarm(&params, &f).unwrap();
    assert_eq!(s.agents[0].position, vec![-3.0]);
    assert!((s.agents[19].position[0] + 2.4).abs() < 1e-15);
}

#[test]
fn init_masses_and_seed_determinism() {
    let f = rastrigin_objective(2).unwrap();
    let params = SbgdParams {
        agents: 4,
        seed: 17,
        ..SbgdParams::default()
    };
    let a = init_swarm(&params, &f).unwrap();
    let b = init_swarm(&params, &f).unwrap();
    assert_eq!(a, b);
    assert!(a.agents.iter().all(|ag| ag.mass == 0.25));
    assert!(a.agents.iter().all(|ag| f.domain().contains(&ag.position)));
    let c = init_swarm(
        &SbgdParams {
            seed: 18,
            ..params.clone()
        },
        &f,
    )
    .unwrap();
    assert_ne!(a, c);
    assert!(init_swarm(
        &SbgdParams {
            agents: 0,
            ..params
        },
        &f
    )
    .is_err());
}

#[test]
fn multi_dimensional_equidistant_follows_diagonal() {
    let f = quadratic_objective(3).unwrap();
    let s = init_swarm(
        &SbgdParams {
            agents: 3,
            init: InitScheme::Equidistant,
            ..SbgdParams::default()
        },
        &f,
    )
    .unwrap();
    assert_eq!(s.agents[1].position, vec![0.0; 3]);
    assert_eq!(s.agents[2].position, vec![5.0; 3]);
}

#[test]
fn two_agent_step_hand_trace() {
    let q = quadratic_objective(1).unwrap();
    let mut s = Swarm::with_uniform_mass(vec![vec![1.0], vec![2.0]]).unwrap();
    let report = step(&mut s, &quad_params(2), &q).unwrap();

    // heights (0, 1): agent 1 sheds everything
    assert_eq!(report.profile.eta, vec![0.0, 1.0]);
    assert_eq!(s.agents[1].mass, 0.0);
    assert!(!s.agents[1].active);
    assert_eq!(s.agents[0].mass, 1.0);
    assert_eq!(s.agents[1].position, vec![2.0]);

    // survivor is the heaviest: lambda_eff = lambda * psi(1) = 0.2
    let expected = reference_step(&|x| x * x, &|x| 2.0 * x, 1.0, 0.2, 0.9, 2.0);
    assert_eq!(s.agents[0].position, vec![expected]);
    assert_eq!(s.iteration, 1);
}

#[test]
fn flat_swarm_step_keeps_masses() {
    let flat = Objective::new(
        "tilted-flat",
        BoxDomain::cube(1, -1.0, 1.0).unwrap(),
        |x| if x[0].abs() <= 1.0 { 0.0 } else { x[0] * x[0] },
        |x| vec![if x[0].abs() <= 1.0 { 0.0 } else { 2.0 * x[0] }],
    );
    let mut s = Swarm::with_uniform_mass(vec![vec![-0.5], vec![0.0], vec![0.5]]).unwrap();
    let before = s.clone();
    let r = step(&mut s, &quad_params(3), &flat).unwrap();
    assert!(r.profile.is_flat());
    assert_eq!(r.max_displacement, 0.0);
    for (a, b) in s.agents.iter().zip(&before.agents) {
        assert_eq!(a.mass, b.mass);
        assert_eq!(a.position, b.position);
    }
}

#[test]
fn step_never_increases_any_agent() {
    let f = paper_objective();
    let params = SbgdParams {
        agents: 30,
        lipschitz: 5.0,
        seed: 4,
        ..SbgdParams::default()
    };
    let mut s = init_swarm(&params, &f).unwrap();
    for _ in 0..10 {
        if s.active_count() < 2 {
            break;
        }
        let before = evaluate(&s, &f);
        let r = step(&mut s, &params, &f).unwrap();
        for i in s.active_ids() {
            assert!(r.values[i] <= before[i]);
            assert_eq!(r.values[i], f.value(&s.agents[i].position));
        }
        assert!((s.total_mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn step_rejects_single_agent() {
    let q = quadratic_objective(1).unwrap();
    let mut s = Swarm::with_uniform_mass(vec![vec![1.0]]).unwrap();
    assert!(step(&mut s, &quad_params(1), &q).is_err());
}

#[test]
fn basic_two_agents_on_quadratic() {
    let q = quadratic_objective(1).unwrap();
    let params = SbgdParams {
        init: InitScheme::Equidistant,
        ..quad_params(2)
    };
    let r = run_basic(&params, &q).unwrap();
    // agents at -5 and 5 tie in F; the flat swarm drops agent 1
    assert_eq!(r.termination, Termination::SingleAgent);
    assert_eq!(r.iterations_used, 1);
    assert_eq!(r.trajectory.len(), 2);
    assert!(!r.trajectory[1].agents[1].active);
    assert!(r.solution[0].abs() < 5.0);

    let params = SbgdParams {
        init: InitScheme::UniformRandom,
        seed: 3,
        ..quad_params(2)
    };
    let r = run_basic(&params, &q).unwrap();
    let start = &r.trajectory[0];
    let lighter = if start.agents[0].f_value > start.agents[1].f_value {
        0
    } else {
        1
    };
    assert!(!r.trajectory[1].agents[lighter].active);
    assert!(r.f_solution < start.f_min);
}

#[test]
fn basic_runs_until_one_agent() {
    let f = paper_objective();
    let params = SbgdParams {
        agents: 10,
        lipschitz: 5.0,
        seed: 9,
        ..SbgdParams::default()
    };
    let r = run_basic(&params, &f).unwrap();
    assert_eq!(r.termination, Termination::SingleAgent);
    assert_eq!(r.iterations_used, 9);
    assert_eq!(r.trajectory.len(), 10);
    let last = r.trajectory.last().unwrap();
    assert_eq!(last.active_count(), 1);
    assert_eq!(r.solution, last.heaviest().position);
    assert_eq!(r.f_solution, f.value(&r.solution));
    for (n, rec) in r.trajectory.iter().enumerate() {
        assert_eq!(rec.iteration, n);
        assert_eq!(rec.active_count(), 10 - n);
    }
}

#[test]
fn single_agent_basic_matches_baseline() {
    let f = paper_objective();
    for seed in 0..5 {
        let params = SbgdParams {
            agents: 1,
            lipschitz: 5.0,
            seed,
            ..SbgdParams::default()
        };
        let a = run_basic(&params, &f).unwrap();
        let b = run_baseline(&params, &f).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn baseline_geometric_decay_on_quadratic() {
    let q = quadratic_objective(1).unwrap();
    let params = SbgdParams {
        agents: 1,
        max_iterations: Some(30),
        tolres: 1e-300,
        init: InitScheme::Equidistant,
        ..quad_params(1)
    };
    let r = run_baseline(&params, &q).unwrap();
    // starts at the midpoint 0 of [-5, 5]: already optimal, zero move
    assert_eq!(r.termination, Termination::Residual);
    assert_eq!(r.solution, vec![0.0]);

    let two = Objective::new(
        "shifted",
        BoxDomain::cube(1, 0.5, 1.5).unwrap(),
        |x| x[0] * x[0],
        |x| vec![2.0 * x[0]],
    )
    .with_lipschitz(2.0, true);
    let r = run_baseline(&params, &two).unwrap();
    let fs = minimizer_values(&r.trajectory);
    assert_eq!(fs[0], 1.0);
    for w in fs.windows(2) {
        // x - h 2x with h = 0.8 (exact Armijo boundary) or 0.72 after one
        // rounding-induced shrink: x maps to -0.6x or -0.44x
        assert!(w[1] <= 0.36 * w[0] * (1.0 + 1e-12), "{w:?}");
    }
}

#[test]
fn basic_stalls_on_constant_objective() {
    let c = Objective::new(
        "const",
        BoxDomain::cube(1, 0.0, 1.0).unwrap(),
        |_| 1.0,
        |x| vec![0.0; x.len()],
    );
    let params = SbgdParams {
        agents: 6,
        seed: 2,
        ..SbgdParams::default()
    };
    let r = run_basic(&params, &c).unwrap();
    assert_eq!(r.termination, Termination::Stalled);
    assert_eq!(r.iterations_used, 2);
    assert!((r.trajectory.last().unwrap().total_mass() - 1.0).abs() < 1e-15);
}

#[test]
fn tolerance_stops_on_residual() {
    let f = paper_objective();
    let params = SbgdParams {
        agents: 100,
        lipschitz: 25.0,
        init: InitScheme::Equidistant,
        ..SbgdParams::default()
    };
    let r = run_tolerance(&params, &f).unwrap();
    assert_eq!(r.termination, Termination::Residual);
    assert!(r.iterations_used <= 6);
    let last = r.trajectory.last().unwrap();
    assert_eq!(r.solution, last.minimizer().position);

    // with an unbounded residual threshold the first iteration already stops
    let r = run_tolerance(
        &SbgdParams {
            tolres: f64::INFINITY,
            ..params.clone()
        },
        &f,
    )
    .unwrap();
    assert_eq!(
        (r.termination, r.iterations_used),
        (Termination::Residual, 1)
    );
}

#[test]
fn tolerance_without_residual_stop_runs_out_agents() {
    let f = paper_objective();
    let params = SbgdParams {
        agents: 20,
        lipschitz: 5.0,
        tolres: 1e-300,
        init: InitScheme::Equidistant,
        max_iterations: Some(2000),
        ..SbgdParams::default()
    };
    let r = run_tolerance(&params, &f).unwrap();
    assert_ne!(r.termination, Termination::MaxIterations);
    for rec in &r.trajectory {
        assert!((rec.total_mass() - 1.0).abs() < 1e-12);
        for a in &rec.agents {
            assert_eq!(a.active, a.mass > 0.0);
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let f = paper_objective();
    for variant in [Variant::Basic, Variant::Tolerance, Variant::Baseline] {
        let params = SbgdParams {
            agents: 25,
            lipschitz: 8.0,
            seed: 11,
            variant,
            ..SbgdParams::default()
        };
        let a = sbgd_core::run(&params, &f).unwrap();
        let b = sbgd_core::run(&params, &f).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn observer_sees_every_accepted_step() {
    let f = paper_objective();
    let params = SbgdParams {
        agents: 15,
        lipschitz: 5.0,
        seed: 5,
        ..SbgdParams::default()
    };
    let mut seen = 0usize;
    let mut bad = 0usize;
    let mut observer = |s: &AcceptedStep<'_>| {
        seen += 1;
        let g2: f64 = s.gradient.iter().map(|g| g * g).sum();
        let moved: Vec<f64> = s
            .from
            .iter()
            .zip(s.gradient)
            .map(|(x, g)| x - s.outcome.step * g)
            .collect();
        if f.value(&moved) > s.f_from - s.lambda_eff * s.outcome.step * g2 {
            bad += 1;
        }
    };
    let r = run_observed(&params, &f, &mut observer).unwrap();
    let expected: usize = r.trajectory[..r.trajectory.len() - 1]
        .iter()
        .zip(&r.trajectory[1..])
        .map(|(_, next)| next.active_count())
        .sum();
    assert_eq!(seen, expected);
    assert_eq!(bad, 0);
}

#[test]
fn minimizer_sequence_and_range_bound() {
    let f = paper_objective();
    let oracle = grid_oracle(&f, 1e-4).unwrap();
    for seed in 0..10 {
        for variant in [Variant::Basic, Variant::Tolerance] {
            let params = SbgdParams {
                agents: 20,
                lipschitz: 5.0,
                seed,
                variant,
                ..SbgdParams::default()
            };
            let r = sbgd_core::run(&params, &f).unwrap();
            assert_eq!(first_increase(&minimizer_values(&r.trajectory)), None);
            assert_eq!(range_bound_violation(&r.trajectory, oracle.f_min), None);
            assert!(oracle.f_min <= r.f_solution);

            let sums = summability_partial_sums(&r.trajectory, &f);
            assert!(sums.windows(2).all(|w| w[1] >= w[0]));
            assert!(sums.last().unwrap().is_finite());
        }
    }
}

#[test]
fn exact_lipschitz_bound_is_enforced() {
    // declares L = 2 for a function with curvature 20; the first steps overshoot
    let stiff = Objective::new(
        "stiff",
        BoxDomain::cube(1, -1.0, 1.0).unwrap(),
        |x| 10.0 * x[0] * x[0],
        |x| vec![20.0 * x[0]],
    );
    let params = SbgdParams {
        agents: 2,
        lipschitz: 2.0,
        lipschitz_exact: true,
        ..SbgdParams::default()
    };
    let mut s =
        Swarm::from_agents(vec![Agent::new(vec![0.5], 0.5), Agent::new(vec![0.9], 0.5)]).unwrap();
    let err = step(&mut s, &params, &stiff).unwrap_err();
    assert!(matches!(
        err,
        sbgd_core::SbgdError::StepBoundViolation { .. }
    ));
    let relaxed = SbgdParams {
        lipschitz_exact: false,
        ..params
    };
    let mut s =
        Swarm::from_agents(vec![Agent::new(vec![0.5], 0.5), Agent::new(vec![0.9], 0.5)]).unwrap();
    step(&mut s, &relaxed, &stiff).unwrap();
}
