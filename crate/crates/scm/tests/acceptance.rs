//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines.
//!
//! Expected values come from independent oracles computed at runtime (KKT
//! active-set enumeration, cyclic-projection references) or from closed
//! forms; nothing is compared against the solver's own output history.

use std::time::{Duration, Instant};

use rand::RngExt;

use scm::diagnostics::{
    check_composition_bound_sampled, check_contraction, check_cutter, check_fejer_trace,
    check_fne, check_idempotent, check_nonexpansive,
};
use scm::fixtures::{random_halfspaces_with_interior, random_mixed_stack_with_interior};
use scm::io::write_jsonl_trace;
use scm::linalg::{self, Matrix};
use scm::monotone::MonotoneMap;
use scm::operators::{FneOperator, OperatorStack};
use scm::oracle::{
    project_intersection, project_polyhedron_exact, sample_feasible, solve_vip_reference,
    vip_residual, Polyhedron,
};
use scm::sampling;
use scm::solver::{
    solve, solve_observed, BetaSchedule, ErrorModel, LambdaSchedule, MuChoice, ScmConfig,
};

const OPERATOR_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-9;

fn conclude(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

fn standard_config(max_iters: u64, seed: u64) -> ScmConfig {
    ScmConfig {
        mu: MuChoice::Auto,
        beta: BetaSchedule::power(1.0, 1.0).expect("beta_n = 1/n"),
        lambda: LambdaSchedule::constant(0.5, 0.5).expect("lambda_n = 1/2"),
        error: ErrorModel::None,
        max_iters,
        residual_tol: 0.0,
        trace_every: 1,
        seed,
    }
}

/// The minimal-norm benchmark: d = 5, three random halfspaces containing a
/// ball, origin infeasible.
fn minimal_norm_problem() -> scm::fixtures::StackFixture {
    random_halfspaces_with_interior(5, 3, 0)
}

fn minimal_norm_oracle(fx: &scm::fixtures::StackFixture) -> Vec<f64> {
    let poly = Polyhedron::from_stack(&fx.stack).expect("halfspace stack");
    project_polyhedron_exact(&poly, &vec![0.0; fx.stack.dim()])
        .expect("within budget")
        .point()
        .expect("nonempty by construction")
        .to_vec()
}

/// The affine benchmark: d = 4, ball and two halfspaces, eta = 1, kappa = 2
/// exactly, unconstrained zero of F outside the feasible set.
fn affine_problem() -> (OperatorStack, MonotoneMap) {
    let a = Matrix::from_rows(vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 2.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.5, 0.0],
        vec![0.0, 0.0, 0.0, 1.2],
    ])
    .expect("square");
    let f = MonotoneMap::affine(a, vec![4.0, -2.0, 1.0, -4.0]).expect("eta = 1, kappa = 2");
    assert!((f.eta() - 1.0).abs() < 1e-12 && (f.kappa() - 2.0).abs() < 1e-12);
    let stack = OperatorStack::new(
        vec![
            FneOperator::ball(vec![0.2, -0.1, 0.0, 0.3], 2.0).expect("ball"),
            FneOperator::halfspace(vec![1.0, 1.0, 0.0, 0.0], 1.0).expect("halfspace"),
            FneOperator::halfspace(vec![-0.5, 0.0, 1.0, 0.0], 0.8).expect("halfspace"),
        ],
        4,
    )
    .expect("consistent dims");
    (stack, f)
}

fn operator_catalog(dim: usize, seed: u64) -> Vec<FneOperator> {
    let mut rng = sampling::rng_from_label(seed, "acceptance-catalog");
    let normal = sampling::unit_vector(&mut rng, dim);
    let center = sampling::gaussian_vector(&mut rng, dim, 1.0);
    let lo: Vec<f64> = center.iter().map(|c| c - 1.5).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + 0.5).collect();
    let mut resolvent_rows = Vec::with_capacity(dim);
    for _ in 0..dim {
        resolvent_rows.push(sampling::gaussian_vector(&mut rng, dim, 0.3));
    }
    let g = Matrix::from_rows(resolvent_rows).expect("square");
    let lift = -linalg::min_symmetric_eigenvalue(&g).expect("symmetric").min(0.0) + 0.05;
    let mut monotone = g;
    for i in 0..dim {
        monotone.set(i, i, monotone.at(i, i) + lift);
    }
    vec![
        FneOperator::halfspace(normal.clone(), 0.4).expect("halfspace"),
        FneOperator::hyperplane(normal, -0.7).expect("hyperplane"),
        FneOperator::ball(center.clone(), 1.8).expect("ball"),
        FneOperator::axis_box(lo, hi).expect("box"),
        FneOperator::soft_threshold(0.6).expect("soft threshold"),
        FneOperator::linear_resolvent(monotone, 0.9).expect("monotone by construction"),
    ]
}

#[test]
fn criterion_1_operator_certification() {
    let start = Instant::now();
    let samples = 1000;
    let mut worst = 0.0f64;
    let mut checks = 0;
    for dim in [2, 10, 64] {
        for (i, op) in operator_catalog(dim, dim as u64).iter().enumerate() {
            let seed = 1000 + dim as u64 * 10 + i as u64;
            let mut reports = vec![
                check_fne(op, dim, samples, seed),
                check_nonexpansive(op, dim, samples, seed),
                check_cutter(op, dim, samples, seed),
            ];
            if op.is_projection() {
                reports.push(check_idempotent(op, dim, samples, seed));
            }
            for r in reports {
                assert!(
                    r.worst_violation <= OPERATOR_TOL,
                    "dim {dim}: {} violation {:.3e}",
                    r.name,
                    r.worst_violation
                );
                worst = worst.max(r.worst_violation);
                checks += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    conclude(
        "criterion 1 (operator certification)",
        worst <= OPERATOR_TOL && elapsed < Duration::from_secs(5),
        &format!("{checks} checks, worst violation {worst:.3e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_yamada_contraction() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for map_idx in 0..20u64 {
        let dim = 2 + (map_idx as usize) % 9; // d in [2, 10]
        let map = scm::fixtures::random_affine_map(dim, 0.3, 100 + map_idx)
            .expect("strongly monotone fixture");
        let upper = 2.0 * map.eta() / (map.kappa() * map.kappa());
        let mut rng = sampling::rng_from_label(map_idx, "acceptance-mu-beta");
        for _ in 0..10 {
            let mu = upper * (0.05 + 0.9 * rng.random::<f64>());
            let beta = 0.05 + 0.95 * rng.random::<f64>();
            let report = check_contraction(&map, mu, beta, dim, 1000, 7 + map_idx)
                .expect("valid parameters by construction");
            assert!(
                report.worst_violation <= OPERATOR_TOL,
                "map {map_idx}, mu={mu}, beta={beta}: violation {:.3e}",
                report.worst_violation
            );
            worst = worst.max(report.worst_violation);
        }
    }
    let elapsed = start.elapsed();
    conclude(
        "criterion 2 (damped-step contraction)",
        worst <= OPERATOR_TOL && elapsed < Duration::from_secs(10),
        &format!("200 parameter draws, worst violation {worst:.3e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_3_composition_bound() {
    let mut worst = 0.0f64;
    for idx in 0..100u64 {
        let dim = 2 + (idx as usize) % 7; // d in [2, 8]
        let m = 1 + (idx as usize) % 6; // m in [1, 6]
        let fx = random_mixed_stack_with_interior(dim, m, 300 + idx);
        let report = check_composition_bound_sampled(
            &fx.stack,
            &fx.inner_center,
            fx.inner_radius,
            100,
            500 + idx,
        )
        .expect("interior ball certified by the fixture");
        assert!(
            report.worst_violation <= OPERATOR_TOL,
            "stack {idx}: violation {:.3e}",
            report.worst_violation
        );
        worst = worst.max(report.worst_violation);
    }
    conclude(
        "criterion 3 (composition bound)",
        worst <= OPERATOR_TOL,
        &format!("100 stacks x 100 pairs, worst violation {worst:.3e}"),
    );
}

#[test]
fn criterion_4_convergence_vs_oracle() {
    let start = Instant::now();
    let fx = minimal_norm_problem();
    let x_star = minimal_norm_oracle(&fx);
    // cross-validate the KKT point against the projected-iteration route
    let reference = solve_vip_reference(
        &MonotoneMap::identity(),
        |y| project_intersection(&fx.stack, y),
        &[0.0; 5],
    )
    .expect("feasible by construction");
    let oracle_gap = linalg::dist(&x_star, &reference);
    assert!(oracle_gap <= ORACLE_TOL, "oracle disagreement {oracle_gap:.3e}");

    let cfg = standard_config(100_000, 0);
    let run = solve(&fx.stack, &MonotoneMap::identity(), &[0.0; 5], &cfg)
        .expect("valid configuration");
    let rel = linalg::dist(&run.x_final, &x_star) / (1.0 + linalg::norm(&x_star));
    let elapsed = start.elapsed();
    conclude(
        "criterion 4 (error-free convergence vs oracle)",
        rel <= 1e-3 && elapsed < Duration::from_secs(5),
        &format!("relative distance {rel:.3e} after {} iterations, {elapsed:.2?}", run.iters),
    );
}

#[test]
fn criterion_5_convergence_affine_map() {
    let (stack, f) = affine_problem();
    let x_ref = solve_vip_reference(&f, |y| project_intersection(&stack, y), &[0.0; 4])
        .expect("feasible by construction");
    let cfg = standard_config(100_000, 0);
    let run = solve(&stack, &f, &[0.0; 4], &cfg).expect("valid configuration");
    let rel = linalg::dist(&run.x_final, &x_ref) / (1.0 + linalg::norm(&x_ref));

    let samples = sample_feasible(&stack, &x_ref, 2.0, 200, 123).expect("interior is reachable");
    let residual = vip_residual(&f, &run.x_final, &samples).expect("nonempty samples");
    conclude(
        "criterion 5 (affine-map convergence and optimality residual)",
        rel <= 1e-3 && residual <= 1e-3,
        &format!("relative distance {rel:.3e}, optimality residual {residual:.3e} on 200 samples"),
    );
}

#[test]
fn criterion_6_error_robustness() {
    let fx = minimal_norm_problem();
    let x_star = minimal_norm_oracle(&fx);
    let (c, q) = (0.1, 1.5);
    let m = fx.stack.len() as f64;
    let mut worst_rel = 0.0f64;
    let mut worst_accounting = 0.0f64;
    for seed in 1..=5u64 {
        let mut cfg = standard_config(100_000, seed);
        cfg.error = ErrorModel::power_random(c, q, seed).expect("q > 1");
        let run = solve(&fx.stack, &MonotoneMap::identity(), &[0.0; 5], &cfg)
            .expect("valid configuration");
        let rel = linalg::dist(&run.x_final, &x_star) / (1.0 + linalg::norm(&x_star));
        worst_rel = worst_rel.max(rel);

        let recorded: f64 = run.trace.iter().map(|r| r.error_norm_total).sum();
        let analytic: f64 = (1..=cfg.max_iters)
            .map(|n| m * (c / (n as f64).powf(q)))
            .sum();
        worst_accounting = worst_accounting.max((recorded - analytic).abs());
    }
    conclude(
        "criterion 6 (summable-error robustness)",
        worst_rel <= 1e-2 && worst_accounting <= 1e-12,
        &format!(
            "worst relative distance {worst_rel:.3e} over 5 seeds, \
             accounting mismatch {worst_accounting:.3e}"
        ),
    );
}

#[test]
fn criterion_7_fejer_trace() {
    let fx = minimal_norm_problem();
    let cfg = standard_config(100_000, 0);
    let mut intermediates = Vec::with_capacity(cfg.max_iters as usize);
    let mut lambdas = Vec::with_capacity(cfg.max_iters as usize);
    solve_observed(
        &fx.stack,
        &MonotoneMap::identity(),
        &[0.0; 5],
        &cfg,
        None,
        |record, inter| {
            intermediates.push(inter.to_vec());
            lambdas.push(record.lambda_n);
        },
    )
    .expect("valid configuration");
    // the fixture's interior ball center is exactly feasible by construction
    let report = check_fejer_trace(&intermediates, &lambdas, &fx.stack, &fx.inner_center)
        .expect("z is a common fixed point");
    conclude(
        "criterion 7 (per-iteration Fejer inequality)",
        report.pass && report.samples == 100_000,
        &format!(
            "worst violation {:.3e} over {} iterations",
            report.worst_violation, report.samples
        ),
    );
}

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().expect("tempdir");
    let fx = minimal_norm_problem();

    let run_c4 = || {
        let cfg = standard_config(100_000, 0);
        solve(&fx.stack, &MonotoneMap::identity(), &[0.0; 5], &cfg).expect("valid")
    };
    let run_c6 = || {
        let mut cfg = standard_config(100_000, 3);
        cfg.error = ErrorModel::power_random(0.1, 1.5, 3).expect("q > 1");
        solve(&fx.stack, &MonotoneMap::identity(), &[0.0; 5], &cfg).expect("valid")
    };

    let mut identical = true;
    for (label, runner) in [("c4", &run_c4 as &dyn Fn() -> _), ("c6", &run_c6)] {
        let first = dir.path().join(format!("{label}_a.jsonl"));
        let second = dir.path().join(format!("{label}_b.jsonl"));
        write_jsonl_trace(&first, &runner().trace).expect("write");
        write_jsonl_trace(&second, &runner().trace).expect("write");
        let bytes_a = std::fs::read(&first).expect("read");
        let bytes_b = std::fs::read(&second).expect("read");
        identical &= bytes_a == bytes_b;
        assert!(!bytes_a.is_empty());
    }
    conclude(
        "criterion 8 (bitwise-deterministic traces)",
        identical,
        "criterion-4 and criterion-6 reruns byte-identical",
    );
}

#[test]
fn criterion_9_oracle_self_consistency() {
    let mut worst_gap = 0.0f64;
    let mut worst_optimality = 0.0f64;
    for idx in 0..50u64 {
        let dim = 2 + (idx as usize) % 5; // d in [2, 6]
        let m = 1 + (idx as usize) % 6; // m in [1, 6]
        let fx = random_halfspaces_with_interior(dim, m, 700 + idx);
        let origin = vec![0.0; dim];
        let poly = Polyhedron::from_stack(&fx.stack).expect("halfspace stack");
        let kkt = project_polyhedron_exact(&poly, &origin)
            .expect("within budget")
            .point()
            .expect("nonempty by construction")
            .to_vec();
        let reference = solve_vip_reference(
            &MonotoneMap::identity(),
            |y| project_intersection(&fx.stack, y),
            &origin,
        )
        .expect("feasible by construction");
        worst_gap = worst_gap.max(linalg::dist(&kkt, &reference));

        // 100 feasible points per instance: half rejection-sampled around
        // the projection, half drawn from the certified interior ball
        let half_width = linalg::dist(&kkt, &fx.inner_center) + fx.inner_radius + 0.5;
        let mut points =
            sample_feasible(&fx.stack, &kkt, half_width, 50, 800 + idx).expect("reachable");
        let mut rng = sampling::rng_from_label(900 + idx, "acceptance-interior");
        for _ in 0..50 {
            points.push(fx.interior_point(&mut rng));
        }
        let d_star = linalg::norm(&kkt);
        for v in &points {
            worst_optimality = worst_optimality.max(d_star - linalg::norm(v));
        }
    }
    conclude(
        "criterion 9 (oracle self-consistency)",
        worst_gap <= ORACLE_TOL && worst_optimality <= ORACLE_TOL,
        &format!(
            "worst oracle gap {worst_gap:.3e}, worst optimality violation \
             {worst_optimality:.3e} over 50 instances"
        ),
    );
}
