use inspag::hyperfast::testfns::{QuarticNorm, StronglyConvexQuartic};
use inspag::hyperfast::{
    basic_hyperfast, restart_strongly_convex, restart_uniformly_convex, HyperfastConfig, LogisticOracle,
    RestartScheduleStrong, RestartScheduleUniform, SmoothOracle,
};
use inspag::problem::{generate_synthetic, LogRegProblem};
use inspag::reference::logistic_reference;

fn main() -> inspag::Result<()> {
    let cfg = HyperfastConfig::default();

    let problem = LogRegProblem::new(generate_synthetic(5, 40, 4, 1.0)?, 1e-3, 1e-3)?;
    let reference = logistic_reference(&problem)?;
    let oracle = LogisticOracle::new(&problem)?;
    let z0 = vec![0.0; 4];

    // Fixed step budgets of the basic method.
    for n in [2, 4, 8] {
        let out = basic_hyperfast(&oracle, &z0, n, &cfg)?;
        println!("basic, N = {n}: gap {:.3e}", oracle.value(&out.point) - reference.value);
    }

    let radius = reference.point.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let sched = RestartScheduleStrong::new(2.0 * radius, 1e-3);
    let out = restart_strongly_convex(&oracle, &z0, &sched, 1e-12, &cfg)?;
    for r in &out.restarts {
        println!(
            "strong restart {}: N = {}, gap {:.3e} <= {:.3e}",
            r.index,
            r.steps,
            oracle.value(&r.point) - reference.value,
            r.certified_gap
        );
    }

    let quartic = QuarticNorm::new(vec![0.5, -0.5, 1.0]);
    let z0 = vec![2.0, 1.0, 0.0];
    let sched = RestartScheduleUniform::new(4.0, QuarticNorm::SIGMA_4, quartic.value(&z0));
    let out = restart_uniformly_convex(&quartic, &sched, &z0, 1e-12, &cfg)?;
    let steps: Vec<usize> = out.restarts.iter().map(|r| r.steps).collect();
    println!("quartic, q = 4: {} restarts with steps {steps:?}", out.restarts.len());

    let scq = StronglyConvexQuartic::new(vec![1.0, -1.0], 1.0);
    let z0 = vec![3.0, 3.0];
    let sched = RestartScheduleUniform::new(2.0, 1.0, scq.value(&z0));
    let out = restart_uniformly_convex(&scq, &sched, &z0, 1e-12, &cfg)?;
    for r in &out.restarts {
        println!("q = 2 restart {}: f = {:.3e} <= {:.3e}", r.index, scq.value(&r.point), r.certified_gap);
    }
    Ok(())
}
