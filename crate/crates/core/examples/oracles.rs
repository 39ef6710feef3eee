//! Logistic-regression oracles on a synthetic dataset, checked against finite
//! differences.

use inspag::problem::{check_oracles, generate_synthetic, FdCheckConfig, LogRegProblem};

fn main() -> inspag::Result<()> {
    let data = generate_synthetic(1, 500, 10, 0.4)?;
    let problem = LogRegProblem::new(data, 1e-3, 1e-2)?;

    let x = vec![0.1; problem.dim()];
    let (value, grad) = problem.value_and_gradient(&x)?;
    let hv = problem.hessian_vec(&x, &grad)?;
    println!("F(x) = {value:.6}");
    println!("|grad F(x)| = {:.3e}", grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    println!("<g, H g> = {:.3e}", grad.iter().zip(&hv).map(|(a, b)| a * b).sum::<f64>());

    let c = problem.smoothness_constants()?;
    println!("L = {:.3}, mu = {:.1e}, kappa = {:.1}", c.l_smooth, c.mu_strong, c.kappa());
    println!("third-order Lipschitz: spectral {:.3e}, per-sample {:.3e}", c.l3, c.l3_sample);

    let report = check_oracles(&problem, &FdCheckConfig::default())?;
    println!(
        "finite differences over {} points: gradient {:.1e}, hessian-vector {:.1e}, third-order {:.1e}",
        report.points, report.gradient, report.hessian_vec, report.third_order
    );
    assert!(report.failures().is_empty());
    Ok(())
}
