//! The reference function `φ` built from a subsample, its constants and the
//! Bregman divergence it induces.

use inspag::bregman::{relative_constants, Preconditioner};
use inspag::problem::{generate_synthetic, LogRegProblem};

fn main() -> inspag::Result<()> {
    let problem = LogRegProblem::new(generate_synthetic(0, 2000, 20, 0.5)?, 1e-3, 1e-3)?;
    let sigma = 1e-3;

    for n in [50, 200, 1000] {
        let phi = Preconditioner::from_problem(&problem, n, sigma, 0)?;
        let c = phi.constants();
        println!("n = {n:4}: L_phi = {:.3}, mu_phi = {:.1e}, kappa_phi = {:.0}", c.l_phi, c.mu_phi, c.kappa());
    }

    let phi = Preconditioner::from_problem(&problem, 500, sigma, 0)?;
    let rel = relative_constants(problem.smoothness_constants()?.mu_strong, sigma)?;
    println!("relative constants: L = {:.3}, mu = {:.3}, kappa = {:.3}", rel.l_rel, rel.mu_rel, rel.kappa_rel);

    let u = vec![0.0; problem.dim()];
    let x: Vec<f64> = (0..problem.dim()).map(|i| (i as f64 * 0.7).sin()).collect();
    println!("D_phi[u](x) = {:.4e}", phi.bregman_div(&u, &x)?);

    let tri = phi.triangle_scaling_check(phi.constants().kappa(), 200, 1)?;
    println!("triangle scaling: max ratio {:.3} over {} samples (G = kappa_phi)", tri.max_ratio, tri.evaluated);
    Ok(())
}
