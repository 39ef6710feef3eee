//! Adaptive accelerated method with exact and inexact models of a quadratic,
//! printing the realized gap next to its certificate.

use inspag::agm::{run_agm, certified_gap_bounds, AgmConfig, InexactnessSchedule, QuadraticModel};
use inspag::hyperfast::testfns::QuadraticFn;
use inspag::hyperfast::SmoothOracle;

fn main() -> inspag::Result<()> {
    let f = QuadraticFn::random(3, 30, 1e-3, 1.0);
    let x_star = f.minimizer();
    let f_star = f.min_value();
    let x0 = vec![0.0; f.dim()];
    let d0 = 0.5 * x_star.iter().map(|v| v * v).sum::<f64>();

    for (label, delta) in [("exact", 0.0), ("delta = 1e-2", 1e-2)] {
        let mut model = QuadraticModel::euclidean(f.clone())?;
        if delta > 0.0 {
            model = model.with_noise();
        }
        let run = run_agm(&x0, &mut model, &InexactnessSchedule::constant(delta, 0.0), 150, &AgmConfig::default())?;
        let bounds = certified_gap_bounds(d0, &run.records);
        println!("{label}");
        for (r, b) in run.records.iter().zip(&bounds).filter(|(r, _)| r.k % 30 == 0) {
            println!("  k = {:3}  A = {:9.3e}  M = {:5.2}  gap = {:9.3e}  bound = {:9.3e}", r.k, r.a, r.m, f.value(&r.x) - f_star, b);
        }
    }
    Ok(())
}
