//! Full distributed run: data sharded over simulated workers, the central
//! node preconditioned with a subsample and its projections solved by the
//! restarted Hyperfast method.

use inspag::inspag::{run_inspag, InspagConfig};
use inspag::metrics::{write_round_csv, RoundRecord};
use inspag::problem::{generate_synthetic, LogRegProblem};
use inspag::reference::logistic_reference;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = LogRegProblem::new(generate_synthetic(0, 2000, 20, 0.5)?, 1e-3, 1e-3)?;
    let f_star = logistic_reference(&problem)?.value;

    for n_precond in [100, 500, 1000] {
        let cfg = InspagConfig {
            workers: 4,
            n_precond,
            sigma: 1e-3,
            target: 1e-9,
            k_max: 60,
            ..InspagConfig::default()
        };
        let run = run_inspag(&problem, &cfg)?;
        let last = run.steps.last().expect("at least one iteration");
        println!(
            "n = {n_precond:4}: {} iterations, {} rounds, {} bytes, gap {:.2e}, certificate {:.2e}, {} inner iterations",
            run.steps.len(),
            run.rounds(),
            run.ledger.total_bytes(),
            problem.loss_value(&last.x)? - f_star,
            run.certificates.last().unwrap(),
            run.total_inner_iters()
        );
        if n_precond == 500 {
            let rows = RoundRecord::from_trials(&run.trials);
            let mut out = Vec::new();
            write_round_csv(&mut out, &rows)?;
            print!("{}", String::from_utf8(out)?.lines().take(6).collect::<Vec<_>>().join("\n"));
            println!("\n...");
        }
    }
    Ok(())
}
