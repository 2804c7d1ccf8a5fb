//! Small QCQPs from the solver's test family, checked against a dense search.

use hybrid_ee::oracles::{grid_minimum, random_qcqp};
use hybrid_ee::qcqp::{solve_qcqp, QcqpError, DEFAULT_MAX_ITER, DEFAULT_TOL};
use rand::SeedableRng;

fn main() -> hybrid_ee::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for i in 0..8 {
        let p = random_qcqp(&mut rng, i);
        let sol = match solve_qcqp(&p, DEFAULT_TOL, DEFAULT_MAX_ITER) {
            Ok(s) => s,
            Err(QcqpError::NotConverged(s)) => *s,
            Err(e) => return Err(e.into()),
        };
        let grid = grid_minimum(&p, 2.0);
        println!(
            "problem {i}: {} constraint(s), caps {}, solver {:.8} ({} iters, kkt {:.1e}) search {:.8}",
            p.quad_constraints.len(),
            p.modulus_caps.is_some(),
            sol.objective,
            sol.iterations,
            sol.kkt_residual,
            grid
        );
    }
    Ok(())
}
