//! Energy-efficiency maximization on a batch of channel draws.

use hybrid_ee::channel::{generate_channel, ChannelParams, DEFAULT_NOISE_MW};
use hybrid_ee::dinkelbach::run_seem;
use hybrid_ee::{PowerParams, SystemDims, Tolerances};

fn main() -> hybrid_ee::Result<()> {
    let dims = SystemDims::new(16, 4, 4)?;
    let params = PowerParams::reference(dims.n_tx);
    let tol = Tolerances::default();
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    for seed in 0..seeds {
        let h = generate_channel(&dims, &ChannelParams::default(), seed)?;
        let start = std::time::Instant::now();
        let res = run_seem(&h, &dims, &params, DEFAULT_NOISE_MW, &tol)?;
        println!(
            "seed {seed}: see {:.4} (relaxed {:.4}) rate {:.3} power {:.0} mW active {} outer {} sweeps {} converged {} {:.2?}",
            res.see,
            res.see_relaxed,
            res.rate,
            res.power_mw,
            hybrid_ee::model::mapping_from_analog(&res.precoder.a, tol.zero_thresh).active_entries(),
            res.outer_iterations,
            res.inner_sweeps,
            res.converged,
            start.elapsed()
        );
    }
    Ok(())
}
