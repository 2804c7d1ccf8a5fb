//! Fully digital ascent on seeded instances and the resulting energy-efficiency bound
//! next to the proposed and heuristic designs.
//!
//! `cargo run --release --example fdp_upper_bound -- [seeds]`

use hybrid_ee::baselines::{heuristic_from, run_fdp_upper, upper_bound_see};
use hybrid_ee::channel::{generate_channel, ChannelParams, DEFAULT_NOISE_MW};
use hybrid_ee::dinkelbach::run_seem;
use hybrid_ee::model::mapping_from_analog;
use hybrid_ee::{PowerParams, SystemDims, Tolerances};

fn main() -> hybrid_ee::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let dims = SystemDims::new(16, 4, 4)?;
    let params = PowerParams::reference(dims.n_tx);
    let tol = Tolerances::default();
    for seed in 0..seeds {
        let h = generate_channel(&dims, &ChannelParams::default(), seed)?;
        let fdp = run_fdp_upper(&h, &dims, &params, DEFAULT_NOISE_MW, tol.tau_up)?;
        let heur = heuristic_from(&fdp, &h, &dims, &params, DEFAULT_NOISE_MW)?;
        let prop = run_seem(&h, &dims, &params, DEFAULT_NOISE_MW, &tol)?;
        let bound_prop = upper_bound_see(&fdp, &mapping_from_analog(&prop.precoder.a, tol.zero_thresh), &dims, &params)?;
        let bound_heur = upper_bound_see(&fdp, &heur.mapping, &dims, &params)?;
        println!(
            "seed {seed}: eta~ {:.4e} (from {:.4e}) iters {} P_T {:.3e} mW rate {:.3} | proposed {:.4} bound {:.4} | heuristic {:.4} bound {:.4} off {}",
            fdp.eta_tilde,
            fdp.trace[0],
            fdp.iterations,
            fdp.u.transmit_power(),
            fdp.sum_rate,
            prop.see,
            bound_prop,
            heur.see,
            bound_heur,
            heur.deactivated,
        );
    }
    Ok(())
}
