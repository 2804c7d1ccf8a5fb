//! Greedy switch-off from the fully digital design, next to the proposed method.

use hybrid_ee::baselines::run_heuristic;
use hybrid_ee::channel::{generate_channel, ChannelParams, DEFAULT_NOISE_MW};
use hybrid_ee::dinkelbach::run_seem;
use hybrid_ee::{PowerParams, SystemDims, Tolerances};

fn main() -> hybrid_ee::Result<()> {
    let dims = SystemDims::new(8, 2, 2)?;
    let params = PowerParams::reference(dims.n_tx);
    let tol = Tolerances::default();
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let h = generate_channel(&dims, &ChannelParams::default(), seed)?;

    let heur = run_heuristic(&h, &dims, &params, DEFAULT_NOISE_MW, &tol)?;
    println!("fully digital: eta~ {:.4e} after {} ascent steps", heur.fdp.eta_tilde, heur.fdp.iterations);
    for (r, s) in heur.see_trace.iter().enumerate() {
        println!("round {r:>2}: best SEE {s:.5} nats/Hz/W");
    }
    println!(
        "heuristic: SEE {:.5}, {} switches off, {} of {} connections left",
        heur.see,
        heur.deactivated,
        heur.mapping.active_entries(),
        dims.n_tx * dims.n_rf
    );
    let prop = run_seem(&h, &dims, &params, DEFAULT_NOISE_MW, &tol)?;
    println!("proposed:  SEE {:.5}", prop.see);
    Ok(())
}
