//! Inner solver at a few prices on one channel draw, with the sweep trace.

use hybrid_ee::channel::{generate_channel, ChannelParams, DEFAULT_NOISE_MW};
use hybrid_ee::wsrp::{default_init, finalize, run_wsrp, relaxed_see, DEFAULT_MAX_SWEEPS};
use hybrid_ee::{PowerParams, SystemDims, Tolerances};

fn main() -> hybrid_ee::Result<()> {
    let dims = SystemDims::new(16, 4, 4)?;
    let params = PowerParams::reference(dims.n_tx);
    let tol = Tolerances::default();
    let h = generate_channel(&dims, &ChannelParams::default(), 1)?;
    let init = default_init(&h.scaled(DEFAULT_NOISE_MW.sqrt()), &dims, &params, tol.eps_sparsity)?;
    for eta in [0.0, 0.2, 0.5, 1.0, 2.0] {
        let start = std::time::Instant::now();
        let out = run_wsrp(eta, &h, &init, &dims, &params, DEFAULT_NOISE_MW, &tol, DEFAULT_MAX_SWEEPS)?;
        let relaxed = relaxed_see(&h, &out.w, &out.a_relaxed, &dims, &params, DEFAULT_NOISE_MW, tol.zero_thresh)?;
        let hp = finalize(&out.w, &out.a_relaxed, &params, tol.zero_thresh)?;
        let final_see = hybrid_ee::model::see(&hp.w, &hp.a, &h, &dims, &params, DEFAULT_NOISE_MW)?;
        let last = out.rows.last().expect("trace has a row");
        println!(
            "eta={eta:5.1} sweeps={:3} ascent={} stalled={} rate={:.3} power={:.0} active={} see_relaxed={:.3} see_final={:.3} ({:.2?})",
            out.sweeps, out.ascent_sweeps, out.stalled, last.rate, last.power_mw, last.active_entries, relaxed, final_see,
            start.elapsed()
        );
    }
    Ok(())
}
