//! Seeded clustered channels: per-user gains against the path-loss prediction,
//! and the text serialization of one draw.

use hybrid_ee::channel::{generate_channel, path_loss_linear, write_channel, ChannelParams};
use hybrid_ee::SystemDims;

fn main() -> hybrid_ee::Result<()> {
    let dims = SystemDims::new(16, 4, 4)?;
    let params = ChannelParams::default();
    let pl = path_loss_linear(&params);
    println!("path loss {:.2} dB, expected |h_k|^2 = {:.4e}", 10.0 * pl.log10(), dims.n_tx as f64 / pl);

    let draws = 2000;
    let mut mean = 0.0;
    for seed in 0..draws {
        let h = generate_channel(&dims, &params, seed)?;
        mean += (0..dims.n_users).map(|k| h.user(k).norm_squared()).sum::<f64>();
    }
    mean /= (draws as usize * dims.n_users) as f64;
    println!("empirical mean over {draws} draws = {mean:.4e} (ratio {:.4})", mean * pl / dims.n_tx as f64);

    let small = SystemDims::new(4, 2, 2)?;
    let h = generate_channel(&small, &params, 7)?;
    write_channel(std::io::stdout().lock(), &h, 7)?;
    Ok(())
}
