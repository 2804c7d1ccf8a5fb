//! Power consumption breakdown for a few connection patterns.

use hybrid_ee::model::{gca_count, sparsity_power, total_power};
use hybrid_ee::{CMat, MappingMatrix, PowerParams, SystemDims, C64};

fn main() -> hybrid_ee::Result<()> {
    let dims = SystemDims::new(16, 4, 4)?;
    let params = PowerParams::reference(dims.n_tx);
    let m_gca = gca_count(&dims, &params);
    println!("N_T={} N_RF={} K={}", dims.n_tx, dims.n_rf, dims.n_users);
    println!("static consumption {:.1} mW, GCAs {m_gca}, PA factor {:.3}", params.p_cons(&dims), params.pa_factor());

    let half = MappingMatrix::new(nalgebra::DMatrix::from_fn(dims.n_tx, dims.n_rf, |t, _| t < dims.n_tx / 2));
    let single = MappingMatrix::new(nalgebra::DMatrix::from_fn(dims.n_tx, dims.n_rf, |t, n| t % dims.n_rf == n));
    for (name, b) in [
        ("fully connected", MappingMatrix::ones(dims.n_tx, dims.n_rf)),
        ("half the antennas", half),
        ("one chain per antenna", single),
        ("nothing connected", MappingMatrix::zeros(dims.n_tx, dims.n_rf)),
    ] {
        println!(
            "{name:>22}: {:>3} switches on, {} chains, {:>2} antennas, sparsity power {:.1} mW",
            b.active_entries(),
            b.active_rf_chains(),
            b.active_antennas(),
            sparsity_power(&b, &params, m_gca)
        );
    }

    // Equal-phase analog matrix with a digital precoder spreading 1 mW per user.
    let a = CMat::from_element(dims.n_tx, dims.n_rf, C64::new(1.0, 0.0));
    let w = CMat::identity(dims.n_rf, dims.n_users).scale(1.0 / (dims.n_tx as f64).sqrt());
    let p = total_power(&w, &a, &dims, &params, None)?;
    println!("total power with 4 mW radiated: {p:.1} mW");
    Ok(())
}
