//! Seeded sweep written as CSV. Pass a config path, or run the built-in tiny sweep.

use hybrid_ee::harness::{load_config, run_experiment, write_csv, ExperimentConfig, UsersSweep};

fn main() -> hybrid_ee::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => ExperimentConfig {
            n_tx: vec![4, 8],
            n_rf: vec![2],
            n_users: UsersSweep::MatchRf,
            p_max: vec![25.0, 50.0],
            n_realizations: 2,
            ..ExperimentConfig::default()
        },
    };
    let records = run_experiment(&cfg)?;
    write_csv(std::io::stdout().lock(), &records)?;
    Ok(())
}
