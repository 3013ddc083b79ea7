//! Block statistics over several eps and levels through the experiment
//! driver, printed as a table. Output files go to a temporary directory.
//!
//! cargo run --release --example block_table

use efdg::experiment::{run_experiment, ExperimentConfig, ProblemKind};

fn main() -> efdg::Result<()> {
    let mut config = ExperimentConfig::from_json(
        r#"{
            "problem": "test1",
            "eps": [1e-3, 1e-5, 1e-7],
            "levels": [1, 2, 3],
            "outputs": {"errors": false}
        }"#,
    )?;
    config.out = std::env::temp_dir().join("efdg_block_table");
    config.validate()?;
    let report = run_experiment(&config)?;
    print!("{}", report.table());

    config.problem = ProblemKind::Test2;
    config.eps = vec![1e-3];
    let report = run_experiment(&config)?;
    print!("{}", report.table());
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
