//! Draws a trace dataset from a profile, writes it as CSV, reads it back
//! and prints the standardization statistics of the training split.
//!
//! cargo run --example generate_dataset -- s3 500

use meshrl::datagen::{fit_scaler, generate_dataset, read_csv, split_dataset, write_csv, Profile};
use meshrl::mesh_sim::BackendConfig;

fn main() -> meshrl::Result<()> {
    let mut args = std::env::args().skip(1);
    let profile = Profile::by_name(&args.next().unwrap_or_else(|| "s1".into()))?;
    let size: usize = args.next().map_or(400, |s| s.parse().expect("size"));

    let records = generate_dataset(&profile, size, 7, &BackendConfig::default())?;
    let path = std::env::temp_dir().join(format!("meshrl-{}.csv", profile.name));
    write_csv(&records, &path)?;
    let back = read_csv(&path)?;
    assert_eq!(back, records);
    println!("{} rows of {} in {}", back.len(), profile.name, path.display());

    let (train, test) = split_dataset(&back, 0.8, 7)?;
    let scaler = fit_scaler(&train)?;
    println!("train {} / test {}", train.len(), test.len());
    println!("input means  {:?}", scaler.input_mean.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>());
    println!("output means qps {:.2}, p503 {:.3}", scaler.output_mean[0], scaler.output_mean[1]);
    Ok(())
}
