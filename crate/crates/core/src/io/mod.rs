//! Persistence: FBPM field snapshots, trajectory CSV and custom symbol tables.

mod fbpm;
mod symbol;
mod trajectory;

pub use fbpm::{read_fbpm, read_fbpm_file, write_fbpm, write_fbpm_file, FBPM_MAGIC, FBPM_VERSION};
pub use symbol::{read_symbol_csv, write_symbol_csv};
pub use trajectory::{fb_column_name, read_trajectory_csv, write_trajectory_csv};

/// Float formatting shared by every CSV writer: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
