//! Command-line front end: JSON problem configs in, JSON reports, CSV
//! curves, and SVG figures out. All logic lives in library functions so
//! integration tests can drive the commands without spawning processes.

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

pub use commands::{cmd_analyze, cmd_nyquist, cmd_plot, cmd_validate, CmdOut, PlotKind};

/// Honors `SRG_THREADS` by capping the global thread pool. Call once at
/// startup; later calls are no-ops because the pool is already built.
pub fn init_threads() {
    if let Ok(v) = std::env::var("SRG_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}
