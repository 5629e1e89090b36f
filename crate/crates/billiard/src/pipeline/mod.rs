//! File-based pipeline stages behind the command-line surface. Each stage
//! reads artifacts, writes its outputs atomically, and records the resolved
//! configuration next to them.

mod config;
mod stages;

pub use config::{Preset, RunConfig};
pub use stages::*;

use crate::binio::atomic_write;
use crate::error::Result;
use std::io::Write;
use std::path::Path;

/// Writes the sidecar metadata file `<out>.meta` naming the stage and the
/// resolved configuration digest.
pub fn write_sidecar(out: &Path, stage: &str, config: &RunConfig) -> Result<()> {
    let meta = out.with_extension(format!(
        "{}.meta",
        out.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    let text = config.resolved_text();
    let digest = config.digest();
    atomic_write(&meta, |w| {
        writeln!(w, "stage={stage}")?;
        writeln!(w, "config_digest={digest}")?;
        write!(w, "{text}")?;
        Ok(())
    })
}
