//! Output files: provenance headers, stdout fallback, resumable CSV.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::CliError;

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

/// Comment lines identifying the tool version, the command and its settings.
pub fn header(command: &str, provenance: &str) -> String {
    format!("# qanneal {}\n# command: {command}\n# config: {provenance}\n", env!("CARGO_PKG_VERSION"))
}

pub fn create(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// Opens a CSV for a grid run. With `resume`, an existing file must carry
/// the same preamble; a torn last line is cut off and the number of
/// complete data rows is returned so the run can skip them.
pub fn open_csv(path: Option<&Path>, preamble: &str, resume: bool) -> Result<(Box<dyn Write>, usize), CliError> {
    let existing = match (path, resume) {
        (None, true) => return Err(CliError::Usage("--resume needs --out".into())),
        (Some(p), true) if p.exists() => Some(p),
        _ => None,
    };
    let Some(p) = existing else {
        let mut w = create(path)?;
        w.write_all(preamble.as_bytes()).map_err(|e| CliError::Usage(format!("writing output: {e}")))?;
        w.flush().map_err(|e| CliError::Usage(format!("writing output: {e}")))?;
        return Ok((w, 0));
    };
    let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
    let Some(body) = text.strip_prefix(preamble) else {
        return Err(CliError::Usage(format!(
            "{}: header does not match this run's settings; refusing to resume",
            p.display()
        )));
    };
    let complete = body.rfind('\n').map_or(0, |i| i + 1);
    let rows = body[..complete].lines().filter(|l| !l.starts_with('#') && !l.is_empty()).count();
    let keep = (preamble.len() + complete) as u64;
    let file = OpenOptions::new().write(true).open(p).map_err(|e| io_err(p, e))?;
    file.set_len(keep).map_err(|e| io_err(p, e))?;
    drop(file);
    let file = OpenOptions::new().append(true).open(p).map_err(|e| io_err(p, e))?;
    Ok((Box::new(file), rows))
}
