use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Writes `text` to `path` through a temporary file in the same directory and
/// a rename, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else {
        std::io::stdout().write_all(text.as_bytes()).map_err(CliError::io("stdout"))?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    tmp.write_all(text.as_bytes()).map_err(CliError::io(path))?;
    tmp.persist(path).map_err(|e| CliError::io(path)(e.error))?;
    Ok(())
}
