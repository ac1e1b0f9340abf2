use std::io::{BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// Writes through a temporary file in the destination directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut BufWriter<&mut std::fs::File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w).map_err(fail)?;
        w.flush().map_err(fail)?;
    }
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        std::fs::write(&p, "old contents that are longer").unwrap();
        write_atomic(&p, |w| w.write_all(b"new")).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
