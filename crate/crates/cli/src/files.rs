//! Reading inputs and writing outputs. Every output goes to a temporary file
//! in the destination directory and is renamed into place once complete.

use std::io::Write;
use std::path::{Path, PathBuf};

use tabsyn_core::{DataTable, TableSchema};

use crate::csv_io::{parse_csv, serialize_csv};
use crate::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Absolute form of a path that may not exist yet.
fn resolve(path: &Path) -> PathBuf {
    if let Ok(p) = path.canonicalize() {
        return p;
    }
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let base = parent.canonicalize().unwrap_or_else(|_| parent.to_path_buf());
    match path.file_name() {
        Some(name) => base.join(name),
        None => base,
    }
}

/// Rejects an output that is also an input, or two outputs on one path.
pub fn check_paths(inputs: &[&Path], outputs: &[&Path]) -> CliResult<()> {
    let ins: Vec<PathBuf> = inputs.iter().map(|p| resolve(p)).collect();
    let mut outs: Vec<PathBuf> = Vec::new();
    for out in outputs {
        let r = resolve(out);
        if ins.contains(&r) {
            return Err(CliError::Usage(format!("{} is both an input and an output", out.display())));
        }
        if outs.contains(&r) {
            return Err(CliError::Usage(format!("{} is given as two outputs", out.display())));
        }
        outs.push(r);
    }
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn load_schema(path: &Path) -> CliResult<TableSchema> {
    read_json(path)
}

pub fn load_table(path: &Path, schema: &TableSchema) -> CliResult<DataTable> {
    let text = read_text(path)?;
    parse_csv(&text, schema).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn save_table(path: &Path, table: &DataTable) -> CliResult<()> {
    write_atomic(path, serialize_csv(table).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn same_path_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "x").unwrap();
        let dotted = dir.path().join(".").join("a.csv");
        assert!(check_paths(&[&a], &[&dotted]).is_err());
        let b = dir.path().join("b.csv");
        assert!(check_paths(&[&a], &[&b, &b]).is_err());
        assert!(check_paths(&[&a], &[&b]).is_ok());
    }
}
