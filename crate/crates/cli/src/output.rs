use std::fs;
use std::io::Write;
use std::path::Path;

use cmshift::Result;

use crate::commands::Output;

/// Write `contents` to `path` through a temporary file in the same directory and a rename,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_outputs(dir: &Path, o: &Output) -> Result<()> {
    let mut json = serde_json::to_string_pretty(&o.document()).expect("json");
    json.push('\n');
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    for (name, data) in &o.tables {
        write_atomic(&dir.join(name), data)?;
    }
    Ok(())
}
