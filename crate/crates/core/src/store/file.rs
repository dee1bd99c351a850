//! On-disk layout of one project log:
//!
//! ```text
//! <dir>/events.ndjson   one event per line, newline-terminated
//! <dir>/HEAD            {"sequence":N,"digest":"<digest of line N>"}
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::chain::Head;
use super::event::digest_line;
use crate::error::{Error, Result};

pub const LOG_FILE: &str = "events.ndjson";
pub const HEAD_FILE: &str = "HEAD";

/// Append handle on a project log directory.
#[derive(Debug)]
pub struct LogFile {
    dir: PathBuf,
    file: File,
}

/// Raw contents of a log directory.
#[derive(Debug, Clone)]
pub struct LogContents {
    pub lines: Vec<String>,
    pub head: Option<Head>,
}

impl LogFile {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(LOG_FILE);
        let file = OpenOptions::new()
            .create_new(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        Ok(LogFile {
            dir: dir.to_owned(),
            file,
        })
    }

    pub fn open_append(dir: &Path) -> Result<Self> {
        let path = dir.join(LOG_FILE);
        let file = OpenOptions::new()
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        Ok(LogFile {
            dir: dir.to_owned(),
            file,
        })
    }

    /// Durably appends one line, then moves the head to it.
    pub fn append(&mut self, sequence: u64, line: &str) -> Result<()> {
        let path = self.dir.join(LOG_FILE);
        let mut buf = Vec::with_capacity(line.len() + 1);
        buf.extend_from_slice(line.as_bytes());
        buf.push(b'\n');
        self.file.write_all(&buf).map_err(|e| Error::io(&path, e))?;
        self.file.sync_data().map_err(|e| Error::io(&path, e))?;
        write_head(
            &self.dir,
            &Head {
                sequence,
                digest: digest_line(line),
            },
        )
    }
}

pub fn write_head(dir: &Path, head: &Head) -> Result<()> {
    let tmp = dir.join("HEAD.tmp");
    let text = serde_json::to_string(head).expect("head serializes");
    let mut f = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
    f.sync_data().map_err(|e| Error::io(&tmp, e))?;
    let path = dir.join(HEAD_FILE);
    fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
}

/// Reads a log directory without any repair.
pub fn read_contents(dir: &Path) -> Result<LogContents> {
    let path = dir.join(LOG_FILE);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    // Lines are decoded one by one and lossily: a damaged byte must surface
    // as a chain break at its own line, not as a failure to read the file.
    let mut lines: Vec<String> = bytes
        .split(|&b| b == b'\n')
        .map(|l| String::from_utf8_lossy(l).into_owned())
        .collect();
    // A well-formed log ends with a newline, leaving one empty tail segment.
    // Anything else is a torn final line, kept so verification can flag it.
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    let head_path = dir.join(HEAD_FILE);
    let head = match fs::read_to_string(&head_path) {
        Ok(text) => Some(serde_json::from_str(&text).map_err(|e| Error::CorruptFile {
            path: head_path.display().to_string(),
            reason: e.to_string(),
        })?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(Error::io(&head_path, e)),
    };
    Ok(LogContents { lines, head })
}

/// Reads a log directory, completing an append that was interrupted after the
/// event line reached disk but before the head moved, and dropping a torn
/// final line that the head never covered.
pub fn recover(dir: &Path) -> Result<LogContents> {
    let path = dir.join(LOG_FILE);
    let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let mut contents = read_contents(dir)?;
    let Some(head) = contents.head.clone() else {
        return Ok(contents);
    };
    let complete = raw.iter().filter(|&&b| b == b'\n').count() as u64;
    let torn = !raw.is_empty() && raw.last() != Some(&b'\n');
    if torn && head.sequence == complete {
        let keep = raw.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let f = OpenOptions::new()
            .write(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        f.set_len(keep as u64).map_err(|e| Error::io(&path, e))?;
        f.sync_data().map_err(|e| Error::io(&path, e))?;
        contents.lines.pop();
    }
    let n = contents.lines.len() as u64;
    if !torn && n == head.sequence + 1 {
        let covered = match head.sequence {
            0 => true,
            s => digest_line(&contents.lines[s as usize - 1]) == head.digest,
        };
        if covered {
            let last = contents.lines.last().expect("n >= 1");
            let new_head = Head {
                sequence: n,
                digest: digest_line(last),
            };
            write_head(dir, &new_head)?;
            contents.head = Some(new_head);
        }
    }
    Ok(contents)
}
