// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Append-only record log.
//!
//! Each frame is `[len: u32 LE][crc32(payload): u32 LE][payload]`. A frame
//! that is short or fails its checksum ends the log; opening truncates the
//! file there, which drops a write torn by a crash before it was
//! acknowledged.

use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::Path;

const HEADER: usize = 8;
/// Upper bound on a single frame; larger lengths are treated as corruption.
pub const MAX_FRAME: usize = 256 << 20;

pub struct Journal {
    file: File,
}

pub struct Recovered {
    pub journal: Journal,
    pub records: Vec<Vec<u8>>,
    /// Bytes dropped from a damaged tail.
    pub truncated: u64,
}

impl Journal {
    pub fn open(path: &Path) -> io::Result<Recovered> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let (records, good) = scan(&bytes);
        let truncated = (bytes.len() - good) as u64;
        if truncated > 0 {
            file.set_len(good as u64)?;
            file.sync_all()?;
        }
        file.seek(SeekFrom::End(0))?;
        Ok(Recovered {
            journal: Journal { file },
            records,
            truncated,
        })
    }

    /// Appends one frame and flushes it to stable storage.
    pub fn append(&mut self, payload: &[u8]) -> io::Result<()> {
        if payload.len() > MAX_FRAME {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "record too large"));
        }
        let mut frame = Vec::with_capacity(HEADER + payload.len());
        frame.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        frame.extend_from_slice(&crc32fast::hash(payload).to_le_bytes());
        frame.extend_from_slice(payload);
        self.file.write_all(&frame)?;
        self.file.sync_data()
    }
}

/// Valid payloads and the length of the valid prefix.
fn scan(bytes: &[u8]) -> (Vec<Vec<u8>>, usize) {
    let mut records = Vec::new();
    let mut at = 0;
    while bytes.len() - at >= HEADER {
        let len = u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        let crc = u32::from_le_bytes(bytes[at + 4..at + 8].try_into().unwrap());
        let start = at + HEADER;
        if len > MAX_FRAME || bytes.len() - start < len {
            break;
        }
        let payload = &bytes[start..start + len];
        if crc32fast::hash(payload) != crc {
            break;
        }
        records.push(payload.to_vec());
        at = start + len;
    }
    (records, at)
}
