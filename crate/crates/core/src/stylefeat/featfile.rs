//! Patch feature files shared with the external exporter.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "MGFT" | version: u16 | dim: u32 | patches per image: u16
//! repeated until EOF:
//!     id length: u32 | id: UTF-8 bytes | patches * dim f32
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

pub const FEATURE_MAGIC: &[u8; 4] = b"MGFT";
pub const FEATURE_VERSION: u16 = 1;
const MAX_ID_LEN: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    pub dim: usize,
    pub patches_per_image: usize,
    pub entries: Vec<(String, Vec<Vec<f32>>)>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedFeatureFile(msg.into())
}

fn short_read(e: std::io::Error, what: &str) -> Error {
    if e.kind() == ErrorKind::UnexpectedEof {
        malformed(format!("truncated {what}"))
    } else {
        malformed(format!("{what}: {e}"))
    }
}

pub fn read_patch_features<R: Read>(mut r: R) -> Result<FeatureFile> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| short_read(e, "header"))?;
    if &magic != FEATURE_MAGIC {
        return Err(malformed("bad magic"));
    }
    let version = r.read_u16::<LittleEndian>().map_err(|e| short_read(e, "header"))?;
    if version != FEATURE_VERSION {
        return Err(malformed(format!("unsupported version {version}")));
    }
    let dim = r.read_u32::<LittleEndian>().map_err(|e| short_read(e, "header"))? as usize;
    let patches = r.read_u16::<LittleEndian>().map_err(|e| short_read(e, "header"))? as usize;
    if dim == 0 || patches == 0 {
        return Err(malformed("zero dimension or patch count"));
    }

    let mut entries = Vec::new();
    loop {
        let mut len_buf = [0u8; 4];
        // A clean EOF is only allowed on an entry boundary.
        let mut got = 0;
        while got < 4 {
            match r.read(&mut len_buf[got..]) {
                Ok(0) => break,
                Ok(k) => got += k,
                Err(e) if e.kind() == ErrorKind::Interrupted => {}
                Err(e) => return Err(short_read(e, "entry")),
            }
        }
        if got == 0 {
            break;
        }
        if got < 4 {
            return Err(malformed("truncated id length"));
        }
        let id_len = u32::from_le_bytes(len_buf);
        if id_len > MAX_ID_LEN {
            return Err(malformed(format!("id length {id_len} too large")));
        }
        let mut id = vec![0u8; id_len as usize];
        r.read_exact(&mut id).map_err(|e| short_read(e, "id"))?;
        let id = String::from_utf8(id).map_err(|_| malformed("id is not UTF-8"))?;
        let mut vectors = Vec::with_capacity(patches);
        for _ in 0..patches {
            let mut v = vec![0f32; dim];
            r.read_f32_into::<LittleEndian>(&mut v)
                .map_err(|e| short_read(e, "feature block"))?;
            vectors.push(v);
        }
        entries.push((id, vectors));
    }
    Ok(FeatureFile {
        dim,
        patches_per_image: patches,
        entries,
    })
}

pub fn write_patch_features<W: Write>(mut w: W, file: &FeatureFile) -> Result<()> {
    let dim = u32::try_from(file.dim).map_err(|_| malformed("dimension exceeds u32"))?;
    let patches =
        u16::try_from(file.patches_per_image).map_err(|_| malformed("patch count exceeds u16"))?;
    let io = |e: std::io::Error| malformed(format!("write failed: {e}"));
    w.write_all(FEATURE_MAGIC).map_err(io)?;
    w.write_u16::<LittleEndian>(FEATURE_VERSION).map_err(io)?;
    w.write_u32::<LittleEndian>(dim).map_err(io)?;
    w.write_u16::<LittleEndian>(patches).map_err(io)?;
    for (id, vectors) in &file.entries {
        if vectors.len() != file.patches_per_image {
            return Err(Error::FeatureDimensionMismatch {
                expected: file.patches_per_image,
                actual: vectors.len(),
            });
        }
        w.write_u32::<LittleEndian>(id.len() as u32).map_err(io)?;
        w.write_all(id.as_bytes()).map_err(io)?;
        for v in vectors {
            if v.len() != file.dim {
                return Err(Error::FeatureDimensionMismatch {
                    expected: file.dim,
                    actual: v.len(),
                });
            }
            for &x in v {
                w.write_f32::<LittleEndian>(x).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

/// Per-image patch feature lists exactly as stored.
pub fn load_patch_features(path: &Path) -> Result<FeatureFile> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_patch_features(BufReader::new(f))
}

pub fn save_patch_features(path: &Path, file: &FeatureFile) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_patch_features(BufWriter::new(f), file)
}
