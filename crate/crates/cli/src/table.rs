//! Persistent multiplication table of special labels.
//!
//! One JSON-lines file per `(l, p, max)`: a header record, then one record
//! per unordered pair `x <= y` of determinant-free special labels of length
//! at most `max`, in enumeration order. Each record carries the SHA-256 of
//! its own content so damaged lines can be detected and recomputed.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qtilt_core::fusion::{label_product, ClassVector};
use qtilt_core::lattice::{special_labels, Params, TwistLabel};
use qtilt_core::{Exec, Result};

pub const FORMAT: &str = "qtilt-table";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub l: i64,
    pub p: i64,
    pub max: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub left: TwistLabel,
    pub right: TwistLabel,
    pub product: ClassVector,
    pub checksum: String,
}

#[derive(Serialize)]
struct Payload<'a> {
    left: &'a TwistLabel,
    right: &'a TwistLabel,
    product: &'a ClassVector,
}

fn checksum(left: &TwistLabel, right: &TwistLabel, product: &ClassVector) -> String {
    let bytes = serde_json::to_vec(&Payload {
        left,
        right,
        product,
    })
    .expect("payload serializes");
    hex::encode(Sha256::digest(&bytes))
}

impl Record {
    pub fn new(left: TwistLabel, right: TwistLabel, product: ClassVector) -> Self {
        let checksum = checksum(&left, &right, &product);
        Record {
            left,
            right,
            product,
            checksum,
        }
    }

    pub fn is_intact(&self) -> bool {
        self.checksum == checksum(&self.left, &self.right, &self.product)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub path: PathBuf,
    pub params: Params,
    pub max: i64,
    pub labels: usize,
    pub reused: usize,
    pub recomputed: usize,
    pub records: Vec<Record>,
}

#[derive(Debug)]
pub enum TableError {
    Io(PathBuf, io::Error),
    Math(qtilt_core::Error),
}

pub fn table_path(dir: &Path, params: Params, max: i64) -> PathBuf {
    dir.join(format!(
        "table-l{}-p{}-max{}.jsonl",
        params.ell(),
        params.p(),
        max
    ))
}

/// Valid records of an existing file keyed by pair, plus the number of
/// lines that had to be discarded. A missing file or a header mismatch
/// yields nothing to reuse.
fn load(path: &Path, header: &Header) -> (HashMap<(TwistLabel, TwistLabel), Record>, usize) {
    let Ok(text) = fs::read_to_string(path) else {
        return (HashMap::new(), 0);
    };
    let mut lines = text.lines();
    match lines.next().map(serde_json::from_str::<Header>) {
        Some(Ok(h)) if &h == header => {}
        Some(Ok(h)) => {
            log::warn!(
                "{}: header {:?} does not match, rebuilding",
                path.display(),
                h
            );
            return (HashMap::new(), 0);
        }
        _ => {
            log::warn!("{}: unreadable header, rebuilding", path.display());
            return (HashMap::new(), 0);
        }
    }
    let mut out = HashMap::new();
    let mut bad = 0;
    for line in lines {
        match serde_json::from_str::<Record>(line) {
            Ok(r) if r.is_intact() => {
                out.insert((r.left.clone(), r.right.clone()), r);
            }
            _ => bad += 1,
        }
    }
    (out, bad)
}

fn write_atomic(path: &Path, header: &Header, records: &[Record]) -> io::Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
        serde_json::to_writer(&mut f, header)?;
        f.write_all(b"\n")?;
        for r in records {
            serde_json::to_writer(&mut f, r)?;
            f.write_all(b"\n")?;
        }
        f.flush()?;
    }
    fs::rename(&tmp, path)
}

/// Bring the cached table for `(params, max)` up to date under `dir`.
pub fn build(
    dir: &Path,
    params: Params,
    max: i64,
    exec: Exec,
) -> std::result::Result<TableReport, TableError> {
    fs::create_dir_all(dir).map_err(|e| TableError::Io(dir.to_path_buf(), e))?;
    let path = table_path(dir, params, max);
    let header = Header {
        format: FORMAT.into(),
        version: VERSION,
        l: params.ell(),
        p: params.p(),
        max,
    };
    let labels = special_labels(params, max, None);
    let pairs: Vec<(usize, usize)> = (0..labels.len())
        .flat_map(|i| (i..labels.len()).map(move |j| (i, j)))
        .collect();
    let (mut have, discarded) = load(&path, &header);
    if discarded > 0 {
        log::warn!("{}: {discarded} corrupt records discarded", path.display());
    }
    let missing: Vec<(usize, usize)> = pairs
        .iter()
        .copied()
        .filter(|&(i, j)| !have.contains_key(&(labels[i].clone(), labels[j].clone())))
        .collect();
    let fresh: Vec<Result<Record>> = exec.map(&missing, |&(i, j)| {
        label_product(&labels[i], &labels[j], params)
            .map(|v| Record::new(labels[i].clone(), labels[j].clone(), v))
    });
    for r in fresh {
        let r = r.map_err(TableError::Math)?;
        have.insert((r.left.clone(), r.right.clone()), r);
    }
    let records: Vec<Record> = pairs
        .iter()
        .map(|&(i, j)| {
            have.remove(&(labels[i].clone(), labels[j].clone()))
                .expect("every pair computed")
        })
        .collect();
    log::info!(
        "{}: {} records, {} recomputed",
        path.display(),
        records.len(),
        missing.len()
    );
    write_atomic(&path, &header, &records).map_err(|e| TableError::Io(path.clone(), e))?;
    Ok(TableReport {
        path,
        params,
        max,
        labels: labels.len(),
        reused: pairs.len() - missing.len(),
        recomputed: missing.len(),
        records,
    })
}
