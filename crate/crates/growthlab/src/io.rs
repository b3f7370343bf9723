//! Serialization helpers: hex-encoded naturals, atomic file writes, and the
//! CSV table format shared by the growth-function builder and the algebra
//! oracle.

use crate::exact::Nat;
use num_traits::Num;
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed {what}: {detail}")]
    Malformed { what: String, detail: String },
}

/// Lowercase hex with `0x` prefix; the on-disk form of every big value.
pub fn nat_to_hex(n: &Nat) -> String {
    format!("{:#x}", n)
}

pub fn nat_from_hex(s: &str) -> Result<Nat, IoError> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    Nat::from_str_radix(digits, 16).map_err(|e| IoError::Malformed {
        what: "hex natural".into(),
        detail: format!("{s:?}: {e}"),
    })
}

/// Writes through a temp file in the target directory, then renames into
/// place, so readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| IoError::Io(e.error))?;
    // Temp files are created 0600; artifacts should be world-readable.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        fs::set_permissions(path, fs::Permissions::from_mode(0o644))?;
    }
    Ok(())
}

/// One row of the shared table format `x,segment,f_hex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub x: u64,
    pub segment: String,
    pub f: Nat,
}

pub fn write_table_csv<I>(path: &Path, rows: I) -> Result<(), IoError>
where
    I: IntoIterator<Item = TableRow>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["x", "segment", "f_hex"])
            .map_err(csv_err)?;
        for row in rows {
            w.write_record([row.x.to_string(), row.segment, nat_to_hex(&row.f)])
                .map_err(csv_err)?;
        }
        w.flush()?;
    }
    atomic_write(path, &buf)
}

pub fn read_table_csv(path: &Path) -> Result<Vec<TableRow>, IoError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    {
        let headers = r.headers().map_err(csv_err)?;
        if headers.iter().collect::<Vec<_>>() != ["x", "segment", "f_hex"] {
            return Err(IoError::Malformed {
                what: "table csv".into(),
                detail: format!("unexpected header {:?}", headers),
            });
        }
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 3 {
            return Err(IoError::Malformed {
                what: "table csv".into(),
                detail: format!("row has {} fields", rec.len()),
            });
        }
        let x: u64 = rec[0].parse().map_err(|e| IoError::Malformed {
            what: "table csv".into(),
            detail: format!("bad index {:?}: {e}", &rec[0]),
        })?;
        rows.push(TableRow {
            x,
            segment: rec[1].to_string(),
            f: nat_from_hex(&rec[2])?,
        });
    }
    Ok(rows)
}

fn csv_err(e: csv::Error) -> IoError {
    IoError::Malformed {
        what: "csv".into(),
        detail: e.to_string(),
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| IoError::Malformed {
        what: "json".into(),
        detail: e.to_string(),
    })?;
    body.push(b'\n');
    atomic_write(path, &body)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let body = fs::read(path)?;
    serde_json::from_slice(&body).map_err(|e| IoError::Malformed {
        what: format!("json file {}", path.display()),
        detail: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        for v in [0u64, 1, 15, 16, 536, u64::MAX] {
            let n = Nat::from(v);
            assert_eq!(nat_from_hex(&nat_to_hex(&n)).unwrap(), n);
        }
        assert_eq!(nat_to_hex(&Nat::from(601u64)), "0x259");
        assert!(nat_from_hex("0xzz").is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![
            TableRow {
                x: 1,
                segment: "seed".into(),
                f: Nat::from(2u64),
            },
            TableRow {
                x: 25,
                segment: "geom:1".into(),
                f: Nat::from(601u64),
            },
        ];
        write_table_csv(&path, rows.clone()).unwrap();
        assert_eq!(read_table_csv(&path).unwrap(), rows);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,segment,f_hex\n1,seed,0x2\n"));
    }
}
