//! HEGF grid-field files.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content                          |
//! |--------|------|----------------------------------|
//! | 0      | 4    | magic `HEGF`                     |
//! | 4      | 4    | version `u32` (= 1)              |
//! | 8      | 4    | lattice size `n` `u32`           |
//! | 12     | 4    | rank `r` `u32`                   |
//! | 16     | 4    | field count `m` `u32`            |
//! | 20     | ...  | `m · n² · r²` pairs `(re, im)` of `f64` |
//!
//! Fields follow one another. Within a field nodes run row-major
//! (`iy · n + ix`) and within a node the matrix entries run row-major.

use crate::error::{CliError, Result};
use heflow_core::endo::{Mat, C64};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"HEGF";
pub const VERSION: u32 = 1;
const HEADER: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFields {
    pub n: usize,
    pub rank: usize,
    /// Each field holds `n²` matrices.
    pub fields: Vec<Vec<Mat>>,
}

impl GridFields {
    pub fn new(n: usize, rank: usize) -> Self {
        Self { n, rank, fields: Vec::new() }
    }

    pub fn push(&mut self, values: &[Mat]) {
        assert_eq!(values.len(), self.n * self.n, "field has the wrong node count");
        assert!(values.iter().all(|m| m.rank() == self.rank), "field has the wrong rank");
        self.fields.push(values.to_vec());
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let r = self.rank;
        let mut out = Vec::with_capacity(HEADER + self.fields.len() * self.n * self.n * r * r * 16);
        out.extend_from_slice(MAGIC);
        for v in [VERSION, self.n as u32, r as u32, self.fields.len() as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for f in &self.fields {
            for m in f {
                for i in 0..r {
                    for j in 0..r {
                        out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
                        out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
                    }
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        if bytes.len() < HEADER {
            return Err(format!("{} bytes, shorter than the header", bytes.len()));
        }
        if &bytes[..4] != MAGIC {
            return Err("bad magic".into());
        }
        let word = |k: usize| u32::from_le_bytes(bytes[4 * k..4 * k + 4].try_into().unwrap()) as usize;
        let (version, n, r, m) = (word(1), word(2), word(3), word(4));
        if version != VERSION as usize {
            return Err(format!("unsupported version {version}"));
        }
        if r == 0 {
            return Err("rank 0".into());
        }
        let expect = n
            .checked_mul(n)
            .and_then(|v| v.checked_mul(r * r * 16))
            .and_then(|v| v.checked_mul(m))
            .and_then(|v| v.checked_add(HEADER))
            .ok_or("header sizes overflow")?;
        if bytes.len() != expect {
            return Err(format!("{} bytes, header implies {expect}", bytes.len()));
        }
        let mut at = HEADER;
        let mut next = || {
            let v = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
            at += 8;
            v
        };
        let mut fields = Vec::with_capacity(m);
        for _ in 0..m {
            let mut f = Vec::with_capacity(n * n);
            for _ in 0..n * n {
                let mut mat = Mat::zeros(r);
                for i in 0..r {
                    for j in 0..r {
                        let re = next();
                        mat[(i, j)] = C64::new(re, next());
                    }
                }
                f.push(mat);
            }
            fields.push(f);
        }
        Ok(Self { n, rank: r, fields })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(crate::error::io(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(crate::error::io(path))?;
        Self::from_bytes(&bytes).map_err(|msg| CliError::Hegf {
            path: path.to_path_buf(),
            msg,
        })
    }
}
