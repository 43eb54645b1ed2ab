//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! | offset | size | content                         |
//! |--------|------|---------------------------------|
//! | 0      | 4    | `dim` as u32                    |
//! | 4      | 4    | `n` as u32                      |
//! | 8      | 8    | `length` as f64                 |
//! | 16     | 4    | boundary tag u32 (0 periodic, 1 dirichlet-zero) |
//! | 20     | 8·n^dim | values as f64, row-major     |

use std::io::{Read, Write};

use super::{Boundary, Field, Grid};
use crate::error::{Error, Result};

pub const SNAPSHOT_HEADER_BYTES: usize = 20;

pub fn write_snapshot<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    let mut buf = Vec::with_capacity(SNAPSHOT_HEADER_BYTES + 8 * g.len());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.n() as u32).to_le_bytes());
    buf.extend_from_slice(&g.length().to_le_bytes());
    buf.extend_from_slice(&g.boundary().tag().to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Field> {
    let mut head = [0u8; SNAPSHOT_HEADER_BYTES];
    r.read_exact(&mut head)
        .map_err(|e| Error::Format(format!("short header: {e}")))?;
    let dim = u32::from_le_bytes(head[0..4].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
    let length = f64::from_le_bytes(head[8..16].try_into().unwrap());
    let tag = u32::from_le_bytes(head[16..20].try_into().unwrap());
    let boundary =
        Boundary::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown boundary tag {tag}")))?;
    let grid = Grid::new(dim, n, length, boundary)?;

    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != 8 * grid.len() {
        return Err(Error::Format(format!(
            "expected {} value bytes, found {}",
            8 * grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Field::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_layout() {
        let g = Grid::periodic(2, 8, 3.5).unwrap();
        let f = Field::from_fn(g, |p| p[0] * 10.0 + p[1]).unwrap();
        let mut bytes = Vec::new();
        write_snapshot(&f, &mut bytes).unwrap();
        assert_eq!(bytes.len(), SNAPSHOT_HEADER_BYTES + 8 * 64);
        assert_eq!(&bytes[0..4], &2u32.to_le_bytes());
        assert_eq!(&bytes[4..8], &8u32.to_le_bytes());
        assert_eq!(&bytes[8..16], &3.5f64.to_le_bytes());
        assert_eq!(&bytes[16..20], &0u32.to_le_bytes());
        assert_eq!(&bytes[20..28], &f.values()[0].to_le_bytes());
        let back = read_snapshot(bytes.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_truncated_body() {
        let g = Grid::dirichlet(8, 1.0).unwrap();
        let f = Field::zeros(g);
        let mut bytes = Vec::new();
        write_snapshot(&f, &mut bytes).unwrap();
        bytes.pop();
        assert!(matches!(read_snapshot(bytes.as_slice()), Err(Error::Format(_))));
    }
}
