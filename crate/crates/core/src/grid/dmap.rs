//! `DMAP v1` binary map files.
//!
//! Little-endian layout: magic `DMAP`, `u32` version (1), `u32` nx, ny, nz,
//! `f64` origin\[3\], `f64` voxel size, then nx·ny·nz `f64` values x-fastest.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::DensityMap;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"DMAP";
pub const VERSION: u32 = 1;

pub fn write<W: Write>(map: &DensityMap, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for d in map.dims() {
        let d = u32::try_from(d).map_err(|_| Error::Format(format!("dimension {d} exceeds u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    for o in map.origin() {
        w.write_all(&o.to_le_bytes())?;
    }
    w.write_all(&map.voxel_size().to_le_bytes())?;
    for v in map.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn to_bytes(map: &DensityMap) -> Vec<u8> {
    let mut buf = Vec::with_capacity(48 + 8 * map.len());
    write(map, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read<R: Read>(mut r: R) -> Result<DensityMap> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("missing DMAP magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported DMAP version {version}")));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = read_u32(&mut r)? as usize;
    }
    let mut origin = [0.0; 3];
    for o in &mut origin {
        *o = read_f64(&mut r)?;
    }
    let voxel_size = read_f64(&mut r)?;
    let len: usize = dims.iter().product();
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    if raw.len() != 8 * len {
        return Err(Error::Format(format!("expected {} value bytes for dims {dims:?}, found {}", 8 * len, raw.len())));
    }
    let values = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    DensityMap::new(dims, origin, voxel_size, values)
}

pub fn save(map: &DensityMap, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_bytes(map))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<DensityMap> {
    read(fs::read(path)?.as_slice())
}
