//! Little-endian debug dump: magic `MPS1`, `u32` site count, `f64` scale,
//! then per site `u32 left`, `u32 right` and `2·left·right` `f64` values.

use std::io::{self, Read, Write};

use super::state::{Mps, Tensor3};

const MAGIC: &[u8; 4] = b"MPS1";

impl Mps {
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.n_sites() as u32).to_le_bytes())?;
        w.write_all(&self.scale().to_le_bytes())?;
        for t in self.sites() {
            w.write_all(&(t.left() as u32).to_le_bytes())?;
            w.write_all(&(t.right() as u32).to_le_bytes())?;
            for v in t.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> io::Result<Mps> {
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not an MPS dump".into()));
        }
        let n = read_u32(&mut r)? as usize;
        let scale = read_f64(&mut r)?;
        let mut sites = Vec::with_capacity(n);
        for _ in 0..n {
            let left = read_u32(&mut r)? as usize;
            let right = read_u32(&mut r)? as usize;
            let data = (0..left * 2 * right)
                .map(|_| read_f64(&mut r))
                .collect::<io::Result<Vec<f64>>>()?;
            sites.push(Tensor3::from_data(left, right, data).map_err(|e| bad(e.to_string()))?);
        }
        Mps::from_sites(sites, scale).map_err(|e| bad(e.to_string()))
    }
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
